"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` so the CLI can emit
it in JSON without string-matching Python messages.
"""


class SecnetfcError(Exception):
    """Base class for all library errors."""

    code = "error"


class NetworkValidationError(SecnetfcError):
    code = "invalid_network"


class CycleDetected(NetworkValidationError):
    code = "cycle_detected"


class SourceHasInEdge(NetworkValidationError):
    code = "source_has_in_edge"


class SinkHasOutEdge(NetworkValidationError):
    code = "sink_has_out_edge"


class NodeCannotReachSink(NetworkValidationError):
    code = "node_cannot_reach_sink"


class DuplicateEdgeId(NetworkValidationError):
    code = "duplicate_edge_id"


class ParseError(SecnetfcError):
    code = "parse_error"


class ShapeError(SecnetfcError):
    code = "shape_mismatch"


class DomainMismatch(SecnetfcError):
    code = "domain_mismatch"


class NotACutSet(SecnetfcError):
    code = "not_a_cut_set"


class MissingZeroElement(SecnetfcError):
    code = "missing_zero_element"


class NotFullColumnRank(SecnetfcError):
    code = "not_full_column_rank"


class InstanceTooLarge(SecnetfcError):
    code = "instance_too_large"


class LevelTooLarge(SecnetfcError):
    code = "level_too_large"


class InsufficientConnectivity(SecnetfcError):
    code = "insufficient_connectivity"


class RateExceedsMincut(SecnetfcError):
    code = "rate_exceeds_mincut"


class MulticastConstructionFailed(SecnetfcError):
    code = "multicast_construction_failed"


class FieldTooSmall(SecnetfcError):
    code = "field_too_small"


class SearchExhausted(SecnetfcError):
    code = "search_exhausted"


class SecurityLevelTooHigh(SecnetfcError):
    code = "security_level_too_high"
