"""Secure network function computation: capacity bounds, linear secure
network code construction, and information-theoretic verification."""

from .cut_lattice import (
    BoundValue,
    algorithm2_bound,
    bruteforce_linear_bound,
    enumerate_primary_wiretaps,
    omega,
    primary_global_cuts,
    primary_global_cuts_oracle,
    primary_mincut_sink_side,
    primary_mincut_source_side,
)
from .code_builder import (
    CodeParameters,
    LinearSecureCode,
    TransformMatrix,
    apply_transform,
    build_base_code,
    build_security_matrix,
    capacity_lower_bound,
    field_size_bound,
    network_mincut,
    preprocess_target,
    search_transform,
    select_b_vectors,
    verify_transform,
)
from .function_table import (
    Alphabet,
    Partition,
    TabularFunction,
    combined_upper_bound,
    entropy_uniform,
    general_upper_bound,
    induced_partition,
    maximal_common_function,
    strong_decomposition,
    theorem2_upper_bound,
)
from .gf_linalg import FieldSpec, GfMatrix, field, next_prime_power
from .graph_core import (
    Network,
    SourceProfile,
    edge_disjoint_paths,
    mincut_node_to_node,
    mincut_to_edgeset,
    parse_network,
    reverse_network,
    source_profile,
    validate_network,
)
from .verifier import (
    SecurityReport,
    TabularCode,
    check_computability,
    check_security_algebraic,
    full_report,
    mutual_information_oracle,
    simulate,
)

__version__ = "0.1.0"
