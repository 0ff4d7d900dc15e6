"""Exact dense linear algebra over GF(p^m).

Elements are plain ints in ``range(q)``.  For prime fields the int is the
residue; for extension fields it encodes the coefficient vector of the
residue polynomial in base p (least significant digit = constant term).
Extension moduli are picked deterministically: the lexicographically first
monic irreducible polynomial of the requested degree, so the same q always
yields the same field tables.

Matrices are small and dense (a few dozen rows at most), so everything is
straight Gaussian elimination with a fixed pivot rule: first nonzero entry
in column order.  That makes every reduced form, rank and solution
reproducible, which the golden tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from .errors import ParseError, ShapeError

MAX_FIELD_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q = p**m, or raise ParseError."""
    if q < 2:
        raise ParseError(f"field order must be >= 2, got {q}")
    for p in range(2, q + 1):
        if not is_prime(p):
            continue
        if q % p:
            continue
        m = 0
        n = q
        while n % p == 0:
            n //= p
            m += 1
        if n == 1:
            return p, m
        raise ParseError(f"{q} is not a prime power")
    raise ParseError(f"{q} is not a prime power")


def next_prime_power(n: int) -> int:
    """Smallest prime power strictly greater than n."""
    q = max(n + 1, 2)
    while True:
        try:
            factor_prime_power(q)
            return q
        except ParseError:
            q += 1


# ---------------------------------------------------------------------------
# polynomial helpers over F_p, coefficients little-endian


def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, mod, p):
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                res[i + j] = (res[i + j] + ai * bj) % p
    return _poly_divmod_rem(res, mod, p)


def _poly_divmod_rem(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) >= len(mod):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(mod)
        if coef:
            for i, c in enumerate(mod):
                a[shift + i] = (a[shift + i] - coef * c) % p
        a.pop()
        _poly_trim(a)
        if not a:
            break
    return _poly_trim(a)


def _poly_powmod(a, e, mod, p):
    result = [1]
    base = _poly_divmod_rem(list(a), mod, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        a = _poly_divmod_rem(a, b, p)
        a, b = b, a
    return a


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _poly_trim([(x - y) % p for x, y in zip(a, b)])


def _is_irreducible(mod, p):
    """Rabin irreducibility test for a monic polynomial over F_p."""
    m = len(mod) - 1
    x = [0, 1]
    # x^(p^m) == x mod f is necessary
    g = list(x)
    for _ in range(m):
        g = _poly_powmod(g, p, mod, p)
    if _poly_sub(g, x, p):
        return False
    # no factor of degree m/d for any prime divisor d of m
    for d in _prime_divisors(m):
        g = list(x)
        for _ in range(m // d):
            g = _poly_powmod(g, p, mod, p)
        if len(_poly_gcd(_poly_sub(g, x, p), mod, p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def _default_modulus(p: int, m: int) -> tuple[int, ...]:
    """First monic irreducible of degree m over F_p in lex coefficient order."""
    for t in range(p ** m):
        coeffs = []
        n = t
        for _ in range(m):
            coeffs.append(n % p)
            n //= p
        mod = coeffs + [1]
        if _is_irreducible(mod, p):
            return tuple(mod)
    raise ParseError(f"no irreducible modulus of degree {m} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    """A finite field GF(p^m) with a fixed modulus for m > 1."""

    p: int
    m: int = 1
    modulus: tuple[int, ...] = dc_field(default=())

    @property
    def q(self) -> int:
        return self.p ** self.m

    def __str__(self) -> str:
        return str(self.p) if self.m == 1 else f"{self.p}^{self.m}"

    # -- element arithmetic -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.m):
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.m):
            out += ((-(a % p)) % p) * mult
            a //= p
            mult *= p
        return out

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.p
        pa = self._digits(a)
        pb = self._digits(b)
        return self._encode(_poly_mulmod(pa, pb, list(self.modulus), self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def _digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.m):
            out.append(a % p)
            a //= p
        return _poly_trim(out)

    def _encode(self, coeffs) -> int:
        out = 0
        for c in reversed(coeffs):
            out = out * self.p + c
        return out


@lru_cache(maxsize=None)
def field(q: int) -> FieldSpec:
    """Build the canonical GF(q) for a prime power q <= 2**16."""
    if q > MAX_FIELD_ORDER:
        raise ParseError(f"field order {q} exceeds supported maximum {MAX_FIELD_ORDER}")
    p, m = factor_prime_power(q)
    if m == 1:
        return FieldSpec(p, 1, ())
    return FieldSpec(p, m, _default_modulus(p, m))


# ---------------------------------------------------------------------------
# matrices


class GfMatrix:
    """Dense row-major matrix over a FieldSpec."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, fs: FieldSpec, data: list[list[int]]):
        self.field = fs
        self.data = [list(row) for row in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        for row in self.data:
            if len(row) != self.cols:
                raise ShapeError("ragged matrix rows")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, fs: FieldSpec, rows: int, cols: int) -> "GfMatrix":
        m = cls.__new__(cls)
        m.field = fs
        m.rows = rows
        m.cols = cols
        m.data = [[0] * cols for _ in range(rows)]
        return m

    @classmethod
    def identity(cls, fs: FieldSpec, n: int) -> "GfMatrix":
        m = cls.zeros(fs, n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @classmethod
    def column(cls, fs: FieldSpec, entries: list[int]) -> "GfMatrix":
        return cls(fs, [[e] for e in entries])

    # -- basics --------------------------------------------------------------

    def copy(self) -> "GfMatrix":
        return GfMatrix(self.field, self.data)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GfMatrix)
            and self.field == other.field
            and self.data == other.data
        )

    def __repr__(self) -> str:
        return f"GfMatrix({self.field}, {self.data})"

    def __add__(self, other: "GfMatrix") -> "GfMatrix":
        self._check_same_shape(other)
        add = self.field.add
        return GfMatrix(
            self.field,
            [
                [add(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def __sub__(self, other: "GfMatrix") -> "GfMatrix":
        self._check_same_shape(other)
        sub = self.field.sub
        return GfMatrix(
            self.field,
            [
                [sub(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def __matmul__(self, other: "GfMatrix") -> "GfMatrix":
        if self.cols != other.rows:
            raise ShapeError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        fs = self.field
        out = GfMatrix.zeros(fs, self.rows, other.cols)
        if fs.m == 1:
            p = fs.p
            bdata = other.data
            for i, arow in enumerate(self.data):
                orow = out.data[i]
                for k, a in enumerate(arow):
                    if a:
                        brow = bdata[k]
                        for j in range(other.cols):
                            orow[j] = (orow[j] + a * brow[j]) % p
        else:
            mul, add = fs.mul, fs.add
            for i, arow in enumerate(self.data):
                orow = out.data[i]
                for k, a in enumerate(arow):
                    if a:
                        brow = other.data[k]
                        for j in range(other.cols):
                            orow[j] = add(orow[j], mul(a, brow[j]))
        return out

    def scale(self, c: int) -> "GfMatrix":
        mul = self.field.mul
        return GfMatrix(self.field, [[mul(c, a) for a in row] for row in self.data])

    def transpose(self) -> "GfMatrix":
        return GfMatrix(self.field, [list(col) for col in zip(*self.data)] if self.rows else [])

    def hstack(self, other: "GfMatrix") -> "GfMatrix":
        if self.rows != other.rows:
            raise ShapeError("row count mismatch in hstack")
        return GfMatrix(self.field, [ra + rb for ra, rb in zip(self.data, other.data)])

    def vstack(self, other: "GfMatrix") -> "GfMatrix":
        if self.cols != other.cols:
            raise ShapeError("column count mismatch in vstack")
        return GfMatrix(self.field, self.data + other.data)

    def submatrix(self, row_idx, col_idx) -> "GfMatrix":
        return GfMatrix(self.field, [[self.data[i][j] for j in col_idx] for i in row_idx])

    def row_block(self, start: int, count: int) -> "GfMatrix":
        return GfMatrix(self.field, self.data[start : start + count])

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.data for a in row)

    def _check_same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeError("shape mismatch")


def hstack_all(mats: list[GfMatrix]) -> GfMatrix:
    out = mats[0]
    for m in mats[1:]:
        out = out.hstack(m)
    return out


def vstack_all(mats: list[GfMatrix]) -> GfMatrix:
    out = mats[0]
    for m in mats[1:]:
        out = out.vstack(m)
    return out


def block_diag(mats: list[GfMatrix]) -> GfMatrix:
    fs = mats[0].field
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = GfMatrix.zeros(fs, rows, cols)
    r0 = c0 = 0
    for m in mats:
        for i in range(m.rows):
            out.data[r0 + i][c0 : c0 + m.cols] = list(m.data[i])
        r0 += m.rows
        c0 += m.cols
    return out


def _eliminate(data: list[list[int]], fs: FieldSpec) -> tuple[list[list[int]], list[int]]:
    """In-place reduced row echelon form; returns (data, pivot column list)."""
    rows = len(data)
    cols = len(data[0]) if rows else 0
    inv, mul, sub = fs.inv, fs.mul, fs.sub
    pivots = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if data[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        data[r], data[pivot] = data[pivot], data[r]
        scale = inv(data[r][c])
        if scale != 1:
            data[r] = [mul(scale, a) for a in data[r]]
        for i in range(rows):
            if i != r and data[i][c]:
                f = data[i][c]
                row_r = data[r]
                data[i] = [sub(a, mul(f, b)) for a, b in zip(data[i], row_r)]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return data, pivots


def rank(a: GfMatrix) -> int:
    """Matrix rank by Gaussian elimination over the field."""
    _, pivots = _eliminate([list(row) for row in a.data], a.field)
    return len(pivots)


def rref(a: GfMatrix) -> tuple[GfMatrix, list[int]]:
    data, pivots = _eliminate([list(row) for row in a.data], a.field)
    return GfMatrix(a.field, data), pivots


def solve_right(a: GfMatrix, b: GfMatrix) -> GfMatrix | None:
    """Some X with A @ X = B, or None when no solution exists.

    A solution exists exactly when the column span of B lies inside the
    column span of A.  Free variables are set to zero, so the result is
    deterministic.
    """
    if a.rows != b.rows:
        raise ShapeError("solve_right requires equal row counts")
    aug, pivots = _eliminate([ra + rb for ra, rb in zip(a.data, b.data)], a.field)
    n = a.cols
    if any(c >= n for c in pivots):
        return None  # a pivot landed in the B block: inconsistent system
    x = GfMatrix.zeros(a.field, n, b.cols)
    for r, c in enumerate(pivots):
        x.data[c] = aug[r][n:]
    return x


def inverse(a: GfMatrix) -> GfMatrix | None:
    """Inverse of a square matrix; None when singular."""
    if a.rows != a.cols:
        raise ShapeError("inverse requires a square matrix")
    return solve_right(a, GfMatrix.identity(a.field, a.rows))


def kron(a: GfMatrix, b: GfMatrix) -> GfMatrix:
    fs = a.field
    mul = fs.mul
    out = GfMatrix.zeros(fs, a.rows * b.rows, a.cols * b.cols)
    for i in range(a.rows):
        for j in range(a.cols):
            aij = a.data[i][j]
            if aij == 0:
                continue
            for k in range(b.rows):
                orow = out.data[i * b.rows + k]
                brow = b.data[k]
                for l in range(b.cols):
                    if brow[l]:
                        orow[j * b.cols + l] = mul(aij, brow[l])
    return out


def column_span_contains(a: GfMatrix, b: GfMatrix) -> bool:
    """True iff every column of B lies in the column span of A."""
    if a.rows != b.rows:
        raise ShapeError("column_span_contains requires equal row counts")
    return rank(a.hstack(b)) == rank(a)


def subspaces_intersect_trivially(a: GfMatrix, b: GfMatrix) -> bool:
    """True iff the column spans of A and B meet only in the zero vector."""
    if a.rows != b.rows:
        raise ShapeError("subspace test requires equal row counts")
    return rank(a.hstack(b)) == rank(a) + rank(b)


# ---------------------------------------------------------------------------
# text format: `matrix <rows> <cols> over <p>[^m]` followed by row lines


def parse_matrix(text: str) -> GfMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty matrix document")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "matrix" or head[3] != "over":
        raise ParseError(f"bad matrix header: {lines[0]!r}")
    try:
        rows, cols = int(head[1]), int(head[2])
    except ValueError as exc:
        raise ParseError(f"bad matrix dimensions: {lines[0]!r}") from exc
    spec = head[4]
    if "^" in spec:
        p_str, m_str = spec.split("^", 1)
        q = int(p_str) ** int(m_str)
    else:
        q = int(spec)
    fs = field(q)
    if len(lines) - 1 != rows:
        raise ParseError(f"expected {rows} matrix rows, found {len(lines) - 1}")
    data = []
    for ln in lines[1:]:
        row = [int(tok) for tok in ln.split()]
        if len(row) != cols:
            raise ParseError(f"expected {cols} entries per row, got {len(row)}")
        if any(not 0 <= v < fs.q for v in row):
            raise ParseError("matrix entry out of field range")
        data.append(row)
    return GfMatrix(fs, data)


def format_matrix(a: GfMatrix) -> str:
    head = f"matrix {a.rows} {a.cols} over {a.field}"
    return "\n".join([head] + [" ".join(str(v) for v in row) for row in a.data]) + "\n"
