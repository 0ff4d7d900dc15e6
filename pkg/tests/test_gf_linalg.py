import random
from itertools import product

import pytest

from secnetfc import gf_linalg as gl
from secnetfc.errors import ParseError, ShapeError


def test_prime_field_arithmetic():
    f5 = gl.field(5)
    for a in range(5):
        for b in range(5):
            assert f5.add(a, b) == (a + b) % 5
            assert f5.mul(a, b) == (a * b) % 5
    for a in range(1, 5):
        assert f5.mul(a, f5.inv(a)) == 1


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27, 49, 64, 128, 121])
def test_extension_field_is_a_field(q):
    fs = gl.field(q)
    assert fs.q == q
    rng = random.Random(q)
    elems = list(range(q)) if q <= 32 else [rng.randrange(q) for _ in range(24)]
    for a in elems:
        if a:
            assert fs.mul(a, fs.inv(a)) == 1
    for _ in range(40):
        a, b, c = (rng.randrange(q) for _ in range(3))
        assert fs.mul(a, fs.add(b, c)) == fs.add(fs.mul(a, b), fs.mul(a, c))
        assert fs.mul(a, b) == fs.mul(b, a)
        assert fs.mul(fs.mul(a, b), c) == fs.mul(a, fs.mul(b, c))


def test_modulus_is_deterministic():
    assert gl.field(4).modulus == (1, 1, 1)
    assert gl.field(8).modulus == (1, 1, 0, 1)
    assert gl.field(4) is gl.field(4)


def test_field_rejects_non_prime_powers():
    with pytest.raises(ParseError):
        gl.field(6)
    with pytest.raises(ParseError):
        gl.field(1)


def test_next_prime_power():
    assert gl.next_prime_power(45) == 47
    assert gl.next_prime_power(47) == 49
    assert gl.next_prime_power(48) == 49
    assert gl.next_prime_power(1) == 2


def test_rank_identity_and_column_vector():
    f3 = gl.field(3)
    assert gl.rank(gl.GfMatrix.identity(f3, 4)) == 4
    assert gl.rank(gl.GfMatrix(f3, [[1], [1], [2]])) == 1


def test_rank_against_row_space_enumeration():
    # the row span of a rank-r matrix over F_q has exactly q^r vectors
    rng = random.Random(5)
    f5 = gl.field(5)
    m = gl.GfMatrix(f5, [[rng.randrange(5) for _ in range(7)] for _ in range(5)])
    r = gl.rank(m)
    span = set()
    for coefs in product(range(5), repeat=5):
        vec = [0] * 7
        for c, row in zip(coefs, m.data):
            for j in range(7):
                vec[j] = (vec[j] + c * row[j]) % 5
        span.add(tuple(vec))
    assert len(span) == 5 ** r


def test_rank_transpose_and_subadditivity():
    rng = random.Random(11)
    f3 = gl.field(3)
    for _ in range(25):
        a = gl.GfMatrix(f3, [[rng.randrange(3) for _ in range(4)] for _ in range(3)])
        b = gl.GfMatrix(f3, [[rng.randrange(3) for _ in range(2)] for _ in range(3)])
        assert gl.rank(a) == gl.rank(a.transpose())
        assert gl.rank(a.hstack(b)) <= gl.rank(a) + gl.rank(b)


def test_solve_right_invertible_and_zero():
    f3 = gl.field(3)
    a = gl.GfMatrix(f3, [[1, 2], [0, 1]])
    b = gl.GfMatrix(f3, [[2], [1]])
    x = gl.solve_right(a, b)
    assert (a @ x) == b
    zero = gl.GfMatrix.zeros(f3, 2, 1)
    assert (a @ gl.solve_right(a, zero)) == zero


def test_solve_right_unsolvable_and_shape():
    f3 = gl.field(3)
    a = gl.GfMatrix(f3, [[1, 0], [0, 0]])
    assert gl.solve_right(a, gl.GfMatrix(f3, [[0], [1]])) is None
    with pytest.raises(ShapeError):
        gl.solve_right(a, gl.GfMatrix(f3, [[1]]))


def test_inverse_published_pair():
    f3 = gl.field(3)
    b_inv = gl.GfMatrix(f3, [[1, 0, 0], [1, 1, 1], [0, 1, 0]])
    b = gl.inverse(b_inv)
    assert b.data == [[1, 0, 0], [0, 0, 1], [2, 1, 2]]
    assert (b @ b_inv) == gl.GfMatrix.identity(f3, 3)


def test_inverse_singular_returns_none():
    f2 = gl.field(2)
    assert gl.inverse(gl.GfMatrix(f2, [[1, 1], [1, 1]])) is None
    with pytest.raises(ShapeError):
        gl.inverse(gl.GfMatrix(f2, [[1, 0]]))


def test_inverse_random_roundtrip():
    rng = random.Random(3)
    f7 = gl.field(7)
    eye = gl.GfMatrix.identity(f7, 3)
    found = 0
    while found < 10:
        m = gl.GfMatrix(f7, [[rng.randrange(7) for _ in range(3)] for _ in range(3)])
        mi = gl.inverse(m)
        if mi is not None:
            assert (mi @ m) == eye
            found += 1


def test_kron_definition():
    f3 = gl.field(3)
    row = gl.GfMatrix(f3, [[1, 1]])
    k = gl.kron(row, gl.GfMatrix.identity(f3, 2))
    assert k.data == [[1, 0, 1, 0], [0, 1, 0, 1]]


def test_kron_bilinearity():
    rng = random.Random(9)
    f3 = gl.field(3)
    for _ in range(10):
        a = gl.GfMatrix(f3, [[rng.randrange(3) for _ in range(2)] for _ in range(2)])
        b = gl.GfMatrix(f3, [[rng.randrange(3) for _ in range(2)] for _ in range(2)])
        c = gl.GfMatrix(f3, [[rng.randrange(3) for _ in range(2)] for _ in range(2)])
        assert gl.kron(a + b, c) == gl.kron(a, c) + gl.kron(b, c)


def _span(cols: list[tuple[int, ...]], q: int) -> set:
    out = set()
    for coefs in product(range(q), repeat=len(cols)):
        vec = [0] * (len(cols[0]) if cols else 0)
        for c, col in zip(coefs, cols):
            for j in range(len(vec)):
                vec[j] = (vec[j] + c * col[j]) % q
        out.add(tuple(vec))
    return out if cols else {()}


def test_subspace_intersection_against_enumeration():
    rng = random.Random(21)
    f3 = gl.field(3)
    for _ in range(30):
        ca, cb = rng.randint(1, 3), rng.randint(1, 3)
        a = gl.GfMatrix(f3, [[rng.randrange(3) for _ in range(ca)] for _ in range(6)])
        b = gl.GfMatrix(f3, [[rng.randrange(3) for _ in range(cb)] for _ in range(6)])
        span_a = _span([tuple(r[j] for r in a.data) for j in range(a.cols)], 3)
        span_b = _span([tuple(r[j] for r in b.data) for j in range(b.cols)], 3)
        trivially = span_a & span_b == {tuple([0] * 6)}
        assert gl.subspaces_intersect_trivially(a, b) == trivially
        assert gl.subspaces_intersect_trivially(b, a) == trivially


def test_subspace_trivial_cases():
    f3 = gl.field(3)
    a = gl.GfMatrix(f3, [[1], [0], [0]])
    empty = gl.GfMatrix.zeros(f3, 3, 0)
    assert gl.subspaces_intersect_trivially(a, empty)
    assert not gl.subspaces_intersect_trivially(a, a)


def test_column_span_contains():
    f3 = gl.field(3)
    a = gl.GfMatrix(f3, [[1, 0], [0, 1], [0, 0]])
    assert gl.column_span_contains(a, a)
    assert gl.column_span_contains(a, gl.GfMatrix(f3, [[2], [1], [0]]))
    assert not gl.column_span_contains(a, gl.GfMatrix(f3, [[0], [0], [1]]))
    # containment agrees with solvability
    b = gl.GfMatrix(f3, [[2], [1], [0]])
    assert gl.solve_right(a, b) is not None


def test_matrix_text_roundtrip():
    f9 = gl.field(9)
    m = gl.GfMatrix(f9, [[0, 5], [8, 3]])
    assert gl.parse_matrix(gl.format_matrix(m)) == m
    f3 = gl.field(3)
    m2 = gl.GfMatrix(f3, [[1], [1], [2]])
    text = gl.format_matrix(m2)
    assert text.splitlines()[0] == "matrix 3 1 over 3"
    assert gl.parse_matrix(text) == m2


def test_matrix_parse_errors():
    with pytest.raises(ParseError):
        gl.parse_matrix("matrix 2 2 over 3\n1 2\n")
    with pytest.raises(ParseError):
        gl.parse_matrix("matrix 1 1 over 3\n7\n")
    with pytest.raises(ParseError):
        gl.parse_matrix("rows 1 1\n0\n")
