from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from apgeo.exact_core import (
    IntMatrix,
    MonicPoly,
    NotIntegralError,
    ResidueMatrix,
    char_poly,
    det,
    format_matrix,
    mat_mul,
    mat_pow,
    mat_pow_mod,
    matrix_from_json,
    matrix_to_json,
    parse_matrix,
    q_poly,
)
from apgeo.quad_units import QuadInt

M = parse_matrix


def naive_pow(a: IntMatrix, e: int) -> IntMatrix:
    out = IntMatrix.identity(a.n)
    for _ in range(e):
        out = mat_mul(out, a)
    return out


def fib(n: int) -> int:
    x, y = 0, 1
    for _ in range(n):
        x, y = y, x + y
    return x


def test_mat_mul_examples():
    assert mat_mul(M("2,1;1,1"), M("2,1;1,1")) == M("5,3;3,2")
    a = M("3,-4;7,2")
    assert a @ IntMatrix.identity(2) == a
    assert M("0,-1;1,0") @ M("0,-1;1,0") == M("-1,0;0,-1")


def test_mat_pow_examples():
    g = M("2,1;1,1")
    assert mat_pow(g, 5) == M("89,55;55,34")
    assert mat_pow(g, 0) == IntMatrix.identity(2)
    assert mat_pow(g, 1) == g
    with pytest.raises(ValueError):
        mat_pow(g, -1)


def test_fibonacci_structure_of_large_powers():
    j = 1000
    assert mat_pow(M("2,1;1,1"), j) == IntMatrix(((fib(2 * j + 1), fib(2 * j)), (fib(2 * j), fib(2 * j - 1))))


def test_mat_pow_mod_examples():
    g = M("2,1;1,1")
    assert mat_pow_mod(g, 5, 25).rows == ((14, 5), (5, 9))
    assert mat_pow_mod(g, 0, 7).is_identity()
    assert mat_pow_mod(g, 10, 5).is_identity()
    with pytest.raises(ValueError):
        mat_pow_mod(g, 3, 15)


def test_residue_matrix_normalises():
    r = ResidueMatrix(((-1, 26), (5, 0)), 25)
    assert r.rows == ((24, 1), (5, 0))
    assert r.det() == (-5) % 25
    with pytest.raises(ValueError):
        ResidueMatrix(((1, 0), (0, 1)), 6)


def test_dimension_limits():
    with pytest.raises(ValueError):
        IntMatrix(((1, 2),))
    with pytest.raises(ValueError):
        IntMatrix.identity(9)


def test_char_poly_examples():
    assert str(char_poly(M("2,1;1,1"))) == "z^2 - 3z + 1"
    assert char_poly(IntMatrix.identity(2)).coeffs == (1, -2, 1)
    assert char_poly(M("6,1;5,1")).coeffs == (1, -7, 1)


def test_q_poly_examples():
    lam = QuadInt(5, 3, 1)  # (3 + sqrt 5)/2, inverse (3 - sqrt 5)/2
    assert q_poly([lam, lam.conjugate()]).coeffs == (1, -3, 1)
    assert str(q_poly([1, 1])) == "z^2 - 2z + 1"
    phi = QuadInt(5, 1, 1)
    with pytest.raises(NotIntegralError):
        q_poly([phi, phi - 1])
    with pytest.raises(NotIntegralError):
        q_poly([Fraction(1, 2), 2])


def test_monic_poly_rejects_non_monic():
    with pytest.raises(ValueError):
        MonicPoly((2, 1))
    assert str(MonicPoly((1, 0, -1))) == "z^2 - 1"


def test_serialisation_round_trip():
    a = M("12345678901234567890,-1;0,7")
    assert parse_matrix(format_matrix(a)) == a
    assert matrix_from_json(matrix_to_json(a)) == a
    assert matrix_to_json(a)[0][0] == "12345678901234567890"
    with pytest.raises(ValueError):
        parse_matrix("1,2;x,4")


small = st.integers(-6, 6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: IntMatrix(tuple(tuple(r) for r in rows)))


@given(st.integers(1, 4).flatmap(square), st.integers(0, 9))
def test_pow_matches_repeated_product(a, e):
    assert mat_pow(a, e) == naive_pow(a, e)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(square(n), square(n))))
def test_det_is_multiplicative(ab):
    a, b = ab
    assert det((a @ b).rows) == a.det() * b.det()


@given(st.integers(1, 5).flatmap(square))
def test_cayley_hamilton(a):
    coeffs = char_poly(a).coeffs
    n = a.n
    acc = [[0] * n for _ in range(n)]
    for k, c in enumerate(coeffs):
        p = mat_pow(a, n - k)
        for i in range(n):
            for j in range(n):
                acc[i][j] += c * p[i, j]
    assert all(x == 0 for row in acc for x in row)
    assert coeffs[-1] == (-1) ** n * a.det()


@settings(max_examples=50)
@given(st.integers(1, 3).flatmap(square), st.integers(0, 40), st.sampled_from([4, 9, 25, 49, 27]))
def test_pow_mod_agrees_with_reduction(a, e, m):
    assert mat_pow_mod(a, e, m).rows == tuple(tuple(x % m for x in row) for row in mat_pow(a, e).rows)
