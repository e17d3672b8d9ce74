from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from koszulkit.exactlin import (GF, QQ, Matrix, Subspace, kernel_basis,
                                parse_field, rank, rref, solve)


def mat(field, rows):
    return Matrix(field, [[field.of(x) for x in r] for r in rows])


def test_kernel_zero_matrix():
    m = Matrix.zero(QQ, 2, 2)
    ker = kernel_basis(m)
    assert len(ker) == 2
    span = Subspace.spanned_by(QQ, ker, 2)
    assert span.dim == 2


def test_kernel_identity():
    assert kernel_basis(Matrix.identity(QQ, 3)) == []


def test_kernel_rank_one():
    m = mat(QQ, [[1, 2], [2, 4]])
    ker = kernel_basis(m)
    assert len(ker) == 1
    (v,) = ker
    # proportional to (2, -1)
    assert v[0] * Fraction(-1) == v[1] * Fraction(2)
    assert all(x == 0 for x in m.mul_vec(v))


def test_solve_identity():
    m = Matrix.identity(QQ, 3)
    b = [Fraction(1), Fraction(5), Fraction(-2)]
    assert solve(m, b) == b


def test_solve_zero_matrix_unsolvable():
    m = Matrix.zero(QQ, 2, 2)
    assert solve(m, [Fraction(1), Fraction(0)]) is None


def test_solve_back_substitution():
    m = mat(QQ, [[1, 1], [0, 1]])
    x = solve(m, [Fraction(3), Fraction(1)])
    assert x == [Fraction(2), Fraction(1)]


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve(Matrix.zero(QQ, 2, 3), [Fraction(0)])


def test_bareiss_regression_full_rank():
    # regression: every row below the pivot must be rescaled during the
    # fraction-free pass, including rows with a zero pivot-column entry
    cols = [[0, 0, 1, 2, 0, 2, 0, 2]] + \
           [[1 if i == j else 0 for i in range(8)] for j in range(7)]
    m = Matrix.from_columns(QQ, [[Fraction(v) for v in c] for c in cols], 8)
    assert rank(m) == 8
    b = [Fraction(0)] * 8
    b[6] = Fraction(1)
    x = solve(m, b)
    assert x is not None and m.mul_vec(x) == b


def test_prime_field_arithmetic():
    F = GF(5)
    assert F.of(7) == 2
    assert F.inv(2) == 3
    assert F.of(Fraction(1, 2)) == 3
    with pytest.raises(ValueError):
        GF(6)


def test_parse_field():
    assert parse_field("Q") == QQ
    assert parse_field("F7") == GF(7)
    with pytest.raises(ValueError):
        parse_field("R")


@st.composite
def f5_matrix(draw):
    nr = draw(st.integers(1, 5))
    nc = draw(st.integers(1, 5))
    rows = [[draw(st.integers(0, 4)) for _ in range(nc)] for _ in range(nr)]
    return Matrix(GF(5), rows)


@settings(max_examples=60, deadline=None)
@given(f5_matrix())
def test_rank_nullity(m):
    assert len(kernel_basis(m)) + rank(m) == m.ncols


@settings(max_examples=60, deadline=None)
@given(f5_matrix(), st.lists(st.integers(0, 4), min_size=5, max_size=5))
def test_solve_roundtrip(m, xs):
    F = m.field
    x = [F.of(v) for v in xs[: m.ncols]]
    b = m.mul_vec(x)
    got = solve(m, b)
    assert got is not None
    assert m.mul_vec(got) == b


@settings(max_examples=40, deadline=None)
@given(f5_matrix())
def test_kernel_annihilates(m):
    for v in kernel_basis(m):
        assert all(m.field.is_zero(x) for x in m.mul_vec(v))


def test_subspace_membership_and_complement():
    s = Subspace(QQ, 3)
    s.add([Fraction(1), Fraction(1), Fraction(0)])
    s.add([Fraction(0), Fraction(1), Fraction(1)])
    assert s.dim == 2
    assert s.contains([Fraction(1), Fraction(2), Fraction(1)])
    assert not s.contains([Fraction(1), Fraction(0), Fraction(0)])
    coords = s.coordinates([Fraction(1), Fraction(2), Fraction(1)])
    assert coords is not None
