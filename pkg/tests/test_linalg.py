from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwss import linalg
from pwss.errors import NotContained, QuotientNotContained
from pwss.linalg import (
    Matrix,
    Subspace,
    annihilator,
    cokernel_basis,
    complement,
    dualize_subspace,
    image,
    kernel,
    pairing_adjoint,
    quotient,
    signature,
    solve,
    solve_matrix,
)


def M(rows):
    return Matrix(rows)


def test_rref_identity():
    red, pivots, rank = Matrix.identity(3).rref()
    assert red == Matrix.identity(3)
    assert pivots == (0, 1, 2)
    assert rank == 3


def test_rref_zero():
    red, pivots, rank = Matrix.zero(2, 4).rref()
    assert red == Matrix.zero(2, 4)
    assert pivots == ()
    assert rank == 0


def test_rref_rank_one():
    red, pivots, rank = M([[1, 2], [2, 4]]).rref()
    assert rank == 1
    assert pivots == (0,)
    assert red.rows[0] == (Fraction(1), Fraction(2))


def test_rref_fractions():
    m = M([[Fraction(1, 2), Fraction(1, 3)], [Fraction(3), Fraction(2)]])
    red, pivots, rank = m.rref()
    assert rank == 1
    assert red.rows[0] == (Fraction(1), Fraction(2, 3))


def test_kernel_of_zero_map():
    ker = kernel(Matrix.zero(2, 3))
    assert ker.dim == 3
    assert ker == Subspace.full(3)


def test_kernel_image_shapes():
    m = M([[1, 2, 3], [2, 4, 6]])
    assert kernel(m).dim == 2
    assert image(m).dim == 1


def test_quotient_diagonal_line():
    V = Subspace.full(2)
    W = Subspace.from_spanning([(1, 1)], 2)
    q = quotient(V, W)
    assert q.dim == 1
    # projection kills W and is surjective
    assert q.project((2, 2)) == (Fraction(0),)
    assert q.project(q.reps[0]) == (Fraction(1),)


def test_quotient_not_contained():
    V = Subspace.from_spanning([(1, 0)], 2)
    W = Subspace.from_spanning([(0, 1)], 2)
    with pytest.raises(QuotientNotContained):
        quotient(V, W)


def test_complement_examples():
    # complement(0, Q^2) = Q^2
    assert complement(Subspace.zero(2), Subspace.full(2)) == Subspace.full(2)
    # complement(span e1, Q^2) = span e2
    c = complement(Subspace.from_spanning([(1, 0)], 2), Subspace.full(2))
    assert c == Subspace.from_spanning([(0, 1)], 2)
    # complement(span(e1+e2), Q^2) = span e1: first completing coordinate
    c = complement(Subspace.from_spanning([(1, 1)], 2), Subspace.full(2))
    assert c == Subspace.from_spanning([(1, 0)], 2)


def test_complement_not_contained():
    with pytest.raises(NotContained):
        complement(Subspace.from_spanning([(1, 0, 0)], 3),
                   Subspace.from_spanning([(0, 1, 0)], 3))


def test_solve():
    a = M([[1, 2], [3, 4]])
    x = solve(a, (5, 11))
    assert x == (Fraction(1), Fraction(2))
    assert solve(M([[1, 1], [1, 1]]), (0, 1)) is None


def test_solve_matrix_roundtrip():
    a = M([[2, 0], [1, 1]])
    b = M([[4, 2], [3, 2]])
    x = solve_matrix(a, b)
    assert a @ x == b


def test_cokernel():
    m = M([[1, 0], [0, 0]])
    q = cokernel_basis(m)
    assert q.dim == 1


def test_dual_pairing_ops():
    pairing = Matrix.identity(2)
    W = Subspace.from_spanning([(1, 1)], 2)
    ann = annihilator(W, pairing)
    assert ann.dim == 1
    assert ann.contains_vector((1, -1))
    dual = dualize_subspace(W, pairing)
    assert dual.dim == W.dim


def test_pairing_adjoint_is_transpose_for_identity():
    m = M([[1, 2], [3, 4], [5, 6]])
    g = pairing_adjoint(m, Matrix.identity(2), Matrix.identity(3))
    assert g == m.transpose()


def test_signature():
    assert signature(M([[2, 0], [0, -3]])) == (1, 1)
    assert signature(M([[0, 1], [1, 0]])) == (1, 1)
    assert signature(Matrix.identity(4)) == (4, 0)
    assert signature(Matrix.zero(3, 3)) == (0, 0)


small_entries = st.integers(min_value=-6, max_value=6)


@st.composite
def small_matrix(draw):
    nrows = draw(st.integers(min_value=1, max_value=5))
    ncols = draw(st.integers(min_value=1, max_value=5))
    rows = draw(
        st.lists(
            st.lists(small_entries, min_size=ncols, max_size=ncols),
            min_size=nrows,
            max_size=nrows,
        )
    )
    return Matrix(rows)


@given(small_matrix())
@settings(max_examples=120, deadline=None)
def test_rank_nullity(m):
    assert kernel(m).dim + m.rank() == m.ncols


@given(small_matrix())
@settings(max_examples=80, deadline=None)
def test_rref_idempotent(m):
    red, _, _ = m.rref()
    red2, _, _ = red.rref()
    assert red == red2


@given(small_matrix())
@settings(max_examples=60, deadline=None)
def test_complement_is_deterministic_direct_sum(m):
    W = image(m)
    V = Subspace.full(m.nrows)
    c1 = complement(W, V)
    c2 = complement(W, V)
    assert c1 == c2
    assert W.intersect(c1).dim == 0
    assert W.add(c1).dim == V.dim


@given(small_matrix())
@settings(max_examples=60, deadline=None)
def test_quotient_projection_kernel_is_w(m):
    W = image(m)
    V = Subspace.full(m.nrows)
    q = quotient(V, W)
    assert q.dim == V.dim - W.dim
    for w in W.vectors():
        assert all(c == 0 for c in q.project(w))
