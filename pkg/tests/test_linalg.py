import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from covrep.linalg import (
    DimensionError, Subspace, adj, as_matrix, complement, equality_residual, image, leq_residual,
    lift_identity, onb_kernel, onb_range, opnorm, orthogonality_residual, pinv, projector, svd,
    subspace_equal, subspace_intersect, subspace_join, subspace_leq, tensor_leq_residual,
    tensor_subspace,
)
from covrep.duality import penrose_residuals

E = np.eye(3)


def span(*cols, ambient=3):
    return Subspace.span(np.column_stack(cols) if cols else np.zeros((ambient, 0)))


def complex_matrices(max_side=5):
    shape = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    # exact zeros are interesting, denormal magnitudes only overflow the bounds
    part = st.one_of(st.just(0.0), st.floats(1e-3, 4), st.floats(-4, -1e-3))
    return shape.flatmap(lambda s: st.tuples(arrays(float, s, elements=part),
                                             arrays(float, s, elements=part))
                         ).map(lambda p: p[0] + 1j * p[1])


def test_singular_values_small_cases():
    assert np.allclose(svd(np.zeros((2, 2))).singular_values, [0, 0])
    assert np.allclose(svd(np.eye(3)).singular_values, [1, 1, 1])
    assert np.allclose(svd([[0, 2]]).singular_values, [2])


def test_pinv_examples():
    assert np.allclose(pinv([[2.0]]), [[0.5]])
    z = pinv(np.zeros((2, 3)))
    assert z.shape == (3, 2) and not z.any()
    v = np.hstack([np.diag([2.0, 1.0]), np.zeros((2, 2))])
    expect = np.vstack([np.diag([0.5, 1.0]), np.zeros((2, 2))])
    assert np.allclose(pinv(v), expect)
    assert max(penrose_residuals(v, pinv(v))) < 1e-14


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_matrix(np.zeros(3))
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])


def test_range_kernel_examples():
    assert onb_range(np.eye(2)).dim == 2 and onb_kernel(np.eye(2)).dim == 0
    assert onb_range(np.zeros((2, 3))).dim == 0 and onb_kernel(np.zeros((2, 3))).dim == 3
    shift = np.array([[0, 0], [1, 0]])
    e1 = span([0, 1], ambient=2)
    assert subspace_equal(onb_range(shift), e1)
    assert subspace_equal(onb_kernel(shift), e1)


def test_intersection_examples():
    e0, e1, e2 = E.T
    a = span(e0[:2], ambient=2)
    assert subspace_intersect(a, a).dim == 1
    assert subspace_intersect(a, span([0, 1], ambient=2)).dim == 0
    got = subspace_intersect(span(e0, e1), span(e1, e2))
    assert subspace_equal(got, span(e1))


def test_join_and_containment_examples():
    a, b = span([1, 0], ambient=2), span([0, 1], ambient=2)
    assert subspace_join([a, a]).dim == 1
    assert subspace_join([a, b]).dim == 2
    assert subspace_leq(Subspace.zero(3), span(E[:, 0]))
    assert not subspace_leq(Subspace.full(3), span(E[:, 0], E[:, 1]))
    assert subspace_leq(span([1, 1, 0]), span(E[:, 0], E[:, 1]))


def test_complement_and_projector():
    s = span([1, 1, 0], [0, 0, 1])
    c = complement(s)
    assert c.dim == 1
    assert orthogonality_residual(s, c) < 1e-14
    assert np.allclose(projector(s) + projector(c), np.eye(3))


def test_tensor_subspace_is_kron_of_bases():
    s = span([1, 0, 0])
    t = tensor_subspace(2, s)
    assert t.ambient == 6 and t.dim == 2
    assert np.allclose(t.basis[:, 0], [1, 0, 0, 0, 0, 0])
    assert np.allclose(t.basis[:, 1], [0, 0, 0, 1, 0, 0])


def test_lift_identity_is_blockwise():
    m = np.array([[1, 2], [3, 4]])
    big = lift_identity(2, m)
    assert np.allclose(big[:2, :2], m) and np.allclose(big[2:, 2:], m)
    assert not big[:2, 2:].any()


def test_image_dimension_mismatch():
    with pytest.raises(DimensionError):
        image(np.eye(2), Subspace.full(3))


@given(complex_matrices())
def test_penrose_equations_hold(m):
    w = pinv(m)
    scale = 1 + opnorm(m)
    assert max(penrose_residuals(m, w)) <= 1e-10 * scale * (1 + opnorm(w)) ** 2


@given(complex_matrices())
def test_pinv_is_involutive_and_commutes_with_adjoint(m):
    w = pinv(m)
    sv = svd(m).singular_values
    # only meaningful when the rank decision is well separated from rounding
    if sv.size and sv[sv > 1e-6].size == np.sum(sv > 1e-12):
        assert np.allclose(pinv(w), m, atol=1e-8 * (1 + opnorm(m)))
    assert np.allclose(pinv(adj(m)), adj(w), atol=1e-10 * (1 + opnorm(w)))


@given(complex_matrices())
def test_rank_nullity(m):
    assert onb_range(m).dim + onb_kernel(m).dim == m.shape[1]


@given(complex_matrices(4), st.integers(1, 3))
def test_tensor_containment_matches_dense(m, count):
    s = onb_range(m)
    rng = np.random.default_rng(m.shape[0] * 7 + m.shape[1])
    a = Subspace.span(rng.standard_normal((count * m.shape[0], 2)))
    assert abs(tensor_leq_residual(a, count, s) - leq_residual(a, tensor_subspace(count, s))) < 1e-10
    inside = image(lift_identity(count, s.basis), Subspace.full(count * s.dim)) if s.dim else Subspace.zero(a.ambient)
    assert tensor_leq_residual(inside, count, s) < 1e-10


def test_equality_residual_symmetric():
    a, b = span([1, 0, 0]), span([1, 0, 0], [0, 1, 0])
    assert equality_residual(a, b) == equality_residual(b, a) > 0.5
