"""Numeric layer: V_n spaces, truncated left multiplication, contraction constants, commutants."""

import random

import numpy as np
import pytest

from palab.diagram import TLElement, catalan, enumerate_pairings
from palab.graded import (
    GradedElement,
    cup_cap_left,
    cup_cap_right,
    element_Lambda,
    element_U,
    element_W,
    inner_product,
    random_element,
    star,
    unit,
)
from palab.numeric import GramNotPositive
from palab.scalar import Numeric
from palab.spectral import (
    Frame,
    cap_kernel_basis,
    commutant_solver,
    contraction_constant,
    left_mult_matrix,
    subspace_distance,
    u_commutant_reference,
    v_dimension,
    v_element,
    v_space_basis,
)

DELTA = 2.0


def oracle_singular_values(a, N, delta):
    """Singular values of the truncated left multiplication via graded products and the inner product."""
    k, r = a.k, a.r
    basis = [(n, p) for n in range(N + 1) for p in enumerate_pairings(2 * n * r + k)]
    elems = [GradedElement(k, r, {n: TLElement.basis(p)}).eval_at(delta) for n, p in basis]
    G = np.array([[float(inner_product(x, y)) for y in elems] for x in elems])
    where = {b: i for i, b in enumerate(basis)}
    M = np.zeros((len(basis), len(basis)))
    ae = a.eval_at(delta)
    for col, x in enumerate(elems):
        for n, t in (ae @ x).terms.items():
            if n > N:
                continue
            for q, c in t.terms.items():
                M[where[(n, q)], col] += float(c)
    L = np.linalg.cholesky(G)
    T = L.T @ M @ np.linalg.inv(L.T)
    return np.linalg.svd(T, compute_uv=False)


def test_identity_multiplication():
    lm = left_mult_matrix(unit(1), 2, DELTA)
    T = lm.matrix()
    assert np.allclose(T, np.eye(T.shape[0]))
    assert lm.norm() == pytest.approx(1.0)


@pytest.mark.parametrize("name", ["U", "W"])
@pytest.mark.parametrize("k", [0, 1])
def test_truncated_operator_matches_oracle(name, k):
    a = element_U(k) if name == "U" else element_W(k)
    lm = left_mult_matrix(a, 2, DELTA)
    got = np.linalg.svd(lm.matrix(), compute_uv=False)
    want = oracle_singular_values(a, 2, DELTA)
    assert np.allclose(np.sort(got), np.sort(want), atol=1e-9)
    assert lm.norm() == pytest.approx(want.max(), rel=1e-9)


def test_random_element_operator_matches_oracle():
    a = random_element(0, 1, 1, random.Random(4))
    got = np.linalg.svd(left_mult_matrix(a, 2, 2.5).matrix(), compute_uv=False)
    assert np.allclose(np.sort(got), np.sort(oracle_singular_values(a, 2, 2.5)), atol=1e-9)


def test_adjoint_is_transpose():
    a = random_element(1, 1, 2, random.Random(9))
    T = left_mult_matrix(a, 2, DELTA).matrix()
    Ts = left_mult_matrix(star(a), 2, DELTA).matrix()
    assert np.allclose(T.T, Ts, atol=1e-9)


def test_blocks_vanish_below_half_band():
    lm = left_mult_matrix(element_U(0), 3, DELTA)
    assert all(i <= 2 * l for (_, i, l) in lm.blocks)
    assert all(m + l - i <= 3 for (m, i, l) in lm.blocks)


def test_block_norms_within_constants():
    for a in (element_U(0), element_W(0), element_U(1)):
        lm = left_mult_matrix(a, 3, DELTA)
        for (m, i, l) in lm.blocks:
            assert lm.block_norm(m, i, l) <= contraction_constant(a, m, i, DELTA) + 1e-9


def test_contraction_constants():
    U, W = element_U(0), element_W(0)
    assert [contraction_constant(U, 1, i, DELTA) for i in range(3)] == pytest.approx([2.0, 1.0, 2.0])
    assert [contraction_constant(W, 1, i, DELTA) for i in range(3)] == pytest.approx([2.0, 2.0, 2.0])


def test_small_truncation_norms():
    for delta in (2.0, 2.5):
        assert left_mult_matrix(element_U(0), 2, delta).norm() <= 2 * delta + 1
        assert left_mult_matrix(element_W(0), 1, delta).norm() <= 2 * delta + 1


def test_v_space_dimensions():
    assert v_dimension(0, 1, 1, DELTA) == 1
    assert v_dimension(0, 3, 1, DELTA) == catalan(3)
    assert v_dimension(1, 0, 1, DELTA) == 1
    assert v_dimension(1, 1, 1, DELTA) == 4
    assert v_dimension(2, 0, 1, DELTA) == 11


@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("n", [1, 2])
def test_v_space_is_cap_kernel(k, n):
    V = v_space_basis(n, k, 1, DELTA)
    assert subspace_distance(V, cap_kernel_basis(n, k, 1, DELTA)) < 1e-8
    for col in V.T:
        u = v_element(col, n, k, 1, DELTA)
        assert inner_product(u, u) == Numeric(1.0, DELTA)
        for cap in (cup_cap_left, cup_cap_right):
            assert all(abs(float(c)) < 1e-9 for t in cap(u).terms.values() for c in t.terms.values())


def test_subspace_distance():
    A = np.eye(4)[:, :2]
    assert subspace_distance(A, A @ np.array([[1.0, 2.0], [0.0, 1.0]])) < 1e-12
    assert subspace_distance(A, np.eye(4)[:, 2:]) == pytest.approx(1.0)


def test_frame_rejects_bad_delta():
    with pytest.raises(ValueError):
        Frame(0, 1, 0.0)
    with pytest.raises(GramNotPositive):
        Frame(0, 1, 1.0).factor(3)


def test_commutant_of_unit_is_everything():
    res = commutant_solver([unit(1)], 1, 3, DELTA)
    assert res.nullity == len(res.columns)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_commutant_of_U_W(k):
    res = commutant_solver([element_U(k), element_W(k)], k, 4, DELTA)
    assert res.nullity == catalan(k)
    assert res.residual < 1e-8
    assert res.degree_zero_distance() < 1e-8


def test_commutant_of_U_alone():
    k, N = 1, 4
    res = commutant_solver([element_U(k)], k, N, DELTA)
    ref = u_commutant_reference(k, N - 2, DELTA)
    assert res.nullity == (N - 1) * catalan(k)
    assert subspace_distance(res.basis, ref) < 1e-8


@pytest.mark.parametrize("delta", [1.5, 2.0, 3.0])
def test_lambda_trace_zero_commutant_is_trivial(delta):
    for k in range(4):
        res = commutant_solver([element_Lambda(k)], k, 0, delta, support=0, trace_zero=True)
        assert res.nullity == 0


def test_commutant_argument_checks():
    with pytest.raises(ValueError):
        commutant_solver([element_U(1)], 0, 4, DELTA)
    with pytest.raises(ValueError):
        commutant_solver([element_U(0)], 0, 1, DELTA)
