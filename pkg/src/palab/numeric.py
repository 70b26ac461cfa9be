"""Floating-point linear algebra over diagram bases: Gram matrices, Cholesky, vectors."""

from __future__ import annotations

from functools import lru_cache

import numba
import numpy as np
from scipy.linalg import lapack, solve_triangular

from .diagram import Pairing, TLElement, count_cycles, enumerate_pairings
from .scalar import Laurent, Numeric


class GramNotPositive(ValueError):
    """The trace form is not positive definite at the requested loop value."""


@lru_cache(maxsize=None)
def basis_array(m: int) -> np.ndarray:
    """Partner arrays of the canonical basis on ``2m`` points, one row per diagram."""
    basis = enumerate_pairings(m)
    arr = np.array(basis, dtype=np.int32).reshape(len(basis), 2 * m)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def basis_index(m: int) -> dict:
    return {p: i for i, p in enumerate(enumerate_pairings(m))}


@numba.njit(cache=True)
def _loops(p, q, seen):
    seen[:] = 0
    loops = 0
    for s in range(p.shape[0]):
        if seen[s]:
            continue
        loops += 1
        x = s
        while True:
            seen[x] = 1
            y = p[x]
            seen[y] = 1
            x = q[y]
            if x == s:
                break
    return loops


@numba.njit(cache=True)
def _gram_fill(B, powers, G):
    n, width = B.shape
    seen = np.zeros(width, dtype=np.uint8)
    for j in range(n):
        for i in range(j, n):
            v = powers[_loops(B[i], B[j], seen)]
            G[i, j] = v
            G[j, i] = v


@numba.njit(cache=True)
def _cross_fill(A, B, powers, G):
    seen = np.zeros(A.shape[1], dtype=np.uint8)
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            G[i, j] = powers[_loops(A[i], B[j], seen)]


def _powers(m: int, delta: float) -> np.ndarray:
    return float(delta) ** np.arange(m + 1, dtype=np.float64)


def gram_numeric(m: int, delta: float) -> np.ndarray:
    """``G[i, j] = Tr(d_j^* d_i)`` at loop value ``delta``, as a Fortran-ordered array."""
    B = basis_array(m)
    G = np.empty((len(B), len(B)), dtype=np.float64, order="F")
    if m == 0:
        G[0, 0] = 1.0
        return G
    _gram_fill(B, _powers(m, delta), G)
    return G


def gram_rows(m: int, rows, cols, delta: float) -> np.ndarray:
    """Sub-block of the Gram matrix on the given basis indices."""
    B = basis_array(m)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    G = np.empty((len(rows), len(cols)), dtype=np.float64)
    if m == 0:
        G[:] = 1.0
        return G
    _cross_fill(B[rows], B[cols], _powers(m, delta), G)
    return G


def gram_exact(m: int) -> list:
    basis = enumerate_pairings(m)
    return [[Laurent.monomial(count_cycles(p, q)) for q in basis] for p in basis]


def cholesky(G: np.ndarray, overwrite: bool = False) -> np.ndarray:
    """Lower Cholesky factor; raises :class:`GramNotPositive` on failure."""
    L, info = lapack.dpotrf(G, lower=1, clean=1, overwrite_a=overwrite)
    if info > 0:
        raise GramNotPositive(f"Gram matrix not positive definite (leading minor {info} fails)")
    if info < 0:
        raise ValueError(f"dpotrf argument {-info} invalid")
    return L


def gram_cholesky(m: int, delta: float) -> np.ndarray:
    return cholesky(gram_numeric(m, delta), overwrite=True)


def min_eigenvalue(m: int, delta: float) -> float:
    return float(np.linalg.eigvalsh(gram_numeric(m, delta))[0])


def scalar_value(c, delta: float) -> float:
    if isinstance(c, Numeric):
        return c.value
    return c.eval_at(delta).value


def to_vector(x: TLElement, delta: float) -> np.ndarray:
    m = x.arity // 2
    idx = basis_index(m)
    v = np.zeros(len(idx))
    for p, c in x.terms.items():
        v[idx[p]] = scalar_value(c, delta)
    return v


def from_vector(v: np.ndarray, m: int, delta: float, tol: float = 0.0) -> TLElement:
    basis = enumerate_pairings(m)
    terms = {basis[i]: Numeric(float(v[i]), delta) for i in np.flatnonzero(np.abs(v) > tol)}
    return TLElement(2 * m, terms)


def solve_lower(L: np.ndarray, B: np.ndarray, trans: bool = False) -> np.ndarray:
    """Solve ``L X = B`` (or ``L^T X = B``) for lower-triangular ``L``."""
    return solve_triangular(L, B, lower=True, trans=1 if trans else 0, check_finite=False)


def orthonormal_operator(L_out: np.ndarray, M: np.ndarray, L_in: np.ndarray) -> np.ndarray:
    """Matrix of the map with basis-coordinate matrix ``M`` in orthonormal coordinates.

    With ``G = L L^T`` on both sides this is ``L_out^T M L_in^{-T}``.
    """
    X = L_out.T @ M
    return solve_lower(L_in, X.T).T


def spectral_norm(T: np.ndarray) -> float:
    if T.size == 0:
        return 0.0
    return float(np.linalg.norm(T, 2))


def basis_pairing(m: int, i: int) -> Pairing:
    return enumerate_pairings(m)[i]
