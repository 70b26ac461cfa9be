"""The Temperley-Lieb tower: ``P_n`` spanned by non-crossing pairings on ``2n`` points.

Points ``1..n`` run along the bottom left to right and ``n+1..2n`` along the
top right to left, so top position ``j`` (counted from the left) is point
``2n+1-j``.  Extra strands are added and capped on the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import numeric
from .diagram import (
    Pairing,
    Tangle,
    TLElement,
    catalan,
    close_points,
    count_cycles,
    enumerate_pairings,
    evaluate_tangle,
)
from .scalar import ONE, Laurent, Numeric, Scalar, zero_like


@dataclass(frozen=True)
class TowerLevel:
    n: int

    @property
    def basis(self) -> tuple:
        return enumerate_pairings(self.n)

    @property
    def dim(self) -> int:
        return catalan(self.n)


def level(x: TLElement) -> int:
    return x.arity // 2


def _same_level(a: TLElement, b: TLElement) -> int:
    if a.arity != b.arity:
        raise ValueError(f"level mismatch: P_{level(a)} vs P_{level(b)}")
    return level(a)


def one(n: int, coeff: Scalar = ONE) -> TLElement:
    """Unit of ``P_n``: bottom ``i`` joined to the top point above it."""
    p = Pairing._unchecked([2 * n - 1 - i for i in range(2 * n)])
    return TLElement.basis(p, coeff)


def cap_cup(n: int, i: int) -> Pairing:
    """The bare diagram ``E_i``: bottom ``i, i+1`` capped, top ``i, i+1`` cupped."""
    if not 1 <= i < n:
        raise ValueError(f"E_{i} needs 1 <= i < n = {n}")
    pairs = []
    for j in range(1, n + 1):
        if j in (i, i + 1):
            continue
        pairs.append((j, 2 * n + 1 - j))
    pairs += [(i, i + 1), (2 * n - i, 2 * n + 1 - i)]
    return Pairing.from_pairs(pairs)


def jones_projection(n: int, i: int, delta_scale: bool = True) -> TLElement:
    """``e_i = delta^{-1} E_i`` in ``P_n`` (or the bare ``E_i``)."""
    e = TLElement.basis(cap_cup(n, i))
    return e.shift(-1) if delta_scale else e


@lru_cache(maxsize=None)
def _mul_tangle(n: int) -> Tangle:
    wires = [((1, 2 * n + 1 - j), (2, j)) for j in range(1, n + 1)]
    wires += [((0, j), (1, j)) for j in range(1, n + 1)]
    wires += [((0, j), (2, j)) for j in range(n + 1, 2 * n + 1)]
    return Tangle(2 * n, (2 * n, 2 * n), wires)


def mul(a: TLElement, b: TLElement) -> TLElement:
    """Stack ``b`` on top of ``a``: a's top row glued to b's bottom row."""
    n = _same_level(a, b)
    return evaluate_tangle(_mul_tangle(n), [a, b])


def _closure(n: int) -> list:
    return [2 * n - 1 - i for i in range(2 * n)]


def trace(a: TLElement) -> Scalar:
    """Right closure: point ``i`` joined to point ``2n+1-i``."""
    n = level(a)
    close = _closure(n)
    total = None
    for p, c in a.terms.items():
        term = c.shift(count_cycles(p, close))
        total = term if total is None else total + term
    return total if total is not None else Laurent()


def involution(a: TLElement) -> TLElement:
    """Horizontal reflection: point ``i`` goes to ``2n+1-i``."""
    return a.relabel(_closure(level(a)))


def include(a: TLElement, m: int) -> TLElement:
    """``P_n -> P_m``: add ``m-n`` through strands on the right."""
    n = level(a)
    if m < n:
        raise ValueError(f"cannot include P_{n} into P_{m}")
    if m == n:
        return a
    shift = 2 * (m - n)
    index_map = list(range(n)) + [i + shift for i in range(n, 2 * n)]
    out = {}
    for p, c in a.terms.items():
        q = [0] * (2 * m)
        for i, j in enumerate(p):
            q[index_map[i]] = index_map[j]
        for b in range(n, m):
            q[b] = 2 * m - 1 - b
            q[2 * m - 1 - b] = b
        out[Pairing._unchecked(q)] = c
    return TLElement._raw(2 * m, out)


def cond_expect(a: TLElement) -> TLElement:
    """``P_{n+1} -> P_n``: cap the rightmost bottom point to the rightmost top point."""
    n1 = level(a)
    if n1 < 1:
        raise ValueError("conditional expectation needs level >= 1")
    return close_points(a, [(n1, n1 + 1)])


def rotate_points(a: TLElement, points: int) -> TLElement:
    """Cyclic relabelling ``i -> i + points`` modulo ``2n``."""
    size = a.arity
    if size == 0:
        return a
    return a.relabel([(i + points) % size for i in range(size)])


def rotate(a: TLElement, steps: int) -> TLElement:
    """Rotation by ``steps`` strings, i.e. ``2*steps`` boundary points."""
    return rotate_points(a, 2 * steps)


def gram_matrix(n: int, delta: float | None = None):
    """``G[i][j] = Tr(d_j^* d_i)``: exact nested lists, or a numpy array at ``delta``."""
    if delta is None:
        return numeric.gram_exact(n)
    return numeric.gram_numeric(n, delta)


def positivity(n: int, delta: float) -> float:
    """Smallest eigenvalue of the numeric Gram matrix."""
    return numeric.min_eigenvalue(n, delta)


def mult_matrix(a: TLElement, delta: float) -> np.ndarray:
    """Basis-coordinate matrix of ``x -> a x`` at loop value ``delta``."""
    n = level(a)
    basis = enumerate_pairings(n)
    a = a.eval_at(float(delta))
    unit = Numeric(1.0, float(delta))
    cols = [numeric.to_vector(mul(a, TLElement.basis(d, unit)), delta) for d in basis]
    return np.array(cols).T.reshape(len(basis), len(basis))


@lru_cache(maxsize=16)
def _factor(n: int, delta: float) -> np.ndarray:
    L = numeric.gram_cholesky(n, delta)
    L.setflags(write=False)
    return L


def cstar_norm(a: TLElement, delta: float) -> float:
    """Operator norm of left multiplication by ``a`` for the inner product ``Tr(b^* a)``.

    Raises :class:`~palab.numeric.GramNotPositive` when the trace form is not
    positive definite at ``delta``.
    """
    n = level(a)
    L = _factor(n, float(delta))
    T = numeric.orthonormal_operator(L, mult_matrix(a, delta), L)
    return numeric.spectral_norm(T)


def inner(a: TLElement, b: TLElement) -> Scalar:
    """``Tr(b^* a)`` by pointwise gluing."""
    _same_level(a, b)
    total = None
    for p, c in a.terms.items():
        for q, d in b.terms.items():
            term = (c * d).shift(count_cycles(p, q))
            total = term if total is None else total + term
    if total is None:
        sample = next(iter(a.terms.values()), None) or next(iter(b.terms.values()), None)
        return zero_like(sample) if sample is not None else Laurent()
    return total
