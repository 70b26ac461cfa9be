"""Numeric analysis of the graded algebra at a fixed loop value.

Everything here works in coefficient coordinates over the canonical bases of
each degree.  Orthonormal coordinates come from Cholesky factors of the
degree-wise Gram matrices (``G = L L^T``); the uniform ``delta^{-k}``
normalization cancels in every operator computed here and is applied only
where vectors themselves must be orthonormal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import blas, subspace_angles
from scipy.sparse.linalg import LinearOperator, eigsh

from . import numeric, tower
from .diagram import TLElement, catalan, count_cycles, enumerate_pairings, glue
from .graded import (
    GradedElement,
    _omega_component,
    _product_tangle,
    box_arity,
    cup_cap_left,
    cup_cap_right,
    graded_product,
    omega,
    unit,
)
from .numeric import basis_index, scalar_value

DENSE_LIMIT = 2500
RANK_RTOL = 1e-10


class Frame:
    """Lazily computed Cholesky factors of the degree-``n`` Gram matrices at ``(k, r, delta)``."""

    def __init__(self, k: int, r: int, delta: float):
        if delta <= 0:
            raise ValueError("loop value must be positive")
        self.k, self.r, self.delta = k, r, float(delta)
        self._factors: dict = {}
        self.scale = self.delta ** (-k / 2)

    def strands(self, n: int) -> int:
        return 2 * n * self.r + self.k

    def dim(self, n: int) -> int:
        return catalan(self.strands(n))

    def factor(self, n: int) -> np.ndarray:
        """Lower Cholesky factor of the unnormalized degree-``n`` Gram matrix."""
        L = self._factors.get(n)
        if L is None:
            L = numeric.gram_cholesky(self.strands(n), self.delta)
            self._factors[n] = L
        return L

    def release(self) -> None:
        self._factors.clear()


def vector(x: TLElement, delta: float) -> np.ndarray:
    return numeric.to_vector(x, delta)


def subspace_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Sine of the largest principal angle between column spans (1.0 if dimensions differ)."""
    ra, rb = _rank(A), _rank(B)
    if ra != rb:
        return 1.0
    if ra == 0:
        return 0.0
    return float(np.sin(np.max(subspace_angles(A, B))))


def _rank(A: np.ndarray) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > RANK_RTOL * max(1.0, s[0])))


def null_space(A: np.ndarray) -> tuple:
    """Orthonormal null-space basis plus the largest discarded singular value."""
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols), 0.0
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    cut = RANK_RTOL * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    residual = float(s[rank]) if rank < s.size else 0.0
    return vh[rank:].T.copy(), residual


# -- cups and V_n -------------------------------------------------------------

def cup_span_matrix(n: int, k: int, r: int, delta: float) -> np.ndarray:
    """Columns: coordinates of ``x_{1,0}`` and ``x_{0,1}`` for every basis ``x`` of degree ``n-1``."""
    cols = []
    for d in enumerate_pairings(2 * (n - 1) * r + k):
        x = TLElement.basis(d)
        for p, q in ((1, 0), (0, 1)):
            cols.append(vector(_omega_component(x, n - 1, k, r, p, q), delta))
    return np.array(cols).T


def cap_matrix(n: int, k: int, r: int, delta: float) -> np.ndarray:
    """Rows: coordinates of ``cup_cap_left`` stacked over ``cup_cap_right`` on the degree-``n`` basis."""
    left, right = [], []
    for d in enumerate_pairings(2 * n * r + k):
        y = GradedElement.homogeneous(n, k, r, TLElement.basis(d))
        left.append(vector(cup_cap_left(y).component(n - 1), delta))
        right.append(vector(cup_cap_right(y).component(n - 1), delta))
    return np.vstack([np.array(left).T, np.array(right).T])


def v_space_basis(n: int, k: int, r: int, delta: float, frame: Frame | None = None) -> np.ndarray:
    """Coefficient columns of an orthonormal basis of ``V_n``.

    ``V_0`` is all of degree 0; for ``n >= 1`` it is the orthogonal
    complement of the span of one-cup elements.
    """
    frame = frame or Frame(k, r, delta)
    L = frame.factor(n)
    D = frame.dim(n)
    if n == 0:
        Y = np.eye(D)
    else:
        A = frame.scale * (L.T @ cup_span_matrix(n, k, r, delta))
        U, s, _ = np.linalg.svd(A, full_matrices=True)
        rank = int(np.sum(s > RANK_RTOL * max(1.0, s[0])))
        Y = U[:, rank:]
    return numeric.solve_lower(L, Y, trans=True) / frame.scale


def cap_kernel_basis(n: int, k: int, r: int, delta: float) -> np.ndarray:
    """Euclidean-orthonormal basis of the joint kernel of the two cup-caps."""
    if n == 0:
        return np.eye(catalan(k))
    return null_space(cap_matrix(n, k, r, delta))[0]


def v_dimension(n: int, k: int, r: int, delta: float, frame: Frame | None = None) -> int:
    return v_space_basis(n, k, r, delta, frame).shape[1]


def v_element(coeffs: np.ndarray, n: int, k: int, r: int, delta: float) -> GradedElement:
    x = numeric.from_vector(coeffs, 2 * n * r + k, delta)
    return GradedElement(k, r, {n: x})


def cup_gram(m: int, p: int, q: int, n: int, p2: int, q2: int, k: int, r: int, delta: float) -> np.ndarray:
    """``K[i, j] = <omega(d_i, p, q), omega(d'_j, p2, q2)>`` over the degree-``m`` and ``n`` bases."""
    bm = enumerate_pairings(2 * m * r + k)
    bn = enumerate_pairings(2 * n * r + k)
    if m + p + q != n + p2 + q2:
        return np.zeros((len(bm), len(bn)))
    left = [_single(_omega_component(TLElement.basis(d), m, k, r, p, q)) for d in bm]
    right = [_single(_omega_component(TLElement.basis(d), n, k, r, p2, q2)) for d in bn]
    norm = delta ** (-k - r * (p + q + p2 + q2))
    return np.array([[norm * delta ** count_cycles(a, b) for b in right] for a in left])


def _single(x: TLElement):
    (p,) = x.terms
    return p


# -- left multiplication ------------------------------------------------------

def _trmv(L, x, trans):
    return blas.dtrmv(L, x, lower=1, trans=1 if trans else 0)


def _trsv(L, x, trans):
    return blas.dtrsv(L, x, lower=1, trans=1 if trans else 0)


@dataclass
class Block:
    source: int
    target: int
    matrix: sparse.csr_matrix


@dataclass
class LeftMultiplication:
    """Truncated ``x -> a o x`` on degrees ``0..N`` split into contraction blocks.

    ``blocks[(m, i, l)]`` maps degree ``l`` to degree ``m + l - i`` and
    collects the ``i``-band contraction of the degree-``m`` part of ``a``;
    blocks whose target degree exceeds ``N`` are dropped.
    """

    a: GradedElement
    N: int
    delta: float
    frame: Frame
    blocks: dict = field(default_factory=dict)

    @classmethod
    def build(cls, a: GradedElement, N: int, delta: float, frame: Frame | None = None):
        frame = frame or Frame(a.k, a.r, delta)
        out = cls(a, N, float(delta), frame)
        k, r = a.k, a.r
        for m, x in sorted(a.terms.items()):
            coeffs = [(p, scalar_value(c, delta)) for p, c in x.terms.items()]
            for l in range(N + 1):
                src = enumerate_pairings(2 * l * r + k)
                for i in range(2 * min(m, l) + 1):
                    t = m + l - i
                    if t > N:
                        continue
                    tangle = _product_tangle(m, l, i, k, r)
                    idx = basis_index(2 * t * r + k)
                    rows, cols, vals = [], [], []
                    for col, d in enumerate(src):
                        for p, c in coeffs:
                            q, loops = tangle.eval_basis((p, d))
                            rows.append(idx[q])
                            cols.append(col)
                            vals.append(c * delta ** loops)
                    M = sparse.csr_matrix((vals, (rows, cols)), shape=(len(idx), len(src)))
                    M.sum_duplicates()
                    out.blocks[(m, i, l)] = Block(l, t, M)
        return out

    def _operator(self, pieces, sources, targets):
        """Orthonormal-coordinate operator for the given blocks as ``(matvec, rmatvec, shape)``."""
        f = self.frame
        s_off, t_off = {}, {}
        pos = 0
        for l in sources:
            s_off[l] = (pos, pos + f.dim(l))
            pos += f.dim(l)
        ncols = pos
        pos = 0
        for t in targets:
            t_off[t] = (pos, pos + f.dim(t))
            pos += f.dim(t)
        nrows = pos

        def matvec(x):
            x = np.asarray(x, dtype=np.float64).ravel()
            y = {l: _trsv(f.factor(l), x[a:b].copy(), True) for l, (a, b) in s_off.items()}
            z = {t: np.zeros(f.dim(t)) for t in targets}
            for blk in pieces:
                z[blk.target] += blk.matrix @ y[blk.source]
            out = np.empty(nrows)
            for t, (a, b) in t_off.items():
                out[a:b] = _trmv(f.factor(t), z[t], True)
            return out

        def rmatvec(y):
            y = np.asarray(y, dtype=np.float64).ravel()
            z = {t: _trmv(f.factor(t), y[a:b].copy(), False) for t, (a, b) in t_off.items()}
            w = {l: np.zeros(f.dim(l)) for l in sources}
            for blk in pieces:
                w[blk.source] += blk.matrix.T @ z[blk.target]
            out = np.empty(ncols)
            for l, (a, b) in s_off.items():
                out[a:b] = _trsv(f.factor(l), w[l], False)
            return out

        return matvec, rmatvec, (nrows, ncols)

    def _dense(self, pieces, sources, targets) -> np.ndarray:
        matvec, _, (nrows, ncols) = self._operator(pieces, sources, targets)
        return np.column_stack([matvec(e) for e in np.eye(ncols)]) if ncols else np.zeros((nrows, 0))

    def _norm(self, pieces, sources, targets) -> float:
        matvec, rmatvec, (nrows, ncols) = self._operator(pieces, sources, targets)
        if nrows == 0 or ncols == 0:
            return 0.0
        if max(nrows, ncols) <= DENSE_LIMIT:
            return numeric.spectral_norm(self._dense(pieces, sources, targets))
        if ncols <= nrows:
            op = LinearOperator((ncols, ncols), matvec=lambda v: rmatvec(matvec(v)), dtype=np.float64)
            size = ncols
        else:
            op = LinearOperator((nrows, nrows), matvec=lambda v: matvec(rmatvec(v)), dtype=np.float64)
            size = nrows
        v0 = np.random.default_rng(0).standard_normal(size)
        lam = eigsh(op, k=1, which="LA", v0=v0, tol=1e-12, return_eigenvectors=False, ncv=min(size, 40))
        return float(np.sqrt(max(lam[0], 0.0)))

    def block_norm(self, m: int, i: int, l: int) -> float:
        blk = self.blocks[(m, i, l)]
        return self._norm([blk], [blk.source], [blk.target])

    def block_matrix(self, m: int, i: int, l: int) -> np.ndarray:
        blk = self.blocks[(m, i, l)]
        return self._dense([blk], [blk.source], [blk.target])

    def matrix(self) -> np.ndarray:
        """Dense orthonormal-coordinate matrix on degrees ``0..N`` (small cases only)."""
        degs = list(range(self.N + 1))
        return self._dense(list(self.blocks.values()), degs, degs)

    def norm(self) -> float:
        degs = list(range(self.N + 1))
        return self._norm(list(self.blocks.values()), degs, degs)


def left_mult_matrix(a: GradedElement, N: int, delta: float, frame: Frame | None = None) -> LeftMultiplication:
    return LeftMultiplication.build(a, N, delta, frame)


def contraction_constant(a: GradedElement, m: int, i: int, delta: float) -> float:
    """Norm of the degree-``m`` part of ``a`` as a map out of the strings it contracts.

    The inputs are the last ``2ri`` top points and the right side; the
    outputs are the rest.  The norm is ``sqrt(|f^* f|)`` with ``f^* f`` an
    element of the tower level with ``2ri + k`` strands.
    """
    k, r = a.k, a.r
    x = a.component(m)
    size = box_arity(m, k, r)
    n_in = 2 * r * i + k
    n_out = size - n_in
    # rotate so the input arc comes first: point (k + 4rm - 2ri) becomes point 1
    start = k + 4 * r * m - 2 * r * i
    y = x.relabel([(c - start) % size for c in range(size)])
    mirror = y.relabel([size - 1 - c for c in range(size)])
    ff = glue(y, mirror, [(size + 1 - j, j) for j in range(1, n_out + 1)])
    return float(np.sqrt(tower.cstar_norm(ff, delta)))


# -- commutants -----------------------------------------------------------------

@dataclass
class CommutantResult:
    k: int
    r: int
    delta: float
    support: int
    columns: list
    basis: np.ndarray
    residual: float
    nullity: int

    def elements(self) -> list:
        out = []
        for v in self.basis.T:
            terms = {}
            for (n, p), c in zip(self.columns, v):
                if abs(c) > 1e-12:
                    terms.setdefault(n, {})[p] = numeric.Numeric(float(c), self.delta)
            out.append(GradedElement(self.k, self.r, {n: TLElement(box_arity(n, self.k, self.r), t)
                                                      for n, t in terms.items()}))
        return out

    def degree_zero_distance(self) -> float:
        """Distance from the solution span to the span of the degree-0 basis."""
        ref = np.array([[1.0 if (n == 0 and j == i) else 0.0 for j, _ in enumerate(self.columns)]
                        for i, (n, _) in enumerate(self.columns) if n == 0]).T
        return subspace_distance(self.basis, ref)


def commutant_solver(
    generators: list,
    k: int,
    N: int,
    delta: float,
    r: int = 1,
    support: int | None = None,
    trace_zero: bool = False,
) -> CommutantResult:
    """Solutions ``c`` supported in degrees ``<= support`` of ``g o c = c o g`` for all generators.

    ``support`` defaults to ``N - 2`` so that solutions stay clear of the
    truncation boundary; every equation is computed in full, so the linear
    system is exact.  ``trace_zero`` adds the constraint ``tr(c) = 0``.
    """
    support = N - 2 if support is None else support
    if support < 0:
        raise ValueError("support degree must be >= 0")
    for g in generators:
        if (g.k, g.r) != (k, r):
            raise ValueError("generator (k, r) mismatch")
    columns = [(n, p) for n in range(support + 1) for p in enumerate_pairings(2 * n * r + k)]
    rows: dict = {}
    entries = []
    for col, (n, p) in enumerate(columns):
        c = GradedElement(k, r, {n: TLElement.basis(p)})
        for gi, g in enumerate(generators):
            diff = graded_product(g, c) - graded_product(c, g)
            for d, x in diff.terms.items():
                for q, v in x.terms.items():
                    row = rows.setdefault((gi, d, q), len(rows))
                    entries.append((row, col, scalar_value(v, delta)))
    A = np.zeros((len(rows) + (1 if trace_zero else 0), len(columns)))
    for row, col, v in entries:
        A[row, col] += v
    if trace_zero:
        ident = unit(k, r).component(0)
        (idp,) = ident.terms
        for col, (n, p) in enumerate(columns):
            if n == 0:
                A[-1, col] = float(delta) ** (count_cycles(p, idp) - k)
    basis, residual = null_space(A)
    if basis.size:
        residual = max(residual, float(np.max(np.linalg.norm(A @ basis, axis=0))))
    return CommutantResult(k, r, float(delta), support, columns, basis, residual, basis.shape[1])


def u_commutant_reference(k: int, support: int, delta: float, r: int = 1) -> np.ndarray:
    """Coefficient columns spanning ``{c o I_n : c in P_{0,k}, n <= support}``."""
    columns = [(n, p) for n in range(support + 1) for p in enumerate_pairings(2 * n * r + k)]
    where = {c: i for i, c in enumerate(columns)}
    out = []
    for p in enumerate_pairings(k):
        c = GradedElement(k, r, {0: TLElement.basis(p)})
        for n in range(support + 1):
            y = graded_product(c, omega(unit(k, r), n, 0))
            v = np.zeros(len(columns))
            for d, x in y.terms.items():
                for q, s in x.terms.items():
                    v[where[(d, q)]] += scalar_value(s, delta)
            out.append(v)
    return np.array(out).T
