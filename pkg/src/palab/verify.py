"""Identity checks, independent oracles, and the suite driver behind ``palab verify``.

Every check is a pure function of its parameters and a seeded generator.
Property functions (``prop_*``) return ``None`` on success or a witness
dict describing the first counterexample; the registry wraps them into
report records.
"""

from __future__ import annotations

import random
import time
import zlib
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import tower
from .diagram import TLElement, catalan, enumerate_pairings
from .graded import (
    GradedElement,
    I_n,
    alpha,
    cond_expect_graded,
    element_Lambda,
    element_U,
    element_W,
    embed,
    graded_trace,
    inner_product,
    jones_e,
    omega,
    random_element,
    star,
    unit,
)
from .io import graded_to_json, tl_to_json
from .numeric import GramNotPositive, min_eigenvalue
from .scalar import Laurent, Numeric, delta_pow, tolerance
from .spectral import (
    Frame,
    cap_kernel_basis,
    commutant_solver,
    contraction_constant,
    cup_gram,
    left_mult_matrix,
    subspace_distance,
    u_commutant_reference,
    v_element,
    v_space_basis,
)

NUMERIC_RESIDUAL = 1e-8


# -- oracles ------------------------------------------------------------------

def moment_oracle(m: int, delta: float | None = None, r: int = 1):
    """Weighted lattice-path count of the tridiagonal model of ``x -> U o x`` on ``span{I_n}``.

    Steps up and down weigh ``delta**r``; a flat step weighs 1 at height
    ``>= 1`` and 0 at height 0.  Paths run from 0 back to 0 in ``m`` steps.
    """
    if m < 0:
        raise ValueError("moment order must be >= 0")
    step = delta_pow(r, delta)
    one = delta_pow(0, delta)
    weights = {0: one}
    for s in range(m):
        remaining = m - s - 1
        new: dict = {}
        for h, w in weights.items():
            moves = [(h + 1, w * step)]
            if h >= 1:
                moves += [(h - 1, w * step), (h, w)]
            for g, v in moves:
                if g <= remaining:
                    new[g] = new[g] + v if g in new else v
        weights = new
    return weights.get(0, delta_pow(0, delta) * 0)


# -- configuration and context ------------------------------------------------

@dataclass(frozen=True)
class SuiteConfig:
    mode: str = "exact"
    delta: float | None = None
    k_range: tuple = (0, 1, 2)
    r_range: tuple = (1, 2)
    N: int = 3
    samples: int = 10
    seed: int = 42
    checks: tuple | None = None
    timings: bool = False
    tol: float = field(default_factory=tolerance)

    def __post_init__(self):
        if self.mode not in ("exact", "numeric"):
            raise ValueError(f"mode must be 'exact' or 'numeric', got {self.mode!r}")
        if self.mode == "numeric" and (self.delta is None or self.delta <= 0):
            raise ValueError("numeric mode needs a positive --delta")
        if self.mode == "exact" and self.delta is not None:
            raise ValueError("exact mode takes no --delta")
        if self.N < 0 or self.samples < 0:
            raise ValueError("N and samples must be nonnegative")
        if min(self.k_range, default=0) < 0 or min(self.r_range, default=1) < 1:
            raise ValueError("k must be >= 0 and r >= 1")


class Context:
    """Scalar mode for one check: exact, or everything evaluated at ``delta``."""

    def __init__(self, delta: float | None):
        self.delta = delta

    @property
    def exact(self) -> bool:
        return self.delta is None

    def lift(self, x):
        if self.exact:
            return x
        if isinstance(x, (GradedElement, TLElement, Laurent)):
            return x.eval_at(self.delta)
        return x

    def d(self, p: int):
        return delta_pow(p, self.delta)

    def sample(self, k: int, r: int, max_degree: int, rng: random.Random) -> GradedElement:
        return self.lift(random_element(k, r, max_degree, rng))


def _g(x: GradedElement) -> dict:
    return graded_to_json(x)


def _scal(s) -> object:
    return s.to_json() if hasattr(s, "to_json") else s


# -- tower --------------------------------------------------------------------

def prop_tower(n_max: int, samples: int, rng: random.Random, ctx: Context):
    """Associativity, unit, trace, involution, inclusion and Jones relations in ``P_n``."""
    def rand(n):
        x = TLElement.zero(2 * n)
        for _ in range(rng.randint(1, 3)):
            p = rng.choice(enumerate_pairings(n))
            x = x + TLElement.basis(p, ctx.lift(Laurent.constant(rng.randint(-3, 3))))
        return x

    for n in range(1, n_max + 1):
        one = ctx.lift(tower.one(n))
        if tower.trace(one) != ctx.d(n):
            return {"law": "Tr(1_n) = delta^n", "n": n}
        for _ in range(samples):
            a, b, c = rand(n), rand(n), rand(n)
            ab = tower.mul(a, b)
            if tower.mul(ab, c) != tower.mul(a, tower.mul(b, c)):
                return {"law": "associativity", "n": n, "a": tl_to_json(a), "b": tl_to_json(b)}
            if tower.mul(one, a) != a or tower.mul(a, one) != a:
                return {"law": "unit", "n": n, "a": tl_to_json(a)}
            if tower.trace(ab) != tower.trace(tower.mul(b, a)):
                return {"law": "Tr(ab) = Tr(ba)", "n": n, "a": tl_to_json(a), "b": tl_to_json(b)}
            if tower.involution(ab) != tower.mul(tower.involution(b), tower.involution(a)):
                return {"law": "(ab)* = b*a*", "n": n, "a": tl_to_json(a), "b": tl_to_json(b)}
            if tower.trace(tower.involution(a)) != tower.trace(a):
                return {"law": "Tr(a*) = Tr(a)", "n": n, "a": tl_to_json(a)}
            big = tower.include(a, n + 1)
            if tower.trace(big) != tower.trace(a) * ctx.d(1):
                return {"law": "Tr(include(a)) = delta Tr(a)", "n": n}
            x, A = rand(n), rand(n + 1)
            lhs = tower.trace(tower.mul(tower.include(x, n + 1), A))
            if lhs != tower.trace(tower.mul(x, tower.cond_expect(A))):
                return {"law": "Tr(include(x) a) = Tr(x cond_expect(a))", "n": n, "x": tl_to_json(x)}
            if tower.trace(tower.cond_expect(A)) != tower.trace(A):
                return {"law": "Tr(cond_expect(a)) = Tr(a)", "n": n}
            sandwich = tower.mul(tower.mul(tower.include(x, n + 1), A), big)
            if tower.cond_expect(sandwich) != tower.mul(tower.mul(x, tower.cond_expect(A)), a):
                return {"law": "cond_expect(x a y) = x cond_expect(a) y", "n": n}
            if tower.cond_expect(big) != a.shift(1):
                return {"law": "cond_expect(include(a)) = delta a", "n": n}
        for i in range(1, n):
            e = ctx.lift(tower.jones_projection(n, i))
            if tower.mul(e, e) != e or tower.involution(e) != e:
                return {"law": "e_i projection", "n": n, "i": i}
            if i + 1 < n:
                f = ctx.lift(tower.jones_projection(n, i + 1))
                if tower.mul(tower.mul(e, f), e) != e.shift(-2) or tower.mul(tower.mul(f, e), f) != f.shift(-2):
                    return {"law": "e_i e_{i+1} e_i = delta^-2 e_i", "n": n, "i": i}
            for j in range(i + 2, n):
                f = ctx.lift(tower.jones_projection(n, j))
                if tower.mul(e, f) != tower.mul(f, e):
                    return {"law": "far e_i commute", "n": n, "i": i, "j": j}
    return None


# -- graded algebra -------------------------------------------------------------

def prop_hilbert(k: int, r: int, max_degree: int, samples: int, rng: random.Random, ctx: Context):
    """Inner-product symmetry, adjointness of left multiplication, unit, associativity, anti-involution."""
    I = ctx.lift(unit(k, r))
    for _ in range(samples):
        a, b, c = (ctx.sample(k, r, max_degree, rng) for _ in range(3))
        laws = [
            ("<a,b> = <b*,a*>", lambda: inner_product(a, b) == inner_product(star(b), star(a))),
            ("<ab,c> = <b,a*c>", lambda: inner_product(a @ b, c) == inner_product(b, star(a) @ c)),
            ("Ia = aI = a", lambda: I @ a == a and a @ I == a),
            ("(ab)c = a(bc)", lambda: (a @ b) @ c == a @ (b @ c)),
            ("(ab)* = b*a*", lambda: star(a @ b) == star(b) @ star(a)),
            ("a** = a", lambda: star(star(a)) == a),
        ]
        for law, holds in laws:
            if not holds():
                return {"law": law, "k": k, "r": r, "a": _g(a), "b": _g(b), "c": _g(c)}
    return None


def prop_degree_support(k: int, r: int, max_degree: int, samples: int, rng: random.Random, ctx: Context):
    for _ in range(samples):
        m, n = rng.randint(0, max_degree), rng.randint(0, max_degree)
        a = ctx.sample(k, r, m, rng)
        b = ctx.sample(k, r, n, rng)
        a = GradedElement(k, r, {m: a.component(m)}) if m in a.terms else ctx.lift(omega(unit(k, r), m, 0))
        b = GradedElement(k, r, {n: b.component(n)}) if n in b.terms else ctx.lift(omega(unit(k, r), n, 0))
        bad = [d for d in (a @ b).degrees() if not abs(m - n) <= d <= m + n]
        if bad:
            return {"law": "degrees of a o b in |m-n|..m+n", "m": m, "n": n, "degrees": bad}
    return None


def prop_inclusion(k: int, l: int, r: int, max_degree: int, samples: int, rng: random.Random, ctx: Context):
    if embed(ctx.lift(unit(k, r)), l) != ctx.lift(unit(l, r)):
        return {"law": "embed(I) = I", "k": k, "l": l}
    for _ in range(samples):
        a, b = ctx.sample(k, r, max_degree, rng), ctx.sample(k, r, max_degree, rng)
        ea, eb = embed(a, l), embed(b, l)
        if inner_product(ea, eb) != inner_product(a, b):
            return {"law": "<embed a, embed b> = <a, b>", "k": k, "l": l, "a": _g(a), "b": _g(b)}
        if embed(a @ b, l) != ea @ eb:
            return {"law": "embed(ab) = embed(a) embed(b)", "k": k, "l": l, "a": _g(a), "b": _g(b)}
        if embed(star(a), l) != star(ea):
            return {"law": "embed(a*) = embed(a)*", "k": k, "l": l, "a": _g(a)}
    return None


def prop_three_term_unit(k: int, r: int, max_total: int, ctx: Context):
    """``U o I_{p,q} = delta^r I_{p+1,q} + I_{p,q} + delta^r I_{p-1,q}`` and ``U o U``."""
    U, I = ctx.lift(element_U(k, r)), ctx.lift(unit(k, r))
    dr = ctx.d(r)
    if U @ I != ctx.lift(I_n(1, k, r)) * dr:
        return {"law": "U o I = delta^r I_1", "k": k, "r": r}
    for total in range(1, max_total + 1):
        for p in range(1, total + 1):
            q = total - p
            u = lambda pp, qq: ctx.lift(omega(unit(k, r), pp, qq))
            rhs = u(p + 1, q) * dr + u(p, q) + u(p - 1, q) * dr
            if U @ u(p, q) != rhs:
                return {"law": "three-term expansion on I", "k": k, "r": r, "p": p, "q": q}
    if U @ U != ctx.lift(I_n(2, k, r)) * ctx.d(2 * r) + U + I * ctx.d(2 * r):
        return {"law": "U o U = delta^2r I_2 + U + delta^2r I", "k": k, "r": r}
    return None


def prop_w_expansion(k: int, r: int, max_n: int, ctx: Context):
    """``W o I_n = W omega_n + delta^{-r} W omega_{n-1} + I_{n-1}``."""
    W = ctx.lift(element_W(k, r))
    for n in range(1, max_n + 1):
        lhs = W @ ctx.lift(I_n(n, k, r))
        rhs = omega(W, 0, n) + omega(W, 0, n - 1) * ctx.d(-r) + ctx.lift(I_n(n - 1, k, r))
        if lhs != rhs:
            return {"law": "W o I_n expansion", "k": k, "r": r, "n": n}
    return None


def prop_alpha(k: int, r: int, max_n: int, ctx: Context):
    if not alpha(0, k, r).is_zero():
        return {"law": "alpha_0 = 0", "k": k, "r": r}
    target = (ctx.d(2 * r) - ctx.d(0)) * 2
    for n in range(1, max_n + 1):
        a = ctx.lift(alpha(n, k, r))
        if a.degrees() != [n + 1]:
            return {"law": "alpha_n has degree n+1", "k": k, "r": r, "n": n, "degrees": a.degrees()}
        v = inner_product(a, a)
        if v != target:
            return {"law": "<alpha_n, alpha_n> = 2(delta^2r - 1)", "k": k, "r": r, "n": n, "value": _scal(v)}
    return None


def prop_center_commutation(k: int, r: int, ctx: Context):
    gens = {"U": ctx.lift(element_U(k, r)), "W": ctx.lift(element_W(k, r))}
    for p in enumerate_pairings(k):
        c = ctx.lift(GradedElement(k, r, {0: TLElement.basis(p)}))
        for name, g in gens.items():
            if g @ c != c @ g:
                return {"law": f"{name} commutes with P_0,k", "k": k, "r": r, "c": _g(c)}
    return None


def prop_jones(k: int, r: int, max_degree: int, samples: int, rng: random.Random, ctx: Context):
    """Projection, trace, and ``e x e = E(x) e`` laws for ``e_k`` at level ``k+1``."""
    e = ctx.lift(jones_e(k, r))
    if e @ e != e or star(e) != e:
        return {"law": "e_k projection", "k": k, "r": r}
    if graded_trace(e) != ctx.d(-2):
        return {"law": "tr(e_k) = delta^-2", "k": k, "r": r, "value": _scal(graded_trace(e))}
    for _ in range(samples):
        x = ctx.sample(k, r, max_degree, rng)
        X = embed(x, k + 1)
        if graded_trace(X @ e) != graded_trace(X) * ctx.d(-2):
            return {"law": "tr(x e_k) = delta^-2 tr(x)", "k": k, "r": r, "x": _g(x)}
        rhs = embed(cond_expect_graded(x, k - 1), k + 1) @ e
        if e @ X @ e != rhs:
            return {"law": "e x e = E(x) e", "k": k, "r": r, "x": _g(x)}
        # x' = a + a1 e b1 has x' e = (a + a1 E(b1)) e
        a, a1, b1 = (embed(ctx.sample(k, r, max_degree, rng), k + 1) for _ in range(3))
        b1_low = cond_expect_graded(b1, k - 1)
        lhs = (a + a1 @ e @ b1) @ e
        rhs = (a + a1 @ embed(b1_low, k + 1)) @ e
        if lhs != rhs:
            return {"law": "(a + a1 e b1) e = (a + a1 E(b1)) e", "k": k, "r": r}
    return None


def prop_cond_expect(k: int, l: int, r: int, max_degree: int, samples: int, rng: random.Random, ctx: Context):
    src = k + l
    if cond_expect_graded(ctx.lift(unit(src, r)), k) != ctx.lift(unit(k, r)):
        return {"law": "E(I) = I", "k": k, "l": l}
    for _ in range(samples):
        x = ctx.sample(src, r, max_degree, rng)
        y = ctx.sample(k, r, max_degree, rng)
        Ex = cond_expect_graded(x, k)
        if inner_product(x, embed(y, src)) != inner_product(Ex, y):
            return {"law": "<x, embed y> = <E x, y>", "k": k, "l": l, "x": _g(x), "y": _g(y)}
        if graded_trace(Ex) != graded_trace(x):
            return {"law": "tr(E x) = tr(x)", "k": k, "l": l, "x": _g(x)}
        b = ctx.sample(k, r, max_degree, rng)
        lhs = cond_expect_graded(embed(y, src) @ x @ embed(b, src), k)
        if lhs != y @ Ex @ b:
            return {"law": "E(a x b) = a E(x) b", "k": k, "l": l}
    return None


def prop_trace(k: int, r: int, max_degree: int, samples: int, rng: random.Random, ctx: Context):
    U = ctx.lift(element_U(k, r))
    if graded_trace(ctx.lift(unit(k, r))) != ctx.d(0):
        return {"law": "tr(I) = 1", "k": k, "r": r}
    if not graded_trace(U).is_zero():
        return {"law": "tr(U) = 0", "k": k, "r": r}
    if graded_trace(U @ U) != ctx.d(2 * r):
        return {"law": "tr(U o U) = delta^2r", "k": k, "r": r}
    for _ in range(samples):
        x, y = ctx.sample(k, r, max_degree, rng), ctx.sample(k, r, max_degree, rng)
        if graded_trace(x @ y) != graded_trace(y @ x):
            return {"law": "tr(xy) = tr(yx)", "k": k, "r": r, "x": _g(x), "y": _g(y)}
    return None


def prop_moments(k: int, r: int, max_m: int, ctx: Context):
    U = ctx.lift(element_U(k, r))
    acc = ctx.lift(unit(k, r))
    for m in range(max_m + 1):
        if m:
            acc = acc @ U
        want = moment_oracle(m, ctx.delta, r)
        got = graded_trace(acc)
        if got != want:
            return {"law": "tr(U^m) = lattice-path moment", "k": k, "r": r, "m": m,
                    "trace": _scal(got), "oracle": _scal(want)}
    return None


# -- numeric checks -----------------------------------------------------------

def cup_orthogonality_residual(k: int, r: int, delta: float, max_cups: int = 2, degrees=(1, 2)) -> float:
    """Largest deviation of ``<u_{p,q}, v_{p',q'}>`` from ``delta_{pp'} delta_{qq'} <u, v>`` on V-bases."""
    frame = Frame(k, r, delta)
    bases = {n: v_space_basis(n, k, r, delta, frame) for n in (0,) + tuple(degrees)}
    worst = 0.0
    cups = [(p, q) for p in range(max_cups + 1) for q in range(max_cups + 1)]
    for m in degrees:
        for n in degrees:
            if n < m:
                continue
            for p, q in cups:
                for p2, q2 in cups:
                    K = cup_gram(m, p, q, n, p2, q2, k, r, delta)
                    got = bases[m].T @ K @ bases[n]
                    want = np.eye(got.shape[0]) if (m, p, q) == (n, p2, q2) else np.zeros_like(got)
                    worst = max(worst, float(np.max(np.abs(got - want), initial=0.0)))
    # degree 0: x_s = omega(x, s, 0) depends only on the total cup count
    for s in range(max_cups + 2):
        for s2 in range(max_cups + 2):
            K = cup_gram(0, s, 0, 0, s2, 0, k, r, delta)
            got = bases[0].T @ K @ bases[0]
            want = np.eye(got.shape[0]) if s == s2 else np.zeros_like(got)
            worst = max(worst, float(np.max(np.abs(got - want), initial=0.0)))
    return worst


def three_term_v1_residual(k: int, r: int, delta: float, ps=(1, 2), qs=(0, 1, 2)) -> float:
    """Largest coefficient residual of the three-term expansion for ``u`` in an orthonormal basis of ``V_1``."""
    V = v_space_basis(1, k, r, delta)
    U = element_U(k, r).eval_at(delta)
    dr = Numeric(delta ** r, delta)
    worst = 0.0
    for col in V.T:
        u = v_element(col, 1, k, r, delta)
        for p in ps:
            for q in qs:
                diff = U @ omega(u, p, q) - (omega(u, p + 1, q) * dr + omega(u, p, q) + omega(u, p - 1, q) * dr)
                for x in diff.terms.values():
                    for c in x.terms.values():
                        worst = max(worst, abs(c.value))
    return worst


def v_space_report(k: int, r: int, delta: float, max_n: int) -> dict:
    """Kernel-versus-complement distances, ``dim V_n``, and the dimension bookkeeping defects."""
    frame = Frame(k, r, delta)
    dims, dist = [], []
    for n in range(max_n + 1):
        V = v_space_basis(n, k, r, delta, frame)
        dims.append(V.shape[1])
        dist.append(subspace_distance(V, cap_kernel_basis(n, k, r, delta)))
    defects = []
    for N in range(1, max_n + 1):
        total = catalan(2 * N * r + k) - sum((N - m + 1) * dims[m] for m in range(1, N + 1)) - dims[0]
        defects.append(total)
    return {"dims": dims, "distances": dist, "bookkeeping_defects": defects}


def norm_report(a: GradedElement, N: int, delta: float, frame: Frame | None = None) -> dict:
    """Full truncated operator norm and per-block norms against their contraction constants."""
    lm = left_mult_matrix(a, N, delta, frame)
    blocks = {}
    for (m, i, l) in sorted(lm.blocks):
        blocks.setdefault((m, i), {})[l] = lm.block_norm(m, i, l)
    out = {"norm": lm.norm(), "bound": 2 * delta + 1, "blocks": []}
    for (m, i), by_l in sorted(blocks.items()):
        const = contraction_constant(a, m, i, delta)
        ls = sorted(by_l)
        top = max(by_l.values())
        prev = max((by_l[l] for l in ls[:-1]), default=top)
        out["blocks"].append({
            "degree": m, "i": i, "constant": const,
            "norms": [by_l[l] for l in ls], "levels": ls,
            "max": top, "stability": abs(top - prev),
        })
    return out


def norm_failures(report: dict, tol: float = NUMERIC_RESIDUAL) -> list:
    out = []
    if report["norm"] > report["bound"] + tol:
        out.append(f"operator norm {report['norm']:.10g} > 2 delta + 1 = {report['bound']:.10g}")
    for b in report["blocks"]:
        if b["max"] > b["constant"] + tol:
            out.append(f"block i={b['i']}: {b['max']:.10g} > constant {b['constant']:.10g}")
        if b["stability"] > 1e-6:
            out.append(f"block i={b['i']}: max over l moved by {b['stability']:.3g} at the last level")
    return out


def commutant_report(k: int, N: int, delta: float, r: int = 1) -> dict:
    res = commutant_solver([element_U(k, r), element_W(k, r)], k, N, delta, r)
    u_only = commutant_solver([element_U(k, r)], k, N, delta, r)
    ref = u_commutant_reference(k, N - 2, delta, r)
    return {
        "nullity": res.nullity,
        "expected": catalan(k),
        "residual": res.residual,
        "distance_to_P0k": res.degree_zero_distance(),
        "U_nullity": u_only.nullity,
        "U_expected": (N - 1) * catalan(k),
        "U_distance": subspace_distance(u_only.basis, ref),
    }


def lambda_nullity(k: int, delta: float) -> tuple:
    res = commutant_solver([element_Lambda(k)], k, 0, delta, 1, support=0, trace_zero=True)
    return res.nullity, res.residual


# -- registry -----------------------------------------------------------------

@dataclass
class Check:
    name: str
    anchor: str
    requires: str  # "any", "numeric", "positive" (delta >= 2), "delta>1"
    run: Callable


def _ranges(cfg: SuiteConfig):
    return [(k, r) for r in cfg.r_range for k in cfg.k_range]


def _deg(cfg: SuiteConfig, r: int, k: int = 0) -> int:
    # desk-scale cap: at most 14 strands per random component
    deg = cfg.N
    while deg > 0 and 2 * deg * r + k > 14:
        deg -= 1
    return deg


def _first(results):
    for w in results:
        if w is not None:
            return w
    return None


def _c_tower(cfg, ctx, rng):
    n = min(cfg.N + 2, 5)
    return _first([prop_tower(n, cfg.samples, rng, ctx)]), {"n_max": n}


def _c_hilbert(cfg, ctx, rng):
    return _first(prop_hilbert(k, r, _deg(cfg, r, k), cfg.samples, rng, ctx) for k, r in _ranges(cfg)), {}


def _c_support(cfg, ctx, rng):
    return _first(prop_degree_support(k, r, _deg(cfg, r, k), cfg.samples, rng, ctx) for k, r in _ranges(cfg)), {}


def _c_inclusion(cfg, ctx, rng):
    ks = sorted(cfg.k_range)
    pairs = [(k, l) for k in ks for l in range(k + 1, max(ks) + 2)]
    return _first(
        prop_inclusion(k, l, r, _deg(cfg, r, l), cfg.samples, rng, ctx) for r in cfg.r_range for k, l in pairs
    ), {"pairs": [list(p) for p in pairs]}


def _c_three_term(cfg, ctx, rng):
    return _first(prop_three_term_unit(k, r, max(cfg.N, 1), ctx) for k, r in _ranges(cfg)), {}


def _c_w_expansion(cfg, ctx, rng):
    return _first(prop_w_expansion(k, r, max(cfg.N, 1), ctx) for k, r in _ranges(cfg)), {}


def _c_alpha(cfg, ctx, rng):
    return _first(prop_alpha(k, r, max(cfg.N, 1), ctx) for k, r in _ranges(cfg)), {}


def _c_center(cfg, ctx, rng):
    return _first(prop_center_commutation(k, r, ctx) for k, r in _ranges(cfg)), {}


def _c_jones(cfg, ctx, rng):
    ks = [k for k in cfg.k_range if k >= 1]
    return _first(
        prop_jones(k, r, _deg(cfg, r, k + 1), cfg.samples, rng, ctx) for r in cfg.r_range for k in ks
    ), {"k": ks}


def _c_cond(cfg, ctx, rng):
    ks = sorted(cfg.k_range)
    return _first(
        prop_cond_expect(k, l, r, _deg(cfg, r, k + l), cfg.samples, rng, ctx)
        for r in cfg.r_range for k in ks for l in (1, 2)
    ), {}


def _c_trace(cfg, ctx, rng):
    return _first(prop_trace(k, r, _deg(cfg, r, k), cfg.samples, rng, ctx) for k, r in _ranges(cfg)), {}


def _c_moments(cfg, ctx, rng):
    ks = [k for k in cfg.k_range if k <= 1] or [min(cfg.k_range)]
    return _first(prop_moments(k, r, 8 if r == 1 else 4, ctx) for r in cfg.r_range for k in ks), {"k": ks}


def _c_gram(cfg, ctx, rng):
    vals = {n: min_eigenvalue(n, ctx.delta) for n in range(1, 7)}
    bad = {n: v for n, v in vals.items() if v <= 0}
    return ({"law": "Gram positive definite", "min_eigenvalues": bad} if bad else None), {
        "min_eigenvalue": min(vals.values())}


def _c_cups(cfg, ctx, rng):
    worst = 0.0
    for k, r in _ranges(cfg):
        if r > 1 or k > 1:
            continue
        worst = max(worst, cup_orthogonality_residual(k, r, ctx.delta))
    w = {"law": "cup orthogonality", "residual": worst} if worst >= NUMERIC_RESIDUAL else None
    return w, {"residual": worst}


def _c_three_term_v1(cfg, ctx, rng):
    worst = 0.0
    for k, r in _ranges(cfg):
        if r > 1 or k > 1:
            continue
        worst = max(worst, three_term_v1_residual(k, r, ctx.delta))
    w = {"law": "three-term expansion on V_1", "residual": worst} if worst >= NUMERIC_RESIDUAL else None
    return w, {"residual": worst}


def _c_vspace(cfg, ctx, rng):
    out = {}
    for k in cfg.k_range:
        if k > 1:
            continue
        rep = v_space_report(k, 1, ctx.delta, min(max(cfg.N, 1), 3))
        out[f"k={k}"] = rep
        if max(rep["distances"]) >= NUMERIC_RESIDUAL or any(rep["bookkeeping_defects"]):
            return {"law": "cap kernel = cup complement; dimension bookkeeping", "k": k, "report": rep}, out
    return None, out


def _c_norms(cfg, ctx, rng):
    out = {}
    N = max(cfg.N, 1)
    frame = Frame(0, 1, ctx.delta)
    for name, a in (("U", element_U(0)), ("W", element_W(0))):
        rep = norm_report(a, N, ctx.delta, frame)
        out[name] = {"norm": rep["norm"], "bound": rep["bound"],
                     "blocks": [{kk: b[kk] for kk in ("i", "constant", "max", "stability")} for b in rep["blocks"]]}
        fails = norm_failures(rep)
        if fails:
            return {"law": f"L_{name} norm bounds", "N": N, "failures": fails}, out
    return None, out


def _c_commutant(cfg, ctx, rng):
    out = {}
    for k in cfg.k_range:
        if k > 2:
            continue
        rep = commutant_report(k, 4, ctx.delta)
        out[f"k={k}"] = rep
        ok = (rep["nullity"] == rep["expected"] and rep["residual"] < NUMERIC_RESIDUAL
              and rep["distance_to_P0k"] < NUMERIC_RESIDUAL and rep["U_nullity"] == rep["U_expected"]
              and rep["U_distance"] < NUMERIC_RESIDUAL)
        if not ok:
            return {"law": "truncated commutant of {U, W} is P_0,k", "k": k, "report": rep}, out
    return None, out


def _c_lambda(cfg, ctx, rng):
    out = {}
    for k in range(0, max(cfg.k_range) + 2):
        nullity, residual = lambda_nullity(k, ctx.delta)
        out[f"k={k}"] = nullity
        if nullity:
            return {"law": "trace-zero commutant of Lambda is zero", "k": k, "nullity": nullity}, out
    return None, out


REGISTRY = [
    Check("tower_structure", "tower-algebra", "any", _c_tower),
    Check("hilbert_algebra", "hilbert-algebra-conditions", "any", _c_hilbert),
    Check("degree_support", "product-degree-support", "any", _c_support),
    Check("inclusion_isometry", "inclusion-isometry", "any", _c_inclusion),
    Check("three_term_unit", "U-three-term-expansion", "any", _c_three_term),
    Check("w_expansion", "W-expansion", "any", _c_w_expansion),
    Check("alpha_norm", "alpha-norm-constant", "any", _c_alpha),
    Check("center_commutation", "P0k-commutes-with-U-W", "any", _c_center),
    Check("jones_markov", "jones-projection-markov", "any", _c_jones),
    Check("cond_expect_adjoint", "conditional-expectation", "any", _c_cond),
    Check("trace", "canonical-trace", "any", _c_trace),
    Check("moments", "U-moments", "any", _c_moments),
    Check("gram_positivity", "trace-form-positivity", "positive", _c_gram),
    Check("cup_orthogonality", "cup-orthogonality", "positive", _c_cups),
    Check("three_term_v1", "U-three-term-expansion", "positive", _c_three_term_v1),
    Check("v_space", "cup-cap-kernel-and-decomposition", "positive", _c_vspace),
    Check("norm_bounds", "multiplication-norm-bounds", "positive", _c_norms),
    Check("commutant", "truncated-relative-commutant", "positive", _c_commutant),
    Check("lambda_rigidity", "Lambda-rigidity", "delta>1", _c_lambda),
]

SUITES = {
    "all": [c.name for c in REGISTRY],
    "structural": [c.name for c in REGISTRY if c.requires == "any"],
    "numeric": [c.name for c in REGISTRY if c.requires != "any"],
}


def _skip_reason(check: Check, cfg: SuiteConfig):
    if check.requires == "any":
        return None
    if cfg.mode == "exact":
        return "needs a numeric loop value (run with --mode numeric --delta D)"
    if check.requires == "positive" and cfg.delta < 2:
        return f"trace form is only guaranteed positive for delta >= 2 (got {cfg.delta})"
    if check.requires == "delta>1" and cfg.delta <= 1:
        return f"needs delta > 1 (got {cfg.delta})"
    return None


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def run_suite(cfg: SuiteConfig, progress: Callable | None = None) -> dict:
    """Run the selected checks in registry order; the report is deterministic for a given config."""
    selected = set(cfg.checks) if cfg.checks is not None else {c.name for c in REGISTRY}
    unknown = selected - {c.name for c in REGISTRY}
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    records = []
    for check in REGISTRY:
        if check.name not in selected:
            continue
        rec = {"name": check.name, "anchor": check.anchor,
               "params": {"k": list(cfg.k_range), "r": list(cfg.r_range), "N": cfg.N, "samples": cfg.samples}}
        reason = _skip_reason(check, cfg)
        start = time.perf_counter()
        if reason:
            rec.update(status="skipped", reason=reason)
        else:
            rng = random.Random(cfg.seed ^ zlib.crc32(check.name.encode()))
            ctx = Context(cfg.delta if cfg.mode == "numeric" else None)
            try:
                witness, metrics = check.run(cfg, ctx, rng)
            except GramNotPositive as exc:
                witness, metrics = {"error": str(exc)}, {}
            rec["status"] = "fail" if witness is not None else "pass"
            if metrics:
                rec["metrics"] = metrics
            if witness is not None:
                rec["witness"] = witness
        if cfg.timings:
            rec["seconds"] = round(time.perf_counter() - start, 3)
        records.append(_json_safe(rec))
        if progress:
            progress(rec)
    summary = {s: sum(1 for r in records if r["status"] == s) for s in ("pass", "fail", "skipped")}
    config = asdict(cfg)
    config["checks"] = sorted(selected)
    if not cfg.timings:
        config.pop("timings")
    return {"config": _json_safe(config), "checks": records, "summary": summary}


def report_markdown(report: dict) -> str:
    lines = ["| check | anchor | status | note |", "|---|---|---|---|"]
    for rec in report["checks"]:
        note = rec.get("reason") or (rec.get("witness") or {}).get("law", "")
        lines.append(f"| {rec['name']} | {rec['anchor']} | {rec['status']} | {note} |")
    s = report["summary"]
    lines.append("")
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped")
    return "\n".join(lines) + "\n"
