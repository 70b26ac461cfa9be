"""Graded algebra over the Temperley-Lieb tower.

A degree-``n`` component at side-string count ``k`` and grading step ``r``
is a diagram with ``4nr + 2k`` boundary points folded onto a box:

* ``L_1..L_k`` up the left side (``L_1`` at the bottom),
* ``T_1..T_{4nr}`` across the top, left to right,
* ``R_1..R_k`` down the right side (``R_1`` at the top).

Consecutive groups of ``4r`` top points are band groups.  The product
``a o b`` sums, over ``i``, the gluing of the last ``2ri`` top points of
``a`` to the first ``2ri`` of ``b`` with nested arcs, the right side of
``a`` running into the left side of ``b``.
"""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterable

from .diagram import (
    Pairing,
    Tangle,
    TLElement,
    _accumulate,
    close_points,
    count_cycles,
    evaluate_tangle,
    random_pairing,
)
from .scalar import Laurent, Numeric, Scalar, zero_like


def box_arity(n: int, k: int, r: int) -> int:
    return 4 * n * r + 2 * k


def _check_params(k: int, r: int) -> None:
    if k < 0:
        raise ValueError(f"side-string count must be >= 0, got {k}")
    if r < 1:
        raise ValueError(f"grading step must be >= 1, got {r}")


class GradedElement:
    """Finite sum of box components over degrees, all sharing ``(k, r)``."""

    __slots__ = ("k", "r", "terms")

    def __init__(self, k: int, r: int = 1, terms: dict | None = None):
        _check_params(k, r)
        self.k = k
        self.r = r
        clean = {}
        for n, x in (terms or {}).items():
            if n < 0:
                raise ValueError(f"negative degree {n}")
            if x.arity != box_arity(n, k, r):
                raise ValueError(
                    f"degree {n} component has arity {x.arity}, expected {box_arity(n, k, r)}"
                )
            if not x.is_zero():
                clean[n] = x
        self.terms = clean

    @classmethod
    def _raw(cls, k: int, r: int, terms: dict) -> "GradedElement":
        obj = cls.__new__(cls)
        obj.k, obj.r, obj.terms = k, r, terms
        return obj

    @classmethod
    def homogeneous(cls, n: int, k: int, r: int, x: TLElement) -> "GradedElement":
        return cls(k, r, {n: x})

    @classmethod
    def zero(cls, k: int, r: int = 1) -> "GradedElement":
        return cls._raw(k, r, {})

    def component(self, n: int) -> TLElement:
        return self.terms.get(n) or TLElement.zero(box_arity(n, self.k, self.r))

    def degrees(self) -> list:
        return sorted(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other) -> None:
        if not isinstance(other, GradedElement):
            raise TypeError(f"expected GradedElement, got {type(other).__name__}")
        if (self.k, self.r) != (other.k, other.r):
            raise ValueError(f"(k, r) mismatch: {(self.k, self.r)} vs {(other.k, other.r)}")

    def __add__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for n, x in other.terms.items():
            s = out[n] + x if n in out else x
            if s.is_zero():
                out.pop(n, None)
            else:
                out[n] = s
        return GradedElement._raw(self.k, self.r, out)

    def __neg__(self):
        return GradedElement._raw(self.k, self.r, {n: -x for n, x in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, GradedElement):
            return NotImplemented
        return self._map(lambda x: x.scale(s))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return graded_product(self, other)

    def shift(self, p: int) -> "GradedElement":
        return self._map(lambda x: x.shift(p))

    def _map(self, fn) -> "GradedElement":
        out = {}
        for n, x in self.terms.items():
            y = fn(x)
            if not y.is_zero():
                out[n] = y
        return GradedElement._raw(self.k, self.r, out)

    def eval_at(self, delta: float) -> "GradedElement":
        return self._map(lambda x: x.eval_at(delta))

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        if (self.k, self.r) != (other.k, other.r):
            return False
        for n in set(self.terms) | set(other.terms):
            if self.component(n) != other.component(n):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{n}: {self.terms[n]!r}" for n in self.degrees())
        return f"GradedElement(k={self.k}, r={self.r}, {{{body}}})"


# -- index helpers (0-based positions on the folded circle) -------------------

def _L(j: int) -> int:
    return j - 1


def _T(t: int, k: int) -> int:
    return k + t - 1


def _R(j: int, n: int, k: int, r: int) -> int:
    return k + 4 * n * r + j - 1


# -- product ------------------------------------------------------------------

@lru_cache(maxsize=None)
def _product_tangle(m: int, n: int, i: int, k: int, r: int) -> Tangle:
    d = m + n - i
    band = 2 * r * i
    top_a, top_b = 4 * r * m, 4 * r * n
    wires = []
    for j in range(1, k + 1):
        wires.append(((0, 1 + _L(j)), (1, 1 + _L(j))))
        wires.append(((1, 1 + _R(j, m, k, r)), (2, 1 + _L(k + 1 - j))))
        wires.append(((0, 1 + _R(j, d, k, r)), (2, 1 + _R(j, n, k, r))))
    for t in range(1, band + 1):
        wires.append(((1, 1 + _T(top_a - t + 1, k)), (2, 1 + _T(t, k))))
    pos = 1
    for t in range(1, top_a - band + 1):
        wires.append(((0, 1 + _T(pos, k)), (1, 1 + _T(t, k))))
        pos += 1
    for t in range(band + 1, top_b + 1):
        wires.append(((0, 1 + _T(pos, k)), (2, 1 + _T(t, k))))
        pos += 1
    return Tangle(box_arity(d, k, r), (box_arity(m, k, r), box_arity(n, k, r)), wires)


def product_term(x: TLElement, y: TLElement, m: int, n: int, i: int, k: int, r: int) -> TLElement:
    """The ``i``-band contraction of degree-``m`` ``x`` with degree-``n`` ``y``."""
    if not 0 <= i <= 2 * min(m, n):
        raise ValueError(f"contraction count {i} outside 0..{2 * min(m, n)}")
    return evaluate_tangle(_product_tangle(m, n, i, k, r), [x, y])


def graded_product(a: GradedElement, b: GradedElement) -> GradedElement:
    a._check(b)
    k, r = a.k, a.r
    out: dict = {}
    for m, x in a.terms.items():
        for n, y in b.terms.items():
            for i in range(2 * min(m, n) + 1):
                z = product_term(x, y, m, n, i, k, r)
                if z.is_zero():
                    continue
                d = m + n - i
                prev = out.get(d)
                if prev is None:
                    out[d] = z
                else:
                    s = prev + z
                    if s.is_zero():
                        del out[d]
                    else:
                        out[d] = s
    return GradedElement._raw(k, r, out)


def power(a: GradedElement, m: int) -> GradedElement:
    out = unit(a.k, a.r)
    for _ in range(m):
        out = graded_product(out, a)
    return out


# -- involution and inner product -----------------------------------------

def star(a: GradedElement) -> GradedElement:
    """Reflection of each component: ``L_j <-> R_{k+1-j}``, ``T_t <-> T_{4nr+1-t}``."""
    def reflect(x: TLElement) -> TLElement:
        size = x.arity
        return x.relabel([size - 1 - c for c in range(size)])

    return a._map(reflect)


def _pair_sum(x: TLElement, y: TLElement):
    total = None
    for p, c in x.terms.items():
        for q, d in y.terms.items():
            term = (c * d).shift(count_cycles(p, q))
            total = term if total is None else total + term
    return total


def inner_product(a: GradedElement, b: GradedElement) -> Scalar:
    """``delta^{-k}`` times the pointwise closure of matching degree components."""
    a._check(b)
    total = None
    for n, x in a.terms.items():
        y = b.terms.get(n)
        if y is None:
            continue
        s = _pair_sum(x, y)
        if s is not None:
            total = s if total is None else total + s
    if total is None:
        sample = _any_coeff(a) or _any_coeff(b)
        return zero_like(sample) if sample is not None else Laurent()
    return total.shift(-a.k)


def _any_coeff(a: GradedElement):
    for x in a.terms.values():
        for c in x.terms.values():
            return c
    return None


def graded_trace(x: GradedElement) -> Scalar:
    """``tr(x) = <x o I, I>``, which only sees the degree-0 component."""
    y = x.terms.get(0)
    if y is None:
        sample = _any_coeff(x)
        return zero_like(sample) if sample is not None else Laurent()
    (ident,) = unit(x.k, x.r).component(0).terms
    total = None
    for p, c in y.terms.items():
        term = c.shift(count_cycles(p, ident) - x.k)
        total = term if total is None else total + term
    return total


# -- named elements -----------------------------------------------------------

def _box_from_pairs(n: int, k: int, r: int, pairs: Iterable) -> GradedElement:
    size = box_arity(n, k, r)
    partners = [-1] * size
    for a, b in pairs:
        partners[a], partners[b] = b, a
    return GradedElement._raw(k, r, {n: TLElement.basis(Pairing(partners))})


def _sides_through(n: int, k: int, r: int) -> list:
    return [(_L(j), _R(k + 1 - j, n, k, r)) for j in range(1, k + 1)]


def unit(k: int, r: int = 1) -> GradedElement:
    """Degree-0 through-strand element ``I``."""
    _check_params(k, r)
    return _box_from_pairs(0, k, r, _sides_through(0, k, r))


def element_U(k: int, r: int = 1) -> GradedElement:
    """One nested band-group fold on top; side strings straight through."""
    pairs = _sides_through(1, k, r)
    pairs += [(_T(s, k), _T(4 * r + 1 - s, k)) for s in range(1, 2 * r + 1)]
    return _box_from_pairs(1, k, r, pairs)


def element_W(k: int, r: int = 1) -> GradedElement:
    """Adjacent caps on top; side strings straight through."""
    pairs = _sides_through(1, k, r)
    pairs += [(_T(2 * j - 1, k), _T(2 * j, k)) for j in range(1, 2 * r + 1)]
    return _box_from_pairs(1, k, r, pairs)


def element_Lambda(k: int) -> GradedElement:
    """Side bundles folded onto the top ends around one central nested fold (``r = 1``)."""
    _check_params(k, 1)
    half = k // 2
    n = half + 1
    middle = 4 if k % 2 == 0 else 2
    pairs = [(_L(j), _T(k + 1 - j, k)) for j in range(1, k + 1)]
    pairs += [(_T(k + s, k), _T(k + middle + 1 - s, k)) for s in range(1, middle // 2 + 1)]
    pairs += [(_T(k + middle + s, k), _R(k + 1 - s, n, k, 1)) for s in range(1, k + 1)]
    return _box_from_pairs(n, k, 1, pairs)


def jones_E(k: int, r: int = 1) -> GradedElement:
    """Bare ``E_k`` at level ``k+1``: the two lowest points on each side capped."""
    if k < 1:
        raise ValueError("E_k needs k >= 1 (two side strings to cap)")
    kk = k + 1
    pairs = [(_L(1), _L(2)), (_R(k, 0, kk, r), _R(k + 1, 0, kk, r))]
    pairs += [(_L(j), _R(k + 2 - j, 0, kk, r)) for j in range(3, kk + 1)]
    return _box_from_pairs(0, kk, r, pairs)


def jones_e(k: int, r: int = 1) -> GradedElement:
    """Jones projection ``e_k = delta^{-1} E_k``."""
    return jones_E(k, r).shift(-1)


# -- cups, caps, inclusions ---------------------------------------------------

def _omega_component(x: TLElement, n: int, k: int, r: int, p: int, q: int) -> TLElement:
    size = x.arity
    new_n = n + p + q
    new_size = box_arity(new_n, k, r)
    lead = 4 * r * p
    index_map = []
    for c in range(size):
        if c < k:
            index_map.append(c)
        elif c < k + 4 * n * r:
            index_map.append(c + lead)
        else:
            index_map.append(c + 4 * r * (p + q))
    cups = []
    for g in range(p):
        base = _T(1 + 4 * r * g, k)
        cups += [(base + s - 1, base + 4 * r - s) for s in range(1, 2 * r + 1)]
    for g in range(q):
        base = _T(1 + 4 * r * (p + n + g), k)
        cups += [(base + s - 1, base + 4 * r - s) for s in range(1, 2 * r + 1)]
    out = {}
    for pairing, c in x.terms.items():
        partners = [0] * new_size
        for i, j in enumerate(pairing):
            partners[index_map[i]] = index_map[j]
        for a, b in cups:
            partners[a], partners[b] = b, a
        out[Pairing._unchecked(partners)] = c.shift(-r * (p + q))
    return TLElement._raw(new_size, out)


def omega(x: GradedElement, p: int, q: int) -> GradedElement:
    """Add ``p`` normalized band-group cups on the left of the top row and ``q`` on the right."""
    if p < 0 or q < 0:
        raise ValueError("cup counts must be nonnegative")
    out = {n + p + q: _omega_component(y, n, x.k, x.r, p, q) for n, y in x.terms.items()}
    return GradedElement._raw(x.k, x.r, out)


def I_n(n: int, k: int, r: int = 1) -> GradedElement:
    return omega(unit(k, r), n, 0)


def _cap(x: GradedElement, left: bool) -> GradedElement:
    k, r = x.k, x.r
    out = {}
    for n, y in x.terms.items():
        if n < 1:
            raise ValueError("cup_cap needs degree >= 1")
        first = 1 if left else 4 * r * (n - 1) + 1
        closures = [(1 + _T(first + s - 1, k), 1 + _T(first + 4 * r - s, k)) for s in range(1, 2 * r + 1)]
        z = close_points(y, closures).shift(-r)
        if not z.is_zero():
            out[n - 1] = z
    return GradedElement._raw(k, r, out)


def cup_cap_left(x: GradedElement) -> GradedElement:
    """Close the first band group of the top row with nested arcs (normalized)."""
    return _cap(x, True)


def cup_cap_right(x: GradedElement) -> GradedElement:
    """Close the last band group of the top row with nested arcs (normalized)."""
    return _cap(x, False)


def embed(a: GradedElement, l: int) -> GradedElement:
    """``H_k -> H_l``: add ``l-k`` strands passing beneath every box."""
    k, r = a.k, a.r
    if l < k:
        raise ValueError(f"cannot embed level {k} into level {l}")
    d = l - k
    if d == 0:
        return a
    out = {}
    for n, x in a.terms.items():
        new_size = box_arity(n, l, r)
        terms = {}
        for pairing, c in x.terms.items():
            partners = [0] * new_size
            for i, j in enumerate(pairing):
                partners[i + d] = j + d
            for j in range(d):
                partners[j] = new_size - 1 - j
                partners[new_size - 1 - j] = j
            terms[Pairing._unchecked(partners)] = c
        out[n] = TLElement._raw(new_size, terms)
    return GradedElement._raw(l, r, out)


def cond_expect_graded(x: GradedElement, target: int) -> GradedElement:
    """Cap the ``l`` lowest side strings around the bottom and scale by ``delta^{-l}``."""
    k_src, r = x.k, x.r
    if target > k_src:
        raise ValueError(f"target level {target} exceeds source level {k_src}")
    if target < 0:
        raise ValueError("target level must be >= 0")
    l = k_src - target
    if l == 0:
        return x
    out = {}
    for n, y in x.terms.items():
        closures = [(1 + _L(j), 1 + _R(k_src + 1 - j, n, k_src, r)) for j in range(1, l + 1)]
        z = close_points(y, closures).shift(-l)
        if not z.is_zero():
            out[n] = z
    return GradedElement._raw(target, r, out)


def alpha(n: int, k: int, r: int = 1) -> GradedElement:
    """``W omega_n - omega_n W`` with the cups on the right, resp. left, of ``W``."""
    if n < 0:
        raise ValueError("alpha_n needs n >= 0")
    w = element_W(k, r)
    return omega(w, 0, n) - omega(w, n, 0)


# -- sampling -----------------------------------------------------------------

def random_element(
    k: int,
    r: int,
    max_degree: int,
    rng: random.Random,
    max_degrees: int = 2,
    max_terms: int = 2,
    coeff_range: int = 3,
    delta: float | None = None,
) -> GradedElement:
    """Sparse random element with integer coefficients in ``[-coeff_range, coeff_range]``."""
    degrees = rng.sample(range(max_degree + 1), rng.randint(1, min(max_degrees, max_degree + 1)))
    out = {}
    for n in degrees:
        strands = box_arity(n, k, r) // 2
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            c = rng.randint(-coeff_range, coeff_range)
            if c == 0:
                continue
            scal = Numeric(float(c), delta) if delta is not None else Laurent.constant(c)
            _accumulate(terms, [(random_pairing(strands, rng), scal)])
        if terms:
            out[n] = TLElement._raw(box_arity(n, k, r), terms)
    return GradedElement._raw(k, r, out)


def named_element(name: str, k: int, r: int = 1) -> GradedElement:
    """Look up ``U``, ``W``, ``I``, ``Lambda``, ``e``, ``E`` or ``I_n:p``."""
    if name == "U":
        return element_U(k, r)
    if name == "W":
        return element_W(k, r)
    if name == "I":
        return unit(k, r)
    if name == "Lambda":
        if r != 1:
            raise ValueError("Lambda is defined for r = 1 only")
        return element_Lambda(k)
    if name == "e":
        return jones_e(k, r)
    if name == "E":
        return jones_E(k, r)
    if name.startswith("I_n:"):
        try:
            p = int(name[4:])
        except ValueError:
            raise ValueError(f"bad cup count in {name!r}") from None
        return I_n(p, k, r)
    raise ValueError(f"unknown element {name!r} (expected U, W, I, Lambda, e, E or I_n:p)")
