"""Non-crossing pairings, their formal linear combinations, and tangle evaluation.

Boundary points of a disk are numbered ``1..2m`` clockwise in every public
interface; the marked interval is the gap between point ``2m`` and point 1.
Internally a :class:`Pairing` is the tuple of 0-based partner indices.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Iterable, Sequence

from .scalar import ONE, Numeric, Scalar


class NonPlanarError(ValueError):
    pass


class Pairing(tuple):
    """A non-crossing perfect matching, stored as 0-based partner indices.

    Tuple order on the partner array coincides with lexicographic order on
    sorted 1-based pair lists, so ``sorted`` gives the canonical basis order.
    """

    __slots__ = ()

    def __new__(cls, partners: Iterable[int] = ()):
        obj = tuple.__new__(cls, partners)
        _check_partners(obj)
        return obj

    @classmethod
    def _unchecked(cls, partners) -> "Pairing":
        return tuple.__new__(cls, partners)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]], arity: int | None = None) -> "Pairing":
        pairs = [tuple(p) for p in pairs]
        if arity is None:
            arity = 2 * len(pairs)
        partners = _partners_from_pairs(pairs, arity)
        witness = _crossing_witness(partners)
        if witness:
            (a, b), (c, d) = witness
            raise NonPlanarError(f"crossing at ({a},{b})/({c},{d})")
        return tuple.__new__(cls, partners)

    @property
    def arity(self) -> int:
        return len(self)

    def pairs(self) -> tuple:
        """Sorted 1-based pairs."""
        return tuple((i + 1, j + 1) for i, j in enumerate(self) if i < j)

    def relabel(self, index_map: Sequence[int]) -> "Pairing":
        """Move point ``i`` to position ``index_map[i]`` (0-based)."""
        out = [0] * len(self)
        for i, j in enumerate(self):
            out[index_map[i]] = index_map[j]
        return Pairing(out)

    def __repr__(self):
        return f"Pairing({list(self.pairs())})"


def _partners_from_pairs(pairs, arity: int) -> list:
    if arity % 2:
        raise ValueError(f"arity must be even, got {arity}")
    partners = [-1] * arity
    for pair in pairs:
        if len(pair) != 2:
            raise ValueError(f"pairs must have two points, got {pair!r}")
        a, b = pair
        for x in (a, b):
            if not isinstance(x, int) or not 1 <= x <= arity:
                raise ValueError(f"point {x!r} outside 1..{arity}")
        if a == b:
            raise ValueError(f"point {a} paired with itself")
        for x in (a, b):
            if partners[x - 1] != -1:
                raise ValueError(f"point {x} used twice")
        partners[a - 1] = b - 1
        partners[b - 1] = a - 1
    missing = [i + 1 for i, p in enumerate(partners) if p == -1]
    if missing:
        raise ValueError(f"not a perfect matching: points {missing} unpaired")
    return partners


def _check_partners(partners) -> None:
    n = len(partners)
    if n % 2:
        raise ValueError(f"arity must be even, got {n}")
    for i, j in enumerate(partners):
        if not 0 <= j < n or j == i or partners[j] != i:
            raise ValueError(f"partner array {list(partners)} is not a perfect matching")
    witness = _crossing_witness(partners)
    if witness:
        (a, b), (c, d) = witness
        raise NonPlanarError(f"crossing at ({a},{b})/({c},{d})")


def _crossing_witness(partners):
    stack = []
    for i, j in enumerate(partners):
        if j > i:
            stack.append(i)
        else:
            top = stack.pop()
            if top != j:
                # arc (j, i) closes while (top, partners[top]) is still open inside it
                a, b = sorted((j + 1, i + 1))
                c, d = sorted((top + 1, partners[top] + 1))
                first, second = sorted([(a, b), (c, d)])
                return first, second
    return None


def is_noncrossing(pairs: Iterable[Sequence[int]]) -> bool:
    """True iff the 1-based perfect matching ``pairs`` has no interleaved pairs."""
    pairs = [tuple(p) for p in pairs]
    partners = _partners_from_pairs(pairs, 2 * len(pairs))
    return _crossing_witness(partners) is None


def catalan(m: int) -> int:
    from math import comb

    return comb(2 * m, m) // (m + 1)


@lru_cache(maxsize=None)
def enumerate_pairings(m: int) -> tuple:
    """All non-crossing perfect matchings on ``2m`` points, in canonical order."""
    if m < 0:
        raise ValueError("strand count must be nonnegative")
    if m == 0:
        return (Pairing._unchecked(()),)
    out = []
    # point 0 pairs with 2j+1; inside has j arcs, outside m-1-j
    for j in range(m):
        close = 2 * j + 1
        for inside in enumerate_pairings(j):
            for outside in enumerate_pairings(m - 1 - j):
                p = [close]
                p.extend(x + 1 for x in inside)
                p.append(0)
                p.extend(x + close + 1 for x in outside)
                out.append(Pairing._unchecked(p))
    return tuple(out)


def random_pairing(m: int, rng: random.Random) -> Pairing:
    """Uniformly random non-crossing matching on ``2m`` points (cycle lemma)."""
    steps = [1] * m + [-1] * (m + 1)
    rng.shuffle(steps)
    height, low, low_at = 0, 0, 0
    for i, s in enumerate(steps):
        height += s
        if height < low:
            low, low_at = height, i
    word = steps[low_at + 1:] + steps[:low_at + 1]
    word.pop()
    partners = [0] * (2 * m)
    stack = []
    for i, s in enumerate(word):
        if s == 1:
            stack.append(i)
        else:
            j = stack.pop()
            partners[i], partners[j] = j, i
    return Pairing._unchecked(partners)


def count_cycles(p: Sequence[int], q: Sequence[int]) -> int:
    """Closed loops formed by gluing two matchings on the same points pointwise."""
    seen = bytearray(len(p))
    loops = 0
    for s in range(len(p)):
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


class TLElement:
    """Finite linear combination of pairings of a common arity."""

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms: dict | None = None):
        if arity % 2 or arity < 0:
            raise ValueError(f"arity must be a nonnegative even integer, got {arity}")
        clean = {}
        for p, c in (terms or {}).items():
            if not isinstance(p, Pairing):
                p = Pairing(p)
            if len(p) != arity:
                raise ValueError(f"pairing of arity {len(p)} in element of arity {arity}")
            if not c.is_zero():
                clean[p] = c
        self.arity = arity
        self.terms = clean

    @classmethod
    def _raw(cls, arity: int, terms: dict) -> "TLElement":
        obj = cls.__new__(cls)
        obj.arity = arity
        obj.terms = terms
        return obj

    @classmethod
    def basis(cls, pairing: Pairing, coeff: Scalar = ONE) -> "TLElement":
        return cls(len(pairing), {pairing: coeff})

    @classmethod
    def zero(cls, arity: int) -> "TLElement":
        return cls._raw(arity, {})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, pairing: Pairing) -> Scalar | None:
        return self.terms.get(pairing)

    def items(self):
        """Terms in canonical basis order."""
        return sorted(self.terms.items())

    def _check(self, other: "TLElement") -> None:
        if not isinstance(other, TLElement):
            raise TypeError(f"expected TLElement, got {type(other).__name__}")
        if other.arity != self.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        _accumulate(out, other.terms.items())
        return TLElement._raw(self.arity, out)

    def __neg__(self):
        return TLElement._raw(self.arity, {p: -c for p, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "TLElement":
        out = {}
        for p, c in self.terms.items():
            v = c * s
            if not v.is_zero():
                out[p] = v
        return TLElement._raw(self.arity, out)

    def __mul__(self, s):
        if isinstance(s, TLElement):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def shift(self, p: int) -> "TLElement":
        """Multiply every coefficient by ``delta**p``."""
        if not p:
            return self
        return TLElement._raw(self.arity, {q: c.shift(p) for q, c in self.terms.items()})

    def relabel(self, index_map: Sequence[int]) -> "TLElement":
        return TLElement._raw(self.arity, {p.relabel(index_map): c for p, c in self.terms.items()})

    def eval_at(self, delta: float) -> "TLElement":
        return TLElement(self.arity, {p: c.eval_at(delta) for p, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        if self.arity != other.arity:
            return False
        numeric = any(isinstance(c, Numeric) for c in itertools.chain(self.terms.values(), other.terms.values()))
        if not numeric:
            return self.terms == other.terms
        for p in set(self.terms) | set(other.terms):
            a, b = self.terms.get(p), other.terms.get(p)
            if a is None:
                a = b * 0
            if b is None:
                b = a * 0
            if not a.isclose(b):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return f"TLElement({self.arity}, 0)"
        body = " + ".join(f"({c})*{list(p.pairs())}" for p, c in self.items())
        return f"TLElement({self.arity}, {body})"


def _accumulate(out: dict, items) -> None:
    for p, c in items:
        prev = out.get(p)
        if prev is None:
            out[p] = c
        else:
            s = prev + c
            if s.is_zero():
                del out[p]
            else:
                out[p] = s


class Tangle:
    """A wiring plan: output disk, ordered input slots, and a perfect matching of all points.

    Points are addressed as ``(slot, index)`` with slot 0 the output disk,
    slots ``1..s`` the inputs, and 1-based indices.
    """

    __slots__ = ("output_arity", "slot_arities", "_wiring", "_offsets", "__weakref__")

    def __init__(self, output_arity: int, slot_arities: Sequence[int], wires, check: bool = True):
        self.output_arity = output_arity
        self.slot_arities = tuple(slot_arities)
        offsets = []
        base = output_arity
        for a in self.slot_arities:
            if a % 2:
                raise ValueError(f"slot arity must be even, got {a}")
            offsets.append(base)
            base += a
        self._offsets = tuple(offsets)
        total = base
        wiring = [-1] * total
        for p, q in wires:
            g, h = self._label(p), self._label(q)
            if g == h:
                raise ValueError(f"point {p} wired to itself")
            for x, pt in ((g, p), (h, q)):
                if wiring[x] != -1:
                    raise ValueError(f"point {pt} reused")
            wiring[g], wiring[h] = h, g
        unwired = [self._point(x) for x, y in enumerate(wiring) if y == -1]
        if unwired:
            raise ValueError(f"wiring is not a perfect matching: {unwired} unwired")
        self._wiring = tuple(wiring)
        if check and not self.is_planar():
            raise NonPlanarError("wiring cannot be drawn without crossings")

    def _label(self, point) -> int:
        slot, idx = point
        if slot == 0:
            arity, base = self.output_arity, 0
        elif 1 <= slot <= len(self.slot_arities):
            arity, base = self.slot_arities[slot - 1], self._offsets[slot - 1]
        else:
            raise ValueError(f"no slot {slot}")
        if not 1 <= idx <= arity:
            raise ValueError(f"point {idx} outside 1..{arity} on slot {slot}")
        return base + idx - 1

    def _point(self, label: int) -> tuple:
        if label < self.output_arity:
            return (0, label + 1)
        for s in range(len(self._offsets) - 1, -1, -1):
            if label >= self._offsets[s]:
                return (s + 1, label - self._offsets[s] + 1)
        raise AssertionError(label)

    def is_planar(self) -> bool:
        """Euler-characteristic test on the map formed by disks and strings.

        Each disk is a vertex whose darts are its boundary points in cyclic
        order (reversed for the output disk, seen from inside); strings are
        edges.  The wiring is planar iff every connected component has genus 0.
        """
        O = self.output_arity
        w = self._wiring
        n = len(w)
        rot = [0] * n
        owner = [0] * n
        for i in range(O):
            rot[i] = (i - 1) % O
        for s, (base, a) in enumerate(zip(self._offsets, self.slot_arities), start=1):
            for j in range(a):
                rot[base + j] = base + (j + 1) % a
                owner[base + j] = s
        seen = bytearray(n)
        faces = 0
        for d in range(n):
            if seen[d]:
                continue
            faces += 1
            x = d
            while not seen[x]:
                seen[x] = 1
                x = rot[w[x]]
        nverts = 1 + len(self.slot_arities)
        parent = list(range(nverts))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for g in range(n):
            a, b = find(owner[g]), find(owner[w[g]])
            if a != b:
                parent[a] = b
        components = len({find(v) for v in range(nverts)})
        arities = (O,) + self.slot_arities
        faces += sum(1 for a in arities if a == 0)
        return nverts - n // 2 + faces == 2 * components

    def eval_basis(self, pairings: Sequence[Pairing]) -> tuple:
        """Evaluate on basis pairings: returns ``(output pairing, closed loops)``."""
        O = self.output_arity
        w = self._wiring
        inner = list(range(O))
        for base, p in zip(self._offsets, pairings):
            inner.extend([base + x for x in p])
        n = len(w)
        seen = bytearray(n)
        out = [0] * O
        for o in range(O):
            if seen[o]:
                continue
            seen[o] = 1
            x = w[o]
            while x >= O:
                seen[x] = 1
                y = inner[x]
                seen[y] = 1
                x = w[y]
            seen[x] = 1
            out[o] = x
            out[x] = o
        loops = 0
        for g in range(O, n):
            if seen[g]:
                continue
            loops += 1
            x = g
            while True:
                seen[x] = 1
                y = inner[x]
                seen[y] = 1
                x = w[y]
                if x == g:
                    break
        return Pairing._unchecked(out), loops

    def __call__(self, *inputs: TLElement) -> TLElement:
        return evaluate_tangle(self, list(inputs))


def evaluate_tangle(t: Tangle, inputs: Sequence[TLElement]) -> TLElement:
    """Multilinear evaluation of ``t`` on the given elements."""
    if len(inputs) != len(t.slot_arities):
        raise ValueError(f"tangle has {len(t.slot_arities)} slots, got {len(inputs)} inputs")
    for s, (x, a) in enumerate(zip(inputs, t.slot_arities), start=1):
        if x.arity != a:
            raise ValueError(f"slot {s} has arity {a}, input has arity {x.arity}")
    out: dict = {}
    if len(inputs) == 1:
        for p, c in inputs[0].terms.items():
            q, loops = t.eval_basis((p,))
            _accumulate(out, ((q, c.shift(loops)),))
        return TLElement._raw(t.output_arity, out)
    for combo in itertools.product(*(x.terms.items() for x in inputs)):
        q, loops = t.eval_basis([p for p, _ in combo])
        c = combo[0][1]
        for _, ci in combo[1:]:
            c = c * ci
        _accumulate(out, ((q, c.shift(loops)),))
    return TLElement._raw(t.output_arity, out)


def glue(a: TLElement, b: TLElement, glue_pairs, order=None) -> TLElement:
    """Glue ``a`` and ``b`` along ``glue_pairs`` of 1-based (point of a, point of b).

    The residual points form the output boundary in ``order``, a list of
    ``("a", i)`` / ``("b", j)``; by default a's residual points ascending,
    then b's.  Every closed strand contributes one loop factor.
    """
    glue_pairs = [tuple(g) for g in glue_pairs]
    used_a = [i for i, _ in glue_pairs]
    used_b = [j for _, j in glue_pairs]
    for name, used in (("a", used_a), ("b", used_b)):
        dup = {x for x in used if used.count(x) > 1}
        if dup:
            raise ValueError(f"point reuse on {name}: {sorted(dup)}")
    if order is None:
        order = [("a", i) for i in range(1, a.arity + 1) if i not in used_a]
        order += [("b", j) for j in range(1, b.arity + 1) if j not in used_b]
    slot = {"a": 1, "b": 2}
    expected = {("a", i) for i in range(1, a.arity + 1) if i not in used_a}
    expected |= {("b", j) for j in range(1, b.arity + 1) if j not in used_b}
    if set(map(tuple, order)) != expected or len(order) != len(expected):
        raise ValueError("output order must list every residual point exactly once")
    wires = [((1, i), (2, j)) for i, j in glue_pairs]
    wires += [((0, pos), (slot[name], idx)) for pos, (name, idx) in enumerate(order, start=1)]
    t = Tangle(len(order), (a.arity, b.arity), wires)
    return evaluate_tangle(t, [a, b])


def identity_tangle(arity: int) -> Tangle:
    return Tangle(arity, (arity,), [((0, i), (1, i)) for i in range(1, arity + 1)])


@lru_cache(maxsize=4096)
def _closure_tangle(arity: int, closures: tuple, order: tuple) -> Tangle:
    wires = [((1, i), (1, j)) for i, j in closures]
    wires += [((0, pos), (1, i)) for pos, i in enumerate(order, start=1)]
    return Tangle(len(order), (arity,), wires)


def close_points(x: TLElement, closures, order=None) -> TLElement:
    """Join the given 1-based point pairs of ``x`` by arcs outside the disk.

    The remaining points keep their cyclic order, listed from ``order[0]``
    (by default ascending from the smallest residual point).
    """
    closures = tuple(tuple(c) for c in closures)
    used = {i for c in closures for i in c}
    if order is None:
        order = tuple(i for i in range(1, x.arity + 1) if i not in used)
    return evaluate_tangle(_closure_tangle(x.arity, closures, tuple(order)), [x])
