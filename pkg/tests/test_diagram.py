"""Pairings, linear combinations and tangle evaluation."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from palab.diagram import (
    NonPlanarError,
    Pairing,
    TLElement,
    Tangle,
    catalan,
    close_points,
    count_cycles,
    enumerate_pairings,
    glue,
    identity_tangle,
    is_noncrossing,
    random_pairing,
)
from palab.scalar import Laurent, ONE


def brute_force_pairings(points):
    """All non-crossing matchings of a sorted point list, by choosing the partner of the first point."""
    if not points:
        return [[]]
    out = []
    first = points[0]
    for idx in range(1, len(points), 2):
        inside, outside = points[1:idx], points[idx + 1:]
        for a in brute_force_pairings(inside):
            for b in brute_force_pairings(outside):
                out.append([(first, points[idx])] + a + b)
    return out


def strand_trace(a_pairs, b_pairs, glue_pairs, order):
    """Union-find strand tracing: output pairs and loop count after gluing."""
    nodes = [("a", i) for pair in a_pairs for i in pair] + [("b", j) for pair in b_pairs for j in pair]
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    for i, j in a_pairs:
        union(("a", i), ("a", j))
    for i, j in b_pairs:
        union(("b", i), ("b", j))
    for i, j in glue_pairs:
        union(("a", i), ("b", j))
    groups = {}
    for pos, pt in enumerate(order, start=1):
        groups.setdefault(find(pt), []).append(pos)
    out = sorted(tuple(v) for v in groups.values())
    loops = len({find(n) for n in nodes}) - len(groups)
    return out, loops


pairing_sizes = st.integers(0, 6)


def test_enumeration_examples():
    assert [p.pairs() for p in enumerate_pairings(1)] == [((1, 2),)]
    assert [p.pairs() for p in enumerate_pairings(2)] == [((1, 2), (3, 4)), ((1, 4), (2, 3))]
    assert len(enumerate_pairings(3)) == 5


@pytest.mark.parametrize("m", range(0, 8))
def test_enumeration_matches_recursive_oracle(m):
    got = sorted(p.pairs() for p in enumerate_pairings(m))
    want = sorted(tuple(sorted(x)) for x in brute_force_pairings(list(range(1, 2 * m + 1))))
    assert got == want
    assert len(got) == catalan(m)
    assert list(enumerate_pairings(m)) == sorted(enumerate_pairings(m))


def test_noncrossing_predicate():
    assert not is_noncrossing([(1, 3), (2, 4)])
    assert is_noncrossing([(1, 4), (2, 3)])
    assert is_noncrossing([(1, 2), (3, 4)])


def test_crossing_rejected_with_witness():
    with pytest.raises(NonPlanarError, match=r"crossing at \(1,3\)/\(2,4\)"):
        Pairing.from_pairs([(1, 3), (2, 4)])


def test_malformed_pairings_rejected():
    with pytest.raises(ValueError):
        Pairing.from_pairs([(1, 2), (2, 3)])
    with pytest.raises(ValueError):
        Pairing.from_pairs([(1, 2)], 4)


def test_glue_two_cups_is_one_loop():
    cup = TLElement.basis(Pairing.from_pairs([(1, 2)]))
    out = glue(cup, cup, [(1, 1), (2, 2)])
    assert out.arity == 0
    assert out.coefficient(Pairing(())) == Laurent.monomial(1)


def test_glue_nested_cups_fully():
    nest = TLElement.basis(Pairing.from_pairs([(1, 4), (2, 3)]))
    out = glue(nest, nest, [(1, 4), (2, 3), (3, 2), (4, 1)])
    assert out.coefficient(Pairing(())) == Laurent.monomial(2)


def test_partial_glue_of_nested_cups():
    nest = TLElement.basis(Pairing.from_pairs([(1, 4), (2, 3)]))
    out = glue(nest, nest, [(4, 1), (3, 2)])
    assert out == TLElement.basis(Pairing.from_pairs([(1, 4), (2, 3)]))


def test_identity_tangle_and_closure():
    rng = random.Random(3)
    for m in range(5):
        x = TLElement.basis(random_pairing(m, rng), Laurent.constant(3))
        assert identity_tangle(2 * m)(x) == x
    unit2 = TLElement.basis(Pairing.from_pairs([(1, 4), (2, 3)]))
    assert close_points(unit2, [(1, 4), (2, 3)]).coefficient(Pairing(())) == Laurent.monomial(2)


def test_nonplanar_tangle_rejected():
    # two strings crossing inside the output disk
    with pytest.raises(NonPlanarError):
        Tangle(4, (4,), [((0, 1), (1, 1)), ((0, 2), (1, 3)), ((0, 3), (1, 2)), ((0, 4), (1, 4))])


def test_tangle_wiring_errors():
    with pytest.raises(ValueError, match="unwired"):
        Tangle(2, (2,), [((0, 1), (1, 1))])
    with pytest.raises(ValueError, match="reused"):
        Tangle(2, (2,), [((0, 1), (1, 1)), ((0, 1), (1, 2))])


def test_linear_combinations():
    p, q = enumerate_pairings(2)
    x = TLElement.basis(p) + TLElement.basis(q) * Laurent.constant(2)
    assert (x - x).is_zero()
    assert x.shift(1).coefficient(q) == Laurent.monomial(1, 2)
    with pytest.raises(ValueError):
        x + TLElement.zero(2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_random_pairing_is_valid(m, seed):
    p = random_pairing(m, random.Random(seed))
    assert is_noncrossing(p.pairs())
    assert p in enumerate_pairings(m)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_full_glue_matches_strand_tracing(m, seed):
    rng = random.Random(seed)
    p, q = random_pairing(m, rng), random_pairing(m, rng)
    n = 2 * m
    # reflect q so the two disks face each other along the full boundary
    gp = [(i, n + 1 - i) for i in range(1, n + 1)]
    out = glue(TLElement.basis(p), TLElement.basis(q), gp)
    _, loops = strand_trace(p.pairs(), q.pairs(), gp, [])
    assert out.coefficient(Pairing(())) == Laurent.monomial(loops)
    q_reflected = [(n + 1 - b, n + 1 - a) for a, b in q.pairs()]
    assert loops == count_cycles(p, Pairing.from_pairs(q_reflected))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_partial_glue_matches_strand_tracing(m, n, data):
    rng = random.Random(data.draw(st.integers(0, 2**32 - 1)))
    p, q = random_pairing(m, rng), random_pairing(n, rng)
    g = data.draw(st.integers(0, min(2 * m, 2 * n)))
    # glue the last g points of a to the first g points of b, facing each other
    gp = [(2 * m - t, 1 + t) for t in range(g)]
    out = glue(TLElement.basis(p), TLElement.basis(q), gp)
    order = [("a", i) for i in range(1, 2 * m - g + 1)] + [("b", j) for j in range(g + 1, 2 * n + 1)]
    want_pairs, loops = strand_trace(p.pairs(), q.pairs(), gp, order)
    ((got_p, c),) = out.items()
    assert list(got_p.pairs()) == want_pairs
    assert c == Laurent.monomial(loops)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_count_cycles_with_self(m, seed):
    p = random_pairing(m, random.Random(seed))
    assert count_cycles(p, p) == m
    assert Pairing.from_pairs(p.pairs()) == p


def test_eval_at_is_numeric():
    x = TLElement.basis(enumerate_pairings(2)[0], Laurent({1: 1}))
    y = x.eval_at(2.0)
    assert float(y.coefficient(enumerate_pairings(2)[0])) == 2.0
    assert y == x.eval_at(2.0)
    with pytest.raises(ValueError, match="different loop values"):
        y == x.eval_at(2.5)
    assert ONE.eval_at(2.0).value == 1.0
