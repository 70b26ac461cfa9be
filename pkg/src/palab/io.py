"""JSON forms of scalars, pairings, tower elements and graded elements."""

from __future__ import annotations

import json
from pathlib import Path

from .diagram import NonPlanarError, Pairing, TLElement
from .graded import GradedElement, box_arity, named_element
from .scalar import scalar_from_json


class ParseError(ValueError):
    pass


def pairing_to_json(p: Pairing) -> list:
    return [list(pair) for pair in p.pairs()]


def pairing_from_json(obj, arity: int | None = None) -> Pairing:
    if not isinstance(obj, list):
        raise ParseError(f"pairing must be a list of pairs, got {type(obj).__name__}")
    pairs = []
    for pair in obj:
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, int) for x in pair)):
            raise ParseError(f"pairing entries must be [int, int], got {pair!r}")
        pairs.append(tuple(pair))
    try:
        return Pairing.from_pairs(pairs, arity)
    except NonPlanarError as exc:
        raise ParseError(str(exc)) from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def tl_to_json(x: TLElement) -> dict:
    return {
        "arity": x.arity,
        "terms": [{"pairing": pairing_to_json(p), "coeff": c.to_json()} for p, c in x.items()],
    }


def tl_from_json(obj, delta: float | None = None) -> TLElement:
    if not isinstance(obj, dict) or "arity" not in obj or "terms" not in obj:
        raise ParseError("element JSON needs 'arity' and 'terms'")
    arity = obj["arity"]
    if not isinstance(arity, int) or arity < 0:
        raise ParseError(f"arity must be a nonnegative integer, got {arity!r}")
    if arity % 2:
        raise ParseError(f"arity {arity} is odd")
    if "level" in obj and obj["level"] * 2 != arity:
        raise ParseError(f"level {obj['level']} does not match arity {arity}")
    terms: dict = {}
    for t in obj["terms"]:
        if not isinstance(t, dict) or "pairing" not in t or "coeff" not in t:
            raise ParseError("each term needs 'pairing' and 'coeff'")
        p = pairing_from_json(t["pairing"], arity)
        try:
            c = scalar_from_json(t["coeff"], delta)
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad coefficient: {exc}") from None
        terms[p] = terms[p] + c if p in terms else c
    return TLElement(arity, terms)


def tower_to_json(x: TLElement) -> dict:
    out = {"level": x.arity // 2}
    out.update(tl_to_json(x))
    return out


def graded_to_json(a: GradedElement) -> dict:
    return {
        "k": a.k,
        "r": a.r,
        "terms": [{"degree": n, "element": tl_to_json(a.terms[n])} for n in a.degrees()],
    }


def graded_from_json(obj, delta: float | None = None) -> GradedElement:
    if not isinstance(obj, dict):
        raise ParseError("graded element JSON must be an object")
    for key in ("k", "terms"):
        if key not in obj:
            raise ParseError(f"graded element JSON needs '{key}'")
    k, r = obj["k"], obj.get("r", 1)
    if not isinstance(k, int) or k < 0:
        raise ParseError(f"k must be a nonnegative integer, got {k!r}")
    if not isinstance(r, int) or r < 1:
        raise ParseError(f"r must be a positive integer, got {r!r}")
    terms: dict = {}
    for t in obj["terms"]:
        if not isinstance(t, dict) or "degree" not in t or "element" not in t:
            raise ParseError("each graded term needs 'degree' and 'element'")
        n = t["degree"]
        if not isinstance(n, int) or n < 0:
            raise ParseError(f"degree must be a nonnegative integer, got {n!r}")
        x = tl_from_json(t["element"], delta)
        if x.arity != box_arity(n, k, r):
            raise ParseError(
                f"degree {n} at k={k}, r={r} needs arity {box_arity(n, k, r)}, got {x.arity}"
            )
        terms[n] = terms[n] + x if n in terms else x
    return GradedElement(k, r, terms)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def load_graded(source: str, k: int | None = None, r: int = 1, delta: float | None = None) -> GradedElement:
    """A graded element from a JSON file, or a named constructor when ``source`` is not a file."""
    if Path(source).is_file():
        a = graded_from_json(load_json(source), delta)
        if k is not None and a.k != k:
            raise ParseError(f"{source} has k={a.k}, expected {k}")
        return a
    if k is None:
        raise ParseError(f"{source!r} is not a file; named elements need --k")
    try:
        return named_element(source, k, r)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
