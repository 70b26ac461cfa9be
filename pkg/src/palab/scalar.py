"""Coefficient ring: Laurent polynomials in the loop value, or floats at a fixed loop value.

Exact scalars are finite maps ``exponent -> Fraction`` with no zero entries.
Numeric scalars carry the value of the loop parameter they were evaluated at,
so that ``shift`` (multiplication by a power of the loop value) stays defined.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Rational
from typing import Union

DEFAULT_TOL = 1e-9


def tolerance() -> float:
    """Suite-wide relative tolerance; ``PALAB_TOL`` overrides the default."""
    value = os.environ.get("PALAB_TOL")
    return float(value) if value else DEFAULT_TOL


class Laurent:
    """Exact Laurent polynomial in the loop value with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        canon = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for exp, coeff in items:
                if isinstance(coeff, float):
                    raise TypeError("exact scalars take rational coefficients, got a float")
                c = canon.get(int(exp), 0) + Fraction(coeff)
                canon[int(exp)] = c
            canon = {e: c for e, c in canon.items() if c}
        self._terms = canon
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Laurent":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, exp: int, coeff=1) -> "Laurent":
        coeff = Fraction(coeff)
        return cls._raw({int(exp): coeff} if coeff else {})

    @classmethod
    def constant(cls, value) -> "Laurent":
        return cls.monomial(0, value)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def exponents(self) -> list:
        return sorted(self._terms)

    def coefficient(self, exp: int) -> Fraction:
        return self._terms.get(exp, Fraction(0))

    def shift(self, p: int) -> "Laurent":
        """Multiply by ``delta**p``."""
        if not p:
            return self
        return Laurent._raw({e + p: c for e, c in self._terms.items()})

    def _coerce(self, other) -> "Laurent":
        if isinstance(other, Laurent):
            return other
        if isinstance(other, (int, Rational)):
            return Laurent.constant(other)
        if isinstance(other, Numeric):
            if not self._terms:
                # the exact zero is mode-neutral; let Numeric handle it
                return NotImplemented
            raise TypeError("cannot mix exact and numeric scalars")
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Laurent._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Laurent._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Laurent._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._terms) == 1:
                (e, c), = self._terms.items()
                return Laurent.monomial(e * n, Fraction(1) / c ** (-n))
            raise ValueError("only monomials have Laurent inverses")
        result = Laurent.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Laurent):
            return self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self._terms == Laurent.constant(other)._terms
        if isinstance(other, Numeric):
            if not self._terms:
                return NotImplemented
            raise TypeError("cannot compare exact and numeric scalars")
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def eval_at(self, delta) -> "Numeric":
        """Substitute a positive value for the loop parameter."""
        if delta <= 0:
            raise ValueError(f"loop value must be positive, got {delta}")
        d = float(delta)
        value = math.fsum(float(c) * d ** e for e, c in self._terms.items())
        return Numeric(value, d)

    def __float__(self):
        raise TypeError("exact scalars need eval_at(delta) before conversion to float")

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, reverse=True):
            c = self._terms[e]
            mono = "" if e == 0 else ("d" if e == 1 else f"d^{e}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"poly": [[e, _frac_str(self._terms[e])] for e in sorted(self._terms)]}


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


class Numeric:
    """Float scalar tied to a fixed loop value ``delta``."""

    __slots__ = ("value", "delta")

    def __init__(self, value: float, delta: float):
        if delta <= 0:
            raise ValueError(f"loop value must be positive, got {delta}")
        self.value = float(value)
        self.delta = float(delta)

    def _coerce(self, other) -> "Numeric":
        if isinstance(other, Numeric):
            if other.delta != self.delta:
                raise ValueError(f"numeric scalars at different loop values {self.delta} and {other.delta}")
            return other
        if isinstance(other, (int, float, Rational)):
            return Numeric(float(other), self.delta)
        if isinstance(other, Laurent):
            if other.is_zero():
                return Numeric(0.0, self.delta)
            raise TypeError("cannot mix exact and numeric scalars")
        return NotImplemented

    def is_zero(self) -> bool:
        return self.value == 0.0

    def shift(self, p: int) -> "Numeric":
        if not p:
            return self
        return Numeric(self.value * self.delta ** p, self.delta)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Numeric(self.value + other.value, self.delta)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Numeric(self.value - other.value, self.delta)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Numeric(other.value - self.value, self.delta)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Numeric(self.value * other.value, self.delta)

    __rmul__ = __mul__

    def __neg__(self):
        return Numeric(-self.value, self.delta)

    def __bool__(self):
        return self.value != 0.0

    def __float__(self):
        return self.value

    def isclose(self, other, tol: float | None = None) -> bool:
        other = self._coerce(other)
        tol = tolerance() if tol is None else tol
        return abs(self.value - other.value) <= tol * max(1.0, abs(self.value), abs(other.value))

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.isclose(other)

    __hash__ = None

    def eval_at(self, delta) -> "Numeric":
        if float(delta) != self.delta:
            raise ValueError("numeric scalar is already bound to a different loop value")
        return self

    def __repr__(self):
        return f"Numeric({self.value!r}, delta={self.delta!r})"

    def to_json(self) -> dict:
        return {"num": self.value}


Scalar = Union[Laurent, Numeric]

ZERO = Laurent()
ONE = Laurent.constant(1)


def delta_pow(p: int, delta: float | None = None) -> Scalar:
    """The monomial ``delta**p``; exact unless a numeric loop value is given."""
    if delta is None:
        return Laurent.monomial(p)
    return Numeric(float(delta) ** p, delta)


def one_like(x: Scalar) -> Scalar:
    if isinstance(x, Numeric):
        return Numeric(1.0, x.delta)
    return ONE


def zero_like(x: Scalar) -> Scalar:
    if isinstance(x, Numeric):
        return Numeric(0.0, x.delta)
    return ZERO


def scalar_from_json(obj, delta: float | None = None) -> Scalar:
    if not isinstance(obj, dict):
        raise ValueError(f"scalar must be a JSON object, got {type(obj).__name__}")
    if "poly" in obj:
        terms = {}
        last = None
        for entry in obj["poly"]:
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ValueError(f"poly entries are [exponent, \"num/den\"] pairs, got {entry!r}")
            exp, coeff = entry
            if not isinstance(exp, int):
                raise ValueError(f"exponent must be an integer, got {exp!r}")
            if last is not None and exp <= last:
                raise ValueError("poly exponents must be strictly ascending")
            last = exp
            terms[exp] = Fraction(str(coeff))
        return Laurent(terms)
    if "num" in obj:
        if delta is None:
            raise ValueError("numeric scalar needs a loop value (pass delta)")
        return Numeric(float(obj["num"]), delta)
    raise ValueError("scalar JSON must have a 'poly' or 'num' key")
