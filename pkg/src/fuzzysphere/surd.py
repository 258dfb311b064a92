"""Exact half-integers and finite sums of rational multiples of square roots."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping

from sympy import factorint


class HalfInt:
    """A number j with 2j integral, stored as ``twice = 2j``."""

    __slots__ = ("twice",)

    def __init__(self, twice: int):
        object.__setattr__(self, "twice", int(twice))

    def __setattr__(self, name, value):
        raise AttributeError("HalfInt is immutable")

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Coerce an int, Fraction, HalfInt or string ("3", "3/2", "-1/2")."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, bool):
            raise TypeError("bool is not a spin label")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, Rational):
            f = Fraction(value)
            if (2 * f).denominator != 1:
                raise ValueError(f"{value} is not a half-integer")
            return cls(int(2 * f))
        if isinstance(value, float):
            if value * 2 != round(value * 2):
                raise ValueError(f"{value} is not a half-integer")
            return cls(round(value * 2))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Parse ``"p"`` or ``"p/2"`` in reduced form; anything else is rejected."""
        s = text.strip()
        if "/" in s:
            num, _, den = s.partition("/")
            if den.strip() != "2":
                raise ValueError(f"malformed half-integer {text!r}")
            n = int(num)
            if n % 2 == 0:
                raise ValueError(f"{text!r} is not in reduced form")
            return cls(n)
        if "." in s or "e" in s.lower():
            raise ValueError(f"floats are not accepted as spin labels: {text!r}")
        return cls(2 * int(s))

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self) -> float:
        return self.twice / 2

    def __int__(self) -> int:
        if self.twice % 2:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __index__(self) -> int:
        return int(self)

    def __hash__(self):
        return hash(Fraction(self.twice, 2))

    def __eq__(self, other):
        try:
            return self.twice == HalfInt.of(other).twice
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.twice < HalfInt.of(other).twice

    def __le__(self, other):
        return self.twice <= HalfInt.of(other).twice

    def __gt__(self, other):
        return self.twice > HalfInt.of(other).twice

    def __ge__(self, other):
        return self.twice >= HalfInt.of(other).twice

    def __add__(self, other):
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other):
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __abs__(self):
        return HalfInt(abs(self.twice))

    def __repr__(self):
        return f"HalfInt({self})"

    def __str__(self):
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"


@lru_cache(maxsize=4096)
def _square_split(n: int) -> tuple[int, int]:
    """Write n > 0 as a**2 * b with b squarefree; return (a, b)."""
    a, b = 1, 1
    for prime, exp in factorint(n).items():
        a *= prime ** (exp // 2)
        if exp % 2:
            b *= prime
    return a, b


def _radical_product(p1: int, p2: int) -> tuple[int, int]:
    """sqrt(p1)*sqrt(p2) = c*sqrt(p) for squarefree p1, p2; return (c, p)."""
    g = math.gcd(p1, p2)
    return g, (p1 // g) * (p2 // g)


class Surd:
    """Exact value sum(q * sqrt(p)) with rational q and squarefree integer p >= 1.

    A rational radicand a/b is stored as sqrt(a*b)/b, so the canonical form is
    unique and equality is structural.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for p, q in items:
            q = Fraction(q)
            if q == 0:
                continue
            acc[p] = acc.get(p, Fraction(0)) + q
        self._terms = {p: q for p, q in sorted(acc.items()) if q != 0}

    @classmethod
    def rational(cls, q) -> "Surd":
        return cls({1: Fraction(q)})

    @classmethod
    def sqrt(cls, value) -> "Surd":
        """Exact square root of a nonnegative rational."""
        v = Fraction(value)
        if v < 0:
            raise ValueError("square root of a negative rational")
        if v == 0:
            return cls()
        a_num, b_num = _square_split(v.numerator * v.denominator)
        return cls({b_num: Fraction(a_num, v.denominator)})

    @classmethod
    def signed_sqrt(cls, sign: int, value) -> "Surd":
        """sign * sqrt(value); convenient for Racah-type formulas."""
        s = cls.sqrt(value)
        return s if sign >= 0 else -s

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return set(self._terms) <= {1}

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other):
        other = _as_surd(other)
        if other is None:
            return NotImplemented
        return Surd(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Surd({p: -q for p, q in self._terms.items()})

    def __sub__(self, other):
        other = _as_surd(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_surd(other)
        if other is None:
            return NotImplemented
        out = []
        for p1, q1 in self._terms.items():
            for p2, q2 in other._terms.items():
                c, p = _radical_product(p1, p2)
                out.append((p, q1 * q2 * c))
        return Surd(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_surd(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_surd(other) * self.inverse()

    def inverse(self) -> "Surd":
        if len(self._terms) != 1:
            raise ZeroDivisionError("only single-radical surds are invertible here")
        ((p, q),) = self._terms.items()
        # 1/(q sqrt p) = sqrt(p) / (q p)
        return Surd({p: 1 / (q * p)})

    def square(self) -> "Surd":
        return self * self

    def __eq__(self, other):
        other = _as_surd(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __float__(self):
        return float(sum(float(q) * math.sqrt(p) for p, q in self._terms.items()))

    def sign(self) -> int:
        """Sign of the value; exact for single radicals, float-based otherwise."""
        if not self._terms:
            return 0
        if len(self._terms) == 1:
            (q,) = self._terms.values()
            return 1 if q > 0 else -1
        v = float(self)
        return (v > 0) - (v < 0)

    def to_json(self) -> dict:
        return {
            "terms": [
                {"q": f"{q.numerator}/{q.denominator}", "p": f"{p}/1"}
                for p, q in self._terms.items()
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "Surd":
        out = cls()
        for t in data["terms"]:
            out = out + Surd.rational(Fraction(t["q"])) * Surd.sqrt(Fraction(t["p"]))
        return out

    def __repr__(self):
        return f"Surd({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for p, q in self._terms.items():
            parts.append(str(q) if p == 1 else f"{q}*sqrt({p})")
        return " + ".join(parts)


def _as_surd(x) -> Surd | None:
    if isinstance(x, Surd):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Surd.rational(x)
    return None
