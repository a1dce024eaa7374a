"""Exact numbers of the form sum of c*sqrt(q) with rational c and square-free q.

Rational results are always returned as ``Fraction``; a ``Surd`` carries at
least one irrational term. Comparisons are exact: a float fast path decides
the sign when the estimate is far from zero, otherwise the sign is resolved
by squaring out one prime at a time.
"""
from __future__ import annotations

import copy
import math
from collections.abc import Iterable, Mapping
from fractions import Fraction
from functools import lru_cache
from typing import Any, TypeAlias

from submeasure_lab.exceptions import InvalidInputError

Terms: TypeAlias = dict[int, Fraction]

_FLOAT_SIGN_MARGIN = 1e-9


@lru_cache(maxsize=4096)
def square_free_split(number: int) -> tuple[int, int]:
    """Return (s, q) with number = s * s * q and q square-free."""
    if number < 1:
        raise InvalidInputError(f"radicand must be positive, got {number}")
    square, rest = 1, number
    factor = 2
    while factor * factor <= rest:
        while rest % (factor * factor) == 0:
            rest //= factor * factor
            square *= factor
        factor += 1
    return square, rest


@lru_cache(maxsize=4096)
def _smallest_prime(number: int) -> int:
    factor = 2
    while factor * factor <= number:
        if number % factor == 0:
            return factor
        factor += 1
    return number


def _terms_of(value: Any) -> Terms:
    if isinstance(value, Surd):
        return value._terms
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return {1: Fraction(value)} if value else {}
    raise TypeError(f"unsupported exact value {value!r}")


def _make(terms: Mapping[int, Fraction]) -> Fraction | Surd:
    clean = {q: c for q, c in terms.items() if c}
    if all(q == 1 for q in clean):
        return clean.get(1, Fraction(0))
    return Surd(clean)


def _add(left: Terms, right: Terms, sign: int = 1) -> Terms:
    out = dict(left)
    for radicand, coef in right.items():
        out[radicand] = out.get(radicand, Fraction(0)) + sign * coef
    return {q: c for q, c in out.items() if c}


def _mul(left: Terms, right: Terms) -> Terms:
    out: Terms = {}
    for q1, c1 in left.items():
        for q2, c2 in right.items():
            common = math.gcd(q1, q2)
            radicand = (q1 // common) * (q2 // common)
            out[radicand] = out.get(radicand, Fraction(0)) + c1 * c2 * common
    return {q: c for q, c in out.items() if c}


def _split(terms: Terms, prime: int) -> tuple[Terms, Terms]:
    """Write terms as u + v*sqrt(prime) with u, v free of sqrt(prime)."""
    free: Terms = {}
    with_prime: Terms = {}
    for radicand, coef in terms.items():
        if radicand % prime == 0:
            with_prime[radicand // prime] = coef
        else:
            free[radicand] = coef
    return free, with_prime


def _pick_prime(terms: Terms) -> int:
    return _smallest_prime(max(terms))


def _inverse(terms: Terms) -> Terms:
    if not terms:
        raise ZeroDivisionError("division by zero")
    if set(terms) == {1}:
        return {1: 1 / terms[1]}
    prime = _pick_prime(terms)
    free, with_prime = _split(terms, prime)
    conjugate = _add(free, {q * prime: c for q, c in with_prime.items()}, sign=-1)
    norm = _add(_mul(free, free), {q: prime * c for q, c in _mul(with_prime, with_prime).items()}, -1)
    return _mul(conjugate, _inverse(norm))


def _float_estimate(terms: Terms) -> tuple[float, float] | None:
    try:
        parts = [float(c) * math.sqrt(q) for q, c in terms.items()]
        scale = math.fsum(abs(part) for part in parts)
        return math.fsum(parts), scale * _FLOAT_SIGN_MARGIN
    except (OverflowError, ValueError):
        return None


def _sign_exact(terms: Terms) -> int:
    if not terms:
        return 0
    if set(terms) == {1}:
        return (terms[1] > 0) - (terms[1] < 0)
    prime = _pick_prime(terms)
    free, with_prime = _split(terms, prime)
    free_sign = _sign(free)
    prime_sign = _sign(with_prime)
    if prime_sign == 0 or free_sign == prime_sign:
        return free_sign
    if free_sign == 0:
        return prime_sign
    # |u| against |v| * sqrt(p)
    gap = _sign(
        _add(_mul(free, free), {q: prime * c for q, c in _mul(with_prime, with_prime).items()}, -1)
    )
    return free_sign if gap > 0 else prime_sign


def _sign(terms: Terms) -> int:
    estimate = _float_estimate(terms)
    if estimate is not None:
        approx, margin = estimate
        if abs(approx) > margin and math.isfinite(approx):
            return 1 if approx > 0 else -1
    return _sign_exact(terms)


class Surd:
    """An irrational element of a multi-quadratic field."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Fraction]):
        """Initialize from canonical terms; use the factory methods instead."""
        self._terms: Terms = dict(terms)
        self._hash: int | None = None

    # ------------------------------------------------------------------
    #  Factories
    # ------------------------------------------------------------------
    @classmethod
    def root(cls, coefficient: Any, radicand: int) -> Fraction | Surd:
        """Return coefficient * sqrt(radicand)."""
        square, rest = square_free_split(int(radicand))
        return _make({rest: Fraction(coefficient) * square})

    @classmethod
    def sqrt(cls, value: Any) -> Fraction | Surd:
        """Return the exact square root of a non-negative rational."""
        value = Fraction(value)
        if value < 0:
            raise InvalidInputError(f"square root of negative value {value}")
        if value == 0:
            return Fraction(0)
        # sqrt(a/b) = sqrt(a*b)/b
        return cls.root(Fraction(1, value.denominator), value.numerator * value.denominator)

    @property
    def terms(self) -> dict[int, Fraction]:
        """Return a copy of the radicand to coefficient map."""
        return dict(self._terms)

    # ------------------------------------------------------------------
    #  Arithmetic
    # ------------------------------------------------------------------
    def __add__(self, other: Any) -> Fraction | Surd:
        """Add."""
        try:
            return _make(_add(self._terms, _terms_of(other)))
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: Any) -> Fraction | Surd:
        """Subtract."""
        try:
            return _make(_add(self._terms, _terms_of(other), -1))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other: Any) -> Fraction | Surd:
        """Subtract from."""
        try:
            return _make(_add(_terms_of(other), self._terms, -1))
        except TypeError:
            return NotImplemented

    def __mul__(self, other: Any) -> Fraction | Surd:
        """Multiply."""
        try:
            return _make(_mul(self._terms, _terms_of(other)))
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> Fraction | Surd:
        """Divide."""
        try:
            right = _terms_of(other)
        except TypeError:
            return NotImplemented
        return _make(_mul(self._terms, _inverse(right)))

    def __rtruediv__(self, other: Any) -> Fraction | Surd:
        """Divide into."""
        try:
            left = _terms_of(other)
        except TypeError:
            return NotImplemented
        return _make(_mul(left, _inverse(self._terms)))

    def __pow__(self, exponent: int) -> Fraction | Surd:
        """Raise to an integer power."""
        if not isinstance(exponent, int):
            return NotImplemented
        base = self._terms if exponent >= 0 else _inverse(self._terms)
        result: Terms = {1: Fraction(1)}
        for _ in range(abs(exponent)):
            result = _mul(result, base)
        return _make(result)

    def __neg__(self) -> Surd:
        """Negate."""
        return Surd({q: -c for q, c in self._terms.items()})

    def __pos__(self) -> Surd:
        """Return self."""
        return self

    def __abs__(self) -> Surd:
        """Absolute value."""
        return -self if self.sign() < 0 else self

    def __bool__(self) -> bool:
        """Surds are never zero."""
        return True

    def __float__(self) -> float:
        """Convert to the nearest float."""
        return math.fsum(float(c) * math.sqrt(q) for q, c in self._terms.items())

    def sign(self) -> int:
        """Return -1, 0 or 1."""
        return _sign(self._terms)

    # ------------------------------------------------------------------
    #  Comparison
    # ------------------------------------------------------------------
    def _compare(self, other: Any) -> int | None:
        if isinstance(other, float):
            mine = float(self)
            return (mine > other) - (mine < other)
        try:
            return _sign(_add(self._terms, _terms_of(other), -1))
        except TypeError:
            return None

    def __eq__(self, other: object) -> bool:
        """Exact equality."""
        if isinstance(other, Surd):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return False
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __lt__(self, other: Any) -> bool:
        """Exact less-than."""
        result = self._compare(other)
        return NotImplemented if result is None else result < 0

    def __le__(self, other: Any) -> bool:
        """Exact less-or-equal."""
        result = self._compare(other)
        return NotImplemented if result is None else result <= 0

    def __gt__(self, other: Any) -> bool:
        """Exact greater-than."""
        result = self._compare(other)
        return NotImplemented if result is None else result > 0

    def __ge__(self, other: Any) -> bool:
        """Exact greater-or-equal."""
        result = self._compare(other)
        return NotImplemented if result is None else result >= 0

    def __hash__(self) -> int:
        """Hash on the canonical terms."""
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        """Return the representation."""
        return f"Surd({self})"

    def __str__(self) -> str:
        """Return a readable form such as 1/4*sqrt(2) + 1."""
        parts = []
        for radicand in sorted(self._terms):
            coef = self._terms[radicand]
            parts.append(str(coef) if radicand == 1 else f"{coef}*sqrt({radicand})")
        return " + ".join(parts)


Exact: TypeAlias = Fraction | Surd


def to_exact(value: Any) -> Exact:
    """Coerce ints and Fractions to Fraction; pass Surds through."""
    if isinstance(value, Surd):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Fraction(value)
    raise InvalidInputError(f"not an exact value: {value!r}")


def exact_sum(values: Iterable[Any]) -> Exact:
    """Sum exact values, starting from Fraction(0)."""
    total: Exact = Fraction(0)
    for value in values:
        total = total + value
    return total


def is_nonnegative(value: Exact) -> bool:
    """Return True if value >= 0."""
    return value >= 0


# ----------------------------------------------------------------------
#  JSON forms: "p/q", {"p": "a/b", "q": n} or a list of such objects
# ----------------------------------------------------------------------
RATIONAL_JSON_SCHEMA: dict[str, Any] = {
    "anyOf": [{"type": "integer"}, {"type": "number"}, {"type": "string"}]
}
_ROOT_JSON_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {"p": RATIONAL_JSON_SCHEMA, "q": {"type": "integer", "minimum": 1}},
    "required": ["p", "q"],
    "additionalProperties": False,
}
EXACT_JSON_SCHEMA: dict[str, Any] = {
    "anyOf": [
        RATIONAL_JSON_SCHEMA,
        _ROOT_JSON_SCHEMA,
        {"type": "array", "items": _ROOT_JSON_SCHEMA, "minItems": 1},
    ]
}


class PublishedSchema:
    """Annotated marker giving pydantic a fixed JSON schema for a hand-validated field."""

    def __init__(self, schema: dict[str, Any]) -> None:
        self.schema = schema

    def __get_pydantic_json_schema__(self, core_schema: Any, handler: Any) -> dict[str, Any]:
        return copy.deepcopy(self.schema)


def _format(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def exact_to_json(value: Any) -> Any:
    """Serialize an exact value."""
    value = to_exact(value)
    if isinstance(value, Fraction):
        return _format(value)
    items = sorted(value.terms.items())
    if len(items) == 1:
        radicand, coef = items[0]
        return {"p": _format(coef), "q": radicand}
    return [{"p": _format(coef), "q": radicand} for radicand, coef in items]


def _parse_fraction(raw: Any) -> Fraction:
    if isinstance(raw, bool):
        raise InvalidInputError(f"not a rational number: {raw!r}")
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise InvalidInputError(f"not a rational number: {raw!r}") from err
    raise InvalidInputError(f"not a rational number: {raw!r}")


def _root_from_json(raw: Mapping[str, Any]) -> Exact:
    if set(raw) != {"p", "q"}:
        raise InvalidInputError(f"root value needs keys p and q: {raw!r}")
    radicand = raw["q"]
    if isinstance(radicand, bool) or not isinstance(radicand, int) or radicand < 1:
        raise InvalidInputError(f"radicand must be a positive integer: {radicand!r}")
    return Surd.root(_parse_fraction(raw["p"]), radicand)


def exact_from_json(raw: Any) -> Exact:
    """Parse an exact value from its JSON form."""
    if isinstance(raw, (Fraction, Surd)):
        return raw
    if isinstance(raw, Mapping):
        return _root_from_json(raw)
    if isinstance(raw, list):
        if not raw:
            raise InvalidInputError("empty list is not an exact value")
        return exact_sum(_root_from_json(item) for item in raw)
    return _parse_fraction(raw)
