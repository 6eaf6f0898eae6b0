"""Exact multivariate polynomials with rational coefficients.

A :class:`Polynomial` stands in for a smooth function on a single coordinate
chart. Terms live in a dict keyed by exponent tuples; zero coefficients are
never stored, so structural equality is mathematical equality.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import InputError

Rational = Fraction
Scalar = Union[int, Fraction]


def as_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"not a rational: {value!r}")


def rational_text(q: Fraction) -> str:
    return str(q)


def _grlex_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), exps)


class Polynomial:
    __slots__ = ("_terms", "dim", "_hash")

    def __init__(self, terms: Mapping[tuple[int, ...], Scalar] | None = None, dim: int = 0):
        if dim < 0:
            raise InputError("chart dimension must be non-negative")
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != dim or any(e < 0 for e in exps):
                raise InputError(f"bad exponent vector {exps} for chart dim {dim}")
            c = as_rational(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean
        self.dim = dim
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, dim: int) -> "Polynomial":
        p = object.__new__(cls)
        p._terms = terms
        p.dim = dim
        p._hash = None
        return p

    @classmethod
    def zero(cls, dim: int = 0) -> "Polynomial":
        return cls._raw({}, dim)

    @classmethod
    def constant(cls, c: Scalar, dim: int = 0) -> "Polynomial":
        c = as_rational(c)
        return cls._raw({(0,) * dim: c} if c else {}, dim)

    @classmethod
    def one(cls, dim: int = 0) -> "Polynomial":
        return cls.constant(1, dim)

    @classmethod
    def variable(cls, index: int, dim: int) -> "Polynomial":
        if not 0 <= index < dim:
            raise InputError(f"variable index {index} out of range for dim {dim}")
        exps = tuple(1 if u == index else 0 for u in range(dim))
        return cls._raw({exps: Fraction(1)}, dim)

    @property
    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in canonical order: graded-lex, highest first."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InputError("polynomial is not constant")
        return self._terms.get((0,) * self.dim, Fraction(0))

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.dim != self.dim:
                raise InputError(f"chart dimension mismatch: {self.dim} vs {other.dim}")
            return other
        return Polynomial.constant(as_rational(other), self.dim)

    def __add__(self, other) -> "Polynomial":
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(out, self.dim)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({e: -c for e, c in self._terms.items()}, self.dim)

    def __sub__(self, other) -> "Polynomial":
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def scale(self, c: Scalar) -> "Polynomial":
        c = as_rational(c)
        if not c:
            return Polynomial.zero(self.dim)
        return Polynomial._raw({e: v * c for e, v in self._terms.items()}, self.dim)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        other = self._coerce(other)
        if not self._terms or not other._terms:
            return Polynomial.zero(self.dim)
        if self.dim == 0:
            return Polynomial._raw({(): self._terms[()] * other._terms[()]}, 0)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw({e: c for e, c in out.items() if c}, self.dim)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise InputError("negative powers are not polynomials")
        out = Polynomial.one(self.dim)
        for _ in range(n):
            out = out * self
        return out

    def partial(self, var_index: int) -> "Polynomial":
        if not 0 <= var_index < self.dim:
            raise InputError(f"variable index {var_index} out of range for dim {self.dim}")
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self._terms.items():
            k = e[var_index]
            if k:
                ne = e[:var_index] + (k - 1,) + e[var_index + 1:]
                out[ne] = c * k
        return Polynomial._raw(out, self.dim)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.dim:
            raise InputError(f"point has length {len(point)}, chart dim is {self.dim}")
        pt = [as_rational(x) for x in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x ** k
            total += v
        return total

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def to_json(self) -> list[dict]:
        return [{"coeff": rational_text(c), "exps": list(e)} for e, c in self.terms]

    @classmethod
    def from_json(cls, data: Iterable[Mapping], dim: int) -> "Polynomial":
        if not isinstance(data, list):
            raise InputError(f"polynomial must be a list of terms, got {type(data).__name__}")
        terms: dict[tuple[int, ...], Fraction] = {}
        for term in data:
            if not isinstance(term, Mapping) or "coeff" not in term or "exps" not in term:
                raise InputError(f"malformed polynomial term: {term!r}")
            exps = term["exps"]
            if not isinstance(exps, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in exps):
                raise InputError(f"malformed exponent vector: {exps!r}")
            exps = tuple(exps)
            if exps in terms:
                raise InputError(f"repeated monomial {exps}")
            terms[exps] = as_rational(term["coeff"])
        return cls(terms, dim)

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = list(names) if names else [f"x{u}" for u in range(self.dim)]
        parts = []
        for e, c in self.terms:
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Polynomial({self.format()!r}, dim={self.dim})"

    __str__ = format


def poly_arith(op: str, p: Polynomial, q) -> Polynomial:
    """Dispatch ``add``, ``sub``, ``mul`` or ``scale``.

    For ``scale`` the rational may be passed in either slot.
    """
    if op == "add":
        return p + p._coerce(q)
    if op == "sub":
        return p - p._coerce(q)
    if op == "mul":
        return p * p._coerce(q)
    if op == "scale":
        if isinstance(p, Polynomial):
            return p.scale(q)
        return q.scale(p)
    raise InputError(f"unknown polynomial operation {op!r}")


def poly_partial(p: Polynomial, var_index: int) -> Polynomial:
    return p.partial(var_index)


def poly_eval(p: Polynomial, point: Sequence[Scalar]) -> Fraction:
    return p.evaluate(point)
