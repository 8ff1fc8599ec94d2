"""Exact homogeneous polynomials and their polarization calculus.

A :class:`VolumePolynomial` stands in for a class of dimension ``d`` through
its volume function ``alpha -> alpha^d``.  Everything here is exact
(:class:`fractions.Fraction`); no floating point is used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import InputError

Vector = tuple  # tuple of Fraction


class DimensionError(InputError):
    """Input vectors or arities do not match the polynomial."""


def as_fraction(x) -> Fraction:
    """Parse an int, Fraction or "p/q" string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            if int(den) == 0:
                raise ZeroDivisionError(f"zero denominator in {x!r}")
            return Fraction(int(num), int(den))
        return Fraction(text)
    raise TypeError(f"cannot read {x!r} as an exact rational; use int, Fraction or 'p/q'")


def vector(coords: Iterable) -> Vector:
    return tuple(as_fraction(c) for c in coords)


def basis_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(int(j == i)) for j in range(n))


def add(u: Sequence[Fraction], w: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, w, strict=True))


def scale(c, u: Sequence[Fraction]) -> Vector:
    c = as_fraction(c)
    return tuple(c * a for a in u)


def dot(u: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, w, strict=True)), Fraction(0))


def _grlex_key(exp: tuple[int, ...]):
    # graded-lex: higher total first (all equal here), then lex descending
    return tuple(-e for e in exp)


@dataclass(frozen=True)
class VolumePolynomial:
    """Sparse homogeneous polynomial with rational coefficients.

    ``terms`` maps exponent tuples to nonzero Fractions.  Intermediate results
    of differentiation may have degree below two; the volume-polynomial
    requirement ``degree >= 2`` is enforced by :func:`require_volume_degree`
    where it matters (model loading and certification).
    """

    nvars: int
    degree: int
    terms: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.nvars < 1:
            raise DimensionError("need at least one variable")
        if self.degree < 0:
            raise DimensionError("degree must be nonnegative")
        clean = {}
        for exp, coeff in self.terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.nvars:
                raise DimensionError(f"exponent {exp} has wrong length, expected {self.nvars}")
            if any(e < 0 for e in exp):
                raise DimensionError(f"negative exponent in {exp}")
            if sum(exp) != self.degree:
                raise DimensionError(f"term {exp} is not of degree {self.degree}")
            coeff = as_fraction(coeff)
            if coeff:
                clean[exp] = clean.get(exp, Fraction(0)) + coeff
        ordered = {e: clean[e] for e in sorted(clean, key=_grlex_key) if clean[e]}
        object.__setattr__(self, "terms", MappingProxyType(ordered))

    # value semantics -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, VolumePolynomial):
            return NotImplemented
        return (self.nvars, self.degree, dict(self.terms)) == (other.nvars, other.degree, dict(other.terms))

    def __hash__(self):
        return hash((self.nvars, self.degree, tuple(self.terms.items())))

    def __repr__(self):
        return f"VolumePolynomial({self.nvars} vars, degree {self.degree}: {format_polynomial(self)})"

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "VolumePolynomial") -> "VolumePolynomial":
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            raise DimensionError("cannot add polynomials of different shape")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return VolumePolynomial(self.nvars, self.degree, out)

    def scaled(self, c) -> "VolumePolynomial":
        c = as_fraction(c)
        return VolumePolynomial(self.nvars, self.degree, {e: c * v for e, v in self.terms.items()})

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping) -> "VolumePolynomial":
        """Build from a nonempty term map, inferring the degree."""
        degrees = {sum(e) for e in terms}
        if len(degrees) != 1:
            raise DimensionError(f"terms are not homogeneous (degrees {sorted(degrees)})")
        return cls(nvars, degrees.pop(), terms)


def require_volume_degree(f: VolumePolynomial) -> None:
    if f.degree < 2:
        raise DimensionError(f"a volume polynomial needs degree >= 2, got {f.degree}")


def _check_len(f: VolumePolynomial, v: Sequence) -> None:
    if len(v) != f.nvars:
        raise DimensionError(f"vector of length {len(v)} used with a polynomial in {f.nvars} variables")


def evaluate(f: VolumePolynomial, v: Sequence) -> Fraction:
    v = vector(v)
    _check_len(f, v)
    total = Fraction(0)
    for exp, coeff in f.terms.items():
        term = coeff
        for x, e in zip(v, exp):
            if e:
                term *= x**e
        total += term
    return total


def _derive_raw(terms: Mapping, v: Vector) -> dict:
    out: dict[tuple[int, ...], Fraction] = {}
    for exp, coeff in terms.items():
        for i, vi in enumerate(v):
            e = exp[i]
            if e and vi:
                new = exp[:i] + (e - 1,) + exp[i + 1:]
                out[new] = out.get(new, 0) + coeff * e * vi
    return out


def directional_derivative(f: VolumePolynomial, v: Sequence) -> VolumePolynomial:
    """Return ``D_v f``, homogeneous of degree ``d - 1``."""
    if f.degree < 1:
        raise ValueError("cannot differentiate a constant")
    v = vector(v)
    _check_len(f, v)
    return VolumePolynomial(f.nvars, f.degree - 1, _derive_raw(f.terms, v))


def contract(f: VolumePolynomial, dirs: Sequence[Sequence]) -> VolumePolynomial:
    """Apply ``D_{v1} ... D_{vk}`` without normalization."""
    if len(dirs) > f.degree:
        raise DimensionError(f"cannot contract {len(dirs)} directions out of degree {f.degree}")
    terms: Mapping = f.terms
    for v in dirs:
        v = vector(v)
        _check_len(f, v)
        terms = _derive_raw(terms, v)
    return VolumePolynomial(f.nvars, f.degree - len(dirs), terms)


def restrict(f: VolumePolynomial, dirs: Sequence[Sequence]) -> VolumePolynomial:
    """Volume polynomial of the product class ``v1 ... vk . Omega``.

    The result ``g`` has degree ``d - k`` and satisfies
    ``mixed_value(g, w) == mixed_value(f, w + dirs)``.
    """
    k = len(dirs)
    if k > f.degree:
        raise DimensionError(f"cannot contract {k} directions out of degree {f.degree}")
    factor = Fraction(factorial(f.degree - k), factorial(f.degree))
    return contract(f, dirs).scaled(factor)


def mixed_value(f: VolumePolynomial, dirs: Sequence[Sequence]) -> Fraction:
    """Normalized polarization ``(1/d!) D_{v1} ... D_{vd} f``."""
    if len(dirs) != f.degree:
        raise DimensionError(f"mixed_value needs exactly {f.degree} directions, got {len(dirs)}")
    terms: Mapping = f.terms
    for v in dirs:
        v = vector(v)
        _check_len(f, v)
        terms = _derive_raw(terms, v)
        if not terms:
            return Fraction(0)
    constant = terms.get((0,) * f.nvars, 0)
    return Fraction(constant) / factorial(f.degree)


def substitute_cone(f: VolumePolynomial, gens: Sequence[Sequence]) -> VolumePolynomial:
    """Return ``g(y) = f(sum y_i v_i)`` in ``len(gens)`` variables."""
    gens = [vector(g) for g in gens]
    if not gens:
        raise DimensionError("substitute_cone needs at least one generator")
    for g in gens:
        _check_len(f, g)
    m = len(gens)
    # image of each original variable x_j as a linear form in y
    images = [{basis: gens[i][j] for i, basis in enumerate(_unit_exps(m)) if gens[i][j]} for j in range(f.nvars)]
    one = {(0,) * m: Fraction(1)}
    power_cache: dict[tuple[int, int], dict] = {}

    def power(j: int, e: int) -> dict:
        if e == 0:
            return one
        key = (j, e)
        if key not in power_cache:
            power_cache[key] = _mul(power(j, e - 1), images[j])
        return power_cache[key]

    out: dict[tuple[int, ...], Fraction] = {}
    for exp, coeff in f.terms.items():
        prod = {(0,) * m: coeff}
        for j, e in enumerate(exp):
            if e:
                prod = _mul(prod, power(j, e))
        for k, c in prod.items():
            out[k] = out.get(k, Fraction(0)) + c
    return VolumePolynomial(m, f.degree, out)


def _unit_exps(m: int):
    return [tuple(int(i == j) for j in range(m)) for i in range(m)]


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return out


def sequence_sk(f: VolumePolynomial, alpha: Sequence, beta: Sequence) -> tuple[Fraction, ...]:
    """``values[k] = alpha^k . beta^(d-k)``; ``values[d] = f(alpha)``."""
    alpha, beta = vector(alpha), vector(beta)
    _check_len(f, alpha)
    _check_len(f, beta)
    d = f.degree
    return tuple(mixed_value(f, [alpha] * k + [beta] * (d - k)) for k in range(d + 1))


def polynomial_from_mixed(nvars: int, degree: int, mixed) -> VolumePolynomial:
    """Assemble ``f`` from a function giving mixed values on basis multisets.

    ``mixed(idx)`` receives a sorted index tuple of length ``degree`` and must
    return the symmetric mixed value on those basis vectors.
    """
    terms = {}
    for idx in combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for i in idx:
            exp[i] += 1
        multinomial = factorial(degree)
        for e in exp:
            multinomial //= factorial(e)
        value = as_fraction(mixed(idx))
        if value:
            terms[tuple(exp)] = multinomial * value
    return VolumePolynomial(nvars, degree, terms)


def format_polynomial(f: VolumePolynomial, names: Sequence[str] | None = None) -> str:
    if f.is_zero():
        return "0"
    names = names or [f"t{i + 1}" for i in range(f.nvars)]
    parts = []
    for exp, coeff in f.terms.items():
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exp) if e)
        if not mono:
            parts.append(str(coeff))
        elif coeff == 1:
            parts.append(mono)
        else:
            parts.append(f"{coeff}*{mono}")
    return " + ".join(parts)
