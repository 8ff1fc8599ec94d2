"""Exact (strict) Lorentzian certification through inertia of contracted forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Sequence

from .cones import ConeModel, SamplePlan, fmt
from .errors import PreconditionError
from .linalg import rank
from .polycore import (
    DimensionError,
    Vector,
    VolumePolynomial,
    basis_vector,
    contract,
    mixed_value,
    substitute_cone,
    vector,
)

STRICT = "StrictlyLorentzian"
LORENTZIAN = "Lorentzian"
NOT_LORENTZIAN = "NotLorentzian"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Inertia:
    n_plus: int
    n_zero: int
    n_minus: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_zero, self.n_minus)

    def __str__(self):
        return f"({self.n_plus},{self.n_zero},{self.n_minus})"


@dataclass(frozen=True)
class ContractedForm:
    matrix: tuple[tuple[Fraction, ...], ...]
    contraction_dirs: tuple[Vector, ...]


@dataclass(frozen=True)
class Witness:
    dirs: tuple[Vector, ...]
    inertia: Inertia | None = None
    note: str = ""

    def describe(self) -> str:
        parts = []
        if self.dirs:
            parts.append("dirs=" + " ".join(fmt(v) for v in self.dirs))
        if self.inertia is not None:
            parts.append(f"inertia={self.inertia}")
        if self.note:
            parts.append(self.note)
        return "; ".join(parts)


@dataclass(frozen=True)
class LorentzCertificate:
    verdict: str
    witnesses: tuple[Witness, ...] = ()
    support_m_convex: bool | None = None
    notes: tuple[str, ...] = field(default=())


def contracted_form(f: VolumePolynomial, dirs: Sequence[Sequence]) -> ContractedForm:
    """Matrix of ``(x, y) -> mixed_value(f, [x, y, *dirs])`` in the standard basis."""
    dirs = tuple(vector(v) for v in dirs)
    if len(dirs) != f.degree - 2:
        raise DimensionError(f"contracted_form needs {f.degree - 2} directions, got {len(dirs)}")
    quad = contract(f, dirs)
    s = f.nvars
    scale = Fraction(1, factorial(f.degree))
    mat = [[Fraction(0)] * s for _ in range(s)]
    for exp, c in quad.terms.items():
        idx = [i for i, e in enumerate(exp) for _ in range(e)]
        i, j = idx
        if i == j:
            mat[i][i] = 2 * c * scale
        else:
            mat[i][j] = mat[j][i] = c * scale
    return ContractedForm(tuple(tuple(r) for r in mat), dirs)


def inertia(form: ContractedForm | Sequence[Sequence]) -> Inertia:
    """Sylvester inertia by symmetric congruence diagonalization over Q."""
    rows = form.matrix if isinstance(form, ContractedForm) else form
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    if any(len(row) != n for row in a) or any(a[i][j] != a[j][i] for i in range(n) for j in range(i)):
        raise ValueError("inertia needs a square symmetric matrix")
    plus = minus = 0
    while a:
        m = len(a)
        k = next((i for i in range(m) if a[i][i]), None)
        if k is None:
            pair = next(((i, j) for i in range(m) for j in range(i + 1, m) if a[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # replace e_i by e_i + e_j: new diagonal entry is 2 a_ij != 0
            a[i] = [x + y for x, y in zip(a[i], a[j])]
            for row in a:
                row[i] = row[i] + row[j]
            k = i
        pivot = a[k][k]
        if pivot > 0:
            plus += 1
        else:
            minus += 1
        rest = [i for i in range(m) if i != k]
        a = [[a[i][j] - a[i][k] * a[k][j] / pivot for j in rest] for i in rest]
    return Inertia(plus, n - plus - minus, minus)


def _exchange_ok(support: list[tuple[int, ...]]) -> tuple[bool, str]:
    members = set(support)
    for a in support:
        for b in support:
            for i in range(len(a)):
                if a[i] <= b[i]:
                    continue
                if not any(a[j] < b[j] and _shift(a, i, j) in members for j in range(len(a))):
                    return False, f"exchange fails for {a}, {b} at index {i}"
    return True, ""


def _shift(a: tuple[int, ...], i: int, j: int) -> tuple[int, ...]:
    out = list(a)
    out[i] -= 1
    out[j] += 1
    return tuple(out)


def check_positive_orthant_lorentzian(f: VolumePolynomial) -> LorentzCertificate:
    """Exact Lorentzian test on the open positive orthant.

    Nonnegative coefficients, M-convex support, and at most one positive
    eigenvalue for every (d-2)-fold monomial derivative.
    """
    if f.is_zero():
        return LorentzCertificate(NOT_LORENTZIAN, (Witness((), None, "identically zero"),))
    negative = [(e, c) for e, c in f.terms.items() if c < 0]
    if negative:
        exp, c = negative[0]
        return LorentzCertificate(NOT_LORENTZIAN, (Witness((), None, f"negative coefficient {c} on {exp}"),))
    s = f.nvars
    checked = []
    if f.degree >= 2:
        for idx in combinations_with_replacement(range(s), f.degree - 2):
            dirs = tuple(basis_vector(s, i) for i in idx)
            inert = inertia(contracted_form(f, dirs))
            if inert.n_plus > 1:
                return LorentzCertificate(NOT_LORENTZIAN, (Witness(dirs, inert, "more than one positive eigenvalue"),))
            checked.append(Witness(dirs, inert))
    ok, why = _exchange_ok(list(f.terms))
    if not ok:
        return LorentzCertificate(NOT_LORENTZIAN, (Witness((), None, f"support not M-convex: {why}"),), False)
    return LorentzCertificate(LORENTZIAN, tuple(checked), True)


def sample_tuples(points: list[Vector], d: int) -> list[tuple[Vector, ...]]:
    """Deterministic d-tuples cycling through the sample points."""
    n = len(points)
    return [tuple(points[(j + t) % n] for t in range(d)) for j in range(n)]


def check_cone_lorentzian(f: VolumePolynomial, cone: ConeModel, sampler: SamplePlan | None = None) -> LorentzCertificate:
    sampler = sampler or SamplePlan()
    if cone.dim != f.nvars:
        raise DimensionError(f"cone lives in dimension {cone.dim}, polynomial has {f.nvars} variables")
    notes = []
    exact_ok = None
    support = None
    spanning = rank([list(g) for g in cone.generators]) == f.nvars
    if spanning:
        g = substitute_cone(f, cone.generators)
        cert = check_positive_orthant_lorentzian(g)
        support = cert.support_m_convex
        if cert.verdict == NOT_LORENTZIAN:
            mapped = tuple(Witness(tuple(_to_ambient(v, cone) for v in w.dirs), w.inertia, "generator coordinates: " + w.note if w.note else "generator coordinates")
                           for w in cert.witnesses)
            return LorentzCertificate(NOT_LORENTZIAN, mapped, support)
        exact_ok = True
    else:
        notes.append("generators do not span: exact substitution test inapplicable")

    witnesses = []
    points = sampler.points(cone)
    d = f.degree
    for tup in sample_tuples(points, d):
        value = mixed_value(f, tup)
        if value <= 0:
            return LorentzCertificate(NOT_LORENTZIAN, (Witness(tup, None, f"mixed value {value} is not positive"),), support, tuple(notes))
        if d >= 2:
            inert = inertia(contracted_form(f, tup[: d - 2]))
            if inert.n_plus > 1:
                return LorentzCertificate(NOT_LORENTZIAN, (Witness(tup[: d - 2], inert, "more than one positive eigenvalue"),), support, tuple(notes))
            witnesses.append(Witness(tup[: d - 2], inert))
    verdict = LORENTZIAN if exact_ok else INDETERMINATE
    return LorentzCertificate(verdict, tuple(witnesses), support, tuple(notes))


def _to_ambient(y: Vector, cone: ConeModel) -> Vector:
    return tuple(sum((yi * g[k] for yi, g in zip(y, cone.generators)), Fraction(0)) for k in range(cone.dim))


def check_strict(f: VolumePolynomial, cone: ConeModel, sampler: SamplePlan | None = None,
                 certificate: LorentzCertificate | None = None) -> LorentzCertificate:
    """Per-sample nondegeneracy of ``contracted_form(f, [w]*(d-2))``."""
    sampler = sampler or SamplePlan()
    certificate = certificate or check_cone_lorentzian(f, cone, sampler)
    if certificate.verdict not in (LORENTZIAN, STRICT):
        raise PreconditionError(f"strictness requires a Lorentzian certificate, got {certificate.verdict}")
    s = f.nvars
    witnesses = []
    for w in sampler.points(cone):
        inert = inertia(contracted_form(f, [w] * (f.degree - 2)))
        if inert.n_plus != 1:
            return LorentzCertificate(NOT_LORENTZIAN, (Witness((w,), inert, "n_plus != 1"),), certificate.support_m_convex)
        witnesses.append(Witness((w,), inert))
    if all(w.inertia.as_tuple() == (1, 0, s - 1) for w in witnesses):
        return LorentzCertificate(STRICT, tuple(witnesses), certificate.support_m_convex,
                                  ("strictness certified at each sampled interior point",))
    if all(w.inertia.n_zero > 0 for w in witnesses):
        return LorentzCertificate(INDETERMINATE, tuple(witnesses), certificate.support_m_convex,
                                  ("degenerate form at every sample",))
    return LorentzCertificate(INDETERMINATE, tuple(witnesses), certificate.support_m_convex,
                              ("degenerate at some samples only",))
