"""Numerical dimensions, Hall-Rado criteria, kernel faces and annihilation tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Sequence

from .cones import ConeModel, SamplePlan, fmt
from .errors import DomainError, InputError, InvariantError, PreconditionError
from .polycore import DimensionError, Vector, VolumePolynomial, add, mixed_value, vector

MAX_COLLECTION = 20

VANISHING = "Vanishing"
CRITICAL = "Critical"
SUPERCRITICAL = "Supercritical"


@dataclass(frozen=True)
class NefCollection:
    classes: tuple[Vector, ...]
    reference_omega: Vector

    def __post_init__(self):
        if not self.classes:
            raise InputError("a collection needs at least one class")
        if len(self.classes) > MAX_COLLECTION:
            raise InputError(f"collections are capped at {MAX_COLLECTION} classes (2^m subsets)")

    @property
    def m(self) -> int:
        return len(self.classes)

    def partial_sum(self, subset: Sequence[int]) -> Vector:
        total = tuple(Fraction(0) for _ in self.reference_omega)
        for i in subset:
            total = add(total, self.classes[i])
        return total


def make_collection(classes: Sequence[Sequence], omega: Sequence, nef: ConeModel | None = None) -> NefCollection:
    classes = tuple(vector(c) for c in classes)
    omega = vector(omega)
    if any(len(c) != len(omega) for c in classes):
        raise DimensionError("collection classes and reference point differ in length")
    if nef is not None:
        for c in classes:
            if not nef.contains(c):
                raise PreconditionError(f"class {fmt(c)} is not in the nef model {nef.name!r}")
        if not nef.in_interior(omega):
            raise PreconditionError(f"reference point {fmt(omega)} is not interior to {nef.name!r}")
    return NefCollection(classes, omega)


def nd_omega(f: VolumePolynomial, L: Sequence, omega: Sequence) -> int:
    """Largest ``k`` with ``L^k . omega^(d-k) != 0``; the zero class has nd 0."""
    L, omega = vector(L), vector(omega)
    d = f.degree
    if not any(L):
        return 0
    for k in range(d, 0, -1):
        if mixed_value(f, [L] * k + [omega] * (d - k)) != 0:
            return k
    return 0


def _subsets(m: int):
    for size in range(1, m + 1):
        yield from combinations(range(m), size)


def nd_collection(f: VolumePolynomial, coll: NefCollection) -> int:
    """``min over nonempty I of nd(L_I) - |I| + m``."""
    m = coll.m
    return min(nd_omega(f, coll.partial_sum(I), coll.reference_omega) - len(I) + m for I in _subsets(m))


@dataclass(frozen=True)
class HallRadoResult:
    product_nonzero: bool
    nd_criterion: bool
    violating_I: tuple[int, ...] | None
    product_value: Fraction


def hall_rado(f: VolumePolynomial, coll: NefCollection, sampler: SamplePlan | None = None,
              nef: ConeModel | None = None) -> HallRadoResult:
    """Compare non-vanishing of ``L_1...L_m . omega^(d-m)`` with ``nd(L_I) >= |I|``.

    Index sets are 0-based.  With ``nef`` and ``sampler`` the product is also
    evaluated at sampled interior points and must not change its vanishing.
    """
    d, m = f.degree, coll.m
    if m > d:
        raise InputError(f"collection of {m} classes exceeds degree {d}")
    tail = d - m
    value = mixed_value(f, list(coll.classes) + [coll.reference_omega] * tail)
    nonzero = value != 0
    if nef is not None and tail:
        for w in (sampler or SamplePlan()).points(nef):
            if (mixed_value(f, list(coll.classes) + [w] * tail) != 0) != nonzero:
                raise InvariantError(f"product vanishing depends on the interior point {fmt(w)}")
    violating = None
    for I in _subsets(m):
        if nd_omega(f, coll.partial_sum(I), coll.reference_omega) < len(I):
            violating = I
            break
    return HallRadoResult(nonzero, violating is None, violating, value)


def tight_sets(f: VolumePolynomial, coll: NefCollection) -> list[tuple[int, ...]]:
    return [I for I in _subsets(coll.m) if nd_omega(f, coll.partial_sum(I), coll.reference_omega) == len(I)]


def maximal_index_set(f: VolumePolynomial, coll: NefCollection) -> tuple[int, ...]:
    """Unique maximal ``I`` with ``nd(L_I) = |I|`` (critical collections only)."""
    nd = nd_collection(f, coll)
    if nd != coll.m:
        kind = SUPERCRITICAL if nd > coll.m else "subcritical"
        raise DomainError(f"maximal index set needs nd(collection) = m = {coll.m}, got {nd} ({kind})")
    tight = tight_sets(f, coll)
    tight_set = set(tight)
    for I, J in combinations(tight, 2):
        union = tuple(sorted(set(I) | set(J)))
        if union not in tight_set:
            raise InvariantError(f"tight sets {I} and {J} have non-tight union {union}")
    union = tuple(sorted(set().union(*map(set, tight))))
    if union not in tight_set:
        raise InvariantError("union of tight sets is not tight")
    return union


def submodularity_check(f: VolumePolynomial, L: Sequence, M: Sequence, N: Sequence, omega: Sequence) -> bool:
    """``nd(L+M+N) + nd(L) <= nd(L+M) + nd(L+N)``."""
    L, M, N = vector(L), vector(M), vector(N)
    lhs = nd_omega(f, add(add(L, M), N), omega) + nd_omega(f, L, omega)
    rhs = nd_omega(f, add(L, M), omega) + nd_omega(f, add(L, N), omega)
    return lhs <= rhs


@dataclass(frozen=True)
class KernelFaceReport:
    nd_collection: int
    classification: str
    zero_generators: tuple[int, ...]
    functional: tuple[Fraction, ...]
    maximal_index_set: tuple[int, ...] | None = None
    stable_under_I0: tuple[bool, ...] | None = None
    tagged: dict = field(default_factory=dict)

    def face_generators(self, cone: ConeModel) -> list[Vector]:
        return [cone.generators[i] for i in self.zero_generators]


def kernel_face(f: VolumePolynomial, coll: NefCollection, cone: ConeModel) -> KernelFaceReport:
    """Face of ``cone`` killed by ``g -> g . L_1 ... L_{d-1}``.

    ``zero_generators`` and ``maximal_index_set`` are 0-based indices.
    """
    d = f.degree
    if coll.m != d - 1:
        raise InputError(f"kernel_face needs d-1 = {d - 1} classes, got {coll.m}")
    if cone.dim != f.nvars:
        raise DimensionError("cone and polynomial dimensions differ")
    values = tuple(mixed_value(f, [g, *coll.classes]) for g in cone.generators)
    for g, v in zip(cone.generators, values):
        if v < 0:
            raise PreconditionError(f"functional is negative ({v}) on generator {fmt(g)}")
    zero = tuple(i for i, v in enumerate(values) if v == 0)
    nd = nd_collection(f, coll)
    if nd <= d - 2:
        kind = VANISHING
        if len(zero) != len(values):
            raise InvariantError("vanishing collection with a nonzero functional")
    elif nd == d - 1:
        kind = CRITICAL
    else:
        kind = SUPERCRITICAL
    I0 = stable = None
    if kind == CRITICAL:
        I0 = maximal_index_set(f, coll)
        base = coll.partial_sum(I0)
        nd_base = nd_omega(f, base, coll.reference_omega)
        stable = tuple(nd_omega(f, add(base, cone.generators[i]), coll.reference_omega) == nd_base for i in zero)
    tagged = {}
    if cone.tags is not None:
        for tag in sorted(set(cone.tags)):
            tagged[tag] = tuple(i for i in zero if cone.tags[i] == tag)
    return KernelFaceReport(nd, kind, zero, values, I0, stable, tagged)


@dataclass(frozen=True)
class AnnihilationResult:
    k: int
    cond1: bool
    cond2: bool
    cond3: bool
    lam: Fraction | None

    @property
    def agree(self) -> bool:
        return self.cond1 == self.cond2 == self.cond3


def annihilation_triple(f: VolumePolynomial, L: Sequence, alpha: Sequence, omega: Sequence,
                        nef: ConeModel) -> AnnihilationResult:
    """Three equivalent ways of saying ``alpha`` is dominated by ``L``.

    cond3 is decided by the smallest admissible ``lambda``: the maximum of
    ``(alpha . B) / (L . B)`` over nef generator tuples ``B``, which exists
    unless some tuple has ``L . B = 0 < alpha . B``.  When ``nd(L) = d`` the
    first condition has no room for ``alpha`` and is vacuously true.
    """
    L, alpha, omega = vector(L), vector(alpha), vector(omega)
    d = f.degree
    k = nd_omega(f, L, omega)
    if k == d:
        cond1 = True
    else:
        cond1 = mixed_value(f, [L] * k + [alpha] + [omega] * (d - k - 1)) == 0
    cond2 = nd_omega(f, add(L, alpha), omega) == k
    lam: Fraction | None = Fraction(0)
    for tup in combinations_with_replacement(nef.generators, d - 1):
        num = mixed_value(f, [alpha, *tup])
        den = mixed_value(f, [L, *tup])
        if den == 0:
            if num > 0:
                lam = None
                break
        else:
            lam = max(lam, num / den)
    return AnnihilationResult(k, cond1, cond2, lam is not None, lam)
