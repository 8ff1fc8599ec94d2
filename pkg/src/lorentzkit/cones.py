"""Polyhedral cone models (nef / psef / movable) and deterministic sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import InputError
from .linalg import nullspace, primitive, rank
from .polycore import Vector, basis_vector, dot, vector

TAGS = ("nef", "movable", "divisorial")


@dataclass(frozen=True)
class ConeModel:
    """Cone generated by finitely many rational rays.

    ``facet_normals`` describe the cone inside its linear span (``n . x >= 0``)
    and ``equations`` cut out that span (``e . x == 0``).  Both are derived
    from the generators unless supplied.
    """

    name: str
    generators: tuple[Vector, ...]
    facet_normals: tuple[Vector, ...] = ()
    equations: tuple[Vector, ...] = ()
    tags: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.generators:
            raise InputError(f"cone {self.name!r} has no generators")
        dims = {len(g) for g in self.generators}
        if len(dims) != 1:
            raise InputError(f"cone {self.name!r} mixes generator lengths {sorted(dims)}")
        if any(not any(g) for g in self.generators):
            raise InputError(f"cone {self.name!r} has a zero generator")
        if self.tags is not None:
            if len(self.tags) != len(self.generators):
                raise InputError(f"cone {self.name!r}: one tag per generator required")
            bad = [t for t in self.tags if t not in TAGS]
            if bad:
                raise InputError(f"cone {self.name!r}: unknown tags {bad}")
        for g in self.generators:
            if not self.contains(g):
                raise InputError(f"cone {self.name!r}: generator {fmt(g)} violates a facet inequality")

    @property
    def dim(self) -> int:
        return len(self.generators[0])

    @property
    def is_full_dimensional(self) -> bool:
        return not self.equations

    def contains(self, v: Sequence) -> bool:
        v = vector(v)
        return all(dot(e, v) == 0 for e in self.equations) and all(dot(n, v) >= 0 for n in self.facet_normals)

    def in_interior(self, v: Sequence) -> bool:
        v = vector(v)
        return self.is_full_dimensional and all(dot(n, v) > 0 for n in self.facet_normals)

    def interior_point(self) -> Vector:
        s = len(self.generators)
        return tuple(sum((g[i] for g in self.generators), Fraction(0)) / s for i in range(self.dim))

    def scaling_to_contain(self, v: Sequence, base: Sequence) -> Fraction:
        """Smallest ``t >= 0`` with ``t*base - v`` in the cone (needs ``base`` interior)."""
        v, base = vector(v), vector(base)
        if not self.in_interior(base):
            raise InputError("base point must be interior")
        return max([Fraction(0)] + [dot(n, v) / dot(n, base) for n in self.facet_normals])


def fmt(v: Sequence) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def from_generators(name: str, generators: Sequence[Sequence], tags=None) -> ConeModel:
    gens = tuple(vector(g) for g in generators)
    if not gens:
        raise InputError(f"cone {name!r} has no generators")
    if any(not any(g) for g in gens):
        raise InputError(f"cone {name!r} has a zero generator")
    if len({len(g) for g in gens}) != 1:
        raise InputError(f"cone {name!r} mixes generator lengths")
    normals, equations = facets_of(gens)
    return ConeModel(name, gens, normals, equations, None if tags is None else tuple(tags))


def from_facets(name: str, normals: Sequence[Sequence]) -> ConeModel:
    """Pointed full-dimensional cone ``{x : n . x >= 0}``."""
    normals = tuple(vector(n) for n in normals)
    gens = extreme_rays(normals)
    canon, eqs = facets_of(gens)
    return ConeModel(name, gens, canon, eqs)


def positive_orthant(s: int, name: str = "nef") -> ConeModel:
    gens = tuple(basis_vector(s, i) for i in range(s))
    return ConeModel(name, gens, gens, ())


def facets_of(gens: Sequence[Vector]) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """Facet normals (within the span) and span equations of cone(gens)."""
    s = len(gens[0])
    equations = tuple(primitive(e) for e in nullspace([list(g) for g in gens], s))
    k = s - len(equations)
    found: dict[tuple, Vector] = {}
    for subset in combinations(range(len(gens)), k - 1):
        rows = [list(gens[i]) for i in subset] + [list(e) for e in equations]
        if k - 1 and rank([list(gens[i]) for i in subset]) != k - 1:
            continue
        kernel = nullspace(rows, s)
        if len(kernel) != 1:
            continue
        n = kernel[0]
        values = [dot(n, g) for g in gens]
        if all(v >= 0 for v in values):
            pass
        elif all(v <= 0 for v in values):
            n = [-x for x in n]
        else:
            continue
        if not any(dot(n, g) for g in gens):
            continue
        p = primitive(n)
        found[p] = p
    return tuple(sorted(found.values())), equations


def extreme_rays(normals: Sequence[Vector]) -> tuple[Vector, ...]:
    s = len(normals[0])
    if rank([list(n) for n in normals]) != s:
        raise InputError("facet description does not define a pointed cone")
    rays: dict[tuple, Vector] = {}
    for subset in combinations(range(len(normals)), s - 1):
        kernel = nullspace([list(normals[i]) for i in subset], s)
        if len(kernel) != 1:
            continue
        for r in (kernel[0], [-x for x in kernel[0]]):
            if all(dot(n, r) >= 0 for n in normals):
                p = primitive(r)
                rays[p] = p
    if not rays:
        raise InputError("facet description defines the zero cone")
    return tuple(sorted(rays.values()))


def _primes(count: int) -> list[int]:
    out, n = [], 2
    while len(out) < count:
        if all(n % p for p in out):
            out.append(n)
        n += 1
    return out


def radical_inverse(n: int, base: int) -> Fraction:
    result, scale = Fraction(0), Fraction(1, base)
    while n:
        n, digit = divmod(n, base)
        result += digit * scale
        scale /= base
    return result


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic low-discrepancy rational interior points of a cone."""

    count: int = 16
    seed: int = 0
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def points(self, cone: ConeModel) -> list[Vector]:
        if self.count < 1:
            raise InputError("sample count must be positive")
        key = (cone.generators, self.count, self.seed)
        if key not in self._cache:
            m = len(cone.generators)
            bases = _primes(m)
            pts = []
            for j in range(self.count):
                # weights in [1, 2): strictly positive combination of every generator
                weights = [1 + radical_inverse(self.seed + j + 1, b) for b in bases]
                if j == 0:
                    weights = [Fraction(1)] * m
                total = sum(weights)
                pts.append(tuple(sum((w * g[i] for w, g in zip(weights, cone.generators)), Fraction(0)) / total
                                 for i in range(cone.dim)))
            self._cache[key] = pts
        return list(self._cache[key])
