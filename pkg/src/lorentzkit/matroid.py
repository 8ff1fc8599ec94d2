"""Matroids, their lattices of flats, Chow rings and Bergman-class volume polynomials.

The Chow ring is presented with one variable ``x_F`` per proper nonempty flat,
quadratic relations ``x_F x_G = 0`` for incomparable flats and linear
relations ``sum_{F ni i} x_F = sum_{F ni j} x_F``.  Because the quadratic
relations are monomial, the quotient by them has a basis of monomials
supported on chains, and only the linear relations need linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, combinations_with_replacement
from typing import Mapping, Sequence

from .cones import ConeModel, positive_orthant
from .errors import DomainError, InputError, InvariantError
from .lorentz import Inertia, inertia
from .linalg import sparse_nullspace, sparse_rref
from .polycore import VolumePolynomial, as_fraction, polynomial_from_mixed

MAX_GROUND = 7
MAX_RANK = 5


@dataclass(frozen=True)
class Matroid:
    ground_size: int
    bases: frozenset[frozenset[int]]

    def __post_init__(self):
        if not 1 <= self.ground_size <= MAX_GROUND:
            raise InputError(f"ground set size must be in 1..{MAX_GROUND}")
        if not self.bases:
            raise InputError("a matroid needs at least one basis")
        sizes = {len(b) for b in self.bases}
        if len(sizes) != 1:
            raise InputError("bases have different sizes")
        if any(not b <= frozenset(range(self.ground_size)) for b in self.bases):
            raise InputError("basis element outside the ground set")
        for b1 in self.bases:
            for b2 in self.bases:
                for x in b1 - b2:
                    if not any((b1 - {x}) | {y} in self.bases for y in b2 - b1):
                        raise InputError(f"basis exchange fails for {sorted(b1)}, {sorted(b2)} at {x}")

    @property
    def rank(self) -> int:
        return len(next(iter(self.bases)))

    @property
    def ground(self) -> frozenset[int]:
        return frozenset(range(self.ground_size))

    def rank_of(self, subset) -> int:
        subset = frozenset(subset)
        return max(len(subset & b) for b in self.bases)

    def closure(self, subset) -> frozenset[int]:
        subset = frozenset(subset)
        r = self.rank_of(subset)
        return frozenset(e for e in range(self.ground_size) if e in subset or self.rank_of(subset | {e}) == r)

    @property
    def is_loopless(self) -> bool:
        return frozenset().union(*self.bases) == self.ground


def from_bases(ground_size: int, bases: Sequence[Sequence[int]]) -> Matroid:
    return Matroid(ground_size, frozenset(frozenset(b) for b in bases))


def uniform(rank: int, size: int) -> Matroid:
    return from_bases(size, list(combinations(range(size), rank)))


def boolean(size: int) -> Matroid:
    return uniform(size, size)


def graphic(num_vertices: int, edges: Sequence[tuple[int, int]]) -> Matroid:
    """Cycle matroid: bases are the spanning forests."""
    def acyclic(subset) -> bool:
        parent = list(range(num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in subset:
            a, b = find(edges[e][0]), find(edges[e][1])
            if a == b:
                return False
            parent[a] = b
        return True

    for r in range(len(edges), -1, -1):
        bases = [s for s in combinations(range(len(edges)), r) if acyclic(s)]
        if bases:
            return from_bases(len(edges), bases)
    raise InputError("graph has no edges")


@dataclass(frozen=True)
class FlatLattice:
    flats: tuple[frozenset[int], ...]
    ranks: tuple[int, ...]
    covers: tuple[tuple[int, int], ...]

    @property
    def proper(self) -> list[int]:
        """Indices of proper nonempty flats."""
        top = max(self.ranks)
        return [i for i, F in enumerate(self.flats) if F and self.ranks[i] != top]


def flats(M: Matroid) -> FlatLattice:
    found = {M.closure(S) for k in range(M.ground_size + 1) for S in combinations(range(M.ground_size), k)}
    ordered = sorted(found, key=lambda F: (M.rank_of(F), sorted(F)))
    ranks = tuple(M.rank_of(F) for F in ordered)
    covers = tuple((i, j) for i, F in enumerate(ordered) for j, G in enumerate(ordered)
                   if F < G and ranks[j] == ranks[i] + 1)
    return FlatLattice(tuple(ordered), ranks, covers)


def reduced_characteristic_coefficients(M: Matroid) -> tuple[int, ...]:
    """Absolute coefficients of chi_M(t)/(t-1), from the Moebius function of the flats."""
    lat = flats(M)
    r = M.rank
    mu: dict[int, int] = {}
    for j, F in enumerate(lat.flats):
        mu[j] = 1 if j == 0 else -sum(mu[i] for i, G in enumerate(lat.flats[:j]) if G < F)
    chi = [0] * (r + 1)  # chi[k] = coefficient of t^(r-k)
    for j in range(len(lat.flats)):
        chi[lat.ranks[j]] += mu[j]
    # synthetic division by (t - 1), highest power first
    quotient, carry = [], 0
    for c in chi[:-1]:
        carry = carry + c
        quotient.append(carry)
    if carry + chi[-1] != 0:
        raise InvariantError("characteristic polynomial does not vanish at 1")
    return tuple(abs(q) for q in quotient)


# ---------------------------------------------------------------- Chow ring

Monomial = tuple[int, ...]  # sorted tuple of flat-variable indices


@dataclass
class ChowRingModel:
    matroid: Matroid
    lattice: FlatLattice
    variables: tuple[frozenset[int], ...]
    dimensions: tuple[int, ...]
    top_basis: tuple[Monomial, ...]
    degree_weights: dict[Monomial, Fraction] = field(repr=False)

    @cached_property
    def _comparable(self) -> list[list[bool]]:
        vs = self.variables
        return [[a <= b or b <= a for b in vs] for a in vs]

    @property
    def top_degree(self) -> int:
        return self.matroid.rank - 1

    def is_chain(self, mono: Monomial) -> bool:
        comp = self._comparable
        return all(comp[a][b] for a, b in combinations(set(mono), 2))

    def multiply(self, poly: Mapping[Monomial, Fraction], form: Mapping[int, Fraction]) -> dict[Monomial, Fraction]:
        """Product modulo the incomparability relations."""
        comp = self._comparable
        out: dict[Monomial, Fraction] = {}
        for mono, c in poly.items():
            for var, a in form.items():
                if all(comp[var][m] for m in mono):
                    new = tuple(sorted(mono + (var,)))
                    out[new] = out.get(new, 0) + c * a
        return {m: v for m, v in out.items() if v}

    def degree_of(self, poly: Mapping[Monomial, Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, c in poly.items():
            if len(mono) != self.top_degree:
                raise InputError("degree is defined on the top graded piece only")
            total += c * self.degree_weights.get(mono, 0)
        return total


def _chain_monomials(comparable: list[list[bool]], k: int) -> list[Monomial]:
    n = len(comparable)
    out: list[Monomial] = []

    def extend(prefix: list[int], start: int):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        for v in range(start, n):
            if all(comparable[v][u] for u in prefix):
                prefix.append(v)
                extend(prefix, v)
                prefix.pop()

    extend([], 0)
    return out


def chow_ring(M: Matroid) -> ChowRingModel:
    if not M.is_loopless:
        raise DomainError("the Chow ring construction needs a loopless matroid")
    r = M.rank
    if not 2 <= r <= MAX_RANK:
        raise DomainError(f"rank must be in 2..{MAX_RANK}")
    lat = flats(M)
    variables = tuple(lat.flats[i] for i in lat.proper)
    nv = len(variables)
    comparable = [[a <= b or b <= a for b in variables] for a in variables]
    linear = []
    for j in range(1, M.ground_size):
        form: dict[int, Fraction] = {}
        for v, F in enumerate(variables):
            coeff = (0 in F) - (j in F)
            if coeff:
                form[v] = Fraction(coeff)
        linear.append(form)

    dims = [1]
    prev = [()]
    degree_weights: dict[Monomial, Fraction] = {}
    top_basis: tuple[Monomial, ...] = ()
    for k in range(1, r):
        monos = _chain_monomials(comparable, k)
        index = {m: i for i, m in enumerate(monos)}
        rows = []
        for form in linear:
            for m in prev:
                row: dict[int, Fraction] = {}
                for var, a in form.items():
                    if all(comparable[var][u] for u in m):
                        col = index[tuple(sorted(m + (var,)))]
                        row[col] = row.get(col, 0) + a
                if any(row.values()):
                    rows.append(row)
        reduced = sparse_rref(rows)
        dims.append(len(monos) - len(reduced))
        if k == r - 1:
            kernel = sparse_nullspace(rows, len(monos))
            if len(kernel) != 1:
                raise InvariantError(f"top graded piece has dimension {len(kernel)}, expected 1")
            weights = kernel[0]
            flag = _some_flag(variables, monos, r - 1)
            norm = weights.get(index[flag], 0)
            if norm == 0:
                raise InvariantError("complete flag has zero degree")
            degree_weights = {monos[c]: v / norm for c, v in weights.items() if v}
            top_basis = tuple(monos[c] for c in range(len(monos)) if c not in reduced)
        prev = monos
    model = ChowRingModel(M, lat, variables, tuple(dims), top_basis, degree_weights)
    for mono in _chain_monomials(comparable, r - 1):
        if len(set(mono)) == r - 1 and degree_weights.get(mono, 0) != 1:
            raise InvariantError(f"complete flag {mono} has degree {degree_weights.get(mono, 0)}")
    return model


def _some_flag(variables, monos, length) -> Monomial:
    for m in monos:
        if len(set(m)) == length:
            return m
    raise InvariantError("no complete flag of proper flats")


# ---------------------------------------------------------------- divisors

@dataclass(frozen=True)
class DivisorSpec:
    """Named class ``alpha``/``beta`` or a function ``z`` on subsets of the ground set."""

    name: str
    values: Mapping[frozenset[int], Fraction] | None = None

    def __post_init__(self):
        if self.name not in ("alpha", "beta") and self.values is None:
            raise InputError(f"divisor {self.name!r} needs subset values")


ALPHA = DivisorSpec("alpha")
BETA = DivisorSpec("beta")


def divisor_from_function(M: Matroid, z) -> DivisorSpec:
    """Tabulate ``z`` (callable or mapping on frozensets; missing sets are 0)."""
    table = {}
    for k in range(M.ground_size + 1):
        for S in combinations(range(M.ground_size), k):
            S = frozenset(S)
            v = z(S) if callable(z) else z.get(S, 0)
            table[S] = as_fraction(v)
    return DivisorSpec("z", table)


def concave_cardinality(M: Matroid, profile: Sequence) -> DivisorSpec:
    """``z(S) = profile[|S|]``; strictly submodular when the profile is strictly concave."""
    if len(profile) != M.ground_size + 1:
        raise InputError("profile needs one value per subset size 0..n")
    values = [as_fraction(v) for v in profile]
    return divisor_from_function(M, lambda S: values[len(S)])


def positivity_tag(M: Matroid, spec: DivisorSpec) -> str:
    """'ample' (strictly submodular), 'nef' (submodular) or 'none'."""
    if spec.values is None:
        return "nef"
    z = spec.values
    subsets = list(z)
    strict = True
    for A, B in combinations(subsets, 2):
        gap = z[A] + z[B] - z[A | B] - z[A & B]
        if gap < 0:
            return "none"
        if gap == 0 and not (A <= B or B <= A):
            strict = False
    return "ample" if strict else "nef"


def divisor_form(model: ChowRingModel, spec: DivisorSpec, element: int = 0) -> dict[int, Fraction]:
    form: dict[int, Fraction] = {}
    for v, F in enumerate(model.variables):
        if spec.name == "alpha":
            c = Fraction(int(element in F))
        elif spec.name == "beta":
            c = Fraction(int(element not in F))
        else:
            c = spec.values.get(F, Fraction(0))
        if c:
            form[v] = c
    return form


def degree(M: Matroid, divisors: Sequence[DivisorSpec], model: ChowRingModel | None = None) -> Fraction:
    model = model or chow_ring(M)
    if len(divisors) != M.rank - 1:
        raise InputError(f"degree needs {M.rank - 1} divisors, got {len(divisors)}")
    poly: dict[Monomial, Fraction] = {(): Fraction(1)}
    for spec in divisors:
        poly = model.multiply(poly, divisor_form(model, spec))
    return model.degree_of(poly)


def bergman_volume_polynomial(M: Matroid, divisors: Sequence[DivisorSpec],
                              model: ChowRingModel | None = None) -> tuple[VolumePolynomial, ConeModel]:
    """``f(t) = deg((sum t_i D_i)^(r-1))`` and the positive orthant in divisor coordinates."""
    if not divisors:
        raise InputError("need at least one divisor")
    if M.rank - 1 < 2:
        raise DomainError("a volume polynomial needs rank at least 3")
    for spec in divisors:
        if positivity_tag(M, spec) == "none":
            raise InputError(f"divisor {spec.name!r} is not nef (its function is not submodular)")
    model = model or chow_ring(M)
    forms = [divisor_form(model, spec) for spec in divisors]
    d = M.rank - 1

    def mixed(idx):
        poly: dict[Monomial, Fraction] = {(): Fraction(1)}
        for i in idx:
            poly = model.multiply(poly, forms[i])
        return model.degree_of(poly)

    f = polynomial_from_mixed(len(divisors), d, mixed)
    return f, positive_orthant(len(divisors))


@dataclass(frozen=True)
class IntrinsicCertificate:
    """Signature of ``(x, y) -> deg(x y w^(r-3))`` on the degree-one piece."""

    inertia_on_variables: Inertia
    dim_degree_one: int
    signature: tuple[int, int, int]

    @property
    def strict(self) -> bool:
        return self.signature == (1, 0, self.dim_degree_one - 1)


def intrinsic_certificate(M: Matroid, ample: DivisorSpec, model: ChowRingModel | None = None) -> IntrinsicCertificate:
    """Hodge-Riemann check in degree one, computed in Chow-ring coordinates."""
    model = model or chow_ring(M)
    if M.rank < 3:
        raise DomainError("degree-one Hodge-Riemann form needs rank at least 3")
    form = divisor_form(model, ample)
    power: dict[Monomial, Fraction] = {(): Fraction(1)}
    for _ in range(M.rank - 3):
        power = model.multiply(power, form)
    nv = len(model.variables)
    gram = [[Fraction(0)] * nv for _ in range(nv)]
    for a in range(nv):
        pa = model.multiply(power, {a: Fraction(1)})
        for b in range(a, nv):
            value = model.degree_of(model.multiply(pa, {b: Fraction(1)}))
            gram[a][b] = gram[b][a] = value
    inert = inertia(gram)
    dim1 = model.dimensions[1]
    kernel_excess = inert.n_zero - (nv - dim1)
    return IntrinsicCertificate(inert, dim1, (inert.n_plus, kernel_excess, inert.n_minus))
