"""Rational polytopes (dimension <= 4): hulls, volumes, mixed volumes, 2D asymmetry.

Hulls are computed exactly by a placing triangulation in lexicographic
order, on integer coordinates obtained by clearing denominators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import factorial, gcd, lcm
from typing import Iterable, Sequence

from .errors import DomainError, InputError
from .intervals import DEFAULT_BITS, Interval, root
from .linalg import det, rref
from .polycore import VolumePolynomial, polynomial_from_mixed, vector

MAX_DIM = 4
MAX_SUMS = 4096


# ---------------------------------------------------------------- hull core

def _affine_chart(points: list[tuple[int, ...]]) -> tuple[int, list[int]]:
    """Affine dimension and coordinates on which projection is injective."""
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    if not diffs:
        return 0, []
    reduced, pivots = rref(diffs, len(base))
    return len(pivots), pivots


def _orient(simplex: Sequence[tuple[int, ...]]) -> int:
    base = simplex[0]
    return _int_det([[a - b for a, b in zip(p, base)] for p in simplex[1:]])


def _int_det(mat: list[list[int]]) -> int:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    if n == 3:
        a, b, c = mat
        return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]))
    total = 0
    for j in range(n):
        if mat[0][j]:
            minor = [row[:j] + row[j + 1:] for row in mat[1:]]
            total += (-1) ** j * mat[0][j] * _int_det(minor)
    return total


def _hyperplane(face: Sequence[tuple[int, ...]]) -> tuple[tuple[int, ...], int]:
    """Primitive integer normal and offset of the hyperplane through n points of Z^n."""
    n = len(face[0])
    base = face[0]
    rows = [[a - b for a, b in zip(p, base)] for p in face[1:]]
    normal = []
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows]
        normal.append((-1) ** j * _int_det(minor) if minor else 1)
    g = gcd(*normal)
    normal = [x // g for x in normal]
    return tuple(normal), sum(a * b for a, b in zip(normal, base))


def _placing(points: list[tuple[int, ...]]):
    """Placing triangulation of full-dimensional integer points.

    Returns (twice-n!-scaled volume, boundary facets as index tuples with
    outward hyperplanes).
    """
    n = len(points[0])
    order = list(range(len(points)))
    simplex = [0]
    for i in order[1:]:
        trial = [points[j] for j in simplex + [i]]
        if _affine_chart(trial)[0] == len(simplex):
            simplex.append(i)
            if len(simplex) == n + 1:
                break
    if len(simplex) < n + 1:
        raise ValueError("points are not full dimensional")
    inner = [sum(points[j][k] for j in simplex) for k in range(n)]  # (n+1) * interior point

    def oriented(face: tuple[int, ...]):
        normal, offset = _hyperplane([points[j] for j in face])
        side = sum(a * b for a, b in zip(normal, inner)) - (n + 1) * offset
        if side > 0:
            normal, offset = tuple(-x for x in normal), -offset
        return face, normal, offset

    facets = [oriented(tuple(sorted(set(simplex) - {j}))) for j in simplex]
    volume = abs(_orient([points[j] for j in simplex]))
    used = set(simplex)
    for i in order:
        if i in used:
            continue
        p = points[i]
        visible = [fc for fc in facets if sum(a * b for a, b in zip(fc[1], p)) > fc[2]]
        if not visible:
            continue
        used.add(i)
        count: dict[tuple[int, ...], int] = {}
        for face, _, _ in visible:
            volume += abs(_orient([points[j] for j in face] + [p]))
            for ridge in combinations(face, n - 1):
                count[ridge] = count.get(ridge, 0) + 1
        vis_set = {fc[0] for fc in visible}
        facets = [fc for fc in facets if fc[0] not in vis_set]
        for ridge, c in count.items():
            if c == 1:
                facets.append(oriented(tuple(sorted(ridge + (i,)))))
    return volume, facets


def _vertex_indices(points: list[tuple[int, ...]]) -> list[int]:
    """Indices of the points that are vertices of their convex hull."""
    if len(points) == 1:
        return [0]
    k, chart = _affine_chart(points)
    n = len(points[0])
    if k == 0:
        return [0]
    if k < n:
        return _vertex_indices([tuple(p[c] for c in chart) for p in points])
    if n == 1:
        values = [p[0] for p in points]
        return sorted({values.index(min(values)), values.index(max(values))})
    if n == 2:
        return _chain_indices(points)
    _, facets = _placing(points)
    groups: dict[tuple, set[int]] = {}
    for face, normal, offset in facets:
        groups.setdefault((normal, offset), set()).update(face)
    result: set[int] = set()
    for (normal, offset), members in groups.items():
        on_plane = sorted(i for i, p in enumerate(points) if sum(a * b for a, b in zip(normal, p)) == offset)
        sub = _vertex_indices([points[i] for i in on_plane])
        result.update(on_plane[j] for j in sub)
    return sorted(result)


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _chain_indices(points: list[tuple[int, ...]]) -> list[int]:
    """Andrew's monotone chain, strict (collinear points dropped), CCW order."""
    order = sorted(range(len(points)), key=lambda i: points[i])
    uniq = []
    for i in order:
        if not uniq or points[uniq[-1]] != points[i]:
            uniq.append(i)
    if len(uniq) <= 2:
        return uniq
    lower: list[int] = []
    for i in uniq:
        while len(lower) >= 2 and _cross(points[lower[-2]], points[lower[-1]], points[i]) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(uniq):
        while len(upper) >= 2 and _cross(points[upper[-2]], points[upper[-1]], points[i]) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def _integerize(points: Sequence[tuple[Fraction, ...]]) -> tuple[list[tuple[int, ...]], int]:
    den = lcm(*(x.denominator for p in points for x in p))
    return [tuple(int(x * den) for x in p) for p in points], den


# ---------------------------------------------------------------- polytopes

@dataclass(frozen=True)
class Polytope:
    """Convex hull of finitely many rational points, stored by its vertices."""

    dim: int
    vertices: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.vertices:
            raise InputError("a polytope needs at least one point")
        if not 1 <= self.dim <= MAX_DIM:
            raise InputError(f"ambient dimension must be in 1..{MAX_DIM}")
        if any(len(v) != self.dim for v in self.vertices):
            raise InputError("vertex of the wrong dimension")

    def translated(self, shift: Sequence) -> "Polytope":
        shift = vector(shift)
        return Polytope(self.dim, tuple(tuple(a + b for a, b in zip(v, shift)) for v in self.vertices))

    def scaled(self, c) -> "Polytope":
        c = Fraction(c)
        if c < 0:
            raise InputError("negative scaling is not a Minkowski operation")
        if c == 0:
            return Polytope(self.dim, ((Fraction(0),) * self.dim,))
        return Polytope(self.dim, tuple(tuple(c * x for x in v) for v in self.vertices))


def polytope(points: Iterable[Sequence]) -> Polytope:
    """Canonical polytope: vertices of the hull of ``points``, sorted."""
    pts = sorted({vector(p) for p in points})
    if not pts:
        raise InputError("a polytope needs at least one point")
    dims = {len(p) for p in pts}
    if len(dims) != 1:
        raise InputError("points of different dimensions")
    ints, _ = _integerize(pts)
    keep = _vertex_indices(ints)
    return Polytope(dims.pop(), tuple(sorted(pts[i] for i in keep)))


def volume(P: Polytope) -> Fraction:
    ints, den = _integerize(P.vertices)
    k, _ = _affine_chart(ints)
    if k < P.dim:
        return Fraction(0)
    scaled, _ = _placing(ints)
    return Fraction(scaled, factorial(P.dim) * den**P.dim)


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    if P.dim != Q.dim:
        raise InputError(f"cannot add polytopes of dimensions {P.dim} and {Q.dim}")
    return polytope(tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices)


def combination(bodies: Sequence[Polytope], coeffs: Sequence) -> Polytope:
    """``sum c_i P_i`` for nonnegative rationals ``c_i``."""
    result = None
    for P, c in zip(bodies, coeffs, strict=True):
        c = Fraction(c)
        if c == 0:
            continue
        term = P.scaled(c)
        result = term if result is None else minkowski_sum(result, term)
    if result is None:
        return Polytope(bodies[0].dim, ((Fraction(0),) * bodies[0].dim,))
    return result


@dataclass(frozen=True)
class BodyFamily:
    bodies: tuple[Polytope, ...]

    def __post_init__(self):
        if not self.bodies:
            raise InputError("a body family needs at least one polytope")
        if len({P.dim for P in self.bodies}) != 1:
            raise InputError("bodies of a family must share the ambient dimension")

    @property
    def dim(self) -> int:
        return self.bodies[0].dim


def mixed_volume(bodies: Sequence[Polytope], cache: dict | None = None) -> Fraction:
    """``V(K_1..K_n) = (1/n!) sum_S (-1)^(n-|S|) vol(sum_{i in S} K_i)``."""
    n = bodies[0].dim
    if len(bodies) != n:
        raise InputError(f"mixed volume in dimension {n} needs {n} bodies")
    cache = {} if cache is None else cache
    distinct = sorted(set(bodies), key=lambda P: P.vertices)
    index = {P: i for i, P in enumerate(distinct)}
    total = Fraction(0)
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            counts = [0] * len(distinct)
            for j in S:
                counts[index[bodies[j]]] += 1
            key = tuple(zip((P.vertices for P in distinct), counts))
            if key not in cache:
                cache[key] = volume(combination(distinct, counts))
            total += (-1) ** (n - size) * cache[key]
    return total / factorial(n)


def mixed_volumes(family: BodyFamily) -> VolumePolynomial:
    """``f(t) = vol(t_1 P_1 + ... + t_s P_s)`` with mixed volumes as mixed values."""
    n, s = family.dim, len(family.bodies)
    if len(list(combinations_with_replacement(range(s), n))) * (2**n - 1) > MAX_SUMS:
        raise InputError("mixed-volume computation exceeds the Minkowski-sum cap")
    cache: dict = {}

    @lru_cache(maxsize=None)
    def mixed(idx: tuple[int, ...]) -> Fraction:
        return mixed_volume([family.bodies[i] for i in idx], cache)

    return polynomial_from_mixed(s, n, mixed)


# ---------------------------------------------------------------- plane geometry

Point2 = tuple[Fraction, Fraction]


def polygon(P: Polytope) -> list[Point2]:
    """Vertices of a 2D polytope in counter-clockwise order."""
    if P.dim != 2:
        raise InputError("polygon operations need a planar body")
    pts = list(P.vertices)
    return [pts[i] for i in _chain_indices(pts)]


def polygon_area(poly: Sequence[Point2]) -> Fraction:
    n = len(poly)
    if n < 3:
        return Fraction(0)
    twice = sum(poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1] for i in range(n))
    return abs(Fraction(twice)) / 2


def perimeter_bound(poly: Sequence[Point2]) -> Fraction:
    """Rational upper bound on the perimeter (sum of L1 edge lengths)."""
    n = len(poly)
    if n < 2:
        return Fraction(0)
    return sum((abs(poly[(i + 1) % n][0] - poly[i][0]) + abs(poly[(i + 1) % n][1] - poly[i][1]) for i in range(n)),
               Fraction(0))


def clip(subject: Sequence[Point2], window: Sequence[Point2]) -> list[Point2]:
    """Sutherland-Hodgman intersection of two convex CCW polygons, exact."""
    output = list(subject)
    m = len(window)
    for k in range(m):
        a, b = window[k], window[(k + 1) % m]
        if not output:
            break
        inputs, output = output, []

        def side(p):
            return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])

        prev = inputs[-1]
        s_prev = side(prev)
        for cur in inputs:
            s_cur = side(cur)
            if s_cur >= 0:
                if s_prev < 0:
                    output.append(_intersect(prev, cur, s_prev, s_cur))
                output.append(cur)
            elif s_prev >= 0 and s_prev != 0:
                output.append(_intersect(prev, cur, s_prev, s_cur))
            prev, s_prev = cur, s_cur
    return output


def _intersect(p: Point2, q: Point2, sp: Fraction, sq: Fraction) -> Point2:
    t = sp / (sp - sq)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def overlap_area(A: Sequence[Point2], B: Sequence[Point2], shift: Point2) -> Fraction:
    moved = [(x + shift[0], y + shift[1]) for x, y in A]
    return polygon_area(clip(moved, B))


@dataclass(frozen=True)
class AsymmetryResult:
    F: Interval
    best_shift: Point2
    best_overlap: Fraction
    resolution: Fraction


def asymmetry_F_bodies(A: Polytope, B: Polytope, bits: int = DEFAULT_BITS,
                       coarse: int = 32, rounds: int = 2, factor: int = 4) -> AsymmetryResult:
    """Relative asymmetry ``1 - sup_x |(x + rA) & B| / |B|`` with ``r = sqrt(|B|/|A|)``.

    The best translation found gives a certified upper bound; the lower end
    subtracts the Lipschitz resolution bound of the final grid.
    """
    area_a, area_b = volume(A), volume(B)
    if A.dim != 2 or B.dim != 2:
        raise InputError("asymmetry index is implemented for planar bodies")
    if area_a <= 0 or area_b <= 0:
        raise DomainError("asymmetry index needs bodies of positive area")
    r = root(area_b / area_a, 2, bits)
    r_lo = r.lo
    poly_a = polygon(A)
    cx = sum(p[0] for p in poly_a) / len(poly_a)
    cy = sum(p[1] for p in poly_a) / len(poly_a)
    # centred at an interior point so that scaling by r_lo <= r shrinks the body
    scaled = [(r_lo * (x - cx), r_lo * (y - cy)) for x, y in poly_a]
    poly_b = polygon(B)
    lo_x = min(p[0] for p in poly_b) - max(p[0] for p in scaled)
    hi_x = max(p[0] for p in poly_b) - min(p[0] for p in scaled)
    lo_y = min(p[1] for p in poly_b) - max(p[1] for p in scaled)
    hi_y = max(p[1] for p in poly_b) - min(p[1] for p in scaled)
    step_x, step_y = (hi_x - lo_x) / coarse, (hi_y - lo_y) / coarse

    best = (Fraction(-1), (lo_x, lo_y))
    for i in range(coarse + 1):
        for j in range(coarse + 1):
            shift = (lo_x + i * step_x, lo_y + j * step_y)
            area = overlap_area(scaled, poly_b, shift)
            if area > best[0]:
                best = (area, shift)
    for _ in range(rounds):
        cx0, cy0 = best[1]
        step_x, step_y = step_x / factor, step_y / factor
        for i in range(-factor, factor + 1):
            for j in range(-factor, factor + 1):
                shift = (cx0 + i * step_x, cy0 + j * step_y)
                area = overlap_area(scaled, poly_b, shift)
                if area > best[0]:
                    best = (area, shift)
    lipschitz = perimeter_bound([(r.hi * (x - cx), r.hi * (y - cy)) for x, y in poly_a]) / 2
    resolution = lipschitz * (step_x + step_y) / 2 + (r.hi**2 - r_lo**2) * area_a
    f_hi = 1 - best[0] / area_b
    f_lo = max(Fraction(0), f_hi - resolution / area_b)
    shift = (best[1][0] - r_lo * cx, best[1][1] - r_lo * cy)
    return AsymmetryResult(Interval(f_lo, f_hi), shift, best[0], resolution / area_b)


@dataclass(frozen=True)
class FmpRecord:
    F: Interval
    sigma: Interval
    B: Interval
    B_is_zero: bool
    ratio: Interval | None
    areas: tuple[Fraction, Fraction, Fraction]


def fmp_bodies_check(A: Polytope, B: Polytope, bits: int = DEFAULT_BITS) -> FmpRecord:
    """Record ``F / sqrt(sigma * B)`` for two planar bodies (an experiment, not a bound)."""
    area_a, area_b = volume(A), volume(B)
    area_sum = volume(minkowski_sum(A, B))
    asym = asymmetry_F_bodies(A, B, bits)
    ra, rb = root(area_a, 2, bits), root(area_b, 2, bits)
    sigma_lo = root(area_a / area_b, 2, bits)
    sigma = sigma_lo if sigma_lo.lo >= 1 else root(area_b / area_a, 2, bits)
    mixed = (area_sum - area_a - area_b) / 2
    flat = mixed * mixed == area_a * area_b
    if flat:
        deficit = Interval.exact(0)
    else:
        deficit = (root(area_sum, 2, bits) / (ra + rb) - 1).rounded(bits)
        deficit = Interval(max(deficit.lo, Fraction(0)), deficit.hi)
    ratio = None
    if not flat:
        ratio = (asym.F / root(sigma * deficit, 2, bits)).rounded(bits)
    return FmpRecord(asym.F, sigma, deficit, flat, ratio, (area_a, area_b, area_sum))
