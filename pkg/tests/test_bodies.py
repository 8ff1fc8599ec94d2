import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.spatial import ConvexHull
from shapely.affinity import translate
from shapely.geometry import Polygon

from families import random_body, random_family
from lorentzkit import bodies
from lorentzkit.errors import DomainError, InputError
from lorentzkit.polycore import evaluate

SQUARE = bodies.polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
TRIANGLE = bodies.polytope([(0, 0), (1, 0), (0, 1)])
RECT = bodies.polytope([(0, 0), (2, 0), (0, Fraction(1, 2)), (2, Fraction(1, 2))])


def hull_volume(P) -> float:
    return ConvexHull(np.array(P.vertices, dtype=float)).volume


def test_polytope_canonicalises_vertices():
    P = bodies.polytope([(0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert P == SQUARE
    assert P.vertices == tuple(sorted(P.vertices))


def test_polytope_rejects_mixed_dimensions():
    with pytest.raises(InputError):
        bodies.polytope([(0, 0), (1, 0, 0)])


def test_volume_against_convex_hull():
    rng = random.Random(2)
    for n in (2, 3, 4):
        for _ in range(8):
            P = random_body(rng, n, n + 3)
            assert float(bodies.volume(P)) == pytest.approx(hull_volume(P), rel=1e-12)


def test_degenerate_body_has_zero_volume():
    assert bodies.volume(bodies.polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0)])) == 0


def test_planar_mixed_volume_fixtures():
    assert bodies.mixed_volume([SQUARE, SQUARE]) == 1
    assert bodies.mixed_volume([SQUARE, TRIANGLE]) == 1
    assert bodies.mixed_volume([SQUARE, RECT]) == Fraction(5, 4)


def test_mixed_volumes_polynomial_for_two_squares():
    f = bodies.mixed_volumes(bodies.BodyFamily((SQUARE, SQUARE)))
    assert dict(f.terms) == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_mixed_volumes_polynomial_evaluates_to_volume():
    rng = random.Random(8)
    for n, s in ((2, 3), (3, 2)):
        fam = random_family(rng, n, s)
        f = bodies.mixed_volumes(fam)
        for _ in range(4):
            t = tuple(Fraction(rng.randint(0, 3), rng.randint(1, 2)) for _ in range(s))
            assert evaluate(f, t) == bodies.volume(bodies.combination(fam.bodies, t))


def test_mixed_volume_of_identical_bodies_is_volume():
    rng = random.Random(4)
    P = random_body(rng, 3)
    assert bodies.mixed_volume([P, P, P]) == bodies.volume(P)


def test_minkowski_sum_area_identity():
    rng = random.Random(9)
    for _ in range(25):
        A, B = random_body(rng, 2), random_body(rng, 2)
        lhs = bodies.volume(bodies.minkowski_sum(A, B))
        assert lhs == bodies.volume(A) + 2 * bodies.mixed_volume([A, B]) + bodies.volume(B)


def test_overlap_area_against_shapely():
    rng = random.Random(6)
    for _ in range(20):
        A, B = bodies.polygon(random_body(rng, 2)), bodies.polygon(random_body(rng, 2))
        shift = (Fraction(rng.randint(-4, 4), 3), Fraction(rng.randint(-4, 4), 3))
        exact = bodies.overlap_area(A, B, shift)
        pa = translate(Polygon([tuple(map(float, p)) for p in A]), float(shift[0]), float(shift[1]))
        pb = Polygon([tuple(map(float, p)) for p in B])
        assert float(exact) == pytest.approx(pa.intersection(pb).area, abs=1e-12)


def test_asymmetry_square_vs_rectangle():
    res = bodies.asymmetry_F_bodies(SQUARE, RECT)
    assert res.F.contains(Fraction(1, 2))
    assert res.F.width <= Fraction(1, 64)


def test_asymmetry_of_homothetic_bodies_is_near_zero():
    res = bodies.asymmetry_F_bodies(TRIANGLE, TRIANGLE.scaled(3).translated((1, 1)))
    assert res.F.lo == 0 and res.F.hi < Fraction(1, 100)


def test_asymmetry_needs_area():
    flat = bodies.polytope([(0, 0), (1, 0)])
    with pytest.raises(DomainError):
        bodies.asymmetry_F_bodies(flat, SQUARE)


def test_fmp_record_square_rectangle():
    rec = bodies.fmp_bodies_check(SQUARE, RECT)
    assert not rec.B_is_zero
    assert rec.areas == (1, 1, 1 + 2 * Fraction(5, 4) + 1)
    assert Fraction(606, 10000) <= rec.B.lo <= rec.B.hi <= Fraction(607, 10000)
    assert rec.ratio is not None and rec.ratio.lo > 0


def test_fmp_record_homothetic_pair_is_flat():
    rec = bodies.fmp_bodies_check(SQUARE, SQUARE.scaled(2))
    assert rec.B_is_zero and rec.ratio is None


def test_minkowski_inequality_and_family_invariants():
    rng = random.Random(31)
    for _ in range(25):
        A, B = random_body(rng, 2), random_body(rng, 2)
        V = bodies.mixed_volume([A, B])
        assert V * V >= bodies.volume(A) * bodies.volume(B)
        assert bodies.mixed_volume([B, A]) == V
        assert bodies.mixed_volume([A.translated((3, Fraction(-1, 2))), B]) == V
        # monotone under inclusion: A is contained in A + B translated to contain A
        bigger = bodies.polytope(list(A.vertices) + list(B.vertices))
        assert bodies.mixed_volume([bigger, B]) >= V


def test_compiled_families_are_lorentzian():
    from lorentzkit import lorentz
    from lorentzkit.cones import SamplePlan, positive_orthant
    rng = random.Random(41)
    for n, s in ((2, 2), (2, 3), (3, 2)):
        f = bodies.mixed_volumes(random_family(rng, n, s))
        assert lorentz.check_cone_lorentzian(f, positive_orthant(s), SamplePlan(6)).verdict == lorentz.LORENTZIAN
