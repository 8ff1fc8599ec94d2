import random
from fractions import Fraction

import pytest
import sympy

from lorentzkit import numdim
from lorentzkit.cones import positive_orthant
from lorentzkit.errors import DomainError, InputError, PreconditionError
from lorentzkit.polycore import VolumePolynomial, _mul

X2Y = VolumePolynomial(2, 3, {(2, 1): 1})
XY_XZ = VolumePolynomial(3, 2, {(1, 1, 0): 1, (1, 0, 1): 1})
XYZ = VolumePolynomial(3, 3, {(1, 1, 1): 1})
E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def sympy_nd(f: VolumePolynomial, L, omega) -> int:
    """Degree in t of f(t L + omega): the t^k coefficient is C(d,k) L^k omega^(d-k)."""
    t = sympy.Symbol("t")
    point = [t * sympy.Rational(Fraction(l).numerator, Fraction(l).denominator) + sympy.Rational(Fraction(w).numerator, Fraction(w).denominator)
             for l, w in zip(L, omega)]
    value = sum(sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[p**e for p, e in zip(point, exp)])
                for exp, c in f.terms.items())
    poly = sympy.Poly(sympy.expand(value), t)
    return 0 if poly.is_zero else poly.degree()


def random_lorentzian(rng: random.Random, s: int, d: int) -> VolumePolynomial:
    """Product of d nonnegative linear forms with random supports."""
    poly = {(0,) * s: Fraction(1)}
    for _ in range(d):
        support = rng.sample(range(s), rng.randint(1, s))
        form = {tuple(int(i == j) for j in range(s)): Fraction(rng.randint(1, 3)) for i in support}
        poly = _mul(poly, form)
    return VolumePolynomial(s, d, poly)


def random_nef(rng: random.Random, s: int):
    while True:
        v = tuple(Fraction(rng.choice((0, 0, 1, 2))) for _ in range(s))
        if any(v):
            return v


def test_nd_examples():
    assert numdim.nd_omega(X2Y, (0, 1), (1, 1)) == 1
    assert numdim.nd_omega(X2Y, (1, 0), (1, 1)) == 2
    assert numdim.nd_omega(X2Y, (1, 1), (1, 1)) == 3
    assert numdim.nd_omega(X2Y, (0, 0), (1, 1)) == 0


def test_nd_against_symbolic_degree():
    rng = random.Random(11)
    for _ in range(40):
        s, d = rng.randint(2, 4), rng.randint(2, 4)
        f = random_lorentzian(rng, s, d)
        L, omega = random_nef(rng, s), (1,) * s
        assert numdim.nd_omega(f, L, omega) == sympy_nd(f, L, omega)


def test_nd_collection_examples():
    omega = (1, 1, 1)
    coll = numdim.make_collection([E2, E3], omega)
    assert numdim.nd_collection(XY_XZ, coll) == 1
    assert numdim.nd_collection(XY_XZ, numdim.make_collection([omega, omega], omega)) == 2


def test_hall_rado_examples():
    res = numdim.hall_rado(XY_XZ, numdim.make_collection([E2, E3], (1, 1, 1)))
    assert (res.product_nonzero, res.nd_criterion, res.violating_I) == (False, False, (0, 1))
    res = numdim.hall_rado(X2Y, numdim.make_collection([(1, 0), (0, 1)], (1, 1)))
    assert res.product_nonzero and res.nd_criterion and res.violating_I is None


def test_hall_rado_zero_class_violates_singleton():
    res = numdim.hall_rado(X2Y, numdim.make_collection([(1, 0), (0, 0)], (1, 1)))
    assert not res.product_nonzero and res.violating_I == (1,)


def test_hall_rado_too_many_classes():
    with pytest.raises(InputError):
        numdim.hall_rado(XY_XZ, numdim.make_collection([E1, E2, E3], (1, 1, 1)))


def test_maximal_index_set_examples():
    xy = VolumePolynomial(2, 2, {(1, 1): 1})
    assert numdim.maximal_index_set(xy, numdim.make_collection([(1, 0)], (1, 1))) == (0,)
    assert numdim.maximal_index_set(XYZ, numdim.make_collection([E1, E2], (1, 1, 1))) == (0, 1)
    with pytest.raises(DomainError):
        numdim.maximal_index_set(XYZ, numdim.make_collection([(1, 1, 1)], (1, 1, 1)))


def test_submodularity_examples():
    w = (1, 1)
    assert numdim.submodularity_check(X2Y, w, w, w, w)
    assert numdim.submodularity_check(X2Y, (1, 0), (0, 1), (0, 0), w)


def test_kernel_face_examples():
    cone = positive_orthant(3)
    rep = numdim.kernel_face(XY_XZ, numdim.make_collection([E2], (1, 1, 1)), cone)
    assert rep.zero_generators == (1, 2)
    assert rep.classification == numdim.CRITICAL
    supercritical = numdim.kernel_face(XY_XZ, numdim.make_collection([(1, 1, 1)], (1, 1, 1)), cone)
    assert supercritical.classification == numdim.SUPERCRITICAL and supercritical.zero_generators == ()
    vanishing = numdim.kernel_face(XYZ, numdim.make_collection([(0, 0, 0), (0, 0, 0)], (1, 1, 1)), cone)
    assert vanishing.classification == numdim.VANISHING and vanishing.zero_generators == (0, 1, 2)


def test_kernel_face_negative_functional_is_precondition_error():
    f = VolumePolynomial(2, 2, {(2, 0): 1, (0, 2): -1})
    with pytest.raises(PreconditionError):
        numdim.kernel_face(f, numdim.make_collection([(0, 1)], (2, 1)), positive_orthant(2))


def test_annihilation_examples():
    cone = positive_orthant(2)
    w = (1, 1)
    same = numdim.annihilation_triple(X2Y, (1, 0), (1, 0), w, cone)
    assert same.agree and same.cond1 and same.lam == 1
    other = numdim.annihilation_triple(X2Y, (1, 0), (0, 1), w, cone)
    assert other.agree and not other.cond1 and not other.cond2
    zero = numdim.annihilation_triple(X2Y, (1, 0), (0, 0), w, cone)
    assert zero.agree and zero.cond1


def test_annihilation_agrees_on_random_instances():
    rng = random.Random(3)
    for _ in range(60):
        s, d = rng.randint(2, 3), rng.randint(2, 3)
        f = random_lorentzian(rng, s, d)
        res = numdim.annihilation_triple(f, random_nef(rng, s), random_nef(rng, s), (1,) * s, positive_orthant(s))
        assert res.agree, res


def test_nd_scale_monotonicity_and_omega_independence():
    from lorentzkit.cones import SamplePlan
    rng = random.Random(17)
    for _ in range(40):
        s, d = rng.randint(2, 4), rng.randint(2, 4)
        f = random_lorentzian(rng, s, d)
        L, M = random_nef(rng, s), random_nef(rng, s)
        omegas = SamplePlan(4).points(positive_orthant(s))
        base = numdim.nd_omega(f, L, omegas[0])
        assert all(numdim.nd_omega(f, L, w) == base for w in omegas)
        assert numdim.nd_omega(f, tuple(Fraction(5, 3) * x for x in L), omegas[0]) == base
        assert numdim.nd_omega(f, tuple(a + b for a, b in zip(L, M)), omegas[0]) >= base


def test_kernel_face_functional_vanishes_and_index_set_is_maximal():
    from itertools import combinations
    from lorentzkit.polycore import mixed_value
    rng = random.Random(23)
    checked = 0
    for _ in range(80):
        s, d = rng.randint(2, 4), rng.randint(2, 4)
        f = random_lorentzian(rng, s, d)
        coll = numdim.make_collection([random_nef(rng, s) for _ in range(d - 1)], (1,) * s, positive_orthant(s))
        rep = numdim.kernel_face(f, coll, positive_orthant(s))
        for g in rep.face_generators(positive_orthant(s)):
            assert mixed_value(f, [g, *coll.classes]) == 0
        if rep.classification == numdim.CRITICAL:
            I0 = rep.maximal_index_set
            assert numdim.nd_omega(f, coll.partial_sum(I0), coll.reference_omega) == len(I0)
            rest = [i for i in range(coll.m) if i not in I0]
            for k in range(1, len(rest) + 1):
                for extra in combinations(rest, k):
                    J = tuple(sorted(I0 + extra))
                    assert numdim.nd_omega(f, coll.partial_sum(J), coll.reference_omega) != len(J)
            checked += 1
    assert checked > 5
