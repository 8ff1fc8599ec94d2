import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lorentzkit import lorentz
from lorentzkit.cones import SamplePlan, from_generators, positive_orthant
from lorentzkit.errors import PreconditionError
from lorentzkit.polycore import VolumePolynomial

entries = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def symmetric_matrices(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            a[i][j] = a[j][i] = draw(entries)
    return a


def numpy_inertia(a):
    vals = np.linalg.eigvalsh(np.array(a, dtype=float))
    tol = 1e-9 * max(1.0, float(np.max(np.abs(vals))) if len(vals) else 1.0)
    return (int((vals > tol).sum()), int((abs(vals) <= tol).sum()), int((vals < -tol).sum()))


@given(symmetric_matrices())
def test_inertia_matches_float_eigenvalues(a):
    assert lorentz.inertia(a).as_tuple() == numpy_inertia(a)


@given(symmetric_matrices(max_n=4), st.data())
def test_inertia_invariant_under_congruence(a, data):
    n = len(a)
    while True:
        p = [[data.draw(st.integers(-3, 3)) for _ in range(n)] for _ in range(n)]
        if abs(np.linalg.det(np.array(p, dtype=float))) > 0.5:
            break
    pt_a_p = [[sum(Fraction(p[k][i]) * a[k][l] * p[l][j] for k in range(n) for l in range(n)) for j in range(n)]
              for i in range(n)]
    assert lorentz.inertia(pt_a_p) == lorentz.inertia(a)


def test_inertia_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        lorentz.inertia([[1, 2], [3, 4]])


def e_k(n, k, coeff=1):
    from itertools import combinations
    terms = {}
    for idx in combinations(range(n), k):
        terms[tuple(int(i in idx) for i in range(n))] = coeff
    return VolumePolynomial(n, k, terms)


def test_elementary_symmetric_is_strict():
    f = e_k(4, 3)
    cert = lorentz.check_cone_lorentzian(f, positive_orthant(4))
    assert cert.verdict == lorentz.LORENTZIAN
    assert cert.support_m_convex
    assert lorentz.check_strict(f, positive_orthant(4), certificate=cert).verdict == lorentz.STRICT


def test_square_of_linear_form_is_lorentzian_not_strict():
    f = VolumePolynomial(2, 2, {(2, 0): 1, (1, 1): 2, (0, 2): 1})
    cert = lorentz.check_cone_lorentzian(f, positive_orthant(2))
    assert cert.verdict == lorentz.LORENTZIAN
    strict = lorentz.check_strict(f, positive_orthant(2), certificate=cert)
    assert strict.verdict == lorentz.INDETERMINATE
    assert all(w.inertia.as_tuple() == (1, 1, 0) for w in strict.witnesses)


def test_two_positive_eigenvalues_rejected():
    f = VolumePolynomial(2, 2, {(2, 0): 1, (0, 2): 1})
    cert = lorentz.check_cone_lorentzian(f, positive_orthant(2))
    assert cert.verdict == lorentz.NOT_LORENTZIAN
    with pytest.raises(PreconditionError):
        lorentz.check_strict(f, positive_orthant(2), certificate=cert)


def test_nonpositive_coefficient_rejected():
    f = VolumePolynomial(2, 2, {(2, 0): 1, (1, 1): -1, (0, 2): 1})
    assert lorentz.check_cone_lorentzian(f, positive_orthant(2)).verdict == lorentz.NOT_LORENTZIAN


def test_nonorthant_cone_uses_generator_coordinates():
    # x^2 - y^2 is Lorentzian on the cone spanned by (1, 0) and (2, 1)
    f = VolumePolynomial(2, 2, {(2, 0): 1, (0, 2): -1})
    cone = from_generators("nef", [(1, 0), (2, 1)])
    assert lorentz.check_cone_lorentzian(f, cone).verdict == lorentz.LORENTZIAN
    assert lorentz.check_strict(f, cone).verdict == lorentz.STRICT


def test_certificate_is_deterministic():
    f = e_k(3, 2)
    a = lorentz.check_cone_lorentzian(f, positive_orthant(3), SamplePlan(8, seed=3))
    b = lorentz.check_cone_lorentzian(f, positive_orthant(3), SamplePlan(8, seed=3))
    assert a == b


def test_random_products_of_linear_forms_are_lorentzian():
    # products of nonnegative linear forms are Lorentzian on the orthant
    rng = random.Random(5)
    from lorentzkit.polycore import _mul
    for _ in range(10):
        n, d = rng.randint(2, 3), rng.randint(2, 3)
        poly = {(0,) * n: Fraction(1)}
        for _ in range(d):
            form = {tuple(int(i == j) for j in range(n)): Fraction(rng.randint(1, 4)) for i in range(n)}
            poly = _mul(poly, form)
        f = VolumePolynomial(n, d, poly)
        assert lorentz.check_cone_lorentzian(f, positive_orthant(n), SamplePlan(6)).verdict == lorentz.LORENTZIAN


@given(st.permutations(range(3)))
def test_orthant_check_invariant_under_generator_permutation(perm):
    from lorentzkit.polycore import substitute_cone
    f = VolumePolynomial(3, 3, {(1, 1, 1): 1, (2, 1, 0): 2, (0, 1, 2): 1, (1, 0, 2): 3})
    gens = [(1, 0, 0), (1, 1, 0), (1, 1, 2)]
    base = lorentz.check_positive_orthant_lorentzian(substitute_cone(f, gens)).verdict
    permuted = [gens[i] for i in perm]
    assert lorentz.check_positive_orthant_lorentzian(substitute_cone(f, permuted)).verdict == base


def test_strict_certificate_implies_trivial_kernel():
    from lorentzkit.linalg import nullspace
    from lorentzkit.polycore import mixed_value
    f = e_k(4, 3)
    cone = positive_orthant(4)
    strict = lorentz.check_strict(f, cone, SamplePlan(6))
    assert strict.verdict == lorentz.STRICT
    basis = [tuple(int(i == j) for j in range(4)) for i in range(4)]
    for w in SamplePlan(6).points(cone):
        rows = [[mixed_value(f, [a, b, w]) for b in basis] for a in basis]
        assert nullspace(rows, 4) == []
