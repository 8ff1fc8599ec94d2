import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from families import random_family
from lorentzkit import bodies, deficits
from lorentzkit.cones import from_generators, positive_orthant
from lorentzkit.errors import DomainError, InputError
from lorentzkit.intervals import Interval
from lorentzkit.polycore import VolumePolynomial, _mul, evaluate, sequence_sk

SQ_RECT = VolumePolynomial(2, 2, {(2, 0): 1, (1, 1): Fraction(5, 2), (0, 2): 1})
XY = VolumePolynomial(2, 2, {(1, 1): 1})
SQUARED = VolumePolynomial(2, 2, {(2, 0): 1, (1, 1): 2, (0, 2): 1})
E1, E2 = (1, 0), (0, 1)
ORTHANT2 = positive_orthant(2)

weights = st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4)


@st.composite
def lorentzian_instances(draw):
    """Product of positive linear forms with a pair of big classes and a reference class."""
    s = draw(st.integers(2, 3))
    d = draw(st.integers(2, 3))
    poly = {(0,) * s: Fraction(1)}
    for _ in range(d):
        form = {tuple(int(i == j) for j in range(s)): draw(weights) for i in range(s)}
        poly = _mul(poly, form)
    f = VolumePolynomial(s, d, poly)
    vec = st.lists(weights, min_size=s, max_size=s).map(tuple)
    return f, draw(vec), draw(vec), draw(vec)


def test_square_rectangle_fixture():
    assert deficits.deficit_A_squared(SQ_RECT, E1, E2, (1, 1)) == Fraction(9, 25)
    assert deficits.deficit_K(SQ_RECT, E1, E2) == Interval.exact(Fraction(1, 4))
    B = deficits.deficit_B(SQ_RECT, E1, E2)
    assert Fraction(606, 10000) <= B.lo <= B.hi <= Fraction(607, 10000)
    assert deficits.sigma(SQ_RECT, E1, E2) == Interval.exact(1)
    assert sequence_sk(SQ_RECT, E1, E2) == (1, Fraction(5, 4), 1)


def test_proportional_inputs_have_zero_deficits():
    for beta in ((1, 2), (2, 4)):
        alpha = (1, 2)
        assert deficits.deficit_A_squared(SQ_RECT, alpha, beta, (1, 1)) == 0
        assert deficits.deficit_B(SQ_RECT, alpha, beta) == Interval.exact(0)
        assert deficits.deficit_K(SQ_RECT, alpha, beta) == Interval.exact(0)


def test_non_big_class_is_domain_error():
    with pytest.raises(DomainError):
        deficits.deficit_B(XY, E1, E2)


def test_bm_equality_exact():
    assert deficits.bm_equality(1, 1, 4, 2)
    assert deficits.bm_equality(Fraction(1), Fraction(8), Fraction(27), 3)
    assert not deficits.bm_equality(1, 2, 3 + Fraction(1, 10**30), 2)
    assert not deficits.bm_equality(1, 2, 6, 2)


def test_xy_radii_fixture():
    rad = deficits.radii(XY, (1, 1), (2, 1), ORTHANT2)
    assert (rad.r_in, rad.R_out) == (Fraction(1, 2), 1)
    assert deficits.radii(XY, (2, 1), (1, 1), ORTHANT2).R_out == 2
    same = deficits.radii(XY, (1, 1), (1, 1), ORTHANT2)
    assert (same.r_in, same.R_out) == (1, 1)


def test_radii_unbounded_and_degenerate():
    assert deficits.radii(XY, (1, 0), (1, 1), ORTHANT2).R_out is not None
    unbounded = deficits.radii(XY, (1, 1), (1, 0), ORTHANT2)
    assert unbounded.R_out is None and not unbounded.bounded


def test_radii_coordinate_search_beyond_cap():
    rad = deficits.radii(XY, (1, 1), (2, 1), ORTHANT2, cap=1)
    assert not rad.exhaustive
    assert (rad.r_in, rad.R_out) == (Fraction(1, 2), 1)


def test_proportionality_panel_fixtures():
    assert deficits.proportionality_panel(SQ_RECT, (1, 2), (3, 6), strict=True).conditions == (True,) * 6
    rect = deficits.proportionality_panel(SQ_RECT, E1, E2, strict=True)
    assert rect.conditions == (False,) * 6 and rect.agree
    degenerate = deficits.proportionality_panel(SQUARED, E1, E2, strict=False)
    assert degenerate.conditions[0] is False
    assert degenerate.conditions[3:] == (True, True, True)
    assert degenerate.agree is False and degenerate.flagged_non_strict


def test_panel_one_class_not_big():
    panel = deficits.proportionality_panel(XY, E1, (1, 1))
    assert panel.conditions is None and panel.strict_bm is True


def test_logconc_equalities_flat_sequence():
    assert deficits.logconc_equalities((1, 1, 1), Fraction(4)) == (True,) * 6
    assert deficits.logconc_equalities((1, Fraction(5, 4), 1), Fraction(9, 2)) == (False,) * 6


def test_battery_square_rectangle_all_pass():
    rep = deficits.deficit_report(SQ_RECT, E1, E2, (1, 1), ORTHANT2, strict=True)
    assert rep.failures() == [] and rep.indeterminate() == []
    names = {v.item.split("[")[0] for v in rep.battery}
    assert {"rKT", "BonnesenFenchel", "Bonnesen", "RefinedKT", "RadiusBound", "KTdominatesBM",
            "LogConcave", "MonotoneLower", "MonotoneUpper"} <= names


def test_rkt_constant_on_xy():
    battery = deficits.inequality_battery(XY, (1, 1), (2, 1), (1, 1), ORTHANT2)
    rkt = [v for v in battery if v.item.startswith("rKT")]
    assert rkt and all(v.holds for v in rkt)


def test_asymmetry_cone_xy_fixture():
    res = deficits.asymmetry_F_cone(XY, (1, 1), (2, Fraction(1, 2)), ORTHANT2, ORTHANT2)
    assert res.F.hi == Fraction(1, 2)
    assert res.F.lo >= Fraction(1, 2) - Fraction(1, 10**6)
    # brute grid oracle over feasible gamma: gamma <= (1,1) and gamma <= (2, 1/2) coordinatewise
    grid = max(Fraction(i, 64) * Fraction(j, 128) for i in range(65) for j in range(65))
    assert 1 - grid == Fraction(1, 2)


def test_asymmetry_cone_identical_classes():
    res = deficits.asymmetry_F_cone(SQ_RECT, (1, 1), (1, 1), ORTHANT2, ORTHANT2)
    assert res.F == Interval.exact(0)


def test_asymmetry_cone_empty_feasible_set():
    order = from_generators("order", [(1, 0), (1, 1)])
    res = deficits.asymmetry_F_cone(XY, (1, 1), (1, 2), ORTHANT2, order)
    assert res.F == Interval.exact(1) and not res.feasible


def test_fmp_chain_xy():
    chain = deficits.fmp_radii_chain(XY, (1, 1), (2, Fraction(1, 2)), (1, 1), ORTHANT2)
    assert chain.F.F.hi <= chain.bound_square
    assert all(v.holds is not False for v in chain.verdicts)


def test_fmp_chain_identical_classes_is_zero():
    chain = deficits.fmp_radii_chain(SQ_RECT, (1, 1), (1, 1), (1, 1), ORTHANT2)
    assert chain.F.F == Interval.exact(0) and chain.bound_square == 0


def test_empirical_constants_square_rectangle_ratio():
    rep = deficits.deficit_report(SQ_RECT, E1, E2, (1, 1), ORTHANT2, strict=True)
    ec = deficits.empirical_constants([("sq-rect", rep)])
    row = next(r for r in ec.rows if r.theorem == "KTcontrAF")
    assert row.exponent == 1 and row.min_ratio == Fraction(5, 12)
    assert ec.all_positive()


def test_empirical_constants_vacuous_on_proportional_pairs():
    rep = deficits.deficit_report(SQUARED, E1, E2, (1, 1), ORTHANT2, strict=False)
    ec = deficits.empirical_constants([("squares", rep)])
    assert all(r.min_ratio is None for r in ec.rows)
    with pytest.raises(InputError):
        deficits.empirical_constants([])


@given(lorentzian_instances(), weights, weights)
def test_scaling_invariance(inst, c1, c2):
    f, alpha, beta, omega = inst
    a2, b2 = tuple(c1 * x for x in alpha), tuple(c2 * x for x in beta)
    assert deficits.deficit_A_squared(f, a2, b2, omega) == deficits.deficit_A_squared(f, alpha, beta, omega)
    K, K2 = deficits.deficit_K(f, alpha, beta), deficits.deficit_K(f, a2, b2)
    assert K.lo <= K2.hi and K2.lo <= K.hi
    ac, bc = tuple(c1 * x for x in alpha), tuple(c1 * x for x in beta)
    B, Bc = deficits.deficit_B(f, alpha, beta), deficits.deficit_B(f, ac, bc)
    assert B.lo <= Bc.hi and Bc.lo <= B.hi


@given(lorentzian_instances())
def test_symmetry_and_log_concavity(inst):
    f, alpha, beta, omega = inst
    assert deficits.deficit_A_squared(f, alpha, beta, omega) == deficits.deficit_A_squared(f, beta, alpha, omega)
    B1, B2 = deficits.deficit_B(f, alpha, beta), deficits.deficit_B(f, beta, alpha)
    assert B1.lo <= B2.hi and B2.lo <= B1.hi
    s = sequence_sk(f, alpha, beta)
    assert all(s[k] ** 2 >= s[k - 1] * s[k + 1] for k in range(1, f.degree))


@given(lorentzian_instances())
def test_flatness_equivalence(inst):
    f, alpha, beta, _ = inst
    s = sequence_sk(f, alpha, beta)
    flags = deficits.logconc_equalities(s, evaluate(f, tuple(a + b for a, b in zip(alpha, beta))))
    assert len(set(flags[2:])) == 1
    assert flags[5] == (deficits.deficit_B(f, alpha, beta) == Interval.exact(0))


@given(lorentzian_instances())
def test_battery_never_fails(inst):
    f, alpha, beta, omega = inst
    battery = deficits.inequality_battery(f, alpha, beta, omega, positive_orthant(f.nvars))
    assert [v.item for v in battery if v.holds is not True] == []


def test_report_on_random_polytope_families():
    rng = random.Random(21)
    for n, s in ((2, 2), (2, 3), (3, 2)):
        fam = random_family(rng, n, s)
        f = bodies.mixed_volumes(fam)
        alpha = tuple(Fraction(rng.randint(1, 3)) for _ in range(s))
        beta = tuple(Fraction(rng.randint(1, 3)) for _ in range(s))
        rep = deficits.deficit_report(f, alpha, beta, (1,) * s, positive_orthant(s))
        assert rep.failures() == [] and rep.indeterminate() == []


def test_injectivity_on_strict_corpus_models():
    from lorentzkit import lorentz
    from lorentzkit.models import load_model
    from lorentzkit.polycore import restrict
    rng = random.Random(51)
    for name in ("sq-rect", "cube-simplex-box", "elementary-cubic", "U35"):
        m = load_model(name)
        assert lorentz.check_strict(m.f, m.nef, m.sampler(8)).verdict == lorentz.STRICT
        s, d = m.f.nvars, m.f.degree
        for _ in range(10):
            alpha = tuple(Fraction(rng.randint(1, 4)) for _ in range(s))
            beta = tuple(Fraction(rng.randint(1, 4)) for _ in range(s))
            if alpha == beta:
                continue
            for k in range(1, d):
                assert restrict(m.f, [alpha] * k) != restrict(m.f, [beta] * k)


def test_proportional_pair_battery_equalities():
    rep = deficits.deficit_report(SQ_RECT, (1, 2), (2, 4), (1, 1), ORTHANT2, strict=True)
    assert rep.A_squared == 0 and rep.B == Interval.exact(0) and rep.K == Interval.exact(0)
    assert all(rep.panel.conditions)
    for v in rep.battery:
        if v.item.startswith(("LogConcave", "EndpointChain", "KhovanskiiTeissier", "BrunnMinkowski")):
            assert v.slack == Interval.exact(0), v
