"""Deficits, radii, proportionality tests and the inequality battery.

All intersection numbers are exact.  Quantities involving d-th roots are
enclosed in :class:`~lorentzkit.intervals.Interval` objects, while every
equality question (zero deficit, flat sequence) is settled by rational
identities so that root precision never decides it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .cones import ConeModel, fmt
from .errors import DomainError, InputError, PreconditionError
from .intervals import DEFAULT_BITS, Interval, compare_le, rational_root, root
from .polycore import (
    Vector,
    VolumePolynomial,
    _derive_raw,
    add,
    dot,
    evaluate,
    mixed_value,
    restrict,
    scale,
    sequence_sk,
    vector,
)

MAX_TUPLES = 10**6

# ---------------------------------------------------------------------------
# small exact helpers


def _mixed(f: VolumePolynomial, *groups) -> Fraction:
    """Mixed value of a product written as ``(vector, multiplicity)`` groups."""
    dirs = []
    for v, k in groups:
        dirs.extend([v] * k)
    return mixed_value(f, dirs)


def delta(f: VolumePolynomial, x: Sequence, y: Sequence, dirs: Sequence[Sequence]) -> Fraction:
    """``(x.y.G)^2 - (x^2.G)(y^2.G)`` for the dimension-2 class ``G = dirs . Omega``."""
    dirs = list(dirs)
    xy = mixed_value(f, [x, y, *dirs])
    return xy * xy - mixed_value(f, [x, x, *dirs]) * mixed_value(f, [y, y, *dirs])


def proportional_vectors(u: Sequence, w: Sequence) -> bool:
    """``u = c w`` for some ``c > 0``."""
    u, w = vector(u), vector(w)
    ratio = None
    for a, b in zip(u, w, strict=True):
        if (a == 0) != (b == 0):
            return False
        if a:
            q = a / b
            if q <= 0 or (ratio is not None and q != ratio):
                return False
            ratio = q
    return ratio is not None


def proportional_polynomials(p: VolumePolynomial, q: VolumePolynomial) -> bool:
    """``p = c q`` for some ``c > 0`` (two zero polynomials count as proportional)."""
    if (p.nvars, p.degree) != (q.nvars, q.degree):
        return False
    if set(p.terms) != set(q.terms):
        return False
    if not p.terms:
        return True
    ratios = {p.terms[e] / q.terms[e] for e in p.terms}
    return len(ratios) == 1 and ratios.pop() > 0


def bm_equality(a: Fraction, b: Fraction, c: Fraction, d: int) -> bool:
    """Exact test of ``c^(1/d) == a^(1/d) + b^(1/d)`` for ``a, b, c >= 0``.

    With ``b > 0`` put ``y = (c/b)^(1/d)``.  Equality means ``y - 1`` is the
    real root of ``a/b``; every conjugate ``z`` of ``y`` then satisfies
    ``|z| = y`` and ``|z - 1| = y - 1``, which forces ``z = y``.  So ``y`` is
    rational and the test reduces to rational arithmetic.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a < 0 or b < 0 or c < 0:
        raise DomainError("volumes must be nonnegative")
    if b == 0:
        return c == a
    if a == 0:
        return c == b
    y = rational_root(c / b, d)
    return y is not None and y > 1 and (y - 1) ** d == a / b


def _volumes(f: VolumePolynomial, alpha: Vector, beta: Vector) -> tuple[Fraction, Fraction]:
    a, b = evaluate(f, alpha), evaluate(f, beta)
    if a <= 0 or b <= 0:
        which = "alpha" if a <= 0 else "beta"
        raise DomainError(f"{which} is not big: its volume is {a if a <= 0 else b}")
    return a, b


# ---------------------------------------------------------------------------
# deficits


def deficit_A_squared(f: VolumePolynomial, alpha, beta, omega) -> Fraction:
    alpha, beta, omega = vector(alpha), vector(beta), vector(omega)
    _volumes(f, alpha, beta)
    dirs = [omega] * (f.degree - 2)
    m = mixed_value(f, [alpha, beta, *dirs])
    if m <= 0:
        raise DomainError(f"alpha.beta.omega^(d-2) = {m} is not positive; the inputs are not big on this class")
    return delta(f, alpha, beta, dirs) / (m * m)


def deficit_A(f: VolumePolynomial, alpha, beta, omega, bits: int = DEFAULT_BITS) -> Interval:
    sq = deficit_A_squared(f, alpha, beta, omega)
    if sq < 0:
        raise DomainError(f"negative discriminant {sq}: the class violates the Hodge index inequality")
    return root(sq, 2, bits)


def deficit_B(f: VolumePolynomial, alpha, beta, bits: int = DEFAULT_BITS) -> Interval:
    alpha, beta = vector(alpha), vector(beta)
    a, b = _volumes(f, alpha, beta)
    c = evaluate(f, add(alpha, beta))
    d = f.degree
    if bm_equality(a, b, c, d):
        return Interval.exact(0)
    return (root(c, d, bits) / (root(a, d, bits) + root(b, d, bits)) - 1).rounded(bits)


def deficit_K_l(f: VolumePolynomial, alpha, beta, l: int, bits: int = DEFAULT_BITS) -> Interval:
    """``s_l / (|alpha|^(l/d) |beta|^((d-l)/d)) - 1``."""
    alpha, beta = vector(alpha), vector(beta)
    d = f.degree
    if not 1 <= l <= d - 1:
        raise InputError(f"l must lie in 1..{d - 1}")
    a, b = _volumes(f, alpha, beta)
    s_l = _mixed(f, (alpha, l), (beta, d - l))
    base = a**l * b ** (d - l)
    if s_l**d == base:
        return Interval.exact(0)
    return (s_l / root(base, d, bits) - 1).rounded(bits)


def deficit_K(f: VolumePolynomial, alpha, beta, bits: int = DEFAULT_BITS) -> Interval:
    return deficit_K_l(f, alpha, beta, f.degree - 1, bits)


def sigma(f: VolumePolynomial, alpha, beta, bits: int = DEFAULT_BITS) -> Interval:
    a, b = _volumes(f, vector(alpha), vector(beta))
    return root(max(a, b) / min(a, b), f.degree, bits)


# ---------------------------------------------------------------------------
# radii


@lru_cache(maxsize=128)
def _tuple_forms(f: VolumePolynomial, gens: tuple[Vector, ...], length: int):
    """Linear forms ``x -> mixed(x, g_i1, ..., g_ik)`` for nondecreasing index tuples."""
    scale_ = Fraction(1, factorial(f.degree))
    out = []

    def walk(start: int, prefix: tuple[int, ...], terms):
        if len(prefix) == length:
            form = [Fraction(0)] * f.nvars
            for exp, c in terms.items():
                form[exp.index(1)] = c * scale_
            out.append((prefix, tuple(form)))
            return
        for i in range(start, len(gens)):
            walk(i, prefix + (i,), _derive_raw(terms, gens[i]))

    walk(0, (), f.terms)
    return tuple(out)


@dataclass(frozen=True)
class RadiiReport:
    """Inradius and outradius of ``alpha`` relative to ``beta`` on a class.

    ``R_out`` is ``None`` when some tuple has zero denominator but positive
    numerator (the outradius is infinite).  Tuples are 0-based generator
    indices.
    """

    r_in: Fraction
    R_out: Fraction | None
    argmin_tuple: tuple[int, ...]
    argmax_tuple: tuple[int, ...]
    exhaustive: bool = True
    tuples_tested: int = 0

    @property
    def bounded(self) -> bool:
        return self.R_out is not None


def _ratio_scan(entries, x: Vector, y: Vector) -> RadiiReport:
    r = R = None
    arg_r = arg_R = ()
    infinite = None
    count = 0
    for idx, form in entries:
        count += 1
        num, den = dot(form, x), dot(form, y)
        if den < 0:
            raise PreconditionError(f"negative mixed value {den} of beta against tuple {idx}; beta is not nef here")
        if den == 0:
            if num > 0 and infinite is None:
                infinite = idx
            continue
        q = num / den
        if r is None or q < r:
            r, arg_r = q, idx
        if R is None or q > R:
            R, arg_R = q, idx
    if r is None:
        raise InputError("degenerate radii: every generator tuple has zero denominator")
    if infinite is not None:
        return RadiiReport(max(r, Fraction(0)), None, arg_r, infinite, True, count)
    return RadiiReport(max(r, Fraction(0)), R, arg_r, arg_R, True, count)


def _coordinate_search(f: VolumePolynomial, gens, x: Vector, y: Vector, length: int) -> RadiiReport:
    """Slot-wise search used past the enumeration cap (a local, not global, extremum)."""

    def ratio(idx):
        tup = [gens[i] for i in idx]
        num, den = mixed_value(f, [x, *tup]), mixed_value(f, [y, *tup])
        return num, den

    results = {}
    for sense in (1, -1):
        best_val, best_idx = None, None
        for start in range(len(gens)):
            idx = [start] * length
            improved = True
            while improved:
                improved = False
                for slot in range(length):
                    for g in range(len(gens)):
                        cand = sorted(idx[:slot] + [g] + idx[slot + 1:])
                        num, den = ratio(cand)
                        if den == 0:
                            if sense == -1 and num > 0:
                                return RadiiReport(Fraction(0), None, (), tuple(cand), False, 0)
                            continue
                        cur_num, cur_den = ratio(idx)
                        if cur_den == 0 or sense * (num / den) < sense * (cur_num / cur_den):
                            idx, improved = cand, True
            num, den = ratio(idx)
            if den and (best_val is None or sense * (num / den) < sense * best_val):
                best_val, best_idx = num / den, tuple(idx)
        if best_val is None:
            raise InputError("degenerate radii: every generator tuple has zero denominator")
        results[sense] = (best_val, best_idx)
    r, arg_r = results[1]
    R, arg_R = results[-1]
    return RadiiReport(max(r, Fraction(0)), R, arg_r, arg_R, False, 0)


def radii(f: VolumePolynomial, alpha, beta, nef: ConeModel, cap: int = MAX_TUPLES) -> RadiiReport:
    """Extremal ``t`` with ``(alpha - t beta)`` resp. ``(t beta - alpha)`` nonnegative on nef tuples.

    Ratios of two linear functions over a polyhedral cone reach their extremes
    on extreme rays, slot by slot, so enumerating generator multisets of size
    ``d - 1`` is exact.  Beyond ``cap`` multisets a slot-wise search is used
    and the report is marked non-exhaustive.
    """
    alpha, beta = vector(alpha), vector(beta)
    if nef.dim != f.nvars:
        raise InputError("cone and polynomial dimensions differ")
    length = f.degree - 1
    gens = nef.generators
    if comb(len(gens) + length - 1, length) > cap:
        return _coordinate_search(f, gens, alpha, beta, length)
    return _ratio_scan(_tuple_forms(f, gens, length), alpha, beta)


# ---------------------------------------------------------------------------
# log-concavity and proportionality


def logconc_equalities(s: Sequence[Fraction], volume_sum: Fraction) -> tuple[bool, ...]:
    """The six flatness conditions on ``s_0..s_d`` (the last one is BM equality)."""
    d = len(s) - 1
    c1 = all(s[k] ** 2 == s[k - 1] * s[k + 1] for k in range(1, d))
    c2 = all(s[k2] ** (k3 - k1) == s[k1] ** (k3 - k2) * s[k3] ** (k2 - k1)
             for k1, k2, k3 in combinations(range(d + 1), 3))
    c3 = all(s[k] ** d == s[d] ** k * s[0] ** (d - k) for k in range(d + 1))
    c4 = any(s[k] ** d == s[d] ** k * s[0] ** (d - k) for k in range(1, d))
    c5 = s[d - 1] ** d == s[d] ** (d - 1) * s[0]
    c6 = bm_equality(s[d], s[0], volume_sum, d)
    return (c1, c2, c3, c4, c5, c6)


@dataclass(frozen=True)
class ProportionalityPanel:
    """Equivalent conditions for proportionality evaluated exactly.

    ``conditions[0]`` is vector proportionality; entries 1-4 compare the
    contracted polynomials of ``alpha^k`` and ``beta^k`` (every k, some k,
    some k, k = d-1); entry 5 is equality in Brunn-Minkowski.  ``strict``
    records whether the class was certified strictly Lorentzian.
    """

    conditions: tuple[bool, ...] | None
    strict: bool | None
    both_big: bool
    strict_bm: bool | None = None
    note: str = ""

    @property
    def agree(self) -> bool | None:
        if self.conditions is None:
            return None
        return len(set(self.conditions)) == 1

    @property
    def flagged_non_strict(self) -> bool:
        return self.agree is False and not self.strict


def proportionality_panel(f: VolumePolynomial, alpha, beta, strict: bool | None = None) -> ProportionalityPanel:
    alpha, beta = vector(alpha), vector(beta)
    d = f.degree
    a, b = evaluate(f, alpha), evaluate(f, beta)
    c = evaluate(f, add(alpha, beta))
    if a <= 0 or b <= 0:
        if a > 0 and any(beta) or b > 0 and any(alpha):
            big_volume = a if a > 0 else b
            return ProportionalityPanel(None, strict, False, c > big_volume,
                                        "one class is not big: Brunn-Minkowski checked for strictness")
        return ProportionalityPanel(None, strict, False, None, "neither class is big")
    contracted = [(restrict(f, [alpha] * k), restrict(f, [beta] * k)) for k in range(1, d)]
    same = [proportional_polynomials(p, q) for p, q in contracted]
    conditions = (
        proportional_vectors(alpha, beta),
        all(same),
        any(same),
        any(same),
        same[-1],
        bm_equality(a, b, c, d),
    )
    panel = ProportionalityPanel(conditions, strict, True)
    if panel.agree is False:
        note = "conditions disagree"
        if not strict:
            note += "; the class is not strictly Lorentzian, so this is a legitimate degeneration"
        panel = ProportionalityPanel(conditions, strict, True, None, note)
    return panel


# ---------------------------------------------------------------------------
# battery


@dataclass(frozen=True)
class Verdict:
    """Outcome of one inequality ``lhs <= rhs``.

    ``holds`` is ``None`` when interval arithmetic could not separate the sides
    at the precision cap.  ``None`` for ``rhs`` means ``+infinity``.
    """

    item: str
    holds: bool | None
    lhs: Interval | None
    rhs: Interval | None
    exact: bool
    note: str = ""

    @property
    def slack(self) -> Interval | None:
        if self.lhs is None or self.rhs is None:
            return None
        return self.rhs - self.lhs


def _exact(item: str, lhs: Fraction, rhs: Fraction, note: str = "") -> Verdict:
    return Verdict(item, lhs <= rhs, Interval.exact(lhs), Interval.exact(rhs), True, note)


def _unbounded(item: str, lhs: Interval | None, note: str) -> Verdict:
    return Verdict(item, True, lhs, None, True, note)


def _by_intervals(item: str, compute: Callable[[int], tuple[Interval, Interval]], bits: int, note: str = "") -> Verdict:
    holds, lhs, rhs, used = compare_le(compute, bits)
    if holds is None:
        note = (note + "; " if note else "") + f"indeterminate at {used} bits"
    return Verdict(item, holds, lhs, rhs, False, note)


def _le_times_sqrt(item: str, lhs: Fraction, coef: Fraction, radicand: Fraction, bits: int, note: str = "") -> Verdict:
    """Decide ``lhs <= coef * sqrt(radicand)`` exactly by squaring (``coef >= 0``)."""
    holds = lhs <= 0 or lhs * lhs <= coef * coef * radicand
    return Verdict(item, holds, Interval.exact(lhs), coef * root(radicand, 2, bits), True, note)


def _c_one_minus_sqrt_le(item: str, c: Fraction, radicand: Fraction, rho: Fraction, bits: int) -> Verdict:
    """Decide ``c (1 - sqrt(radicand)) <= rho`` exactly (``c > 0``)."""
    gap = 1 - rho / c
    holds = gap <= 0 or gap * gap <= radicand
    return Verdict(item, holds, c * (1 - root(radicand, 2, bits)), Interval.exact(rho), True)


def _rkt_items(f, alpha, beta, omega, gens) -> list[Verdict]:
    d = f.degree
    out = []
    for name_a, A, other in (("alpha", alpha, beta), ("beta", beta, alpha)):
        cyclic = [other, omega, *gens]
        choices = {
            "omega^d": [omega] * d,
            "other^d": [other] * d,
            "mixed": [cyclic[i % len(cyclic)] for i in range(d)],
        }
        vol_a = evaluate(f, A)
        for bname, Bs in choices.items():
            whole = mixed_value(f, Bs)
            for k in range(1, d):
                lhs = whole * vol_a
                rhs = 2 ** (k * (d - k)) * mixed_value(f, [A] * k + Bs[k:]) * mixed_value(f, [A] * (d - k) + Bs[:k])
                out.append(_exact(f"rKT[A={name_a},B={bname},k={k}]", lhs, rhs))
    return out


def _bonnesen_fenchel(fG, alpha, beta, gammas) -> list[Verdict]:
    out = []

    def m(x, y):
        return mixed_value(fG, [x, y])

    for gname, g in gammas:
        lhs = (m(alpha, beta) * m(g, g) - m(alpha, g) * m(beta, g)) ** 2
        d_ag = m(alpha, g) ** 2 - m(alpha, alpha) * m(g, g)
        d_bg = m(beta, g) ** 2 - m(beta, beta) * m(g, g)
        out.append(_exact(f"BonnesenFenchel[gamma={gname}]", lhs, d_ag * d_bg))
    return out


def _refined_kt(item: str, fG, alpha, beta, rad: RadiiReport, bits: int) -> Verdict:
    """``(R - r) / 2 <= sqrt(Delta(alpha, beta; G)) / (beta^2 . G)``."""
    if not rad.bounded:
        return Verdict(item, None, None, None, True, "outradius is infinite on this class")
    b2 = mixed_value(fG, [beta, beta])
    disc = delta(fG, alpha, beta, [])
    half = (rad.R_out - rad.r_in) / 2
    v = _le_times_sqrt(item, half, 1 / b2, disc, bits)
    return v


def _schneider_items(f, alpha, beta, omega, nef, bits) -> list[Verdict]:
    d = f.degree
    out = []
    pairs = [("omega", omega, "omega/2", scale(Fraction(1, 2), omega))]
    for i, g in enumerate(nef.generators[:2]):
        pairs.append((f"omega+g{i}", add(omega, g), "omega", omega))
    for g3name, g3, gbar_name, gbar in pairs:
        item = f"Schneider[gamma3={g3name},gamma3bar={gbar_name}]"
        tail = [omega] * (d - 3)
        gam, gam_bar = [g3, *tail], [gbar, *tail]
        m_bar = mixed_value(f, [alpha, beta, *gam_bar])
        m = mixed_value(f, [alpha, beta, *gam])
        lhs = delta(f, alpha, beta, gam_bar) / (m_bar * m_bar)
        rad_a = radii(f, alpha, g3, nef)
        rad_b = radii(f, beta, g3, nef)
        rad_g = radii(f, g3, gbar, nef)
        ratios = [r.R_out / r.r_in for r in (rad_a, rad_b) if r.bounded and r.r_in > 0]
        if not ratios or not rad_g.bounded:
            out.append(_unbounded(item, Interval.exact(lhs), "a radius ratio is infinite"))
            continue
        coef = 4 * min(ratios) * rad_g.R_out / m
        out.append(_le_times_sqrt(item, lhs, coef, delta(f, alpha, beta, gam), bits))
    return out


def _af_induction_items(f, alpha, beta, omega, rad: RadiiReport, bits) -> list[Verdict]:
    d = f.degree
    out = []
    for l in range(1, d - 1):
        item = f"AFdeficitInduction[l={l}]"
        x = delta(f, alpha, beta, [alpha] * (l - 1) + [beta] * (d - l - 1))
        x /= _mixed(f, (alpha, l - 1), (beta, d - l + 1)) ** 2
        y = delta(f, alpha, beta, [alpha] * l + [beta] * (d - l - 2))
        y /= _mixed(f, (alpha, l), (beta, d - l)) ** 2
        rhs = 2 * root(x, 2, bits) + 2 * root(y, 2, bits)
        if not rad.bounded:
            out.append(Verdict(item, True, Interval.exact(0), rhs, True, "outradius infinite: left side is 0"))
            continue
        m1 = mixed_value(f, [alpha] * (l - 1) + [beta] * (d - l) + [omega])
        lhs = delta(f, alpha, beta, [alpha] * (l - 1) + [beta] * (d - l - 2) + [omega]) / (rad.R_out * m1 * m1)
        # lhs <= 2 sqrt(x) + 2 sqrt(y)  <=>  lhs^2/4 - x - y <= 2 sqrt(xy)
        t = lhs * lhs / 4 - x - y
        holds = lhs <= 0 or t <= 0 or t * t <= 4 * x * y
        out.append(Verdict(item, holds, Interval.exact(lhs), rhs, True))
    return out


def _compradii_items(f, alpha, beta, omega, nef, rad: RadiiReport, bits) -> list[Verdict]:
    d = f.degree
    fH = restrict(f, [omega])
    radH = radii(fH, alpha, beta, nef)
    c = Fraction(1, 2 ** (d - 1))
    out = []
    if radH.r_in > 0:
        rho = rad.r_in / radH.r_in
        out.append(_exact("CompareRadii[r ratio <= 1]", rho, Fraction(1)))
        D = delta(f, alpha, beta, [alpha] * (d - 2)) / _mixed(f, (alpha, d - 1), (beta, 1)) ** 2
        out.append(_c_one_minus_sqrt_le("CompareRadii[r ratio lower]", c, D, rho, bits))
    if rad.bounded and radH.bounded:
        rho_out = radH.R_out / rad.R_out
        out.append(_exact("CompareRadii[R ratio >= 1]", rho_out, Fraction(1)))
        D = delta(f, alpha, beta, [beta] * (d - 2)) / _mixed(f, (beta, d - 1), (alpha, 1)) ** 2
        out.append(_c_one_minus_sqrt_le("CompareRadii[R ratio upper]", c, D, rho_out, bits))
    return out


def _power_of_A(a_squared: Fraction, d: int, bits: int) -> Interval:
    """``A^(2^(3-d))`` from the exact square."""
    if d == 2:
        return Interval.exact(a_squared)
    return root(a_squared, 2 ** (d - 2), bits)


def delta_omega(f, x, omega, nef: ConeModel) -> Fraction | None:
    """``R(x, omega) / r(x, omega)^2 * inf{t : t omega - x nef}``; ``None`` if infinite."""
    rad = radii(f, x, omega, nef)
    if not rad.bounded or rad.r_in == 0:
        return None
    return rad.R_out / rad.r_in**2 * nef.scaling_to_contain(x, omega)


def _af_dominates_items(f, alpha, beta, omega, nef, rad_ab, rad_ba, a_squared, B, K_ls, bits) -> list[Verdict]:
    d = f.degree
    da, db = delta_omega(f, alpha, omega, nef), delta_omega(f, beta, omega, nef)
    items = [("AFdominatesBM", B, d**3)] + [(f"AFdominatesKT[l={l}]", K, d**2) for l, K in enumerate(K_ls, 1)]
    if da is None or db is None or not rad_ab.bounded or not rad_ba.bounded:
        return [_unbounded(name, X, "constant is infinite") for name, X, _ in items]
    M = max(rad_ab.R_out, rad_ba.R_out)
    dm = max(da, db)
    out = []
    for name, X, power in items:
        if X.is_exact and X.lo == 0:
            out.append(Verdict(name, True, X, Interval.exact(0) if a_squared == 0 else None, True, "left side is exactly 0"))
            continue

        def compute(b, X=X, power=power):
            C = root(M ** (d + 4), 2, b) * dm * dm
            return X, (4 * power * C * _power_of_A(a_squared, d, b)).rounded(b)

        out.append(_by_intervals(name, compute, bits))
    return out


def _logconc_items(s: Sequence[Fraction], volume_sum: Fraction, bits: int) -> list[Verdict]:
    d = len(s) - 1
    out = []
    for k in range(1, d):
        out.append(_exact(f"LogConcave[k={k}]", s[k - 1] * s[k + 1], s[k] ** 2))
    for k1, k2, k3 in combinations(range(d + 1), 3):
        out.append(_exact(f"LogConcaveTriple[{k1},{k2},{k3}]",
                          s[k1] ** (k3 - k2) * s[k3] ** (k2 - k1), s[k2] ** (k3 - k1)))
    for k in range(d + 1):
        out.append(_exact(f"EndpointChain[k={k}]", s[d] ** k * s[0] ** (d - k), s[k] ** d))
    out.append(_exact("KhovanskiiTeissier", s[d] ** (d - 1) * s[0], s[d - 1] ** d))
    a, b = s[d], s[0]
    if bm_equality(a, b, volume_sum, d):
        out.append(Verdict("BrunnMinkowski", True, Interval.exact(0), Interval.exact(0), True, "equality case"))
    else:
        out.append(_by_intervals("BrunnMinkowski", lambda bb: ((root(a, d, bb) + root(b, d, bb)).rounded(bb),
                                                               root(volume_sum, d, bb)), bits))
    return out


def _kt_dominates_bm(f, alpha, beta, bits) -> Verdict:
    d = f.degree
    a, b = evaluate(f, alpha), evaluate(f, beta)
    if a < b:
        alpha, beta, a, b = beta, alpha, b, a
    item = "KTdominatesBM"
    s_top = _mixed(f, (alpha, d - 1), (beta, 1))
    B = deficit_B(f, alpha, beta, bits)
    if B.is_exact and B.lo == 0:
        # rhs = rho K >= 0 iff K >= 0
        return Verdict(item, s_top**d >= a ** (d - 1) * b, B, None, True, "BM equality: decided by the sign of K")

    def compute(bb):
        rho = root(b / a, d, bb)
        return deficit_B(f, alpha, beta, bb), (rho * deficit_K(f, alpha, beta, bb)).rounded(bb)

    return _by_intervals(item, compute, bits)


def _monotone_items(s, rad: RadiiReport) -> list[Verdict]:
    d = len(s) - 1
    out = []
    for k in range(d):
        out.append(_exact(f"MonotoneLower[k={k}]", rad.r_in * s[k], s[k + 1]))
        if rad.bounded:
            out.append(_exact(f"MonotoneUpper[k={k}]", s[k + 1], rad.R_out * s[k]))
    return out


def inequality_battery(f: VolumePolynomial, alpha, beta, omega, nef: ConeModel,
                       bits: int = DEFAULT_BITS) -> list[Verdict]:
    """Every explicit-constant inequality for one instance, in a fixed order."""
    alpha, beta, omega = vector(alpha), vector(beta), vector(omega)
    _volumes(f, alpha, beta)
    if not nef.in_interior(omega):
        raise PreconditionError(f"omega {fmt(omega)} is not interior to the nef model")
    d = f.degree
    s = sequence_sk(f, alpha, beta)
    volume_sum = evaluate(f, add(alpha, beta))
    gens = list(nef.generators)
    fG = restrict(f, [omega] * (d - 2))
    rad_ab = radii(f, alpha, beta, nef)
    rad_ba = radii(f, beta, alpha, nef)
    out: list[Verdict] = []
    out += _rkt_items(f, alpha, beta, omega, gens[:2])
    gammas = [("omega", omega), ("alpha+beta", add(alpha, beta))] + [(f"g{i}", g) for i, g in enumerate(gens[:2])]
    out += _bonnesen_fenchel(fG, alpha, beta, gammas)
    if d == 2:
        out.append(_refined_kt("Bonnesen", f, alpha, beta, rad_ab, bits))
    out.append(_refined_kt("RefinedKT", fG, alpha, beta, radii(fG, alpha, beta, nef), bits))
    if d >= 3:
        out += _af_induction_items(f, alpha, beta, omega, rad_ab, bits)
    if rad_ba.bounded:
        out.append(_exact("RadiusBound[R(beta,alpha)]", rad_ba.R_out, 2 ** (d - 1) * s[d - 1] / s[d]))
    else:
        out.append(Verdict("RadiusBound[R(beta,alpha)]", False, None, Interval.exact(2 ** (d - 1) * s[d - 1] / s[d]),
                           True, "outradius is infinite"))
    out.append(_exact("RadiusBound[r(alpha,beta)]", Fraction(1, 2 ** (d - 1)) * s[d] / s[d - 1], rad_ab.r_in))
    if d >= 3:
        out += _compradii_items(f, alpha, beta, omega, nef, rad_ab, bits)
    out.append(_kt_dominates_bm(f, alpha, beta, bits))
    out += _logconc_items(s, volume_sum, bits)
    if d >= 3:
        out += _schneider_items(f, alpha, beta, omega, nef, bits)
    a_squared = deficit_A_squared(f, alpha, beta, omega)
    B = deficit_B(f, alpha, beta, bits)
    K_ls = [deficit_K_l(f, alpha, beta, l, bits) for l in range(1, d)]
    out += _af_dominates_items(f, alpha, beta, omega, nef, rad_ab, rad_ba, a_squared, B, K_ls, bits)
    out += _monotone_items(s, rad_ab)
    return out


# ---------------------------------------------------------------------------
# asymmetry index over cones


@dataclass(frozen=True)
class HalfspaceOrder:
    """Partial order ``x <= y`` iff ``n . (y - x) >= 0`` for every normal."""

    name: str
    facet_normals: tuple[Vector, ...]
    equations: tuple[Vector, ...] = ()


def tuple_tested_order(fG: VolumePolynomial, nef: ConeModel) -> HalfspaceOrder:
    """Order dual to the nef generators on a dimension-2 class."""
    s = fG.nvars
    normals = []
    for g in nef.generators:
        n = tuple(mixed_value(fG, [tuple(Fraction(int(i == j)) for j in range(s)), g]) for i in range(s))
        if any(n) and n not in normals:
            normals.append(n)
    return HalfspaceOrder("tuple-tested", tuple(normals))


@dataclass(frozen=True)
class ConeAsymmetry:
    """``F`` enclosure: ``F.hi`` is certified by the exact class ``gamma``.

    ``F.lo`` comes from a floating-point linear bound on the concave objective
    (``gap`` is that bound on ``f^(1/d)``); it is an estimate, not a proof.
    """

    F: Interval
    gamma: Vector | None
    gamma_volume: Fraction
    gap: float
    feasible: bool
    note: str = ""


def _constraints(C, order, alpha_scaled: Vector, beta: Vector):
    """Rows ``(n, c)`` for ``n . x >= c`` and equalities ``(e, c)`` for ``e . x == c``."""
    ineq = [(n, Fraction(0)) for n in C.facet_normals]
    eq = [(e, Fraction(0)) for e in C.equations]
    for top in (alpha_scaled, beta):
        for n in order.facet_normals:
            ineq.append((tuple(-x for x in n), -dot(n, top)))
        for e in order.equations:
            eq.append((e, dot(e, top)))
    return ineq, eq


def _feasible(x: Vector, ineq, eq) -> bool:
    return all(dot(n, x) >= c for n, c in ineq) and all(dot(e, x) == c for e, c in eq)


def _float_poly(f: VolumePolynomial):
    exps = np.array(list(f.terms), dtype=float)
    coeffs = np.array([float(c) for c in f.terms.values()])

    def value(x):
        return float(coeffs @ np.prod(np.power(x, exps), axis=1))

    def grad(x):
        g = np.zeros(len(x))
        for i in range(len(x)):
            e = exps.copy()
            mask = e[:, i] > 0
            e[:, i] = np.maximum(e[:, i] - 1, 0)
            g[i] = float((coeffs * exps[:, i] * mask) @ np.prod(np.power(x, e), axis=1))
        return g

    return value, grad


def asymmetry_F_cone(f: VolumePolynomial, alpha, beta, C: ConeModel, order, bits: int = DEFAULT_BITS) -> ConeAsymmetry:
    """``1 - sup{ f(gamma) / f(beta) : gamma in C, gamma <= r alpha, gamma <= beta }``.

    ``r = (f(beta) / f(alpha))^(1/d)``; ``order`` is any object with
    ``facet_normals`` and ``equations`` (a :class:`ConeModel` or a
    :class:`HalfspaceOrder`).  The exact feasible set uses the lower end of
    ``r``, so the returned upper end of ``F`` is certified.
    """
    alpha, beta = vector(alpha), vector(beta)
    a, b = _volumes(f, alpha, beta)
    d = f.degree
    if proportional_vectors(alpha, beta):
        return ConeAsymmetry(Interval.exact(0), beta, b, 0.0, True, "proportional classes")
    r = root(b / a, d, bits)
    ineq, eq = _constraints(C, order, scale(r.lo, alpha), beta)

    # exact feasible start on the ray through beta
    mu = Fraction(1)
    for n in order.facet_normals:
        nb = dot(n, beta)
        if nb > 0:
            mu = min(mu, dot(n, scale(r.lo, alpha)) / nb)
    start = scale(max(mu, Fraction(0)), beta)
    if mu <= 0 or not _feasible(start, ineq, eq):
        zero = tuple(Fraction(0) for _ in beta)
        note = "empty feasible set: F = 1 by convention" if not _feasible(zero, ineq, eq) else "no big class below both"
        return ConeAsymmetry(Interval.exact(1), None, Fraction(0), 0.0, False, note)

    value, grad = _float_poly(f)
    A_in = np.array([[float(x) for x in n] for n, _ in ineq]) if ineq else np.zeros((0, len(beta)))
    c_in = np.array([float(c) for _, c in ineq])
    cons = [{"type": "ineq", "fun": lambda x: A_in @ x - c_in, "jac": lambda x: A_in}]
    if eq:
        A_eq = np.array([[float(x) for x in e] for e, _ in eq])
        c_eq = np.array([float(c) for _, c in eq])
        cons.append({"type": "eq", "fun": lambda x: A_eq @ x - c_eq, "jac": lambda x: A_eq})

    def objective(x):
        v = value(x)
        return -(v ** (1 / d)) if v > 0 else -v

    def jac(x):
        v = value(x)
        if v <= 0:
            return -grad(x)
        return -(v ** (1 / d - 1)) / d * grad(x)

    x0 = np.array([float(t) for t in start])
    res = minimize(objective, x0, jac=jac, constraints=cons, method="SLSQP",
                   options={"ftol": 2.0**-40, "maxiter": 500})
    candidate = tuple(Fraction(float(t)).limit_denominator(1 << 40) for t in res.x)
    # largest exactly feasible step from the start towards the candidate
    direction = tuple(p - q for p, q in zip(candidate, start))
    t_max = Fraction(1)
    if any(dot(e, direction) != 0 for e, _ in eq):
        t_max = Fraction(0)
    for n, c in ineq:
        rate = dot(n, direction)
        if rate < 0:
            t_max = min(t_max, (dot(n, start) - c) / -rate)
    t_max = max(t_max, Fraction(0))
    moved = add(start, scale(t_max, direction))
    best, best_vol = start, evaluate(f, start)
    if evaluate(f, moved) > best_vol:
        best, best_vol = moved, evaluate(f, moved)
    F_hi = 1 - best_vol / b

    # concavity of f^(1/d): sup <= g(best) + max over the (wider) feasible set of grad . (x - best)
    gap = math.inf
    xb = np.array([float(t) for t in best])
    g_best = value(xb) ** (1 / d)
    ineq_hi, eq_hi = _constraints(C, order, scale(r.hi, alpha), beta)
    grad_g = g_best ** (1 - d) / d * grad(xb) if g_best > 0 else grad(xb)
    lp = linprog(-grad_g,
                 A_ub=-np.array([[float(x) for x in n] for n, _ in ineq_hi]),
                 b_ub=-np.array([float(c) for _, c in ineq_hi]),
                 A_eq=np.array([[float(x) for x in e] for e, _ in eq_hi]) if eq_hi else None,
                 b_eq=np.array([float(c) for _, c in eq_hi]) if eq_hi else None,
                 bounds=[(None, None)] * len(beta), method="highs")
    if lp.status == 0:
        gap = max(0.0, float(-lp.fun - grad_g @ xb))
    if math.isfinite(gap):
        upper = (g_best + gap) * (1 + 1e-9) + 1e-12
        F_lo = max(Fraction(0), 1 - Fraction(upper**d) / b)
        F_lo = min(F_lo, F_hi)
    else:
        F_lo = Fraction(0)
    return ConeAsymmetry(Interval(F_lo, F_hi), best, best_vol, gap, True)


# ---------------------------------------------------------------------------
# FMP chain on the dimension-2 class omega^(d-2) . Omega


@dataclass(frozen=True)
class FmpChain:
    F: ConeAsymmetry
    radii: RadiiReport
    bound_square: Fraction
    bound_linear: Interval
    verdicts: tuple[Verdict, ...]
    kt_radii_ratio: Interval | None


def fmp_radii_chain(f: VolumePolynomial, alpha, beta, omega, nef: ConeModel,
                    bits: int = DEFAULT_BITS) -> FmpChain:
    """Check ``F_G <= 1 - r_G^2 <= 2 (1 - r_G)`` after normalizing both volumes to 1."""
    alpha, beta, omega = vector(alpha), vector(beta), vector(omega)
    d = f.degree
    fG = restrict(f, [omega] * (d - 2))
    aG, bG = _volumes(fG, alpha, beta)
    rad = radii(fG, alpha, beta, nef)
    r_norm_sq = rad.r_in**2 * bG / aG
    bound_square = 1 - r_norm_sq
    r_norm = root(r_norm_sq, 2, bits)
    bound_linear = 2 * (1 - r_norm)
    asym = asymmetry_F_cone(fG, alpha, beta, nef, tuple_tested_order(fG, nef), bits)
    if asym.F.hi <= bound_square:
        first = Verdict("FmpChain[F <= 1 - r^2]", True, asym.F, Interval.exact(bound_square), False)
    elif asym.F.lo > bound_square:
        first = Verdict("FmpChain[F <= 1 - r^2]", False, asym.F, Interval.exact(bound_square), False)
    else:
        first = Verdict("FmpChain[F <= 1 - r^2]", None, asym.F, Interval.exact(bound_square), False,
                        "estimate straddles the bound")
    # 1 - r^2 <= 2 (1 - r)  <=>  (1 - r)^2 >= 0 with r = r_norm
    second = Verdict("FmpChain[1 - r^2 <= 2(1 - r)]", True, Interval.exact(bound_square),
                     bound_linear, True, "algebraic identity (1 - r)^2 >= 0")
    ratio = None
    if rad.bounded and rad.R_out > 0 and rad.r_in < rad.R_out:
        K = deficit_K(f, alpha, beta, bits)
        power = K if d == 2 else root(Interval(max(K.lo, Fraction(0)), max(K.hi, Fraction(0))), 2 ** (d - 2), bits)
        ratio = (power / (1 - rad.r_in / rad.R_out)).rounded(bits)
    return FmpChain(asym, rad, bound_square, bound_linear, (first, second), ratio)


# ---------------------------------------------------------------------------
# full report and empirical constants


@dataclass(frozen=True)
class DeficitReport:
    d: int
    s_sequence: tuple[Fraction, ...]
    volume_sum: Fraction
    A_squared: Fraction
    A: Interval
    B: Interval
    K: Interval
    K_reverse: Interval
    K_l: tuple[Interval, ...]
    sigma: Interval
    radii: RadiiReport
    delta_alpha_omega: Fraction | None
    delta_beta_omega: Fraction | None
    panel: ProportionalityPanel
    battery: tuple[Verdict, ...]
    fmp: FmpChain | None = None
    proportional: bool = False

    @property
    def r_in(self) -> Fraction:
        return self.radii.r_in

    @property
    def R_out(self) -> Fraction | None:
        return self.radii.R_out

    def failures(self) -> list[Verdict]:
        return [v for v in self.battery if v.holds is False]

    def indeterminate(self) -> list[Verdict]:
        return [v for v in self.battery if v.holds is None]


def deficit_report(f: VolumePolynomial, alpha, beta, omega, nef: ConeModel, bits: int = DEFAULT_BITS,
                   strict: bool | None = None, with_fmp: bool = True) -> DeficitReport:
    alpha, beta, omega = vector(alpha), vector(beta), vector(omega)
    d = f.degree
    s = sequence_sk(f, alpha, beta)
    a_sq = deficit_A_squared(f, alpha, beta, omega)
    return DeficitReport(
        d=d,
        s_sequence=s,
        volume_sum=evaluate(f, add(alpha, beta)),
        A_squared=a_sq,
        A=deficit_A(f, alpha, beta, omega, bits),
        B=deficit_B(f, alpha, beta, bits),
        K=deficit_K(f, alpha, beta, bits),
        K_reverse=deficit_K(f, beta, alpha, bits),
        K_l=tuple(deficit_K_l(f, alpha, beta, l, bits) for l in range(1, d)),
        sigma=sigma(f, alpha, beta, bits),
        radii=radii(f, alpha, beta, nef),
        delta_alpha_omega=delta_omega(f, alpha, omega, nef),
        delta_beta_omega=delta_omega(f, beta, omega, nef),
        panel=proportionality_panel(f, alpha, beta, strict),
        battery=tuple(inequality_battery(f, alpha, beta, omega, nef, bits)),
        fmp=fmp_radii_chain(f, alpha, beta, omega, nef, bits) if with_fmp else None,
        proportional=proportional_vectors(alpha, beta),
    )


@dataclass(frozen=True)
class ConstantRow:
    """Smallest observed ``X / Y^e`` for one theorem shape (``None``: vacuous)."""

    theorem: str
    exponent: int
    min_ratio: Fraction | None
    instance: str | None
    samples: int


@dataclass(frozen=True)
class EmpiricalConstants:
    rows: tuple[ConstantRow, ...]
    diskant_sweep: tuple[ConstantRow, ...]

    def all_positive(self) -> bool:
        return all(r.min_ratio is None or r.min_ratio > 0 for r in self.rows + self.diskant_sweep)


DISKANT_EXPONENTS = (1, 2, 3, 4, 6, 8)


def _ratio_lower(X: Interval, Y: Interval, e: int) -> Fraction | None:
    if Y.hi <= 0:
        return None
    return X.lo / Y.hi**e


def stability_pairs(instance: str, rep: DeficitReport, bits: int = DEFAULT_BITS) -> list[tuple[str, int, Interval, Interval]]:
    """``(theorem, exponent, X, Y)`` for each ``X >= c Y^e`` shape with ``Y`` not exactly zero."""
    d = rep.d
    e = 2 ** (d - 2)
    out = []
    if rep.A_squared != 0:
        out.append(("KTcontrAF", e, rep.K, rep.A))
        out.append(("DeficitComparison", e, (rep.sigma * rep.B).rounded(bits), rep.A))
    # BM versus KT with the larger volume first
    s = rep.s_sequence
    a, b = s[d], s[0]
    K_big = rep.K if a >= b else rep.K_reverse
    if not (K_big.is_exact and K_big.lo == 0):
        rho = root(min(a, b) / max(a, b), d, bits)
        rk = rho * K_big
        out.append(("BMcontrKT", 1, rep.B, (rk / (1 + rk)).rounded(bits)))
    if rep.fmp is not None:
        rad = rep.fmp.radii
        if rad.bounded and rad.r_in != rad.R_out:
            out.append(("KTradii", e, rep.K, Interval.exact(1 - rad.r_in / rad.R_out)))
        F = rep.fmp.F.F
        if not rep.proportional and F.hi > 0:
            out.append(("FOmegaKT", e, rep.K, F))
    return out


def empirical_constants(records: Sequence[tuple[str, DeficitReport]], bits: int = DEFAULT_BITS) -> EmpiricalConstants:
    """Worst observed constants for the theorems whose constant is not explicit."""
    if not records:
        raise InputError("empirical constants need a nonempty corpus")
    best: dict[tuple[str, int], tuple[Fraction, str, int]] = {}
    names = ("KTcontrAF", "DeficitComparison", "BMcontrKT", "KTradii", "FOmegaKT")
    sweep: dict[int, tuple[Fraction, str, int]] = {}
    for name, rep in sorted(records, key=lambda r: r[0]):
        for theorem, e, X, Y in stability_pairs(name, rep, bits):
            ratio = _ratio_lower(X, Y, e)
            if ratio is None:
                continue
            key = (theorem, e)
            prev = best.get(key)
            count = prev[2] + 1 if prev else 1
            if prev is None or ratio < prev[0]:
                best[key] = (ratio, name, count)
            else:
                best[key] = (prev[0], prev[1], count)
            if theorem == "FOmegaKT":
                for ex in DISKANT_EXPONENTS:
                    r = _ratio_lower(X, Y, ex)
                    prev = sweep.get(ex)
                    count = prev[2] + 1 if prev else 1
                    if prev is None or r < prev[0]:
                        sweep[ex] = (r, name, count)
                    else:
                        sweep[ex] = (prev[0], prev[1], count)
    rows = []
    seen = {k[0] for k in best}
    for theorem in names:
        keys = sorted(k for k in best if k[0] == theorem)
        if not keys and theorem not in seen:
            rows.append(ConstantRow(theorem, 0, None, None, 0))
        for key in keys:
            ratio, inst, count = best[key]
            rows.append(ConstantRow(theorem, key[1], ratio, inst, count))
    sweep_rows = tuple(ConstantRow("DiskantSweep", ex, *sweep[ex]) if ex in sweep
                       else ConstantRow("DiskantSweep", ex, None, None, 0) for ex in DISKANT_EXPONENTS)
    return EmpiricalConstants(tuple(rows), sweep_rows)
