"""Seeded generators of random test instances shared by several test files."""

from __future__ import annotations

import random
from fractions import Fraction

from lorentzkit import bodies
from lorentzkit.errors import InputError


def random_body(rng: random.Random, n: int, npoints: int | None = None, coord_max: int = 4):
    """Full-dimensional rational polytope in R^n with small coordinates."""
    npoints = npoints or n + 2
    while True:
        pts = [tuple(Fraction(rng.randint(0, coord_max), rng.choice((1, 2))) for _ in range(n)) for _ in range(npoints)]
        try:
            P = bodies.polytope(pts)
        except InputError:
            continue
        if bodies.volume(P) > 0:
            return P


def random_family(rng: random.Random, n: int, s: int, npoints: int | None = None) -> bodies.BodyFamily:
    return bodies.BodyFamily(tuple(random_body(rng, n, npoints) for _ in range(s)))


def random_positive_vector(rng: random.Random, s: int, low: int = 1, high: int = 6) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(low, high), rng.randint(1, 3)) for _ in range(s))
