"""Shared helpers for the test suite: random exact-rational data
generators and budget-aware comparators.

All comparisons that follow a formal derivative are made after dropping
the top series orders ("derivative budget"), because differentiating a
series truncated at total degree T only determines the result to degree
T - 1.
"""

import random
from fractions import Fraction

from artifact.series import TruncatedSeries, multi_index_enum
from artifact.jets import CheckedSection, JetSection

T = 8


def rnd_series(rng, n, deg=3, trunc=T, density=0.4, span=3):
    coeffs = {}
    for a in multi_index_enum(n, deg):
        if rng.random() < density:
            coeffs[a] = Fraction(rng.randint(-span, span))
    return TruncatedSeries(n, trunc, coeffs)


def rnd_unit(rng, n, deg=3, trunc=T):
    s = rnd_series(rng, n, deg, trunc)
    return s - s.constant_term() + Fraction(rng.choice([1, -1, 2, 3]))


def rnd_jet(rng, n, k, deg=3, trunc=T, density=0.5):
    comps = {}
    for i in range(n):
        for a in multi_index_enum(n, k):
            if rng.random() < density:
                comps[(i, a)] = rnd_series(rng, n, deg, trunc)
    return JetSection(n, k, trunc, comps)


def rnd_checked(rng, n, k, deg=3, trunc=T):
    return CheckedSection([rnd_series(rng, n, deg, trunc) for _ in range(n)],
                          rnd_jet(rng, n, k, deg, trunc))


def series_zero(s, budget=0):
    return s.truncate(s.trunc - budget).is_zero()


def jet_zero(xi, budget=0):
    return all(series_zero(s, budget) for s in xi.comps.values())


def checked_zero(cs, budget=0):
    return (all(series_zero(h, budget) for h in cs.horizontal)
            and jet_zero(cs.vertical, budget))


def rng_for(name):
    return random.Random(name)


def rnd_positive_series(rng, n, deg=3, trunc=T, min_degree=1, span=2):
    from artifact.series import index_order
    coeffs = {}
    for a in multi_index_enum(n, deg):
        if index_order(a) >= min_degree and rng.random() < 0.4:
            coeffs[a] = Fraction(rng.randint(-span, span))
    return TruncatedSeries(n, trunc, coeffs)


def rnd_groupoid(rng, n, order, trunc=T):
    """A random invertible jet section: a perturbation of the holonomic
    lift of a random diffeomorphism close to the identity."""
    from artifact.series import index_order
    from artifact.groupoid import GroupoidSection
    base = [TruncatedSeries.var(i, n, trunc)
            + rnd_positive_series(rng, n, min_degree=2) for i in range(n)]
    s = GroupoidSection.holonomic(base, order)
    fiber = dict(s.fiber)
    for i in range(n):
        for a in multi_index_enum(n, order):
            d = index_order(a)
            if d == 0:
                continue
            pert = rnd_positive_series(rng, n,
                                       min_degree=(1 if d == 1 else 0))
            fiber[(i, a)] = fiber.get(
                (i, a), TruncatedSeries.zero(n, trunc)) + pert
    return GroupoidSection(n, order, trunc, base, fiber)


def sparse_series(rng, n, deg=2, trunc=T, min_degree=1, terms=2, span=2):
    from artifact.series import index_order
    pool = [a for a in multi_index_enum(n, deg)
            if index_order(a) >= min_degree]
    coeffs = {}
    for a in rng.sample(pool, min(terms, len(pool))):
        coeffs[a] = Fraction(rng.randint(-span, span))
    return TruncatedSeries(n, trunc, coeffs)


def sparse_groupoid(rng, n, order, trunc=T, perturbations=2):
    """A cheap invertible jet section: near-identity base map with one
    quadratic term per component plus a couple of sparse fiber twists."""
    from artifact.series import index_order
    from artifact.groupoid import GroupoidSection
    base = [TruncatedSeries.var(i, n, trunc)
            + sparse_series(rng, n, min_degree=2, terms=1)
            for i in range(n)]
    s = GroupoidSection.holonomic(base, order)
    fiber = dict(s.fiber)
    pool = [a for a in multi_index_enum(n, order) if index_order(a) >= 1]
    for _ in range(perturbations):
        i = rng.randrange(n)
        alpha = rng.choice(pool)
        pert = sparse_series(
            rng, n, min_degree=(1 if index_order(alpha) == 1 else 0),
            terms=1)
        fiber[(i, alpha)] = fiber.get(
            (i, alpha), TruncatedSeries.zero(n, trunc)) + pert
    return GroupoidSection(n, order, trunc, base, fiber)


def sparse_checked(rng, n, k, trunc=T):
    comps = {}
    for i in range(n):
        for a in multi_index_enum(n, k):
            if rng.random() < 0.5:
                comps[(i, a)] = sparse_series(rng, n, min_degree=0, terms=2)
    return CheckedSection(
        [sparse_series(rng, n, min_degree=0, terms=2) for _ in range(n)],
        JetSection(n, k, trunc, comps))


def groupoid_equal(a, b, budget=0):
    if a.n != b.n or a.order != b.order:
        return False
    if not all(series_zero(x - y, budget)
               for x, y in zip(a.base_map, b.base_map)):
        return False
    keys = set(a.fiber) | set(b.fiber)
    return all(series_zero(a.jet(i, al) - b.jet(i, al), budget)
               for (i, al) in keys)
