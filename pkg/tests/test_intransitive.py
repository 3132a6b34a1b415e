"""Restriction to the transversal slice, bracket tables of the truncated
intransitive algebra, the rank-one plane classifier, solution families."""

from fractions import Fraction

import pytest

from artifact.series import TruncatedSeries
from artifact.equations import equation_build, prolong_equation
from artifact.intransitive import (ClosureError, RankError,
                                   bracket_table, check_solution_family,
                                   classify_plane_rank1,
                                   restrict_to_transversal)

from conftest import T, rng_for, rnd_series, series_zero


def xv():
    return TruncatedSeries.var(0, 2, T)


def one2():
    return TruncatedSeries.const(1, 2, T)


def zero2():
    return TruncatedSeries.zero(2, T)


def case1():
    return equation_build(2, 1, [1], [{(1, (1, 0)): 1}], T)


def case2(beta):
    return equation_build(2, 1, [1],
                          [{(1, (0, 1)): 1, (1, (1, 0)): -beta}], T)


def horizontal_x():
    return [one2(), zero2()]


def test_restrict_case1_generators():
    gens = restrict_to_transversal(case1())
    assert len(gens) == 2
    # X0: order-zero part d/dy; X1: the pure symbol coordinate f^{0,1}
    assert gens[0].get(1, (0, 0)).constant_term() == 1
    assert gens[1].comps == {(1, (0, 1)): one2()}
    # coefficients live on the slice: no dependence on the fiber variable
    for g in gens:
        for s in g.comps.values():
            assert s.restrict_zero([1]) == s


def test_restrict_case2_generators():
    gens = restrict_to_transversal(case2(xv()))
    assert len(gens) == 2
    assert gens[1].get(1, (1, 0)) == one2()
    assert gens[1].get(1, (0, 1)) == xv()


def test_restrict_full_order_zero():
    full = equation_build(2, 0, [1], [], T)
    gens = restrict_to_transversal(full)
    assert len(gens) == 1
    assert gens[0].comps == {(1, (0, 0)): one2()}


def test_restrict_requires_order_zero_surjectivity():
    eq = equation_build(2, 1, [1], [{(1, (0, 0)): 1}], T)
    with pytest.raises(RankError):
        restrict_to_transversal(eq)


def test_case1_bracket_table():
    gens = restrict_to_transversal(case1())
    alg = bracket_table([horizontal_x()], gens)
    assert alg.structure_function(-1, 0, 0).is_zero()
    assert alg.structure_function(-1, 1, 0).is_zero()
    assert alg.structure_function(-1, 1, 1).is_zero()
    assert alg.structure_function(0, 1, 0) == one2()
    assert alg.structure_function(0, 1, 1).is_zero()
    # antisymmetric lookup
    assert alg.structure_function(1, 0, 0) == -one2()


def test_case2_bracket_table():
    beta = xv()
    gens = restrict_to_transversal(case2(beta))
    alg = bracket_table([horizontal_x()], gens)
    assert alg.structure_function(-1, 1, 0) == -one2()
    assert alg.structure_function(-1, 1, 1).is_zero()
    assert alg.structure_function(0, 1, 0) == beta
    assert alg.structure_function(0, 1, 1).is_zero()


def test_generic_order2_table_and_relation():
    beta = xv() + 2 * xv() * xv()
    eq = prolong_equation(case2(beta))
    gens = restrict_to_transversal(eq)
    assert len(gens) == 3
    alg = bracket_table([horizontal_x()], gens)
    a = -alg.structure_function(-1, 1, 0)
    b11 = alg.structure_function(-1, 1, 1)
    b = alg.structure_function(0, 1, 0)
    a01 = alg.structure_function(0, 1, 1)
    assert a == one2() and b == beta
    # top generator relations
    assert alg.structure_function(-1, 2, 1) == -a
    assert alg.structure_function(0, 2, 1) == b
    hs, vs = alg.entry(1, 2)
    assert all(s.is_zero() for s in hs) and all(s.is_zero() for s in vs)
    # structure relation d b/dx = a*a01 + b*b11
    rel = b.derive(0) - a * a01 - b * b11
    assert series_zero(rel, budget=1)


def test_bracket_table_closure_error():
    # a section family not closed under the bracket is rejected
    from artifact.jets import JetSection
    # the x-derivative bracket with this lone generator produces a
    # section that is not a series multiple of it
    bad = [JetSection(2, 1, T, {(1, (0, 0)): xv()})]
    with pytest.raises(ClosureError):
        bracket_table([horizontal_x()], bad)


def test_classifier_case1():
    res = classify_plane_rank1(xv(), one2())
    assert res.case == "Case1"
    assert res.normal_form_equation(T).same_system(case1())


def test_classifier_case2_powers():
    for m in (1, 2, 3):
        b = TruncatedSeries(2, T, {(m, 0): Fraction(1)})
        res = classify_plane_rank1(one2(), b)
        assert res.case == "Case2" and res.valuation == m
        assert res.normal_form_beta == TruncatedSeries(
            2, T, {(m, 0): Fraction(1)})


def test_classifier_case2_zero():
    res = classify_plane_rank1(one2(), zero2())
    assert res.case == "Case2" and res.valuation is None
    assert res.normal_form_beta.is_zero()


def test_classifier_unit_invariance():
    rng = rng_for("classify-unit")
    for _ in range(5):
        s = rnd_series(rng, 2)
        u = s - s.constant_term() + Fraction(3)
        a, b = one2(), xv() * xv()
        r1 = classify_plane_rank1(a, b)
        r2 = classify_plane_rank1(u * a, u * b)
        assert (r1.case, r1.valuation) == (r2.case, r2.valuation)


def test_classifier_rank_drop():
    with pytest.raises(RankError):
        classify_plane_rank1(xv(), xv())


def test_solution_families():
    rng = rng_for("families")
    y = TruncatedSeries.var(1, 2, T)
    # Case 1: theta(y) d/dy
    prof = rnd_series(rng, 1).compose([y])
    assert check_solution_family(case1(), [zero2(), prof])
    # Case 2 beta = x: theta(x e^y) d/dy
    xey = xv()
    term = xv()
    for m in range(1, T + 1):
        term = term * y * Fraction(1, m)
        xey = xey + term
    assert check_solution_family(case2(xv()), [zero2(), xey])
    # Case 2 beta = 0: theta(x) d/dy
    assert check_solution_family(case2(zero2()), [zero2(), xv() * xv() + xv()])
    # negative: x d/dy does not solve Case 1
    assert not check_solution_family(case1(), [zero2(), xv()])
    # fields outside the distribution are rejected
    assert not check_solution_family(case1(), [one2(), zero2()])
