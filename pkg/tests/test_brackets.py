"""Algebraic, first, second and third brackets and their laws."""

from fractions import Fraction

import pytest

from artifact.series import TruncatedSeries, multi_index_enum
from artifact.jets import (CheckedSection, JetSection, OrderError,
                           holonomic_checked, tilde_section)
from artifact.brackets import (LiftError, TildeConditionError,
                               algebraic_bracket, algebraic_bracket_oracle,
                               algebroid_bracket, first_bracket,
                               second_bracket, third_bracket)

from conftest import (T, checked_zero, jet_zero, rnd_checked, rnd_jet,
                      rnd_series, rng_for)


def unit_value(i, alpha):
    return {(i, alpha): Fraction(1)}


def test_algebraic_formula_matches_oracle_on_basis_pairs():
    # bilinearity reduces exhaustive agreement to basis pairs
    for n in (1, 2):
        for k in (1, 2):
            coords = [(i, a) for i in range(n)
                      for a in multi_index_enum(n, k)]
            for ca in coords:
                for cb in coords:
                    X = JetSection(n, k, T, {ca: 1})
                    Y = JetSection(n, k, T, {cb: 1})
                    got = algebraic_bracket(X, Y).at_point_zero()
                    want = algebraic_bracket_oracle(unit_value(*ca),
                                                    unit_value(*cb), n, k)
                    assert got == want


def test_algebraic_bracket_antisymmetry_and_bilinearity():
    rng = rng_for("alg-bracket")
    n, k = 2, 3
    for _ in range(10):
        X = rnd_jet(rng, n, k)
        Y = rnd_jet(rng, n, k)
        assert jet_zero(algebraic_bracket(X, Y) + algebraic_bracket(Y, X))
        assert jet_zero(algebraic_bracket(X, X))
        f = rnd_series(rng, n)
        lhs = algebraic_bracket(X.scale(f), Y)
        rhs = algebraic_bracket(X, Y).scale(f)
        assert jet_zero(lhs - rhs)


def test_first_bracket_antisymmetry():
    rng = rng_for("fb-antisym")
    for _ in range(10):
        a = rnd_checked(rng, 2, 2)
        b = rnd_checked(rng, 2, 2)
        assert checked_zero(first_bracket(a, b) + first_bracket(b, a),
                            budget=1)


def test_first_bracket_leibniz():
    rng = rng_for("fb-leibniz")
    n, k = 2, 3
    for _ in range(10):
        a = rnd_checked(rng, n, k)
        b = rnd_checked(rng, n, k)
        f = rnd_series(rng, n)
        lhs = first_bracket(a, b.scale(f))
        vf = TruncatedSeries.zero(n, T)
        for j in range(n):
            vf = vf + a.horizontal[j] * f.derive(j)
        rhs = b.project(k - 1).scale(vf) + first_bracket(a, b).scale(f)
        assert checked_zero(lhs - rhs, budget=1)


def test_first_bracket_jacobi_with_order_drop():
    rng = rng_for("fb-jacobi")
    n, k = 2, 3
    for _ in range(6):
        a = rnd_checked(rng, n, k)
        b = rnd_checked(rng, n, k)
        c = rnd_checked(rng, n, k)
        s = (first_bracket(first_bracket(a, b), c.project(k - 1))
             + first_bracket(first_bracket(b, c), a.project(k - 1))
             + first_bracket(first_bracket(c, a), b.project(k - 1)))
        assert checked_zero(s, budget=2)


def test_first_bracket_on_holonomic_sections():
    # on j^k-lifts the bracket is the k-1 lift of the field bracket
    rng = rng_for("fb-holonomic")
    from artifact.jets import vector_bracket
    n, k = 2, 2
    for _ in range(5):
        u = [rnd_series(rng, n) for _ in range(n)]
        v = [rnd_series(rng, n) for _ in range(n)]
        res = first_bracket(holonomic_checked(u, k), holonomic_checked(v, k))
        want = holonomic_checked(vector_bracket(u, v), k - 1)
        assert checked_zero(res - want, budget=k)


def test_algebroid_bracket_matches_first_bracket():
    rng = rng_for("algebroid")
    xi = rnd_jet(rng, 2, 2)
    eta = rnd_jet(rng, 2, 2)
    direct = algebroid_bracket(xi, eta)
    via = first_bracket(tilde_section(xi), tilde_section(eta)).vertical
    assert jet_zero(direct - via)


def test_second_bracket_lift_independent():
    rng = rng_for("sb-lift")
    n, k = 2, 2
    for _ in range(5):
        a = tilde_section(rnd_jet(rng, n, k))
        b = tilde_section(rnd_jet(rng, n, k))
        top_a = rnd_jet(rng, n, k + 1)
        lift_a = a.vertical.lift_zero(k + 1) + (top_a - top_a.project(k)
                                                .lift_zero(k + 1))
        top_b = rnd_jet(rng, n, k + 1)
        lift_b = b.vertical.lift_zero(k + 1) + (top_b - top_b.project(k)
                                                .lift_zero(k + 1))
        default = second_bracket(a, b)
        lifted = second_bracket(a, b, lift_a=lift_a, lift_b=lift_b)
        assert checked_zero(default - lifted, budget=1)


def test_second_bracket_requires_tilde():
    rng = rng_for("sb-tilde")
    a = tilde_section(rnd_jet(rng, 2, 2))
    b = rnd_checked(rng, 2, 2)
    with pytest.raises(TildeConditionError):
        second_bracket(a, b)


def test_second_bracket_rejects_bad_lift():
    rng = rng_for("sb-badlift")
    a = tilde_section(rnd_jet(rng, 2, 2))
    b = tilde_section(rnd_jet(rng, 2, 2))
    bad = rnd_jet(rng, 2, 3) + JetSection(
        2, 3, T, {(0, (0, 0)): TruncatedSeries.const(1, 2, T)})
    with pytest.raises(LiftError):
        second_bracket(a, b, lift_a=bad)


def test_third_bracket_lift_independent():
    rng = rng_for("tb-lift")
    n, k = 2, 2
    for _ in range(5):
        a = tilde_section(rnd_jet(rng, n, k + 1))
        b = rnd_checked(rng, n, k)
        top = rnd_jet(rng, n, k + 1)
        lift_b = b.vertical.lift_zero(k + 1) + (top - top.project(k)
                                                .lift_zero(k + 1))
        default = third_bracket(a, b)
        lifted = third_bracket(a, b, lift_b=lift_b)
        assert checked_zero(default - lifted, budget=1)


def test_third_bracket_leibniz():
    rng = rng_for("tb-leibniz")
    n, k = 2, 2
    for _ in range(6):
        a = tilde_section(rnd_jet(rng, n, k + 1))
        b = rnd_checked(rng, n, k)
        f = rnd_series(rng, n)
        g = rnd_series(rng, n)
        vg = TruncatedSeries.zero(n, T)
        wf = TruncatedSeries.zero(n, T)
        for j in range(n):
            vg = vg + a.horizontal[j] * g.derive(j)
            wf = wf + b.horizontal[j] * f.derive(j)
        lhs = third_bracket(a.scale(f), b.scale(g))
        rhs = (b.scale(f * vg)
               + tilde_section(a.vertical.project(k)).scale(-(wf * g))
               + third_bracket(a, b).scale(f * g))
        assert checked_zero(lhs - rhs, budget=1)


def test_third_bracket_order_mismatch():
    rng = rng_for("tb-order")
    a = tilde_section(rnd_jet(rng, 2, 2))
    b = rnd_checked(rng, 2, 2)
    with pytest.raises(OrderError):
        third_bracket(a, b)


def test_order_zero_first_bracket_is_field_bracket():
    rng = rng_for("fb-order0")
    from artifact.jets import vector_bracket
    n = 2
    a = CheckedSection([rnd_series(rng, n) for _ in range(n)],
                       JetSection.zero(n, 0, T))
    b = CheckedSection([rnd_series(rng, n) for _ in range(n)],
                       JetSection.zero(n, 0, T))
    res = first_bracket(a, b)
    assert res.vertical.is_zero()
    assert res.horizontal == vector_bracket(a.horizontal, b.horizontal)
