from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braided.exact_core import ZERO, parse_scalar, var
from braided.re_weyl import act_weyl_oracle
from braided.u2_calculus import (
    OPERATORS,
    IsotypicElement,
    act_closed,
    cas_exchange_check,
    cayley_hamilton_check,
    charpoly_roots_check,
    derivatives_commute_check,
    gl2_images,
    gl2_table_check,
    harmonicity_check,
    laplace_k0,
    oracle_crosscheck,
    paper_phi_projectors,
    paper_pi_projectors,
    power_formula_check,
    spectral_invariants,
    spectral_matrices,
    t_shift_check,
)

h, mu = var("h"), var("mu")


def test_system_is_confluent(u2):
    v = u2.system.certify_confluence()
    assert v.passed
    assert v.details["overlaps_checked"] == 56


def test_cayley_hamilton():
    assert cayley_hamilton_check()
    assert not cayley_hamilton_check(constant=ZERO)


@pytest.mark.parametrize("op, on, expected", [
    ("Dx", "x", "1"),
    ("Dx", "y*z", "h/2"),
    ("Dx", "x*x", "2*x"),
    ("dt", "Cas", "-3*h/2"),
    ("Lap", "Cas", "6"),
    ("dt", "t", "1"),
    ("Q", "b", "b"),
    ("Q", "Cas*b", "(3*Cas + h^2/4)*b"),
    ("Dt", "1", "2/h"),
])
def test_spot_values(u2, op, on, expected):
    assert u2.act(u2.parse(op), u2.parse(on)) == u2.nf(u2.parse(expected))


def test_mu_squared_values(u2):
    mu2 = u2.central(mu * mu)
    assert u2.act(u2.lap, mu2) == u2.al.const(-24)
    assert u2.act(u2.dt, mu2) == u2.al.const(6 * h)


@pytest.mark.parametrize("k", range(4))
def test_powers_of_b(u2, k):
    bk = u2.nf(u2.b ** k)
    assert u2.act(u2.dt, bk).is_zero()
    assert u2.act(u2.q_op, bk) == bk.scale(k)
    assert u2.act(u2.lap, bk).is_zero()
    assert u2.act(u2.ops["L0"], bk) == bk.scale(4 / (h * h))
    assert harmonicity_check(u2, k)


def test_derivatives_commute(u2):
    assert derivatives_commute_check(u2, 3)


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(OPERATORS), st.integers(0, 4))
def test_t_shift(u2, op, k):
    assert t_shift_check(u2, op, k)


def test_cas_exchange(u2):
    assert cas_exchange_check(u2, 1, 3, oracle=True)
    assert cas_exchange_check(u2, 2, 2, oracle=True)


def test_spectral_data():
    sm = spectral_matrices()
    assert spectral_invariants(sm)
    assert charpoly_roots_check(sm)
    assert power_formula_check(sm, 3)
    assert sm.lam1 == mu * (2 * h - mu) / 4
    assert sm.lam_plus == (h * h - (mu + 2 * h) ** 2) / 4


def test_printed_projectors_match():
    sm = spectral_matrices()
    assert paper_phi_projectors() == (sm.p1, sm.p2)
    assert paper_pi_projectors() == (sm.p0, sm.p_plus, sm.p_minus)


@pytest.mark.parametrize("op", OPERATORS)
@pytest.mark.parametrize("f", ["1", "t*Cas", "Cas^2"])
def test_closed_forms_match_oracle(u2, op, f):
    for k in (0, 2):
        assert oracle_crosscheck(u2, op, IsotypicElement.parse(f, k))


def test_literal_minus_two_reading_fails(u2):
    e = IsotypicElement.parse("Cas", 0)
    assert oracle_crosscheck(u2, "dt", e)
    assert not oracle_crosscheck(u2, "dt", e, literal_minus_two=True)


def test_laplace_k0_matches_l1():
    for text in ("mu^2", "t*mu^4", "t^3"):
        f = parse_scalar(text, ("t", "mu"))
        assert laplace_k0(f) == act_closed("L1", IsotypicElement(f, 0)).f


def test_isotypic_validation():
    with pytest.raises(ValueError):
        IsotypicElement(var("x"), 0)
    with pytest.raises(ValueError):
        IsotypicElement(mu, -1)
    with pytest.raises(ValueError):
        act_closed("Zz", IsotypicElement(mu, 0))


def test_gl2_identification(weyl2):
    assert gl2_table_check(weyl2)


@pytest.mark.parametrize("op, on", [("Dx", "y*z"), ("Dz", "x*y*z"), ("Dt", "t*t"), ("Dy", "y*y*x")])
def test_actions_agree_with_gl2_weyl_algebra(u2, weyl2, op, on):
    images = gl2_images(weyl2)
    al = weyl2.system.alphabet

    def image(p):
        out = al.zero()
        for word, c in p.terms.items():
            term = al.const(c)
            for letter in word:
                term = term * images[u2.al.names[letter]]
            out = out + term
        return weyl2.normal_form(out)

    expected = image(u2.act(u2.parse(op), u2.parse(on)))
    got = act_weyl_oracle(weyl2, images[op], image(u2.parse(on)))
    assert got == expected
