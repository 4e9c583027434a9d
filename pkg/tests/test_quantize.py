from __future__ import annotations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from braided.exact_core import I, ONE, ScalarMatrix, format_scalar, parse_scalar, var
from braided.quantize import (
    CONVENTIONS,
    DifferenceOperator,
    MetricProfile,
    alpha,
    alpha_injectivity_check,
    alpha_operator,
    alpha_q2_report,
    basis_difference,
    basis_to_nc,
    classical_laplacian,
    classical_q,
    clifford_check,
    dalembert,
    difference_form,
    dirac_check,
    display_to_basis,
    gamma_matrices,
    gradient,
    harmonic_decomposition,
    laplace_display,
    lb_alpha_check,
    lb_apply,
    lb_classical,
    lb_classical_operator,
    lb_display,
    lb_quantum,
    maxwell,
    mu_to_r,
    r_hat,
    radius_frame_check,
    rho,
    round_trip_check,
    schwarzschild,
    symmetrize,
)
from braided.u2_calculus import IsotypicElement, act_closed

h, t, mu, r, rg = (var(n) for n in ("h", "t", "mu", "r", "rg"))
x, y, z = var("x"), var("y"), var("z")


def test_quantum_radius():
    assert radius_frame_check()
    assert r_hat() ** 2 == -mu * mu / 4
    assert mu_to_r(mu) == 2 * I * r


@pytest.mark.parametrize("convention, shift", [("radius", -1), ("paper", 1)])
def test_alpha_of_x_squared(u2, convention, shift):
    got = alpha(u2, x * x, convention)
    assert got == u2.nf(u2.g["x"] * u2.g["x"] + u2.al.const(shift * h * h / 12))


def test_alpha_of_harmonic_monomials(u2):
    gx, gy = u2.g["x"], u2.g["y"]
    assert alpha(u2, x * y) == u2.nf((gx * gy + gy * gx) / 2)
    assert alpha(u2, x) == gx
    assert alpha(u2, t * t * x) == u2.nf(u2.g["t"] ** 2 * gx)


@pytest.mark.parametrize("convention", CONVENTIONS)
def test_alpha_on_invariant_family(u2, convention):
    b = -I * x - y
    cas = x * x + y * y + z * z
    got = alpha(u2, t * cas * b ** 2, convention)
    want = u2.nf(u2.g["t"] * rho(u2, convention) * u2.b ** 2)
    assert got == want


def test_symmetrize_is_order_free(u2):
    assert symmetrize(u2, x * y * z) == symmetrize(u2, z * y * x)


_monos = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(_monos, st.integers(-3, 3)), min_size=1, max_size=4))
def test_harmonic_decomposition(terms):
    p = sum((c * x ** a * y ** b * z ** e for (a, b, e), c in terms), 0 * x)
    r2 = x * x + y * y + z * z
    total = 0 * x
    for j, hj in harmonic_decomposition(p):
        lap = sum((hj.derivative(v).derivative(v) for v in ("x", "y", "z")), 0 * x)
        assert lap.is_zero()
        total = total + r2 ** j * hj
    assert total == p


def test_alpha_of_q_and_q_squared(u2):
    for conv in CONVENTIONS:
        assert alpha_operator(u2, classical_q(), conv) == u2.q_op
        assert alpha_operator(u2, classical_laplacian(), conv) == u2.lap
    report = alpha_q2_report(u2)
    assert report["holds_under"] == ["paper"]
    assert not report["radius"]["holds"]


def test_classical_q_squared():
    q2 = classical_q() @ classical_q()
    d = q2.as_dict()
    assert d[("x",)] == x
    assert d[("x", "y")] == 2 * x * y
    assert d[("z", "z")] == z * z


def test_alpha_injective(u2):
    assert alpha_injectivity_check(u2, 4)


def test_clifford_and_dirac(u2):
    gammas = gamma_matrices()
    assert clifford_check(gammas)
    assert dirac_check(u2, gammas)
    wrong = [gammas[0], gammas[1], gammas[2], gammas[3].scale(I)]
    assert not clifford_check(wrong)


@pytest.mark.parametrize("g", ["b", "t*b*b", "Cas*t", "x*y*z"])
def test_maxwell_kills_gradients(u2, g):
    out = maxwell(u2, gradient(u2, u2.parse(g)))
    assert all(c.is_zero() for c in out)


def test_maxwell_is_not_trivial(u2):
    v = [u2.parse("t*x"), u2.al.zero(), u2.al.zero(), u2.al.zero()]
    assert not all(c.is_zero() for c in maxwell(u2, v))


def test_metric_validation():
    with pytest.raises(ValueError):
        MetricProfile.parse("0")
    with pytest.raises(ValueError):
        MetricProfile(t)
    assert schwarzschild().phi == 1 - rg / r


def _sympy_lb(phi_text: str):
    T, X, Y, Z, RG = sympy.symbols("t x y z rg")
    R = sympy.sqrt(X ** 2 + Y ** 2 + Z ** 2)
    rs = sympy.Symbol("r", positive=True)
    phi_r = sympy.sympify(phi_text.replace("^", "**"), locals={"r": rs, "rg": RG})
    phi = phi_r.subs(rs, R)
    dphi = sympy.diff(phi_r, rs).subs(rs, R)

    def q(f):
        return X * sympy.diff(f, X) + Y * sympy.diff(f, Y) + Z * sympy.diff(f, Z)

    def lap(f):
        return sum(sympy.diff(f, v, 2) for v in (X, Y, Z))

    def invariant_form(f):
        return (sympy.diff(f, T, 2) / phi - (phi - 1) / R ** 2 * q(q(f))
                - ((phi - 1) / R + dphi) / R * q(f) - lap(f))

    def radial_form(f):
        dr = q(f) / R
        drr = (q(q(f)) - q(f)) / R ** 2
        return sympy.diff(f, T, 2) / phi - (phi - 1) * drr - (2 * (phi - 1) / R + dphi) * dr - lap(f)

    return (T, X, Y, Z, RG, R), invariant_form, radial_form


@pytest.mark.parametrize("phi_text", ["1 - rg/r", "1 + rg^2/r^2"])
@pytest.mark.parametrize("f_text", ["t^2*x*y", "x^2*z + t", "t^3*(x^2+y^2+z^2)"])
def test_classical_lb_forms_agree(phi_text, f_text):
    (T, X, Y, Z, RG, R), invariant_form, radial_form = _sympy_lb(phi_text)
    f = sympy.sympify(f_text.replace("^", "**"), locals={"t": T, "x": X, "y": Y, "z": Z})
    assert sympy.simplify(invariant_form(f) - radial_form(f)) == 0
    # our right-ordered classical operator against the sympy oracle
    ours = lb_classical_operator(MetricProfile.parse(phi_text)).apply(parse_scalar(f_text, ("t", "x", "y", "z")))
    ours_sym = sympy.sympify(format_scalar(ours).replace("^", "**"),
                             locals={"t": T, "x": X, "y": Y, "z": Z, "rg": RG, "r": R})
    assert sympy.simplify(ours_sym - radial_form(f)) == 0


def test_lb_flat(u2):
    flat = MetricProfile.parse("1")
    assert lb_quantum(flat) == display_to_basis({"dt2": ONE, "Lap": -ONE})
    assert basis_to_nc(u2, lb_quantum(flat)) == u2.nf(dalembert(u2))
    for conv in CONVENTIONS:
        assert lb_alpha_check(u2, flat, conv)


def test_lb_schwarzschild(u2):
    metric = schwarzschild()
    disp = lb_display(metric)
    assert set(disp) == {"dt2", "Q2", "Q", "Qdt", "Lap"}
    # (phi - 1)/r^2 + phi'/r vanishes for phi = 1 - rg/r
    assert disp["Q"].is_zero()
    assert mu_to_r(disp["dt2"]) == r / (r - rg)
    assert mu_to_r(disp["Qdt"]) == -h * rg / (2 * r ** 3)
    assert lb_alpha_check(u2, metric, "paper")
    assert not lb_alpha_check(u2, metric, "radius")


def test_lb_classical_coefficients():
    c = lb_classical(schwarzschild())
    assert c["dt2"] == r / (r - rg)
    assert c["Q2"] == rg / r ** 3
    assert c["Q"].is_zero()


def test_difference_form_of_laplacian():
    op = difference_form({"L1": ONE}, 0)
    assert op.as_map() == laplace_display().as_map()
    assert sorted(op.as_map()) == [(1, -2), (1, 0), (1, 2)]


def test_difference_form_of_dt():
    op = basis_difference("Dt", 0)
    assert sorted(op.as_map()) == [(0.5, -1), (0.5, 1)]
    assert op.as_map()[(0.5, 1)] == 1 / h + 1 / mu


def test_lb_applied_to_mu_squared():
    _, g = lb_apply(MetricProfile.parse("1"), mu * mu, 0)
    dt2 = difference_form({"dt": ONE}, 0)
    assert g == (dt2 @ dt2).apply(mu * mu) + 24
    assert g == 24


_poly_f = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 4), st.integers(-2, 2)), min_size=1, max_size=3)


@settings(max_examples=25, deadline=None)
@given(_poly_f, st.sampled_from(["Dt", "dt", "Q", "L0", "L1", "L2", "L3"]), st.integers(0, 3))
def test_round_trip(terms, op, k):
    f = sum((c * t ** a * mu ** b for a, b, c in terms), 0 * t)
    assert round_trip_check(op, f, k)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_composition_matches_second_order(k):
    q, dt_ = basis_difference("Q", k), basis_difference("Dt", k)
    assert (q @ q).as_map() == basis_difference("L3", k).as_map()
    assert (dt_ @ dt_).as_map() == basis_difference("L0", k).as_map()
    assert (q @ dt_).as_map() == basis_difference("L2", k).as_map()


@pytest.mark.parametrize("k", [0, 1, 2])
def test_classical_limit(k):
    f = t ** 2 * mu ** 4 + t * mu ** 2
    lim = {name: basis_difference(name, k).apply(f).subs({"h": 0}) for name in ("dt", "Q", "L1")}
    assert lim["dt"] == f.derivative("t")
    assert lim["Q"] == mu * f.derivative("mu") + k * f
    fm = f.derivative("mu")
    assert lim["L1"] == -4 * fm.derivative("mu") - 8 * (k + 1) * fm / mu


def test_difference_operator_preserves_component():
    op = difference_form(lb_quantum(schwarzschild()), 2)
    assert op.k == 2
    with pytest.raises(ValueError):
        op + basis_difference("Q", 1)
    with pytest.raises(ValueError):
        basis_difference("L9", 0)


def test_difference_operator_rendering():
    text = str(basis_difference("Dt", 0))
    assert "f(t + h/2, mu - h)" in text and "f(t + h/2, mu + h)" in text
    doc = basis_difference("Dt", 0).as_dict()
    assert doc["k"] == 0 and {term["dt"] for term in doc["terms"]} == {"1/2"}
