from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from braided.exact_core import (
    I,
    ONE,
    ZERO,
    NoSolution,
    Scalar,
    ScalarMatrix,
    UniPoly,
    charpoly,
    determinant,
    evaluate_matrix_poly,
    format_scalar,
    nullspace,
    parse_scalar,
    q_number,
    rank,
    reconstruct_rational,
    solve_linear,
    var,
)
from braided.grammar import ParseError

q, h, t = var("q"), var("h"), var("t")


def test_gaussian_arithmetic():
    assert I * I == -1
    assert (1 + I) * (1 - I) == 2
    assert (1 / (1 + I)) == (1 - I) / 2
    assert (q + I).conjugate() == q - I


def test_rational_function_canonical_form():
    a = (q * q - 1) / (q - 1)
    assert a == q + 1
    assert a.denominator() == ONE
    assert hash(a) == hash(q + 1)


def test_q_numbers():
    assert q_number(2) == q + 1 / q
    assert q_number(3) == q * q + 1 + 1 / (q * q)
    assert q_number(3).subs({"q": 1}) == 3
    assert q_number(0) == ZERO
    assert q_number(-2) == -q_number(2)


def test_subs_and_derivative():
    f = (q ** 3 + h) / (1 + q)
    assert f.subs({"q": 2, "h": 1}) == Scalar(Fraction(9, 3))
    assert f.derivative("h") == 1 / (1 + q)
    g = (t ** 2 + 1).subs({"t": I})
    assert g.is_zero()


def test_coefficients_low_to_high():
    f = 3 + 2 * t + 5 * t ** 3
    assert f.coefficients("t") == [Scalar(3), Scalar(2), ZERO, Scalar(5)]
    with pytest.raises(ValueError):
        (1 / t).coefficients("t")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse_scalar("q + * 2")
    assert err.value.line == 1
    assert err.value.column == 5
    with pytest.raises(ParseError):
        parse_scalar("1/0")
    with pytest.raises(ParseError):
        parse_scalar("foo", ("q",))


_atoms = st.sampled_from(["q", "h", "t", "mu", "i", "1", "2", "3"])


@st.composite
def expressions(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(_atoms)
    op = draw(st.sampled_from(["+", "-", "*", "/", "^"]))
    left = draw(expressions(depth=depth - 1))
    if op == "^":
        return f"({left})^{draw(st.integers(0, 3))}"
    right = draw(expressions(depth=depth - 1))
    if op == "/":
        right = f"({right} + q^4 + 7)"
    return f"({left}) {op} ({right})"


@settings(max_examples=60, deadline=None)
@given(expressions())
def test_format_parse_round_trip(text):
    s = parse_scalar(text)
    assert parse_scalar(format_scalar(s)) == s


@settings(max_examples=40, deadline=None)
@given(expressions(), expressions())
def test_field_axioms(a, b):
    x, y = parse_scalar(a), parse_scalar(b)
    assert x + y == y + x
    assert x * y == y * x
    assert (x - y) + y == x
    if not y.is_zero():
        assert (x / y) * y == x


def test_scalar_matches_sympy():
    qs = sympy.Symbol("q")
    expr = sympy.cancel((qs ** 4 - 1) / (qs ** 2 - 1) + sympy.I * qs)
    ours = (q ** 4 - 1) / (q ** 2 - 1) + I * q
    assert parse_scalar(str(expr).replace("**", "^").replace("I", "i")) == ours


def _sym(m: ScalarMatrix):
    qs = sympy.Symbol("q")
    return sympy.Matrix([[sympy.sympify(format_scalar(e).replace("^", "**"), locals={"q": qs})
                          for e in row] for row in m.rows])


def test_rank_and_determinant_against_sympy():
    m = ScalarMatrix([[1, q, q * q], [q, q * q, q ** 3], [1, 2, 3]])
    sm = _sym(m)
    assert rank(m) == sm.rank() == 2
    m2 = ScalarMatrix([[q, 1, 0], [1, q, 1], [0, 1, q]])
    assert determinant(m2) == parse_scalar(str(sympy.expand(_sym(m2).det())).replace("**", "^"))


def test_nullspace_and_solve():
    m = ScalarMatrix([[1, q, q * q], [q, q * q, q ** 3], [1, 2, 3]])
    for v in nullspace(m):
        col = ScalarMatrix([[x] for x in v])
        assert (m @ col).is_zero()
    a = ScalarMatrix([[1, 1], [1, -1]])
    b = ScalarMatrix([[q], [h]])
    x = solve_linear(a, b)
    assert a @ x == b
    with pytest.raises(NoSolution):
        solve_linear(ScalarMatrix([[1, 1], [1, 1]]), ScalarMatrix([[0], [1]]))


def test_cayley_hamilton_for_charpoly():
    m = ScalarMatrix([[q, 1, h], [0, 2, I], [1, t, 0]])
    p = charpoly(m)
    assert p.degree == 3
    assert evaluate_matrix_poly(p, m).is_zero()


def test_kron_and_power():
    a = ScalarMatrix([[0, 1], [1, 0]])
    assert a ** 2 == ScalarMatrix.identity(2)
    k = a.kron(ScalarMatrix.identity(2))
    assert k.shape == (4, 4)
    assert k.trace() == ZERO


def test_unipoly_gcd_and_series():
    a = UniPoly([1, 2, 1])
    b = UniPoly([1, 1])
    assert a.gcd(b) == b
    assert a.divmod(b)[0] == b
    series = UniPoly([1, 1]).series(UniPoly([1, -1]), 5)
    assert series == [Scalar(1)] + [Scalar(2)] * 4


def test_reconstruct_rational():
    terms = [1, 2, 2, 2, 2, 2]
    num, den = reconstruct_rational(terms, (1, 1))
    assert num == UniPoly([1, 1]) and den == UniPoly([1, -1])
    assert reconstruct_rational([1, 3, 1, 7, 2, 9], (0, 1)) is None
