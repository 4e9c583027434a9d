"""Quantization of rotation-invariant operators and their difference-operator form.

Classical polynomials are commutative Scalars in t, x, y, z, r.  The map
alpha sends f(t, r) times a harmonic polynomial to f(t, r^) times the
symmetrized quantum polynomial, with r^ = mu / (2i).  A general polynomial
coefficient is first split by classical harmonic decomposition, and every
factor r^2 that this produces becomes the element ``rho``.  Two conventions
for ``rho`` are available:

* ``"radius"``: rho = r^2 = Cas - h^2/4, the square of the quantum radius;
* ``"paper"``:  rho = Cas + h^2/4.

Quantized operators are NCPolynomials over the u(2) Weyl system whose
scalar coefficients may contain ``mu`` (a central symbol placed on the left).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .checks import Verdict, failed, passed
from .exact_core import I, ONE, ZERO, Scalar, ScalarMatrix, format_scalar, parse_scalar, var
from .nc_engine import NCMatrix, NCPolynomial
from .u2_calculus import (
    COORDS,
    DERIVS,
    IsotypicElement,
    U2,
    act_closed,
    spectral_matrices,
)

H = var("h")
T = var("t")
MU = var("mu")
R = var("r")
X, Y, Z = var("x"), var("y"), var("z")
XYZ = ("x", "y", "z")
CONVENTIONS = ("radius", "paper")


# -- the quantum radius -------------------------------------------------------------

def r_hat() -> Scalar:
    """r^ = mu / (2i)."""
    return MU / (2 * I)


def r_to_mu(f: Scalar) -> Scalar:
    return f.subs({"r": r_hat()})


def mu_to_r(f: Scalar) -> Scalar:
    return f.subs({"mu": 2 * I * R})


def small_h() -> Scalar:
    """The real parameter with hbar = 2 i h_small."""
    return H / (2 * I)


def radius_frame_check() -> Verdict:
    """Round trip r <-> mu and x^2+y^2+z^2 + h_small^2 - r^2 = 0 with Cas = (h^2 - mu^2)/4."""
    f = parse_scalar("r^3 - 2*r + 1/r", ("r",))
    if mu_to_r(r_to_mu(f)) != f:
        return failed("quantum radius", "r -> mu -> r does not round-trip")
    cas = (H * H - MU * MU) / 4
    if not (cas + small_h() ** 2 - r_hat() ** 2).is_zero():
        return failed("quantum radius", "Cas + h_small^2 - r^2 != 0")
    return passed("quantum radius")


def rho(u: U2, convention: str) -> NCPolynomial:
    """The element that r^2 from a harmonic decomposition is sent to."""
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    sign = -1 if convention == "radius" else 1
    return u.cas + u.al.const(H * H * Fraction(sign, 4))


# -- classical harmonic decomposition -------------------------------------------------

def _laplacian(p: Scalar) -> Scalar:
    return sum((p.derivative(v).derivative(v) for v in XYZ), ZERO)


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def harmonic_projection(p: Scalar, n: int) -> Scalar:
    """Harmonic part of a homogeneous degree-n polynomial in x, y, z."""
    r2 = X * X + Y * Y + Z * Z
    out = ZERO
    lap = p
    for j in range(n // 2 + 1):
        if j:
            lap = _laplacian(lap)
        if lap.is_zero():
            break
        c = Fraction((-1) ** j * _double_factorial(2 * n - 2 * j - 1),
                     _double_factorial(2 * n - 1) * _double_factorial(2 * j))
        out = out + c * r2 ** j * lap
    return out


def _homogeneous_parts(p: Scalar) -> dict[int, Scalar]:
    """Split by total degree in x, y, z; coefficients may involve other variables."""
    parts: dict[int, Scalar] = {}
    for ex, cx in enumerate(p.coefficients("x")):
        for ey, cy in enumerate(cx.coefficients("y")):
            for ez, cz in enumerate(cy.coefficients("z")):
                if cz.is_zero():
                    continue
                n = ex + ey + ez
                parts[n] = parts.get(n, ZERO) + cz * X ** ex * Y ** ey * Z ** ez
    return parts


def harmonic_decomposition(p: Scalar) -> list[tuple[int, Scalar]]:
    """p = sum (x^2+y^2+z^2)^j H_j with H_j harmonic; returns the pairs (j, H_j)."""
    r2 = X * X + Y * Y + Z * Z
    out: dict[int, Scalar] = {}
    for n, pn in sorted(_homogeneous_parts(p).items()):
        j = 0
        rest = pn
        while not rest.is_zero():
            deg = n - 2 * j
            hj = harmonic_projection(rest, deg)
            out[j] = out.get(j, ZERO) + hj
            rest = (rest - hj) / r2
            if rest.denominator().variables() & set(XYZ):
                raise ArithmeticError("harmonic decomposition left a non-polynomial remainder")
            j += 1
    return sorted((j, h) for j, h in out.items() if not h.is_zero())


# -- the quantizing map ------------------------------------------------------------------

def symmetrize(u: U2, p: Scalar) -> NCPolynomial:
    """Weyl symmetrization of a polynomial in x, y, z (coefficients may involve t, r, mu, h, rg)."""
    total = u.al.zero()
    for n, pn in _homogeneous_parts(p).items():
        for ex, cx in enumerate(pn.coefficients("x")):
            for ey, cy in enumerate(cx.coefficients("y")):
                for ez, c in enumerate(cy.coefficients("z")):
                    if c.is_zero():
                        continue
                    word = ["x"] * ex + ["y"] * ey + ["z"] * ez
                    perms = list(itertools.permutations(word))
                    acc = u.al.zero()
                    for perm in perms:
                        term = u.al.one()
                        for letter in perm:
                            term = term * u.g[letter]
                        acc = acc + term
                    total = total + _coefficient(u, c) * acc.scale(Fraction(1, len(perms)))
    return u.nf(total)


def _coefficient(u: U2, c: Scalar) -> NCPolynomial:
    """A coefficient f(t, r) as an element: t becomes the letter t, r becomes r^ in mu."""
    c = r_to_mu(c)
    if "t" not in c.variables():
        return u.al.const(c)
    out = u.al.zero()
    for e, ce in enumerate(c.coefficients("t")):
        if not ce.is_zero():
            out = out + (u.g["t"] ** e).scale(ce)
    return out


def alpha(u: U2, p: Scalar, convention: str = "radius") -> NCPolynomial:
    """alpha on a polynomial in x, y, z with coefficients rational in r (and polynomial in t)."""
    out = u.al.zero()
    rh = rho(u, convention)
    for j, hj in harmonic_decomposition(p):
        out = out + (rh ** j) * symmetrize(u, hj)
    return u.nf(out)


def alpha_isotypic(f: Scalar, k: int) -> IsotypicElement:
    """alpha(f(t, r) b^k) = f(t^, r^) b^^k, with r^ expressed through mu."""
    return IsotypicElement(r_to_mu(f), k)


# -- classical differential operators -----------------------------------------------------

DVARS = ("t", "x", "y", "z")


@dataclass(frozen=True)
class ClassicalOperator:
    """Right-ordered sum of coefficient * d^beta; beta is a sorted tuple of variable names."""

    terms: tuple  # of (beta, Scalar)

    @staticmethod
    def of(mapping: dict) -> "ClassicalOperator":
        clean = {tuple(sorted(b, key=DVARS.index)): Scalar.coerce(c) for b, c in mapping.items()}
        return ClassicalOperator(tuple(sorted(((b, c) for b, c in clean.items() if not c.is_zero()),
                                              key=lambda bc: (len(bc[0]), bc[0]))))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "ClassicalOperator") -> "ClassicalOperator":
        d = self.as_dict()
        for b, c in other.terms:
            d[b] = d.get(b, ZERO) + c
        return ClassicalOperator.of(d)

    def scale(self, c) -> "ClassicalOperator":
        return ClassicalOperator.of({b: v * c for b, v in self.terms})

    def __matmul__(self, other: "ClassicalOperator") -> "ClassicalOperator":
        """Composition (self after other), re-ordered with the classical Leibniz rule."""
        out: dict = {}
        for alpha_, a in self.terms:
            for beta, b in other.terms:
                # d^alpha (b g) = sum over sub-multisets gamma of alpha
                for mask in itertools.product((0, 1), repeat=len(alpha_)):
                    hit = [v for v, m in zip(alpha_, mask) if m]
                    keep = [v for v, m in zip(alpha_, mask) if not m]
                    db = b
                    for v in hit:
                        db = db.derivative(v)
                    if db.is_zero():
                        continue
                    key = tuple(sorted(keep + list(beta), key=DVARS.index))
                    out[key] = out.get(key, ZERO) + a * db
        return ClassicalOperator.of(out)

    def apply(self, f: Scalar) -> Scalar:
        total = ZERO
        for beta, c in self.terms:
            g = f
            for v in beta:
                g = g.derivative(v)
            total = total + c * g
        return total


def classical_q() -> ClassicalOperator:
    return ClassicalOperator.of({("x",): X, ("y",): Y, ("z",): Z})


def classical_laplacian() -> ClassicalOperator:
    return ClassicalOperator.of({("x", "x"): 1, ("y", "y"): 1, ("z", "z"): 1})


def classical_dt() -> ClassicalOperator:
    return ClassicalOperator.of({("t",): 1})


def quantum_derivative(u: U2, v: str) -> NCPolynomial:
    return u.dt if v == "t" else u.g["D" + v]


def alpha_operator(u: U2, op: ClassicalOperator, convention: str = "radius") -> NCPolynomial:
    """sum alpha(a_beta) d^_beta."""
    total = u.al.zero()
    for beta, a in op.terms:
        d = u.al.one()
        for v in beta:
            d = d * quantum_derivative(u, v)
        total = total + alpha(u, a, convention) * d
    return u.nf(total)


def alpha_q2_display(u: U2) -> NCPolynomial:
    """Q^2 + (h^2/12) Lap - (h/2) Q dt, as printed."""
    return u.nf(u.q_op * u.q_op + u.lap.scale(H * H / 12) - (u.q_op * u.dt).scale(H / 2))


def alpha_q2_report(u: U2) -> dict:
    """Which convention makes alpha(Q^2) equal the printed display, with the difference for each."""
    q2 = classical_q() @ classical_q()
    target = alpha_q2_display(u)
    out = {}
    for conv in CONVENTIONS:
        diff = alpha_operator(u, q2, conv) - target
        out[conv] = {"holds": diff.is_zero(), "difference": str(u.nf(diff))}
    holding = [c for c in CONVENTIONS if out[c]["holds"]]
    out["holds_under"] = holding
    return out


def alpha_injectivity_check(u: U2, bound: int = 6, convention: str = "radius") -> Verdict:
    """alpha is injective on {t^a cas^p b^k : a + 2p + k <= bound}."""
    from .exact_core import rank
    from .nc_engine import word_key

    b = -I * X - Y
    cas = X * X + Y * Y + Z * Z
    images = []
    for a in range(bound + 1):
        for p in range((bound - a) // 2 + 1):
            for k in range(bound - a - 2 * p + 1):
                images.append(alpha(u, T ** a * cas ** p * b ** k, convention))
    words = sorted({w for im in images for w in im.terms}, key=word_key)
    col = {w: j for j, w in enumerate(words)}
    rows = []
    for im in images:
        row = [ZERO] * len(words)
        for w, c in im.terms.items():
            row[col[w]] = c
        rows.append(row)
    rk = rank(ScalarMatrix(rows))
    if rk != len(images):
        return failed("alpha injective", f"rank {rk} < {len(images)}")
    return passed("alpha injective", basis=len(images))


# -- d'Alembert, Dirac and Maxwell ----------------------------------------------------------

def dalembert(u: U2) -> NCPolynomial:
    return u.nf(u.dt * u.dt - u.lap)


def gamma_matrices() -> list[ScalarMatrix]:
    """Dirac representation: gamma^0 = diag(1, 1, -1, -1), gamma^k = [[0, s_k], [-s_k, 0]]."""
    sig = [
        [[0, 1], [1, 0]],
        [[0, -I], [I, 0]],
        [[1, 0], [0, -1]],
    ]
    g0 = ScalarMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]])
    out = [g0]
    for s in sig:
        rows = [[0] * 4 for _ in range(4)]
        for i in range(2):
            for j in range(2):
                rows[i][2 + j] = s[i][j]
                rows[2 + i][j] = -Scalar.coerce(s[i][j])
        out.append(ScalarMatrix(rows))
    return out


def clifford_check(gammas: list[ScalarMatrix]) -> Verdict:
    metric = [1, -1, -1, -1]
    for a in range(4):
        for b in range(4):
            anti = gammas[a] @ gammas[b] + gammas[b] @ gammas[a]
            want = ScalarMatrix.identity(4).scale(2 * metric[a]) if a == b else ScalarMatrix.zeros(4)
            if anti != want:
                return failed("Clifford", f"gamma^{a} gamma^{b} + gamma^{b} gamma^{a} != 2 g^({a}{b}) I")
    return passed("Clifford")


def dirac_operator(u: U2, gammas: list[ScalarMatrix] | None = None) -> NCMatrix:
    gammas = gammas or gamma_matrices()
    ders = [u.dt, u.g["Dx"], u.g["Dy"], u.g["Dz"]]
    signs = [1, -1, -1, -1]
    total = NCMatrix.from_scalar(u.al, ScalarMatrix.zeros(4))
    for g, d, s in zip(gammas, ders, signs):
        total = total + NCMatrix.from_scalar(u.al, g.scale(s)).map(lambda e, d=d: e * d)
    return total


def dirac_check(u: U2, gammas: list[ScalarMatrix] | None = None) -> Verdict:
    """D^2 = box I entrywise in normal form."""
    gammas = gammas or gamma_matrices()
    cl = clifford_check(gammas)
    if not cl:
        return cl
    dop = dirac_operator(u, gammas)
    sq = dop @ dop
    box = dalembert(u)
    for i in range(4):
        for j in range(4):
            want = box if i == j else u.al.zero()
            got = u.nf(sq[i, j])
            if got != want:
                return failed("Dirac square", f"entry ({i},{j}) = {got}")
    return passed("Dirac square")


def maxwell(u: U2, v: list[NCPolynomial]) -> list[NCPolynomial]:
    """Mw(v) = box v - grad (dt v0 - dx v1 - dy v2 - dz v3), all actions by the oracle."""
    ders = [u.dt, u.g["Dx"], u.g["Dy"], u.g["Dz"]]
    box = dalembert(u)
    div = u.act(ders[0], v[0])
    for d, comp in zip(ders[1:], v[1:]):
        div = div - u.act(d, comp)
    return [u.act(box, comp) - u.act(d, div) for comp, d in zip(v, ders)]


def gradient(u: U2, g: NCPolynomial) -> list[NCPolynomial]:
    return [u.act(d, g) for d in (u.dt, u.g["Dx"], u.g["Dy"], u.g["Dz"])]


# -- metrics and the Laplace-Beltrami operator -------------------------------------------------

@dataclass(frozen=True)
class MetricProfile:
    phi: Scalar

    def __post_init__(self):
        if self.phi.is_zero():
            raise ValueError("degenerate metric: phi is identically zero")
        extra = self.phi.variables() - {"r", "rg"}
        if extra:
            raise ValueError(f"phi may only depend on r and rg, not {sorted(extra)}")

    @staticmethod
    def parse(text: str) -> "MetricProfile":
        return MetricProfile(parse_scalar(text, ("r", "rg")))

    def as_dict(self) -> dict:
        return {"phi": format_scalar(self.phi)}


def schwarzschild() -> MetricProfile:
    return MetricProfile(1 - var("rg") / R)


def lb_classical(metric: MetricProfile) -> dict[str, Scalar]:
    """Coefficients (functions of r) of dt^2, Q^2, Q and the Laplacian in the invariant form."""
    phi = metric.phi
    dphi = phi.derivative("r")
    return {
        "dt2": phi.inverse(),
        "Q2": -(phi - 1) / (R * R),
        "Q": -((phi - 1) / R + dphi) / R,
        "Lap": Scalar(-1),
    }


def lb_classical_operator(metric: MetricProfile) -> ClassicalOperator:
    """The same operator, right-ordered, with Q^2 expanded classically."""
    c = lb_classical(metric)
    q = classical_q()
    return ((classical_dt() @ classical_dt()).scale(c["dt2"]) + (q @ q).scale(c["Q2"]) + q.scale(c["Q"])
            + classical_laplacian().scale(c["Lap"]))


def lb_display(metric: MetricProfile) -> dict[str, Scalar]:
    """The five-term quantum display: coefficients of dt^2, Q^2, Q, Q dt and the Laplacian, in mu."""
    phi = metric.phi
    dphi = phi.derivative("r")
    rh2 = r_hat() ** 2
    phi_q = r_to_mu(phi)
    dphi_q = r_to_mu(dphi)
    ratio = (phi_q - 1) / rh2
    return {
        "dt2": phi_q.inverse(),
        "Q2": -ratio,
        "Q": -(ratio + dphi_q / r_hat()),
        "Qdt": H / 2 * ratio,
        "Lap": -(1 + H * H / 12 * ratio),
    }


def display_to_basis(coeffs: dict[str, Scalar]) -> dict[str, Scalar]:
    """Rewrite dt^2, Q^2, Q dt and Lap in the basis id, Dt, Q, L0..L3 (dt = Dt - 2/h)."""
    out: dict[str, Scalar] = {}

    def add(name, c):
        out[name] = out.get(name, ZERO) + c

    for name, c in coeffs.items():
        if name == "dt2":
            add("L0", c)
            add("Dt", -4 / H * c)
            add("id", 4 / (H * H) * c)
        elif name == "Q2":
            add("L3", c)
        elif name == "Qdt":
            add("L2", c)
            add("Q", -2 / H * c)
        elif name == "Lap":
            add("L1", c)
        elif name == "Q":
            add("Q", c)
        elif name == "dt":
            add("Dt", c)
            add("id", -2 / H * c)
        else:
            add(name, c)
    return {k: v for k, v in out.items() if not v.is_zero()}


def basis_to_nc(u: U2, coeffs: dict[str, Scalar]) -> NCPolynomial:
    total = u.al.zero()
    for name, c in coeffs.items():
        op = u.al.one() if name == "id" else u.ops[name]
        total = total + op.scale(c)
    return u.nf(total)


def lb_quantum(metric: MetricProfile) -> dict[str, Scalar]:
    """The quantized operator in the invariant basis, read from the display."""
    return display_to_basis(lb_display(metric))


def lb_alpha_check(u: U2, metric: MetricProfile, convention: str = "paper") -> Verdict:
    """alpha(classical LB) equals the five-term display as elements of the Weyl algebra."""
    quantized = alpha_operator(u, lb_classical_operator(metric), convention)
    display = basis_to_nc(u, lb_quantum(metric))
    diff = u.nf(quantized - display)
    if not diff.is_zero():
        return failed("LB quantization", f"alpha(LB) - display = {diff}", convention=convention)
    return passed("LB quantization", convention=convention)


# -- difference operators ---------------------------------------------------------------------

Shift = tuple  # (dt, dmu) as Fractions, in units of h


@dataclass(frozen=True)
class DifferenceOperator:
    """sum coeff(t, mu) f(t + dt h, mu + dmu h) on the component b^k."""

    terms: tuple  # of (Shift, Scalar)
    k: int

    @staticmethod
    def of(mapping: dict, k: int) -> "DifferenceOperator":
        items = []
        for (dt, dmu), c in mapping.items():
            c = Scalar.coerce(c)
            if not c.is_zero():
                items.append(((Fraction(dt), Fraction(dmu)), c))
        return DifferenceOperator(tuple(sorted(items, key=lambda sc: sc[0])), k)

    def as_map(self) -> dict:
        return dict(self.terms)

    def apply(self, f: Scalar) -> Scalar:
        total = ZERO
        for (dt, dmu), c in self.terms:
            total = total + c * f.subs({"t": T + H * dt, "mu": MU + H * dmu})
        return total

    def __add__(self, other: "DifferenceOperator") -> "DifferenceOperator":
        if other.k != self.k:
            raise ValueError("difference operators on different components")
        d = self.as_map()
        for s, c in other.terms:
            d[s] = d.get(s, ZERO) + c
        return DifferenceOperator.of(d, self.k)

    def scale(self, c) -> "DifferenceOperator":
        return DifferenceOperator.of({s: v * c for s, v in self.terms}, self.k)

    def __matmul__(self, other: "DifferenceOperator") -> "DifferenceOperator":
        """self after other."""
        out: dict = {}
        for (s1, c1) in self.terms:
            for (s2, c2) in other.terms:
                shifted = c2.subs({"t": T + H * s1[0], "mu": MU + H * s1[1]})
                key = (s1[0] + s2[0], s1[1] + s2[1])
                out[key] = out.get(key, ZERO) + c1 * shifted
        return DifferenceOperator.of(out, self.k)

    def subs(self, values: dict) -> "DifferenceOperator":
        return DifferenceOperator.of({s: c.subs(values) for s, c in self.terms}, self.k)

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "terms": [{"coeff": format_scalar(c), "dt": str(s[0]), "dmu": str(s[1])} for s, c in self.terms],
        }

    def __str__(self):
        parts = []
        for (dt, dmu), c in self.terms:
            arg_t = "t" if dt == 0 else f"t + {_fmt_shift(dt)}"
            arg_mu = "mu" if dmu == 0 else (f"mu + {_fmt_shift(dmu)}" if dmu > 0 else f"mu - {_fmt_shift(-dmu)}")
            parts.append(f"({format_scalar(c)}) f({arg_t}, {arg_mu})")
        return " + ".join(parts) if parts else "0"


def _fmt_shift(s: Fraction) -> str:
    if s == 1:
        return "h"
    if s.denominator == 1:
        return f"{s.numerator}*h"
    return f"{s.numerator}/{s.denominator}*h" if s.numerator != 1 else f"h/{s.denominator}"


def basis_difference(op: str, k: int) -> DifferenceOperator:
    """The difference operator of one invariant basis operator on component k."""
    half = Fraction(1, 2)
    if op == "id":
        return DifferenceOperator.of({(0, 0): 1}, k)
    if op in ("Dt", "dt"):
        m = {(half, -1): 1 / H - (k + 1) / MU, (half, 1): 1 / H + (k + 1) / MU}
        if op == "dt":
            m[(0, 0)] = -2 / H
        return DifferenceOperator.of(m, k)
    if op == "Q":
        a = (H * (k + 1) / 2 - MU * MU / (2 * H)) / MU
        return DifferenceOperator.of({(half, -1): Fraction(k, 2) + a, (half, 1): Fraction(k, 2) - a}, k)
    index = {"L0": 0, "L1": 1, "L2": 2, "L3": 3}.get(op)
    if index is None:
        raise ValueError(f"{op!r} is not an invariant basis operator")
    sm = spectral_matrices()
    w = [4 / H / H, ZERO, Scalar(2 * k) / H, Scalar(k * k)]
    c0 = sum((sm.p0[index, j] * w[j] for j in range(4)), ZERO)
    cp = sum((sm.p_plus[index, j] * w[j] for j in range(4)), ZERO)
    cm = sum((sm.p_minus[index, j] * w[j] for j in range(4)), ZERO)
    return DifferenceOperator.of({(1, 0): c0, (1, 2): cp, (1, -2): cm}, k)


def difference_form(coeffs: dict[str, Scalar], k: int) -> DifferenceOperator:
    """A (t, mu)-combination of invariant operators as a difference operator on component k.

    Coefficients multiply from the left and are not shifted.
    """
    total = DifferenceOperator.of({}, k)
    for name, c in coeffs.items():
        total = total + basis_difference(name, k).scale(c)
    return total


def laplace_display(k: int = 0) -> DifferenceOperator:
    """The printed three-shift Laplacian on b^0, as a difference operator."""
    if k:
        raise ValueError("the printed three-shift formula is for k = 0")
    return DifferenceOperator.of({
        (1, 0): 2 / (H * H),
        (1, -2): -1 / (H * H) + 2 / (MU * H),
        (1, 2): -1 / (H * H) - 2 / (MU * H),
    }, 0)


def round_trip_check(op: str, f: Scalar, k: int) -> Verdict:
    """difference_form(op) applied to f equals the closed-form action."""
    got = basis_difference(op, k).apply(f)
    want = act_closed(op, IsotypicElement(f, k)).f
    if got != want:
        return failed("difference round trip", f"{op} on ({f}) b^{k}: {got} vs {want}")
    return passed("difference round trip")


def lb_apply(metric: MetricProfile, f: Scalar, k: int) -> tuple[DifferenceOperator, Scalar]:
    op = difference_form(lb_quantum(metric), k)
    return op, op.apply(f)
