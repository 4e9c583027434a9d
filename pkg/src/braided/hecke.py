"""Braidings on V (x) V: Yang-Baxter and Hecke checks, skew-inverse, extension to
V + V*, q-symmetrizers and the Poincare-Hilbert series they determine.

Matrices follow the lower-index-row convention: for ``R(x_i (x) x_j) =
x_k (x) x_l R_ij^kl`` the entry ``R_ij^kl`` sits in row ``i*d + j`` and column
``k*d + l``.  Operator products are then ordinary matrix products taken in the
written order, and composing "first A, then B" on coefficient row vectors is
``v @ A @ B``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import flint

from .checks import Verdict, failed, passed
from .exact_core import (
    ONE,
    ZERO,
    NoSolution,
    Scalar,
    ScalarMatrix,
    UniPoly,
    parse_scalar,
    q_number,
    rank,
    reconstruct_rational,
    solve_linear,
    var,
)
from .grammar import ParseError


class NotSkewInvertible(Exception):
    """The defining system for the skew-inverse has no solution."""


@dataclass(frozen=True)
class Braiding:
    dim: int
    matrix: ScalarMatrix
    hecke_q: Scalar | None = None
    name: str = ""

    def __post_init__(self):
        n = self.dim * self.dim
        if self.matrix.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix for dim {self.dim}")

    def entry(self, i, j, k, l) -> Scalar:
        """R_ij^kl with 0-based indices."""
        d = self.dim
        return self.matrix.rows[i * d + j][k * d + l]

    def inverse(self) -> "Braiding":
        # R^-1 has eigenvalues q^-1 and -q, so it is Hecke with parameter q^-1
        q = None if self.hecke_q is None else self.hecke_q.inverse()
        return Braiding(self.dim, matrix_inverse(self.matrix), q, self.name + "^-1")


def matrix_inverse(m: ScalarMatrix) -> ScalarMatrix:
    try:
        return solve_linear(m, ScalarMatrix.identity(m.nrows))
    except NoSolution:
        raise ValueError("matrix is singular") from None


@dataclass(frozen=True)
class SkewData:
    psi: ScalarMatrix
    b_op: ScalarMatrix
    c_op: ScalarMatrix


@dataclass(frozen=True)
class PHReport:
    dims_plus: tuple[int, ...]
    dims_minus: tuple[int, ...]
    p_minus: tuple[UniPoly, UniPoly] | None
    bi_rank: tuple[int, int] | None
    series_identity: bool

    def as_dict(self) -> dict:
        out = {
            "dims_plus": list(self.dims_plus),
            "dims_minus": list(self.dims_minus),
            "series_identity": self.series_identity,
        }
        if self.p_minus is not None:
            out["p_minus"] = {"N": str(self.p_minus[0]), "D": str(self.p_minus[1])}
            out["bi_rank"] = list(self.bi_rank)
        else:
            out["p_minus"] = None
            out["error"] = "rational reconstruction failed within the available terms"
        return out


# -- tensor placement -------------------------------------------------------

def embed(m: ScalarMatrix, d: int, pos: int, n: int) -> ScalarMatrix:
    """I^(pos) (x) m (x) I^(rest) on V^(x)n; ``m`` acts on consecutive factors from ``pos`` (0-based)."""
    k = 0
    size = m.nrows
    while d ** k < size:
        k += 1
    if d ** k != size or pos + k > n:
        raise ValueError("operator does not fit the tensor power")
    left, right = d ** pos, d ** (n - pos - k)
    return _embed_cached(m, left, right)


@lru_cache(maxsize=512)
def _embed_cached(m: ScalarMatrix, left: int, right: int) -> ScalarMatrix:
    out = m
    if right > 1:
        out = out.kron(ScalarMatrix.identity(right))
    if left > 1:
        out = ScalarMatrix.identity(left).kron(out)
    return out


def r_at(r: Braiding | ScalarMatrix, i: int, n: int, d: int | None = None) -> ScalarMatrix:
    """R_i acting on factors i, i+1 (1-based) of V^(x)n."""
    if isinstance(r, Braiding):
        d, m = r.dim, r.matrix
    else:
        m = r
    return embed(m, d, i - 1, n)


def partial_trace(m: ScalarMatrix, d: int, n: int, pos: int) -> ScalarMatrix:
    """Trace over factor ``pos`` (0-based) of an operator on V^(x)n."""
    left, right = d ** pos, d ** (n - pos - 1)
    size = left * right
    rows = [[ZERO] * size for _ in range(size)]
    for a in range(left):
        for c in range(right):
            row_out = a * right + c
            for b in range(d):
                row_in = (a * d + b) * right + c
                src = m.rows[row_in]
                for x in range(left):
                    for z in range(right):
                        v = src[(x * d + b) * right + z]
                        if not v.is_zero():
                            rows[row_out][x * right + z] = rows[row_out][x * right + z] + v
    return ScalarMatrix._wrap(rows)


def flip_matrix(d: int) -> ScalarMatrix:
    return ScalarMatrix.from_sparse(d * d, d * d, {(i * d + j, j * d + i): 1 for i in range(d) for j in range(d)})


def p13(d: int) -> ScalarMatrix:
    """The flip of the two outer factors of V^(x)3, viewed on V (x) V after tracing the middle."""
    return flip_matrix(d)


# -- presets ----------------------------------------------------------------

def flip(d: int) -> Braiding:
    return Braiding(d, flip_matrix(d), ONE, f"flip:{d}")


def standard(d: int = 2, q: Scalar | None = None) -> Braiding:
    """The standard (Drinfeld-Jimbo) Hecke symmetry of GL_q(d)."""
    q = var("q") if q is None else Scalar.coerce(q)
    entries = {}
    for i in range(d):
        entries[(i * d + i, i * d + i)] = q
        for j in range(d):
            if i != j:
                entries[(i * d + j, j * d + i)] = ONE
                if i > j:
                    entries[(i * d + j, i * d + j)] = q - q ** (-1)
    return Braiding(d, ScalarMatrix.from_sparse(d * d, d * d, entries), q, f"std:d={d}")


def superflip(m: int, n: int) -> Braiding:
    """R(x_i (x) x_j) = (-1)^(|i||j|) x_j (x) x_i with m even and n odd basis vectors."""
    d = m + n
    parity = [0] * m + [1] * n
    entries = {(i * d + j, j * d + i): (-1) ** (parity[i] * parity[j]) for i in range(d) for j in range(d)}
    return Braiding(d, ScalarMatrix.from_sparse(d * d, d * d, entries), ONE, f"superflip:{m}|{n}")


def identity_braiding(d: int) -> Braiding:
    """R = I: an involutive braiding which is not skew-invertible."""
    return Braiding(d, ScalarMatrix.identity(d * d), ONE, f"identity:{d}")


def preset(label: str) -> Braiding:
    """Parse preset names such as ``flip:2``, ``std:d=2``, ``superflip:1|1``."""
    kind, _, arg = label.partition(":")
    arg = arg.removeprefix("d=")
    try:
        if kind == "flip":
            return flip(int(arg or 2))
        if kind == "std":
            return standard(int(arg or 2))
        if kind == "superflip":
            m, _, n = (arg or "1|1").partition("|")
            return superflip(int(m), int(n))
        if kind == "identity":
            return identity_braiding(int(arg or 2))
    except ValueError:
        pass
    raise ValueError(f"unknown braiding preset {label!r}")


# -- file format -------------------------------------------------------------

def load_braiding(text: str) -> Braiding:
    """Read the JSON R-matrix format: ``{"dim", "q"?, "entries": [{k,l,i,j,value}]}``.

    Indices are 1-based, as in R(x_i (x) x_j) = x_k (x) x_l R_ij^kl.  Omitted
    entries are zero.  Errors are raised as ParseError with line and column.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, text, exc.pos) from None
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise ParseError("expected an object with 'dim' and 'entries'", text, 0)
    d = doc["dim"]
    if not isinstance(d, int) or d < 1:
        raise ParseError("'dim' must be a positive integer", text, text.find('"dim"'))
    q = None
    if doc.get("q") is not None:
        q = _parse_field(text, str(doc["q"]), "q")
    entries = {}
    for n, rec in enumerate(doc["entries"]):
        try:
            i, j, k, l = (int(rec[key]) - 1 for key in ("i", "j", "k", "l"))
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"entry {n} needs integer fields i, j, k, l", text, _locate(text, n)) from None
        if not all(0 <= v < d for v in (i, j, k, l)):
            raise ParseError(f"entry {n} has an index outside 1..{d}", text, _locate(text, n))
        entries[(i * d + j, k * d + l)] = _parse_field(text, str(rec.get("value", "0")), f"entry {n}")
    return Braiding(d, ScalarMatrix.from_sparse(d * d, d * d, entries), q, "file")


def _locate(text: str, n: int) -> int:
    pos = text.find('"entries"')
    for _ in range(n + 1):
        nxt = text.find("{", pos + 1)
        if nxt < 0:
            break
        pos = nxt
    return max(pos, 0)


def _parse_field(text: str, value: str, where: str) -> Scalar:
    try:
        return parse_scalar(value, ("q", "h"))
    except ParseError as exc:
        pos = text.find(json.dumps(value))
        raise ParseError(f"{where}: {exc.message}", text, max(pos, 0) + 1 + exc.column - 1) from None


def dump_braiding(r: Braiding) -> str:
    d = r.dim
    entries = []
    for row, cols in enumerate(r.matrix.nonzero_rows()):
        i, j = divmod(row, d)
        for col, v in cols:
            k, l = divmod(col, d)
            entries.append({"k": k + 1, "l": l + 1, "i": i + 1, "j": j + 1, "value": str(v)})
    doc = {"dim": d, "entries": entries}
    if r.hecke_q is not None:
        doc["q"] = str(r.hecke_q)
    return json.dumps(doc, indent=1)


# -- braiding checks -----------------------------------------------------------

def check_qybe(r: Braiding) -> ScalarMatrix:
    """R12 R23 R12 - R23 R12 R23 on V^(x)3."""
    r12, r23 = r_at(r, 1, 3), r_at(r, 2, 3)
    return r12 @ r23 @ r12 - r23 @ r12 @ r23


def check_hecke(r: Braiding, q) -> ScalarMatrix:
    """(R - q I)(R + q^-1 I)."""
    q = Scalar.coerce(q)
    if q.is_zero():
        raise ValueError("Hecke parameter must be nonzero")
    ident = ScalarMatrix.identity(r.matrix.nrows)
    return (r.matrix - ident.scale(q)) @ (r.matrix + ident.scale(q.inverse()))


def is_involutive(r: Braiding) -> bool:
    return (r.matrix @ r.matrix) == ScalarMatrix.identity(r.matrix.nrows)


def skew_equalities(r: ScalarMatrix, psi: ScalarMatrix, d: int) -> tuple[ScalarMatrix, ScalarMatrix]:
    """Tr_(2) R12 Psi23 and Tr_(2) Psi12 R23, computed by explicit contraction on V^(x)3."""
    left = partial_trace(embed(r, d, 0, 3) @ embed(psi, d, 1, 3), d, 3, 1)
    right = partial_trace(embed(psi, d, 0, 3) @ embed(r, d, 1, 3), d, 3, 1)
    return left, right


def skew_inverse(r: Braiding) -> SkewData:
    """Solve both defining equalities for Psi; raise NotSkewInvertible if impossible."""
    d = r.dim
    n4 = d ** 4

    def unknown(u, v, w, z):
        return ((u * d + v) * d + w) * d + z

    rows, rhs = [], []
    for a in range(d):
        for c in range(d):
            for x in range(d):
                for z in range(d):
                    target = ONE if (a == z and c == x) else ZERO
                    # sum_{b,y} R_ab^xy Psi_yc^bz
                    row = [ZERO] * n4
                    for b in range(d):
                        for y in range(d):
                            coef = r.entry(a, b, x, y)
                            if not coef.is_zero():
                                idx = unknown(y, c, b, z)
                                row[idx] = row[idx] + coef
                    rows.append(row)
                    rhs.append([target])
                    # sum_{b,y} Psi_ab^xy R_yc^bz
                    row = [ZERO] * n4
                    for b in range(d):
                        for y in range(d):
                            coef = r.entry(y, c, b, z)
                            if not coef.is_zero():
                                idx = unknown(a, b, x, y)
                                row[idx] = row[idx] + coef
                    rows.append(row)
                    rhs.append([target])
    try:
        sol = solve_linear(ScalarMatrix._wrap(rows), ScalarMatrix._wrap(rhs))
    except NoSolution:
        raise NotSkewInvertible(f"{r.name or 'braiding'} is not skew-invertible") from None
    psi = ScalarMatrix._wrap([[sol.rows[row * d * d + col][0] for col in range(d * d)] for row in range(d * d)])
    return SkewData(psi, *b_c_operators(psi, d))


def b_c_operators(psi: ScalarMatrix, d: int) -> tuple[ScalarMatrix, ScalarMatrix]:
    """B_i^j = Psi_ki^kj and C_i^j = Psi_ik^jk."""
    b = [[sum((psi.rows[k * d + i][k * d + j] for k in range(d)), ZERO) for j in range(d)] for i in range(d)]
    c = [[sum((psi.rows[i * d + k][j * d + k] for k in range(d)), ZERO) for j in range(d)] for i in range(d)]
    return ScalarMatrix._wrap(b), ScalarMatrix._wrap(c)


def verify_skew(r: Braiding, s: SkewData) -> Verdict:
    left, right = skew_equalities(r.matrix, s.psi, r.dim)
    target = flip_matrix(r.dim)
    if left != target:
        return failed("skew-inverse", "Tr_(2) R12 Psi23 differs from P13")
    if right != target:
        return failed("skew-inverse", "Tr_(2) Psi12 R23 differs from P13")
    return passed("skew-inverse")


# -- extension to V + V* -------------------------------------------------------

def extend_braiding(r: Braiding, s: SkewData) -> Braiding:
    """The braiding on (V + V*)^(x)2; V* basis vectors carry indices d..2d-1."""
    d = r.dim
    e = 2 * d
    rinv = matrix_inverse(r.matrix)
    entries = {}

    def put(a, b, c, dd, v):
        if not v.is_zero():
            entries[(a * e + b, c * e + dd)] = v

    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    # R(x_i x_j) = x_k x_l R_ij^kl
                    put(i, j, k, l, r.matrix.rows[i * d + j][k * d + l])
                    # R(x^i x^j) = x^k x^l R_lk^ji
                    put(d + i, d + j, d + k, d + l, r.matrix.rows[l * d + k][j * d + i])
                    # R(x_i x^j) = x^k x_l (R^-1)_ki^lj
                    put(i, d + j, d + k, l, rinv.rows[k * d + i][l * d + j])
                    # R(x^j x_i) = x_k x^l Psi_li^kj
                    put(d + j, i, k, d + l, s.psi.rows[l * d + i][k * d + j])
    return Braiding(e, ScalarMatrix.from_sparse(e * e, e * e, entries), r.hecke_q, f"ext({r.name})")


def embedding_invariance(ext: Braiding) -> Verdict:
    """Check that 1 -> sum_i x^i (x) x_i commutes with every basis vector w via the braiding."""
    e = ext.dim
    d = e // 2
    r12, r23 = r_at(ext, 1, 3), r_at(ext, 2, 3)
    for w in range(e):
        ew = [ZERO] * e ** 3
        we = [ZERO] * e ** 3
        for i in range(d):
            ew[((d + i) * e + i) * e + w] = ONE
            we[(w * e + d + i) * e + i] = ONE
        row = ScalarMatrix._wrap([ew])
        if row @ r23 @ r12 != ScalarMatrix._wrap([we]):
            return failed("embedding-invariance", f"R12 R23 (e (x) w) != w (x) e for basis vector {w}")
        row = ScalarMatrix._wrap([we])
        if row @ r12 @ r23 != ScalarMatrix._wrap([ew]):
            return failed("embedding-invariance", f"R23 R12 (w (x) e) != e (x) w for basis vector {w}")
    return passed("embedding-invariance")


# -- symmetrizers and Poincare-Hilbert series ------------------------------------

def symmetrizer(r: Braiding, k: int, sign: int) -> ScalarMatrix:
    """The q-(skew)symmetrizer P_+^(k) (sign=+1) or P_-^(k) (sign=-1) on V^(x)k."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if k < 1:
        raise ValueError("k must be at least 1")
    if r.hecke_q is None:
        raise ValueError("symmetrizers need the Hecke parameter q")
    return _symmetrizer(r, k, sign)


@lru_cache(maxsize=64)
def _symmetrizer(r: Braiding, k: int, sign: int) -> ScalarMatrix:
    d = r.dim
    if k == 1:
        return ScalarMatrix.identity(d)
    q = r.hecke_q
    for n in range(1, k + 1):
        if q_number(n, q).is_zero():
            raise ValueError(f"q-number ({n})_q vanishes; q is not generic")
    prev = embed(_symmetrizer(r, k - 1, sign), d, 0, k)
    middle = ScalarMatrix.identity(d ** k).scale(q ** (-sign * (k - 1))) + r_at(r, k - 1, k).scale(
        sign * q_number(k - 1, q)
    )
    return (prev @ middle @ prev).scale(q_number(k, q).inverse())


def dimensions(r: Braiding, kmax: int, sign: int) -> list[int]:
    return [1] + [rank(symmetrizer(r, k, sign)) for k in range(1, kmax + 1)]


def ph_series(r: Braiding, kmax: int) -> PHReport:
    """Ranks of the symmetrizers, the rational form of P_-(t) and the bi-rank."""
    plus = dimensions(r, kmax, 1)
    minus = dimensions(r, kmax, -1)
    # P_+(t) P_-(-t) = 1 through order kmax
    identity_holds = all(
        sum(plus[j] * minus[k - j] * (-1) ** (k - j) for j in range(k + 1)) == (1 if k == 0 else 0)
        for k in range(kmax + 1)
    )
    found = None
    for total in range(kmax + 1):
        for n in range(total + 1):
            m = total - n
            res = reconstruct_rational(minus, (m, n))
            if res is not None:
                found = res
                break
        if found:
            break
    if found is None:
        return PHReport(tuple(plus), tuple(minus), None, None, identity_holds)
    num, den = found
    return PHReport(tuple(plus), tuple(minus), (num, den), (num.degree, den.degree), identity_holds)


# -- mountain and reciprocal properties --------------------------------------------

def _rational_coeffs(p: UniPoly) -> list[Fraction]:
    return [c.to_fraction() for c in p.coeffs]


def mountain_check(p: UniPoly) -> Verdict:
    """Strict increase of the coefficients up to the middle, strict decrease after."""
    c = _rational_coeffs(p)
    n = len(c) - 1
    for i in range(1, n // 2 + 1):
        if not c[i - 1] < c[i]:
            return failed("mountain", f"c_{i - 1} = {c[i - 1]} >= c_{i} = {c[i]}", index=i)
    for i in range((n + 1) // 2 + 1, n + 1):
        if not c[i - 1] > c[i]:
            return failed("mountain", f"c_{i - 1} = {c[i - 1]} <= c_{i} = {c[i]}", index=i)
    return passed("mountain")


def is_reciprocal(p: UniPoly) -> bool:
    return p.coeffs == tuple(reversed(p.coeffs))


def reciprocal_check(num: UniPoly, den: UniPoly | None = None) -> Verdict:
    """N(t) and D(-t) are both reciprocal."""
    if not is_reciprocal(num):
        return failed("reciprocal", f"N(t) = {num} is not reciprocal")
    if den is not None and not is_reciprocal(den.substitute_neg()):
        return failed("reciprocal", f"D(-t) = {den.substitute_neg()} is not reciprocal")
    return passed("reciprocal")


@dataclass(frozen=True)
class MountainFactors:
    factors: tuple[UniPoly, ...]
    remainder: UniPoly | None

    @property
    def complete(self) -> bool:
        return self.remainder is None

    def as_dict(self) -> dict:
        return {
            "factors": [str(f) for f in self.factors],
            "remainder": None if self.remainder is None else str(self.remainder),
        }


def _to_fmpq_poly(coeffs: list[Fraction]) -> flint.fmpq_poly:
    return flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in coeffs])


def factor_mountain(p: UniPoly) -> MountainFactors:
    """Split off (1+t) factors first, then (1+c t+t^2) with rational c >= 2.

    Whatever is left (irrational or c < 2 quadratics) is returned as the
    remainder.
    """
    var_name = p.var
    one_plus_t = UniPoly([1, 1], var_name)
    factors: list[UniPoly] = []
    rest = p
    while rest.degree > 0 and rest(-1).is_zero():
        rest = rest.divmod(one_plus_t)[0]
        factors.append(one_plus_t)
    if rest.degree <= 0:
        return MountainFactors(tuple(factors), None)
    if not is_reciprocal(rest) or rest.degree % 2:
        return MountainFactors(tuple(factors), rest)
    c = _rational_coeffs(rest)
    m = rest.degree // 2
    # p(t) = t^m g(u) with u = t + 1/t, using V_j = t^j + t^-j: V_0 = 2, V_1 = u
    v_prev = flint.fmpq_poly([2])
    v_cur = flint.fmpq_poly([0, 1])
    g = flint.fmpq_poly([flint.fmpq(c[m].numerator, c[m].denominator)])
    u = flint.fmpq_poly([0, 1])
    for j in range(1, m + 1):
        g += _to_fmpq_poly([c[m + j]]) * v_cur
        v_prev, v_cur = v_cur, u * v_cur - v_prev
    _, parts = g.factor()
    quads = []
    leftover = g
    for f, mult in parts:
        if f.degree() == 1:
            a0, a1 = (Fraction(int(a.p), int(a.q)) for a in f.coeffs())
            cval = a0 / a1
            if cval >= 2:
                quads.extend([cval] * mult)
                linear = flint.fmpq_poly([flint.fmpq(cval.numerator, cval.denominator), 1])
                for _ in range(mult):
                    leftover = leftover // linear
    for cval in sorted(quads):
        factors.append(UniPoly([1, cval, 1], var_name))
    if leftover.degree() <= 0:
        return MountainFactors(tuple(factors), None)
    # back to t: t^deg h(t + 1/t)
    deg = leftover.degree()
    lcoeffs = [Fraction(int(a.p), int(a.q)) for a in leftover.coeffs()]
    out = UniPoly([0], var_name)
    base = UniPoly([1, 0, 1], var_name)  # t^2 + 1 = t (t + 1/t)
    for j, a in enumerate(lcoeffs):
        if a:
            out = out + (base ** j) * UniPoly([0] * (deg - j) + [1], var_name) * a
    return MountainFactors(tuple(factors), out)


def birank_trace(m: int, n: int, q) -> Scalar:
    """(m-n)_q / q^(m-n)."""
    q = Scalar.coerce(q)
    return q_number(m - n, q) / q ** (m - n)


def psi_inverse_check(r: Braiding, s: SkewData, birank: tuple[int, int]) -> Verdict:
    """Psi_{R^-1} = Psi + (q - q^-1) q^(2(m-n)) C1 B2 solves the defining system for R^-1."""
    m, n = birank
    q = r.hecke_q if r.hecke_q is not None else ONE
    d = r.dim
    factor = (q - q.inverse()) * q ** (2 * (m - n))
    psi_inv = s.psi + s.c_op.kron(s.b_op).scale(factor)
    rinv = matrix_inverse(r.matrix)
    left, right = skew_equalities(rinv, psi_inv, d)
    target = flip_matrix(d)
    if left != target or right != target:
        return failed("psi-inverse", f"Psi_(R^-1) formula fails for bi-rank ({m}|{n})")
    b2, c2 = b_c_operators(psi_inv, d)
    scale = q ** (2 * (m - n))
    if b2 != s.b_op.scale(scale) or c2 != s.c_op.scale(scale):
        return failed("psi-inverse", "B and C of R^-1 are not q^(2(m-n)) B, C")
    return passed("psi-inverse")
