"""Reflection Equation algebras, their modified form and braided Weyl algebras.

The generating matrices use the same index convention as the braidings:
row = lower index, column = upper index, and ``L_1 = L (x) I``.  The generic
Weyl action is defined by normal ordering followed by the counit.  For an
involutive braiding there is in addition a closed-form hbar-Leibniz rule,
and at R = P a coproduct evaluator and a circle-product evaluator, which
are all compared against the normal-ordering oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .checks import Verdict, failed, passed
from .exact_core import ONE, ZERO, Scalar, ScalarMatrix, _rref, var
from .hecke import (
    Braiding,
    SkewData,
    is_involutive,
    matrix_inverse,
    r_at,
    skew_inverse,
)
from .nc_engine import (
    Alphabet,
    NCMatrix,
    NCPolynomial,
    RewriteError,
    RewriteSystem,
    generator_matrix,
    solve_relations,
    word_key,
)

H = var("h")


def matrix_letters(symbol: str, d: int) -> list[str]:
    """Row-major letter names ``symbol_i^j``."""
    return [f"{symbol}_{i + 1}^{j + 1}" for i in range(d) for j in range(d)]


def _letter(symbol: str, i: int, j: int) -> str:
    return f"{symbol}_{i + 1}^{j + 1}"


def prune_relations(relations: list[NCPolynomial]) -> list[NCPolynomial]:
    """A reduced basis of the linear span, leading words first."""
    rels = [r for r in relations if not r.is_zero()]
    if not rels:
        return []
    alphabet = rels[0].alphabet
    words = sorted({w for r in rels for w in r.terms}, key=word_key, reverse=True)
    col = {w: i for i, w in enumerate(words)}
    rows = []
    for r in rels:
        row = [ZERO] * len(words)
        for w, c in r.terms.items():
            row[col[w]] = c
        rows.append(row)
    reduced, _ = _rref(rows, len(words))
    return [NCPolynomial(alphabet, {words[j]: c for j, c in enumerate(row) if not c.is_zero()}) for row in reduced]


def span_equal(a: list[NCPolynomial], b: list[NCPolynomial]) -> bool:
    pa, pb = prune_relations(a), prune_relations(b)
    return len(pa) == len(pb) and len(prune_relations(pa + pb)) == len(pa)


def _reorder(alphabet: Alphabet, relations, order):
    new = Alphabet([alphabet.names[i] for i in order], [alphabet.kinds[i] for i in order])
    return new, [r.relabel(new) for r in relations]


def find_pbw_order(alphabet: Alphabet, relations: list[NCPolynomial], blocks: list[list[int]] | None = None):
    """Search generator orders (within blocks) for a confluent PBW rewrite system.

    Returns ``(RewriteSystem, tried)``.  The natural order is tried first.
    Raises RewriteError when no order works.
    """
    blocks = blocks or [list(range(len(alphabet)))]
    tried = 0
    last_error = "no order tried"
    for perms in itertools.product(*(itertools.permutations(b) for b in blocks)):
        order = [i for p in perms for i in p]
        tried += 1
        alph, rels = _reorder(alphabet, relations, order)
        try:
            rules = solve_relations(alph, rels)
        except RewriteError as exc:
            last_error = str(exc)
            continue
        rs = RewriteSystem(alph, rules)
        verdict = rs.certify_confluence()
        if verdict:
            return rs, tried
        last_error = verdict.witness
    raise RewriteError(f"no generator order gives a confluent PBW system ({last_error})")


# -- RE and modified RE algebras ------------------------------------------------

@dataclass
class REPresentation:
    braiding: Braiding
    skew: SkewData | None
    symbol: str
    alphabet: Alphabet
    relations: list[NCPolynomial]
    modified: bool = False
    hbar: Scalar = H
    _system: RewriteSystem | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.braiding.dim

    def matrix(self) -> NCMatrix:
        return generator_matrix(self.alphabet, self.symbol, self.dim)

    def system(self) -> RewriteSystem:
        """A certified PBW rewrite system (order searched if needed)."""
        if self._system is None:
            self._system, _ = find_pbw_order(self.alphabet, self.relations)
        return self._system


def re_relation_matrix(r: ScalarMatrix, lmat: NCMatrix, d: int, hbar=None) -> NCMatrix:
    """R L1 R L1 - L1 R L1 R, minus hbar (R L1 - L1 R) when hbar is given."""
    l1 = lmat.embed(d, 0, 2)
    rr = NCMatrix.from_scalar(lmat.alphabet, r)
    out = rr @ l1 @ rr @ l1 - l1 @ rr @ l1 @ rr
    if hbar is not None:
        out = out - (rr @ l1 - l1 @ rr).scale(hbar)
    return out


def build_re(r: Braiding, symbol: str = "l", modified: bool = False, hbar=H) -> REPresentation:
    """Expand the (modified) Reflection Equation into scalar relations and prune them."""
    d = r.dim
    alphabet = Alphabet(matrix_letters(symbol, d))
    lmat = generator_matrix(alphabet, symbol, d)
    rel = re_relation_matrix(r.matrix, lmat, d, Scalar.coerce(hbar) if modified else None)
    try:
        skew = skew_inverse(r)
    except Exception:
        skew = None
    return REPresentation(r, skew, symbol, alphabet, prune_relations(rel.all_entries()), modified, Scalar.coerce(hbar))


def modified_re_shift_check(r: Braiding, sign: int = -1, hbar=H) -> Verdict:
    """Substitute L = hbar I + sign (q - 1/q) L~ and compare with the modified RE.

    With sign = -1 the RE matrix equals (q - 1/q)^2 times the modified RE
    matrix identically in the entries of L~.
    """
    d = r.dim
    q = r.hecke_q if r.hecke_q is not None else ONE
    c = q - q.inverse()
    hbar = Scalar.coerce(hbar)
    alphabet = Alphabet(matrix_letters("m", d))
    lt = generator_matrix(alphabet, "m", d)
    shifted = NCMatrix.identity(alphabet, d).scale(hbar) + lt.scale(c * sign)
    lhs = re_relation_matrix(r.matrix, shifted, d)
    rhs = re_relation_matrix(r.matrix, lt, d, hbar).scale(c * c)
    if c.is_zero():
        return failed("modified-RE shift", "q - 1/q = 0: the shift is degenerate")
    for i in range(d * d):
        for j in range(d * d):
            diff = lhs[i, j] - rhs[i, j]
            if not diff.is_zero():
                return failed("modified-RE shift", f"entry ({i}, {j}) differs by {diff}")
    return passed("modified-RE shift")


def gl_relations(m: int, symbol: str = "n", hbar=H) -> list[NCPolynomial]:
    """[n_i^j, n_k^l] = hbar (delta_k^j n_i^l - delta_i^l n_k^j), written as relations."""
    alphabet = Alphabet(matrix_letters(symbol, m))
    hbar = Scalar.coerce(hbar)
    g = {(i, j): alphabet.gen(_letter(symbol, i, j)) for i in range(m) for j in range(m)}
    rels = []
    for (i, j), (k, l) in itertools.combinations(sorted(g), 2):
        rhs = alphabet.zero()
        if k == j:
            rhs = rhs + g[(i, l)].scale(hbar)
        if i == l:
            rhs = rhs - g[(k, j)].scale(hbar)
        rels.append(g[(i, j)] * g[(k, l)] - g[(k, l)] * g[(i, j)] - rhs)
    return rels


# -- braided Weyl algebra -----------------------------------------------------------

@dataclass
class WeylPresentation:
    braiding: Braiding
    hbar: Scalar
    alphabet: Alphabet
    system: RewriteSystem
    relations_n: list[NCPolynomial]
    relations_d: list[NCPolynomial]
    relations_nd: list[NCPolynomial]
    n_symbol: str = "n"
    d_symbol: str = "d"

    @property
    def dim(self) -> int:
        return self.braiding.dim

    def n_matrix(self) -> NCMatrix:
        return generator_matrix(self.system.alphabet, self.n_symbol, self.dim)

    def d_matrix(self) -> NCMatrix:
        return generator_matrix(self.system.alphabet, self.d_symbol, self.dim)

    def d_tilde(self) -> NCMatrix:
        al = self.system.alphabet
        return NCMatrix.identity(al, self.dim).scale(self.hbar.inverse()) + self.d_matrix()

    def n(self, i: int, j: int) -> NCPolynomial:
        """n_i^j with 1-based indices."""
        return self.system.alphabet.gen(f"{self.n_symbol}_{i}^{j}")

    def d(self, i: int, j: int) -> NCPolynomial:
        return self.system.alphabet.gen(f"{self.d_symbol}_{i}^{j}")

    def normal_form(self, p: NCPolynomial) -> NCPolynomial:
        return self.system.normal_form(p)

    def act(self, dpoly: NCPolynomial, npoly: NCPolynomial) -> NCPolynomial:
        return act_weyl_oracle(self, dpoly, npoly)


def build_weyl(r: Braiding, hbar=H, n_symbol: str = "n", d_symbol: str = "d") -> WeylPresentation:
    """Expand the three relation sets and find a certified PBW order (coordinates first)."""
    d = r.dim
    hbar = Scalar.coerce(hbar)
    names = matrix_letters(n_symbol, d) + matrix_letters(d_symbol, d)
    alphabet = Alphabet(names, ["coord"] * (d * d) + ["deriv"] * (d * d))
    nmat = generator_matrix(alphabet, n_symbol, d)
    dmat = generator_matrix(alphabet, d_symbol, d)
    rinv = matrix_inverse(r.matrix)
    rr = NCMatrix.from_scalar(alphabet, r.matrix)
    ri = NCMatrix.from_scalar(alphabet, rinv)
    n1 = nmat.embed(d, 0, 2)
    d1 = dmat.embed(d, 0, 2)
    rel_n = rr @ n1 @ rr @ n1 - n1 @ rr @ n1 @ rr - (rr @ n1 - n1 @ rr).scale(hbar)
    rel_d = ri @ d1 @ ri @ d1 - d1 @ ri @ d1 @ ri
    rel_nd = d1 @ rr @ n1 @ rr - rr @ n1 @ ri @ d1 - rr - (d1 @ rr).scale(hbar)
    rn = prune_relations(rel_n.all_entries())
    rd = prune_relations(rel_d.all_entries())
    rnd = prune_relations(rel_nd.all_entries())
    k = d * d
    # find orders for the two subalgebras separately, then combine
    sub_n = Alphabet(names[:k])
    sub_d = Alphabet(names[k:], ["deriv"] * k)
    sys_n, _ = find_pbw_order(sub_n, [p.relabel(sub_n) for p in _restrict(rn, k, 0)])
    sys_d, _ = find_pbw_order(sub_d, [p.relabel(sub_d) for p in _restrict(rd, k, k)])
    order = list(sys_n.alphabet.names) + list(sys_d.alphabet.names)
    full = Alphabet(order, ["coord"] * k + ["deriv"] * k)
    rels = [p.relabel(full) for p in rn + rd + rnd]
    rules = solve_relations(full, rels)
    system = RewriteSystem(full, rules, name="weyl")
    verdict = system.certify_confluence()
    if not verdict:
        raise RewriteError(f"Weyl system is not confluent: {verdict.witness}")
    return WeylPresentation(
        r, hbar, full, system,
        [p.relabel(full) for p in rn], [p.relabel(full) for p in rd], [p.relabel(full) for p in rnd],
        n_symbol, d_symbol,
    )


def _restrict(rels, k, offset):
    # relations that only involve letters offset..offset+k-1, re-indexed
    alph = Alphabet(rels[0].alphabet.names[offset:offset + k]) if rels else None
    out = []
    for p in rels:
        terms = {}
        for w, c in p.terms.items():
            terms[tuple(i - offset for i in w)] = c
        out.append(NCPolynomial(alph, terms))
    return out


def act_weyl_oracle(w: WeylPresentation, dpoly: NCPolynomial, npoly: NCPolynomial,
                    eps: dict | None = None) -> NCPolynomial:
    """d |> n: normal-order d*n, then apply the counit to the trailing derivatives."""
    return w.system.evaluate_counit(dpoly * npoly, eps or {})


# -- R-chains and conjugated copies of N -----------------------------------------------

@dataclass(frozen=True)
class RChain:
    k: int
    p: int
    matrix: ScalarMatrix


def r_chain(r: Braiding, k: int, p: int, n: int) -> ScalarMatrix:
    """R_{p-1} ... R_{k+1} R_k R_{k+1} ... R_{p-1} on V^(x)n, symmetric in (k, p)."""
    return _r_chain(r, min(k, p), max(k, p), n)


@lru_cache(maxsize=None)
def _r_chain(r: Braiding, k: int, p: int, n: int) -> ScalarMatrix:
    if k == p or k < 1 or p > n:
        raise ValueError("chain indices must satisfy 1 <= k < p <= n")
    out = r_at(r, k, n)
    for i in range(k + 1, p):
        ri = r_at(r, i, n)
        out = ri @ out @ ri
    return out


def r_chain_alt(r: Braiding, k: int, p: int, n: int) -> ScalarMatrix:
    """The second form R_k R_{k+1} ... R_{p-1} ... R_{k+1} R_k."""
    k, p = min(k, p), max(k, p)
    out = r_at(r, p - 1, n)
    for i in range(p - 2, k - 1, -1):
        ri = r_at(r, i, n)
        out = ri @ out @ ri
    return out


def r_chain_check(r: Braiding, n: int) -> Verdict:
    for k, p in itertools.combinations(range(1, n + 1), 2):
        if r_chain(r, k, p, n) != r_chain_alt(r, k, p, n):
            return failed("R-chain forms", f"the two products differ for ({k}, {p})")
    return passed("R-chain forms")


def n_bar(r: Braiding, nmat: NCMatrix, k: int, n: int) -> NCMatrix:
    """R_{k-1} ... R_1 N_1 R_1^-1 ... R_{k-1}^-1 on V^(x)n."""
    d = r.dim
    alph = nmat.alphabet
    out = nmat.embed(d, 0, n)
    rinv = matrix_inverse(r.matrix)
    for i in range(1, k):
        left = NCMatrix.from_scalar(alph, r_at(r, i, n))
        right = NCMatrix.from_scalar(alph, r_at(rinv, i, n, d))
        out = left @ out @ right
    return out


def exchange_identities_check(r: Braiding, n: int = 4) -> Verdict:
    """R-chain exchange rules with the conjugated copies N_k of a generic matrix N."""
    d = r.dim
    alph = Alphabet(matrix_letters("n", d))
    nmat = generator_matrix(alph, "n", d)
    bars = {k: n_bar(r, nmat, k, n) for k in range(1, n + 1)}
    for k, p in itertools.permutations(range(1, n + 1), 2):
        ch = NCMatrix.from_scalar(alph, r_chain(r, k, p, n))
        if not (ch @ bars[k] - bars[p] @ ch).is_zero():
            return failed("N-bar exchange", f"chain ({p}{k}) does not carry N_{k} to N_{p}")
        for s in range(1, n + 1):
            if s not in (k, p) and not (ch @ bars[s] - bars[s] @ ch).is_zero():
                return failed("N-bar exchange", f"chain ({p}{k}) does not commute with N_{s}")
    return passed("N-bar exchange")


def hatd_exchange_check(w: WeylPresentation, k: int, n: int | None = None) -> Verdict:
    """D~_1 N_k = N_k D~_1 + hbar D~_1 R_(1k) in the Weyl algebra, on V^(x)n."""
    n = n or k
    r = w.braiding
    al = w.system.alphabet
    dt = w.d_tilde().embed(w.dim, 0, n)
    nk = n_bar(r, w.n_matrix(), k, n)
    ch = NCMatrix.from_scalar(al, r_chain(r, 1, k, n))
    diff = dt @ nk - nk @ dt - (dt @ ch).scale(w.hbar)
    for i, row in enumerate(diff.rows):
        for j, v in row.items():
            nf = w.normal_form(v)
            if not nf.is_zero():
                return failed("D~ exchange", f"entry ({i}, {j}) of the difference is {nf}", index=k)
    return passed("D~ exchange", k=k)


# -- the hbar-Leibniz rule for involutive R ------------------------------------------------

def cycle_operator(r: Braiding, ks: tuple[int, ...], n: int) -> ScalarMatrix:
    """R_(1 k1 ... ks) = R_(1 k1) R_(k1 k2) ... R_(k_{s-1} k_s)."""
    out = r_chain(r, 1, ks[0], n)
    for a, b in zip(ks, ks[1:]):
        out = out @ r_chain(r, a, b, n)
    return out


def _row_times(vec: dict[int, NCPolynomial], m: NCMatrix) -> dict[int, NCPolynomial]:
    out: dict[int, NCPolynomial] = {}
    for k, a in vec.items():
        for j, b in m.rows[k].items():
            prod = a * b
            out[j] = prod if j not in out else out[j] + prod
    return {j: v for j, v in out.items() if not v.is_zero()}


class LeibnizForms:
    """Both sides of D_1 |> N_2 ... N_p on V^(x)p for an involutive braiding, row by row."""

    def __init__(self, w: WeylPresentation, p: int):
        r = w.braiding
        if not is_involutive(r):
            raise ValueError("the closed-form Leibniz rule needs an involutive braiding")
        if p < 2:
            raise ValueError("p must be at least 2")
        self.w = w
        self.p = p
        al = w.system.alphabet
        d = w.dim
        self.bars = {k: n_bar(r, w.n_matrix(), k, p) for k in range(2, p + 1)}
        self.d1 = w.d_matrix().embed(d, 0, p)
        self.terms = []
        for s in range(1, p):
            for ks in itertools.combinations(range(2, p + 1), s):
                factors = [self.bars[j] for j in range(2, p + 1) if j not in ks]
                cyc = NCMatrix.from_scalar(al, cycle_operator(r, ks, p))
                self.terms.append((w.hbar ** (s - 1), factors + [cyc]))

    def lhs_row(self, row: int) -> dict[int, NCPolynomial]:
        vec = {row: self.w.system.alphabet.one()}
        vec = _row_times(vec, self.d1)
        for k in range(2, self.p + 1):
            vec = _row_times(vec, self.bars[k])
        out = {}
        for j, v in vec.items():
            a = self.w.system.evaluate_counit(v, {})
            if not a.is_zero():
                out[j] = a
        return out

    def rhs_row(self, row: int) -> dict[int, NCPolynomial]:
        al = self.w.system.alphabet
        total: dict[int, NCPolynomial] = {}
        for coeff, factors in self.terms:
            vec = {row: al.const(coeff)}
            for f in factors:
                vec = _row_times(vec, f)
                if not vec:
                    break
            for j, v in vec.items():
                total[j] = v if j not in total else total[j] + v
        return {j: self.w.normal_form(v) for j, v in total.items() if not self.w.normal_form(v).is_zero()}


def leibniz_closed_form(w: WeylPresentation, p: int, rows=None) -> Verdict:
    """Compare the closed-form action with the normal-ordering oracle on V^(x)p."""
    forms = LeibnizForms(w, p)
    size = w.dim ** p
    checked = 0
    for row in (range(size) if rows is None else rows):
        lhs, rhs = forms.lhs_row(row), forms.rhs_row(row)
        checked += 1
        if lhs != rhs:
            bad = next(j for j in set(lhs) | set(rhs) if lhs.get(j) != rhs.get(j))
            return failed(
                "Leibniz closed form",
                f"row {row}, column {bad}: oracle {lhs.get(bad, 0)} vs closed form {rhs.get(bad, 0)}",
                index=p,
            )
    return passed("Leibniz closed form", degree=p - 1, rows=checked)


# -- monomial evaluators at R = P --------------------------------------------------------

Monomial = tuple  # of (i, j) pairs, 0-based, meaning n_i^j in order


def monomial_poly(w: WeylPresentation, mono: Monomial) -> NCPolynomial:
    out = w.system.alphabet.one()
    for i, j in mono:
        out = out * w.n(i + 1, j + 1)
    return out


def coproduct_action(w: WeylPresentation, i: int, j: int, mono: Monomial) -> NCPolynomial:
    """d_i^j |> monomial via Delta(d_i^j) = d_i^j (x) 1 + 1 (x) d_i^j + hbar d_k^j (x) d_i^k."""
    hbar = w.hbar
    al = w.system.alphabet

    @lru_cache(maxsize=None)
    def act(i: int, j: int, k: int) -> NCPolynomial:
        if k == len(mono):
            return al.zero()
        a, b = mono[k]
        rest = monomial_poly(w, mono[k + 1:])
        out = act(i, j, k + 1)
        out = w.n(a + 1, b + 1) * out
        if i == b and a == j:
            out = out + rest
        if a == j:
            out = out + act(i, b, k + 1).scale(hbar)
        return out

    return w.normal_form(act(i, j, 0))


def circle_action(w: WeylPresentation, i: int, j: int, mono: Monomial) -> NCPolynomial:
    """d_i^j |> monomial through chains of the circle product n_a^b o n_c^e = hbar delta_c^b n_a^e.

    Every nonempty set s_1 < ... < s_r of positions contributes
    hbar^(r-1) delta_i^(j_sr) delta_(i_sr)^(j_s(r-1)) ... delta_(i_s1)^j times the
    remaining factors in their original order.
    """
    al = w.system.alphabet
    total = al.zero()
    p = len(mono)
    for r in range(1, p + 1):
        for pos in itertools.combinations(range(p), r):
            if mono[pos[0]][0] != j or mono[pos[-1]][1] != i:
                continue
            if any(mono[pos[t + 1]][0] != mono[pos[t]][1] for t in range(r - 1)):
                continue
            rest = tuple(m for t, m in enumerate(mono) if t not in pos)
            total = total + monomial_poly(w, rest).scale(w.hbar ** (r - 1))
    return w.normal_form(total)


def oracle_action(w: WeylPresentation, i: int, j: int, mono: Monomial) -> NCPolynomial:
    return act_weyl_oracle(w, w.d(i + 1, j + 1), monomial_poly(w, mono))


def closed_form_action(w: WeylPresentation, i: int, j: int, mono: Monomial,
                       _cache: dict = {}) -> NCPolynomial:
    """d_i^j |> monomial read off one entry of the matrix closed form."""
    p = len(mono) + 1
    key = (id(w), p)
    forms = _cache.get(key)
    if forms is None or forms.w is not w:
        forms = _cache[key] = LeibnizForms(w, p)
    d = w.dim
    row = i
    col = j
    for a, b in mono:
        row = row * d + a
        col = col * d + b
    return forms.rhs_row(row).get(col, w.system.alphabet.zero())


def classical_action(w: WeylPresentation, i: int, j: int, mono: Monomial) -> NCPolynomial:
    """d_i^j = partial / partial n_j^i on the commutative monomial."""
    total = w.system.alphabet.zero()
    for t, (a, b) in enumerate(mono):
        if a == j and b == i:
            total = total + monomial_poly(w, mono[:t] + mono[t + 1:])
    return w.normal_form(total.subs({"h": 0})).subs({"h": 0})


def all_monomials(m: int, degree: int):
    letters = [(a, b) for a in range(m) for b in range(m)]
    return itertools.product(letters, repeat=degree)


# -- braided traces, centrality and traceless parts ---------------------------------------

def braided_trace(c_op: ScalarMatrix, m: NCMatrix, k: int) -> NCPolynomial:
    """Tr(C M^k)."""
    al = m.alphabet
    power = NCMatrix.identity(al, m.nrows)
    for _ in range(k):
        power = power @ m
    total = al.zero()
    for i, row in enumerate(c_op.nonzero_rows()):
        for j, c in row:
            total = total + power[j, i].scale(c)
    return total


def centrality_check(system: RewriteSystem, element: NCPolynomial, generators=None) -> Verdict:
    """Commutators with every generator normal-form to zero."""
    gens = generators if generators is not None else system.alphabet.gens()
    for g in gens:
        comm = system.commutator(element, g)
        if not comm.is_zero():
            return failed("centrality", f"[element, {g}] = {comm}")
    return passed("centrality", generators=len(gens))


def traceless_part(c_op: ScalarMatrix, m: NCMatrix) -> NCMatrix:
    """M - (Tr_R M / Tr_R I) I; undefined when Tr C = 0 (equal bi-rank parts)."""
    tr_i = c_op.trace()
    if tr_i.is_zero():
        raise ZeroDivisionError("Tr_R I = 0: the traceless part needs m != n")
    factor = braided_trace(c_op, m, 1).scale(tr_i.inverse())
    ident = NCMatrix.identity(m.alphabet, m.nrows)
    return m - ident.map(lambda one: one * factor)


def laplace_operator(w: WeylPresentation, k: int, c_op: ScalarMatrix | None = None) -> NCPolynomial:
    """Tr_R D^k (C = I when not given)."""
    c_op = c_op if c_op is not None else ScalarMatrix.identity(w.dim)
    return braided_trace(c_op, w.d_matrix(), k)


def laplace_center_experiment(w: WeylPresentation, kmax: int = 2, degree: int = 2) -> list[Verdict]:
    """Apply Tr D^k to products of Tr N^j and test whether the result stays central.

    This probes an open conjecture; a failure is a finding, not a bug.
    """
    n_letters = [g for g in w.system.alphabet.gens() if not w.system.alphabet.is_derivative(next(iter(g.terms))[0])]
    c_op = ScalarMatrix.identity(w.dim)
    traces = [braided_trace(c_op, w.n_matrix(), j) for j in range(1, degree + 1)]
    inputs = [w.normal_form(t) for t in traces] + [w.normal_form(a * b) for a, b in itertools.combinations_with_replacement(traces[:1], 2)]
    out = []
    for k in range(1, kmax + 1):
        lap = laplace_operator(w, k)
        for z in inputs:
            image = act_weyl_oracle(w, lap, z)
            v = centrality_check(w.system, image, n_letters)
            out.append(Verdict(f"Laplace k={k} on {z}", v.passed, v.witness))
    return out
