"""Command-line front end.

Every command prints one report, as text or as a JSON document, and exits
with 0 when all checks pass, 1 when a check fails and 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .checks import Verdict, failed, passed
from .exact_core import ONE, ScalarMatrix, format_scalar, parse_scalar, var
from .grammar import ParseError

DEFAULT_KMAX = 5
DEFAULT_DEGREE = 4


class InputError(ValueError):
    """Bad user input (reported with exit code 2)."""


def env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"environment variable {name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"environment variable {name} must be positive")
    return value


class Report:
    def __init__(self, command: list[str]):
        self.command = command
        self.checks: list[Verdict] = []
        self.results: dict = {}
        self.notes: list[str] = []
        self.started = time.perf_counter()

    def check(self, verdict: Verdict) -> Verdict:
        self.checks.append(verdict)
        return verdict

    @property
    def ok(self) -> bool:
        return all(v.passed for v in self.checks)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "passed": self.ok,
            "checks": [v.as_dict() for v in self.checks],
            "results": self.results,
            "notes": self.notes,
            "timing_seconds": round(time.perf_counter() - self.started, 3),
        }

    def render(self, fmt: str) -> str:
        doc = self.as_dict()
        if fmt == "structured":
            return json.dumps(doc, indent=2, sort_keys=True)
        lines = ["command: " + " ".join(self.command)]
        for v in self.checks:
            line = ("PASS " if v.passed else "FAIL ") + v.name
            if v.witness:
                line += ": " + v.witness
            lines.append(line)
        for key in sorted(self.results):
            lines.extend(_text_lines(key, self.results[key], 0))
        lines.extend("note: " + n for n in self.notes)
        lines.append("status: " + ("pass" if self.ok else "fail"))
        lines.append(f"timing: {doc['timing_seconds']}s")
        return "\n".join(lines)


def _text_lines(key, value, depth: int) -> list[str]:
    pad = "  " * depth
    if isinstance(value, dict):
        out = [f"{pad}{key}:"]
        for k in value:
            out.extend(_text_lines(k, value[k], depth + 1))
        return out
    if isinstance(value, list) and value and isinstance(value[0], dict):
        out = [f"{pad}{key}:"]
        for item in value:
            out.append(f"{pad}  - " + ", ".join(f"{k}={v}" for k, v in item.items()))
        return out
    return [f"{pad}{key}: {value}"]


# -- braiding input -----------------------------------------------------------------

def load_r(args, report: Report | None = None):
    from dataclasses import replace

    from .hecke import load_braiding, preset

    if bool(args.preset) == bool(args.file):
        raise InputError("give exactly one of --preset or --file")
    if args.preset:
        try:
            r = preset(args.preset)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
        r = load_braiding(text)
    if getattr(args, "q", None):
        r = replace(r, hecke_q=parse_scalar(args.q, ("q",)))
    elif r.hecke_q is None:
        # without a stated q, test the Hecke relation at q = 1
        r = replace(r, hecke_q=ONE)
        if report is not None:
            report.notes.append("no Hecke parameter given; using q = 1")
    return r


def cmd_verify_braiding(args, report: Report):
    from .hecke import (
        NotSkewInvertible, birank_trace, check_hecke, check_qybe, embedding_invariance, extend_braiding,
        is_involutive, ph_series, psi_inverse_check, skew_inverse, verify_skew,
    )

    r = load_r(args, report)
    kmax = args.kmax or env_int("BRAIDED_KMAX", DEFAULT_KMAX)
    report.results["braiding"] = {"name": r.name, "dim": r.dim,
                                  "q": None if r.hecke_q is None else format_scalar(r.hecke_q)}
    report.results["involutive"] = is_involutive(r)
    resid = check_qybe(r)
    report.check(passed("QYBE") if resid.is_zero() else failed("QYBE", "R12 R23 R12 - R23 R12 R23 != 0"))
    q = r.hecke_q if r.hecke_q is not None else ONE
    h = check_hecke(r, q)
    report.check(passed("Hecke", q=format_scalar(q)) if h.is_zero()
                 else failed("Hecke", f"(R - q)(R + 1/q) != 0 for q = {format_scalar(q)}"))
    try:
        s = skew_inverse(r)
    except NotSkewInvertible as exc:
        report.check(failed("skew-invertible", str(exc)))
        return
    report.check(verify_skew(r, s))
    ext = extend_braiding(r, s)
    ext_resid = check_qybe(ext)
    report.check(passed("extended QYBE") if ext_resid.is_zero()
                 else failed("extended QYBE", "QYBE fails on (V + V*)^3"))
    report.check(embedding_invariance(ext))
    report.results["Tr B"] = format_scalar(s.b_op.trace())
    report.results["Tr C"] = format_scalar(s.c_op.trace())
    if not h.is_zero():
        report.notes.append("the Hecke relation fails, so the symmetrizer-based bi-rank checks were skipped")
        return
    ph = ph_series(r, kmax)
    if ph.bi_rank is None:
        report.notes.append(f"P_-(t) not reconstructed through kmax={kmax}; bi-rank checks skipped")
        return
    m, n = ph.bi_rank
    report.results["bi_rank"] = [m, n]
    want = birank_trace(m, n, q)
    tr_c = s.c_op.trace()
    report.check(passed("Tr C = (m-n)_q / q^(m-n)") if tr_c == want
                 else failed("Tr C = (m-n)_q / q^(m-n)", f"Tr C = {format_scalar(tr_c)}, expected {format_scalar(want)}"))
    report.check(psi_inverse_check(r, s, (m, n)))


def cmd_ph_series(args, report: Report):
    from .hecke import check_hecke, factor_mountain, mountain_check, ph_series, reciprocal_check

    r = load_r(args, report)
    kmax = args.kmax or env_int("BRAIDED_KMAX", DEFAULT_KMAX)
    report.results["braiding"] = {"name": r.name, "dim": r.dim}
    report.results["kmax"] = kmax
    q = r.hecke_q if r.hecke_q is not None else ONE
    if not check_hecke(r, q).is_zero():
        report.check(failed("Hecke", f"(R - q)(R + 1/q) != 0 for q = {format_scalar(q)}; symmetrizers undefined"))
        return
    ph = ph_series(r, kmax)
    report.results["series"] = ph.as_dict()
    report.check(passed("P_+(t) P_-(-t) = 1") if ph.series_identity
                 else failed("P_+(t) P_-(-t) = 1", f"fails through order {kmax}"))
    if ph.p_minus is None:
        report.check(failed("rational P_-", f"no rational form of degree <= {kmax}"))
        return
    num, den = ph.p_minus
    report.check(reciprocal_check(num, den))
    if den.degree == 0:
        report.check(mountain_check(num))
        report.results["mountain_factors"] = factor_mountain(num).as_dict()


# -- algebra presets for act ------------------------------------------------------------

def _mu_even(f) -> bool:
    return all(c.is_zero() for c in f.coefficients("mu")[1::2])


def _split_isotypic(text: str):
    """'f : k=N' -> (f, N), or None for a plain element."""
    if ":" not in text:
        return None
    left, _, right = text.partition(":")
    right = right.strip().replace(" ", "")
    if not right.startswith("k="):
        raise InputError(f"expected 'f : k=N', got {text!r}")
    try:
        k = int(right[2:])
    except ValueError:
        raise InputError(f"k must be an integer in {text!r}") from None
    return left.strip(), k


def act_uu2(args, report: Report):
    from .u2_calculus import OPERATORS, U2, IsotypicElement, act_closed

    u = U2()
    macros = u.macros()
    macros["Delta"] = u.lap
    op_name = {"Delta": "L1", "Lap": "L1"}.get(args.op.strip(), args.op.strip())
    from .nc_engine import parse_nc

    op = parse_nc(args.op, u.al, macros, scalars=("h",))
    iso = _split_isotypic(args.on)
    if iso is None:
        elem = parse_nc(args.on, u.al, macros, scalars=("h",))
        out = u.act(op, elem)
        report.results["oracle"] = str(out)
        report.results["paths"] = ["oracle"]
        return
    e = IsotypicElement.parse(iso[0], iso[1])
    report.results["element"] = e.as_dict()
    paths = []
    closed = None
    if op_name in OPERATORS:
        closed = act_closed(op_name, e)
        report.results["closed_form"] = {"f": format_scalar(closed.f), "k": closed.k}
        paths.append("closed form")
    if _mu_even(e.f):
        oracle = u.act(op, u.isotypic(e))
        report.results["oracle"] = str(oracle)
        paths.append("oracle")
        if closed is not None:
            try:
                expected = u.isotypic(closed)
            except ValueError:
                report.check(failed("closed form = oracle", "closed form is odd in mu"))
            else:
                diff = u.nf(oracle - expected)
                report.check(passed("closed form = oracle") if diff.is_zero()
                             else failed("closed form = oracle", f"difference {diff}"))
    else:
        report.notes.append("f is odd in mu, so only the closed form applies")
    if not paths:
        raise InputError(f"no action path for operator {args.op!r} on an isotypic element")
    report.results["paths"] = paths


def act_weyl(args, report: Report, label: str):
    from .hecke import flip, preset
    from .nc_engine import parse_nc
    from .re_weyl import build_weyl, closed_form_action

    rest = label[len("weyl:"):] if label.startswith("weyl:") else ""
    if rest.startswith("P"):
        m_part = rest[1:].lstrip(":").removeprefix("m=")
        r = flip(int(m_part or 2))
    else:
        r = preset(rest or "flip:2")
    w = build_weyl(r)
    al = w.system.alphabet
    op = parse_nc(args.op, al, scalars=("h",))
    elem = parse_nc(args.on, al, scalars=("h",))
    if any(not al.is_derivative(i) for word in op.terms for i in word):
        raise InputError("the operator must be a polynomial in the d letters")
    oracle = w.act(op, elem)
    report.results["oracle"] = str(oracle)
    report.results["paths"] = ["oracle"]
    # single d letter on a single monomial in n: also run the matrix closed form
    if len(op.terms) == 1 and len(elem.terms) == 1:
        (dword, dc), = op.terms.items()
        (nword, nc), = elem.terms.items()
        if len(dword) == 1 and all(not al.is_derivative(i) for i in nword):
            i, j = _indices(al.names[dword[0]])
            mono = tuple(_indices(al.names[x]) for x in nword)
            closed = w.normal_form(closed_form_action(w, i, j, mono).scale(dc * nc))
            report.results["closed_form"] = str(closed)
            report.results["paths"].append("closed form")
            report.check(passed("closed form = oracle") if closed == oracle
                         else failed("closed form = oracle", f"{closed} vs {oracle}"))


def _indices(letter: str) -> tuple[int, int]:
    _, _, idx = letter.partition("_")
    i, _, j = idx.partition("^")
    return int(i) - 1, int(j) - 1


def _adjoint(args, report: Report, system, label: str):
    from .nc_engine import parse_nc

    al = system.alphabet
    op = parse_nc(args.op, al, scalars=("h", "q"))
    elem = parse_nc(args.on, al, scalars=("h", "q"))
    report.results["algebra"] = label
    report.results["commutator"] = str(system.commutator(op, elem))
    report.notes.append("algebras without derivatives act on themselves by commutator")


def algebra_system(label: str):
    """Rewrite system of ``ugl:m``, ``re[:preset]`` or ``mre[:preset]``."""
    from .hecke import preset
    from .nc_engine import Alphabet
    from .re_weyl import build_re, find_pbw_order, gl_relations, matrix_letters

    kind, _, arg = label.partition(":")
    if kind == "ugl":
        m = int(arg.removeprefix("m=") or 2)
        rels = gl_relations(m)
        system, _ = find_pbw_order(Alphabet(matrix_letters("n", m)), [p for p in rels])
        return system, None
    if kind in ("re", "mre"):
        r = preset(arg or "std:2")
        pres = build_re(r, modified=kind == "mre")
        return pres.system(), pres
    if kind == "uu2":
        from .u2_calculus import lie_system

        return lie_system(), None
    raise InputError(f"unknown algebra preset {label!r}")


def cmd_act(args, report: Report):
    label = args.algebra
    report.results["algebra"] = label
    if label == "uu2":
        act_uu2(args, report)
    elif label.startswith("weyl"):
        act_weyl(args, report, label)
    else:
        system, _ = algebra_system(label)
        _adjoint(args, report, system, label)


# -- centrality -----------------------------------------------------------------------------

def cmd_centrality(args, report: Report):
    from .nc_engine import NCMatrix
    from .re_weyl import braided_trace, centrality_check

    kmax = args.kmax or 2
    label = args.algebra
    if label == "uu2":
        from .exact_core import I
        from .u2_calculus import COORDS, lie_system

        system = lie_system()
        al = system.alphabet
        t, x, y, z = (al.gen(n) for n in COORDS)
        mat = NCMatrix.from_entries(al, [[t - z.scale(I), -x.scale(I) - y], [-x.scale(I) + y, t + z.scale(I)]])
        c_op = ScalarMatrix.identity(2)
    else:
        system, pres = algebra_system(label)
        if pres is None:
            raise InputError("centrality needs uu2, re[:preset] or mre[:preset]")
        if pres.skew is None:
            raise InputError("the braiding is not skew-invertible, so Tr_R is undefined")
        mat = pres.matrix()
        c_op = pres.skew.c_op
    traces = {}
    for k in range(1, kmax + 1):
        elem = system.normal_form(braided_trace(c_op, mat, k).relabel(system.alphabet))
        traces[str(k)] = str(elem)
        v = centrality_check(system, elem)
        report.check(Verdict(f"Tr_R N^{k} central", v.passed, v.witness, k))
    report.results["traces"] = traces


# -- u(2) suite -----------------------------------------------------------------------------

def cmd_u2_check(args, report: Report):
    from .u2_calculus import (
        OPERATORS, U2, IsotypicElement, cas_exchange_check, cayley_hamilton_check, charpoly_roots_check,
        derivatives_commute_check, gl2_table_check, harmonicity_check, oracle_crosscheck, power_formula_check,
        spectral_matrices,
    )

    degree = args.degree or env_int("BRAIDED_DEGREE", DEFAULT_DEGREE)
    u = U2()
    report.check(u.system.certify_confluence())
    report.check(cayley_hamilton_check())
    report.check(derivatives_commute_check(u, degree))
    for order in (1, 2):
        report.check(cas_exchange_check(u, order, degree))
    sm = spectral_matrices()
    report.check(charpoly_roots_check(sm))
    report.check(power_formula_check(sm))
    for k in range(4):
        report.check(harmonicity_check(u, k))
    fs = ["1", "t", "t^2", "Cas", "Cas^2", "t*Cas"]
    bad = 0
    for op in OPERATORS:
        for f in fs:
            for k in range(4):
                v = oracle_crosscheck(u, op, IsotypicElement.parse(f, k))
                if not v:
                    bad += 1
                    report.check(v)
    report.check(passed("spectral-action gate", cases=len(OPERATORS) * len(fs) * 4) if not bad
                 else failed("spectral-action gate", f"{bad} mismatches"))
    literal = oracle_crosscheck(u, "dt", IsotypicElement.parse("Cas", 0), literal_minus_two=True)
    report.results["literal -2 reading of dt"] = "holds" if literal else "fails against the oracle"
    if args.gl2:
        from .hecke import flip
        from .re_weyl import build_weyl

        report.check(gl2_table_check(build_weyl(flip(2))))
    report.results["degree"] = degree


# -- quantization --------------------------------------------------------------------------

def cmd_alpha(args, report: Report):
    from .quantize import CONVENTIONS, alpha, alpha_q2_report
    from .u2_calculus import U2

    u = U2()
    if args.convention not in CONVENTIONS:
        raise InputError(f"--convention must be one of {CONVENTIONS}")
    if args.poly:
        p = parse_scalar(args.poly, ("t", "x", "y", "z", "r", "h"))
        report.results["alpha"] = str(alpha(u, p, args.convention))
        report.results["convention"] = args.convention
    q2 = alpha_q2_report(u)
    report.results["alpha(Q^2) display"] = q2
    holding = q2["holds_under"]
    report.check(passed("alpha(Q^2) display holds under exactly one convention", convention=holding[0])
                 if len(holding) == 1 else
                 failed("alpha(Q^2) display holds under exactly one convention", f"holds under {holding}"))


def cmd_lb(args, report: Report):
    from .quantize import (
        CONVENTIONS, MetricProfile, difference_form, lb_alpha_check, lb_display, lb_quantum, mu_to_r,
    )
    from .u2_calculus import U2

    try:
        metric = MetricProfile.parse(args.phi)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise InputError(str(exc)) from None
    if args.k < 0:
        raise InputError("--k must be non-negative")
    report.results["metric"] = metric.as_dict()
    disp = lb_display(metric)
    # all five coefficients, zeros included
    report.results["display"] = {name: format_scalar(c) for name, c in disp.items()}
    report.results["display (r-hat)"] = {name: format_scalar(mu_to_r(c)) for name, c in disp.items()}
    coeffs = lb_quantum(metric)
    report.results["invariant basis"] = {name: format_scalar(c) for name, c in sorted(coeffs.items())}
    op = difference_form(coeffs, args.k)
    report.results["difference operator"] = op.as_dict()
    u = U2()
    verdicts = {conv: lb_alpha_check(u, metric, conv) for conv in CONVENTIONS}
    holding = [c for c, v in verdicts.items() if v]
    report.results["alpha(classical) = display under"] = holding
    if not (metric.phi - 1).is_zero():
        report.check(passed("alpha(classical) = display", convention=holding[0]) if len(holding) == 1
                     else failed("alpha(classical) = display", f"holds under {holding}"))
    else:
        report.check(passed("alpha(classical) = display") if holding
                     else failed("alpha(classical) = display", "fails under both conventions"))
    if args.apply:
        f = parse_scalar(args.apply, ("t", "mu", "h", "rg"))
        if f.variables() - {"t", "mu", "h", "rg"}:
            raise InputError("--apply takes a function of t and mu")
        report.results["image"] = {"g": format_scalar(op.apply(f)), "k": args.k}
    if args.lattice:
        report.results["lattice"] = lattice_dump(op, args.lattice)
        report.notes.append("lattice dump is for external experiments; no spectrum is computed")


def lattice_dump(op, size: int) -> list[dict]:
    """Matrix entries on the points t = a h/2, mu = b h (0 <= a < size, 1 <= b <= size)."""
    h = var("h")
    rows = []
    for a in range(size):
        for b in range(1, size + 1):
            for (dt, dmu), c in op.terms:
                a2, b2 = a + 2 * dt, b + dmu
                if not (0 <= a2 < size and 1 <= b2 <= size) or a2.denominator != 1 or b2.denominator != 1:
                    continue
                try:
                    val = c.subs({"t": h * a / 2, "mu": h * b})
                except ZeroDivisionError:
                    continue
                rows.append({"from": [a, b], "to": [int(a2), int(b2)], "coeff": format_scalar(val)})
    return rows


# -- entry point -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="braided", description="Exact checks for braided algebras.")
    parser.add_argument("--format", choices=("text", "structured"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    def braiding_args(p):
        p.add_argument("--preset", help="flip:d, std:d=2, superflip:m|n or identity:d")
        p.add_argument("--file", help="JSON R-matrix file with 1-based {k,l,i,j,value} entries")
        p.add_argument("--kmax", type=int, default=None, help="defaults to $BRAIDED_KMAX or 5")
        p.add_argument("--q", help="Hecke parameter (overrides the preset or file)")

    p = sub.add_parser("verify-braiding", help="QYBE, Hecke, skew-invertibility and extension")
    braiding_args(p)
    p.set_defaults(func=cmd_verify_braiding)

    p = sub.add_parser("ph-series", help="symmetrizer ranks and the Poincare-Hilbert series")
    braiding_args(p)
    p.set_defaults(func=cmd_ph_series)

    p = sub.add_parser("act", help="apply an operator to an element")
    p.add_argument("--algebra", required=True, help="uu2, weyl:P:m=2, weyl:<preset>, ugl:m, re, mre")
    p.add_argument("--op", required=True)
    p.add_argument("--on", required=True, help="an element, or 'f(t,mu) : k=N' for uu2")
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("centrality", help="test Tr_R N^k for centrality")
    p.add_argument("--algebra", default="uu2", help="uu2, re[:preset] or mre[:preset]")
    p.add_argument("--kmax", type=int, default=None)
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("u2-check", help="identities of the u(2) derivative calculus")
    p.add_argument("--degree", type=int, default=None, help="defaults to $BRAIDED_DEGREE or 4")
    p.add_argument("--gl2", action="store_true", help="also compare with the gl(2) Weyl algebra")
    p.set_defaults(func=cmd_u2_check)

    p = sub.add_parser("alpha", help="quantize a polynomial and report the alpha(Q^2) convention")
    p.add_argument("--poly")
    p.add_argument("--convention", default="radius")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("lb", help="quantum Laplace-Beltrami operator as a difference operator")
    p.add_argument("--phi", required=True, help="phi(r), e.g. '1 - rg/r'")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--apply", help="f(t, mu) to apply the operator to")
    p.add_argument("--lattice", type=int, default=0, help="dump matrix entries on a size x size lattice")
    p.set_defaults(func=cmd_lb)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    report = Report(argv)
    try:
        args.func(args, report)
    except ParseError as exc:
        return _input_error(report, args.format, exc.message, line=exc.line, column=exc.column)
    except (InputError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        return _input_error(report, args.format, f"unknown name {msg!r}" if isinstance(exc, KeyError) else msg)
    print(report.render(args.format))
    return 0 if report.ok else 1


def _input_error(report: Report, fmt: str, message: str, **where) -> int:
    err = {"message": message, **where}
    if fmt == "structured":
        print(json.dumps({"command": report.command, "error": err}, indent=2, sort_keys=True))
    else:
        loc = f" (line {where['line']}, column {where['column']})" if where else ""
        print(f"error: {message}{loc}", file=sys.stderr)
    return 2
