"""Exact arithmetic over Q(i)(q, h, ...) and the linear algebra built on it.

A :class:`Scalar` is stored as ``(re + i*im) / den`` where ``re``, ``im`` and
``den`` are polynomials with rational coefficients and ``den`` is monic.
Keeping the denominator real makes the representation canonical: after
dividing out ``gcd(re, im, den)`` two equal scalars have identical parts.
Polynomial gcds come from FLINT through python-flint.

Besides ``q`` and ``h`` (which stands for the deformation parameter hbar)
the field carries the central variables used later on: ``t``, ``mu``, ``r``,
``rg`` and the commuting coordinates ``x``, ``y``, ``z`` of the classical
function algebra.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .grammar import parse_expression

VARIABLES = ("q", "h", "t", "mu", "r", "rg", "x", "y", "z")
_CTX = flint.fmpq_mpoly_ctx.get(VARIABLES, "lex")
_GENS = dict(zip(VARIABLES, _CTX.gens()))
_INDEX = {name: i for i, name in enumerate(VARIABLES)}
_PZERO = _CTX.from_dict({})
_PONE = _CTX.constant(1)


def _poly_const(value) -> flint.fmpq_mpoly:
    if isinstance(value, Fraction):
        value = flint.fmpq(value.numerator, value.denominator)
    return _CTX.constant(value)


def _fmpq_to_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class Scalar:
    """An element of Q(i)(q, h, t, mu, r, rg, x, y, z), always reduced."""

    __slots__ = ("re", "im", "den", "_hash")

    def __init__(self, value=0):
        if isinstance(value, Scalar):
            self.re, self.im, self.den = value.re, value.im, value.den
        elif isinstance(value, str):
            other = parse_scalar(value)
            self.re, self.im, self.den = other.re, other.im, other.den
        elif isinstance(value, complex):
            re = Scalar._from_parts(_poly_const(Fraction(value.real)), _poly_const(Fraction(value.imag)), _PONE)
            self.re, self.im, self.den = re.re, re.im, re.den
        else:
            self.re, self.im, self.den = _poly_const(value), _PZERO, _PONE
        self._hash = None

    # -- construction ---------------------------------------------------
    @staticmethod
    def _raw(re, im, den) -> "Scalar":
        obj = object.__new__(Scalar)
        obj.re, obj.im, obj.den, obj._hash = re, im, den, None
        return obj

    @staticmethod
    def _from_parts(re, im, den) -> "Scalar":
        if re.is_zero() and im.is_zero():
            return Scalar._raw(_PZERO, _PZERO, _PONE)
        if not den.is_one():
            g = den.gcd(re)
            if not im.is_zero():
                g = g.gcd(im)
            if not g.is_one():
                re, im, den = re / g, im / g, den / g
            lc = den.leading_coefficient()
            if lc != 1:
                inv = 1 / lc
                re, im, den = re * inv, im * inv, den * inv
        return Scalar._raw(re, im, den)

    @staticmethod
    def var(name: str) -> "Scalar":
        return Scalar._raw(_GENS[name], _PZERO, _PONE)

    @staticmethod
    def coerce(value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, int) and -64 <= value <= 64:
            return _SMALL[value + 64]
        if isinstance(value, (int, Fraction, complex, str)):
            return Scalar(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Scalar")

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def is_one(self) -> bool:
        return self.re.is_one() and self.im.is_zero() and self.den.is_one()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.re.is_constant() and self.im.is_constant()

    def variables(self) -> set[str]:
        found = set()
        for p in (self.re, self.im, self.den):
            for name, deg in zip(VARIABLES, p.degrees()):
                if deg > 0:
                    found.add(name)
        return found

    def to_fraction(self) -> Fraction:
        """The value as a Fraction; fails unless the scalar is a real rational."""
        if not (self.is_constant() and self.is_real()):
            raise ValueError(f"{self} is not a rational constant")
        if self.re.is_zero():
            return Fraction(0)
        return _fmpq_to_fraction(self.re.leading_coefficient())

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            if self.den.is_one():
                return Scalar._raw(self.re + o.re, self.im + o.im, _PONE)
            return Scalar._from_parts(self.re + o.re, self.im + o.im, self.den)
        g = self.den.gcd(o.den)
        a, b = o.den / g, self.den / g
        return Scalar._from_parts(self.re * a + o.re * b, self.im * a + o.im * b, self.den * a)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im, self.den)

    def __sub__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self.im.is_zero() and o.im.is_zero():
            re, im = self.re * o.re, _PZERO
        else:
            re = self.re * o.re - self.im * o.im
            im = self.re * o.im + self.im * o.re
        if self.den.is_one() and o.den.is_one():
            return Scalar._raw(re, im, _PONE) if not (re.is_zero() and im.is_zero()) else ZERO
        return Scalar._from_parts(re, im, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        if self.im.is_zero():
            return Scalar._from_parts(self.den, _PZERO, self.re)
        norm = self.re * self.re + self.im * self.im
        return Scalar._from_parts(self.den * self.re, -(self.den * self.im), norm)

    def __truediv__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("Scalar exponents must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conjugate(self) -> "Scalar":
        """Complex conjugation; every variable is treated as real."""
        return Scalar._raw(self.re, -self.im, self.den)

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im and self.den == o.den

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self.re.terms()), tuple(self.im.terms()), tuple(self.den.terms())))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- substitution and calculus ---------------------------------------
    def subs(self, values: dict) -> "Scalar":
        """Substitute scalars (or ints) for variables, exactly."""
        if not values:
            return self
        vals = {name: Scalar.coerce(v) for name, v in values.items()}
        if all(v.is_polynomial() and v.is_real() for v in vals.values()):
            polys = [vals[n].re if n in vals else _GENS[n] for n in VARIABLES]
            re = self.re.compose(*polys) if not self.re.is_constant() else self.re
            im = self.im.compose(*polys) if not self.im.is_constant() else self.im
            den = self.den.compose(*polys) if not self.den.is_constant() else self.den
            if den.is_zero():
                raise ZeroDivisionError(f"substitution makes the denominator of {self} vanish")
            return Scalar._from_parts(re, im, _PONE) / Scalar._from_parts(den, _PZERO, _PONE)
        seq = [vals.get(n) for n in VARIABLES]
        re = _eval_poly(self.re, seq)
        im = _eval_poly(self.im, seq)
        den = _eval_poly(self.den, seq)
        if den.is_zero():
            raise ZeroDivisionError(f"substitution makes the denominator of {self} vanish")
        return (re + I * im) / den

    def derivative(self, name: str) -> "Scalar":
        """Partial derivative in one variable (quotient rule)."""
        k = _INDEX[name]
        dre, dim = self.re.derivative(k), self.im.derivative(k)
        if self.den.is_one():
            return Scalar._from_parts(dre, dim, _PONE)
        dden = self.den.derivative(k)
        re = dre * self.den - self.re * dden
        im = dim * self.den - self.im * dden
        return Scalar._from_parts(re, im, self.den * self.den)

    def numerator(self) -> "Scalar":
        return Scalar._raw(self.re, self.im, _PONE)

    def denominator(self) -> "Scalar":
        return Scalar._raw(self.den, _PZERO, _PONE)

    def degree(self, name: str) -> int:
        """Degree of the numerator in ``name`` (the scalar must be polynomial in it)."""
        k = _INDEX[name]
        if self.den.degrees()[k] > 0:
            raise ValueError(f"{self} is not polynomial in {name}")
        return max(self.re.degrees()[k], self.im.degrees()[k]) if not self.is_zero() else -1

    def coefficients(self, name: str) -> list["Scalar"]:
        """Coefficients c_j with self = sum c_j name^j; requires polynomial dependence."""
        k = _INDEX[name]
        if self.den.degrees()[k] > 0:
            raise ValueError(f"{self} is not polynomial in {name}")
        buckets: dict[int, list] = {}
        for part, slot in ((self.re, 0), (self.im, 1)):
            for exps, c in part.terms():
                e = exps[k]
                reduced = list(exps)
                reduced[k] = 0
                entry = buckets.setdefault(e, [{}, {}])
                entry[slot][tuple(reduced)] = c
        if not buckets:
            return []
        out = [ZERO] * (max(buckets) + 1)
        den = Scalar._raw(self.den, _PZERO, _PONE)
        for e, (red, imd) in buckets.items():
            re = _CTX.from_dict(red) if red else _PZERO
            im = _CTX.from_dict(imd) if imd else _PZERO
            out[e] = Scalar._from_parts(re, im, _PONE) / den
        return out

    # -- printing -------------------------------------------------------
    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Scalar('{format_scalar(self)}')"


def _eval_poly(p, seq) -> Scalar:
    if p.is_zero():
        return ZERO
    total = ZERO
    powers: dict[tuple[int, int], Scalar] = {}
    for exps, c in p.terms():
        term = Scalar._raw(_CTX.constant(c), _PZERO, _PONE)
        keep = [0] * len(VARIABLES)
        for k, e in enumerate(exps):
            if not e:
                continue
            if seq[k] is None:
                keep[k] = e
                continue
            key = (k, e)
            if key not in powers:
                powers[key] = seq[k] ** int(e)
            term = term * powers[key]
        if any(keep):
            term = term * Scalar._raw(_CTX.from_dict({tuple(keep): 1}), _PZERO, _PONE)
        total = total + term
    return total


ZERO = Scalar._raw(_PZERO, _PZERO, _PONE)
ONE = Scalar._raw(_PONE, _PZERO, _PONE)
I = Scalar._raw(_PZERO, _PONE, _PONE)
_SMALL = [Scalar._raw(_CTX.constant(v), _PZERO, _PONE) if v else ZERO for v in range(-64, 65)]


def S(value) -> Scalar:
    """Shorthand coercion: ints, Fractions, complex numbers and strings."""
    return Scalar.coerce(value)


def var(name: str) -> Scalar:
    return Scalar.var(name)


def q_number(n: int, q: Scalar | None = None) -> Scalar:
    """The q-integer (q^n - q^-n)/(q - q^-1), which is n at q = 1."""
    q = var("q") if q is None else Scalar.coerce(q)
    if q == ONE:
        return S(n)
    return (q ** n - q ** (-n)) / (q - q ** (-1))


# -- printing and parsing ---------------------------------------------------

def _format_monomial(exps) -> str:
    parts = []
    for name, e in zip(VARIABLES, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_gaussian_poly(re, im) -> str:
    coeffs: dict[tuple, list[Fraction]] = {}
    for exps, c in re.terms():
        coeffs.setdefault(exps, [Fraction(0), Fraction(0)])[0] = _fmpq_to_fraction(c)
    for exps, c in im.terms():
        coeffs.setdefault(exps, [Fraction(0), Fraction(0)])[1] = _fmpq_to_fraction(c)
    if not coeffs:
        return "0"
    chunks = []
    for exps in sorted(coeffs, reverse=True):
        a, b = coeffs[exps]
        mono = _format_monomial(exps)
        if b == 0:
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            if mono:
                body = mono if mag == 1 else f"{_format_rational(mag)}*{mono}"
            else:
                body = _format_rational(mag)
        elif a == 0:
            sign = "-" if b < 0 else "+"
            mag = abs(b)
            body = "i" if mag == 1 else f"{_format_rational(mag)}*i"
            if mono:
                body = f"{body}*{mono}"
        else:
            sign = "+"
            inner = f"{_format_rational(a)} {'-' if b < 0 else '+'} "
            inner += "i" if abs(b) == 1 else f"{_format_rational(abs(b))}*i"
            body = f"({inner})" + (f"*{mono}" if mono else "")
        chunks.append((sign, body))
    text = ("-" if chunks[0][0] == "-" else "") + chunks[0][1]
    for sign, body in chunks[1:]:
        text += f" {sign} {body}"
    return text


def _is_single_factor(p) -> bool:
    terms = list(p.terms())
    return len(terms) == 1 and terms[0][1] == 1


def format_scalar(s: Scalar) -> str:
    """Render in the scalar grammar; ``parse_scalar(format_scalar(s)) == s``."""
    num = _format_gaussian_poly(s.re, s.im)
    if s.den.is_one():
        return num
    den = _format_gaussian_poly(s.den, _PZERO)
    nterms = len(list(s.re.terms())) + len(list(s.im.terms()))
    if nterms > 1 or num.startswith("(") and not num.endswith(")") or "+" in num[1:] or " - " in num:
        num = f"({num})"
    if not _is_single_factor(s.den) or "*" in den:
        den = f"({den})"
    return f"{num}/{den}"


SCALAR_SYMBOLS = ("i", "q", "h")


def parse_scalar(text: str, symbols: Iterable[str] = VARIABLES) -> Scalar:
    """Parse a scalar expression.

    ``symbols`` limits the admissible variable names; ``i`` is always allowed.
    """
    allowed = set(symbols)

    def atom(name: str) -> Scalar:
        if name == "i":
            return I
        if name in allowed and name in _GENS:
            return Scalar.var(name)
        raise KeyError(name)

    return parse_expression(text, atom, Scalar.coerce)


# -- univariate polynomials ------------------------------------------------

class UniPoly:
    """A polynomial in one formal variable with Scalar coefficients (low degree first)."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable, var: str = "t"):
        cs = [Scalar.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[k] + other[k] for k in range(n)], self.var)

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            c = Scalar.coerce(other)
            return UniPoly([a * c for a in self.coeffs], self.var)
        if self.is_zero() or other.is_zero():
            return UniPoly([], self.var)
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UniPoly":
        result = UniPoly([1], self.var)
        for _ in range(n):
            result = result * self
        return result

    def __call__(self, value) -> Scalar:
        value = Scalar.coerce(value)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [ZERO] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.coeffs[-1]
        while len(rem) >= len(other.coeffs) and rem:
            shift = len(rem) - len(other.coeffs)
            factor = rem[-1] / lead
            quot[shift] = factor
            for j, b in enumerate(other.coeffs):
                rem[shift + j] = rem[shift + j] - factor * b
            rem.pop()
            while rem and rem[-1].is_zero():
                rem.pop()
        return UniPoly(quot, self.var), UniPoly(rem, self.var)

    def monic(self) -> "UniPoly":
        return self * self.coeffs[-1].inverse() if self.coeffs else self

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero() else a

    def reversed(self) -> "UniPoly":
        return UniPoly(tuple(reversed(self.coeffs)), self.var)

    def substitute_neg(self) -> "UniPoly":
        """p(-t)."""
        return UniPoly([c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)], self.var)

    def series(self, denominator: "UniPoly", n: int) -> list[Scalar]:
        """First n coefficients of self/denominator as a power series."""
        d0 = denominator[0]
        if d0.is_zero():
            raise ZeroDivisionError("series denominator vanishes at 0")
        out: list[Scalar] = []
        for k in range(n):
            acc = self[k]
            for j in range(1, min(k, denominator.degree) + 1):
                acc = acc - denominator[j] * out[k - j]
            out.append(acc / d0)
        return out

    def __str__(self):
        if not self.coeffs:
            return "0"
        pieces = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            cs = format_scalar(c)
            if " " in cs or "/" in cs and k:
                cs = f"({cs})"
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            if not mono:
                pieces.append(cs)
            elif cs == "1":
                pieces.append(mono)
            elif cs == "-1":
                pieces.append(f"-{mono}")
            else:
                pieces.append(f"{cs}*{mono}")
        text = pieces[0]
        for p in pieces[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text

    def __repr__(self):
        return f"UniPoly('{self}')"


# -- dense matrices ----------------------------------------------------------

class ScalarMatrix:
    """Dense immutable matrix of Scalars."""

    __slots__ = ("rows", "ncols", "_nz")

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(Scalar.coerce(v) for v in row) for row in rows)
        if not self.rows:
            raise ValueError("a matrix needs at least one row")
        self.ncols = len(self.rows[0])
        if self.ncols == 0 or any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged or empty matrix rows")
        self._nz = None

    @staticmethod
    def _wrap(rows) -> "ScalarMatrix":
        m = object.__new__(ScalarMatrix)
        m.rows = tuple(tuple(r) for r in rows)
        m.ncols = len(m.rows[0])
        m._nz = None
        return m

    @staticmethod
    def zeros(n: int, m: int | None = None) -> "ScalarMatrix":
        m = n if m is None else m
        return ScalarMatrix._wrap([[ZERO] * m for _ in range(n)])

    @staticmethod
    def identity(n: int) -> "ScalarMatrix":
        return ScalarMatrix._wrap([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def from_sparse(n: int, m: int, entries: dict) -> "ScalarMatrix":
        rows = [[ZERO] * m for _ in range(n)]
        for (i, j), v in entries.items():
            rows[i][j] = Scalar.coerce(v)
        return ScalarMatrix._wrap(rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def nonzero_rows(self) -> list[list[tuple[int, Scalar]]]:
        """Per row, the list of (column, value) for nonzero entries (cached)."""
        if self._nz is None:
            self._nz = [[(j, v) for j, v in enumerate(r) if not v.is_zero()] for r in self.rows]
        return self._nz

    def __eq__(self, other):
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self) -> bool:
        return all(not row for row in self.nonzero_rows())

    def __add__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        _check_same(self, other)
        return ScalarMatrix._wrap([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        _check_same(self, other)
        return ScalarMatrix._wrap([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return ScalarMatrix._wrap([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "ScalarMatrix":
        c = Scalar.coerce(c)
        return ScalarMatrix._wrap([[a * c for a in r] for r in self.rows])

    def __mul__(self, c):
        if isinstance(c, ScalarMatrix):
            return self @ c
        return self.scale(c)

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        onz = other.nonzero_rows()
        out = []
        for row in self.nonzero_rows():
            acc: dict[int, Scalar] = {}
            for k, a in row:
                for j, b in onz[k]:
                    prev = acc.get(j)
                    acc[j] = a * b if prev is None else prev + a * b
            dense = [ZERO] * other.ncols
            for j, v in acc.items():
                dense[j] = v
            out.append(dense)
        return ScalarMatrix._wrap(out)

    def __pow__(self, n: int) -> "ScalarMatrix":
        result = ScalarMatrix.identity(self.nrows)
        for _ in range(n):
            result = result @ self
        return result

    def transpose(self) -> "ScalarMatrix":
        return ScalarMatrix._wrap([list(c) for c in zip(*self.rows)])

    def kron(self, other: "ScalarMatrix") -> "ScalarMatrix":
        n, m = other.shape
        rows = [[ZERO] * (self.ncols * m) for _ in range(self.nrows * n)]
        onz = other.nonzero_rows()
        for i, row in enumerate(self.nonzero_rows()):
            for j, a in row:
                for k in range(n):
                    for l, b in onz[k]:
                        rows[i * n + k][j * m + l] = a * b
        return ScalarMatrix._wrap(rows)

    def map(self, fn) -> "ScalarMatrix":
        return ScalarMatrix._wrap([[fn(a) for a in r] for r in self.rows])

    def subs(self, values: dict) -> "ScalarMatrix":
        return self.map(lambda a: a.subs(values) if not a.is_constant() else a)

    def trace(self) -> Scalar:
        total = ZERO
        for i in range(min(self.shape)):
            total = total + self.rows[i][i]
        return total

    def rank(self) -> int:
        return rank(self)

    def __str__(self):
        return "[" + ",\n ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.rows) + "]"

    __repr__ = __str__


def _check_same(a: ScalarMatrix, b: ScalarMatrix):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def _size(s: Scalar) -> int:
    return len(s.re) + len(s.im) + len(s.den)


def _clear_denominators(row: list[Scalar]) -> list[Scalar]:
    """Scale a row by the lcm of its denominators so all entries are polynomials."""
    lcm = _PONE
    for a in row:
        if not a.den.is_one():
            lcm = lcm * (a.den / lcm.gcd(a.den))
    if lcm.is_one():
        return list(row)
    f = Scalar._raw(lcm, _PZERO, _PONE)
    return [a * f for a in row]


def _bareiss_echelon(rows: list[list[Scalar]]) -> tuple[int, list[int]]:
    """Fraction-free forward elimination in place; returns (rank, pivot columns)."""
    rows = [_clear_denominators(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    prev = ONE
    r = 0
    pivots = []
    for c in range(ncols):
        best = None
        for i in range(r, nrows):
            v = rows[i][c]
            if not v.is_zero() and (best is None or _size(v) < _size(rows[best][c])):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            a = rows[i][c]
            if a.is_zero():
                if not prev.is_one():
                    rows[i] = [x * piv / prev for x in rows[i]]
                else:
                    rows[i] = [x * piv for x in rows[i]]
                continue
            new = []
            for j in range(ncols):
                v = piv * rows[i][j] - a * rows[r][j]
                new.append(v / prev if not prev.is_one() else v)
            rows[i] = new
        prev = piv
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return r, pivots


def rank(m: ScalarMatrix) -> int:
    """Exact rank over the fraction field, by Bareiss elimination."""
    rows = [list(r) for r in m.rows if any(not a.is_zero() for a in r)]
    if not rows:
        return 0
    return _bareiss_echelon(rows)[0]


def _rref(rows: list[list[Scalar]], ncols: int) -> tuple[list[list[Scalar]], list[int]]:
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        best = None
        for i in range(r, len(rows)):
            v = rows[i][c]
            if not v.is_zero() and (best is None or _size(v) < _size(rows[best][c])):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv if not x.is_zero() else x for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y if not y.is_zero() else x for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def nullspace(m: ScalarMatrix) -> list[list[Scalar]]:
    """A basis of {v : m v = 0} as a list of column vectors (lists)."""
    rows, pivots = _rref([list(r) for r in m.rows], m.ncols)
    free = [c for c in range(m.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * m.ncols
        v[f] = ONE
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


class NoSolution(Exception):
    """Certificate that a linear system is inconsistent."""


def solve_linear(a: ScalarMatrix, b: ScalarMatrix) -> ScalarMatrix:
    """One exact solution X of a X = b; raises NoSolution when none exists.

    Free variables are set to zero, so the solution is unique when ``a`` has
    full column rank.
    """
    if a.nrows != b.nrows:
        raise ValueError("row counts of A and b differ")
    n = a.ncols
    aug = [list(ra) + list(rb) for ra, rb in zip(a.rows, b.rows)]
    rows, pivots = _rref(aug, n + b.ncols)
    if any(p >= n for p in pivots):
        raise NoSolution("inconsistent linear system")
    x = [[ZERO] * b.ncols for _ in range(n)]
    for row, p in zip(rows, pivots):
        x[p] = row[n:]
    return ScalarMatrix._wrap(x)


def determinant(m: ScalarMatrix) -> Scalar:
    return charpoly(m)[0] * (-1) ** m.nrows


def charpoly(m: ScalarMatrix, var: str = "lambda") -> UniPoly:
    """Monic characteristic polynomial det(lambda I - m) by Berkowitz's algorithm."""
    n, k = m.shape
    if n != k:
        raise ValueError("charpoly needs a square matrix")
    a = m.rows
    # Berkowitz: build the Toeplitz products from the bottom-right corner.
    vec = [ONE, -a[n - 1][n - 1]]  # charpoly coefficients of the 1x1 trailing block
    for r in range(n - 2, -1, -1):
        size = n - r - 1  # trailing block is rows/cols r+1..n-1
        arr = a[r][r]
        row = [a[r][j] for j in range(r + 1, n)]
        col = [a[i][r] for i in range(r + 1, n)]
        block = [[a[i][j] for j in range(r + 1, n)] for i in range(r + 1, n)]
        # toeplitz column: 1, -arr, -R C, -R A C, ...
        t = [ONE, -arr]
        cur = col
        for _ in range(size):
            dot = ZERO
            for x, y in zip(row, cur):
                if not x.is_zero() and not y.is_zero():
                    dot = dot + x * y
            t.append(-dot)
            cur = [sum((block[i][j] * cur[j] for j in range(size) if not cur[j].is_zero()), ZERO) for i in range(size)]
        new = []
        for i in range(size + 2):
            acc = ZERO
            for j in range(len(vec)):
                if 0 <= i - j < len(t):
                    acc = acc + t[i - j] * vec[j]
            new.append(acc)
        vec = new
    # vec holds coefficients from the highest power downward
    return UniPoly(list(reversed(vec)), var)


def evaluate_matrix_poly(p: UniPoly, m: ScalarMatrix) -> ScalarMatrix:
    """p(m) by Horner's rule."""
    n = m.nrows
    acc = ScalarMatrix.zeros(n)
    ident = ScalarMatrix.identity(n)
    for c in reversed(p.coeffs):
        acc = acc @ m + ident.scale(c)
    return acc


def reconstruct_rational(series: Sequence, bounds: tuple[int, int], var: str = "t"):
    """Find coprime N, D with deg N <= m, deg D <= n, D(0) = 1 and N/D matching ``series``.

    Returns ``(N, D)`` or ``None`` when no such pair exists within the bounds.
    """
    m, n = bounds
    s = [Scalar.coerce(c) for c in series]
    if len(s) < m + n + 1:
        raise ValueError("need at least m+n+1 series terms")
    length = len(s)
    # unknowns d_1..d_n; equations for coefficients m+1..length-1 of D*S
    eqs = []
    rhs = []
    for k in range(m + 1, length):
        eqs.append([s[k - j] if k - j >= 0 else ZERO for j in range(1, n + 1)])
        rhs.append([-s[k]])
    if n == 0:
        if any(not r[0].is_zero() for r in rhs):
            return None
        d = [ONE]
    elif not eqs:
        d = [ONE] + [ZERO] * n
    else:
        try:
            sol = solve_linear(ScalarMatrix._wrap(eqs), ScalarMatrix._wrap(rhs))
        except NoSolution:
            return None
        d = [ONE] + [sol.rows[j][0] for j in range(n)]
    den = UniPoly(d, var)
    num = UniPoly(
        [sum((den[j] * s[k - j] for j in range(0, min(k, n) + 1)), ZERO) for k in range(m + 1)], var
    )
    g = num.gcd(den)
    if g.degree > 0:
        num = num.divmod(g)[0]
        den = den.divmod(g)[0]
    c = den[0]
    num, den = num * c.inverse(), den * c.inverse()
    return num, den
