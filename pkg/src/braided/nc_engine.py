"""Noncommutative polynomials and PBW rewriting.

Words are tuples of letter indices; the letter order is the order of the
alphabet and words are compared degree-lexicographically.  A rewrite system
holds one rule for every out-of-order pair ``(b, a)`` with ``b > a``; normal
forms are nondecreasing words.  Normal forms are computed by inserting letters
from the right into already-normal words, with memoisation on
``(word, letter)``.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Mapping

from .checks import Verdict, failed, passed
from .exact_core import ONE, ZERO, Scalar, ScalarMatrix, format_scalar, parse_scalar, var
from .grammar import parse_expression

Word = tuple


class Alphabet:
    """Ordered generator names, each tagged ``"coord"`` or ``"deriv"``."""

    __slots__ = ("names", "kinds", "index", "_hash")

    def __init__(self, names: Iterable[str], kinds: Iterable[str] | None = None):
        self.names = tuple(names)
        self.kinds = tuple(kinds) if kinds is not None else ("coord",) * len(self.names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be unique")
        if len(self.kinds) != len(self.names) or not set(self.kinds) <= {"coord", "deriv"}:
            raise ValueError("each generator needs a kind 'coord' or 'deriv'")
        self.index = {n: i for i, n in enumerate(self.names)}
        self._hash = hash((self.names, self.kinds))

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.names == other.names and self.kinds == other.kinds

    def __hash__(self):
        return self._hash

    def is_derivative(self, i: int) -> bool:
        return self.kinds[i] == "deriv"

    def gen(self, name: str) -> "NCPolynomial":
        return NCPolynomial(self, {(self.index[name],): ONE})

    def gens(self) -> list["NCPolynomial"]:
        return [NCPolynomial(self, {(i,): ONE}) for i in range(len(self.names))]

    def one(self) -> "NCPolynomial":
        return NCPolynomial(self, {(): ONE})

    def zero(self) -> "NCPolynomial":
        return NCPolynomial(self, {})

    def const(self, c) -> "NCPolynomial":
        c = Scalar.coerce(c)
        return NCPolynomial(self, {(): c} if not c.is_zero() else {})

    def __repr__(self):
        return f"Alphabet({list(self.names)})"


def word_key(w: Word) -> tuple:
    return (len(w), w)


class NCPolynomial:
    """A finite linear combination of words with Scalar coefficients."""

    __slots__ = ("alphabet", "terms")

    def __init__(self, alphabet: Alphabet, terms: Mapping[Word, Scalar] | None = None):
        self.alphabet = alphabet
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    @staticmethod
    def _wrap(alphabet, terms) -> "NCPolynomial":
        p = object.__new__(NCPolynomial)
        p.alphabet = alphabet
        p.terms = terms
        return p

    def _coerce(self, other) -> "NCPolynomial":
        if isinstance(other, NCPolynomial):
            if other.alphabet != self.alphabet:
                raise ValueError("polynomials over different alphabets")
            return other
        return self.alphabet.const(other)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for w, c in o.terms.items():
            prev = out.get(w)
            if prev is None:
                out[w] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[w]
                else:
                    out[w] = s
        return NCPolynomial._wrap(self.alphabet, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPolynomial._wrap(self.alphabet, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "NCPolynomial":
        c = Scalar.coerce(c)
        if c.is_zero():
            return NCPolynomial._wrap(self.alphabet, {})
        return NCPolynomial._wrap(self.alphabet, {w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, NCPolynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        o = self._coerce(other)
        out: dict[Word, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in o.terms.items():
                w = w1 + w2
                v = c1 * c2
                prev = out.get(w)
                out[w] = v if prev is None else prev + v
        return NCPolynomial(self.alphabet, out)

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, NCPolynomial):
            c = other.constant_value()
            if c is None:
                raise TypeError("division by a non-scalar element")
            other = c
        return self.scale(Scalar.coerce(other).inverse())

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("noncommutative powers need a non-negative integer exponent")
        out = self.alphabet.one()
        for _ in range(n):
            out = out * self
        return out

    def constant_value(self) -> Scalar | None:
        """The scalar if this polynomial is a constant, else None."""
        if not self.terms:
            return ZERO
        if set(self.terms) == {()}:
            return self.terms[()]
        return None

    def coefficient(self, word: Word) -> Scalar:
        return self.terms.get(word, ZERO)

    def map_coefficients(self, fn) -> "NCPolynomial":
        return NCPolynomial(self.alphabet, {w: fn(c) for w, c in self.terms.items()})

    def subs(self, values: dict) -> "NCPolynomial":
        return self.map_coefficients(lambda c: c.subs(values))

    def relabel(self, alphabet: Alphabet) -> "NCPolynomial":
        """Re-express over another alphabet with the same generator names."""
        names = self.alphabet.names
        return NCPolynomial(
            alphabet, {tuple(alphabet.index[names[i]] for i in w): c for w, c in self.terms.items()}
        )

    def words(self) -> list[Word]:
        return sorted(self.terms, key=word_key, reverse=True)

    def __str__(self):
        return format_nc(self)

    def __repr__(self):
        return f"NCPolynomial('{format_nc(self)}')"


def format_nc(p: NCPolynomial) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for w in p.words():
        c = p.terms[w]
        mono = "*".join(p.alphabet.names[i] for i in w)
        cs = format_scalar(c)
        neg = False
        if cs.startswith("-") and " " not in cs and "/" not in cs[1:]:
            neg, cs = True, cs[1:]
        elif cs.startswith("-") and "/" in cs and "(" not in cs:
            neg, cs = True, cs[1:]
        if " " in cs or ("/" in cs and mono):
            cs = f"({cs})"
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        pieces.append(("-" if neg else "+", body))
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def parse_nc(text: str, alphabet: Alphabet, macros: Mapping[str, NCPolynomial] | None = None,
             scalars: Iterable[str] = ("q", "h")) -> NCPolynomial:
    """Parse an element; generator names, macros, ``i`` and the given scalar symbols are atoms."""
    macros = dict(macros or {})
    scalar_names = set(scalars)

    def atom(name: str):
        if name in macros:
            return macros[name]
        if name in alphabet.index:
            return alphabet.gen(name)
        if name == "i" or name in scalar_names:
            return alphabet.const(parse_scalar(name))
        raise KeyError(name)

    return parse_expression(text, atom, alphabet.const)


# -- rewriting ----------------------------------------------------------------

class RewriteError(ValueError):
    """A rule set that cannot be a terminating PBW system."""


class RewriteSystem:
    """Ordered quadratic-linear permutation rules ``b a -> rhs`` for every pair b > a."""

    def __init__(self, alphabet: Alphabet, rules: Mapping[tuple[int, int], NCPolynomial], name: str = ""):
        self.alphabet = alphabet
        self.name = name
        n = len(alphabet)
        self.rules: dict[tuple[int, int], dict[Word, Scalar]] = {}
        for b in range(n):
            for a in range(b):
                rhs = rules.get((b, a))
                if rhs is None:
                    raise RewriteError(f"no rule for {alphabet.names[b]}*{alphabet.names[a]}")
                if rhs.alphabet != alphabet:
                    raise RewriteError("rule over a different alphabet")
                for w in rhs.terms:
                    if len(w) > 2:
                        raise RewriteError("rules must have filtration degree at most 2")
                    if word_key(w) >= word_key((b, a)):
                        raise RewriteError(
                            f"rule for {alphabet.names[b]}*{alphabet.names[a]} does not decrease the word order"
                        )
                self.rules[(b, a)] = dict(rhs.terms)
        extra = set(rules) - set(self.rules)
        if extra:
            raise RewriteError(f"rules for ordered pairs are not allowed: {sorted(extra)}")
        self._insert_cache: dict[tuple[Word, int], dict[Word, Scalar]] = {}
        self._word_cache: dict[Word, dict[Word, Scalar]] = {}

    # normal forms
    def _insert(self, word: Word, g: int) -> dict[Word, Scalar]:
        key = (word, g)
        hit = self._insert_cache.get(key)
        if hit is not None:
            return hit
        if not word or word[-1] <= g:
            res = {word + (g,): ONE}
        else:
            prefix = word[:-1]
            res = {}
            for u, c in self.rules[(word[-1], g)].items():
                part = {prefix: ONE}
                for letter in u:
                    part = self._mul_letter(part, letter)
                for w, v in part.items():
                    _acc(res, w, c * v)
        self._insert_cache[key] = res
        return res

    def _mul_letter(self, poly: dict[Word, Scalar], g: int) -> dict[Word, Scalar]:
        out: dict[Word, Scalar] = {}
        for w, c in poly.items():
            for w2, c2 in self._insert(w, g).items():
                _acc(out, w2, c * c2)
        return out

    def _nf_word(self, word: Word) -> dict[Word, Scalar]:
        hit = self._word_cache.get(word)
        if hit is not None:
            return hit
        if len(word) <= 1 or all(word[i] <= word[i + 1] for i in range(len(word) - 1)):
            res = {word: ONE}
        else:
            res = self._mul_letter(self._nf_word(word[:-1]), word[-1])
        self._word_cache[word] = res
        return res

    def normal_form(self, p: NCPolynomial, strategy: str = "insert", rng: random.Random | None = None) -> NCPolynomial:
        """The PBW representative of ``p``.

        ``strategy="random"`` applies single rewrites at random positions until
        no rule applies; it exists to test independence of the reduction order.
        """
        if p.alphabet != self.alphabet:
            raise ValueError("polynomial over a different alphabet")
        if strategy == "random":
            return self._random_reduce(p, rng or random.Random(0))
        out: dict[Word, Scalar] = {}
        for w, c in p.terms.items():
            for w2, c2 in self._nf_word(w).items():
                _acc(out, w2, c * c2)
        return NCPolynomial(self.alphabet, out)

    def _random_reduce(self, p: NCPolynomial, rng: random.Random) -> NCPolynomial:
        terms = dict(p.terms)
        while True:
            reducible = [w for w in terms if any(w[i] > w[i + 1] for i in range(len(w) - 1))]
            if not reducible:
                return NCPolynomial(self.alphabet, terms)
            w = rng.choice(sorted(reducible))
            positions = [i for i in range(len(w) - 1) if w[i] > w[i + 1]]
            i = rng.choice(positions)
            c = terms.pop(w)
            for u, v in self.rules[(w[i], w[i + 1])].items():
                _acc(terms, w[:i] + u + w[i + 2:], c * v)

    def is_normal(self, p: NCPolynomial) -> bool:
        return all(all(w[i] <= w[i + 1] for i in range(len(w) - 1)) for w in p.terms)

    def rule(self, b: str, a: str) -> NCPolynomial:
        idx = self.alphabet.index
        return NCPolynomial(self.alphabet, self.rules[(idx[b], idx[a])])

    def commutator(self, a: NCPolynomial, b: NCPolynomial) -> NCPolynomial:
        return self.normal_form(a * b - b * a)

    # confluence
    def certify_confluence(self) -> Verdict:
        """Resolve every overlap c b a (c > b > a) both ways and compare normal forms."""
        n = len(self.alphabet)
        names = self.alphabet.names
        checked = 0
        for c, b, a in itertools.combinations(range(n - 1, -1, -1), 3):
            left = self._apply_then_normalize((c, b, a), 0)
            right = self._apply_then_normalize((c, b, a), 1)
            checked += 1
            if left != right:
                diff = NCPolynomial(self.alphabet, left) - NCPolynomial(self.alphabet, right)
                return failed(
                    "confluence",
                    f"overlap {names[c]}*{names[b]}*{names[a]}: difference {diff}",
                    overlaps_checked=checked,
                )
        return passed("confluence", overlaps_checked=checked)

    def _apply_then_normalize(self, word: Word, pos: int) -> dict[Word, Scalar]:
        out: dict[Word, Scalar] = {}
        for u, v in self.rules[(word[pos], word[pos + 1])].items():
            w = word[:pos] + u + word[pos + 2:]
            for w2, c2 in self._nf_word_fresh(w).items():
                _acc(out, w2, v * c2)
        return {w: c for w, c in out.items() if not c.is_zero()}

    def _nf_word_fresh(self, word: Word) -> dict[Word, Scalar]:
        # left-to-right insertion starting from the empty word
        part = {(): ONE}
        for letter in word:
            part = self._mul_letter(part, letter)
        return part

    # counit
    def evaluate_counit(self, p: NCPolynomial, eps: Mapping) -> NCPolynomial:
        """Normal-order, then replace each trailing run of derivative letters by its counit value."""
        values = {}
        for key, v in eps.items():
            idx = self.alphabet.index[key] if isinstance(key, str) else key
            values[idx] = Scalar.coerce(v)
        nf = self.normal_form(p)
        out: dict[Word, Scalar] = {}
        for w, c in nf.terms.items():
            cut = len(w)
            while cut > 0 and self.alphabet.is_derivative(w[cut - 1]):
                cut -= 1
            factor = c
            for letter in w[cut:]:
                factor = factor * values.get(letter, ZERO)
                if factor.is_zero():
                    break
            if not factor.is_zero():
                _acc(out, w[:cut], factor)
        return NCPolynomial(self.alphabet, out)

    def cache_size(self) -> int:
        return len(self._insert_cache)


def _acc(d: dict, w, v: Scalar):
    if v.is_zero():
        return
    prev = d.get(w)
    if prev is None:
        d[w] = v
    else:
        s = prev + v
        if s.is_zero():
            del d[w]
        else:
            d[w] = s


def solve_relations(alphabet: Alphabet, relations: Iterable[NCPolynomial]) -> dict[tuple[int, int], NCPolynomial]:
    """Turn a set of quadratic-linear relations into rewrite rules for the out-of-order pairs.

    The relation span is row-reduced with words sorted from the largest down, so
    each reduced relation expresses its leading word through smaller ones.
    Raises RewriteError unless the leading words are exactly the out-of-order
    pairs.
    """
    rels = [r for r in relations if not r.is_zero()]
    words = sorted({w for r in rels for w in r.terms}, key=word_key, reverse=True)
    col = {w: i for i, w in enumerate(words)}
    rows = []
    for r in rels:
        row = [ZERO] * len(words)
        for w, c in r.terms.items():
            row[col[w]] = c
        rows.append(row)
    from .exact_core import _rref

    reduced, pivots = _rref(rows, len(words)) if rows else ([], [])
    n = len(alphabet)
    wanted = {(b, a) for b in range(n) for a in range(b)}
    rules = {}
    for row, p in zip(reduced, pivots):
        lead = words[p]
        if lead not in wanted:
            shown = "*".join(alphabet.names[i] for i in lead) or "1"
            raise RewriteError(f"relation with leading word {shown} is not an out-of-order pair")
        rhs = {words[j]: -row[j] for j in range(p + 1, len(words)) if not row[j].is_zero()}
        rules[lead] = NCPolynomial(alphabet, rhs)
    missing = wanted - set(rules)
    if missing:
        b, a = min(missing)
        raise RewriteError(f"no relation rewrites {alphabet.names[b]}*{alphabet.names[a]}")
    return rules


def relation_rank(relations: Iterable[NCPolynomial]) -> int:
    """Dimension of the linear span of the relations over the scalar field."""
    rels = [r for r in relations if not r.is_zero()]
    if not rels:
        return 0
    words = sorted({w for r in rels for w in r.terms}, key=word_key)
    col = {w: i for i, w in enumerate(words)}
    rows = []
    for r in rels:
        row = [ZERO] * len(words)
        for w, c in r.terms.items():
            row[col[w]] = c
        rows.append(row)
    from .exact_core import rank

    return rank(ScalarMatrix._wrap(rows))


# -- matrices with noncommuting entries ------------------------------------------

class NCMatrix:
    """A square or rectangular matrix with NCPolynomial entries, stored sparsely."""

    __slots__ = ("alphabet", "nrows", "ncols", "rows")

    def __init__(self, alphabet: Alphabet, nrows: int, ncols: int, rows: list[dict[int, NCPolynomial]]):
        self.alphabet = alphabet
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    @staticmethod
    def from_entries(alphabet: Alphabet, entries: list[list]) -> "NCMatrix":
        rows = []
        for r in entries:
            row = {}
            for j, v in enumerate(r):
                v = v if isinstance(v, NCPolynomial) else alphabet.const(v)
                if not v.is_zero():
                    row[j] = v
            rows.append(row)
        return NCMatrix(alphabet, len(entries), len(entries[0]), rows)

    @staticmethod
    def from_scalar(alphabet: Alphabet, m: ScalarMatrix) -> "NCMatrix":
        rows = [{j: alphabet.const(v) for j, v in r} for r in m.nonzero_rows()]
        return NCMatrix(alphabet, m.nrows, m.ncols, rows)

    @staticmethod
    def identity(alphabet: Alphabet, n: int) -> "NCMatrix":
        return NCMatrix(alphabet, n, n, [{i: alphabet.one()} for i in range(n)])

    def __getitem__(self, ij) -> NCPolynomial:
        i, j = ij
        return self.rows[i].get(j, self.alphabet.zero())

    def entries(self) -> list[list[NCPolynomial]]:
        return [[self[i, j] for j in range(self.ncols)] for i in range(self.nrows)]

    def _other(self, other) -> "NCMatrix":
        if isinstance(other, ScalarMatrix):
            return NCMatrix.from_scalar(self.alphabet, other)
        return other

    def __matmul__(self, other) -> "NCMatrix":
        o = self._other(other)
        if self.ncols != o.nrows:
            raise ValueError("shape mismatch")
        out = []
        for row in self.rows:
            acc: dict[int, NCPolynomial] = {}
            for k, a in row.items():
                for j, b in o.rows[k].items():
                    prod = a * b
                    acc[j] = prod if j not in acc else acc[j] + prod
            out.append({j: v for j, v in acc.items() if not v.is_zero()})
        return NCMatrix(self.alphabet, self.nrows, o.ncols, out)

    def __rmatmul__(self, other) -> "NCMatrix":
        return NCMatrix.from_scalar(self.alphabet, other) @ self

    def __add__(self, other) -> "NCMatrix":
        o = self._other(other)
        out = []
        for r1, r2 in zip(self.rows, o.rows):
            row = dict(r1)
            for j, v in r2.items():
                row[j] = v if j not in row else row[j] + v
            out.append({j: v for j, v in row.items() if not v.is_zero()})
        return NCMatrix(self.alphabet, self.nrows, self.ncols, out)

    def __neg__(self):
        return NCMatrix(self.alphabet, self.nrows, self.ncols, [{j: -v for j, v in r.items()} for r in self.rows])

    def __sub__(self, other):
        return self + (-self._other(other))

    def scale(self, c) -> "NCMatrix":
        return NCMatrix(
            self.alphabet, self.nrows, self.ncols,
            [{j: v * c for j, v in r.items() if not (v * c).is_zero()} for r in self.rows],
        )

    def map(self, fn) -> "NCMatrix":
        return NCMatrix(
            self.alphabet, self.nrows, self.ncols,
            [{j: w for j, w in ((j, fn(v)) for j, v in r.items()) if not w.is_zero()} for r in self.rows],
        )

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def trace(self) -> NCPolynomial:
        total = self.alphabet.zero()
        for i in range(min(self.nrows, self.ncols)):
            total = total + self[i, i]
        return total

    def embed(self, d: int, pos: int, n: int) -> "NCMatrix":
        """I^(pos) (x) self (x) I^(rest) on V^(x)n (self acts on k consecutive factors)."""
        k = 0
        while d ** k < self.nrows:
            k += 1
        left, right = d ** pos, d ** (n - pos - k)
        size = self.nrows
        total = left * size * right
        rows: list[dict[int, NCPolynomial]] = [dict() for _ in range(total)]
        for a in range(left):
            for i, row in enumerate(self.rows):
                for c in range(right):
                    dst = rows[(a * size + i) * right + c]
                    for j, v in row.items():
                        dst[(a * size + j) * right + c] = v
        return NCMatrix(self.alphabet, total, total, rows)

    def all_entries(self) -> list[NCPolynomial]:
        return [v for r in self.rows for v in r.values()]


def generator_matrix(alphabet: Alphabet, symbol: str, d: int) -> NCMatrix:
    """The d x d matrix whose (i, j) entry is the letter ``symbol_{i+1}^{j+1}``."""
    return NCMatrix.from_entries(
        alphabet, [[alphabet.gen(f"{symbol}_{i + 1}^{j + 1}") for j in range(d)] for i in range(d)]
    )


def hbar() -> Scalar:
    return var("h")
