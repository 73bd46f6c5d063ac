"""Words and noncommutative polynomials over a small ordered alphabet."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .errors import AlphabetMismatch, EnvironmentMismatch, UnknownGenerator
from .exact_arith import ParamEnv, Scalar

Word = Tuple[int, ...]


@dataclass(frozen=True)
class Generator:
    index: int
    name: str
    pbw_rank: int


class Alphabet:
    """Generators in index order, with a PBW rank for each.

    By default the PBW order is the index order (x1 < x2 < y1 < y2).
    """

    def __init__(self, names: Sequence[str], pbw_order: Optional[Sequence[str]] = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise AlphabetMismatch(f"duplicate generator names {names}")
        order = tuple(names) if pbw_order is None else tuple(pbw_order)
        if sorted(order) != sorted(names):
            raise AlphabetMismatch("PBW order must list every generator once")
        self.names = names
        self.pbw_order = order
        self.gens = tuple(Generator(i, n, order.index(n)) for i, n in enumerate(names))
        self.rank = tuple(g.pbw_rank for g in self.gens)
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and (self.names, self.pbw_order) == (other.names, other.pbw_order)

    def __hash__(self):
        return hash((self.names, self.pbw_order))

    def __repr__(self):
        return f"Alphabet({' < '.join(self.pbw_order)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def __contains__(self, name):
        return name in self._index

    def word(self, names: Union[str, Iterable[str]]) -> Word:
        if isinstance(names, str):
            names = names.split()
        return tuple(self.index(n) for n in names)

    def word_key(self, w: Word):
        """Degree-lexicographic key by PBW rank (a monomial order)."""
        return (len(w), tuple(self.rank[i] for i in w))

    def is_normal(self, w: Word) -> bool:
        r = self.rank
        return all(r[a] <= r[b] for a, b in zip(w, w[1:]))

    def word_text(self, w: Word) -> str:
        """Letters separated by spaces; runs collapse to powers (y1^2)."""
        if not w:
            return "1"
        out = []
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            name = self.names[w[i]]
            out.append(name if j - i == 1 else f"{name}^{j - i}")
            i = j
        return " ".join(out)

    def normal_words(self, max_degree: int) -> Iterator[Word]:
        """PBW-normal words of degree <= max_degree in increasing order."""
        by_rank = sorted(range(len(self.names)), key=lambda i: self.rank[i])

        def rec(prefix, start, left):
            yield prefix
            if left == 0:
                return
            for k in range(start, len(by_rank)):
                yield from rec(prefix + (by_rank[k],), k, left - 1)

        words = list(rec((), 0, max_degree))
        words.sort(key=self.word_key)
        return iter(words)

    def all_words(self, max_degree: int) -> Iterator[Word]:
        layer = [()]
        yield ()
        for _ in range(max_degree):
            layer = [w + (g,) for w in layer for g in range(len(self.names))]
            yield from sorted(layer, key=self.word_key)


class NCPoly:
    """Finite map Word -> Scalar with no stored zero coefficients."""

    __slots__ = ("alphabet", "env", "terms")

    def __init__(self, alphabet: Alphabet, env: ParamEnv, terms: Optional[Mapping[Word, Scalar]] = None):
        self.alphabet = alphabet
        self.env = env
        self.terms: Dict[Word, Scalar] = {}
        if terms:
            for w, c in terms.items():
                c = env.coerce(c)
                if c:
                    self.terms[tuple(w)] = c

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, alphabet, env) -> "NCPoly":
        return cls(alphabet, env)

    @classmethod
    def const(cls, alphabet, env, value) -> "NCPoly":
        return cls(alphabet, env, {(): env.coerce(value)})

    @classmethod
    def monomial(cls, alphabet, env, word: Word, coeff=1) -> "NCPoly":
        return cls(alphabet, env, {tuple(word): env.coerce(coeff)})

    @classmethod
    def gen(cls, alphabet, env, name: str) -> "NCPoly":
        return cls.monomial(alphabet, env, (alphabet.index(name),))

    def _like(self, terms: Dict[Word, Scalar]) -> "NCPoly":
        out = NCPoly.__new__(NCPoly)
        out.alphabet, out.env, out.terms = self.alphabet, self.env, terms
        return out

    def _check(self, other: "NCPoly"):
        if other.alphabet is not self.alphabet and other.alphabet != self.alphabet:
            raise AlphabetMismatch(f"{self.alphabet!r} vs {other.alphabet!r}")
        if other.env is not self.env and other.env != self.env:
            raise EnvironmentMismatch(f"{self.env!r} vs {other.env!r}")

    def _lift(self, other) -> Optional["NCPoly"]:
        if isinstance(other, NCPoly):
            self._check(other)
            return other
        if isinstance(other, (Scalar, int, Fraction)):
            return NCPoly.const(self.alphabet, self.env, other)
        return None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for w, c in o.terms.items():
            s = terms.get(w)
            s = c if s is None else s + c
            if s:
                terms[w] = s
            else:
                terms.pop(w, None)
        return self._like(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._like({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "NCPoly":
        c = self.env.coerce(c)
        if not c:
            return self._like({})
        return self._like({w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            self._check(other)
            terms: Dict[Word, Scalar] = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    s = terms.get(w)
                    s = c1 * c2 if s is None else s + c1 * c2
                    if s:
                        terms[w] = s
                    else:
                        terms.pop(w)
            return self._like(terms)
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int):
        out = NCPoly.const(self.alphabet, self.env, 1)
        for _ in range(e):
            out = out * self
        return out

    # inspection -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.alphabet == other.alphabet and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((w, c.key()) for w, c in self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "NCPoly":
        return self._like({w: c for w, c in self.terms.items() if len(w) == d})

    def coeff(self, w: Word) -> Scalar:
        return self.terms.get(tuple(w), self.env.zero())

    def sorted_terms(self, descending: bool = True):
        key = self.alphabet.word_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=descending)

    def leading(self) -> Tuple[Word, Scalar]:
        return self.sorted_terms()[0]

    def words(self):
        return [w for w, _ in self.sorted_terms()]

    def text(self) -> str:
        """Render as ``c * g1 g2 + ...`` in descending deglex order."""
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            # pull the sign out of single-term coefficients only
            neg = len(c.num) == 1 and c.text().startswith("-")
            if neg:
                c = -c
            word = self.alphabet.word_text(w) if w else ""
            if c.is_one():
                body = word or "1"
            else:
                ct = c.text()
                if not c.is_constant() and (" " in ct or "/" in ct):
                    ct = f"({ct})"
                body = f"{ct} * {word}" if word else ct
            parts.append((neg, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"NCPoly({self.text()})"


def nc_mul(lhs: NCPoly, rhs: NCPoly) -> NCPoly:
    return lhs * rhs


def nc_equal(lhs: NCPoly, rhs: NCPoly) -> bool:
    lhs._check(rhs)
    return lhs.terms == rhs.terms


@dataclass(frozen=True)
class Relation:
    """``lhs = rhs`` as written; ``poly`` is lhs - rhs."""

    lhs: NCPoly
    rhs: NCPoly

    @property
    def poly(self) -> NCPoly:
        return self.lhs - self.rhs

    def text(self) -> str:
        return f"{self.lhs.text()} = {self.rhs.text()}"

    def scaled(self, c) -> "Relation":
        return Relation(self.lhs.scale(c), self.rhs.scale(c))
