"""PBW rewriting: oriented quadratic rules, normal forms and overlap checks.

Rules are oriented by the degree-lexicographic order on PBW ranks.  That
order is a monomial order (compatible with concatenation), so every
reduction sequence terminates and lower-degree tails can never loop.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import MissingRule, NonTermination, NotOrientable
from .exact_arith import ParamEnv, Scalar
from .free_algebra import Alphabet, NCPoly, Relation, Word

Terms = Dict[Word, Scalar]


@dataclass(frozen=True)
class RewriteRule:
    rule_id: int
    lhs: Word
    rhs: NCPoly
    source: int  # index of the relation it came from

    def text(self) -> str:
        return f"{self.rhs.alphabet.word_text(self.lhs)} -> {self.rhs.text()}"


@dataclass(frozen=True)
class Step:
    word: Word
    position: int
    rule_id: int
    coeff: Scalar


@dataclass
class Overlap:
    word: Word
    left: NCPoly
    right: NCPoly

    @property
    def resolved(self) -> bool:
        return self.left == self.right


@dataclass
class ConfluenceReport:
    overlaps: List[Overlap] = field(default_factory=list)

    @property
    def all_resolved(self) -> bool:
        return all(o.resolved for o in self.overlaps)

    def unresolved(self) -> List[Overlap]:
        return [o for o in self.overlaps if not o.resolved]


def _add_into(acc: Terms, terms: Terms, c: Scalar) -> None:
    for w, v in terms.items():
        s = acc.get(w)
        s = v * c if s is None else s + v * c
        if s:
            acc[w] = s
        else:
            acc.pop(w)


def orient(rel: Relation, alphabet: Alphabet) -> Tuple[Word, Scalar, NCPoly]:
    """Return (lhs word, its coefficient, rhs with lhs = rhs) for a relation."""
    poly = rel.poly
    if not poly:
        raise NotOrientable(f"relation {rel.text()} is trivial")
    lead, c = poly.leading()
    if len(lead) != 2 or alphabet.is_normal(lead):
        raise NotOrientable(
            f"leading word {alphabet.word_text(lead)} of {rel.text()} is not an inverted pair"
        )
    if not c.is_certified_nonzero():
        raise NotOrientable(
            f"coefficient {c.text()} of {alphabet.word_text(lead)} is not certified nonzero"
        )
    tail = poly - NCPoly.monomial(alphabet, poly.env, lead, c)
    return lead, c, tail.scale(-c.inverse())


class RewriteSystem:
    """One oriented rule per inverted generator pair."""

    def __init__(self, alphabet: Alphabet, env: ParamEnv, relations: Sequence[Relation],
                 budget: int = 200_000, require_complete: bool = True):
        self.alphabet = alphabet
        self.env = env
        self.budget = budget
        self.relations = list(relations)
        rules: Dict[Word, RewriteRule] = {}
        for k, rel in enumerate(self.relations):
            lhs, _, rhs = orient(rel, alphabet)
            if lhs in rules:
                raise NotOrientable(
                    f"two relations share the leading word {alphabet.word_text(lhs)}"
                )
            rules[lhs] = RewriteRule(len(rules), lhs, rhs, k)
        if require_complete:
            rank = alphabet.rank
            for g in range(len(alphabet)):
                for h in range(len(alphabet)):
                    if rank[g] > rank[h] and (g, h) not in rules:
                        raise MissingRule(
                            f"no relation rewrites {alphabet.names[g]} {alphabet.names[h]}"
                        )
        self.rules = rules
        self._memo: Dict[Word, Terms] = {}
        # interreduce right-hand sides in increasing lhs order
        for lhs in sorted(rules, key=alphabet.word_key):
            r = rules[lhs]
            rules[lhs] = RewriteRule(r.rule_id, r.lhs, self.normal_form(r.rhs), r.source)
        self._memo = {}
        self.by_id = {r.rule_id: r for r in rules.values()}

    # reduction ----------------------------------------------------------------
    def _redex(self, w: Word) -> int:
        rules = self.rules
        for i in range(len(w) - 1):
            if (w[i], w[i + 1]) in rules:
                return i
        return -1

    def _nf_word(self, w: Word, counter: List[int]) -> Terms:
        hit = self._memo.get(w)
        if hit is not None:
            return hit
        i = self._redex(w)
        if i < 0:
            res = {w: self.env.one()}
        else:
            counter[0] += 1
            if counter[0] > self.budget:
                raise NonTermination(f"reduction budget {self.budget} exceeded at {self.alphabet.word_text(w)}")
            rule = self.rules[(w[i], w[i + 1])]
            prefix, suffix = w[:i], w[i + 2:]
            res = {}
            for u, c in rule.rhs.terms.items():
                _add_into(res, self._nf_word(prefix + u + suffix, counter), c)
        self._memo[w] = res
        return res

    def normal_form(self, element: NCPoly) -> NCPoly:
        counter = [0]
        acc: Terms = {}
        for w, c in element.terms.items():
            _add_into(acc, self._nf_word(w, counter), c)
        return NCPoly(self.alphabet, self.env, acc)

    def nf_word(self, w: Word) -> NCPoly:
        return NCPoly(self.alphabet, self.env, self._nf_word(tuple(w), [0]))

    def reduce_with_trace(self, element: NCPoly) -> Tuple[NCPoly, List[Step]]:
        """Reduce one redex at a time, always in the largest reducible word."""
        cur = dict(element.terms)
        steps: List[Step] = []
        key = self.alphabet.word_key
        while True:
            pending = [w for w in cur if self._redex(w) >= 0]
            if not pending:
                break
            if len(steps) >= self.budget:
                raise NonTermination("trace budget exceeded")
            w = max(pending, key=key)
            i = self._redex(w)
            rule = self.rules[(w[i], w[i + 1])]
            c = cur.pop(w)
            steps.append(Step(w, i, rule.rule_id, c))
            for u, v in rule.rhs.terms.items():
                _add_into(cur, {w[:i] + u + w[i + 2:]: v}, c)
        return NCPoly(self.alphabet, self.env, cur), steps

    def trace_witness(self, steps: Sequence[Step]) -> NCPoly:
        """Sum of c * prefix (lhs - rhs) suffix over the steps: an explicit
        element of the relation ideal."""
        total = NCPoly.zero(self.alphabet, self.env)
        for s in steps:
            rule = self.by_id[s.rule_id]
            pre = NCPoly.monomial(self.alphabet, self.env, s.word[:s.position], s.coeff)
            suf = NCPoly.monomial(self.alphabet, self.env, s.word[s.position + 2:])
            diff = NCPoly.monomial(self.alphabet, self.env, rule.lhs) - rule.rhs
            total = total + pre * diff * suf
        return total

    # exhaustive oracle --------------------------------------------------------
    def all_reduction_results(self, w: Word, _memo=None) -> FrozenSet[FrozenSet]:
        """Every normal form reachable from w over all reduction orders."""
        memo = {} if _memo is None else _memo
        w = tuple(w)
        if w in memo:
            return memo[w]
        positions = [i for i in range(len(w) - 1) if (w[i], w[i + 1]) in self.rules]
        if not positions:
            res = frozenset([frozenset([(w, self.env.one())])])
        else:
            out = set()
            for i in positions:
                rule = self.rules[(w[i], w[i + 1])]
                sums = {frozenset()}
                for u, c in rule.rhs.terms.items():
                    options = self.all_reduction_results(w[:i] + u + w[i + 2:], memo)
                    new = set()
                    for partial in sums:
                        for opt in options:
                            acc = dict(partial)
                            _add_into(acc, dict(opt), c)
                            new.add(frozenset(acc.items()))
                    sums = new
                out |= sums
            res = frozenset(out)
        memo[w] = res
        return res

    def oracle_normal_form(self, w: Word) -> Optional[NCPoly]:
        """The common value of all reduction orders, or None if they differ."""
        results = self.all_reduction_results(w)
        if len(results) != 1:
            return None
        (only,) = results
        return NCPoly(self.alphabet, self.env, dict(only))

    # confluence -----------------------------------------------------------------
    def overlap_words(self) -> List[Word]:
        out = []
        for (a, b) in self.rules:
            for (b2, c) in self.rules:
                if b2 == b:
                    out.append((a, b, c))
        return sorted(out, key=self.alphabet.word_key)

    def check_confluence(self) -> ConfluenceReport:
        report = ConfluenceReport()
        A, E = self.alphabet, self.env
        for (a, b, c) in self.overlap_words():
            r1 = self.rules[(a, b)].rhs
            r2 = self.rules[(b, c)].rhs
            left = self.normal_form(r1 * NCPoly.monomial(A, E, (c,)))
            right = self.normal_form(NCPoly.monomial(A, E, (a,)) * r2)
            report.overlaps.append(Overlap((a, b, c), left, right))
        return report

    def rule_table(self) -> List[str]:
        return [self.rules[k].text() for k in sorted(self.rules, key=self.alphabet.word_key)]


def build_rewrite_system(presentation, **kw) -> RewriteSystem:
    return RewriteSystem(presentation.alphabet, presentation.env, presentation.relations, **kw)


def normal_form(element: NCPoly, system: RewriteSystem) -> NCPoly:
    return system.normal_form(element)


def check_confluence(system: RewriteSystem) -> ConfluenceReport:
    return system.check_confluence()
