"""Detectors for the two quadratic-relation patterns that rule out
differential smoothness.

Pattern one is a mixing relation y_i x_s = ... whose right side carries all
four cross words x_s y_i, x_t y_i, x_s y_j, x_t y_j with nonzero
coefficients.  Pattern two is a degree-2 relation in which some generator
fills exactly one monomial slot; a square fills two slots.

A verdict of NoObstruction only says neither pattern was found.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .errors import RelationDegreeTooHigh
from .exact_arith import CERTIFIED, Scalar
from .free_algebra import Generator, NCPoly, Relation

FOUR_TERM, LONE, NONE = "FourTermMixing", "LoneGenerator", "NoObstruction"

_SNAKE = {FOUR_TERM: "four_term_mixing", LONE: "lone_generator", NONE: "none"}


@dataclass
class QuadraticRelation:
    index: int            # position in the presentation
    quadratic: NCPoly     # homogeneous degree-2 part of lhs - rhs
    tail: NCPoly          # the rest
    source: Relation


@dataclass
class Witness:
    pattern: str
    relation: QuadraticRelation
    generator: Optional[Generator]
    certificates: List[Tuple[Scalar, str]]

    @property
    def certified(self) -> bool:
        return all(s == CERTIFIED for _, s in self.certificates)

    @property
    def locus(self) -> Tuple[str, ...]:
        out = []
        for c, s in self.certificates:
            if s != CERTIFIED:
                out.extend(c.exceptional_locus())
        return tuple(dict.fromkeys(out))


@dataclass
class SmoothnessVerdict:
    pattern: str
    witness_relation: Optional[NCPoly] = None
    witness_generator: Optional[Generator] = None
    coefficient_certificates: List[Tuple[Scalar, str]] = field(default_factory=list)
    conditional: bool = False
    exceptional_locus: Tuple[str, ...] = ()
    candidates: List[Witness] = field(default_factory=list)

    @property
    def obstructed(self) -> bool:
        return self.pattern != NONE

    def as_dict(self) -> dict:
        if self.pattern == NONE:
            verdict = "no_obstruction"
        else:
            verdict = "conditional" if self.conditional else "not_smooth"
        return {
            "verdict": verdict,
            "pattern": _SNAKE[self.pattern],
            "witness_relation": None if self.witness_relation is None else self.witness_relation.text(),
            "witness_generator": None if self.witness_generator is None else self.witness_generator.name,
            "certificates": [[c.text(), s] for c, s in self.coefficient_certificates],
            "exceptional_locus": list(self.exceptional_locus),
        }


def quadratize_relations(presentation_or_relations) -> List[QuadraticRelation]:
    rels = getattr(presentation_or_relations, "relations", presentation_or_relations)
    out = []
    for k, rel in enumerate(rels):
        poly = rel.poly
        if poly.degree() > 2:
            raise RelationDegreeTooHigh(f"{rel.text()} has degree {poly.degree()}")
        quad = poly.homogeneous_part(2)
        out.append(QuadraticRelation(k, quad, poly - quad, rel))
    # canonical order, so that verdicts do not depend on how relations are listed
    out.sort(key=lambda q: q.quadratic.alphabet.word_key(q.quadratic.leading()[0]) if q.quadratic else (3,))
    return out


def _cert(c: Scalar) -> Tuple[Scalar, str]:
    return c, c.status()


def _as_quadratic(items) -> List[QuadraticRelation]:
    items = list(items)
    if items and isinstance(items[0], QuadraticRelation):
        return items
    if items and isinstance(items[0], NCPoly):
        return [QuadraticRelation(k, p.homogeneous_part(2), p - p.homogeneous_part(2),
                                  Relation(p, NCPoly.zero(p.alphabet, p.env))) for k, p in enumerate(items)]
    return quadratize_relations(items)


def four_term_witnesses(relations, blocks: Tuple[Sequence[str], Sequence[str]]) -> List[Witness]:
    out = []
    for q in _as_quadratic(relations):
        poly = q.quadratic
        if not poly:
            continue
        A = poly.alphabet
        xs = [A.index(n) for n in blocks[0]]
        ys = [A.index(n) for n in blocks[1]]
        for i in ys:
            for s in xs:
                lead = poly.coeff((i, s))
                if not lead:
                    continue
                for j in ys:
                    for t in xs:
                        if j == i or t == s:
                            continue
                        words = [(s, i), (t, i), (s, j), (t, j)]
                        cs = [poly.coeff(w) for w in words]
                        if all(cs):
                            # normalise so the lhs word y_i x_s has coefficient 1
                            certs = [_cert(-c / lead) for c in cs]
                            out.append(Witness(FOUR_TERM, q, None, certs))
    return out


def slot_counts(poly: NCPoly) -> Counter:
    counts: Counter = Counter()
    for w in poly.terms:
        counts.update(w)
    return counts


def lone_generator_witnesses(relations) -> List[Witness]:
    out = []
    for q in _as_quadratic(relations):
        poly = q.quadratic
        if not poly:
            continue
        counts = slot_counts(poly)
        for g in sorted(counts):
            if counts[g] != 1:
                continue
            (word, c), = [(w, c) for w, c in poly.terms.items() if g in w]
            out.append(Witness(LONE, q, poly.alphabet.gens[g], [_cert(c)]))
    return out


def _pick(ws: List[Witness]) -> Optional[Witness]:
    for w in ws:
        if w.certified:
            return w
    return ws[0] if ws else None


def detect_four_term_mixing(relations, blocks=(("x1", "x2"), ("y1", "y2"))) -> Optional[Witness]:
    return _pick(four_term_witnesses(relations, blocks))


def detect_lone_generator(relations) -> Optional[Witness]:
    return _pick(lone_generator_witnesses(relations))


def smoothness_report(presentation) -> SmoothnessVerdict:
    quad = quadratize_relations(presentation)
    four = four_term_witnesses(quad, presentation.blocks)
    lone = lone_generator_witnesses(quad)
    # a certified witness of either kind beats a conditional one, and four-term
    # mixing takes precedence among certified ones; conditional witnesses
    # are ranked by how many side conditions they need
    best = None
    for pool in ([w for w in four if w.certified], [w for w in lone if w.certified]):
        if pool:
            best = pool[0]
            break
    if best is None and (four or lone):
        best = min(four + lone, key=lambda w: len(w.locus))
    if best is None:
        return SmoothnessVerdict(NONE)
    return SmoothnessVerdict(
        best.pattern,
        best.relation.quadratic,
        best.generator,
        best.certificates,
        conditional=not best.certified,
        exceptional_locus=best.locus,
        candidates=four + lone,
    )
