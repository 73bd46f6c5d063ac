import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from doubleore import catalog
from doubleore.errors import RelationDegreeTooHigh
from doubleore.exact_arith import CERTIFIED
from doubleore.free_algebra import NCPoly, Relation
from doubleore.presentation_io import parse_presentation, specialize
from doubleore.smoothness import (
    FOUR_TERM,
    LONE,
    NONE,
    detect_four_term_mixing,
    detect_lone_generator,
    quadratize_relations,
    slot_counts,
    smoothness_report,
)


def gens(p):
    return {n: NCPoly.gen(p.alphabet, p.env, n) for n in p.alphabet.names}


def test_quadratize_family_A():
    p = catalog.load_family("A").presentation
    g = gens(p)
    want = g["y2"] * g["x2"] + (g["x2"] * g["y1"]).scale(2) + g["x1"] * g["y2"] - g["x2"] * g["y2"]
    assert want in [q.quadratic for q in quadratize_relations(p)]


def test_quadratize_jordan_and_tail():
    p = catalog.load_family("Jordan").presentation
    g = gens(p)
    (q,) = [q for q in quadratize_relations(p) if q.quadratic.coeff(p.alphabet.word("x2 x1"))]
    assert q.quadratic == g["x2"] * g["x1"] - g["x1"] * g["x2"] - g["x1"] * g["x1"]
    B1 = catalog.load_family("B1").presentation
    tails = [q.tail for q in quadratize_relations(B1) if q.tail]
    assert all(t.degree() <= 2 for t in tails)
    t = parse_presentation("gen x | y\nrel y x = x y + 3 x + 1\n")
    (q,) = quadratize_relations(t)
    assert q.tail.degree() == 1 and q.quadratic.degree() == 2


def test_degree_too_high():
    A = catalog.load_family("A").presentation
    g = gens(A)
    with pytest.raises(RelationDegreeTooHigh):
        quadratize_relations([Relation(g["x1"] * g["x1"] * g["x1"], g["x2"] * 0)])


def test_four_term_family_C():
    p = catalog.load_family("C").presentation
    w = detect_four_term_mixing(quadratize_relations(p))
    assert w is not None and w.certified
    pv = p.env.var("p")
    assert [c for c, _ in w.certificates] == [-1, pv * pv, 1, -pv]
    assert all(s == CERTIFIED for _, s in w.certificates)


def test_four_term_family_S_and_not_M():
    assert detect_four_term_mixing(quadratize_relations(catalog.load_family("S").presentation)) is not None
    assert detect_four_term_mixing(quadratize_relations(catalog.load_family("M").presentation)) is None


def test_lone_generator_family_A():
    p = catalog.load_family("A").presentation
    rel = [q for q in quadratize_relations(p) if q.quadratic.coeff(p.alphabet.word("y2 x2"))]
    w = detect_lone_generator(rel)
    assert w.generator.name == "x1"


def test_lone_generator_B_h():
    p = catalog.load_family("B(h)").presentation
    v = smoothness_report(p)
    assert v.pattern == LONE and v.witness_generator.name == "x2" and not v.conditional
    g = gens(p)
    h = p.env.var("h")
    assert v.witness_relation == g["y1"] * g["x1"] - (g["x1"] * g["y1"] + g["x2"] * g["y1"] + g["x1"] * g["y2"]).scale(h)


def test_square_and_commutator_do_not_fire():
    p = parse_presentation("gen x1 x2 |\nrel x2 x1 = x1 x2\n")
    assert detect_lone_generator(quadratize_relations(p)) is None
    q = parse_presentation("gen x1 x2 |\nrel x2 x2 = x1 x1\n")
    assert slot_counts(quadratize_relations(q)[0].quadratic)[0] == 2
    assert detect_lone_generator(quadratize_relations(q)) is None


@pytest.mark.parametrize("fid", catalog.FAMILY_IDS)
def test_catalog_partition(fid):
    v = smoothness_report(catalog.load_family(fid).presentation)
    assert v.pattern == catalog.expected_profile(fid)[1]
    assert not v.conditional


@pytest.mark.parametrize("fid", ["B2", "B3", "B4", "B(h)"])
def test_examples_lone(fid):
    v = smoothness_report(catalog.load_family(fid).presentation)
    assert v.pattern == LONE and not v.conditional


def test_subcase_411_is_conditional_on_g():
    v = smoothness_report(catalog.load_family("Sub4.1.1").presentation)
    assert v.pattern == LONE and v.conditional
    assert v.exceptional_locus == ("g",)
    assert v.witness_generator.name == "x1"
    # the witness relation y2 x1 = h x1 y1 + f x1 y2 is among the candidates, needing h != 0
    by_gen = {(c.generator.name if c.generator else None, c.locus) for c in v.candidates}
    assert ("y1", ("h",)) in by_gen


def test_B1_no_obstruction():
    e = catalog.load_family("B1", {"c": 0, "p": "b^-2"})
    v = smoothness_report(e.presentation)
    assert v.pattern == NONE and v.as_dict()["verdict"] == "no_obstruction"
    assert smoothness_report(catalog.load_family("Manin(q)").presentation).pattern == NONE


def test_report_dict_family_C():
    d = smoothness_report(catalog.load_family("C").presentation).as_dict()
    assert d["verdict"] == "not_smooth" and d["pattern"] == "four_term_mixing"
    assert d["witness_generator"] is None


# --- properties ---------------------------------------------------------------

SAMPLE = ["A", "C", "F", "M", "S", "V", "Z", "B(h)", "B2", "Sub4.1.1"]


def _summary(v):
    return (v.pattern, v.conditional, v.witness_generator and v.witness_generator.name,
            v.witness_relation and v.witness_relation.text())


@given(st.sampled_from(SAMPLE), st.randoms(use_true_random=False))
def test_order_invariance(fid, rnd):
    p = catalog.load_family(fid).presentation
    rels = list(p.relations)
    rnd.shuffle(rels)
    q = dataclasses.replace(p, relations=rels)
    assert _summary(smoothness_report(q)) == _summary(smoothness_report(p))


@given(st.sampled_from(SAMPLE), st.integers(0, 5), st.sampled_from([-3, 2, 7]))
def test_scaling_invariance(fid, k, c):
    p = catalog.load_family(fid).presentation
    rels = list(p.relations)
    k %= len(rels)
    scale = p.env.const(c)
    for name in ("f", "h", "p", "q"):
        if name in p.env.names and p.env.var(name).is_certified_nonzero():
            scale = scale * p.env.var(name)
    rels[k] = rels[k].scaled(scale)
    q = dataclasses.replace(p, relations=rels)
    a, b = smoothness_report(q), smoothness_report(p)
    assert (a.pattern, a.conditional) == (b.pattern, b.conditional)
    assert (a.witness_generator and a.witness_generator.name) == (b.witness_generator and b.witness_generator.name)
