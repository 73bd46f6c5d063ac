"""Acceptance suite: one pass/fail line per criterion.

Every tolerance is an exact zero.  The lines are printed as the tests run
and again in the pytest summary.
"""
import itertools
import random
import time

from doubleore import catalog
from doubleore.calculus import CalculusSpec, certify, check_aut_extension
from doubleore.de_core import check_operator_relations, check_system_c, classify_iterated_ore
from doubleore.presentation_io import specialize
from doubleore.rewrite import build_rewrite_system
from doubleore.smoothness import FOUR_TERM, LONE, smoothness_report

import conftest
from helpers import perturbed
from oracles import naive_normal_form, same_modulo, sympy_det_symbolic


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    return ok


def instances():
    for fid in catalog.FAMILY_IDS:
        yield from catalog.expand_instances(catalog.load_family(fid))


def label(e):
    if not e.bindings:
        return e.id
    return e.id + "[" + ",".join(f"{k}={v}" for k, v in sorted(e.bindings.items())) + "]"


# 1 ------------------------------------------------------------------------------

def test_criterion_1_system_c_sweep():
    t0 = time.perf_counter()
    bad, count = [], 0
    for e in instances():
        count += 1
        rep = check_system_c(e.data)
        if len(rep.residuals) != 24 or not rep.residuals_zero or not rep.is_double_extension:
            bad.append(label(e))
    elapsed = time.perf_counter() - t0
    # independent determinant: symbolic sympy, reduced modulo any constraint
    det_bad = []
    for e in instances():
        d = e.data
        cons = [(q.name, q.constraint) for q in e.params.params if q.constraint]
        want = sympy_det_symbolic([[x.text() for x in r] for r in d.Sigma], cons)
        rep = check_system_c(d)
        if want == 0 or not same_modulo(rep.detSigma.text(), want, cons):
            det_bad.append(label(e))
    ok = not bad and not det_bad and elapsed < 60
    record(1, ok, f"{count} instances of A..Z: all 24 System C residuals zero, det Sigma certified"
                  f" nonzero, symbolic sympy determinant agrees; sweep {elapsed:.1f} s"
                  + (f"; failures {bad + det_bad}" if bad or det_bad else ""))
    assert ok


# 2 ------------------------------------------------------------------------------

def test_criterion_2_iterated_ore():
    wrong, extras = [], []
    cases = [(e, e.expected_ore) for e in instances()]
    cases += [(catalog.load_family(fid, vals), clauses) for fid, vals, clauses in catalog.SPECIAL_ORE]
    for e, stated in cases:
        got = set(classify_iterated_ore(e.data).verdict)
        extra = catalog.computed_extra(e.id, e.bindings)
        if got != set(stated) | extra:
            wrong.append((label(e), sorted(got), sorted(stated)))
        if extra:
            extras.append(f"{label(e)} also {'+'.join(sorted(extra))}")
    # the stated lists themselves
    want = {k: {"2b"} for k in "ADGHKLQXY"}
    want["V"] = {"2c"}
    stated_ok = all(set(catalog.expected_profile(f)[0]) == want.get(f, set()) for f in catalog.FAMILY_IDS)
    ok = not wrong and stated_ok
    record(2, ok, "every stated clause holds (M12=0 on A,D,G,H,K,L,Q,X,Y; M21=0,q11=0 on V and M[f=0];"
                  " Sigma12=0 on N[f=0]) and the other families have none; computed additions: "
                  + "; ".join(extras) + (f"; mismatches {wrong}" if wrong else ""))
    assert ok


# 3 ------------------------------------------------------------------------------

def test_criterion_3_smoothness_partition():
    four, lone, none = set(), set(), set()
    for fid in catalog.FAMILY_IDS:
        v = smoothness_report(catalog.load_family(fid).presentation)
        {FOUR_TERM: four, LONE: lone}.get(v.pattern, none).add(fid)
        if v.conditional:
            none.add(fid)
    partition_ok = four == set("CFISTU") and lone == set(catalog.FAMILY_IDS) - set("CFISTU") and not none
    bh = smoothness_report(catalog.load_family("B(h)").presentation)
    bh_ok = bh.pattern == LONE and bh.witness_generator.name == "x2" and not bh.conditional
    sub = smoothness_report(catalog.load_family("Sub4.1.1").presentation)
    sub_ok = sub.pattern == LONE
    others = {fid: smoothness_report(catalog.load_family(fid).presentation) for fid in ("B2", "B3", "B4")}
    others_ok = all(v.pattern == LONE and not v.conditional for v in others.values())
    ok = partition_ok and bh_ok and sub_ok and others_ok
    note = (f"conditional on {', '.join(sub.exceptional_locus)} != 0 (witness generator"
            f" {sub.witness_generator.name})" if sub.conditional else "unconditional")
    record(3, ok, f"FourTermMixing = {{{','.join(sorted(four))}}}, LoneGenerator on the other"
                  f" {len(lone)}; B(h) witness {bh.witness_generator.name}; B2, B3, B4 LoneGenerator;"
                  f" Sub4.1.1 LoneGenerator, {note}")
    assert ok


# 4 ------------------------------------------------------------------------------

def _random_breaking_perturbations(count, seed="confluence"):
    rng = random.Random(seed)
    fams = [catalog.load_family(fid) for fid in catalog.FAMILY_IDS]
    out = []
    while len(out) < count:
        e = rng.choice(fams)
        r, c = rng.randrange(4), rng.randrange(4)
        d = perturbed(e, r, c, e.data.Sigma[r][c] + rng.choice([-2, -1, 1, 2, 3]))
        if not check_system_c(d).residuals_zero:
            out.append((e.id, r, c, d))
    return out


def test_criterion_4_confluence_iff_system_c():
    unresolved = []
    fams = 0
    for e in instances():
        fams += 1
        if not build_rewrite_system(e.presentation).check_confluence().all_resolved:
            unresolved.append(label(e))
    missed = []
    perts = _random_breaking_perturbations(10)
    for fid, r, c, d in perts:
        if d.full_system().check_confluence().all_resolved:
            missed.append((fid, r, c))
    ok = not unresolved and not missed
    record(4, ok, f"all overlaps resolve on {fams} instances of A..Z; each of {len(perts)} random"
                  f" System C breaking Sigma perturbations leaves an unresolved overlap"
                  f" ({', '.join(f'{f}:Sigma[{r}][{c}]' for f, r, c, _ in perts)})"
                  + (f"; disagreements {unresolved + missed}" if unresolved or missed else ""))
    assert ok


# 5 ------------------------------------------------------------------------------

def test_criterion_5_b1_certificate():
    t0 = time.perf_counter()
    good = catalog.load_family("B1", {"a": 0, "c": 0, "p": "b^-2"}).presentation
    rep = certify(CalculusSpec.from_presentation(good), 6, 3)
    elapsed = time.perf_counter() - t0
    certified = rep.verdict == "Certified" and rep.dimension == 3
    identities = bool(rep.integral_identity_residuals) and all(
        r.residual.is_zero() for r in rep.integral_identity_residuals)

    # c != 0: every extension residual coefficient is divisible by c
    withc = catalog.load_family("B1", {"a": 0, "p": "b^-2"}).presentation
    spec_c = CalculusSpec.from_presentation(withc)
    c = withc.env.var("c")
    res_c = check_aut_extension(spec_c.nus[withc.alphabet.index("x")], withc)
    coeffs = [k for r in res_c.residuals.values() for k in r.terms.values()]
    c_ok = bool(coeffs) and all(not k.is_zero() and (k / c) * c == k for k in coeffs)

    # p != b^-2: the nu_y1 weight defect is exactly p - b^-2; it sits on the
    # a x^2 term of the y2 y1 relation, so a stays symbolic here
    offp = catalog.load_family("B1", {"c": 0}).presentation
    spec_p = CalculusSpec.from_presentation(offp)
    A = offp.alphabet
    b, p = offp.env.var("b"), offp.env.var("p")
    res_p = check_aut_extension(spec_p.nus[A.index("y1")], offp)
    defects = [v for _, w, v in res_p.weight_defects if w == A.word("x x")]
    p_ok = defects == [p - b ** -2]

    # the a-parameter: recorded, not part of the criterion
    with_a = certify(CalculusSpec.from_presentation(
        catalog.load_family("B1", {"c": 0, "p": "b^-2"}).presentation))

    ok = certified and identities and c_ok and p_ok and elapsed < 30
    record(5, ok, f"B1 at a=0, c=0, p=b^-2 with symbolic b: {rep.verdict} (dimension {rep.dimension},"
                  f" {len(rep.integral_identity_residuals)} witness identities exact) in {elapsed:.1f} s;"
                  f" c != 0 residuals are nonzero multiples of c; nu_y1 defect at p != b^-2 is"
                  f" {defects[0].text() if defects else 'missing'}")
    record(5, True, f"note: with a symbolic the same data gives {with_a.verdict}, so the certificate"
                    f" needs a = 0")
    assert ok


# 6 ------------------------------------------------------------------------------

def _leibniz_and_dd(cal, degree):
    words = list(cal.alphabet.normal_words(degree))
    monos = [cal.mono(w) for w in words]
    dd = all(cal.d(cal.d(m)).is_zero() for m in monos)
    pairs = 0
    leib = True
    for u, v in itertools.product(monos, repeat=2):
        pairs += 1
        lhs = cal.d(cal.nf(u * v))
        rhs = cal.right_mul(cal.d(u), v) + cal.left_mul(u, cal.d(v))
        if not (lhs - rhs).is_zero():
            leib = False
    return leib, dd, len(words), pairs


def test_criterion_6_differential_invariants():
    cases = {
        "B1": catalog.load_family("B1", {"a": 0, "c": 0, "p": "b^-2"}).presentation,
        "Comm3": catalog.load_family("Comm3").presentation,
    }
    parts, ok = [], True
    for name, p in cases.items():
        leib, dd, nw, npairs = _leibniz_and_dd(CalculusSpec.from_presentation(p).calculus(), 4)
        ok = ok and leib and dd
        parts.append(f"{name}: Leibniz on {npairs} pairs {'exact' if leib else 'FAILS'},"
                     f" d(d(m)) = 0 on {nw} monomials {'exact' if dd else 'FAILS'}")
    record(6, ok, "; ".join(parts) + " (degree <= 4)")
    assert ok


# 7 ------------------------------------------------------------------------------

def test_criterion_7_normal_form_oracle():
    total, bad = 0, []
    for fid in ("A", "Z"):
        R = build_rewrite_system(catalog.load_family(fid).presentation)
        rules = {lhs: dict(rule.rhs.terms) for lhs, rule in R.rules.items()}
        words = [w for n in range(1, 5) for w in itertools.product(range(4), repeat=n)]
        for w in words:
            total += 1
            got = R.nf_word(w)
            exhaustive = R.oracle_normal_form(w)
            naive = naive_normal_form(rules, w, R.alphabet.rank)
            if exhaustive is None or got != exhaustive or dict(got.terms) != naive:
                bad.append((fid, w))
    ok = total == 680 and not bad
    record(7, ok, f"{total // 2} words of length 1..4 in each of A and Z: normal_form equals the"
                  f" all-orders oracle and an independent rightmost rewriter"
                  + (f"; failures {bad[:5]}" if bad else ""))
    assert ok


# 8 ------------------------------------------------------------------------------

def test_criterion_8_checker_agreement():
    diverge, n = [], 0
    datas = [(label(e), e.data) for e in instances()]
    datas += [(f"{f}:Sigma[{r}][{c}]", d) for f, r, c, d in _random_breaking_perturbations(10, "checkers")]
    for name, d in datas:
        n += 1
        sc = check_system_c(d).is_double_extension
        op = check_operator_relations(d, 2).all_zero
        if sc != op:
            diverge.append(name)
    ok = not diverge
    record(8, ok, f"check_operator_relations (degree 2) and check_system_c agree on {n} data sets"
                  f" (all trimmed families plus 10 broken perturbations)"
                  + (f"; divergent {diverge}" if diverge else ""))
    assert ok


# 9 ------------------------------------------------------------------------------

def test_criterion_9_not_reproduced():
    record(9, True, "note: AS-regularity, the (14641) resolution, Koszulity and GK dimension are not"
                    " computed; gk_dim is catalog metadata only and is never asserted")
