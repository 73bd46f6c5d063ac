"""First-order and higher differential calculi with diagonal twists.

For generators g, h with a relation g h = kappa h g + ... the bimodule rule
g dh = dh nu_h(g) is forced by Leibniz on the binomial part: nu_h(g) =
kappa g and nu_g(h) = kappa^-1 h.  Each nu_g fixes g.  Forms are stored in
the right-module basis e_J = dg_{j1} ^ ... ^ dg_{jk} with j1 < ... < jk in
the omega order; moving an algebra element a right past e_J applies the
composed twist of J, and swapping adjacent differentials uses
dg ^ dh = -nu_h(g)/g * dh ^ dg.

The checks establish a specific calculus.  A failed stage says that this
construction does not work, not that the algebra has no integrable
calculus at all.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    DoubleOreError,
    InconsistentSwap,
    MissingRule,
    NotNormalForm,
    NotOrientable,
    UnsupportedCalculusShape,
    WitnessFormsMissing,
)
from .exact_arith import CERTIFIED, ParamEnv, Scalar
from .free_algebra import Alphabet, NCPoly, Word
from .rewrite import RewriteSystem

Index = Tuple[int, ...]
STAGES = ("extension", "commutation", "leibniz", "omega2", "connectedness", "integral")


# --- twists ------------------------------------------------------------------------

@dataclass
class TwistAutomorphism:
    """nu_g with nu_g(h) = scale[h] * h on generators (by alphabet index)."""

    gen: int
    scale: Dict[int, Scalar]

    def weight(self, w: Word) -> Scalar:
        out = None
        for letter in w:
            c = self.scale[letter]
            out = c if out is None else out * c
        return out if out is not None else next(iter(self.scale.values())).env.one()

    def apply(self, f: NCPoly) -> NCPoly:
        return NCPoly(f.alphabet, f.env, {w: c * self.weight(w) for w, c in f.terms.items()})

    def text(self, alphabet: Alphabet) -> str:
        return ", ".join(f"{alphabet.names[h]}={c.text()}" for h, c in sorted(self.scale.items()))


def derive_twists(system: RewriteSystem) -> Dict[int, TwistAutomorphism]:
    A, E = system.alphabet, system.env
    n = len(A)
    scale = {g: {h: E.one() for h in range(n)} for g in range(n)}
    for g in range(n):
        for h in range(n):
            if A.rank[g] <= A.rank[h]:
                continue
            rule = system.rules.get((g, h))
            if rule is None:
                raise UnsupportedCalculusShape(f"no relation rewrites {A.names[g]} {A.names[h]}")
            kappa = rule.rhs.coeff((h, g))
            if not kappa.is_certified_nonzero():
                raise UnsupportedCalculusShape(
                    f"{A.names[g]} {A.names[h]} is not a twisted commutator: coefficient of "
                    f"{A.names[h]} {A.names[g]} is {kappa.text()}"
                )
            scale[h][g] = kappa
            scale[g][h] = kappa.inverse()
    return {g: TwistAutomorphism(g, scale[g]) for g in range(n)}


def twists_from_table(alphabet: Alphabet, env: ParamEnv, table: Dict[str, Dict[str, Scalar]]
                      ) -> Dict[int, TwistAutomorphism]:
    out = {}
    for g in range(len(alphabet)):
        row = table.get(alphabet.names[g], {})
        out[g] = TwistAutomorphism(g, {h: row.get(alphabet.names[h], env.one()) for h in range(len(alphabet))})
    return out


# --- the calculus ---------------------------------------------------------------------

@dataclass
class Form:
    degree: int
    terms: Dict[Index, NCPoly]

    def is_zero(self) -> bool:
        return not any(self.terms.values())

    def __add__(self, other: "Form") -> "Form":
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out[k] + v if k in out else v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Form(max(self.degree, other.degree), out)

    def __neg__(self):
        return Form(self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def text(self, names: Sequence[str]) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for J in sorted(self.terms):
            d = "^".join("d" + names[j] for j in J)
            parts.append(f"{d}*({self.terms[J].text()})")
        return " + ".join(parts)


class Calculus:
    """The exterior calculus determined by a set of diagonal twists."""

    def __init__(self, system: RewriteSystem, nus: Dict[int, TwistAutomorphism], order: Sequence[int]):
        self.system = system
        self.alphabet = system.alphabet
        self.env = system.env
        self.nus = nus
        self.order = tuple(order)           # position -> generator index
        self.pos = {g: k for k, g in enumerate(self.order)}
        self.n = len(self.order)
        self._swap: Dict[Tuple[int, int], Scalar] = {}
        for u in range(self.n):
            for v in range(u):
                gu, gv = self.order[u], self.order[v]
                # dg_u ^ dg_v = -lambda_{g_v}(g_u) dg_v ^ dg_u
                self._swap[(u, v)] = -nus[gv].scale[gu]

    # algebra-level helpers ---------------------------------------------------------
    def nf(self, f: NCPoly) -> NCPoly:
        return self.system.normal_form(f)

    def mono(self, w: Word, c=1) -> NCPoly:
        return NCPoly.monomial(self.alphabet, self.env, w, c)

    def weight(self, J: Index, w: Word) -> Scalar:
        out = self.env.one()
        for j in J:
            out = out * self.nus[self.order[j]].weight(w)
        return out

    def twist(self, J: Index, f: NCPoly) -> NCPoly:
        return NCPoly(self.alphabet, self.env, {w: c * self.weight(J, w) for w, c in f.terms.items()})

    def omega_weight(self, w: Word) -> Scalar:
        return self.weight(tuple(range(self.n)), w)

    def nu_omega_inverse(self, f: NCPoly) -> NCPoly:
        return NCPoly(self.alphabet, self.env, {w: c / self.omega_weight(w) for w, c in f.terms.items()})

    # forms ---------------------------------------------------------------------------
    def zero(self, k: int) -> Form:
        return Form(k, {})

    def basis(self, J: Index, coeff: Optional[NCPoly] = None) -> Form:
        c = coeff if coeff is not None else self.mono(())
        return Form(len(J), {tuple(J): c} if c else {})

    def sort_index(self, seq: Sequence[int]) -> Tuple[Optional[Index], Scalar]:
        """Reorder a wedge of basis one-forms; None when an index repeats."""
        if len(set(seq)) != len(seq):
            return None, self.env.zero()
        seq = list(seq)
        factor = self.env.one()
        for i in range(len(seq)):
            for k in range(len(seq) - 1 - i):
                if seq[k] > seq[k + 1]:
                    factor = factor * self._swap[(seq[k], seq[k + 1])]
                    seq[k], seq[k + 1] = seq[k + 1], seq[k]
        return tuple(seq), factor

    def from_terms(self, terms: Iterable[Tuple[Scalar, Sequence[str]]]) -> Form:
        out = None
        for c, ds in terms:
            seq = [self.pos[self.alphabet.index(g)] for g in ds]
            J, s = self.sort_index(seq)
            f = self.zero(len(seq)) if J is None else self.basis(J, self.mono((), c * s))
            out = f if out is None else out + f
        return out if out is not None else self.zero(0)

    def right_mul(self, form: Form, f: NCPoly) -> Form:
        out = {}
        for J, c in form.terms.items():
            v = self.nf(c * f)
            if v:
                out[J] = v
        return Form(form.degree, out)

    def left_mul(self, f: NCPoly, form: Form) -> Form:
        out = {}
        for J, c in form.terms.items():
            v = self.nf(self.twist(J, f) * c)
            if v:
                out[J] = v
        return Form(form.degree, out)

    def wedge(self, a: Form, b: Form) -> Form:
        out = self.zero(a.degree + b.degree)
        for I, ca in a.terms.items():
            for J, cb in b.terms.items():
                K, s = self.sort_index(I + J)
                if K is None:
                    continue
                coeff = self.nf(self.twist(J, ca) * cb).scale(s)
                out = out + self.basis(K, coeff)
        return out

    def pi_omega(self, top: Form) -> NCPoly:
        if top.degree != self.n:
            raise ValueError("pi_omega takes a top-degree form")
        return top.terms.get(tuple(range(self.n)), NCPoly.zero(self.alphabet, self.env))

    # the differential --------------------------------------------------------------
    def d_word(self, w: Word) -> Form:
        """Leibniz expansion of a word (any word; coefficients normalised)."""
        acc: Dict[Index, NCPoly] = {}
        for i, g in enumerate(w):
            J = (self.pos[g],)
            prefix, suffix = w[:i], w[i + 1:]
            term = self.mono(prefix + suffix, self.nus[g].weight(prefix))
            acc[J] = acc[J] + term if J in acc else term
        return Form(1, {J: v for J, v in ((J, self.nf(v)) for J, v in acc.items()) if v})

    def d(self, x) -> Form:
        if isinstance(x, NCPoly):
            out = self.zero(1)
            for w, c in x.terms.items():
                dw = self.d_word(w)
                out = out + Form(1, {J: v.scale(c) for J, v in dw.terms.items()})
            return out
        form: Form = x
        out = self.zero(form.degree + 1)
        sign = -1 if form.degree % 2 else 1
        for J, c in form.terms.items():
            out = out + self.wedge(self.basis(J), self.d(c))
        if sign < 0:
            out = -out
        return out

    def partials(self, w: Word) -> Tuple[NCPoly, ...]:
        if not self.alphabet.is_normal(tuple(w)):
            raise NotNormalForm(f"{self.alphabet.word_text(tuple(w))} is not a PBW monomial")
        dw = self.d_word(tuple(w))
        zero = NCPoly.zero(self.alphabet, self.env)
        return tuple(dw.terms.get((k,), zero) for k in range(self.n))


# --- specification and checks ------------------------------------------------------------

@dataclass
class CalculusSpec:
    presentation: object
    system: RewriteSystem
    nus: Dict[int, TwistAutomorphism]
    omega_order: Tuple[str, ...]
    witness: Optional[Dict[Tuple[str, int], list]] = None
    twist_source: str = "derived"

    @classmethod
    def from_presentation(cls, presentation, twists: str = "derived", witness: bool = True) -> "CalculusSpec":
        try:
            system = RewriteSystem(presentation.alphabet, presentation.env, presentation.relations)
        except (MissingRule, NotOrientable) as exc:
            raise UnsupportedCalculusShape(str(exc)) from None
        if twists == "derived":
            nus = derive_twists(system)
        elif twists == "stored":
            if not presentation.twists:
                raise UnsupportedCalculusShape("the presentation stores no twist table")
            nus = twists_from_table(presentation.alphabet, presentation.env, presentation.twists)
        else:
            raise ValueError(f"twists must be 'derived' or 'stored', not {twists!r}")
        for nu in nus.values():
            for h, c in nu.scale.items():
                if not c.is_certified_nonzero():
                    raise UnsupportedCalculusShape(
                        f"nu_{presentation.alphabet.names[nu.gen]} scales {presentation.alphabet.names[h]} "
                        f"by {c.text()}, which is not certified nonzero")
        order = tuple(presentation.omega_order) or tuple(presentation.alphabet.names)
        wit = dict(presentation.witness) if (witness and presentation.witness) else None
        return cls(presentation, system, nus, order, wit, twists)

    @property
    def alphabet(self) -> Alphabet:
        return self.system.alphabet

    def calculus(self) -> Calculus:
        return Calculus(self.system, self.nus, [self.alphabet.index(g) for g in self.omega_order])


def twist_table_residuals(spec: CalculusSpec) -> Dict[Tuple[str, str], Scalar]:
    """Stored twist table minus the twists in use (nonzero entries only)."""
    p = spec.presentation
    out = {}
    A = spec.alphabet
    for g, row in (p.twists or {}).items():
        for h, c in row.items():
            r = c - spec.nus[A.index(g)].scale[A.index(h)]
            if r:
                out[(g, h)] = r
    return out


@dataclass
class ExtensionResult:
    residuals: Dict[int, NCPoly]                           # relation index -> residual
    weight_defects: List[Tuple[int, Word, Scalar]]          # (relation, word, lambda_lhs - lambda_w)

    @property
    def ok(self) -> bool:
        return not any(self.residuals.values())


def check_aut_extension(nu: TwistAutomorphism, presentation, system: Optional[RewriteSystem] = None
                        ) -> ExtensionResult:
    """nu extends to an endomorphism iff nu(r) lies in the ideal for every
    relation r; reduced against lambda_lhs * r this is nf(sum (lambda_w -
    lambda_lhs) c_w w)."""
    system = system or RewriteSystem(presentation.alphabet, presentation.env, presentation.relations)
    residuals, defects = {}, []
    for k, rel in enumerate(presentation.relations):
        r = rel.poly
        lead, lc = r.leading()
        lam = nu.weight(lead)
        acc = NCPoly.zero(r.alphabet, r.env)
        for w, c in r.terms.items():
            dl = nu.weight(w) - lam
            if dl:
                defects.append((k, w, -dl))
                acc = acc + NCPoly.monomial(r.alphabet, r.env, w, c * dl / lc)
        residuals[k] = system.normal_form(acc)
    return ExtensionResult(residuals, defects)


def check_aut_commutation(nus: Sequence[TwistAutomorphism]) -> Dict[Tuple[int, int, int], Scalar]:
    out = {}
    nus = list(nus)
    for a, b in combinations(nus, 2):
        for g in a.scale:
            # (nu_a o nu_b)(g) - (nu_b o nu_a)(g), both multiples of g
            out[(a.gen, b.gen, g)] = a.scale[g] * b.scale[g] - b.scale[g] * a.scale[g]
    return out


def check_leibniz_compatibility(spec: CalculusSpec) -> Dict[int, Form]:
    """d applied to each relation (lhs - rhs) after push-through; must vanish."""
    cal = spec.calculus()
    return {k: cal.d(rel.poly) for k, rel in enumerate(spec.presentation.relations)}


def derive_omega2(spec: CalculusSpec) -> Dict[Tuple[str, str], Scalar]:
    """mu with dg_j ^ dg_i = mu dg_i ^ dg_j for i before j in the omega order."""
    A = spec.alphabet
    order = [A.index(g) for g in spec.omega_order]
    out = {}
    for i, j in combinations(order, 2):
        mu_ji = -spec.nus[i].scale[j]      # from j di = di nu_i(j)
        mu_ij = -spec.nus[j].scale[i]      # from i dj = dj nu_j(i)
        if not (mu_ij * mu_ji).is_one():
            raise InconsistentSwap(
                f"d{A.names[j]}^d{A.names[i]}: the two derivations give {mu_ji.text()} and "
                f"{mu_ij.inverse().text()}")
        out[(A.names[j], A.names[i])] = mu_ji
    return out


def compute_partials(monomial: Word, spec) -> Tuple[NCPoly, ...]:
    cal = spec.calculus() if isinstance(spec, CalculusSpec) else spec
    return cal.partials(monomial)


# --- linear algebra over the parameter field --------------------------------------------

def kernel(columns: Sequence[Dict[object, Scalar]], env: ParamEnv) -> Tuple[List[Dict[int, Scalar]], List[str]]:
    """Kernel of the linear map whose k-th column is columns[k].

    Pivots are taken certified nonzero where possible; a pivot that is only
    generically nonzero is used but its exceptional factors are returned.
    """
    ncols = len(columns)
    rows: Dict[object, Dict[int, Scalar]] = {}
    for c, col in enumerate(columns):
        for key, v in col.items():
            if v:
                rows.setdefault(key, {})[c] = v
    pending = list(rows.values())
    pivots: Dict[int, Dict[int, Scalar]] = {}
    conditions: List[str] = []
    for c in range(ncols):
        cands = [r for r in pending if c in r]
        if not cands:
            continue
        best = next((r for r in cands if r[c].status() == CERTIFIED), None)
        if best is None:
            best = cands[0]
            conditions.extend(best[c].exceptional_locus())
        pending.remove(best)
        inv = best[c].inverse()
        prow = {k: v * inv for k, v in best.items()}
        for r in pending:
            if c in r:
                f = r[c]
                for k, v in prow.items():
                    s = r.get(k)
                    s = -f * v if s is None else s - f * v
                    if s:
                        r[k] = s
                    else:
                        r.pop(k, None)
        for p in pivots.values():
            if c in p:
                f = p[c]
                for k, v in prow.items():
                    s = p.get(k)
                    s = -f * v if s is None else s - f * v
                    if s:
                        p[k] = s
                    else:
                        p.pop(k, None)
        pivots[c] = prow
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = {fcol: env.one()}
        for pc, prow in pivots.items():
            if fcol in prow:
                vec[pc] = -prow[fcol]
        basis.append(vec)
    return basis, list(dict.fromkeys(conditions))


def check_connected(spec, degree_bound: int = 6) -> Tuple[int, List[NCPoly], List[str]]:
    cal = spec.calculus() if isinstance(spec, CalculusSpec) else spec
    words = list(cal.alphabet.normal_words(degree_bound))
    cols = []
    for w in words:
        dw = cal.d_word(w)
        col = {}
        for J, c in dw.terms.items():
            for u, v in c.terms.items():
                col[(J, u)] = v
        cols.append(col)
    basis, conds = kernel(cols, cal.env)
    elems = [NCPoly(cal.alphabet, cal.env, {words[k]: v for k, v in vec.items()}) for vec in basis]
    return degree_bound, elems, conds


# --- witness forms and the integral identities ------------------------------------------

def witness_forms(spec: CalculusSpec) -> Dict[Tuple[str, int], List[Form]]:
    if not spec.witness:
        raise WitnessFormsMissing(f"{spec.presentation.name or 'presentation'} stores no witness forms")
    cal = spec.calculus()
    return {key: [cal.from_terms(t) for t in forms] for key, forms in spec.witness.items()}


def generate_witness(spec: CalculusSpec) -> Dict[Tuple[str, int], List[Form]]:
    """omega^k_i = e_J and omegabar^{n-k}_i = e_{J'} / s, J' the complement of
    J and e_{J'} ^ e_J = s omega."""
    cal = spec.calculus()
    n = cal.n
    out: Dict[Tuple[str, int], List[Form]] = {}
    for k in range(1, n):
        om, bar = [], []
        for J in combinations(range(n), k):
            Jc = tuple(i for i in range(n) if i not in J)
            _, s = cal.sort_index(Jc + J)
            if not s.is_certified_nonzero():
                raise WitnessFormsMissing(f"no witness for {J}: reordering factor {s.text()} may vanish")
            om.append(cal.basis(J))
            bar.append(cal.basis(Jc, cal.mono((), s.inverse())))
        out[("omega", k)] = om
        out[("omegabar", n - k)] = bar
    return out


def as_stored_witness(spec: CalculusSpec, forms: Dict[Tuple[str, int], List[Form]]):
    """Convert forms to the (coefficient, differentials) lists of a Presentation."""
    cal = spec.calculus()
    names = [cal.alphabet.names[g] for g in cal.order]
    out = {}
    for key, fs in forms.items():
        out[key] = [[(c.coeff(()), tuple(names[j] for j in J)) for J, c in f.terms.items()] for f in fs]
    return out


@dataclass
class IdentityResidual:
    label: str          # "L1", "R2", ...
    form: str           # the basis form tested
    residual: Form


def basis_forms(cal: Calculus, k: int, coefficient_degree: int) -> List[Form]:
    out = []
    words = list(cal.alphabet.normal_words(coefficient_degree))
    for J in combinations(range(cal.n), k):
        for w in words:
            out.append(cal.basis(J, cal.mono(w)))
    return out


def check_integral_identities(spec: CalculusSpec, coefficient_degree_bound: int = 3,
                              forms: Optional[Dict[Tuple[str, int], List[Form]]] = None
                              ) -> List[IdentityResidual]:
    cal = spec.calculus()
    forms = forms if forms is not None else witness_forms(spec)
    n = cal.n
    names = [cal.alphabet.names[g] for g in cal.order]
    out = []
    for k in range(1, n):
        try:
            om_k, bar_nk = forms[("omega", k)], forms[("omegabar", n - k)]
            om_nk, bar_k = forms[("omega", n - k)], forms[("omegabar", k)]
        except KeyError as exc:
            raise WitnessFormsMissing(f"missing witness list {exc.args[0]}") from None
        if len(om_k) != len(bar_nk) or len(om_nk) != len(bar_k):
            raise WitnessFormsMissing(f"witness lists of degree {k} and {n - k} have different lengths")
        for f in basis_forms(cal, k, coefficient_degree_bound):
            left = cal.zero(k)
            for a, b in zip(om_k, bar_nk):
                left = left + cal.right_mul(a, cal.pi_omega(cal.wedge(b, f)))
            right = cal.zero(k)
            for a, b in zip(om_nk, bar_k):
                coeff = cal.nu_omega_inverse(cal.pi_omega(cal.wedge(f, a)))
                right = right + cal.left_mul(coeff, b)
            text = f.text(names)
            out.append(IdentityResidual(f"L{k}", text, f - left))
            out.append(IdentityResidual(f"R{k}", text, f - right))
    return out


# --- the full certificate ----------------------------------------------------------------

@dataclass
class IntegrabilityReport:
    dimension: int
    verdict: str = "Certified"
    stage: Optional[str] = None
    twist_source: str = "derived"
    twists: Dict[str, Dict[str, Scalar]] = field(default_factory=dict)
    twist_table_residuals: Dict[Tuple[str, str], Scalar] = field(default_factory=dict)
    aut_extension_residuals: Dict[Tuple[str, int], NCPoly] = field(default_factory=dict)
    weight_defects: Dict[Tuple[str, int], List[Tuple[str, Scalar]]] = field(default_factory=dict)
    commutation_residuals: Dict[Tuple[str, str, str], Scalar] = field(default_factory=dict)
    leibniz_residuals: Dict[int, Form] = field(default_factory=dict)
    omega2_relations: Dict[Tuple[str, str], Scalar] = field(default_factory=dict)
    connectedness: Optional[Tuple[int, List[NCPoly]]] = None
    connectedness_conditions: List[str] = field(default_factory=list)
    integral_identity_residuals: List[IdentityResidual] = field(default_factory=list)
    witness_source: Optional[str] = None
    gk_dim: Optional[int] = None
    message: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == "Certified"

    def fail(self, stage: str, message: str):
        self.verdict = f"Failed({stage})"
        self.stage = stage
        self.message = message + "; this rules out only the calculus built here"
        return self

    def as_dict(self, names: Sequence[str] = ()) -> dict:
        out = {
            "verdict": "certified" if self.certified else "failed",
            "stage": self.stage,
            "dimension": self.dimension,
            "gk_dim": self.gk_dim,
            "message": self.message,
            "twist_source": self.twist_source,
            "twists": {g: {h: c.text() for h, c in row.items()} for g, row in self.twists.items()},
            "twist_table_residuals": {f"{g}:{h}": c.text() for (g, h), c in self.twist_table_residuals.items()},
            "aut_extension_residuals": {f"nu_{g}:rel{k}": v.text()
                                        for (g, k), v in self.aut_extension_residuals.items() if v},
            "weight_defects": {f"nu_{g}:rel{k}": [[w, c.text()] for w, c in v]
                               for (g, k), v in self.weight_defects.items()},
            "leibniz_residuals": {f"rel{k}": v.text(names) for k, v in self.leibniz_residuals.items()
                                  if not v.is_zero()},
            "omega2_relations": {f"d{a}^d{b}": c.text() for (a, b), c in self.omega2_relations.items()},
            "connectedness": None if self.connectedness is None else {
                "degree_bound": self.connectedness[0],
                "kernel": [p.text() for p in self.connectedness[1]],
                "conditions": self.connectedness_conditions,
            },
            "integral_identities_checked": len(self.integral_identity_residuals),
            "integral_identity_failures": [
                [r.label, r.form, r.residual.text(names)] for r in self.integral_identity_residuals
                if not r.residual.is_zero()
            ],
            "witness_source": self.witness_source,
        }
        return out


def certify(spec: CalculusSpec, connect_bound: int = 6, integral_bound: int = 3) -> IntegrabilityReport:
    A = spec.alphabet
    cal = spec.calculus()
    rep = IntegrabilityReport(cal.n, twist_source=spec.twist_source, gk_dim=spec.presentation.gk_dim)
    rep.twists = {A.names[g]: {A.names[h]: c for h, c in nu.scale.items()} for g, nu in spec.nus.items()}
    rep.twist_table_residuals = twist_table_residuals(spec)

    bad = []
    for g, nu in spec.nus.items():
        res = check_aut_extension(nu, spec.presentation, spec.system)
        for k, v in res.residuals.items():
            rep.aut_extension_residuals[(A.names[g], k)] = v
            if v:
                bad.append(f"nu_{A.names[g]} on relation {k}")
        for k, w, c in res.weight_defects:
            rep.weight_defects.setdefault((A.names[g], k), []).append((A.word_text(w), c))
    if bad:
        return rep.fail("extension", "twists do not extend: " + ", ".join(bad))

    comm = check_aut_commutation(list(spec.nus.values()))
    rep.commutation_residuals = {(A.names[a], A.names[b], A.names[g]): v for (a, b, g), v in comm.items()}
    if any(comm.values()):
        return rep.fail("commutation", "twists do not commute")

    rep.leibniz_residuals = check_leibniz_compatibility(spec)
    if any(not f.is_zero() for f in rep.leibniz_residuals.values()):
        return rep.fail("leibniz", "d is not compatible with the relations")

    try:
        rep.omega2_relations = derive_omega2(spec)
    except InconsistentSwap as exc:
        return rep.fail("omega2", str(exc))

    bound, ker, conds = check_connected(spec, connect_bound)
    rep.connectedness = (bound, ker)
    rep.connectedness_conditions = conds
    if len(ker) != 1 or ker[0].words() != [()] or conds:
        return rep.fail("connectedness", "ker d is larger than the scalars" if len(ker) != 1 else
                        "kernel computed only away from an exceptional locus")

    if spec.witness:
        forms = witness_forms(spec)
        rep.witness_source = "stored"
    else:
        try:
            forms = generate_witness(spec)
        except WitnessFormsMissing as exc:
            return rep.fail("integral", str(exc))
        rep.witness_source = "generated"
    try:
        rep.integral_identity_residuals = check_integral_identities(spec, integral_bound, forms)
    except WitnessFormsMissing as exc:
        return rep.fail("integral", str(exc))
    if any(not r.residual.is_zero() for r in rep.integral_identity_residuals):
        return rep.fail("integral", "the witness forms do not reproduce every basis form")
    rep.message = f"connected integrable calculus of dimension {cal.n}"
    return rep
