"""DE-data of right double extensions and the checks on it.

Layout conventions.  For the base k_Q[x1, x2] the coefficient a_{ijst} of
sigma_ij(x_s) = sum_t a_{ijst} x_t sits at

    Sigma[2(i-1)+s-1][2(j-1)+t-1]   and   M[2(i-1)+u-1][2(j-1)+v-1] = a_{uvij}.

Operator identities are evaluated on PBW monomials of the base; sigma_i0
stands for delta_i, rho_k is right multiplication by tau_k and a bare
tau_k in front of an operator is left multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BaseNotSupported, NotTrimmed
from .exact_arith import ParamEnv, Scalar
from .free_algebra import Alphabet, NCPoly, Relation, Word
from .rewrite import RewriteSystem

Matrix = List[List[Scalar]]

ORE_CLAUSES = ("1a", "1b", "2b", "2c")


def sigma_index(i: int, j: int, s: int, t: int) -> Tuple[int, int]:
    return 2 * (i - 1) + s - 1, 2 * (j - 1) + t - 1


class DEData:
    """{Q, P, sigma, delta, tau} over k_Q[x1, x2] or k[x]."""

    def __init__(self, env: ParamEnv, base: Sequence[str], P, sigma: Dict[Tuple[int, int, int], NCPoly],
                 Q=None, delta: Optional[Dict[Tuple[int, int], NCPoly]] = None,
                 tau: Optional[Dict[int, NCPoly]] = None, ys: Sequence[str] = ("y1", "y2"),
                 alphabet: Optional[Alphabet] = None):
        self.env = env
        self.base = tuple(base)
        self.ys = tuple(ys)
        if len(self.base) not in (1, 2):
            raise BaseNotSupported(f"base must have one or two generators, got {self.base}")
        if len(self.base) == 2 and Q is None:
            raise BaseNotSupported("a two-generator base needs Q")
        if len(self.base) == 1 and Q is not None:
            raise BaseNotSupported("k[x] takes no Q")
        self.alphabet = alphabet or Alphabet(self.base + self.ys)
        self.Q = None if Q is None else tuple(env.coerce(q) for q in Q)
        self.P = tuple(env.coerce(p) for p in P)
        zero = NCPoly.zero(self.alphabet, env)
        n = len(self.base)
        self.sigma = {(i, j, s): sigma.get((i, j, s), zero) for i in (1, 2) for j in (1, 2) for s in range(1, n + 1)}
        delta = delta or {}
        tau = tau or {}
        self.delta = {(i, s): delta.get((i, s), zero) for i in (1, 2) for s in range(1, n + 1)}
        self.tau = {k: tau.get(k, zero) for k in (0, 1, 2)}

    # constructors ------------------------------------------------------------
    @classmethod
    def from_sigma(cls, env: ParamEnv, Q, P, Sigma: Sequence[Sequence], **kw) -> "DEData":
        alphabet = kw.pop("alphabet", None) or Alphabet(("x1", "x2") + tuple(kw.get("ys", ("y1", "y2"))))
        xs = [NCPoly.monomial(alphabet, env, (0,)), NCPoly.monomial(alphabet, env, (1,))]
        sig = {}
        for i in (1, 2):
            for j in (1, 2):
                for s in (1, 2):
                    acc = NCPoly.zero(alphabet, env)
                    for t in (1, 2):
                        r, c = sigma_index(i, j, s, t)
                        acc = acc + xs[t - 1].scale(env.coerce(Sigma[r][c]))
                    sig[(i, j, s)] = acc
        return cls(env, ("x1", "x2"), P, sig, Q=Q, alphabet=alphabet, **kw)

    # views ---------------------------------------------------------------------
    @property
    def trimmed(self) -> bool:
        return not any(self.tau.values()) and not any(self.delta.values())

    @property
    def graded(self) -> bool:
        return all(all(len(w) == 1 for w in f.terms) for f in self.sigma.values())

    @property
    def Sigma(self) -> Matrix:
        if len(self.base) != 2:
            raise BaseNotSupported("Sigma is defined for the base k_Q[x1, x2]")
        m = [[self.env.zero() for _ in range(4)] for _ in range(4)]
        for (i, j, s), f in self.sigma.items():
            for t in (1, 2):
                r, c = sigma_index(i, j, s, t)
                m[r][c] = f.coeff((t - 1,))
        return m

    def a(self, i, j, s, t) -> Scalar:
        r, c = sigma_index(i, j, s, t)
        return self.Sigma[r][c]

    def base_relations(self) -> List[Relation]:
        if self.Q is None:
            return []
        A, E = self.alphabet, self.env
        x1, x2 = (NCPoly.monomial(A, E, (k,)) for k in (0, 1))
        q12, q11 = self.Q
        return [Relation(x2 * x1, (x1 * x2).scale(q12) + (x1 * x1).scale(q11))]

    def mixing_relations(self) -> List[Relation]:
        A, E = self.alphabet, self.env
        n = len(self.base)
        y = [NCPoly.monomial(A, E, (n + k,)) for k in (0, 1)]
        rels = []
        for i in (1, 2):
            for s in range(1, n + 1):
                x = NCPoly.monomial(A, E, (s - 1,))
                rhs = self.sigma[(i, 1, s)] * y[0] + self.sigma[(i, 2, s)] * y[1] + self.delta[(i, s)]
                rels.append(Relation(y[i - 1] * x, rhs))
        return rels

    def y_relation(self) -> Relation:
        A, E = self.alphabet, self.env
        n = len(self.base)
        y1, y2 = (NCPoly.monomial(A, E, (n + k,)) for k in (0, 1))
        p12, p11 = self.P
        rhs = (y1 * y2).scale(p12) + (y1 * y1).scale(p11) + self.tau[1] * y1 + self.tau[2] * y2 + self.tau[0]
        return Relation(y2 * y1, rhs)

    def relations(self) -> List[Relation]:
        return self.base_relations() + self.mixing_relations() + [self.y_relation()]

    def base_system(self) -> RewriteSystem:
        return RewriteSystem(self.alphabet, self.env, self.base_relations(), require_complete=False)

    def full_system(self) -> RewriteSystem:
        return RewriteSystem(self.alphabet, self.env, self.relations())


# --- sigma as a map ----------------------------------------------------------

def build_sigma_map(data: DEData) -> Dict[Tuple[int, int, int], NCPoly]:
    return dict(data.sigma)


class _BaseOperators:
    """sigma_ij, delta_i and rho_k as linear maps on the base algebra."""

    def __init__(self, data: DEData):
        self.data = data
        self.R = data.base_system()
        self.env = data.env
        self.A = data.alphabet
        self._mat: Dict[Word, Dict[Tuple[int, int], NCPoly]] = {}

    def nf(self, f: NCPoly) -> NCPoly:
        return self.R.normal_form(f)

    def images(self, w: Word) -> Dict[Tuple[int, int], NCPoly]:
        """(i, j) -> sigma_ij(w) for j in 1, 2 and (i, 0) -> delta_i(w)."""
        hit = self._mat.get(w)
        if hit is not None:
            return hit
        d = self.data
        one = NCPoly.const(self.A, self.env, 1)
        zero = NCPoly.zero(self.A, self.env)
        if not w:
            res = {(i, j): (one if i == j else zero) for i in (1, 2) for j in (1, 2)}
            res.update({(i, 0): zero for i in (1, 2)})
        else:
            s = w[0] + 1
            rest = self.images(w[1:])
            tail = NCPoly.monomial(self.A, self.env, w[1:])
            res = {}
            for i in (1, 2):
                for j in (1, 2):
                    res[(i, j)] = self.nf(sum((d.sigma[(i, k, s)] * rest[(k, j)] for k in (1, 2)), zero))
                res[(i, 0)] = self.nf(
                    sum((d.sigma[(i, k, s)] * rest[(k, 0)] for k in (1, 2)), zero) + d.delta[(i, s)] * tail
                )
        self._mat[w] = res
        return res

    def apply(self, op: Tuple[int, int], f: NCPoly) -> NCPoly:
        out = NCPoly.zero(self.A, self.env)
        for w, c in f.terms.items():
            out = out + self.images(w)[op].scale(c)
        return out

    def word_value(self, term, m: Word) -> NCPoly:
        coeff, left_tau, ops, right_tau = term
        f = NCPoly.monomial(self.A, self.env, m)
        for op in reversed(ops):
            f = self.apply(op, f)
        if right_tau is not None:
            f = self.nf(f * self.data.tau[right_tau])
        if left_tau is not None:
            f = self.nf(self.data.tau[left_tau] * f)
        return f.scale(coeff)


def _terms(data: DEData, printed: bool = False):
    """The operator identities as (lhs terms, rhs terms).

    A term is (coefficient, left tau index, operator chain outermost first,
    right rho index).  sigma_sigma_ij compares the two ways of moving y2 y1
    past the base, sigma_delta_k the terms that carry one derivation and
    tau_k, and delta_delta the terms with no y left."""
    p12, p11 = data.P
    one = data.env.one()
    T = lambda c, *ops, left=None, right=None: (c, left, tuple(ops), right)
    rel = {}
    rel["sigma_sigma_11"] = (
        [T(one, (2, 1), (1, 1)), T(p11, (2, 2), (1, 1))],
        [T(p11, (1, 1), (1, 1)), T(p11 * p11, (1, 2), (1, 1)), T(p12, (1, 1), (2, 1)), T(p11 * p12, (1, 2), (2, 1))],
    )
    rel["sigma_sigma_12"] = (
        [T(one, (2, 1), (1, 2)), T(p12, (2, 2), (1, 1))],
        [T(p11, (1, 1), (1, 2)), T(p11 * p12, (1, 2), (1, 1)), T(p12, (1, 1), (2, 2)), T(p12 * p12, (1, 2), (2, 1))],
    )
    rel["sigma_sigma_22"] = (
        [T(one, (2, 2), (1, 2))],
        [T(p11, (1, 2), (1, 2)), T(p12, (1, 2), (2, 2))],
    )
    for name, k in (("sigma_delta_1", 1), ("sigma_delta_2", 2)):
        rel[name] = (
            [T(one, (2, 0), (1, k)), T(one, (2, k), (1, 0)), T(one, (2, 2), (1, 1), right=k)],
            [T(p11, (1, 0), (1, k)), T(p11, (1, k), (1, 0)), T(p11, (1, 2), (1, 1), right=k),
             T(p12, (1, 0), (2, k)), T(p12, (1, k), (2, 0)), T(p12, (1, 2), (2, 1), right=k),
             T(one, (1, k), left=1), T(one, (2, k), left=2)],
        )
    last = (2, 0) if not printed else (1, 0)
    rel["delta_delta"] = (
        [T(one, (2, 0), (1, 0)), T(one, (2, 2), (1, 1), right=0)],
        [T(p11, (1, 0), (1, 0)), T(p11, (1, 2), (1, 1), right=0),
         T(p12, (1, 0), (2, 0)), T(p12, (1, 2), (2, 1), right=0),
         T(one, (1, 0), left=1), T(one, last, left=2), T(one, left=0)],
    )
    return rel


@dataclass
class OperatorRelationsReport:
    degree_bound: int
    residuals: Dict[str, List[NCPoly]]
    printed_delta_delta: List[NCPoly]
    monomials: List[Word]
    hom_ops: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def all_zero(self) -> bool:
        return all(not r for rs in self.residuals.values() for r in rs)

    def nonzero(self) -> Dict[str, List[Tuple[Word, NCPoly]]]:
        out = {}
        for k, rs in self.residuals.items():
            bad = [(m, r) for m, r in zip(self._mons(k), rs) if r]
            if bad:
                out[k] = bad
        return out

    def _mons(self, k):
        return self.monomials if k != "sigma_hom" else self.hom_ops

    @property
    def printed_differs(self) -> bool:
        return any(a != b for a, b in zip(self.residuals["delta_delta"], self.printed_delta_delta))


def check_operator_relations(data: DEData, degree_bound: int = 2) -> OperatorRelationsReport:
    ops = _BaseOperators(data)
    A, E = data.alphabet, data.env
    base_alpha = Alphabet(data.base)
    mons = [tuple(w) for w in base_alpha.normal_words(degree_bound)]
    residuals: Dict[str, List[NCPoly]] = {}
    # sigma and delta must respect the base relation: the value on
    # x2 x1 agrees with the value on its normal form
    hom, hom_keys = [], []
    for rel in data.base_relations():
        for op in [(i, j) for i in (1, 2) for j in (0, 1, 2)]:
            val = NCPoly.zero(A, E)
            for w, c in rel.poly.terms.items():
                val = val + ops.images(w)[op].scale(c)
            hom.append(ops.nf(val))
            hom_keys.append(op)
    residuals["sigma_hom"] = hom
    for name, (lhs, rhs) in _terms(data).items():
        out = []
        for m in mons:
            v = NCPoly.zero(A, E)
            for t in lhs:
                v = v + ops.word_value(t, m)
            for t in rhs:
                v = v - ops.word_value(t, m)
            out.append(v)
        residuals[name] = out
    pl, pr = _terms(data, printed=True)["delta_delta"]
    printed = []
    for m in mons:
        v = NCPoly.zero(A, E)
        for t in pl:
            v = v + ops.word_value(t, m)
        for t in pr:
            v = v - ops.word_value(t, m)
        printed.append(v)
    return OperatorRelationsReport(degree_bound, residuals, printed, mons, hom_keys)


def check_sigma_homomorphism(data: DEData) -> Dict[Tuple[int, int], Tuple[Scalar, Scalar, Scalar]]:
    """Residual of sigma_ij(x2 x1) - q11 sigma_ij(x1^2) - q12 sigma_ij(x1 x2),
    with sigma of a product expanded by the matrix rule, as coefficients of
    x1^2, x1 x2, x2^2 in the base normal form."""
    if data.Q is None:
        raise BaseNotSupported("needs the base k_Q[x1, x2]")
    R = data.base_system()
    q12, q11 = data.Q
    sg = data.sigma

    def sig2(i, j, s, t):
        return sum((sg[(i, k, s)] * sg[(k, j, t)] for k in (1, 2)), NCPoly.zero(data.alphabet, data.env))

    out = {}
    for i in (1, 2):
        for j in (1, 2):
            r = sig2(i, j, 2, 1) - sig2(i, j, 1, 1).scale(q11) - sig2(i, j, 1, 2).scale(q12)
            r = R.normal_form(r)
            out[(i, j)] = (r.coeff((0, 0)), r.coeff((0, 1)), r.coeff((1, 1)))
    return out


def sigma_entry_square_defect(data: DEData, i: int, j: int, s: int) -> NCPoly:
    """sigma_ij(x_s^2) - sigma_ij(x_s)^2 in the base normal form; nonzero
    when the single entry sigma_ij is not multiplicative."""
    ops = _BaseOperators(data)
    lhs = ops.images((s - 1, s - 1))[(i, j)]
    f = data.sigma[(i, j, s)]
    return ops.nf(lhs - f * f)


# --- System C -------------------------------------------------------------------

@dataclass
class SystemCReport:
    residuals: Dict[Tuple[str, int, int], Scalar]
    printed_residuals: Dict[Tuple[str, int, int], Scalar]
    detSigma: Scalar
    detM: Scalar
    discrepancies: List[Tuple[str, int, int]] = field(default_factory=list)

    @property
    def residuals_zero(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    @property
    def is_double_extension(self) -> bool:
        return self.residuals_zero and self.detSigma.is_certified_nonzero()

    def nonzero(self):
        return {k: v for k, v in self.residuals.items() if not v.is_zero()}


def system_c_residuals(Sigma: Matrix, Q, P, env: ParamEnv, printed: bool = False):
    def A(i, j, s, t):
        r, c = sigma_index(i, j, s, t)
        return env.coerce(Sigma[r][c])

    q12, q11 = (env.coerce(v) for v in Q)
    p12, p11 = (env.coerce(v) for v in P)
    res = {}
    for i in (1, 2):
        for j in (1, 2):
            sm = lambda F: F(1) + F(2)
            L = sm(lambda u: A(i, u, 2, 1) * A(u, j, 1, 1)) + q11 * sm(lambda u: A(i, u, 2, 2) * A(u, j, 1, 1))
            R = q11 * (sm(lambda u: A(i, u, 1, 1) * A(u, j, 1, 1)) + q11 * sm(lambda u: A(i, u, 1, 2) * A(u, j, 1, 1))) \
                + q12 * (sm(lambda u: A(i, u, 1, 1) * A(u, j, 2, 1)) + q11 * sm(lambda u: A(i, u, 1, 2) * A(u, j, 2, 1)))
            res[("C1", i, j)] = L - R
            L = sm(lambda u: A(i, u, 2, 1) * A(u, j, 1, 2)) + q12 * sm(lambda u: A(i, u, 2, 2) * A(u, j, 1, 1))
            R = q11 * (sm(lambda u: A(i, u, 1, 1) * A(u, j, 1, 2)) + q12 * sm(lambda u: A(i, u, 1, 2) * A(u, j, 1, 1))) \
                + q12 * (sm(lambda u: A(i, u, 1, 1) * A(u, j, 2, 2)) + q12 * sm(lambda u: A(i, u, 1, 2) * A(u, j, 2, 1)))
            res[("C2", i, j)] = L - R
            L = sm(lambda u: A(i, u, 2, 2) * A(u, j, 1, 2))
            R = q11 * sm(lambda u: A(i, u, 1, 2) * A(u, j, 1, 2)) + q12 * sm(lambda u: A(i, u, 1, 2) * A(u, j, 2, 2))
            res[("C3", i, j)] = L - R

            def c(fg, st):
                return A(st[0], st[1], i, 1) * A(fg[0], fg[1], 1, j) + A(st[0], st[1], i, 2) * A(fg[0], fg[1], 2, j)

            if printed:
                L = c((2, 1), (1, 1)) + p11 * (A(1, 1, i, 2) * A(2, 2, 2, j))
            else:
                L = c((2, 1), (1, 1)) + p11 * c((2, 2), (1, 1))
            R = p11 * c((1, 1), (1, 1)) + p11 * p11 * c((1, 2), (1, 1)) + p12 * c((1, 1), (2, 1)) \
                + p11 * p12 * c((1, 2), (2, 1))
            res[("C4", i, j)] = L - R
            L = c((2, 1), (1, 2)) + p12 * c((2, 2), (1, 1))
            if printed:
                R = p11 * (A(2, 2, i, 1) * A(1, 1, 1, j) + A(1, 2, i, 2) * A(1, 1, 2, j))
            else:
                R = p11 * c((1, 1), (1, 2))
            R = R + p11 * p12 * c((1, 2), (1, 1)) + p12 * c((1, 1), (2, 2)) + p12 * p12 * c((1, 2), (2, 1))
            res[("C5", i, j)] = L - R
            res[("C6", i, j)] = c((2, 2), (1, 2)) - p11 * c((1, 2), (1, 2)) - p12 * c((1, 2), (2, 2))
    return res


def check_system_c(data: DEData) -> SystemCReport:
    if not data.trimmed:
        raise NotTrimmed("tau or delta is nonzero; use check_operator_relations")
    if len(data.base) != 2 or not data.graded:
        raise BaseNotSupported("System C is stated for graded data over k_Q[x1, x2]")
    S = data.Sigma
    derived = system_c_residuals(S, data.Q, data.P, data.env)
    printed = system_c_residuals(S, data.Q, data.P, data.env, printed=True)
    diff = sorted(k for k in derived if derived[k] != printed[k])
    return SystemCReport(derived, printed, det4(S), det4(build_M_matrix(S)), diff)


# --- matrices -------------------------------------------------------------------

def build_M_matrix(Sigma: Matrix) -> Matrix:
    M = [[None] * 4 for _ in range(4)]
    for i in (1, 2):
        for j in (1, 2):
            for u in (1, 2):
                for v in (1, 2):
                    r, c = sigma_index(u, v, i, j)
                    M[2 * (i - 1) + u - 1][2 * (j - 1) + v - 1] = Sigma[r][c]
    return M


def det4(m: Matrix) -> Scalar:
    """Cofactor expansion along the first row (any size)."""
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for c in range(n):
        if not m[0][c]:
            continue
        minor = [row[:c] + row[c + 1:] for row in m[1:]]
        term = m[0][c] * det4(minor)
        term = -term if c % 2 else term
        total = term if total is None else total + term
    if total is None:
        return m[0][0] * 0
    return total


def block(m: Matrix, i: int, j: int) -> List[Scalar]:
    return [m[2 * (i - 1) + u][2 * (j - 1) + v] for u in (0, 1) for v in (0, 1)]


@dataclass
class OreClassification:
    sigma12_zero: bool
    sigma21_zero_p11_zero: bool
    m12_zero: bool
    m21_zero_q11_zero: bool
    m_invertible: bool

    @property
    def verdict(self) -> frozenset:
        flags = (self.sigma12_zero, self.sigma21_zero_p11_zero, self.m12_zero, self.m21_zero_q11_zero)
        return frozenset(c for c, f in zip(ORE_CLAUSES, flags) if f)


def classify_iterated_ore(data: DEData) -> OreClassification:
    S = data.Sigma
    M = build_M_matrix(S)
    zero = lambda xs: all(x.is_zero() for x in xs)
    q11 = data.Q[1]
    p11 = data.P[1]
    return OreClassification(
        sigma12_zero=zero(block(S, 1, 2)),
        sigma21_zero_p11_zero=zero(block(S, 2, 1)) and p11.is_zero(),
        m12_zero=zero(block(M, 1, 2)),
        m21_zero_q11_zero=zero(block(M, 2, 1)) and q11.is_zero(),
        m_invertible=det4(M).is_certified_nonzero(),
    )
