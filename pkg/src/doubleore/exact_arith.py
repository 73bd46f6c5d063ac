"""Exact scalars: rational functions in named parameters over QQ.

A parameter is either generic (transcendental), algebraic (one monic
univariate constraint such as p^2+p+1, handled as quotient arithmetic),
or restricted to a finite list of rational values (handled by enumerating
instantiations, never by quotient arithmetic).  Nonzero side conditions
form the multiplicative set of "certified nonzero" irreducible factors.

The polynomial backbone is sympy's sparse ``PolyElement``; everything that
is specific to the quotient and the certification lives here.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from .errors import (
    BindingViolatesConstraint,
    ConstraintParseError,
    DivisionByUncertifiedNonzero,
    EnvironmentMismatch,
    NotInvertible,
    UnboundParameter,
    UnknownParameter,
)

Number = Union[int, Fraction]

ZERO, CERTIFIED, GENERIC = "zero", "certified", "generic"


def _frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _sympify(text: str, names: Iterable[str]):
    local = {n: sympy.Symbol(n) for n in names}
    try:
        return sympy.sympify(text.replace("^", "**"), locals=local)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ConstraintParseError(f"cannot parse {text!r}: {exc}") from None


@dataclass(frozen=True)
class Param:
    """One named parameter.

    ``constraint`` holds the coefficients (lowest degree first) of a monic
    irreducible polynomial; ``values`` a finite list; at most one is set.
    """

    name: str
    constraint: Optional[Tuple[Fraction, ...]] = None
    values: Optional[Tuple[Fraction, ...]] = None
    nonzero: bool = False
    excluded: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        if not self.name.isidentifier():
            raise ConstraintParseError(f"bad parameter name {self.name!r}")
        if self.constraint is not None and self.values is not None:
            raise ConstraintParseError(f"{self.name}: constraint and value list are exclusive")
        if self.constraint is not None:
            cs = self.constraint
            if len(cs) < 2 or cs[-1] != 1:
                raise ConstraintParseError(f"{self.name}: constraint must be monic of degree >= 1")
        if self.values is not None and len(set(self.values)) != len(self.values):
            raise ConstraintParseError(f"{self.name}: repeated value in list")

    @classmethod
    def make(
        cls,
        name: str,
        constraint: Union[None, str, Sequence[Number]] = None,
        values: Optional[Sequence[Number]] = None,
        nonzero: bool = False,
        excluded: Sequence[Number] = (),
    ) -> "Param":
        vals = None if values is None else tuple(Fraction(v) for v in values)
        cons = None
        if isinstance(constraint, str):
            cons, split = parse_constraint(name, constraint)
            if split is not None:
                # reducible with distinct rational roots: enumerate instead
                cons, vals = None, split
        elif constraint is not None:
            cons = tuple(Fraction(c) for c in constraint)
        return cls(name, cons, vals, bool(nonzero), tuple(Fraction(v) for v in excluded))

    @property
    def kind(self) -> str:
        if self.constraint is not None:
            return "algebraic"
        if self.values is not None:
            return "finite"
        return "generic"

    def admits(self, value: Fraction) -> bool:
        if self.constraint is not None:
            acc = Fraction(0)
            for c in reversed(self.constraint):
                acc = acc * value + c
            if acc != 0:
                return False
        if self.values is not None and value not in self.values:
            return False
        if self.nonzero and value == 0:
            return False
        return value not in self.excluded

    def describe(self) -> str:
        parts = [self.name]
        if self.constraint is not None:
            parts.append("constraint " + constraint_text(self.name, self.constraint))
        if self.values is not None:
            parts.append("values " + ", ".join(str(v) for v in self.values))
        if self.nonzero:
            parts.append("nonzero")
        if self.excluded:
            parts.append("exclude " + ", ".join(str(v) for v in self.excluded))
        return " ".join(parts)


def constraint_text(name: str, coeffs: Sequence[Fraction]) -> str:
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if c == 0:
            continue
        mono = "" if e == 0 else (name if e == 1 else f"{name}^{e}")
        if mono and abs(c) == 1:
            body = mono
        elif mono:
            body = f"{abs(c)}*{mono}"
        else:
            body = str(abs(c))
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def parse_constraint(name: str, text: str):
    """Return (monic coefficient tuple, None) or (None, rational roots)."""
    expr = _sympify(text, [name])
    if "=" in text:
        raise ConstraintParseError("write the constraint as a polynomial that vanishes")
    sym = sympy.Symbol(name)
    if expr.free_symbols - {sym}:
        raise ConstraintParseError(f"constraint for {name} must be univariate: {text!r}")
    try:
        poly = sympy.Poly(expr, sym, domain="QQ")
    except sympy.PolynomialError as exc:
        raise ConstraintParseError(str(exc)) from None
    if poly.degree() < 1:
        raise ConstraintParseError(f"constraint for {name} has degree < 1")
    poly = poly.monic()
    _, factors = poly.factor_list()
    if len(factors) == 1 and factors[0][1] == 1:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
        return tuple(coeffs), None
    if all(f.degree() == 1 and m == 1 for f, m in factors):
        roots = sorted(Fraction(int(r.p), int(r.q)) for r in (-f.monic().TC() for f, m in factors))
        return None, tuple(roots)
    raise ConstraintParseError(
        f"constraint {text!r} is reducible with irrational or repeated factors; declare a value list instead"
    )


@lru_cache(maxsize=None)
def _ring(names: Tuple[str, ...]) -> PolyRing:
    return PolyRing(names, QQ, lex)


def _monic(poly: PolyElement) -> PolyElement:
    return poly.quo_ground(poly.LC) if poly else poly


def _poly_key(poly: PolyElement):
    return tuple(sorted(poly.items()))


class ParamEnv:
    """An immutable parameter environment with its side conditions."""

    def __init__(self, params: Sequence[Param] = (), assumptions: Sequence[str] = ()):
        params = tuple(params)
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ConstraintParseError(f"duplicate parameter names in {names}")
        self.params: Tuple[Param, ...] = params
        self.by_name: Dict[str, Param] = {p.name: p for p in params}
        self.names: Tuple[str, ...] = tuple(sorted(names))
        self.ring: PolyRing = _ring(self.names)
        self.gens = dict(zip(self.names, self.ring.gens))
        self._constraints: Dict[int, PolyElement] = {}
        for p in params:
            if p.constraint is not None:
                x = self.gens[p.name]
                f = self.ring.zero
                for e, c in enumerate(p.constraint):
                    f += self.ring(QQ(c.numerator, c.denominator)) * x**e
                self._constraints[self.names.index(p.name)] = f
        certified = set()
        for p in params:
            x = self.gens[p.name]
            if p.nonzero:
                certified.add(_poly_key(x))
            for v in p.excluded:
                certified.add(_poly_key(x - QQ(v.numerator, v.denominator)))
        self.assumptions: Tuple[str, ...] = tuple(assumptions)
        for text in self.assumptions:
            expr = _sympify(text, self.names)
            unknown = {str(s) for s in expr.free_symbols} - set(self.names)
            if unknown:
                raise UnknownParameter(f"assumption {text!r} uses undeclared {sorted(unknown)}")
            num, den = sympy.fraction(sympy.together(expr))
            for part in (num, den):
                poly = self.ring.from_expr(sympy.expand(part)) if self.names else self.ring(part)
                if not poly:
                    raise ConstraintParseError(f"assumption {text!r} is identically zero")
                for fac, _ in poly.factor_list()[1]:
                    certified.add(_poly_key(_monic(fac)))
        self._certified = frozenset(certified)
        self._den_cache: Dict[tuple, bool] = {}
        self._status_cache: Dict[tuple, Tuple[str, tuple]] = {}

    # identity -------------------------------------------------------------
    def signature(self):
        return (self.params, self.assumptions)

    def __eq__(self, other):
        return isinstance(other, ParamEnv) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        return f"ParamEnv({'; '.join(p.describe() for p in self.params)})"

    # construction ---------------------------------------------------------
    def const(self, value: Number) -> "Scalar":
        value = Fraction(value)
        return Scalar._raw(self, self.ring(QQ(value.numerator, value.denominator)), self.ring.one)

    def zero(self) -> "Scalar":
        return Scalar._raw(self, self.ring.zero, self.ring.one)

    def one(self) -> "Scalar":
        return Scalar._raw(self, self.ring.one, self.ring.one)

    def var(self, name: str) -> "Scalar":
        if name not in self.gens:
            raise UnknownParameter(name)
        return Scalar._make(self, self.gens[name], self.ring.one)

    def parse(self, text: str) -> "Scalar":
        """Parse a scalar expression (sympy syntax, ``^`` allowed)."""
        expr = _sympify(text, self.names)
        unknown = {str(s) for s in expr.free_symbols} - set(self.names)
        if unknown:
            raise UnknownParameter(f"{text!r} uses undeclared parameter(s) {sorted(unknown)}")
        num, den = sympy.fraction(sympy.together(expr))
        n = self.ring.from_expr(sympy.expand(num)) if self.names else self.ring(num)
        d = self.ring.from_expr(sympy.expand(den)) if self.names else self.ring(den)
        return Scalar(self, n) / Scalar(self, d)

    def coerce(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            if value.env is not self and value.env != self:
                raise EnvironmentMismatch(f"{value.env!r} vs {self!r}")
            return value
        if isinstance(value, (int, Fraction)):
            return self.const(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to Scalar")

    # derived environments -------------------------------------------------
    def without(self, names: Iterable[str]) -> "ParamEnv":
        """Drop parameters (after they have been bound); assumptions that
        mention them are dropped too."""
        drop = set(names)
        keep = [p for p in self.params if p.name not in drop]
        kept_names = {p.name for p in keep}
        assumptions = []
        for text in self.assumptions:
            syms = {str(s) for s in _sympify(text, self.names).free_symbols}
            if syms <= kept_names:
                assumptions.append(text)
        return ParamEnv(keep, assumptions)

    def bind(self, values: Mapping[str, Union[Number, str]]) -> Tuple["ParamEnv", Dict[str, str]]:
        """Specialize parameters to numbers or to expressions in the others.

        Returns the smaller environment and the substitution (as sympy
        text).  Assumptions are rewritten, not dropped: binding f = 0 in an
        environment assuming f^2 - g^2 nonzero leaves g nonzero.  The bound
        parameter's own side conditions become assumptions on its image.
        """
        subs: Dict[str, str] = {}
        for name, v in values.items():
            if name not in self.by_name:
                raise UnknownParameter(name)
            if isinstance(v, str):
                subs[name] = v
            else:
                self.check_binding({name: v})
                subs[name] = str(Fraction(v))
        keep = [p for p in self.params if p.name not in subs]
        kept = {p.name for p in keep}
        syms = {n: sympy.Symbol(n) for n in self.names}
        table = {}
        for name, text in subs.items():
            expr = _sympify(text, kept)
            stray = {str(s) for s in expr.free_symbols} - kept
            if stray:
                raise UnknownParameter(f"override {name} = {text!r} uses {sorted(stray)}")
            if self.by_name[name].constraint is not None and expr.free_symbols:
                raise BindingViolatesConstraint(f"{name} is algebraic; bind it to a number")
            table[syms[name]] = expr
        conditions = list(self.assumptions)
        for name in subs:
            p = self.by_name[name]
            if p.nonzero:
                conditions.append(name)
            conditions.extend(f"{name} - ({v})" for v in p.excluded)
        out = []
        for text in conditions:
            expr = sympy.together(_sympify(text, self.names).subs(table))
            if expr.free_symbols:
                out.append(str(sympy.factor(expr)))
            elif expr == 0:
                raise BindingViolatesConstraint(f"binding {subs} makes {text!r} vanish")
        return ParamEnv(keep, tuple(dict.fromkeys(out))), subs

    def with_params(self, extra: Sequence[Param] = (), assumptions: Sequence[str] = ()) -> "ParamEnv":
        return ParamEnv(self.params + tuple(extra), self.assumptions + tuple(assumptions))

    # reduction modulo the algebraic constraints ---------------------------
    def _reduce(self, poly: PolyElement) -> PolyElement:
        for f in self._constraints.values():
            poly = poly.rem(f)
        return poly

    def _constrained_in(self, poly: PolyElement):
        if not self._constraints or not poly:
            return []
        degs = poly.degrees()
        return [i for i in self._constraints if degs[i] > 0]

    def _mult_matrix(self, poly: PolyElement, i: int):
        f = self._constraints[i]
        x = self.ring.gens[i]
        d = f.degree(x)
        cols = []
        for e in range(d):
            img = (poly * x**e).rem(f)
            cols.append([_coeff_wrt(img, i, k) for k in range(d)])
        # matrix rows are output degree, columns input degree
        return [[cols[c][r] for c in range(d)] for r in range(d)]

    def _norm_step(self, poly: PolyElement, i: int):
        """Return (u, N) with poly*u == N modulo the constraint for variable i
        and N free of that variable (fraction-free adjugate)."""
        m = self._mult_matrix(poly, i)
        d = len(m)
        det = _det(m, self.ring)
        x = self.ring.gens[i]
        if not self._reduce(det):
            raise NotInvertible(f"{poly.as_expr()} is a zero divisor modulo the constraint on {self.names[i]}")
        # first column of the adjugate
        u = self.ring.zero
        for k in range(d):
            minor = [[m[r][c] for c in range(d) if c != k] for r in range(1, d)]
            cof = _det(minor, self.ring) if minor else self.ring.one
            if k % 2:
                cof = -cof
            u += cof * x**k
        return u, det

    def norm(self, poly: PolyElement) -> PolyElement:
        """Product over conjugates: a polynomial free of constrained
        variables that vanishes exactly where poly can vanish."""
        while True:
            idx = self._constrained_in(poly)
            if not idx:
                return poly
            _, poly = self._norm_step(poly, idx[0])
            poly = self._reduce(poly)

    # certification --------------------------------------------------------
    def _factor_certified(self, fac: PolyElement) -> bool:
        if fac.is_ground:
            return True
        if _poly_key(_monic(fac)) in self._certified:
            return True
        degs = fac.degrees()
        used = [i for i, dgr in enumerate(degs) if dgr > 0]
        if len(used) == 1:
            p = self.by_name[self.names[used[0]]]
            if p.values is not None:
                return all(_eval_univariate(fac, used[0], v) != 0 for v in p.values)
            if p.constraint is not None:
                return True
        return False

    def status_of_poly(self, poly: PolyElement) -> Tuple[str, tuple]:
        """('zero'|'certified'|'generic', uncertified factors)."""
        if not poly:
            return ZERO, ()
        key = _poly_key(poly)
        hit = self._status_cache.get(key)
        if hit is not None:
            return hit
        nrm = self.norm(poly)
        bad = []
        if not nrm.is_ground:
            for fac, _ in nrm.factor_list()[1]:
                if not self._factor_certified(fac):
                    bad.append(_monic(fac))
        res = (GENERIC if bad else CERTIFIED, tuple(bad))
        self._status_cache[key] = res
        return res

    def den_certified(self, den: PolyElement) -> bool:
        key = _poly_key(den)
        hit = self._den_cache.get(key)
        if hit is None:
            hit = self.status_of_poly(den)[0] == CERTIFIED
            self._den_cache[key] = hit
        return hit

    # bindings -------------------------------------------------------------
    def check_binding(self, bindings: Mapping[str, Number]) -> Dict[str, Fraction]:
        out = {}
        for name, value in bindings.items():
            if name not in self.by_name:
                raise UnknownParameter(name)
            p = self.by_name[name]
            value = Fraction(value)
            if not p.admits(value):
                raise BindingViolatesConstraint(f"{name} = {value} violates {p.describe()}")
            out[name] = value
        for text in self.assumptions:
            expr = _sympify(text, self.names)
            syms = {str(s) for s in expr.free_symbols}
            if syms <= set(out):
                val = expr.subs({sympy.Symbol(k): sympy.Rational(v.numerator, v.denominator) for k, v in out.items()})
                if val == 0:
                    raise BindingViolatesConstraint(f"binding {out} makes the assumption {text!r} vanish")
        return out

    def finite_params(self) -> Tuple[Param, ...]:
        return tuple(p for p in self.params if p.values is not None)

    def generic_params(self) -> Tuple[Param, ...]:
        return tuple(p for p in self.params if p.kind == "generic")

    def random_generic_binding(self, rng: random.Random, names: Optional[Iterable[str]] = None) -> Dict[str, Fraction]:
        """Random admissible rational values for the generic parameters."""
        names = [p.name for p in self.generic_params()] if names is None else list(names)
        for _ in range(1000):
            pick = {n: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for n in names}
            try:
                return self.check_binding(pick)
            except BindingViolatesConstraint:
                continue
        raise BindingViolatesConstraint("no admissible random binding found")


def _coeff_wrt(poly: PolyElement, i: int, k: int) -> PolyElement:
    ring = poly.ring
    out = ring.zero
    for mon, c in poly.items():
        if mon[i] == k:
            m = list(mon)
            m[i] = 0
            out += ring({tuple(m): c})
    return out


def _eval_univariate(poly: PolyElement, i: int, value: Fraction) -> Fraction:
    total = Fraction(0)
    for mon, c in poly.items():
        total += _frac(c) * value ** mon[i]
    return total


def _det(m, ring) -> PolyElement:
    n = len(m)
    if n == 0:
        return ring.one
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = ring.zero
    for c in range(n):
        if not m[0][c]:
            continue
        minor = [row[:c] + row[c + 1:] for row in m[1:]]
        term = m[0][c] * _det(minor, ring)
        total += -term if c % 2 else term
    return total


class Scalar:
    """Canonical element num/den of the coefficient field of an env."""

    __slots__ = ("env", "num", "den", "_hash")

    def __init__(self, env: ParamEnv, num: PolyElement, den: Optional[PolyElement] = None):
        s = Scalar._make(env, num, env.ring.one if den is None else den)
        self.env, self.num, self.den, self._hash = s.env, s.num, s.den, None

    @staticmethod
    def _raw(env: ParamEnv, num: PolyElement, den: PolyElement) -> "Scalar":
        s = object.__new__(Scalar)
        s.env, s.num, s.den, s._hash = env, num, den, None
        return s

    @staticmethod
    def _make(env: ParamEnv, num: PolyElement, den: PolyElement) -> "Scalar":
        if not den:
            raise DivisionByUncertifiedNonzero("zero denominator")
        num = env._reduce(num)
        den = env._reduce(den)
        if not den:
            raise DivisionByUncertifiedNonzero("denominator vanishes modulo the constraints")
        # clear constrained variables out of the denominator
        while True:
            idx = env._constrained_in(den)
            if not idx:
                break
            u, nrm = env._norm_step(den, idx[0])
            num = env._reduce(num * u)
            den = env._reduce(nrm)
        if not num:
            return Scalar._raw(env, env.ring.zero, env.ring.one)
        if not den.is_ground:
            _, num, den = num.cofactors(den)
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        return Scalar._raw(env, num, den)

    # helpers ----------------------------------------------------------------
    def _other(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.env is not self.env and other.env != self.env:
                raise EnvironmentMismatch(f"{self.env!r} vs {other.env!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.env.const(other)
        return NotImplemented

    def _ground_pair(self, o: "Scalar"):
        return self.den == 1 and o.den == 1 and self.num.is_ground and o.num.is_ground

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return Scalar._make(self.env, self.num + o.num, self.den)
        return Scalar._make(self.env, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(self.env, -self.num, self.den)

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if not self.num or not o.num:
            return self.env.zero()
        if self._ground_pair(o):
            return Scalar._raw(self.env, self.num * o.num, self.den)
        return Scalar._make(self.env, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        """Inverse as an element of the fraction field; denominator
        certification is the caller's business (see ``__truediv__``)."""
        if not self.num:
            raise DivisionByUncertifiedNonzero("division by zero")
        return Scalar._make(self.env, self.den, self.num)

    def divide(self, other, strict: bool = True) -> "Scalar":
        o = self._other(other)
        if not o.num:
            raise DivisionByUncertifiedNonzero("division by zero")
        if o.num.is_ground and o.den == 1:
            return Scalar._raw(self.env, self.num.quo_ground(o.num.LC), self.den)
        res = Scalar._make(self.env, self.num * o.den, self.den * o.num)
        if strict and not self.env.den_certified(res.den):
            raise DivisionByUncertifiedNonzero(
                f"cannot certify {o.text()} nonzero for every admissible parameter value "
                f"(quotient denominator {res.den.as_expr()})"
            )
        return res

    def __truediv__(self, other):
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        return self.divide(other)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o.divide(self)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.env.one().divide(self) ** (-e)
        out = self.env.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # comparison -------------------------------------------------------------
    def key(self):
        return (_poly_key(self.num), _poly_key(self.den))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.env.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.env.names == other.env.names and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.den == 1 and self.num == 1

    def status(self) -> str:
        """'zero', 'certified' (nonzero for all admissible values) or
        'generic' (nonzero only away from an exceptional locus)."""
        if not self.num:
            return ZERO
        return self.env.status_of_poly(self.num)[0]

    def is_certified_nonzero(self) -> bool:
        return self.status() == CERTIFIED

    def exceptional_locus(self) -> Tuple[str, ...]:
        """Irreducible factors whose vanishing would kill this scalar."""
        if not self.num:
            return ("0",)
        return tuple(_expr_text(f) for f in self.env.status_of_poly(self.num)[1])

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise UnboundParameter(f"{self.text()} is not a constant")
        return _frac(self.num.LC if self.num else QQ(0)) / _frac(self.den.LC)

    def symbols(self) -> Tuple[str, ...]:
        used = set()
        for poly in (self.num, self.den):
            for mon in poly.itermonoms():
                used.update(self.env.names[i] for i, e in enumerate(mon) if e)
        return tuple(sorted(used))

    # evaluation and substitution ---------------------------------------------
    def eval(self, bindings: Mapping[str, Number]) -> Fraction:
        vals = self.env.check_binding(bindings)
        for name in self.symbols():
            p = self.env.by_name[name]
            if p.constraint is not None and name not in vals:
                raise BindingViolatesConstraint(
                    f"{name} satisfies {constraint_text(name, p.constraint)}, which has no rational root"
                )
            if name not in vals:
                raise UnboundParameter(name)

        def ev(poly):
            total = Fraction(0)
            for mon, c in poly.items():
                term = _frac(c)
                for i, e in enumerate(mon):
                    if e:
                        term *= vals[self.env.names[i]] ** e
                total += term
            return total

        den = ev(self.den)
        if den == 0:
            raise BindingViolatesConstraint(f"denominator of {self.text()} vanishes at {vals}")
        return ev(self.num) / den

    def subs(self, mapping: Mapping[str, "Scalar"], env: ParamEnv, strict: bool = True) -> "Scalar":
        """Substitute scalars of ``env`` for parameters; others map by name."""
        cache: Dict[Tuple[int, int], Scalar] = {}

        def value(i: int, e: int) -> Scalar:
            k = (i, e)
            if k not in cache:
                name = self.env.names[i]
                base = mapping[name] if name in mapping else env.var(name)
                cache[k] = base ** e
            return cache[k]

        def ev(poly):
            total = env.zero()
            for mon, c in poly.items():
                term = env.const(_frac(c))
                for i, e in enumerate(mon):
                    if e:
                        term = term * value(i, e)
                total = total + term
            return total

        return ev(self.num).divide(ev(self.den), strict=strict)

    # rendering ----------------------------------------------------------------
    def text(self) -> str:
        num = _expr_text(self.num)
        if self.den == 1:
            return num
        den = _expr_text(self.den)
        if len(self.num) > 1:
            num = f"({num})"
        if len(self.den) > 1 or not _is_monomial_factor(den):
            den = f"({den})"
        return f"{num}/{den}"

    def needs_parens(self) -> bool:
        return (self.den == 1 and len(self.num) > 1) or (
            self.den != 1 and (len(self.num) > 1 or not self.num.is_ground and _frac(self.num.LC) != 1)
        )

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"Scalar({self.text()})"


def _is_monomial_factor(text: str) -> bool:
    return all(ch.isalnum() or ch in "_^" for ch in text)


def _expr_text(poly: PolyElement) -> str:
    """Render with ``^`` powers, deterministic term order (lex, descending)."""
    ring = poly.ring
    if not poly:
        return "0"
    pieces = []
    for mon, c in sorted(poly.items(), reverse=True):
        c = _frac(c)
        factors = []
        for i, e in enumerate(mon):
            if e == 1:
                factors.append(ring.symbols[i].name)
            elif e:
                factors.append(f"{ring.symbols[i].name}^{e}")
        body = "*".join(factors)
        mag = abs(c)
        if body and mag == 1:
            piece = body
        elif body:
            piece = f"{mag}*{body}"
        else:
            piece = str(mag)
        pieces.append(("-" if c < 0 else "+", piece))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, piece in pieces[1:]:
        out += f" {sign} {piece}"
    return out


# spec-named operations --------------------------------------------------------

def scalar_combine(op: str, lhs: Scalar, rhs: Scalar) -> Scalar:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown op {op!r}")


def scalar_is_zero(s: Scalar) -> bool:
    return s.is_zero()


def scalar_eval(s: Scalar, bindings: Mapping[str, Number]) -> Fraction:
    return s.eval(bindings)
