"""Presentation text format, its parser and renderer, and report emission.

The grammar is line oriented; docs/presentation_grammar.md has the EBNF.
A short example::

    name A
    gen x1 x2 | y1 y2
    param p constraint p^2 + 1
    rel x2 x1 = p * x1 x2
    de Q = p, 0
    sigma row 1 = 0, 0, 0, 1
    calculus nu x: x=1, y1=b, y2=1/b
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import __version__
from .de_core import DEData
from .errors import (
    ConstraintParseError,
    DoubleOreError,
    PresentationSyntaxError,
    UnknownGenerator,
    UnknownParameter,
)
from .exact_arith import Param, ParamEnv, Scalar
from .free_algebra import Alphabet, NCPoly, Relation

FormTerms = List[Tuple[Scalar, Tuple[str, ...]]]


@dataclass
class Presentation:
    name: str
    alphabet: Alphabet
    env: ParamEnv
    relations: List[Relation]
    blocks: Tuple[Tuple[str, ...], Tuple[str, ...]]
    de: Optional[DEData] = None
    twists: Dict[str, Dict[str, Scalar]] = field(default_factory=dict)
    omega_order: Tuple[str, ...] = ()
    witness: Dict[Tuple[str, int], List[FormTerms]] = field(default_factory=dict)
    meta: Dict[str, str] = field(default_factory=dict)

    def canonical(self):
        """Hashable summary used for round-trip equality."""
        rels = tuple(sorted(_poly_key(r.poly) for r in self.relations))
        de = None
        if self.de is not None:
            d = self.de
            de = (
                tuple(d.base),
                None if d.Q is None else tuple(q.key() for q in d.Q),
                tuple(p.key() for p in d.P),
                tuple(sorted((k, _poly_key(v)) for k, v in d.sigma.items())),
                tuple(sorted((k, _poly_key(v)) for k, v in d.delta.items())),
                tuple(sorted((k, _poly_key(v)) for k, v in d.tau.items())),
            )
        tw = tuple(sorted((g, tuple(sorted((h, c.key()) for h, c in row.items()))) for g, row in self.twists.items()))
        wit = tuple(sorted(
            (k, tuple(tuple((c.key(), w) for c, w in form) for form in forms)) for k, forms in self.witness.items()
        ))
        return (self.name, self.alphabet.names, self.alphabet.pbw_order, self.env.signature(), rels,
                self.blocks, de, tw, self.omega_order, wit, tuple(sorted(self.meta.items())))

    def __eq__(self, other):
        return isinstance(other, Presentation) and self.canonical() == other.canonical()

    def digest(self) -> str:
        return hashlib.sha256(render_presentation(self).encode()).hexdigest()[:16]

    @property
    def gk_dim(self) -> Optional[int]:
        v = self.meta.get("gk_dim")
        return None if v is None else int(v)


def _poly_key(p: NCPoly):
    return tuple(sorted((w, c.key()) for w, c in p.terms.items()))


# --- expression parsing ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


class _Expr:
    """Recursive-descent parser for polynomial expressions in one line."""

    def __init__(self, text: str, line: int, col0: int, alphabet: Optional[Alphabet], env: ParamEnv):
        self.text = text
        self.line = line
        self.col0 = col0
        self.alphabet = alphabet
        self.env = env
        self.toks: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise PresentationSyntaxError(f"unexpected character {text[pos:].strip()[0]!r}", line,
                                              col0 + pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip())),
                                              "number, name or operator")
            kind = m.lastgroup
            start = m.start(kind)
            for part, offset in self._split_ident(m.group(kind), start) if kind == "id" else [(m.group(kind), start)]:
                self.toks.append((kind, part, offset))
            pos = m.end()
        self.i = 0

    # identifiers like "x1y2" or "px1" are split into known names
    def _known(self):
        names = set(self.env.names)
        if self.alphabet is not None:
            names |= set(self.alphabet.names)
        return names

    def _split_ident(self, ident: str, start: int):
        known = self._known()
        if ident in known:
            return [(ident, start)]
        seg = _segment(ident, known)
        if seg is None:
            if self.alphabet is not None and re.fullmatch(r"[A-Za-z]+\d+", ident) and ident[0] in "xyz":
                raise UnknownGenerator(f"line {self.line}, column {self.col0 + start + 1}: unknown generator {ident!r}")
            raise UnknownParameter(f"line {self.line}, column {self.col0 + start + 1}: undeclared name {ident!r}")
        out, off = [], start
        for s in seg:
            out.append((s, off))
            off += len(s)
        return out

    def error(self, msg, expected=""):
        col = self.col0 + (self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)) + 1
        return PresentationSyntaxError(msg, self.line, col, expected)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self):
        if not self.toks:
            raise self.error("empty expression", "expression")
        v = self.expr()
        if self.i != len(self.toks):
            raise self.error(f"unexpected {self.peek()[1]!r}", "operator or end of expression")
        return v

    def expr(self):
        v = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            v = _add(v, rhs) if op == "+" else _add(v, _neg(rhs))
        return v

    def term(self):
        v = self.unary()
        while True:
            kind, val, _ = self.peek()
            if val == "*":
                self.take()
                v = _mul(v, self.unary())
            elif val == "/":
                self.take()
                d = self.unary()
                v = self._div(v, d)
            elif kind in ("num", "id") or val == "(":
                v = _mul(v, self.unary())
            else:
                return v

    def _div(self, v, d):
        if isinstance(d, NCPoly):
            if any(w != () for w in d.terms):
                raise self.error("division by a noncommutative element", "scalar divisor")
            d = d.coeff(())
        try:
            return _scale(v, self.env.one() / d) if isinstance(v, NCPoly) else v / d
        except DoubleOreError as exc:
            raise ConstraintParseError(f"line {self.line}: {exc}") from None

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return _neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val, _ = self.take()
            if kind != "num":
                self.i -= 1
                raise self.error("exponent must be an integer", "integer")
            e = sign * int(val)
            if isinstance(base, NCPoly):
                if e < 0:
                    raise self.error("negative power of a noncommutative element", "nonnegative exponent")
                return base ** e
            try:
                return base ** e
            except DoubleOreError as exc:
                raise ConstraintParseError(f"line {self.line}: {exc}") from None
        return base

    def atom(self):
        kind, val, _ = self.peek()
        if kind == "num":
            self.take()
            return self.env.const(int(val))
        if kind == "id":
            self.take()
            if self.alphabet is not None and val in self.alphabet:
                return NCPoly.gen(self.alphabet, self.env, val)
            return self.env.var(val)
        if val == "(":
            self.take()
            v = self.expr()
            if self.peek()[1] != ")":
                raise self.error("missing ')'", "')'")
            self.take()
            return v
        raise self.error(f"unexpected {val!r}" if val else "unexpected end of expression", "number, name or '('")


def _segment(ident: str, known) -> Optional[List[str]]:
    """Split ident into known names, longest match first."""
    if not ident:
        return []
    for k in sorted(known, key=len, reverse=True):
        if ident.startswith(k):
            rest = _segment(ident[len(k):], known)
            if rest is not None:
                return [k] + rest
    return None


def _add(a, b):
    if isinstance(a, Scalar) and isinstance(b, Scalar):
        return a + b
    if isinstance(a, Scalar):
        a, b = b, a
    return a + b


def _neg(a):
    return -a


def _mul(a, b):
    if isinstance(a, Scalar) and isinstance(b, Scalar):
        return a * b
    if isinstance(a, Scalar):
        return b.scale(a)
    if isinstance(b, Scalar):
        return a.scale(b)
    return a * b


def _scale(v, c):
    return v.scale(c) if isinstance(v, NCPoly) else v * c


def _as_poly(v, alphabet, env) -> NCPoly:
    if isinstance(v, Scalar):
        return NCPoly.const(alphabet, env, v)
    return v


def _as_scalar(v, p: "_LineCtx") -> Scalar:
    if isinstance(v, NCPoly):
        if any(w != () for w in v.terms):
            raise PresentationSyntaxError("expected a scalar, found generators", p.line, p.col, "scalar")
        return v.coeff(())
    return v


# --- line parsing -----------------------------------------------------------------

@dataclass
class _LineCtx:
    line: int
    col: int


_KEYWORDS = ("name", "gen", "param", "assume", "rel", "de", "sigma", "tau0", "tau1", "tau2", "delta",
             "calculus", "meta")


def _number_list(text: str, line: int, col: int) -> List[Fraction]:
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            out.append(Fraction(part))
        except (ValueError, ZeroDivisionError):
            raise PresentationSyntaxError(f"bad rational {part!r}", line, col, "rational number") from None
    return out


def _parse_param(rest: str, line: int, col: int) -> Param:
    m = re.match(r"([A-Za-z_][A-Za-z_0-9]*)\s*(.*)$", rest)
    if not m:
        raise PresentationSyntaxError("missing parameter name", line, col, "identifier")
    name, opts = m.group(1), m.group(2)
    parts = re.split(r"\b(nonzero|constraint|values|exclude)\b", opts)
    if parts[0].strip():
        raise PresentationSyntaxError(f"unexpected {parts[0].strip()!r}", line, col + len(name) + 1,
                                      "nonzero, constraint, values or exclude")
    kw = {"nonzero": False, "constraint": None, "values": None, "excluded": ()}
    k = 1
    while k < len(parts):
        key, arg = parts[k], parts[k + 1].strip()
        if key == "nonzero":
            if arg:
                raise PresentationSyntaxError(f"unexpected {arg!r}", line, col, "keyword")
            kw["nonzero"] = True
        elif key == "constraint":
            kw["constraint"] = arg
        elif key == "values":
            kw["values"] = _number_list(arg, line, col)
        else:
            kw["excluded"] = tuple(_number_list(arg, line, col))
        k += 2
    return Param.make(name, **kw)


def parse_presentation(text: str) -> Presentation:
    lines = text.splitlines()
    name = ""
    gens: Optional[Tuple[List[str], List[str]]] = None
    params: List[Param] = []
    assumptions: List[str] = []
    body: List[Tuple[int, str, str]] = []
    for n, raw in enumerate(lines, 1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        indent = len(stripped) - len(stripped.lstrip())
        m = re.match(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*(.*)$", stripped)
        if not m:
            raise PresentationSyntaxError("expected a keyword", n, indent + 1, " | ".join(_KEYWORDS))
        kw, rest = m.group(1), m.group(2)
        col = indent + len(kw) + 2
        if kw == "name":
            name = rest.strip()
        elif kw == "gen":
            if gens is not None:
                raise PresentationSyntaxError("generators declared twice", n, indent + 1)
            if "|" in rest:
                left, right = rest.split("|", 1)
                gens = (left.split(), right.split())
            else:
                names = rest.split()
                gens = ([g for g in names if not g.startswith("y")], [g for g in names if g.startswith("y")])
            for g in gens[0] + gens[1]:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", g):
                    raise PresentationSyntaxError(f"bad generator name {g!r}", n, col, "identifier")
        elif kw == "param":
            params.append(_parse_param(rest, n, col))
        elif kw == "assume":
            m2 = re.match(r"nonzero\s+(.+)$", rest)
            if not m2:
                raise PresentationSyntaxError("expected 'assume nonzero <expr>'", n, col, "nonzero")
            assumptions.append(m2.group(1).strip())
        elif kw in _KEYWORDS:
            body.append((n, kw, rest, col))
        else:
            raise PresentationSyntaxError(f"unknown keyword {kw!r}", n, indent + 1, " | ".join(_KEYWORDS))
    if gens is None:
        raise PresentationSyntaxError("missing 'gen' line", len(lines) or 1, 1, "gen")
    order = gens[0] + gens[1]
    alphabet = Alphabet(order)
    env = ParamEnv(params, assumptions)
    for p in params:
        if p.name in alphabet:
            raise ConstraintParseError(f"parameter {p.name!r} clashes with a generator")

    def expr(text, line, col, scalar=False):
        v = _Expr(text, line, col, None if scalar else alphabet, env).parse()
        return v

    relations: List[Relation] = []
    seen = set()
    de_Q = de_P = None
    sigma_rows: Dict[int, List[Scalar]] = {}
    sigma_imgs: Dict[Tuple[int, int, int], NCPoly] = {}
    delta: Dict[Tuple[int, int], NCPoly] = {}
    tau: Dict[int, NCPoly] = {}
    twists: Dict[str, Dict[str, Scalar]] = {}
    omega: Tuple[str, ...] = ()
    witness: Dict[Tuple[str, int], List[FormTerms]] = {}
    meta: Dict[str, str] = {}
    base = tuple(gens[0])
    for n, kw, rest, col in body:
        ctx = _LineCtx(n, col)
        if kw == "rel":
            if "=" not in rest:
                raise PresentationSyntaxError("relation needs '='", n, col + len(rest), "'='")
            lhs_t, rhs_t = rest.split("=", 1)
            lhs = _as_poly(expr(lhs_t, n, col), alphabet, env)
            rhs = _as_poly(expr(rhs_t, n, col + len(lhs_t) + 1), alphabet, env)
            rel = Relation(lhs, rhs)
            key = _poly_key(rel.poly)
            if key in seen:
                raise PresentationSyntaxError("duplicate relation", n, col)
            seen.add(key)
            if rel.poly.degree() > 2:
                raise PresentationSyntaxError("relation degree exceeds 2", n, col, "quadratic relation")
            relations.append(rel)
        elif kw == "de":
            m = re.match(r"([QP])\s*=\s*(.+)$", rest)
            if not m:
                raise PresentationSyntaxError("expected 'de Q = a, b' or 'de P = a, b'", n, col, "Q or P")
            vals = [_as_scalar(expr(v, n, col, scalar=True), ctx) for v in _split_commas(m.group(2))]
            if len(vals) != 2:
                raise PresentationSyntaxError("Q and P take two entries", n, col, "two comma-separated scalars")
            if m.group(1) == "Q":
                de_Q = tuple(vals)
            else:
                de_P = tuple(vals)
        elif kw == "sigma":
            m = re.match(r"row\s+([1-4])\s*=\s*(.+)$", rest)
            if m:
                vals = [_as_scalar(expr(v, n, col, scalar=True), ctx) for v in _split_commas(m.group(2))]
                if len(vals) != 4:
                    raise PresentationSyntaxError("a Sigma row has four entries", n, col, "four scalars")
                sigma_rows[int(m.group(1))] = vals
                continue
            m = re.match(r"([12])\s+([12])\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)$", rest)
            if not m:
                raise PresentationSyntaxError("expected 'sigma row r = a, b, c, d' or 'sigma i j x = expr'",
                                              n, col, "row or indices")
            s = _base_index(m.group(3), base, n, col)
            sigma_imgs[(int(m.group(1)), int(m.group(2)), s)] = _as_poly(expr(m.group(4), n, col), alphabet, env)
        elif kw in ("tau0", "tau1", "tau2"):
            m = re.match(r"=\s*(.+)$", rest)
            if not m:
                raise PresentationSyntaxError("expected '='", n, col, "'='")
            tau[int(kw[-1])] = _as_poly(expr(m.group(1), n, col), alphabet, env)
        elif kw == "delta":
            m = re.match(r"([12])\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)$", rest)
            if not m:
                raise PresentationSyntaxError("expected 'delta i x = expr'", n, col, "index and generator")
            s = _base_index(m.group(2), base, n, col)
            delta[(int(m.group(1)), s)] = _as_poly(expr(m.group(3), n, col), alphabet, env)
        elif kw == "calculus":
            _parse_calculus(rest, n, col, alphabet, env, twists, witness, ctx, expr)
            m = re.match(r"omega\s+(.+)$", rest)
            if m:
                omega = tuple(m.group(1).split())
                for g in omega:
                    alphabet.index(g)
        elif kw == "meta":
            m = re.match(r"([A-Za-z_]+)\s+(.*)$", rest)
            if not m:
                raise PresentationSyntaxError("expected 'meta key value'", n, col, "key and value")
            meta[m.group(1)] = m.group(2).strip()
    de = None
    if de_P is not None or sigma_rows or sigma_imgs:
        if de_P is None:
            raise PresentationSyntaxError("DE block needs 'de P = ...'", len(lines), 1, "de P")
        if sigma_rows:
            if len(base) != 2 or de_Q is None or sorted(sigma_rows) != [1, 2, 3, 4]:
                raise PresentationSyntaxError("'sigma row' needs a two-generator base, Q and all four rows",
                                              len(lines), 1)
            de = DEData.from_sigma(env, de_Q, de_P, [sigma_rows[r] for r in (1, 2, 3, 4)],
                                   delta=delta, tau=tau, alphabet=alphabet, ys=tuple(gens[1]))
        else:
            de = DEData(env, base, de_P, sigma_imgs, Q=de_Q, delta=delta, tau=tau, ys=tuple(gens[1]),
                        alphabet=alphabet)
        derived = de.relations()
        if relations:
            a = sorted(_poly_key(r.poly) for r in relations)
            b = sorted(_poly_key(r.poly) for r in derived)
            if a != b:
                raise PresentationSyntaxError("the relations do not match the DE block", len(lines), 1)
        else:
            relations = derived
    return Presentation(name, alphabet, env, relations, (tuple(gens[0]), tuple(gens[1])), de, twists, omega,
                        witness, meta)


def _split_commas(text: str) -> List[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [s.strip() for s in out]


def _base_index(name: str, base, line, col) -> int:
    if name not in base:
        raise UnknownGenerator(f"line {line}, column {col}: {name!r} is not a base generator")
    return base.index(name) + 1


def _parse_calculus(rest, n, col, alphabet, env, twists, witness, ctx, expr):
    m = re.match(r"nu\s+([A-Za-z_][A-Za-z_0-9]*)\s*:\s*(.+)$", rest)
    if m:
        g = m.group(1)
        alphabet.index(g)
        row = {}
        for item in _split_commas(m.group(2)):
            if "=" not in item:
                raise PresentationSyntaxError(f"expected 'gen=scalar' in {item!r}", n, col, "gen=scalar")
            h, v = item.split("=", 1)
            h = h.strip()
            alphabet.index(h)
            row[h] = _as_scalar(expr(v, n, col, scalar=True), ctx)
        twists[g] = row
        return
    m = re.match(r"witness\s+(omega|omegabar)\s+(\d+)\s*=\s*(.+)$", rest)
    if m:
        forms = []
        for item in m.group(3).split(";"):
            forms.append(_parse_form(item.strip(), n, col, alphabet, env, expr, ctx))
        witness[(m.group(1), int(m.group(2)))] = forms
        return
    if re.match(r"omega\s", rest):
        return
    raise PresentationSyntaxError("unknown calculus line", n, col, "nu, omega or witness")


def _parse_form(text, n, col, alphabet, env, expr, ctx) -> FormTerms:
    """Terms 'coeff * dg dh' in sequence; each run of differentials closes a term."""
    gens = "|".join(re.escape(g) for g in sorted(alphabet.names, key=len, reverse=True))
    run = re.compile(r"(?:(?<=[\s*(])|^)((?:d(?:%s)(?![A-Za-z_0-9])\s*)+)" % gens)
    terms: FormTerms = []
    pos = 0
    for m in run.finditer(text):
        coeff_text = text[pos:m.start()].strip().rstrip("*").strip()
        if coeff_text.startswith("+"):
            coeff_text = coeff_text[1:].strip()
        if coeff_text in ("", "-"):
            coeff_text += "1"
        c = _as_scalar(expr(coeff_text, n, col + pos, scalar=True), ctx)
        ds = tuple(tok[1:] for tok in m.group(1).split())
        terms.append((c, ds))
        pos = m.end()
    if text[pos:].strip() or not terms:
        raise PresentationSyntaxError(f"form {text!r} has a term without differentials", n, col + pos, "dg")
    return terms


# --- specialization ------------------------------------------------------------------

def specialize(p: Presentation, values) -> Presentation:
    """Bind parameters to numbers or to expressions in the remaining ones."""
    if not values:
        return p
    env, subs = p.env.bind(values)
    mapping = {name: env.parse(text) for name, text in subs.items()}

    def sc(c: Scalar) -> Scalar:
        return c.subs(mapping, env)

    def poly(f: NCPoly) -> NCPoly:
        return NCPoly(f.alphabet, env, {w: sc(c) for w, c in f.terms.items()})

    relations = [Relation(poly(r.lhs), poly(r.rhs)) for r in p.relations]
    de = None
    if p.de is not None:
        d = p.de
        de = DEData(env, d.base, [sc(c) for c in d.P], {k: poly(v) for k, v in d.sigma.items()},
                    Q=None if d.Q is None else [sc(c) for c in d.Q],
                    delta={k: poly(v) for k, v in d.delta.items()},
                    tau={k: poly(v) for k, v in d.tau.items()}, ys=d.ys, alphabet=d.alphabet)
    twists = {g: {h: sc(c) for h, c in row.items()} for g, row in p.twists.items()}
    witness = {k: [[(sc(c), ds) for c, ds in form] for form in forms] for k, forms in p.witness.items()}
    return Presentation(p.name, p.alphabet, env, relations, p.blocks, de, twists, p.omega_order, witness,
                        dict(p.meta))


# --- rendering ----------------------------------------------------------------------

def _scalar_text(c: Scalar) -> str:
    return c.text()


def _form_text(form: FormTerms) -> str:
    parts = []
    for c, ds in form:
        d = " ".join("d" + g for g in ds)
        parts.append(f"({c.text()}) * {d}")
    return " + ".join(parts) if parts else "0"


def render_presentation(p: Presentation) -> str:
    out = []
    if p.name:
        out.append(f"name {p.name}")
    out.append(f"gen {' '.join(p.blocks[0])} | {' '.join(p.blocks[1])}")
    for par in p.env.params:
        out.append("param " + par.describe())
    for a in p.env.assumptions:
        out.append(f"assume nonzero {a}")
    for r in p.relations:
        out.append(f"rel {r.text()}")
    d = p.de
    if d is not None:
        if d.Q is not None:
            out.append(f"de Q = {d.Q[0].text()}, {d.Q[1].text()}")
        out.append(f"de P = {d.P[0].text()}, {d.P[1].text()}")
        if len(d.base) == 2 and d.graded:
            S = d.Sigma
            for r in range(4):
                out.append(f"sigma row {r + 1} = " + ", ".join(S[r][c].text() for c in range(4)))
        else:
            for (i, j, s), f in sorted(d.sigma.items()):
                if f:
                    out.append(f"sigma {i} {j} {d.base[s - 1]} = {f.text()}")
        for (i, s), f in sorted(d.delta.items()):
            if f:
                out.append(f"delta {i} {d.base[s - 1]} = {f.text()}")
        for k in (0, 1, 2):
            if d.tau[k]:
                out.append(f"tau{k} = {d.tau[k].text()}")
    for g, row in p.twists.items():
        out.append(f"calculus nu {g}: " + ", ".join(f"{h}={c.text()}" for h, c in row.items()))
    if p.omega_order:
        out.append("calculus omega " + " ".join(p.omega_order))
    for (kind, k), forms in sorted(p.witness.items()):
        out.append(f"calculus witness {kind} {k} = " + "; ".join(_form_text(f) for f in forms))
    for k, v in sorted(p.meta.items()):
        out.append(f"meta {k} {v}")
    return "\n".join(out) + "\n"


# --- reports ---------------------------------------------------------------------------

def make_report(presentation: Optional[Presentation], checks: Dict[str, dict], elapsed_ms: float = 0.0) -> dict:
    pres = None
    if presentation is not None:
        pres = {"name": presentation.name, "digest": presentation.digest()}
    return {"version": __version__, "presentation": pres, "checks": checks, "elapsed_ms": round(elapsed_ms, 3)}


def emit_report(report: dict, format: str = "json") -> bytes:
    if format == "json":
        return (json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n").encode()
    if format == "text":
        lines = [f"version {report.get('version')}"]
        pres = report.get("presentation")
        if pres:
            lines.append(f"presentation {pres['name']} ({pres['digest']})")
        for name in sorted(report.get("checks", {})):
            sec = report["checks"][name]
            lines.append(f"[{name}] verdict: {sec.get('verdict')}")
            for key in sorted(k for k in sec if k != "verdict"):
                lines.append(f"  {key}: {json.dumps(sec[key], sort_keys=True, default=_jsonable)}")
        lines.append(f"elapsed_ms {report.get('elapsed_ms')}")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown report format {format!r}")


def _jsonable(obj):
    if isinstance(obj, (Scalar, NCPoly)):
        return obj.text()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
