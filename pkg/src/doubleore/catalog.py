"""The worked algebras as data: the 26 families of type (14641), the
k[x] examples, and the two-generator planes.

Each entry is stored as presentation text (so exporting is rendering) plus
the expected verification profile.  Families of type (14641) keep the Sigma
matrix as the primary data; their relations are generated from it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from .de_core import DEData, build_M_matrix
from .errors import BindingViolatesConstraint, OverrideViolatesConstraint, UnknownFamily
from .exact_arith import Scalar
from .presentation_io import Presentation, parse_presentation, render_presentation, specialize

FOUR_TERM, LONE, NONE = "FourTermMixing", "LoneGenerator", "NoObstruction"

FOUR_TERM_FAMILIES = frozenset("CFISTU")


class _Fam(NamedTuple):
    Q: str
    P: str
    sigma: Tuple[str, str, str, str]
    printed_M: Tuple[str, str, str, str]
    printed_relations: Tuple[str, str, str, str]
    params: Tuple[str, ...]


# Sigma rows, the M rows and mixing relations as originally tabulated, and
# the parameter conditions.
_FAMILIES: Dict[str, _Fam] = {
    "A": _Fam(
        '1, 0', '1, 1',
        ('1, 0, 0, 0', '0, 1, 1, 0', '0, 0, 1, 0', '0, -2, -1, 1'),
        ('1, 0, 0, 0', '0, 1, 0, 0', '0, 1, 1, 0', '0, -1, -2, 1'),
        ('y1x1 = x1y1', 'y1x2 = x2y1+x1y2', 'y2x1 = x1y2', 'y2x2 = -2*x2y1-x1y2+x2y2'),
        ()),
    "B": _Fam(
        'p, 0', 'p, 0',
        ('0, 0, 0, 1', '0, 0, 1, 0', '0, -1, 0, 0', '1, 0, 0, 0'),
        ('0, 0, 0, 1', '0, 0, -1, 0', '0, 1, 0, 0', '1, 0, 0, 0'),
        ('y1x1 = x2y2', 'y1x2 = x1y2', 'y2x1 = -x2y1', 'y2x2 = x1y1'),
        ('param p constraint p^2 + 1',)),
    "C": _Fam(
        'p, 0', 'p, 0',
        ('-1, p^2, 1, -p', '-p, 1, 1, -p', '-p, -2*p^2, p, -p', '-p, p^2, 1, -1'),
        ('-1, 1, p^2, -p', '-p, p, -2*p^2, -p', '-p, 1, 1, -p', '-p, 1, p^2, -1'),
        ('y1x1 = -x1y1+p^2*x2y1+x1y2-p*x2y2', 'y1x2 = -p*x1y1+x2y1+x1y2-p*x2y2', 'y2x1 = -p*x1y1-2*p^2*x2y1+p*x1y2-p*x2y2', 'y2x2 = -p*x1y1+p^2*x2y1+x1y2-x2y2'),
        ('param p constraint p^2 + p + 1',)),
    "D": _Fam(
        '-1, 0', 'p, 0',
        ('-p, 0, 0, 0', '0, -p^2, 1, 0', '0, 0, p, 0', '1, 0, 0, 1'),
        ('-p, 0, 0, 0', '0, p, 0, 0', '0, 1, -p^2, 0', '1, 0, 0, 1'),
        ('y1x1 = -p*x1y1', 'y1x2 = -p^2*x2y1+x1y2', 'y2x1 = p*x1y2', 'y2x2 = x1y1+x2y2'),
        ('param p values -1, 1',)),
    "E": _Fam(
        '-1, 0', 'p, 0',
        ('0, 0, 1, 1', '0, 0, 1, -1', '-1, 1, 0, 0', '1, 1, 0, 0'),
        ('0, 1, 0, 1', '-1, 0, 1, 0', '0, 1, 0, -1', '1, 0, 1, 0'),
        ('y1x1 = x1y2+x2y2', 'y1x2 = x1y2-x2y2', 'y2x1 = -x1y1+x2y1', 'y2x2 = x1y1+x2y1'),
        ('param p constraint p^2 + 1',)),
    "F": _Fam(
        '-1, 0', 'p, 0',
        ('-1, -p, 1, -1', '-p, 1, 1, 1', '-p, p, p, 1', '-p, -p, 1, -p'),
        ('1, 1, -p, -1', '-p, p, p, 1', '-p, 1, 1, 1', '-p, 1, -p, -p'),
        ('y1x1 = -x1y1-p*x2y1+x1y2-x2y2', 'y1x2 = -p*x1y1+x2y1+x1y2+x2y2', 'y2x1 = -p*x1y1+p*x2y1+p*x1y2+x2y2', 'y2x2 = -p*x1y1-p*x2y1+x1y2-p*x2y2'),
        ('param p constraint p^2 + 1',)),
    "G": _Fam(
        '1, 0', 'p, 0',
        ('p, 0, 0, 0', 'p, p^2, 1, 0', '0, 0, p, 0', 'f, 0, -1, 1'),
        ('p, 0, 0, 0', '0, p, 0, 0', 'p, 1, p^2, 0', 'f, -1, 0, 1'),
        ('y1x1 = p*x1y1', 'y1x2 = p*x1y1+p^2*x2y1+x1y2', 'y2x1 = p*x1y2', 'y2x2 = f*x1y1-x1y2+x2y2'),
        ('param p nonzero exclude 1, -1', 'param f nonzero')),
    "H": _Fam(
        '1, 1', '-1, 0',
        ('0, 0, 1, 0', '0, 0, f, 1', '1, 0, 0, 0', 'f, 1, 0, 0'),
        ('0, 1, 0, 0', '1, 0, 0, 0', '0, f, 0, 1', 'f, 0, 1, 0'),
        ('y1x1 = x1y2', 'y1x2 = f*x1y2+x2y2', 'y2x1 = x1y1', 'y2x2 = f*x1y1+x2y1'),
        ('param f nonzero',)),
    "I": _Fam(
        'q, 0', '-1, 0',
        ('-q, -q, 1, -q', '1, 1, 1, -q', '1, q, q, -q', '-1, -q, 1, -1'),
        ('-q, 1, -q, -q', '1, q, q, -q', '1, 1, 1, -q', '-1, 1, -q, -1'),
        ('y1x1 = -q*x1y1-q*x2y1+x1y2-q*x2y2', 'y1x2 = x1y1+x2y1+x1y2-q*x2y2', 'y2x1 = x1y1+q*x2y1+q*x1y2-q*x2y2', 'y2x2 = -x1y1-q*x2y1+x1y2-x2y2'),
        ('param q constraint q^2 + 1',)),
    "J": _Fam(
        'q, 0', '-1, 0',
        ('0, 1, 0, 1', '-1, 0, 1, 0', '0, 1, 0, -1', '1, 0, 1, 0'),
        ('0, 0, 1, 1', '0, 0, 1, -1', '-1, 1, 0, 0', '1, 1, 0, 0'),
        ('y1x1 = x2y1+x2y2', 'y1x2 = -x1y1+x1y2', 'y2x1 = x2y1-x2y2', 'y2x2 = x1y1+x1y2'),
        ('param q constraint q^2 + 1',)),
    "K": _Fam(
        'q, 0', '-1, 0',
        ('1, 0, 0, 0', '0, 0, 0, 1', '0, 0, 1, 0', '0, f, 0, 0'),
        ('1, 0, 0, 0', '0, 1, 0, 0', '0, 0, 0, 1', '0, 0, f, 0'),
        ('y1x1 = x1y1', 'y1x2 = x2y2', 'y2x1 = x1y2', 'y2x2 = f*x2y1'),
        ('param q values -1, 1', 'param f nonzero')),
    "L": _Fam(
        'q, 0', '-1, 0',
        ('0, 0, f, 0', '0, 0, 0, 1', 'f, 0, 0, 0', '0, 1, 0, 0'),
        ('0, f, 0, 0', 'f, 0, 0, 0', '0, 0, 0, 1', '0, 0, 1, 0'),
        ('y1x1 = f*x1y2', 'y1x2 = x2y2', 'y2x1 = f*x1y1', 'y2x2 = x2y1'),
        ('param q values -1, 1', 'param f nonzero')),
    "M": _Fam(
        '-1, 0', '-1, 0',
        ('0, 1, 1, 0', 'f, 0, 0, -1', '1, 0, 0, -1', '0, -1, -f, 0'),
        ('0, 1, 1, 0', '1, 0, 0, -1', 'f, 0, 0, -1', '0, -f, -1, 0'),
        ('y1x1 = x2y1+x1y2', 'y1x2 = f*x1y1-x2y2', 'y2x1 = x1y1-x2y2', 'y2x2 = -x2y1-f*x1y2'),
        ('param f exclude 1',)),
    "N": _Fam(
        '-1, 0', '-1, 0',
        ('0, -g, 0, f', 'g, 0, f, 0', '0, f, 0, -g', 'f, 0, g, 0'),
        ('1, 0, -g, f', '0, 0, f, -g', 'g, f, 0, 0', 'f, g, 0, 0'),
        ('y1x1 = -g*x2y1+f*x2y2', 'y1x2 = g*x1y1+f*x1y2', 'y2x1 = f*x2y1-g*x2y2', 'y2x2 = f*x1y1+g*x1y2'),
        ('param f', 'param g', 'assume nonzero f^2 - g^2')),
    "O": _Fam(
        '-1, 0', '-1, 0',
        ('1, 0, 0, f', '0, -1, 1, 0', '0, f, -1, 0', '1, 0, 0, 1'),
        ('1, 0, 0, f', '0, -1, f, 0', '0, 1, -1, 0', '1, 0, 0, 1'),
        ('y1x1 = x1y1+f*x2y2', 'y1x2 = -x2y1+x1y2', 'y2x1 = f*x2y1-x1y2', 'y2x2 = x1y1+x2y2'),
        ('param f exclude -1, 1',)),
    "P": _Fam(
        '-1, 0', '-1, 0',
        ('0, 0, 1, f', '0, 0, 1, 1', '1, -f, 0, 0', '-1, 1, 0, 0'),
        ('0, 1, 0, f', '1, 0, -f, 0', '0, 1, 0, 1', '-1, 0, 1, 0'),
        ('y1x1 = x1y2+f*x2y2', 'y1x2 = x1y2+x2y2', 'y2x1 = x1y1-f*x2y1', 'y2x2 = -x1y1+x2y1'),
        ('param f exclude -1, 1',)),
    "Q": _Fam(
        '-1, 0', '-1, 0',
        ('0, 0, 1, 0', '1, 1, 1, 0', '-1, 0, 0, 0', '1, 0, -1, 1'),
        ('0, 1, 0, 0', '-1, 0, 0, 0', '1, 1, 1, 0', '1, -1, 0, 1'),
        ('y1x1 = x1y2', 'y1x2 = x1y1+x2y1+x1y2', 'y2x1 = -x1y1', 'y2x2 = x1y1-x1y2+x2y2'),
        ()),
    "R": _Fam(
        '-1, 0', '-1, 0',
        ('1, 1, 1, 0', '0, 0, 1, 0', '0, 1, 0, 0', '0, -1, -1, 1'),
        ('1, 1, 1, 0', '0, 0, 1, 0', '0, 1, 0, 0', '0, -1, -1, 1'),
        ('y1x1 = x1y1+x2y1+x1y2', 'y1x2 = x1y2', 'y2x1 = x2y1', 'y2x2 = -x2y1-x1y2+x2y2'),
        ()),
    "S": _Fam(
        '-1, 0', '-1, 0',
        ('-1, 1, 1, 1', '1, -1, 1, 1', '1, 1, -1, 1', '1, 1, 1, -1'),
        ('-1, 1, 1, 1', '1, -1, 1, 1', '1, 1, -1, 1', '1, 1, 1, -1'),
        ('y1x1 = -x1y1+x2y1+x1y2+x2y2', 'y1x2 = x1y1-x2y1+x1y2+x2y2', 'y2x1 = x1y1+x2y1-x1y2+x2y2', 'y2x2 = x1y1+x2y1+x1y2-x2y2'),
        ()),
    "T": _Fam(
        '-1, 0', '-1, 0',
        ('-1, 1, 1, 1', '1, -1, 1, 1', '1, 1, 1, -1', '1, 1, -1, 1'),
        ('-1, 1, 1, 1', '1, 1, 1, -1', '1, 1, -1, 1', '1, -1, 1, 1'),
        ('y1x1 = -x1y1+x2y1+x1y2+x2y2', 'y1x2 = x1y1-x2y1+x1y2+x2y2', 'y2x1 = x1y1+x2y1+x1y2-x2y2', 'y2x2 = x1y1+x2y1-x1y2+x2y2'),
        ()),
    "U": _Fam(
        '-1, 0', '-1, 0',
        ('-1, 1, 1, 1', '1, 1, 1, -1', '1, 1, -1, 1', '1, -1, 1, 1'),
        ('-1, 1, 1, 1', '1, -1, 1, 1', '1, 1, 1, -1', '1, 1, -1, 1'),
        ('y1x1 = -x1y1+x2y1+x1y2+x2y2', 'y1x2 = x1y1+x2y1+x1y2-x2y2', 'y2x1 = x1y1+x2y1-x1y2+x2y2', 'y2x2 = x1y1-x2y1+x1y2+x2y2'),
        ()),
    "V": _Fam(
        '1, 0', '-1, 0',
        ('0, 1, 1, 0', '0, 1, 0, 0', '-1, 1, 0, 0', '0, 0, 0, 1'),
        ('0, 1, 1, 0', '-1, 0, 1, 0', '0, 0, 1, 0', '0, 0, 0, 1'),
        ('y1x1 = x2y1+x1y2', 'y1x2 = x2y1', 'y2x1 = -x1y1+x2y1', 'y2x2 = x2y2'),
        ()),
    "W": _Fam(
        '1, 0', '-1, 0',
        ('0, f, 1, 0', '1, 0, 0, -1', '1, 0, 0, f', '0, -1, 1, 0'),
        ('0, 1, f, 0', '1, 0, 0, f', '1, 0, 0, -1', '0, 1, -1, 0'),
        ('y1x1 = f*x2y1+x1y2', 'y1x2 = x1y1-x2y2', 'y2x1 = x1y1+f*x2y2', 'y2x2 = -x2y1+x1y2'),
        ('param f exclude -1',)),
    "X": _Fam(
        '1, 0', '-1, 0',
        ('0, 0, 1, 0', '0, 0, 1, 1', '1, 0, 0, 0', '1, 1, 0, 0'),
        ('0, 1, 0, 0', '1, 0, 0, 0', '1, 1, 0, 1', '1, 0, 1, 0'),
        ('y1x1 = x1y2', 'y1x2 = x1y2+x2y2', 'y2x1 = x1y1', 'y2x2 = x1y1+x2y1'),
        ()),
    "Y": _Fam(
        '1, 0', '-1, 0',
        ('1, 0, 0, 0', 'f, -1, 1, 0', '0, 0, 1, 0', '1, 0, f, -1'),
        ('1, 0, 0, 0', '0, 1, 0, 0', 'f, 1, -1, 0', '1, f, 0, -1'),
        ('y1x1 = x1y1', 'y1x2 = f*x1y1-x2y1+x1y2', 'y2x1 = x1y2', 'y2x2 = x1y1+f*x1y2-x2y2'),
        ('param f',)),
    "Z": _Fam(
        '-1, 0', '1, 0',
        ('1, 0, 0, 1', '0, 1, 1, 0', '0, f, -1, 0', 'f, 0, 0, -1'),
        ('1, 0, 0, 1', '0, -1, f, 0', '0, 1, 1, 0', 'f, 0, 0, -1'),
        ('y1x1 = x1y1+x2y2', 'y1x2 = x2y1+x1y2', 'y2x1 = f*x2y1-x1y2', 'y2x2 = f*x1y1-x2y2'),
        ('param f nonzero exclude -1',)),
}

# Ore clauses expected for each family at generic parameters.
_EXPECTED_ORE: Dict[str, FrozenSet[str]] = {k: frozenset() for k in _FAMILIES}
for _k in "ADGHKLQXY":
    _EXPECTED_ORE[_k] = frozenset({"2b"})
_EXPECTED_ORE["V"] = frozenset({"2c"})

# Clauses that hold only on a special parameter value.
SPECIAL_ORE: Tuple[Tuple[str, Dict[str, int], FrozenSet[str]], ...] = (
    ("N", {"f": 0}, frozenset({"1a"})),
    ("M", {"f": 0}, frozenset({"2c"})),
)

# clauses that hold but are not among the tabulated expectations
COMPUTED_EXTRA: Tuple[Tuple[str, Dict[str, int], FrozenSet[str]], ...] = (
    ("K", {}, frozenset({"2c"})),
    ("L", {}, frozenset({"2c"})),
    ("N", {"f": 0}, frozenset({"1b"})),
)

_ANNOTATIONS: Dict[str, Tuple[str, ...]] = {
    "F": ("the originally tabulated M differs from the M computed from Sigma; M is stored as computed",),
    "N": ("the originally tabulated M has first row (1, 0, -g, f) although its M11 block should vanish; "
          "M is stored as computed from Sigma",),
    "X": ("the originally tabulated M differs from the M computed from Sigma; M is stored as computed",),
    "O": ("det Sigma = (f - 1)^2 up to sign, so f = 1 is excluded as well as f = -1",),
    "P": ("det Sigma = (f - 1)^2 up to sign, so f = 1 is excluded as well as f = -1",),
    "Z": ("the originally published relations y1 x1 = x1 y2 + x2 y2 and y2 x2 = f x1 y2 - x2 y2 do not match "
          "Sigma (the first factor should be x1 y1); relations are generated from Sigma",),
    "B4": ("the overlap y2 y1 x leaves (a - 2) b x^3, so these data give a double extension only at a = 2; "
           "kept as published",),
    "Sub4.1.1": ("the lone generator witness y2 x1 = h x1 y1 + f x1 y2 needs h != 0, which is not assumed; "
                 "the unconditional witness is y1 x2 = g x1 y1 + f x2 y1 unless g = 0",),
    "B1": ("the stored witness forms assume p = b^-2, and the Leibniz rule fails on the y2 y1 relation "
           "unless a = 0",),
}


def _family_text(fid: str, fam: _Fam) -> str:
    lines = [f"name {fid}", "gen x1 x2 | y1 y2"]
    lines += list(fam.params)
    lines += [f"de Q = {fam.Q}", f"de P = {fam.P}"]
    lines += [f"sigma row {r + 1} = {row}" for r, row in enumerate(fam.sigma)]
    lines.append("meta gk_dim 4")
    return "\n".join(lines) + "\n"


B1_TEXT = """\
name B1
gen x | y1 y2
param a
param b nonzero exclude 1
param c
param p nonzero
de P = p, 0
sigma 1 1 x = b x
sigma 2 2 x = 1/b x
delta 2 x = c x^2
tau1 = b*c*(p*b - 1)/(1 - b) x
tau0 = a x^2
calculus nu x: x=1, y1=b, y2=1/b
calculus nu y1: x=1/b, y1=1, y2=b^-2
calculus nu y2: x=b, y1=b^2, y2=1
calculus omega x y1 y2
calculus witness omega 1 = dx; dy1; dy2
calculus witness omegabar 1 = dx; dy1; dy2
calculus witness omega 2 = dy1 dy2; -1/b dx dy2; b^3 dx dy1
calculus witness omegabar 2 = dy1 dy2; -b^2 dx dy2; dx dy1
meta gk_dim 3
"""

# The two-form witnesses in the order first published.  With these the
# one-form identity fails on dy1 and the two-form identity on dx dy1 and
# dx dy2; the stored lists above pair each form with its complement.
B1_PUBLISHED_WITNESS = {
    ("omega", 2): "dy1 dy2; b^3 dx dy1; -1/b dx dy2",
    ("omegabar", 2): "dy1 dy2; -1/b dx dy2; dx dy1",
}

B2_TEXT = """\
name B2
gen x | y1 y2
param a
param b nonzero
param c
de P = -1, 0
sigma 1 2 x = 1/b x
sigma 2 1 x = b x
delta 1 x = c x^2
delta 2 x = -b*c x^2
tau0 = a x^2
meta gk_dim 3
"""

B3_TEXT = """\
name B3
gen x | y1 y2
param a nonzero
de P = 1, 0
sigma 1 1 x = a x
sigma 1 2 x = x
sigma 2 2 x = a x
meta gk_dim 3
"""

B4_TEXT = """\
name B4
gen x | y1 y2
param a
param b nonzero exclude -1
param c
de P = 1, 1
sigma 1 1 x = x
sigma 2 1 x = (2 + 2/b) x
sigma 2 2 x = x
delta 1 x = b x^2
tau1 = a x
tau2 = b/(1 + b) x
tau0 = c x^2
meta gk_dim 3
"""

BH_TEXT = """\
name B(h)
gen x1 x2 | y1 y2
param h nonzero
de Q = -1, 0
de P = -1, 0
sigma row 1 = h, h, h, 0
sigma row 2 = 0, 0, h, 0
sigma row 3 = 0, h, 0, 0
sigma row 4 = 0, -h, -h, h
meta gk_dim 4
"""

SUB411_TEXT = """\
name Sub4.1.1
gen x1 x2 | y1 y2
param f nonzero
param g
param h
param m
de Q = 1, 1
de P = 1, 1
sigma row 1 = f, 0, 0, 0
sigma row 2 = g, f, 0, 0
sigma row 3 = h, 0, f, 0
sigma row 4 = m, h, g, f
meta gk_dim 4
"""

MANIN_TEXT = """\
name Manin(q)
gen x1 x2 |
param q nonzero
rel x2 x1 = q x1 x2
meta gk_dim 2
"""

JORDAN_TEXT = """\
name Jordan
gen x1 x2 |
rel x2 x1 = x1 x2 + x1^2
meta gk_dim 2
"""

# control case for the calculus checks: k[x, y, z] with identity twists
COMM3_TEXT = """\
name Comm3
gen x | y z
rel y x = x y
rel z x = x z
rel z y = y z
calculus omega x y z
meta gk_dim 3
"""

_EXTRA = {
    "B1": (B1_TEXT, NONE),
    "B2": (B2_TEXT, LONE),
    "B3": (B3_TEXT, LONE),
    "B4": (B4_TEXT, LONE),
    "B(h)": (BH_TEXT, LONE),
    "Sub4.1.1": (SUB411_TEXT, LONE),
    "Manin(q)": (MANIN_TEXT, None),
    "Jordan": (JORDAN_TEXT, None),
    "Comm3": (COMM3_TEXT, None),
}

_ALIASES = {"Bh": "B(h)", "B(H)": "B(h)", "Manin": "Manin(q)", "Sub411": "Sub4.1.1", "4.1.1": "Sub4.1.1"}

FAMILY_IDS: Tuple[str, ...] = tuple(_FAMILIES)
ALL_IDS: Tuple[str, ...] = FAMILY_IDS + tuple(_EXTRA)


@dataclass
class FamilyEntry:
    id: str
    presentation: Presentation
    expected_ore: Optional[FrozenSet[str]] = None
    expected_pattern: Optional[str] = None
    annotations: Tuple[str, ...] = ()
    printed_M: Optional[List[List[Scalar]]] = None
    printed_relations: Tuple[str, ...] = ()
    bindings: Dict[str, object] = field(default_factory=dict)

    @property
    def data(self) -> Optional[DEData]:
        return self.presentation.de

    @property
    def params(self):
        return self.presentation.env

    @property
    def gk_dim(self) -> Optional[int]:
        return self.presentation.gk_dim

    def text(self) -> str:
        return render_presentation(self.presentation)

    def M(self):
        return build_M_matrix(self.data.Sigma)

    def m_discrepancies(self) -> List[Tuple[int, int, Scalar, Scalar]]:
        """Entries (row, col, printed, computed) where the tabulated M and
        the M computed from Sigma differ."""
        if self.printed_M is None:
            return []
        M = self.M()
        return [(r, c, self.printed_M[r][c], M[r][c])
                for r in range(4) for c in range(4) if self.printed_M[r][c] != M[r][c]]


def canonical_id(fid: str) -> str:
    fid = fid.strip()
    fid = _ALIASES.get(fid, fid)
    if len(fid) == 1 and fid.upper() in _FAMILIES:
        return fid.upper()
    if fid in _FAMILIES or fid in _EXTRA:
        return fid
    raise UnknownFamily(fid)


def family_text(fid: str) -> str:
    fid = canonical_id(fid)
    if fid in _FAMILIES:
        return _family_text(fid, _FAMILIES[fid])
    return _EXTRA[fid][0]


def _rows(env, rows: Sequence[str]) -> List[List[Scalar]]:
    return [[env.parse(x) for x in row.split(",")] for row in rows]


def _expected_ore(fid: str, bindings) -> Optional[FrozenSet[str]]:
    if fid not in _FAMILIES:
        return None
    for sid, vals, clauses in SPECIAL_ORE:
        if sid == fid and all(str(bindings.get(k)) == str(v) for k, v in vals.items()):
            return clauses
    return _EXPECTED_ORE[fid]


def computed_extra(fid: str, bindings=None) -> FrozenSet[str]:
    bindings = bindings or {}
    for sid, vals, clauses in COMPUTED_EXTRA:
        if sid == fid and all(str(bindings.get(k)) == str(v) for k, v in vals.items()):
            return clauses
    return frozenset()


def load_family(fid: str, overrides: Optional[Dict[str, object]] = None) -> FamilyEntry:
    """Load a catalog entry, optionally binding parameters.

    Override values are numbers or expression strings in the remaining
    parameters (``{"p": "b^-2"}``).
    """
    fid = canonical_id(fid)
    pres = parse_presentation(family_text(fid))
    overrides = dict(overrides or {})
    try:
        pres = specialize(pres, overrides)
    except BindingViolatesConstraint as exc:
        raise OverrideViolatesConstraint(str(exc)) from None
    if fid in _FAMILIES:
        fam = _FAMILIES[fid]
        pattern = FOUR_TERM if fid in FOUR_TERM_FAMILIES else LONE
        printed_M = None
        if not overrides:
            printed_M = _rows(pres.env, fam.printed_M)
        return FamilyEntry(fid, pres, _expected_ore(fid, overrides), pattern, _ANNOTATIONS.get(fid, ()),
                           printed_M, fam.printed_relations, overrides)
    return FamilyEntry(fid, pres, None, _EXTRA[fid][1], _ANNOTATIONS.get(fid, ()), None, (), overrides)


def expected_profile(fid: str) -> Tuple[FrozenSet[str], str]:
    fid = canonical_id(fid)
    if fid not in _FAMILIES:
        raise UnknownFamily(f"{fid} has no tabulated profile")
    return _EXPECTED_ORE[fid], FOUR_TERM if fid in FOUR_TERM_FAMILIES else LONE


def expand_instances(entry: FamilyEntry) -> List[FamilyEntry]:
    """One entry per admissible value of each finite-list parameter."""
    finite = entry.params.finite_params()
    if not finite:
        return [entry]
    out = [dict(entry.bindings)]
    for p in finite:
        out = [dict(b, **{p.name: v}) for b in out for v in p.values]
    return [load_family(entry.id, b) for b in out]


def spot_bindings(entry: FamilyEntry, count: int = 3, seed: int = 0) -> List[Dict[str, Fraction]]:
    """Random admissible rational values for the generic parameters."""
    rng = random.Random(f"{entry.id}:{seed}")
    env = entry.params
    if not env.generic_params():
        return []
    return [env.random_generic_binding(rng) for _ in range(count)]


def export_family(fid: str) -> str:
    return load_family(fid).text()
