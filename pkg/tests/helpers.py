"""Shared fixtures that are not oracles."""
from __future__ import annotations

from doubleore.de_core import DEData


def perturbed(entry, row: int, col: int, value) -> DEData:
    """Copy of a catalog entry's DE data with one Sigma entry replaced."""
    d = entry.data
    S = [list(r) for r in d.Sigma]
    S[row][col] = d.env.coerce(value)
    return DEData.from_sigma(d.env, d.Q, d.P, S, alphabet=d.alphabet)
