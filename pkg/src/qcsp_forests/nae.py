"""Plain boolean oracles for (quantified) not-all-equal 3-SAT.

Deliberately shares nothing with the compiler in :mod:`reduce`.
"""

from __future__ import annotations

from itertools import product


def _nae(values) -> bool:
    return len(set(values)) > 1


def nae_satisfiable(variables, clauses) -> bool:
    """Some boolean assignment makes every clause not-all-equal."""
    variables = list(variables)
    for bits in product((False, True), repeat=len(variables)):
        val = dict(zip(variables, bits))
        if all(_nae([val[x] for x in c]) for c in clauses):
            return True
    return False


def qnae_true(prefix, clauses) -> bool:
    """Game-tree evaluation of ``Q1 x1 ... Qn xn  AND NAE(clause)``."""
    prefix = list(prefix)

    def play(i: int, val: dict) -> bool:
        if i == len(prefix):
            return all(_nae([val[x] for x in c]) for c in clauses)
        q, x = prefix[i]
        branches = (play(i + 1, {**val, x: b}) for b in (False, True))
        return all(branches) if q == "A" else any(branches)

    return play(0, {})
