"""Structural predicates on partially reflexive trees and the NL / hard verdict.

Path words are read left to right with 0-based indices internally; the
parameters reported to users (``a``, ``b``, ``|alpha|``, centre) follow the
1-based convention of the word decomposition ``alpha 1^b 0^a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import networkx as nx

from .graphs import (
    INF,
    PRGraph,
    VertexMap,
    bfs,
    check_word,
    is_path,
    is_surjective_homomorphism,
    loop_distance,
    path_graph,
    path_order,
    path_word,
)

NL = "NL"
NP_HARD = "NP-hard"
PSPACE = "Pspace-complete"


def reflexive_components(g: PRGraph) -> list[list[int]]:
    """Maximal connected sets of looped vertices, each sorted, ordered by min id."""
    loops = sorted(g.loops)
    sub = g.stripped().subgraph(loops)
    return sorted((sorted(c) for c in nx.connected_components(sub)), key=lambda c: c[0])


def is_loop_connected(g: PRGraph) -> bool:
    if not g.is_connected():
        raise ValueError("is_loop_connected expects a connected graph")
    return len(reflexive_components(g)) <= 1


# --- paths -----------------------------------------------------------------


@dataclass(frozen=True)
class PathDecomposition:
    word: str
    alpha: str
    b: int
    a: int
    centre: float  # 1-based, half-integral for even lengths
    balance: str  # "not", "0-centred" or "1-centred"

    def __post_init__(self):
        assert self.alpha + "1" * self.b + "0" * self.a == self.word


def split_tail(word: str) -> tuple[str, int, int]:
    """``word = alpha 1^b 0^a`` with ``a`` and then ``b`` as large as possible."""
    a = len(word) - len(word.rstrip("0"))
    rest = word[: len(word) - a]
    b = len(rest) - len(rest.rstrip("1"))
    return rest[: len(rest) - b], b, a


def decompose(word: str) -> PathDecomposition:
    word = check_word(word)
    alpha, b, a = split_tail(word)
    return PathDecomposition(word, alpha, b, a, (len(word) + 1) / 2, weakly_balanced(word))


def is_zero_eccentric(word: str) -> bool:
    """Some orientation reads ``alpha 1^b 0^a`` with ``|alpha| <= a``.

    Taking ``a`` and ``b`` maximal is optimal: shrinking either only moves
    letters into ``alpha``.
    """
    word = check_word(word)
    for w in (word, word[::-1]):
        alpha, _, a = split_tail(w)
        if len(alpha) <= a:
            return True
    return False


def _centre_scans(word: str) -> tuple[str, str]:
    """Letters met walking from the centre to the right end and to the left end.

    With an even length both centre vertices start both scans, so a loopless
    member of the centre pair can serve as the non-loop in either direction.
    """
    n = len(word)
    lo, hi = (n - 1) // 2, n // 2
    return word[lo:], word[: hi + 1][::-1]


def weakly_balanced(word: str) -> str:
    word = check_word(word)
    right, left = _centre_scans(word)
    if "01" not in right or "01" not in left:
        return "not"
    n = len(word)
    centre = {word[(n - 1) // 2], word[n // 2]}
    return "0-centred" if "0" in centre else "1-centred"


# --- trees -------------------------------------------------------------------


@dataclass
class TreeMetrics:
    lam: list  # per-vertex distance to a loop
    lam_T: float
    components: list  # maximal reflexive subtrees
    quasi: bool
    T0: list | None = None
    v_lambda: int | None = None
    l: int | None = None
    path: list | None = None  # v_lambda ... l


def _dist_to(g: PRGraph, vertices) -> list[float]:
    return bfs(g, vertices)


def tree_metrics(t: PRGraph) -> TreeMetrics:
    if not t.is_tree():
        raise ValueError("expected a tree")
    lam = loop_distance(t)
    lam_T = max(lam)
    comps = reflexive_components(t)
    if lam_T == INF:
        return TreeMetrics(lam, lam_T, comps, True)
    best = None
    for comp in comps:
        d = _dist_to(t, comp)
        worst = max(d)
        if worst <= lam_T and (best is None or worst < best[0]):
            best = (worst, comp, d)
    if best is None:
        return TreeMetrics(lam, lam_T, comps, False)
    _, T0, d = best
    m = TreeMetrics(lam, lam_T, comps, True, T0=T0)
    if lam_T == 0:
        return m
    v = min(x for x in t.vertices if lam[x] == lam_T)
    members = set(T0)
    # walk back towards T0 along decreasing distance
    path = [v]
    while path[-1] not in members:
        here = path[-1]
        path.append(min(u for u in t.neighbours(here) if u != here and d[u] == d[here] - 1))
    m.v_lambda, m.l, m.path = v, path[-1], path
    if t.degree(v) > 1:
        raise AssertionError("vertex at maximal loop distance is not a leaf")
    return m


def is_quasi_loop_connected(t: PRGraph) -> bool:
    return tree_metrics(t).quasi


def quasi_by_walks(t: PRGraph) -> bool:
    """Same predicate, deciding walk existence by literal enumeration."""
    from .graphs import has_exact_walk

    lam = loop_distance(t)
    lam_T = max(lam)
    if lam_T == INF:
        return True
    lam_T = int(lam_T)
    return any(
        all(has_exact_walk(t, v, comp, lam_T) for v in t.vertices)
        for comp in reflexive_components(t)
    )


# --- the pruned and closed trees used by the equivalence argument ------------


def _branch(t: PRGraph, root: int, first: int) -> list[int]:
    """Vertices reachable from ``first`` without passing ``root``."""
    seen = {root, first}
    stack = [first]
    while stack:
        x = stack.pop()
        for y in t.neighbours(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    seen.discard(root)
    return sorted(seen)


def _require_mixed_quasi(t: PRGraph) -> TreeMetrics:
    m = tree_metrics(t)
    if not m.quasi or t.is_reflexive() or t.is_irreflexive():
        raise ValueError("needs a quasi-loop-connected tree with and without loops")
    return m


def build_T_prime(t: PRGraph) -> tuple[PRGraph, VertexMap, list[int]]:
    """Prune the side branches off the path from ``v_lambda`` to ``l``.

    Returns the pruned tree, the folding surjection ``t -> pruned`` and the
    old ids of the kept vertices (position = new id).
    """
    m = _require_mixed_quasi(t)
    if len(m.components) == 1:
        return t, VertexMap(t, t, list(t.vertices)), list(t.vertices)
    l, path = m.l, m.path
    lam = int(m.lam_T)
    t1 = set(_branch(t, l, path[-2]))
    on_path = set(path)
    keep = [v for v in t.vertices if v not in t1 or v in on_path]
    pruned, _ = t.induced(keep)
    new_id = {v: i for i, v in enumerate(keep)}
    from_v = bfs(t, [m.v_lambda])
    # path[k] is at distance k from v_lambda; side vertices fold onto it
    image = []
    for v in t.vertices:
        if v in t1 and v not in on_path:
            image.append(new_id[path[min(int(from_v[v]), lam)]])
        else:
            image.append(new_id[v])
    f = VertexMap(t, pruned, image)
    if not is_surjective_homomorphism(f):
        raise AssertionError("fold onto the pruned tree failed")
    return pruned, f, keep


def side_subtrees(t: PRGraph, m: TreeMetrics) -> list[list[int]]:
    """Branches hanging off ``T0`` through a non-loop, except the one holding ``v_lambda``."""
    members = set(m.T0)
    out = []
    skip = m.path[-2] if m.path and len(m.path) > 1 else None
    for r in m.T0:
        for c in sorted(t.neighbours(r)):
            if c in members or (r == m.l and c == skip):
                continue
            out.append([r] + _branch(t, r, c))
    return out


def build_T_doubleprime(tp: PRGraph) -> PRGraph:
    """Loop every vertex of the side subtrees of ``T0`` (the path to ``v_lambda`` excepted)."""
    m = _require_mixed_quasi(tp)
    if len(m.components) == 1 and m.path is None:
        return tp
    extra = [v for s in side_subtrees(tp, m) for v in s]
    return tp.with_loops(extra)


# --- verdicts -----------------------------------------------------------------


@dataclass
class Verdict:
    cls: str
    reason: str
    witness: Any = None
    params: dict = field(default_factory=dict)
    note: str = ""

    def to_json(self) -> dict:
        w = self.witness
        summary = w.summary() if hasattr(w, "summary") else (None if w is None else str(w))
        out = {"class": self.cls, "reason": self.reason, "witness": summary,
               "parameters": {k: _jsonable(v) for k, v in sorted(self.params.items())}}
        if self.note:
            out["note"] = self.note
        return out


def _jsonable(v):
    if v == INF:
        return "inf"
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def _easy_tree_witness(t: PRGraph):
    from .polymorph import majority_for_tree

    return majority_for_tree(t)


def classify_path(word: str, witness: bool = True) -> Verdict:
    word = check_word(word)
    g = path_graph(word)
    dec = decompose(word)
    lam = max(loop_distance(g))
    params = {"n": len(word), "a": dec.a, "b": dec.b, "|alpha|": len(dec.alpha), "lambda": lam}
    if is_zero_eccentric(word):
        if g.is_irreflexive():
            reason = "irreflexive"
        elif is_loop_connected(g):
            reason = "loop-connected"
        else:
            reason = "0-eccentric"
        w = None
        if witness:
            if reason == "0-eccentric":
                from .surject import equivalence_witness_path

                w = equivalence_witness_path(word)
            else:
                w = _easy_tree_witness(g)
        return Verdict(NL, reason, w, params)

    from .reduce import choose_recipe

    recipe = choose_recipe(word)
    params.update(recipe.params())
    if recipe.fallback:
        return Verdict(NP_HARD, "unmatched-case", recipe, params,
                       note="no path case matched; tree recipe gives NP-hardness only")
    reason = {
        "P101-family": "weakly-balanced-0",
        "wb-0-centred": "weakly-balanced-0",
        "P10101-family": "weakly-balanced-1",
        "P101d01": "weakly-balanced-1",
        "remaining-case": "remaining-case",
    }.get(recipe.case, "weakly-balanced-1")
    return Verdict(PSPACE, reason, recipe, params)


def classify_forest(f: PRGraph, witness: bool = True, power_cap: int = 4) -> Verdict:
    if not f.is_forest():
        raise ValueError("expected a forest")
    if not f.is_connected():
        return Verdict(NL, "disconnected", None, {"components": len(f.components())})
    if is_path(f):
        v = classify_path(path_word(f, path_order(f)), witness=witness)
        return v
    m = tree_metrics(f)
    params = {"n": f.n, "lambda": m.lam_T}
    if f.is_irreflexive():
        return Verdict(NL, "irreflexive", _easy_tree_witness(f) if witness else None, params)
    if len(m.components) == 1:
        return Verdict(NL, "loop-connected", _easy_tree_witness(f) if witness else None, params)
    if m.quasi:
        w, note = None, ""
        if witness:
            from .surject import equivalence_witness_tree

            w = equivalence_witness_tree(f, power_cap=power_cap)
            if not getattr(w, "complete", True):
                note = "backward surjection not found within the power cap"
        return Verdict(NL, "quasi-loop-connected", w, params, note=note)
    from .reduce import tree_recipe

    recipe = tree_recipe(f)
    params.update(recipe.params())
    return Verdict(NP_HARD, "tree-hardness", recipe, params)
