"""Majority operations on trees: constructions, checkers and exhaustive search."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import (
    PRGraph,
    RootedTree,
    SearchOutcome,
    distances,
    power,
    power_index,
)
from .solver import EvalConfig, ResourceExhausted, solve_csp


@dataclass
class TernaryTable:
    n: int
    table: np.ndarray  # shape (n, n, n)
    majority_verified: bool = field(default=False, compare=False)

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.int64)
        if self.table.shape != (self.n,) * 3:
            raise ValueError("table must have shape (n, n, n)")
        if self.n and (self.table.min() < 0 or self.table.max() >= self.n):
            raise ValueError("table value outside the carrier")

    def __call__(self, x: int, y: int, z: int) -> int:
        return int(self.table[x, y, z])

    def dump(self) -> str:
        lines = [str(self.n)]
        for x in range(self.n):
            for y in range(self.n):
                for z in range(self.n):
                    lines.append(f"{x + 1} {y + 1} {z + 1} -> {self.table[x, y, z] + 1}")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        return f"majority table on {self.n} vertices"


def parse_table(text: str) -> TernaryTable:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    n = int(lines[0])
    table = np.full((n, n, n), -1, dtype=np.int64)
    for ln in lines[1:]:
        lhs, rhs = ln.split("->")
        x, y, z = (int(t) - 1 for t in lhs.split())
        table[x, y, z] = int(rhs) - 1
    if (table < 0).any():
        raise ValueError("table dump is not total")
    return TernaryTable(n, table)


# --- checkers -------------------------------------------------------------


def is_majority(f: TernaryTable) -> bool:
    t = f.table
    idx = np.arange(f.n)
    x, y = np.meshgrid(idx, idx, indexing="ij")
    ok = bool(
        (t[x, x, y] == x).all() and (t[x, y, x] == x).all() and (t[y, x, x] == x).all()
    )
    f.majority_verified = ok
    return ok


def is_polymorphism(f: TernaryTable, g: PRGraph) -> bool:
    """Every triple of arcs maps to an arc."""
    if f.n != g.n:
        raise ValueError("carrier size differs from the graph")
    arcs = np.array(g.arcs() + [(v, u) for u, v in g.arcs() if u != v], dtype=np.int64)
    if len(arcs) == 0:
        return True
    adj = np.zeros((g.n, g.n), dtype=bool)
    adj[arcs[:, 0], arcs[:, 1]] = True
    s, t = arcs[:, 0], arcs[:, 1]
    src = f.table[s[:, None, None], s[None, :, None], s[None, None, :]]
    dst = f.table[t[:, None, None], t[None, :, None], t[None, None, :]]
    return bool(adj[src, dst].all())


# --- constructions --------------------------------------------------------


def meet(t: RootedTree, x: int, y: int) -> int:
    return t.meet(x, y)


def _parity_adjusted(t: RootedTree, d: int, parity: int) -> int:
    """``d`` if its parity is right, else one step towards the root.

    At the root the step is taken away from it instead, into its only child.
    """
    if t.parity(d) == parity:
        return d
    if d != t.root:
        return t.parent[d]
    kids = t.children(d)
    if len(kids) != 1:
        raise ValueError("root must have degree one")
    return kids[0]


def _f0(t: RootedTree, x: int, y: int, z: int) -> int:
    px, py, pz = t.parity(x), t.parity(y), t.parity(z)
    if px == py == pz:
        d = max((t.meet(x, y), t.meet(y, z), t.meet(x, z)), key=lambda v: t.depth[v])
        return _parity_adjusted(t, d, px)
    if px == py:
        u, v = x, y
    elif px == pz:
        u, v = x, z
    else:
        u, v = y, z
    return _parity_adjusted(t, t.meet(u, v), t.parity(u))


def f0_table(t: RootedTree) -> TernaryTable:
    g = t.graph
    if g.loops:
        raise ValueError("f0 needs an irreflexive tree")
    if g.n > 1 and g.degree(t.root) != 1:
        raise ValueError("root must have degree one")
    n = g.n
    table = np.zeros((n, n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                table[x, y, z] = _f0(t, x, y, z)
    return TernaryTable(n, table)


def _median_table(g: PRGraph) -> np.ndarray:
    d = np.array(distances(g), dtype=np.float64)
    # the median of three vertices in a tree minimises the summed distance
    total = d[:, None, None, :] + d[None, :, None, :] + d[None, None, :, :]
    return total.argmin(axis=3)


def median_table(g: PRGraph) -> TernaryTable:
    if not g.is_tree():
        raise ValueError("median needs a tree")
    if not g.is_reflexive():
        raise ValueError("median is only claimed for reflexive trees")
    return TernaryTable(g.n, _median_table(g))


@dataclass
class ComponentStructure:
    """Irreflexive branches hanging off a reflexive centre, each rooted at its loop."""

    centre: list
    roots: list  # roots[k] is the looped root of component k
    trees: list  # RootedTree on the whole graph, rooted at roots[k]
    members: list  # members[k]: vertex set of component k, root included
    of: list  # of[v]: sorted component ids containing v


def component_structure(g: PRGraph) -> ComponentStructure:
    from .classify import is_loop_connected

    if not g.is_tree() or not g.loops or not is_loop_connected(g):
        raise ValueError("needs a loop-connected tree with at least one loop")
    centre = sorted(g.loops)
    roots, trees, members = [], [], []
    for r in centre:
        for c in sorted(g.neighbours(r)):
            if g.has_loop(c):
                continue
            seen = {r, c}
            stack = [c]
            while stack:
                x = stack.pop()
                for y in g.neighbours(x):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            assert not (seen - {r}) & g.loops
            roots.append(r)
            members.append(frozenset(seen))
            trees.append(RootedTree(g, r))
    of = [sorted(k for k, m in enumerate(members) if v in m) for v in range(g.n)]
    return ComponentStructure(centre, roots, trees, members, of)


def _branch_tree(cs: ComponentStructure, k: int) -> RootedTree:
    return cs.trees[k]


def _f1_value(cs: ComponentStructure, med: np.ndarray, x: int, y: int, z: int) -> int:
    args = (x, y, z)
    common = set(cs.of[x]) & set(cs.of[y]) & set(cs.of[z])
    if common:
        vals = {_f0(cs.trees[k], x, y, z) for k in common}
        if len(vals) != 1:
            raise AssertionError(f"rule A ambiguous at {args}")
        return vals.pop()
    vals = set()
    for i, j, o in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        u, v, w = args[i], args[j], args[o]
        for k in set(cs.of[u]) & set(cs.of[v]):
            if w in cs.members[k]:
                continue
            t = cs.trees[k]
            if t.parity(u) == t.parity(v):
                vals.add(_parity_adjusted(t, t.meet(u, v), t.parity(u)))
            else:
                vals.add(cs.roots[k])
    if vals:
        if len(vals) != 1:
            raise AssertionError(f"rules B/C disagree at {args}: {sorted(vals)}")
        return vals.pop()
    return int(med[x, y, z])


def f1_table(g: PRGraph) -> TernaryTable:
    from .classify import is_loop_connected

    if not g.is_tree() or not is_loop_connected(g):
        raise ValueError("f1 needs a loop-connected tree")
    if not g.loops:
        return f0_table(RootedTree(g, _a_leaf(g)))
    cs = component_structure(g)
    med = _median_table(g)
    n = g.n
    table = np.zeros((n, n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                table[x, y, z] = _f1_value(cs, med, x, y, z)
    return TernaryTable(n, table)


def _a_leaf(g: PRGraph) -> int:
    if g.n == 1:
        return 0
    return min(v for v in g.vertices if g.degree(v) == 1)


def majority_for_tree(g: PRGraph) -> TernaryTable:
    """The construction matching the tree's shape, checked before returning."""
    if g.is_reflexive():
        f = median_table(g)
    else:
        f = f1_table(g)
    if not (is_majority(f) and is_polymorphism(f, g)):
        raise AssertionError("constructed table is not a majority polymorphism")
    return f


# --- search -----------------------------------------------------------------


def search_majority_polymorphism(g: PRGraph, node_budget: int = 200_000,
                                 propagation: str = "arc") -> SearchOutcome:
    """Homomorphism ``g^3 -> g`` with the majority cells pinned."""
    if node_budget <= 0:
        raise ValueError("node budget must be positive")
    n = g.n
    cube = power(g, 3)
    pins = {}
    for x in range(n):
        for y in range(n):
            pins[power_index((x, x, y), n)] = x
            pins[power_index((x, y, x), n)] = x
            pins[power_index((y, x, x), n)] = x
    cfg = EvalConfig(propagation=propagation, node_limit=node_budget)
    try:
        sol = solve_csp(range(cube.n), list(cube.edges), g, pins, cfg)
    except ResourceExhausted:
        return SearchOutcome("exhausted", nodes=node_budget)
    if sol is None:
        return SearchOutcome("refuted")
    table = np.array([sol[i] for i in range(cube.n)], dtype=np.int64).reshape(n, n, n)
    f = TernaryTable(n, table)
    assert is_majority(f) and is_polymorphism(f, g), "search returned a bad table"
    return SearchOutcome("found", f)
