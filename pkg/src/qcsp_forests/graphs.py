"""Partially reflexive graphs, paths and trees.

Vertices are dense integers ``0..n-1``.  Path words are read left to right
and vertex ``i`` of :func:`path_graph` is position ``i + 1`` of the word;
the ``+1`` only appears at the text boundary (parsers and printers).

Direct products number the pair ``(x, u)`` as ``x * |H| + u`` (row major),
so a map out of ``G x G`` can be read as a matrix whose rows are indexed by
the first coordinate.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx

INF = math.inf


class FormatError(ValueError):
    """Malformed textual input (graph files, path words, sentences)."""


@dataclass(frozen=True)
class PRGraph:
    """Finite undirected graph in which any vertex may carry a self-loop.

    ``edges`` holds unordered pairs stored as ``(min, max)``; a loop on ``v``
    is the pair ``(v, v)``.
    """

    n: int
    edges: frozenset
    _adj: tuple = field(init=False, repr=False, compare=False)
    _masks: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [set() for _ in range(self.n)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))
        object.__setattr__(
            self, "_masks", tuple(sum(1 << w for w in a) for a in adj)
        )

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "PRGraph":
        return cls(n, frozenset(edges))

    def neighbours(self, v: int) -> frozenset:
        return self._adj[v]

    def neighbour_mask(self, v: int) -> int:
        """Bitmask of the neighbours of ``v`` (bit ``w`` set iff ``v ~ w``)."""
        return self._masks[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def has_loop(self, v: int) -> bool:
        return v in self._adj[v]

    @property
    def loops(self) -> frozenset:
        return frozenset(v for v in range(self.n) if self.has_loop(v))

    @property
    def vertices(self) -> range:
        return range(self.n)

    def arcs(self) -> list[tuple[int, int]]:
        """Every ordered pair ``(u, v)`` with ``u ~ v`` (loops once)."""
        out = []
        for u, v in sorted(self.edges):
            out.append((u, v))
            if u != v:
                out.append((v, u))
        return out

    def degree(self, v: int) -> int:
        """Number of neighbours other than ``v`` itself."""
        return len(self._adj[v] - {v})

    def is_reflexive(self) -> bool:
        return len(self.loops) == self.n

    def is_irreflexive(self) -> bool:
        return not self.loops

    def stripped(self) -> nx.Graph:
        """The loop-free underlying graph as a networkx graph."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from((u, v) for u, v in self.edges if u != v)
        return g

    def is_connected(self) -> bool:
        return self.n > 0 and nx.is_connected(self.stripped())

    def is_forest(self) -> bool:
        return nx.is_forest(self.stripped())

    def is_tree(self) -> bool:
        return self.n > 0 and nx.is_tree(self.stripped())

    def components(self) -> list[list[int]]:
        return [sorted(c) for c in nx.connected_components(self.stripped())]

    def induced(self, keep: Sequence[int]) -> tuple["PRGraph", list[int]]:
        """Induced subgraph on ``keep`` (renumbered in the given order)."""
        index = {v: i for i, v in enumerate(keep)}
        edges = [
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        ]
        return PRGraph.from_edges(len(keep), edges), list(keep)

    def with_loops(self, extra: Iterable[int]) -> "PRGraph":
        return PRGraph(self.n, self.edges | {(v, v) for v in extra})

    def relabel(self, perm: Sequence[int]) -> "PRGraph":
        """Copy with vertex ``v`` renamed ``perm[v]``."""
        return PRGraph.from_edges(
            self.n, ((perm[u], perm[v]) for u, v in self.edges)
        )


# ---------------------------------------------------------------- paths


def check_word(word: str) -> str:
    if not word or any(ch not in "01" for ch in word):
        raise FormatError(f"path word must be a nonempty 0/1 string, got {word!r}")
    return word


def canonical_word(word: str) -> str:
    """The lexicographically smaller of ``word`` and its reverse."""
    check_word(word)
    return min(word, word[::-1])


def path_graph(word: str) -> PRGraph:
    """``P_word``: a path on ``len(word)`` vertices, looped where ``word`` has 1."""
    check_word(word)
    n = len(word)
    edges = [(i, i + 1) for i in range(n - 1)]
    edges += [(i, i) for i, ch in enumerate(word) if ch == "1"]
    return PRGraph.from_edges(n, edges)


def path_word(g: PRGraph, order: Sequence[int] | None = None) -> str:
    """Inverse of :func:`path_graph` for a graph that is a path.

    ``order`` lists the vertices along the path; it is found automatically
    when omitted.
    """
    if order is None:
        order = path_order(g)
    return "".join("1" if g.has_loop(v) else "0" for v in order)


def path_order(g: PRGraph) -> list[int]:
    if g.n == 1:
        return [0]
    s = g.stripped()
    if not nx.is_tree(s) or max(d for _, d in s.degree()) > 2:
        raise ValueError("graph is not a path")
    ends = sorted(v for v, d in s.degree() if d == 1)
    return nx.shortest_path(s, ends[0], ends[-1])


def is_path(g: PRGraph) -> bool:
    try:
        path_order(g)
    except ValueError:
        return False
    return True


# ------------------------------------------------------------- products


def direct_product(g: PRGraph, h: PRGraph) -> PRGraph:
    """``G x H``; the pair ``(x, u)`` is vertex ``x * h.n + u``."""
    edges = []
    garcs = g.arcs()
    harcs = h.arcs()
    for x, y in garcs:
        for u, v in harcs:
            a, b = x * h.n + u, y * h.n + v
            if a <= b:
                edges.append((a, b))
    return PRGraph.from_edges(g.n * h.n, edges)


def power(g: PRGraph, k: int) -> PRGraph:
    """``G^k``; tuple ``(x_1, ..., x_k)`` is numbered in base ``|G|``, x_1 most significant."""
    if k < 1:
        raise ValueError("power needs k >= 1")
    out = g
    for _ in range(k - 1):
        out = direct_product(out, g)
    return out


def power_index(coords: Sequence[int], n: int) -> int:
    idx = 0
    for c in coords:
        idx = idx * n + c
    return idx


def power_coords(idx: int, n: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        idx, r = divmod(idx, n)
        out.append(r)
    return tuple(reversed(out))


# ------------------------------------------------------------ distances


def bfs(g: PRGraph, sources: Iterable[int]) -> list[float]:
    """Distances from the nearest source on the loop-stripped graph."""
    dist = [INF] * g.n
    queue = deque()
    for s in sources:
        if dist[s] != 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        for w in g.neighbours(v):
            if dist[w] == INF:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def distances(g: PRGraph) -> list[list[float]]:
    """All-pairs table; unreachable pairs get :data:`INF`."""
    return [bfs(g, [v]) for v in range(g.n)]


def loop_distance(g: PRGraph, v: int | None = None):
    """Distance to the nearest looped vertex (``INF`` with no loops).

    With ``v`` omitted, returns the list over all vertices.
    """
    dist = bfs(g, g.loops)
    return dist if v is None else dist[v]


def exact_walk_targets(g: PRGraph, start: int, length: int) -> frozenset:
    """Vertices reachable from ``start`` by a walk of exactly ``length`` steps.

    Literal layer-by-layer enumeration; kept as the cross-check for the
    distance-based shortcuts used elsewhere.
    """
    layer = {start}
    for _ in range(length):
        layer = {w for v in layer for w in g.neighbours(v)}
    return frozenset(layer)


def has_exact_walk(g: PRGraph, start: int, targets: Iterable[int], length: int) -> bool:
    return bool(exact_walk_targets(g, start, length) & set(targets))


# -------------------------------------------------------- vertex maps


@dataclass
class VertexMap:
    """A total map ``domain -> codomain`` stored as an image list.

    The ``verified_*`` flags are only ever set by :func:`is_homomorphism`
    and :func:`is_surjective_homomorphism`.
    """

    domain: PRGraph
    codomain: PRGraph
    image: list[int]
    verified_homomorphism: bool = False
    verified_surjective: bool = False

    def __post_init__(self):
        self.image = [int(x) for x in self.image]
        if len(self.image) != self.domain.n:
            raise ValueError(
                f"map has {len(self.image)} images for {self.domain.n} vertices"
            )
        if any(not 0 <= x < self.codomain.n for x in self.image):
            raise ValueError("image outside the codomain")

    def __call__(self, v: int) -> int:
        return self.image[v]


def is_homomorphism(f: VertexMap) -> bool:
    cod = f.codomain
    ok = all(cod.has_edge(f.image[u], f.image[v]) for u, v in f.domain.edges)
    f.verified_homomorphism = ok
    return ok


def is_surjective_homomorphism(f: VertexMap) -> bool:
    ok = is_homomorphism(f) and len(set(f.image)) == f.codomain.n
    f.verified_surjective = ok
    return ok


def identity_map(g: PRGraph) -> VertexMap:
    return VertexMap(g, g, list(range(g.n)))


def compose(f: VertexMap, g: VertexMap) -> VertexMap:
    """``g after f``."""
    if f.codomain.n != g.domain.n:
        raise ValueError("maps do not compose")
    return VertexMap(f.domain, g.codomain, [g.image[x] for x in f.image])


def product_map(f: VertexMap, inner: PRGraph, k: int, r: int) -> VertexMap:
    """From ``h: A^k -> B`` build ``A^(k*r) -> B^r`` acting blockwise.

    ``inner`` is ``A``.  If ``h`` is a surjective homomorphism, so is the result.
    """
    a, b = inner.n, f.codomain.n
    if f.domain.n != a ** k:
        raise ValueError("domain of f is not inner^k")
    dom = power(inner, k * r)
    cod = power(f.codomain, r)
    image = []
    for idx in range(dom.n):
        coords = power_coords(idx, a, k * r)
        parts = [
            f.image[power_index(coords[i * k:(i + 1) * k], a)] for i in range(r)
        ]
        image.append(power_index(parts, b))
    return VertexMap(dom, cod, image)


# ---------------------------------------------------- homomorphism search


@dataclass
class SearchOutcome:
    """Result of a bounded search: ``found``, ``refuted`` or ``exhausted``."""

    status: str
    result: object = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


def find_homomorphism(
    g: PRGraph,
    h: PRGraph,
    node_budget: int = 1_000_000,
    surjective: bool = False,
    pins: dict[int, int] | None = None,
) -> SearchOutcome:
    """Backtracking search for ``g -> h`` with forward checking.

    ``refuted`` is reported only after the whole space has been searched;
    running out of ``node_budget`` gives ``exhausted``.
    """
    if node_budget <= 0:
        raise ValueError("node budget must be positive")
    if surjective and g.n < h.n:
        return SearchOutcome("refuted")
    full = (1 << h.n) - 1
    loopmask = sum(1 << v for v in h.loops)
    domains = [full] * g.n
    for v in g.loops:
        domains[v] &= loopmask
    for v, val in (pins or {}).items():
        domains[v] &= 1 << val
    if any(d == 0 for d in domains):
        return SearchOutcome("refuted")
    nbrs = [sorted(g.neighbours(v) - {v}) for v in range(g.n)]
    hmask = [h.neighbour_mask(x) for x in range(h.n)]
    assign = [-1] * g.n
    counter = [0]

    class _Budget(Exception):
        pass

    def support(mask: int) -> int:
        out = 0
        while mask:
            low = mask & -mask
            out |= hmask[low.bit_length() - 1]
            mask ^= low
        return out

    def pick(doms):
        best, best_size = -1, None
        for v in range(g.n):
            if assign[v] < 0:
                size = bin(doms[v]).count("1")
                if best_size is None or size < best_size:
                    best, best_size = v, size
        return best

    def rec(doms) -> bool:
        counter[0] += 1
        if counter[0] > node_budget:
            raise _Budget
        v = pick(doms)
        if v < 0:
            return not surjective or len(set(assign)) == h.n
        if surjective:
            used = set(a for a in assign if a >= 0)
            remaining = sum(1 for a in assign if a < 0)
            if h.n - len(used) > remaining:
                return False
        mask = doms[v]
        while mask:
            low = mask & -mask
            val = low.bit_length() - 1
            mask ^= low
            new = list(doms)
            new[v] = low
            ok = True
            for w in nbrs[v]:
                if assign[w] < 0:
                    new[w] &= hmask[val]
                    if not new[w]:
                        ok = False
                        break
                elif not (hmask[val] >> assign[w]) & 1:
                    ok = False
                    break
            if ok:
                assign[v] = val
                if rec(new):
                    return True
                assign[v] = -1
        return False

    # arc consistency once up front
    changed = True
    while changed:
        changed = False
        for u, v in g.edges:
            if u == v:
                continue
            for a, b in ((u, v), (v, u)):
                nd = domains[a] & support(domains[b])
                if nd != domains[a]:
                    domains[a] = nd
                    changed = True
                    if not nd:
                        return SearchOutcome("refuted")
    try:
        ok = rec(domains)
    except _Budget:
        return SearchOutcome("exhausted", nodes=counter[0])
    if not ok:
        return SearchOutcome("refuted", nodes=counter[0])
    f = VertexMap(g, h, assign)
    check = is_surjective_homomorphism(f) if surjective else is_homomorphism(f)
    assert check, "search returned an invalid map"
    return SearchOutcome("found", f, counter[0])


def find_surjective_homomorphism(
    g: PRGraph, h: PRGraph, node_budget: int = 1_000_000
) -> SearchOutcome:
    return find_homomorphism(g, h, node_budget, surjective=True)


# ------------------------------------------------------------ rooted trees


@dataclass
class RootedTree:
    """A tree with a chosen root; parity of a vertex is its depth mod 2."""

    graph: PRGraph
    root: int
    parent: list = field(init=False)
    depth: list = field(init=False)

    def __post_init__(self):
        if not self.graph.is_tree():
            raise ValueError("RootedTree needs a tree")
        self.parent = [-1] * self.graph.n
        self.depth = [0] * self.graph.n
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for w in sorted(self.graph.neighbours(v)):
                if w not in seen:
                    seen.add(w)
                    self.parent[w] = v
                    self.depth[w] = self.depth[v] + 1
                    queue.append(w)

    def parity(self, v: int) -> int:
        return self.depth[v] % 2

    def ancestors(self, v: int) -> list[int]:
        """``v`` up to the root, inclusive."""
        out = [v]
        while self.parent[out[-1]] >= 0:
            out.append(self.parent[out[-1]])
        return out

    def meet(self, x: int, y: int) -> int:
        """Deepest common ancestor of ``x`` and ``y``."""
        ax = set(self.ancestors(x))
        for a in self.ancestors(y):
            if a in ax:
                return a
        raise AssertionError("unreachable: tree is connected")

    def children(self, v: int) -> list[int]:
        return sorted(w for w in self.graph.neighbours(v) if self.parent[w] == v)


# -------------------------------------------------------- enumeration


def nonisomorphic_pr_trees(n: int) -> Iterator[PRGraph]:
    """Every partially reflexive tree on ``n`` vertices, once per isomorphism class."""
    if n == 1:
        yield PRGraph.from_edges(1, [])
        yield PRGraph.from_edges(1, [(0, 0)])
        return
    for t in nx.nonisomorphic_trees(n):
        edges = list(t.edges())
        autos = _automorphisms(t)
        seen = set()
        for mask in range(1 << n):
            canon = min(
                sum(1 << p[v] for v in range(n) if mask >> v & 1) for p in autos
            )
            if canon in seen:
                continue
            seen.add(canon)
            loops = [(v, v) for v in range(n) if mask >> v & 1]
            yield PRGraph.from_edges(n, edges + loops)


def _automorphisms(t: nx.Graph) -> list[dict]:
    matcher = nx.algorithms.isomorphism.GraphMatcher(t, t)
    return list(matcher.isomorphisms_iter())


def all_words(max_len: int, min_len: int = 1) -> Iterator[str]:
    for n in range(min_len, max_len + 1):
        for bits in itertools.product("01", repeat=n):
            yield "".join(bits)


# ----------------------------------------------------------- text formats


def parse_graph(text: str) -> PRGraph:
    """Graph file: first line ``n``, then ``u v`` per edge (1-based; ``v v`` loops)."""
    lines = [
        ln.split("#", 1)[0].strip() for ln in text.splitlines()
    ]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("empty graph file")
    try:
        n = int(lines[0])
    except ValueError:
        raise FormatError(f"first line must be the vertex count, got {lines[0]!r}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"edge line needs two vertices: {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"non-integer vertex in {ln!r}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise FormatError(f"vertex out of range 1..{n} in {ln!r}")
        edges.append((u - 1, v - 1))
    return PRGraph.from_edges(n, edges)


def format_graph(g: PRGraph) -> str:
    lines = [str(g.n)]
    lines += [f"{u + 1} {v + 1}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def parse_word(text: str) -> str:
    return check_word(text.strip())
