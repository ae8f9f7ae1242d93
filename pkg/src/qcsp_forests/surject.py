"""Explicit surjective homomorphisms between path powers and equivalence witnesses.

Two templates ``T`` and ``S`` agree on every positive Horn sentence as soon as
``T^t`` maps surjectively onto ``S`` and ``S^s`` onto ``T``; the witnesses
below carry both maps, each checked before it is handed out.

Coordinates
    ``P_{10^m}`` has vertices ``0..m`` (loop at 0) and ``P_{0^m10^m}`` has
    ``-m..m`` (loop at 0); dense id = coordinate + m.  For the two-parameter
    family the order is ``-a..-1, 0_1..0_b, 1..a``, which is also the dense
    order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import (
    PRGraph,
    VertexMap,
    bfs,
    check_word,
    compose,
    find_surjective_homomorphism,
    identity_map,
    is_surjective_homomorphism,
    path_graph,
    power,
    power_coords,
    power_index,
    product_map,
)


def _verified(f: VertexMap, what: str) -> VertexMap:
    if not is_surjective_homomorphism(f):
        raise AssertionError(f"{what} is not a surjective homomorphism")
    return f


# --- the one-parameter square ------------------------------------------------


def surhom_entry(i: int, j: int) -> int:
    """Coordinate image of ``(i, j)`` in ``P_{10^m}^2``; independent of ``m``."""
    if i < j:
        return (-1) ** (j - 1 + i) * i
    if i == j:
        return -j
    return j + 1 if (i - j) % 2 else -j


def surhom_matrix(m: int) -> VertexMap:
    if m < 1:
        raise ValueError("m must be at least 1")
    dom = power(path_graph("1" + "0" * m), 2)
    cod = path_graph("0" * m + "1" + "0" * m)
    image = [surhom_entry(i, j) + m for i in range(m + 1) for j in range(m + 1)]
    return _verified(VertexMap(dom, cod, image), f"surhom({m})")


def surhom_labels(m: int) -> list[list[int]]:
    """The matrix in coordinates (``-0`` reads as ``0``)."""
    return [[surhom_entry(i, j) for j in range(m + 1)] for i in range(m + 1)]


# --- the two-parameter square ------------------------------------------------


def _se(i: int, j: int) -> int:
    if i <= j:
        return i
    return j - 1 if (i - j) % 2 else j


def surhom2_labels(a: int, b: int) -> list[list[str]]:
    """Entries as strings: ``"-3"``, ``"0_2"``, ``"5"``."""
    coords = [str(-k) for k in range(a, 0, -1)] + [f"0_{c}" for c in range(1, b + 1)]
    coords += [str(k) for k in range(1, a + 1)]
    rows = []
    for r in coords:
        row = []
        for c in coords:
            if c.startswith("0_"):
                row.append(c)
                continue
            j = int(c)
            if r.startswith("0_") or int(r) < 0:
                row.append("0_1" if j < 0 else f"0_{b}")
                continue
            i = int(r)
            v = _se(i, abs(j))
            if v == 0:
                row.append("0_1" if j < 0 else f"0_{b}")
            else:
                row.append(str(v if j > 0 else -v))
        rows.append(row)
    return rows


def surhom2_matrix(a: int, b: int) -> VertexMap:
    if a < 1 or b < 1:
        raise ValueError("a and b must be at least 1")
    dom = power(path_graph("1" * (a + b) + "0" * a), 2)
    cod = path_graph("0" * a + "1" * b + "0" * a)

    def ident(label: str) -> int:
        if label.startswith("0_"):
            return a + int(label[2:]) - 1
        v = int(label)
        return v + a if v < 0 else a + b + v - 1

    image = [ident(x) for row in surhom2_labels(a, b) for x in row]
    return _verified(VertexMap(dom, cod, image), f"surhom2({a}, {b})")


def surhom_truncated(a: int, b: int) -> VertexMap:
    """``P_{1^a 1 0^b}^2 -> P_{0^a 1 0^b}`` for ``a < b``, assembled from ``surhom(b)``.

    Left loops collapse onto the loop, the square goes through ``surhom(b)``
    and the long left arm is folded back to length ``a``.
    """
    if not 0 <= a < b:
        raise ValueError("needs 0 <= a < b")
    src = path_graph("1" * (a + 1) + "0" * b)
    base = surhom_matrix(b)
    cod = path_graph("0" * a + "1" + "0" * b)

    def collapse(v: int) -> int:  # src id -> coordinate in P_{10^b}
        return max(0, v - a)

    def fold(c: int) -> int:  # coordinate in [-b, b] -> id in cod
        if c >= -a:
            return c + a
        k = -c - a  # steps beyond the end of the short arm
        return 1 if k % 2 else 0

    dom = power(src, 2)
    image = []
    for idx in range(dom.n):
        x, y = power_coords(idx, src.n, 2)
        c = base.image[power_index((collapse(x), collapse(y)), b + 1)] - b
        image.append(fold(c))
    return _verified(VertexMap(dom, cod, image), f"truncated surhom({a}, {b})")


def format_matrix(rows: list[list]) -> str:
    width = max(len(str(x)) for row in rows for x in row)
    return "\n".join(" ".join(str(x).rjust(width) for x in row) for row in rows) + "\n"


# --- growing extra pendant paths ---------------------------------------------


def _check_pendant(h: PRGraph, path: list[int]) -> None:
    l, rest = path[0], path[1:]
    if not rest:
        raise ValueError("pendant path must have length at least 1")
    if not h.has_loop(l):
        raise ValueError("attachment vertex must be looped")
    if any(h.has_loop(v) for v in rest):
        raise ValueError("pendant path must be irreflexive")
    for k, v in enumerate(rest):
        want = {path[k]} | ({path[k + 2]} if k + 2 < len(path) else set())
        if h.neighbours(v) != want:
            raise ValueError("path is not pendant at the attachment vertex")


def add_path_copy(h: PRGraph, path: list[int]) -> tuple[PRGraph, list[int]]:
    """``h`` with one more copy of the pendant path; returns the new vertex ids."""
    n, lam = h.n, len(path) - 1
    copy = list(range(n, n + lam))
    chain = [path[0]] + copy
    edges = list(h.edges) + list(zip(chain, chain[1:]))
    return PRGraph.from_edges(n + lam, edges), copy


def multiply_paths_map(h: PRGraph, path: list[int]) -> VertexMap:
    """``h^2 -> h'`` where ``h'`` is ``h`` plus one copy of the pendant ``path``.

    ``path[0]`` is the looped attachment vertex ``l``.  Rows outside the
    path's interior project; path rows meet non-path columns at ``l``; the
    path block follows ``surhom`` with the minus part sent to the copy.
    """
    _check_pendant(h, path)
    n = h.n
    target, copy = add_path_copy(h, path)
    pos = {v: k for k, v in enumerate(path)}
    interior = set(path[1:])
    image = []
    for x in range(n):
        for y in range(n):
            if x not in interior:
                image.append(x)
            elif y not in pos:
                image.append(path[0])
            else:
                c = surhom_entry(pos[x], pos[y])
                image.append(path[c] if c >= 0 else copy[-c - 1])
    return _verified(VertexMap(power(h, 2), target, image), "path multiplication")


def grow_paths(h: PRGraph, path: list[int], copies: int,
               max_vertices: int = 20_000) -> tuple[VertexMap, list[list[int]], int]:
    """``h^p -> h`` plus ``copies`` extra pendant paths, by repeated squaring.

    Each squaring adds one copy, so ``p = 2^copies``.  Returns the map, the
    id lists of the copies and ``p``; raises ``OverflowError`` when the power
    would exceed ``max_vertices``.
    """
    f = identity_map(h)
    current, p = h, 1
    copy_ids: list[list[int]] = []
    for _ in range(copies):
        if h.n ** (2 * p) > max_vertices:
            raise OverflowError("power too large")
        step = multiply_paths_map(current, path)
        lifted = product_map(f, h, p, 2)
        f = compose(lifted, step)
        copy_ids.append(list(range(current.n, step.codomain.n)))
        current, p = step.codomain, 2 * p
    return f, copy_ids, p


# --- witnesses -----------------------------------------------------------------


@dataclass
class EquivalenceWitness:
    source: PRGraph
    core: PRGraph
    forward: VertexMap | None  # source^t -> core
    backward: VertexMap | None  # core^s -> source
    t: int
    s: int | None
    method: str
    complete: bool = True
    meta: dict = field(default_factory=dict)

    def verify(self) -> bool:
        if not self.complete:
            return False
        return is_surjective_homomorphism(self.forward) and is_surjective_homomorphism(self.backward)

    def summary(self) -> dict:
        out = {"method": self.method, "t": self.t, "s": self.s,
               "source_size": self.source.n, "core_size": self.core.n,
               "complete": self.complete}
        if self.meta:
            out.update(self.meta)
        return out


def _reversal(word: str) -> VertexMap:
    n = len(word)
    return VertexMap(path_graph(word), path_graph(word[::-1]), [n - 1 - i for i in range(n)])


def _eccentric_split(w: str):
    """``w = alpha 1^b 0^a`` with ``|alpha| = a`` and ``b >= 1``, if possible."""
    n = len(w)
    z = n - len(w.rstrip("0"))
    for a in range(z, -1, -1):
        b = n - 2 * a
        if b >= 1 and w[a:a + b] == "1" * b and w[a + b:] == "0" * a:
            return a, b
    return None


def _unbalanced_split(w: str):
    """Trailing zeros ``m`` of ``w`` when ``w = alpha 0^m`` with ``|alpha| <= m + 1``."""
    m = len(w) - len(w.rstrip("0"))
    if "1" in w and len(w) - m <= m + 1:
        return m
    return None


def _irreflexive_witness(word: str) -> EquivalenceWitness:
    n = len(word)
    p = path_graph(word)
    if n == 1:
        return EquivalenceWitness(p, p, identity_map(p), identity_map(p), 1, 1, "identity")
    core = path_graph("00")
    forward = VertexMap(p, core, [i % 2 for i in range(n)])
    s = 1
    while 2 ** (s - 1) < (n + 1) // 2:
        s += 1
    # core^s is a perfect matching (u ~ complement of u); send the k-th
    # matching edge onto the k-th disjoint edge of the path
    dom = power(core, s)
    image = [0] * dom.n
    half = 2 ** (s - 1)
    for k in range(half):
        u = k  # first coordinate 0
        v = dom.n - 1 - k  # its complement
        lo = min(2 * k, n - 2)
        image[u], image[v] = lo, lo + 1
    backward = VertexMap(dom, p, image)
    return EquivalenceWitness(p, core, _verified(forward, "parity fold"),
                              _verified(backward, "matching cover"), 1, s, "irreflexive")


def _unbalanced_witness(w: str, m: int) -> EquivalenceWitness:
    n = len(w)
    p = path_graph(w)
    r = n - 1 - m  # rightmost loop
    core = path_graph("1" + "0" * m)
    forward = VertexMap(p, core, [max(0, i - r) for i in range(n)])
    mid = path_graph("0" * m + "1" + "0" * m)
    left = r  # vertices left of the rightmost loop
    image = []
    for c in range(-m, m + 1):
        if c >= 0:
            image.append(r + c)
        elif -c <= left:
            image.append(r + c)
        else:
            extra = -c - left
            image.append(r - left + 1 if extra % 2 else r - left)
    unfold = _verified(VertexMap(mid, p, image), "unfold")
    backward = compose(surhom_matrix(m), unfold)
    return EquivalenceWitness(p, core, _verified(forward, "fold"),
                              _verified(backward, "square cover"), 1, 2, "unbalanced",
                              meta={"m": m})


def _eccentric_witness(w: str, a: int, b: int) -> EquivalenceWitness:
    p = path_graph(w)
    core = path_graph("1" * (a + b) + "0" * a)
    forward = VertexMap(p, core, list(range(p.n)))
    tail = _verified(VertexMap(path_graph("0" * a + "1" * b + "0" * a), p, list(range(p.n))),
                     "loop inclusion")
    backward = compose(surhom2_matrix(a, b), tail)
    return EquivalenceWitness(p, core, _verified(forward, "loop inclusion"),
                              _verified(backward, "square cover"), 1, 2, "eccentric",
                              meta={"a": a, "b": b})


def equivalence_witness_path(word: str, method: str = "auto") -> EquivalenceWitness:
    """Witness that the path agrees with a loop-connected core.

    ``method`` is ``"unbalanced"`` (core ``P_{10^m}``), ``"eccentric"`` (core
    ``P_{1^{a+b}0^a}``) or ``"auto"``, which prefers the first unless the
    loop block before the trailing zeros is longer than one.
    """
    from .classify import is_zero_eccentric, split_tail

    word = check_word(word)
    if not is_zero_eccentric(word):
        raise ValueError(f"{word} is not 0-eccentric")
    if "1" not in word:
        return _irreflexive_witness(word)
    if method == "auto" and "0" not in word.strip("0").strip("1"):
        # loops already contiguous: the path is its own core
        p = path_graph(word)
        return EquivalenceWitness(p, p, _verified(identity_map(p), "identity"),
                                  _verified(identity_map(p), "identity"), 1, 1, "identity")
    if method not in ("auto", "unbalanced", "eccentric"):
        raise ValueError(f"unknown method {method!r}")
    for w, flip in ((word, False), (word[::-1], True)):
        m = _unbalanced_split(w)
        ecc = _eccentric_split(w)
        _, b, _ = split_tail(w)
        if method == "auto":
            choice = "unbalanced" if m is not None and (b <= 1 or ecc is None) else (
                "eccentric" if ecc is not None else None)
        else:
            choice = method if (m if method == "unbalanced" else ecc) is not None else None
        if choice is None:
            continue
        wit = _unbalanced_witness(w, m) if choice == "unbalanced" else _eccentric_witness(w, *ecc)
        if flip:
            rev = _reversal(word)
            back = _reversal(w)
            wit = EquivalenceWitness(
                path_graph(word), wit.core, compose(rev, wit.forward),
                compose(wit.backward, back), wit.t, wit.s, wit.method, meta=wit.meta,
            )
            wit.forward, wit.backward = (_verified(wit.forward, "forward"),
                                         _verified(wit.backward, "backward"))
        return wit
    raise ValueError(f"no {method} decomposition for {word}")


def _walk_to(t: PRGraph, start: int, target: int, length: int) -> list[int] | None:
    """Walk of exactly ``length`` steps from ``start`` through ``target``, bouncing at the end."""
    d = bfs(t, [target])
    if d[start] > length or start == target:
        return None
    walk = [start]
    while walk[-1] != target:
        here = walk[-1]
        walk.append(min(u for u in t.neighbours(here) if d[u] == d[here] - 1))
    prev = walk[-2]
    while len(walk) < length + 1:
        walk.append(prev if walk[-1] == target else target)
    return walk


def equivalence_witness_tree(t: PRGraph, power_cap: int = 4,
                             search_budget: int = 200_000) -> EquivalenceWitness:
    """Witness between a quasi-loop-connected tree and its loop-connected closure.

    Forward: fold onto the pruned tree, then add loops.  Backward: grow copies
    of the pendant path in a power of the closure and wrap them around every
    uncovered leaf.  Leaves further than ``lambda`` from the attachment loop
    fall back to a bounded search over the square.
    """
    from .classify import build_T_doubleprime, build_T_prime, side_subtrees, tree_metrics

    m = tree_metrics(t)
    if not m.quasi:
        raise ValueError("tree is not quasi-loop-connected")
    if len(m.components) <= 1:
        return EquivalenceWitness(t, t, identity_map(t), identity_map(t), 1, 1, "identity")
    tp, fold, keep = build_T_prime(t)
    tpp = build_T_doubleprime(tp)
    forward = _verified(VertexMap(t, tpp, fold.image), "fold and close")
    sizes = [len(s) - 1 for s in side_subtrees(tp, tree_metrics(tp))]
    bound = 2 ** sum(sizes)
    meta = {"stated_power_bound": bound}

    lam = int(m.lam_T)
    l = m.l
    new_id = {v: i for i, v in enumerate(keep)}
    path_pp = [new_id[v] for v in reversed(m.path)]  # l ... v_lambda in tpp ids
    on_path = set(m.path)
    # closed side subtrees of the original tree, keyed by their root
    mt = m
    sides = side_subtrees(t, mt)
    t1_side = set()
    if len(m.path) > 1:
        from .classify import _branch

        t1_side = set(_branch(t, l, m.path[-2])) - on_path
    leaves = [v for v in sorted(t1_side | {v for s in sides for v in s[1:]})
              if t.degree(v) == 1]
    walks = [_walk_to(t, l, u, lam) for u in leaves]
    if all(w is not None for w in walks):
        copies = len(walks)
        p = 2 ** copies
        if p > power_cap and copies:
            return EquivalenceWitness(t, tpp, forward, None, 1, None, "path growth",
                                      complete=False, meta={**meta, "needed_power": p})
        if copies == 0:
            grow, copy_ids, p = identity_map(tpp), [], 1
        else:
            grow, copy_ids, p = grow_paths(tpp, path_pp, copies)
        side_root = {}
        for s in side_subtrees(tp, tree_metrics(tp)):
            for v in s[1:]:
                side_root[v] = s[0]
        image = []
        for v_pp in range(tpp.n):
            if v_pp < len(keep):
                v = keep[v_pp]
                image.append(keep[side_root[v_pp]] if v_pp in side_root else v)
        for walk, ids in zip(walks, copy_ids):
            image.extend(walk[1:])
        cover = VertexMap(grow.codomain, t, image)
        backward = compose(grow, _verified(cover, "walk cover"))
        return EquivalenceWitness(t, tpp, forward, _verified(backward, "grown cover"),
                                  1, p, "path growth", meta=meta)
    out = find_surjective_homomorphism(power(tpp, 2), t, search_budget)
    if out.found:
        return EquivalenceWitness(t, tpp, forward, out.result, 1, 2, "search", meta=meta)
    return EquivalenceWitness(t, tpp, forward, None, 1, None, "search", complete=False,
                              meta={**meta, "search": out.status})
