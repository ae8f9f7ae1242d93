"""Compile quantified not-all-equal 3-SAT into positive Horn sentences over hard templates.

A recipe fixes three things for a template: the *pattern* (the path word used
for the edges of the clause gadgets), the *selector* (the pendant path that
lets a universally quantified vertex range over the two anchor loops) and
the *anchors*, the pair of template loops that play true and false.

Two gadget families are produced.

``plain``
    Each variable is one looped node.  A clause ``(x, y, z)`` gets looped
    literal nodes, a negation diamond producing a node ``N`` opposite to the
    middle literal, and a pair of pattern paths ``N -> x``, ``N -> z`` braced
    at their first inner vertex, which rules out ``x = z != N``.

``paired``
    Used where a single pattern cannot keep variables off the middle loops.
    Each variable has two looped nodes ``v``, ``v'`` tied together by a copy
    of the template's square with only the anchor corners pinned; the
    clause is the same braced pair of paths, hung from ``v'`` of the middle
    variable.  The square is rigid when both anchors meet, so only
    existential instances are accepted here.

Where the recipe pattern leaves slack between the anchors, ``fit_clause``
falls back to the straight pattern between them and searches brace
positions until the clause gadget is exactly not-all-equal.

Either way the quantifier prefix is: the two anchor selectors, then the
variables in the instance's order (a universal variable being its selector
end followed by the selector's inner vertices), then everything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .classify import (
    decompose,
    is_zero_eccentric,
    reflexive_components,
    split_tail,
    tree_metrics,
    weakly_balanced,
)
from .graphs import (
    INF,
    FormatError,
    PRGraph,
    bfs,
    check_word,
    path_graph,
    power,
)
from .logic import EXISTS, FORALL, PHSentence
from .solver import solve_csp

# --- instances ---------------------------------------------------------------


class InvalidInstance(ValueError):
    pass


@dataclass(frozen=True)
class QNAEInstance:
    prefix: tuple
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple((q, v) for q, v in self.prefix))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        quant = {}
        for q, v in self.prefix:
            if q not in (FORALL, EXISTS):
                raise FormatError(f"unknown quantifier {q!r}")
            if v in quant:
                raise FormatError(f"duplicate variable {v}")
            quant[v] = q
        for c in self.clauses:
            if len(c) != 3:
                raise FormatError(f"clause {c} does not have three literals")
            for v in c:
                if v not in quant:
                    raise FormatError(f"unbound variable {v}")
            if all(quant[v] == FORALL for v in c):
                raise InvalidInstance(f"clause {c} has only universal variables")

    @property
    def quantifier(self) -> dict:
        return dict((v, q) for q, v in self.prefix)

    @property
    def is_normal(self) -> bool:
        q = self.quantifier
        return all(q[c[1]] == EXISTS for c in self.clauses)


def normalize(inst: QNAEInstance) -> QNAEInstance:
    """Move an existential variable into the middle of every clause."""
    q = inst.quantifier
    out = []
    for c in inst.clauses:
        if q[c[1]] == EXISTS:
            out.append(c)
            continue
        k = next(i for i in (0, 2) if q[c[i]] == EXISTS)
        c = list(c)
        c[1], c[k] = c[k], c[1]
        out.append(tuple(c))
    return QNAEInstance(inst.prefix, tuple(out))


def parse_qnae(text: str) -> QNAEInstance:
    prefix, clauses = [], []
    for raw in text.replace("/", "\n").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] in (FORALL, EXISTS) and len(parts) == 2:
            prefix.append((parts[0], parts[1]))
        elif parts[0] == "c" and len(parts) == 4:
            clauses.append(tuple(parts[1:]))
        else:
            raise FormatError(f"unrecognised line {line!r}")
    return QNAEInstance(tuple(prefix), tuple(clauses))


def format_qnae(inst: QNAEInstance) -> str:
    lines = [f"{q} {v}" for q, v in inst.prefix]
    lines += ["c " + " ".join(c) for c in inst.clauses]
    return "\n".join(lines) + "\n"


# --- recipes -------------------------------------------------------------------


PAIRED_CASES = ("P10101-family", "P101d01", "wb-1-centred(i)", "wb-1-centred(ii)",
                "wb-1-centred(iii)", "wb-1-centred(iv)")


@dataclass
class ReductionRecipe:
    case: str
    pattern: str
    selector: str
    anchors: tuple  # template vertices standing for true and false
    brace: int | None = None  # stated length of the vertical braces
    fallback: bool = False
    values: dict = field(default_factory=dict)  # case parameters
    top_selector: str | None = None  # tree case: selector for the first anchor
    bottom_selector: str | None = None

    def __post_init__(self):
        for w in (self.pattern, self.selector):
            check_word(w)

    @property
    def family(self) -> str:
        return "paired" if self.case in PAIRED_CASES else "plain"

    def params(self) -> dict:
        out = {"case": self.case, "pattern": self.pattern, "selector": self.selector,
               "anchors": [x + 1 for x in self.anchors]}
        if self.brace is not None:
            out["brace"] = self.brace
        if self.top_selector:
            out["top_selector"] = self.top_selector
            out["bottom_selector"] = self.bottom_selector
        out.update(self.values)
        return out

    def summary(self) -> dict:
        return self.params()


class NotHard(ValueError):
    pass


def _zero_centred(word: str):
    n = len(word)
    hi = n // 2  # first index right of the centre line
    lo = (n - 1) // 2 if n % 2 else hi - 1
    left = [i for i in range(lo + 1) if word[i] == "1"]
    right = [i for i in range(hi if n % 2 == 0 else lo + 1, n) if word[i] == "1"]
    if not left or not right:
        return None
    L, R = left[-1], right[0]
    a, b, c = L, R - L - 1, n - 1 - R
    if a + b < c or b + c < a or b < 1:
        return None
    m = max(a, b, c)
    case = "P101-family" if b == 1 and m == 1 else "wb-0-centred"
    return ReductionRecipe(case, "1" + "0" * b + "1", "1" + "0" * m, (L, R),
                           values={"a": a, "b": b, "c": c, "m": m})


def _one_centred(word: str):
    n = len(word)
    centre = {(n - 1) // 2, n // 2}
    s = min(centre)
    t = max(centre)
    if any(word[i] != "1" for i in centre):
        return None
    while s > 0 and word[s - 1] == "1":
        s -= 1
    while t < n - 1 and word[t + 1] == "1":
        t += 1
    d = t - s + 1
    c = 0
    while s - c - 1 >= 0 and word[s - c - 1] == "0":
        c += 1
    e = 0
    while t + e + 1 < n and word[t + e + 1] == "0":
        e += 1
    if c == 0 or e == 0 or s - c - 1 < 0 or t + e + 1 >= n:
        return None
    a = s - c - 1
    b = n - t - e - 2
    vals = {"a": a, "b": b, "c": c, "d": d, "e": e}
    if a + c != e + b:
        mp = min(a + c, e + b)
        if a + c < e + b:
            ell, anchors = e, (t, t + e + 1)
        else:
            ell, anchors = c, (s - c - 1, s)
        return ReductionRecipe("wb-1-centred(unequal)", "1" + "0" * ell + "1",
                               "1" * d + "0" * (mp + 1), anchors,
                               values={**vals, "l": ell, "m'": mp})
    m = max(c, e)
    pattern = "1" + "0" * m + "1" * d + "0" * m + "1"
    anchors = (s - c - 1, t + e + 1)
    subcases = (
        ("i", max(a, b) <= min(c, e), m),
        ("ii", max(c, e) <= min(a, b), max(a, b)),
        ("iii", max(a, e) <= min(b, c), max(b, c)),
        ("iv", max(b, c) <= min(a, e), max(a, e)),
    )
    for tag, ok, x in subcases:
        if not ok:
            continue
        if a == 0 and b == 0 and c == 1 and e == 1:
            case = "P10101-family" if d == 1 else "P101d01"
        else:
            case = f"wb-1-centred({tag})"
        return ReductionRecipe(case, pattern, "1" * d + "0" * x, anchors,
                               brace=d + 2 * m, values={**vals, "m": m, "subcase": tag})
    return None


def _remaining(word: str):
    n = len(word)
    alpha, b, a = split_tail(word)
    if b == 0:
        return None
    if not (len(alpha) + 1 <= (n + 1) / 2 <= len(alpha) + b):
        return None
    k = alpha.rfind("10")
    if k < 0:
        return None
    c = k + 1  # 1-based position of the loop
    if c < a:
        return None
    e = 0
    while word[k + 1 + e] == "0":
        e += 1
    if b + a - c < 1:
        return None
    return ReductionRecipe("remaining-case", "1" + "0" * e + "1",
                           "1" * (b + a - c) + "0" * c, (k, k + e + 1),
                           values={"a": a, "b": b, "|alpha|": len(alpha), "c": c, "e": e})


def _orient(recipe: ReductionRecipe | None, n: int, flipped: bool):
    if recipe is None or not flipped:
        return recipe
    recipe.anchors = tuple(n - 1 - x for x in recipe.anchors)
    recipe.values["reversed"] = True
    return recipe


def choose_recipe(word: str) -> ReductionRecipe:
    """First matching hard case; a flagged tree recipe when none matches."""
    word = check_word(word)
    if is_zero_eccentric(word):
        raise NotHard(f"{word} is 0-eccentric")
    n = len(word)
    kind = weakly_balanced(word)
    if kind == "0-centred":
        r = _zero_centred(word)
        if r is not None:
            return r
    if kind == "1-centred":
        r = _one_centred(word)
        if r is not None:
            return r
    for w, flipped in ((word, False), (word[::-1], True)):
        r = _orient(_remaining(w), n, flipped)
        if r is not None:
            return r
    r = tree_recipe(path_graph(word))
    r.fallback = True
    return r


def tree_recipe(t: PRGraph) -> ReductionRecipe:
    """Parameters of the NP-hardness construction for a tree that is not quasi-loop-connected."""
    m = tree_metrics(t)
    if m.quasi:
        raise NotHard("tree is quasi-loop-connected")
    lam = int(m.lam_T)
    comps = reflexive_components(t)
    dist_from = [bfs(t, c) for c in comps]
    near = [[k for k in range(len(comps)) if dist_from[k][x] <= lam] for x in t.vertices]
    pair_dist = [[min(dist_from[i][v] for v in comps[j]) for j in range(len(comps))]
                 for i in range(len(comps))]

    def mu_xy(x, y):
        return min(pair_dist[i][j] for i in near[x] for j in near[y])

    mu = max(mu_xy(x, y) for x in t.vertices for y in t.vertices)
    witnesses = set()
    for x in t.vertices:
        for y in t.vertices:
            if mu_xy(x, y) != mu:
                continue
            for i in near[x]:
                for j in near[y]:
                    if pair_dist[i][j] == mu:
                        witnesses.add((i, j))
    paths = [_connecting_path(t, comps[i], comps[j]) for i, j in sorted(witnesses)]
    closed = {tuple(p) for p in paths}
    if any(tuple(reversed(p)) not in closed for p in paths):
        raise AssertionError("connecting paths are not closed under reflection")
    best, best_path = -1, None
    for p in paths:
        delta = _penultimate_loop_gap(t, p)
        if delta > best:
            best, best_path = delta, p
    nu = max(len(c) for c in comps)
    end = best_path[-1]
    anchor = best_path[len(best_path) - 1 - best]
    values = {"lambda": lam, "mu": mu, "nu": nu, "Delta": best, "paths": len(paths)}
    if mu <= 1:
        values["degenerate"] = "mu<=1"
    return ReductionRecipe(
        "tree-hardness", "1" + "0" * (best - 1) + "1", "1" * nu + "0" * lam, (anchor, end),
        values=values,
        top_selector="0" * (mu - 1) + "1" * nu + "0" * lam,
        bottom_selector="1" * nu + "0" * lam,
    )


def _connecting_path(t: PRGraph, a: list, b: list) -> list:
    """Shortest path from the set ``a`` to the set ``b``."""
    d = bfs(t, b)
    start = min(a, key=lambda v: (d[v], v))
    path = [start]
    while d[path[-1]] > 0:
        here = path[-1]
        path.append(min(u for u in t.neighbours(here) if d[u] == d[here] - 1))
    return path


def _penultimate_loop_gap(t: PRGraph, path: list) -> int:
    """Distance from the last vertex to the nearest loop strictly before it."""
    for k in range(len(path) - 2, -1, -1):
        if t.has_loop(path[k]):
            return len(path) - 1 - k
    raise AssertionError("connecting path has no loop at its start")


# --- gadget graphs ------------------------------------------------------------


class _Builder:
    def __init__(self):
        self.loops: dict[str, bool] = {}
        self.edges: list[tuple[str, str]] = []
        self.order: list[tuple[str, str]] = []  # explicit prefix entries
        self._fresh = 0

    def node(self, name: str, looped: bool) -> str:
        if name in self.loops:
            if self.loops[name] != looped:
                raise ValueError(f"node {name} redeclared with another loop status")
            return name
        self.loops[name] = looped
        if looped:
            self.edges.append((name, name))
        return name

    def edge(self, a: str, b: str):
        self.edges.append((a, b))

    def path(self, start: str, end: str, word: str, tag: str) -> list[str]:
        """Chain ``start .. end`` whose inner vertices follow ``word[1:-1]``."""
        names = [start]
        for k, ch in enumerate(word[1:-1], 1):
            names.append(self.node(f"{tag}.{k}", ch == "1"))
        names.append(end)
        for a, b in zip(names, names[1:]):
            self.edge(a, b)
        return names

    def selector(self, attach: str, word: str, tag: str) -> list[str]:
        """Pendant path from ``attach`` reading ``word``; returns it from the far end inwards.

        A selector starting with a non-loop gets a looped vertex in front,
        which is ``attach`` itself.
        """
        if word[0] == "0":
            word = "1" + word
        names = [attach]
        for k, ch in enumerate(word[1:], 1):
            names.append(self.node(f"{tag}.{k}", ch == "1"))
        for a, b in zip(names, names[1:]):
            self.edge(a, b)
        return list(reversed(names))

    def quantify(self, q: str, name: str):
        self.order.append((q, name))

    def to_graph(self) -> tuple[PRGraph, list[str]]:
        names = list(self.loops)
        idx = {v: i for i, v in enumerate(names)}
        return PRGraph.from_edges(len(names), [(idx[a], idx[b]) for a, b in self.edges]), names


@dataclass
class GadgetGraph:
    graph: PRGraph
    names: list
    pins: dict  # role -> node name
    roles: dict = field(default_factory=dict)  # node name -> "forall" / "exists"

    def index(self, name: str) -> int:
        return self.names.index(name)


def _braced_pair(bld: _Builder, hub: str, x: str, z: str, pattern: str, tag: str,
                 at: tuple = (1,)):
    """Pattern paths ``hub -> x`` and ``hub -> z`` joined at the inner positions ``at``."""
    p1 = bld.path(hub, x, pattern, f"{tag}.a")
    p3 = bld.path(hub, z, pattern, f"{tag}.b")
    for k in at:
        bld.edge(p1[k], p3[k])


def _negation_diamond(bld: _Builder, top: str, bot: str, lit: str, neg: str,
                      pattern: str, tag: str):
    """Forces ``lit`` and ``neg`` onto different anchors."""
    u1 = bld.path(top, lit, pattern, f"{tag}.tl")
    u2 = bld.path(top, neg, pattern, f"{tag}.tn")
    bld.edge(u1[1], u2[1])
    d1 = bld.path(lit, bot, pattern, f"{tag}.lb")
    d2 = bld.path(neg, bot, pattern, f"{tag}.nb")
    bld.edge(d1[-2], d2[-2])


def _square_gadget(bld: _Builder, template: PRGraph, anchors, v: str, vbar: str,
                   keep: list[tuple[int, int]], tag: str):
    """Copy of the template's square, corners (p,p), (q,q), (p,q), (q,p) named."""
    p, q = anchors
    named = {(p, p): "T", (q, q): "B", (p, q): v, (q, p): vbar}
    keep_set = set(keep)
    n = template.n

    def name(c):
        return named.get(c) or f"{tag}.{c[0]}_{c[1]}"

    for c in keep:
        if c not in named:
            bld.node(name(c), template.has_loop(c[0]) and template.has_loop(c[1]))
    sq = power(template, 2)
    for a, b in sq.edges:
        ca, cb = divmod(a, n), divmod(b, n)
        if a == b or ca not in keep_set or cb not in keep_set:
            continue
        bld.edge(name(ca), name(cb))


_SQUARE_CACHE: dict = {}


def pruned_square(template: PRGraph, anchors) -> list[tuple[int, int]]:
    """Vertices of the template's square still needed to define "opposite anchors".

    Starting from the whole square, drop vertices one at a time while the
    relation it defines on the two off-diagonal corners stays exactly
    ``{(p, q), (q, p)}``.  Raises if even the full square is too weak.
    """
    key = (template, tuple(anchors))
    if key in _SQUARE_CACHE:
        return _SQUARE_CACHE[key]
    p, q = anchors
    n = template.n
    cells = [(x, y) for x in range(n) for y in range(n)]
    fixed = [(p, p), (q, q), (p, q), (q, p)]
    keep = list(cells)
    if _opposite_relation(template, anchors, keep) != {(p, q), (q, p)}:
        raise ValueError("the square does not single out the anchor pair")
    for c in sorted(cells, key=lambda c: (-abs(c[0] - c[1]), c)):
        if c in fixed:
            continue
        trial = [x for x in keep if x != c]
        if _opposite_relation(template, anchors, trial) == {(p, q), (q, p)}:
            keep = trial
    _SQUARE_CACHE[key] = keep
    return keep


def _opposite_relation(template: PRGraph, anchors, keep) -> set:
    p, q = anchors
    bld = _Builder()
    bld.node("T", True)
    bld.node("B", True)
    bld.node("v", True)
    bld.node("w", True)
    _square_gadget(bld, template, anchors, "v", "w", keep, "s")
    g, names = bld.to_graph()
    atoms = [(names[a], names[b]) for a, b in g.edges]
    loops = sorted(template.loops)
    out = set()
    for a in loops:
        for b in loops:
            pins = {"T": p, "B": q, "v": a, "w": b}
            if solve_csp(names, atoms, template, pins) is not None:
                out.add((a, b))
    return out


# --- compilation ---------------------------------------------------------------


class RecipeMismatch(ValueError):
    pass


def _check_recipe(recipe: ReductionRecipe, template: PRGraph):
    p, q = recipe.anchors
    if not (0 <= p < template.n and 0 <= q < template.n):
        raise RecipeMismatch("anchors outside the template")
    if not (template.has_loop(p) and template.has_loop(q)) or p == q:
        raise RecipeMismatch("anchors must be two distinct template loops")


def _anchor_prologue(bld: _Builder, recipe: ReductionRecipe):
    top_word = recipe.top_selector or recipe.selector
    bot_word = recipe.bottom_selector or recipe.selector
    bld.node("T", True)
    bld.node("B", True)
    top = bld.selector("T", top_word, "selT")
    bot = bld.selector("B", bot_word, "selB")
    bld.quantify(FORALL, top[0])
    bld.quantify(FORALL, bot[0])
    for name in top[1:] + bot[1:]:
        bld.quantify(EXISTS, name)


def _plain_clause(bld: _Builder, recipe: ReductionRecipe, clause, var_node, tag: str,
                  at: tuple = (1,)):
    pattern = recipe.pattern
    lits = [bld.node(f"{tag}.l{i + 1}", True) for i in range(3)]
    neg = bld.node(f"{tag}.n", True)
    for lit, x in zip(lits, clause):
        if x is not None:
            bld.edge(var_node(x), lit)
    _negation_diamond(bld, "T", "B", lits[1], neg, pattern, f"{tag}.d")
    _braced_pair(bld, neg, lits[0], lits[2], pattern, f"{tag}.v", at)
    return lits


def _paired_clause(bld: _Builder, fit: "ClauseFit", clause, pos, negs, tag: str):
    x, y, z = clause
    _braced_pair(bld, negs(y), pos(x), pos(z), fit.pattern, f"{tag}.v", fit.at)


def compile_instance(inst: QNAEInstance, recipe: ReductionRecipe, template: PRGraph,
                     require_normal: bool = True) -> PHSentence:
    """Positive Horn sentence true on ``template`` iff ``inst`` is a true QNAE instance.

    ``require_normal=False`` skips the middle-literal check; it exists only
    to show what goes wrong without it.
    """
    if require_normal and not inst.is_normal:
        raise InvalidInstance("instance is not normalized")
    _check_recipe(recipe, template)
    paired = recipe.family == "paired"
    if any(q == FORALL for q, _ in inst.prefix):
        if recipe.case == "tree-hardness":
            raise RecipeMismatch("the tree construction only handles existential instances")
        if paired:
            # the square is rigid when both anchors land on one loop, which a
            # universal variable can then contradict
            raise RecipeMismatch("the paired gadgets only handle existential instances")
    fit = fit_clause(recipe, template)
    bld = _Builder()
    keep = pruned_square(template, recipe.anchors) if paired else None
    _anchor_prologue(bld, recipe)

    def pos(x):
        return f"v[{x}]"

    def neg(x):
        return f"v'[{x}]"

    for q, x in inst.prefix:
        v = bld.node(pos(x), True)
        if q == FORALL:
            chain = bld.selector(v, recipe.selector, f"sel[{x}]")
            bld.quantify(FORALL, chain[0])
            for name in chain[1:-1]:
                bld.quantify(EXISTS, name)
        bld.quantify(EXISTS, v)
        if paired:
            bld.node(neg(x), True)
            bld.quantify(EXISTS, neg(x))
            _square_gadget(bld, template, recipe.anchors, v, neg(x), keep, f"sq[{x}]")
        else:
            bld.path("T", v, recipe.pattern, f"top[{x}]")
            bld.path(v, "B", recipe.pattern, f"bot[{x}]")

    for j, clause in enumerate(inst.clauses):
        tag = f"c{j}"
        if paired:
            _paired_clause(bld, fit, clause, pos, neg, tag)
        else:
            _plain_clause(bld, recipe, clause, pos, tag, fit.at)
    return _to_sentence(bld)


def _to_sentence(bld: _Builder) -> PHSentence:
    seen = set()
    prefix = []
    for q, name in bld.order:
        if name not in seen:
            seen.add(name)
            prefix.append((q, name))
    prefix += [(EXISTS, name) for name in bld.loops if name not in seen]
    atoms = []
    done = set()
    for a, b in bld.edges:
        key = (min(a, b), max(a, b))
        if key not in done:
            done.add(key)
            atoms.append((a, b))
    return PHSentence(tuple(prefix), tuple(atoms))


# alias matching the operation name used in the documentation
compile = compile_instance  # noqa: A001


@dataclass(frozen=True)
class ClauseFit:
    pattern: str  # word of the two braced clause paths
    at: tuple  # brace positions along them
    exact: bool  # the clause gadget admits exactly the not-all-equal patterns


def clause_gadget(recipe: ReductionRecipe, template: PRGraph,
                  fit: ClauseFit | None = None) -> GadgetGraph:
    """One clause on three fresh variables, with the anchors and literals designated."""
    _check_recipe(recipe, template)
    if fit is None:
        fit = fit_clause(recipe, template)
    bld = _Builder()
    bld.node("T", True)
    bld.node("B", True)
    if recipe.family == "paired":
        keep = pruned_square(template, recipe.anchors)
        names = {}
        for x in ("x", "y", "z"):
            names[x] = bld.node(f"v[{x}]", True)
        bld.node("v'[y]", True)
        _square_gadget(bld, template, recipe.anchors, "v[y]", "v'[y]", keep, "sq[y]")
        _paired_clause(bld, fit, ("x", "y", "z"), lambda x: f"v[{x}]",
                       lambda x: f"v'[{x}]", "c")
        lits = [names["x"], names["y"], names["z"]]
    else:
        lits = _plain_clause(bld, recipe, (None, None, None), None, "c", fit.at)
    g, order = bld.to_graph()
    pins = {"top": "T", "bottom": "B", "l1": lits[0], "l2": lits[1], "l3": lits[2]}
    return GadgetGraph(g, order, pins)


_FIT_CACHE: dict = {}


def fit_clause(recipe: ReductionRecipe, template: PRGraph) -> ClauseFit:
    """Brace positions (and, for paired gadgets, the path word) of the clause.

    The first inner vertex is tried first.  When the pattern can be laid
    along the template with slack a single brace there no longer pins the
    two paths, so later positions and then pairs are tried.  Paired gadgets
    whose pattern admits no exact bracing fall back to the plain path
    spanning the anchors.  If nothing is exact the first option is returned
    with ``exact=False``.
    """
    key = (template, recipe.pattern, tuple(recipe.anchors), recipe.family)
    if key in _FIT_CACHE:
        return _FIT_CACHE[key]
    words = [recipe.pattern]
    if recipe.family == "paired":
        p, q = sorted(recipe.anchors)
        straight = "1" + "0" * (q - p - 1) + "1"
        if straight != recipe.pattern:
            words.append(straight)
    want = nae_table()
    chosen = None
    for word in words:
        inner = range(1, len(word) - 1)
        options = [(k,) for k in inner] + [(i, j) for i in inner for j in inner if i < j]
        for at in options:
            fit = ClauseFit(word, at, True)
            if gadget_extension_check(clause_gadget(recipe, template, fit), recipe, template) == want:
                chosen = fit
                break
        if chosen:
            break
    if chosen is None:
        chosen = ClauseFit(recipe.pattern, (1,), False)
    _FIT_CACHE[key] = chosen
    return chosen


def gadget_extension_check(gadget: GadgetGraph, recipe: ReductionRecipe,
                           template: PRGraph) -> dict:
    """For each of the 8 anchor choices of the literals: does the pinning extend?"""
    p, q = recipe.anchors
    g, names = gadget.graph, gadget.names
    atoms = [(names[a], names[b]) for a, b in g.edges]
    table = {}
    for bits in product((0, 1), repeat=3):
        pins = {gadget.pins["top"]: p, gadget.pins["bottom"]: q}
        for k, bit in enumerate(bits):
            pins[gadget.pins[f"l{k + 1}"]] = p if bit else q
        table[bits] = solve_csp(names, atoms, template, pins) is not None
    return table


def selector_reach(word: str, template: PRGraph) -> list[frozenset]:
    """For each template vertex ``f``: loops the attached end may take when the far end is ``f``."""
    bld = _Builder()
    bld.node("X", True)
    far = bld.selector("X", word, "s")[0]
    g, names = bld.to_graph()
    atoms = [(names[a], names[b]) for a, b in g.edges]
    loops = sorted(template.loops)
    return [frozenset(x for x in loops
                      if solve_csp(names, atoms, template, {far: f, "X": x}) is not None)
            for f in template.vertices]


@dataclass
class AnchorReport:
    """How the two universal anchor selectors behave on a template.

    A loop pair is *faithful* when, with the anchors sent there, the
    variable gadget takes exactly the two values and the clause gadget
    admits exactly the not-all-equal patterns.  ``forces_anchors``: some
    choice of the two universal vertices leaves only faithful pairs.
    ``never_stuck``: every choice leaves a faithful pair or a single loop
    for both anchors, where an existential sentence is trivially true.
    Both together make the construction sound on existential instances;
    neither is necessary.
    """

    top: list
    bottom: list
    faithful: set
    forces_anchors: bool
    never_stuck: bool

    @property
    def sound(self) -> bool:
        return self.forces_anchors and self.never_stuck


def _variable_values(recipe: ReductionRecipe, template: PRGraph, x: int, y: int) -> set:
    paired = recipe.family == "paired"
    bld = _Builder()
    for name in ("T", "B", "v", "w"):
        bld.node(name, True)
    if paired:
        _square_gadget(bld, template, recipe.anchors, "v", "w",
                       pruned_square(template, recipe.anchors), "s")
    else:
        bld.path("T", "v", recipe.pattern, "top")
        bld.path("v", "B", recipe.pattern, "bot")
    g, names = bld.to_graph()
    atoms = [(names[a], names[b]) for a, b in g.edges]
    loops = sorted(template.loops)
    out = set()
    for v in loops:
        for w in (loops if paired else [v]):
            pins = {"T": x, "B": y, "v": v}
            if paired:
                pins["w"] = w
            if solve_csp(names, atoms, template, pins) is not None:
                out.add((v, w) if paired else v)
    return out


def faithful_pairs(recipe: ReductionRecipe, template: PRGraph) -> set:
    """Loop pairs for the anchors under which the gadgets encode NAE exactly."""
    from dataclasses import replace

    gadget = clause_gadget(recipe, template, fit_clause(recipe, template))
    want = nae_table()
    out = set()
    for x in sorted(template.loops):
        for y in sorted(template.loops):
            if x == y:
                continue
            exact = {(x, y), (y, x)} if recipe.family == "paired" else {x, y}
            if _variable_values(recipe, template, x, y) != exact:
                continue
            if gadget_extension_check(gadget, replace(recipe, anchors=(x, y)), template) == want:
                out.add((x, y))
    return out


def anchor_report(recipe: ReductionRecipe, template: PRGraph) -> AnchorReport:
    _check_recipe(recipe, template)
    top = selector_reach(recipe.top_selector or recipe.selector, template)
    bottom = selector_reach(recipe.bottom_selector or recipe.selector, template)
    faithful = faithful_pairs(recipe, template)
    fine = faithful | {(x, x) for x in template.loops}
    forces = any(a and b and {(x, y) for x in a for y in b} <= faithful
                 for a in top for b in bottom)
    never_stuck = all(any((x, y) in fine for x in a for y in b) for a in top for b in bottom)
    return AnchorReport(top, bottom, faithful, forces, never_stuck)


def nae_table() -> dict:
    return {bits: len(set(bits)) > 1 for bits in product((0, 1), repeat=3)}


def template_for(word_or_graph) -> PRGraph:
    return path_graph(word_or_graph) if isinstance(word_or_graph, str) else word_or_graph


def recipe_for_template(template: PRGraph) -> ReductionRecipe:
    """Recipe for a hard path given as a graph, or for a hard tree."""
    from .graphs import is_path, path_order, path_word

    if is_path(template):
        word = path_word(template, path_order(template))
        r = choose_recipe(word)
        if path_graph(word) != template:
            order = path_order(template)
            r.anchors = tuple(order[x] for x in r.anchors)
        return r
    return tree_recipe(template)


__all__ = [
    "QNAEInstance", "InvalidInstance", "normalize", "parse_qnae", "format_qnae",
    "ReductionRecipe", "choose_recipe", "tree_recipe", "compile_instance",
    "clause_gadget", "gadget_extension_check", "fit_clause", "ClauseFit", "anchor_report", "AnchorReport", "selector_reach", "faithful_pairs", "nae_table", "GadgetGraph",
    "RecipeMismatch", "NotHard", "INF", "decompose",
]
