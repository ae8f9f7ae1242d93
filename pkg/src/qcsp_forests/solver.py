"""Brute-force model checking of positive Horn sentences on finite graphs.

This is the reference oracle for the rest of the package, so every speed-up
here is optional and switchable through :class:`EvalConfig`; all settings
must give the same verdict.

Search
    Variables are taken in prefix order.  ``forall`` tries every vertex,
    ``exists`` looks for one witness.  Consecutive existentials after the
    last universal form a plain CSP and are solved with dynamic
    (smallest-domain-first) ordering.

Propagation (``"arc"``)
    Domains are bitmasks.  Assigning a variable filters its neighbours and
    then arc consistency runs over the unassigned variables.  A universal
    variable's domain is never narrowed: losing any value there means a
    losing move exists for the universal player, so the branch is false.

Memoisation
    Keyed on ``(prefix position, values of assigned variables that share an
    atom with an unassigned one)``; nothing else can influence the rest of
    the game.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from .graphs import PRGraph
from .logic import FORALL, PHSentence

PROPAGATION_MODES = ("none", "arc")


class ResourceExhausted(RuntimeError):
    """The node limit was hit before a verdict was reached."""


@dataclass(frozen=True)
class EvalConfig:
    propagation: str = "arc"
    memoize: bool = True
    node_limit: int | None = None
    parallel: bool = False
    threads: int = 4

    def __post_init__(self):
        if self.propagation not in PROPAGATION_MODES:
            raise ValueError(f"propagation must be one of {PROPAGATION_MODES}")


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


class _Problem:
    """Variables renumbered 0..k-1 in prefix order, with adjacency lists."""

    def __init__(self, nvars: int, atoms: Sequence[tuple[int, int]], template: PRGraph):
        self.k = nvars
        self.template = template
        self.full = (1 << template.n) - 1
        self.nmask = [template.neighbour_mask(x) for x in range(template.n)]
        self.loopmask = sum(1 << v for v in template.loops)
        self.self_loop = [False] * nvars
        nbrs = [set() for _ in range(nvars)]
        for a, b in atoms:
            if a == b:
                self.self_loop[a] = True
            else:
                nbrs[a].add(b)
                nbrs[b].add(a)
        self.nbrs = [sorted(s) for s in nbrs]
        # support(mask) is called a lot; cache per mask
        self._support_cache: dict[int, int] = {}

    def support(self, mask: int) -> int:
        out = self._support_cache.get(mask)
        if out is None:
            out = 0
            for x in _bits(mask):
                out |= self.nmask[x]
            self._support_cache[mask] = out
        return out

    def initial_domains(self) -> list[int]:
        return [self.loopmask if self.self_loop[v] else self.full for v in range(self.k)]


class _Counter:
    def __init__(self, limit: int | None, locked: bool):
        self.limit = limit
        self.count = 0
        self._lock = threading.Lock() if locked else None

    def tick(self):
        if self._lock is not None:
            with self._lock:
                self.count += 1
                c = self.count
        else:
            self.count += 1
            c = self.count
        if self.limit is not None and c > self.limit:
            raise ResourceExhausted(f"node limit {self.limit} exceeded")


def _arc_consistency(p: _Problem, doms: list[int], assigned: Sequence[bool],
                     protected: Sequence[bool], queue: list[int]) -> bool:
    """AC-3 over unassigned variables; False on wipe-out or a protected loss."""
    pending = set(queue)
    work = list(queue)
    while work:
        w = work.pop()
        pending.discard(w)
        sup = p.support(doms[w])
        for u in p.nbrs[w]:
            if assigned[u]:
                continue
            nd = doms[u] & sup
            if nd != doms[u]:
                if not nd or protected[u]:
                    return False
                doms[u] = nd
                if u not in pending:
                    pending.add(u)
                    work.append(u)
    return True


class _CspSolver:
    """Existential search with MAC and smallest-domain-first ordering."""

    def __init__(self, p: _Problem, propagate: bool, counter: _Counter):
        self.p = p
        self.propagate = propagate
        self.counter = counter

    def solve(self, doms: list[int], assign: list[int], free: Sequence[int]) -> bool:
        """Extend ``assign`` over ``free`` (all existential) or report failure.

        ``doms`` must already be consistent with ``assign``.  On success the
        solution is written into ``assign``.
        """
        free = [v for v in free if assign[v] < 0]
        return self._rec(list(doms), assign, free)

    def _rec(self, doms, assign, free) -> bool:
        self.counter.tick()
        p = self.p
        best, best_size = -1, 1 << 30
        for v in free:
            if assign[v] < 0:
                if self.propagate:
                    size = _popcount(doms[v])
                else:
                    size = len(free)  # static order without propagation
                if size < best_size:
                    best, best_size = v, size
                    if not self.propagate:
                        break
        if best < 0:
            return True
        v = best
        for a in _bits(doms[v]):
            if not self._consistent(v, a, assign, doms):
                continue
            assign[v] = a
            if self.propagate:
                new = list(doms)
                new[v] = 1 << a
                ok = True
                for w in p.nbrs[v]:
                    if assign[w] < 0:
                        new[w] &= p.nmask[a]
                        if not new[w]:
                            ok = False
                            break
                if ok:
                    assigned = [x >= 0 for x in assign]
                    protected = [False] * p.k
                    ok = _arc_consistency(p, new, assigned, protected,
                                          [w for w in p.nbrs[v] if assign[w] < 0])
                if ok and self._rec(new, assign, free):
                    return True
            elif self._rec(doms, assign, free):
                return True
            assign[v] = -1
        return False

    def _consistent(self, v, a, assign, doms) -> bool:
        p = self.p
        if p.self_loop[v] and not (p.loopmask >> a) & 1:
            return False
        na = p.nmask[a]
        for w in p.nbrs[v]:
            if assign[w] >= 0 and not (na >> assign[w]) & 1:
                return False
        return True


class _Evaluator:
    def __init__(self, sentence: PHSentence, template: PRGraph, cfg: EvalConfig):
        if not sentence.is_closed:
            raise ValueError("sentence has free variables")
        if template.n == 0:
            raise ValueError("template must be nonempty")
        self.cfg = cfg
        names = sentence.variables
        index = {v: i for i, v in enumerate(names)}
        self.quant = [q for q, _ in sentence.prefix]
        self.k = len(names)
        atoms = [(index[a], index[b]) for a, b in sentence.atoms]
        self.p = _Problem(self.k, atoms, template)
        self.propagate = cfg.propagation == "arc"
        self.counter = _Counter(cfg.node_limit, cfg.parallel)
        self.csp = _CspSolver(self.p, self.propagate, self.counter)
        self.universal = [q == FORALL for q in self.quant]
        last_forall = max((i for i, q in enumerate(self.quant) if q == FORALL), default=-1)
        self.tail_start = last_forall + 1
        # frontier[pos]: variables before pos that touch a variable >= pos
        self.frontier = []
        for pos in range(self.k + 1):
            self.frontier.append(tuple(
                v for v in range(pos)
                if any(w >= pos for w in self.p.nbrs[v])
            ))
        self.memo: dict = {}
        self._memo_lock = threading.Lock()
        self._parallel_used = False

    def run(self) -> bool:
        p = self.p
        doms = p.initial_domains()
        for v in range(self.k):
            if self.universal[v] and doms[v] != p.full:
                return False
        assign = [-1] * self.k
        if self.propagate:
            ok = _arc_consistency(p, doms, [False] * self.k, self.universal,
                                  list(range(self.k)))
            if not ok or any(d == 0 for d in doms):
                return False
        return self._rec(0, assign, doms)

    def _key(self, pos, assign):
        return (pos, tuple(assign[v] for v in self.frontier[pos]))

    def _rec(self, pos, assign, doms) -> bool:
        self.counter.tick()
        if pos >= self.tail_start:
            key = self._key(pos, assign) if self.cfg.memoize else None
            if key is not None and key in self.memo:
                return self.memo[key]
            local = list(assign)
            res = self.csp.solve(doms, local, range(pos, self.k))
            if key is not None:
                self.memo[key] = res
            return res
        key = self._key(pos, assign) if self.cfg.memoize else None
        if key is not None:
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        if self.universal[pos]:
            if self.cfg.parallel and not self._parallel_used:
                self._parallel_used = True
                res = self._forall_parallel(pos, assign, doms)
            else:
                res = all(self._branch(pos, a, assign, doms) for a in range(self.p.template.n))
        else:
            res = any(self._branch(pos, a, assign, doms) for a in _bits(doms[pos]))
        if key is not None:
            with self._memo_lock:
                self.memo[key] = res
        return res

    def _forall_parallel(self, pos, assign, doms) -> bool:
        values = range(self.p.template.n)
        with ThreadPoolExecutor(max_workers=self.cfg.threads) as pool:
            results = list(pool.map(
                lambda a: self._branch(pos, a, list(assign), doms), values
            ))
        return all(results)

    def _branch(self, pos, a, assign, doms) -> bool:
        p = self.p
        if not self.csp._consistent(pos, a, assign, doms):
            return False
        if self.propagate:
            if not (doms[pos] >> a) & 1:
                return False
            new = list(doms)
            new[pos] = 1 << a
            for w in p.nbrs[pos]:
                if assign[w] < 0 and w != pos:
                    nd = new[w] & p.nmask[a]
                    if not nd or (self.universal[w] and nd != new[w]):
                        return False
                    new[w] = nd
            assigned = [x >= 0 for x in assign]
            assigned[pos] = True
            if not _arc_consistency(p, new, assigned, self.universal,
                                    [w for w in p.nbrs[pos] if assign[w] < 0]):
                return False
        else:
            new = doms
        assign[pos] = a
        try:
            return self._rec(pos + 1, assign, new)
        finally:
            assign[pos] = -1


def evaluate(sentence: PHSentence, template: PRGraph, cfg: EvalConfig | None = None) -> bool:
    """Does ``template`` satisfy ``sentence``?

    Raises :class:`ResourceExhausted` when ``cfg.node_limit`` is exceeded;
    that outcome is never reported as ``False``.
    """
    return _Evaluator(sentence, template, cfg or EvalConfig()).run()


# longer alias; ``eval`` would shadow the builtin
eval_sentence = evaluate


def solve_csp(
    variables: Sequence,
    atoms: Sequence[tuple],
    template: PRGraph,
    pins: Mapping | None = None,
    cfg: EvalConfig | None = None,
) -> dict | None:
    """Homomorphism from the atom graph to ``template`` extending ``pins``.

    Returns the full assignment, or ``None`` when no extension exists.
    """
    cfg = cfg or EvalConfig()
    pins = dict(pins or {})
    index = {v: i for i, v in enumerate(variables)}
    for v, val in pins.items():
        if v not in index:
            raise KeyError(f"pinned variable {v!r} does not occur")
        if not 0 <= val < template.n:
            raise ValueError(f"constant {val} outside the template")
    for a, b in atoms:
        if a not in index or b not in index:
            raise KeyError(f"atom ({a}, {b}) uses an undeclared variable")
    p = _Problem(len(variables), [(index[a], index[b]) for a, b in atoms], template)
    doms = p.initial_domains()
    for v, val in pins.items():
        doms[index[v]] &= 1 << val
    if any(d == 0 for d in doms):
        return None
    counter = _Counter(cfg.node_limit, False)
    propagate = cfg.propagation == "arc"
    assign = [-1] * p.k
    # pinned values go in first so the non-propagating search also sees them
    for v, val in pins.items():
        i = index[v]
        if not _CspSolver(p, False, counter)._consistent(i, val, assign, doms):
            return None
        assign[i] = val
    if propagate:
        queue = list(range(p.k))
        for i in range(p.k):
            if assign[i] >= 0:
                for w in p.nbrs[i]:
                    if assign[w] < 0:
                        doms[w] &= p.nmask[assign[i]]
        if any(d == 0 for d in doms):
            return None
        if not _arc_consistency(p, doms, [x >= 0 for x in assign], [False] * p.k, queue):
            return None
    ok = _CspSolver(p, propagate, counter).solve(doms, assign, range(p.k))
    if not ok:
        return None
    return {v: assign[i] for v, i in index.items()}


def eval_csp(atoms, constants: Mapping, template: PRGraph,
             cfg: EvalConfig | None = None) -> bool:
    """Does the partial assignment ``constants`` extend to a homomorphism?"""
    variables = []
    seen = set()
    for a, b in atoms:
        for v in (a, b):
            if v not in seen:
                seen.add(v)
                variables.append(v)
    for v in constants:
        if v not in seen:
            seen.add(v)
            variables.append(v)
    return solve_csp(variables, atoms, template, constants, cfg) is not None
