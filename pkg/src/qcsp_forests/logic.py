"""Prenex positive Horn sentences over one symmetric binary relation ``E``.

Text format, one entry per line (``#`` starts a comment)::

    A x
    E y
    edge x y

Quantifier lines must precede the atom lines.  For one-liners, ``/`` may be
used instead of a newline: ``"A x / E y / edge x y"``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .graphs import FormatError

FORALL = "A"
EXISTS = "E"


@dataclass(frozen=True)
class PHSentence:
    """Quantifier prefix plus a conjunction of atoms ``E(x, y)``.

    ``free`` lists variables left unquantified on purpose (open formulas
    built during compilation); a sentence proper has ``free == ()``.
    """

    prefix: tuple
    atoms: tuple
    free: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple((q, v) for q, v in self.prefix))
        object.__setattr__(self, "atoms", tuple((a, b) for a, b in self.atoms))
        object.__setattr__(self, "free", tuple(self.free))
        seen = set(self.free)
        for q, v in self.prefix:
            if q not in (FORALL, EXISTS):
                raise FormatError(f"unknown quantifier {q!r}")
            if v in seen:
                raise FormatError(f"duplicate variable {v}")
            seen.add(v)
        for a, b in self.atoms:
            for v in (a, b):
                if v not in seen:
                    raise FormatError(f"unbound variable {v}")

    @property
    def variables(self) -> list:
        return [v for _, v in self.prefix]

    @property
    def is_closed(self) -> bool:
        return not self.free

    @property
    def universals(self) -> list:
        return [v for q, v in self.prefix if q == FORALL]

    def close(self, outer: list) -> "PHSentence":
        """Quantify the free variables, ``outer`` being prepended to the prefix."""
        names = {v for _, v in outer}
        if names != set(self.free):
            raise ValueError("outer block must quantify exactly the free variables")
        return PHSentence(tuple(outer) + self.prefix, self.atoms)


def parse_sentence(text: str) -> PHSentence:
    prefix, atoms = [], []
    declared = set()
    lines = text.replace("/", "\n").splitlines()
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head in (FORALL, EXISTS):
            if len(parts) != 2:
                raise FormatError(f"quantifier line needs one name: {line!r}")
            if atoms:
                raise FormatError(f"quantifier after atoms: {line!r}")
            name = parts[1]
            if name in declared:
                raise FormatError(f"duplicate variable {name}")
            declared.add(name)
            prefix.append((head, name))
        elif head == "edge":
            if len(parts) != 3:
                raise FormatError(f"edge line needs two names: {line!r}")
            for name in parts[1:]:
                if name not in declared:
                    raise FormatError(f"unbound variable {name}")
            atoms.append((parts[1], parts[2]))
        else:
            raise FormatError(f"unrecognised line {line!r}")
    if atoms and not prefix:
        raise FormatError("atoms without a quantifier prefix")
    return PHSentence(tuple(prefix), tuple(atoms))


def print_sentence(s: PHSentence) -> str:
    if s.free:
        raise ValueError("only closed sentences have a text form")
    lines = [f"{q} {v}" for q, v in s.prefix]
    lines += [f"edge {a} {b}" for a, b in s.atoms]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SentenceSampler:
    """Seeded, bounded source of random closed sentences."""

    seed: int = 0
    max_vars: int = 6
    max_universals: int = 2
    max_atoms: int = 8
    disconnect_prob: float = 0.1

    def __post_init__(self):
        if min(self.max_vars, self.max_atoms) < 1 or self.max_universals < 0:
            raise ValueError("sampler bounds must be positive")


def sample_sentence(s: SentenceSampler, index: int) -> PHSentence:
    """The ``index``-th sentence of the stream defined by ``s``.

    String seeding keeps the stream identical across processes and Python
    versions (``random`` hashes ``str`` seeds with SHA-512).
    """
    rng = random.Random(f"{s.seed}:{index}")
    k = rng.randint(1, s.max_vars)
    names = [f"x{i}" for i in range(k)]
    n_univ = rng.randint(0, min(s.max_universals, k))
    univ = set(rng.sample(range(k), n_univ))
    prefix = tuple((FORALL if i in univ else EXISTS, names[i]) for i in range(k))

    n_atoms = rng.randint(1, s.max_atoms)
    atoms = []
    if k > 1 and rng.random() >= s.disconnect_prob:
        order = list(range(k))
        rng.shuffle(order)
        for pos in range(1, k):
            if len(atoms) == n_atoms:
                break
            other = order[rng.randrange(pos)]
            pair = [names[order[pos]], names[other]]
            rng.shuffle(pair)
            atoms.append(tuple(pair))
    while len(atoms) < n_atoms:
        a, b = rng.randrange(k), rng.randrange(k)
        atoms.append((names[a], names[b]))
    return PHSentence(prefix, tuple(atoms))
