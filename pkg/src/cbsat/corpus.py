"""Seeded random ontology corpora for differential and invariant testing.

Instances stay tiny on purpose: at most 4 concepts, 2 roles, 2
individuals, 6 axioms, cardinalities at most 2, so the bounded-model
oracle enumerates them in well under a second.  Generation is a pure
function of the seed and profile, so fixtures only change when the seed
list does.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .ontology import Ontology, parse

CONCEPTS = ["A", "B", "C", "D"]
ROLES = ["R", "S"]
INDIVIDUALS = ["o", "p"]

PROFILES = ("alchoiq", "alchiq", "alchoi", "alchoq", "horn", "elho")


@dataclass
class CorpusItem:
    seed: int
    profile: str
    text: str
    queries: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ontology(self) -> Ontology:
        return parse(self.text)

    def to_json(self) -> dict:
        return {"seed": self.seed, "profile": self.profile, "text": self.text,
                "queries": self.queries}

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusItem":
        return cls(obj["seed"], obj["profile"], obj["text"],
                   [tuple(q) for q in obj["queries"]])


def _dl1(rng: random.Random, horn: bool) -> str:
    n = rng.randint(1, 2)
    lhs = rng.sample(CONCEPTS, n)
    m = rng.randint(0, 1) if horn else rng.randint(0, 2)
    rhs = rng.sample(CONCEPTS, m)
    left = " ^ ".join(lhs) if lhs else "top"
    right = " v ".join(rhs) if rhs else "bot"
    return f"{left} -> {right}"


def _axiom(rng: random.Random, profile: str) -> str:
    kinds = {
        "alchoiq": ["dl1", "dl2", "dl3", "dl4", "dl5", "dl6", "dl7", "dl8"],
        "alchiq": ["dl1", "dl2", "dl3", "dl4", "dl5", "dl6"],
        "alchoi": ["dl1", "dl2n1", "dl3", "dl5", "dl6", "dl7", "dl8"],
        "alchoq": ["dl1", "dl2", "dl3", "dl4", "dl5", "dl7", "dl8"],
        "horn": ["dl1", "dl2", "dl3", "dl4n1", "dl5", "dl6", "dl7", "dl8"],
        "elho": ["dl1", "dl2n1", "dl3", "dl5", "dl7", "dl8"],
    }[profile]
    horn = profile in ("horn", "elho")
    kind = rng.choice(kinds)
    b1, b2 = rng.choice(CONCEPTS), rng.choice(CONCEPTS)
    r1, r2 = rng.choice(ROLES), rng.choice(ROLES)
    o = rng.choice(INDIVIDUALS)
    if kind == "dl1":
        return _dl1(rng, horn)
    if kind == "dl2":
        return f"{b1} -> >= {rng.randint(1, 2)} {r1} . {b2}"
    if kind == "dl2n1":
        return f"{b1} -> >= 1 {r1} . {b2}"
    if kind == "dl3":
        return f"exists {r1} . {b1} -> {b2}"
    if kind == "dl4":
        return f"{b1} -> <= {rng.randint(1, 2)} {r1} . {b2}"
    if kind == "dl4n1":
        return f"{b1} -> <= 1 {r1} . {b2}"
    if kind == "dl5":
        return f"{r1} -> {r2}"
    if kind == "dl6":
        return f"{r1} -> inv({r2})"
    if kind == "dl7":
        return f"{{{o}}} -> {b1}"
    if kind == "dl8":
        return f"{b1} -> {{{o}}}"
    raise ValueError(kind)


def generate(seed: int, profile: str = "alchoiq", n_queries: int = 3,
             ) -> CorpusItem:
    """One random instance; a pure function of (seed, profile)."""
    rng = random.Random((seed, profile).__repr__())
    lines = []
    seen = set()
    for _ in range(rng.randint(3, 6)):
        ax = _axiom(rng, profile)
        if ax not in seen:
            seen.add(ax)
            lines.append(ax)
    # role lines like "R -> S" need the names to be known as roles; make
    # sure at least one axiom mentions each role in an unambiguous spot
    used_roles = {w for line in lines for w in line.split()
                  if w in ROLES and any(
                      k in line for k in (">=", "<=", "exists", "inv"))}
    fixed = []
    for line in lines:
        parts = line.split(" -> ")
        if len(parts) == 2 and parts[0] in ROLES and parts[1] in ROLES:
            if parts[0] not in used_roles and parts[1] not in used_roles:
                fixed.append(f"exists {parts[0]} . {CONCEPTS[0]} "
                             f"-> {CONCEPTS[1]}")
                used_roles.add(parts[0])
        fixed.append(line)
    queries = []
    for _ in range(n_queries):
        queries.append((rng.choice(CONCEPTS), rng.choice(CONCEPTS)))
    return CorpusItem(seed, profile, "\n".join(fixed) + "\n",
                      sorted(set(queries)))


def generate_many(seeds, profile: str) -> list[CorpusItem]:
    return [generate(s, profile) for s in seeds]


def save_corpus(items: list[CorpusItem], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([i.to_json() for i in items], fh, indent=1)


def load_corpus(path: str) -> list[CorpusItem]:
    with open(path, "r", encoding="utf-8") as fh:
        return [CorpusItem.from_json(o) for o in json.load(fh)]


def subsumption_chain(n: int) -> str:
    """B_1 <= B_2 <= ... <= B_n, the growth-check family."""
    return "\n".join(f"X{i} -> X{i + 1}" for i in range(1, n)) + "\n"
