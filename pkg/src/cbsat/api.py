"""User-facing reasoning procedures built on the saturation engine.

A subsumption check creates an empty context structure, introduces one
query context whose core is the query body (its order keeps concept
atoms over x pairwise incomparable, so the completeness side conditions
hold for every single-concept right-hand side at once), saturates, and
tests whether the query clause is contained up to redundancy in the
query context.  Classification initialises one query context per atomic
concept and shares a single saturation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from . import terms as T
from .terms import X, clause
from .engine import Saturator, make_strategy
from .ontology import Ontology, parse
from .structure import ContextStructure, ResourceCapError

ENTAILED = "entailed"
NOT_ENTAILED = "not-entailed"


class ResourceExhausted(Exception):
    """A saturation hit its clause or nominal cap; the verdict is unknown."""


@dataclass(frozen=True)
class Query:
    """Gamma_Q -> Delta_Q over atomic concepts; empty Delta_Q means bottom."""

    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __post_init__(self):
        if not self.lhs:
            raise ValueError("queries need at least one left-hand concept")

    def render(self) -> str:
        left = " ^ ".join(self.lhs)
        right = " v ".join(self.rhs) if self.rhs else "bot"
        return f"{left} <= {right}"

    @classmethod
    def parse(cls, text: str) -> "Query":
        if "<=" not in text:
            raise ValueError(f"queries look like 'B <= C', got {text!r}")
        left, right = text.split("<=", 1)
        lhs = tuple(s.strip() for s in left.split("^") if s.strip())
        right = right.strip()
        rhs = () if right in ("bot", "") else tuple(
            s.strip() for s in right.split("v") if s.strip())
        return cls(lhs, rhs)


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: Optional[int] = None   # id of the subsuming stored clause

    @property
    def entailed(self) -> bool:
        return self.status == ENTAILED


def _query_clause(q: Query):
    return clause([T.papp(b, X) for b in q.lhs],
                  [T.atom(T.papp(c, X)) for c in q.rhs])


def _find_witness(ctx, qc) -> Optional[int]:
    bs, hs = set(qc.body), set(qc.head)
    for cid, d in ctx.clauses.items():
        if set(d.body) <= bs and set(d.head) <= hs:
            return cid
    return None


def _saturated_structure(onto: Ontology, cores: list, strategy_name: str,
                         max_clauses: int, max_nominals: int):
    structure = ContextStructure(onto, max_clauses=max_clauses,
                                 max_nominals=max_nominals)
    sat = Saturator(structure, make_strategy(strategy_name, onto))
    contexts = [sat.init_query_context(core) for core in cores]
    try:
        sat.run()
    except ResourceCapError as e:
        raise ResourceExhausted(str(e)) from e
    return structure, contexts


def check_subsumption(onto: Ontology, q: Query, strategy: str = "eager",
                      max_clauses: int = 10 ** 6,
                      max_nominals: int = 1000) -> Verdict:
    """Decide whether the ontology entails the query clause."""
    core = [T.papp(b, X) for b in q.lhs]
    structure, (ctx,) = _saturated_structure(
        onto, [core], strategy, max_clauses, max_nominals)
    qc = _query_clause(q)
    wit = _find_witness(ctx, qc)
    if wit is not None or ctx.contains_up_to_redundancy(qc):
        return Verdict(ENTAILED, wit)
    return Verdict(NOT_ENTAILED)


def check_satisfiability(onto: Ontology, concept: str,
                         strategy: str = "eager",
                         max_clauses: int = 10 ** 6,
                         max_nominals: int = 1000) -> str:
    v = check_subsumption(onto, Query((concept,), ()), strategy,
                          max_clauses, max_nominals)
    return "unsatisfiable" if v.entailed else "satisfiable"


def classify(onto: Ontology, strategy: str = "eager",
             max_clauses: int = 10 ** 6, max_nominals: int = 1000,
             ) -> tuple[set[tuple[str, str]], set[str]]:
    """All entailed subsumptions (B, C) plus the unsatisfiable concepts.

    One query context per atomic concept, one shared saturation; (B, C)
    is reported iff B(x) -> C(x) is contained up to redundancy in B's
    context, and reflexive pairs are always included.
    """
    concepts = list(onto.symbols.concepts)
    cores = [[T.papp(b, X)] for b in concepts]
    structure, contexts = _saturated_structure(
        onto, cores, strategy, max_clauses, max_nominals)
    pairs: set[tuple[str, str]] = set()
    unsat: set[str] = set()
    for b, ctx in zip(concepts, contexts):
        if ctx.contains_up_to_redundancy(clause([T.papp(b, X)], [])):
            unsat.add(b)
        for c in concepts:
            qc = clause([T.papp(b, X)], [T.atom(T.papp(c, X))])
            if ctx.contains_up_to_redundancy(qc):
                pairs.add((b, c))
    return pairs, unsat


def load_ontology(path: str) -> Ontology:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())
