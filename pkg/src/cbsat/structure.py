"""Saturation state: contexts, cores, edges, clause stores, nominal registry.

Clause stores apply redundancy elimination eagerly: a clause is rejected
when the store already contains it up to redundancy, and inserting a
clause removes every stored clause that the insertion makes redundant.
Every store mutation appends one trace event, which is what the
determinism and golden tests compare.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import terms as T
from .terms import Clause, Literal, Term, TRUE, X, Y
from .ontology import Ontology
from .ordering import (
    ContextOrder, GlobalPrecedence, QUERY, ROOT, STANDARD, TriggerShapes,
    build_precedence,
)


class ResourceCapError(Exception):
    """A clause or nominal budget was exceeded; the run aborts cleanly."""


@dataclass(frozen=True)
class TriggerSets:
    su: frozenset[Term]
    pr: frozenset[Literal]
    suR: frozenset[Term]
    prR: frozenset[Literal]


_SWAP = {X: Y, Y: X}


def compute_triggers(onto: Ontology, registry: "NominalRegistry") -> TriggerSets:
    """Materialise Su/Pr/Su^r/Pr^r for the registered individuals.

    Su holds the atom shapes a successor context can receive, expressed in
    the successor's own frame: a body atom B(x) admits B(x), S(x,z_i)
    admits S(x,y) and S(z_i,x) admits S(y,x).
    """
    su: set[Term] = set()
    for c in onto.dl_clauses:
        for a in c.body:
            if len(a.args) == 1:
                su.add(T.papp(a.sym, X))
            else:
                s, t = a.args
                if s is X and T.z_index(t):
                    su.add(T.papp(a.sym, X, Y))
                elif T.z_index(s) and t is X:
                    su.add(T.papp(a.sym, Y, X))
    concepts = list(onto.symbols.concepts)
    roles = list(onto.symbols.roles)
    inds = registry.all_terms()
    pr: set[Literal] = {T.atom(T.apply_substitution(a, _SWAP)) for a in su}
    pr |= {T.atom(T.papp(b, Y)) for b in concepts}
    pr.add(T.eq(X, Y))
    pr |= {T.eq(X, o) for o in inds}
    pr |= {T.eq(Y, o) for o in inds}
    suR: set[Term] = set()
    for o in inds:
        suR |= {T.papp(b, o) for b in concepts}
        suR |= {T.papp(s, Y, o) for s in roles}
        suR |= {T.papp(s, o, Y) for s in roles}
    prR: set[Literal] = {T.atom(a) for a in suR}
    prR |= {T.atom(T.papp(b, Y)) for b in concepts}
    prR |= {T.eq(Y, o) for o in inds}
    return TriggerSets(frozenset(su), frozenset(pr), frozenset(suR),
                       frozenset(prR))


class NominalRegistry:
    """Lazily minted labelled individuals o_rho, prefix-closed."""

    def __init__(self, symbols, precedence: GlobalPrecedence,
                 max_nominals: int = 1000):
        self.precedence = precedence
        self.max_nominals = max_nominals
        self._terms: dict[str, Term] = {}
        self.minted_count = 0
        self.version = 0
        for name in symbols.individuals:
            self._terms[name] = T.indiv(name)

    def all_terms(self) -> list[Term]:
        return sorted(self._terms.values(), key=lambda t: t.key)

    def minted_terms(self) -> list[Term]:
        return [t for t in self.all_terms() if t.label]

    def registered(self, t: Term) -> bool:
        return t.sym in self._terms

    def mint(self, base: Term, role: str, index: int) -> Term:
        """Return o_{rho . role^index}; idempotent for repeated triples."""
        if not self.registered(base):
            raise ValueError(f"base individual {base} is not registered")
        child = T.indiv(base.base, base.label + ((role, index),))
        if child.sym in self._terms:
            return child
        if self.minted_count + 1 > self.max_nominals:
            raise ResourceCapError(
                f"nominal budget exceeded ({self.max_nominals})")
        self._terms[child.sym] = child
        self.minted_count += 1
        self.version += 1
        self.precedence.register_individual(child)
        return child


@dataclass
class TraceEvent:
    seq: int
    rule: str
    ctx: str
    premises: tuple[str, ...]
    conclusion: str
    action: str = "add"   # "add" or "elim" (rule == "Elim")

    def render(self) -> str:
        prem = ",".join(self.premises)
        return (f"{self.seq} | {self.rule} | {self.ctx} | "
                f"premises=[{prem}] | conclusion={self.conclusion}")


def _tautology(c: Clause) -> bool:
    for l in c.head:
        if l.pos and l.left is l.right:
            return True
        if l.pos and not T.is_pterm(l.left):
            if T.lit(False, l.left, l.right) in c.head:
                return True
    return False


def contains_up_to_redundancy(stored: Iterable[Clause], c: Clause) -> bool:
    """Def.-3 containment: tautology, or some stored clause subsumes c."""
    if _tautology(c):
        return True
    bs, hs = set(c.body), set(c.head)
    for d in stored:
        if len(d.body) <= len(bs) and len(d.head) <= len(hs):
            if set(d.body) <= bs and set(d.head) <= hs:
                return True
    return False


class Context:
    def __init__(self, name: str, core: tuple[Term, ...], order: ContextOrder,
                 is_root: bool = False):
        self.name = name
        self.core = core
        self.order = order
        self.is_root = is_root
        self.clauses: dict[int, Clause] = {}   # id -> clause, insertion order
        self._exact: dict[Clause, int] = {}

    def stored(self) -> list[Clause]:
        return list(self.clauses.values())

    def has_exact(self, c: Clause) -> bool:
        return c in self._exact

    def contains_up_to_redundancy(self, c: Clause) -> bool:
        return contains_up_to_redundancy(self.clauses.values(), c)

    def eligible_literals(self, c: Clause) -> list[Literal]:
        return self.order.eligible_literals(c)

    def __repr__(self) -> str:
        return f"Context({self.name}, |S|={len(self.clauses)})"


ADDED = "added"
REJECTED = "rejected-redundant"


class ContextStructure:
    """The graph of contexts plus all bookkeeping for one saturation run."""

    def __init__(self, onto: Ontology, max_clauses: int = 10 ** 6,
                 max_nominals: int = 1000):
        self.onto = onto
        self.precedence = build_precedence(onto.symbols)
        self.shapes = TriggerShapes.of(onto.dl_clauses)
        self.registry = NominalRegistry(onto.symbols, self.precedence,
                                        max_nominals)
        self.max_clauses = max_clauses
        self.contexts: dict[str, Context] = {}
        # (u, v, f, obind): function-labelled edges; obind records which
        # individual o instantiated f(o) when the source is the root
        self.edges: list[tuple[str, str, str, str]] = []
        self._edge_set: set[tuple[str, str, str, str]] = set()
        self.root_edges: list[tuple[str, str]] = []      # (u, individual name)
        self._root_edge_set: set[tuple[str, str]] = set()
        self.trace: list[TraceEvent] = []
        self.added_count = 0
        self._next_clause_id = 1
        self.clause_ctx: dict[int, str] = {}
        self.root = self.create_context("v_r", (), ROOT, is_root=True)

    # -- contexts ------------------------------------------------------------

    def order_for(self, mode: str) -> ContextOrder:
        return ContextOrder(self.precedence, self.shapes, mode)

    def create_context(self, name: str, core: tuple[Term, ...], mode: str,
                       is_root: bool = False) -> Context:
        if name in self.contexts:
            raise ValueError(f"duplicate context name {name}")
        ctx = Context(name, core, self.order_for(mode), is_root)
        self.contexts[name] = ctx
        return ctx

    def init_query_context(self, gamma_q: Iterable[Term]) -> Context:
        """Fresh context with core Gamma_Q and a C2-safe query order."""
        core = tuple(sorted(set(gamma_q), key=lambda a: a.key))
        for a in core:
            if not (a.kind == T.PAPP and len(a.args) == 1 and a.args[0] is X):
                raise ValueError(f"query cores only contain B(x) atoms: {a}")
        n = sum(1 for c in self.contexts.values() if c.name.startswith("q"))
        name = f"q{n}[{','.join(T.render_term(a) for a in core)}]"
        return self.create_context(name, core, QUERY)

    # -- edges ---------------------------------------------------------------

    def add_edge(self, u: str, v: str, f: str, obind: str = "") -> bool:
        e = (u, v, f, obind)
        if e in self._edge_set:
            return False
        self._edge_set.add(e)
        self.edges.append(e)
        return True

    def add_root_edge(self, u: str, o: Term) -> bool:
        e = (u, o.sym)
        if e in self._root_edge_set:
            return False
        self._root_edge_set.add(e)
        self.root_edges.append(e)
        return True

    def out_edges(self, u: str) -> list[tuple[str, str, str, str]]:
        return [e for e in self.edges if e[0] == u]

    def in_edges(self, v: str) -> list[tuple[str, str, str, str]]:
        return [e for e in self.edges if e[1] == v]

    def root_edges_from(self, u: str) -> list[str]:
        return [o for (u2, o) in self.root_edges if u2 == u]

    def root_edge_sources(self, o: Term) -> list[str]:
        return [u for (u, o2) in self.root_edges if o2 == o.sym]

    # -- clause store mutation -------------------------------------------------

    def add_clause(self, ctx: Context, c: Clause, rule: str,
                   premises: tuple[str, ...] = ()) -> tuple[str, Optional[int]]:
        """Insert up to redundancy, applying Elim eagerly; trace the firing."""
        if ctx.contains_up_to_redundancy(c):
            return REJECTED, None
        kind = T.classify_clause(c, ctx.is_root)
        if kind.startswith("invalid"):
            raise ValueError(f"{rule} produced a non-context clause for "
                             f"{ctx.name}: {c} [{kind}]")
        self.added_count += 1
        if self.added_count > self.max_clauses:
            raise ResourceCapError(f"clause budget exceeded ({self.max_clauses})")
        cid = self._next_clause_id
        self._next_clause_id += 1
        bs, hs = set(c.body), set(c.head)
        for did, d in list(ctx.clauses.items()):
            if bs <= set(d.body) and hs <= set(d.head):
                del ctx.clauses[did]
                ctx._exact.pop(d, None)
                self.trace.append(TraceEvent(
                    len(self.trace) + 1, "Elim", ctx.name, (f"c{cid}",),
                    d.text, action="elim"))
        ctx.clauses[cid] = c
        ctx._exact[c] = cid
        self.clause_ctx[cid] = ctx.name
        self.trace.append(TraceEvent(
            len(self.trace) + 1, rule, ctx.name, premises, c.text))
        return ADDED, cid

    # -- blocking (side condition * of r-Succ / r-Pred) -------------------------

    def is_blocked(self, ctx: Context, c: Clause, max_lit: Literal) -> bool:
        """True iff some stored clause blocks c = Gamma -> Delta v max_lit."""
        delta = set(c.head) - {max_lit}
        body = set(c.body)
        for d in ctx.clauses.values():
            if not set(d.body) <= body:
                continue
            rest = set(d.head) - delta
            if all(_blocking_shape(l) for l in rest):
                return True
        return False

    def triggers(self) -> TriggerSets:
        return compute_triggers(self.onto, self.registry)

    def clause_counts(self) -> dict[str, int]:
        return {name: len(ctx.clauses) for name, ctx in self.contexts.items()}

    def total_clauses(self) -> int:
        return sum(len(ctx.clauses) for ctx in self.contexts.values())


def _blocking_shape(l: Literal) -> bool:
    """x = o_i, y = o_i, or x = y."""
    if not l.pos or T.is_pterm(l.left):
        return False
    sides = {l.left, l.right}
    if sides == {X, Y}:
        return True
    if X in sides or Y in sides:
        other = next(s for s in sides if s.kind == T.INDIV) if any(
            s.kind == T.INDIV for s in sides) else None
        return other is not None
    return False
