"""Inference rules, expansion strategies, and the fair saturation loop.

The loop is a single priority worklist.  Cheap simplifications run first
(Elim happens inside every store insertion, then Ineq, Join, Fact, Eq),
the context-local rules next (Core, Hyper), information exchange after
that (Pred, r-Pred), and structure growth last (Succ, r-Succ, Nom), FIFO
within each class.  Join is applied eagerly, which the termination
argument requires.  Every firing goes through the clause store, so a
conclusion already contained up to redundancy never produces an event,
and two runs over the same input produce byte-identical traces.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterator, Optional

from . import terms as T
from .terms import Clause, Literal, Term, TRUE, X, Y, clause
from .ontology import Ontology
from .structure import (
    ADDED, Context, ContextStructure, ResourceCapError, TraceEvent,
    compute_triggers,
)
from .ordering import STANDARD

# worklist priorities; lower runs first, FIFO within a class
_PRIO = {
    "ineq": 1, "join": 2, "fact": 3, "eq": 4, "core": 5, "hyper": 6,
    "hyper0": 6, "pred": 7, "pred_edge": 7, "rpred": 8, "rpred_edge": 8,
    "rpred_n0": 8, "succ": 9, "rsucc": 10, "nom": 11,
}


# --- expansion strategies -----------------------------------------------------

class TrivialStrategy:
    """Push all inferences into a single context with empty core."""

    name = "trivial"

    def select(self, f: str, k1: tuple[Term, ...], structure: ContextStructure):
        return "v_top", (), STANDARD


class CautiousStrategy:
    """Create contexts only for concepts named in existential restrictions."""

    name = "cautious"

    def __init__(self, onto: Ontology):
        per_f: dict[str, set[str]] = {}
        for c in onto.dl_clauses:
            for l in c.head:
                if not l.is_atom:
                    continue
                a = l.atom
                if len(a.args) == 1 and a.args[0].kind == T.FN:
                    per_f.setdefault(a.args[0].sym, set()).add(a.sym)
        self._unique = {f: next(iter(bs))
                        for f, bs in per_f.items() if len(bs) == 1}

    def select(self, f: str, k1: tuple[Term, ...], structure: ContextStructure):
        b = self._unique.get(f)
        if b is not None and T.papp(b, X) in k1:
            return f"vB[{b}]", (T.papp(b, X),), STANDARD
        return "v_top", (), STANDARD


class EagerStrategy:
    """One context per distinct trigger conjunction K1, with core K1."""

    name = "eager"

    def select(self, f: str, k1: tuple[Term, ...], structure: ContextStructure):
        name = f"v[{','.join(T.render_term(a) for a in k1)}]"
        return name, k1, STANDARD


def make_strategy(name: str, onto: Ontology):
    if name == "trivial":
        return TrivialStrategy()
    if name == "cautious":
        return CautiousStrategy(onto)
    if name == "eager":
        return EagerStrategy()
    raise ValueError(f"unknown strategy {name!r}")


# --- trigger-shape tests used by the exchange rules ---------------------------

def _is_pr_literal(l: Literal, order) -> bool:
    """Nonground literal shapes allowed to flow to a predecessor context."""
    if l.is_atom:
        return order._is_pr_atom(l.atom)
    if not l.pos or T.is_pterm(l.left):
        return False
    sides = {l.left, l.right}
    if sides == {X, Y}:
        return True
    var = X if X in sides else (Y if Y in sides else None)
    if var is None:
        return False
    other = next(s for s in sides if s is not var)
    return other.kind == T.INDIV


def _is_prr_literal(l: Literal, order) -> bool:
    if l.is_atom:
        return order._is_prr_atom(l.atom)
    if not l.pos or T.is_pterm(l.left):
        return False
    sides = {l.left, l.right}
    if Y in sides:
        other = next((s for s in sides if s is not Y), None)
        return other is not None and other.kind == T.INDIV
    return False


def _sur_source_atom(t: Term) -> Optional[Term]:
    """The A in Su^r with A{y -> x} = t, if any (t from a non-root context)."""
    if t.kind != T.PAPP:
        return None
    if len(t.args) == 1:
        return t if t.args[0].kind == T.INDIV else None
    s, u = t.args
    if s is X and u.kind == T.INDIV:
        return T.papp(t.sym, Y, u)
    if s.kind == T.INDIV and u is X:
        return T.papp(t.sym, s, Y)
    return None


def _contains_fn_over_indiv(term: Term) -> bool:
    return any(s.kind == T.FN and s.args[0].kind == T.INDIV
               for _, s in term.subterms())


def _clause_has_fn_over_indiv(c: Clause) -> bool:
    for a in c.body:
        if _contains_fn_over_indiv(a):
            return True
    for l in c.head:
        if _contains_fn_over_indiv(l.left) or _contains_fn_over_indiv(l.right):
            return True
    return False


# --- proposals ----------------------------------------------------------------

@dataclass
class AddClause:
    ctx: str
    clause: Clause
    rule: str
    premises: tuple[str, ...]


@dataclass
class SuccFiring:
    u: str
    f: str
    obind: str               # "" unless u is the root
    k1: tuple[Term, ...]
    k2: tuple[Term, ...]
    seeds: dict              # K2 atom -> witness premise id


@dataclass
class RSuccFiring:
    u: str
    o: Term
    a: Term                  # the Su^r atom A
    premise: str


class Saturator:
    """Owns one saturation run over a context structure."""

    def __init__(self, structure: ContextStructure, strategy):
        self.d = structure
        self.onto = structure.onto
        self.strategy = strategy
        self._heap: list[tuple[int, int, tuple]] = []
        self._task_seq = 0
        self._onto_ids = {id(c): f"o{i + 1}"
                          for i, c in enumerate(self.onto.dl_clauses)}
        self._su = sorted(
            compute_triggers(self.onto, structure.registry).su,
            key=lambda t: t.key)
        self._bootstrapped = False

    # -- scheduling ------------------------------------------------------------

    def _push(self, kind: str, *args) -> None:
        self._task_seq += 1
        heapq.heappush(self._heap, (_PRIO[kind], self._task_seq, (kind, *args)))

    def _schedule_clause_tasks(self, ctx: Context, cid: int, c: Clause) -> None:
        name = ctx.name
        self._push("ineq", name, cid)
        self._push("join", name, cid)
        self._push("fact", name, cid)
        self._push("eq", name, cid)
        self._push("hyper", name, cid)
        self._push("rpred", name, cid)
        if ctx.is_root:
            self._push("nom", cid)
        else:
            self._push("pred", name, cid)
            self._push("rsucc", name, cid)
        for f, o in self._succ_triggers(ctx, c):
            self._push("succ", name, f, o)

    def _succ_triggers(self, ctx: Context, c: Clause) -> list[tuple[str, str]]:
        out: list[tuple[str, str]] = []
        seen = set()
        for l in c.head:
            if not l.is_atom:
                continue
            for _, s in l.atom.subterms():
                if s.kind != T.FN:
                    continue
                arg = s.args[0]
                if not ctx.is_root and arg is X:
                    key = (s.sym, "")
                elif ctx.is_root and arg.kind == T.INDIV:
                    key = (s.sym, arg.sym)
                else:
                    continue
                if key not in seen:
                    seen.add(key)
                    out.append(key)
        return out

    def _new_context_tasks(self, ctx: Context) -> None:
        self._push("core", ctx.name)
        self._push("hyper0", ctx.name)
        if not ctx.is_root:
            self._push("rpred_n0", ctx.name)

    def bootstrap(self) -> None:
        if self._bootstrapped:
            return
        self._bootstrapped = True
        for ctx in self.d.contexts.values():
            self._new_context_tasks(ctx)

    def init_query_context(self, gamma_q) -> Context:
        ctx = self.d.init_query_context(gamma_q)
        if self._bootstrapped:
            self._new_context_tasks(ctx)
        return ctx

    # -- mutation --------------------------------------------------------------

    def _add(self, ctx_name: str, c: Clause, rule: str,
             premises: tuple[str, ...]) -> bool:
        ctx = self.d.contexts[ctx_name]
        status, cid = self.d.add_clause(ctx, c, rule, premises)
        if status != ADDED:
            return False
        self._schedule_clause_tasks(ctx, cid, c)
        return True

    def _apply(self, p) -> None:
        if isinstance(p, AddClause):
            self._add(p.ctx, p.clause, p.rule, p.premises)
        elif isinstance(p, SuccFiring):
            self._apply_succ(p)
        elif isinstance(p, RSuccFiring):
            if self.d.add_root_edge(p.u, p.o):
                self._push("rpred_edge", p.u, p.o.sym)
            self._add("v_r", clause([p.a], [T.atom(p.a)]), "r-Succ",
                      (p.premise,))
        else:
            raise TypeError(p)

    def _apply_succ(self, p: SuccFiring) -> None:
        name, core, mode = self.strategy.select(p.f, p.k1, self.d)
        assert set(core) <= set(p.k1) and name != "v_r"
        ctx = self.d.contexts.get(name)
        if ctx is None:
            ctx = self.d.create_context(name, core, mode)
            self._new_context_tasks(ctx)
        if self.d.add_edge(p.u, name, p.f, p.obind):
            self._push("pred_edge", p.u, name, p.f, p.obind)
        for a in sorted(set(p.k2) - set(ctx.core), key=lambda t: t.key):
            self._add(name, clause([a], [T.atom(a)]), "Succ", (p.seeds[a],))

    # -- main loop ---------------------------------------------------------------

    def run(self) -> None:
        self.bootstrap()
        heap = self._heap
        registry = self.d.registry
        while heap:
            _, _, task = heapq.heappop(heap)
            version = registry.version
            for p in self._dispatch(task):
                self._apply(p)
            if registry.version != version:
                # new nominals refresh the root's individual-instantiated rules
                self._push("hyper0", "v_r")

    def _dispatch(self, task) -> Iterator:
        kind = task[0]
        handler = getattr(self, "_enum_" + kind)
        return handler(*task[1:])

    # -- rule enumerators ----------------------------------------------------------
    # Each yields proposals whose preconditions hold; redundancy of the
    # conclusion is checked by the store on application.

    def _clause(self, ctx_name: str, cid: int) -> Optional[Clause]:
        return self.d.contexts[ctx_name].clauses.get(cid)

    def _enum_core(self, ctx_name: str) -> Iterator:
        ctx = self.d.contexts[ctx_name]
        for a in ctx.core:
            yield AddClause(ctx_name, clause([], [T.atom(a)]), "Core", ())

    def _enum_ineq(self, ctx_name: str, cid: int) -> Iterator:
        c = self._clause(ctx_name, cid)
        if c is None:
            return
        for l in c.head:
            if not l.pos and l.left is l.right:
                rest = tuple(x for x in c.head if x is not l)
                yield AddClause(ctx_name, clause(c.body, rest), "Ineq",
                                (f"c{cid}",))

    def _enum_fact(self, ctx_name: str, cid: int) -> Iterator:
        c = self._clause(ctx_name, cid)
        if c is None:
            return
        order = self.d.contexts[ctx_name].order
        eqs = [l for l in c.head if l.pos and not T.is_pterm(l.left)]
        for l1 in eqs:
            for l2 in eqs:
                if l1 is l2:
                    continue
                for s, t in ((l1.left, l1.right), (l1.right, l1.left)):
                    for s2, t2 in ((l2.left, l2.right), (l2.right, l2.left)):
                        if s is not s2 or order.greater(t2, s):
                            continue
                        rest = [x for x in c.head if x is not l1 and x is not l2]
                        if any(order.geq_lit(x, l2) for x in rest) or \
                                order.geq_lit(l1, l2):
                            continue
                        head = rest + [T.neq(t, t2), T.eq(s, t2)]
                        yield AddClause(ctx_name, clause(c.body, head), "Fact",
                                        (f"c{cid}",))

    def _enum_eq(self, ctx_name: str, cid: int) -> Iterator:
        c = self._clause(ctx_name, cid)
        if c is None:
            return
        ctx = self.d.contexts[ctx_name]
        for did, d in list(ctx.clauses.items()):
            yield from self._eq_pair(ctx, cid, c, did, d)
            if did != cid:
                yield from self._eq_pair(ctx, did, d, cid, c)

    def _eq_pair(self, ctx: Context, cid1: int, c1: Clause, cid2: int,
                 c2: Clause) -> Iterator:
        order = ctx.order
        for l1 in c1.head:
            # the rewriting literal is an a-equality s1 = t1 with t1 not >= s1
            if not l1.pos or T.is_pterm(l1.left):
                continue
            if not order.eligible(c1, l1):
                continue
            for s1, t1 in ((l1.left, l1.right), (l1.right, l1.left)):
                if s1 is t1 or order.greater(t1, s1) or s1.kind == T.VAR:
                    continue
                for l2 in c2.head:
                    if not order.eligible(c2, l2):
                        continue
                    if l2.is_atom:
                        sides = ((l2.atom, TRUE),)
                    elif T.is_pterm(l2.left):
                        continue        # true != true has no a-positions
                    else:
                        sides = ((l2.left, l2.right), (l2.right, l2.left))
                    for s2, t2 in sides:
                        if order.greater(t2, s2):
                            continue
                        for pos, sub in s2.subterms():
                            if sub is not s1:
                                continue
                            if sub.kind == T.INDIV and s2.has_fn:
                                continue
                            rewritten = T.replace_subterm(s2, pos, t1)
                            if l2.is_atom:
                                new = T.atom(rewritten)
                            else:
                                new = T.lit(l2.pos, rewritten, t2)
                            head = [x for x in c1.head if x is not l1]
                            head += [x for x in c2.head if x is not l2]
                            head.append(new)
                            yield AddClause(
                                ctx.name, clause(c1.body + c2.body, head),
                                "Eq", (f"c{cid1}", f"c{cid2}"))

    def _enum_join(self, ctx_name: str, cid: int) -> Iterator:
        c = self._clause(ctx_name, cid)
        if c is None:
            return
        ctx = self.d.contexts[ctx_name]
        for a in c.body:
            if a.is_ground and any(s.kind == T.INDIV for _, s in a.subterms()):
                yield from self._join_complete(ctx, cid, c, a)
        for did, d in list(ctx.clauses.items()):
            if did == cid:
                continue
            for a in d.body:
                if a.is_ground and any(s.kind == T.INDIV
                                       for _, s in a.subterms()):
                    yield from self._join_complete(ctx, did, d, a)

    def _join_complete(self, ctx: Context, cid: int, c: Clause,
                       a: Term) -> Iterator:
        order = ctx.order
        gamma = [b for b in c.body if b is not a]
        al = T.atom(a)
        for did, d in list(ctx.clauses.items()):
            # form 1: A appears (maximal) in a stored head
            if al in d.head and order.eligible(d, al):
                head = [l for l in d.head if l is not al] + list(c.head)
                yield AddClause(ctx.name, clause(gamma + list(d.body), head),
                                "Join", (f"c{cid}", f"c{did}"))
            # form 2: top -> Delta' v A'  plus  top -> Delta'' v x = o
            if d.body:
                continue
            for l in d.head:
                if not l.is_atom or not order.eligible(d, l):
                    continue
                ap = l.atom
                if ap.vars != {X}:
                    continue
                for o in sorted({s for _, s in a.subterms()
                                 if s.kind == T.INDIV}, key=lambda t: t.key):
                    if T.apply_substitution(ap, {X: o}) is not a:
                        continue
                    xeq = T.eq(X, o)
                    for eid, e in list(ctx.clauses.items()):
                        if e.body or xeq not in e.head:
                            continue
                        if not order.eligible(e, xeq):
                            continue
                        head = ([x for x in d.head if x is not l]
                                + [x for x in e.head if x is not xeq]
                                + list(c.head))
                        yield AddClause(
                            ctx.name, clause(gamma, head), "Join",
                            (f"c{cid}", f"c{did}", f"c{eid}"))

    # -- Hyper ---------------------------------------------------------------------

    def _enum_hyper0(self, ctx_name: str) -> Iterator:
        for oc in self.onto.dl_clauses:
            if not oc.body:
                yield from self._hyper_conclude(ctx_name, oc, [], {})

    def _enum_hyper(self, ctx_name: str, cid: int) -> Iterator:
        c = self._clause(ctx_name, cid)
        if c is None:
            return
        ctx = self.d.contexts[ctx_name]
        atoms = set(ctx.order.eligible_atoms(c))
        if not atoms:
            return
        for oc in self.onto.dl_clauses:
            if not oc.body:
                continue
            if any(self._dl_shape_matches(ctx, a, ba) for a in atoms
                   for ba in oc.body):
                yield from self._hyper_enum_clause(ctx, oc)

    def _dl_shape_matches(self, ctx: Context, got: Term, want: Term) -> bool:
        if got.sym != want.sym or len(got.args) != len(want.args):
            return False
        for g, w in zip(got.args, want.args):
            if w is X:
                if ctx.is_root:
                    if g.kind != T.INDIV:
                        return False
                elif g is not X:
                    return False
        return True

    def _hyper_enum_clause(self, ctx: Context, oc: Clause) -> Iterator:
        body = list(oc.body)

        def extend(i: int, sigma: dict, picked: list) -> Iterator:
            if i == len(body):
                yield from self._hyper_conclude(ctx.name, oc, picked,
                                                dict(sigma))
                return
            want = T.apply_substitution(body[i], sigma)
            for did, d in list(ctx.clauses.items()):
                for l in d.head:
                    if not l.is_atom or not ctx.order.eligible(d, l):
                        continue
                    binding = self._match_dl_atom(ctx, want, l.atom)
                    if binding is None:
                        continue
                    sigma.update(binding)
                    picked.append((did, d))
                    yield from extend(i + 1, sigma, picked)
                    picked.pop()
                    for key in binding:
                        del sigma[key]

        yield from extend(0, {}, [])

    def _match_dl_atom(self, ctx: Context, want: Term,
                       got: Term) -> Optional[dict]:
        """Match a partially substituted DL body atom against a context atom."""
        if got.sym != want.sym or len(got.args) != len(want.args):
            return None
        binding: dict[Term, Term] = {}
        for w, g in zip(want.args, got.args):
            w = binding.get(w, w)
            if w is X and not ctx.is_root:
                if g is not X:
                    return None
            elif w is X:
                if g.kind != T.INDIV:
                    return None
                binding[X] = g
            elif T.z_index(w) is not None:
                binding[w] = g
            elif w is not g:
                return None
        return binding

    def _hyper_conclude(self, ctx_name: str, oc: Clause, picked,
                        sigma: dict) -> Iterator:
        ctx = self.d.contexts[ctx_name]
        head_vars = set().union(*(l.left.vars | l.right.vars
                                  for l in oc.head)) if oc.head else set()
        if ctx.is_root and X in head_vars and X not in sigma:
            # body-less ontology clause over x at the root: x maps to each
            # registered individual
            for o in self.d.registry.all_terms():
                s2 = dict(sigma)
                s2[X] = o
                yield self._hyper_build(ctx, oc, picked, s2)
            return
        yield self._hyper_build(ctx, oc, picked, sigma)

    def _hyper_build(self, ctx: Context, oc: Clause, picked,
                     sigma: dict) -> AddClause:
        body: list[Term] = []
        head: list[Literal] = []
        prem = [self._onto_ids[id(oc)]]
        for did, d in picked:
            body.extend(d.body)
            prem.append(f"c{did}")
        for i, (did, d) in enumerate(picked):
            a = T.apply_substitution(oc.body[i], sigma)
            head.extend(l for l in d.head if l is not T.atom(a))
        for l in oc.head:
            head.append(T.apply_to_literal(l, sigma))
        return AddClause(ctx.name, clause(body, head), "Hyper", tuple(prem))

    # -- Pred ------------------------------------------------------------------------

    def _pred_sigma(self, u: Context, f: str, obind: str) -> dict:
        if obind:
            o = self.d.registry._terms[obind]
            return {Y: o, X: T.fn(f, o)}
        return {Y: X, X: T.fn(f, X)}

    def _pred_split(self, v: Context, c: Clause):
        for l in c.head:
            if not l.is_ground and not _is_pr_literal(l, v.order):
                return None
        a_i = [a for a in c.body if not a.is_ground]
        c_i = [a for a in c.body if a.is_ground]
        return a_i, c_i

    def _enum_pred(self, ctx_name: str, cid: int) -> Iterator:
        c = self._clause(ctx_name, cid)
        if c is None:
            return
        for (u_name, v_name, f, obind) in list(self.d.edges):
            if v_name == ctx_name:
                yield from self._pred_fire(u_name, v_name, c, cid, f, obind)
            if u_name == ctx_name:
                w = self.d.contexts[v_name]
                for did, dcl in list(w.clauses.items()):
                    yield from self._pred_fire(u_name, v_name, dcl, did, f,
                                               obind)

    def _enum_pred_edge(self, u_name: str, v_name: str, f: str,
                        obind: str) -> Iterator:
        v = self.d.contexts[v_name]
        for did, dcl in list(v.clauses.items()):
            yield from self._pred_fire(u_name, v_name, dcl, did, f, obind)

    def _pred_fire(self, u_name: str, v_name: str, c: Clause, cid: int,
                   f: str, obind: str) -> Iterator:
        v = self.d.contexts[v_name]
        if v.is_root:
            return
        split = self._pred_split(v, c)
        if split is None:
            return
        a_i, c_i = split
        u = self.d.contexts[u_name]
        sigma = self._pred_sigma(u, f, obind)

        def extend(i: int, picked: list) -> Iterator:
            if i == len(a_i):
                body = list(c_i)
                head: list[Literal] = []
                prem = [f"c{cid}"]
                for did, d in picked:
                    body.extend(d.body)
                    prem.append(f"c{did}")
                for j, (did, d) in enumerate(picked):
                    t = T.apply_substitution(a_i[j], sigma)
                    head.extend(l for l in d.head if l is not T.atom(t))
                for l in c.head:
                    head.append(T.apply_to_literal(l, sigma))
                out = clause(body, head)
                if not u.is_root and _clause_has_fn_over_indiv(out):
                    return
                yield AddClause(u_name, out, "Pred", tuple(prem))
                return
            want = T.apply_substitution(a_i[i], sigma)
            for did, d in list(u.clauses.items()):
                for l in d.head:
                    if l.is_atom and l.atom is want and u.order.eligible(d, l):
                        picked.append((did, d))
                        yield from extend(i + 1, picked)
                        picked.pop()
                        break

        yield from extend(0, [])

    # -- r-Pred ------------------------------------------------------------------------

    def _rpred_split(self, c: Clause):
        """Split a root clause body into Su^r atoms and ground copies."""
        a_i: list[Term] = []
        c_i: list[Term] = []
        for a in c.body:
            if len(a.args) == 1 and a.args[0].kind == T.INDIV:
                a_i.append(a)          # B(o)
            elif len(a.args) == 2 and Y in a.args and any(
                    s.kind == T.INDIV for s in a.args):
                a_i.append(a)          # S(o,y) or S(y,o)
            elif a.is_ground:
                c_i.append(a)          # S(o,o') etc., copied verbatim
            else:
                return None
        root = self.d.contexts["v_r"]
        for l in c.head:
            if not l.is_ground and not _is_prr_literal(l, root.order):
                return None
        return a_i, c_i

    def _enum_rpred(self, ctx_name: str, cid: int) -> Iterator:
        c = self._clause(ctx_name, cid)
        if c is None:
            return
        if ctx_name == "v_r":
            split = self._rpred_split(c)
            if split is None:
                return
            a_i, c_i = split
            if not a_i:
                for target in list(self.d.contexts):
                    if target != "v_r":
                        yield from self._rpred_conclude(target, c, cid, [], c_i)
                return
            for u_name in sorted({u for (u, _) in self.d.root_edges}):
                yield from self._rpred_fire(u_name, c, cid, a_i, c_i)
        else:
            if not self.d.root_edges_from(ctx_name):
                return
            root = self.d.contexts["v_r"]
            for did, dcl in list(root.clauses.items()):
                split = self._rpred_split(dcl)
                if split is None or not split[0]:
                    continue
                yield from self._rpred_fire(ctx_name, dcl, did, *split)

    def _enum_rpred_edge(self, u_name: str, o_sym: str) -> Iterator:
        root = self.d.contexts["v_r"]
        for did, dcl in list(root.clauses.items()):
            split = self._rpred_split(dcl)
            if split is None or not split[0]:
                continue
            yield from self._rpred_fire(u_name, dcl, did, *split)

    def _enum_rpred_n0(self, ctx_name: str) -> Iterator:
        root = self.d.contexts["v_r"]
        for did, dcl in list(root.clauses.items()):
            split = self._rpred_split(dcl)
            if split is None or split[0]:
                continue
            yield from self._rpred_conclude(ctx_name, dcl, did, [], split[1])

    def _rpred_fire(self, u_name: str, c: Clause, cid: int, a_i: list[Term],
                    c_i: list[Term]) -> Iterator:
        u = self.d.contexts[u_name]
        edges = set(self.d.root_edges_from(u_name))
        sigma = {Y: X}

        def extend(i: int, picked: list) -> Iterator:
            if i == len(a_i):
                yield from self._rpred_conclude(u_name, c, cid, picked, c_i)
                return
            a = a_i[i]
            o = next(s for s in a.args if s.kind == T.INDIV)
            if o.sym not in edges:
                return
            want = T.apply_substitution(a, sigma)
            for did, d in list(u.clauses.items()):
                for l in d.head:
                    if l.is_atom and l.atom is want and u.order.eligible(d, l):
                        if self.d.is_blocked(u, d, l):
                            continue
                        picked.append((did, d, want))
                        yield from extend(i + 1, picked)
                        picked.pop()
                        break

        yield from extend(0, [])

    def _rpred_conclude(self, u_name: str, c: Clause, cid: int, picked,
                        c_i: list[Term]) -> Iterator:
        sigma = {Y: X}
        body = list(c_i)
        head: list[Literal] = []
        prem = [f"c{cid}"]
        for did, d, want in picked:
            body.extend(d.body)
            prem.append(f"c{did}")
            head.extend(l for l in d.head if l is not T.atom(want))
        for l in c.head:
            head.append(T.apply_to_literal(l, sigma))
        out = clause(body, head)
        if _clause_has_fn_over_indiv(out):
            return
        if T.classify_clause(out, is_root=False).startswith("invalid"):
            return
        yield AddClause(u_name, out, "r-Pred", tuple(prem))

    # -- Succ / r-Succ --------------------------------------------------------------

    def _enum_succ(self, ctx_name: str, f: str, obind: str) -> Iterator:
        u = self.d.contexts[ctx_name]
        if obind:
            fx = T.fn(f, self.d.registry._terms[obind])
            sigma = {Y: fx.args[0], X: fx}
        else:
            fx = T.fn(f, X)
            sigma = {Y: X, X: fx}
        trigger = False
        for d in u.clauses.values():
            for l in d.head:
                if not l.is_atom or not u.order.eligible(d, l):
                    continue
                if any(s is fx for _, s in l.atom.subterms()):
                    trigger = True
                    break
            if trigger:
                break
        if not trigger:
            return
        k1: list[Term] = []
        k2: list[Term] = []
        seeds: dict[Term, str] = {}
        for a in self._su:
            target = T.apply_substitution(a, sigma)
            if u.has_exact(clause([], [T.atom(target)])):
                k1.append(a)
            for did, d in u.clauses.items():
                found = False
                for l in d.head:
                    if l.is_atom and l.atom is target and u.order.eligible(d, l):
                        k2.append(a)
                        seeds[a] = f"c{did}"
                        found = True
                        break
                if found:
                    break
        for (u2, v2, f2, ob2) in self.d.edges:
            if u2 != ctx_name or f2 != f or ob2 != obind:
                continue
            v = self.d.contexts[v2]
            if all(v.contains_up_to_redundancy(clause([a], [T.atom(a)]))
                   for a in k2 if a not in v.core):
                return
        yield SuccFiring(ctx_name, f, obind, tuple(k1), tuple(k2), seeds)

    def _enum_rsucc(self, ctx_name: str, cid: int) -> Iterator:
        c = self._clause(ctx_name, cid)
        if c is None:
            return
        u = self.d.contexts[ctx_name]
        if u.is_root:
            return
        root = self.d.contexts["v_r"]
        for l in c.head:
            if not l.is_atom or not u.order.eligible(c, l):
                continue
            a = _sur_source_atom(l.atom)
            if a is None:
                continue
            o = next(s for s in a.args if s.kind == T.INDIV)
            seed = clause([a], [T.atom(a)])
            if (ctx_name, o.sym) in self.d._root_edge_set and \
                    root.contains_up_to_redundancy(seed):
                continue
            if self.d.is_blocked(u, c, l):
                continue
            yield RSuccFiring(ctx_name, o, a, f"c{cid}")

    # -- Nom ---------------------------------------------------------------------------

    def _enum_nom(self, cid: int) -> Iterator:
        root = self.d.contexts["v_r"]
        c = root.clauses.get(cid)
        if c is None:
            return
        atoms = set(root.order.eligible_atoms(c))
        if not atoms:
            return
        for oc in self.onto.dl_clauses:
            if not oc.head or not oc.body:
                continue
            if not all(l.pos and not T.is_pterm(l.left) for l in oc.head):
                continue
            if any(self._dl_shape_matches(root, a, ba) for a in atoms
                   for ba in oc.body):
                yield from self._nom_enum_clause(oc)

    def _nom_enum_clause(self, oc: Clause) -> Iterator:
        root = self.d.contexts["v_r"]
        k = self.onto.max_z_index - 1
        if k < 1:
            return
        body = list(oc.body)

        def extend(i: int, sigma: dict, picked: list) -> Iterator:
            if i == len(body):
                yield from self._nom_conclude(oc, picked, dict(sigma), k)
                return
            want = T.apply_substitution(body[i], sigma)
            for did, d in list(root.clauses.items()):
                for l in d.head:
                    if not l.is_atom or not root.order.eligible(d, l):
                        continue
                    binding = self._match_dl_atom(root, want, l.atom)
                    if binding is None:
                        continue
                    sigma.update(binding)
                    picked.append((did, d))
                    yield from extend(i + 1, sigma, picked)
                    picked.pop()
                    for key in binding:
                        del sigma[key]

        yield from extend(0, {}, [])

    def _nom_conclude(self, oc: Clause, picked, sigma: dict,
                      k: int) -> Iterator:
        o = sigma.get(X)
        if o is None or o.kind != T.INDIV:
            return
        kept: list[Literal] = []
        dropped = 0
        for l in oc.head:
            img = T.apply_to_literal(l, sigma)
            if img.pos and img.left is Y and img.right is Y:
                dropped += 1
            elif img.pos and (
                    (img.left is Y and img.right.kind == T.FN
                     and img.right.args[0].kind == T.INDIV)
                    or (img.right is Y and img.left.kind == T.FN
                        and img.left.args[0].kind == T.INDIV)):
                dropped += 1
            else:
                kept.append(img)
        if dropped == 0:
            return
        roles = sorted({
            a.sym for j, a in enumerate(oc.body)
            if len(a.args) == 2 and a.args[0] is X and sigma.get(a.args[1]) is Y
        })
        if not roles:
            # y was bound only through inverse-direction premises; the
            # conclusion's nominal label has no defined role, so skip
            return
        body: list[Term] = []
        head_base: list[Literal] = list(kept)
        prem = [self._onto_ids[id(oc)]]
        for j, (did, d) in enumerate(picked):
            body.extend(d.body)
            prem.append(f"c{did}")
            a = T.apply_substitution(oc.body[j], sigma)
            head_base.extend(l for l in d.head if l is not T.atom(a))
        for role in roles:
            minted = [self.d.registry.mint(o, role, i)
                      for i in range(1, k + 1)]
            head = head_base + [T.eq(Y, m) for m in minted]
            yield AddClause("v_r", clause(body, head), "Nom", tuple(prem))

    # -- fixpoint verification (used by the test suite) ----------------------------

    def all_proposals(self) -> Iterator:
        """Every rule instance whose preconditions hold in the current state."""
        for name, ctx in list(self.d.contexts.items()):
            yield from self._enum_core(name)
            yield from self._enum_hyper0(name)
            if not ctx.is_root:
                yield from self._enum_rpred_n0(name)
            for cid in list(ctx.clauses):
                yield from self._enum_ineq(name, cid)
                yield from self._enum_join(name, cid)
                yield from self._enum_fact(name, cid)
                yield from self._enum_eq(name, cid)
                yield from self._enum_hyper(name, cid)
                yield from self._enum_rpred(name, cid)
                if ctx.is_root:
                    yield from self._enum_nom(cid)
                else:
                    yield from self._enum_pred(name, cid)
                    yield from self._enum_rsucc(name, cid)
                c = ctx.clauses.get(cid)
                if c is not None:
                    for f, o in self._succ_triggers(ctx, c):
                        yield from self._enum_succ(name, f, o)

    def fixpoint_violations(self) -> list:
        out = []
        for p in self.all_proposals():
            if isinstance(p, AddClause):
                ctx = self.d.contexts[p.ctx]
                if not ctx.contains_up_to_redundancy(p.clause):
                    out.append(p)
            else:
                out.append(p)
        return out


# --- public driver -------------------------------------------------------------

def saturate(structure: ContextStructure, strategy,
             queries: Optional[list] = None) -> list[TraceEvent]:
    """Steps 1-3 driver: initialise query contexts, then run to fixpoint."""
    sat = Saturator(structure, strategy)
    if queries:
        for gamma in queries:
            sat.init_query_context(gamma)
    sat.run()
    return structure.trace
