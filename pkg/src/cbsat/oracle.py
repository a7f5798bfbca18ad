"""Independent desk-scale decision procedures, used only for testing.

Two halves, both working from the direct semantics of the axioms rather
than the clausal encoding the engine uses, so a disagreement localises a
bug to either clausification or saturation:

* ``find_countermodel`` encodes "all axioms hold and some element
  satisfies the query body but none of the query heads" into CNF over a
  bounded domain and searches it exhaustively with a small DPLL solver.
* ``ground_prove`` grounds the clauses over a depth-bounded Herbrand
  universe seeded with a fresh constant, case-splits over ground
  disjunctions with congruence-closure equality propagation, and reports
  ``proved`` when every branch derives a query-head atom on the fresh
  constant or a contradiction - a sound entailment certificate.

``decide`` combines the halves and never contradicts itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import terms as T
from .terms import Clause, Term, X
from .ontology import (
    Axiom, DL1, DL2, DL3, DL4, DL5, DL6, DL7, DL8, RAW, Ontology,
)


@dataclass
class FiniteInterpretation:
    k: int
    concepts: dict[str, frozenset[int]]
    roles: dict[str, frozenset[tuple[int, int]]]
    individuals: dict[str, int]
    functions: dict[str, tuple[int, ...]]

    def concept(self, name: str) -> frozenset[int]:
        return self.concepts.get(name, frozenset())

    def role(self, name: str) -> frozenset[tuple[int, int]]:
        return self.roles.get(name, frozenset())


# --- a small DPLL solver -------------------------------------------------------

def _dpll(num_vars: int, clauses: list[list[int]]) -> Optional[list[bool]]:
    assign: dict[int, bool] = {}

    def value(lit: int) -> Optional[bool]:
        v = assign.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def propagate(trail: list[int]) -> bool:
        changed = True
        while changed:
            changed = False
            for cl in clauses:
                sat = False
                unassigned = []
                for lit in cl:
                    v = value(lit)
                    if v is True:
                        sat = True
                        break
                    if v is None:
                        unassigned.append(lit)
                if sat:
                    continue
                if not unassigned:
                    return False
                if len(unassigned) == 1:
                    lit = unassigned[0]
                    assign[abs(lit)] = lit > 0
                    trail.append(abs(lit))
                    changed = True
        return True

    def search() -> bool:
        trail: list[int] = []
        if not propagate(trail):
            for v in trail:
                del assign[v]
            return False
        var = next((v for v in range(1, num_vars + 1) if v not in assign), None)
        if var is None:
            return True
        for choice in (True, False):
            assign[var] = choice
            if search():
                return True
            del assign[var]
        for v in trail:
            del assign[v]
        return False

    if not search():
        return None
    return [assign.get(v, False) for v in range(1, num_vars + 1)]


class _Cnf:
    def __init__(self):
        self.n = 0
        self.clauses: list[list[int]] = []
        self._vars: dict[tuple, int] = {}

    def var(self, key: tuple) -> int:
        v = self._vars.get(key)
        if v is None:
            self.n += 1
            v = self.n
            self._vars[key] = v
        return v

    def fresh(self) -> int:
        self.n += 1
        return self.n

    def add(self, *lits: int) -> None:
        self.clauses.append(list(lits))

    def exactly_one(self, lits: list[int]) -> None:
        self.add(*lits)
        for a, b in itertools.combinations(lits, 2):
            self.add(-a, -b)


class _ModelEncoder:
    """CNF encoding of the direct semantics over a domain of size k."""

    def __init__(self, onto: Ontology, k: int):
        self.onto = onto
        self.k = k
        self.cnf = _Cnf()
        self.elems = range(k)
        # function interpretations are only needed for raw clause lines
        self._fns = sorted({s.sym for ax in onto.axioms if ax.kind == RAW
                            for l in ax.raw.head
                            for side in (l.left, l.right)
                            for _, s in side.subterms() if s.kind == T.FN})
        for o in onto.symbols.individuals:
            self.cnf.exactly_one([self.cnf.var(("a", o, d)) for d in self.elems])
        for f in self._fns:
            for d in self.elems:
                self.cnf.exactly_one(
                    [self.cnf.var(("f", f, d, e)) for e in self.elems])

    def cvar(self, b: str, d: int) -> int:
        return self.cnf.var(("c", b, d))

    def rvar(self, s: str, d: int, e: int) -> int:
        return self.cnf.var(("r", s, d, e))

    # -- axiom encoders (direct Table-1 left-column semantics) --

    def encode_axiom(self, ax: Axiom) -> None:
        k = self.k
        cnf = self.cnf
        if ax.kind == DL1:
            for d in self.elems:
                cnf.add(*([-self.cvar(b, d) for b in ax.lhs]
                          + [self.cvar(b, d) for b in ax.rhs]))
        elif ax.kind == DL2:
            for d in self.elems:
                picks = []
                for combo in itertools.combinations(self.elems, ax.n):
                    w = cnf.fresh()
                    picks.append(w)
                    for e in combo:
                        cnf.add(-w, self.rvar(ax.role, d, e))
                        cnf.add(-w, self.cvar(ax.b2, e))
                cnf.add(*([-self.cvar(ax.b1, d)] + picks))
        elif ax.kind == DL3:
            for d in self.elems:
                for e in self.elems:
                    cnf.add(-self.rvar(ax.role, d, e), -self.cvar(ax.b1, e),
                            self.cvar(ax.b2, d))
        elif ax.kind == DL4:
            for d in self.elems:
                for combo in itertools.combinations(self.elems, ax.n + 1):
                    lits = [-self.cvar(ax.b1, d)]
                    for e in combo:
                        lits.append(-self.rvar(ax.role, d, e))
                        lits.append(-self.cvar(ax.b2, e))
                    cnf.add(*lits)
        elif ax.kind == DL5:
            for d in self.elems:
                for e in self.elems:
                    cnf.add(-self.rvar(ax.role, d, e), self.rvar(ax.role2, d, e))
        elif ax.kind == DL6:
            for d in self.elems:
                for e in self.elems:
                    cnf.add(-self.rvar(ax.role, d, e), self.rvar(ax.role2, e, d))
        elif ax.kind == DL7:
            for d in self.elems:
                cnf.add(-cnf.var(("a", ax.o, d)), self.cvar(ax.b1, d))
        elif ax.kind == DL8:
            for d in self.elems:
                cnf.add(-self.cvar(ax.b1, d), cnf.var(("a", ax.o, d)))
        elif ax.kind == RAW:
            self._encode_raw(ax.raw)
        else:
            raise ValueError(ax.kind)

    # -- raw clauses: FOL semantics with explicit function interpretations --

    def _den(self, t: Term, env: dict[Term, int]):
        """Denotation of a term: either a fixed element or a one-hot var list."""
        if t in env:
            return env[t]
        if t.kind == T.INDIV:
            return [self.cnf.var(("a", t.sym, e)) for e in self.elems]
        if t.kind == T.FN:
            base = self._den(t.args[0], env)
            if isinstance(base, int):
                return [self.cnf.var(("f", t.sym, base, e)) for e in self.elems]
            # nested non-constant argument: introduce a denotation selector
            sel = [self.cnf.fresh() for _ in self.elems]
            self.cnf.exactly_one(sel)
            for d in self.elems:
                for e in self.elems:
                    self.cnf.add(-base[d], -self.cnf.var(("f", t.sym, d, e)),
                                 sel[e])
            return sel
        raise ValueError(f"cannot evaluate term {t}")

    def _atom_lit(self, a: Term, env: dict[Term, int]) -> int:
        dens = [self._den(arg, env) for arg in a.args]
        key = ("atom", a.sym) + tuple(
            d if isinstance(d, int) else ("v",) + tuple(d) for d in dens)
        known = self.cnf._vars.get(key)
        if known is not None:
            return known
        if all(isinstance(d, int) for d in dens):
            if len(dens) == 1:
                return self.cvar(a.sym, dens[0])
            return self.rvar(a.sym, dens[0], dens[1])
        p = self.cnf.var(key)
        for combo in itertools.product(
                *[[d] if isinstance(d, int) else list(self.elems)
                  for d in dens]):
            guard = []
            for d, e in zip(dens, combo):
                if not isinstance(d, int):
                    guard.append(-d[e])
            base = self.cvar(a.sym, combo[0]) if len(combo) == 1 else \
                self.rvar(a.sym, combo[0], combo[1])
            self.cnf.add(*(guard + [-base, p]))
            self.cnf.add(*(guard + [base, -p]))
        return p

    def _eq_lit(self, s: Term, t: Term, env: dict[Term, int]) -> Optional[int]:
        ds, dt = self._den(s, env), self._den(t, env)
        if isinstance(ds, int) and isinstance(dt, int):
            return None if ds == dt else 0    # constant true / false
        key = ("eq", s.key, t.key, tuple(sorted(env.items(),
                                                key=lambda kv: kv[0].key)))
        known = self.cnf._vars.get(key)
        if known is not None:
            return known
        q = self.cnf.var(key)
        for e in self.elems:
            l1 = None if isinstance(ds, int) else ds[e]
            l2 = None if isinstance(dt, int) else dt[e]
            if isinstance(ds, int) and ds != e:
                continue
            if isinstance(dt, int) and dt != e:
                continue
            guard = [x for x in (l1, l2) if x is not None]
            self.cnf.add(*([-x for x in guard] + [q]))
        # q -> denotations coincide: for each e, den_s = e forces den_t = e
        for e in self.elems:
            if isinstance(ds, int):
                if ds == e and not isinstance(dt, int):
                    self.cnf.add(-q, dt[e])
            elif isinstance(dt, int):
                if dt == e:
                    self.cnf.add(-q, ds[e])
            else:
                self.cnf.add(-q, -ds[e], dt[e])
        return q

    def _encode_raw(self, c: Clause) -> None:
        vars_ = sorted({v for a in c.body for v in a.vars}
                       | {v for l in c.head for v in l.left.vars | l.right.vars},
                       key=lambda v: v.key)
        for combo in itertools.product(self.elems, repeat=len(vars_)):
            env = dict(zip(vars_, combo))
            lits: list[int] = []
            skip = False
            for a in c.body:
                lits.append(-self._atom_lit(a, env))
            for l in c.head:
                if T.is_pterm(l.left):
                    if l.is_atom:
                        lits.append(self._atom_lit(l.atom, env))
                    continue        # true != true contributes nothing
                e = self._eq_lit(l.left, l.right, env)
                if e is None:       # structurally equal denotations
                    if l.pos:
                        skip = True
                        break
                    continue
                if e == 0:          # denotations provably differ? no: 0 means
                    # constant-false equality
                    if not l.pos:
                        skip = True
                        break
                    continue
                lits.append(e if l.pos else -e)
            if skip:
                continue
            self.cnf.add(*lits)

    def extract(self, model: list[bool]) -> FiniteInterpretation:
        val = {key: model[v - 1] for key, v in self.cnf._vars.items()}
        concepts: dict[str, set[int]] = {}
        roles: dict[str, set[tuple[int, int]]] = {}
        indivs: dict[str, int] = {}
        fns: dict[str, list[int]] = {}
        for key, v in self.cnf._vars.items():
            if not model[v - 1]:
                continue
            if key[0] == "c":
                concepts.setdefault(key[1], set()).add(key[2])
            elif key[0] == "r":
                roles.setdefault(key[1], set()).add((key[2], key[3]))
            elif key[0] == "a":
                indivs[key[1]] = key[2]
            elif key[0] == "f":
                fns.setdefault(key[1], [0] * self.k)[key[2]] = key[3]
        return FiniteInterpretation(
            self.k,
            {b: frozenset(s) for b, s in concepts.items()},
            {r: frozenset(s) for r, s in roles.items()},
            indivs,
            {f: tuple(m) for f, m in fns.items()},
        )


# --- independent semantic check of an extracted interpretation ------------------

def _check_interpretation(onto: Ontology, interp: FiniteInterpretation) -> bool:
    elems = range(interp.k)
    for ax in onto.axioms:
        if ax.kind == DL1:
            for d in elems:
                if all(d in interp.concept(b) for b in ax.lhs) and \
                        not any(d in interp.concept(b) for b in ax.rhs):
                    return False
        elif ax.kind == DL2:
            for d in elems:
                if d in interp.concept(ax.b1):
                    succ = [e for e in elems
                            if (d, e) in interp.role(ax.role)
                            and e in interp.concept(ax.b2)]
                    if len(succ) < ax.n:
                        return False
        elif ax.kind == DL3:
            for d in elems:
                if any((d, e) in interp.role(ax.role)
                       and e in interp.concept(ax.b1) for e in elems) and \
                        d not in interp.concept(ax.b2):
                    return False
        elif ax.kind == DL4:
            for d in elems:
                if d in interp.concept(ax.b1):
                    succ = [e for e in elems
                            if (d, e) in interp.role(ax.role)
                            and e in interp.concept(ax.b2)]
                    if len(succ) > ax.n:
                        return False
        elif ax.kind == DL5:
            if not interp.role(ax.role) <= interp.role(ax.role2):
                return False
        elif ax.kind == DL6:
            if not {(e, d) for d, e in interp.role(ax.role)} <= \
                    interp.role(ax.role2):
                return False
        elif ax.kind == DL7:
            if interp.individuals[ax.o] not in interp.concept(ax.b1):
                return False
        elif ax.kind == DL8:
            for d in elems:
                if d in interp.concept(ax.b1) and \
                        d != interp.individuals[ax.o]:
                    return False
        elif ax.kind == RAW:
            if not _check_raw(ax.raw, interp):
                return False
    return True


def _raw_den(t: Term, env: dict, interp: FiniteInterpretation) -> int:
    if t in env:
        return env[t]
    if t.kind == T.INDIV:
        return interp.individuals[t.sym]
    if t.kind == T.FN:
        return interp.functions[t.sym][_raw_den(t.args[0], env, interp)]
    raise ValueError(t)


def _check_raw(c: Clause, interp: FiniteInterpretation) -> bool:
    vars_ = sorted({v for a in c.body for v in a.vars}
                   | {v for l in c.head for v in l.left.vars | l.right.vars},
                   key=lambda v: v.key)
    for combo in itertools.product(range(interp.k), repeat=len(vars_)):
        env = dict(zip(vars_, combo))
        body_ok = True
        for a in c.body:
            dens = [_raw_den(arg, env, interp) for arg in a.args]
            holds = dens[0] in interp.concept(a.sym) if len(dens) == 1 \
                else tuple(dens) in interp.role(a.sym)
            if not holds:
                body_ok = False
                break
        if not body_ok:
            continue
        head_ok = False
        for l in c.head:
            if T.is_pterm(l.left):
                if not l.is_atom:
                    continue
                a = l.atom
                dens = [_raw_den(arg, env, interp) for arg in a.args]
                holds = dens[0] in interp.concept(a.sym) if len(dens) == 1 \
                    else tuple(dens) in interp.role(a.sym)
            else:
                same = _raw_den(l.left, env, interp) == \
                    _raw_den(l.right, env, interp)
                holds = same if l.pos else not same
            if holds:
                head_ok = True
                break
        if not head_ok:
            return False
    return True


def find_countermodel(onto: Ontology, lhs: tuple[str, ...],
                      rhs: tuple[str, ...], max_k: int = 4,
                      ) -> Optional[FiniteInterpretation]:
    """Bounded exhaustive search for a model with a query-violating element."""
    for k in range(1, max_k + 1):
        enc = _ModelEncoder(onto, k)
        for ax in onto.axioms:
            enc.encode_axiom(ax)
        for b in lhs:
            enc.cnf.add(enc.cvar(b, 0))
        for b in rhs:
            enc.cnf.add(-enc.cvar(b, 0))
        model = _dpll(enc.cnf.n, enc.cnf.clauses)
        if model is None:
            continue
        interp = enc.extract(model)
        assert _check_interpretation(onto, interp), \
            "encoder produced a non-model"
        assert all(0 in interp.concept(b) for b in lhs)
        assert not any(0 in interp.concept(b) for b in rhs)
        return interp
    return None


# --- ground proving with congruence closure --------------------------------------

class _GroundState:
    def __init__(self, universe: list):
        self.parent = {t: t for t in universe}
        self.atoms: set[tuple] = set()
        self.diseqs: set[tuple] = set()
        self.closed = False

    def clone(self) -> "_GroundState":
        s = _GroundState([])
        s.parent = dict(self.parent)
        s.atoms = set(self.atoms)
        s.diseqs = set(self.diseqs)
        s.closed = self.closed
        return s

    def find(self, t):
        p = self.parent
        while p[t] != t:
            p[t] = p[p[t]]
            t = p[t]
        return t

    def canon_atom(self, a: tuple) -> tuple:
        return (a[0],) + tuple(self.find(t) for t in a[1:])

    def canon_pair(self, s, t) -> tuple:
        a, b = self.find(s), self.find(t)
        return (a, b) if a <= b else (b, a)

    def merge(self, s, t) -> None:
        rs, rt = self.find(s), self.find(t)
        if rs == rt:
            return
        self.parent[rs] = rt
        # congruence: equal-argument applications collapse; recanonise
        sig: dict[tuple, object] = {}
        pending = []
        for u in list(self.parent):
            if isinstance(u, tuple) and len(u) == 2 and isinstance(u[1], tuple):
                key = (u[0], self.find(u[1]))
                other = sig.get(key)
                if other is None:
                    sig[key] = u
                elif self.find(other) != self.find(u):
                    pending.append((other, u))
        self.atoms = {self.canon_atom(a) for a in self.atoms}
        new_dis = set()
        for a, b in self.diseqs:
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                self.closed = True
            new_dis.add((ra, rb) if ra <= rb else (rb, ra))
        self.diseqs = new_dis
        for a, b in pending:
            self.merge(a, b)

    def assert_lit(self, lit: tuple) -> None:
        kind = lit[0]
        if kind == "atom":
            self.atoms.add(self.canon_atom(lit[1]))
        elif kind == "eq":
            self.merge(lit[1], lit[2])
        else:
            a, b = self.find(lit[1]), self.find(lit[2])
            if a == b:
                self.closed = True
            else:
                self.diseqs.add((a, b) if a <= b else (b, a))


def _ground_terms(onto: Ontology, depth: int, limit: int) -> list:
    """Herbrand universe: fresh constant, individuals, function closure."""
    fns = sorted({s.sym for c in onto.dl_clauses for l in c.head
                  for side in (l.left, l.right)
                  for _, s in side.subterms() if s.kind == T.FN})
    layer = [("$a",)] + [("$o", name) for name in onto.symbols.individuals]
    universe = list(layer)
    for _ in range(depth):
        layer = [(f, t) for f in fns for t in layer]
        universe.extend(layer)
        if len(universe) > limit:
            break
    return universe[:limit]


def _ground_term(t: Term, env: dict):
    if t.kind == T.VAR:
        return env[t]
    if t.kind == T.INDIV:
        return ("$o", t.sym)
    return (t.sym, _ground_term(t.args[0], env))


def _ground_clauses(onto: Ontology, universe: list,
                    limit: int) -> list[tuple[list, list]]:
    uset = set(universe)
    out = []
    for c in onto.dl_clauses:
        vars_ = sorted({v for a in c.body for v in a.vars}
                       | {v for l in c.head
                          for v in l.left.vars | l.right.vars},
                       key=lambda v: v.key)
        count = len(universe) ** len(vars_)
        if count * max(1, len(c.body)) > limit:
            continue
        for combo in itertools.product(universe, repeat=len(vars_)):
            env = dict(zip(vars_, combo))
            body = []
            ok = True
            for a in c.body:
                ga = (a.sym,) + tuple(_ground_term(arg, env) for arg in a.args)
                if any(t not in uset for t in ga[1:]):
                    ok = False
                    break
                body.append(ga)
            if not ok:
                continue
            head = []
            for l in c.head:
                if T.is_pterm(l.left):
                    if not l.is_atom:
                        continue
                    a = l.atom
                    ga = (a.sym,) + tuple(_ground_term(arg, env)
                                          for arg in a.args)
                    if any(t not in uset for t in ga[1:]):
                        ok = False
                        break
                    head.append(("atom", ga))
                else:
                    gs = _ground_term(l.left, env)
                    gt = _ground_term(l.right, env)
                    if gs not in uset or gt not in uset:
                        ok = False
                        break
                    head.append(("eq" if l.pos else "neq", gs, gt))
            if ok:
                out.append((body, head))
    return out


class _SplitBudget(Exception):
    pass


def ground_prove(onto: Ontology, lhs: tuple[str, ...], rhs: tuple[str, ...],
                 depth: int = 2, split_budget: int = 2000,
                 ground_limit: int = 60000) -> str:
    """'proved' or 'unknown'; proved is a sound entailment certificate."""
    universe = _ground_terms(onto, depth, 300)
    clauses = _ground_clauses(onto, universe, ground_limit)
    state = _GroundState(universe)
    for b in lhs:
        state.assert_lit(("atom", (b, ("$a",))))
    budget = [split_budget]

    def goal(st: _GroundState) -> bool:
        if st.closed:
            return True
        a = st.find(("$a",))
        return any((b, a) in st.atoms for b in rhs)

    def run(st: _GroundState) -> bool:
        while True:
            if goal(st):
                return True
            fired = None
            for body, head in clauses:
                if any(st.canon_atom(a) not in st.atoms for a in body):
                    continue
                unknown = []
                satisfied = False
                for l in head:
                    if l[0] == "atom":
                        if st.canon_atom(l[1]) in st.atoms:
                            satisfied = True
                            break
                        unknown.append(l)
                    elif l[0] == "eq":
                        if st.find(l[1]) == st.find(l[2]):
                            satisfied = True
                            break
                        if st.canon_pair(l[1], l[2]) in st.diseqs:
                            continue
                        unknown.append(l)
                    else:
                        if st.canon_pair(l[1], l[2]) in st.diseqs:
                            satisfied = True
                            break
                        if st.find(l[1]) == st.find(l[2]):
                            continue
                        unknown.append(l)
                if satisfied:
                    continue
                fired = unknown
                break
            if fired is None:
                return goal(st)
            if not fired:
                st.closed = True
                return True
            if len(fired) == 1:
                st.assert_lit(fired[0])
                continue
            budget[0] -= 1
            if budget[0] < 0:
                raise _SplitBudget()
            for l in fired:
                branch = st.clone()
                branch.assert_lit(l)
                if not run(branch):
                    return False
            return True

    try:
        return "proved" if run(state) else "unknown"
    except _SplitBudget:
        return "unknown"


def decide(onto: Ontology, lhs: tuple[str, ...], rhs: tuple[str, ...],
           max_k: int = 4, depth: int = 2,
           split_budget: int = 2000) -> str:
    """'entailed', 'not-entailed', or 'unknown'; internally consistent."""
    proved = ground_prove(onto, lhs, rhs, depth, split_budget) == "proved"
    counter = find_countermodel(onto, lhs, rhs, max_k)
    if proved and counter is not None:
        raise AssertionError(
            f"oracle halves disagree on {lhs} <= {rhs}: both certificates")
    if proved:
        return "entailed"
    if counter is not None:
        return "not-entailed"
    return "unknown"
