"""Global symbol precedence, the LPO, and per-context orders.

The base order is a lexicographic path order over context a- and p-terms,
induced by a total precedence with strata

    true < y < x < individuals < function symbols < p-symbols.

Individuals are ranked by (label length, label, base name), which makes
the nominal-prefix condition structural: minting a new nominal never
reorders existing symbols.  Function symbols rank above all individuals
so equality steps rewrite ground function terms toward individuals;
later-declared functions rank higher.

Context orders relax the LPO: an atom whose shape can flow to a
predecessor context never dominates a term outside {x, y, true} and the
individuals, and variable/individual comparisons are dropped entirely.
Query-context orders additionally treat distinct concept atoms over x as
incomparable, so one saturation answers every subsumption for a fixed
left-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import terms as T
from .terms import Clause, Literal, Term, TRUE, X, Y
from .ontology import SymbolTable

STANDARD = "standard"
ROOT = "root"
QUERY = "query"


@dataclass(frozen=True)
class TriggerShapes:
    """Role shape sets needed by the order relaxation (from clause bodies)."""

    roles_x_z: frozenset[str]   # roles S with a body atom S(x, z_i)
    roles_z_x: frozenset[str]   # roles S with a body atom S(z_i, x)

    @classmethod
    def of(cls, dl_clauses) -> "TriggerShapes":
        xz, zx = set(), set()
        for c in dl_clauses:
            for a in c.body:
                if len(a.args) != 2:
                    continue
                s, t = a.args
                if s is X and T.z_index(t):
                    xz.add(a.sym)
                elif T.z_index(s) and t is X:
                    zx.add(a.sym)
        return cls(frozenset(xz), frozenset(zx))


class GlobalPrecedence:
    """Total order on function symbols and individuals, plus the LPO memo."""

    def __init__(self, symbols: SymbolTable):
        self.fn_rank = {f: i for i, f in enumerate(symbols.functions)}
        self.individuals: dict[str, Term] = {
            name: T.indiv(name) for name in symbols.individuals}
        self._lpo_memo: dict[tuple[int, int], bool] = {}

    def _rank(self, t: Term) -> tuple:
        if t is TRUE:
            return (0,)
        if t is Y:
            return (1,)
        if t is X:
            return (2,)
        if t.kind == T.VAR:
            raise ValueError(f"{t} is not a context term")
        if t.kind == T.INDIV:
            return (3, len(t.label), t.label, t.base)
        if t.kind == T.FN:
            return (4, self.fn_rank.get(t.sym, len(self.fn_rank)))
        return (5, len(t.args), t.sym)

    def greater_symbol(self, s: Term, t: Term) -> bool:
        """The precedence > on head symbols (constants compare directly)."""
        return self._rank(s) > self._rank(t)

    def registered(self, name: str) -> bool:
        return name in self.individuals

    def register_individual(self, o: Term) -> None:
        """Rank a freshly minted nominal; its immediate prefix must be ranked."""
        if o.sym in self.individuals:
            return
        if o.label:
            prefix = T.indiv(o.base, o.label[:-1])
            if prefix.sym not in self.individuals:
                raise ValueError(f"prefix of {o} is not registered")
        self.individuals[o.sym] = o

    def extended(self, o: Term) -> "GlobalPrecedence":
        """Snapshot with one more nominal; shares the memo (ranks are stable)."""
        p = object.__new__(GlobalPrecedence)
        p.fn_rank = self.fn_rank
        p.individuals = dict(self.individuals)
        p._lpo_memo = self._lpo_memo
        p.register_individual(o)
        return p

    def lpo_greater(self, s: Term, t: Term) -> bool:
        """Standard LPO with variables x, y treated as precedence constants."""
        if s is t:
            return False
        key = (id(s), id(t))
        memo = self._lpo_memo
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = False
        for a in s.args:
            if a is t or self.lpo_greater(a, t):
                out = True
                break
        if not out:
            rs, rt = self._rank(s), self._rank(t)
            if rs > rt:
                out = all(self.lpo_greater(s, b) for b in t.args)
            elif rs == rt and s.args:
                for i, (a, b) in enumerate(zip(s.args, t.args)):
                    if a is b:
                        continue
                    out = self.lpo_greater(a, b) and all(
                        self.lpo_greater(s, tb) for tb in t.args[i + 1:])
                    break
        memo[key] = out
        return out


def build_precedence(symbols: SymbolTable) -> GlobalPrecedence:
    return GlobalPrecedence(symbols)


def extend_with_nominal(p: GlobalPrecedence, o: Term) -> GlobalPrecedence:
    if p.registered(o.sym):
        return p
    return p.extended(o)


_EXEMPT_KINDS = (T.INDIV,)


class ContextOrder:
    """A (root/query) context order: the relaxed LPO plus literal compare."""

    def __init__(self, prec: GlobalPrecedence, shapes: TriggerShapes,
                 mode: str = STANDARD):
        self.prec = prec
        self.shapes = shapes
        self.mode = mode
        self._lit_memo: dict[tuple[int, int], bool] = {}

    # -- predecessor-trigger shape tests (for Def. 2 condition vi) --

    def _is_pr_atom(self, t: Term) -> bool:
        if t.kind != T.PAPP:
            return False
        if len(t.args) == 1:
            return t.args[0] is Y          # B(y) for every concept B
        s, u = t.args
        if s is Y and u is X:
            return t.sym in self.shapes.roles_x_z
        if s is X and u is Y:
            return t.sym in self.shapes.roles_z_x
        return False

    def _is_prr_atom(self, t: Term) -> bool:
        if t.kind != T.PAPP:
            return False
        if len(t.args) == 1:
            return t.args[0] is Y or t.args[0].kind == T.INDIV
        s, u = t.args
        return (s is Y and u.kind == T.INDIV) or (s.kind == T.INDIV and u is Y)

    def _dropped(self, s: Term, t: Term) -> bool:
        # x/y versus individuals, both directions
        if s.kind == T.VAR and t.kind == T.INDIV:
            return True
        if s.kind == T.INDIV and t.kind == T.VAR:
            return True
        if s.kind == T.PAPP:
            pr = self._is_prr_atom(s) if self.mode == ROOT else self._is_pr_atom(s)
            if pr and not (t is X or t is Y or t is TRUE or t.kind == T.INDIV):
                return True
            if (self.mode == QUERY and t.kind == T.PAPP
                    and len(s.args) == 1 and s.args[0] is X
                    and len(t.args) == 1 and t.args[0] is X):
                return True
        return False

    def greater(self, s: Term, t: Term) -> bool:
        if s is t:
            return False
        return self.prec.lpo_greater(s, t) and not self._dropped(s, t)

    def greater_lit(self, l1: Literal, l2: Literal) -> bool:
        """Multiset extension of the term order on literal multisets."""
        if l1 is l2:
            return False
        key = (id(l1), id(l2))
        hit = self._lit_memo.get(key)
        if hit is not None:
            return hit
        m = list(T.literal_multiset(l1))
        n = list(T.literal_multiset(l2))
        for x in list(m):
            if x in n:
                m.remove(x)
                n.remove(x)
        if not n:
            out = bool(m)
        elif not m:
            out = False
        else:
            out = all(any(self.greater(b, a) for b in m) for a in n)
        self._lit_memo[key] = out
        return out

    def geq_lit(self, l1: Literal, l2: Literal) -> bool:
        return l1 is l2 or self.greater_lit(l1, l2)

    # -- clause-side helpers --

    def eligible(self, c: Clause, l: Literal) -> bool:
        """No other head literal is >= l ("Delta does not dominate l")."""
        return all(not self.greater_lit(l2, l) for l2 in c.head if l2 is not l)

    def eligible_literals(self, c: Clause) -> list[Literal]:
        return [l for l in c.head if self.eligible(c, l)]

    def eligible_atoms(self, c: Clause) -> list[Term]:
        return [l.atom for l in c.head if l.is_atom and self.eligible(c, l)]


def context_greater(order: ContextOrder, a, b) -> bool:
    """Order check on two terms or two literals, per the order's mode."""
    if isinstance(a, Literal) and isinstance(b, Literal):
        return order.greater_lit(a, b)
    if isinstance(a, Term) and isinstance(b, Term):
        return order.greater(a, b)
    raise TypeError("operands must be two terms or two literals")
