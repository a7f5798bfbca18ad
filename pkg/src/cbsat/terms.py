"""Two-sorted term and clause model.

Terms come in two sorts: sort-a terms denote domain elements (variables,
individuals, unary function applications) and sort-p terms denote atoms
(a concept applied to one a-term, or a role applied to two a-terms, plus
the constant ``true``).  Every literal is an equality or inequality; an
atom ``A`` abbreviates ``A = true`` and the only p-sort inequality is
``true != true``.

Terms are hash-consed: structurally equal terms are the same object, so
set membership and order comparisons reduce to identity checks.  The
intern table is the only shared mutable state and serialises insertions.
"""

from __future__ import annotations

import threading
from typing import Iterator, Optional

VAR = "var"
INDIV = "ind"
FN = "fn"
PAPP = "p"
TRUEK = "true"

Position = tuple[int, ...]
ROOT_POS: Position = ()


class Term:
    """An interned term. Compare with ``is`` / ``==`` (same thing here)."""

    __slots__ = (
        "kind", "sym", "args", "base", "label",
        "key", "is_ground", "has_fn", "vars",
    )

    def __init__(self, kind: str, sym: str, args: tuple["Term", ...],
                 base: str = "", label: tuple = ()):
        self.kind = kind
        self.sym = sym
        self.args = args
        self.base = base      # individuals: parsed base name
        self.label = label    # individuals: nominal label, tuple of (role, index)
        self.key = self._make_key()
        self.is_ground = kind != VAR and all(a.is_ground for a in args)
        self.has_fn = kind == FN or any(a.has_fn for a in args)
        vs: frozenset[Term] = frozenset()
        if kind == VAR:
            vs = frozenset((self,))
        elif args:
            vs = frozenset().union(*(a.vars for a in args))
        self.vars = vs

    def _make_key(self) -> tuple:
        return (self.kind, self.sym) + tuple(a.key for a in self.args)

    def __repr__(self) -> str:
        return render_term(self)

    # identity semantics via interning; default object __eq__/__hash__ apply.

    def subterms(self) -> Iterator[tuple[Position, "Term"]]:
        """All positions (integer strings, root = empty) with subterms."""
        yield ROOT_POS, self
        for i, a in enumerate(self.args, start=1):
            for p, s in a.subterms():
                yield (i,) + p, s

    def at(self, pos: Position) -> "Term":
        t = self
        for i in pos:
            if not 1 <= i <= len(t.args):
                raise ValueError(f"invalid position {pos} in {t}")
            t = t.args[i - 1]
        return t


_intern_lock = threading.Lock()
_intern: dict[tuple, Term] = {}


def _mk(kind: str, sym: str, args: tuple[Term, ...] = (),
        base: str = "", label: tuple = ()) -> Term:
    key = (kind, sym) + tuple(id(a) for a in args)
    t = _intern.get(key)
    if t is None:
        with _intern_lock:
            t = _intern.get(key)
            if t is None:
                t = Term(kind, sym, args, base, label)
                _intern[key] = t
    return t


def var(name: str) -> Term:
    return _mk(VAR, name)


X = var("x")
Y = var("y")
TRUE = _mk(TRUEK, "true")


def z(i: int) -> Term:
    """Neighbour variable z_i; the index is explicit (i >= 1)."""
    if i < 1:
        raise ValueError("neighbour variable index must be >= 1")
    return _mk(VAR, f"z{i}")


def z_index(t: Term) -> Optional[int]:
    if t.kind == VAR and t.sym.startswith("z"):
        return int(t.sym[1:])
    return None


def indiv(base: str, label: tuple = ()) -> Term:
    """An individual o_rho; ``label`` is a tuple of (role, index) pairs."""
    name = base + "".join(f"@{r}#{i}" for r, i in label)
    return _mk(INDIV, name, base=base, label=label)


def fn(sym: str, arg: Term) -> Term:
    return _mk(FN, sym, (arg,))


def papp(sym: str, *args: Term) -> Term:
    if len(args) not in (1, 2):
        raise ValueError("p-terms are unary concepts or binary roles")
    return _mk(PAPP, sym, tuple(args))


def render_term(t: Term) -> str:
    if not t.args:
        return t.sym
    return f"{t.sym}({','.join(render_term(a) for a in t.args)})"


def is_pterm(t: Term) -> bool:
    return t.kind in (PAPP, TRUEK)


Substitution = dict[Term, Term]


def apply_substitution(t: Term, sigma: Substitution) -> Term:
    """Simultaneous substitution; identity mappings may be omitted."""
    if t.kind == VAR:
        return sigma.get(t, t)
    if not t.args or not (t.vars & sigma.keys()):
        return t
    args = tuple(apply_substitution(a, sigma) for a in t.args)
    return _mk(t.kind, t.sym, args, t.base, t.label)


def compose(sigma: Substitution, tau: Substitution) -> Substitution:
    """sigma then tau, as a single substitution."""
    out = {v: apply_substitution(t, tau) for v, t in sigma.items()}
    for v, t in tau.items():
        out.setdefault(v, t)
    return {v: t for v, t in out.items() if v is not t}


def replace_subterm(t: Term, pos: Position, r: Term) -> Term:
    """t[r]_pos.  An invalid position signals a caller bug."""
    if not pos:
        return r
    i = pos[0]
    if not 1 <= i <= len(t.args):
        raise ValueError(f"invalid position {pos} in {t}")
    args = list(t.args)
    args[i - 1] = replace_subterm(args[i - 1], pos[1:], r)
    return _mk(t.kind, t.sym, tuple(args), t.base, t.label)


class Literal:
    """An equality (pos=True) or inequality between two same-sort terms.

    Atoms are stored as ``A = true``.  Equality sides are normalised by
    the structural key so ``s = t`` and ``t = s`` intern identically.
    """

    __slots__ = ("pos", "left", "right", "key", "is_ground")

    def __init__(self, pos: bool, left: Term, right: Term):
        self.pos = pos
        self.left = left
        self.right = right
        self.key = (0 if pos else 1, left.key, right.key)
        self.is_ground = left.is_ground and right.is_ground

    @property
    def is_atom(self) -> bool:
        return self.pos and self.right is TRUE and self.left is not TRUE

    @property
    def atom(self) -> Term:
        return self.left

    def __repr__(self) -> str:
        return render_literal(self)


_lit_intern: dict[tuple, Literal] = {}


def lit(pos: bool, left: Term, right: Term) -> Literal:
    if is_pterm(left) != is_pterm(right):
        raise ValueError(f"literal sides differ in sort: {left} vs {right}")
    if is_pterm(left):
        # p-sort: only A = true and true != true exist (Def. of context literals)
        if pos:
            if right is not TRUE and left is not TRUE:
                raise ValueError("p-equalities must have 'true' on one side")
            if right is not TRUE:
                left, right = right, left
        else:
            if left is not TRUE or right is not TRUE:
                raise ValueError("the only p-inequality is true != true")
    elif left.key > right.key:
        left, right = right, left
    key = (pos, id(left), id(right))
    l = _lit_intern.get(key)
    if l is None:
        with _intern_lock:
            l = _lit_intern.get(key)
            if l is None:
                l = Literal(pos, left, right)
                _lit_intern[key] = l
    return l


def atom(a: Term) -> Literal:
    return lit(True, a, TRUE)


def eq(s: Term, t: Term) -> Literal:
    return lit(True, s, t)


def neq(s: Term, t: Term) -> Literal:
    return lit(False, s, t)


TRUE_NEQ_TRUE = lit(False, TRUE, TRUE)


def literal_multiset(l: Literal) -> tuple[Term, ...]:
    """Equality s=t as {s,t}; inequality s!=t as {s,s,t,t}."""
    if l.pos:
        return (l.left, l.right)
    return (l.left, l.left, l.right, l.right)


def apply_to_literal(l: Literal, sigma: Substitution) -> Literal:
    return lit(l.pos, apply_substitution(l.left, sigma),
               apply_substitution(l.right, sigma))


def render_literal(l: Literal) -> str:
    if l.is_atom:
        return render_term(l.left)
    op = "=" if l.pos else "!="
    return f"{render_term(l.left)} {op} {render_term(l.right)}"


class Clause:
    """Body atoms -> head literals; both duplicate-free, canonically sorted."""

    __slots__ = ("body", "head", "key", "text")

    def __init__(self, body: tuple[Term, ...], head: tuple[Literal, ...]):
        self.body = body
        self.head = head
        self.key = (tuple(a.key for a in body), tuple(l.key for l in head))
        self.text = render_clause(self)

    def __repr__(self) -> str:
        return self.text

    def __eq__(self, other) -> bool:
        return isinstance(other, Clause) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


def clause(body, head) -> Clause:
    b = tuple(sorted(set(body), key=lambda a: a.key))
    h = tuple(sorted(set(head), key=lambda l: l.key))
    for a in b:
        if not (is_pterm(a) and a is not TRUE):
            raise ValueError(f"clause bodies contain atoms only, got {a}")
    return Clause(b, h)


def apply_to_clause(c: Clause, sigma: Substitution) -> Clause:
    return clause(
        tuple(apply_substitution(a, sigma) for a in c.body),
        tuple(apply_to_literal(l, sigma) for l in c.head),
    )


def render_clause(c: Clause) -> str:
    b = " ^ ".join(render_term(a) for a in c.body) if c.body else "top"
    h = " v ".join(render_literal(l) for l in c.head) if c.head else "bot"
    return f"{b} -> {h}"


# --- context clause classification -----------------------------------------

VALID_CONTEXT = "valid-context"
VALID_ROOT = "valid-root-context"
VALID_QUERY = "valid-query"


def _is_context_aterm(t: Term) -> bool:
    if t is X or t is Y or t.kind == INDIV:
        return True
    return t.kind == FN and t.args[0] is X


def _is_root_aterm(t: Term) -> bool:
    if t is Y or t.kind == INDIV:
        return True
    return t.kind == FN and t.args[0].kind == INDIV


_CONTEXT_P_SHAPES = {
    # concept argument shapes / role argument shape pairs, per Def. 1
    1: {("x",), ("y",), ("f(x)",), ("o",)},
    2: {("x", "y"), ("y", "x"), ("x", "x"), ("x", "f(x)"), ("f(x)", "x"),
        ("x", "o"), ("o", "x"), ("o", "o")},
}


def _arg_shape(t: Term, root: bool) -> Optional[str]:
    if t.kind == INDIV:
        return "o"
    if root:
        if t is Y:
            return "x"  # y plays the old x/y roles uniformly after {x -> o}
        if t.kind == FN and t.args[0].kind == INDIV:
            return "f(x)"
        return None
    if t is X:
        return "x"
    if t is Y:
        return "y"
    if t.kind == FN and t.args[0] is X:
        return "f(x)"
    return None


def _is_context_pterm(t: Term, root: bool) -> bool:
    if t.kind != PAPP:
        return False
    shapes = tuple(_arg_shape(a, root) for a in t.args)
    if any(s is None for s in shapes):
        return False
    if root:
        # root p-terms are {x -> o'} images of context p-terms; with y
        # reported as "x" above, every combination in the table is legal
        # except those that required a real x and a real y simultaneously,
        # which collapse to S(y,y) - still legal.
        return True
    return shapes in _CONTEXT_P_SHAPES[len(shapes)]


def _is_body_atom(t: Term, root: bool) -> bool:
    # function symbols are banned from bodies; non-root bodies use only
    # B(x), S(x,y), S(y,x) and ground atoms, root bodies only root shapes
    if t.kind != PAPP or t.has_fn:
        return False
    if not _is_context_pterm(t, root):
        return False
    if t.is_ground:
        return True
    if root:
        return True
    if len(t.args) == 1:
        return t.args[0] is X
    return X in t.args and (Y in t.args or t.args == (X, X))


def _is_context_literal(l: Literal, root: bool) -> bool:
    if l is TRUE_NEQ_TRUE:
        return True
    if is_pterm(l.left):
        return l.is_atom and _is_context_pterm(l.left, root)
    ok = _is_root_aterm if root else _is_context_aterm
    return ok(l.left) and ok(l.right)


def classify_clause(c: Clause, is_root: bool = False) -> str:
    """Accepts exactly the clause shapes enumerated for (root) contexts.

    Returns one of the valid-* markers or ``"invalid(<reason>)"``.
    """
    for a in c.body:
        if not _is_body_atom(a, is_root):
            return f"invalid(body atom {a})"
    for l in c.head:
        if not _is_context_literal(l, is_root):
            return f"invalid(head literal {l})"
    if is_root:
        return VALID_ROOT
    if all(len(a.args) == 1 and a.args[0] is X for a in c.body) and all(
        l.is_atom and len(l.atom.args) == 1 and l.atom.args[0] is X
        for l in c.head
    ):
        return VALID_QUERY
    return VALID_CONTEXT
