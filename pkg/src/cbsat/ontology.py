"""Axiom parsing, clausification, DL-clause validation, fragment detection.

The input format is line-oriented UTF-8 with ``#`` comments.  Two levels
are accepted: axiom syntax and raw clause syntax::

    C1 ^ C2 -> D1 v D2          concept inclusion
    C -> >= n R . D             at-least restriction (n >= 1)
    exists R . C -> D           existential on the left
    C -> <= n R . D             at-most restriction (n >= 0)
    R -> S                      role inclusion (both names must be roles)
    R -> inv(S)                 role inclusion into an inverse
    {o} -> C                    nominal assertion
    C -> {o}                    concept-to-nominal inclusion
    A(x) ^ S(x,z1) -> z1 = z2   raw clause (variables x, z1, z2, ...)

Role/concept namespaces are inferred from syntactic positions; a plain
``X -> Y`` line is a role inclusion iff either side is known to be a
role, and a concept inclusion otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from . import terms as T
from .terms import Clause, Literal, Term, X, clause

RESERVED = {"x", "y", "top", "bot", "true", "exists", "inv", "v"}
_Z_RE = re.compile(r"^z[0-9]+$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {msg}" if line else msg)
        self.line = line
        self.col = col


@dataclass
class SymbolTable:
    """Concept/role/function/individual namespaces; pairwise disjoint."""

    concepts: list[str] = field(default_factory=list)
    roles: list[str] = field(default_factory=list)
    functions: list[str] = field(default_factory=list)     # ordered: declaration rank
    individuals: list[str] = field(default_factory=list)   # parsed, label eps
    synthetic_roles: set[str] = field(default_factory=set)  # DL4-minted S@B2@n

    def _namespaces(self, name: str) -> list[str]:
        out = []
        for ns, pool in (("concept", self.concepts), ("role", self.roles),
                         ("function", self.functions),
                         ("individual", self.individuals)):
            if name in pool:
                out.append(ns)
        return out

    def add(self, ns: str, name: str) -> None:
        taken = self._namespaces(name)
        if taken and taken != [ns]:
            raise ParseError(f"{name!r} already declared as a {taken[0]}")
        pool = {"concept": self.concepts, "role": self.roles,
                "function": self.functions, "individual": self.individuals}[ns]
        if name not in pool:
            pool.append(name)

    def check_disjoint(self) -> None:
        seen: dict[str, str] = {}
        for ns, pool in (("concept", self.concepts), ("role", self.roles),
                         ("function", self.functions),
                         ("individual", self.individuals)):
            for name in pool:
                if name in seen:
                    raise ParseError(f"{name!r} used as both {seen[name]} and {ns}")
                seen[name] = ns


# --- axioms ------------------------------------------------------------------

DL1, DL2, DL3, DL4, DL5, DL6, DL7, DL8, RAW = (
    "DL1", "DL2", "DL3", "DL4", "DL5", "DL6", "DL7", "DL8", "RAW")


@dataclass
class Axiom:
    kind: str
    lhs: tuple[str, ...] = ()     # DL1 conjuncts
    rhs: tuple[str, ...] = ()     # DL1 disjuncts
    b1: str = ""
    b2: str = ""
    n: int = 0
    role: str = ""
    role2: str = ""
    o: str = ""
    raw: Optional[Clause] = None
    ordinal: int = 0              # 1-based position in the input

    def __repr__(self) -> str:
        return f"Axiom({self.kind}@{self.ordinal})"


# --- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(->|>=|<=|!=|=|\^|\.|\(|\)|\{|\}|,|[A-Za-z_][A-Za-z0-9_]*|[0-9]+|v\b|.)"
)


def _tokenize(line: str, lno: int) -> list[tuple[str, int]]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if not m:
            break
        tok = m.group(1)
        col = m.start(1) + 1
        pos = m.end()
        if tok.strip() == "":
            continue
        if not (tok in {"->", ">=", "<=", "!=", "=", "^", ".", "(", ")",
                        "{", "}", ","} or tok.isdigit() or _IDENT_RE.match(tok)):
            raise ParseError(f"unknown token {tok!r}", lno, col)
        toks.append((tok, col))
    return toks


class _LineParser:
    def __init__(self, toks: list[tuple[str, int]], lno: int):
        self.toks = toks
        self.lno = lno
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0] if self.i < len(self.toks) else ""

    def col(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else (
            self.toks[-1][1] + 1 if self.toks else 1)

    def next(self) -> str:
        tok = self.peek()
        if not tok:
            self.err("unexpected end of line")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            self.err(f"expected {tok!r}, got {got!r}")

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def err(self, msg: str):
        raise ParseError(msg, self.lno, self.col())

    def ident(self, what: str = "name") -> str:
        tok = self.next()
        if not _IDENT_RE.match(tok) or tok.isdigit():
            self.err(f"expected {what}, got {tok!r}")
        if tok in RESERVED or _Z_RE.match(tok):
            self.err(f"{tok!r} is reserved and cannot name a {what}")
        if "@" in tok:
            self.err(f"character '@' is reserved in identifiers: {tok!r}")
        return tok

    def number(self) -> int:
        tok = self.next()
        if not tok.isdigit():
            self.err(f"expected a number, got {tok!r}")
        return int(tok)


@dataclass
class Ontology:
    axioms: list[Axiom]
    symbols: SymbolTable
    dl_clauses: list[Clause] = field(default_factory=list)

    @property
    def max_z_index(self) -> int:
        best = 0
        for c in self.dl_clauses:
            for a in c.body:
                for v in a.vars:
                    zi = T.z_index(v)
                    if zi:
                        best = max(best, zi)
        return best


# --- parsing -----------------------------------------------------------------

def parse(text: str) -> Ontology:
    """Parse ontology text into axioms plus a symbol table, then clausify."""
    lines = text.splitlines()
    raw_lines: list[tuple[int, list[tuple[str, int]]]] = []
    for lno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        raw_lines.append((lno, _tokenize(body, lno)))

    symbols = SymbolTable()
    pending: list[tuple[int, str, str]] = []
    axioms: list[Axiom] = []

    def finish(ax: Axiom, lno: int) -> None:
        ax.ordinal = len(axioms) + 1
        axioms.append(ax)

    # first pass: parse every line whose form is unambiguous, record the
    # namespace evidence it carries; plain NAME -> NAME lines wait.
    for lno, toks in raw_lines:
        p = _LineParser(toks, lno)
        shape = [t for t, _ in toks]
        if "(" in shape and "{" not in shape and "inv" not in shape:
            finish(_parse_raw_clause(p, symbols), lno)
        elif shape and shape[0] == "{":
            finish(_parse_dl7(p, symbols), lno)
        elif "{" in shape:
            finish(_parse_dl8(p, symbols), lno)
        elif shape and shape[0] == "exists":
            finish(_parse_dl3(p, symbols), lno)
        elif ">=" in shape:
            finish(_parse_dl2(p, symbols), lno)
        elif "<=" in shape:
            finish(_parse_dl4(p, symbols), lno)
        elif "inv" in shape:
            finish(_parse_dl6(p, symbols), lno)
        elif "^" in shape or "v" in shape or "top" in shape or "bot" in shape:
            finish(_parse_dl1(p, symbols), lno)
        else:
            a = p.ident()
            p.expect("->")
            b = p.ident()
            if not p.done():
                p.err("trailing tokens")
            pending.append((lno, a, b))

    # second pass: resolve NAME -> NAME lines with the collected evidence
    for lno, a, b in pending:
        a_role = a in symbols.roles
        b_role = b in symbols.roles
        a_conc = a in symbols.concepts
        b_conc = b in symbols.concepts
        if (a_role and b_conc) or (a_conc and b_role):
            raise ParseError(f"{a!r} -> {b!r} mixes a role and a concept", lno, 1)
        if a_role or b_role:
            symbols.add("role", a)
            symbols.add("role", b)
            ax = Axiom(DL5, role=a, role2=b)
        else:
            symbols.add("concept", a)
            symbols.add("concept", b)
            ax = Axiom(DL1, lhs=(a,), rhs=(b,))
        ax.ordinal = len(axioms) + 1
        axioms.append(ax)

    symbols.check_disjoint()
    onto = Ontology(axioms=axioms, symbols=symbols)
    for ax in onto.axioms:
        onto.dl_clauses.extend(clausify(ax, symbols))
    for c in onto.dl_clauses:
        v = validate_dl_clause(c)
        if v != "ok":
            raise ParseError(f"clause {c} violates DL restrictions: {v}")
    return onto


def _parse_concept_list(p: _LineParser, symbols: SymbolTable,
                        sep: str, empty: str) -> tuple[str, ...]:
    if p.peek() == empty:
        p.next()
        return ()
    out = [p.ident("concept")]
    while p.peek() == sep:
        p.next()
        out.append(p.ident("concept"))
    for c in out:
        symbols.add("concept", c)
    return tuple(out)


def _parse_dl1(p: _LineParser, symbols: SymbolTable) -> Axiom:
    lhs = _parse_concept_list(p, symbols, "^", "top")
    p.expect("->")
    rhs = _parse_concept_list(p, symbols, "v", "bot")
    if not p.done():
        p.err("trailing tokens")
    return Axiom(DL1, lhs=lhs, rhs=rhs)


def _parse_dl2(p: _LineParser, symbols: SymbolTable) -> Axiom:
    b1 = p.ident("concept")
    p.expect("->")
    p.expect(">=")
    n = p.number()
    if n < 1:
        p.err("at-least cardinality must be >= 1")
    role = p.ident("role")
    p.expect(".")
    b2 = p.ident("concept")
    if not p.done():
        p.err("trailing tokens")
    symbols.add("concept", b1)
    symbols.add("role", role)
    symbols.add("concept", b2)
    return Axiom(DL2, b1=b1, n=n, role=role, b2=b2)


def _parse_dl3(p: _LineParser, symbols: SymbolTable) -> Axiom:
    p.expect("exists")
    role = p.ident("role")
    p.expect(".")
    b1 = p.ident("concept")
    p.expect("->")
    b2 = p.ident("concept")
    if not p.done():
        p.err("trailing tokens")
    symbols.add("role", role)
    symbols.add("concept", b1)
    symbols.add("concept", b2)
    return Axiom(DL3, role=role, b1=b1, b2=b2)


def _parse_dl4(p: _LineParser, symbols: SymbolTable) -> Axiom:
    b1 = p.ident("concept")
    p.expect("->")
    p.expect("<=")
    n = p.number()
    role = p.ident("role")
    p.expect(".")
    b2 = p.ident("concept")
    if not p.done():
        p.err("trailing tokens")
    symbols.add("concept", b1)
    symbols.add("role", role)
    symbols.add("concept", b2)
    return Axiom(DL4, b1=b1, n=n, role=role, b2=b2)


def _parse_dl6(p: _LineParser, symbols: SymbolTable) -> Axiom:
    r1 = p.ident("role")
    p.expect("->")
    p.expect("inv")
    p.expect("(")
    r2 = p.ident("role")
    p.expect(")")
    if not p.done():
        p.err("trailing tokens")
    symbols.add("role", r1)
    symbols.add("role", r2)
    return Axiom(DL6, role=r1, role2=r2)


def _parse_dl7(p: _LineParser, symbols: SymbolTable) -> Axiom:
    p.expect("{")
    o = p.ident("individual")
    p.expect("}")
    p.expect("->")
    b1 = p.ident("concept")
    if not p.done():
        p.err("trailing tokens")
    symbols.add("individual", o)
    symbols.add("concept", b1)
    return Axiom(DL7, o=o, b1=b1)


def _parse_dl8(p: _LineParser, symbols: SymbolTable) -> Axiom:
    b1 = p.ident("concept")
    p.expect("->")
    p.expect("{")
    o = p.ident("individual")
    p.expect("}")
    if not p.done():
        p.err("trailing tokens")
    symbols.add("concept", b1)
    symbols.add("individual", o)
    return Axiom(DL8, b1=b1, o=o)


def _parse_raw_term(p: _LineParser, symbols: SymbolTable) -> Term:
    tok = p.next()
    if tok == "x":
        return X
    if _Z_RE.match(tok):
        return T.z(int(tok[1:]))
    if tok == "y":
        p.err("variable 'y' cannot occur in DL clauses")
    if not _IDENT_RE.match(tok) or tok.isdigit():
        p.err(f"expected a term, got {tok!r}")
    if "@" in tok:
        p.err(f"character '@' is reserved in identifiers: {tok!r}")
    if p.peek() == "(":
        p.next()
        arg = _parse_raw_term(p, symbols)
        p.expect(")")
        symbols.add("function", tok)
        return T.fn(tok, arg)
    symbols.add("individual", tok)
    return T.indiv(tok)


def _parse_raw_atom(p: _LineParser, symbols: SymbolTable) -> Term:
    name = p.ident("predicate")
    p.expect("(")
    a1 = _parse_raw_term(p, symbols)
    if p.peek() == ",":
        p.next()
        a2 = _parse_raw_term(p, symbols)
        p.expect(")")
        symbols.add("role", name)
        return T.papp(name, a1, a2)
    p.expect(")")
    symbols.add("concept", name)
    return T.papp(name, a1)


def _parse_raw_literal(p: _LineParser, symbols: SymbolTable) -> Literal:
    start = p.i
    first = p.next()
    if p.peek() == "(" and _IDENT_RE.match(first):
        # could be an atom or a function application inside an equality;
        # decide by what follows the closing paren
        p.i = start
        depth = 0
        j = p.i
        while j < len(p.toks):
            tok = p.toks[j][0]
            if tok == "(":
                depth += 1
            elif tok == ")":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        after = p.toks[j + 1][0] if j + 1 < len(p.toks) else ""
        if after in ("=", "!="):
            left = _parse_raw_term(p, symbols)
            op = p.next()
            right = _parse_raw_term(p, symbols)
            return T.lit(op == "=", left, right)
        return T.atom(_parse_raw_atom(p, symbols))
    p.i = start
    left = _parse_raw_term(p, symbols)
    op = p.next()
    if op not in ("=", "!="):
        p.err(f"expected '=' or '!=', got {op!r}")
    right = _parse_raw_term(p, symbols)
    return T.lit(op == "=", left, right)


def _parse_raw_clause(p: _LineParser, symbols: SymbolTable) -> Axiom:
    body: list[Term] = []
    if p.peek() == "top":
        p.next()
    else:
        while True:
            a = _parse_raw_atom(p, symbols)
            body.append(a)
            if p.peek() == "^":
                p.next()
                continue
            break
    p.expect("->")
    head: list[Literal] = []
    if p.peek() == "bot":
        p.next()
    else:
        while True:
            head.append(_parse_raw_literal(p, symbols))
            if p.peek() == "v":
                p.next()
                continue
            break
    if not p.done():
        p.err("trailing tokens")
    return Axiom(RAW, raw=clause(body, head))


# --- clausification (Table 1) ------------------------------------------------

def _conc(name: str, arg: Term) -> Term:
    return T.papp(name, arg)


def _role(name: str, a: Term, b: Term) -> Term:
    return T.papp(name, a, b)


def dl2_function_name(ordinal: int, i: int) -> str:
    return f"f@Axiom#{ordinal}@{i}"


def dl4_role_name(role: str, b2: str, n: int) -> str:
    return f"{role}@{b2}@{n}"


def clausify(ax: Axiom, symbols: SymbolTable) -> list[Clause]:
    """Emit exactly the Table-1 right-column clauses for one axiom."""
    z1 = T.z(1)
    if ax.kind == RAW:
        return [ax.raw]
    if ax.kind == DL1:
        body = [_conc(c, X) for c in ax.lhs]
        head = [T.atom(_conc(c, X)) for c in ax.rhs]
        return [clause(body, head)]
    if ax.kind == DL2:
        fs = []
        for i in range(1, ax.n + 1):
            name = dl2_function_name(ax.ordinal, i)
            symbols.add("function", name)
            fs.append(T.fn(name, X))
        b1 = _conc(ax.b1, X)
        out = [clause([b1], [T.atom(_conc(ax.b2, f))]) for f in fs]
        out += [clause([b1], [T.atom(_role(ax.role, X, f))]) for f in fs]
        out += [clause([b1], [T.neq(fs[i], fs[j])])
                for i in range(ax.n) for j in range(i + 1, ax.n)]
        return out
    if ax.kind == DL3:
        return [clause([_role(ax.role, z1, X), _conc(ax.b1, X)],
                       [T.atom(_conc(ax.b2, z1))])]
    if ax.kind == DL4:
        sname = dl4_role_name(ax.role, ax.b2, ax.n)
        symbols.add("role", sname)
        symbols.synthetic_roles.add(sname)
        rename = clause([_role(ax.role, z1, X), _conc(ax.b2, X)],
                        [T.atom(_role(sname, z1, X))])
        zs = [T.z(i) for i in range(1, ax.n + 2)]
        body = [_conc(ax.b1, X)] + [_role(sname, X, zi) for zi in zs]
        head = [T.eq(zs[i], zs[j])
                for i in range(len(zs)) for j in range(i + 1, len(zs))]
        return [rename, clause(body, head)]
    if ax.kind == DL5:
        return [clause([_role(ax.role, z1, X)], [T.atom(_role(ax.role2, z1, X))])]
    if ax.kind == DL6:
        return [clause([_role(ax.role, z1, X)], [T.atom(_role(ax.role2, X, z1))])]
    if ax.kind == DL7:
        return [clause([], [T.atom(_conc(ax.b1, T.indiv(ax.o)))])]
    if ax.kind == DL8:
        return [clause([_conc(ax.b1, X)], [T.eq(X, T.indiv(ax.o))])]
    raise ValueError(f"unknown axiom kind {ax.kind}")


# --- DL-clause validation ------------------------------------------------------

def _is_dl_aterm(t: Term) -> bool:
    if t is X or t.kind == T.INDIV or T.z_index(t):
        return True
    return t.kind == T.FN and t.args[0] is X


def _is_dl_pterm(t: Term) -> bool:
    if t.kind != T.PAPP:
        return False
    if len(t.args) == 1:
        a = t.args[0]
        return a is X or a.kind == T.INDIV or T.z_index(a) is not None or (
            a.kind == T.FN and a.args[0] is X)
    a, b = t.args
    shapes = []
    for s in (a, b):
        if T.z_index(s) is not None:
            shapes.append("z")
        elif s is X:
            shapes.append("x")
        elif s.kind == T.FN and s.args[0] is X:
            shapes.append("f")
        elif s.kind == T.INDIV:
            shapes.append("o")
        else:
            return False
    return tuple(shapes) in {("z", "x"), ("x", "z"), ("x", "f"), ("f", "x"),
                             ("o", "x"), ("x", "o"), ("x", "x"),
                             ("o", "o"), ("o", "f"), ("f", "o")}


def validate_dl_clause(c: Clause) -> str:
    """'ok' or a violation message; enforces the body/head restrictions."""
    body_zs: set[Term] = set()
    for a in c.body:
        if a.kind != T.PAPP:
            return f"body atom {a} is not a p-term"
        if len(a.args) == 1:
            if a.args[0] is not X:
                return f"body concept atom must be B(x): {a}"
        else:
            s, t = a.args
            zi_s, zi_t = T.z_index(s), T.z_index(t)
            if not ((zi_s and t is X) or (s is X and zi_t)):
                return f"body role atom must be S(z,x) or S(x,z): {a}"
        body_zs |= {v for v in a.vars if T.z_index(v)}
    head_zs: set[Term] = set()
    for l in c.head:
        if l is T.TRUE_NEQ_TRUE:
            continue
        if l.is_atom:
            if not _is_dl_pterm(l.atom):
                return f"head atom {l.atom} is not a DL p-term"
        else:
            if T.is_pterm(l.left):
                return f"head literal {l} is not a DL literal"
            if not (_is_dl_aterm(l.left) and _is_dl_aterm(l.right)):
                return f"head literal {l} is not over DL a-terms"
        head_zs |= {v for v in (l.left.vars | l.right.vars) if T.z_index(v)}
    if not head_zs <= body_zs:
        missing = sorted(head_zs - body_zs, key=lambda v: v.key)
        return f"head variable {missing[0]} does not occur in the body"
    if len(body_zs) >= 2:
        # must be the at-most shape: optional B(x) atoms plus S(x,z_i) atoms
        # over a single role, each z_i once, head a disjunction of z-equalities
        roles = set()
        seen_zs = []
        for a in c.body:
            if len(a.args) == 1:
                continue
            s, t = a.args
            if not (s is X and T.z_index(t)):
                return "two or more neighbour variables outside the DL4 shape"
            roles.add(a.sym)
            seen_zs.append(t)
        if len(roles) != 1 or len(seen_zs) != len(set(seen_zs)):
            return "two or more neighbour variables outside the DL4 shape"
        for l in c.head:
            if l.pos and T.z_index(l.left) and T.z_index(l.right):
                continue
            return "two or more neighbour variables outside the DL4 shape"
    return "ok"


# --- fragment detection --------------------------------------------------------

@dataclass(frozen=True)
class FragmentFlags:
    isALCHOI: bool
    isALCHOQ: bool
    isALCHIQ: bool
    isHorn: bool
    isELHO: bool


def _clause_has_counting(c: Clause) -> bool:
    zs = {v for a in c.body for v in a.vars if T.z_index(v)}
    if len(zs) >= 2:
        return True
    for l in c.head:
        if not l.pos and l.left.kind == T.FN and l.right.kind == T.FN:
            return True
        if not l.is_atom and not T.is_pterm(l.left):
            if any(T.z_index(v) for v in l.left.vars | l.right.vars):
                return True
    return False


def _clause_has_inverse(c: Clause) -> bool:
    body_first = set()
    body_second = set()
    for a in c.body:
        if len(a.args) == 2:
            s, t = a.args
            if T.z_index(s):
                body_first.add(s)
            if T.z_index(t):
                body_second.add(t)
    for l in c.head:
        if not l.is_atom or len(l.atom.args) != 2:
            continue
        s, t = l.atom.args
        # z swapped with respect to its body occurrence (DL6 shape)
        if T.z_index(s) and s in body_second:
            return True
        if T.z_index(t) and t in body_first:
            return True
        # raw nominal/inverse-flavoured role heads: S(o,x), S(x,o), S(f(x),x)
        if s.kind == T.INDIV and t is X:
            return True
        if s is X and t.kind == T.INDIV:
            return True
        if s.kind == T.FN and t is X:
            return True
    return False


def _clause_has_individual(c: Clause) -> bool:
    for a in c.body:
        if any(s.kind == T.INDIV for _, s in a.subterms()):
            return True
    for l in c.head:
        for side in (l.left, l.right):
            if any(s.kind == T.INDIV for _, s in side.subterms()):
                return True
    return False


def _elho_clause(c: Clause) -> bool:
    # DL1 (n <= m <= n+1), DL2 with n=1, DL3, DL5, DL7, DL8 right-column forms
    zs = {v for a in c.body for v in a.vars if T.z_index(v)}
    if len(zs) >= 2 or len(c.head) > 1:
        return False
    if not c.head:
        # B1 ^ ... -> bot is an ELHO concept inclusion with empty rhs
        return all(len(a.args) == 1 and a.args[0] is X for a in c.body)
    l = c.head[0]
    body_concepts_x = all(len(a.args) == 1 and a.args[0] is X for a in c.body)
    if l.is_atom:
        at = l.atom
        if len(at.args) == 1:
            arg = at.args[0]
            if arg is X and body_concepts_x:
                return True                           # DL1
            if arg.kind == T.FN and body_concepts_x and len(c.body) == 1:
                return True                           # DL2 n=1 concept part
            if T.z_index(arg) is not None:            # DL3
                role_atoms = [a for a in c.body if len(a.args) == 2]
                return (len(c.body) == 2 and len(role_atoms) == 1
                        and role_atoms[0].args[0] is arg
                        and role_atoms[0].args[1] is X)
            if arg.kind == T.INDIV and not c.body:
                return True                           # DL7
            return False
        s, t = at.args
        if s is X and t.kind == T.FN and body_concepts_x and len(c.body) == 1:
            return True                               # DL2 n=1 role part
        if T.z_index(s) and t is X and len(c.body) == 1 and not body_concepts_x:
            b = c.body[0]
            return len(b.args) == 2 and b.args[0] is s and b.args[1] is X  # DL5
        return False
    if l.pos and l.left is X and l.right.kind == T.INDIV:
        return body_concepts_x and len(c.body) == 1   # DL8
    if l.pos and l.right is X and l.left.kind == T.INDIV:
        return body_concepts_x and len(c.body) == 1
    return False


def detect_fragment(onto: Ontology) -> FragmentFlags:
    cs = onto.dl_clauses
    has_counting = any(_clause_has_counting(c) for c in cs)
    has_inverse = any(_clause_has_inverse(c) for c in cs)
    has_individual = any(_clause_has_individual(c) for c in cs)
    # clausified heads have <= 1 literal exactly for Horn input: DL1 needs
    # m <= n+1 and the DL4 at-most clause has one z-equality only when n = 1
    horn = all(len(c.head) <= 1 for c in cs)
    elho = horn and all(_elho_clause(c) for c in cs)
    return FragmentFlags(
        isALCHOI=not has_counting,
        isALCHOQ=not has_inverse,
        isALCHIQ=not has_individual,
        isHorn=horn,
        isELHO=elho,
    )
