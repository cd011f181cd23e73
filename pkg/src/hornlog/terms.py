"""Logical terms: interned symbols, variables, destructive unification, copying.

Terms belong to one engine at a time; they cross engine boundaries only as
copies. Destructive variable binding plus an undo trail is the single
mutable mechanism in the term layer.
"""

from __future__ import annotations

import itertools
import threading

_serial = itertools.count(1)
_intern_lock = threading.Lock()


def next_stamp() -> int:
    """Creation-order stamp shared by variables and choice points."""
    return next(_serial)


class Symbol:
    """Interned atom/functor name: same text, same object."""

    __slots__ = ("text", "id")
    _table: dict[str, "Symbol"] = {}

    def __new__(cls, text: str) -> "Symbol":
        sym = cls._table.get(text)
        if sym is None:
            with _intern_lock:  # threads may intern concurrently
                sym = cls._table.get(text)
                if sym is None:
                    sym = object.__new__(cls)
                    sym.text = text
                    sym.id = len(cls._table)
                    cls._table[text] = sym
        return sym

    def __repr__(self) -> str:
        return f"Symbol({self.text!r})"


class Var:
    """A logic variable: a mutable binding slot with a creation stamp."""

    __slots__ = ("ref", "serial")

    def __init__(self):
        self.ref = None
        self.serial = next(_serial)

    def __repr__(self) -> str:
        return f"_G{self.serial}" if self.ref is None else f"_G{self.serial}={self.ref!r}"


class Atom:
    """An atomic constant. Interned: equal name implies identical object."""

    __slots__ = ("sym",)
    _table: dict[str, "Atom"] = {}

    def __new__(cls, name: str) -> "Atom":
        a = cls._table.get(name)
        if a is None:
            sym = Symbol(name)  # interned before taking the lock again
            with _intern_lock:
                a = cls._table.get(name)
                if a is None:
                    a = object.__new__(cls)
                    a.sym = sym
                    cls._table[name] = a
        return a

    @property
    def name(self) -> str:
        return self.sym.text

    def __repr__(self) -> str:
        return self.sym.text


class Int:
    """A signed integer constant."""

    __slots__ = ("value",)

    def __init__(self, value: int):
        self.value = value

    def __repr__(self) -> str:
        return str(self.value)


class Struct:
    """A compound term: interned functor plus at least one argument."""

    __slots__ = ("functor", "args")

    def __init__(self, functor, args):
        self.functor = functor if isinstance(functor, Symbol) else Symbol(functor)
        self.args = tuple(args)

    @property
    def name(self) -> str:
        return self.functor.text

    def __repr__(self) -> str:
        return f"{self.functor.text}({', '.join(map(repr, self.args))})"


def mk(name: str, *args) -> Struct:
    return Struct(name, args)


NIL = Atom("[]")
TRUE = Atom("true")
DOT = Symbol(".")


def deref(t):
    """Follow the binding chain of a variable to its value or final unbound Var."""
    while type(t) is Var:
        r = t.ref
        if r is None:
            return t
        t = r
    return t


class Trail:
    """Undo log of bound variables.

    `boundary` is a creation-order stamp: only variables created before it are
    recorded. Anything younger than the newest choice point dies with the
    backtrack it would be undone by, so skipping it keeps deterministic loops
    trail-free. The default boundary records everything (standalone use).
    """

    __slots__ = ("entries", "boundary")

    def __init__(self):
        self.entries: list[Var] = []
        self.boundary: float = float("inf")

    def mark(self) -> int:
        return len(self.entries)

    def push(self, var: Var) -> None:
        if var.serial < self.boundary:
            self.entries.append(var)

    def undo_to(self, mark: int) -> None:
        entries = self.entries
        while len(entries) > mark:
            entries.pop().ref = None


def bind(var: Var, value, trail: Trail) -> None:
    var.ref = value
    if var.serial < trail.boundary:
        trail.entries.append(var)


def unify(a, b, trail: Trail) -> bool:
    """Destructively unify a and b, trailing new bindings.

    On failure the trail is rolled back to its state at entry. No occurs
    check: unifying a variable with a term containing it builds a cyclic
    term, as in mainstream Prolog.
    """
    mark = trail.mark()
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = deref(x)
        y = deref(y)
        if x is y:
            continue
        tx = type(x)
        ty = type(y)
        if tx is Var:
            if ty is Var and y.serial > x.serial:
                bind(y, x, trail)  # point the younger at the older
            else:
                bind(x, y, trail)
            continue
        if ty is Var:
            bind(y, x, trail)
            continue
        if tx is not ty:
            trail.undo_to(mark)
            return False
        if tx is Int:
            if x.value != y.value:
                trail.undo_to(mark)
                return False
            continue
        if tx is Atom:  # interned: distinct objects are distinct atoms
            trail.undo_to(mark)
            return False
        # both Struct
        xargs = x.args
        yargs = y.args
        if x.functor is not y.functor or len(xargs) != len(yargs):
            trail.undo_to(mark)
            return False
        stack.extend(zip(xargs, yargs))
    return True


def copy_term(t, vmap: dict | None = None):
    """Fresh copy of t with unbound variables consistently renamed.

    Bound variables are dereferenced and replaced by copies of their values;
    sharing of variables within t is preserved. Assumes an acyclic term.
    """
    if vmap is None:
        vmap = {}
    t = deref(t)
    tt = type(t)
    if tt is Var:
        c = vmap.get(t)
        if c is None:
            c = vmap[t] = Var()
        return c
    if tt is not Struct:
        return t
    # explicit stack: runtime lists can be deeper than the host recursion limit
    results = []
    work = [(t, True)]
    while work:
        node, expand = work.pop()
        if not expand:
            n = len(node.args)
            args = tuple(results[-n:])
            del results[-n:]
            results.append(Struct(node.functor, args))
            continue
        node = deref(node)
        tn = type(node)
        if tn is Var:
            c = vmap.get(node)
            if c is None:
                c = vmap[node] = Var()
            results.append(c)
        elif tn is Struct:
            work.append((node, False))
            for a in reversed(node.args):
                work.append((a, True))
        else:
            results.append(node)
    return results[0]


def term_equal(a, b) -> bool:
    """Structural identity of the dereferenced terms (Prolog ==), including
    variable identity."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = deref(x)
        y = deref(y)
        if x is y:
            continue
        tx = type(x)
        if tx is not type(y):
            return False
        if tx is Var or tx is Atom:
            return False
        if tx is Int:
            if x.value != y.value:
                return False
            continue
        if x.functor is not y.functor or len(x.args) != len(y.args):
            return False
        stack.extend(zip(x.args, y.args))
    return True


def variant(a, b) -> bool:
    """True when a and b are identical up to a bijective renaming of
    unbound variables."""
    fwd: dict[Var, Var] = {}
    bwd: dict[Var, Var] = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = deref(x)
        y = deref(y)
        tx = type(x)
        if tx is not type(y):
            return False
        if tx is Var:
            if fwd.setdefault(x, y) is not y or bwd.setdefault(y, x) is not x:
                return False
            continue
        if tx is Atom:
            if x is not y:
                return False
            continue
        if tx is Int:
            if x.value != y.value:
                return False
            continue
        if x.functor is not y.functor or len(x.args) != len(y.args):
            return False
        stack.extend(zip(x.args, y.args))
    return True


def term_vars(t) -> list[Var]:
    """Distinct unbound variables of t in first-occurrence order."""
    seen: dict[Var, None] = {}
    stack = [t]
    while stack:
        x = deref(stack.pop())
        if type(x) is Var:
            seen.setdefault(x, None)
        elif type(x) is Struct:
            stack.extend(reversed(x.args))
    return list(seen)


def make_list(items, tail=NIL):
    out = tail
    for x in reversed(items):
        out = Struct(DOT, (x, out))
    return out


def list_parts(t):
    """Split a list chain into (items, tail); tail is NIL for a proper list."""
    items = []
    t = deref(t)
    while type(t) is Struct and t.functor is DOT and len(t.args) == 2:
        items.append(t.args[0])
        t = deref(t.args[1])
    return items, t
