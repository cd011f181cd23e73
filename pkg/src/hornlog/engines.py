"""Engine handles and the answer protocol.

The host-level surface mirrors the object-language builtins one-to-one:
new_engine, get, stop, to_engine (return/from_engine run inside engine
code). get never raises: every outcome is normalized to The(term) or NO,
and machine faults are reported on the session's diagnostic channel.
"""

from __future__ import annotations

from .machine import MachineFault, builtin
from .terms import Atom, Int, Struct, Symbol, deref, unify


class The:
    """A successful answer holding a standalone copy of the instance."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return f"The({self.value!r})"


class _No:
    __slots__ = ()

    def __repr__(self):
        return "NO"


NO = _No()

_ENGINE = Symbol("$engine")


class EngineRef:
    """Unforgeable per-boot handle for one engine."""

    __slots__ = ("id", "session")

    def __init__(self, eid: int, session):
        self.id = eid
        self.session = session

    @property
    def term(self) -> Struct:
        """The object-language form of this handle: '$engine'(Id)."""
        return Struct(_ENGINE, (Int(self.id),))

    def get(self):
        """Next answer: The(term) or NO; NO forever once produced."""
        return self.session.get_by_id(self.id)

    def stop(self):
        self.session.stop_id(self.id)

    def to_engine(self, data) -> bool:
        return self.session.to_id(self.id, data)

    def __repr__(self):
        return f"EngineRef({self.id})"


def engine_id(t) -> int:
    """Extract the id from a '$engine'(Int) handle term or fault."""
    t = deref(t)
    if type(t) is Struct and t.functor is _ENGINE and len(t.args) == 1:
        i = deref(t.args[0])
        if type(i) is Int:
            return i.value
    raise MachineFault("type_error", t)


@builtin("new_engine", 3)
def _bi_new_engine(m, args, rest):
    ref = m.session.spawn(args[0], args[1])
    return unify(args[2], ref.term, m.trail)


@builtin("get", 2)
def _bi_get(m, args, rest):
    ans = m.session.get_by_id(engine_id(args[0]))
    t = Atom("no") if ans is NO else Struct("the", (ans.value,))
    return unify(args[1], t, m.trail)


@builtin("stop", 1)
def _bi_stop(m, args, rest):
    m.session.stop_id(engine_id(args[0]))
    return True


@builtin("to_engine", 2)
def _bi_to_engine(m, args, rest):
    return m.session.to_id(engine_id(args[0]), args[1])
