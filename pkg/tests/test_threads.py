from __future__ import annotations

import threading
import time
from collections import Counter

import pytest

from hornlog import NO, MachineFault, Session, parse_term, write_term

from conftest import answers_str


def test_hub_put_then_collect(base):
    h = base.hub(0)
    h.put(parse_term("a"))
    assert write_term(h.collect()) == "a"


def test_hub_fifo_order(base):
    h = base.hub(0)
    for i in range(5):
        h.put(parse_term(f"t({i})"))
    assert [write_term(h.collect()) for _ in range(5)] == [f"t({i})" for i in range(5)]


def test_hub_timeout_signals_failure(base):
    h = base.hub(10)
    t0 = time.monotonic()
    assert h.collect() is None
    elapsed = time.monotonic() - t0
    assert 0.010 <= elapsed <= 0.100


def test_hub_copies_at_put(base):
    from hornlog import Trail, Var, unify

    x = Var()
    t = parse_term("f(X)")
    h = base.hub(0)
    h.put(t)
    unify(t.args[0], parse_term("mutated"), Trail())
    got = h.collect()
    assert write_term(got).startswith("f(_G")  # unaffected by the later binding


def test_hub_negative_timeout_rejected(base):
    with pytest.raises(ValueError):
        base.hub(-1)
    lines = []
    s = Session(on_error=lines.append)
    assert s.answers("H", "hub_ms(-1,H)") == []
    assert lines and "type_error" in lines[0]


def test_producers_consumers_exactly_once(base):
    h = base.hub(0)
    produced = [f"m({p},{i})" for p in range(2) for i in range(10)]

    def producer(p):
        for i in range(10):
            h.put(parse_term(f"m({p},{i})"))

    collected: list[str] = []
    lock = threading.Lock()

    def consumer():
        for _ in range(5):
            item = h.collect()
            with lock:
                collected.append(write_term(item))

    threads = [threading.Thread(target=producer, args=(p,)) for p in range(2)]
    threads += [threading.Thread(target=consumer) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=10)
        assert not t.is_alive()
    assert Counter(collected) == Counter(produced)


def test_per_producer_order_preserved(base):
    h = base.hub(0)

    def producer(p):
        for i in range(20):
            h.put(parse_term(f"m({p},{i})"))

    ts = [threading.Thread(target=producer, args=(p,)) for p in range(2)]
    for t in ts:
        t.start()
    got = [h.collect() for _ in range(40)]
    for t in ts:
        t.join()
    per = {0: [], 1: []}
    for item in got:
        p = item.args[0].value
        per[p].append(item.args[1].value)
    assert per[0] == list(range(20))
    assert per[1] == list(range(20))


def test_run_bg_drives_engine_to_exhaustion(base):
    h = base.hub(0)
    goal = parse_term(f"(member(X,[a,b,c]),put({write_term(h.term)},X),fail)")
    e = base.new_engine(parse_term("_"), goal)
    tref = base.run_bg(e)
    assert tref is not None
    got = sorted(write_term(h.collect()) for _ in range(3))
    tref.join()
    assert got == ["a", "b", "c"]


def test_run_bg_hides_the_engine(base):
    e = base.new_engine("X", "(sleep_ms(30),member(X,[1,2]))")
    tref = base.run_bg(e)
    assert e.get() is NO
    assert e.to_engine(parse_term("z")) is False
    tref.join()


def test_run_bg_on_dead_engine_fails(base):
    e = base.new_engine("X", "member(X,[1])")
    e.stop()
    assert base.run_bg(e) is None
    got = answers_str(base, "R", "(if(run_bg('$engine'(424242),_),R=ok,R=failed))")
    assert got == ["failed"]


def test_bg_launches_goal_thread(base):
    h = base.hub(0)
    got = answers_str(
        base,
        "A-B",
        f"(bg((put({write_term(h.term)},x),put({write_term(h.term)},y))),"
        f" collect({write_term(h.term)},A),collect({write_term(h.term)},B))",
    )
    assert got == ["x-y"]


def test_bg_rejects_bad_goal():
    lines = []
    s = Session(on_error=lines.append)
    assert s.answers("X", "(X=1,bg(X))") == []  # X bound to 1: not callable
    assert lines and "type_error" in lines[0]


def test_join_finished_thread_immediate(base):
    tref = base.bg(parse_term("true"))
    tref.join()
    t0 = time.monotonic()
    tref.join()  # idempotent, immediate
    assert time.monotonic() - t0 < 0.05


def test_join_self_is_error(base):
    cur = base.current_thread()
    with pytest.raises(MachineFault):
        cur.join()
    lines = []
    s = Session(on_error=lines.append)
    got = s.answers("R", "(current_thread(T),join_thread(T),R=ok)")
    assert got == []
    assert lines and "type_error" in lines[0]


def test_current_thread_stable(base):
    a = base.current_thread()
    b = base.current_thread()
    assert a.id == b.id


def test_sleep_ms_waits(base):
    t0 = time.monotonic()
    assert base.answers("X", "(sleep_ms(20),X=ok)") != []
    assert time.monotonic() - t0 >= 0.020


def test_object_level_hub_roundtrip(base):
    got = answers_str(
        base,
        "D",
        "(hub_ms(0,H),bg((sleep_ms(5),put(H,ping))),collect(H,D))",
    )
    assert got == ["ping"]


def test_collect_timeout_via_builtin(base):
    t0 = time.monotonic()
    got = answers_str(base, "R", "(hub_ms(10,H),if(collect(H,_),R=got,R=timeout))")
    elapsed = time.monotonic() - t0
    assert got == ["timeout"]
    assert elapsed >= 0.010


def test_current_thread_inside_bg_goal(base):
    got = answers_str(base, "T", "(hub_ms(0,H),bg((current_thread(T0),put(H,T0))),collect(H,T))")
    assert len(got) == 1 and got[0].startswith("'$thread'(")
    main = answers_str(base, "T", "current_thread(T)")
    assert main[0] != got[0]


def test_run_bg_join_then_all_work_done(base):
    got = answers_str(
        base,
        "A-B",
        "(hub_ms(50,H), new_engine(_,(put(H,a),put(H,b)),E), run_bg(E,T),"
        " join_thread(T), collect(H,A), collect(H,B))",
    )
    assert got == ["a-b"]
