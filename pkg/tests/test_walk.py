import random
from fractions import Fraction

import pytest

from rotorlab.graph import (
    RotorConfiguration,
    build_graph,
    classify,
    enumerate_recurrent,
    is_recurrent,
)
from rotorlab.sampling import random_multigraph, random_recurrent_config
from rotorlab.walk import (
    ChipAtSinkError,
    NotAPredecessorError,
    NotHarmonicAtEmitterError,
    RotorsNotRestoredError,
    WalkTrace,
    check_harmonic_invariant,
    predecessor,
    reverse_walk,
    route_all,
    route_to_sink,
    step,
)


def two_cycle():
    return build_graph(["r", "s"], "s", {"r": ["s"], "s": ["r"]})


def three_out():
    # vertex m with out-list [a, b, c]; everything drains to s
    return build_graph(
        ["m", "a", "b", "c", "s"], "s",
        {"m": ["a", "b", "c"], "a": ["s"], "b": ["s"], "c": ["s"],
         "s": ["m"]},
    )


def test_step_simple():
    g = two_cycle()
    t = RotorConfiguration.uniform(g, 0)
    t2, chip = step(g, t, "r")
    assert chip == "s"
    assert t2.slot(g, "r") == 0   # d_r = 1, index wraps


def test_step_out_list_order():
    g = three_out()
    t = RotorConfiguration.uniform(g, 0)
    t2, chip = step(g, t, "m")
    assert chip == "b"
    assert t2.slot(g, "m") == 1


def test_step_at_sink_rejected():
    g = two_cycle()
    with pytest.raises(ChipAtSinkError):
        step(g, RotorConfiguration.uniform(g, 0), "s")


def test_route_to_sink_two_cycle():
    g = two_cycle()
    t = RotorConfiguration.uniform(g, 0)
    t2, trace = route_to_sink(g, t, "r", record_trace=True)
    assert trace.steps == [("r", "s")]
    assert t2 == t


def test_route_preserves_recurrence():
    rng = random.Random(5)
    for _ in range(15):
        g = random_multigraph(rng, rng.randrange(2, 6))
        for t in enumerate_recurrent(g):
            for x in g.vertices:
                t2, _ = route_to_sink(g, t, x)
                assert is_recurrent(g, t2)


def test_intermediate_states_never_neither():
    # every intermediate state of a walk from a recurrent start is
    # Recurrent or CycAt(chip); when Recurrent, the chip is at a first visit
    rng = random.Random(9)
    for _ in range(10):
        g = random_multigraph(rng, 5)
        t = random_recurrent_config(g, rng)
        x = rng.choice(g.vertices)
        full_t = t
        chip = x
        visited = {chip}
        while chip != g.sink:
            full_t, chip = step(g, full_t, chip)
            c = classify(g, full_t, chip)
            assert c.kind in ("recurrent", "cycle_at")
            if c.kind == "cycle_at":
                assert c.vertex == chip
            else:
                assert chip == g.sink or chip not in visited
            visited.add(chip)


def test_predecessor_inverts_step():
    rng = random.Random(13)
    for _ in range(20):
        g = random_multigraph(rng, 4)
        slots = tuple(rng.randrange(g.outdeg(v)) for v in g.rotor_vertices)
        t = RotorConfiguration(slots)
        chip = rng.choice([v for v in g.vertices if v != g.sink])
        t2, chip2 = step(g, t, chip)
        back, back_chip = predecessor(g, t2, chip2, chip)
        assert back == t and back_chip == chip


def test_predecessor_requires_pointing_rotor():
    g = three_out()
    t = RotorConfiguration.uniform(g, 0)   # rotor at m points to a
    with pytest.raises(NotAPredecessorError):
        predecessor(g, t, "b", "m")


def test_two_predecessors_on_fork():
    # both a and b point at s-side vertex m; two distinct reverse steps
    g = build_graph(
        ["a", "b", "m", "s"], "s",
        {"a": ["m", "s"], "b": ["m", "s"], "m": ["s"], "s": ["a", "b"]},
    )
    t = RotorConfiguration.from_dict(g, {"a": 0, "b": 0, "m": 0})
    pa = predecessor(g, t, "m", "a")
    pb = predecessor(g, t, "m", "b")
    assert pa[1] == "a" and pb[1] == "b"
    assert pa[0] != pb[0]


def test_reverse_walk_round_trip_exhaustive():
    rng = random.Random(17)
    for _ in range(10):
        g = random_multigraph(rng, rng.randrange(2, 5))
        for t in enumerate_recurrent(g):
            for x in g.vertices:
                t2, _ = route_to_sink(g, t, x)
                assert reverse_walk(g, t2, x) == t


def test_routing_injective_on_recurrent():
    rng = random.Random(21)
    for _ in range(8):
        g = random_multigraph(rng, 4)
        recs = enumerate_recurrent(g)
        for x in g.vertices:
            images = {route_to_sink(g, t, x)[0].slots for t in recs}
            assert len(images) == len(recs)


def test_route_all_single_chip_matches_route_to_sink():
    rng = random.Random(25)
    g = random_multigraph(rng, 5)
    t = random_recurrent_config(g, rng)
    x = g.rotor_vertices[0]
    counts, t2, _ = route_all(g, t, {x: 1}, {g.sink})
    expected_t2, _ = route_to_sink(g, t, x)
    assert counts == {g.sink: 1}
    assert t2 == expected_t2


def test_route_all_one_step_distribution():
    # d_x chips at x, stopping everywhere after one step, land d_xy per y
    g = three_out()
    t = RotorConfiguration.uniform(g, 0)
    stop = {"a", "b", "c"}
    counts, t2, _ = route_all(g, t, {"m": 3}, stop)
    assert counts == {"a": 1, "b": 1, "c": 1}
    assert t2.slot(g, "m") == t.slot(g, "m")   # full turn restores the rotor


def test_route_all_scheduler_independence():
    rng = random.Random(29)
    for _ in range(12):
        g = random_multigraph(rng, rng.randrange(3, 6))
        slots = tuple(rng.randrange(g.outdeg(v)) for v in g.rotor_vertices)
        t = RotorConfiguration(slots)
        chips = {v: rng.randrange(0, 3) for v in g.vertices}
        stop = {g.sink}
        a = route_all(g, t, chips, stop, scheduler="chip_by_chip")
        b = route_all(g, t, chips, stop, scheduler="round_robin")
        assert a[0] == b[0] and a[1] == b[1]


def test_route_all_scheduler_independence_exhaustive():
    # every initial rotor state and chip load up to 2 per vertex on a path
    from itertools import product
    g = build_graph(["o", "r", "s"], "s",
                    {"o": ["r"], "r": ["o", "s"], "s": ["r"]})
    for so, sr in product(range(1), range(2)):
        t = RotorConfiguration.from_dict(g, {"o": so, "r": sr})
        for co, cr in product(range(3), range(3)):
            chips = {"o": co, "r": cr}
            a = route_all(g, t, chips, {g.sink}, scheduler="chip_by_chip")
            b = route_all(g, t, chips, {g.sink}, scheduler="round_robin")
            assert a[0] == b[0] and a[1] == b[1]


def test_step_budget_exceeded():
    from rotorlab.walk import StepBudgetExceededError
    g = build_graph(["a", "b", "c", "s"], "s",
                    {"a": ["b"], "b": ["c"], "c": ["s"], "s": ["a"]})
    t = RotorConfiguration.uniform(g, 0)
    with pytest.raises(StepBudgetExceededError):
        route_to_sink(g, t, "a", step_budget=1)
    with pytest.raises(StepBudgetExceededError):
        route_all(g, t, {"a": 5}, {"s"}, step_budget=2)


def test_trace_chaining_and_replay():
    rng = random.Random(31)
    g = random_multigraph(rng, 5)
    t = random_recurrent_config(g, rng)
    t2, trace = route_to_sink(g, t, g.rotor_vertices[1], record_trace=True)
    assert trace.check_chaining()
    assert trace.replay(g) == t2
    csv = trace.to_csv()
    assert csv.splitlines()[0] == "step,from,to"
    assert len(csv.splitlines()) == len(trace.steps) + 1


def test_harmonic_invariant_constant_function():
    g = three_out()
    t = RotorConfiguration.uniform(g, 0)
    counts, t2, trace = route_all(g, t, {"m": 3}, {"a", "b", "c"},
                                  record_trace=True)
    H = {v: Fraction(1) for v in g.vertices}
    before = {"m": 3}
    assert check_harmonic_invariant(g, H, before, counts, trace)


def test_harmonic_invariant_empty_trace():
    g = three_out()
    t = RotorConfiguration.uniform(g, 0)
    trace = WalkTrace(start="m", stop="m", initial=t, final=t)
    assert check_harmonic_invariant(g, {v: 1 for v in g.vertices}, {}, {}, trace)


def test_harmonic_invariant_rejects_unrestored_rotors():
    g = three_out()
    t = RotorConfiguration.uniform(g, 0)
    t2, trace = route_to_sink(g, t, "m", record_trace=True)
    assert t2 != t
    with pytest.raises(RotorsNotRestoredError):
        check_harmonic_invariant(g, {v: 1 for v in g.vertices}, {}, {}, trace)


def test_harmonic_invariant_without_recorded_steps():
    # emitters are tracked even when the full step list is not recorded
    g = three_out()
    t = RotorConfiguration.uniform(g, 0)
    counts, t2, trace = route_all(g, t, {"m": 3}, {"a", "b", "c"})
    assert trace.steps == []
    assert trace.emitters() == {"m"}
    H = {v: Fraction(1) for v in g.vertices}
    assert check_harmonic_invariant(g, H, {"m": 3}, counts, trace)


def test_harmonic_invariant_rejects_bad_function():
    g = three_out()
    t = RotorConfiguration.uniform(g, 0)
    counts, t2, trace = route_all(g, t, {"m": 3}, {"a", "b", "c"},
                                  record_trace=True)
    H = {v: Fraction(1) for v in g.vertices}
    H["a"] = Fraction(5)   # breaks harmonicity at the emitter m
    with pytest.raises(NotHarmonicAtEmitterError):
        check_harmonic_invariant(g, H, {"m": 3}, counts, trace)
