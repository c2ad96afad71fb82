"""Single- and multi-chip rotor-router dynamics on finite graphs.

A step first increments the rotor at the chip's vertex, then moves the chip
along the new rotor edge.  This rotate-then-move convention is shared by
every module in the package.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from rotorlab.graph import (
    DirectedMultigraph,
    GraphError,
    RotorConfiguration,
)


class WalkError(GraphError):
    pass


class ChipAtSinkError(WalkError):
    pass


class StepBudgetExceededError(WalkError):
    """Routing ran past its step budget.  Termination is guaranteed for
    strongly connected graphs, so this signals a bug or a tiny budget."""


class NotAPredecessorError(WalkError):
    pass


class RotorsNotRestoredError(WalkError):
    pass


class NotHarmonicAtEmitterError(WalkError):
    pass


DEFAULT_STEP_BUDGET = 10 ** 9


@dataclass
class WalkTrace:
    """Recorded steps of one or more chip walks.

    ``steps`` holds (from, to) vertex pairs; ``segments`` holds the index at
    which each chip's walk begins, so multi-chip traces keep per-chip
    chaining intact.
    """

    start: str
    stop: str
    initial: RotorConfiguration
    final: RotorConfiguration
    steps: list[tuple[str, str]] = field(default_factory=list)
    segments: list[int] = field(default_factory=lambda: [0])
    chip_stops: list[str] = field(default_factory=list)
    emitter_set: set[str] | None = None     # filled even without full steps

    def segment_bounds(self) -> list[tuple[int, int]]:
        ends = self.segments[1:] + [len(self.steps)]
        return list(zip(self.segments, ends))

    def check_chaining(self) -> bool:
        """Consecutive steps chain within every segment."""
        for lo, hi in self.segment_bounds():
            for i in range(lo + 1, hi):
                if self.steps[i][0] != self.steps[i - 1][1]:
                    return False
        return True

    def replay(self, g: DirectedMultigraph) -> RotorConfiguration:
        """Re-apply the recorded steps to the initial configuration."""
        full = g.slots_to_full(self.initial)
        for frm, _to in self.steps:
            i = g.index[frm]
            full[i] = (full[i] + 1) % g.deg_idx[i]
        return g.full_to_slots(full)

    def emitters(self) -> set[str]:
        if self.emitter_set is not None:
            return self.emitter_set
        return {frm for frm, _ in self.steps}

    def visited(self) -> set[str]:
        seen = {self.start}
        for _, to in self.steps:
            seen.add(to)
        return seen

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("step,from,to\n")
        for k, (frm, to) in enumerate(self.steps):
            buf.write(f"{k},{frm},{to}\n")
        return buf.getvalue()


def step(g: DirectedMultigraph, t: RotorConfiguration,
         chip: str) -> tuple[RotorConfiguration, str]:
    """One rotor-router step: rotate at the chip, move along the new edge."""
    if chip == g.sink:
        raise ChipAtSinkError("cannot step a chip sitting on the sink")
    pos = g.rotor_index[chip]
    s = (t.slots[pos] + 1) % g.outdeg(chip)
    t2 = t.with_slot(g, chip, s)
    return t2, g.out[chip][s]


def route_to_sink(g: DirectedMultigraph, t: RotorConfiguration, x: str,
                  record_trace: bool = False,
                  step_budget: int = DEFAULT_STEP_BUDGET,
                  ) -> tuple[RotorConfiguration, WalkTrace]:
    """Add a chip at x and walk it to the sink; returns e_x(t) and a trace.

    The trace records steps only when ``record_trace`` is set; the initial
    and final configurations are always attached.
    """
    t.validate(g)
    if x not in g.index:
        raise GraphError(f"unknown vertex {x!r}")
    full = g.slots_to_full(t)
    out_idx = g.out_idx
    deg = g.deg_idx
    sink_i = g.sink_index
    v = g.index[x]
    steps: list[tuple[str, str]] = []
    emitters: set[int] = set()
    names = g.vertices
    count = 0
    while v != sink_i:
        if count >= step_budget:
            raise StepBudgetExceededError(f"exceeded {step_budget} steps")
        emitters.add(v)
        s = (full[v] + 1) % deg[v]
        full[v] = s
        w = out_idx[v][s]
        if record_trace:
            steps.append((names[v], names[w]))
        v = w
        count += 1
    t2 = g.full_to_slots(full)
    trace = WalkTrace(start=x, stop=g.sink, initial=t, final=t2, steps=steps,
                      emitter_set={names[i] for i in emitters})
    return t2, trace


def predecessor(g: DirectedMultigraph, t: RotorConfiguration, chip: str,
                frm: str) -> tuple[RotorConfiguration, str]:
    """Reverse one step that entered ``chip`` from ``frm``.

    Requires the rotor at ``frm`` to point at the chip; the rotor is then
    decremented and the chip moved back.
    """
    t.validate(g)
    if frm == g.sink:
        raise NotAPredecessorError("sink carries no rotor")
    if t.target(g, frm) != chip:
        raise NotAPredecessorError(f"rotor at {frm!r} does not point at {chip!r}")
    s = (t.slot(g, frm) - 1) % g.outdeg(frm)
    return t.with_slot(g, frm, s), frm


def reverse_walk(g: DirectedMultigraph, t_final: RotorConfiguration, x: str,
                 step_budget: int = DEFAULT_STEP_BUDGET) -> RotorConfiguration:
    """Invert route_to_sink on recurrent states: e_x(result) == t_final.

    Each reverse step picks the unique legal predecessor.  In a cyclic state
    the predecessor lies on the rotor cycle through the chip; in a recurrent
    state the chip is at its first visit, and the predecessor is found by
    walking the rotor path from x.
    """
    from rotorlab.graph import _acyclic, _rotor_targets  # internal reuse

    t_final.validate(g)
    if x not in g.index:
        raise GraphError(f"unknown vertex {x!r}")
    t = t_final
    chip = g.sink
    count = 0
    while True:
        tgt = _rotor_targets(g, t)
        rec = _acyclic(g, tgt)
        if rec and chip == x:
            return t
        if count >= step_budget:
            raise StepBudgetExceededError(f"exceeded {step_budget} reverse steps")
        if not rec:
            # chip sits on the unique rotor cycle; predecessor precedes it there
            z = _cycle_predecessor(g, tgt, chip)
        else:
            # first visit to chip: last exit from the rotor path out of x
            z = _path_predecessor(g, tgt, x, chip)
        t, chip = predecessor(g, t, chip, g.vertices[z])
        count += 1


def _cycle_predecessor(g: DirectedMultigraph, tgt: list[int], chip: str) -> int:
    """Vertex preceding the chip on the rotor cycle through it."""
    start = g.index[chip]
    v = start
    seen = set()
    while True:
        if v in seen or v == g.sink_index:
            raise WalkError("rotor cycle does not pass through the chip")
        seen.add(v)
        w = tgt[v]
        if w == start:
            return v
        v = w


def _path_predecessor(g: DirectedMultigraph, tgt: list[int], x: str,
                      chip: str) -> int:
    """Vertex before the first occurrence of chip on the rotor path from x."""
    v = g.index[x]
    goal = g.index[chip]
    seen = set()
    while True:
        if v in seen or v == g.sink_index:
            raise WalkError(f"rotor path from {x!r} misses {chip!r}")
        seen.add(v)
        w = tgt[v]
        if w == goal:
            return v
        v = w


ChipDistribution = dict[str, int]


def route_all(g: DirectedMultigraph, t: RotorConfiguration,
              chips: Mapping[str, int], stop_set: Iterable[str],
              scheduler: str = "chip_by_chip",
              record_trace: bool = False,
              step_budget: int = DEFAULT_STEP_BUDGET,
              ) -> tuple[ChipDistribution, RotorConfiguration, WalkTrace]:
    """Route every chip until it enters the stop set.

    The outcome is independent of the interleaving; ``scheduler`` picks
    "chip_by_chip" (finish each chip before the next starts) or
    "round_robin" (all active chips advance one step per round) so tests can
    exercise the abelian property.
    """
    t.validate(g)
    stops = {g.index[v] for v in stop_set}
    if not stops:
        raise WalkError("stop set must be nonempty")
    for v, c in chips.items():
        if v not in g.index:
            raise GraphError(f"unknown vertex {v!r}")
        if c < 0:
            raise WalkError("negative chip count")

    full = g.slots_to_full(t)
    out_idx = g.out_idx
    deg = g.deg_idx
    names = g.vertices
    counts: dict[int, int] = {}
    steps: list[tuple[str, str]] = []
    segments: list[int] = []
    budget = step_budget

    positions: list[int] = []
    for v in g.vertices:         # deterministic source order
        c = chips.get(v, 0)
        positions.extend([g.index[v]] * c)

    emitters: set[int] = set()

    def advance(v: int) -> int:
        nonlocal budget
        if budget <= 0:
            raise StepBudgetExceededError(f"exceeded {step_budget} steps")
        budget -= 1
        emitters.add(v)
        s = (full[v] + 1) % deg[v]
        full[v] = s
        w = out_idx[v][s]
        if record_trace:
            steps.append((names[v], names[w]))
        return w

    chip_stops: list[str] = []
    if scheduler == "chip_by_chip":
        for v in positions:
            segments.append(len(steps))
            while v not in stops:
                v = advance(v)
            counts[v] = counts.get(v, 0) + 1
            chip_stops.append(names[v])
    elif scheduler == "round_robin":
        active = []
        for v in positions:
            segments.append(len(steps))
            if v in stops:
                counts[v] = counts.get(v, 0) + 1
                chip_stops.append(names[v])
            else:
                active.append(v)
        while active:
            nxt = []
            for v in active:
                w = advance(v)
                if w in stops:
                    counts[w] = counts.get(w, 0) + 1
                    chip_stops.append(names[w])
                else:
                    nxt.append(w)
            active = nxt
    else:
        raise WalkError(f"unknown scheduler {scheduler!r}")

    t2 = g.full_to_slots(full)
    stop_counts = {names[v]: c for v, c in sorted(counts.items())}
    trace = WalkTrace(start="", stop="", initial=t, final=t2,
                      steps=steps, segments=segments or [0],
                      chip_stops=chip_stops,
                      emitter_set={names[i] for i in emitters})
    return stop_counts, t2, trace


def is_harmonic_at(g: DirectedMultigraph, H: Mapping[str, Rational],
                   x: str) -> bool:
    """d_x H(x) == sum over out-edges of H(target), with multiplicity."""
    lhs = g.outdeg(x) * Fraction(H[x])
    rhs = sum(Fraction(H[y]) for y in g.out[x])
    return lhs == rhs


def check_harmonic_invariant(g: DirectedMultigraph,
                             H: Mapping[str, Rational],
                             before: Mapping[str, int],
                             after: Mapping[str, int],
                             trace: WalkTrace) -> bool:
    """Exact conservation of sum H(x) * chips(x) across a rotor-neutral move.

    Requires the trace to start and end in the same rotor configuration and
    H to be harmonic at every vertex that emitted a chip.
    """
    if trace.initial != trace.final:
        raise RotorsNotRestoredError("trace does not restore the rotors")
    for x in sorted(trace.emitters()):
        if not is_harmonic_at(g, H, x):
            raise NotHarmonicAtEmitterError(f"H is not harmonic at emitter {x!r}")
    lhs = sum(Fraction(H[x]) * c for x, c in before.items())
    rhs = sum(Fraction(H[x]) * c for x, c in after.items())
    return lhs == rhs
