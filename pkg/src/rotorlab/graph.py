"""Finite directed multigraphs with a sink, rotor configurations, recurrence.

A graph here is strongly connected, loop-free, and carries a fixed cyclic
order on every vertex's out-edges: the out-edge list.  A rotor configuration
assigns to each non-sink vertex an index into its out-edge list.  A
configuration is recurrent when the rotor edges form an oriented spanning
tree rooted at the sink, i.e. contain no oriented cycle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence


class GraphError(ValueError):
    """Base for graph construction and usage errors."""


class LoopEdgeError(GraphError):
    """An out-edge list contains its own vertex."""


class EmptyOutListError(GraphError):
    """A non-sink vertex has no out-edges."""


class NotStronglyConnectedError(GraphError):
    """The multigraph is not strongly connected."""


class TooLargeError(GraphError):
    """Exhaustive enumeration would exceed the configured guard."""


class ConfigError(GraphError):
    """A rotor configuration does not fit the graph."""


class DirectedMultigraph:
    """Immutable directed multigraph with named vertices and a sink.

    ``out[name]`` lists out-edge targets in rotor order; repeats encode
    multiplicity.  Construction is through :func:`build_graph`, which
    validates all invariants.  Instances are never mutated after build.
    """

    __slots__ = (
        "vertices", "sink", "out",
        "index", "sink_index", "out_idx", "deg_idx",
        "rotor_vertices", "rotor_index",
    )

    def __init__(self, vertices: tuple[str, ...], sink: str,
                 out: dict[str, tuple[str, ...]]):
        self.vertices = vertices
        self.sink = sink
        self.out = out
        self.index = {v: i for i, v in enumerate(vertices)}
        self.sink_index = self.index[sink]
        self.out_idx = [tuple(self.index[t] for t in out[v]) for v in vertices]
        self.deg_idx = [len(lst) for lst in self.out_idx]
        self.rotor_vertices = tuple(v for v in vertices if v != sink)
        self.rotor_index = {v: i for i, v in enumerate(self.rotor_vertices)}

    def outdeg(self, x: str) -> int:
        return len(self.out[x])

    def out_list(self, x: str) -> tuple[str, ...]:
        return self.out[x]

    def edge_count(self, x: str, y: str) -> int:
        """Number of parallel edges x -> y (d_xy)."""
        return self.out[x].count(y)

    # -- conversions between rotor-vertex slots and full index arrays -----

    def slots_to_full(self, t: "RotorConfiguration") -> list[int]:
        """Expand config slots into a per-vertex list (sink entry unused)."""
        full = [0] * len(self.vertices)
        for v, s in zip(self.rotor_vertices, t.slots):
            full[self.index[v]] = s
        return full

    def full_to_slots(self, full: Sequence[int]) -> "RotorConfiguration":
        return RotorConfiguration(tuple(full[self.index[v]]
                                        for v in self.rotor_vertices))

    def __repr__(self) -> str:
        return (f"DirectedMultigraph({len(self.vertices)} vertices, "
                f"sink={self.sink!r})")


@dataclass(frozen=True)
class RotorConfiguration:
    """Per-vertex rotor slot indices, in graph rotor-vertex order."""

    slots: tuple[int, ...]

    def slot(self, g: DirectedMultigraph, x: str) -> int:
        return self.slots[g.rotor_index[x]]

    def target(self, g: DirectedMultigraph, x: str) -> str:
        """Vertex the rotor at x currently points to."""
        return g.out[x][self.slots[g.rotor_index[x]]]

    def with_slot(self, g: DirectedMultigraph, x: str, s: int) -> "RotorConfiguration":
        lst = list(self.slots)
        lst[g.rotor_index[x]] = s
        return RotorConfiguration(tuple(lst))

    def validate(self, g: DirectedMultigraph) -> None:
        if len(self.slots) != len(g.rotor_vertices):
            raise ConfigError("configuration does not match graph vertex set")
        for v, s in zip(g.rotor_vertices, self.slots):
            if not 0 <= s < g.outdeg(v):
                raise ConfigError(f"rotor index {s} out of range at {v!r}")

    @staticmethod
    def uniform(g: DirectedMultigraph, s: int = 0) -> "RotorConfiguration":
        for v in g.rotor_vertices:
            if not 0 <= s < g.outdeg(v):
                raise ConfigError(f"rotor index {s} out of range at {v!r}")
        return RotorConfiguration(tuple(s for _ in g.rotor_vertices))

    def to_dict(self, g: DirectedMultigraph) -> dict[str, int]:
        return {v: s for v, s in zip(g.rotor_vertices, self.slots)}

    @staticmethod
    def from_dict(g: DirectedMultigraph, d: Mapping[str, int]) -> "RotorConfiguration":
        missing = set(g.rotor_vertices) - set(d)
        extra = set(d) - set(g.rotor_vertices)
        if missing or extra:
            raise ConfigError(f"bad config keys: missing={sorted(missing)} "
                              f"extra={sorted(extra)}")
        t = RotorConfiguration(tuple(d[v] for v in g.rotor_vertices))
        t.validate(g)
        return t


@dataclass(frozen=True)
class StateClass:
    """Classification of a rotor configuration relative to a chip position."""

    kind: str                  # "recurrent" | "cycle_at" | "neither"
    vertex: str | None = None

    @staticmethod
    def recurrent() -> "StateClass":
        return StateClass("recurrent")

    @staticmethod
    def cyc_at(x: str) -> "StateClass":
        return StateClass("cycle_at", x)

    @staticmethod
    def neither() -> "StateClass":
        return StateClass("neither")

    @property
    def is_recurrent(self) -> bool:
        return self.kind == "recurrent"


def build_graph(vertices: Iterable[str], sink: str,
                out: Mapping[str, Sequence[str]]) -> DirectedMultigraph:
    """Validate and build a graph from named out-edge lists.

    Raises LoopEdgeError, EmptyOutListError or NotStronglyConnectedError
    when the corresponding invariant fails.
    """
    verts = tuple(vertices)
    vset = set(verts)
    if len(vset) != len(verts):
        raise GraphError("duplicate vertex names")
    if sink not in vset:
        raise GraphError(f"sink {sink!r} is not a vertex")
    out_t: dict[str, tuple[str, ...]] = {}
    for v in verts:
        lst = tuple(out.get(v, ()))
        for tgt in lst:
            if tgt not in vset:
                raise GraphError(f"edge {v!r}->{tgt!r} targets unknown vertex")
            if tgt == v:
                raise LoopEdgeError(f"loop edge at {v!r}")
        if v != sink and not lst:
            raise EmptyOutListError(f"non-sink vertex {v!r} has no out-edges")
        out_t[v] = lst
    unknown = set(out) - vset
    if unknown:
        raise GraphError(f"out-lists for unknown vertices: {sorted(unknown)}")

    g = DirectedMultigraph(verts, sink, out_t)
    if not _strongly_connected(g):
        raise NotStronglyConnectedError("graph is not strongly connected")
    return g


def _strongly_connected(g: DirectedMultigraph) -> bool:
    n = len(g.vertices)
    if n == 1:
        return True

    def reach(adj: Sequence[Sequence[int]]) -> int:
        seen = [False] * n
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count

    radj: list[list[int]] = [[] for _ in range(n)]
    for v, lst in enumerate(g.out_idx):
        for w in lst:
            radj[w].append(v)
    return reach(g.out_idx) == n and reach(radj) == n


# -- recurrence -----------------------------------------------------------

def _rotor_targets(g: DirectedMultigraph, t: RotorConfiguration) -> list[int]:
    """Rotor target index per vertex index; sink maps to itself."""
    tgt = [0] * len(g.vertices)
    tgt[g.sink_index] = g.sink_index
    for v, s in zip(g.rotor_vertices, t.slots):
        i = g.index[v]
        tgt[i] = g.out_idx[i][s]
    return tgt


def _acyclic(g: DirectedMultigraph, tgt: list[int], skip: int = -1) -> bool:
    """True iff the functional rotor subgraph has no oriented cycle.

    ``skip`` removes one vertex's rotor from consideration.  The sink has no
    rotor; a path is cycle-free exactly when it reaches the sink or a vertex
    already known to be cycle-free.
    """
    n = len(g.vertices)
    state = [0] * n          # 0 unseen, 1 on current path, 2 safe
    state[g.sink_index] = 2
    if skip >= 0:
        state[skip] = 2      # deleting the rotor makes the vertex a dead end
    for start in range(n):
        if state[start]:
            continue
        path = []
        v = start
        while state[v] == 0:
            state[v] = 1
            path.append(v)
            v = tgt[v]
        if state[v] == 1:
            return False
        for u in path:
            state[u] = 2
    return True


def is_recurrent(g: DirectedMultigraph, t: RotorConfiguration) -> bool:
    """True iff the rotor edges form an oriented spanning tree to the sink."""
    t.validate(g)
    return _acyclic(g, _rotor_targets(g, t))


def classify(g: DirectedMultigraph, t: RotorConfiguration, chip: str) -> StateClass:
    """Classify a configuration seen with the chip at ``chip``.

    Recurrent configurations are acyclic; otherwise the state is CycAt(chip)
    when deleting the rotor at the chip breaks every oriented cycle, and
    Neither when a cycle survives.
    """
    t.validate(g)
    if chip not in g.index:
        raise GraphError(f"unknown vertex {chip!r}")
    tgt = _rotor_targets(g, t)
    if _acyclic(g, tgt):
        return StateClass.recurrent()
    if chip != g.sink and _acyclic(g, tgt, skip=g.index[chip]):
        return StateClass.cyc_at(chip)
    return StateClass.neither()


DEFAULT_ENUM_LIMIT = 10_000_000


def enumerate_recurrent(g: DirectedMultigraph,
                        limit: int = DEFAULT_ENUM_LIMIT) -> list[RotorConfiguration]:
    """All recurrent configurations, lexicographic in rotor-vertex order."""
    total = 1
    for v in g.rotor_vertices:
        total *= g.outdeg(v)
        if total > limit:
            raise TooLargeError(f"{total}+ configurations exceed limit {limit}")
    result = []
    for slots in product(*(range(g.outdeg(v)) for v in g.rotor_vertices)):
        t = RotorConfiguration(slots)
        if is_recurrent(g, t):
            result.append(t)
    return result


def reduced_laplacian(g: DirectedMultigraph) -> list[list[int]]:
    """Integer matrix with diagonal d_x and off-diagonal -d_xy, sink removed."""
    vs = g.rotor_vertices
    mat = []
    for x in vs:
        row = []
        for y in vs:
            if x == y:
                row.append(g.outdeg(x))
            else:
                row.append(-g.edge_count(x, y))
        mat.append(row)
    return mat


def integer_determinant(mat: list[list[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = [row[:] for row in mat]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def spanning_tree_count(g: DirectedMultigraph) -> int:
    """Number of oriented spanning trees rooted at the sink (matrix-tree)."""
    return integer_determinant(reduced_laplacian(g))


def shortest_path_config(g: DirectedMultigraph) -> RotorConfiguration:
    """A recurrent configuration: each rotor points one step closer to the sink."""
    n = len(g.vertices)
    INF = n + 1
    dist = [INF] * n
    dist[g.sink_index] = 0
    radj: list[list[int]] = [[] for _ in range(n)]
    for v, lst in enumerate(g.out_idx):
        for w in set(lst):
            radj[w].append(v)
    frontier = [g.sink_index]
    while frontier:
        nxt = []
        for w in frontier:
            for v in radj[w]:
                if dist[v] > dist[w] + 1:
                    dist[v] = dist[w] + 1
                    nxt.append(v)
        frontier = nxt
    slots = []
    for v in g.rotor_vertices:
        i = g.index[v]
        slot = min(range(g.deg_idx[i]),
                   key=lambda s: dist[g.out_idx[i][s]])
        slots.append(slot)
    return RotorConfiguration(tuple(slots))


# -- serialization --------------------------------------------------------

def graph_to_json(g: DirectedMultigraph) -> str:
    payload = {
        "vertices": list(g.vertices),
        "sink": g.sink,
        "out": {v: list(g.out[v]) for v in g.vertices},
    }
    return json.dumps(payload, indent=2)


def graph_from_json(text: str) -> DirectedMultigraph:
    payload = json.loads(text)
    return build_graph(payload["vertices"], payload["sink"], payload["out"])


def config_to_json(g: DirectedMultigraph, t: RotorConfiguration) -> str:
    return json.dumps(t.to_dict(g), indent=2)


def config_from_json(g: DirectedMultigraph, text: str) -> RotorConfiguration:
    return RotorConfiguration.from_dict(g, json.loads(text))
