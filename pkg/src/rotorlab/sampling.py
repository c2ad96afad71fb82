"""Seeded generators for random graphs and recurrent configurations."""

from __future__ import annotations

import random

from rotorlab.graph import (
    DirectedMultigraph,
    RotorConfiguration,
    build_graph,
    is_recurrent,
    shortest_path_config,
)


def random_multigraph(rng: random.Random, n_vertices: int,
                      extra_edges: int | None = None) -> DirectedMultigraph:
    """Random strongly connected multigraph without loops.

    A random Hamiltonian cycle guarantees strong connectivity; extra edges
    (parallel edges allowed) are sprinkled on top.
    """
    if n_vertices < 2:
        raise ValueError("need at least 2 vertices")
    names = [f"v{i}" for i in range(n_vertices)]
    order = names[:]
    rng.shuffle(order)
    out: dict[str, list[str]] = {v: [] for v in names}
    for i, v in enumerate(order):
        out[v].append(order[(i + 1) % n_vertices])
    if extra_edges is None:
        extra_edges = rng.randrange(n_vertices, 3 * n_vertices)
    for _ in range(extra_edges):
        v = rng.choice(names)
        w = rng.choice([u for u in names if u != v])
        out[v].append(w)
    for v in names:
        rng.shuffle(out[v])
    return build_graph(names, names[0], out)


def random_recurrent_config(g: DirectedMultigraph, rng: random.Random,
                            mix_steps: int = 32) -> RotorConfiguration:
    """A pseudo-random recurrent configuration.

    Starts from the shortest-path configuration and walks the orbit by
    routing chips from random vertices; routing maps recurrent states to
    recurrent states, so the result is always recurrent.
    """
    from rotorlab.walk import route_to_sink

    t = shortest_path_config(g)
    for _ in range(mix_steps):
        x = rng.choice(g.rotor_vertices)
        t, _ = route_to_sink(g, t, x)
    assert is_recurrent(g, t)
    return t
