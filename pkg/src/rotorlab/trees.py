"""Finite regular-tree constructions and experiments.

Builders produce the height-n regular tree T_n (every non-leaf vertex has
a = d-1 children, leaves at depth n-1), the hat tree (T_n plus an extra leaf
o attached to the root), the wired tree (hat tree with every leaf, o
included, collapsed into a single sink; parallel edges kept), and the branch
Y_n (hat tree with every leaf except o collapsed to a boundary vertex b).

Rotor order at every vertex: children in child-index order, parent last, so
direction k is slot k-1 and direction d is the parent edge.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from rotorlab.graph import (
    DirectedMultigraph,
    GraphError,
    RotorConfiguration,
    build_graph,
)
from rotorlab.walk import route_all


class BadParametersError(GraphError):
    pass


class NotAcyclicError(GraphError):
    pass


@dataclass(frozen=True)
class TreeSpec:
    """Parameters for build_tree: degree d >= 3, height n >= 2, variant."""

    d: int
    n: int
    variant: str      # "plain" | "hat" | "wired" | "branch"


@dataclass
class TreeInfo:
    """Structure shared by the tree builders."""

    d: int
    n: int
    variant: str
    root: str = "r"
    depth: dict[str, int] = field(default_factory=dict)
    parent: dict[str, str] = field(default_factory=dict)
    children: dict[str, list[str]] = field(default_factory=dict)
    internal: list[str] = field(default_factory=list)   # rotor-bearing tree vertices
    leaves: list[str] = field(default_factory=list)     # hat tree only


def _check_params(d: int, n: int) -> None:
    if d < 3:
        raise BadParametersError("degree d must be at least 3")
    if n < 2:
        raise BadParametersError("height n must be at least 2")


def _tree_skeleton(d: int, n: int) -> TreeInfo:
    """Names, depths, parents and children of T_n, in BFS order."""
    a = d - 1
    info = TreeInfo(d=d, n=n, variant="skeleton")
    info.depth["r"] = 0
    info.children["r"] = []
    level = ["r"]
    for dep in range(1, n):
        nxt = []
        for p in level:
            for i in range(1, a + 1):
                name = f"{p}/{i}" if p != "r" else f"r/{i}"
                info.depth[name] = dep
                info.parent[name] = p
                info.children[p].append(name)
                info.children[name] = []
                nxt.append(name)
        level = nxt
    info.internal = [v for v, dep in info.depth.items() if dep <= n - 2]
    info.leaves = [v for v, dep in info.depth.items() if dep == n - 1]
    return info


def build_hat_tree(d: int, n: int) -> tuple[DirectedMultigraph, TreeInfo]:
    """T_n plus an extra leaf o attached to the root; bidirected; sink o.

    Chips are stopped on the leaf set {o} + (depth n-1 vertices); the
    rotors at those leaves never fire.
    """
    _check_params(d, n)
    info = _tree_skeleton(d, n)
    info.variant = "hat"
    out: dict[str, list[str]] = {}
    out["o"] = ["r"]
    for v in info.depth:
        if v == "r":
            out[v] = list(info.children[v]) + ["o"]
        elif info.children[v]:
            out[v] = list(info.children[v]) + [info.parent[v]]
        else:
            out[v] = [info.parent[v]]
    vertices = ["o"] + list(info.depth)
    g = build_graph(vertices, "o", out)
    info.leaves = ["o"] + [v for v in info.depth if info.depth[v] == n - 1]
    return g, info


def build_wired_tree(d: int, n: int) -> tuple[DirectedMultigraph, TreeInfo]:
    """Hat tree with all leaves (o included) collapsed to the sink s.

    Edges are kept, not collapsed: the root has one edge to s (the former o
    edge) and every other neighbor of s has a = d-1 parallel edges to s.
    """
    _check_params(d, n)
    info = _tree_skeleton(d, n)
    info.variant = "wired"
    a = d - 1
    out: dict[str, list[str]] = {}
    for v in info.internal:
        kids = info.children[v]
        kid_slots = [c if info.depth[c] <= n - 2 else "s" for c in kids]
        parent_slot = info.parent[v] if v != "r" else "s"
        out[v] = kid_slots + [parent_slot]
    s_out: list[str] = []
    if n == 2:
        s_out = ["r"] * d
    else:
        s_out.append("r")
        for v in info.internal:
            if info.depth[v] == n - 2:
                s_out.extend([v] * a)
    out["s"] = s_out
    vertices = list(info.internal) + ["s"]
    g = build_graph(vertices, "s", out)
    return g, info


def build_branch(d: int, n: int) -> tuple[DirectedMultigraph, TreeInfo]:
    """Y_n: hat tree with all leaves except o collapsed to a boundary b."""
    _check_params(d, n)
    info = _tree_skeleton(d, n)
    info.variant = "branch"
    a = d - 1
    out: dict[str, list[str]] = {"o": ["r"]}
    for v in info.internal:
        kids = info.children[v]
        kid_slots = [c if info.depth[c] <= n - 2 else "b" for c in kids]
        parent_slot = info.parent[v] if v != "r" else "o"
        out[v] = kid_slots + [parent_slot]
    b_out = []
    if n == 2:
        b_out = ["r"] * a
    else:
        for v in info.internal:
            if info.depth[v] == n - 2:
                b_out.extend([v] * a)
    out["b"] = b_out
    vertices = ["o"] + list(info.internal) + ["b"]
    g = build_graph(vertices, "o", out)
    return g, info


def build_plain_tree(d: int, n: int) -> tuple[DirectedMultigraph, TreeInfo]:
    """T_n alone, bidirected, rooted sink at r."""
    _check_params(d, n)
    info = _tree_skeleton(d, n)
    info.variant = "plain"
    out: dict[str, list[str]] = {}
    for v in info.depth:
        if v == "r":
            out[v] = list(info.children[v])
        elif info.children[v]:
            out[v] = list(info.children[v]) + [info.parent[v]]
        else:
            out[v] = [info.parent[v]]
    g = build_graph(list(info.depth), "r", out)
    return g, info


def build_tree(spec: TreeSpec) -> tuple[DirectedMultigraph, TreeInfo]:
    builders = {
        "plain": build_plain_tree,
        "hat": build_hat_tree,
        "wired": build_wired_tree,
        "branch": build_branch,
    }
    if spec.variant not in builders:
        raise BadParametersError(f"unknown tree variant {spec.variant!r}")
    return builders[spec.variant](spec.d, spec.n)


def uniform_direction_config(g: DirectedMultigraph, info: TreeInfo,
                             direction: int) -> RotorConfiguration:
    """All internal tree rotors set to one direction (1-based); rest slot 0.

    Only the internal vertices carry meaningful rotors; leaf and boundary
    rotors never fire in any experiment here.
    """
    internal = set(info.internal)
    slots = []
    for v in g.rotor_vertices:
        if v in internal:
            deg = g.outdeg(v)
            if not 1 <= direction <= deg:
                raise BadParametersError(f"direction {direction} out of range at {v!r}")
            slots.append(direction - 1)
        else:
            slots.append(0)
    return RotorConfiguration(tuple(slots))


def internal_slots(g: DirectedMultigraph, info: TreeInfo,
                   t: RotorConfiguration) -> tuple[int, ...]:
    """Rotor slots restricted to the internal tree vertices."""
    return tuple(t.slot(g, v) for v in info.internal)


def _mutual_pair(g: DirectedMultigraph, info: TreeInfo,
                 t: RotorConfiguration) -> tuple[str, str] | None:
    """A parent/child pair of internal tree vertices pointing at each other.

    Leaf rotors never fire and are ignored, matching the quotient in which
    the configuration lives on the wired tree.
    """
    internal = set(info.internal)
    for v in info.internal:
        for i, c in enumerate(info.children.get(v, [])):
            if c not in internal:
                continue
            v_points_c = t.slot(g, v) == i
            c_points_v = t.slot(g, c) == g.outdeg(c) - 1
            if v_points_c and c_points_v:
                return v, c
    return None


def is_acyclic_tree_config(g: DirectedMultigraph, info: TreeInfo,
                           t: RotorConfiguration) -> bool:
    return _mutual_pair(g, info, t) is None


def random_acyclic_tree_config(g: DirectedMultigraph, info: TreeInfo,
                               rng: random.Random) -> RotorConfiguration:
    """Random acyclic rotor state, sampled top-down.

    Each internal vertex draws uniformly among its slots, excluding the
    parent slot when the parent's rotor already points at it; leaf slots are
    fixed.  Every acyclic configuration has positive probability.
    """
    slot_of: dict[str, int] = {}
    for v in info.internal:      # BFS order: parents precede children
        deg = g.outdeg(v)
        choices = list(range(deg))
        p = info.parent.get(v)
        if p is not None and p in slot_of:
            kid_pos = info.children[p].index(v)
            if slot_of[p] == kid_pos:
                choices.remove(deg - 1)
        slot_of[v] = rng.choice(choices)
    slots = []
    for v in g.rotor_vertices:
        if v in slot_of:
            slots.append(slot_of[v])
        else:
            slots.append(0)
    t = RotorConfiguration(tuple(slots))
    assert is_acyclic_tree_config(g, info, t)
    return t


# -- hitting probabilities on the hat tree ---------------------------------

def _solve_harmonic(info: TreeInfo, boundary: dict[str, Fraction]) -> dict[str, Fraction]:
    """Exact solve of the discrete Dirichlet problem on the hat tree.

    The function is harmonic at the root and every internal vertex, and
    fixed on the leaves (o and the depth n-1 vertices).  Upward elimination
    writes H(v) = alpha_v + beta_v * H(parent); the root equation then closes
    the system and a downward pass fills in the values.
    """
    n = info.n
    is_leaf = lambda v: info.depth[v] == n - 1
    alpha: dict[str, Fraction] = {}
    beta: dict[str, Fraction] = {}
    order = sorted(info.internal, key=lambda v: -info.depth[v])
    for v in order:
        if v == "r":
            continue
        deg = Fraction(len(info.children[v]) + 1)
        num = Fraction(0)
        den = deg
        for c in info.children[v]:
            if is_leaf(c):
                num += boundary[c]
            else:
                num += alpha[c]
                den -= beta[c]
        alpha[v] = num / den
        beta[v] = Fraction(1) / den
    deg_r = Fraction(len(info.children["r"]) + 1)
    num = boundary["o"]
    den = deg_r
    for c in info.children["r"]:
        if is_leaf(c):
            num += boundary[c]
        else:
            num += alpha[c]
            den -= beta[c]
    H: dict[str, Fraction] = {}
    H["r"] = num / den
    H["o"] = boundary["o"]
    for v in sorted(info.internal, key=lambda v: info.depth[v]):
        if v != "r":
            H[v] = alpha[v] + beta[v] * H[info.parent[v]]
    for v in info.depth:
        if is_leaf(v):
            H[v] = boundary[v]
    return H


def hitting_probabilities(d: int, n: int, verify: bool = True,
                          ) -> tuple[dict[str, Fraction], Fraction]:
    """Exact leaf-hitting probabilities for random walk from the root.

    Returns a map from each hat-tree leaf to the probability that simple
    random walk started at r is absorbed there, together with the common
    value at the non-o leaves.  With ``verify`` the closed forms
    (a^{n-1}-1)/(a^n-1) at o and (a-1)/(a^n-1) elsewhere are checked, as is
    the total mass.
    """
    _check_params(d, n)
    info = _tree_skeleton(d, n)
    a = d - 1
    tree_leaves = [v for v in info.depth if info.depth[v] == n - 1]

    bnd_o = {v: Fraction(0) for v in tree_leaves}
    bnd_o["o"] = Fraction(1)
    H_o = _solve_harmonic(info, bnd_o)
    p_o = H_o["r"]

    z0 = tree_leaves[0]
    bnd_z = {v: Fraction(0) for v in tree_leaves}
    bnd_z["o"] = Fraction(0)
    bnd_z[z0] = Fraction(1)
    H_z = _solve_harmonic(info, bnd_z)
    h_r = H_z["r"]

    if verify:
        closed_o = Fraction(a ** (n - 1) - 1, a ** n - 1)
        closed_z = Fraction(a - 1, a ** n - 1)
        if p_o != closed_o or h_r != closed_z:
            raise GraphError("harmonic solve disagrees with closed forms")
        if p_o + (a ** (n - 1)) * h_r != 1:
            raise GraphError("leaf probabilities do not sum to 1")
        z1 = tree_leaves[-1]
        if z1 != z0:
            bnd2 = {v: Fraction(0) for v in tree_leaves}
            bnd2["o"] = Fraction(0)
            bnd2[z1] = Fraction(1)
            if _solve_harmonic(info, bnd2)["r"] != h_r:
                raise GraphError("leaf symmetry violated")

    probs = {z: h_r for z in tree_leaves}
    probs["o"] = p_o
    return probs, h_r


def harmonic_field_for_leaf(d: int, n: int, z: str) -> dict[str, Fraction]:
    """Full hitting-probability function H(x) = P_x(stop at z) on the hat tree."""
    info = _tree_skeleton(d, n)
    tree_leaves = [v for v in info.depth if info.depth[v] == n - 1]
    bnd = {v: Fraction(0) for v in tree_leaves}
    bnd["o"] = Fraction(0)
    bnd[z] = Fraction(1)
    return _solve_harmonic(info, bnd)


# -- exit measure (finite aggregation step) --------------------------------

@dataclass
class ExitMeasureResult:
    d: int
    n: int
    chips: int
    counts: dict[str, int]
    o_count: int
    initial: RotorConfiguration
    final: RotorConfiguration
    rotors_restored: bool
    per_leaf_ok: bool

    @property
    def ok(self) -> bool:
        return self.rotors_restored and self.per_leaf_ok


def exit_measure_experiment(d: int, n: int,
                            t0: RotorConfiguration | None = None,
                            rng: random.Random | None = None,
                            ) -> ExitMeasureResult:
    """Route (a^n-1)/(a-1) chips from the root to the leaf set.

    With an acyclic initial state, exactly one chip stops at each leaf
    z != o, the remaining (a^{n-1}-1)/(a-1) chips stop at o, and the rotors
    end exactly where they started.
    """
    g, info = build_hat_tree(d, n)
    if t0 is None:
        t0 = random_acyclic_tree_config(g, info, rng or random.Random(0))
    else:
        t0.validate(g)
        if not is_acyclic_tree_config(g, info, t0):
            raise NotAcyclicError("initial configuration has an oriented 2-cycle")
    a = d - 1
    m = (a ** n - 1) // (a - 1)
    counts, t1, _ = route_all(g, t0, {"r": m}, set(info.leaves))
    o_count = counts.get("o", 0)
    per_leaf_ok = all(counts.get(z, 0) == 1
                      for z in info.leaves if z != "o")
    per_leaf_ok = per_leaf_ok and o_count == (a ** (n - 1) - 1) // (a - 1)
    per_leaf_ok = per_leaf_ok and sum(counts.values()) == m
    return ExitMeasureResult(
        d=d, n=n, chips=m, counts=counts, o_count=o_count,
        initial=t0, final=t1,
        rotors_restored=(t1 == t0), per_leaf_ok=per_leaf_ok,
    )


# -- branch experiments ----------------------------------------------------

@dataclass
class BranchRunResult:
    d: int
    n: int
    chips: int
    stops: list[str]
    rotors_restored: bool
    pattern_ok: bool

    @property
    def ok(self) -> bool:
        return self.rotors_restored and self.pattern_ok


def alternation_experiment(n: int) -> BranchRunResult:
    """Ternary branch with all rotors in direction 1: 2^n - 1 chips alternate.

    Stops run b, o, b, ..., b and the rotors return exactly to direction 1.
    """
    d = 3
    g, info = build_branch(d, n)
    t0 = uniform_direction_config(g, info, 1)
    m = 2 ** n - 1
    _, t, trace = route_all(g, t0, {"r": m}, {"o", "b"})
    stops = trace.chip_stops
    expected = ["b" if k % 2 == 0 else "o" for k in range(m)]
    return BranchRunResult(
        d=d, n=n, chips=m, stops=stops,
        rotors_restored=(t == t0), pattern_ok=(stops == expected),
    )


def recurrence_experiment(d: int, n: int) -> BranchRunResult:
    """Branch with all rotors in direction d-1: the first n-1 chips hit o.

    Afterwards every rotor points in direction d.
    """
    g, info = build_branch(d, n)
    t0 = uniform_direction_config(g, info, d - 1)
    m = n - 1
    _, t, trace = route_all(g, t0, {"r": m}, {"o", "b"})
    stops = trace.chip_stops
    final_expected = uniform_direction_config(g, info, d)
    final_ok = internal_slots(g, info, t) == internal_slots(g, info, final_expected)
    return BranchRunResult(
        d=d, n=n, chips=m, stops=stops,
        rotors_restored=final_ok,
        pattern_ok=all(s == "o" for s in stops),
    )


def expected_returns(d: int, m: int) -> Fraction:
    """Expected number of returns to the origin for m random walks: m/(d-1)."""
    if d < 3:
        raise BadParametersError("degree d must be at least 3")
    return Fraction(m, d - 1)
