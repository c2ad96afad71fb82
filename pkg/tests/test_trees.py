import random
from fractions import Fraction

import pytest

from rotorlab.graph import (
    enumerate_recurrent,
    is_recurrent,
    spanning_tree_count,
)
from rotorlab.group import order_of_generator, verify_isomorphism
from rotorlab.trees import (
    BadParametersError,
    NotAcyclicError,
    TreeSpec,
    alternation_experiment,
    build_branch,
    build_hat_tree,
    build_tree,
    build_wired_tree,
    exit_measure_experiment,
    expected_returns,
    harmonic_field_for_leaf,
    hitting_probabilities,
    is_acyclic_tree_config,
    random_acyclic_tree_config,
    recurrence_experiment,
    uniform_direction_config,
)
from rotorlab.walk import check_harmonic_invariant, route_all, route_to_sink


def test_bad_parameters():
    with pytest.raises(BadParametersError):
        build_wired_tree(2, 3)
    with pytest.raises(BadParametersError):
        build_wired_tree(3, 1)


def test_wired_tree_smallest():
    g, info = build_wired_tree(3, 2)
    assert set(g.vertices) == {"r", "s"}
    assert g.out["r"] == ("s", "s", "s")
    assert spanning_tree_count(g) == 3


def test_wired_tree_structure():
    g, info = build_wired_tree(3, 3)
    assert set(g.vertices) == {"r", "r/1", "r/2", "s"}
    # each neighbor of the sink except the root has a = 2 edges to it
    assert g.edge_count("r/1", "s") == 2
    assert g.edge_count("r/2", "s") == 2
    assert g.edge_count("r", "s") == 1
    assert spanning_tree_count(g) == 21


def test_wired_tree_enumeration_matches_determinant():
    for d, n in [(3, 2), (3, 3), (4, 2)]:
        g, _ = build_wired_tree(d, n)
        assert len(enumerate_recurrent(g)) == spanning_tree_count(g)


def test_acyclic_equals_recurrent_on_wired_trees():
    for d, n in [(3, 2), (3, 3), (4, 2)]:
        g, info = build_wired_tree(d, n)
        from itertools import product
        for slots in product(*(range(g.outdeg(v)) for v in g.rotor_vertices)):
            from rotorlab.graph import RotorConfiguration
            t = RotorConfiguration(slots)
            assert is_recurrent(g, t) == is_acyclic_tree_config(g, info, t)


def test_root_order_small():
    # order of e_r on the wired tree is (a^n - 1)/(a - 1)
    for d, n in [(3, 2), (3, 3), (4, 2), (4, 3), (5, 2)]:
        a = d - 1
        g, _ = build_wired_tree(d, n)
        assert order_of_generator(g, "r", verify_witnesses=1) == \
            (a ** n - 1) // (a - 1)


def test_root_order_by_repeated_routing():
    g, info = build_wired_tree(4, 2)
    rng = random.Random(4)
    t0 = random_acyclic_tree_config(g, info, rng)
    assert is_recurrent(g, t0)
    t = t0
    hits = []
    for k in range(1, 13):
        t, _ = route_to_sink(g, t, "r")
        if t == t0:
            hits.append(k)
    assert hits == [4, 8, 12]    # (3^2-1)/(3-1) = 4


def test_wired_tree_isomorphism_report():
    g, _ = build_wired_tree(3, 2)
    assert verify_isomorphism(g).ok


def test_hat_tree_structure():
    g, info = build_hat_tree(3, 2)
    assert set(g.vertices) == {"o", "r", "r/1", "r/2"}
    assert set(info.leaves) == {"o", "r/1", "r/2"}
    assert g.out["r"] == ("r/1", "r/2", "o")
    g3, info3 = build_hat_tree(3, 3)
    assert len(info3.leaves) == 1 + 4


def test_branch_structure():
    g, info = build_branch(3, 2)
    # smallest branch: o, r, b with two parallel r-b edges
    assert set(g.vertices) == {"o", "r", "b"}
    assert g.out["r"] == ("b", "b", "o")
    g3, info3 = build_branch(3, 3)
    assert set(g3.vertices) == {"o", "r", "r/1", "r/2", "b"}
    assert g3.edge_count("r/1", "b") == 2


def test_build_tree_dispatch():
    g, info = build_tree(TreeSpec(3, 2, "wired"))
    assert info.variant == "wired"
    with pytest.raises(BadParametersError):
        build_tree(TreeSpec(3, 2, "bogus"))


def test_hitting_probabilities_closed_forms():
    probs, h_r = hitting_probabilities(3, 2)
    assert probs["o"] == Fraction(1, 3)
    assert h_r == Fraction(1, 3)
    probs, h_r = hitting_probabilities(3, 3)
    assert probs["o"] == Fraction(3, 7)
    assert h_r == Fraction(1, 7)
    # total mass is 1
    assert sum(probs.values()) == 1


def test_hitting_probabilities_grid():
    for d in (3, 4, 5):
        a = d - 1
        for n in (2, 3, 4):
            probs, h_r = hitting_probabilities(d, n)
            assert probs["o"] == Fraction(a ** (n - 1) - 1, a ** n - 1)
            assert h_r == Fraction(a - 1, a ** n - 1)


def test_exit_measure_smallest():
    res = exit_measure_experiment(3, 2, rng=random.Random(0))
    assert res.chips == 3
    assert res.o_count == 1
    assert res.ok


def test_exit_measure_n3():
    res = exit_measure_experiment(3, 3, rng=random.Random(1))
    assert res.chips == 7
    assert res.o_count == 3
    assert res.ok


def test_exit_measure_random_configs():
    rng = random.Random(2)
    for d in (3, 4):
        for n in (2, 3, 4):
            for _ in range(5):
                res = exit_measure_experiment(d, n, rng=rng)
                assert res.ok, (d, n)


def test_exit_measure_rejects_cyclic():
    g, info = build_hat_tree(3, 3)
    from rotorlab.graph import RotorConfiguration
    # r points at r/1 (slot 0) and r/1 points at parent (slot 2)
    t = RotorConfiguration.from_dict(
        g, {v: (0 if v != "r/1" else 2) for v in g.rotor_vertices})
    with pytest.raises(NotAcyclicError):
        exit_measure_experiment(3, 3, t0=t)


def test_exit_measure_satisfies_harmonic_invariant():
    d, n = 3, 3
    g, info = build_hat_tree(d, n)
    rng = random.Random(5)
    t0 = random_acyclic_tree_config(g, info, rng)
    m = ((d - 1) ** n - 1) // (d - 2)
    counts, t1, trace = route_all(g, t0, {"r": m}, set(info.leaves),
                                  record_trace=True)
    z = [v for v in info.leaves if v != "o"][0]
    H = harmonic_field_for_leaf(d, n, z)
    assert check_harmonic_invariant(g, H, {"r": m}, counts, trace)
    # the invariant value is exactly the count at z
    assert counts[z] == m * H["r"]


def test_alternation_base_case():
    res = alternation_experiment(2)
    assert res.stops == ["b", "o", "b"]
    assert res.ok


def test_alternation_medium():
    res = alternation_experiment(6)
    assert res.chips == 63
    assert res.ok


def test_recurrence_experiment():
    for d, n in [(3, 2), (3, 5), (4, 4), (5, 3)]:
        res = recurrence_experiment(d, n)
        assert res.ok, (d, n)


def test_expected_returns():
    assert expected_returns(3, 10) == 5
    assert expected_returns(4, 9) == 3
    assert expected_returns(3, 7) == Fraction(7, 2)


def test_random_acyclic_config_validity():
    rng = random.Random(9)
    g, info = build_hat_tree(4, 3)
    for _ in range(30):
        t = random_acyclic_tree_config(g, info, rng)
        assert is_acyclic_tree_config(g, info, t)


def test_uniform_direction_config_directions():
    g, info = build_branch(3, 3)
    t = uniform_direction_config(g, info, 2)
    assert t.target(g, "r") == "r/2"
    t3 = uniform_direction_config(g, info, 3)
    assert t3.target(g, "r") == "o"
    assert t3.target(g, "r/1") == "r"


def test_branch_root_rotor_cycle_step_by_step():
    # smallest branch: three successive chips leave via directions 2, 3, 1
    from rotorlab.walk import step
    g, info = build_branch(3, 2)
    t = uniform_direction_config(g, info, 1)
    t, tgt1 = step(g, t, "r")
    assert tgt1 == "b" and t.slot(g, "r") == 1     # direction 2
    t, tgt2 = step(g, t, "r")
    assert tgt2 == "o" and t.slot(g, "r") == 2     # direction 3, up
    t, tgt3 = step(g, t, "r")
    assert tgt3 == "b" and t.slot(g, "r") == 0     # direction 1 again
