import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coinwalk import (
    StructureError,
    build_cycle,
    classical_run,
    classical_step,
    half_edge_run,
    half_edge_step,
    hadamard_phi,
    port_transition_probabilities,
    tvd,
    uniform_distribution,
    validate_distribution,
)
from coinwalk.coin import default_coin_spec


def delta(n, j):
    p = np.zeros(n)
    p[j] = 1.0
    return p


def test_single_step_splits_evenly_on_cycle():
    g = build_cycle(5)
    out = classical_step(delta(5, 0), g)
    np.testing.assert_allclose(out, [0.0, 0.5, 0.0, 0.0, 0.5], atol=0)


def test_two_steps_on_cycle():
    g = build_cycle(5)
    out = classical_run(delta(5, 0), g, 2)
    np.testing.assert_allclose(out, [0.5, 0.0, 0.25, 0.25, 0.0], atol=1e-15)


def test_uniform_is_stationary_on_regular_graphs():
    for n in (3, 4, 7):
        g = build_cycle(n)
        u = uniform_distribution(n)
        np.testing.assert_allclose(classical_step(u, g), u, atol=1e-15)


def test_degree_weighted_distribution_is_stationary(multi_graph):
    degrees = np.array(multi_graph.vertex_degrees, dtype=float)
    pi = degrees / degrees.sum()
    np.testing.assert_allclose(classical_step(pi, multi_graph), pi, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    weights=st.lists(
        st.floats(min_value=0.0, max_value=1.0), min_size=7, max_size=7
    ).filter(lambda w: sum(w) > 1e-6)
)
def test_step_preserves_the_simplex(weights, cycle7):
    p = np.asarray(weights) / sum(weights)
    out = classical_run(p, cycle7, 3)
    assert out.min() >= 0.0
    assert out.sum() == pytest.approx(1.0, abs=1e-12)
    validate_distribution(out)


def test_walk_matches_binomial_before_wraparound():
    # on a long cycle the first steps cannot feel the topology, so the
    # occupation is the symmetric binomial of net displacement
    n, t = 25, 10
    g = build_cycle(n)
    out = classical_run(delta(n, 0), g, t)
    for j in range(n):
        disp = j if j <= n // 2 else j - n
        if (t + disp) % 2 == 0 and abs(disp) <= t:
            expected = math.comb(t, (t + disp) // 2) / 2.0**t
        else:
            expected = 0.0
        assert out[j] == pytest.approx(expected, abs=1e-14)


def test_odd_cycle_mixes_to_uniform():
    g = build_cycle(7)
    out = classical_run(delta(7, 0), g, 200)
    assert tvd(out, uniform_distribution(7)) < 0.01


def test_even_cycle_never_mixes():
    g = build_cycle(6)
    p = delta(6, 0)
    u = uniform_distribution(6)
    for _ in range(50):
        p = classical_step(p, g)
        assert tvd(p, u) >= 0.5 - 1e-12


def test_isolated_vertex_keeps_its_mass():
    from coinwalk.graph import load_graph
    import json
    import tempfile

    payload = {
        "vertices": 3,
        "degree": 1,
        "edges": [{"u": 0, "pu": 0, "v": 1, "pv": 0}],
    }
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(payload, fh)
        path = fh.name
    with pytest.warns(UserWarning):
        g = load_graph(path)
    out = classical_step(np.array([0.5, 0.0, 0.5]), g)
    assert out[2] == 0.5


def test_hadamard_squares_to_fair_toss():
    t = port_transition_probabilities(build_cycle(3), [hadamard_phi(np.pi / 2)])
    np.testing.assert_allclose(t[0], np.full((2, 2), 0.5), atol=1e-15)


def test_port_chain_marginal_equals_vertex_chain(cycle7, multi_graph):
    rng = np.random.default_rng(17)
    for g in (cycle7, multi_graph):
        n, d = g.num_vertices, g.degree
        spec = default_coin_spec(g)
        blocks = spec.blocks if not spec.shared else [spec.blocks[0]] * n
        transitions = port_transition_probabilities(g, blocks)
        # start from port-uniform occupation within each vertex
        p0 = rng.random(n)
        p0 /= p0.sum()
        q = np.zeros((n, d))
        for j in range(n):
            dj = g.vertex_degrees[j]
            q[j, :dj] = p0[j] / dj
        q = q.reshape(n * d)
        for t in range(1, 6):
            q = half_edge_step(q, g, transitions)
            np.testing.assert_allclose(
                q.reshape(n, d).sum(axis=1),
                classical_run(p0, g, t),
                atol=1e-13,
            )


def test_biased_toss_changes_the_chain():
    g = build_cycle(5)
    theta = 0.3
    block = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )
    transitions = port_transition_probabilities(g, [block] * 5)
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    q0 = np.zeros(10)
    q0[0] = 1.0  # at vertex 0, port 0
    q1 = half_edge_step(q0, g, transitions)
    # toss keeps port 0 with prob cos^2 then crosses to (1, 1), else (4, 0)
    assert q1[2 * 1 + 1] == pytest.approx(c2, abs=1e-15)
    assert q1[2 * 4 + 0] == pytest.approx(s2, abs=1e-15)


def test_half_edge_run_conserves_mass(multi_graph):
    n, d = multi_graph.num_vertices, multi_graph.degree
    spec = default_coin_spec(multi_graph)
    transitions = port_transition_probabilities(multi_graph, spec.blocks)
    q0 = np.zeros(n * d)
    q0[0] = 1.0
    q = half_edge_run(q0, multi_graph, transitions, 20)
    assert q.sum() == pytest.approx(1.0, abs=1e-12)
    assert q.min() >= 0.0


def test_validation_rejects_bad_inputs(cycle7):
    with pytest.raises(StructureError, match="negative"):
        validate_distribution(np.array([1.1, -0.1]))
    with pytest.raises(StructureError, match="sums to"):
        validate_distribution(np.array([0.7, 0.2]))
    with pytest.raises(StructureError, match="length"):
        classical_step(np.ones(3) / 3, cycle7)
    with pytest.raises(StructureError, match="nonnegative"):
        classical_run(uniform_distribution(7), cycle7, -1)
    with pytest.raises(StructureError, match="per vertex"):
        half_edge_step(np.ones(14) / 14, cycle7, [np.full((2, 2), 0.5)] * 3)
