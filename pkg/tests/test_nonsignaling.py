import itertools
import math

import numpy as np
import pytest

from biasedgames.classical import DeterministicStrategy, classical_value_chsh
from biasedgames.errors import ValidationError
from biasedgames.game_model import JointBias
from biasedgames.nonsignaling import (
    BehaviorTable,
    behavior_from_correlators,
    behavior_from_strategy,
    deterministic_behavior,
    ns_value,
    ns_vertices,
    pr_box,
    simulate_rounds,
)
from biasedgames.quantum_chsh import optimal_strategy, quantum_value_chsh, tsirelson_biased


def random_bias(rng, floor=0.0):
    while True:
        w = rng.dirichlet(np.ones(4))
        if w.min() >= floor:
            return JointBias.from_flat(w)


def test_pr_box_definition():
    P = pr_box().probs
    for x, y, a, b in itertools.product(range(2), repeat=4):
        assert P[x, y, a, b] == (0.5 if a ^ b == x & y else 0.0)
    assert pr_box().correlators().E.tolist() == [[1, 1], [1, -1]]


def test_pr_box_wins_every_input():
    P = pr_box().probs
    for x, y in itertools.product(range(2), repeat=2):
        assert sum(P[x, y, a, b] for a, b in itertools.product(range(2), repeat=2) if a ^ b == x & y) == 1.0


def test_vertices():
    vertices = ns_vertices()
    assert len(vertices) == 24
    assert len({v.probs.tobytes() for v in vertices}) == 24
    for v in vertices[:16]:
        assert set(np.unique(v.probs)) <= {0.0, 1.0}
    assert any(v == pr_box() for v in vertices[16:])
    for idx, v in enumerate(vertices[:16]):
        table = DeterministicStrategy.from_index(idx, 2).correlator_table()
        assert np.array_equal(v.correlators().E, table.E)


def test_behavior_validation():
    P = np.zeros((2, 2, 2, 2))
    P[:, :, 0, 0] = 1.0
    P[0, 1] = 0.0
    P[0, 1, 1, 1] = 1.0  # Alice's marginal depends on y
    with pytest.raises(ValidationError):
        BehaviorTable(P)
    with pytest.raises(ValidationError):
        BehaviorTable(np.full((2, 2, 2, 2), 0.3))


@pytest.mark.parametrize("p, q", [(0.5, 0.5), (0.75, 0.75)])
def test_ns_value_products(p, q):
    value, witness = ns_value(JointBias.product(p, q))
    assert value == 1.0
    if (p, q) == (0.5, 0.5):
        assert witness == pr_box()


def test_ns_value_random_and_mixtures():
    rng = np.random.default_rng(12)
    vertices = ns_vertices()
    for _ in range(100):
        bias = random_bias(rng, floor=1e-6)
        value, witness = ns_value(bias)
        # the PR box scores the exact sum of the cells, 1 up to input normalization
        assert value == math.fsum(bias.flat())
        assert abs(value - 1.0) <= 1e-12
        assert value == max(v.score(bias) for v in vertices)
        weights = rng.dirichlet(np.ones(24))
        mixture = BehaviorTable(sum(w * v.probs for w, v in zip(weights, vertices)))
        assert mixture.score(bias) <= value + 1e-12


def test_chain_of_bounds():
    for p in np.linspace(0.05, 0.95, 10):
        for q in np.linspace(0.05, 0.95, 10):
            bias = JointBias.product(p, q)
            c, _ = classical_value_chsh(bias)
            qv = quantum_value_chsh(p, q)
            ns, _ = ns_value(bias)
            assert c <= qv + 1e-9 <= ns + 2e-9


def test_behavior_json_layout():
    rows = deterministic_behavior(DeterministicStrategy.from_index(0b0010, 2)).to_json()
    # Alice outputs +1 for x=0 and -1 for x=1, Bob always +1
    assert rows[0] == [1.0, 0.0, 0.0, 0.0]  # (x,y)=(0,0): (a,b)=(0,0)
    assert rows[2] == [0.0, 0.0, 1.0, 0.0]  # (x,y)=(1,0): (a,b)=(1,0)


def test_strategy_behavior_matches_uniform_marginal_formula():
    s = optimal_strategy(0.6, 0.6)
    exact = behavior_from_strategy(s.A, s.B, s.state)
    approx = behavior_from_correlators(s.correlators())
    assert np.allclose(exact.probs, approx.probs, atol=1e-12)


def test_simulate_pr_box_always_wins():
    rng = np.random.default_rng(0)
    for seed in range(5):
        report = simulate_rounds(pr_box(), random_bias(rng), 1000, seed)
        assert report.empirical_score == 1.0


def replay(behavior, bias, rounds, seed):
    """Plain-loop replay of the documented draw contract."""
    gen = np.random.Generator(np.random.PCG64(seed))
    u = gen.random((rounds, 2))
    cells = bias.flat()
    table = behavior.probs.reshape(4, 4)
    counts = [[0, 0], [0, 0]]
    wins = 0
    for r in range(rounds):
        acc, s = 0.0, 3
        for k in range(4):
            acc += cells[k]
            if u[r, 0] < acc:
                s = k
                break
        acc, o = 0.0, 3
        for k in range(4):
            acc += table[s, k]
            if u[r, 1] < acc:
                o = k
                break
        x, y, a, b = s >> 1, s & 1, o >> 1, o & 1
        counts[x][y] += 1
        wins += (a ^ b) == (x & y)
    return counts, (2 * wins - rounds) / rounds


def test_simulation_golden_counts():
    report = simulate_rounds(pr_box(), JointBias.product(0.5, 0.5), 1000, 7)
    assert report.counts == [[238, 272], [226, 264]]
    assert report.empirical_score == 1.0
    assert report.to_json()["seed"] == 7


def test_simulation_matches_replay():
    rng = np.random.default_rng(1)
    s = optimal_strategy(0.6, 0.7)
    behavior = behavior_from_correlators(s.correlators())
    bias = random_bias(rng)
    report = simulate_rounds(behavior, bias, 3000, 123)
    counts, score = replay(behavior, bias, 3000, 123)
    assert report.counts == counts
    assert report.empirical_score == pytest.approx(score, abs=1e-15)


def test_simulation_reproducible():
    bias = JointBias.from_flat([0.1, 0.2, 0.3, 0.4])
    behavior = behavior_from_correlators([[0.5, 0.2], [-0.1, 0.9]])
    assert simulate_rounds(behavior, bias, 5000, 3) == simulate_rounds(behavior, bias, 5000, 3)


def test_undefined_cell_reported_as_none():
    report = simulate_rounds(pr_box(), JointBias.from_flat([0.5, 0.5, 0.0, 0.0]), 200, 0)
    assert report.counts[1] == [0, 0]
    assert report.conditional[1] == [None, None]
    assert report.to_json()["conditionals"][1] == [None, None]
    assert report.correlators() is None


def _within_sigma(score, mean, rounds, k=3):
    sigma = math.sqrt((1 - mean ** 2) / rounds)
    return abs(score - mean) <= k * sigma


def test_simulation_deterministic_behavior_statistics():
    bias = JointBias.product(0.75, 0.75)
    behavior = deterministic_behavior(DeterministicStrategy.from_index(0, 2))
    report = simulate_rounds(behavior, bias, 10 ** 6, 2024)
    assert _within_sigma(report.empirical_score, 0.875, 10 ** 6)


def test_simulation_quantum_behavior_statistics():
    p = q = 0.6
    s = optimal_strategy(p, q)
    behavior = behavior_from_correlators(s.correlators())
    rounds = 10 ** 6
    report = simulate_rounds(behavior, JointBias.product(p, q), rounds, 99)
    assert _within_sigma(report.empirical_score, tsirelson_biased(p, q), rounds)
    E = s.correlators().E
    for i, j in itertools.product(range(2), repeat=2):
        n = report.counts[i][j]
        se = math.sqrt((1 - E[i, j] ** 2) / n)
        assert abs(report.conditional[i][j] - E[i, j]) <= 5 * se


def test_simulate_validation():
    with pytest.raises(ValidationError):
        simulate_rounds(pr_box(), JointBias.product(0.5, 0.5), 0, 1)
