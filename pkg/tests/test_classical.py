import numpy as np
import pytest

from biasedgames.classical import (
    DeterministicStrategy,
    classical_closed_form,
    classical_value_chsh,
    classical_value_expansion,
    classical_value_svetlichny,
    strategy_values,
    walsh_hadamard,
)
from biasedgames.errors import BudgetError, DomainError, ValidationError
from biasedgames.game_model import JointBias, expand_svetlichny
from oracles import chsh_brute_classical, svetlichny_brute_classical


def test_chsh_uniform():
    value, _ = classical_value_chsh(JointBias.product(0.5, 0.5))
    assert value == 0.5


def test_chsh_three_quarters_all_plus_witness():
    value, witness = classical_value_chsh(JointBias.product(0.75, 0.75))
    assert value == pytest.approx(0.875, abs=1e-15)
    assert witness.outcomes == ((1, 1), (1, 1))


def test_chsh_barely_nonlocal_alice():
    value, _ = classical_value_chsh(JointBias.product(0.9, 0.5))
    assert value == pytest.approx(0.9, abs=1e-15)


@pytest.mark.parametrize("p, q, expected", [(0.5, 0.5, 0.5), (0.75, 0.75, 0.875), (0.99, 0.5, 0.99)])
def test_closed_form_examples(p, q, expected):
    assert classical_closed_form(p, q) == pytest.approx(expected, abs=1e-15)


def test_closed_form_domain():
    with pytest.raises(DomainError):
        classical_closed_form(0.4, 0.6)


def test_enumeration_matches_closed_form_grid():
    grid = np.linspace(0.5, 0.99, 21)
    for p in grid:
        for q in grid:
            value, _ = classical_value_chsh(JointBias.product(p, q))
            assert abs(value - classical_closed_form(p, q)) <= 1e-12


def test_enumeration_matches_win_counting():
    rng = np.random.default_rng(3)
    for _ in range(200):
        P = rng.dirichlet(np.ones(4)).reshape(2, 2)
        value, _ = classical_value_chsh(JointBias(P))
        assert value == pytest.approx(chsh_brute_classical(P), abs=1e-12)


def test_quadrant_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p, q = rng.uniform(0.01, 0.99, 2)
        values = [classical_value_chsh(JointBias.product(a, b))[0] for a, b in
                  [(p, q), (1 - p, q), (p, 1 - q), (1 - p, 1 - q)]]
        assert max(values) - min(values) <= 1e-12


def test_chsh_witness_attains_value():
    rng = np.random.default_rng(8)
    for _ in range(50):
        bias = JointBias(rng.dirichlet(np.ones(4)).reshape(2, 2))
        value, witness = classical_value_chsh(bias)
        from biasedgames.game_model import joint_score

        assert joint_score(bias, witness.correlator_table()) == value


def test_strategy_index_roundtrip():
    for idx in range(64):
        assert DeterministicStrategy.from_index(idx, 3).index() == idx
    s = DeterministicStrategy.from_index(0b0110, 2)
    # bit 0 party 1 unprimed, bit 1 party 1 primed, bit 2 party 2 unprimed
    assert s.outcomes == ((1, -1), (-1, 1))
    assert s.to_json() == [[1, -1], [-1, 1]]


def test_strategy_rejects_bad_outcomes():
    with pytest.raises(ValidationError):
        DeterministicStrategy(((1, 0),))


@pytest.mark.parametrize("n, p, expected", [(2, 0.5, 1.0), (3, 0.5, 1.0), (3, 0.9, 1.888)])
def test_svetlichny_values(n, p, expected):
    value, witness = classical_value_svetlichny(n, p)
    assert value == pytest.approx(expected, abs=1e-12)
    assert witness.score(expand_svetlichny(n, p)) == value


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("p", [0.5, 0.62, 0.85])
def test_svetlichny_matches_brute_force(n, p):
    value, _ = classical_value_svetlichny(n, p)
    assert value == pytest.approx(svetlichny_brute_classical(n, p), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_strategy_values_match_direct_scoring(n):
    exp = expand_svetlichny(n, 0.66)
    values = strategy_values(exp)
    for idx in range(0, 4 ** n, max(1, 4 ** n // 97)):
        assert values[idx] == pytest.approx(DeterministicStrategy.from_index(idx, n).score(exp), abs=1e-12)


def test_walsh_hadamard_against_matrix():
    rng = np.random.default_rng(0)
    v = rng.normal(size=16)
    H = np.array([[(-1) ** bin(s & d).count("1") for s in range(16)] for d in range(16)])
    assert np.allclose(walsh_hadamard(v), H @ v, atol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_enumeration_order_independent(n):
    values = strategy_values(expand_svetlichny(n, 0.7))
    assert np.max(values) == np.max(values[::-1])
    first = int(np.argmax(values))
    value, witness = classical_value_svetlichny(n, 0.7)
    assert witness.index() == first
    assert value == pytest.approx(values[first], abs=1e-12)


def test_chunked_enumeration_consistent():
    exp = expand_svetlichny(6, 0.81)
    value, witness = classical_value_expansion(exp)
    assert value == witness.score(exp)
    assert value == pytest.approx(np.max(strategy_values(exp)), abs=1e-12)


def test_budget_error_names_limit():
    with pytest.raises(BudgetError, match="12"):
        classical_value_svetlichny(13, 0.5)
