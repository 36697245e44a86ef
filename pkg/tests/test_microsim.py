"""Two-register simulator against the register-free walk."""

import numpy as np
import pytest

from kdwalk.combinatorics import ProblemParams, canonical_instance, make_instance
from kdwalk.fullwalk import run_full_algorithm
from kdwalk.microsim import TwoRegisterSim, run_two_register_microsim


@pytest.fixture(scope="module")
def sim():
    return TwoRegisterSim(ProblemParams(5, 2, m=4), canonical_instance(5, 2))


def test_requires_value_bound():
    with pytest.raises(ValueError, match="value bound"):
        TwoRegisterSim(ProblemParams(5, 2), canonical_instance(5, 2))


def test_rejects_values_above_bound():
    with pytest.raises(ValueError, match="exceeds bound"):
        TwoRegisterSim(ProblemParams(5, 2, m=2), canonical_instance(5, 2))


def test_cap_exceeded():
    with pytest.raises(MemoryError):
        TwoRegisterSim(ProblemParams(5, 2, m=4), canonical_instance(5, 2), cap=1000)


def test_alphabet_is_power_of_two(sim):
    assert sim.alphabet == 8  # m = 4 needs 3 bits
    assert sim.dim2 == 8**4


def test_initial_state_support(sim):
    """Post-setup slots hold the subset's values in index order, last slot 0."""
    state = sim.initial_state()
    values = sim.instance.values
    a = sim.alphabet
    for i, (s, _) in enumerate(sim.space.vertices):
        expect = sum(values[idx - 1] * a**j for j, idx in enumerate(s))
        nz = np.flatnonzero(np.abs(state[i]) > 1e-15)
        assert list(nz) == [expect]
    assert abs(np.linalg.norm(state) - 1) < 1e-14


def test_oracle_involution(sim):
    state = sim.initial_state()
    out = sim.apply_oracle(sim.apply_oracle(state))
    assert np.max(np.abs(out - state)) == 0.0


def test_oracle_loads_queried_value(sim):
    state = sim.apply_oracle(sim.initial_state())
    probe = state.copy()
    probe[np.arange(sim.space.n_vertices), sim.support_queried] = 0.0
    assert np.max(np.abs(probe)) == 0.0


def test_operators_preserve_norm(sim):
    rng = np.random.default_rng(3)
    state = rng.normal(size=(sim.space.n_vertices, sim.dim2)) * (1 + 0j)
    state /= np.linalg.norm(state)
    for op in (sim.apply_u_alpha, sim.apply_oracle, sim.apply_u_beta_ext, sim.apply_phase_flip):
        out = op(state)
        assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_beta_ext_involution(sim):
    rng = np.random.default_rng(4)
    state = rng.normal(size=(sim.space.n_vertices, sim.dim2)) * (1 + 0j)
    state /= np.linalg.norm(state)
    out = sim.apply_u_beta_ext(sim.apply_u_beta_ext(state))
    assert np.max(np.abs(out - state)) < 1e-12


@pytest.mark.parametrize("t1,t2", [(1, 1), (1, 2), (2, 2)])
def test_marginal_matches_register_free_walk(t1, t2):
    params = ProblemParams(5, 2, m=4)
    instance = canonical_instance(5, 2)
    micro = run_two_register_microsim(params, instance, t1, t2)
    sim = TwoRegisterSim(params, instance)
    full = run_full_algorithm(sim.space, instance, t1, t2)
    dev = np.max(np.abs(micro.marginal - np.abs(full.state) ** 2))
    assert dev < 1e-10
    assert micro.max_off_support < 1e-12


def test_slot_correspondence_assertions(sim):
    """After each oracle call the last slot carries the freshly queried
    value; after the extended beta reflection the rearranged slots still
    carry the values of the new subset and outside element."""
    result = sim.run(1, 2)
    tags = [tag for tag, _ in result.support_checks]
    assert tags == [
        "setup",
        "block1.step1.queried",
        "block1.step1.rotated",
        "block1.step1.cleared",
        "block1.step2.queried",
        "block1.step2.rotated",
        "block1.step2.cleared",
    ]
    assert all(v < 1e-12 for _, v in result.support_checks)


def test_final_norm_and_marked_probability(sim):
    result = sim.run(1, 2)
    assert abs(np.sum(result.marginal) - 1) < 1e-12
    p_marked = float(np.sum(result.marginal[sim.marked_rows]))
    full = run_full_algorithm(sim.space, sim.instance, 1, 2)
    assert p_marked == pytest.approx(full.marked_probability, abs=1e-12)


def test_different_value_layouts_agree():
    # same collision structure, different values: identical marginals
    params = ProblemParams(5, 2, m=4)
    a = run_two_register_microsim(params, make_instance((1, 1, 2, 3, 4), 2), 1, 1)
    b = run_two_register_microsim(params, make_instance((3, 3, 1, 4, 2), 2), 1, 1)
    assert np.max(np.abs(a.marginal - b.marginal)) < 1e-12
