import math

import numpy as np
import pytest

from iface.awareness import awareness_family, is_situation_aware_direct
from iface.errors import InfeasibleError, InputError
from iface.model import SensorSet, TrustLevel
from iface.solver import (
    HIGH_TRUST,
    MID_TRUST,
    NO_TRUST,
    alt_heuristic,
    delta_gamma,
    greedy_max,
    regime_for,
    solve,
    solve_mid_trust,
)
from iface.uii import GammaOracle
from oracles import ExactGamma, brute_optimum, random_instance


@pytest.fixture
def chain_family(chain):
    system, pool, task, oracle = chain
    return oracle, task, awareness_family(oracle, task)


@pytest.mark.parametrize("k,size,allowed", [
    (1, 1, [[0], [1]]),
    (2, 1, [[0], [1]]),
    (3, 1, [[0]]),
    (4, 2, None),
])
def test_chain_optima(chain_family, k, size, allowed):
    oracle, task, fam = chain_family
    sol = solve(oracle, task, fam, TrustLevel(k))
    assert sol.cardinality == size
    if allowed is not None:
        assert sol.selected.ids in allowed
    assert oracle.gamma(sol.selected) >= k
    assert is_situation_aware_direct(oracle, task, sol.selected)


def test_chain_regimes(chain_family):
    oracle, task, _ = chain_family
    assert [regime_for(oracle, task, k) for k in (1, 2, 3, 4)] == [HIGH_TRUST, HIGH_TRUST, MID_TRUST, NO_TRUST]


def test_chain_mid_trust_bound(chain_family):
    oracle, task, fam = chain_family
    sol = solve(oracle, task, fam, 3)
    assert sol.regime == MID_TRUST and not sol.is_optimal
    assert 1.0 <= sol.bound_delta <= sol.weak_bound == pytest.approx(1 + math.log(4))
    assert sol.bounds.max_bound == sol.bound_delta


def test_solution_export(chain_family):
    oracle, task, fam = chain_family
    doc = solve(oracle, task, fam, 1).to_dict()
    for key in ("selected", "gamma_value", "regime", "is_optimal", "bound_delta",
                "weak_bound", "wall_time_ms", "evaluations"):
        assert key in doc
    assert doc["is_optimal"] and doc["bound_delta"] is None
    assert "wall_time_ms" not in solve(oracle, task, fam, 1).to_dict(timing=False)


def test_delta_gamma(chain_family):
    oracle, _, _ = chain_family
    assert delta_gamma(oracle, 4, 0) == pytest.approx(0.0)
    assert delta_gamma(oracle, 4, 0b0001) == pytest.approx(math.log(4))
    assert delta_gamma(oracle, 3, 0b0001) == math.inf


def test_greedy_infeasible_names_maximum(chain_family):
    oracle, _, _ = chain_family
    with pytest.raises(InfeasibleError) as exc:
        greedy_max(oracle, 0, 0b0110, 4)
    assert exc.value.achievable == 2
    assert "Γ=2" in str(exc.value)


def test_greedy_zero_steps(chain_family):
    oracle, _, _ = chain_family
    res = greedy_max(oracle, 0b1001, 0b0110, 3)
    assert res.selected.mask == 0b1001 and res.pre_termination is None and res.bound == 1.0


def test_greedy_tie_break_smallest_id(chain_family):
    oracle, _, _ = chain_family
    # s_p alone gives Γ=3, every other singleton less; then s_h is the only gain
    res = greedy_max(oracle, 0, 0b1111, 4)
    assert res.selected.ids == [0, 3] and res.pre_termination.ids == [0]


def test_k_out_of_range(chain_family):
    oracle, task, fam = chain_family
    with pytest.raises(InputError):
        solve(oracle, task, fam, 5)
    with pytest.raises(InputError):
        solve(oracle, task, fam, 0)


def _cases(seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        system, pool, task, raw = random_instance(rng)
        oracle = GammaOracle(system, pool)
        yield oracle, task, awareness_family(oracle, task), ExactGamma(*raw)


def test_matches_brute_force():
    for oracle, task, fam, exact in _cases(21, 120):
        t = task.s_task.mask
        for k in range(1, oracle.gamma_full + 1):
            sol = solve(oracle, task, fam, k)
            opt = brute_optimum(exact, t, k)
            s = sol.selected.mask
            assert exact(s) >= k and exact(s) == exact(s | t)
            assert sol.gamma_value == exact(s)
            if sol.regime == HIGH_TRUST:
                assert sol.is_optimal and sol.cardinality == opt
            else:
                assert not sol.is_optimal
                assert sol.cardinality <= sol.bound_delta * opt + 1e-9
                assert sol.bound_delta <= sol.weak_bound + 1e-12


def test_greedy_bound_against_unconstrained_optimum():
    for oracle, _, _, exact in _cases(22, 80):
        full = (1 << oracle.size) - 1
        for k in range(1, oracle.gamma_full + 1):
            res = greedy_max(oracle, 0, full, k)
            best = min(bin(s).count("1") for s in range(full + 1) if exact(s) >= k)
            assert res.selected.cardinality <= res.bound * best + 1e-9


def test_greedy_evaluation_count():
    for oracle, _, _, _ in _cases(23, 60):
        n = oracle.size
        for k in range(1, oracle.gamma_full + 1):
            res = greedy_max(oracle, 0, (1 << n) - 1, k)
            assert res.evaluations <= n * n + n


def test_parallel_and_early_exit_agree():
    for oracle, task, fam, _ in _cases(24, 40):
        for k in range(1, oracle.gamma_full + 1):
            if regime_for(oracle, task, k) != MID_TRUST:
                continue
            serial = solve_mid_trust(oracle, task, fam, k)
            threaded = solve_mid_trust(oracle, task, fam, k, workers=4)
            early = solve_mid_trust(oracle, task, fam, k, early_exit=True)
            assert threaded.selected == serial.selected
            assert threaded.bound_delta == serial.bound_delta
            assert early.cardinality == serial.cardinality
            assert early.bound_delta >= serial.bound_delta - 1e-12


def test_alt_heuristic_is_feasible():
    for oracle, task, fam, exact in _cases(25, 40):
        t = task.s_task.mask
        for k in range(1, oracle.gamma_full + 1):
            if regime_for(oracle, task, k) != MID_TRUST:
                continue
            sol = alt_heuristic(oracle, task, fam, k)
            assert exact(sol.selected.mask) >= k
            assert exact(sol.selected.mask) == exact(sol.selected.mask | t)
            assert sol.bound_delta is None and not sol.is_optimal
            assert solve(oracle, task, fam, k, alt=True).selected == sol.selected


def test_no_trust_reaches_full_index(chain_family):
    oracle, task, fam = chain_family
    sol = solve(oracle, task, fam, oracle.gamma_full)
    assert sol.regime == NO_TRUST and sol.gamma_value == 4
    assert sol.bound_delta == pytest.approx(1 + math.log(4 / 1))
    assert SensorSet(0b0001, 4) == sol.pre_termination
