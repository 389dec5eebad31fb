"""Hypothesis-driven invariants over randomly drawn small instances."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from iface.awareness import awareness_family, is_situation_aware, is_situation_aware_direct
from iface.model import popcount
from iface.solver import HIGH_TRUST, solve
from iface.subspace import intersection_dim
from iface.uii import GammaOracle
from oracles import random_instance

seeds = st.integers(0, 2**32 - 1)


def _instance(seed):
    system, pool, task, _ = random_instance(np.random.default_rng(seed))
    return system, pool, task, GammaOracle(system, pool)


@settings(max_examples=60, deadline=None)
@given(seeds, st.data())
def test_monotone_and_submodular(seed, data):
    _, pool, _, oracle = _instance(seed)
    full = (1 << pool.size) - 1
    p = data.draw(st.integers(0, full))
    q = data.draw(st.integers(0, full))
    assert oracle.gamma(p & q) <= oracle.gamma(p) <= oracle.gamma(p | q)
    assert oracle.gamma(p) + oracle.gamma(q) >= oracle.gamma(p | q) + oracle.gamma(p & q)


@settings(max_examples=60, deadline=None)
@given(seeds, st.data())
def test_modular_identity(seed, data):
    _, pool, _, oracle = _instance(seed)
    full = (1 << pool.size) - 1
    p = data.draw(st.integers(1, full))
    q = data.draw(st.integers(1, full))
    inter = intersection_dim(oracle.stack(p), oracle.stack(q))
    assert oracle.gamma(p | q) == oracle.gamma(p) + oracle.gamma(q) - inter
    assert 0 <= inter <= min(oracle.gamma(p), oracle.gamma(q))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_family_invariants(seed):
    _, pool, task, oracle = _instance(seed)
    fam = awareness_family(oracle, task)
    t = task.s_task.mask
    assert task.s_task.issubset(fam.s_reduced)
    assert t in fam.masks
    for p in fam.sitaware_reduced:
        assert p.issubset(fam.domain)
        assert oracle.gamma(p) == oracle.gamma(p.mask | t)
    for mask in range(1 << pool.size):
        assert is_situation_aware(oracle, task, fam, mask) == is_situation_aware_direct(oracle, task, mask)


@settings(max_examples=40, deadline=None)
@given(seeds, st.data())
def test_solution_invariants(seed, data):
    _, pool, task, oracle = _instance(seed)
    fam = awareness_family(oracle, task)
    k = data.draw(st.integers(1, oracle.gamma_full))
    sol = solve(oracle, task, fam, k)
    assert sol.gamma_value >= k
    assert is_situation_aware_direct(oracle, task, sol.selected)
    assert sol.is_optimal == (sol.regime == HIGH_TRUST)
    assert (sol.bound_delta is None) == sol.is_optimal
    if sol.regime == HIGH_TRUST:
        assert popcount(sol.selected.mask) <= task.s_task.cardinality
