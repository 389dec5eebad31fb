"""Trust-constrained minimum-cardinality sensor selection.

Given the awareness family of a task, :func:`solve` picks a method by trust
level ``k``:

===========================  ==================  ======================
range of ``k``               method              guarantee
===========================  ==================  ======================
``k <= Γ(S_task)``           :func:`solve_high_trust`   optimal
``Γ(S_task) < k < Γ(S)``     :func:`solve_mid_trust`    logarithmic bound
``k = Γ(S)``                 :func:`solve_no_trust`     greedy bound
===========================  ==================  ======================
"""

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import InfeasibleError, InputError
from .model import SensorSet, TrustLevel, mask_ids, popcount

HIGH_TRUST = "high_trust_exact"
MID_TRUST = "mid_trust_hybrid"
NO_TRUST = "no_trust_greedy"
REGIMES = (HIGH_TRUST, MID_TRUST, NO_TRUST)


@dataclass(frozen=True)
class BoundReport:
    per_p_bounds: tuple
    max_bound: float
    weak_bound: float

    def to_dict(self):
        return {
            "per_p_bounds": [
                {"P": p.ids, "delta_gamma": d} for p, d in self.per_p_bounds
            ],
            "max_bound": self.max_bound,
            "weak_bound": self.weak_bound,
        }


@dataclass
class Solution:
    selected: SensorSet
    gamma_value: int
    regime: str
    is_optimal: bool
    bound_delta: float | None = None
    weak_bound: float | None = None
    pre_termination: SensorSet | None = None
    wall_time: float = 0.0
    evaluations: int = 0
    family_size: int | None = None
    certified: bool = True
    bounds: BoundReport | None = field(default=None, repr=False)

    @property
    def cardinality(self):
        return self.selected.cardinality

    def to_dict(self, timing=True):
        doc = {
            "selected": self.selected.ids,
            "cardinality": self.cardinality,
            "gamma_value": self.gamma_value,
            "regime": self.regime,
            "is_optimal": self.is_optimal,
            "bound_delta": self.bound_delta,
            "weak_bound": self.weak_bound,
            "pre_termination": None if self.pre_termination is None else self.pre_termination.ids,
            "family_size": self.family_size,
            "certified": self.certified,
            "evaluations": self.evaluations,
        }
        if timing:
            doc["wall_time_ms"] = round(self.wall_time * 1000.0, 3)
        return doc


@dataclass(frozen=True)
class GreedyResult:
    selected: SensorSet
    pre_termination: SensorSet | None
    bound: float
    additions: int
    evaluations: int
    aborted: bool = False


def weak_bound(gamma_full):
    return 1.0 + math.log(gamma_full)


def delta_gamma(oracle, k, s):
    """``ln(Γ(pool) / (k - Γ(s)))`` while ``Γ(s) < k``, else infinity."""
    g = oracle.gamma(s)
    if g >= k:
        return math.inf
    return math.log(oracle.gamma_full / (k - g))


def _mask(s):
    return s.mask if isinstance(s, SensorSet) else int(s)


def greedy_max(oracle, base, candidates, k, max_cardinality=None):
    """Grow ``base`` with the best-gain candidate until ``Γ >= k``.

    Ties go to the smallest sensor id. The returned bound is
    ``1 + ln((Γ(pool) - Γ(base)) / last_gain)``; it is 1 when ``base``
    already meets ``k``. With ``max_cardinality`` the run stops early
    (``aborted=True``) once the set would have to grow past that size.
    """
    size = oracle.size
    base_m = _mask(base)
    cand_m = _mask(candidates) & ~base_m
    seen = {}

    def gamma(m):
        if m not in seen:
            seen[m] = oracle.gamma(m)
        return seen[m]

    reach = gamma(base_m | cand_m)
    if reach < k:
        raise InfeasibleError(
            f"no completion reaches k={k}; the achievable maximum is Γ={reach}", reach
        )
    current = base_m
    g = g0 = gamma(current)
    pre = None
    last_gain = 0
    remaining = mask_ids(cand_m)
    while g < k:
        if max_cardinality is not None and popcount(current) >= max_cardinality:
            return GreedyResult(SensorSet(current, size), None, math.inf,
                                popcount(current & ~base_m), len(seen), aborted=True)
        best, best_g = None, g
        for i in remaining:
            v = gamma(current | 1 << i)
            if v > best_g:
                best, best_g = i, v
        if best is None:
            raise InfeasibleError(f"greedy stalled at Γ={g} below k={k}", g)
        pre = current
        current |= 1 << best
        remaining.remove(best)
        last_gain = best_g - g
        g = best_g
    if pre is None:
        bound = 1.0
    else:
        bound = 1.0 + math.log((oracle.gamma_full - g0) / last_gain)
    return GreedyResult(
        SensorSet(current, size),
        None if pre is None else SensorSet(pre, size),
        bound,
        popcount(current & ~base_m),
        len(seen),
    )


def _order_key(s):
    return (popcount(s.mask), s.mask)


def _check_k(oracle, k):
    g = oracle.gamma_full
    if not 1 <= k <= g:
        raise InputError(f"k_trust={k} outside the legal range [1, {g}]")


def solve_high_trust(oracle, task, family, k=None):
    """Smallest family member with at most |S_task| sensors.

    Exact whenever ``k <= Γ(S_task)`` and the family's reduction is
    certified; otherwise ``is_optimal`` is False.
    """
    start = time.perf_counter()
    calls = oracle.calls
    cap = task.s_task.cardinality
    feasible = [p for p in family.sitaware_reduced if p.cardinality <= cap]
    if k is not None:
        feasible = [p for p in feasible if oracle.gamma(p) >= k]
    best = min(feasible, key=_order_key)
    return Solution(
        selected=best,
        gamma_value=oracle.gamma(best),
        regime=HIGH_TRUST,
        is_optimal=family.certified,
        wall_time=time.perf_counter() - start,
        evaluations=oracle.calls - calls,
        family_size=len(family),
        certified=family.certified,
    )


def solve_mid_trust(oracle, task, family, k, workers=1, early_exit=False):
    """One greedy completion per family member; keep the smallest result.

    The bound is ``1 + max Δ_Γ(k, P ∪ Q_P^-)`` over members whose greedy run
    added at least one sensor (a member that already meets ``k`` needs no
    completion and contributes nothing). With ``early_exit`` a run stops as
    soon as it cannot beat the incumbent; such members contribute the
    ``ln Γ(pool)`` cap instead of their own term.
    """
    start = time.perf_counter()
    calls = oracle.calls
    full = (1 << oracle.size) - 1
    gamma_full = oracle.gamma_full
    members = list(family.sitaware_reduced)
    lock = threading.Lock()
    incumbent = [None]

    def run(p):
        limit = None
        if early_exit and incumbent[0] is not None:
            limit = incumbent[0]
        res = greedy_max(oracle, p, full & ~p.mask, k, max_cardinality=limit)
        if not res.aborted:
            with lock:
                if incumbent[0] is None or res.selected.cardinality < incumbent[0]:
                    incumbent[0] = res.selected.cardinality
        return res

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, members))
    else:
        results = [run(p) for p in members]

    per_p = []
    best = None
    for p, res in zip(members, results):
        if res.aborted:
            per_p.append((p, math.log(gamma_full)))
            continue
        d = None if res.pre_termination is None else delta_gamma(oracle, k, res.pre_termination)
        per_p.append((p, d))
        if best is None or _order_key(res.selected) < _order_key(best.selected):
            best = res
    terms = [d for _, d in per_p if d is not None]
    bound = 1.0 + (max(terms) if terms else 0.0)
    report = BoundReport(tuple(per_p), bound, weak_bound(gamma_full))
    return Solution(
        selected=best.selected,
        gamma_value=oracle.gamma(best.selected),
        regime=MID_TRUST,
        is_optimal=False,
        bound_delta=bound,
        weak_bound=report.weak_bound,
        pre_termination=best.pre_termination,
        wall_time=time.perf_counter() - start,
        evaluations=oracle.calls - calls,
        family_size=len(family),
        certified=family.certified,
        bounds=report,
    )


def solve_no_trust(oracle, k=None):
    """Greedy cover of the whole reconstructable space; awareness follows
    automatically because the result reaches Γ(pool)."""
    start = time.perf_counter()
    calls = oracle.calls
    k = oracle.gamma_full if k is None else k
    res = greedy_max(oracle, 0, (1 << oracle.size) - 1, k)
    return Solution(
        selected=res.selected,
        gamma_value=oracle.gamma(res.selected),
        regime=NO_TRUST,
        is_optimal=False,
        bound_delta=res.bound,
        weak_bound=weak_bound(oracle.gamma_full),
        pre_termination=res.pre_termination,
        wall_time=time.perf_counter() - start,
        evaluations=oracle.calls - calls,
    )


def alt_heuristic(oracle, task, family, k):
    """Smallest capped family member, then a single greedy completion.

    Faster than :func:`solve_mid_trust` but carries no bound.
    """
    start = time.perf_counter()
    calls = oracle.calls
    core = solve_high_trust(oracle, task, family).selected
    res = greedy_max(oracle, core, ((1 << oracle.size) - 1) & ~core.mask, k)
    return Solution(
        selected=res.selected,
        gamma_value=oracle.gamma(res.selected),
        regime=MID_TRUST,
        is_optimal=False,
        weak_bound=weak_bound(oracle.gamma_full),
        pre_termination=res.pre_termination,
        wall_time=time.perf_counter() - start,
        evaluations=oracle.calls - calls,
        family_size=len(family),
        certified=family.certified,
    )


def regime_for(oracle, task, k):
    if k <= oracle.gamma(task.s_task):
        return HIGH_TRUST
    if k == oracle.gamma_full:
        return NO_TRUST
    return MID_TRUST


def solve(oracle, task, family, trust, workers=1, alt=False, early_exit=False):
    k = trust.k_trust if isinstance(trust, TrustLevel) else int(trust)
    _check_k(oracle, k)
    start = time.perf_counter()
    calls = oracle.calls
    regime = regime_for(oracle, task, k)
    if regime == HIGH_TRUST:
        sol = solve_high_trust(oracle, task, family)
    elif regime == NO_TRUST:
        sol = solve_no_trust(oracle, k)
    elif alt:
        sol = alt_heuristic(oracle, task, family, k)
    else:
        sol = solve_mid_trust(oracle, task, family, k, workers, early_exit)
    sol.wall_time = time.perf_counter() - start
    sol.evaluations = oracle.calls - calls
    return sol
