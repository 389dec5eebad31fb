"""Situation-awareness families.

A sensor set ``S`` gives situation awareness for a task when adding the task
sensors does not grow its information index: ``Γ(S) = Γ(S ∪ S_task)``.
The family is searched inside ``2^{S_reduced}``, where ``S_reduced`` holds
the sensors whose reconstructable subspace meets the task's, and every aware
set should then be a member of that family plus arbitrary other sensors.

The reduction is exact only when the sensors left outside the search domain
span a subspace independent of the domain plus the task. That condition is
checked (three Γ evaluations); when it fails the domain is widened, first by
closure and then to the whole pool, as long as the pool is small enough to
sweep. Past that limit the family is kept but marked uncertified, and
membership tests fall back to the direct test.

Awareness is upward closed: a superset of an aware set is aware, and a subset
of an unaware set is unaware. The pruned sweep exploits this by enumerating
complements ``Q = S_reduced \\ P`` in cardinality order and registering ``Q``
whenever ``P`` fails; every superset of ``Q`` is a subset of ``P`` and is
skipped unevaluated.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property

from .enumgen import GeneratorConfig, SubsetGenerator
from .model import SensorSet, mask_ids, popcount


@dataclass(frozen=True)
class AwarenessFamily:
    s_reduced: SensorSet
    sitaware_reduced: tuple
    gamma_task: int
    task_mask: int
    cap: int | None = None
    domain: SensorSet | None = None
    certified: bool = True

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(self, "domain", self.s_reduced)

    @cached_property
    def masks(self):
        return frozenset(p.mask for p in self.sitaware_reduced)

    def __len__(self):
        return len(self.sitaware_reduced)

    def to_dict(self):
        return {
            "s_reduced": self.s_reduced.ids,
            "sitaware_reduced": [p.ids for p in self.sitaware_reduced],
            "gamma_task": self.gamma_task,
            "domain": self.domain.ids,
            "certified": self.certified,
        }


def compute_s_reduced(oracle, task):
    t = task.s_task.mask
    g_task = oracle.gamma(t)
    mask = 0
    for i in range(oracle.size):
        bit = 1 << i
        if oracle.gamma(bit) + g_task > oracle.gamma(bit | t):
            mask |= bit
    return SensorSet(mask, oracle.size)


def reduction_certified(oracle, task, domain):
    """True when ``S`` is aware exactly if ``S ∩ domain`` is aware, for all ``S``.

    Sufficient condition: the sensors outside ``domain`` contribute a
    subspace meeting span(domain ∪ task) only in zero.
    """
    d = domain.mask if isinstance(domain, SensorSet) else int(domain)
    t = task.s_task.mask
    full = (1 << oracle.size) - 1
    return oracle.gamma(full & ~d) + oracle.gamma(d | t) == oracle.gamma(full | t)


def search_domain(oracle, task, s_reduced, max_domain=20):
    """Smallest certified domain found from ``s_reduced``; see module notes.

    Returns ``(domain, certified)``. Widening stops at ``max_domain`` sensors,
    in which case ``s_reduced`` is returned uncertified.
    """
    t = task.s_task.mask
    full = (1 << oracle.size) - 1
    if reduction_certified(oracle, task, s_reduced):
        return s_reduced, True
    d = s_reduced.mask
    grown = True
    while grown:
        grown = False
        base = oracle.gamma(d | t)
        for i in mask_ids(full & ~d):
            if oracle.gamma(1 << i) + base > oracle.gamma(d | t | 1 << i):
                d |= 1 << i
                grown = True
        if grown and reduction_certified(oracle, task, d):
            break
    if not reduction_certified(oracle, task, d):
        d = full
    if popcount(d) > max_domain:
        return s_reduced, False
    return SensorSet(d, oracle.size), True


def _aware(oracle, p, t):
    return oracle.gamma(p) == oracle.gamma(p | t)


def _spread(local, ids):
    mask = 0
    for j in mask_ids(local):
        mask |= 1 << ids[j]
    return mask


def _sweep_plain(oracle, t, ids, cap):
    gen = SubsetGenerator(GeneratorConfig(len(ids), cap))
    return [p for p in (_spread(q, ids) for q in gen) if _aware(oracle, p, t)]


def _sweep_pruned(oracle, t, ids):
    full = (1 << len(ids)) - 1
    found = []
    # Q = ∅ (P = S_reduced) has no table cell; S_reduced contains S_task, so it is aware.
    if not _aware(oracle, _spread(full, ids), t):
        return found
    found.append(_spread(full, ids))
    gen = SubsetGenerator(GeneratorConfig(len(ids)))
    for q in gen:
        p = _spread(full & ~q, ids)
        if p and _aware(oracle, p, t):
            found.append(p)
        else:
            gen.prune(q)
    return found


def enumerate_sitaware_reduced(oracle, task, cap=None, prune=True, s_reduced=None):
    """All ``P ⊆ s_reduced`` (the search domain) with ``Γ(P ∪ S_task) = Γ(P)``, sorted by
    (cardinality, mask). ``cap`` keeps only members with ``|P| <= cap``."""
    if s_reduced is None:
        s_reduced = compute_s_reduced(oracle, task)
    ids = s_reduced.ids
    t = task.s_task.mask
    if prune:
        found = _sweep_pruned(oracle, t, ids)
    else:
        found = _sweep_plain(oracle, t, ids, cap)
    if cap is not None:
        found = [p for p in found if popcount(p) <= cap]
    found.sort(key=lambda p: (popcount(p), p))
    return [SensorSet(p, oracle.size) for p in found]


def awareness_family(oracle, task, cap=None, prune=True, max_domain=20):
    s_reduced = compute_s_reduced(oracle, task)
    domain, certified = search_domain(oracle, task, s_reduced, max_domain)
    members = enumerate_sitaware_reduced(oracle, task, cap, prune, domain)
    return AwarenessFamily(
        s_reduced, tuple(members), oracle.gamma(task.s_task.mask), task.s_task.mask,
        cap, domain, certified,
    )


def is_situation_aware(oracle, task, family, s):
    """Membership test through the search domain: ``S`` is aware iff
    ``S ∩ domain`` is a family member. Uncertified or capped families only
    certify positives; misses are settled by the direct test."""
    mask = s.mask if isinstance(s, SensorSet) else int(s)
    p = mask & family.domain.mask
    if family.cap is None and p in family.masks:
        return True
    if family.cap is None and family.certified:
        return False
    return _aware(oracle, mask, task.s_task.mask)


def is_situation_aware_direct(oracle, task, s):
    mask = s.mask if isinstance(s, SensorSet) else int(s)
    return _aware(oracle, mask, task.s_task.mask)


def expand_sitaware(family, pool_size, limit=None):
    """Materialize aware sets as ``P ∪ R`` with ``R ⊆ pool \\ P``.

    Members are produced family member by family member, deduplicated, and
    the expansion stops after ``limit`` sets.
    """
    full = (1 << pool_size) - 1
    seen = set()
    out = []
    for p in family.sitaware_reduced:
        rest = mask_ids(full & ~p.mask)
        for k in range(len(rest) + 1):
            for extra in itertools.combinations(rest, k):
                s = p.mask
                for i in extra:
                    s |= 1 << i
                if s in seen:
                    continue
                seen.add(s)
                out.append(SensorSet(s, pool_size))
                if limit is not None and len(out) >= limit:
                    return out
    return out
