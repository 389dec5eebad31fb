"""Relative degrees, Krylov observability blocks and the user information index.

The index of a sensor set is the rank of the stacked blocks
``[s; sA; ...; sA^(γ(s)-1)]`` of its sensors. :class:`GammaOracle` memoizes it
per bitmask.
"""

import threading
from dataclasses import dataclass

import numpy as np

from .model import SensorSet, mask_ids
from .subspace import DEFAULT_TOL, numeric_rank, row_space_basis


def _is_zero(v, scale, tol):
    return np.linalg.norm(v) <= tol * scale


def relative_degree(sys, s, tol=DEFAULT_TOL):
    """Smallest k >= 1 with ``s A^(k-1) B != 0``; ``n`` if there is none."""
    row = np.asarray(getattr(s, "row", s), dtype=float)
    b_norm = np.linalg.norm(sys.b, 2)
    for k in range(1, sys.n + 1):
        scale = np.linalg.norm(row) * b_norm
        if scale > 0 and not _is_zero(row @ sys.b, scale, tol):
            return k
        row = row @ sys.a
    return sys.n


@dataclass(frozen=True)
class ObservabilityBlock:
    sensor_id: int
    gamma_degree: int
    rows: np.ndarray

    @property
    def normalized_rows(self):
        # Scaling rows leaves the row space unchanged and keeps high Krylov
        # powers from swamping the rank threshold.
        norms = np.linalg.norm(self.rows, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return self.rows / norms


def sensor_block(sys, s, tol=DEFAULT_TOL):
    gamma = relative_degree(sys, s, tol)
    row = np.asarray(s.row, dtype=float)
    rows = np.empty((gamma, sys.n))
    for k in range(gamma):
        rows[k] = row
        row = row @ sys.a
    rows.setflags(write=False)
    return ObservabilityBlock(s.id, gamma, rows)


@dataclass(frozen=True)
class ObservableDecomposition:
    t_s: np.ndarray
    t_s_complement: np.ndarray

    @property
    def p_s(self):
        return np.vstack([self.t_s, self.t_s_complement])


class GammaOracle:
    """Memoized user information index over subsets of one sensor pool.

    ``cache_cap`` bounds the number of cached masks (oldest entries are
    evicted first). ``evaluations`` counts rank computations actually
    performed, ``calls`` counts every query.
    """

    def __init__(self, system, pool, tol=DEFAULT_TOL, cache_cap=None):
        if pool.n != system.n:
            raise ValueError(f"sensor length {pool.n} does not match state dimension {system.n}")
        self.system = system
        self.pool = pool
        self.tol = tol
        self.cache_cap = cache_cap
        self.blocks = [sensor_block(system, s, tol) for s in pool]
        self._rows = [b.normalized_rows for b in self.blocks]
        self._cache = {0: 0}
        self._lock = threading.Lock()
        self.evaluations = 0
        self.calls = 0

    @property
    def size(self):
        return self.pool.size

    def _mask(self, s):
        if isinstance(s, SensorSet):
            if s.size != self.size:
                raise ValueError("sensor set belongs to a different pool")
            return s.mask
        mask = int(s)
        if mask < 0 or mask >> self.size:
            raise ValueError(f"mask {mask:#x} outside a pool of {self.size}")
        return mask

    def stack(self, s):
        """Stacked (row-normalized) Krylov blocks of the sensors in ``s``."""
        ids = mask_ids(self._mask(s))
        if not ids:
            return np.zeros((0, self.system.n))
        return np.vstack([self._rows[i] for i in ids])

    def gamma(self, s):
        mask = self._mask(s)
        self.calls += 1
        value = self._cache.get(mask)
        if value is not None:
            return value
        value = numeric_rank(self.stack(mask), self.tol)
        with self._lock:
            self.evaluations += 1
            if self.cache_cap is not None:
                while len(self._cache) >= max(self.cache_cap, 1):
                    self._cache.pop(next(iter(self._cache)))
            self._cache[mask] = value
        return value

    __call__ = gamma

    def gamma_uncached(self, s):
        return numeric_rank(self.stack(self._mask(s)), self.tol)

    def gamma_union_task(self, s, task):
        return self.gamma(self._mask(s) | task.s_task.mask)

    @property
    def gamma_full(self):
        return self.gamma((1 << self.size) - 1)

    def clear_cache(self):
        with self._lock:
            self._cache = {0: 0}

    def observable_decomposition(self, s):
        """Orthonormal bases of the reconstructable subspace and its complement."""
        t_s, t_perp = row_space_basis(self.stack(s), self.tol)
        return ObservableDecomposition(t_s, t_perp)
