"""Systems, sensor pools, sensor sets, tasks and trust levels.

Sensor subsets are plain Python integers used as bitmasks (bit ``i`` set means
sensor ``i`` is selected). :class:`SensorSet` wraps a mask together with the
pool size so that set algebra stays bounded by the pool.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, InputError, InstanceError

# Masks are Python ints, so the width is only a policy limit; the 118-bus
# pool needs 54 bits.
MAX_POOL_SIZE = 128


def popcount(mask):
    return bin(mask).count("1")


def mask_ids(mask):
    """Ids of the set bits of ``mask``, ascending."""
    ids = []
    i = 0
    while mask:
        if mask & 1:
            ids.append(i)
        mask >>= 1
        i += 1
    return ids


def ids_mask(ids):
    mask = 0
    for i in ids:
        mask |= 1 << int(i)
    return mask


@dataclass(frozen=True)
class LtiSystem:
    """Continuous-time plant ``x' = A x + B u``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float, ndmin=2)
        b = np.array(self.b, dtype=float, ndmin=2)
        if a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InputError(f"A must be square and nonempty, got shape {a.shape}")
        if b.shape[0] != a.shape[0]:
            raise InputError(f"B has {b.shape[0]} rows but A is {a.shape[0]}x{a.shape[0]}")
        if b.shape[1] < 1:
            raise InputError("B must have at least one input column")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InputError("A and B must have finite entries")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def m(self):
        return self.b.shape[1]


@dataclass(frozen=True)
class Sensor:
    id: int
    row: np.ndarray

    def __post_init__(self):
        row = np.array(self.row, dtype=float).reshape(-1)
        if not np.all(np.isfinite(row)):
            raise InputError(f"sensor {self.id} has non-finite entries")
        if not np.any(row):
            raise InputError(f"sensor {self.id} is the zero row")
        row.setflags(write=False)
        object.__setattr__(self, "row", row)


class SensorPool:
    """Ordered candidate sensors; ids are positions ``0..size-1``."""

    def __init__(self, rows):
        rows = [np.asarray(r, dtype=float).reshape(-1) for r in rows]
        if not rows:
            raise InputError("sensor pool is empty")
        if len(rows) > MAX_POOL_SIZE:
            raise InputError(f"pool size {len(rows)} exceeds the {MAX_POOL_SIZE}-sensor limit")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise InputError(f"sensor rows disagree on length: {sorted(widths)}")
        self.sensors = tuple(Sensor(i, r) for i, r in enumerate(rows))

    @property
    def size(self):
        return len(self.sensors)

    @property
    def n(self):
        return len(self.sensors[0].row)

    @property
    def full(self):
        return SensorSet((1 << self.size) - 1, self.size)

    def rows(self, s):
        """Output matrix C_S: the rows of the sensors in ``s``, in id order."""
        ids = s.ids if isinstance(s, SensorSet) else mask_ids(s)
        if not ids:
            return np.zeros((0, self.n))
        return np.vstack([self.sensors[i].row for i in ids])

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(self.sensors)

    def __getitem__(self, i):
        return self.sensors[i]


@dataclass(frozen=True, order=True)
class SensorSet:
    """A subset of a pool of ``size`` sensors, stored as a bitmask."""

    mask: int
    size: int = field(compare=False)

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.size:
            raise InputError(f"mask {self.mask:#x} has bits outside a pool of {self.size}")

    @classmethod
    def from_ids(cls, ids, size):
        ids = list(ids)
        bad = [i for i in ids if not 0 <= int(i) < size]
        if bad:
            raise InputError(f"sensor ids {bad} outside pool of size {size}")
        return cls(ids_mask(ids), size)

    @classmethod
    def empty(cls, size):
        return cls(0, size)

    @property
    def ids(self):
        return mask_ids(self.mask)

    @property
    def cardinality(self):
        return popcount(self.mask)

    @property
    def code(self):
        """Decimal code N_S of the subset's binary representation."""
        return self.mask

    def _other(self, other):
        if isinstance(other, SensorSet):
            if other.size != self.size:
                raise InputError("sensor sets come from pools of different sizes")
            return other.mask
        return int(other)

    def __or__(self, other):
        return SensorSet(self.mask | self._other(other), self.size)

    def __and__(self, other):
        return SensorSet(self.mask & self._other(other), self.size)

    def __sub__(self, other):
        return SensorSet(self.mask & ~self._other(other), self.size)

    def issubset(self, other):
        return self.mask & ~self._other(other) == 0

    def issuperset(self, other):
        return self._other(other) & ~self.mask == 0

    def complement(self):
        return SensorSet(((1 << self.size) - 1) & ~self.mask, self.size)

    def __contains__(self, i):
        return bool(self.mask >> int(i) & 1)

    def __len__(self):
        return self.cardinality

    def __iter__(self):
        return iter(self.ids)

    def __repr__(self):
        return f"SensorSet({self.ids})"


@dataclass(frozen=True)
class Task:
    """Sensors whose outputs the task depends on. ``label`` describes the
    task payoff; it is never evaluated."""

    s_task: SensorSet
    c_task: np.ndarray
    label: str = ""

    @classmethod
    def from_ids(cls, pool, ids, label=""):
        s = SensorSet.from_ids(ids, pool.size)
        if s.cardinality == 0:
            raise InputError("task must reference at least one sensor")
        return cls(s, pool.rows(s), label)


@dataclass(frozen=True)
class TrustLevel:
    k_trust: int

    def __post_init__(self):
        if int(self.k_trust) != self.k_trust:
            raise InputError(f"k_trust must be an integer, got {self.k_trust!r}")
        object.__setattr__(self, "k_trust", int(self.k_trust))


@dataclass(frozen=True)
class Instance:
    system: LtiSystem
    pool: SensorPool
    task: Task
    trust: TrustLevel | None
    gamma_full: int


def validate_instance(sys, pool, task, trust=None, tol=None):
    """Check dimensions, task membership and the trust range.

    Returns an :class:`Instance`; raises :class:`InstanceError` listing every
    violated condition.
    """
    from .uii import GammaOracle

    problems = []
    if pool.n != sys.n:
        problems.append(f"sensor rows have length {pool.n} but the state dimension is {sys.n}")
    if task.s_task.size != pool.size:
        problems.append(f"task refers to a pool of {task.s_task.size} sensors, pool has {pool.size}")
    elif task.s_task.cardinality == 0:
        problems.append("task sensor set is empty")
    else:
        c = np.asarray(task.c_task, dtype=float)
        if c.shape != (task.s_task.cardinality, pool.n) or not np.allclose(c, pool.rows(task.s_task)):
            problems.append("c_task rows do not match the rows of the task sensors")
    if problems:
        raise InstanceError(problems)

    oracle = GammaOracle(sys, pool) if tol is None else GammaOracle(sys, pool, tol=tol)
    gamma_full = oracle.gamma_full
    if trust is not None:
        k = trust.k_trust
        if k < 1:
            problems.append(f"k_trust must be at least 1, legal range is [1, {gamma_full}]")
        elif k > gamma_full:
            problems.append(f"k_trust exceeds Γ(𝒮)={gamma_full}; legal range is [1, {gamma_full}]")
    if problems:
        raise InstanceError(problems)
    return Instance(sys, pool, task, trust, gamma_full)


def build_chain_example():
    """Jerk-driven cart on a line plus a decoupled camera heading.

    States are (position, velocity, acceleration, heading); the sensors read
    one state each and the task watches velocity.
    """
    a = np.zeros((4, 4))
    a[0, 1] = 1.0
    a[1, 2] = 1.0
    b = np.zeros((4, 2))
    b[2, 0] = 1.0
    b[3, 1] = 1.0
    pool = SensorPool(np.eye(4))
    task = Task.from_ids(pool, [1], label="velocity stays above v_min")
    return LtiSystem(a, b), pool, task


CHAIN_SENSOR_NAMES = ("s_p", "s_v", "s_a", "s_h")


def instance_from_dict(doc):
    """Build ``(system, pool, task, trust)`` from the JSON instance layout.

    ``trust`` is ``None`` when the document has no ``k_trust`` field.
    """
    missing = [k for k in ("A", "B", "sensors", "task_sensor_ids") if k not in doc]
    if missing:
        raise InstanceError([f"missing field {k!r}" for k in missing])
    try:
        sys = LtiSystem(doc["A"], doc["B"])
        pool = SensorPool(doc["sensors"])
        task = Task.from_ids(pool, doc["task_sensor_ids"], doc.get("label", ""))
    except InputError as exc:
        raise InstanceError([str(exc)]) from exc
    trust = TrustLevel(doc["k_trust"]) if doc.get("k_trust") is not None else None
    return sys, pool, task, trust


def instance_to_dict(sys, pool, task, trust=None):
    doc = {
        "A": sys.a.tolist(),
        "B": sys.b.tolist(),
        "sensors": [s.row.tolist() for s in pool],
        "task_sensor_ids": task.s_task.ids,
    }
    if task.label:
        doc["label"] = task.label
    if trust is not None:
        doc["k_trust"] = trust.k_trust
    return doc


def load_instance(path):
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read instance file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DataError(f"{path}: top-level JSON value must be an object")
    return instance_from_dict(doc)
