"""IEEE 118-bus testbed: case parsing, Kron reduction and swing dynamics.

Case files are plain text with three sections::

    [bus]       id type            (type is "gen" or "load")
    [branch]    from to x status   (x is the series reactance in p.u.)
    [gen]       bus status

Blank lines and ``#`` comments are ignored. Status 0 marks an element out
of service; it is kept in the parsed case and skipped by the reduction.

Generators are numbered 1..G in file order. Those numbers, not case bus ids,
label sensors, inputs and the monitored machine.
"""

import math
import os
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError, InputError, NumericalError
from .model import LtiSystem, SensorPool, Task

SECTIONS = ("bus", "branch", "gen")
CONFIGURATIONS = {
    1: "normal operation",
    2: "load bus 38 out of service",
    3: "line 65-66 out of service",
    4: "alternate generators without input",
}
TASK_GENERATOR = 28
COUPLING_TOL = 1e-9


@dataclass(frozen=True)
class Bus:
    id: int
    kind: str
    in_service: bool = True


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    x: float
    status: int = 1

    @property
    def susceptance(self):
        return 1.0 / self.x


@dataclass(frozen=True)
class Generator:
    bus: int
    status: int = 1


@dataclass(frozen=True)
class PowerCase:
    buses: tuple
    branches: tuple
    generators: tuple

    def __post_init__(self):
        ids = {b.id for b in self.buses}
        dangling = sorted(
            {e for br in self.branches for e in (br.from_bus, br.to_bus)} - ids
        )
        if dangling:
            raise DataError(f"branches reference unknown buses {dangling}")
        unknown = sorted({g.bus for g in self.generators} - ids)
        if unknown:
            raise DataError(f"generators sit on unknown buses {unknown}")
        if not self.generators:
            raise DataError("case has no generators")

    def without_bus(self, bus_id):
        if bus_id not in {b.id for b in self.buses}:
            raise InputError(f"no bus {bus_id} in the case")
        buses = tuple(replace(b, in_service=False) if b.id == bus_id else b for b in self.buses)
        return replace(self, buses=buses)

    def without_branch(self, a, b):
        hit = False
        branches = []
        for br in self.branches:
            if {br.from_bus, br.to_bus} == {a, b}:
                br = replace(br, status=0)
                hit = True
            branches.append(br)
        if not hit:
            raise InputError(f"no branch between buses {a} and {b}")
        return replace(self, branches=tuple(branches))

    def active_generator_buses(self):
        live = {b.id for b in self.buses if b.in_service}
        return [g.bus for g in self.generators if g.status and g.bus in live]


@dataclass(frozen=True)
class SwingParams:
    inertia_h: float = 2.656
    damping_d: float = 2.0
    nominal_frequency: float = 60.0

    def __post_init__(self):
        for name in ("inertia_h", "damping_d", "nominal_frequency"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be positive, got {v}")

    @property
    def omega_s(self):
        return 2.0 * math.pi * self.nominal_frequency

    @property
    def inertia_m(self):
        return 2.0 * self.inertia_h / self.omega_s


@dataclass(frozen=True)
class ReducedNetwork:
    """Generator-only network stored as a Laplacian.

    ``generator_ids`` are the 1-based generator numbers, ``buses`` the case
    bus each one sits on.
    """

    generator_ids: tuple
    buses: tuple
    coupling: np.ndarray

    @property
    def size(self):
        return len(self.generator_ids)

    def index(self, generator):
        try:
            return self.generator_ids.index(generator)
        except ValueError:
            raise InputError(f"generator {generator} is not in the reduced network") from None

    def susceptance(self, g1, g2):
        """Effective susceptance between two generators."""
        return -float(self.coupling[self.index(g1), self.index(g2)])

    def neighbors(self, generator, tol=COUPLING_TOL):
        i = self.index(generator)
        scale = tol * np.abs(self.coupling).max()
        return [
            g for j, g in enumerate(self.generator_ids)
            if j != i and abs(self.coupling[i, j]) > scale
        ]


def _fields(parts, n, lineno, section):
    if len(parts) != n:
        raise DataError(f"line {lineno}: [{section}] expects {n} fields, got {len(parts)}")
    return parts


def parse_case(source):
    """Parse a case from a path or from the text itself."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise DataError(f"cannot read case file {source}: {exc}") from exc
    else:
        text = source
    buses, branches, gens = [], [], []
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            name = line.strip("[]").strip().lower()
            if name not in SECTIONS:
                raise DataError(f"line {lineno}: unknown section [{name}]")
            section = name
            continue
        if section is None:
            raise DataError(f"line {lineno}: data before any section header")
        parts = line.split()
        try:
            if section == "bus":
                i, kind = _fields(parts, 2, lineno, section)
                if kind not in ("gen", "load"):
                    raise DataError(f"line {lineno}: bus type must be gen or load, got {kind!r}")
                buses.append(Bus(int(i), kind))
            elif section == "branch":
                f, t, x, status = _fields(parts, 4, lineno, section)
                x = float(x)
                if x == 0 or not math.isfinite(x):
                    raise DataError(f"line {lineno}: branch reactance must be finite and nonzero")
                branches.append(Branch(int(f), int(t), x, int(status)))
            else:
                b, status = _fields(parts, 2, lineno, section)
                gens.append(Generator(int(b), int(status)))
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from exc
    return PowerCase(tuple(buses), tuple(branches), tuple(gens))


def _components(nodes, edges):
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        parent[find(a)] = find(b)
    groups = {}
    for v in nodes:
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def kron_reduce(case):
    """Schur complement of the susceptance Laplacian onto the generator buses."""
    live = [b.id for b in case.buses if b.in_service]
    idx = {b: i for i, b in enumerate(live)}
    edges = [
        br for br in case.branches
        if br.status and br.from_bus in idx and br.to_bus in idx and br.from_bus != br.to_bus
    ]
    gen_buses = case.active_generator_buses()
    gen_set = set(gen_buses)
    for comp in _components(live, [(br.from_bus, br.to_bus) for br in edges]):
        if not gen_set.intersection(comp):
            raise NumericalError(
                f"buses {sorted(comp)} form an island without a generator; "
                "the load block is singular"
            )
    lap = np.zeros((len(live), len(live)))
    for br in edges:
        i, j, b = idx[br.from_bus], idx[br.to_bus], br.susceptance
        lap[i, i] += b
        lap[j, j] += b
        lap[i, j] -= b
        lap[j, i] -= b
    g = [idx[b] for b in gen_buses]
    loads = [i for i in range(len(live)) if i not in set(g)]
    reduced = lap[np.ix_(g, g)]
    if loads:
        try:
            reduced = reduced - lap[np.ix_(g, loads)] @ np.linalg.solve(
                lap[np.ix_(loads, loads)], lap[np.ix_(loads, g)]
            )
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"load block is singular: {exc}") from exc
    reduced = 0.5 * (reduced + reduced.T)
    reduced.setflags(write=False)
    numbers = {bus: k + 1 for k, bus in enumerate(g.bus for g in case.generators)}
    return ReducedNetwork(tuple(numbers[b] for b in gen_buses), tuple(gen_buses), reduced)


def build_swing_lti(net, params, active_inputs=None):
    """Linearized swing dynamics with states ``[phases; phase rates]``.

    ``active_inputs`` lists the generator numbers that receive an input
    column; ``None`` actuates all of them.
    """
    k = net.size
    m = params.inertia_m
    a = np.zeros((2 * k, 2 * k))
    a[:k, k:] = np.eye(k)
    a[k:, :k] = -net.coupling / m
    a[k:, k:] = -(params.damping_d / m) * np.eye(k)
    active = net.generator_ids if active_inputs is None else list(active_inputs)
    b = np.zeros((2 * k, len(active)))
    for col, gen in enumerate(active):
        b[k + net.index(gen), col] = 1.0 / m
    return LtiSystem(a, b)


def phase_sensor_pool(net):
    return SensorPool(np.eye(net.size, 2 * net.size))


def build_task_for_bus(net, pool, bus):
    """Phase sensors of ``bus`` (a generator number) and of every generator
    directly coupled to it in the reduced network."""
    members = sorted([bus] + net.neighbors(bus))
    ids = [net.index(g) for g in members]
    return Task.from_ids(pool, ids, label=f"power flow into generator {bus}")


def alternate_generators(net, parity="odd"):
    if parity not in ("odd", "even"):
        raise InputError(f"parity must be 'odd' or 'even', got {parity!r}")
    r = 1 if parity == "odd" else 0
    return [g for g in net.generator_ids if g % 2 == r]


def configuration(case, params=None, config_id=1, parity="odd", task_bus=TASK_GENERATOR):
    """System, phase-sensor pool and monitoring task for one of the four
    grid configurations."""
    params = params or SwingParams()
    if config_id not in CONFIGURATIONS:
        raise InputError(f"configuration must be one of {sorted(CONFIGURATIONS)}, got {config_id}")
    if config_id == 2:
        case = case.without_bus(38)
    elif config_id == 3:
        case = case.without_branch(65, 66)
    net = kron_reduce(case)
    active = alternate_generators(net, parity) if config_id == 4 else None
    sys = build_swing_lti(net, params, active)
    pool = phase_sensor_pool(net)
    return sys, pool, build_task_for_bus(net, pool, task_bus)


def data_path(name):
    override = os.environ.get("IFACE_DATA_DIR")
    if override:
        path = Path(override) / name
    else:
        path = Path(str(resources.files("iface") / "data" / name))
    if not path.is_file():
        raise DataError(f"data file {name} not found at {path}")
    return path


def load_case118():
    return parse_case(data_path("case118.txt"))
