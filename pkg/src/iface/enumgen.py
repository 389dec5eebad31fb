"""Prunable enumeration of nonempty subsets over a binary iteration table.

A nonempty subset with code ``N`` sits in column ``floor(log2 N)`` (its most
significant bit) and row ``N - 2**col`` (its remaining bits). Rows share their
low-order bits across columns, which lets the generator

* visit every nonempty subset exactly once,
* skip every superset of a registered (pruned) mask, whole rows at a time, and
* cap cardinality by limiting the popcount of row numbers.

Two traversal orders exist. ``"column"`` reads the table column by column,
top to bottom. ``"cardinality"`` (the default) emits all subsets of size 1,
then size 2, and so on, so a minimization sweep can stop at the first
feasible subset.
"""

from dataclasses import dataclass

from .errors import InputError
from .model import popcount

ORDERS = ("cardinality", "column")


@dataclass(frozen=True)
class TableCoord:
    col: int
    row: int

    def __post_init__(self):
        if self.col < 0 or not 0 <= self.row < 1 << self.col:
            raise InputError(f"row {self.row} is not below 2**{self.col}")


def encode(n_s):
    """Table coordinates of the subset with code ``n_s``."""
    if n_s < 1:
        raise InputError("empty set not in table")
    col = n_s.bit_length() - 1
    return TableCoord(col, n_s - (1 << col))


def decode(coord):
    if not 0 <= coord.row < 1 << coord.col:
        raise InputError(f"row {coord.row} is not below 2**{coord.col}")
    return (1 << coord.col) + coord.row


class PruneRegistry:
    """Masks whose supersets must not be emitted.

    Kept minimal: a mask already covered by a registered one is dropped, and
    registering a subset evicts the supersets it now covers.
    """

    def __init__(self, masks=()):
        self.masks = []
        for m in masks:
            self.add(m)

    def add(self, mask):
        if mask <= 0:
            raise InputError("cannot prune the empty set")
        if self.covers(mask):
            return False
        self.masks = [m for m in self.masks if mask & ~m != 0]
        self.masks.append(mask)
        return True

    def covers(self, mask):
        """True iff some registered mask is a subset of ``mask``."""
        for m in self.masks:
            if m & ~mask == 0:
                return True
        return False

    def snapshot(self):
        return PruneRegistry(self.masks)

    def __len__(self):
        return len(self.masks)

    def __iter__(self):
        return iter(self.masks)


@dataclass(frozen=True)
class GeneratorConfig:
    pool_size: int
    max_cardinality: int | None = None
    order: str = "cardinality"
    columns: tuple | None = None

    def __post_init__(self):
        if self.pool_size < 1:
            raise InputError("pool_size must be at least 1")
        if self.max_cardinality is not None and not 0 <= self.max_cardinality <= self.pool_size:
            raise InputError(f"max_cardinality must lie in [0, {self.pool_size}]")
        if self.order not in ORDERS:
            raise InputError(f"order must be one of {ORDERS}")
        if self.columns is not None:
            bad = [c for c in self.columns if not 0 <= c < self.pool_size]
            if bad:
                raise InputError(f"columns {bad} outside the table")
            object.__setattr__(self, "columns", tuple(sorted(set(self.columns))))

    @property
    def cap(self):
        return self.pool_size if self.max_cardinality is None else self.max_cardinality

    def column_range(self):
        return self.columns if self.columns is not None else tuple(range(self.pool_size))

    def partition(self, parts):
        """Split the columns into ``parts`` interleaved groups for parallel sweeps."""
        cols = self.column_range()
        return [
            GeneratorConfig(self.pool_size, self.max_cardinality, self.order, cols[i::parts])
            for i in range(min(parts, len(cols)))
        ]


class SubsetGenerator:
    """Single-consumer iterator over subset masks.

    The registry may grow while iterating (call :meth:`prune`); later
    emissions respect it immediately. ``skipped_rows`` collects the row
    numbers dropped wholesale because a registered mask lies inside the row
    bits alone.
    """

    def __init__(self, config, registry=None):
        self.config = config
        self.registry = registry if registry is not None else PruneRegistry()
        self.skipped_rows = set()
        self.skipped_cells = 0
        self.emitted = 0
        self._it = self._column_major() if config.order == "column" else self._by_cardinality()

    def prune(self, mask):
        return self.registry.add(mask)

    def __iter__(self):
        return self

    def __next__(self):
        mask = next(self._it)
        self.emitted += 1
        return mask

    def _column_major(self):
        cap = self.config.cap
        covers = self.registry.covers
        skipped = self.skipped_rows
        for col in self.config.column_range():
            bit = 1 << col
            for row in range(bit):
                if popcount(row) + 1 > cap:
                    continue
                if row in skipped:
                    continue
                if covers(row):
                    skipped.add(row)
                    continue
                if covers(row | bit):
                    self.skipped_cells += 1
                    continue
                yield row | bit

    def _by_cardinality(self):
        cols = self.config.column_range()
        for c in range(1, self.config.cap + 1):
            for col in cols:
                if col >= c - 1:
                    yield from self._rows(1 << col, c - 1, col)

    def _rows(self, fixed, k, limit):
        """Masks ``fixed | row`` with ``row`` having ``k`` bits below ``limit``,
        in increasing order; subtrees already covered by the registry are cut."""
        if self.registry.covers(fixed):
            self.skipped_cells += 1
            return
        if k == 0:
            yield fixed
            return
        for top in range(k - 1, limit):
            yield from self._rows(fixed | 1 << top, k - 1, top)


def subsets(pool_size, max_cardinality=None, order="cardinality", registry=None):
    return SubsetGenerator(GeneratorConfig(pool_size, max_cardinality, order), registry)


def cardinality_first_order(config, registry=None):
    if config.order != "cardinality":
        config = GeneratorConfig(config.pool_size, config.max_cardinality, "cardinality", config.columns)
    return SubsetGenerator(config, registry)
