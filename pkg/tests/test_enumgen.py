
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iface.enumgen import (
    GeneratorConfig,
    PruneRegistry,
    SubsetGenerator,
    TableCoord,
    cardinality_first_order,
    decode,
    encode,
    subsets,
)
from iface.errors import InputError
from iface.model import popcount


def test_encode_examples():
    assert encode(1) == TableCoord(0, 0)
    assert encode(6) == TableCoord(2, 2)
    assert decode(TableCoord(3, 5)) == 13
    with pytest.raises(InputError, match="empty set"):
        encode(0)
    with pytest.raises(InputError):
        TableCoord(2, 4)


@given(st.integers(1, 2**40))
def test_encode_decode_roundtrip(n):
    assert decode(encode(n)) == n


@pytest.mark.parametrize("order", ["column", "cardinality"])
@pytest.mark.parametrize("size", range(1, 11))
def test_exhaustive_bijection(size, order):
    out = list(subsets(size, order=order))
    assert sorted(out) == list(range(1, 1 << size))


def test_column_order_reads_table_columns():
    assert list(subsets(3, order="column")) == [1, 2, 3, 4, 5, 6, 7]


def test_cardinality_order_is_nondecreasing():
    out = list(subsets(6))
    sizes = [popcount(m) for m in out]
    assert sizes == sorted(sizes)


@pytest.mark.parametrize("order", ["column", "cardinality"])
def test_cardinality_cap(order):
    out = list(subsets(6, max_cardinality=2, order=order))
    assert sorted(out) == sorted(m for m in range(1, 64) if popcount(m) <= 2)
    assert list(subsets(4, max_cardinality=0, order=order)) == []


def test_worked_pruning_example():
    gen = SubsetGenerator(GeneratorConfig(5, order="column"))
    seen = []
    for n in gen:
        seen.append(n)
        if n == 0b11:
            gen.prune(0b11)
    skipped = set(range(1, 32)) - set(seen)
    assert skipped == {7, 11, 15, 19, 23, 27, 31}
    assert gen.skipped_rows == {3, 7, 11, 15}


def _brute_pruned(size, pruned, cap=None):
    return sorted(
        m for m in range(1, 1 << size)
        if not any(p & ~m == 0 for p in pruned) and (cap is None or popcount(m) <= cap)
    )


@settings(max_examples=100, deadline=None)
@given(
    st.integers(1, 8),
    st.lists(st.integers(1, 255), max_size=4),
    st.sampled_from(["column", "cardinality"]),
    st.one_of(st.none(), st.integers(0, 8)),
)
def test_pruned_emission_matches_brute_force(size, masks, order, cap):
    masks = [m & ((1 << size) - 1) for m in masks]
    masks = [m for m in masks if m]
    if cap is not None:
        cap = min(cap, size)
    out = list(subsets(size, cap, order, PruneRegistry(masks)))
    assert sorted(out) == _brute_pruned(size, masks, cap)
    assert len(out) == len(set(out))


def test_dynamic_pruning_never_emits_registered_supersets():
    gen = subsets(7)
    registered = []
    for n in gen:
        assert not any(p & ~n == 0 for p in registered)
        if popcount(n) == 2 and n % 3 == 0:
            gen.prune(n)
            registered.append(n)


def test_registry_stays_minimal():
    reg = PruneRegistry([0b111, 0b110])
    assert sorted(reg) == [0b110]
    assert not reg.add(0b1110)
    assert reg.add(0b010)
    assert list(reg) == [0b010]
    assert reg.covers(0b1010) and not reg.covers(0b101)
    with pytest.raises(InputError):
        reg.add(0)
    snap = reg.snapshot()
    snap.add(0b1)
    assert len(reg) == 1


def test_config_validation_and_partition():
    with pytest.raises(InputError):
        GeneratorConfig(0)
    with pytest.raises(InputError):
        GeneratorConfig(3, max_cardinality=4)
    with pytest.raises(InputError):
        GeneratorConfig(3, order="gray")
    with pytest.raises(InputError):
        GeneratorConfig(3, columns=(3,))
    cfg = GeneratorConfig(6, order="column")
    parts = cfg.partition(4)
    merged = sorted(m for p in parts for m in SubsetGenerator(p))
    assert merged == list(range(1, 64))


def test_cardinality_first_helper_within_columns():
    gen = cardinality_first_order(GeneratorConfig(4, order="column", columns=(2, 3)))
    out = list(gen)
    assert sorted(out) == sorted(m for m in range(4, 16))
    assert [popcount(m) for m in out] == sorted(popcount(m) for m in out)


def test_first_feasible_in_cardinality_order_is_minimum():
    target = {0b10110, 0b01001, 0b11000}
    first = next(m for m in subsets(5) if m in target)
    assert popcount(first) == min(popcount(t) for t in target)
    assert first == min(t for t in target if popcount(t) == 2)
