import pytest

from iface.model import build_chain_example
from iface.uii import GammaOracle

# Reference values for the chain example, one per nonempty subset of the
# sensors p, v, a, h (ids 0..3), in the order below.
CHAIN_COLUMNS = (
    "p", "v", "a", "h", "pv", "pa", "ph", "va", "vh", "ah", "pva", "pvh", "pah", "vah", "pvah",
)
CHAIN_GAMMA = (3, 2, 1, 1, 3, 3, 4, 2, 3, 2, 3, 4, 4, 3, 4)
CHAIN_GAMMA_UNION_TASK = (3, 2, 2, 3, 3, 3, 4, 2, 3, 3, 3, 4, 4, 3, 4)
CHAIN_UNAWARE = ("a", "h", "ah")
CHAIN_FAMILY = ("p", "v", "pv", "pa", "va", "pva")


def chain_mask(label):
    return sum(1 << "pvah".index(c) for c in label)


@pytest.fixture
def chain():
    system, pool, task = build_chain_example()
    return system, pool, task, GammaOracle(system, pool)


def pytest_addoption(parser):
    parser.addoption("--include-long", action="store_true", default=False,
                     help="run the multi-minute 118-bus configuration-4 cells")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--include-long"):
        return
    skip = pytest.mark.skip(reason="long-running; pass --include-long")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
