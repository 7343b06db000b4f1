import pathlib
import sys

import pytest
from hypothesis import HealthCheck, settings

from hmd.core import Hypergraph

sys.path.insert(0, str(pathlib.Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ABC = ["a", "b", "c"]


@pytest.fixture
def H0():
    return Hypergraph.from_edges(2, [([0, 1], 1.0)], labels=["a", "b"])


@pytest.fixture
def H1():
    return Hypergraph.from_edges(3, [([0, 1, 2], 1.0, 0.5, {2: 0.5})], labels=ABC)


@pytest.fixture
def H2():
    return Hypergraph.from_edges(3, [([0, 1], 1.0), ([1, 2], 1.0)], labels=ABC)


@pytest.fixture
def H3():
    return Hypergraph.from_edges(3, [([0, 1], 1.0), ([0, 2], 1.0)], labels=ABC)
