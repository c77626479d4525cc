import pytest

import ridgeless as r


@pytest.fixture
def dataset_a():
    """Convex-block workhorse: slopes 0,1,2; one free gap."""
    return r.make_dataset([(0, 0), (1, 0), (2, 1), (3, 3)])


@pytest.fixture
def dataset_zigzag():
    """Alternating curvature: every gap forced, singleton family."""
    return r.make_dataset([(0, 0), (1, 1), (2, 0), (3, 1)])


@pytest.fixture
def dataset_collinear():
    """y = 2x + 1 on three points; zero minimal TV."""
    return r.make_dataset([(0, 1), (1, 3), (2, 5)])
