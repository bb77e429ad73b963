from __future__ import annotations

import pytest

from hmls.core import Graph

# G5: a -> u -> x -> w -> b
A, B, U, W, X = range(5)


@pytest.fixture
def g5() -> Graph:
    return Graph.from_edges(5, [(A, U, (1, 1)), (U, X, (1, 2)), (X, W, (2, 1)), (W, B, (1, 1))])


@pytest.fixture
def d4() -> Graph:
    # diamond: s=0, a=1, b=2, d=3
    return Graph.from_edges(4, [(0, 1, (1, 3)), (0, 2, (2, 1)), (1, 3, (1, 1)), (2, 3, (1, 2))])
