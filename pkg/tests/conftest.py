import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from truncated_hilbert import Geometry, build_operator, compute_svd

PAPER_GEOM = Geometry(0.0, 450.0, 1350.0, 1725.0)
SMALL_PRESET_GEOM = Geometry(0.0, 30.0, 90.0, 115.0)
TINY_GEOM = Geometry(0.0, 2.0, 6.0, 8.0)
UNIT_GEOM = Geometry(-1.0, 0.0, 0.5, 1.0)


@pytest.fixture(scope="session")
def paper_op():
    return build_operator(PAPER_GEOM, step=1.0, shift=0.5)


@pytest.fixture(scope="session")
def paper_sys(paper_op):
    return compute_svd(paper_op, rank_tol=1e-21, method="cauchy")


@pytest.fixture(scope="session")
def small_preset_op():
    return build_operator(SMALL_PRESET_GEOM, step=1.0, shift=0.5)


@pytest.fixture(scope="session")
def small_preset_sys(small_preset_op):
    return compute_svd(small_preset_op, rank_tol=1e-21, method="cauchy")


@pytest.fixture(scope="session")
def tiny_op():
    return build_operator(TINY_GEOM, step=1.0, shift=0.5)


@pytest.fixture(scope="session")
def tiny_sys(tiny_op):
    return compute_svd(tiny_op)
