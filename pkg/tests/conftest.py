import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import pytest

from packdim.necklace import Triple
from packdim.scalars import QuadSurd


@pytest.fixture
def unit_root() -> Triple:
    """T(0,1,1) with exact data; d = 1."""
    return Triple(QuadSurd(0), QuadSurd(1), QuadSurd(1), QuadSurd(1))


@pytest.fixture
def strip_root() -> Triple:
    """T(0,1,2) with exact data; d = sqrt(2)."""
    return Triple(QuadSurd(0), QuadSurd(1), QuadSurd(2), QuadSurd(0, 1))
