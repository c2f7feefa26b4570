import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fastla.core import RngStream
from fastla.matmul import MmEngine


@pytest.fixture
def rng():
    return RngStream(0xBA5E)


@pytest.fixture(params=["conv", "strassen"])
def engine(request):
    if request.param == "conv":
        return MmEngine("conv")
    return MmEngine("strassen", cutoff=8)
