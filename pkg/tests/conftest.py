import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ared.core import Domain, Provenance, Sample, VariableRange


@pytest.fixture
def unit_domain():
    return Domain([VariableRange("x", 0.0, 1.0)], "y")


@pytest.fixture
def square_domain():
    return Domain(
        [VariableRange("x", -3.0, 3.0), VariableRange("y", -3.0, 3.0)], "z"
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_samples(coords_values, provenance=Provenance.INITIAL):
    return [
        Sample(c, v, provenance, i) for i, (c, v) in enumerate(coords_values)
    ]


@pytest.fixture
def samples_1d():
    return make_samples([((0.0,), 0.1), ((1.0,), 0.9), ((0.4,), 0.25), ((0.7,), 0.6)])
