import numpy as np
import pytest

from osserman_lab.metric import MetricField
from osserman_lab.specfile import load_preset


@pytest.fixture(scope="session")
def presets():
    """Preset objects cached for the whole test session."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_preset(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def bumpy4():
    """A generic curvy Riemannian 4-metric with nonzero Weyl tensor."""
    return MetricField.from_strings(
        [["1 + x2^2", "x1*x2/2", "0", "0"],
         ["x1*x2/2", "2 + sin(x1)", "0", "x3/4"],
         ["0", "0", "1 + x1^2/4", "0"],
         ["0", "x3/4", "0", "3 + cos(x2)"]],
        (1, 1, 1, 1),
        name="bumpy4",
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240813)
