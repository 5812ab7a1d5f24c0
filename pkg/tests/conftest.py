import numpy as np
import pytest

from rcmsw import rng
from rcmsw.data import normalize
from rcmsw.simbench import CoefficientLaw, generate_dataset


@pytest.fixture
def gen():
    return rng.stream(12345, 777)


@pytest.fixture(scope="session")
def sph_data_500():
    ds, betas = generate_dataset(CoefficientLaw("sph", 2), 500, seed=11)
    return normalize(ds), betas


def unit_circle(angles_deg):
    a = np.deg2rad(np.asarray(angles_deg, dtype=float))
    return np.column_stack([np.cos(a), np.sin(a)])
