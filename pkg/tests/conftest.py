import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from zerominor.ff import BinaryField, PrimeField
from zerominor.instances import gen_instance
from zerominor.matfq import MatrixFq

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# 5 x 10 kernel over F_73 in [A | J] form, J the reversed identity
F73_KERNEL = [
    [70, 18, 1, 17, 10, 0, 0, 0, 0, 1],
    [10, 13, 54, 43, 48, 0, 0, 0, 1, 0],
    [23, 43, 8, 24, 57, 0, 0, 1, 0, 0],
    [29, 29, 56, 61, 48, 0, 1, 0, 0, 0],
    [49, 38, 21, 46, 27, 1, 0, 0, 0, 0],
]
F73_REDUCED_ROW = (0, 0, 61, 8, 39, 0, 0, 0, 66, 1)


@pytest.fixture(scope="session")
def f73():
    return PrimeField(73)


@pytest.fixture(scope="session")
def f73_kernel(f73):
    return MatrixFq(f73, F73_KERNEL)


@pytest.fixture(scope="session")
def gf256():
    return BinaryField(8, 0x11B)


@pytest.fixture(scope="session")
def small_prime_instance():
    return gen_instance(12, "prime", np.random.default_rng(101))


@pytest.fixture(scope="session")
def small_binary_instance():
    return gen_instance(12, "binary", np.random.default_rng(202))


@pytest.fixture(scope="session")
def mid_prime_instance():
    return gen_instance(16, "prime", np.random.default_rng(303))
