import numpy as np
import pytest

from dipolejumps import DipoleCoupling, Geometry, ModelParams, compute_c3

# parameters used throughout the simulations: Omega3 = 0.5 A3, Omega2 = 0.01 A3
REF = dict(omega2=0.01, omega3=0.5, delta2=0.0, a3=1.0)


@pytest.fixture
def ref_params() -> ModelParams:
    return ModelParams(**REF)


@pytest.fixture
def coupling_r1() -> DipoleCoupling:
    return compute_c3(Geometry(r=1.0))


@pytest.fixture
def no_coupling() -> DipoleCoupling:
    return DipoleCoupling(0j)


def random_coupling(rng: np.random.Generator, rmin: float = 1.0,
                    rmax: float = 10.0) -> DipoleCoupling:
    return compute_c3(Geometry(r=float(rng.uniform(rmin, rmax))))
