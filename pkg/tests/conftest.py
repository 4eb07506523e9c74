import numpy as np
import pytest

from accsens.densities import DensityModel, HypothesisPair


@pytest.fixture(scope="session")
def table1_pair() -> HypothesisPair:
    """Wide H0 against narrow shifted H1; the workhorse reference problem."""
    return HypothesisPair(DensityModel.gaussian(0.0, 9.0), DensityModel.gaussian(9.0, 4.0), 0.5)


@pytest.fixture(scope="session")
def fig2c_pair() -> HypothesisPair:
    """Pair whose accuracy gradient has two tied maximal components."""
    return HypothesisPair(DensityModel.gaussian(0.0, 4.0), DensityModel.gaussian(5.0, 3.0), 0.5)


@pytest.fixture(scope="session")
def exp_pair() -> HypothesisPair:
    return HypothesisPair(DensityModel.exponential(1.0), DensityModel.exponential(2.0), 0.5)


def random_gaussian_pair(rng: np.random.Generator, min_sigma_gap: float = 0.2) -> HypothesisPair:
    """Well-conditioned random pair for property loops."""
    mu0, mu1 = rng.uniform(-5.0, 5.0, 2)
    s0, s1 = rng.uniform(0.5, 6.0, 2)
    if abs(s0 - s1) < min_sigma_gap:
        s1 += 2.0 * min_sigma_gap
    p0 = rng.uniform(0.3, 0.7)
    return HypothesisPair(DensityModel.gaussian(mu0, s0), DensityModel.gaussian(mu1, s1), p0)
