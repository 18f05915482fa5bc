import math

import pytest
from hypothesis import HealthCheck, settings

from mirror_dce.circuit import CircuitParams
from mirror_dce.experiments import drive_normalized_bias
from mirror_dce.trajectories import TrajectoryKind, TrajectoryParams

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def reference_circuit():
    """Reference single-tone circuit (the defaults)."""
    return CircuitParams()


@pytest.fixture(scope="session")
def sm_baseline(reference_circuit):
    """SM at the baseline point: R = 0.11 mm, drive 18 GHz, v = 0.4c."""
    wd = TWO_PI * 18e9
    return TrajectoryParams(TrajectoryKind.SM, 0.11e-3 * wd**2, wd, reference_circuit.v)


@pytest.fixture(scope="session")
def sa_comparison(reference_circuit):
    """SA at the relativistic comparison point."""
    return TrajectoryParams(
        TrajectoryKind.SA, 13.725e18, TWO_PI * 14.6e9, reference_circuit.v
    )


@pytest.fixture(scope="session")
def aua_comparison(reference_circuit):
    """AUA at the relativistic comparison point."""
    return TrajectoryParams(
        TrajectoryKind.AUA, 20e18, TWO_PI * 14.6e9, reference_circuit.v
    )


@pytest.fixture(scope="session")
def sa_comparison_circuit(sa_comparison, reference_circuit):
    return drive_normalized_bias(sa_comparison, reference_circuit)


@pytest.fixture(scope="session")
def aua_comparison_circuit(aua_comparison, reference_circuit):
    return drive_normalized_bias(aua_comparison, reference_circuit)
