import numpy as np
import pytest

import wavelock as wl
from wavelock.verifier import CauchyTransform, FrequencyGrid, PlaneGrid


@pytest.fixture(scope="session")
def ref_params() -> wl.ProblemParams:
    """The dual-regime reference instance used throughout."""
    return wl.ProblemParams(beta=0.5, p=2.0, q=4.0, A=1.0, B=0.4)


@pytest.fixture(scope="session")
def ref_report(ref_params) -> wl.BoundReport:
    return wl.compute_bound(ref_params)


@pytest.fixture(scope="session")
def default_machine() -> CauchyTransform:
    """Transform machinery on the default desk-scale grids (beta = 0.5)."""
    return CauchyTransform(FrequencyGrid.default(), PlaneGrid.default(), 0.5)


@pytest.fixture(scope="session")
def coarse_machine() -> CauchyTransform:
    """Cheaper grids for tests that only need qualitative operator behaviour."""
    return CauchyTransform(
        FrequencyGrid.default(nodes_per_panel=12),
        PlaneGrid.default(nx=151, ny=140),
        0.5,
    )


def random_dual_params(rng: np.random.Generator) -> wl.ProblemParams:
    """Sample an instance strictly inside the dual window."""
    while True:
        beta = rng.uniform(0.2, 2.0)
        p = rng.uniform(1.3, 6.0)
        q = rng.uniform(1.3, 6.0)
        if abs(p - q) < 0.2:
            continue
        probe = wl.ProblemParams(beta, p, q, 1.0, 1.0)
        c = wl.derive_constants(probe)
        if c.r2 is None:
            lo, hi = 1.2 * c.r1, 5.0 * c.r1  # dual opens upward when r2 diverges
        elif c.r1 is None:
            lo, hi = 0.1 * c.r2, 0.9 * c.r2
        else:
            span = c.r2 - c.r1
            lo, hi = c.r1 + 0.2 * span, c.r1 + 0.8 * span
        ratio = rng.uniform(lo, hi)
        return wl.ProblemParams(beta, p, q, 1.0, ratio)


def random_single_params(rng: np.random.Generator) -> tuple[wl.ProblemParams, str]:
    """Sample an instance in one of the single-constraint regimes."""
    while True:
        beta = rng.uniform(0.2, 2.0)
        p = rng.uniform(1.3, 6.0)
        q = rng.uniform(1.3, 6.0)
        if abs(p - q) < 0.2:
            continue
        probe = wl.ProblemParams(beta, p, q, 1.0, 1.0)
        c = wl.derive_constants(probe)
        if rng.random() < 0.5 and c.r2 is not None:
            return wl.ProblemParams(beta, p, q, 1.0, c.r2 * rng.uniform(1.2, 3.0)), "P"
        if c.r1 is not None:
            return wl.ProblemParams(beta, p, q, 1.0, c.r1 * rng.uniform(0.2, 0.8)), "Q"
