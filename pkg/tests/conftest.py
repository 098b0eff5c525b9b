import numpy as np
import pytest

from afacoustics import AfState, build_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(grid, rng, scale=1.0):
    """Random DOFs with the periodic duplication invariant satisfied."""
    state = AfState.zeros(grid)
    for arr in (state.avg, state.xedge, state.yedge, state.corner):
        arr[:] = scale * rng.normal(size=arr.shape)
    if grid.bc == "periodic":
        state.sync_periodic()
    return state


def small_periodic_grid(n=8):
    return build_grid(n, n, (-1.0, 1.0, -1.0, 1.0), "periodic")
