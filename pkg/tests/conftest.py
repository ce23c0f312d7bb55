import numpy as np
import pytest

from nmlz import PropagationSettings, scattering_matrix, transition_table


def full_ptilde(model, **settings_kwargs):
    """Dense unnormalized transition matrix from the propagator."""
    table = transition_table(
        scattering_matrix(model, PropagationSettings(**settings_kwargs)))
    return table.unnormalized


def full_log_ptilde(model, **settings_kwargs):
    table = transition_table(
        scattering_matrix(model, PropagationSettings(**settings_kwargs)))
    return table.log_unnormalized


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def warm_kernel():
    """Force the jitted integrator to compile before anything is timed."""
    from nmlz import two_level_model, propagate_column
    propagate_column(two_level_model(0.2, 2.0),
                     0, PropagationSettings(horizon=5.0))
    return True
