"""Mean-field molecular dissociation mapped onto the two-level model.

Two atomic modes with linearly swept chemical potentials and a coherent
molecular drive obey Heisenberg equations whose mode-operator column
evolves under the non-Hermitian generator

    [[mu1(t), g*], [-g, mu2(t)]],

a dimension-2 member of the linear-drive class.  Starting from vacuum the
occupations grow pairwise: n_a - n_b stays exactly constant (one atom of
each species per dissociated molecule), which is the conservation law
P~11 - P~21 = 1 read as an observable.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotLinear
from .integrate import advance_interaction_picture, raise_for_status
from .model import NmlzModel, validate_model
from .propagate import (PropagationSettings, DEFAULT_SETTINGS, ColumnResult,
                        _diabatic_phases, _dressing, _expm_small,
                        default_horizon, propagate_column)

LINEAR_SWEEP = "linear"


@dataclass(frozen=True)
class DissociationSystem:
    """Linearly swept two-mode dissociation in mean field.

    ``g_eff`` is the molecular coupling times the condensate amplitude
    (fixed for a run; no depletion feedback).  Only linear sweeps map onto
    the solvable class.
    """

    mu1_slope: float
    mu2_slope: float
    mu1_offset: float = 0.0
    mu2_offset: float = 0.0
    g_eff: complex = 0.0
    sweep: str = LINEAR_SWEEP

    def __post_init__(self):
        if self.sweep != LINEAR_SWEEP:
            raise NotLinear(f"unsupported sweep kind {self.sweep!r}")
        for v in (self.mu1_slope, self.mu2_slope, self.mu1_offset,
                  self.mu2_offset):
            if not math.isfinite(v):
                raise ValueError("sweep parameters must be finite")


def symmetric_dissociation(v, g) -> DissociationSystem:
    """Antisymmetric sweeps mu1 = -v t/2, mu2 = +v t/2 (relative rate v)."""
    return DissociationSystem(mu1_slope=-v / 2.0, mu2_slope=v / 2.0,
                              g_eff=complex(g))


def dissociation_to_nlz(system: DissociationSystem) -> NmlzModel:
    """Encode the Heisenberg generator as validated two-level model data."""
    g = complex(system.g_eff)
    coupling = np.array([[0.0, np.conj(g)], [-g, 0.0]], dtype=complex)
    return validate_model(2, [system.mu1_slope, system.mu2_slope],
                          [system.mu1_offset, system.mu2_offset], coupling)


@dataclass(frozen=True)
class PairObservables:
    """Mode occupations along the sweep plus their scattering-limit values.

    The time series carries the raw finite-horizon trajectory (vacuum
    dressed into the incoming state); ``final_n_a``/``final_n_b`` apply the
    outgoing boundary dressing and therefore equal the t -> infinity
    occupations up to integrator error.
    """

    times: np.ndarray
    n_a: np.ndarray
    n_b: np.ndarray
    final_n_a: float
    final_n_b: float

    @property
    def difference(self) -> np.ndarray:
        return self.n_a - self.n_b


def pair_production_run(system: DissociationSystem,
                        settings: PropagationSettings = DEFAULT_SETTINGS,
                        n_samples: int = 401) -> PairObservables:
    """Occupation trajectories n_a(t) = |phi_1|² - 1 and n_b(t) = |phi_2|².

    The run starts from the mode-a row (unit amplitude convention); pairs
    produced in mode b equal the off-diagonal unnormalized probability.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    model = dissociation_to_nlz(system)
    horizon = settings.horizon if settings.horizon is not None \
        else default_horizon(model)
    times = np.linspace(-horizon, horizon, n_samples)
    c = np.zeros(2, dtype=complex)
    c[0] = 1.0
    if settings.dress_boundaries:
        c = _expm_small(-_dressing(model, -horizon)) @ c
    offset = 0.0
    n_a = np.empty(n_samples)
    n_b = np.empty(n_samples)

    def record(i):
        p = np.abs(c) ** 2 * math.exp(2.0 * offset)
        n_a[i] = p[0] - 1.0
        n_b[i] = p[1]

    record(0)
    for i in range(1, n_samples):
        c, d_off, status, n_steps = advance_interaction_picture(
            model.slopes, model.statics, model.coupling, c,
            times[i - 1], times[i], settings.rel_tol, settings.abs_tol,
            settings.max_steps, settings.renorm_threshold)
        raise_for_status(status, n_steps, times[i] - times[i - 1])
        offset += d_off
        record(i)

    final = c
    if settings.dress_boundaries:
        final = _expm_small(+_dressing(model, horizon)) @ c
    p_final = np.abs(final) ** 2 * math.exp(2.0 * offset)
    return PairObservables(times=times, n_a=n_a, n_b=n_b,
                           final_n_a=float(p_final[0] - 1.0),
                           final_n_b=float(p_final[1]))


def scattering_occupations(system: DissociationSystem,
                           settings: PropagationSettings = DEFAULT_SETTINGS
                           ) -> tuple:
    """(n_a, n_b) in the scattering limit via the production propagator."""
    model = dissociation_to_nlz(system)
    col: ColumnResult = propagate_column(model, 0, settings)
    p = np.exp(col.log_probabilities)
    return float(p[0] - 1.0), float(p[1])
