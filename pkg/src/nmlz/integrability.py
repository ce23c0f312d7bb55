"""Two-time deformation machinery and path-deformed evolution.

A deformation family H(t, tau) scales a base model as B -> B tau,
G -> G sqrt(tau), and tau-scales a designated subset of the statics while
keeping the rest fixed.  For such families a partner generator

    H'(t, tau) = dB/dtau t²/2 + dA/dtau t - A(tau)² / (2 (b2 - b1) tau²)

(A = E + G, with (b2 - b1) the relative slope of the crossing pair,
declared by the family) satisfies the zero-curvature condition

    dH/dtau - dH'/dt - i [H, H'] = 0,

making evolution in the (t, tau) plane path independent: transition
probabilities depend only on the tau of the horizontal sweep, and vertical
(tau) legs contribute phases.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import NonPositiveTau
from .integrate import advance_interaction_picture, integrate_adaptive, \
    raise_for_status
from .model import NmlzModel, hamiltonian_at, validate_model
from .propagate import (PropagationSettings, DEFAULT_SETTINGS, TransitionTable,
                        _diabatic_phases, _dressing, _expm_small)
from .semiclassic import Hs4Params, hs4_model

_HPRIME_STIFF = 1e4


@dataclass(frozen=True)
class TwoTimeFamily:
    """Deformation family around a base model (the tau = 1 member)."""

    base: NmlzModel
    static_scales: np.ndarray      # bool per level: static picks up the tau factor
    relative_slope: float          # the (b2 - b1) entering the A² term

    def __post_init__(self):
        self.static_scales.setflags(write=False)
        if self.static_scales.shape != (self.base.dim,):
            raise ValueError("static_scales must have one flag per level")
        if self.relative_slope == 0.0:
            raise ValueError("relative_slope must be nonzero")

    @classmethod
    def for_hs4(cls, params: Hs4Params) -> "TwoTimeFamily":
        """HS4 deformation: E1 levels scale with tau, the driven pair stays."""
        return cls(base=hs4_model(params),
                   static_scales=np.array([True, True, False, False]),
                   relative_slope=params.b)


def _check_tau(tau):
    if not tau > 0:
        raise NonPositiveTau(f"tau must be positive, got {tau}")


def family_at(family: TwoTimeFamily, tau: float) -> NmlzModel:
    """The family member at deformation parameter tau."""
    _check_tau(tau)
    base = family.base
    statics = np.where(family.static_scales, base.statics * tau, base.statics)
    return validate_model(base.dim, base.slopes * tau, statics,
                          base.coupling * math.sqrt(tau), base.hermiticity)


def _a_matrix(family, tau):
    base = family.base
    statics = np.where(family.static_scales, base.statics * tau, base.statics)
    return np.diag(statics).astype(complex) + base.coupling * math.sqrt(tau)


def _da_dtau(family, tau):
    base = family.base
    d_static = np.where(family.static_scales, base.statics, 0.0)
    return np.diag(d_static).astype(complex) \
        + base.coupling / (2.0 * math.sqrt(tau))


def h_prime(family: TwoTimeFamily, t: float, tau: float) -> np.ndarray:
    """Partner generator H'(t, tau) of the deformation family."""
    _check_tau(tau)
    a = _a_matrix(family, tau)
    da = _da_dtau(family, tau)
    b_term = np.diag(family.base.slopes).astype(complex) * (0.5 * t * t)
    return b_term + da * t - (a @ a) / (2.0 * family.relative_slope * tau * tau)


def family_hamiltonian(family: TwoTimeFamily, t: float, tau: float) -> np.ndarray:
    return hamiltonian_at(family_at(family, tau), t)


def integrability_residual(family: TwoTimeFamily, grid) -> float:
    """Max-entry residual of the zero-curvature condition over a (t, tau) grid.

    Partial derivatives by central differences (step 1e-6, one Richardson
    extrapolation); the commutator is exact.  The finite-difference floor is
    roughly eps*||H||/step, so O(1e-9) residuals mean "satisfied".
    """
    step = 1e-6
    worst = 0.0
    for t, tau in grid:
        _check_tau(tau)
        d_tau = _richardson(
            lambda s: family_hamiltonian(family, t, tau + s), step)
        d_t = _richardson(lambda s: h_prime(family, t + s, tau), step)
        h = family_hamiltonian(family, t, tau)
        hp = h_prime(family, t, tau)
        residual = d_tau - d_t - 1j * (h @ hp - hp @ h)
        worst = max(worst, float(np.max(np.abs(residual))))
    return worst


def _richardson(f, h):
    wide = (f(h) - f(-h)) / (2.0 * h)
    tight = (f(h / 2.0) - f(-h / 2.0)) / h
    return (4.0 * tight - wide) / 3.0


def time_rescaled(model: NmlzModel, tau: float) -> NmlzModel:
    """Trivial symmetry t -> t/sqrt(tau): b/tau, E/sqrt(tau), G/sqrt(tau).

    Leaves every |S_mn|² unchanged; horizons of corresponding runs relate by
    T -> T sqrt(tau).
    """
    _check_tau(tau)
    s = math.sqrt(tau)
    return validate_model(model.dim, model.slopes / tau, model.statics / s,
                          model.coupling / s, model.hermiticity)


def area_preserving_at(family: TwoTimeFamily, tau: float) -> NmlzModel:
    """Deformation composed with the time rescaling: only statics move.

    Scaled statics pick up sqrt(tau), unscaled ones lose it, so products of
    one from each group (the enclosed level-separation area) are invariant.
    """
    _check_tau(tau)
    base = family.base
    s = math.sqrt(tau)
    statics = np.where(family.static_scales, base.statics * s, base.statics / s)
    return validate_model(base.dim, base.slopes, statics, base.coupling,
                          base.hermiticity)


@dataclass(frozen=True)
class TwoTimePath:
    """Axis-aligned polyline in the (t, tau) plane."""

    waypoints: tuple     # ((t, tau), ...)

    def __post_init__(self):
        pts = tuple((float(t), float(tau)) for t, tau in self.waypoints)
        object.__setattr__(self, "waypoints", pts)
        if len(pts) < 2:
            raise ValueError("a path needs at least two waypoints")
        for (t0, tau0), (t1, tau1) in zip(pts, pts[1:]):
            moved_t = t0 != t1
            moved_tau = tau0 != tau1
            if moved_t == moved_tau:
                raise ValueError(
                    "segments must change exactly one of (t, tau): "
                    f"({t0},{tau0}) -> ({t1},{tau1})")
            if tau0 <= 0 or tau1 <= 0:
                raise NonPositiveTau("path leaves the tau > 0 half plane")

    @classmethod
    def rectangle(cls, horizon: float, tau: float, tau_start: float = 1.0
                  ) -> "TwoTimePath":
        """(-T, tau0) up to tau, across to +T, back down to tau0."""
        return cls(waypoints=((-horizon, tau_start), (-horizon, tau),
                              (horizon, tau), (horizon, tau_start)))

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def end(self):
        return self.waypoints[-1]


def path_evolution(family: TwoTimeFamily, path: TwoTimePath,
                   settings: PropagationSettings = DEFAULT_SETTINGS
                   ) -> TransitionTable:
    """Unnormalized probabilities from the path-ordered two-time evolution.

    Horizontal legs integrate H at fixed tau (interaction-picture kernel),
    vertical legs integrate H' at fixed t.  Boundary dressing, when enabled,
    is applied in the models at the path's two endpoints, so a trivial path
    at tau = 1 reproduces the plain propagator column for the same horizon.
    Beat averaging never applies here: the path prescribes the horizons.
    """
    n = family.base.dim
    log_p = np.empty((n, n))
    for col in range(n):
        e_col = np.zeros(n, dtype=complex)
        e_col[col] = 1.0
        phi = e_col
        if settings.dress_boundaries:
            t0, tau0 = path.start
            phi = _expm_small(-_dressing(family_at(family, tau0), t0)) @ phi
        offset = 0.0
        for (ta, tau_a), (tb, tau_b) in zip(path.waypoints, path.waypoints[1:]):
            if tau_a == tau_b:
                phi, d_off = _horizontal_leg(family, tau_a, ta, tb, phi, settings)
            else:
                phi, d_off = _vertical_leg(family, ta, tau_a, tau_b, phi, settings)
            offset += d_off
        if settings.dress_boundaries:
            t1, tau1 = path.end
            phi = _expm_small(+_dressing(family_at(family, tau1), t1)) @ phi
        with np.errstate(divide="ignore"):
            log_p[:, col] = 2.0 * (np.log(np.abs(phi)) + offset)
    return TransitionTable(log_unnormalized=log_p)


def _horizontal_leg(family, tau, t_from, t_to, phi, settings):
    model = family_at(family, tau)
    c = phi * np.exp(1j * _diabatic_phases(model, t_from))
    c, off, status, n_steps = advance_interaction_picture(
        model.slopes, model.statics, model.coupling, c, t_from, t_to,
        settings.rel_tol, settings.abs_tol, settings.max_steps,
        settings.renorm_threshold)
    raise_for_status(status, n_steps, abs(t_to - t_from))
    return c * np.exp(-1j * _diabatic_phases(model, t_to)), off


def _vertical_leg(family, t, tau_from, tau_to, phi, settings):
    stiffness = float(np.max(np.abs(h_prime(family, t, tau_from)))) \
        * abs(tau_to - tau_from)
    if stiffness > _HPRIME_STIFF:
        warnings.warn(
            f"vertical leg at t={t:g} has ||H'||*dtau = {stiffness:.2e}; "
            "expect slow integration", stacklevel=3)

    def rhs(tau, y):
        return -1j * (h_prime(family, t, tau) @ y)

    return integrate_adaptive(rhs, tau_from, tau_to, phi,
                              settings.rel_tol, settings.abs_tol,
                              max_steps=settings.max_steps,
                              renorm_threshold=settings.renorm_threshold)
