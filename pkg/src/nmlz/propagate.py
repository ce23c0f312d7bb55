"""Numerical scattering matrix for linearly driven N-level models.

The Schrödinger equation is integrated in the diabatic interaction picture
(phases theta_m = b_m t²/2 + E_m t removed), which leaves only the
coupling-driven oscillation exp(i d_theta) concentrated near level
crossings.  Two refinements make the t -> ±infinity limit cheap:

* **boundary dressing** - the bare initial condition delta_mn is correct
  only at t = -infinity; at the finite start time the true incoming
  scattering state carries first-order adiabatic tails
  c_m = -G_mn exp(i d_theta_mn)/d_theta_dot_mn.  The integration starts from
  exp(-D(-T)) e_n and the matrix column is extracted as exp(+D(T)) c(T),
  where D collects those tails.  The exponential form preserves the signed
  quadratic invariants of the evolution exactly, so conservation laws are
  not polluted by the extraction; entry errors drop from O(1/T) to O(1/T²).

* **beat averaging** - level pairs with equal slopes but different statics
  never decouple; they imprint an oscillation of frequency |dE| and
  amplitude O(1/T) on every probability.  Columns are integrated on a comb
  of horizons shifted by half-periods of each such beat frequency and the
  resulting |S|² are averaged, cancelling the oscillatory transient.

Both features can be disabled (``dress_boundaries``/``average_beats``) to
recover the raw finite-horizon propagator.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import Overflow, ZeroColumn
from .integrate import (advance_interaction_picture, integrate_adaptive,
                        raise_for_status)
from .model import NmlzModel, hamiltonian_at

_LOG_HUGE = 700.0          # exp() overflows above this
_MAX_BEAT_FREQS = 3        # comb size cap: 2**3 runs per column


@dataclass(frozen=True)
class PropagationSettings:
    """Horizon and error control for one scattering run.

    ``horizon=None`` selects the model-dependent default, refined if needed
    with :func:`convergence_sweep`.
    """

    horizon: Optional[float] = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_steps: int = 50_000_000
    renorm_threshold: float = 20.0
    dress_boundaries: bool = True
    average_beats: bool = True

    def __post_init__(self):
        if self.horizon is not None and not self.horizon > 0:
            raise ValueError("horizon must be positive")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if not self.renorm_threshold > 0:
            raise ValueError("renorm_threshold must be positive")


DEFAULT_SETTINGS = PropagationSettings()


def default_horizon(model: NmlzModel) -> float:
    """Heuristic evolution horizon: 10 x (amplitude/slope-gap scale).

    Scales with the largest static or coupling relative to the smallest
    slope difference among coupled pairs; degenerate coupled pairs carry no
    crossing scale and are skipped.
    """
    amp = max(float(np.max(np.abs(model.statics), initial=0.0)),
              float(np.max(np.abs(model.coupling), initial=0.0)))
    gaps = [abs(model.slopes[i] - model.slopes[j])
            for i, j in model.coupled_pairs()
            if model.slopes[i] != model.slopes[j]]
    if not gaps:
        return 10.0 * max(1.0, amp)
    inv_gap = 1.0 / min(gaps)
    return 10.0 * max(1.0, amp * inv_gap) * max(1.0, np.sqrt(inv_gap))


def beat_frequencies(model: NmlzModel) -> list:
    """Distinct |dE| over equal-slope level pairs that stay coupled forever.

    Pairs with b_i == b_j and E_i != E_j never leave each other's resonance
    reach; their static splitting sets the frequency of the residual
    finite-horizon oscillation.  Isolated (fully uncoupled) levels do not
    contribute.
    """
    active = np.any(model.coupling != 0.0, axis=1)
    freqs = []
    n = model.dim
    for i in range(n):
        for j in range(i + 1, n):
            if model.slopes[i] != model.slopes[j]:
                continue
            de = abs(model.statics[i] - model.statics[j])
            if de == 0.0 or not (active[i] or active[j]):
                continue
            if not any(abs(de - f) < 1e-12 for f in freqs):
                freqs.append(de)
    freqs.sort(reverse=True)
    return freqs[:_MAX_BEAT_FREQS]


def _horizon_comb(model, horizon, enabled):
    if not enabled:
        return [horizon]
    freqs = beat_frequencies(model)
    horizons = [horizon]
    for w in freqs:
        horizons += [t + np.pi / (2.0 * w) for t in horizons]
    return horizons


def _dressing(model: NmlzModel, t: float) -> np.ndarray:
    """First-order adiabatic tail matrix D(t); zero where no crossing scale."""
    n = model.dim
    b, e, g = model.slopes, model.statics, model.coupling
    d = np.zeros((n, n), dtype=complex)
    for m in range(n):
        for k in range(n):
            if m == k or g[m, k] == 0.0:
                continue
            db = b[m] - b[k]
            if db == 0.0:
                continue
            rate = db * t + (e[m] - e[k])
            if abs(rate) < 1e-9:
                continue  # crossing sits at the horizon; skip the tail
            phase = (0.5 * db * t + (e[m] - e[k])) * t
            d[m, k] = g[m, k] * np.exp(1j * phase) / rate
    return d


def _expm_small(m: np.ndarray) -> np.ndarray:
    """exp(m) by plain series; fine for the O(1/T)-norm dressing matrices."""
    out = np.eye(m.shape[0], dtype=complex)
    term = out
    for j in range(1, 40):
        term = term @ m / j
        out = out + term
        if np.max(np.abs(term)) < 1e-18:
            break
    return out


@dataclass(frozen=True)
class ColumnResult:
    """One scattering-matrix column as scaled amplitudes plus log offset."""

    amplitudes: np.ndarray
    log_offset: float

    @property
    def log_probabilities(self) -> np.ndarray:
        """log |S_mn|² per final level m."""
        with np.errstate(divide="ignore"):
            return 2.0 * (np.log(np.abs(self.amplitudes)) + self.log_offset)


def _diabatic_phases(model, t):
    return (0.5 * model.slopes * t + model.statics) * t


def _integrate_column(model, start_level, horizon, settings):
    """One raw kernel run from -T to +T, dressed per settings."""
    n = model.dim
    e_n = np.zeros(n, dtype=complex)
    e_n[start_level] = 1.0
    if settings.dress_boundaries:
        c0 = _expm_small(-_dressing(model, -horizon)) @ e_n
    else:
        c0 = e_n
    y, log_offset, status, n_steps = advance_interaction_picture(
        model.slopes, model.statics, model.coupling, c0, -horizon, horizon,
        settings.rel_tol, settings.abs_tol, settings.max_steps,
        settings.renorm_threshold)
    raise_for_status(status, n_steps, 2.0 * horizon)
    if settings.dress_boundaries:
        y = _expm_small(+_dressing(model, horizon)) @ y
    # restore diabatic phases: phi_m = exp(-i theta_m(T)) c_m, global phase
    # exp(i theta_n(-T)) from the initial conversion (informational only)
    phases = _diabatic_phases(model, horizon)
    y = y * np.exp(-1j * phases)
    y = y * np.exp(1j * _diabatic_phases(model, -horizon)[start_level])
    return y, log_offset


def propagate_column(model: NmlzModel, start_level: int,
                     settings: PropagationSettings = DEFAULT_SETTINGS
                     ) -> ColumnResult:
    """Column ``start_level`` of the scattering matrix.

    The stored amplitudes are rescaled so their largest magnitude is 1; the
    true column is ``amplitudes * exp(log_offset)``.  Magnitudes are
    horizon-comb averages when beat averaging applies; phases come from the
    base-horizon run and are informational.
    """
    if not 0 <= start_level < model.dim:
        raise IndexError(f"start_level {start_level} outside 0..{model.dim - 1}")
    horizon = settings.horizon if settings.horizon is not None \
        else default_horizon(model)
    horizons = _horizon_comb(model, horizon, settings.average_beats)
    log_p = None
    base_phases = None
    for i, t_end in enumerate(horizons):
        y, off = _integrate_column(model, start_level, t_end, settings)
        with np.errstate(divide="ignore"):
            lp = 2.0 * (np.log(np.abs(y)) + off)
        if i == 0:
            log_p = lp
            base_phases = np.angle(y)
        else:
            log_p = np.logaddexp(log_p, lp)
    if len(horizons) > 1:
        log_p = log_p - np.log(len(horizons))
    offset = 0.5 * float(np.max(log_p))
    amplitudes = np.exp(0.5 * log_p - offset) * np.exp(1j * base_phases)
    return ColumnResult(amplitudes=amplitudes, log_offset=offset)


@dataclass(frozen=True)
class ScatteringResult:
    """Scaled scattering matrix with per-column log-magnitude offsets.

    True S_mn = s_matrix[m, n] * exp(log_offsets[n]); every stored column
    has max magnitude 1.  ``convergence_estimate`` is the max relative
    change of |S_mn|² between the run horizon and half of it.
    """

    s_matrix: np.ndarray
    log_offsets: np.ndarray
    horizon_used: float
    convergence_estimate: float

    @property
    def dim(self) -> int:
        return self.s_matrix.shape[0]

    @property
    def log_probabilities(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 2.0 * (np.log(np.abs(self.s_matrix))
                          + self.log_offsets[None, :])


def _columns(model, settings, horizon):
    run = replace(settings, horizon=horizon)
    n = model.dim
    workers = _column_workers(n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cols = list(pool.map(
                lambda j: propagate_column(model, j, run), range(n)))
    else:
        cols = [propagate_column(model, j, run) for j in range(n)]
    s = np.column_stack([c.amplitudes for c in cols])
    offs = np.array([c.log_offset for c in cols])
    return s, offs


def _column_workers(n_columns):
    env = os.environ.get("NMLZ_THREADS")
    if env is not None:
        cap = max(1, int(env))
    else:
        cap = min(4, os.cpu_count() or 1)
    return min(cap, n_columns)


def scattering_matrix(model: NmlzModel,
                      settings: PropagationSettings = DEFAULT_SETTINGS
                      ) -> ScatteringResult:
    """All N columns plus a half-horizon convergence estimate."""
    horizon = settings.horizon if settings.horizon is not None \
        else default_horizon(model)
    s, offs = _columns(model, settings, horizon)
    s_half, offs_half = _columns(model, settings, horizon / 2.0)
    with np.errstate(divide="ignore"):
        lp = 2.0 * (np.log(np.abs(s)) + offs[None, :])
        lp_half = 2.0 * (np.log(np.abs(s_half)) + offs_half[None, :])
    significant = lp > (np.max(lp) - 18.0)  # ignore structural zeros
    if np.any(significant):
        est = float(np.max(np.abs(
            np.expm1(lp_half[significant] - lp[significant]))))
    else:
        est = 0.0
    return ScatteringResult(s_matrix=s, log_offsets=offs,
                            horizon_used=horizon, convergence_estimate=est)


@dataclass(frozen=True)
class TransitionTable:
    """Unnormalized and column-normalized transition probabilities.

    Entry (m, n) is the transition from level n to level m.  Data is stored
    in log space; the linear accessors raise :class:`Overflow` when any
    entry exceeds the double range, while ``normalized`` is always finite.
    """

    log_unnormalized: np.ndarray

    @property
    def dim(self) -> int:
        return self.log_unnormalized.shape[0]

    @property
    def log_column_norms(self) -> np.ndarray:
        return _logsumexp_columns(self.log_unnormalized)

    @property
    def unnormalized(self) -> np.ndarray:
        if np.max(self.log_unnormalized) > _LOG_HUGE:
            raise Overflow("P-tilde exceeds double range; use log accessors")
        return np.exp(self.log_unnormalized)

    @property
    def column_norms(self) -> np.ndarray:
        log_n = self.log_column_norms
        if np.max(log_n) > _LOG_HUGE:
            raise Overflow("column norms exceed double range; use log accessors")
        return np.exp(log_n)

    @property
    def normalized(self) -> np.ndarray:
        return np.exp(self.log_unnormalized - self.log_column_norms[None, :])


def _logsumexp_columns(log_values):
    top = np.max(log_values, axis=0)
    safe = np.where(np.isfinite(top), top, 0.0)
    return safe + np.log(np.sum(np.exp(log_values - safe[None, :]), axis=0))


def transition_table(result: ScatteringResult) -> TransitionTable:
    """P-tilde = |S_mn|² and its column normalization (Born rule per column)."""
    log_p = result.log_probabilities
    if np.all(np.isinf(log_p)):
        raise ZeroColumn("scattering result carries no amplitude")
    return TransitionTable(log_unnormalized=log_p)


def convergence_sweep(model: NmlzModel, horizons,
                      settings: PropagationSettings = DEFAULT_SETTINGS):
    """Transition tables at a list of increasing horizons.

    Used to pick the horizon where successive relative change of P-tilde
    drops below a target; returns [(T, TransitionTable), ...].
    """
    horizons = list(horizons)
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise ValueError("horizons must be strictly increasing")
    out = []
    for t_end in horizons:
        run = replace(settings, horizon=float(t_end))
        s, offs = _columns(model, run, float(t_end))
        with np.errstate(divide="ignore"):
            lp = 2.0 * (np.log(np.abs(s)) + offs[None, :])
        out.append((float(t_end), TransitionTable(log_unnormalized=lp)))
    return out


def propagate_column_raw(model: NmlzModel, start_level: int, horizon: float,
                         rel_tol=1e-10, abs_tol=1e-10) -> ColumnResult:
    """Validation mode: integrate i dpsi/dt = H(t) psi without the
    interaction picture, dressing, or beat averaging.

    Step size is limited by the full diagonal oscillation, so keep the
    horizon small; used to cross-check the production pipeline.
    """
    n = model.dim
    y0 = np.zeros(n, dtype=complex)
    y0[start_level] = 1.0

    def rhs(t, y):
        return -1j * (hamiltonian_at(model, t) @ y)

    y, off = integrate_adaptive(rhs, -horizon, horizon, y0, rel_tol, abs_tol,
                                renorm_threshold=20.0)
    return ColumnResult(amplitudes=y, log_offset=off)
