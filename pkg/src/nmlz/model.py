"""Model data for linearly driven N-level systems.

A model is the triple (B, E, G): diagonal slope matrix B (entries b_n, the
velocities of the diabatic levels), diagonal static part E, and a coupling
matrix G that is either anti-Hermitian (G† = -G, non-unitary evolution) or
Hermitian (standard multistate Landau-Zener).  The generator is

    H(t) = diag(b) t + diag(E) + G.

Conventions fixed here and used everywhere else:

* the diagonal of G is identically zero; all static diagonal content lives
  in E (no double counting),
* level indices are 0-based in the Python API (CSV/CLI output is 1-based),
* degenerate slope pairs (b_i == b_j with G_ij != 0) are legal model data;
  only closed-form crossing formulas reject them.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, HermiticityViolation, NonFiniteEntry
from .settings import DEFAULT_NUMERIC
from . import eigen

ANTIHERMITIAN = "antihermitian"
HERMITIAN = "hermitian"


@dataclass(frozen=True)
class NmlzModel:
    """Validated (B, E, G) triple; construct via :func:`validate_model`."""

    slopes: np.ndarray          # b_n, units 1/t^2
    statics: np.ndarray         # E_n, units 1/t
    coupling: np.ndarray        # G, complex, zero diagonal, units 1/t
    hermiticity: str = ANTIHERMITIAN

    def __post_init__(self):
        for a in (self.slopes, self.statics, self.coupling):
            a.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.slopes.shape[0]

    @property
    def antihermitian(self) -> bool:
        return self.hermiticity == ANTIHERMITIAN

    def coupled_pairs(self):
        """Index pairs (i, j), i < j, with a nonzero coupling."""
        n = self.dim
        return [(i, j) for i in range(n) for j in range(i + 1, n)
                if self.coupling[i, j] != 0.0]


def validate_model(dim, slopes, statics, coupling, hermiticity=ANTIHERMITIAN,
                   numeric=DEFAULT_NUMERIC) -> NmlzModel:
    """Check and canonicalize raw model data.

    The coupling is tested against the declared flag entrywise (residual
    above ``numeric.hermiticity_tol`` is an error), then symmetrized exactly:
    G <- (G - G†)/2 for the anti-Hermitian flag, (G + G†)/2 for the Hermitian
    one.  The diagonal of G must be negligible and is zeroed.

    Raises DimensionMismatch, NonFiniteEntry, HermiticityViolation.
    """
    if hermiticity not in (ANTIHERMITIAN, HERMITIAN):
        raise ValueError(f"unknown hermiticity flag {hermiticity!r}")
    if dim < 1:
        raise DimensionMismatch(f"dim must be positive, got {dim}")
    b = np.asarray(slopes, dtype=float).reshape(-1)
    e = np.asarray(statics, dtype=float).reshape(-1)
    g = np.array(coupling, dtype=complex)
    if b.shape != (dim,) or e.shape != (dim,):
        raise DimensionMismatch(
            f"slopes/statics must have length {dim}, got {b.shape[0]}/{e.shape[0]}")
    if g.shape != (dim, dim):
        raise DimensionMismatch(f"coupling must be {dim}x{dim}, got {g.shape}")
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(e))
            and np.all(np.isfinite(g.view(float)))):
        raise NonFiniteEntry("model data contains NaN or infinity")

    sign = -1.0 if hermiticity == ANTIHERMITIAN else 1.0
    residual = np.max(np.abs(g.conj().T - sign * g))
    if residual > numeric.hermiticity_tol:
        raise HermiticityViolation(
            f"coupling violates {hermiticity} condition: "
            f"max |G† - ({sign:+.0f})G| = {residual:.3e}")
    diag_mag = np.max(np.abs(np.diag(g))) if dim else 0.0
    if diag_mag > numeric.hermiticity_tol:
        raise HermiticityViolation(
            f"diagonal of G must vanish (statics belong in E): {diag_mag:.3e}")

    g = 0.5 * (g + sign * g.conj().T)
    np.fill_diagonal(g, 0.0)
    return NmlzModel(slopes=b, statics=e, coupling=g, hermiticity=hermiticity)


def hamiltonian_at(model: NmlzModel, t) -> np.ndarray:
    """H(t) = diag(b) t + diag(E) + G.  Accepts real or complex t."""
    h = model.coupling.astype(complex, copy=True)
    d = model.slopes * t + model.statics
    h[np.diag_indices(model.dim)] += d
    return h


def two_level_model(g, v, hermiticity=ANTIHERMITIAN) -> NmlzModel:
    """Canonical two-level crossing with relative slope v.

    Levels run at -v t/2 and +v t/2 so that the difference of diabatic
    velocities is exactly ``v``; the asymptotic survival probability is then
    exp(±2π|g|²/v) (+ anti-Hermitian, - Hermitian).
    """
    if v <= 0:
        raise ValueError("relative slope v must be positive")
    off = complex(g)
    low = -np.conj(off) if hermiticity == ANTIHERMITIAN else np.conj(off)
    coupling = np.array([[0.0, off], [low, 0.0]], dtype=complex)
    return validate_model(2, [-v / 2.0, v / 2.0], [0.0, 0.0], coupling, hermiticity)


def eigenvalues(matrix) -> np.ndarray:
    """Spectrum of a dense complex matrix (N <= 16); see :mod:`nmlz.eigen`."""
    return eigen.eigenvalues(matrix)


@dataclass(frozen=True)
class EigenvalueTrace:
    """Continuity-ordered instantaneous eigenvalues on a time grid."""

    times: np.ndarray          # (samples,)
    eigenvalues: np.ndarray    # (samples, N) complex, column = one branch

    def __post_init__(self):
        self.times.setflags(write=False)
        self.eigenvalues.setflags(write=False)

    def nonreal_windows(self, tol=None):
        """Maximal time intervals where any eigenvalue has |Im| above tol.

        Returns a list of (t_start, t_end) pairs; window edges are grid
        points, so resolution is set by the sampling.
        """
        t = DEFAULT_NUMERIC.nonreal_tol if tol is None else tol
        mask = np.max(np.abs(self.eigenvalues.imag), axis=1) > t
        windows = []
        start = None
        for i, m in enumerate(mask):
            if m and start is None:
                start = self.times[i]
            elif not m and start is not None:
                windows.append((start, self.times[i - 1]))
                start = None
        if start is not None:
            windows.append((start, self.times[-1]))
        return windows


def eigenvalue_trace(model: NmlzModel, t_min, t_max, samples) -> EigenvalueTrace:
    """Instantaneous spectrum of H(t) on a uniform grid, continuity-ordered.

    Branches are matched between consecutive samples by greedy minimal
    displacement from the linear continuation of each branch (plain
    previous-value matching would swap branches right after an exact
    crossing); ties keep the previous ordering.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    times = np.linspace(t_min, t_max, samples)
    n = model.dim
    out = np.empty((samples, n), dtype=complex)
    for i, t in enumerate(times):
        ev = eigen.eigenvalues(hamiltonian_at(model, t))
        if i == 0:
            out[i] = np.sort_complex(ev)
        else:
            predicted = out[i - 1] if i == 1 else 2.0 * out[i - 1] - out[i - 2]
            out[i] = _match_to_previous(predicted, ev)
    return EigenvalueTrace(times=times, eigenvalues=out)


def _match_to_previous(prev, new):
    """Greedy assignment of new eigenvalues to continued branches."""
    n = len(prev)
    dist = np.abs(prev[:, None] - new[None, :])
    order = np.dstack(np.unravel_index(np.argsort(dist, axis=None), dist.shape))[0]
    taken_prev = np.zeros(n, dtype=bool)
    taken_new = np.zeros(n, dtype=bool)
    result = np.empty(n, dtype=complex)
    for i, j in order:
        if taken_prev[i] or taken_new[j]:
            continue
        result[i] = new[j]
        taken_prev[i] = taken_new[j] = True
        if taken_prev.all():
            break
    return result
