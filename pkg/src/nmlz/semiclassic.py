"""Semiclassical treatment of the four-level two-parallel-pair model.

The model (two static levels ±E1 crossed by two co-moving levels bt ± E2,
uniform anti-Hermitian coupling g) is not fully solvable: the transition
from level 3 to level 4 threads the symmetric mode "+" where interference
lives.  Its unnormalized probability factorizes into

    p34 = (e^{4 pi g²/b} - 1)²  x  P++

with the crossing factors exact and P++ given by a Dykhne-type contour
integral of the effective two-level gap.  Working variables: dimensionless
time t in units of E2/b (the crossings sit at t = ±1, which are poles of
the effective drive), and the regime parameter r = E1 E2 / g².

Conventions pinned against direct numerical integration of the effective
Hamiltonian: the branch points are taken in the upper half plane, the gap
branch starts positive real at t = 0 and is continued along the contour,
and the r > 1 interference exponents use the decaying orientation (the
growing orientation reproduces neither the r < 1 formula nor the numerics).
"""

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (CriticalRegime, NoRoot, PoleProximity, QuadratureFailure)
from .model import ANTIHERMITIAN, NmlzModel, validate_model

_CRITICAL_BAND = 1e-6


@dataclass(frozen=True)
class Hs4Params:
    """Two parallel static levels (±E1) crossing two driven ones (bt ± E2)."""

    b: float
    E1: float
    E2: float
    g: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("slope b must be positive")
        if not (self.E1 > 0 and self.E2 > 0):
            raise ValueError("E1 and E2 must be positive")
        for v in (self.b, self.E1, self.E2, self.g):
            if not math.isfinite(v):
                raise ValueError("parameters must be finite")

    @property
    def r(self) -> float:
        return self.E1 * self.E2 / self.g ** 2

    @property
    def crossing_times(self) -> tuple:
        return (-self.E2 / self.b, self.E2 / self.b)


def hs4_model(params: Hs4Params) -> NmlzModel:
    """The 4x4 model: diag(E1, -E1, bt+E2, bt-E2) with uniform coupling g."""
    g = params.g
    coupling = np.zeros((4, 4), dtype=complex)
    for i in (0, 1):
        for j in (2, 3):
            coupling[i, j] = g
            coupling[j, i] = -g
    return validate_model(
        4, [0.0, 0.0, params.b, params.b],
        [params.E1, -params.E1, params.E2, -params.E2],
        coupling, ANTIHERMITIAN)


def symmetric_frame_model(params: Hs4Params) -> NmlzModel:
    """Generator for the (+, -, 3, 4) modes, a± = (a1 ± a2)/sqrt(2).

    The static splitting E1 turns into an anti-Hermitian coupling between
    the two parallel modes while levels 3 and 4 couple only to "+" with
    strength sqrt(2) g; still a model of the linear-drive class, so it can
    be fed to the same propagator.
    """
    g = params.g
    root2g = math.sqrt(2.0) * g
    coupling = np.zeros((4, 4), dtype=complex)
    coupling[0, 1], coupling[1, 0] = params.E1, -params.E1
    for j in (2, 3):
        coupling[0, j] = root2g
        coupling[j, 0] = -root2g
    return validate_model(
        4, [0.0, 0.0, params.b, params.b],
        [0.0, 0.0, params.E2, -params.E2],
        coupling, ANTIHERMITIAN)


def to_symmetric_frame(amplitudes) -> np.ndarray:
    """(a1, a2, a3, a4) -> (a+, a-, a3, a4)."""
    a = np.asarray(amplitudes, dtype=complex)
    s = 1.0 / math.sqrt(2.0)
    return np.array([s * (a[0] + a[1]), s * (a[0] - a[1]), a[2], a[3]])


def from_symmetric_frame(amplitudes) -> np.ndarray:
    a = np.asarray(amplitudes, dtype=complex)
    s = 1.0 / math.sqrt(2.0)
    return np.array([s * (a[0] + a[1]), s * (a[0] - a[1]), a[2], a[3]])


def crossing_factor(params: Hs4Params) -> float:
    """Transition growth factor e^{4 pi g²/b} - 1 at either isolated crossing.

    Equals the two-level factor for coupling sqrt(2) g and relative slope b;
    independent of the deformation parameter tau.
    """
    return math.expm1(4.0 * math.pi * params.g ** 2 / params.b)


def log_crossing_factor(params: Hs4Params) -> float:
    x = 4.0 * math.pi * params.g ** 2 / params.b
    if x <= 0:
        return -math.inf
    return x + math.log1p(-math.exp(-x))


def effective_hamiltonian(params: Hs4Params, t) -> np.ndarray:
    """Two-level generator in the (+, -) subspace, dimensionless time.

    (1/b) [[4 g² t/(t²-1), E1 E2], [E1 E2, 0]]; accepts complex t for work
    near the branch points.  The poles t = ±1 are the physical crossings.
    """
    t = complex(t)
    denom = t * t - 1.0
    if abs(denom) < 1e-8:
        raise PoleProximity(f"t = {t} too close to a crossing pole")
    drive = 4.0 * params.g ** 2 * t / denom
    e12 = params.E1 * params.E2
    return np.array([[drive, e12], [e12, 0.0]], dtype=complex) / params.b


def branch_points(params: Hs4Params) -> tuple:
    """Upper-half-plane zeros of the effective gap, nearest the real axis.

    Solutions of 2 g² t = ±i E1 E2 (t² - 1):  t = i/r ± sqrt(1 - 1/r²).
    Purely imaginary for r < 1; equal imaginary parts 1/r for r > 1.
    Returned ordered by distance from the real axis.
    """
    if params.g == 0.0:
        raise NoRoot("zero coupling leaves the gap nodeless")
    r = params.r
    disc = cmath.sqrt(1.0 - 1.0 / r ** 2)
    roots = sorted((1j / r + disc, 1j / r - disc),
                   key=lambda z: (z.imag, z.real))
    if roots[0].imag <= 0 or roots[1].imag <= 0:  # pragma: no cover
        raise NoRoot("branch points did not land in the upper half plane")
    return roots[0], roots[1]


SUB_CRITICAL = "sub_critical"
SUPER_CRITICAL = "super_critical"
CRITICAL = "critical"


def classify_regime(r: float) -> str:
    if abs(r - 1.0) < _CRITICAL_BAND:
        return CRITICAL
    return SUB_CRITICAL if r < 1.0 else SUPER_CRITICAL


@dataclass(frozen=True)
class DykhneParams:
    """Effective two-level data driving the semiclassical probability."""

    r: float
    branch_points: tuple
    stokes_phase: float
    regime: str


def dykhne_params(params: Hs4Params, stokes_phase=0.0) -> DykhneParams:
    return DykhneParams(r=params.r, branch_points=branch_points(params),
                        stokes_phase=stokes_phase,
                        regime=classify_regime(params.r))


def _gap_squared(params: Hs4Params):
    e12 = params.E1 * params.E2
    g2 = params.g ** 2

    def f(t):
        drive = 4.0 * g2 * t / (t * t - 1.0)
        return drive * drive + 4.0 * e12 * e12

    return f, 2.0 * e12


def gap_integral(params: Hs4Params, waypoints, rel_tol=1e-11,
                 branch_endpoint=True) -> complex:
    """Contour integral of the effective gap along a polyline.

    The integrand is sqrt((4 g² t/(t²-1))² + 4 (E1 E2)²), the gap of the
    effective Hamiltonian scaled by b.  The square-root branch starts on
    the positive real branch at the first waypoint and is continued node by
    node; when ``branch_endpoint`` is set, the last segment is reparametrized
    quadratically so the sqrt-type zero at the endpoint stays spectrally
    smooth for Gauss-Legendre panels.

    Panel counts are doubled until the result is stable to ``rel_tol``;
    QuadratureFailure if 2^9 panels per segment are not enough.
    """
    pts = [complex(w) for w in waypoints]
    if len(pts) < 2:
        raise ValueError("need at least two waypoints")
    f, start_value = _gap_squared(params)
    previous = None
    for panels in (8, 16, 32, 64, 128, 256, 512):
        total = _gap_integral_pass(f, start_value, pts, panels, branch_endpoint)
        if previous is not None:
            if abs(total - previous) <= rel_tol * max(1.0, abs(total)):
                return total
        previous = total
    raise QuadratureFailure(
        f"contour quadrature not stable to {rel_tol:g} at 512 panels")


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gap_integral_pass(f, start_value, pts, panels, branch_endpoint):
    total = 0.0 + 0.0j
    prev = start_value
    n_seg = len(pts) - 1
    for s in range(n_seg):
        a, b = pts[s], pts[s + 1]
        quadratic = branch_endpoint and s == n_seg - 1
        for p in range(panels):
            u0, u1 = p / panels, (p + 1) / panels
            mid, half = 0.5 * (u0 + u1), 0.5 * (u1 - u0)
            for x, w in zip(_GL_NODES, _GL_WEIGHTS):
                u = mid + half * x
                if quadratic:
                    t = a + (b - a) * u * (2.0 - u)
                    dt = (b - a) * 2.0 * (1.0 - u)
                else:
                    t = a + (b - a) * u
                    dt = b - a
                val = np.sqrt(f(t))
                if abs(val - prev) > abs(val + prev):
                    val = -val
                prev = val
                total += w * half * val * dt
    return total


def dykhne_probability(params: Hs4Params, stokes_phase=0.0) -> float:
    """Survival probability P++ of the symmetric mode between the crossings.

    r < 1: standard Dykhne decay from the single branch point nearest the
    axis.  r > 1: two-branch interference with the caller-supplied Stokes
    phase attached to the positive-real-part branch point; absolute values
    there inherit the unknown phase, extrema positions barely move with it.
    """
    r = params.r
    regime = classify_regime(r)
    if regime == CRITICAL:
        raise CriticalRegime(
            f"r = {r:.8f} within {_CRITICAL_BAND:g} of 1; no closed form holds")
    t_near, t_far = branch_points(params)
    if regime == SUB_CRITICAL:
        integral = gap_integral(params, [0.0, t_near])
        return math.exp(-2.0 * integral.imag / params.b)
    t_pos = t_near if t_near.real > 0 else t_far
    t_neg = t_far if t_near.real > 0 else t_near
    i_pos = gap_integral(params, [0.0, t_pos])
    i_neg = gap_integral(params, [0.0, t_neg])
    amp = (cmath.exp(1j * i_pos / params.b + 1j * stokes_phase)
           + cmath.exp(1j * i_neg / params.b))
    return abs(amp) ** 2


def p34_composed(params: Hs4Params, stokes_phase=0.0) -> float:
    """Unnormalized 3 -> 4 probability: crossing in, mode survival, crossing out."""
    factor = crossing_factor(params)
    return factor * factor * dykhne_probability(params, stokes_phase)


def log_p34_composed(params: Hs4Params, stokes_phase=0.0) -> float:
    """log of :func:`p34_composed`; exact when the crossing factors overflow."""
    p_pp = dykhne_probability(params, stokes_phase)
    if p_pp == 0.0:
        return -math.inf
    return 2.0 * log_crossing_factor(params) + math.log(p_pp)


def hs4_sweep(params_grid, stokes_phase=0.0):
    """Semiclassical log p34 over an iterable of Hs4Params."""
    out = []
    for p in params_grid:
        try:
            out.append(log_p34_composed(p, stokes_phase))
        except CriticalRegime:
            out.append(math.nan)
            warnings.warn(f"skipped critical point r = {p.r:.6f}")
    return np.array(out)
