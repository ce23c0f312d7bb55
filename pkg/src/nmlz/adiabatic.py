"""Large-time adiabatic machinery behind the diagonal closed form.

Far from every crossing the instantaneous eigenvalue of level n expands as

    eps_n(t) = b_n t + E_n + c_n / t + O(t^-2),
    c_n = sigma * sum_m |G_nm|² / (b_n - b_m),

with sigma = -1 for anti-Hermitian couplings (G_nm G_mn = -|G_nm|²) and +1
for Hermitian ones.  Accumulating -i * integral(eps_n) along a large
半circle t = R e^{i phi} kills the polynomial terms in modulus and leaves
pi * |c_n| from the logarithm, which is exactly the diagonal amplitude
log |S_nn| of the extremal-slope level with the sign set by the flag.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import TooCloseToCrossing
from .model import NmlzModel, hamiltonian_at
from . import eigen

UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class AdiabaticExpansion:
    """First-order large-time expansion data for one level."""

    level: int
    slope: float           # b_n, coefficient of t
    leading: float         # E_n, the constant term
    correction_coeff: float  # signed coefficient of 1/t

    def value(self, t) -> complex:
        return self.slope * t + self.leading + self.correction_coeff / t


def expansion(model: NmlzModel, n: int) -> AdiabaticExpansion:
    sigma = -1.0 if model.antihermitian else 1.0
    coeff = 0.0
    for m in range(model.dim):
        if m == n or model.coupling[n, m] == 0.0:
            continue
        db = model.slopes[n] - model.slopes[m]
        if db == 0.0:
            raise TooCloseToCrossing(
                f"levels {n} and {m} share a slope; no large-time separation")
        coeff += abs(model.coupling[n, m]) ** 2 / db
    return AdiabaticExpansion(level=n, slope=float(model.slopes[n]),
                              leading=float(model.statics[n]),
                              correction_coeff=sigma * coeff)


def _check_far(model, n, t):
    limit = 10.0 * float(np.max(np.abs(model.coupling), initial=0.0))
    for m in range(model.dim):
        if m == n or model.coupling[n, m] == 0.0:
            continue
        gap = abs(model.slopes[n] - model.slopes[m]) * abs(t)
        if gap <= limit:
            raise TooCloseToCrossing(
                f"|db|*|t| = {gap:.3g} <= 10*max|G| = {limit:.3g} "
                f"for pair ({n},{m})")


def adiabatic_eigenvalue(model: NmlzModel, n: int, t) -> complex:
    """eps_n(t) from the first-order expansion; t may be complex.

    Valid only when |db|*|t| > 10 max|G| for every coupled pair of n.
    """
    _check_far(model, n, t)
    return expansion(model, n).value(t)


def adiabatic_phase_integral(model: NmlzModel, n: int, t_i, t_f,
                             arc=None) -> complex:
    """-i * integral of eps_n from t_i to t_f in closed form.

    With ``arc`` in {"upper", "lower"} the endpoints must share |t| and the
    logarithm is continued along that semicircular arc; otherwise the
    straight principal branch is used.  The real part of the result is the
    log amplitude ratio of the adiabatic solution.
    """
    _check_far(model, n, t_i)
    _check_far(model, n, t_f)
    exp_n = expansion(model, n)
    t_i, t_f = complex(t_i), complex(t_f)
    if arc is None:
        log_ratio = cmath.log(t_f / t_i)
    else:
        r_i, r_f = abs(t_i), abs(t_f)
        if abs(r_i - r_f) > 1e-9 * max(r_i, r_f):
            raise ValueError("arc continuation requires |t_i| = |t_f|")
        phi_i, phi_f = cmath.phase(t_i), cmath.phase(t_f)
        if arc == UPPER:
            if phi_i < 0:
                phi_i += 2.0 * math.pi
            if phi_f < 0:
                phi_f += 2.0 * math.pi
        elif arc != LOWER:
            raise ValueError(f"arc must be 'upper' or 'lower', got {arc!r}")
        log_ratio = math.log(r_f / r_i) + 1j * (phi_f - phi_i)
    quad = 0.5 * exp_n.slope * (t_f * t_f - t_i * t_i)
    lin = exp_n.leading * (t_f - t_i)
    return -1j * (quad + lin + exp_n.correction_coeff * log_ratio)


def _extremal_arc(model, n):
    """Half plane closing the contour for a strictly extremal level.

    The strictly fastest level takes the upper arc, the strictly slowest the
    lower one; either choice turns the 1/t logarithm into the growing
    diagonal amplitude while the quadratic and linear phases stay unimodular.
    """
    others = np.delete(model.slopes, n)
    if others.size == 0 or model.slopes[n] > np.max(others):
        return UPPER
    if model.slopes[n] < np.min(others):
        return LOWER
    from .errors import NmlzError
    from .catalog import modified_be_diagonal  # reuse its error message
    modified_be_diagonal(model, n)             # raises SlopeNotExtremal
    raise NmlzError("unreachable")             # pragma: no cover


def be_contour_log_ratio(model: NmlzModel, n: int, radius: float) -> float:
    """log |S_nn| via the analytic semicircle at |t| = radius."""
    arc = _extremal_arc(model, n)
    value = adiabatic_phase_integral(model, n, -radius, radius, arc=arc)
    return float(value.real)


_ARC_NODES, _ARC_WEIGHTS = np.polynomial.legendre.leggauss(24)


def contour_quadrature_log_ratio(model: NmlzModel, n: int, radius: float,
                                 panels: int = 24) -> float:
    """Validation mode: quadrature of the exact eigenvalue over the arc.

    Follows the instantaneous spectrum of H(t) along t = R e^{i phi},
    tracking the branch that continues level n from the diabatic end, and
    returns Re(-i * integral(eps_n dt)).  Agreement with the closed form to
    the next expansion order (~ 1/R²) validates the whole construction.
    """
    upper = _extremal_arc(model, n) == UPPER
    phi_start, phi_end = (math.pi, 0.0) if upper else (math.pi, 2.0 * math.pi)
    t_start = radius * cmath.exp(1j * phi_start)
    start_diabatic = model.slopes * t_start.real + model.statics
    ev = eigen.eigenvalues(hamiltonian_at(model, t_start))
    branch = ev[np.argmin(np.abs(ev - start_diabatic[n]))]
    total = 0.0 + 0.0j
    for p in range(panels):
        a = phi_start + (phi_end - phi_start) * p / panels
        b = phi_start + (phi_end - phi_start) * (p + 1) / panels
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        for x, w in zip(_ARC_NODES, _ARC_WEIGHTS):
            phi = mid + half * x
            t = radius * cmath.exp(1j * phi)
            dt = 1j * t  # dt/dphi
            ev = eigen.eigenvalues(hamiltonian_at(model, t))
            branch = ev[np.argmin(np.abs(ev - branch))]
            total += w * half * branch * dt
    return float((-1j * total).real)
