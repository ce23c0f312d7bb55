"""Closed-form transition probabilities for the solvable models.

Every crossing between levels i and j carries the exponent

    x_ij = 2 pi |G_ij|² / |b_i - b_j|

(relative slope in the denominator; the convention is pinned against the
numerical propagator).  Anti-Hermitian couplings give the growth factors
p~ = exp(x), q~ = exp(x) - 1; Hermitian couplings the classic p = exp(-x),
q = 1 - exp(-x).  Tables for the solvable four- and six-level models are
assembled from these pair factors with the same functional form in both
flavors.
"""

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .errors import (DegenerateSlopePair, Overflow, OrderViolation,
                     SlopeNotExtremal, ZeroColumn)
from .model import ANTIHERMITIAN, HERMITIAN, NmlzModel, validate_model

_LOG_HUGE = 700.0


@dataclass(frozen=True)
class LzPairParams:
    """Single-crossing factors for one coupled level pair."""

    exponent: float      # 2 pi |G_ij|^2 / |b_i - b_j|

    @classmethod
    def from_coupling(cls, g_ij, b_i, b_j) -> "LzPairParams":
        gap = abs(b_i - b_j)
        if gap == 0.0:
            raise DegenerateSlopePair(
                "equal slopes leave the crossing exponent undefined")
        return cls(exponent=2.0 * math.pi * abs(g_ij) ** 2 / gap)

    @property
    def p_tilde(self) -> float:
        return math.exp(self.exponent)

    @property
    def q_tilde(self) -> float:
        return math.expm1(self.exponent)

    @property
    def p(self) -> float:
        return math.exp(-self.exponent)

    @property
    def q(self) -> float:
        return -math.expm1(-self.exponent)


class TwoLevelNlz:
    """Asymptotic two-level probabilities with log-space companions."""

    __slots__ = ("p11", "p21", "log_p11", "log_p21")

    def __init__(self, p11, p21, log_p11, log_p21):
        self.p11, self.p21 = p11, p21
        self.log_p11, self.log_p21 = log_p11, log_p21

    def __iter__(self):
        return iter((self.p11, self.p21))

    def __repr__(self):
        return f"TwoLevelNlz(p11={self.p11!r}, p21={self.p21!r})"


def nlz_two_level(g, v) -> TwoLevelNlz:
    """Survival/transition growth factors for one anti-Hermitian crossing.

    ``v`` is the relative slope of the two diabatic levels.  For exponents
    past the double range the linear fields are inf and the log fields stay
    exact.
    """
    if v <= 0:
        raise ValueError("relative slope v must be positive")
    x = 2.0 * math.pi * abs(g) ** 2 / v
    log_p11 = x
    # log(e^x - 1) = x + log(1 - e^-x)
    log_p21 = x + math.log1p(-math.exp(-x)) if x > 0 else -math.inf
    if x > _LOG_HUGE:
        return TwoLevelNlz(math.inf, math.inf, log_p11, log_p21)
    return TwoLevelNlz(math.exp(x), math.expm1(x), log_p11, log_p21)


def lz_two_level_hermitian(g, v):
    """Standard Landau-Zener (P11, P21) for relative slope v."""
    if v <= 0:
        raise ValueError("relative slope v must be positive")
    x = 2.0 * math.pi * abs(g) ** 2 / v
    p11 = math.exp(-x)
    return p11, -math.expm1(-x)


def modified_be_diagonal(model: NmlzModel, n: int) -> float:
    """log |S_nn| for a level of strictly extremal slope.

    Eligible levels run strictly faster than every other level in one
    direction (strictly largest or strictly smallest b_n; in the symmetric
    two-level model both levels qualify).  Anti-Hermitian coupling gives
    +pi * sum_m |G_nm|²/|b_n - b_m|; the Hermitian flag flips the sign (the
    classic product of survival amplitudes).
    """
    b = model.slopes
    others = np.delete(b, n)
    if others.size and not (b[n] > np.max(others) or b[n] < np.min(others)):
        raise SlopeNotExtremal(
            f"slope b_{n} = {b[n]:g} is neither the strict maximum nor the "
            "strict minimum")
    total = 0.0
    for m in range(model.dim):
        if m == n or model.coupling[n, m] == 0.0:
            continue
        gap = abs(b[n] - b[m])
        if gap == 0.0:
            raise DegenerateSlopePair(f"levels {n} and {m} share a slope")
        total += abs(model.coupling[n, m]) ** 2 / gap
    sign = 1.0 if model.antihermitian else -1.0
    return sign * math.pi * total


# --- solvable four-level model (two crossing pairs) ---------------------------

@dataclass(frozen=True)
class SolvableN4Params:
    """Parameters of the two-pair four-level model.

    Levels run at (b1, -b1, b2, -b2) with statics (E1, E1, E2, E2); ``g``
    couples co-moving pairs, ``gamma`` counter-moving ones.  The closed-form
    table is exact for positive distinct slopes and phase-aligned couplings
    (relative phase of g and gamma equal mod pi); a stray relative phase
    opens path interference the table does not describe.
    """

    b1: float
    b2: float
    E1: float = 0.0
    E2: float = 0.0
    g: complex = 0.0
    gamma: complex = 0.0

    @property
    def beta1(self) -> float:
        return 0.5 * (self.b1 + self.b2)

    @property
    def beta2(self) -> float:
        return 0.5 * (self.b1 - self.b2)


def solvable_n4_model(params: SolvableN4Params) -> NmlzModel:
    """Four-level double-crossing model with anti-Hermitian couplings."""
    g, gamma = complex(params.g), complex(params.gamma)
    coupling = np.zeros((4, 4), dtype=complex)
    upper = {(0, 2): np.conj(g), (0, 3): -np.conj(gamma),
             (1, 2): np.conj(gamma), (1, 3): np.conj(g)}
    for (i, j), val in upper.items():
        coupling[i, j] = val
        coupling[j, i] = -np.conj(val)
    return validate_model(
        4, [params.b1, -params.b1, params.b2, -params.b2],
        [params.E1, params.E1, params.E2, params.E2], coupling, ANTIHERMITIAN)


def solvable_n4(params: SolvableN4Params) -> np.ndarray:
    """Closed-form unnormalized table of the four-level model.

    Built from the generic pair factors p~_g (relative slope |b1 - b2|) and
    p~_gamma (relative slope |b1 + b2|); the exponent convention was frozen
    once against the propagator.
    """
    pg = LzPairParams.from_coupling(params.g, params.b1, params.b2)
    pgam = LzPairParams.from_coupling(params.gamma, params.b1, -params.b2)
    a, c = pg.p_tilde, pg.q_tilde
    b, d = pgam.p_tilde, pgam.q_tilde
    return np.array([
        [a * b, 0.0, b * c, d],
        [0.0, a * b, d, b * c],
        [b * c, d, a * b, 0.0],
        [d, b * c, 0.0, a * b],
    ])


# --- solvable six-level model --------------------------------------------------

def solvable_n6_model(b1, b2, E, g, gamma) -> NmlzModel:
    """Six-level chain: four slope-±b1 levels split by ±E crossing a ∓b2 pair."""
    slopes = [b1, b1, -b1, -b1, -b2, b2]
    statics = [-E, E, -E, E, 0.0, 0.0]
    coupling = np.zeros((6, 6), dtype=complex)
    upper = {(0, 4): -gamma, (0, 5): g,
             (1, 4): gamma, (1, 5): g,
             (2, 4): g, (2, 5): gamma,
             (3, 4): g, (3, 5): -gamma}
    for (i, j), val in upper.items():
        coupling[i, j] = val
        coupling[j, i] = -np.conj(val)
    return validate_model(6, slopes, statics, coupling, ANTIHERMITIAN)


def solvable_n6(b1, b2, E, g, gamma) -> np.ndarray:
    """Closed-form unnormalized table of the six-level model for b2 > b1 > 0.

    ``E`` fixes the crossing times of the underlying model but drops out of
    the asymptotic table.  Factors: p1 from g across |b1 - b2|, p2 from
    gamma across b1 + b2.
    """
    if not b2 > b1 > 0:
        raise OrderViolation(f"table valid for b2 > b1 > 0, got b1={b1}, b2={b2}")
    del E  # crossing locations only; asymptotic probabilities are E-free
    p1 = LzPairParams.from_coupling(g, b1, b2).p_tilde
    p2 = LzPairParams.from_coupling(gamma, b1, -b2).p_tilde
    q1, q2 = p1 - 1.0, p2 - 1.0
    return np.array([
        [p1 * p2, q2 * q2, 0.0, p2 * q1 * q2, p1 * p2 * q2, p2 * q1],
        [(p2 * q1) ** 2, p1 * p2, p2 * q2 * q1, 0.0, q2, p2 * p2 * p1 * q1],
        [0.0, p2 * q2 * q1, p1 * p2, (p2 * q1) ** 2, p2 * p2 * p1 * q1, q2],
        [p2 * q2 * q1, 0.0, q2 * q2, p1 * p2, q1 * p2, p1 * p2 * q2],
        [q2, p1 * p2 * q2, p2 * q1, p2 * p2 * p1 * q1, (p1 * p2) ** 2, 0.0],
        [p2 * p2 * p1 * q1, p2 * q1, q2 * p2 * p1, q2, 0.0, (p1 * p2) ** 2],
    ])


def normalize(ptilde) -> tuple:
    """Column-stochastic table and the per-column norms N_i."""
    p = np.asarray(ptilde, dtype=float)
    if np.any(p < 0):
        raise ValueError("P-tilde entries must be nonnegative")
    norms = p.sum(axis=0)
    if np.any(norms <= 0):
        raise ZeroColumn("column with zero total weight")
    return p / norms[None, :], norms


# --- conservation-law discovery -------------------------------------------------

@dataclass(frozen=True)
class ConservationSignature:
    """Sign vector s with sum_m s_m P~_mn = 1 for one initial level n."""

    signs: np.ndarray
    residual: float

    def __post_init__(self):
        self.signs.setflags(write=False)


def conservation_signature(column, tol, initial=0) -> Optional[ConservationSignature]:
    """Exhaustive search for a ±1 signature conserving the column.

    The sign of the initial level is fixed to +1; all 2^(N-1) remaining
    assignments are scanned and the minimal-residual one is returned if it
    beats ``tol`` (ties broken by fewest -1 entries), else None.
    """
    p = np.asarray(column, dtype=float).reshape(-1)
    n = p.shape[0]
    if n > 16:
        raise ValueError("signature search limited to N <= 16")
    if not 0 <= initial < n:
        raise IndexError(f"initial level {initial} outside 0..{n - 1}")
    others = [m for m in range(n) if m != initial]
    best = None
    for assignment in product((1.0, -1.0), repeat=n - 1):
        signs = np.empty(n)
        signs[initial] = 1.0
        signs[others] = assignment
        residual = abs(float(signs @ p) - 1.0)
        n_minus = int(np.sum(signs < 0))
        key = (residual, n_minus)
        if best is None or key < best[0]:
            best = (key, signs)
    (residual, _), signs = best
    if residual < tol:
        return ConservationSignature(signs=signs, residual=residual)
    return None


def hermitian_counterpart(model: NmlzModel) -> NmlzModel:
    """Hermitian twin: same slopes, statics and |G|, flag flipped.

    The strict upper triangle of G is kept verbatim and the lower triangle
    regenerated as its conjugate transpose.
    """
    if not model.antihermitian:
        raise ValueError("model already carries the hermitian flag")
    n = model.dim
    g = np.zeros((n, n), dtype=complex)
    upper = np.triu_indices(n, k=1)
    g[upper] = model.coupling[upper]
    g = g + g.conj().T
    return validate_model(n, model.slopes, model.statics, g, HERMITIAN)


def log_table_n4(params: SolvableN4Params) -> np.ndarray:
    """log of :func:`solvable_n4`, safe for exponents past the double range."""
    xg = LzPairParams.from_coupling(params.g, params.b1, params.b2).exponent
    xgam = LzPairParams.from_coupling(params.gamma, params.b1, -params.b2).exponent
    lpg, lqg = xg, _log_expm1(xg)
    lpgam, lqgam = xgam, _log_expm1(xgam)
    neg = -math.inf
    return np.array([
        [lpg + lpgam, neg, lpgam + lqg, lqgam],
        [neg, lpg + lpgam, lqgam, lpgam + lqg],
        [lpgam + lqg, lqgam, lpg + lpgam, neg],
        [lqgam, lpgam + lqg, neg, lpg + lpgam],
    ])


def _log_expm1(x):
    if x <= 0:
        return -math.inf
    if x > 36:
        return x  # e^-x below double resolution
    return math.log(math.expm1(x))
