"""Adaptive Dormand-Prince 5(4) integration.

Two entry points share the same tableau and PI step controller:

* a numba-compiled kernel specialized to the interaction-picture equation
      i dc_m/dt = sum_{k != m} G_mk exp(i(theta_m - theta_k)) c_k,
  theta_m(t) = b_m t²/2 + E_m t, which carries all production propagation;
* :func:`integrate_adaptive`, a plain-numpy integrator for an arbitrary
  right-hand side, used for partner-generator segments and validation runs.

Both rescale the state when its magnitude passes exp(renorm_threshold) and
accumulate the discarded factor as a running log offset, so exponentially
growing amplitudes never overflow.
"""

import numpy as np
from numba import njit

from .errors import StepLimitExceeded, StepUnderflow

# Dormand-Prince 5(4) extended tableau; row 6 doubles as the 5th-order
# weights (FSAL: stage 7 of an accepted step is stage 1 of the next).
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = np.zeros((7, 6))
DP_A[1, :1] = (1 / 5,)
DP_A[2, :2] = (3 / 40, 9 / 40)
DP_A[3, :3] = (44 / 45, -56 / 15, 32 / 9)
DP_A[4, :4] = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
DP_A[5, :5] = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
DP_A[6, :6] = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# difference between the 5th- and embedded 4th-order weights
DP_E = np.array([35 / 384 - 5179 / 57600, 0.0, 500 / 1113 - 7571 / 16695,
                 125 / 192 - 393 / 640, -2187 / 6784 + 92097 / 339200,
                 11 / 84 - 187 / 2100, -1 / 40])

STATUS_OK = 0
STATUS_STEP_LIMIT = 1
STATUS_UNDERFLOW = 2

_MIN_STEP_FRACTION = 1e-14
_FAC_MIN, _FAC_MAX, _SAFETY = 0.2, 5.0, 0.9
# PI controller exponents for an order-5 pair
_PI_ALPHA, _PI_BETA = 0.7 / 5.0, 0.4 / 5.0


@njit(cache=True, nogil=True)
def _ip_rhs(t, c, slopes, statics, gmat, out):
    n = c.shape[0]
    for m in range(n):
        acc = 0.0 + 0.0j
        th_m = (0.5 * slopes[m] * t + statics[m]) * t
        for k in range(n):
            if k == m or gmat[m, k] == 0.0:
                continue
            th_k = (0.5 * slopes[k] * t + statics[k]) * t
            acc += gmat[m, k] * np.exp(1j * (th_m - th_k)) * c[k]
        out[m] = -1j * acc


@njit(cache=True, nogil=True)
def advance_interaction_picture(slopes, statics, gmat, c, t0, t1, rel_tol,
                                abs_tol, max_steps, renorm_threshold):
    """Integrate the interaction-picture amplitudes from t0 to t1.

    Returns (c, log_offset, status, n_steps); the physical amplitudes are
    c * exp(log_offset) up to the diabatic phases.
    """
    n = c.shape[0]
    k = np.zeros((7, n), dtype=np.complex128)
    y = c.copy()
    ytmp = np.zeros(n, dtype=np.complex128)
    span = abs(t1 - t0)
    if span == 0.0:
        return y, 0.0, STATUS_OK, 0
    direction = 1.0 if t1 >= t0 else -1.0
    h = min(1e-2, span)
    log_offset = 0.0
    err_prev = 1.0
    n_steps = 0
    renorm_mag = np.exp(renorm_threshold)
    t = t0
    _ip_rhs(t, y, slopes, statics, gmat, k[0])
    while (t1 - t) * direction > 0.0:
        if n_steps >= max_steps:
            return y, log_offset, STATUS_STEP_LIMIT, n_steps
        if h < _MIN_STEP_FRACTION * span:
            return y, log_offset, STATUS_UNDERFLOW, n_steps
        if (t + direction * h - t1) * direction > 0.0:
            h = abs(t1 - t)
        hd = direction * h
        for i in range(1, 7):
            for m in range(n):
                acc = 0.0 + 0.0j
                for j in range(i):
                    acc += DP_A[i, j] * k[j, m]
                ytmp[m] = y[m] + hd * acc
            _ip_rhs(t + DP_C[i] * hd, ytmp, slopes, statics, gmat, k[i])
        # ytmp now holds the 5th-order solution (row 6 of A = b5)
        err = 0.0
        for m in range(n):
            e = 0.0 + 0.0j
            for i in range(7):
                e += DP_E[i] * k[i, m]
            mag = abs(y[m])
            mag_new = abs(ytmp[m])
            scale = abs_tol + rel_tol * (mag if mag > mag_new else mag_new)
            q = abs(hd * e) / scale
            err += q * q
        err = np.sqrt(err / n)
        n_steps += 1
        if err <= 1.0:
            t += hd
            for m in range(n):
                y[m] = ytmp[m]
                k[0, m] = k[6, m]
            if err == 0.0:
                fac = _FAC_MAX
            else:
                fac = _SAFETY * err ** (-_PI_ALPHA) * err_prev ** _PI_BETA
                if fac > _FAC_MAX:
                    fac = _FAC_MAX
                elif fac < _FAC_MIN:
                    fac = _FAC_MIN
            err_prev = err
            h *= fac
            mx = 0.0
            for m in range(n):
                a = abs(y[m])
                if a > mx:
                    mx = a
            if mx > renorm_mag:
                log_offset += np.log(mx)
                for m in range(n):
                    y[m] /= mx
                    k[0, m] /= mx
        else:
            fac = _SAFETY * err ** (-1.0 / 5.0)
            if fac < _FAC_MIN:
                fac = _FAC_MIN
            h *= fac
    return y, log_offset, STATUS_OK, n_steps


def raise_for_status(status, n_steps, span):
    if status == STATUS_STEP_LIMIT:
        raise StepLimitExceeded(f"step cap reached after {n_steps} steps")
    if status == STATUS_UNDERFLOW:
        raise StepUnderflow(
            f"required step below {_MIN_STEP_FRACTION:g} * span ({span:g}); "
            "reduce tolerances or coupling")


def integrate_adaptive(f, t0, t1, y0, rel_tol=1e-10, abs_tol=1e-10,
                       max_steps=2_000_000, renorm_threshold=None):
    """Generic adaptive DP5(4) for dy/ds = f(s, y) with complex y.

    Returns (y, log_offset).  If ``renorm_threshold`` is None the state is
    never rescaled and the offset is 0.
    """
    y = np.asarray(y0, dtype=complex).copy()
    span = abs(t1 - t0)
    if span == 0.0:
        return y, 0.0
    direction = 1.0 if t1 >= t0 else -1.0
    h = min(1e-2, span)
    log_offset = 0.0
    err_prev = 1.0
    n_steps = 0
    renorm_mag = np.exp(renorm_threshold) if renorm_threshold is not None else None
    t = t0
    k = np.empty((7,) + y.shape, dtype=complex)
    k[0] = f(t, y)
    while (t1 - t) * direction > 0.0:
        if n_steps >= max_steps:
            raise StepLimitExceeded(f"step cap reached after {n_steps} steps")
        if h < _MIN_STEP_FRACTION * span:
            raise StepUnderflow("required step underflowed; reduce tolerances")
        if (t + direction * h - t1) * direction > 0.0:
            h = abs(t1 - t)
        hd = direction * h
        for i in range(1, 7):
            yi = y + hd * np.tensordot(DP_A[i, :i], k[:i], axes=1)
            k[i] = f(t + DP_C[i] * hd, yi)
        y_new = yi  # row 6 of A = 5th-order weights
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_vec = hd * np.tensordot(DP_E, k, axes=1)
        err = np.sqrt(np.mean(np.abs(err_vec / scale) ** 2))
        n_steps += 1
        if err <= 1.0:
            t += hd
            y = y_new
            k[0] = k[6]
            fac = _FAC_MAX if err == 0.0 else min(
                _FAC_MAX, max(_FAC_MIN, _SAFETY * err ** (-_PI_ALPHA)
                              * err_prev ** _PI_BETA))
            err_prev = err
            h *= fac
            if renorm_mag is not None:
                mx = np.max(np.abs(y))
                if mx > renorm_mag:
                    log_offset += np.log(mx)
                    y /= mx
                    k[0] /= mx
        else:
            h *= max(_FAC_MIN, _SAFETY * err ** (-0.2))
    return y, log_offset
