"""Dense complex eigensolver for small matrices.

Householder reduction to upper Hessenberg form followed by explicitly
shifted QR iteration (Wilkinson shift, Givens sweeps).  Written for N <= 16
where robustness and zero dependencies matter more than speed; the N = 2
spectrum is returned in closed form.
"""

import numpy as np

from .errors import DimensionMismatch, NoConvergence

MAX_DIM = 16
_DEFLATE = 1e-16


def eigenvalues(matrix, max_sweeps_factor=100) -> np.ndarray:
    """All eigenvalues of a square complex matrix, unordered.

    Raises NoConvergence if the QR iteration has not deflated every
    eigenvalue after ``max_sweeps_factor * N`` shifted sweeps.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_DIM:
        raise DimensionMismatch(f"dense solver limited to N <= {MAX_DIM}, got {n}")
    if n == 1:
        return a[0, 0:1].copy()
    if n == 2:
        return np.array(_eig22(a[0, 0], a[0, 1], a[1, 0], a[1, 1]))
    return _qr_eigvals(_hessenberg(a), max_sweeps_factor * n)


def _eig22(a, b, c, d):
    # closed form; sqrt branch is irrelevant since both roots are returned
    half_tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    return half_tr + disc, half_tr - disc


def _hessenberg(a):
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        v = x.copy()
        # reflect onto -e^{i arg(x_0)} * |x| e_1 to avoid cancellation
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v[0] += phase * norm_x
        norm_v = np.linalg.norm(v)
        if norm_v < 1e-300:
            continue
        v /= norm_v
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
    return h


def _qr_eigvals(h, sweep_cap):
    n = h.shape[0]
    values = []
    hi = n - 1
    sweeps = 0
    while hi >= 0:
        if hi == 0:
            values.append(h[0, 0])
            break
        it_since_deflate = 0
        while True:
            k = hi
            while k > 0 and abs(h[k, k - 1]) > _DEFLATE * (
                    abs(h[k - 1, k - 1]) + abs(h[k, k])):
                k -= 1
            if k == hi:
                values.append(h[hi, hi])
                hi -= 1
                break
            if k == hi - 1:
                l1, l2 = _eig22(h[hi - 1, hi - 1], h[hi - 1, hi],
                                h[hi, hi - 1], h[hi, hi])
                values.extend([l1, l2])
                hi -= 2
                break
            sweeps += 1
            if sweeps > sweep_cap:
                raise NoConvergence(
                    f"QR iteration exceeded {sweep_cap} sweeps")
            l1, l2 = _eig22(h[hi - 1, hi - 1], h[hi - 1, hi],
                            h[hi, hi - 1], h[hi, hi])
            mu = l1 if abs(l1 - h[hi, hi]) < abs(l2 - h[hi, hi]) else l2
            it_since_deflate += 1
            if it_since_deflate % 12 == 0:
                # stagnation: perturb with an ad-hoc exceptional shift
                mu = h[hi, hi] + abs(h[hi, hi - 1])
            _shifted_qr_sweep(h, k, hi, mu)
    return np.array(values)


def _shifted_qr_sweep(h, lo, hi, mu):
    """One explicit QR step H <- RQ + mu I on the active block."""
    m = hi - lo + 1
    blk = h[lo:hi + 1, lo:hi + 1] - mu * np.eye(m)
    rotations = []
    for i in range(m - 1):
        a, b = blk[i, i], blk[i + 1, i]
        r = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if r < 1e-300:
            u = np.eye(2, dtype=complex)
        else:
            u = np.array([[a.conjugate() / r, b.conjugate() / r],
                          [-b / r, a / r]])
        blk[i:i + 2, i:] = u @ blk[i:i + 2, i:]
        rotations.append(u)
    for i, u in enumerate(rotations):
        blk[:i + 2, i:i + 2] = blk[:i + 2, i:i + 2] @ u.conj().T
    h[lo:hi + 1, lo:hi + 1] = blk + mu * np.eye(m)
