import numpy as np
import pytest

from nmlz import DimensionMismatch
from nmlz.eigen import eigenvalues


def char_poly_roots(a):
    """Independent oracle: characteristic polynomial via Faddeev-LeVerrier,
    roots from numpy's companion-matrix solver."""
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        m = a @ m
        c = -m.trace() / k
        coeffs[k] = c
        m += c * np.eye(n)
    return np.roots(coeffs)


def sorted_close(got, want, tol):
    got = np.sort_complex(np.asarray(got))
    want = np.sort_complex(np.asarray(want))
    scale = max(np.max(np.abs(want)), 1.0)
    return np.max(np.abs(got - want)) / scale < tol


@pytest.mark.parametrize("n", [2, 3, 4, 6, 8, 12, 16])
def test_random_matrices_match_companion_oracle(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert sorted_close(eigenvalues(a), char_poly_roots(a), 1e-8)


def test_two_level_closed_form_real_regime():
    # (vt)^2 > g^2: eigenvalues +-sqrt((vt)^2 - g^2), both real
    v, g, t = 1.0, 0.5, 2.0
    h = np.array([[-v * t, g], [-g, v * t]], dtype=complex)
    ev = np.sort_complex(eigenvalues(h))
    exact = np.sqrt((v * t) ** 2 - g ** 2)
    assert ev[0] == pytest.approx(-exact, abs=1e-12)
    assert ev[1] == pytest.approx(exact, abs=1e-12)


def test_two_level_imaginary_at_crossing():
    g = 0.5
    h = np.array([[0, g], [-g, 0]], dtype=complex)
    ev = sorted(eigenvalues(h), key=lambda z: z.imag)
    assert ev[0] == pytest.approx(-1j * g, abs=1e-12)
    assert ev[1] == pytest.approx(1j * g, abs=1e-12)


def test_eigenpair_residual_via_smallest_singular_value(rng):
    # ||Hv - lambda v|| / ||H|| = sigma_min(H - lambda I) / ||H|| <= 1e-10
    for n in (3, 5, 9):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        norm = np.linalg.norm(a, 2)
        for lam in eigenvalues(a):
            sigma_min = np.linalg.svd(a - lam * np.eye(n), compute_uv=False)[-1]
            assert sigma_min / norm < 1e-10


def test_defective_jordan_block():
    a = np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]],
                 dtype=complex)
    ev = eigenvalues(a)
    # defective eigenvalues are only accurate to eps^(1/3)
    assert np.max(np.abs(ev - 2.0)) < 1e-4


def test_diagonal_and_upper_triangular(rng):
    d = rng.normal(size=6) + 1j * rng.normal(size=6)
    a = np.diag(d)
    assert sorted_close(eigenvalues(a), d, 1e-14)
    a[np.triu_indices(6, k=1)] = rng.normal(size=15)
    assert sorted_close(eigenvalues(a), d, 1e-12)


def test_hermitian_matrix_real_spectrum(rng):
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    a = 0.5 * (a + a.conj().T)
    ev = eigenvalues(a)
    assert np.max(np.abs(ev.imag)) < 1e-12
    assert sorted_close(ev, np.linalg.eigvalsh(a), 1e-12)


def test_dimension_limits():
    with pytest.raises(DimensionMismatch):
        eigenvalues(np.zeros((17, 17)))
    with pytest.raises(DimensionMismatch):
        eigenvalues(np.zeros((3, 4)))


def test_scale_invariance(rng):
    a = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
    for scale in (1e-8, 1e8):
        assert sorted_close(eigenvalues(scale * a),
                            scale * char_poly_roots(a), 1e-8)
