import numpy as np
import pytest

from nmlz import (ANTIHERMITIAN, HERMITIAN, DimensionMismatch,
                  HermiticityViolation, NonFiniteEntry, eigenvalue_trace,
                  hamiltonian_at, two_level_model, validate_model)
from nmlz.catalog import solvable_n4_model, SolvableN4Params, \
    solvable_n6_model


def eq3_model(g, v0):
    """Literal two-level matrix with slopes (-v0, +v0)."""
    coupling = np.array([[0, g], [-np.conj(g), 0]], dtype=complex)
    return validate_model(2, [-v0, v0], [0.0, 0.0], coupling, ANTIHERMITIAN)


class TestValidateModel:
    def test_two_level_antihermitian_valid(self):
        m = eq3_model(0.5, 1.0)
        assert m.dim == 2
        assert m.antihermitian
        assert m.coupling[0, 1] == 0.5
        assert m.coupling[1, 0] == -0.5

    def test_symmetric_coupling_rejected_for_antihermitian_flag(self):
        g = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
        with pytest.raises(HermiticityViolation):
            validate_model(2, [-1, 1], [0, 0], g, ANTIHERMITIAN)

    def test_double_crossing_model_valid(self):
        # degenerate-slope pairs with coupling are fine for propagation
        params = SolvableN4Params(b1=1.0, b2=-1.0, g=0.3, gamma=0.3)
        m = solvable_n4_model(params)
        assert m.coupling[0, 2] == pytest.approx(0.3)
        assert m.coupling[2, 0] == pytest.approx(-0.3)
        assert m.coupling[3, 0] == pytest.approx(0.3)   # -conj(-gamma*)
        assert m.coupling[2, 1] == pytest.approx(-0.3)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            validate_model(3, [1, -1], [0, 0, 0], np.zeros((3, 3)), ANTIHERMITIAN)
        with pytest.raises(DimensionMismatch):
            validate_model(2, [1, -1], [0, 0], np.zeros((3, 3)), ANTIHERMITIAN)

    def test_nonfinite_rejected(self):
        g = np.array([[0, np.nan], [-np.nan, 0]], dtype=complex)
        with pytest.raises(NonFiniteEntry):
            validate_model(2, [1, -1], [0, 0], g, ANTIHERMITIAN)

    def test_nonzero_diagonal_rejected(self):
        g = np.array([[0.5j, 0.2], [-0.2, 0]], dtype=complex)
        with pytest.raises(HermiticityViolation):
            validate_model(2, [1, -1], [0, 0], g, ANTIHERMITIAN)

    def test_symmetrization_is_exact(self, rng):
        n = 4
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        g = 0.5 * (g - g.conj().T)
        np.fill_diagonal(g, 0.0)
        g_noisy = g + 1e-11 * rng.normal(size=(n, n))
        np.fill_diagonal(g_noisy, 0.0)
        m = validate_model(n, rng.normal(size=n), rng.normal(size=n),
                           g_noisy, ANTIHERMITIAN)
        assert np.max(np.abs(m.coupling + m.coupling.conj().T)) == 0.0

    def test_hermitian_flag(self):
        m = two_level_model(0.5, 2.0, HERMITIAN)
        assert np.allclose(m.coupling, m.coupling.conj().T)


class TestHamiltonianAt:
    def test_coupling_only_at_zero(self):
        m = eq3_model(0.5, 1.0)
        h = hamiltonian_at(m, 0.0)
        assert np.array_equal(h, np.array([[0, 0.5], [-0.5, 0]], dtype=complex))

    def test_direct_substitution(self):
        m = eq3_model(0.5, 1.0)
        h = hamiltonian_at(m, 1.0)
        assert np.array_equal(h, np.array([[-1, 0.5], [-0.5, 1]], dtype=complex))

    def test_six_level_diagonal(self):
        m = solvable_n6_model(0.1, 0.2, 2.0, 0.2, 0.3)
        h = hamiltonian_at(m, 0.0)
        assert np.allclose(np.diag(h), [-2, 2, -2, 2, 0, 0])
        assert h[0, 4] == pytest.approx(-0.3)
        assert h[0, 5] == pytest.approx(0.2)
        assert h[4, 0] == pytest.approx(0.3)

    def test_trace_real_for_antihermitian(self, rng):
        params = SolvableN4Params(b1=1.2, b2=0.5, E1=0.3, E2=-0.2,
                                  g=0.3 + 0.2j, gamma=0.1 - 0.4j)
        m = solvable_n4_model(params)
        for t in rng.normal(size=8):
            assert abs(hamiltonian_at(m, t).trace().imag) < 1e-14


class TestEigenvalueTrace:
    def test_two_level_window(self):
        # nonreal eigenvalues exactly on |t| < |g|/v for slopes (-v, v)
        g, v0 = 0.5, 1.0
        trace = eigenvalue_trace(eq3_model(g, v0), -2.0, 2.0, 1601)
        windows = trace.nonreal_windows(tol=1e-9)
        assert len(windows) == 1
        lo, hi = windows[0]
        assert lo == pytest.approx(-g / v0, abs=5e-3)
        assert hi == pytest.approx(g / v0, abs=5e-3)

    def test_zero_coupling_gives_diabatic_lines(self):
        m = validate_model(3, [1.0, -0.5, 0.2], [0.3, 0.0, -0.1],
                           np.zeros((3, 3)), ANTIHERMITIAN)
        trace = eigenvalue_trace(m, -5.0, 5.0, 101)
        for k in range(3):
            # continuity ordering keeps each branch on one diabatic line
            diffs = np.diff(trace.eigenvalues[:, k])
            assert np.allclose(diffs, diffs[0])
        assert np.max(np.abs(trace.eigenvalues.imag)) == 0.0

    def test_six_level_has_four_nonreal_windows(self):
        m = solvable_n6_model(0.1, 0.2, 2.0, 0.2, 0.3)
        trace = eigenvalue_trace(m, -35.0, 35.0, 3001)
        assert len(trace.nonreal_windows(tol=1e-7)) == 4

    def test_antihermitian_pair_symmetry(self):
        # zero statics: spectrum comes in (lambda, -lambda) pairs
        trace = eigenvalue_trace(eq3_model(0.7, 1.0), -1.5, 1.5, 51)
        for row in trace.eigenvalues:
            assert abs(np.sum(row)) < 1e-10

    def test_closed_form_two_level(self):
        g, v0 = 0.5, 1.0
        m = eq3_model(g, v0)
        trace = eigenvalue_trace(m, 0.8, 2.0, 7)
        for t, row in zip(trace.times, trace.eigenvalues):
            exact = np.sqrt((v0 * t) ** 2 - g ** 2)
            assert sorted(row.real) == pytest.approx([-exact, exact], abs=1e-10)

    def test_hermitian_spectra_real(self, rng):
        m = two_level_model(0.8, 1.5, HERMITIAN)
        trace = eigenvalue_trace(m, -3, 3, 61)
        assert np.max(np.abs(trace.eigenvalues.imag)) < 1e-9
