import math

import numpy as np
import pytest

from nmlz import (ANTIHERMITIAN, HERMITIAN, DegenerateSlopePair,
                  OrderViolation, PropagationSettings, SlopeNotExtremal,
                  ZeroColumn, conservation_signature, hermitian_counterpart,
                  lz_two_level_hermitian, modified_be_diagonal, nlz_two_level,
                  normalize, solvable_n4, solvable_n4_model, solvable_n6,
                  solvable_n6_model, two_level_model, validate_model)
from nmlz.catalog import LzPairParams, SolvableN4Params, log_table_n4

from conftest import full_ptilde


class TestPairParams:
    def test_identities(self, rng):
        for _ in range(20):
            g = (rng.uniform(0.05, 0.8) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
            b1 = rng.uniform(0.5, 2.0)
            b2 = -rng.uniform(0.5, 2.0)
            pair = LzPairParams.from_coupling(g, b1, b2)
            assert pair.exponent <= 11.0   # keep the float identity exact
            assert pair.p_tilde - pair.q_tilde == pytest.approx(1.0)
            assert pair.p + pair.q == pytest.approx(1.0)
            assert pair.p_tilde * pair.p == pytest.approx(1.0)
            assert pair.p_tilde > 1.0

    def test_degenerate_slope_rejected(self):
        with pytest.raises(DegenerateSlopePair):
            LzPairParams.from_coupling(0.5, 1.0, 1.0)


class TestTwoLevel:
    def test_zero_coupling(self):
        res = nlz_two_level(0.0, 1.0)
        assert (res.p11, res.p21) == (1.0, 0.0)

    def test_reference_point(self):
        res = nlz_two_level(1.0, 2.0 * np.pi)
        assert res.p11 == pytest.approx(np.e)
        assert res.p21 == pytest.approx(np.e - 1.0)

    def test_conservation_identity(self, rng):
        for _ in range(25):
            v = rng.uniform(0.5, 10.0)
            g = rng.uniform(0.01, 1.0) * math.sqrt(v)  # exponent <= 2 pi
            res = nlz_two_level(g, v)
            assert res.p11 - res.p21 == pytest.approx(1.0)

    def test_log_space_overflow(self):
        res = nlz_two_level(20.0, 1.0)   # exponent ~ 2513
        assert math.isinf(res.p11) and math.isinf(res.p21)
        x = 2 * np.pi * 400.0
        assert res.log_p11 == pytest.approx(x)
        assert res.log_p21 == pytest.approx(x)

    def test_hermitian_counterpart_values(self):
        p11, p21 = lz_two_level_hermitian(1.0, 2.0 * np.pi)
        assert p11 == pytest.approx(np.exp(-1.0))
        assert p21 == pytest.approx(1.0 - np.exp(-1.0))
        assert p11 + p21 == pytest.approx(1.0)

    def test_invalid_slope(self):
        with pytest.raises(ValueError):
            nlz_two_level(1.0, 0.0)


class TestModifiedBeDiagonal:
    def test_zero_coupling(self):
        m = validate_model(3, [2.0, 0.5, -1.0], [0, 0, 0], np.zeros((3, 3)),
                           ANTIHERMITIAN)
        assert modified_be_diagonal(m, 0) == 0.0

    def test_two_level_consistency_with_closed_form(self):
        # slopes (-v/2, v/2): log|S11| = pi g^2 / v, so Ptilde11 = e^{2pi g^2/v}
        g, v = 0.8, 1.7
        m = two_level_model(g, v)
        log_s = modified_be_diagonal(m, 1)
        assert 2 * log_s == pytest.approx(nlz_two_level(g, v).log_p11)

    def test_sign_flips_for_hermitian_flag(self):
        g, v = 0.8, 1.7
        m = two_level_model(g, v, HERMITIAN)
        assert modified_be_diagonal(m, 1) == pytest.approx(
            -np.pi * g ** 2 / v)

    def test_six_level_diagonal_factorizes(self):
        b1, b2, g, gam = 0.3, 1.6, 0.3, 0.25
        m = solvable_n6_model(b1, b2, 2.2, g, gam)
        # fastest levels are 5, 6 (slopes -+ b2)
        log_s = modified_be_diagonal(m, 4)
        x1 = 2 * np.pi * g ** 2 / abs(b1 - b2)
        x2 = 2 * np.pi * gam ** 2 / (b1 + b2)
        assert 2 * log_s == pytest.approx(2 * (x1 + x2))

    def test_rejects_non_extremal_level(self):
        m = solvable_n6_model(0.3, 1.6, 2.2, 0.3, 0.25)
        with pytest.raises(SlopeNotExtremal):
            modified_be_diagonal(m, 0)

    def test_matches_propagator_on_random_models(self, rng):
        # the acceptance suite runs 20 draws; spot-check 3 here
        for _ in range(3):
            n = int(rng.integers(3, 7))
            model = random_extremal_model(rng, n)
            log_s = modified_be_diagonal(model, 0)
            p = full_ptilde(model, horizon=90.0)
            assert math.log(p[0, 0]) == pytest.approx(2 * log_s, rel=5e-3)


def random_extremal_model(rng, n, max_exponent=2.5):
    """Anti-Hermitian model whose level 0 has strictly maximal |slope|."""
    slopes = np.sort(rng.uniform(0.3, 1.5, size=n))[::-1]
    slopes[0] = slopes[1] + rng.uniform(0.5, 1.0)
    signs = rng.choice([-1.0, 1.0], size=n)
    slopes = slopes * signs
    slopes[0] = abs(slopes[0])
    statics = rng.uniform(-0.5, 0.5, size=n)
    g = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.uniform() < 0.75 and slopes[i] != slopes[j]:
                budget = max_exponent / n
                mag = math.sqrt(rng.uniform(0.1, 1.0) * budget
                                * abs(slopes[i] - slopes[j]) / (2 * np.pi))
                phase = rng.uniform(0, 2 * np.pi)
                g[i, j] = mag * np.exp(1j * phase)
                g[j, i] = -np.conj(g[i, j])
    return validate_model(n, slopes, statics, g, ANTIHERMITIAN)


class TestSolvableN4:
    def test_zero_couplings_give_identity(self):
        params = SolvableN4Params(b1=1.5, b2=0.7)
        assert np.array_equal(solvable_n4(params), np.eye(4))

    def test_structural_zeros(self):
        params = SolvableN4Params(b1=1.5, b2=0.7, g=0.4, gamma=0.3)
        table = solvable_n4(params)
        for i, j in ((0, 1), (1, 0), (2, 3), (3, 2)):
            assert table[i, j] == 0.0

    def test_column_conservation_identity(self, rng):
        for _ in range(10):
            params = SolvableN4Params(b1=rng.uniform(1.0, 2.0),
                                      b2=rng.uniform(0.2, 0.9),
                                      g=rng.uniform(0, 0.6),
                                      gamma=rng.uniform(0, 0.6))
            t = solvable_n4(params)
            assert t[0, 0] + t[1, 0] - t[2, 0] - t[3, 0] == pytest.approx(1.0)

    def test_degenerate_slopes_rejected(self):
        with pytest.raises(DegenerateSlopePair):
            solvable_n4(SolvableN4Params(b1=1.0, b2=-1.0, g=0.3, gamma=0.3))

    def test_matches_propagator(self):
        params = SolvableN4Params(b1=1.4, b2=0.6, E1=0.3, E2=-0.2,
                                  g=0.35, gamma=0.25)
        analytic = solvable_n4(params)
        numeric = full_ptilde(solvable_n4_model(params), horizon=80.0)
        nz = analytic > 0
        assert np.max(np.abs(numeric[nz] - analytic[nz]) / analytic[nz]) < 1e-3

    def test_log_table_matches_linear(self):
        params = SolvableN4Params(b1=1.5, b2=0.7, g=0.4, gamma=0.3)
        table = solvable_n4(params)
        log_table = log_table_n4(params)
        nz = table > 0
        assert np.allclose(np.exp(log_table[nz]), table[nz])
        assert np.all(np.isneginf(log_table[~nz]))


class TestSolvableN6:
    def test_zero_couplings_give_identity(self):
        assert np.array_equal(solvable_n6(0.3, 1.6, 2.2, 0.0, 0.0), np.eye(6))

    def test_order_violation(self):
        with pytest.raises(OrderViolation):
            solvable_n6(1.6, 0.3, 2.2, 0.3, 0.3)

    def test_structural_zeros(self):
        t = solvable_n6(0.3, 1.6, 2.2, 0.3, 0.3)
        for i, j in ((0, 2), (1, 3), (2, 0), (3, 1), (4, 5), (5, 4)):
            assert t[i, j] == 0.0

    def test_reference_pair_factors(self):
        # published parameter set: p1 = e^{2pi 0.09/1.3}, p2 = e^{2pi 0.09/1.9}
        t = solvable_n6(0.3, 1.6, 2.2, 0.3, 0.3)
        p1 = math.exp(2 * np.pi * 0.09 / 1.3)
        p2 = math.exp(2 * np.pi * 0.09 / 1.9)
        assert p1 == pytest.approx(1.5451, abs=2e-4)
        assert p2 == pytest.approx(1.3467, abs=2e-4)
        assert t[0, 0] == pytest.approx(p1 * p2)
        assert t[4, 4] == pytest.approx((p1 * p2) ** 2)

    def test_column_norm_degeneracies(self, rng):
        # columns 1-4 share one normalization, columns 5-6 another
        for _ in range(5):
            t = solvable_n6(rng.uniform(0.1, 0.5), rng.uniform(0.8, 2.0),
                            rng.uniform(0.5, 3.0), rng.uniform(0, 0.5),
                            rng.uniform(0, 0.5))
            _, norms = normalize(t)
            assert norms[:4] == pytest.approx(norms[0] * np.ones(4))
            assert norms[4:] == pytest.approx(norms[4] * np.ones(2))

    def test_normalized_column_matches_propagator(self):
        b1, b2, E, g, gam = 0.3, 1.6, 2.2, 0.3, 0.3
        analytic, _ = normalize(solvable_n6(b1, b2, E, g, gam))
        numeric = full_ptilde(solvable_n6_model(b1, b2, E, g, gam),
                              horizon=60.0)
        numeric_col = numeric[:, 0] / numeric[:, 0].sum()
        assert np.max(np.abs(numeric_col - analytic[:, 0])) < 1e-3


class TestNormalize:
    def test_identity(self):
        p, norms = normalize(np.eye(3))
        assert np.array_equal(p, np.eye(3))
        assert np.array_equal(norms, np.ones(3))

    def test_two_level_reference(self):
        p, norms = normalize(np.array([[np.e, np.e - 1], [np.e - 1, np.e]]))
        assert p[0, 0] == pytest.approx(0.6127, abs=1e-4)
        assert p[1, 0] == pytest.approx(0.3873, abs=1e-4)
        assert norms[0] == pytest.approx(2 * np.e - 1)

    def test_zero_column_rejected(self):
        with pytest.raises(ZeroColumn):
            normalize(np.array([[1.0, 0.0], [1.0, 0.0]]))

    def test_negative_entries_rejected(self):
        with pytest.raises(ValueError):
            normalize(np.array([[1.0, -0.1], [0.0, 1.0]]))


class TestConservationSignature:
    def test_two_level(self):
        sig = conservation_signature([np.e, np.e - 1.0], 1e-9, initial=0)
        assert sig is not None
        assert np.array_equal(sig.signs, [1.0, -1.0])
        assert sig.residual < 1e-12

    def test_four_level_first_column(self):
        params = SolvableN4Params(b1=1.5, b2=0.7, g=0.4, gamma=0.3)
        col = solvable_n4(params)[:, 0]
        sig = conservation_signature(col, 1e-9, initial=0)
        assert np.array_equal(sig.signs, [1.0, 1.0, -1.0, -1.0])

    def test_hs4_third_column_signs(self):
        from nmlz import Hs4Params, hs4_model
        p = full_ptilde(hs4_model(Hs4Params(b=2.0, E1=0.5, E2=0.7, g=0.5)),
                        horizon=60.0)
        sig = conservation_signature(p[:, 2], 1e-6, initial=2)
        assert np.array_equal(sig.signs, [-1.0, -1.0, 1.0, 1.0])

    def test_absence_reported_as_none(self):
        assert conservation_signature([0.3, 0.4], 1e-6, initial=0) is None

    def test_tie_broken_by_fewest_minus(self):
        # column (1, 0): +-anything on the zero entry; prefer no minus signs
        sig = conservation_signature([1.0, 0.0], 1e-9, initial=0)
        assert np.array_equal(sig.signs, [1.0, 1.0])


class TestHermitianCounterpart:
    def test_two_level_map(self):
        m = two_level_model(0.5 + 0.2j, 1.3)
        h = hermitian_counterpart(m)
        assert h.hermiticity == HERMITIAN
        assert h.coupling[0, 1] == m.coupling[0, 1]
        assert h.coupling[1, 0] == np.conj(m.coupling[0, 1])
        assert np.array_equal(h.slopes, m.slopes)

    def test_involution_preserves_magnitudes(self, rng):
        model = random_extremal_model(rng, 4)
        h = hermitian_counterpart(model)
        assert np.allclose(np.abs(h.coupling), np.abs(model.coupling))

    def test_counterpart_inverts_diagonal_growth(self):
        # BE level: Ptilde_nn(hermitian) = 1 / Ptilde_nn(antihermitian)
        params = SolvableN4Params(b1=1.4, b2=0.6, E1=0.3, E2=-0.2,
                                  g=0.35, gamma=0.25)
        m = solvable_n4_model(params)
        p_anti = full_ptilde(m, horizon=80.0)
        p_herm = full_ptilde(hermitian_counterpart(m), horizon=80.0)
        assert p_herm[0, 0] == pytest.approx(1.0 / p_anti[0, 0], rel=1e-3)

    def test_functional_form_correspondence(self):
        # substituting p~ -> p, q~ -> q in the four-level table must give the
        # Hermitian table; verified numerically against the propagator
        params = SolvableN4Params(b1=1.4, b2=0.6, E1=0.3, E2=-0.2,
                                  g=0.35, gamma=0.25)
        pg = LzPairParams.from_coupling(params.g, params.b1, params.b2)
        pgam = LzPairParams.from_coupling(params.gamma, params.b1, -params.b2)
        a, c = pg.p, pg.q
        b, d = pgam.p, pgam.q
        hermitian_table = np.array([
            [a * b, 0.0, b * c, d],
            [0.0, a * b, d, b * c],
            [b * c, d, a * b, 0.0],
            [d, b * c, 0.0, a * b],
        ])
        numeric = full_ptilde(hermitian_counterpart(solvable_n4_model(params)),
                              horizon=80.0)
        nz = hermitian_table > 0
        assert np.max(np.abs(numeric[nz] - hermitian_table[nz])
                      / hermitian_table[nz]) < 2e-3
