"""Telegraph formulas, window corrections, and the Markov-chain oracle."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from dipolejumps import (
    PeriodSequence, TelegraphModel, TransitionRates, censor_periods,
    count_double_jumps, estimate_statistics, ideal_statistics, infer_rates,
    simulate_telegraph, window_corrected_statistics,
)

# first-order rates at A3=1, Om3=0.5, Om2=0.01, Delta2=0, C3=0
REF_RATES = TransitionRates(p01=8.0e-4, p10=2.666666666666667e-4,
                              p12=4.0e-4, p21=5.333333333333333e-4)


def random_rates(rng):
    return TransitionRates(*np.exp(rng.uniform(np.log(1e-5), np.log(1e-2), 4)))


class TestIdealStatistics:
    def test_reference_point(self):
        st = ideal_statistics(REF_RATES, dt_dj=160.0)
        assert_allclose(st.t0, 1250.0, rtol=1e-12)
        assert_allclose(st.t1, 1500.0, rtol=1e-12)
        assert_allclose(st.t2, 1875.0, rtol=1e-12)
        assert_allclose(st.n0, 1.28e-4, rtol=1e-12)
        assert_allclose(st.n1, 3.20e-4, rtol=1e-12)
        assert_allclose(st.n2, 1.92e-4, rtol=1e-12)
        assert_allclose(st.n0 * st.t0 + st.n1 * st.t1 + st.n2 * st.t2, 1.0,
                        rtol=1e-14)
        # linearized rate 2 p01 p10 p12 p21 / S * dt = 1.0240e-7 * 160
        assert_allclose(st.n_dj_lin, 1.6384e-5, rtol=1e-4)
        assert st.n_dj < st.n_dj_lin  # exact window factor lies below

    def test_sum_rule_and_symmetry_scan(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            r = random_rates(rng)
            st = ideal_statistics(r, dt_dj=50.0)
            assert abs(st.n0 * st.t0 + st.n1 * st.t1 + st.n2 * st.t2 - 1.0) < 1e-12
            assert st.n_dj_up == st.n_dj_down
            assert_allclose(st.n0 / st.n2, r.p10 / r.p12, rtol=1e-12)

    def test_window_limits(self):
        st0 = ideal_statistics(REF_RATES, dt_dj=1e-9)
        assert st0.n_dj < 1e-12
        prev = 0.0
        for dt in (50, 150, 450, 1350, 1e5):
            cur = ideal_statistics(REF_RATES, dt_dj=dt).n_dj
            assert cur > prev
            prev = cur
        st = ideal_statistics(REF_RATES, dt_dj=1e7)
        sat = 2 * st.n2 * REF_RATES.p10 / (REF_RATES.p10 + REF_RATES.p12)
        assert_allclose(st.n_dj, sat, rtol=1e-9)

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError):
            ideal_statistics(TransitionRates(0.0, 1e-3, 1e-3, 1e-3), 160.0)


class TestWindowCorrections:
    def test_zero_cutoff_is_ideal(self):
        model = TelegraphModel(rates=REF_RATES, dt_dj=160.0, dt_w=1e-9,
                               cutoff_fraction=0.5)
        st = window_corrected_statistics(model)
        assert_allclose(st.t1_cor, st.t1, rtol=1e-10)
        assert_allclose(st.n2_cor, st.n2, rtol=1e-10)
        assert_allclose(st.n_dj_cor, st.n_dj, rtol=1e-10)

    def test_reference_window(self):
        # dt_w = 247, dtau = 164.67: T1 correction factor 1.96, ~1823
        model = TelegraphModel(rates=REF_RATES, dt_dj=300.0, dt_w=247.0)
        st = window_corrected_statistics(model)
        assert_allclose(st.t1_cor, 1822.75, atol=0.5)
        assert_allclose(st.t0_cor, 1250.0 + st.dtau * (1 + 2.667e-4 / 8e-4),
                        rtol=1e-3)
        # all three corrected durations sit 10-25% above ideal
        for cor, ideal in ((st.t0_cor, st.t0), (st.t1_cor, st.t1),
                           (st.t2_cor, st.t2)):
            assert 0.10 < cor / ideal - 1.0 < 0.25
        assert st.n2_cor == pytest.approx(st.n2 * np.exp(-REF_RATES.p21 * st.dtau))

    def test_cutoff_regime_warning(self):
        model = TelegraphModel(rates=REF_RATES, dt_dj=1500.0, dt_w=1400.0)
        with pytest.warns(UserWarning):
            st = window_corrected_statistics(model)
        assert st.notes

    def test_model_validation(self):
        with pytest.raises(ValueError):
            TelegraphModel(rates=REF_RATES, dt_dj=100.0, dt_w=114.0)
        with pytest.raises(ValueError):
            TelegraphModel(rates=REF_RATES, dt_dj=160.0, dt_w=114.0,
                           cutoff_fraction=0.9)


class TestSimulator:
    def test_never_reaches_two_without_p12(self):
        r = TransitionRates(p01=1e-3, p10=1e-3, p12=0.0, p21=1e-3)
        seq = simulate_telegraph(r, 2e5, seed=4)
        assert np.all(seq.levels != 2)

    def test_reproducible(self):
        a = simulate_telegraph(REF_RATES, 1e5, seed=9)
        b = simulate_telegraph(REF_RATES, 1e5, seed=9)
        assert np.array_equal(a.durations, b.durations)
        assert np.array_equal(a.levels, b.levels)

    def test_mean_durations_within_3_sigma(self):
        seq = simulate_telegraph(REF_RATES, 5e6, seed=21)
        est = estimate_statistics([seq], dt_dj=160.0)
        st = ideal_statistics(REF_RATES, dt_dj=160.0)
        for t_emp, t_err, t_th in ((est.t0, est.t0_err, st.t0),
                                   (est.t1, est.t1_err, st.t1),
                                   (est.t2, est.t2_err, st.t2)):
            assert abs(t_emp - t_th) < 3 * t_err

    def test_double_jump_balance(self):
        seq = simulate_telegraph(REF_RATES, 5e6, seed=2)
        up, down = count_double_jumps(seq, dt_dj=160.0)
        assert abs(up - down) < 3 * np.sqrt(up + down)


class TestDoubleJumpCounting:
    def test_short_intermediate_counts(self):
        seq = PeriodSequence(np.array([2, 1, 0]), np.array([0.0, 1000.0, 1050.0]),
                             np.array([1000.0, 50.0, 800.0]), 1850.0)
        assert count_double_jumps(seq, 160.0) == (0, 1)

    def test_long_intermediate_does_not(self):
        seq = PeriodSequence(np.array([2, 1, 0]), np.array([0.0, 1000.0, 1500.0]),
                             np.array([1000.0, 500.0, 800.0]), 2300.0)
        assert count_double_jumps(seq, 160.0) == (0, 0)

    def test_upward(self):
        seq = PeriodSequence(np.array([0, 1, 2, 1, 0]),
                             np.array([0.0, 5.0, 15.0, 40.0, 45.0]),
                             np.array([5.0, 10.0, 25.0, 5.0, 30.0]), 75.0)
        assert count_double_jumps(seq, 20.0) == (1, 1)

    def test_rates_match_formulas(self):
        seq = simulate_telegraph(REF_RATES, 1e7, seed=33)
        st = ideal_statistics(REF_RATES, dt_dj=160.0)
        up, down = count_double_jumps(seq.interior(), 160.0)
        expected = st.n_dj * seq.total_time
        assert abs(up + down - expected) < 3 * np.sqrt(expected)


class TestCensoring:
    def test_merge_example(self):
        seq = PeriodSequence(np.array([1, 0, 1, 2, 1]),
                             np.array([0.0, 100.0, 130.0, 400.0, 460.0]),
                             np.array([100.0, 30.0, 270.0, 60.0, 500.0]), 960.0)
        out = censor_periods(seq, dtau=40.0)
        # the 30-long level-0 period disappears and its neighbors merge
        assert list(out.levels) == [1, 2, 1]
        assert_allclose(out.durations, [370.0, 60.0, 500.0])

    def test_consistency_with_correction_formulas(self):
        # explicit delete-and-merge on simulated sequences reproduces the
        # corrected mean durations within 5% for dtau/T_i <= 0.15
        seq = simulate_telegraph(REF_RATES, 1.2e7, seed=8).interior()
        dtau = 164.7
        model = TelegraphModel(rates=REF_RATES, dt_dj=300.0, dt_w=247.0)
        st = window_corrected_statistics(model)
        cens = censor_periods(seq, dtau)
        for lv, t_cor in ((0, st.t0_cor), (1, st.t1_cor), (2, st.t2_cor)):
            t_emp = cens.durations[cens.levels == lv].mean()
            assert abs(t_emp - t_cor) / t_cor < 0.05

    def test_recorded_density_integral(self):
        # the recorded level-1 period density is the ideal exponential minus
        # the censored short periods plus the merged-pair convolution term;
        # its integral over (dtau, inf) matches the censored-MC count rate
        from scipy.integrate import quad

        p01, p10, p12, p21 = REF_RATES.as_tuple()
        st = ideal_statistics(REF_RATES, dt_dj=300.0)
        dtau = 164.7
        lam = {0: p01, 1: p10 + p12, 2: p21}
        n_short = {lv: n * (1 - np.exp(-lam[lv] * dtau))
                   for lv, n in ((0, st.n0), (2, st.n2))}
        l1 = lam[1]

        def nu_rec(t):
            return (st.n1 * l1 * np.exp(-l1 * t)
                    + (n_short[0] + n_short[2]) * (l1**2 * t - 2 * l1)
                    * np.exp(-l1 * t))

        predicted, _ = quad(nu_rec, dtau, np.inf)
        seq = simulate_telegraph(REF_RATES, 1.5e7, seed=61).interior()
        cens = censor_periods(seq, dtau)
        measured = np.sum(cens.levels == 1) / seq.durations.sum()
        assert abs(measured - predicted) / predicted < 0.05

    def test_infer_rates_closed_loop(self):
        seqs = [simulate_telegraph(REF_RATES, 4e6, seed=100 + k).interior()
                for k in range(3)]
        dtau = 76.0
        cens = [censor_periods(s, dtau) for s in seqs]
        est = estimate_statistics(cens, dt_dj=160.0)
        inferred = infer_rates(est, dtau)
        for got, want in zip(inferred.as_tuple(), REF_RATES.as_tuple()):
            assert abs(got - want) / want < 0.06


class TestEstimation:
    def test_needs_enough_periods(self):
        from dipolejumps.telegraph import EstimationError
        seq = simulate_telegraph(REF_RATES, 5e4, seed=1)
        with pytest.raises(EstimationError):
            estimate_statistics([seq], dt_dj=160.0)

    def test_estimates_against_known_rates(self):
        seqs = [simulate_telegraph(REF_RATES, 3e6, seed=50 + k)
                for k in range(4)]
        est = estimate_statistics(seqs, dt_dj=160.0)
        st = ideal_statistics(REF_RATES, dt_dj=160.0)
        assert abs(est.t0 - st.t0) < 3 * est.t0_err
        assert abs(est.t1 - st.t1) < 3 * est.t1_err
        assert abs(est.t2 - st.t2) < 3 * est.t2_err
        assert abs(est.n2 - st.n2) < 3 * est.n2_err
        assert abs(est.n_dj - st.n_dj) < 3 * est.n_dj_err
        assert abs(est.n_dj_up - est.n_dj_down) * est.observed_time < \
            3 * np.sqrt(est.counts["dj_up"] + est.counts["dj_down"])


class TestSerialization:
    def test_roundtrip(self):
        seq = simulate_telegraph(REF_RATES, 2e5, seed=77)
        back = PeriodSequence.from_text(seq.to_text(), total_time=seq.total_time)
        assert np.array_equal(back.levels, seq.levels)
        assert_allclose(back.starts, seq.starts, rtol=1e-11)
        assert_allclose(back.durations, seq.durations, rtol=1e-11)
