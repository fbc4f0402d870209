import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from betagompertz import core, inference as inf
from betagompertz.core import BGParams
from betagompertz.datasets import aarset
from betagompertz.errors import DomainError
from betagompertz.inference import Dataset, FitOptions
from betagompertz.submodels import BE, BG, E, G, GE, GG

# optimum of each family on the Aarset lifetimes, frozen from a converged run
AARSET_LOGLIK = {
    "E": -241.0895952616839, "GE": -239.99514796479818, "BE": -238.11997800585783,
    "G": -235.33082850436313, "GG": -222.24406712592338, "BG": -220.67184117256778,
}
AARSET_BG = {"alpha": 0.21575009431531417, "beta": 0.24667829931395685,
             "theta": 0.0003448578110073257, "gamma": 0.08817150221672489}


@pytest.fixture(scope="module")
def data():
    return Dataset.from_values(aarset())


@pytest.fixture(scope="module")
def rows(data):
    return inf.compare_families(data)


@pytest.fixture(scope="module")
def fits(rows):
    return {tag: r.fit for tag, r in rows.items()}


def _fd_grad(x, p, h=1e-6):
    z = np.array([p.alpha, p.beta, p.theta, p.gamma])
    out = np.zeros(4)
    for k in range(4):
        step = h * z[k]
        up, dn = z.copy(), z.copy()
        up[k] += step
        dn[k] -= step
        out[k] = (_ll(x, up) - _ll(x, dn)) / (2 * step)
    return out


def _ll(x, z):
    a, b, th, g = z
    return inf.log_likelihood(x, BGParams(th, g, a, b))


def _random_instance(rng):
    a, b = np.exp(rng.uniform(np.log(0.2), np.log(5), 2))
    th, g = np.exp(rng.uniform(np.log(0.05), np.log(3), 2))
    p = BGParams(th, g, a, b)
    return core.sample(int(rng.integers(10, 60)), p, rng), p


class TestDataset:
    def test_sorted_copy(self):
        d = Dataset.from_values([3.0, 1.0, 2.0])
        np.testing.assert_array_equal(d.values, [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(d.original, [3.0, 1.0, 2.0])
        assert len(d) == 3

    @pytest.mark.parametrize("bad", [[], [1.0, 0.0], [1.0, -2.0], [1.0, math.nan]])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            Dataset.from_values(bad)


class TestLikelihood:
    def test_matches_density_sum(self):
        x = np.array([0.3, 1.2, 2.7])
        p = BGParams(0.4, 0.9, 2.5, 0.3)
        assert inf.log_likelihood(x, p) == pytest.approx(np.sum(np.log(core.pdf(x, p))), rel=1e-14)

    def test_kernel_agrees_with_density(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            x, p = _random_instance(rng)
            ll, _ = inf._kernel(x, p.theta, p.gamma, p.alpha, p.beta)
            assert ll == pytest.approx(inf.log_likelihood(x, p), rel=1e-12)

    def test_zero_observation_limit(self):
        assert inf.log_likelihood([0.0, 1.0], BGParams(1, 1, 2, 1)) == -math.inf

    def test_score_needs_positive_data(self):
        with pytest.raises(DomainError):
            inf.score([0.0, 1.0], BGParams(1, 1, 1, 1))


class TestDerivatives:
    def test_score_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            x, p = _random_instance(rng)
            np.testing.assert_allclose(inf.score(x, p), _fd_grad(x, p), rtol=1e-5,
                                       atol=1e-5 * x.size)

    def test_information_matches_finite_differences(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            x, p = _random_instance(rng)
            z = np.array([p.alpha, p.beta, p.theta, p.gamma])
            fd = np.zeros((4, 4))
            for k in range(4):
                step = 1e-6 * z[k]
                up, dn = z.copy(), z.copy()
                up[k] += step
                dn[k] -= step
                su = inf.score(x, BGParams(up[2], up[3], up[0], up[1]))
                sd = inf.score(x, BGParams(dn[2], dn[3], dn[0], dn[1]))
                fd[:, k] = (su - sd) / (2 * step)
            info = inf.observed_information(x, p)
            np.testing.assert_allclose(info, info.T)
            scale = np.sqrt(np.outer(np.abs(np.diag(fd)), np.abs(np.diag(fd))))
            assert np.max(np.abs(info + fd) / scale) < 1e-4

    def test_small_gamma_taylor_branch(self):
        # gamma * x below the Taylor switch uses the series for expm1(u)/u
        x = np.array([0.01, 0.02, 0.05, 0.1])
        p = BGParams(2.0, 0.5, 1.3, 0.8)
        np.testing.assert_allclose(inf.score(x, p), _fd_grad(x, p), rtol=1e-6)


class TestFitting:
    def test_exponential_closed_form(self, data):
        f = inf.fit_mle(data, E)
        assert f.estimate["theta"] == pytest.approx(1 / data.values.mean(), rel=1e-12)

    def test_aarset_optima(self, fits):
        for tag, ll in AARSET_LOGLIK.items():
            assert fits[tag].converged
            assert fits[tag].loglik == pytest.approx(ll, abs=1e-6)
        for k, v in AARSET_BG.items():
            assert fits["BG"].estimate[k] == pytest.approx(v, rel=1e-4)

    def test_first_order_condition(self, data, fits):
        f = fits["BG"]
        g = inf.score(data, f.bg_params())
        assert np.max(np.abs(g * np.array(list(f.estimate.values())))) <= 1e-3 * data.n

    def test_nesting_order(self, fits):
        assert fits["G"].loglik <= fits["GG"].loglik <= fits["BG"].loglik
        assert fits["E"].loglik <= fits["GE"].loglik

    def test_permutation_invariant(self, data):
        rng = np.random.default_rng(2)
        a = inf.fit_mle(data.original, GG)
        b = inf.fit_mle(rng.permutation(data.original), GG)
        assert a.loglik == b.loglik

    def test_reproducible(self, data):
        a = inf.fit_mle(data, BE)
        b = inf.fit_mle(data, BE)
        assert a.estimate == b.estimate

    def test_recovers_simulated_parameters(self):
        p = BGParams(0.5, 0.5, 2.0, 1.0)
        x = core.sample(2000, p, 9)
        f = inf.fit_mle(x, BG)
        assert f.converged
        se = f.std_errors
        for k in ("alpha", "theta", "gamma"):
            assert abs(f.estimate[k] - getattr(p, k)) < 4 * se[k]

    def test_explicit_start(self):
        p = BGParams(0.5, 0.5, 2.0, 1.0)
        x = core.sample(200, p, 4)
        f = inf.fit_mle(x, BG, FitOptions(starts=({"alpha": 2.0, "beta": 1.0, "theta": 0.5,
                                                   "gamma": 0.5},)))
        assert f.n_restarts_used == 1
        assert f.loglik >= inf.fit_mle(x, BG).loglik - 1e-6

    def test_bg_params_on_limit_family(self, fits):
        with pytest.raises(DomainError):
            fits["BE"].bg_params()

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            inf.fit_mle([1.0, 2.0, 3.0], BG)
        with pytest.raises(DomainError):
            inf.fit_mle([2.0] * 6, BG)


class TestStdErrors:
    def test_inverse_information(self, fits):
        f = fits["BG"]
        cov = np.linalg.inv(f.observed_info)
        np.testing.assert_allclose(list(f.std_errors.values()), np.sqrt(np.diag(cov)), rtol=1e-10)

    def test_exponential(self, data, fits):
        # SE(theta) = theta / sqrt(n) for the exponential MLE
        th = fits["E"].estimate["theta"]
        assert fits["E"].std_errors["theta"] == pytest.approx(th / math.sqrt(data.n), rel=1e-10)

    def test_indefinite_gives_none(self, fits):
        f = fits["GG"]
        bad = inf.FitResult(f.family, f.estimate, f.loglik, -np.eye(3), None, True, 1, f.n)
        assert inf.std_errors(bad) is None


class TestGoodnessOfFit:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_ks_statistic_matches_scipy(self, seed):
        x = np.random.default_rng(seed).exponential(size=25)
        stat, pval = inf.ks_test(x, lambda t: -np.expm1(-t))
        ref = stats.kstest(x, "expon")
        assert stat == pytest.approx(ref.statistic, abs=1e-14)
        assert pval == pytest.approx(stats.kstwobign.sf(math.sqrt(25) * stat), rel=1e-9, abs=1e-15)

    def test_aarset_ks(self, data, fits):
        g = inf.gof_report(data, fits["BG"])
        # printed to four places, truncated
        assert g.ks_stat == pytest.approx(0.1322, abs=1e-4)
        assert g.ks_pvalue == pytest.approx(0.3456, abs=5e-5)

    def test_information_criteria(self):
        aic, aicc, bic = inf.information_criteria(-220.6714, 4, 50)
        assert aic == pytest.approx(449.3428)
        assert aicc == pytest.approx(449.3428 + 40 / 45)
        assert bic == pytest.approx(441.3428 + 4 * math.log(50))
        with pytest.raises(DomainError):
            inf.information_criteria(-1.0, 4, 5)


class TestLRT:
    def test_aarset_gg_vs_bg(self, fits):
        stat, pval, df = inf.lrt(fits["GG"], fits["BG"])
        assert df == 1
        assert stat == pytest.approx(3.1444, abs=1e-3)
        assert pval == pytest.approx(0.0762, abs=1e-4)

    def test_identical_fits(self, fits):
        f = fits["BG"]
        same = inf.FitResult(GG, {"alpha": 1.0, "theta": 1.0, "gamma": 1.0}, f.loglik, f.observed_info,
                             None, True, 1, f.n)
        assert inf.lrt(same, f) == (0.0, 1.0, 1)

    def test_not_nested(self, fits):
        with pytest.raises(DomainError):
            inf.lrt(fits["BG"], fits["GG"])
        with pytest.raises(DomainError):
            inf.lrt(fits["GE"], fits["G"])

    def test_missed_optimum(self, fits):
        f = fits["GG"]
        worse = inf.FitResult(BG, dict(AARSET_BG), f.loglik - 1.0, f.observed_info, None, True, 1, f.n)
        with pytest.raises(DomainError):
            inf.lrt(f, worse)

    def test_compare_rows(self, rows):
        assert set(rows) == {"E", "GE", "BE", "G", "GG", "BG"}
        assert rows["BG"].lrt is None
        assert min(rows, key=lambda t: rows[t].gof.aic) == "BG"
