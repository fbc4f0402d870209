import math

import numpy as np
import pytest

from betagompertz import analytic, core, diagnostics as dg, inference as inf
from betagompertz.core import BGParams


@pytest.fixture(scope="module")
def report():
    return dg.run_report()


def _instance(seed=1):
    p = BGParams(0.7, 0.4, 1.6, 0.8)
    return core.sample(20, p, seed), p


class TestPrintedLikelihood:
    def test_offset_is_twice_the_beta_hazard_term(self):
        # the literal form adds beta * sum(H) where the density subtracts it
        x, p = _instance()
        h = core.cumulative_hazard(x, p.theta, p.gamma)
        diff = dg.printed_log_likelihood(x, p) - inf.log_likelihood(x, p)
        assert diff == pytest.approx(2 * p.beta * h.sum(), rel=1e-12)

    def test_score(self):
        x, p = _instance()
        h = core.cumulative_hazard(x, p.theta, p.gamma)
        diff = dg.printed_score(x, p) - inf.score(x, p)
        assert diff[0] == pytest.approx(0.0, abs=1e-10)
        assert diff[1] == pytest.approx(2 * h.sum(), rel=1e-12)
        assert abs(diff[2]) > 1.0 and abs(diff[3]) > 1.0

    def test_information(self):
        x, p = _instance()
        diff = dg.printed_information(x, p) - inf.observed_information(x, p)
        true = inf.observed_information(x, p)
        # shape-only entries agree; the alpha-theta entry has its sign flipped
        for i, j in ((0, 0), (0, 1), (1, 1), (0, 3)):
            assert diff[i, j] == pytest.approx(0.0, abs=1e-9)
        assert diff[0, 2] == pytest.approx(-2 * true[0, 2], rel=1e-12)
        np.testing.assert_allclose(diff, diff.T)


class TestSeries:
    def test_moment_series_readings_both_miss(self):
        p = BGParams(1.0, 1.0, 1.0, 1.0)
        mean = analytic.moment(1, p)
        for mode in ("k", "swapped"):
            val = dg.moment_series(1, p, mode)
            assert not (math.isfinite(val) and abs(val - mean) < 1e-3 * mean)

    def test_mgf_series_terminating_case(self):
        # beta integer and t/gamma integer: the inner sums are finite
        p = BGParams(0.5, 0.5, 2.0, 3.0)
        assert dg.mgf_series(0.5, p) == pytest.approx(analytic.mgf(0.5, p), rel=1e-8)

    def test_renyi_series_is_off(self):
        p = BGParams(0.5, 0.5, 0.5, 0.5)
        val = dg.renyi_series(2.0, p)
        ref = analytic.renyi_entropy(2.0, p)
        assert not (math.isfinite(val) and abs(val - ref) < 1e-3)


class TestReport:
    def test_covers_every_formula(self, report):
        names = {r.name for r in report}
        assert names == {"moment_series", "mgf_series", "renyi_series", "printed_log_likelihood",
                         "printed_score", "printed_information", "order_stat_moment_series"}
        assert len(report) == 12 * len(dg.DEFAULT_CASES)

    def test_oracles_finite(self, report):
        for r in report:
            if r.name in ("moment_series", "mgf_series", "order_stat_moment_series"):
                assert math.isfinite(r.oracle)

    def test_deterministic(self, report):
        again = dg.run_report()
        assert [repr(r) for r in again] == [repr(r) for r in report]

    def test_markdown(self, report):
        text = dg.format_report(report)
        lines = text.splitlines()
        assert len(lines) == len(report) + 2
        assert all(line.startswith("|") and line.endswith("|") for line in lines)

    def test_diff_properties(self):
        r = dg.SeriesDiagnostic("x", (1, 1, 1, 1), {}, 1.5, 1.0, 3)
        assert r.abs_diff == 0.5 and r.rel_diff == 0.5
        assert dg.SeriesDiagnostic("x", (), {}, 1.0, 0.0, 1).rel_diff == math.inf
