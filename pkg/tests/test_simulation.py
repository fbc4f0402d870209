import numpy as np
import pytest

from betagompertz import simulation as sim
from betagompertz.errors import DomainError
from betagompertz.simulation import Scenario


class TestScenario:
    def test_validation(self):
        with pytest.raises(DomainError):
            Scenario(0.5, 0.5, 0.5, 0.5, 1)
        with pytest.raises(DomainError):
            Scenario(0.5, -0.5, 0.5, 0.5, 30)

    def test_params_and_truth(self):
        sc = Scenario(2.0, 3.0, 0.5, 0.7, 30)
        assert sc.params.alpha == 2.0 and sc.params.theta == 0.5
        assert sc.truth() == {"alpha": 2.0, "beta": 3.0, "theta": 0.5, "gamma": 0.7}

    def test_desk_grid(self):
        sc = sim.desk_scenarios()
        assert len(sc) == 4
        assert [s.n for s in sc] == [30, 30, 100, 100]


class TestRunStudy:
    scenarios = [Scenario(0.5, 0.5, 0.5, 0.5, 40), Scenario(2.0, 2.0, 0.5, 0.5, 40)]

    def test_single_replication_reproducible(self):
        a = sim.run_study(self.scenarios[:1], 1, seed=3)
        b = sim.run_study(self.scenarios[:1], 1, seed=3)
        np.testing.assert_array_equal(a[0].estimates, b[0].estimates)
        assert a[0].reps == 1

    def test_seed_changes_result(self):
        a = sim.run_study(self.scenarios[:1], 2, seed=3)
        b = sim.run_study(self.scenarios[:1], 2, seed=4)
        assert not np.array_equal(a[0].estimates, b[0].estimates)

    def test_scenario_streams_independent_of_list(self):
        # the first scenario's draws do not depend on what follows it
        a = sim.run_study(self.scenarios, 3, seed=5)
        b = sim.run_study(self.scenarios[:1], 3, seed=5)
        np.testing.assert_array_equal(a[0].estimates, b[0].estimates)

    def test_workers_do_not_change_output(self):
        a = sim.run_study(self.scenarios, 4, seed=1)
        b = sim.run_study(self.scenarios, 4, seed=1, workers=2)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.estimates, y.estimates)
            assert x.mean_estimate == y.mean_estimate

    def test_summary_statistics(self):
        s = sim.run_study(self.scenarios[:1], 6, seed=2)[0]
        good = s.estimates[: s.reps]
        assert s.n_ok <= s.reps
        assert s.failure_fraction == pytest.approx(1 - s.n_ok / 6)
        if s.n_ok == 6:
            np.testing.assert_allclose(list(s.mean_estimate.values()), good.mean(0), rtol=1e-14)
            mc = s.mc_se()
            assert mc["alpha"] == pytest.approx(s.empirical_sd["alpha"] / np.sqrt(6))

    def test_grid_start(self):
        s = sim.run_study(self.scenarios[:1], 1, seed=2, start="grid")[0]
        assert s.estimates.shape == (1, 4)

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            sim.run_study(self.scenarios, 0)
        with pytest.raises(DomainError):
            sim.run_study(self.scenarios, 1, start="random")


class TestFlagging:
    def test_flag_threshold(self):
        sc = Scenario(0.5, 0.5, 0.5, 0.5, 30)
        rows = [(False, [1.0] * 4, [0.1] * 4)] * 3 + [(True, [1.0] * 4, [0.1] * 4)] * 7
        s = sim._summarize(sc, rows)
        assert s.flagged and s.n_ok == 7
        rows = [(False, [1.0] * 4, [0.1] * 4)] * 2 + [(True, [1.0] * 4, [0.1] * 4)] * 8
        assert not sim._summarize(sc, rows).flagged

    def test_failed_fits_excluded(self):
        sc = Scenario(0.5, 0.5, 0.5, 0.5, 30)
        rows = [(True, [1.0, 2.0, 3.0, 4.0], [0.1] * 4), (False, [9e9] * 4, [np.nan] * 4),
                (True, [3.0, 2.0, 1.0, 0.0], [0.3] * 4)]
        s = sim._summarize(sc, rows)
        assert s.mean_estimate == {"alpha": 2.0, "beta": 2.0, "theta": 2.0, "gamma": 2.0}
        assert s.mean_info_se["alpha"] == pytest.approx(0.2)

    def test_all_failed(self):
        sc = Scenario(0.5, 0.5, 0.5, 0.5, 30)
        s = sim._summarize(sc, [(False, [np.nan] * 4, [np.nan] * 4)])
        assert s.flagged and np.isnan(s.mean_estimate["alpha"])
        assert np.isnan(s.mc_se()["beta"])
