"""A small Monte Carlo study of the BG maximum-likelihood estimator.

With a few hundred replicates the means of beta and theta are dominated by a
handful of very large estimates, while the medians sit near the truth.

Run: python demos/simulation_study.py
"""

from betagompertz import simulation
from betagompertz.simulation import Scenario

scenarios = [Scenario(0.5, 0.5, 0.5, 0.5, n) for n in (30, 100)]
res = simulation.run_study(scenarios, reps=200, seed=7)

for s in res:
    print(f"\nn={s.scenario.n}: {s.n_ok}/{s.reps} converged interior fits")
    print(f"  {'':8}{'truth':>8}{'mean':>12}{'median':>10}{'sd':>12}{'info se':>12}")
    for k, truth in s.scenario.truth().items():
        print(f"  {k:8}{truth:8.3f}{s.mean_estimate[k]:12.4g}{s.median_estimate[k]:10.4f}"
              f"{s.empirical_sd[k]:12.4g}{s.mean_info_se[k]:12.4g}")
