"""A nonconvex problem: a path that avoids randomly placed obstacles.

Two square obstacles sit at height y +/- 0.8 with y random. The planner
must avoid every sampled obstacle pair; the risk of a path is the chance
that a fresh pair hits it, estimated with 10^4 Bernoulli trials.
"""

# %%
import numpy as np

from scenario_sizer import ControllerConfig, empirical_frequency, run
from scenario_sizer.problems import PathConfig, path_planning_problem

cfg = ControllerConfig(risk_mode="bernoulli", bernoulli_samples=10_000)
steady = run(path_planning_problem(PathConfig.steady()), cfg, 100, seed=0)
print("steady: theta", round(steady[-1].theta, 2), "N", steady[-1].N,
      "freq", empirical_frequency(steady, 0.1))

# %%
# obstacles drifting sideways with sin(0.1 t); recent data weigh more
cfg_tv = ControllerConfig(risk_mode="bernoulli", bernoulli_samples=10_000, weighting="linear")
moving = run(path_planning_problem(PathConfig.time_varying()), cfg_tv, 100, seed=0)
print("moving N over time:", np.array([r.N for r in moving])[::10])
print("freq", empirical_frequency(moving, 0.1))
