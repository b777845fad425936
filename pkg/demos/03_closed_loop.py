"""The closed loop on a one dimensional problem.

min x subject to x >= u, u ~ N(1, 2). Each step draws N scenarios, solves,
measures the risk of the solution, refits theta and picks the next N.
The loop should settle near theta = 1, N = 22 and keep the risk below 0.1
about 90% of the time.
"""

# %%
import numpy as np

from scenario_sizer import ControllerConfig, empirical_frequency, run
from scenario_sizer.problems import half_line_problem

trace = run(half_line_problem(), ControllerConfig(epsilon=0.1, beta=0.9), 1000, seed=0)

Ns = np.array([r.N for r in trace])
print("first ten N:", Ns[:10])
print("final theta:", round(trace[-1].theta, 3), "final N:", Ns[-1])
print("freq(risk <= 0.1):", empirical_frequency(trace, 0.1))

# %%
# the same experiment from the command line, with plots:
#   scenario-sizer run --config configs/half_line.cfg --plot
