"""When the Beta model is wrong.

max-coordinate problem whose scenarios carry a point mass just below 1.
Whenever the atom is drawn the solution has a tiny but nonzero risk, which
drags the fitted theta down, so N is chosen too small and the risk exceeds
0.1 more often than the 10% the loop aims for.
"""

# %%
from scenario_sizer import ControllerConfig, empirical_frequency, run
from scenario_sizer.problems import AtomMixture, UniformDistribution, max_coordinate_problem

cfg = ControllerConfig(risk_mode="bernoulli", bernoulli_samples=10_000)
for name, dist in (("uniform", UniformDistribution()), ("atom", AtomMixture(atom=0.99, mass=0.1))):
    trace = run(max_coordinate_problem(400, dist), cfg, 1000, seed=0)
    print(f"{name:8s} theta={trace[-1].theta:.3f} N={trace[-1].N:3d} freq={empirical_frequency(trace, 0.1):.3f}")
