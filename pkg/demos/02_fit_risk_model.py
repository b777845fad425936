"""Fitting theta from observed (risk, sample size) pairs.

Simulate a problem whose true complexity is 3, record the risk of each
scenario solution together with the N it used, then fit theta by maximum
likelihood.
"""

# %%
import numpy as np

from scenario_sizer import Dataset, fit, weighted_loglik

rng = np.random.default_rng(0)
d = 3
data = Dataset()
for N in rng.integers(5, 80, 400):
    data.append((rng.beta(d, N - d + 1), int(N)))

res = fit(data)
print(f"theta = {res.theta:.4f}, mean loglik = {res.loglik:.4f}")
print(f"{len(res.candidates)} candidates, {res.fallbacks} bisection fallbacks")

# %%
# the likelihood is piecewise concave with kinks at the observed N values
for t in (1.0, 2.0, 2.9, res.theta, 3.1, 4.0, 6.0):
    print(f"{t:7.3f}  {weighted_loglik(t, data):.5f}")

# %%
# zero risks carry no information; a dataset of only zeros is flat
flat = fit(Dataset([(0.0, 10), (0.0, 30)]))
print("flat fit:", flat.theta)
