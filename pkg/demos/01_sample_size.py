"""How many scenarios does a problem need?

If the risk of a scenario solution follows Beta(d, N - d + 1), the
confidence of staying below a tolerance eps is a binomial tail. The sizer
finds the smallest N whose confidence reaches beta.
"""

# %%
from scenario_sizer import cdf_at, optimal_sample_size

eps, beta = 0.1, 0.9
for theta in (1.0, 2.0, 5.0, 20.0):
    n = optimal_sample_size(theta, eps, beta)
    print(f"theta={theta:5.1f}  N={n:4d}  conf(N)={cdf_at(theta, eps, n):.4f}  conf(N-1)={cdf_at(theta, eps, n - 1):.4f}")

# %%
# theta does not have to be an integer: the family interpolates smoothly
for theta in (4.5, 4.9, 5.0, 5.1):
    print(theta, optimal_sample_size(theta, eps, beta))

# %%
# a cap on N is honoured even when the target is out of reach
print(optimal_sample_size(5.0, eps, beta, n_max=40))
