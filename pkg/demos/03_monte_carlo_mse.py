"""The posterior variance is the mean squared error of the posterior mean.

Simulate many paths and noisy datasets, estimate f(x) by its posterior mean
each time, and compare the average squared error with the analytic variance.
"""

import numpy as np

from gaussmarkov import Dataset, brownian, dense_oracle, mc_mse

model = brownian(0.0, 0.0, 0.0, 1.0)
xs = np.array([1.0, 2.0, 4.0, 8.0])
cov = np.eye(xs.size)

for x in (0.5, 1.0, 3.0, 6.0, 10.0):
    res = mc_mse(model, xs, cov, x, trials=200_000, seed=1)
    analytic = dense_oracle(model, Dataset(xs, np.zeros(xs.size), cov), [x])[1][0]
    print(f"x={x:5.1f}  simulated MSE {res.mse:.4f} +/- {res.stderr:.4f}   posterior variance {analytic:.4f}")
