"""Any Gauss-Markov kernel works, not only Brownian motion.

The stationary Ornstein-Uhlenbeck covariance exp(-|x - x'| / ell) is Markov;
the squared-exponential kernel is not.  ``validate_markov`` tells them apart,
and for the Markov one the neighbour-only evaluation agrees with conditioning
on every observation at once.
"""

import numpy as np

from gaussmarkov import Dataset, KernelProcess, dense_oracle, evaluate_posterior, node_posterior, validate_markov

ell = 1.5
ou = KernelProcess(lambda x: 0.0 * x, lambda x, y: np.exp(-np.abs(x - y) / ell))
sq_exp = KernelProcess(lambda x: 0.0 * x, lambda x, y: np.exp(-((x - y) ** 2)))

rng = np.random.default_rng(0)
triples = [tuple(np.sort(rng.uniform(0, 10, 3))) for _ in range(100)]
print("OU kernel Markov?           ", validate_markov(ou, triples))
print("squared exponential Markov? ", validate_markov(sq_exp, triples))

xs = np.array([0.5, 1.0, 2.5, 4.0, 7.0])
data = Dataset.diagonal(xs, [0.3, 0.8, -0.4, 0.1, 1.2], [0.1, 0.2, 0.1, 0.5, 0.1])
npost = node_posterior(ou, data)

queries = np.linspace(0.0, 9.0, 10)
dense_mean, dense_var = dense_oracle(ou, data, queries)
print(f"{'x':>5} {'mean':>9} {'oracle':>9} {'var':>9} {'oracle':>9}")
for q, m, v in zip(queries, dense_mean, dense_var):
    p = evaluate_posterior(ou, npost, data, q)
    print(f"{q:5.1f} {p.mean:9.5f} {m:9.5f} {p.variance:9.5f} {v:9.5f}")
