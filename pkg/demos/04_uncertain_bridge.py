"""A Brownian bridge whose endpoints are only known in distribution.

Between two sampled locations the posterior is a bridge: the mean is a
straight line between the endpoint estimates, and the variance combines the
endpoint uncertainty with the usual bridge term, which peaks mid-piece.
"""

import numpy as np

from gaussmarkov import bridge_moments

x1, x2, sigma = 2.0, 5.0, 1.0
for rho in (-0.9, 0.0, 0.9):
    print(f"endpoint correlation {rho:+.1f}")
    for x in np.linspace(x1, x2, 7):
        mean, var = bridge_moments(0.0, 1.0, 0.5, 0.3, rho, x1, x2, sigma, x)
        print(f"  x={x:4.2f}  mean={mean:.3f}  var={var:.3f}")

# pinned endpoints give the classical bridge, variance sigma^2 (x2-x)(x-x1)/(x2-x1)
print("pinned midpoint variance:", bridge_moments(0.0, 1.0, 0.0, 0.0, 0.0, x1, x2, sigma, 3.5)[1])
