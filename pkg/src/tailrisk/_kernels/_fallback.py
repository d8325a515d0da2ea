"""NumPy implementation of the fitting kernels.

Semantics are shared with the compiled core in ``_core.pyx``; keep the two
in lockstep. All functions take the exceedance sample as a 1-D float64
array and return a scalar float. Invalid evaluation points (``1 - b*x``
non-positive anywhere) return NaN so root finders can reject them; support
violations in the log-likelihood return ``-inf`` so optimizers can reject
the point without exception handling.
"""

import math

import numpy as np

BACKEND = "numpy"

# |b| below this uses the removable-singularity limits at b = 0.
B_ZERO_TOL = 1e-12
# |k| below this routes to the exponential (k = 0) branch.
K_ZERO_TOL = 1e-9


def k_of_b(b, x):
    """Shape implied by the ratio b: k = -mean(log(1 - b*x))."""
    w = -b * x
    if np.any(w <= -1.0):
        return math.nan
    return -float(np.mean(np.log1p(w)))


def profile_score(b, x):
    """Stationarity residual of the profile likelihood at ratio b.

    mean((1 - b*x)^-1) - (1 + mean(log(1 - b*x)))^-1; the second
    denominator is 1 - k(b), so the residual blows up at the k = 1
    boundary (NaN is returned there).
    """
    t = -b * x
    if np.any(t <= -1.0):
        return math.nan
    recips = float(np.mean(1.0 / (1.0 + t)))
    d = 1.0 + float(np.mean(np.log1p(t)))
    if d == 0.0:
        return math.nan
    return recips - 1.0 / d


def profile_loglik(b, x):
    """Log-likelihood of the sample at (k(b), sigma(b) = k(b)/b).

    The b = 0 limit is the exponential fit, -n*(1 + log(mean(x))).
    """
    n = x.size
    if abs(b) < B_ZERO_TOL:
        return -n * (1.0 + math.log(float(np.mean(x))))
    t = -b * x
    if np.any(t <= -1.0):
        return math.nan
    logs = np.log1p(t)
    s = float(np.sum(logs))
    k = -s / n
    sigma = k / b
    if sigma <= 0.0:
        return math.nan
    return -n * math.log(sigma) + (1.0 / k - 1.0) * s


def zhang_g(b, x, r):
    """Likelihood-moment equation g(b) = mean((1-b*x)^p) - 1/(1-r).

    p = r*n / sum(log(1 - b*x)); the 0/0 at b = 0 is removable and is
    evaluated through its series limit mean(exp(r*x/xbar)) - 1/(1-r).
    """
    n = x.size
    if abs(b) < B_ZERO_TOL:
        xbar = float(np.mean(x))
        return float(np.mean(np.exp(r * x / xbar))) - 1.0 / (1.0 - r)
    t = -b * x
    if np.any(t <= -1.0):
        return math.nan
    logs = np.log1p(t)
    s = float(np.sum(logs))
    p = r * n / s
    # exp can overflow to inf near the upper bracket for r > 0; the sign
    # of g is still meaningful there, so let it saturate silently.
    with np.errstate(over="ignore"):
        powered = float(np.mean(np.exp(p * logs)))
    return powered - 1.0 / (1.0 - r)


def gpd_loglik(x, k, sigma):
    """Sample log-likelihood at (k, sigma); -inf outside the support."""
    n = x.size
    if sigma <= 0.0 or np.any(x < 0.0):
        return -math.inf
    if abs(k) < K_ZERO_TOL:
        return -n * math.log(sigma) - float(np.sum(x)) / sigma
    t = -(k / sigma) * x
    if np.any(t <= -1.0):
        return -math.inf
    return -n * math.log(sigma) + (1.0 / k - 1.0) * float(np.sum(np.log1p(t)))
