"""Empirical-distribution distances and reference laws used by the test batteries.

All distance functions accept 1-D array-likes and sort internally, so callers
may pass raw simulation output.  Thresholds used elsewhere are expressed
directly in KS / Wasserstein units; the only tabulated inference machinery is
the chi-square critical value at the 0.001 level.
"""

import math

import numpy as np

# Upper 0.001 quantiles of the chi-square distribution, df = 1..60.
_CHI2_CRIT_P001 = (
    10.827566, 13.815511, 16.266236, 18.466827, 20.515006,
    22.457744, 24.321886, 26.124482, 27.877165, 29.588298,
    31.264134, 32.909490, 34.528179, 36.123274, 37.697298,
    39.252355, 40.790217, 42.312396, 43.820196, 45.314747,
    46.797038, 48.267942, 49.728232, 51.178598, 52.619656,
    54.051962, 55.476020, 56.892285, 58.301173, 59.703064,
    61.098306, 62.487219, 63.870099, 65.247217, 66.618829,
    67.985168, 69.346452, 70.702887, 72.054663, 73.401958,
    74.744938, 76.083763, 77.418578, 78.749524, 80.076732,
    81.400326, 82.720423, 84.037134, 85.350565, 86.660815,
    87.967980, 89.272151, 90.573412, 91.871847, 93.167533,
    94.460545, 95.750954, 97.038829, 98.324234, 99.607233,
)
_Z_P999 = 3.090232306167813  # standard normal 0.999 quantile


def empirical_sample(values):
    """Return values as a sorted 1-D float array (the EmpiricalSample form)."""
    a = np.asarray(values, dtype=float).ravel()
    return np.sort(a)


def ks_two_sample(a, b):
    """Sup distance between the empirical CDFs of two non-empty samples."""
    a = empirical_sample(a)
    b = empirical_sample(b)
    if a.size == 0 or b.size == 0:
        raise ValueError("KS distance requires non-empty samples")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_vs_cdf(a, cdf):
    """One-sample KS distance of a sample against a monotone reference CDF.

    Uses both one-sided gaps at every sample point, i.e.
    max_k max(F(x_k) - (k-1)/m, k/m - F(x_k)).
    """
    a = empirical_sample(a)
    m = a.size
    if m == 0:
        raise ValueError("KS distance requires a non-empty sample")
    f = np.array([cdf(x) for x in a], dtype=float)
    k = np.arange(1, m + 1)
    d_plus = np.max(k / m - f)
    d_minus = np.max(f - (k - 1) / m)
    return float(max(d_plus, d_minus))


def wasserstein1(a, b):
    """Wasserstein-1 distance between two empirical samples.

    Equal sizes: mean absolute difference of matched order statistics (exact).
    Unequal sizes: both quantile functions are interpolated piecewise-linearly
    through the nodes (k - 1/2)/m -> x_(k) with constant extrapolation at the
    ends, and the integral of |Q_a - Q_b| over [0,1] is evaluated exactly on
    the merged node grid (segments crossing zero are split analytically).
    """
    a = empirical_sample(a)
    b = empirical_sample(b)
    if a.size == 0 or b.size == 0:
        raise ValueError("Wasserstein distance requires non-empty samples")
    if a.size == b.size:
        return float(np.mean(np.abs(a - b)))

    def nodes(x):
        m = x.size
        return (np.arange(1, m + 1) - 0.5) / m

    ua, ub = nodes(a), nodes(b)
    grid = np.unique(np.concatenate([[0.0], ua, ub, [1.0]]))
    qa = np.interp(grid, ua, a)
    qb = np.interp(grid, ub, b)
    d = qa - qb
    total = 0.0
    for j in range(grid.size - 1):
        w = grid[j + 1] - grid[j]
        d0, d1 = d[j], d[j + 1]
        if d0 * d1 >= 0.0:
            total += w * (abs(d0) + abs(d1)) / 2.0
        else:
            # linear segment crosses zero: two triangles
            total += w * (d0 * d0 + d1 * d1) / (2.0 * abs(d1 - d0))
    return float(total)


def half_normal_cdf(x, t):
    """CDF of |N(0, t)| at x: 2*Phi(x/sqrt(t)) - 1 for x >= 0, else 0."""
    if t <= 0:
        raise ValueError("t must be positive")
    if x <= 0:
        return 0.0
    return math.erf(x / math.sqrt(2.0 * t))


def chi_square_uniform(counts):
    """Chi-square statistic of observed cell counts against the uniform null."""
    c = np.asarray(counts, dtype=float)
    if c.size < 2 or np.any(c < 0):
        raise ValueError("need >= 2 cells with nonnegative counts")
    total = c.sum()
    if total <= 0:
        raise ValueError("total count must be positive")
    expected = total / c.size
    return float(np.sum((c - expected) ** 2) / expected)


def chi_square_two_sample(counts_a, counts_b):
    """Homogeneity chi-square for two samples binned over the same cells.

    Returns (statistic, df) with df = cells - 1; cells empty in both samples
    are dropped.
    """
    a = np.asarray(counts_a, dtype=float)
    b = np.asarray(counts_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("cell vectors must have equal length")
    keep = (a + b) > 0
    a, b = a[keep], b[keep]
    if a.size < 2:
        raise ValueError("need >= 2 non-empty cells")
    na, nb = a.sum(), b.sum()
    col = a + b
    ea = col * na / (na + nb)
    eb = col * nb / (na + nb)
    stat = np.sum((a - ea) ** 2 / ea) + np.sum((b - eb) ** 2 / eb)
    return float(stat), a.size - 1


def chi_square_critical(df, p=0.001):
    """Upper-tail chi-square critical value; tabulated for df <= 60 at p=0.001,
    Wilson-Hilferty approximation beyond."""
    if p != 0.001:
        raise ValueError("only the 0.001 level is tabulated")
    if df < 1:
        raise ValueError("df must be >= 1")
    if df <= len(_CHI2_CRIT_P001):
        return _CHI2_CRIT_P001[df - 1]
    h = 2.0 / (9.0 * df)
    return df * (1.0 - h + _Z_P999 * math.sqrt(h)) ** 3


def poisson_pmf(k, lam):
    """P(X = k) for X ~ Poisson(lam), evaluated in log space for stability."""
    if k < 0:
        return 0.0
    if lam == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def chi_square_poisson(values, lam, min_expected=5.0):
    """Goodness-of-fit chi-square of integer draws against Poisson(lam).

    Consecutive count values are pooled left-to-right until each cell's
    expected count reaches ``min_expected``; the final cell absorbs the upper
    tail.  Returns (statistic, df) with df = cells - 1.
    """
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0 or np.any(v < 0):
        raise ValueError("need nonnegative integer draws")
    n = v.size
    kmax = int(v.max())
    observed = np.bincount(v, minlength=kmax + 1).astype(float)
    probs = np.array([poisson_pmf(k, lam) for k in range(kmax + 1)])
    tail = max(0.0, 1.0 - probs.sum())

    cells_obs, cells_exp = [], []
    acc_o, acc_e = 0.0, 0.0
    for k in range(kmax + 1):
        acc_o += observed[k]
        acc_e += n * probs[k]
        if acc_e >= min_expected:
            cells_obs.append(acc_o)
            cells_exp.append(acc_e)
            acc_o, acc_e = 0.0, 0.0
    # leftover mass plus the analytic upper tail goes into the last cell
    acc_e += n * tail
    if cells_obs:
        cells_obs[-1] += acc_o
        cells_exp[-1] += acc_e
    else:
        cells_obs.append(acc_o)
        cells_exp.append(acc_e)
    obs = np.array(cells_obs)
    exp = np.array(cells_exp)
    if obs.size < 2:
        raise ValueError("lam too small for a multi-cell test at this size")
    stat = float(np.sum((obs - exp) ** 2 / exp))
    return stat, obs.size - 1
