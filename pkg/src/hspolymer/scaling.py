"""Scaled two-row processes, weight-law matching moments, and the matching
identity between the octant polymer and the reflected-walk framework.

Coordinates: the scaled height function lives on (T, X) with nT/2 and
sqrt(n) X integers; the octant point behind H(T, X) is (nT/2 + sqrt(n) X +
2, nT/2 + 2). The normalized octant process z-tilde(t, y) maps onto the
reflected-walk sheet through (t, y) -> (2t + y - 2, y) on the even
sublattice; diagonal_time records that map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distributions import sample_inverse_gamma
from .lattice import (make_row_logw, partition_recurrence,
                      point_to_point_partition, replicated_rows,
                      sample_weight_field, two_row_params)
from .rng import RngStream
from .stationary import DiscreteStationaryParams, sample_zuv_path


@dataclass(frozen=True)
class KpzScalingConfig:
    """Lattice level, drift parameters, and admissible grids of the scaled
    process; T values need nT/2 integer, X values need sqrt(n) X a
    nonnegative integer."""

    n: int
    u: float
    v: float
    t_grid: tuple = ()
    x_grid: tuple = ()

    def __post_init__(self):
        rn = int(round(math.sqrt(self.n)))
        if self.n < 4 or rn * rn != self.n:
            raise ValueError("n must be a perfect square >= 4")
        if not self.v <= min(0.0, self.u):
            raise ValueError("need v <= min(0, u)")
        for T in self.t_grid:
            _lattice_T(self, T)
        for X in self.x_grid:
            _lattice_X(self, X)

    @property
    def sqrt_n(self) -> int:
        return int(round(math.sqrt(self.n)))

    @property
    def alpha_n(self) -> float:
        return 0.5 + self.sqrt_n

    @property
    def mu(self) -> float:
        return self.u - 0.5


def _lattice_T(config: KpzScalingConfig, T: float) -> int:
    h = config.n * T / 2.0
    k = int(round(h))
    if abs(h - k) > 1e-9 or k < 0:
        raise ValueError(f"nT/2 = {h} is not a nonnegative integer")
    return k


def _lattice_X(config: KpzScalingConfig, X: float) -> int:
    w = config.sqrt_n * X
    k = int(round(w))
    if abs(w - k) > 1e-9 or k < 0:
        raise ValueError(f"sqrt(n) X = {w} is not a nonnegative integer")
    return k


def scaled_stationary_process(config: KpzScalingConfig, T: float, X_list,
                              rng: RngStream, n_replicas: int = 1) -> np.ndarray:
    """Sample H_n(T, X) jointly over X_list; returns (n_replicas, len(X_list)).

    H_n(T, X) = (nT + sqrt(n) X) log sqrt(n) + log z_stat(nT/2 + sqrt(n)X
    + 2, nT/2 + 2) - log(varpi_11 varpi_22), with one two-row grid at bulk
    parameter alpha_n per replica evaluated at all X points, preserving the
    joint law in X. The boundary corner weights are captured from the same
    grid, so the returned values are absolute (not only increments).
    """
    if config.v == config.u:
        raise ValueError("two-row construction needs v < u")
    half_t = _lattice_T(config, T)
    ks = [_lattice_X(config, X) for X in X_list]
    m = half_t + 2
    max_n = m + max(ks)
    params = two_row_params(config.alpha_n, config.u, config.v, max_n)
    record = {m + k: [m] for k in sorted(set(ks))}
    capture = {(1, 1): None, (2, 2): None}
    provider = make_row_logw(params, m, n_replicas, rng, capture=capture)
    got = replicated_rows(provider, max_n, m, n_replicas, record)
    s = math.log(config.sqrt_n)
    out = np.empty((n_replicas, len(ks)))
    corner = capture[(1, 1)] + capture[(2, 2)]
    for c, k in enumerate(ks):
        pref = (2 * half_t + k) * s
        out[:, c] = pref + got[(m + k, m)] - corner
    return out


def diagonal_time(t: int, y: int) -> int:
    """Map an octant label (t, y) to the reflected-walk endpoint time
    2t + y - 2 (the endpoint height is y itself)."""
    return 2 * t + y - 2


@dataclass
class TildeZResult:
    log_value: float
    decomposition_defect: float
    terms: int


def normalized_tilde_z(alpha: float, u: float, v: float, t: int, y: int,
                       rng: RngStream) -> TildeZResult:
    """One realization of log z-tilde(t, y) with its exact decomposition
    defect.

    z-tilde(t, y) = ((2 alpha - 1)/2)^{2t+y} z_stat(t+y+2, t+2) /
    (varpi_11 varpi_22). On the same weight field the value decomposes as
    sum_{x=0}^{t+y-1} z-tilde(x) * propagator(x), where z-tilde(x) uses
    only rows 1-2 and the propagator is the point-to-point partition over
    rows >= 3 entering column 3 at row x + 3, normalized by the matching
    power of (2 alpha - 1)/2. The defect reported is the relative gap
    between the direct value and the decomposed sum, which is a pure
    bookkeeping identity and must vanish to rounding.
    """
    if not alpha > 0.5:
        raise ValueError("need alpha > 1/2")
    if t < 0 or y < 0 or t + y < 1:
        raise ValueError("need t, y >= 0 with t + y >= 1")
    big_n, big_m = t + y + 2, t + 2
    params = two_row_params(alpha, u, v, big_n)
    field = sample_weight_field(params, rng)
    grid = partition_recurrence(field, big_n, big_m)
    log_scale = math.log((2.0 * alpha - 1.0) / 2.0)
    lw = field.log_w
    corner = lw[1, 1] + lw[2, 2]
    direct = (2 * t + y) * log_scale + grid.log_z[big_n, big_m] - corner
    if t == 0:
        # z-tilde(0, y) is the initial data z-tilde(y-1) by definition;
        # the column-3 decomposition needs t >= 1
        return TildeZResult(log_value=float(direct), decomposition_defect=0.0,
                            terms=0)
    parts = []
    for x in range(0, t + y):
        init = (x + 1) * log_scale + grid.log_z[x + 3, 2] - corner
        prop = (2 * t + y - x - 1) * log_scale + point_to_point_partition(
            field, (x + 3, 3), (big_n, big_m))
        parts.append(init + prop)
    total = np.logaddexp.reduce(parts)
    defect = abs(total - direct) / max(abs(direct), 1.0)
    return TildeZResult(log_value=float(direct), decomposition_defect=float(defect),
                        terms=len(parts))


def _even_root(n: int) -> int:
    rn = int(round(math.sqrt(n)))
    if rn * rn != n:
        raise ValueError("n must be a perfect square")
    return rn


def bulk_weight_matching_moments(n: int, max_order: int = 8) -> dict:
    """Exact moments of the centered bulk weight at lattice level n.

    omega = (Y - 1)/beta with Y = g * InvGamma(g + 1), g = 2 sqrt(n) and
    beta = n^{-1/4}/sqrt(2) (so beta^2 = 1/g). Moments are evaluated in
    exact rational arithmetic in g: E[omega^N] = g^{N/2} sum_k C(N,k)
    (-1)^{N-k} g^k / (g (g-1) ... (g-k+1)). The mean vanishes identically;
    even moments approach the Gaussian values (N-1)!! at rate O(n^{-1/2}),
    odd ones approach 0.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    g = 2 * _even_root(n)
    if max_order >= g:
        raise ValueError("moment order must be below 2 sqrt(n)")

    def y_moment(k: int) -> Fraction:
        num = Fraction(g) ** k
        den = 1
        for j in range(k):
            den *= g - j
        return num / den

    def omega_sum(order: int) -> Fraction:
        total = Fraction(0)
        for k in range(order + 1):
            total += (math.comb(order, k) * (-1) ** (order - k)) * y_moment(k)
        return total

    out = {"n": n, "g": g, "beta": n ** -0.25 / math.sqrt(2.0)}
    out["mean_exact_zero"] = omega_sum(1) == 0
    var = omega_sum(2) * g
    out["var"] = float(var)
    out["var_formula"] = float(Fraction(g, g - 1))
    out["var_matches_formula"] = var == Fraction(g, g - 1)
    moments = {}
    for order in range(1, max_order + 1):
        val = float(omega_sum(order)) * g ** (order / 2.0)
        if order % 2 == 0:
            limit = float(math.prod(range(order - 1, 0, -2)))
            rate = math.sqrt(n)     # even-moment drift is O(n^{-1/2})
        else:
            limit = 0.0
            rate = n ** 0.25        # odd moments vanish at O(n^{-1/4})
        moments[order] = {"value": val, "limit": limit,
                          "gap": abs(val - limit),
                          "gap_scaled": abs(val - limit) * rate}
    out["moments"] = moments
    return out


def bulk_weight_mc_moment(n: int, order: int, n_draws: int, rng: RngStream,
                          batch: int = 10 ** 6) -> float:
    """Monte Carlo estimate of E[omega^order] for the matching bulk law."""
    g = 2.0 * _even_root(n)
    beta = n ** -0.25 / math.sqrt(2.0)
    total = 0.0
    left = n_draws
    while left > 0:
        size = min(batch, left)
        y = g * sample_inverse_gamma(g + 1.0, rng, size=size)
        total += float(np.sum(((y - 1.0) / beta) ** order))
        left -= size
    return total / n_draws


def boundary_weight_matching_moments(n: int, u: float) -> dict:
    """Exact mean and variance of the matching boundary weight law.

    X = sqrt(n) * InvGamma(sqrt(n) + mu + 1) with mu = u - 1/2: mean
    sqrt(n)/(sqrt(n) + mu), variance n/((sqrt(n)+mu)^2 (sqrt(n)+mu-1)).
    Checks the drift recovery sqrt(n)(1 - mean) -> mu at rate O(n^{-1/2})
    and the variance decay var = O(n^{-1/2}).
    """
    rn = math.sqrt(n)
    mu = u - 0.5
    if not rn + mu > 1:
        raise ValueError("variance needs sqrt(n) + mu > 1")
    mean = rn / (rn + mu)
    var = n / ((rn + mu) ** 2 * (rn + mu - 1.0))
    drift = rn * (1.0 - mean)
    return {
        "n": n, "u": u, "mu": mu,
        "mean": mean, "var": var,
        "drift_estimate": drift,
        "drift_gap": abs(drift - mu),
        "drift_gap_bound": mu * mu / (rn + mu) if rn + mu > 0 else math.inf,
        "var_times_sqrt_n": var * rn,
    }


def matching_identity_check(alpha: float, u: float, v: float, t: int, y: int,
                            n_samples: int, rng: RngStream,
                            batch: int = 20000) -> dict:
    """Sample both sides of the octant-to-framework identity in law.

    Left side: log z-tilde(t, y) from the two-row octant at bulk parameter
    alpha, replicated. Right side: the reflected-walk diagonal partition
    with initial data distributed as z-tilde(x) (drawn from the direct
    z_{u,v} sampler), bulk factors (2 alpha - 1) InvGamma(2 alpha),
    boundary factors ((2 alpha - 1)/2) InvGamma(alpha + u), and a fresh
    endpoint factor at time 2t + y - 2; the right-side value is
    (2^{1{y=0}}/2) * endpoint * z-diag. Returns the two log-sample arrays
    plus bookkeeping; the KS comparison is left to the caller.
    """
    if t + y < 1 or t < 1:
        raise ValueError("need t >= 1")
    if t > 5 or y > 4:
        raise ValueError("matching window guarded to t <= 5, y <= 4")
    s_end = diagonal_time(t, y)
    log_scale = math.log((2.0 * alpha - 1.0) / 2.0)
    big_n, big_m = t + y + 2, t + 2
    params = two_row_params(alpha, u, v, big_n)
    lhs = np.empty(n_samples)
    rhs = np.empty(n_samples)
    zp = DiscreteStationaryParams(alpha=alpha, u=u, v=v)
    done = 0
    lhs_stream = rng.substream(1)
    rhs_stream = rng.substream(2)
    while done < n_samples:
        R = min(batch, n_samples - done)
        # left side: octant replicas
        capture = {(1, 1): None, (2, 2): None}
        provider = make_row_logw(params, big_m, R, lhs_stream, capture=capture)
        got = replicated_rows(provider, big_n, big_m, R, {big_n: [big_m]})
        corner = capture[(1, 1)] + capture[(2, 2)]
        lhs[done:done + R] = ((2 * t + y) * log_scale
                              + got[(big_n, big_m)] - corner)
        # right side: framework replicas
        rhs[done:done + R] = _matching_rhs(alpha, u, zp, t, y, s_end,
                                           log_scale, R, rhs_stream)
        done += R
    return {"alpha": alpha, "u": u, "v": v, "t": t, "y": y,
            "s_end": s_end, "lhs_log": lhs, "rhs_log": rhs}


def _matching_rhs(alpha: float, u: float, zp: DiscreteStationaryParams,
                  t: int, y: int, s_end: int, log_scale: float,
                  R: int, rng: RngStream) -> np.ndarray:
    """Right side of the matching identity, vectorized over replicas."""
    bulk_scale = 2.0 * alpha - 1.0
    bdry_scale = bulk_scale / 2.0
    x_hi = t + y - 1          # initial data indices 0..x_hi
    log_zuv = sample_zuv_path(zp, x_hi + 1, rng, n_replicas=R)
    # init value at x: z-tilde(x) in law = scale^{x+1} z_{u,v}(x+1)
    init = np.empty((R, x_hi + 1))
    for x in range(x_hi + 1):
        init[:, x] = np.exp((x + 1) * log_scale + log_zuv[:, x + 1])
    cap = s_end + 1
    f = np.zeros((R, cap + 1))
    for r in range(s_end):
        if r <= x_hi:
            f[:, r] += init[:, r]
        g = np.empty((R, cap + 1))
        g[:, 0] = bdry_scale * sample_inverse_gamma(alpha + u, rng, size=R)
        g[:, 1:] = 0.5 * bulk_scale * sample_inverse_gamma(
            2.0 * alpha, rng, size=(R, cap))
        h = f * g
        f = np.zeros_like(f)
        f[:, 1:] += h[:, :-1]
        f[:, :-1] += h[:, 1:]
    if s_end <= x_hi and y == s_end:
        f[:, y] += init[:, s_end]
    if y == 0:
        endpoint = bdry_scale * sample_inverse_gamma(alpha + u, rng, size=R)
        front = 0.0  # log(2^1 / 2)
    else:
        endpoint = bulk_scale * sample_inverse_gamma(2.0 * alpha, rng, size=R)
        front = math.log(0.5)
    return front + np.log(endpoint) + np.log(f[:, y])
