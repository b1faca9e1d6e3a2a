"""Direct samplers for the stationary processes and their moment formulas.

Two families live here. The discrete process z_{u,v}(k) is built from two
independent inverse-gamma multiplicative walks r1, r2 and an independent
boundary weight; its law matches the two-row lattice ratio process, which is
what the cross-checks in the test-suite exercise. The continuum process
H_{u,v}(X) is the Brownian analogue, sampled on a delta-grid two different
ways (the defining formula and the Pitman-transform form) that must agree in
law.

Conventions: walks start at 1 (log 0); when u = v the boundary term is
dropped entirely, matching the 1/varpi := 0 convention, rather than sampling
a degenerate weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import inverse_gamma_moment
from .rng import RngStream


@dataclass(frozen=True)
class DiscreteStationaryParams:
    """Parameters (alpha, u, v) of the discrete stationary process."""

    alpha: float
    u: float
    v: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not (self.u > -self.alpha and self.v > -self.alpha):
            raise ValueError("need u, v > -alpha")
        if not self.v < self.alpha:
            raise ValueError("need v < alpha")
        if self.v > self.u:
            raise ValueError("need v <= u")


@dataclass(frozen=True)
class ContinuumStationaryParams:
    """Parameters of the continuum process on a delta-grid of [0, X_max]."""

    u: float
    v: float
    delta: float = 2.0 ** -10
    x_max: float = 2.0

    def __post_init__(self):
        if not self.delta > 0 or not self.x_max > 0:
            raise ValueError("delta and x_max must be positive")
        if self.v > self.u:
            raise ValueError("need v <= u")


def _log_ig_walk(theta: float, k_max: int, rng: RngStream, n: int) -> np.ndarray:
    """Log of an inverse-gamma multiplicative walk: (n, k_max+1), column 0 = 0."""
    steps = -np.log(rng.gen.standard_gamma(theta, size=(n, k_max)))
    out = np.zeros((n, k_max + 1))
    np.cumsum(steps, axis=1, out=out[:, 1:])
    return out


def sample_zuv_path(params: DiscreteStationaryParams, k_max: int, rng: RngStream,
                    n_replicas: int = 1) -> np.ndarray:
    """Sample log z_{u,v}(k) for k = 0..k_max, replicated.

    z(k) = r2(k) + (1/varpi) sum_{l=1}^{k} r1(l) r2(k) / r2(l-1), where r1
    and r2 are independent IG(alpha+v) and IG(alpha-v) multiplicative walks
    from 1 and varpi ~ IG(u-v) is independent of both. For u = v the sum
    term is dropped. Returned shape: (n_replicas, k_max+1).
    """
    a, u, v = params.alpha, params.u, params.v
    R = n_replicas
    log_r2 = _log_ig_walk(a - v, k_max, rng, R)
    if u == v:
        return log_r2
    log_r1 = _log_ig_walk(a + v, k_max, rng, R)
    log_varpi = -np.log(rng.gen.standard_gamma(u - v, size=R))
    # terms t_l = r1(l)/r2(l-1); cumulative logsumexp over l = 1..k
    t = log_r1[:, 1:] - log_r2[:, :-1]
    lse = np.logaddexp.accumulate(t, axis=1)
    out = log_r2.copy()
    out[:, 1:] = log_r2[:, 1:] + np.logaddexp(
        0.0, lse - log_varpi[:, None]
    )
    return out


@dataclass
class PraPath:
    """The product decomposition z = p * a with its ingredients, in logs."""

    log_p: np.ndarray
    log_r: np.ndarray
    log_a: np.ndarray

    @property
    def log_z(self) -> np.ndarray:
        return self.log_p + self.log_a


def sample_zuv_pra(params: DiscreteStationaryParams, k_max: int, rng: RngStream,
                   n_replicas: int = 1) -> PraPath:
    """Sample the alternative decomposition z(k) = p(k) a(k).

    p(k) is an IG(alpha-v) multiplicative walk; r(k) = zeta_1 prod_{i=2}^{k}
    zeta_i/xi_{i-1} is a beta-prime multiplicative walk started from an
    IG(alpha+v) variate; a(k) = 1 + (1/varpi) sum_{j<=k} r(j). The product
    has the same law as the direct z_{u,v} sampler, path by path in k. The
    a-branch needs u > v. log_r column 0 is -inf (r starts at k=1).
    """
    a_, u, v = params.alpha, params.u, params.v
    if u == v:
        raise ValueError("the p/r/a decomposition needs u > v")
    R = n_replicas
    log_xi = -np.log(rng.gen.standard_gamma(a_ - v, size=(R, k_max)))
    log_zeta = -np.log(rng.gen.standard_gamma(a_ + v, size=(R, k_max)))
    log_p = np.zeros((R, k_max + 1))
    np.cumsum(log_xi, axis=1, out=log_p[:, 1:])
    # log r(k) = log zeta_1 + sum_{i=2}^{k} (log zeta_i - log xi_{i-1})
    log_r = np.full((R, k_max + 1), -np.inf)
    log_r[:, 1] = log_zeta[:, 0]
    if k_max >= 2:
        inc = log_zeta[:, 1:] - log_xi[:, :-1]
        log_r[:, 2:] = log_zeta[:, 0:1] + np.cumsum(inc, axis=1)
    log_varpi = -np.log(rng.gen.standard_gamma(u - v, size=R))
    lse = np.logaddexp.accumulate(log_r[:, 1:], axis=1)
    log_a = np.zeros((R, k_max + 1))
    log_a[:, 1:] = np.logaddexp(0.0, lse - log_varpi[:, None])
    return PraPath(log_p=log_p, log_r=log_r, log_a=log_a)


def sample_Huv_path(params: ContinuumStationaryParams, rng: RngStream,
                    n_replicas: int = 1, x_record=None) -> dict:
    """Sample H_{u,v} on the delta-grid via the defining formula.

    H(X) = B2(X) + log(1 + (1/varpi) I(X)) with I(X) the left-endpoint
    Riemann sum of exp(B1(S) - B2(S)) over [0, X]; B1 has drift -v, B2 drift
    v, both variance 1 per unit length; varpi ~ IG(u-v), with the boundary
    term dropped when u = v. Streams over the grid keeping O(R) state and
    records H at the requested X values (default: the grid endpoint).
    Returns {"X": array, "H": (R, len(X)) array}.
    """
    u, v, d = params.u, params.v, params.delta
    steps = int(round(params.x_max / d))
    if x_record is None:
        x_record = [params.x_max]
    targets = sorted(set(int(round(x / d)) for x in x_record))
    if targets[-1] > steps:
        raise ValueError("recorded X beyond x_max")
    R = n_replicas
    b1 = np.zeros(R)
    b2 = np.zeros(R)
    log_i = np.full(R, -np.inf)
    if u == v:
        log_varpi = None
    else:
        log_varpi = -np.log(rng.gen.standard_gamma(u - v, size=R))
    log_d = np.log(d)
    out = np.empty((R, len(targets)))
    pos = {t: c for c, t in enumerate(targets)}
    if 0 in pos:
        out[:, pos[0]] = 0.0
    sd = np.sqrt(d)
    gen = rng.gen
    for j in range(1, steps + 1):
        log_i = np.logaddexp(log_i, log_d + b1 - b2)
        b1 = b1 + gen.normal(-v * d, sd, size=R)
        b2 = b2 + gen.normal(v * d, sd, size=R)
        if j in pos:
            if log_varpi is None:
                out[:, pos[j]] = b2
            else:
                out[:, pos[j]] = b2 + np.logaddexp(0.0, log_i - log_varpi)
    return {"X": np.array(targets, dtype=float) * d, "H": out}


def sample_Huv_pitman(params: ContinuumStationaryParams, rng: RngStream,
                      n_replicas: int = 1, x_record=None) -> dict:
    """Sample H_{u,v} via the Pitman-transform form.

    H(x) = beta1(x) + beta2(x) + log(1 + (1/varpi) J(x)) with J(x) the
    left-endpoint Riemann sum of exp(-2 beta2) and beta1, beta2 independent
    with drifts 0 and v and diffusion coefficient 1/2 each. Same law as
    sample_Huv_path at every grid point; sampled through a different route.
    """
    u, v, d = params.u, params.v, params.delta
    steps = int(round(params.x_max / d))
    if x_record is None:
        x_record = [params.x_max]
    targets = sorted(set(int(round(x / d)) for x in x_record))
    if targets[-1] > steps:
        raise ValueError("recorded X beyond x_max")
    R = n_replicas
    be1 = np.zeros(R)
    be2 = np.zeros(R)
    log_j = np.full(R, -np.inf)
    if u == v:
        log_varpi = None
    else:
        log_varpi = -np.log(rng.gen.standard_gamma(u - v, size=R))
    log_d = np.log(d)
    out = np.empty((R, len(targets)))
    pos = {t: c for c, t in enumerate(targets)}
    if 0 in pos:
        out[:, pos[0]] = 0.0
    sd = np.sqrt(d / 2.0)
    gen = rng.gen
    for j in range(1, steps + 1):
        log_j = np.logaddexp(log_j, log_d - 2.0 * be2)
        be1 = be1 + gen.normal(0.0, sd, size=R)
        be2 = be2 + gen.normal(v * d, sd, size=R)
        if j in pos:
            if log_varpi is None:
                out[:, pos[j]] = be1 + be2
            else:
                out[:, pos[j]] = be1 + be2 + np.logaddexp(0.0, log_j - log_varpi)
    return {"X": np.array(targets, dtype=float) * d, "H": out}


def scaled_initial_data(n: int, u: float, v: float, x_grid, rng: RngStream,
                        n_replicas: int = 1) -> np.ndarray:
    """Sample log of the scaled initial data at lattice level n, jointly on
    the X grid.

    With alpha_n = 1/2 + sqrt(n) and k = sqrt(n) X, the value is
    (sqrt n)^k r2(k) + (1/(varpi sqrt n)) sum_{l=1}^{k} (sqrt n)^l r1(l)
    (sqrt n)^{k+1-l} r2(k)/r2(l-1), evaluated in log domain with all powers
    kept explicit. Requires sqrt(n) X integer on the grid.
    """
    sqrt_n = np.sqrt(n)
    alpha_n = 0.5 + sqrt_n
    ks = []
    for x in x_grid:
        kf = sqrt_n * x
        k = int(round(kf))
        if abs(kf - k) > 1e-9 or k < 0:
            raise ValueError(f"sqrt(n) X must be a nonnegative integer, got {kf}")
        ks.append(k)
    k_max = max(ks)
    s = 0.5 * np.log(n)
    R = n_replicas
    log_r2 = _log_ig_walk(alpha_n - v, k_max, rng, R)
    if u == v:
        log_varpi = None
    else:
        log_r1 = _log_ig_walk(alpha_n + v, k_max, rng, R)
        log_varpi = -np.log(rng.gen.standard_gamma(u - v, size=R))
    out = np.empty((R, len(ks)))
    if log_varpi is None:
        for c, k in enumerate(ks):
            out[:, c] = k * s + log_r2[:, k]
        return out
    # summand at (l, k) collapses to
    #   k*s + log r2(k) - log varpi + [log r1(l) - log r2(l-1)]
    # and the bracket is accumulated as s + log r1(l) - log r2(l-1), which
    # stays O(1) in l, with a compensating -s outside the sum
    base = s + log_r1[:, 1:] - log_r2[:, :-1]
    lse = np.logaddexp.accumulate(base, axis=1)
    for c, k in enumerate(ks):
        lead = k * s + log_r2[:, k]
        if k == 0:
            out[:, c] = lead
        else:
            tail = k * s + log_r2[:, k] - log_varpi - s + lse[:, k - 1]
            out[:, c] = np.logaddexp(lead, tail)
    return out


def second_moment_analytic(n: int, u: float, v: float, x: float) -> float:
    """Closed-form E[(exp H_n(0, X))^2] from the walk moment factorization.

    Writing the value as A + B with A the pure r2 term and B the boundary
    sum, the expectation is E[A^2] + 2 E[A B] + E[B^2]; each factor reduces
    to products of inverse-gamma moments M_k(+-v) of shape alpha_n +- v and
    gamma moments of 1/varpi. Requires alpha_n +- v > 2 and u > v (or u = v,
    where only the first term survives); k = sqrt(n) X must be integral.
    """
    sqrt_n = np.sqrt(n)
    alpha_n = 0.5 + sqrt_n
    kf = sqrt_n * x
    k = int(round(kf))
    if abs(kf - k) > 1e-9 or k < 0:
        raise ValueError(f"sqrt(n) X must be a nonnegative integer, got {kf}")
    if not alpha_n - abs(v) > 2:
        raise ValueError("second moments need alpha_n +- v > 2")
    m2m = inverse_gamma_moment(alpha_n - v, 2)   # M_2(-v)
    a2 = (n * m2m) ** k
    if u == v:
        return float(a2)
    if not u > v:
        raise ValueError("need u >= v")
    m1p = inverse_gamma_moment(alpha_n + v, 1)   # M_1(+v)
    m1m = inverse_gamma_moment(alpha_n - v, 1)
    m2p = inverse_gamma_moment(alpha_n + v, 2)
    e_inv = u - v                                # E[1/varpi], varpi ~ IG(u-v)
    e_inv2 = (u - v) * (u - v + 1.0)
    if k == 0:
        return float(a2)
    g1 = n * m1p * m1m
    g2m = n * m2m
    g2p = n * m2p
    cross = 0.0
    for l in range(1, k + 1):
        cross += (1.0 / (sqrt_n * m1m)) * g1**l * g2m ** (k + 1 - l)
    cross *= 2.0 * e_inv / sqrt_n
    sq = 0.0
    for l in range(1, k + 1):
        for lp in range(1, k + 1):
            lo, hi = min(l, lp), max(l, lp)
            sq += g2p**lo * g1 ** (hi - lo) * g2m ** (k + 1 - hi)
    sq *= e_inv2 / n
    return float(a2 + cross + sq)
