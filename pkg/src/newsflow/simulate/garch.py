"""MA(1)-GARCH(1,1) quasi-maximum-likelihood estimation and filtering.

Mean equation r_t = mu + theta*eps_{t-1} + eps_t, variance recursion
h_t = omega + alpha*eps_{t-1}^2 + beta*h_{t-1}.  The pre-sample residual is
zero and the variance recursion is seeded with the sample variance
(h_0 = omega + (alpha+beta)*var(r)).  Estimation runs Nelder-Mead on an
unconstrained reparameterization from three fixed starting points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from ..errors import InputError, NonConvergence, NonStationarySolution

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class MA1Garch11Params:
    mu: float
    theta: float
    omega: float
    alpha: float
    beta: float
    loglik: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.omega <= 0.0:
            raise NonStationarySolution(f"omega must be positive, got {self.omega}")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise NonStationarySolution("alpha and beta must be nonnegative")
        if self.alpha + self.beta >= 1.0:
            raise NonStationarySolution(
                f"alpha + beta must be < 1, got {self.alpha + self.beta}"
            )
        if abs(self.theta) >= 1.0:
            raise InputError(f"MA coefficient must lie in (-1, 1), got {self.theta}")

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)


def filter_ma1_garch11(returns: np.ndarray, params: MA1Garch11Params) -> tuple[np.ndarray, np.ndarray]:
    """Residuals eps_t and conditional variances h_t under the conventions above."""
    r = np.asarray(returns, dtype=float)
    x = r - params.mu
    # eps_t = x_t - theta * eps_{t-1}, pre-sample eps = 0
    eps = lfilter([1.0], [1.0, params.theta], x)
    backcast = float(np.var(r))
    drive = np.empty_like(eps)
    drive[0] = params.omega + (params.alpha + params.beta) * backcast
    drive[1:] = params.omega + params.alpha * eps[:-1] ** 2
    # h_t = drive_t + beta * h_{t-1}
    h = lfilter([1.0], [1.0, -params.beta], drive)
    return eps, h


def standardize_residuals(returns: np.ndarray, params: MA1Garch11Params) -> np.ndarray:
    """z_t = eps_t / sqrt(h_t)."""
    eps, h = filter_ma1_garch11(returns, params)
    return eps / np.sqrt(h)


def _negative_loglik(raw: np.ndarray, returns: np.ndarray, backcast: float) -> float:
    mu, theta, omega, alpha, beta = _from_unconstrained(raw)
    x = returns - mu
    eps = lfilter([1.0], [1.0, theta], x)
    drive = np.empty_like(eps)
    drive[0] = omega + (alpha + beta) * backcast
    drive[1:] = omega + alpha * eps[:-1] ** 2
    h = lfilter([1.0], [1.0, -beta], drive)
    if not np.all(np.isfinite(h)) or h.min() <= 0.0:
        return 1e12
    value = 0.5 * float(np.sum(_LOG_2PI + np.log(h) + eps**2 / h))
    return value if math.isfinite(value) else 1e12


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _from_unconstrained(raw: np.ndarray) -> tuple[float, float, float, float, float]:
    mu = float(raw[0])
    theta = math.tanh(float(raw[1]))
    omega = math.exp(min(float(raw[2]), 50.0))
    persistence = _sigmoid(float(raw[3])) * (1.0 - 1e-7)
    share = _sigmoid(float(raw[4]))
    return mu, theta, omega, persistence * share, persistence * (1.0 - share)


def _to_unconstrained(mu, theta, omega, alpha, beta) -> np.ndarray:
    persistence = alpha + beta
    share = alpha / persistence
    logit = lambda p: math.log(p / (1.0 - p))
    return np.array([
        mu,
        math.atanh(theta),
        math.log(omega),
        logit(persistence),
        logit(share),
    ])


def fit_ma1_garch11(
    returns: np.ndarray,
    min_length: int = 250,
    fatol: float = 1e-8,
) -> MA1Garch11Params:
    """Gaussian QMLE via Nelder-Mead with three fixed restarts."""
    r = np.asarray(returns, dtype=float)
    if len(r) < min_length:
        raise InputError(f"need at least {min_length} observations, got {len(r)}")
    if not np.all(np.isfinite(r)):
        raise InputError("returns contain non-finite values")
    variance = float(np.var(r))
    if variance <= 0.0:
        raise NonConvergence("zero-variance series is degenerate", iterations=0)
    backcast = variance
    mean = float(np.mean(r))

    starts = [
        _to_unconstrained(mean, 0.0, 0.05 * variance, 0.05, 0.90),
        _to_unconstrained(mean, 0.1, 0.10 * variance, 0.10, 0.80),
        _to_unconstrained(mean, -0.1, 0.30 * variance, 0.20, 0.50),
    ]
    best = None
    iterations = 0
    converged = False
    for start in starts:
        res = minimize(
            _negative_loglik,
            start,
            args=(r, backcast),
            method="Nelder-Mead",
            options={"fatol": fatol, "xatol": 1e-6, "maxiter": 6000, "maxfev": 8000},
        )
        iterations += res.nit
        converged = converged or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    if best is None or not math.isfinite(best.fun) or best.fun >= 1e12:
        raise NonConvergence("likelihood never became finite", iterations=iterations)
    mu, theta, omega, alpha, beta = _from_unconstrained(best.x)
    if not converged:
        raise NonConvergence(
            f"optimizer hit the iteration cap (best nll {best.fun:.6f})",
            iterations=iterations,
            best_point=(mu, theta, omega, alpha, beta),
        )
    return MA1Garch11Params(mu=mu, theta=theta, omega=omega, alpha=alpha, beta=beta, loglik=-best.fun)


def loglikelihood(returns: np.ndarray, params: MA1Garch11Params) -> float:
    """Gaussian quasi log-likelihood of a series under fixed parameters."""
    eps, h = filter_ma1_garch11(np.asarray(returns, dtype=float), params)
    return -0.5 * float(np.sum(_LOG_2PI + np.log(h) + eps**2 / h))


def simulate_ma1_garch11(
    params: MA1Garch11Params,
    n: int,
    rng_seed: int | np.random.Generator,
    burn_in: int = 500,
) -> np.ndarray:
    """Generate a return path from the process (after a burn-in stretch)."""
    rng = np.random.default_rng(rng_seed) if isinstance(rng_seed, int) else rng_seed
    total = n + burn_in
    z = rng.standard_normal(total)
    eps = np.empty(total)
    h = np.empty(total)
    h[0] = params.unconditional_variance
    eps[0] = math.sqrt(h[0]) * z[0]
    for t in range(1, total):
        h[t] = params.omega + params.alpha * eps[t - 1] ** 2 + params.beta * h[t - 1]
        eps[t] = math.sqrt(h[t]) * z[t]
    r = params.mu + eps
    r[1:] += params.theta * eps[:-1]
    return r[burn_in:]
