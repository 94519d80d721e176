"""Data-generating process and learning filters.

The model is

    y_t = delta0 + beta0 * a_{t-1} + eps_t
    a_t = a_{t-1} + (theta0 / t) * (y_t - a_{t-1})
    z_t = a_{t-1} + u_t

with ``a_0`` the initial learning state. ``alpha0 = delta0 / (1 - beta0)`` is the
fixed point the state converges to.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "ModelParams",
    "NoiseSource",
    "SimPath",
    "simulate_path",
    "filter_candidate",
    "filter_dagger",
    "filter_derivatives",
]

Sampler = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class ModelParams:
    """True parameters of the model.

    ``a_init`` defaults to ``alpha0``. ``a_init_sd > 0`` switches to a Gaussian
    initial state with mean ``a_init``, drawn from its own substream.
    """

    theta0: float
    beta0: float
    delta0: float
    sigma_eps: float = 1.0
    sigma_u: float = 1.0
    a_init: float | None = None
    theta_lo: float = 1.05
    theta_hi: float = 6.0
    a_init_sd: float = 0.0

    def __post_init__(self) -> None:
        vals = (self.theta0, self.beta0, self.delta0, self.sigma_eps, self.sigma_u,
                self.theta_lo, self.theta_hi, self.a_init_sd)
        if not all(math.isfinite(v) for v in vals):
            raise ParameterError("parameters must be finite")
        if not 1.0 < self.theta_lo < self.theta0 < self.theta_hi:
            raise ParameterError(
                f"need 1 < theta_lo < theta0 < theta_hi, got "
                f"{self.theta_lo}, {self.theta0}, {self.theta_hi}"
            )
        if not self.beta0 < 1.0:
            raise ParameterError(f"beta0 must be < 1, got {self.beta0}")
        if not self.theta0 * (1.0 - self.beta0) > 0.5:
            raise ParameterError(
                f"need theta0 * (1 - beta0) > 1/2, got {self.theta0 * (1.0 - self.beta0)}"
            )
        # Zero standard deviations switch noise off; negative values are invalid.
        if self.sigma_eps < 0.0 or self.sigma_u < 0.0 or self.a_init_sd < 0.0:
            raise ParameterError("standard deviations must be nonnegative")
        if self.a_init is None:
            object.__setattr__(self, "a_init", self.alpha0)
        elif not math.isfinite(self.a_init):
            raise ParameterError("a_init must be finite")

    @property
    def alpha0(self) -> float:
        return self.delta0 / (1.0 - self.beta0)

    @property
    def c0(self) -> float:
        return 1.0 - self.beta0

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.theta_lo, self.theta_hi)


@dataclass(frozen=True)
class NoiseSource:
    """Reproducible random stream for one replication.

    The pair ``(master_seed, stream_id)`` seeds a ``SeedSequence`` whose children
    drive ``eps``, ``u`` and the initial state separately. Because each series has
    its own stream, a path of length ``n`` is a prefix of the path of length
    ``n' > n`` drawn from the same source.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.master_seed) < 2**64:
            raise DomainError("master_seed must be an unsigned 64-bit integer")
        if int(self.stream_id) < 0:
            raise DomainError("stream_id must be nonnegative")

    def generators(self) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
        """Fresh generators for ``(eps, u, a_init)``."""
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_id),))
        return tuple(np.random.Generator(np.random.PCG64DXSM(c)) for c in ss.spawn(3))


def _standard_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.standard_normal(size)


@dataclass(frozen=True)
class SimPath:
    """One simulated trajectory. ``a`` has ``n + 1`` entries, ``a[0]`` the initial state."""

    n: int
    eps: np.ndarray
    u: np.ndarray
    a: np.ndarray
    y: np.ndarray
    z: np.ndarray
    params: ModelParams = field(repr=False)

    def prefix(self, n: int) -> SimPath:
        """The first ``n`` periods of this path."""
        if not 1 <= n <= self.n:
            raise DomainError(f"prefix length must be in 1..{self.n}, got {n}")
        return SimPath(n, self.eps[:n], self.u[:n], self.a[: n + 1], self.y[:n], self.z[:n],
                       self.params)


@nb.njit(cache=True, nogil=True)
def _simulate(theta0, beta0, delta0, a0, eps, u):
    n = eps.size
    a = np.empty(n + 1)
    y = np.empty(n)
    z = np.empty(n)
    a[0] = a0
    for t in range(1, n + 1):
        y[t - 1] = delta0 + beta0 * a[t - 1] + eps[t - 1]
        z[t - 1] = a[t - 1] + u[t - 1]
        a[t] = a[t - 1] + theta0 / t * (y[t - 1] - a[t - 1])
    return a, y, z


def simulate_path(
    params: ModelParams,
    n: int,
    noise: NoiseSource | None = None,
    *,
    eps: np.ndarray | None = None,
    u: np.ndarray | None = None,
    eps_sampler: Sampler = _standard_normal,
    u_sampler: Sampler = _standard_normal,
) -> SimPath:
    """Simulate ``n`` periods of the model.

    Parameters
    ----------
    params : ModelParams
    n : int
        Number of periods, at least 1.
    noise : NoiseSource, optional
        Random source; defaults to ``NoiseSource(0, 0)``.
    eps, u : array, optional
        Innovations to use verbatim (already scaled). When omitted they are drawn
        as ``sigma * sampler(rng, n)``.
    eps_sampler, u_sampler : callable
        ``(generator, size) -> array`` of standardized draws. Standard normal by
        default.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    noise = NoiseSource(0, 0) if noise is None else noise
    rng_eps, rng_u, rng_a = noise.generators()
    if eps is None:
        eps = params.sigma_eps * np.asarray(eps_sampler(rng_eps, n), dtype=float)
    if u is None:
        u = params.sigma_u * np.asarray(u_sampler(rng_u, n), dtype=float)
    eps = np.ascontiguousarray(eps, dtype=float)
    u = np.ascontiguousarray(u, dtype=float)
    if eps.shape != (n,) or u.shape != (n,):
        raise DomainError("eps and u must have length n")
    a0 = params.a_init
    if params.a_init_sd > 0.0:
        a0 = a0 + params.a_init_sd * rng_a.standard_normal()
    a, y, z = _simulate(params.theta0, params.beta0, params.delta0, float(a0), eps, u)
    return SimPath(n, eps, u, a, y, z, params)


def _check_theta(theta: float, bounds: tuple[float, float] | None) -> float:
    theta = float(theta)
    if not math.isfinite(theta):
        raise DomainError(f"theta must be finite, got {theta}")
    if bounds is not None and not bounds[0] <= theta <= bounds[1]:
        raise DomainError(f"theta={theta} outside bounds {bounds}")
    return theta


def _as_series(y) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise DomainError("y must be a nonempty 1-d array")
    return y


@nb.njit(cache=True, nogil=True)
def _filter(theta, a_start, y):
    n = y.size
    a = np.empty(n + 1)
    a[0] = a_start
    for t in range(1, n + 1):
        a[t] = a[t - 1] + theta / t * (y[t - 1] - a[t - 1])
    return a


def filter_candidate(theta: float, a_start: float, y, bounds: tuple[float, float] | None = None) -> np.ndarray:
    """Learning recursion at a candidate ``theta`` started from ``a_start``.

    Returns ``a_0..a_n`` with ``a_0 = a_start``. ``bounds`` (optional) enforces
    ``theta`` in the parameter interval.
    """
    theta = _check_theta(theta, bounds)
    return _filter(theta, float(a_start), _as_series(y))


def filter_dagger(theta: float, alpha0: float, y, a_start: float | None = None,
                  bounds: tuple[float, float] | None = None) -> np.ndarray:
    """Filter whose states ``t >= 1`` equal ``alpha0 + sum_t g_{t,n}(theta)(y_t - alpha0)``.

    This is the candidate recursion started at ``alpha0``. Slot 0 holds
    ``a_start`` (the initial state of the data) when supplied, else ``alpha0``.
    """
    theta = _check_theta(theta, bounds)
    out = _filter(theta, float(alpha0), _as_series(y))
    if a_start is not None:
        out[0] = float(a_start)
    return out


@nb.njit(cache=True, nogil=True)
def _derivatives(theta, alpha0, y, max_order):
    n = y.size
    d = np.zeros((max_order + 1, n + 1))
    d[0, 0] = alpha0
    for t in range(1, n + 1):
        f = 1.0 - theta / t
        for m in range(max_order, 1, -1):
            d[m, t] = d[m, t - 1] * f - m / t * d[m - 1, t - 1]
        d[1, t] = d[1, t - 1] * f + (y[t - 1] - d[0, t - 1]) / t
        d[0, t] = d[0, t - 1] + theta / t * (y[t - 1] - d[0, t - 1])
    return d


def filter_derivatives(theta: float, alpha0: float, y, max_order: int,
                       bounds: tuple[float, float] | None = None) -> np.ndarray:
    """Theta-derivatives of the dagger filter, orders ``1..max_order``.

    Returns
    -------
    ndarray, shape (max_order, n + 1)
        Row ``m - 1`` holds ``a^(m)_0..a^(m)_n``; every row starts at 0.
    """
    max_order = int(max_order)
    if not 1 <= max_order <= 4:
        raise DomainError(f"max_order must be in 1..4, got {max_order}")
    theta = _check_theta(theta, bounds)
    return _derivatives(theta, float(alpha0), _as_series(y), max_order)[1:]
