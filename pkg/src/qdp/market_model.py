"""
Correlated geometric Brownian motion in price and return space.

Holds the market-model parameters shared by every pricer and resource
estimator: per-asset volatilities, a correlation matrix, a uniform time
grid, and the truncated/discretized lattice of log-returns on which the
exact pricer and the circuit cost models operate.

Log-returns over one step are jointly normal with per-asset mean
mu_j = (r - sigma_j^2 / 2) * dt and covariance
Sigma_ij = dt * rho_ij * sigma_i * sigma_j; steps are i.i.d., so joint
path densities factorize across time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import multivariate_normal, norm


@dataclass(frozen=True)
class GBMParams:
    """Market model parameters for d correlated GBM assets.

    Parameters
    ----------
    r : float
        Annualized risk-free rate.
    sigmas : tuple of float
        Annualized per-asset volatilities, length d, all positive.
    rho : tuple of tuple of float
        d x d correlation matrix, unit diagonal, entries in [-1, 1].
    dt : float
        Timestep in years, positive.
    n_steps : int
        Number of timesteps T; the contract horizon is dt * n_steps.
    s0 : tuple of float
        Initial prices, length d, all positive.
    """

    r: float
    sigmas: tuple[float, ...]
    rho: tuple[tuple[float, ...], ...]
    dt: float
    n_steps: int
    s0: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))
        object.__setattr__(self, "s0", tuple(float(s) for s in self.s0))
        object.__setattr__(
            self, "rho", tuple(tuple(float(x) for x in row) for row in self.rho)
        )
        d = len(self.sigmas)
        rho = np.asarray(self.rho, dtype=float)
        if d == 0:
            raise ValueError("need at least one asset")
        if rho.shape != (d, d):
            raise ValueError(f"rho must be {d}x{d}, got {rho.shape}")
        if not np.allclose(rho, rho.T, atol=1e-12):
            raise ValueError("rho must be symmetric")
        if not np.allclose(np.diag(rho), 1.0, atol=1e-12):
            raise ValueError("rho must have unit diagonal")
        if np.any(np.abs(rho) > 1 + 1e-12):
            raise ValueError("rho entries must lie in [-1, 1]")
        if any(s <= 0 for s in self.sigmas):
            raise ValueError("volatilities must be positive")
        if any(s <= 0 for s in self.s0):
            raise ValueError("initial prices must be positive")
        if len(self.s0) != d:
            raise ValueError("s0 length must match sigmas length")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be a positive integer")

    @property
    def d(self) -> int:
        """Asset count."""
        return len(self.sigmas)

    @property
    def horizon(self) -> float:
        """Contract horizon in years, dt * n_steps."""
        return self.dt * self.n_steps

    def step_means(self) -> np.ndarray:
        """Per-step log-return drift vector mu_j = (r - sigma_j^2/2) dt."""
        sig = np.asarray(self.sigmas)
        return (self.r - 0.5 * sig**2) * self.dt

    def to_json(self) -> str:
        """Serialize to the documented JSON schema."""
        return json.dumps(
            {
                "r": self.r,
                "sigmas": list(self.sigmas),
                "rho": [list(row) for row in self.rho],
                "dt": self.dt,
                "d": self.d,
                "T": self.n_steps,
                "s0": list(self.s0),
            }
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "GBMParams":
        """Build from a parsed JSON document (keys r, sigmas, rho, dt, T, s0)."""
        required = {"r", "sigmas", "rho", "dt", "T", "s0"}
        missing = required - doc.keys()
        if missing:
            raise ValueError(f"model config missing keys: {sorted(missing)}")
        params = cls(
            r=float(doc["r"]),
            sigmas=tuple(doc["sigmas"]),
            rho=tuple(tuple(row) for row in doc["rho"]),
            dt=float(doc["dt"]),
            n_steps=int(doc["T"]),
            s0=tuple(doc["s0"]),
        )
        if "d" in doc and int(doc["d"]) != params.d:
            raise ValueError("declared asset count d disagrees with sigmas length")
        return params

    @classmethod
    def from_json(cls, text: str) -> "GBMParams":
        return cls.from_dict(json.loads(text))


def build_covariance(params: GBMParams) -> np.ndarray:
    """Per-step log-return covariance Sigma_ij = dt * rho_ij * sigma_i * sigma_j.

    Raises
    ------
    ValueError
        If the implied matrix is not positive-definite (e.g. |rho| = 1).
    """
    sig = np.asarray(params.sigmas)
    cov = params.dt * np.asarray(params.rho) * np.outer(sig, sig)
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        eigs = np.linalg.eigvalsh(cov)
        raise ValueError(
            f"covariance is not positive-definite (min eigenvalue {eigs.min():.3e})"
        )
    return cov


def cholesky_factor(cov: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L @ L.T = cov."""
    cov = np.asarray(cov, dtype=float)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise ValueError("matrix is not positive-definite")


def sigma_max(cov: np.ndarray, as_sqrt_eigenvalue: bool = True) -> float:
    """Width scale used for lattice truncation bounds.

    The default reads it as sqrt of the largest covariance eigenvalue, so
    that w * sigma_max carries log-return units.  Passing
    ``as_sqrt_eigenvalue=False`` selects the alternative literal reading
    (the eigenvalue itself).
    """
    lam = float(np.linalg.eigvalsh(np.asarray(cov, dtype=float)).max())
    return float(np.sqrt(lam)) if as_sqrt_eigenvalue else lam


@dataclass(frozen=True)
class GridSpec:
    """Uniform truncated grid for per-(asset, step) log-return registers.

    Parameters
    ----------
    n : int
        Qubits per register; 2^n cells per dimension.
    w : float
        Truncation half-width in units of sigma_max.
    sigma_max_as_sqrt_eigenvalue : bool
        Convention for sigma_max; see :func:`sigma_max`.
    """

    n: int
    w: float
    sigma_max_as_sqrt_eigenvalue: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.w <= 0:
            raise ValueError("w must be positive")

    def bounds(self, params: GBMParams) -> tuple[np.ndarray, np.ndarray]:
        """Per-asset truncation interval [B_l, B_u] for one-step log-returns.

        Centered at the per-asset drift with half-width w * sigma_max, so
        every marginal standard deviation is covered by at least w sigmas.
        """
        cov = build_covariance(params)
        half = self.w * sigma_max(cov, self.sigma_max_as_sqrt_eigenvalue)
        mu = params.step_means()
        return mu - half, mu + half


@dataclass(frozen=True)
class Lattice:
    """Midpoint discretization of the one-step log-return distribution.

    Attributes
    ----------
    coords : np.ndarray, shape (d, 2^n)
        Cell midpoints per asset dimension.
    step_pmf : np.ndarray, shape (2^n,) * d
        Joint probability mass density(x) * cell volume at each midpoint
        tuple; identical for every timestep (i.i.d. steps).
    dx : np.ndarray, shape (d,)
        Cell widths per dimension.
    """

    coords: np.ndarray
    step_pmf: np.ndarray
    dx: np.ndarray

    @property
    def n_cells(self) -> int:
        return self.coords.shape[1]

    def marginal_pmf(self, j: int) -> np.ndarray:
        """Marginal mass over dimension j (sums the joint over the others)."""
        axes = tuple(i for i in range(self.step_pmf.ndim) if i != j)
        return self.step_pmf.sum(axis=axes) if axes else self.step_pmf


def lattice(grid: GridSpec, params: GBMParams) -> Lattice:
    """Discretize the one-step return distribution on cell midpoints.

    Cell i in dimension j covers [B_l_j + i*dx_j, B_l_j + (i+1)*dx_j) with
    its mass taken as density(midpoint) * cell volume.  Mass outside the
    truncation box is dropped, not renormalized.
    """
    cov = build_covariance(params)
    b_l, b_u = grid.bounds(params)
    n_cells = 2**grid.n
    dx = (b_u - b_l) / n_cells
    coords = np.stack(
        [b_l[j] + (np.arange(n_cells) + 0.5) * dx[j] for j in range(params.d)]
    )
    mesh = np.meshgrid(*coords, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    logpdf = multivariate_normal(mean=params.step_means(), cov=cov).logpdf(points)
    log_volume = float(np.sum(np.log(dx)))
    pmf = np.exp(np.asarray(logpdf) + log_volume).reshape((n_cells,) * params.d)
    return Lattice(coords=coords, step_pmf=pmf, dx=dx)


def returns_to_prices(s0, path: np.ndarray) -> np.ndarray:
    """Prices from cumulative log-returns: S_j^t = S_j^0 exp(sum_{u<=t} R_j^u).

    Parameters
    ----------
    s0 : array_like, shape (d,) or scalar
        Initial prices.
    path : np.ndarray, shape (T, d) or (T,)
        Per-step log-returns.

    Returns
    -------
    np.ndarray with the shape of ``path``; prices after each step.
    """
    path = np.asarray(path, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    return s0 * np.exp(np.cumsum(path, axis=0))


def transition_density_price(s_t, s_prev, params: GBMParams) -> float:
    """One-step transition density in price space (multivariate log-normal).

    Evaluates the density of S^t given S^{t-1} under the GBM step: log
    price ratios are jointly normal, and the log-normal Jacobian divides
    by each component of s_t.
    """
    s_t = np.atleast_1d(np.asarray(s_t, dtype=float))
    s_prev = np.atleast_1d(np.asarray(s_prev, dtype=float))
    if np.any(s_t <= 0) or np.any(s_prev <= 0):
        raise ValueError("prices must be strictly positive")
    cov = build_covariance(params)
    log_ratio = np.log(s_t / s_prev)
    logpdf = multivariate_normal(mean=params.step_means(), cov=cov).logpdf(log_ratio)
    return float(np.exp(logpdf - np.sum(np.log(s_t))))


def joint_density_return(path: np.ndarray, params: GBMParams) -> float:
    """Joint density of a T x d log-return path (i.i.d. normal steps).

    Accumulates per-step log-densities before exponentiating so that
    long, low-probability paths do not underflow.
    """
    path = np.asarray(path, dtype=float)
    if path.ndim == 1:
        path = path[:, None]
    cov = build_covariance(params)
    logpdf = multivariate_normal(mean=params.step_means(), cov=cov).logpdf(path)
    return float(np.exp(np.sum(logpdf)))


def tail_mass_outside(w: float) -> float:
    """Standard-normal mass outside [-w, w], 2 * Phi(-w)."""
    return float(2.0 * norm.cdf(-w))
