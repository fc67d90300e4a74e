"""Free-energy sweeps over beta and finite-difference observables.

Observables are first derivatives of the free energy surface:

    particle chain:  <(q_l - q_{l+1})^2 / 2> = dF/dgamma
                     <e_l> = d(beta F)/dbeta
    DNLS:            <rho_l> = -dF/dmu
                     <e_l> = d(beta F)/dbeta + mu <rho_l>

They are computed with the order-6 central 7-point stencil; every
stencil point is a full transfer-operator solve (the DNLS quadrature
rule depends on mu and beta, so it is rebuilt per evaluation).  The
default steps h = 1e-3 max(1, |x|) balance the O(h^6) truncation error
against the ~eps/h roundoff amplification; the optimum sits near
eps^(1/7) and is flat over a couple of decades.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (AssemblyError, ConvergenceError, DomainError,
                     ResourceLimitError)
from .models import (CylinderParams, DnlsParams, ParticleChainParams,
                     _chain_free_energy_raw, _dnls_free_energy_raw,
                     cylinder_free_energy, dnls_free_energy,
                     particle_chain_free_energy)

__all__ = ["SweepSpec", "SweepResult", "fd_derivative",
           "particle_chain_observables", "dnls_observables",
           "free_energy_sweep", "OBSERVABLE_COLUMNS"]

# order-6 first-derivative stencil on offsets -3h..3h,
# coefficients (-1, 9, -45, 0, 45, -9, 1)/60
_STENCIL_O6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0

# canonical CSV column order; each model supports a subset
OBSERVABLE_COLUMNS = ("stretch_sq", "energy", "density")

_SUPPORTED_OBSERVABLES = {
    ParticleChainParams: ("stretch_sq", "energy"),
    DnlsParams: ("energy", "density"),
    CylinderParams: (),
}


def default_step(x):
    """Default stencil step 1e-3 max(1, |x|)."""
    return 1e-3 * max(1.0, abs(x))


def fd_derivative(f, x, order=1, accuracy=6, *, h):
    """First derivative of f at x by the order-6 central stencil.

    Only (order=1, accuracy=6) is implemented; the stencil is exact on
    polynomials through degree 6 and has O(h^6) error on smooth f.
    """
    if order != 1 or accuracy != 6:
        raise DomainError(
            f"only the (order=1, accuracy=6) stencil is available, "
            f"got order={order!r}, accuracy={accuracy!r}")
    if not (h > 0.0) or not math.isfinite(h):
        raise DomainError(f"stencil step h must be positive, got {h!r}")
    vals = np.array([f(x + k * h) for k in range(-3, 4)], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError(
            f"non-finite function value on the stencil around x={x!r}")
    # antisymmetric pairing: exact zero on constants and even functions,
    # and the differences cancel before any scaling
    d = (45.0 * (vals[4] - vals[2])
         - 9.0 * (vals[5] - vals[1])
         + (vals[6] - vals[0])) / 60.0
    return float(d) / h


def _check_beta_stencil(beta, h_beta):
    if beta - 3.0 * h_beta <= 0.0:
        raise DomainError(
            f"beta stencil leaves the domain: beta={beta!r}, h={h_beta!r}")


def particle_chain_observables(p, beta, m, h_gamma=None, h_beta=None):
    """(<stretch^2/...>, <e>) = (dF/dgamma, d(beta F)/dbeta) at one point.

    The gamma stencil straddles gamma=0 for the default parameters;
    the raw kernel path accepts that (the matrix stays positive).
    """
    if h_gamma is None:
        h_gamma = default_step(p.gamma)
    if h_beta is None:
        h_beta = default_step(beta)
    _check_beta_stencil(beta, h_beta)
    m = int(m)

    def f_of_gamma(g):
        return _chain_free_energy_raw(p.eta, p.mu3, p.lam, g, beta, m)

    def betaf_of_beta(b):
        return b * _chain_free_energy_raw(p.eta, p.mu3, p.lam, p.gamma, b, m)

    stretch_sq = fd_derivative(f_of_gamma, p.gamma, h=h_gamma)
    energy = fd_derivative(betaf_of_beta, beta, h=h_beta)
    return stretch_sq, energy


def dnls_observables(p, beta, m, h_mu=None, h_beta=None):
    """(<rho>, <e>) = (-dF/dmu, d(beta F)/dbeta + mu <rho>) at one point."""
    if h_mu is None:
        h_mu = default_step(p.mu_c)
    if h_beta is None:
        h_beta = default_step(beta)
    _check_beta_stencil(beta, h_beta)
    m = int(m)

    def f_of_mu(u):
        return _dnls_free_energy_raw(p.g, u, beta, m)

    def betaf_of_beta(b):
        return b * _dnls_free_energy_raw(p.g, p.mu_c, b, m)

    density = -fd_derivative(f_of_mu, p.mu_c, h=h_mu)
    energy = fd_derivative(betaf_of_beta, beta, h=h_beta) + p.mu_c * density
    return density, energy


@dataclass(frozen=True)
class SweepSpec:
    """A free-energy sweep: model parameters, beta grid, quadrature size.

    `observables` is a subset of OBSERVABLE_COLUMNS appropriate for the
    model (chain: stretch_sq/energy, DNLS: energy/density, cylinder:
    none).  Step sizes default to 1e-3 max(1, |x|) when left None.
    """

    params: object
    beta_grid: np.ndarray
    m: int
    observables: tuple = ()
    h_beta: float = None
    h_gamma: float = None
    h_mu: float = None

    def __post_init__(self):
        grid = np.atleast_1d(np.asarray(self.beta_grid, dtype=float))
        object.__setattr__(self, "beta_grid", grid)
        if grid.size == 0:
            raise DomainError("empty beta grid")
        if np.any(grid <= 0.0) or not np.all(np.isfinite(grid)):
            raise DomainError("beta grid must be positive and finite")
        if np.any(np.diff(grid) <= 0.0):
            raise DomainError("beta grid must be strictly increasing")
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise DomainError(f"m must be a positive integer, got {self.m!r}")
        supported = None
        for cls, cols in _SUPPORTED_OBSERVABLES.items():
            if isinstance(self.params, cls):
                supported = cols
        if supported is None:
            raise DomainError(
                f"unknown model parameter type {type(self.params).__name__}")
        obs = tuple(self.observables)
        for name in obs:
            if name not in supported:
                raise DomainError(
                    f"observable {name!r} not available for "
                    f"{type(self.params).__name__} (supported: {supported})")
        # keep canonical column order regardless of request order
        obs = tuple(c for c in OBSERVABLE_COLUMNS if c in obs)
        object.__setattr__(self, "observables", obs)


@dataclass(frozen=True)
class SweepResult:
    """One row per grid point: beta, F, and any requested observables."""

    spec: SweepSpec
    free_energy: np.ndarray
    observables: dict = field(default_factory=dict)

    @property
    def betas(self):
        return self.spec.beta_grid

    def columns(self):
        """(header, column arrays) in CSV order."""
        names = ["beta", "free_energy"] + list(self.spec.observables)
        cols = [self.betas, self.free_energy]
        cols += [self.observables[k] for k in self.spec.observables]
        return names, cols


def _free_energy_point(params, beta, m):
    if isinstance(params, ParticleChainParams):
        return particle_chain_free_energy(params, beta, m)
    if isinstance(params, DnlsParams):
        return dnls_free_energy(params, beta, m)
    if isinstance(params, CylinderParams):
        return cylinder_free_energy(params, beta, m)
    raise DomainError(f"unknown model parameter type {type(params).__name__}")


def _sweep_row(spec, beta):
    try:
        f = _free_energy_point(spec.params, beta, spec.m)
        obs = {}
        if spec.observables:
            if isinstance(spec.params, ParticleChainParams):
                stretch, energy = particle_chain_observables(
                    spec.params, beta, spec.m, spec.h_gamma, spec.h_beta)
                available = {"stretch_sq": stretch, "energy": energy}
            else:
                density, energy = dnls_observables(
                    spec.params, beta, spec.m, spec.h_mu, spec.h_beta)
                available = {"density": density, "energy": energy}
            obs = {k: available[k] for k in spec.observables}
    except (AssemblyError, ConvergenceError, ResourceLimitError) as exc:
        # keep the exception type, name the grid point that failed
        raise type(exc)(f"at beta={float(beta)!r}, m={spec.m}: {exc}") from exc
    return f, obs


def free_energy_sweep(spec, threads=None):
    """Evaluate the sweep, optionally on a thread pool over grid points.

    Rows come back in grid order regardless of completion order; the
    per-point solves are independent (numpy linear algebra releases the
    GIL, so threads give real parallelism for the matrix work).
    """
    betas = spec.beta_grid
    if threads is not None and threads > 1 and betas.size > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            rows = list(pool.map(lambda b: _sweep_row(spec, b), betas))
    else:
        rows = [_sweep_row(spec, b) for b in betas]
    free = np.array([r[0] for r in rows])
    obs = {k: np.array([r[1][k] for r in rows]) for k in spec.observables}
    return SweepResult(spec=spec, free_energy=free, observables=obs)
