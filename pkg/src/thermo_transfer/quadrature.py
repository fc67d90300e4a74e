"""Gauss quadrature rules for the three measures in play.

* a rescaled Gauss-Hermite rule for the normalized Gaussian
  omega(q) = sqrt(a/2pi) e^{-a q^2/2} on the full line (variance 1/a),
* a rule for the truncated Gaussian c e^{-a(z-b)^2/2} on [0, inf),
  whose recurrence coefficients are not classical and are produced by
  a discretized Stieltjes procedure,
* tensor products of a 1D rule for the ring-of-sites measure.

Nodes and weights always come out of the Golub-Welsch construction:
the nodes are the eigenvalues of the symmetric tridiagonal Jacobi
matrix built from the three-term recurrence of the monic orthogonal
polynomials, and w_i = beta_0 * (first eigenvector component)^2.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DomainError, ResourceLimitError
from .specfun import erfc

__all__ = [
    "QuadratureRule",
    "RecurrenceCoefficients",
    "TensorRule",
    "gauss_hermite_rescaled",
    "stieltjes_recurrence",
    "golub_welsch",
    "tensor_product",
    "truncated_gaussian_normalization",
]

# Gaussian tail beyond 12 standard deviations is < 1e-31, invisible in
# double precision; used to truncate the half-line discretization grid.
_TAIL_SIGMAS = 12.0


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes z_i and positive weights w_i with int f dnu ~ sum w_i f(z_i)."""

    nodes: np.ndarray
    weights: np.ndarray
    total_mass: float = 1.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise DomainError("nodes and weights must be 1D arrays of equal length")
        if nodes.size == 0:
            raise DomainError("empty quadrature rule")
        if np.any(weights <= 0.0):
            raise DomainError("quadrature weights must be strictly positive")
        if np.any(np.diff(nodes) <= 0.0):
            raise DomainError("quadrature nodes must be strictly increasing")

    def __len__(self):
        return self.nodes.size

    def integrate(self, f):
        """Apply the rule to a vectorized function f."""
        return float(np.dot(self.weights, f(self.nodes)))


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """Monic three-term recurrence data alpha_0..alpha_{m-1}, beta_0..beta_{m-1}.

    beta_0 carries the total mass of the measure; all beta_k must be
    positive for the measure to be positive definite.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if alpha.ndim != 1 or alpha.shape != beta.shape:
            raise DomainError("alpha and beta must be 1D arrays of equal length")
        if np.any(beta <= 0.0):
            raise DomainError("recurrence coefficients beta_k must be positive")

    def __len__(self):
        return self.alpha.size


@dataclass(frozen=True)
class TensorRule:
    """Full tensor product of a base rule over `dimension` coordinates.

    Multi-indices are enumerated lexicographically with the rightmost
    index varying fastest, so the flat layout is reproducible.  Row i
    of `nodes` is the node vector q_i, `weights[i]` the product weight.
    """

    base: QuadratureRule
    dimension: int
    nodes: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        m0 = len(self.base)
        dim = self.dimension
        size = m0 ** dim
        idx = np.indices((m0,) * dim).reshape(dim, size).T  # rightmost fastest
        object.__setattr__(self, "nodes", self.base.nodes[idx])
        object.__setattr__(self, "weights", np.prod(self.base.weights[idx], axis=1))

    def __len__(self):
        return self.weights.size

    @property
    def total_mass(self):
        return self.base.total_mass ** self.dimension


def _hermite_recurrence(m, a):
    # Monic orthogonal polynomials of the normalized Gaussian with
    # variance 1/a: alpha_k = 0, beta_0 = 1 (unit mass), beta_k = k/a.
    alpha = np.zeros(m)
    beta = np.empty(m)
    beta[0] = 1.0
    if m > 1:
        beta[1:] = np.arange(1, m) / a
    return RecurrenceCoefficients(alpha, beta)


def gauss_hermite_rescaled(m, a):
    """Gauss rule for the normalized Gaussian measure with precision a.

    Exact for polynomials up to degree 2m-1 against
    dnu = sqrt(a/2pi) e^{-a q^2/2} dq; total mass 1.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    if not (a > 0.0) or not math.isfinite(a):
        raise DomainError(f"precision parameter a must be positive, got {a!r}")
    return golub_welsch(_hermite_recurrence(int(m), float(a)))


def golub_welsch(rc):
    """Quadrature rule from recurrence coefficients via the Jacobi matrix.

    Nodes are the eigenvalues of the symmetric tridiagonal matrix with
    diagonal alpha and off-diagonal sqrt(beta_1..beta_{m-1}); the weight
    attached to node i is beta_0 times the squared first component of
    the associated normalized eigenvector.
    """
    m = len(rc)
    if m == 1:
        return QuadratureRule(np.array([rc.alpha[0]]), np.array([rc.beta[0]]),
                              total_mass=float(rc.beta[0]))
    try:
        # the default stemr driver flushes eigenvector components below
        # ~1e-40 to exact zero, which destroys the tail weights of rules
        # beyond m ~ 55; the classic QR driver keeps them to underflow
        vals, vecs = eigh_tridiagonal(rc.alpha, np.sqrt(rc.beta[1:]),
                                      lapack_driver="stev")
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceError(f"Jacobi eigenproblem failed: {exc}") from exc
    weights = rc.beta[0] * vecs[0, :] ** 2
    # eigh_tridiagonal returns ascending eigenvalues already
    return QuadratureRule(vals, weights, total_mass=float(rc.beta[0]))


def truncated_gaussian_normalization(a, b):
    """Constant c making c e^{-a(z-b)^2/2} a probability density on [0, inf).

    c = 2 sqrt(a/2pi) / erfc(-b sqrt(a/2)); the denominator is the
    complementary form of 1 + erf(b sqrt(a/2)), which keeps full
    relative accuracy when the mode b sits far below the domain and
    the surviving mass is tiny.
    """
    if not (a > 0.0):
        raise DomainError(f"a must be positive, got {a!r}")
    mass = erfc(-b * math.sqrt(0.5 * a))
    if mass == 0.0:
        raise DomainError(
            f"truncated-Gaussian mass on [0, inf) underflows for "
            f"a={a!r}, b={b!r} (mode more than ~38 sigma below zero)")
    return 2.0 * math.sqrt(a / (2.0 * math.pi)) / mass


def _legendre_panel(n):
    # Gauss-Legendre nodes/weights on [-1, 1] from the Jacobi matrix of
    # the Legendre recurrence beta_k = k^2/(4k^2 - 1), total mass 2.
    if n == 1:
        return np.array([0.0]), np.array([2.0])
    k = np.arange(1, n)
    off = k / np.sqrt(4.0 * k * k - 1.0)
    vals, vecs = eigh_tridiagonal(np.zeros(n), off)
    return vals, 2.0 * vecs[0, :] ** 2


def _composite_legendre(lo, hi, panels, pts):
    x0, w0 = _legendre_panel(pts)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w


def _lanczos_recurrence(x, w, m):
    # Discretized Stieltjes procedure, in the numerically stable guise
    # of Lanczos with full reorthogonalization applied to the diagonal
    # "multiplication by x" operator in the discrete inner product
    # <f, g> = sum w_i f(x_i) g(x_i).
    mass = w.sum()
    alpha = np.zeros(m)
    beta = np.zeros(m)
    beta[0] = mass
    sw = np.sqrt(w)
    q = sw / math.sqrt(mass)
    basis = [q]
    q_prev = np.zeros_like(q)
    b = 0.0
    for k in range(m):
        alpha[k] = np.dot(q * x, q)
        if k == m - 1:
            break
        r = x * q - alpha[k] * q - b * q_prev
        # full reorthogonalization, twice, against all previous vectors
        for _ in range(2):
            for p in basis:
                r -= np.dot(p, r) * p
        b2 = np.dot(r, r)
        if b2 <= 0.0:
            raise ConvergenceError(
                "discretized measure has fewer support points than requested "
                f"coefficients (broke down at k={k + 1})", residual=b2)
        b = math.sqrt(b2)
        beta[k + 1] = b2
        q_prev = q
        q = r / b
        basis.append(q)
    return alpha, beta


def stieltjes_recurrence(a, b, m, c=None, lower=0.0):
    """Recurrence coefficients of the (truncated) Gaussian measure.

    The measure is c e^{-a(z-b)^2/2} dz on [lower, inf); by default
    lower = 0 and c is the normalizing constant, so beta_0 = 1.  Pass
    lower=None for the full-line sanity variant (with c = 1/sqrt(2pi/a)
    this reproduces the monic Hermite recurrence alpha_k = 0,
    beta_k = k/a).

    The coefficients are produced by a discretized Stieltjes procedure:
    the measure is replaced by a composite Gauss-Legendre discretization
    on [lower, max(b, lower) + 12/sqrt(a)] (the tail beyond 12 sigma is
    below 1e-31) and the Jacobi coefficients of the discrete measure are
    extracted by Lanczos with full reorthogonalization.  The grid is
    refined until the coefficients are stable to 1e-14.
    """
    if not (a > 0.0) or not math.isfinite(a):
        raise DomainError(f"a must be positive, got {a!r}")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    m = int(m)
    a = float(a)
    b = float(b)
    sigma = 1.0 / math.sqrt(a)
    if lower is None:
        lo = b - _TAIL_SIGMAS * sigma
    else:
        lo = float(lower)
    hi = max(b, lo) + _TAIL_SIGMAS * sigma
    if c is None:
        c = truncated_gaussian_normalization(a, b) if lower == 0.0 else \
            1.0 / math.sqrt(2.0 * math.pi / a)
    density = lambda z: c * np.exp(-0.5 * a * (z - b) ** 2)

    # enough panels that each spans about one standard deviation
    panels = max(8, int(math.ceil((hi - lo) / sigma)))
    prev = None
    for pts in (32, 48, 64, 96, 128):
        x, wleg = _composite_legendre(lo, hi, panels, pts)
        w = wleg * density(x)
        alpha, beta = _lanczos_recurrence(x, w, m)
        if prev is not None:
            resid = max(np.max(np.abs(alpha - prev[0])),
                        np.max(np.abs(beta - prev[1])))
            scale = max(1.0, np.max(np.abs(alpha)), np.max(beta))
            if resid <= 1e-14 * scale:
                return RecurrenceCoefficients(alpha, beta)
        prev = (alpha, beta)
    raise ConvergenceError(
        "Stieltjes discretization did not stabilize to 1e-14 "
        f"(last coefficient change {resid:.3e})", residual=float(resid))


def tensor_product(base, dimension, max_points=8192):
    """Tensor-product rule over `dimension` coordinates.

    The flat size m0^dimension must not exceed max_points (a dense
    matrix on the product grid costs size^2 floats, which is the real
    constraint).
    """
    if not isinstance(dimension, (int, np.integer)) or dimension < 1:
        raise DomainError(f"dimension must be a positive integer, got {dimension!r}")
    dimension = int(dimension)
    size = len(base) ** dimension
    if size > max_points:
        raise ResourceLimitError(
            f"tensor rule size m0^Ly = {len(base)}^{dimension} = {size} "
            f"exceeds the budget of {max_points} points")
    return TensorRule(base, dimension)
