"""Discrete fractional-derivative operators and quadrature.

Transform convention (fixed here, reconciled by every oracle in the test
suite): the continuous Fourier transform is unitary in angular frequency,

    u_hat(w) = (2 pi)^(-1/2) * integral u(t) exp(-i w t) dt,

so Parseval reads ``integral |u|^2 dt = integral |u_hat|^2 dw``.  On a
:class:`~fracham.grids.RealLineGrid` with ``N`` points and spacing ``h`` the
matching discrete statement is

    h * sum_j |u_j|^2 = (h / N) * sum_k |U_k|^2,      U = fft(u),

and every frequency-side sum below carries that ``h/N`` weight.

Two operator families are provided.  On the truncated line, the left-sided
derivative of order ``alpha`` acts as the Fourier multiplier ``(i w)^alpha``
(principal branch, ``w = 0`` mapped to 0); the grid represents the periodic
extension, so the multiplier application is exact for the represented
function.  On a bounded interval, the left Riemann-Liouville derivative with
zero left boundary value is discretized by the standard Grunwald-Letnikov
weights, giving a lower-triangular Toeplitz matrix that is first-order
accurate.
"""

from __future__ import annotations

import functools
import warnings

import numpy as np
import scipy.linalg

from .errors import DomainError
from .grids import GridFunction, IntervalGrid, RealLineGrid, quadrature

__all__ = [
    "BoundaryDecayWarning",
    "lw_multiplier",
    "liouville_weyl_left",
    "quadratic_form_alpha",
    "gl_weights",
    "gl_matrix",
    "grunwald_left_rl",
    "interval_stiffness",
    "quadrature",
]


class BoundaryDecayWarning(UserWarning):
    """A real-line input does not decay near the truncation boundary."""


def _check_order(alpha: float) -> float:
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"fractional order must lie in (0, 1), got {alpha}")
    return float(alpha)


@functools.lru_cache(maxsize=None)
def _lw_multiplier_cached(grid: RealLineGrid, alpha: float, half: bool) -> np.ndarray:
    w = grid.rfft_frequencies if half else grid.angular_frequencies
    mult = np.zeros(w.shape, dtype=np.complex128)
    nz = w != 0.0
    # principal branch: (i w)^a = |w|^a * exp(i * sign(w) * a * pi / 2)
    mult[nz] = np.abs(w[nz]) ** alpha * np.exp(1j * np.sign(w[nz]) * alpha * np.pi / 2.0)
    mult.setflags(write=False)
    return mult


def lw_multiplier(grid: RealLineGrid, alpha: float, half: bool = False) -> np.ndarray:
    """Fourier symbol ``(i w_k)^alpha`` on the grid's frequency set.

    With ``half=True`` the symbol is returned on the nonnegative (rfft)
    frequencies only.
    """
    return _lw_multiplier_cached(grid, _check_order(alpha), bool(half))


@functools.lru_cache(maxsize=None)
def _abs_multiplier_cached(grid: RealLineGrid, two_alpha: float) -> np.ndarray:
    m = np.abs(grid.rfft_frequencies) ** two_alpha
    m.setflags(write=False)
    return m


def _require_line(u: GridFunction) -> RealLineGrid:
    if not isinstance(u.grid, RealLineGrid):
        raise DomainError("operator is defined on real-line grid functions")
    return u.grid


def check_boundary_decay(u: GridFunction, fraction: float = 1e-3) -> float:
    """Warn when the boundary magnitude exceeds ``fraction`` of the peak.

    Returns the observed boundary-to-peak ratio.  The real-line operators are
    exact for the periodic extension; a function that is still large at the
    truncation boundary is one whose line interpretation the grid does not
    capture, which this guard makes visible without forbidding.
    """
    grid = _require_line(u)
    peak = float(np.max(np.abs(u.values)))
    if peak == 0.0:
        return 0.0
    edge = float(max(np.max(np.abs(u.values[0])), np.max(np.abs(u.values[-1]))))
    ratio = edge / peak
    if ratio > fraction:
        warnings.warn(
            f"boundary magnitude is {ratio:.2e} of the peak (threshold {fraction:.0e}); "
            f"halfwidth {grid.halfwidth} may truncate this function",
            BoundaryDecayWarning,
            stacklevel=3,
        )
    return ratio


def liouville_weyl_left(u: GridFunction, alpha: float) -> GridFunction:
    """Left-sided fractional derivative of order ``alpha`` on the line.

    Implemented as the inverse transform of ``(i w)^alpha * u_hat``, applied
    componentwise.  The zero frequency is annihilated.
    """
    grid = _require_line(u)
    _check_order(alpha)
    check_boundary_decay(u)
    mult = lw_multiplier(grid, alpha, half=True)
    coeff = np.fft.rfft(u.values, axis=0)
    out = np.fft.irfft(mult[:, None] * coeff, n=grid.num_points, axis=0)
    return GridFunction(grid, out)


def quadratic_form_alpha(u: GridFunction, alpha: float) -> float:
    """Frequency-side energy ``sum_k |w_k|^(2 alpha) |u_hat_k|^2``.

    Carries the discrete Parseval weight, so the value equals the squared
    ``L^2`` norm of :func:`liouville_weyl_left` applied to ``u``.
    """
    grid = _require_line(u)
    _check_order(alpha)
    coeff = np.fft.rfft(u.values, axis=0)
    m = _abs_multiplier_cached(grid, 2.0 * alpha)
    parw = grid.rfft_parseval_weights
    total = np.sum((parw * m)[:, None] * (coeff.real**2 + coeff.imag**2))
    return float(grid.spacing / grid.num_points * total)


def gl_weights(alpha: float, count: int) -> np.ndarray:
    """First ``count`` Grunwald-Letnikov weights ``(-1)^j binom(alpha, j)``.

    Computed by the stable ratio recurrence ``w_j = w_{j-1} (j - 1 - alpha)/j``.
    """
    _check_order(alpha)
    if count < 1:
        raise DomainError(f"need count >= 1, got {count}")
    k = np.arange(1, count)
    w = np.concatenate([[1.0], np.cumprod((k - alpha - 1.0) / k)])
    w.setflags(write=False)
    return w


@functools.lru_cache(maxsize=None)
def gl_matrix(grid: IntervalGrid, alpha: float) -> np.ndarray:
    """Dense lower-triangular GL derivative matrix ``B`` on all nodes.

    ``(B u)_i = h^(-alpha) sum_{j<=i} w_j u_{i-j}`` discretizes the left
    Riemann-Liouville derivative of a function vanishing at the left endpoint.
    """
    w = gl_weights(alpha, grid.num_points)
    b = scipy.linalg.toeplitz(w, np.zeros(grid.num_points)) * grid.spacing ** (-alpha)
    b.setflags(write=False)
    return b


def grunwald_left_rl(u: GridFunction, alpha: float) -> GridFunction:
    """Left Riemann-Liouville derivative on an interval grid, GL scheme.

    First-order accurate for functions with ``u(a) = 0``; applied
    componentwise via the causal convolution with the GL weights.
    """
    if not isinstance(u.grid, IntervalGrid):
        raise DomainError("grunwald_left_rl is defined on interval grid functions")
    _check_order(alpha)
    m = u.grid.num_points
    w = gl_weights(alpha, m)
    scale = u.grid.spacing ** (-alpha)
    out = np.empty_like(u.values)
    for c in range(u.num_components):
        out[:, c] = scale * np.convolve(u.values[:, c], w)[:m]
    return GridFunction(u.grid, out)


@functools.lru_cache(maxsize=None)
def interval_stiffness(grid: IntervalGrid, alpha: float) -> np.ndarray:
    """Interior block of the composed operator matrix ``h * B^T B``.

    For Dirichlet functions the full quadratic form ``u^T (h B^T B) u`` equals
    ``h * ||B u||^2``, the discrete squared ``L^2`` norm of the GL derivative;
    restricting to interior degrees of freedom folds in the boundary
    conditions.  The block is symmetric positive definite.
    """
    b = gl_matrix(grid, alpha)
    a = grid.spacing * (b.T @ b)
    a = a[1:-1, 1:-1].copy()
    a = 0.5 * (a + a.T)
    a.setflags(write=False)
    return a


@functools.lru_cache(maxsize=None)
def interval_stiffness_cholesky(grid: IntervalGrid, alpha: float):
    """Cached Cholesky factor of :func:`interval_stiffness` (solver plumbing)."""
    return scipy.linalg.cho_factor(np.array(interval_stiffness(grid, alpha)))
