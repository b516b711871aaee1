"""Orthonormal spherical harmonics and Legendre polynomials via stable recurrences."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEGREE_CAP = 256

_FOUR_PI = 4.0 * math.pi

# Cumulative log of the diagonal recurrence factors sqrt((2j+1)/(2j)),
# extended lazily; entry m holds sum_{j=1}^{m} 0.5*log((2j+1)/(2j)).
_diag_logsum = [0.0]


def _diag_log(m: int) -> float:
    while len(_diag_logsum) <= m:
        j = len(_diag_logsum)
        _diag_logsum.append(_diag_logsum[-1] + 0.5 * math.log((2 * j + 1) / (2 * j)))
    return _diag_logsum[m]


@dataclass(frozen=True)
class BasisIndex:
    """Degree and order of one spherical harmonic."""

    degree: int
    order: int

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError(f"degree must be nonnegative, got {self.degree}")
        if abs(self.order) > self.degree:
            raise ValueError(
                f"order {self.order} exceeds degree {self.degree} in magnitude"
            )
        if self.degree > DEGREE_CAP:
            raise ValueError(f"degree {self.degree} above cap {DEGREE_CAP}")

    @property
    def flat(self) -> int:
        """Position in the degree-major ordering: l*l + l + k."""
        return self.degree * self.degree + self.degree + self.order

    @classmethod
    def from_flat(cls, j: int) -> "BasisIndex":
        if j < 0:
            raise ValueError(f"flat index must be nonnegative, got {j}")
        l = math.isqrt(j)
        return cls(degree=l, order=j - l * l - l)


@dataclass(frozen=True)
class SphericalPoint:
    """Colatitude/longitude pair on the unit sphere."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi}")


@dataclass(frozen=True)
class HarmonicValue:
    """One harmonic evaluation, optionally premultiplied by a sup-norm weight."""

    value: complex
    weight_applied: float | None = None


def _check_degree(lmax: int) -> None:
    if lmax < 0:
        raise ValueError(f"degree must be nonnegative, got {lmax}")
    if lmax > DEGREE_CAP:
        raise ValueError(f"degree {lmax} above cap {DEGREE_CAP}")


def _legendre_column(lmax: int, m: int, ct: np.ndarray, st: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre values for fixed order.

    Returns shape (lmax - m + 1, npts): rows are degrees m..lmax evaluated at
    the points with cosine ct and sine st.  Normalization makes the matching
    harmonics orthonormal on the sphere; the Condon-Shortley phase is kept via
    the -sin(theta) diagonal factor.  The order-m seed is formed in log space
    so that st**m underflows to zero near the poles instead of trashing the
    column.
    """
    npts = ct.shape[0]
    out = np.empty((lmax - m + 1, npts))
    if m == 0:
        seed = np.full(npts, 1.0 / math.sqrt(_FOUR_PI))
    else:
        with np.errstate(divide="ignore"):
            logmag = -0.5 * math.log(_FOUR_PI) + _diag_log(m) + m * np.log(st)
        seed = np.exp(logmag)
        if m % 2:
            seed = -seed
    out[0] = seed
    if lmax == m:
        return out
    out[1] = math.sqrt(2 * m + 3) * ct * seed
    for l in range(m + 1, lmax):
        a = math.sqrt((2 * l + 1) * (2 * l + 3) / ((1 + l + m) * (1 + l - m)))
        b = math.sqrt(
            (2 * l + 3) * (l - m) * (l + m) / ((2 * l - 1) * (1 + l + m) * (1 + l - m))
        )
        out[l - m + 1] = a * ct * out[l - m] - b * out[l - m - 1]
    return out


def eval_harmonic(index: BasisIndex, point: SphericalPoint) -> complex:
    """Value of the orthonormal harmonic of the given degree and order."""
    m = abs(index.order)
    ct = np.array([math.cos(point.theta)])
    st = np.array([math.sin(point.theta)])
    p = _legendre_column(index.degree, m, ct, st)[-1, 0]
    if index.order < 0 and m % 2:
        p = -p
    return p * complex(math.cos(index.order * point.phi), math.sin(index.order * point.phi))


def eval_weighted(index: BasisIndex, point: SphericalPoint) -> HarmonicValue:
    """Harmonic value premultiplied by the |sin^2(theta)*cos(theta)|^{1/6} weight."""
    w = float(abs(math.sin(point.theta) ** 2 * math.cos(point.theta))) ** (1.0 / 6.0)
    return HarmonicValue(value=w * eval_harmonic(index, point), weight_applied=w)


def eval_rows(max_degree: int, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Dense evaluation of every harmonic of degree below max_degree at many points.

    Returns shape (npts, max_degree**2), columns in flat order l*l + l + k.
    """
    if max_degree < 1:
        raise ValueError(f"max_degree must be at least 1, got {max_degree}")
    lmax = max_degree - 1
    _check_degree(lmax)
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if thetas.shape != phis.shape or thetas.ndim != 1:
        raise ValueError("thetas and phis must be 1-d arrays of equal length")
    npts = thetas.shape[0]
    ct = np.cos(thetas)
    st = np.sin(thetas)
    out = np.empty((npts, max_degree**2), dtype=complex)
    for m in range(lmax + 1):
        col = _legendre_column(lmax, m, ct, st)
        phase = np.exp(1j * m * phis)
        parity = -1.0 if m % 2 else 1.0
        for l in range(m, lmax + 1):
            p = col[l - m]
            out[:, l * l + l + m] = p * phase
            if m:
                out[:, l * l + l - m] = parity * p * np.conj(phase)
    return out


def eval_row(max_degree: int, point: SphericalPoint) -> np.ndarray:
    """Single sensing-matrix row: every harmonic of degree below max_degree at one point."""
    return eval_rows(max_degree, np.array([point.theta]), np.array([point.phi]))[0]


def weighted_sup(index: BasisIndex, grid_size: int = 2048) -> float:
    """Grid maximum of |sin^2(theta)*cos(theta)|^{1/6} |Y| over colatitude."""
    _check_degree(index.degree)
    if grid_size < 2:
        raise ValueError(f"grid_size must be at least 2, got {grid_size}")
    thetas = np.linspace(0.0, math.pi, grid_size)
    ct = np.cos(thetas)
    st = np.sin(thetas)
    w = np.abs(st * st * ct) ** (1.0 / 6.0)
    col = _legendre_column(index.degree, abs(index.order), ct, st)
    return float(np.max(w * np.abs(col[-1])))


def weighted_sup_sweep(lmax: int, grid_size: int = 2048) -> np.ndarray:
    """weighted_sup for all orders 0..l and degrees 0..lmax in one pass.

    Returns shape (lmax+1, lmax+1); entry [l, m] holds the order-m sup, with
    nan above the diagonal.  Negative orders share the value at |k|.
    """
    _check_degree(lmax)
    thetas = np.linspace(0.0, math.pi, grid_size)
    ct = np.cos(thetas)
    st = np.sin(thetas)
    w = np.abs(st * st * ct) ** (1.0 / 6.0)
    out = np.full((lmax + 1, lmax + 1), np.nan)
    for m in range(lmax + 1):
        col = _legendre_column(lmax, m, ct, st)
        out[m:, m] = np.max(w * np.abs(col), axis=1)
    return out


def eval_legendre_normalized(j: int, x: np.ndarray | float) -> np.ndarray | float:
    """Legendre polynomial of degree j, normalized to unit L2 norm on [-1, 1]."""
    if j < 0:
        raise ValueError(f"degree must be nonnegative, got {j}")
    if j > DEGREE_CAP:
        raise ValueError(f"degree {j} above cap {DEGREE_CAP}")
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) > 1.0):
        raise ValueError("argument outside [-1, 1]")
    prev = np.full(x.shape, math.sqrt(0.5))
    if j == 0:
        return float(prev[0]) if scalar else prev
    cur = math.sqrt(1.5) * x
    for n in range(2, j + 1):
        a = math.sqrt((2 * n + 1) * (2 * n - 1)) / n
        b = (n - 1) / n * math.sqrt((2 * n + 1) / (2 * n - 3))
        prev, cur = cur, a * x * cur - b * prev
    return float(cur[0]) if scalar else cur


def gram_matrix(max_degree: int, n_theta: int | None = None, n_phi: int | None = None) -> np.ndarray:
    """Quadrature Gram matrix of the harmonics of degree below max_degree.

    Gauss-Legendre in cos(theta) and trapezoid in phi, sized so the products
    of two basis functions are integrated exactly; orthonormality then shows
    up as the identity to rounding.
    """
    if n_theta is None:
        n_theta = 2 * max_degree
    if n_phi is None:
        n_phi = 4 * max_degree
    xs, ws = np.polynomial.legendre.leggauss(n_theta)
    thetas = np.arccos(xs)
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    tt = np.repeat(thetas, n_phi)
    pp = np.tile(phis, n_theta)
    rows = eval_rows(max_degree, tt, pp)
    quad_w = np.repeat(ws, n_phi) * (2.0 * math.pi / n_phi)
    return (rows.conj().T * quad_w) @ rows
