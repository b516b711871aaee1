"""Joint Laplace/rotation eigenfunctions on convex surfaces of revolution.

Separation of variables reduces the surface eigenproblem to the radial
Sturm-Liouville operator -a^{-1}(a u')' + k^2/a^2 on L^2((r-, r+), a dr),
discretized conservatively on a staggered grid and solved as a symmetric
tridiagonal eigenproblem.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class ProfileError(ValueError):
    """Raised when a surface profile violates the convexity/pole contract."""


@dataclass(frozen=True)
class SurfaceProfile:
    """Profile a(r) of a surface of revolution with metric dr^2 + a(r)^2 dphi^2."""

    r_minus: float
    r_plus: float
    a: Callable[[np.ndarray], np.ndarray]
    r0: float
    ends: tuple[str, str] = ("pole", "pole")
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.r_minus < self.r_plus:
            raise ProfileError(
                f"need r_minus < r_plus, got [{self.r_minus}, {self.r_plus}]"
            )
        if not self.r_minus < self.r0 < self.r_plus:
            raise ProfileError(f"equator r0={self.r0} outside the open interval")
        for e in self.ends:
            if e not in ("pole", "boundary"):
                raise ProfileError(f"endpoint kind must be pole|boundary, got {e!r}")

    @property
    def span(self) -> float:
        return self.r_plus - self.r_minus

    def a_max(self) -> float:
        return float(self.a(np.array([self.r0]))[0])

    def volume(self) -> float:
        """Surface area 2*pi * integral of a."""
        xs, ws = np.polynomial.legendre.leggauss(256)
        r = self.r_minus + 0.5 * self.span * (xs + 1.0)
        return float(2.0 * math.pi * 0.5 * self.span * np.sum(ws * self.a(r)))

    def validate(self, probe_points: int = 2048) -> None:
        """Numerical check of positivity, single interior maximum, pole behavior."""
        eps = 1e-9 * self.span
        r = np.linspace(self.r_minus + eps, self.r_plus - eps, probe_points)
        vals = np.asarray(self.a(r), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ProfileError("profile takes non-finite values on the probe grid")
        if np.any(vals <= 0.0):
            bad = r[int(np.argmin(vals))]
            raise ProfileError(f"profile must be positive on the interior; a({bad:.6g}) <= 0")
        i0 = int(np.argmax(vals))
        if not (0 < i0 < probe_points - 1):
            raise ProfileError("profile maximum sits at an endpoint; need an interior equator")
        if abs(r[i0] - self.r0) > 2.0 * self.span / probe_points:
            raise ProfileError(
                f"declared r0={self.r0:.6g} is not the argmax (probe says {r[i0]:.6g})"
            )
        h = self.span / probe_points
        rr = np.array([self.r0 - h, self.r0, self.r0 + h])
        av = np.asarray(self.a(rr), dtype=float)
        if av[0] - 2.0 * av[1] + av[2] >= 0.0:
            raise ProfileError("equator maximum is degenerate (a'' >= 0 at r0)")
        # one sign change of the slope: increasing then decreasing
        d = np.diff(vals)
        if np.any(d[: max(i0 - 1, 1)] < -1e-12) or np.any(d[i0 + 1 :] > 1e-12):
            raise ProfileError("profile is not unimodal on the probe grid")
        for side, end, kind in ((0, self.r_minus, self.ends[0]), (1, self.r_plus, self.ends[1])):
            sgn = 1.0 if side == 0 else -1.0
            d1 = 1e-5 * self.span
            v1 = float(self.a(np.array([end + sgn * d1]))[0])
            v2 = float(self.a(np.array([end + sgn * 2.0 * d1]))[0])
            if kind == "pole":
                if not 1.6 <= v2 / v1 <= 2.4:
                    raise ProfileError(
                        f"{'left' if side == 0 else 'right'} endpoint declared a pole "
                        f"but a does not vanish linearly (a(d)={v1:.3g}, a(2d)={v2:.3g})"
                    )
            elif v1 <= 0.0:
                raise ProfileError("boundary endpoint requires a > 0 up to the edge")


def sphere_profile() -> SurfaceProfile:
    """The round sphere: a(r) = sin(r) on [0, pi]."""
    return SurfaceProfile(
        r_minus=0.0, r_plus=math.pi, a=np.sin, r0=math.pi / 2.0,
        ends=("pole", "pole"), name="sphere",
    )


def profile_from_json(source: str | dict) -> SurfaceProfile:
    """Build a profile from a JSON document or path.

    Accepts {"kind": "sphere"} or a sample table
    {"r": [...], "a": [...], "ends": ["pole", "pole"]}, interpolated by a
    cubic spline.  Validation failures carry the offending field.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = source
        if not source.lstrip().startswith("{"):
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProfileError(
                f"profile JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    if not isinstance(doc, dict):
        raise ProfileError("profile JSON must be an object")
    if doc.get("kind") == "sphere":
        return sphere_profile()
    for key in ("r", "a"):
        if key not in doc:
            raise ProfileError(f"profile JSON missing required field {key!r}")
        if not isinstance(doc[key], list) or len(doc[key]) < 4:
            raise ProfileError(f"profile field {key!r} must be a list of at least 4 samples")
    r = np.asarray(doc["r"], dtype=float)
    a = np.asarray(doc["a"], dtype=float)
    if r.shape != a.shape:
        raise ProfileError(f"fields 'r' and 'a' differ in length: {len(r)} vs {len(a)}")
    if np.any(np.diff(r) <= 0):
        i = int(np.argmin(np.diff(r)))
        raise ProfileError(f"field 'r' must be strictly increasing; violation at r[{i + 1}]")
    ends = tuple(doc.get("ends", ["pole", "pole"]))
    if len(ends) != 2:
        raise ProfileError("field 'ends' must name both endpoint kinds")
    # snap float-level residue at declared poles to an exact zero
    amax = float(np.max(np.abs(a)))
    for j, kind in zip((0, -1), ends):
        if kind == "pole" and 0.0 < abs(a[j]) <= 1e-9 * amax:
            a[j] = 0.0
    for i, (kind, val) in enumerate(zip(ends, (a[0], a[-1]))):
        if kind == "pole" and val != 0.0:
            raise ProfileError(f"a[{0 if i == 0 else len(a) - 1}] must be 0 at a pole endpoint")
        if kind == "boundary" and val <= 0.0:
            raise ProfileError(f"a[{0 if i == 0 else len(a) - 1}] must be positive at a boundary endpoint")
    interior = a[1:-1]
    if np.any(interior <= 0):
        i = 1 + int(np.argmin(interior))
        raise ProfileError(f"a[{i}] must be positive, got {a[i]}")
    spline = CubicSpline(r, a)
    i0 = int(np.argmax(a))
    lo = r[max(i0 - 1, 0)]
    hi = r[min(i0 + 1, len(r) - 1)]
    fine = np.linspace(lo, hi, 4097)
    r0 = float(fine[int(np.argmax(spline(fine)))])
    prof = SurfaceProfile(
        r_minus=float(r[0]), r_plus=float(r[-1]), a=spline, r0=r0,
        ends=(str(ends[0]), str(ends[1])), name=str(doc.get("name", "custom")),
    )
    prof.validate()
    return prof


@dataclass
class RadialEigenfunction:
    """One separated radial mode u(r) with angular order k."""

    k: int
    lam: float
    nodes: np.ndarray
    values: np.ndarray
    normalization: float   # attained value of the discrete integral of u^2 a dr
    r_minus: float
    r_plus: float
    _spline: CubicSpline | None = field(default=None, repr=False, compare=False)

    def _interpolant(self) -> CubicSpline:
        if self._spline is None:
            h = self.nodes[1] - self.nodes[0]
            u0, u1 = self.values[0], self.values[1]
            un, um = self.values[-1], self.values[-2]
            if self.k != 0:
                left, right = 0.0, 0.0
            else:
                # even continuation at the ends (regular solution, zero slope)
                left = u0 - (u1 - u0) / 8.0
                right = un - (um - un) / 8.0
            knots = np.concatenate(([self.r_minus], self.nodes, [self.r_plus]))
            vals = np.concatenate(([left], self.values, [right]))
            self._spline = CubicSpline(knots, vals)
        return self._spline


def solve_radial(
    profile: SurfaceProfile, k: int, count: int, grid_points: int = 4000
) -> list[RadialEigenfunction]:
    """Lowest `count` eigenpairs of the order-k radial operator.

    Staggered discretization: unknowns at cell centers, the flux coefficient a
    at cell faces.  A pole face carries a = 0, which encodes the bounded
    solution condition with no explicit boundary row; a boundary face keeps
    its positive a, a reflecting condition.  The similarity transform by
    diag(sqrt(a_i h)) makes the matrix symmetric tridiagonal, solved by
    bisection plus inverse iteration for the requested window.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if grid_points < 256:
        raise ValueError("grid_points must be at least 256")
    if count > grid_points // 4:
        raise ValueError(f"count {count} exceeds grid resolution budget {grid_points // 4}")
    profile.validate()
    n = grid_points
    h = profile.span / n
    faces = profile.r_minus + h * np.arange(n + 1)
    centers = profile.r_minus + h * (np.arange(n) + 0.5)
    af = np.asarray(profile.a(faces), dtype=float)
    if profile.ends[0] == "pole":
        af[0] = 0.0
    if profile.ends[1] == "pole":
        af[-1] = 0.0
    ac = np.asarray(profile.a(centers), dtype=float)
    diag = (af[:-1] + af[1:]) / (ac * h * h) + (k * k) / (ac * ac)
    off = -af[1:-1] / (h * h * np.sqrt(ac[:-1] * ac[1:]))
    try:
        lams, vecs = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, count - 1), lapack_driver="stebz"
        )
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"tridiagonal eigensolver failed for k={k}: {exc}") from None
    scale = np.sqrt(ac * h)
    out = []
    for j in range(count):
        u = vecs[:, j] / scale
        first = np.flatnonzero(np.abs(u) > 1e-12 * np.max(np.abs(u)))
        if first.size and u[first[0]] < 0:
            u = -u
        norm = float(np.sum(u * u * ac) * h)
        out.append(
            RadialEigenfunction(
                k=k, lam=float(lams[j]), nodes=centers, values=u,
                normalization=norm, r_minus=profile.r_minus, r_plus=profile.r_plus,
            )
        )
    return out


def eval_eigenfunction(eig: RadialEigenfunction, r: float, phi: float) -> complex:
    """Full eigenfunction value u(r) e^{ik phi} / sqrt(2 pi) by cubic interpolation."""
    if not eig.r_minus <= r <= eig.r_plus:
        raise ValueError(f"r={r} outside [{eig.r_minus}, {eig.r_plus}]")
    u = float(eig._interpolant()(r))
    return (
        u / _SQRT_2PI
    ) * complex(math.cos(eig.k * phi), math.sin(eig.k * phi))


def eval_eigenfunctions(
    eigs: Sequence[RadialEigenfunction], rs: np.ndarray, phis: np.ndarray
) -> np.ndarray:
    """Dense evaluation of many radial modes at many points, shape (npts, len(eigs))."""
    rs = np.asarray(rs, dtype=float)
    phis = np.asarray(phis, dtype=float)
    out = np.empty((rs.shape[0], len(eigs)), dtype=complex)
    for j, eig in enumerate(eigs):
        u = eig._interpolant()(rs)
        out[:, j] = (u / _SQRT_2PI) * np.exp(1j * eig.k * phis)
    return out


@dataclass
class SpectrumTable:
    """The N lowest joint eigenvalues with their angular orders and radial modes."""

    entries: list[tuple[float, int, int]]   # (lambda, k, radial index), ascending
    eigenfunctions: list[RadialEigenfunction]
    N: int

    def __post_init__(self) -> None:
        lams = [e[0] for e in self.entries]
        if any(b < a for a, b in zip(lams, lams[1:])):
            raise ValueError("spectrum entries must be sorted ascending")


def weighted_sup_radial(profile: SurfaceProfile, eig: RadialEigenfunction) -> float:
    """Grid maximum of a^{1/3} |r - r0|^{1/6} |psi| for one radial mode."""
    a = np.asarray(profile.a(eig.nodes), dtype=float)
    w = np.abs(a) ** (1.0 / 3.0) * np.abs(eig.nodes - profile.r0) ** (1.0 / 6.0)
    return float(np.max(w * np.abs(eig.values)) / _SQRT_2PI)


def save_spectrum(table: SpectrumTable, path: str) -> None:
    """Serialize a spectrum with its radial modes to an .npz archive."""
    eigs = table.eigenfunctions
    np.savez_compressed(
        path,
        lams=np.array([e[0] for e in table.entries]),
        ks=np.array([e[1] for e in table.entries], dtype=np.int64),
        radial_idx=np.array([e[2] for e in table.entries], dtype=np.int64),
        nodes=eigs[0].nodes,
        values=np.stack([e.values for e in eigs]),
        norms=np.array([e.normalization for e in eigs]),
        interval=np.array([eigs[0].r_minus, eigs[0].r_plus]),
    )


def load_spectrum(path: str) -> SpectrumTable:
    """Inverse of save_spectrum."""
    with np.load(path) as z:
        lams = z["lams"]
        ks = z["ks"]
        idx = z["radial_idx"]
        nodes = z["nodes"]
        values = z["values"]
        norms = z["norms"]
        r_minus, r_plus = z["interval"]
    eigs = [
        RadialEigenfunction(
            k=int(ks[i]), lam=float(lams[i]), nodes=nodes, values=values[i],
            normalization=float(norms[i]), r_minus=float(r_minus), r_plus=float(r_plus),
        )
        for i in range(len(lams))
    ]
    return SpectrumTable(
        entries=[(float(lams[i]), int(ks[i]), int(idx[i])) for i in range(len(lams))],
        eigenfunctions=eigs,
        N=len(lams),
    )


def build_spectrum(
    profile: SurfaceProfile, N: int, grid_points: int = 4000
) -> SpectrumTable:
    """Enumerate angular orders and merge radial spectra into the N lowest modes.

    k^2 / a(r0)^2 lower-bounds every order-k eigenvalue, so once that bound
    clears the provisional N-th smallest eigenvalue no higher order can
    contribute and the scan stops.  Ties break toward smaller |k|, then
    positive k.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    profile.validate()
    amax = profile.a_max()
    cap = grid_points // 4
    pool: list[tuple[float, int, int, RadialEigenfunction]] = []

    def cutoff() -> float:
        if len(pool) < N:
            return math.inf
        return sorted(p[0] for p in pool)[N - 1]

    k = 0
    while True:
        if len(pool) >= N and (k * k) / (amax * amax) > cutoff():
            break
        count = 8
        while True:
            count = min(count, cap)
            modes = solve_radial(profile, k, count, grid_points)
            if modes[-1].lam > cutoff() or count == cap:
                break
            count *= 2
        for idx, mode in enumerate(modes):
            if mode.lam > cutoff():
                break
            pool.append((mode.lam, k, idx, mode))
            if k > 0:
                neg = RadialEigenfunction(
                    k=-k, lam=mode.lam, nodes=mode.nodes, values=mode.values,
                    normalization=mode.normalization,
                    r_minus=mode.r_minus, r_plus=mode.r_plus,
                )
                pool.append((mode.lam, -k, idx, neg))
        k += 1
    pool.sort(key=lambda p: (p[0], abs(p[1]), 0 if p[1] >= 0 else 1, p[2]))
    kept = pool[:N]
    return SpectrumTable(
        entries=[(p[0], p[1], p[2]) for p in kept],
        eigenfunctions=[p[3] for p in kept],
        N=N,
    )
