"""Preconditioned sensing matrices, sparse test signals, and empirical RIP checks."""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .harmonics import eval_rows
from .sampling import SampleSet, make_measure, preconditioner_shape
from .surface import SpectrumTable, SurfaceProfile, eval_eigenfunctions

MATRIX_MAGIC = b"SCSMAT1\x00"


@lru_cache(maxsize=32)
def _c0(profile: SurfaceProfile) -> float:
    """Normalization making the weighted system have unit mean square under
    the preconditioned law: c0^2 = 2 pi Z / V."""
    Z = make_measure(profile, "preconditioned").Z
    return math.sqrt(2.0 * math.pi * Z / profile.volume())


def weight(profile: SurfaceProfile, point) -> float:
    """Preconditioner value c0 * shape(r) at one point (r or (r, phi))."""
    r = point[0] if np.ndim(point) else point
    return float(_c0(profile) * preconditioner_shape(profile, np.array([float(r)]))[0])


def weights_radial(profile: SurfaceProfile, r: np.ndarray) -> np.ndarray:
    """Vectorized weight over radii."""
    return _c0(profile) * preconditioner_shape(profile, np.asarray(r, dtype=float))


@dataclass
class SensingProblem:
    """Weighted eigenfunction samples as an m x N matrix."""

    A: np.ndarray
    points: SampleSet
    weights: np.ndarray
    basis: dict

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def N(self) -> int:
        return self.A.shape[1]


def assemble(
    basis: int | SpectrumTable,
    samples: SampleSet,
    profile: SurfaceProfile,
    literal_corollary_weight: bool = False,
) -> SensingProblem:
    """A_{ij} = weight(x_i) * psi_j(x_i).

    basis: a bandlimit L (sphere harmonics of degree < L, N = L^2) or a
    SpectrumTable of radial modes.  The weight is the normalized
    preconditioner regardless of which measure produced the points; row
    scaling by a fixed positive function changes neither the equality
    constraint set nor the ell-1 minimizer.  literal_corollary_weight swaps in
    the squared, unnormalized shape for side-by-side comparisons.
    """
    if samples.profile_name not in (profile.name, "unknown"):
        raise ValueError(
            f"sample set was drawn on {samples.profile_name!r}, not {profile.name!r}"
        )
    rs = samples.points[:, 0]
    phis = samples.points[:, 1]
    if np.any((rs < profile.r_minus) | (rs > profile.r_plus)):
        raise ValueError("sample radius outside the profile interval")
    if isinstance(basis, SpectrumTable):
        rows = eval_eigenfunctions(basis.eigenfunctions, rs, phis)
        descriptor = {"type": "spectrum", "N": basis.N}
    else:
        if basis < 1:
            raise ValueError("bandlimit must be at least 1")
        rows = eval_rows(int(basis), rs, phis)
        descriptor = {"type": "sphere", "bandlimit": int(basis)}
    if literal_corollary_weight:
        w = preconditioner_shape(profile, rs) ** 2
        descriptor["weight"] = "literal-corollary"
    else:
        w = weights_radial(profile, rs)
    return SensingProblem(
        A=rows * w[:, None], points=samples, weights=w, basis=descriptor
    )


@dataclass(frozen=True)
class SparseSignal:
    """Coefficient vector with an explicit support set."""

    coefficients: np.ndarray
    support: np.ndarray

    def __post_init__(self) -> None:
        mask = np.zeros(len(self.coefficients), dtype=bool)
        mask[self.support] = True
        if np.any(self.coefficients[~mask] != 0):
            raise ValueError("coefficients outside the declared support must be zero")


def random_sparse(N: int, s: int, seed: int) -> SparseSignal:
    """Uniform random s-subset with unit-variance complex Gaussian coefficients."""
    if not 1 <= s <= N:
        raise ValueError(f"need 1 <= s <= N, got s={s}, N={N}")
    gen = np.random.Generator(np.random.Philox(key=seed))
    support = np.sort(gen.choice(N, size=s, replace=False))
    c = np.zeros(N, dtype=complex)
    c[support] = (gen.standard_normal(s) + 1j * gen.standard_normal(s)) / math.sqrt(2.0)
    return SparseSignal(coefficients=c, support=support)


def synthesize(
    signal: SparseSignal,
    samples: SampleSet,
    basis: int | SpectrumTable,
    profile: SurfaceProfile,
    problem: SensingProblem | None = None,
) -> np.ndarray:
    """Measurement vector y = A c (weighted samples of the synthesized function)."""
    if problem is None:
        problem = assemble(basis, samples, profile)
    if len(signal.coefficients) != problem.N:
        raise ValueError(
            f"signal length {len(signal.coefficients)} does not match N={problem.N}"
        )
    return problem.A @ signal.coefficients


def estimate_rip(problem: SensingProblem | np.ndarray, s: int) -> float:
    """Exhaustive restricted-isometry constant of order 2s for (1/sqrt(m)) A.

    delta = max over all 2s-column submatrices of the largest deviation of a
    singular value from 1.  Exact, so only tiny instances are in budget.
    """
    A = problem.A if isinstance(problem, SensingProblem) else np.asarray(problem)
    m, N = A.shape
    order = min(2 * s, N)
    if s < 1:
        raise ValueError("s must be at least 1")
    if math.comb(N, order) > 10**6:
        raise ValueError(f"enumeration budget exceeded: C({N},{order}) > 1e6")
    scaled = A / math.sqrt(m)
    delta = 0.0
    for T in combinations(range(N), order):
        sv = np.linalg.svd(scaled[:, T], compute_uv=False)
        delta = max(delta, float(np.max(np.abs(sv - 1.0))))
    return delta


def export_problem(problem: SensingProblem, path: str) -> None:
    """Binary matrix dump plus a JSON manifest.

    Layout: magic 'SCSMAT1\\0', then m and N as little-endian uint32, then the
    row-major complex entries as little-endian float64 (re, im) pairs.
    """
    A = np.ascontiguousarray(problem.A, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<II", problem.m, problem.N))
        fh.write(A.tobytes())
    manifest = {
        "basis": problem.basis,
        "measure": problem.points.measure_kind,
        "seed": int(problem.points.seed),
        "m": problem.m,
        "N": problem.N,
    }
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def export_vector(y: np.ndarray, path: str) -> None:
    """A length-m complex vector in the matrix container (N = 1)."""
    y = np.ascontiguousarray(np.asarray(y, dtype="<c16").reshape(-1, 1))
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<II", y.shape[0], 1))
        fh.write(y.tobytes())


def load_matrix(path: str) -> np.ndarray:
    """Read a matrix or vector written by export_problem/export_vector."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MATRIX_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        m, N = struct.unpack("<II", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != m * N:
        raise ValueError(f"{path}: expected {m * N} entries, found {data.size}")
    return data.reshape(m, N).astype(complex)
