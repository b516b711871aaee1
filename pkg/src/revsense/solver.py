"""First-order solvers for equality and noise-tolerant basis pursuit, plus a tiny exact oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SolverConfig:
    """Budget and step knobs for the primal-dual iteration."""

    max_iter: int = 50000
    eps_feas: float = 1e-9          # relative: residual <= eps_feas * (1 + ||y||)
    stagnation_tol: float = 1e-10   # objective movement over the stagnation window
    stagnation_window: int = 100
    step_balance: float = 1.0       # tau = balance/L, sigma = margin/(balance*L)
    step_margin: float = 0.999      # keeps sigma*tau*L^2 < 1
    check_every: int = 16
    power_iter_max: int = 200
    power_iter_tol: float = 1e-5

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if min(self.eps_feas, self.stagnation_tol, self.step_balance) <= 0:
            raise ValueError("tolerances and step parameters must be positive")
        if not 0 < self.step_margin < 1:
            raise ValueError("step_margin must lie in (0, 1)")


@dataclass
class RecoveryResult:
    """Outcome of one ell-1 solve."""

    c_sharp: np.ndarray
    objective: float
    residual: float
    iterations: int
    converged: bool
    status: str          # "feasible" | "budget" | "infeasible"
    op_norm: float


def operator_norm(A: np.ndarray, max_iter: int = 200, tol: float = 1e-5) -> float:
    """Largest singular value by power iteration on A^H A, deterministic start."""
    n = A.shape[1]
    v = np.full(n, 1.0 / math.sqrt(n), dtype=A.dtype)
    est = 0.0
    for _ in range(max_iter):
        w = A.conj().T @ (A @ v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        new_est = math.sqrt(nw)
        v = w / nw
        if abs(new_est - est) <= tol * new_est:
            return new_est
        est = new_est
    return est


def _shrink(z: np.ndarray, t: float) -> np.ndarray:
    """Complex soft threshold: scales each entry's modulus down by t, clipping at 0."""
    mag = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mag > t, 1.0 - t / mag, 0.0)
    return z * scale


def basis_pursuit_denoise(
    A: np.ndarray,
    y: np.ndarray,
    eps: float = 0.0,
    config: SolverConfig | None = None,
    monitor: Callable[[int, np.ndarray], bool] | None = None,
) -> RecoveryResult:
    """min ||z||_1 subject to (1/sqrt(m)) ||Az - y||_2 <= eps, by Chambolle-Pock.

    eps=0 is equality-constrained basis pursuit.  The dual variable tracks the
    constraint; its prox is a block shrink toward y.  `monitor(iters, z)` may
    request an early stop, honored only once the iterate is feasible, so a
    monitored stop still certifies the constraint.
    """
    if config is None:
        config = SolverConfig()
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    A = np.ascontiguousarray(A)
    y = np.asarray(y)
    m, n = A.shape
    if y.shape != (m,):
        raise ValueError(f"y has shape {y.shape}, expected ({m},)")
    eps_abs = eps * math.sqrt(m)
    ynorm = float(np.linalg.norm(y))
    feas_cap = config.eps_feas * (1.0 + ynorm)

    L = operator_norm(A, config.power_iter_max, config.power_iter_tol) * 1.02
    if L < 1e-30:
        # zero operator: z = 0 is optimal; feasible iff y is within the tube
        res = ynorm
        ok = max(0.0, res - eps_abs) <= feas_cap
        return RecoveryResult(
            c_sharp=np.zeros(n, dtype=complex), objective=0.0, residual=res,
            iterations=0, converged=ok, status="feasible" if ok else "infeasible",
            op_norm=0.0,
        )
    tau = config.step_balance / L
    sigma = config.step_margin / (config.step_balance * L)

    AH = np.ascontiguousarray(A.conj().T)
    z = np.zeros(n, dtype=complex)
    zbar = z.copy()
    xi = np.zeros(m, dtype=complex)

    best_obj = math.inf
    window: list[tuple[int, float, float]] = []  # (iteration, best objective, excess residual)
    best_excess = math.inf
    best_excess_it = 0
    it = 0
    status = "budget"
    converged = False
    while it < config.max_iter:
        xi += sigma * (A @ zbar - y)
        if eps_abs > 0.0:
            nxi = float(np.linalg.norm(xi))
            if nxi > 0.0:
                xi *= max(0.0, 1.0 - sigma * eps_abs / nxi)
        znew = _shrink(z - tau * (AH @ xi), tau)
        zbar = 2.0 * znew - z
        z = znew
        it += 1
        if it % config.check_every and it != config.max_iter:
            continue
        res = float(np.linalg.norm(A @ z - y))
        excess = max(0.0, res - eps_abs)
        obj = float(np.sum(np.abs(z)))
        best_obj = min(best_obj, obj)
        window.append((it, best_obj, excess))
        feas_ok = excess <= feas_cap
        if feas_ok and monitor is not None and monitor(it, z):
            status, converged = "feasible", True
            break
        while len(window) > 1 and window[1][0] <= it - config.stagnation_window:
            window.pop(0)
        settled = (
            window[0][0] <= it - config.stagnation_window
            and abs(window[0][1] - best_obj) <= config.stagnation_tol * max(1.0, best_obj)
        )
        if feas_ok and settled:
            status, converged = "feasible", True
            break
        if excess < best_excess - 1e-13 * (1.0 + ynorm):
            best_excess, best_excess_it = excess, it
        # a large residual floor that stops improving for a long stretch, with
        # the objective settled, marks y outside the range of A; floors within
        # 1e-3 of the data norm are left to the iteration budget instead
        if (
            not feas_ok
            and settled
            and excess > 1e-3 * (1.0 + ynorm)
            and it - best_excess_it > 20 * config.stagnation_window
        ):
            status, converged = "infeasible", False
            break
    res = float(np.linalg.norm(A @ z - y))
    return RecoveryResult(
        c_sharp=z, objective=float(np.sum(np.abs(z))), residual=res,
        iterations=it, converged=converged, status=status, op_norm=L / 1.02,
    )


def basis_pursuit(
    A: np.ndarray,
    y: np.ndarray,
    config: SolverConfig | None = None,
    monitor: Callable[[int, np.ndarray], bool] | None = None,
) -> RecoveryResult:
    """min ||z||_1 subject to Az = y (complex ell-1: sum of moduli)."""
    return basis_pursuit_denoise(A, y, eps=0.0, config=config, monitor=monitor)


def recovered(c: np.ndarray, c_sharp: np.ndarray, tol: float = 1e-4) -> bool:
    """Exact-recovery criterion: relative ell-2 error at most tol, inclusive."""
    c = np.asarray(c)
    c_sharp = np.asarray(c_sharp)
    if c.shape != c_sharp.shape:
        raise ValueError("length mismatch")
    return float(np.linalg.norm(c - c_sharp)) <= tol * float(np.linalg.norm(c))


def oracle_bp(
    A: np.ndarray, y: np.ndarray, s_max: int | None = None
) -> tuple[np.ndarray, float, bool]:
    """Exact real basis pursuit by support enumeration.

    Every vertex of the ell-1 ball section {Az = y} is supported on at most m
    columns, so scanning all supports up to size min(m, s_max) and keeping the
    feasible candidate of least ell-1 norm is exact.  Returns (minimizer,
    objective, unique) where unique means no second feasible candidate attains
    the objective at a materially different vector.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = A.shape
    if n > 16 or m > 8:
        raise ValueError("oracle limited to m <= 8, N <= 16")
    if np.iscomplexobj(A) or np.iscomplexobj(y):
        raise ValueError("oracle handles real data only")
    cap = m if s_max is None else min(s_max, m)
    feas_tol = 1e-9 * (1.0 + float(np.linalg.norm(y)))
    best: list[tuple[float, np.ndarray]] = []
    for size in range(cap + 1):
        for S in combinations(range(n), size):
            if size == 0:
                x = np.zeros(0)
                resid = float(np.linalg.norm(y))
            else:
                sub = A[:, S]
                x, *_ = np.linalg.lstsq(sub, y, rcond=None)
                resid = float(np.linalg.norm(sub @ x - y))
            if resid > feas_tol:
                continue
            z = np.zeros(n)
            z[list(S)] = x
            best.append((float(np.sum(np.abs(z))), z))
    if not best:
        raise ValueError("no feasible support found; y outside the range of A")
    best.sort(key=lambda t: t[0])
    obj, zstar = best[0]
    unique = True
    for other_obj, other_z in best[1:]:
        if other_obj > obj + 1e-9:
            break
        if np.linalg.norm(other_z - zstar) > 1e-7 * (1.0 + np.linalg.norm(zstar)):
            unique = False
            break
    return zstar, obj, unique
