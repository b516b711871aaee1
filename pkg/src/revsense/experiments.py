"""Phase-diagram experiment harness: recovery trials over an (m, s) grid."""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from . import sampling, sensing, solver, surface

#: harness solver budget: feasibility at 1e-6 relative plus a firm iteration
#: cap keeps a full desk-scale diagram affordable; exhausted budgets count as
#: failed recoveries.
HARNESS_SOLVER = solver.SolverConfig(
    max_iter=4000, eps_feas=1e-6, stagnation_tol=1e-9, stagnation_window=100,
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a phase run needs; grids default to the desk-scale layout."""

    surface: str = "sphere"             # builtin name or path to a profile JSON
    bandlimit: int | None = None        # sphere basis: degrees < L, N = L^2
    n_modes: int | None = None          # general-surface basis size
    measure: str = "preconditioned"
    m_grid: tuple[int, ...] | None = None
    s_grid: tuple[int, ...] | None = None   # explicit absolute rows; None = m-scaled
    s_steps: int = 20
    trials: int = 50
    seed: int = 1
    out_dir: str = "."
    recovery_tol: float = 1e-4
    solver_config: solver.SolverConfig = field(default_factory=lambda: HARNESS_SOLVER)
    grid_points: int = 4000
    spectrum_path: str | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.bandlimit is not None and self.bandlimit < 1:
            raise ValueError("bandlimit must be at least 1")
        if self.n_modes is not None and self.n_modes < 1:
            raise ValueError("n_modes must be at least 1")
        if self.s_steps < 1:
            raise ValueError("s_steps must be at least 1")
        if self.measure not in sampling.KINDS:
            raise ValueError(f"unknown measure {self.measure!r}")
        for name in ("m_grid", "s_grid"):
            g = getattr(self, name)
            if g is not None:
                if len(g) == 0 or any(b <= a for a, b in zip(g, g[1:])) or g[0] < 1:
                    raise ValueError(f"{name} must be non-empty, positive, ascending")

    def resolve_N(self) -> int:
        if self.surface == "sphere":
            return (self.bandlimit or 20) ** 2
        if self.n_modes is None:
            raise ValueError("n_modes is required for a non-sphere surface")
        return self.n_modes

    def resolved_m_grid(self) -> tuple[int, ...]:
        if self.m_grid is not None:
            return self.m_grid
        N = self.resolve_N()
        ms = sorted({max(1, round(j * N / 20)) for j in range(1, 21)})
        return tuple(ms)

    def s_column(self, m: int) -> tuple[int, ...]:
        """Sparsity rows for one m column: explicit grid, or fractions of m."""
        if self.s_grid is not None:
            return self.s_grid
        return tuple(max(1, math.ceil(i * m / self.s_steps)) for i in range(1, self.s_steps + 1))


@dataclass
class PhaseDiagram:
    """Success rates on the experiment grid."""

    m_values: tuple[int, ...]
    s_cells: np.ndarray        # shape (rows, cols): absolute sparsity per cell
    rates: np.ndarray          # shape (rows, cols) in [0, 1]
    trials: int
    metadata: dict

    def __post_init__(self) -> None:
        if self.rates.shape != self.s_cells.shape:
            raise ValueError("rate grid and sparsity grid differ in shape")
        if np.any((self.rates < 0) | (self.rates > 1)):
            raise ValueError("success rates must lie in [0, 1]")


def trial_seed(master: int, measure: str, m: int, s: int, trial: int, stream: str) -> int:
    """Stable 64-bit key for one trial's point or signal stream."""
    text = f"{master}|{measure}|{m}|{s}|{trial}|{stream}"
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def _load_profile(source: str) -> surface.SurfaceProfile:
    if source == "sphere":
        return surface.sphere_profile()
    return surface.profile_from_json(source)


_CTX: dict = {}


def _init_worker(payload: dict) -> None:
    cfg = payload["config"]
    profile = _load_profile(cfg.surface)
    if cfg.surface == "sphere":
        basis = cfg.bandlimit or 20
    elif cfg.spectrum_path:
        basis = surface.load_spectrum(cfg.spectrum_path)
    else:
        basis = surface.build_spectrum(profile, cfg.resolve_N(), cfg.grid_points)
    _CTX.clear()
    _CTX.update(
        config=cfg,
        profile=profile,
        basis=basis,
        measure=sampling.make_measure(profile, cfg.measure),
    )


def _run_cell(task: tuple[int, int]) -> tuple[int, int, int]:
    """All trials of one (m, s) cell; returns (m, s, successes)."""
    m, s = task
    cfg: ExperimentConfig = _CTX["config"]
    profile = _CTX["profile"]
    basis = _CTX["basis"]
    measure = _CTX["measure"]
    N = cfg.resolve_N()
    successes = 0
    for trial in range(cfg.trials):
        pts = sampling.draw(
            measure, m, trial_seed(cfg.seed, cfg.measure, m, s, trial, "points")
        )
        problem = sensing.assemble(basis, pts, profile)
        signal = sensing.random_sparse(
            N, s, trial_seed(cfg.seed, cfg.measure, m, s, trial, "signal")
        )
        y = problem.A @ signal.coefficients
        c = signal.coefficients
        cnorm = float(np.linalg.norm(c))
        cap = cfg.recovery_tol * cnorm

        def hit(_it: int, z: np.ndarray, _c=c, _cap=cap) -> bool:
            return float(np.linalg.norm(z - _c)) <= _cap

        result = solver.basis_pursuit(problem.A, y, cfg.solver_config, monitor=hit)
        if result.converged and solver.recovered(c, result.c_sharp, cfg.recovery_tol):
            successes += 1
    return m, s, successes


def run_phase(config: ExperimentConfig, workers: int | None = None) -> PhaseDiagram:
    """Run every cell of the configured grid; deterministic in the config alone.

    Trials derive their randomness from per-trial hashes of the master seed,
    so the outcome is independent of ``workers`` and scheduling order; the
    worker count is an execution detail, not part of the experiment identity.
    """
    m_values = config.resolved_m_grid()
    cells = []
    for m in m_values:
        for s in config.s_column(m):
            if s > config.resolve_N():
                raise ValueError(f"sparsity {s} exceeds N={config.resolve_N()}")
            cells.append((m, s))
    _load_profile(config.surface)  # fail fast on a bad surface before any pool spawns
    payload = {"config": config}
    results: dict[tuple[int, int], int] = {}
    workers = workers or 1
    if workers <= 1:
        _init_worker(payload)
        for cell in cells:
            m, s, hits = _run_cell(cell)
            results[(m, s)] = hits
    else:
        import multiprocessing as mp

        ctx = mp.get_context("spawn")
        with ProcessPoolExecutor(
            max_workers=workers, mp_context=ctx,
            initializer=_init_worker, initargs=(payload,),
        ) as pool:
            for m, s, hits in pool.map(_run_cell, cells, chunksize=1):
                results[(m, s)] = hits
    rows = len(config.s_column(m_values[0]))
    s_cells = np.zeros((rows, len(m_values)), dtype=int)
    rates = np.zeros((rows, len(m_values)))
    for j, m in enumerate(m_values):
        col = config.s_column(m)
        for i, s in enumerate(col):
            s_cells[i, j] = s
            rates[i, j] = results[(m, s)] / config.trials
    meta = {
        "surface": config.surface,
        "N": config.resolve_N(),
        "measure": config.measure,
        "seed": config.seed,
        "trials": config.trials,
        "m_grid": list(m_values),
        "s_rows": "explicit" if config.s_grid is not None else f"ceil(i*m/{config.s_steps})",
        "recovery_tol": config.recovery_tol,
        "solver": {
            "max_iter": config.solver_config.max_iter,
            "eps_feas": config.solver_config.eps_feas,
        },
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return PhaseDiagram(
        m_values=m_values, s_cells=s_cells, rates=rates,
        trials=config.trials, metadata=meta,
    )


def write_phase_csv(diagram: PhaseDiagram, path: str) -> None:
    """Cells in (m, s) lexicographic order; fixed formatting for diffability."""
    lines = ["m,s,success_rate,trials"]
    for j, m in enumerate(diagram.m_values):
        order = np.argsort(diagram.s_cells[:, j], kind="stable")
        for i in order:
            lines.append(
                f"{m},{diagram.s_cells[i, j]},{diagram.rates[i, j]:.6f},{diagram.trials}"
            )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_phase_pgm(diagram: PhaseDiagram, path: str) -> None:
    """Binary PGM, 255 = rate 1.0, s ascending top-to-bottom, m left-to-right."""
    rows, cols = diagram.rates.shape
    img = np.rint(diagram.rates * 255.0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def write_phase_metadata(diagram: PhaseDiagram, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(diagram.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
