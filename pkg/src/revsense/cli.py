"""Command-line front end: experiments, verification reports, one-shot solves.

BLAS thread caps are applied before numpy is imported so that results do not
depend on the host's core count; parallelism is explicit via ``--workers``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY = 2

_THREAD_VARS = (
    "OPENBLAS_NUM_THREADS",
    "OMP_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _cap_blas_threads() -> None:
    for var in _THREAD_VARS:
        os.environ.setdefault(var, "1")


class _Parser(argparse.ArgumentParser):
    """Usage problems are plain errors (exit 1); 2 is reserved for failed checks."""

    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="revsense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    phase = sub.add_parser("phase", parents=[], help="run a recovery phase diagram")
    phase.add_argument("--config", help="JSON file of experiment settings; flags override")
    phase.add_argument("--surface", help='builtin "sphere" or path to a profile JSON')
    phase.add_argument("--bandlimit", type=int, help="sphere basis: degrees < L, N = L^2")
    phase.add_argument("--n-modes", type=int, help="basis size for a general surface")
    phase.add_argument("--measure", choices=("volume", "uniform", "preconditioned"))
    phase.add_argument("--m-grid", type=_int_list, help="comma-separated sample counts")
    phase.add_argument("--s-grid", type=_int_list, help="comma-separated sparsity rows")
    phase.add_argument("--s-steps", type=int, help="rows per column when --s-grid is absent")
    phase.add_argument("--trials", type=int, help="trials per cell (default 50)")
    phase.add_argument("--seed", type=int, help="master seed")
    phase.add_argument("--out", help="output directory (default .)")
    phase.add_argument("--workers", type=int, default=1, help="worker processes")
    phase.add_argument("--grid-points", type=int, help="radial grid for general surfaces")
    phase.add_argument("--spectrum", help="reuse a saved spectrum (.npz) for the basis")
    phase.add_argument("--max-iter", type=int, help="solver iteration budget per trial")
    phase.add_argument("--eps-feas", type=float, help="solver feasibility tolerance")

    verify = sub.add_parser("verify-bounds", help="sweep weighted sup bounds and report")
    verify.add_argument("--surface", default="sphere")
    verify.add_argument("--max-degree", type=int, default=60, help="sphere sweep: 1 <= l <= L")
    verify.add_argument("--n-modes", type=int, default=400, help="modes for a general surface")
    verify.add_argument("--grid-size", type=int, default=2048, help="theta grid for sups")
    verify.add_argument("--grid-points", type=int, default=4000, help="radial FD grid")
    verify.add_argument(
        "--cross-modes", type=int, default=400,
        help="sphere only: modes for the cross-check against the radial solver (0 = skip)",
    )
    verify.add_argument("--tol", type=float, default=1e-3, help="cross-check tolerance")
    verify.add_argument("--out", default="verify_bounds.csv")

    ortho = sub.add_parser("orthocheck", help="quadrature Gram-matrix deviation report")
    ortho.add_argument("--max-degree", type=int, default=20, help="degrees < L (L <= 30)")
    ortho.add_argument("--n-theta", type=int, help="Gauss-Legendre nodes in theta")
    ortho.add_argument("--n-phi", type=int, help="trapezoid nodes in phi")
    ortho.add_argument("--tol", type=float, default=1e-10)

    spectrum = sub.add_parser("spectrum", help="joint eigenvalue table for a profile")
    spectrum.add_argument("--profile", default="sphere", help='"sphere" or profile JSON path')
    spectrum.add_argument("--n-modes", type=int, required=True)
    spectrum.add_argument("--grid-points", type=int, default=4000)
    spectrum.add_argument("--out", default="spectrum.csv")
    spectrum.add_argument("--save", help="also serialize eigenfunctions to this .npz")

    solve = sub.add_parser("solve", help="one-shot recovery from an exported matrix and y")
    solve.add_argument("--matrix", required=True, help="binary matrix file")
    solve.add_argument("--y", required=True, help="binary measurement vector (m x 1)")
    solve.add_argument("--eps", type=float, default=0.0, help="residual budget (0 = equality)")
    solve.add_argument("--out", help="write the minimizer as a binary N x 1 vector")
    solve.add_argument("--max-iter", type=int)
    solve.add_argument("--eps-feas", type=float)

    return parser


def _solver_overrides(base, max_iter, eps_feas):
    from dataclasses import replace

    kwargs = {}
    if max_iter is not None:
        kwargs["max_iter"] = max_iter
    if eps_feas is not None:
        kwargs["eps_feas"] = eps_feas
    return replace(base, **kwargs) if kwargs else base


def _cmd_phase(args) -> int:
    from . import experiments

    settings: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            settings.update(json.load(fh))
    solver_json = settings.pop("solver_config", None)
    for key in (
        "surface", "bandlimit", "n_modes", "measure", "m_grid", "s_grid",
        "s_steps", "trials", "seed", "out", "grid_points", "spectrum",
    ):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    settings.setdefault("surface", "sphere")
    out_dir = settings.pop("out", settings.pop("out_dir", "."))
    spectrum_path = settings.pop("spectrum", settings.pop("spectrum_path", None))
    for grid_key in ("m_grid", "s_grid"):
        if settings.get(grid_key) is not None:
            settings[grid_key] = tuple(settings[grid_key])

    base = experiments.HARNESS_SOLVER
    if solver_json:
        from dataclasses import replace

        base = replace(base, **solver_json)
    solver_config = _solver_overrides(base, args.max_iter, args.eps_feas)

    config = experiments.ExperimentConfig(
        out_dir=out_dir,
        spectrum_path=spectrum_path,
        solver_config=solver_config,
        **settings,
    )
    diagram = experiments.run_phase(config, workers=args.workers)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "phase.csv")
    experiments.write_phase_csv(diagram, csv_path)
    experiments.write_phase_pgm(diagram, os.path.join(out_dir, "phase.pgm"))
    experiments.write_phase_metadata(diagram, os.path.join(out_dir, "phase_metadata.json"))
    mean_rate = float(diagram.rates.mean())
    print(
        f"phase: {diagram.rates.size} cells x {diagram.trials} trials, "
        f"measure={config.measure}, mean success rate {mean_rate:.3f} -> {csv_path}"
    )
    return EXIT_OK


def _sphere_verify_rows(args):
    import numpy as np

    from . import harmonics

    L = args.max_degree
    sweep = harmonics.weighted_sup_sweep(L, args.grid_size)
    rows = []
    ratios = []
    per_degree = []
    for ell in range(L + 1):
        sups = sweep[ell, : ell + 1]
        if ell >= 1:
            per_degree.append(float(np.max(sups)))
        for k in range(ell + 1):
            sup = float(sups[k])
            if ell == 0:
                rows.append(f"0,0,{sup:.12g},")
            else:
                ratio = sup / ell ** (1.0 / 6.0)
                ratios.append(ratio)
                rows.append(f"{ell},{k},{sup:.12g},{ratio:.12g}")
    ells = np.arange(1, L + 1, dtype=float)
    slope = float(np.polyfit(np.log(ells), np.log(per_degree), 1)[0])
    return rows, float(np.max(ratios)), slope, "ell,k,weighted_sup,ratio_to_ell_1_6"


def _sphere_cross_check(args) -> float:
    """Largest gap between the two modules' sups under the same weight."""
    import numpy as np

    from . import harmonics, surface

    profile = surface.sphere_profile()
    table = surface.build_spectrum(profile, args.cross_modes, args.grid_points)
    worst = 0.0
    seen: set[tuple[int, int]] = set()
    for (lam, k, _idx), eig in zip(table.entries, table.eigenfunctions):
        ell = int(round((-1.0 + np.sqrt(1.0 + 4.0 * max(lam, 0.0))) / 2.0))
        if (ell, abs(k)) in seen:
            continue
        seen.add((ell, abs(k)))
        w = np.abs(np.sin(eig.nodes) ** 2 * np.cos(eig.nodes)) ** (1.0 / 6.0)
        sup_radial = float(np.max(w * np.abs(eig.values))) / np.sqrt(2.0 * np.pi)
        sup_harm = harmonics.weighted_sup(
            harmonics.BasisIndex(ell, abs(k)), args.grid_size
        )
        worst = max(worst, abs(sup_radial - sup_harm))
    return worst


def _general_verify_rows(args):
    import numpy as np

    from . import surface

    profile = surface.profile_from_json(args.surface)
    table = surface.build_spectrum(profile, args.n_modes, args.grid_points)
    rows = []
    ratios = []
    lams = []
    sups = []
    for (lam, k, _idx), eig in zip(table.entries, table.eigenfunctions):
        sup = surface.weighted_sup_radial(profile, eig)
        if lam > 0.5:
            ratio = sup / lam ** (1.0 / 12.0)
            ratios.append(ratio)
            lams.append(lam)
            sups.append(sup)
            rows.append(f"{lam:.12g},{k},{sup:.12g},{ratio:.12g}")
        else:
            rows.append(f"{lam:.12g},{k},{sup:.12g},")
    slope = float(np.polyfit(np.log(lams), np.log(sups), 1)[0])
    return rows, float(np.max(ratios)), slope, "lambda,k,weighted_sup,ratio_to_lambda_1_12"


def _cmd_verify_bounds(args) -> int:
    rows, c_star, slope, header = (
        _sphere_verify_rows(args) if args.surface == "sphere" else _general_verify_rows(args)
    )
    cross_note = ""
    failed = False
    if args.surface == "sphere":
        slope_cap = 1.0 / 6.0 + 0.02
        failed = slope > slope_cap
        if args.cross_modes > 0:
            gap = _sphere_cross_check(args)
            cross_note = f"# cross_module_max_diff = {gap:.6e}\n"
            print(f"cross-module sup agreement: max diff {gap:.3e} (tol {args.tol:g})")
            failed = failed or gap > args.tol
    else:
        slope_cap = 1.0 / 12.0 + 0.02
        failed = slope > slope_cap
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        fh.write("\n".join(rows) + "\n")
        fh.write(f"# C_star = {c_star:.12g}\n# slope = {slope:.12g}\n{cross_note}")
    print(f"C* = {c_star:.6f}")
    print(f"log-log slope = {slope:.6f} (cap {slope_cap:.6f})")
    print(f"report -> {args.out}")
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_orthocheck(args) -> int:
    import numpy as np

    from . import harmonics

    if args.max_degree > 30:
        raise ValueError("orthocheck is limited to max degree 30")
    G = harmonics.gram_matrix(args.max_degree, args.n_theta, args.n_phi)
    n = G.shape[0]
    diag_dev = float(np.max(np.abs(np.diagonal(G) - 1.0)))
    off = G - np.diag(np.diagonal(G))
    off_dev = float(np.max(np.abs(off))) if n > 1 else 0.0
    print(f"N = {n} basis functions")
    print(f"max diagonal deviation    = {diag_dev:.3e}")
    print(f"max off-diagonal deviation = {off_dev:.3e}")
    if max(diag_dev, off_dev) > args.tol:
        print(f"FAIL: deviation exceeds {args.tol:g}")
        return EXIT_VERIFY
    print(f"OK: within {args.tol:g}")
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    from . import surface

    profile = (
        surface.sphere_profile() if args.profile == "sphere"
        else surface.profile_from_json(args.profile)
    )
    table = surface.build_spectrum(profile, args.n_modes, args.grid_points)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("rank,lambda,k\n")
        for rank, (lam, k, _idx) in enumerate(table.entries, start=1):
            fh.write(f"{rank},{lam:.12g},{k}\n")
    if args.save:
        surface.save_spectrum(table, args.save)
        print(f"eigenfunctions -> {args.save}")
    print(f"{table.N} modes -> {args.out}")
    return EXIT_OK


def _cmd_solve(args) -> int:
    import numpy as np

    from . import sensing, solver

    A = sensing.load_matrix(args.matrix)
    y = sensing.load_matrix(args.y).ravel()
    if y.shape[0] != A.shape[0]:
        raise ValueError(f"matrix has {A.shape[0]} rows but y has {y.shape[0]} entries")
    config = _solver_overrides(solver.SolverConfig(), args.max_iter, args.eps_feas)
    result = solver.basis_pursuit_denoise(A, y, eps=args.eps, config=config)
    summary = {
        "m": int(A.shape[0]),
        "N": int(A.shape[1]),
        "objective": result.objective,
        "residual": result.residual,
        "iterations": result.iterations,
        "status": result.status,
        "converged": result.converged,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    if args.out:
        sensing.export_vector(np.asarray(result.c_sharp), args.out)
        print(f"minimizer -> {args.out}")
    return EXIT_OK if result.converged else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    _cap_blas_threads()
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "phase": _cmd_phase,
        "verify-bounds": _cmd_verify_bounds,
        "orthocheck": _cmd_orthocheck,
        "spectrum": _cmd_spectrum,
        "solve": _cmd_solve,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, TypeError, OSError) as exc:
        print(f"revsense: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
