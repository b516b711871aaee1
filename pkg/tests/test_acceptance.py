"""End-to-end acceptance gate.

Eight checks, each printing one ``ACCEPTANCE n: PASS/FAIL`` line with
the measured quantities before asserting.  Checks 1-5 and 7 pin the
numerical core (quadrature orthonormality, weighted sup growth, the
radial eigensolver against the closed-form sphere, solver-vs-oracle
agreement, the normalized-Legendre envelope).  Check 8 pins run
determinism across process counts, and check 6 — by far the heaviest —
sweeps full recovery phase diagrams for the three sampling measures and
compares them cellwise.  It is deliberately placed last.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from revsense import experiments, harmonics, solver, surface
from revsense.experiments import ExperimentConfig, run_phase


def _verdict(num, name, ok, detail):
    line = f"ACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'} — {detail}"
    print(line, flush=True)
    return line


def test_acceptance_1_orthonormality():
    t0 = time.time()
    gram = harmonics.gram_matrix(20)  # N = 400 basis functions
    dev = float(np.abs(gram - np.eye(400)).max())
    elapsed = time.time() - t0
    ok = dev <= 1e-10 and elapsed < 10.0
    _verdict(1, "quadrature orthonormality, 400 modes", ok,
             f"max Gram deviation {dev:.3e} (tol 1e-10), {elapsed:.1f}s (cap 10s)")
    assert dev <= 1e-10
    assert elapsed < 10.0


def test_acceptance_2_weighted_sup_growth():
    t0 = time.time()
    table = harmonics.weighted_sup_sweep(60, grid_size=4096)
    degrees = np.arange(1, 61)
    per_degree = np.array([np.nanmax(table[l, : l + 1]) for l in degrees])
    ratios = per_degree / degrees ** (1.0 / 6.0)
    c_star = float(ratios.max())
    early = float(ratios[degrees <= 30].max())
    late = float(ratios[degrees > 30].max())
    slope = float(np.polyfit(np.log(degrees), np.log(per_degree), 1)[0])
    cap = 1.0 / 6.0 + 0.02
    elapsed = time.time() - t0
    ok = late <= 1.05 * early and slope <= cap and elapsed < 120.0
    _verdict(2, "weighted sup bounded by degree^(1/6)", ok,
             f"C*={c_star:.4f}, log-log slope {slope:.4f} (cap {cap:.4f}), "
             f"late-degree max {late:.4f} vs early {early:.4f}, {elapsed:.1f}s (cap 120s)")
    assert late <= 1.05 * early  # no growth of the ratio beyond the constant
    assert slope <= cap
    assert elapsed < 120.0


def test_acceptance_3_radial_solver_vs_closed_form():
    t0 = time.time()
    table = surface.build_spectrum(surface.sphere_profile(), 100, grid_points=4000)
    lams = np.array([entry[0] for entry in table.entries])
    expected = np.repeat(
        [l * (l + 1) for l in range(10)], [2 * l + 1 for l in range(10)]
    ).astype(float)
    rel = np.abs(lams - expected) / np.maximum(expected, 1.0)
    rng = np.random.default_rng(14)
    worst_mod = 0.0
    for _ in range(20):
        r = float(np.arccos(1.0 - 2.0 * rng.uniform()))  # area-uniform colatitude
        phi = float(rng.uniform(0.0, 2.0 * np.pi))
        j = int(rng.integers(0, 100))
        lam, k = table.entries[j][0], table.entries[j][1]
        degree = round((-1.0 + np.sqrt(1.0 + 4.0 * max(lam, 0.0))) / 2.0)
        got = abs(surface.eval_eigenfunction(table.eigenfunctions[j], r, phi))
        ref = abs(
            harmonics.eval_harmonic(
                harmonics.BasisIndex(degree, k), harmonics.SphericalPoint(r, phi)
            )
        )
        worst_mod = max(worst_mod, abs(got - ref))
    elapsed = time.time() - t0
    ok = rel.max() <= 1e-3 and worst_mod <= 1e-3 and elapsed < 60.0
    _verdict(3, "first 100 eigenpairs vs closed forms", ok,
             f"max eigenvalue rel err {rel.max():.2e} (tol 1e-3), "
             f"worst eigenfunction modulus dev {worst_mod:.2e} (tol 1e-3), "
             f"{elapsed:.1f}s (cap 60s)")
    assert rel.max() <= 1e-3
    assert worst_mod <= 1e-3
    assert elapsed < 60.0


def test_acceptance_4_weighted_sups_nonround_profile():
    t0 = time.time()
    r = np.linspace(0.0, np.pi, 481)
    a = np.sin(r) * (1.0 + 0.2 * np.sin(r))
    prof = surface.profile_from_json({"r": r.tolist(), "a": a.tolist(), "name": "bulge"})
    table = surface.build_spectrum(prof, 400, grid_points=4000)
    lams = np.array([entry[0] for entry in table.entries])
    sups = np.array(
        [surface.weighted_sup_radial(prof, eig) for eig in table.eigenfunctions]
    )
    keep = lams > 0.5  # the zero mode carries no eigenvalue scale
    ratios = sups[keep] / lams[keep] ** (1.0 / 12.0)
    lo = lams[keep] <= np.median(lams[keep])
    early, late = float(ratios[lo].max()), float(ratios[~lo].max())
    slope = float(np.polyfit(np.log(lams[keep]), np.log(sups[keep]), 1)[0])
    cap = 1.0 / 12.0 + 0.02
    elapsed = time.time() - t0
    ok = late <= 1.05 * early and slope <= cap and elapsed < 300.0
    _verdict(4, "weighted sups bounded on a bulged profile, 400 modes", ok,
             f"C={ratios.max():.4f}, log-log slope {slope:.4f} (cap {cap:.4f}), "
             f"high-eigenvalue max {late:.4f} vs low {early:.4f}, {elapsed:.1f}s (cap 300s)")
    assert late <= 1.05 * early
    assert slope <= cap
    assert elapsed < 300.0


def test_acceptance_5_solver_oracle_equivalence():
    t0 = time.time()
    rng = np.random.default_rng(20240816)
    worst_gap = 0.0
    unique_count = 0
    for _ in range(100):
        A = rng.standard_normal((6, 12))
        s = int(rng.integers(0, 3))
        c = np.zeros(12)
        if s:
            support = rng.choice(12, size=s, replace=False)
            c[support] = rng.standard_normal(s) + np.sign(rng.standard_normal(s)) * 0.5
        y = A @ c
        z_star, obj_star, unique = solver.oracle_bp(A, y)
        result = solver.basis_pursuit(A, y)
        assert result.converged, result.status
        worst_gap = max(worst_gap, abs(result.objective - obj_star))
        if unique:
            unique_count += 1
            # same relative floor on both sides: least-squares dust on the
            # oracle's candidate support is not a support member
            def support_of(v):
                scale = max(1.0, float(np.abs(v).max()))
                return set(np.flatnonzero(np.abs(v) > 1e-5 * scale).tolist())

            assert support_of(result.c_sharp) == support_of(z_star)
    elapsed = time.time() - t0
    ok = worst_gap <= 1e-6 and elapsed < 60.0
    _verdict(5, "first-order solver vs enumeration oracle, 100 instances", ok,
             f"max objective gap {worst_gap:.2e} (tol 1e-6), "
             f"support recovered on all {unique_count} unique instances, "
             f"{elapsed:.1f}s (cap 60s)")
    assert worst_gap <= 1e-6
    assert elapsed < 60.0


def test_acceptance_7_legendre_envelope():
    t0 = time.time()
    x = np.linspace(-1.0, 1.0, 10000)
    envelope = np.sqrt(1.0 - x**2)
    worst = 0.0
    for j in range(201):
        vals = envelope * np.abs(harmonics.eval_legendre_normalized(j, x))
        worst = max(worst, float(vals.max()))
    bound = 2.0 * np.sqrt(np.pi)
    elapsed = time.time() - t0
    ok = worst <= bound and elapsed < 5.0
    _verdict(7, "normalized-Legendre envelope, j <= 200", ok,
             f"max (1-x^2)^(1/2)|P_j(x)| = {worst:.4f} (bound {bound:.4f}), "
             f"{elapsed:.1f}s (cap 5s)")
    assert worst <= bound
    assert elapsed < 5.0


def test_acceptance_8_thread_count_determinism(tmp_path):
    common = [
        "phase",
        "--bandlimit", "4",
        "--m-grid", "4,8,12,16",
        "--s-grid", "1,2,4",
        "--trials", "5",
        "--seed", "11",
        "--measure", "preconditioned",
    ]
    outputs = {}
    for workers in (1, 8):
        out = tmp_path / f"workers{workers}"
        result = subprocess.run(
            [sys.executable, "-m", "revsense.cli", *common,
             "--out", str(out), "--workers", str(workers)],
            capture_output=True, text=True, timeout=600,
        )
        assert result.returncode == 0, result.stderr
        outputs[workers] = (out / "phase.csv").read_bytes()
    ok = outputs[1] == outputs[8]
    _verdict(8, "byte-identical runs at 1 and 8 processes", ok,
             f"{len(outputs[1])} CSV bytes compared")
    assert outputs[1] == outputs[8]


def test_acceptance_6_phase_diagram_measure_ordering(tmp_path_factory):
    # Full desk-scale sweep: 400 modes, the default 20x20 (m, s) grid,
    # 20 trials per cell, for the volume, uniform, and preconditioned
    # sampling measures.  Dominates the suite's runtime (hours on one core).
    t0 = time.time()
    diagrams = {}
    for measure in ("volume", "uniform", "preconditioned"):
        t1 = time.time()
        cfg = ExperimentConfig(bandlimit=20, measure=measure, trials=20, seed=1)
        diagram = run_phase(cfg, workers=1)
        out = tmp_path_factory.mktemp(f"phase_{measure}")
        experiments.write_phase_csv(diagram, str(out / "phase.csv"))
        experiments.write_phase_pgm(diagram, str(out / "phase.pgm"))
        experiments.write_phase_metadata(diagram, str(out / "phase_metadata.json"))
        diagrams[measure] = diagram
        print(
            f"ACCEPTANCE 6: {measure} panel finished in {(time.time() - t1) / 60:.1f} min"
            f" -> {out}",
            flush=True,
        )
    m = np.array(diagrams["volume"].m_values, dtype=float)
    n_modes = 400
    rate_a = diagrams["volume"].rates
    rate_b = diagrams["uniform"].rates
    rate_c = diagrams["preconditioned"].rates

    # (i) cellwise: preconditioned within 0.1 of volume on >= 95% of the
    # cells with m/N >= 0.3
    cols_i = m / n_modes >= 0.3
    cells = int(rate_a[:, cols_i].size)
    good = int(np.sum(rate_c[:, cols_i] >= rate_a[:, cols_i] - 0.1 - 1e-12))
    compliance = good / cells

    # (ii) strict containment of the high-rate region at m/N >= 0.5,
    # measured as the count of cells with success rate >= 0.95
    cols_ii = m / n_modes >= 0.5
    count_a = int(np.sum(rate_a[:, cols_ii] >= 0.95))
    count_b = int(np.sum(rate_b[:, cols_ii] >= 0.95))
    count_c = int(np.sum(rate_c[:, cols_ii] >= 0.95))

    elapsed_min = (time.time() - t0) / 60.0
    ok = compliance >= 0.95 and count_c > count_a
    _verdict(
        6,
        "phase-diagram ordering of sampling measures",
        ok,
        f"cellwise compliance {compliance:.1%} of {cells} cells (need >= 95.0%); "
        f"high-m cells at rate >= 0.95: preconditioned {count_c} vs volume {count_a} "
        f"(need strict >; uniform {count_b}); {elapsed_min:.0f} min total "
        f"(target 45 min on 8 cores)",
    )
    assert compliance >= 0.95, (
        f"preconditioned sampling trails volume sampling by more than 0.1 on "
        f"{cells - good} of {cells} cells"
    )
    assert count_c > count_a, (
        "the preconditioned high-success region does not strictly contain the "
        "volume one at this grid scale and solver budget"
    )
