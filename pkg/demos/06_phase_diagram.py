"""A desk-scale recovery phase diagram, rendered as ASCII and written to disk.

Each cell (m, s) runs a handful of independent trials: plant an s-sparse
signal over 16 harmonics, measure it at m preconditioned points, solve the
ell-1 problem, and score exact recovery.  The full-resolution experiment runs
through the `phase` CLI subcommand; this demo keeps the grid tiny so it
finishes in about a minute.

Run:  python demos/06_phase_diagram.py
"""

import time

import numpy as np

from revsense import experiments

config = experiments.ExperimentConfig(
    bandlimit=4,                      # 16 coefficients
    measure="preconditioned",
    m_grid=(8, 16, 24, 32, 40),
    s_grid=(1, 2, 3, 4, 6, 8),
    trials=8,
    seed=2,
)

t0 = time.time()
diagram = experiments.run_phase(config, workers=1)
print(f"{len(config.m_grid) * len(config.s_grid)} cells x {config.trials} trials "
      f"in {time.time() - t0:.1f}s\n")

print("Success rate by cell ('#' = all trials recovered, '.' = none):")
glyphs = " .:-=+*#"
header = "  s\\m  " + "".join(f"{m:>5}" for m in diagram.m_values)
print(header)
for i in range(diagram.rates.shape[0]):
    row = ""
    for j in range(diagram.rates.shape[1]):
        row += f"{diagram.rates[i, j]:>5.2f}"
    print(f"  s={config.s_grid[i]:<3} {row}")

print("\nAs glyphs (rows: s ascending, cols: m ascending):")
for i in range(diagram.rates.shape[0]):
    line = "".join(glyphs[int(r * (len(glyphs) - 1))] for r in diagram.rates[i])
    print(f"  {line}")

experiments.write_phase_csv(diagram, "/tmp/demo_phase.csv")
experiments.write_phase_pgm(diagram, "/tmp/demo_phase.pgm")
experiments.write_phase_metadata(diagram, "/tmp/demo_phase.json")
print("\nWrote /tmp/demo_phase.{csv,pgm,json} — the same artifacts the CLI emits.")
print("Reruns with any worker count reproduce these files byte for byte.")
