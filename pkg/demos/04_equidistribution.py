"""Convergence of the normalised Hecke-orbit statistic for E4 on Gamma_0(2).

Writes a CSV (m, sigma1, statistic_re, statistic_im, tail_points, max_imag)
suitable for an external plotter.

Run:  python demos/04_equidistribution.py [mmax] [workers]
"""

from __future__ import annotations

import sys

from hecke_exponents import convergence_report, preset_config

mmax = int(sys.argv[1]) if len(sys.argv) > 1 else 201
workers = int(sys.argv[2]) if len(sys.argv) > 2 else 1

cfg = preset_config("builtin:E4", 2, mmax)
report = convergence_report(cfg, workers=workers)
for row in report.rows[-5:]:
    print(f"m={row.m:4d}  statistic={float(row.statistic.real):+.6f}  tail points={row.tail_points}")
s = report.summary
print(f"limit estimate {s.limit_estimate.real:.4f} (half range {report.half_range.limit_estimate.real:.4f})")
print(f"last-quartile max step {s.max_successive_diff:.4f} = {s.envelope_ratio:.2f} x envelope, C={s.envelope_C:.3f}")
with open("equidist_E4_level2.csv", "w") as fh:
    fh.write(report.to_csv())
print("wrote equidist_E4_level2.csv")
