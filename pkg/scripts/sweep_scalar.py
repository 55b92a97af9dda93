"""Kernel dimensions of the scalar problems ``f + s zeta**l conj(f) = 0`` on ``(1-zeta)**m A``.

Compares ``max(l + 1 - m, 0)`` with the numerical kernel at several truncations
and writes one row per case.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

from rhsing.scalar import scalar_kernel_dim
from rhsing.spectral import assemble_kernel_problem, numerical_kernel


@dataclass
class Config:
    l_min: int = -2
    l_max: int = 6
    m_max: int = 4
    truncations: tuple[int, ...] = (32, 64)
    rel_tol: float = 1e-8


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--l-min", type=int, default=Config.l_min)
    ap.add_argument("--l-max", type=int, default=Config.l_max)
    ap.add_argument("--m-max", type=int, default=Config.m_max)
    ns = ap.parse_args()
    cfg = Config(ns.l_min, ns.l_max, ns.m_max)
    w = csv.writer(sys.stdout)
    w.writerow(["sign", "l", "m", "formula", *[f"oracle_{d}" for d in cfg.truncations], "gap_min"])
    mismatches = 0
    for l in range(cfg.l_min, cfg.l_max + 1):
        for m in range(cfg.m_max + 1):
            for sign in (1, -1):
                res = [numerical_kernel(assemble_kernel_problem(sign, l, m, d), cfg.rel_tol) for d in cfg.truncations]
                formula = scalar_kernel_dim(l, m)
                mismatches += any(r.dim != formula for r in res)
                w.writerow([sign, l, m, formula, *[r.dim for r in res], f"{min(r.gap_ratio for r in res):.3g}"])
    print(f"# mismatches: {mismatches}", file=sys.stderr)
    sys.exit(1 if mismatches else 0)


if __name__ == "__main__":
    main()
