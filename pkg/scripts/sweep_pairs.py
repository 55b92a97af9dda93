"""Surjectivity evidence for the two-dimensional rotation-coupled problems.

For every ``(r1, r2, m)`` in the box, onto cases must solve seeded random
right-hand sides; the others must leave a residual on the constructed witness.
"""
from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass

import numpy as np

from rhsing.indices import ConstraintProfile
from rhsing.scalar import pair_onto, pair_symbol, pair_witness
from rhsing.spaces import BoundaryFunction, ConstrainedFunction, random_rm_element
from rhsing.spectral import assemble, solve_ls


@dataclass
class Config:
    r_min: int = -2
    r_max: int = 3
    m_max: int = 4
    n_rhs: int = 10
    dg: int = 32
    seed: int = 0


def residual(r1, r2, m, cores, dg):
    sysm = assemble(pair_symbol(r1, r2).circle_conjugate(), ConstraintProfile(((2, m),)), dg)
    return solve_ls(sysm, [ConstrainedFunction(m, BoundaryFunction.exact(c)) for c in cores]).residual


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for name in ("r_min", "r_max", "m_max", "n_rhs", "dg", "seed"):
        ap.add_argument("--" + name.replace("_", "-"), type=int, default=getattr(Config, name))
    cfg = Config(**vars(ap.parse_args()))
    rng = np.random.default_rng(cfg.seed)
    rs = range(cfg.r_min, cfg.r_max + 1)
    disagreements = 0
    for r1, r2, m in itertools.product(rs, rs, range(cfg.m_max + 1)):
        if pair_onto(r1, r2, m):
            res = max(residual(r1, r2, m, [random_rm_element(m, 4, rng) for _ in range(2)], cfg.dg)
                      for _ in range(cfg.n_rhs))
            agree = res < 1e-8
        else:
            res = residual(r1, r2, m, pair_witness(r1, r2, m), cfg.dg)
            agree = res >= 0.01
        disagreements += not agree
        print(f"{r1:3d} {r2:3d} {m:2d}  onto={pair_onto(r1, r2, m)!s:5}  residual={res:.3e}  {'ok' if agree else 'MISMATCH'}")
    print(f"disagreements: {disagreements}")
    sys.exit(1 if disagreements else 0)


if __name__ == "__main__":
    main()
