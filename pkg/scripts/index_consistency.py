"""Partial indices of seeded random upper-triangular symbols.

Checks ``sum(kappa) = 2 wind(det G)`` and that nullity second differences sum
to ``N``; with ``--oracle`` also compares ``sum max(kappa + 1, 0)`` against the
spectral kernel dimension.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from rhsing.catalog import random_triangular_symbol
from rhsing.indices import ConstraintProfile, nullity_scan, partial_indices
from rhsing.laurent import winding_number
from rhsing.spectral import kernel_dimension


@dataclass
class Config:
    n_symbols: int = 50
    seed: int = 2024
    max_size: int = 4
    oracle: bool = False
    truncations: tuple[int, ...] = (96, 128)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-symbols", type=int, default=Config.n_symbols)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--oracle", action="store_true")
    ns = ap.parse_args()
    cfg = Config(ns.n_symbols, ns.seed, oracle=ns.oracle)
    rng = np.random.default_rng(cfg.seed)
    failures = 0
    for case in range(cfg.n_symbols):
        G = random_triangular_symbol(rng, int(rng.integers(1, cfg.max_size + 1)))
        k = partial_indices(G)
        scan = nullity_scan(G)
        ok = sum(k) == 2 * winding_number(G.det()) and scan.second_difference_sum == G.n_rows
        line = f"{case:3d} N={G.n_rows} kappa={k} gap={scan.min_gap:.1e}"
        if cfg.oracle:
            dims = kernel_dimension(G, ConstraintProfile.uniform(G.n_rows), cfg.truncations, output="raw")["dims"]
            ok &= set(dims.values()) == {sum(max(x + 1, 0) for x in k)}
            line += f" oracle={dims}"
        failures += not ok
        print(line + ("" if ok else "  FAIL"))
    print(f"failures: {failures}")


if __name__ == "__main__":
    main()
