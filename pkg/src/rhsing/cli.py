"""``rh`` command-line front end."""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    BlockStructureError,
    CircleSingularError,
    ConsistencyError,
    InconclusiveError,
    IrreducibleSingularityError,
    NotSurjectiveError,
    RHError,
)
from .indices import ConstraintProfile, ScanConfig, classify, diagonal_blocks
from .io import dumps_report, function_from_json, load_json, load_symbol, rhs_from_json, symbol_to_json
from .laurent import LaurentPoly, SymbolMatrix, winding_number
from .reduce import block_structure, column_reduce, rotate_symbol, rotation_from_degrees
from .scalar import scalar_kernel_basis, scalar_kernel_dim, scalar_onto, scalar_operator, solve_scalar
from .spaces import ConstrainedFunction, tau_m_of
from .spectral import assemble, assemble_kernel_problem, numerical_kernel, solve_ls

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_SINGULAR = 0, 1, 2, 3
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    inputs: tuple[str, ...] = ()
    profile: str | None = None
    truncations: tuple[int, ...] = (32, 64)
    tolerance: float = DEFAULT_TOL
    fmt: str = "json"
    seed: int = 0
    reduce: bool = False
    rotate: float | None = None
    rhs: str | None = None
    extra: dict = field(default_factory=dict)

    def scan(self) -> ScanConfig:
        return ScanConfig(rel_tol=self.tolerance)

    def audit(self) -> dict:
        return {
            "version": __version__,
            "tolerance": self.tolerance,
            "truncations": list(self.truncations),
            "modes_per_truncation": [2 * d for d in self.truncations],
            "residual_samples": 4096,
            "seed": self.seed,
        }


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"[{stage}] {type(exc).__name__}: {exc}")
        self.stage = stage
        self.exc = exc


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        exc = exc.exc
    if isinstance(exc, (CircleSingularError, IrreducibleSingularityError)):
        return EXIT_SINGULAR
    if isinstance(exc, (InconclusiveError, ConsistencyError)):
        return EXIT_INCONCLUSIVE
    return EXIT_INPUT


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (RHError, ValueError, OSError) as exc:
        raise StageError(name, exc) from exc


def _prepare_symbol(cfg: RunConfig, ref: str) -> SymbolMatrix:
    G = _stage("parse", load_symbol, ref)
    if cfg.rotate is not None:
        G = _stage("rotate", lambda: rotate_symbol(G, rotation_from_degrees(cfg.rotate)))
    return G


def _profile_for(cfg: RunConfig, G: SymbolMatrix) -> ConstraintProfile:
    if cfg.profile:
        p = _stage("parse", ConstraintProfile.parse, cfg.profile)
        if p.size != G.n_rows:
            raise StageError("parse", ValueError(f"profile {p} sums to {p.size}, symbol has size {G.n_rows}"))
        return p
    return ConstraintProfile.uniform(G.n_rows)


# ----------------------------------------------------------------------------
# Commands; each returns (report dict, exit code)
# ----------------------------------------------------------------------------

def cmd_reduce(cfg: RunConfig, ref: str):
    Gp = _prepare_symbol(cfg, ref)
    red = _stage("reduce", column_reduce, Gp)
    prof = _stage("block_structure", block_structure, red.G, red.m)
    return {
        "input": ref,
        "m": list(red.m),
        "D": red.describe_D(),
        "G": symbol_to_json(red.G),
        "profile": str(prof),
        "blocks": [list(b) for b in prof.blocks],
        "reassembles": red.reassemble() == Gp,
        "audit": cfg.audit(),
    }, EXIT_OK


def cmd_analyze(cfg: RunConfig, ref: str):
    G = _prepare_symbol(cfg, ref)
    extra = {}
    if cfg.reduce:
        red = _stage("reduce", column_reduce, G)
        G = red.G
        prof = _stage("block_structure", block_structure, G, red.m)
        extra["reduction"] = {"m": list(red.m), "D": red.describe_D()}
    else:
        _stage("analyze", winding_number, G.det())
        prof = _profile_for(cfg, G)
    rep = _stage("analyze", classify, G, prof, cfg.scan())
    return {"input": ref, **extra, **rep.to_dict(), "audit": cfg.audit()}, EXIT_OK


def _oracle(G, prof, cfg: RunConfig) -> dict:
    dims, gaps, notes = {}, {}, []
    for dg in cfg.truncations:
        sysm = assemble(G, prof, dg)
        kr = numerical_kernel(sysm, cfg.tolerance)
        dims[str(dg)] = kr.dim
        gaps[str(dg)] = kr.gap_ratio
        notes = sysm.notes
    return {"dims": dims, "gap_ratios": gaps, "stable": len(set(dims.values())) == 1,
            "well_defined": not notes, "notes": notes}


def cmd_pipeline(cfg: RunConfig, ref: str):
    Gp = _prepare_symbol(cfg, ref)
    red = _stage("reduce", column_reduce, Gp)
    prof = _stage("block_structure", block_structure, red.G, red.m)
    rep = _stage("classify", classify, red.G, prof, cfg.scan())
    oracle = _stage("oracle", _oracle, red.G, prof, cfg)
    Gd = SymbolMatrix.block_diag(diagonal_blocks(red.G, prof))
    oracle_blocks = _stage("oracle", _oracle, Gd, prof, cfg)
    checks = [
        {"check": "reduction reassembles input", "status": _ok(red.reassemble() == Gp)},
        {"check": "sum of partial indices equals Maslov index",
         "status": _ok(rep.diagnostics["sum_matches_maslov"])},
        {"check": "second differences sum to block sizes",
         "status": _ok(rep.diagnostics["second_difference_sums"] == rep.diagnostics["block_sizes"])},
        {"check": "operator well defined on constrained spaces", "status": _ok(rep.diagnostics["well_defined"]),
         "violations": rep.diagnostics["well_defined_violations"]},
    ]
    if rep.onto:
        checks.append({"check": "formula kernel dimension matches oracle (full symbol)",
                       "status": _ok(oracle["stable"] and set(oracle["dims"].values()) == {rep.kernel_dim}),
                       "formula": rep.kernel_dim, "oracle": oracle["dims"]})
        checks.append({"check": "formula kernel dimension matches oracle (block-diagonal part)",
                       "status": _ok(oracle_blocks["stable"] and set(oracle_blocks["dims"].values()) == {rep.kernel_dim}),
                       "formula": rep.kernel_dim, "oracle": oracle_blocks["dims"]})
    status = "PASS" if all(c["status"] == "PASS" for c in checks) else "FAIL"
    report = {
        "input": ref,
        "reduction": {"m": list(red.m), "D": red.describe_D(), "G": symbol_to_json(red.G)},
        "profile": str(prof),
        "blocks": [list(b) for b in prof.blocks],
        "analysis": rep.to_dict(),
        "oracle": {"full_symbol": oracle, "block_diagonal": oracle_blocks},
        "checks": checks,
        "status": status,
        "audit": cfg.audit(),
    }
    return report, EXIT_OK if status == "PASS" else EXIT_INCONCLUSIVE


def _ok(b: bool) -> str:
    return "PASS" if b else "FAIL"


def cmd_kernel(cfg: RunConfig, ref: str):
    G = _prepare_symbol(cfg, ref)
    prof = _profile_for(cfg, G)
    out = {}
    for dg in cfg.truncations:
        sysm = _stage("assemble", assemble, G, prof, dg)
        kr = numerical_kernel(sysm, cfg.tolerance)
        funcs = [sysm.vector_to_functions(v) for v in kr.basis]
        out[str(dg)] = {**kr.to_dict(), "notes": sysm.notes,
                        "basis": [_clean(f) for f in funcs] if dg == cfg.truncations[0] else "omitted"}
    dims = [v["dim"] for v in out.values()]
    return {"input": ref, "profile": str(prof), "dimension": dims[-1], "stable": len(set(dims)) == 1,
            "truncations": out, "audit": cfg.audit()}, EXIT_OK if len(set(dims)) == 1 else EXIT_INCONCLUSIVE


def _clean(arr: np.ndarray, tol: float = 1e-13) -> list:
    arr = np.where(np.abs(arr) < tol, 0, arr)
    return [[[float(c.real), float(c.imag)] for c in row] for row in arr]


def cmd_solve(cfg: RunConfig, ref: str):
    G = _prepare_symbol(cfg, ref)
    prof = _profile_for(cfg, G)
    if not cfg.rhs:
        raise StageError("parse", ValueError("--rhs is required"))
    rhs = _stage("parse", lambda: rhs_from_json(load_json(cfg.rhs)))
    dg = cfg.truncations[0]
    sysm = _stage("assemble", assemble, G, prof, dg)
    sol = _stage("solve", solve_ls, sysm, rhs, cfg.tolerance)
    return {"input": ref, "profile": str(prof), "notes": sysm.notes, **sol.to_dict(), "audit": cfg.audit()}, EXIT_OK


def cmd_scalar(cfg: RunConfig, _ref=None):
    l, m, sign = cfg.extra["l"], cfg.extra["m"], cfg.extra["sign"]
    basis = scalar_kernel_basis(sign, l, m)
    dims = {str(dg): numerical_kernel(assemble_kernel_problem(sign, l, m, dg), cfg.tolerance).dim
            for dg in cfg.truncations}
    return {"l": l, "m": m, "sign": sign, "kernel_dim": scalar_kernel_dim(l, m), "basis": basis,
            "oracle_dims": dims, "audit": cfg.audit()}, EXIT_OK


def cmd_solve_scalar(cfg: RunConfig, ref: str):
    r, m = cfg.extra["r"], cfg.extra["m"]
    d = _stage("parse", load_json, ref)
    if isinstance(d, dict) and ("core" in d or "components" in d):
        phi = _stage("parse", rhs_from_json, d)[0]
    else:
        raw = _stage("parse", function_from_json, d)
        phi = ConstrainedFunction(m, _stage("tau", tau_m_of, raw, m))
    report = {"r": r, "m": m, "onto": scalar_onto(r, m), "audit": cfg.audit()}
    if phi.core.is_exact:
        try:
            f = solve_scalar(r, m, phi)
        except NotSurjectiveError as exc:
            report.update(status="not-surjective", witness=exc.witness)
            return report, EXIT_OK
        report.update(status="solved", method="exact", solution=f,
                      check=scalar_operator(r, f) == phi.full().laurent)
        return report, EXIT_OK
    G = SymbolMatrix([[LaurentPoly.monomial(r)]])
    sysm = assemble(G, ConstraintProfile.uniform(1, m), cfg.truncations[0])
    sol = solve_ls(sysm, [phi], cfg.tolerance)
    report.update(status="solved" if sol.residual < 1e-8 else "residual-too-large", method="spectral", **sol.to_dict())
    return report, EXIT_OK


def cmd_selftest(cfg: RunConfig, _ref=None):
    from .catalog import example_g, example_gprime, example_gtilde, example_profile

    checks = []
    t0 = time.perf_counter()
    red = column_reduce(example_gprime())
    checks.append(("reduction orders (0,2,2,0)", red.m == (0, 2, 2, 0)))
    checks.append(("reduced symbol matches built-in", red.G == example_g()))
    rep = classify(red.G, block_structure(red.G, red.m), cfg.scan())
    checks.append(("partial indices 0,1,1,4", rep.partial_indices == [0, 1, 1, 4]))
    checks.append(("Maslov index 6", rep.maslov == 6))
    checks.append(("onto with kernel dimension 6", rep.onto and rep.kernel_dim == 6))
    kd = numerical_kernel(assemble(example_gtilde(), example_profile(), 32), cfg.tolerance).dim
    checks.append(("block-diagonal oracle kernel 6", kd == 6))
    checks.append(("scalar kernel (l=3, m=1) dim 3",
                   numerical_kernel(assemble_kernel_problem(1, 3, 1, 16), cfg.tolerance).dim == 3))
    full = numerical_kernel(assemble(example_g(), example_profile(), 32), cfg.tolerance).dim
    report = {
        "checks": [{"check": n, "status": _ok(ok)} for n, ok in checks],
        "informational": {"full_symbol_oracle_kernel": full, "well_defined": rep.diagnostics["well_defined"]},
        "seconds": round(time.perf_counter() - t0, 1),
        "audit": cfg.audit(),
    }
    return report, EXIT_OK if all(ok for _, ok in checks) else EXIT_INCONCLUSIVE


COMMANDS = {
    "analyze": cmd_analyze,
    "reduce": cmd_reduce,
    "pipeline": cmd_pipeline,
    "solve": cmd_solve,
    "kernel": cmd_kernel,
    "scalar": cmd_scalar,
    "solve-scalar": cmd_solve_scalar,
    "selftest": cmd_selftest,
}


def run(cfg: RunConfig, ref: str | None):
    """Run one command on one input; never raises for expected failures."""
    try:
        return COMMANDS[cfg.subcommand](cfg, ref)
    except StageError as exc:
        err = {"input": ref, "stage": exc.stage, "error": type(exc.exc).__name__, "message": str(exc.exc)}
        if isinstance(exc.exc, BlockStructureError):
            err["violations"] = [[a + 1, b + 1] for a, b in exc.exc.violations]
        if isinstance(exc.exc, InconclusiveError):
            err["diagnostics"] = exc.exc.diagnostics
        return err, _exit_code(exc)
    except (RHError, ValueError) as exc:
        return {"input": ref, "stage": cfg.subcommand, "error": type(exc).__name__, "message": str(exc)}, _exit_code(exc)


def _run_star(args):
    return run(*args)


# ----------------------------------------------------------------------------
# Text rendering
# ----------------------------------------------------------------------------

def render_text(cmd: str, rep: dict) -> str:
    if "error" in rep:
        return f"error in stage {rep['stage']}: {rep['error']}: {rep['message']}\n"
    lines = []
    analysis = rep.get("analysis", rep if "partial_indices" in rep else None)
    if "reduction" in rep or cmd == "reduce":
        m = rep["reduction"]["m"] if "reduction" in rep else rep["m"]
        lines.append(f"reduction orders m = ({', '.join(map(str, m))})")
    if "profile" in rep:
        lines.append(f"profile {rep['profile']}")
    if analysis is not None:
        lines.append(_index_table(analysis))
        lines.append(f"Maslov index kappa = {analysis['maslov']}")
        lines.append(f"onto: {'yes' if analysis['onto'] else 'no'}    kernel dimension: {analysis['kernel_dim']}")
        d = analysis["diagnostics"]
        if not d.get("well_defined", True):
            where = ", ".join(f"({v['row'] + 1},{v['col'] + 1})" for v in d["well_defined_violations"])
            lines.append(f"warning: operator not well defined on constrained spaces; entries {where}")
    for c in rep.get("checks", []):
        st = c["status"] if isinstance(c, dict) else c
        name = c["check"] if isinstance(c, dict) else ""
        extra = f"  formula {c['formula']} oracle {c['oracle']}" if isinstance(c, dict) and "oracle" in c else ""
        lines.append(f"[{st}] {name}{extra}")
    if "status" in rep:
        lines.append(f"status: {rep['status']}")
    for key in ("dimension", "kernel_dim", "residual"):
        if key in rep and analysis is None:
            lines.append(f"{key}: {rep[key]}")
    if not lines:
        return dumps_report(rep)
    return "\n".join(lines) + "\n"


def _index_table(a: dict) -> str:
    out, pos = [], 1
    blocks = ConstraintProfile.parse(a["profile"]).blocks
    for b, ((n, m), idx) in enumerate(zip(blocks, a["block_indices"]), start=1):
        ks = ", ".join(f"kappa_{pos + i} = {k}" for i, k in enumerate(idx))
        out.append(f"  block {b}: N_{b} = {n}, m_{b} = {m}:  {ks}")
        pos += n
    return "partial indices by block\n" + "\n".join(out)


# ----------------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--tolerance", type=float, default=None,
                        help="relative singular-value threshold (default: $RH_TOLERANCE or 1e-8)")
    common.add_argument("--truncation", type=int, action="append", dest="truncations",
                        help="Fourier truncation degree; repeat for several (default 32 and 64)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rotate", type=float, default=None, help="rotate the circle by a quarter-turn angle")
    common.add_argument("-o", "--output", default=None, help="write report here instead of stdout")

    p = argparse.ArgumentParser(prog="rh", description="Constrained Riemann-Hilbert problems with singular symbols.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def with_symbol(name, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("symbol", nargs="?", help="symbol JSON file or @builtin")
        sp.add_argument("--batch", default=None, help="process every *.json in this directory")
        return sp

    a = with_symbol("analyze", "partial indices, Maslov index, surjectivity and kernel dimension")
    a.add_argument("--profile", default=None)
    a.add_argument("--reduce", action="store_true", help="strip (1-z) factors from columns first")
    with_symbol("reduce", "factor a singular symbol as G conj(D)")
    with_symbol("pipeline", "reduce, classify and cross-check with the spectral oracle")
    s = with_symbol("solve", "least-squares solve")
    s.add_argument("--profile", default=None)
    s.add_argument("--rhs", required=False)
    k = with_symbol("kernel", "numerical kernel")
    k.add_argument("--profile", default=None)

    sc = sub.add_parser("scalar", parents=[common], help="scalar kernel problem f + sign z^l conj(f) = 0")
    sc.add_argument("--l", type=int, required=True)
    sc.add_argument("--m", type=int, required=True)
    sc.add_argument("--sign", type=int, choices=(1, -1), default=1)
    ss = sub.add_parser("solve-scalar", parents=[common], help="solve 2 Re[z^-r f] = phi")
    ss.add_argument("rhs_file")
    ss.add_argument("--r", type=int, required=True)
    ss.add_argument("--m", type=int, required=True)
    sub.add_parser("selftest", parents=[common], help="run the built-in checks")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    tol = ns.tolerance
    if tol is None:
        env = os.environ.get("RH_TOLERANCE")
        tol = float(env) if env else DEFAULT_TOL
    extra = {k: getattr(ns, k) for k in ("l", "m", "sign", "r") if hasattr(ns, k)}
    return RunConfig(
        subcommand=ns.subcommand,
        profile=getattr(ns, "profile", None),
        truncations=tuple(ns.truncations) if ns.truncations else (32, 64),
        tolerance=tol,
        fmt=ns.format,
        seed=ns.seed,
        reduce=getattr(ns, "reduce", False),
        rotate=ns.rotate,
        rhs=getattr(ns, "rhs", None),
        extra=extra,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        parser.error(str(exc))
    np.random.seed(cfg.seed)

    batch = getattr(ns, "batch", None)
    if batch:
        files = sorted(str(p) for p in Path(batch).glob("*.json"))
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_run_star, [(cfg, f) for f in files]))
        report = {Path(f).name: r for f, (r, _) in zip(files, results)}
        code = max((c for _, c in results), default=EXIT_OK)
        text = dumps_report(report) if cfg.fmt == "json" else "".join(
            f"== {n}\n{render_text(cfg.subcommand, r)}" for n, r in report.items())
    else:
        ref = getattr(ns, "symbol", None) or getattr(ns, "rhs_file", None)
        if cfg.subcommand in ("analyze", "reduce", "pipeline", "solve", "kernel") and not ref:
            parser.error("a symbol file or @builtin is required (or --batch DIR)")
        report, code = run(cfg, ref)
        text = dumps_report(report) if cfg.fmt == "json" else render_text(cfg.subcommand, report)
    if ns.output:
        Path(ns.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
