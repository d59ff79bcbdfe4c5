"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 I/O or validation error,
3 input is not a density operator, 4 reference state not informationally
complete.
"""

from __future__ import annotations

import argparse
import datetime
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, finite as fin, io
from .checks import CheckError, run_checks
from .config import RunConfig
from .errors import InvalidState, NotInformationallyComplete, PhasePomError
from .fock import FockSpace, coherent_state, fock_state, projector, random_density, validate_density
from .phase import PhaseGrid, check_orthogonality
from .tomo import MeasurementData, forward_model, ic_condition, reconstruct

EXIT_OK, EXIT_CHECK, EXIT_IO, EXIT_STATE, EXIT_NOT_IC = 0, 1, 2, 3, 4

FINITE_ROUND_TRIP_TOL = 1e-10
CONT_FIDELITY_TOL = 0.9999

log = logging.getLogger("phasepom")


class UsageError(Exception):
    pass


def _meta() -> dict:
    return {
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }


def _report(result: dict, cfg: RunConfig | None = None) -> dict:
    out = {"meta": _meta()}
    if cfg is not None:
        out["config"] = cfg.to_dict()
    out["result"] = result
    return out


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = RunConfig.from_dict(io.read_json(args.config), cfg)
    overrides = {k: getattr(args, k) for k in ("L", "M", "N", "nphys", "d", "seed") if getattr(args, k, None) is not None}
    cfg = RunConfig.from_dict(overrides, cfg)
    for item in getattr(args, "tol", None) or []:
        name, _, value = item.partition("=")
        try:
            cfg.tolerances = {**cfg.tolerances, name: float(value)}
        except ValueError:
            raise UsageError(f"bad --tol {item!r}; expected name=value") from None
    return cfg.validate()


def _load_state(path, dim: int, label: str) -> np.ndarray:
    rho = io.read_matrix(path)
    rho = validate_density(rho)
    if rho.shape[0] > dim:
        raise UsageError(f"{label} has dimension {rho.shape[0]}, larger than {dim}")
    if rho.shape[0] < dim:
        pad = np.zeros((dim, dim), dtype=complex)
        pad[: rho.shape[0], : rho.shape[0]] = rho
        rho = pad
    return rho


def _default_ref(dim: int) -> np.ndarray:
    return projector(fock_state(0, FockSpace(dim, 1)))


def _domain(args, cfg):
    if args.regime == "finite":
        return fin.FiniteHeisenberg(cfg.d), cfg.d
    return PhaseGrid(cfg.L, cfg.M), cfg.N


def cmd_husimi(args) -> int:
    cfg = _load_config(args)
    domain, dim = _domain(args, cfg)
    W = _load_state(args.state, dim, "state")
    T = _load_state(args.ref_state, dim, "reference state") if args.ref_state else _default_ref(dim)
    data = forward_model(W, T, domain)
    if args.regime == "finite":
        io.write_finite_csv(data.values, cfg.d, args.out)
    else:
        io.write_field_csv(data.values, domain, args.out)
    total = data.total()
    peak = float(np.abs(data.values).max())
    print(f"integral: {total.real:.17g} (defect {abs(total - 1):.3e})")
    print(f"peak: {peak:.17g}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _write_report(obj, path):
    if path:
        io.write_json(obj, path)
        print(f"wrote {path}")
    else:
        sys.stdout.write(io.dumps(obj))


def cmd_checks(args) -> int:
    cfg = _load_config(args)
    try:
        result = run_checks(cfg, args.regime)
    except CheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    for c in result["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}: defect {c['defect']:.3e} (tol {c['tolerance']:.1e})")
    _write_report(_report(result, cfg), args.out)
    return EXIT_OK if result["passed"] else EXIT_CHECK


def cmd_finite_demo(args) -> int:
    cfg = _load_config(args)
    result = run_checks(cfg, "finite")
    grp = fin.FiniteHeisenberg(cfg.d)
    mult = fin.isotypic_decompose(grp)
    result["multiplicity"] = mult.integer
    result["multiplicity_value"] = [mult.multiplicity.real, mult.multiplicity.imag]
    for c in result["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}: defect {c['defect']:.3e}")
    if args.tables:
        outdir = Path(args.tables)
        outdir.mkdir(parents=True, exist_ok=True)
        rep = fin.schrodinger_rep(grp)
        for q, p in grp.points():
            io.write_matrix(rep.at(q, p), outdir / f"pi_{q}_{p}.json", q=q, p=p, modulus=cfg.d)
        print(f"wrote {cfg.d * cfg.d} representation tables to {outdir}")
    _write_report(_report(result, cfg), args.report or args.out)
    return EXIT_OK if result["passed"] else EXIT_CHECK


def cmd_reconstruct(args) -> int:
    cfg = _load_config(args)
    if args.regime == "finite":
        domain = fin.FiniteHeisenberg(cfg.d)
        values = io.read_finite_csv(args.data, cfg.d)
        T = _load_state(args.ref_state, cfg.d, "reference state")
        cutoff = cfg.d if args.cutoff is None else args.cutoff
    else:
        values, domain = io.read_field_csv(args.data)
        T = _load_state(args.ref_state, cfg.N, "reference state")
        cutoff = 16 if args.cutoff is None else args.cutoff
    truth = _load_state(args.truth, T.shape[0], "truth") if args.truth else None
    ic = ic_condition(T, domain)
    print(f"ic_condition: {ic.verdict} ({ic.rationale})")
    rec = reconstruct(MeasurementData(values, domain), T, cutoff=cutoff, truth=truth)
    io.write_matrix(rec.operator, args.out)
    report = dict(rec.report)
    report["ic"] = {"min_abs": ic.min_abs, "zero_fraction": ic.zero_fraction, "verdict": ic.verdict}
    status = EXIT_OK
    print(f"verdict: {report['verdict']} (damped modes {report['damped_modes']})")
    if truth is not None:
        print(f"defect: {report['defect']:.3e}")
        print(f"fidelity: {report['fidelity']:.12f}")
        ok = (report["defect"] <= FINITE_ROUND_TRIP_TOL if args.regime == "finite"
              else report["fidelity"] >= CONT_FIDELITY_TOL)
        status = EXIT_OK if ok else EXIT_CHECK
    print(f"wrote {args.out}")
    if args.report:
        _write_report(_report(report, cfg), args.report)
    return status


def cmd_orthogonality(args) -> int:
    cfg = _load_config(args)
    index_max = cfg.orth_index_max if args.index_max is None else args.index_max
    defect = check_orthogonality(index_max, PhaseGrid(cfg.L, cfg.M), FockSpace(cfg.N, cfg.nphys))
    tol = cfg.tolerances["orthogonality"]
    ok = defect <= tol
    print(f"{'PASS' if ok else 'FAIL'} orthogonality index_max={index_max}: defect {defect:.3e} (tol {tol:.1e})")
    if args.out:
        _write_report(_report({"name": "orthogonality", "index_max": index_max, "defect": defect,
                               "tolerance": tol, "pass": ok}, cfg), args.out)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_make_state(args) -> int:
    dim = args.dim
    if dim < 1:
        raise UsageError("--dim must be positive")
    if args.kind == "fock":
        if not 0 <= args.n < dim:
            raise UsageError(f"--n must lie in [0, {dim})")
        rho = np.zeros((dim, dim), dtype=complex)
        rho[args.n, args.n] = 1.0
    elif args.kind == "coherent":
        v = coherent_state(complex(args.alpha), FockSpace(max(dim, 2), 1))[:dim]
        rho = projector(v / np.linalg.norm(v))
    elif args.kind == "mixed":
        rho = np.eye(dim, dtype=complex) / dim
    elif args.kind == "random":
        rho = random_density(FockSpace(max(dim, 2), 1), args.rank, args.seed, support=args.support or dim)[:dim, :dim]
    else:  # random pure vector spread over all levels
        rho = projector(fin.random_state_vector(dim, args.seed))
    io.write_matrix(rho, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _add_common(p, grid=True):
    p.add_argument("--config", help="JSON file with RunConfig fields")
    if grid:
        p.add_argument("--L", type=float, help="half-width of the phase-space window")
        p.add_argument("--M", type=int, help="nodes per axis (odd)")
        p.add_argument("--N", type=int, help="Fock cutoff")
        p.add_argument("--nphys", type=int, help="trusted leading block")
    p.add_argument("--d", type=int, help="odd modulus of the finite model")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasepom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("husimi", help="measurement density of Q_T for a state, as CSV")
    _add_common(p)
    p.add_argument("--state", required=True, help="state under test (JSON matrix)")
    p.add_argument("--ref-state", help="reference state T (default: vacuum / e_0)")
    p.add_argument("--regime", choices=["continuous", "finite"], default="continuous")
    p.set_defaults(func=cmd_husimi, out_required=True)

    p = sub.add_parser("checks", help="run the defect checks and write a JSON report")
    _add_common(p)
    p.add_argument("--regime", choices=["continuous", "finite", "all"], default="all")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    p.set_defaults(func=cmd_checks)

    p = sub.add_parser("finite-demo", help="finite Weyl-Heisenberg report")
    _add_common(p, grid=False)
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--tables", help="directory for representation tables")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    p.set_defaults(func=cmd_finite_demo)

    p = sub.add_parser("reconstruct", help="reconstruct a state from measurement data")
    _add_common(p)
    p.add_argument("--data", required=True, help="CSV with q,p,re,im")
    p.add_argument("--ref-state", required=True, help="reference state T (JSON matrix)")
    p.add_argument("--cutoff", type=int, help="size of the reconstructed block")
    p.add_argument("--truth", help="ground-truth state for the round-trip defect")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--regime", choices=["continuous", "finite"], default="continuous")
    p.set_defaults(func=cmd_reconstruct, out_required=True)

    p = sub.add_parser("orthogonality", help="orthogonality relations of the displacement coefficients")
    _add_common(p)
    p.add_argument("--index-max", type=int)
    p.set_defaults(func=cmd_orthogonality)

    p = sub.add_parser("make-state", help="write a density operator as a JSON matrix")
    p.add_argument("--kind", choices=["fock", "coherent", "mixed", "random", "pure"], required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--alpha", type=complex, default=1.0)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--support", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_state)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if getattr(args, "out_required", False) and not args.out:
        print("error: --out is required", file=sys.stderr)
        return EXIT_IO
    try:
        return args.func(args)
    except NotInformationallyComplete as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IC
    except InvalidState as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATE
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_IO
    except (OSError, io.ParseError, UsageError, PhasePomError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
