"""Command-line front end: ``dfs-forge <subcommand> ...``.

Every subcommand writes line-delimited JSON (``table``, ``efficiency`` and
``simulate`` can emit CSV instead).  Exit status is 0 when every check
passes, 1 on a verification failure and 2 on invalid input.  Half-integer
labels are passed as ``--twoj 2J``; for the weak model the same flag carries
the ``S_z`` eigenvalue ``lambda``.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import replace

import numpy as np

from . import basis as bs
from .compiler import CompileError, Primitive, compile_unitary, exchange_primitives
from .io import decode_matrix, decode_vector, dumps, encode_matrix
from .lie import LeakageError, closure_report
from .lindblad import IntegrationError, LindbladModel, block_population, evolve, fidelity, lambda_state, encode
from .linalg import DimensionError, NotUnitaryError, ResourceLimitError
from .operators import InvalidIndexError, OperatorSpec, a_bar, exchange, t_p, t_q, weak_generators
from .reports import (EFFICIENCY_COLUMNS, PLUMBING, TABLE_COLUMNS, TRACE_COLUMNS, Report, RunConfig, efficiency_curve,
                      table_degeneracies, to_csv)
from .stabilizer import (check_dfs_condition, coupling_operators, fixed_point_property, kl_check,
                         wcd_finite_stabilizer_check, weight_one_paulis)

log = logging.getLogger("dfs_forge")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
CHECKS = ("dfs", "stabilizer", "kl", "finite")
INPUT_ERRORS = (ValueError, KeyError, DimensionError, ResourceLimitError, InvalidIndexError, OSError,
                json.JSONDecodeError, NotUnitaryError, LeakageError)

_GEN_RE = re.compile(r"^(E|TP|TQ|A)(\d+)(?:[:\-](\d+))?$")
_GEN_KIND = {"E": exchange, "TP": t_p, "TQ": t_q, "A": a_bar}


class InputError(ValueError):
    pass


def parse_generator(token: str, n: int) -> OperatorSpec:
    """``E12`` / ``E1:2`` exchange, ``TP``/``TQ`` family members, ``A`` the single-qubit-flavoured T."""
    m = _GEN_RE.match(token.strip())
    if not m:
        raise InputError(f"cannot parse generator {token!r}")
    kind, a, b = m.groups()
    if b is None:
        if len(a) != 2:
            raise InputError(f"ambiguous generator {token!r}; write it as {kind}i:j")
        a, b = a[0], a[1]
    return _GEN_KIND[kind](int(a), int(b), n)


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _resolve_block(cfg: RunConfig) -> bs.DfsBlock:
    if cfg.twoJ is None:
        raise InputError("--twoj is required")
    bs.check_label(cfg.model, cfg.n, cfg.twoJ)
    return bs.block(cfg.model, cfg.n, cfg.twoJ)


def _primitives(model: str, n: int, names=None) -> list[Primitive]:
    if names:
        return [Primitive.of(parse_generator(t, n)) for t in names]
    if model == bs.STRONG:
        return exchange_primitives(n)
    return [Primitive.of(s) for s in weak_generators(n)]


# -- subcommands --------------------------------------------------------------------

def cmd_basis(cfg: RunConfig) -> tuple[list[str], int]:
    blk = _resolve_block(cfg)
    return [dumps(blk.to_json())], EXIT_OK


def _verify_reports(cfg: RunConfig, blk: bs.DfsBlock) -> list[Report]:
    out = []
    anchor = f"{cfg.model} collective block n={cfg.n} label={cfg.twoJ}"
    for check in cfg.checks:
        if check == "dfs":
            r = check_dfs_condition(blk, coupling_operators(blk.model, blk.n), cfg.tol)
            out.append(Report("dfs_condition", r.passed, {"worst_deviation": r.worst_deviation},
                              f"membership condition, {anchor}",
                              {"M": [encode_matrix(m) for m in r.M], "leakage": r.leakage}))
        elif check == "stabilizer":
            rng = np.random.default_rng(cfg.seed)
            fp = fixed_point_property(blk, rng, n_v=cfg.n_samples)
            ok = fp["block_max_deviation"] <= cfg.tol and (fp["n_states"] == 0 or fp["orth_min_violation"] >= 1e-3)
            out.append(Report("stabilizer_fixed_point", ok,
                              {"worst_deviation": fp["block_max_deviation"],
                               "orth_min_violation": fp["orth_min_violation"] if fp["n_states"] else None},
                              f"continuous stabilizer, {anchor}", {"seed": cfg.seed, "samples": cfg.n_samples}))
        elif check == "kl":
            r = kl_check(blk, weight_one_paulis(blk.n))
            out.append(Report("kl_detect_weight_one", r.passed, {"worst_deviation": r.worst_deviation},
                              f"error-detection condition, {anchor}", {"c": encode_matrix(r.c)}))
        elif check == "finite":
            if blk.model != bs.WEAK:
                raise InputError("the finite stabilizer exists only for the weak model")
            fixed = [wcd_finite_stabilizer_check(blk.n, blk.label, blk.basis[:, k]) for k in range(blk.dim)]
            out.append(Report("finite_stabilizer", all(fixed), {"fixed_columns": sum(fixed), "columns": blk.dim},
                              f"finite weak stabilizer, {anchor}"))
        else:
            raise InputError(f"unknown check {check!r}; choose from {CHECKS}")
    return out


def cmd_verify(cfg: RunConfig) -> tuple[list[str], int]:
    blk = _resolve_block(cfg)
    reports = _verify_reports(cfg, blk)
    lines = [_report_line(r) for r in reports]
    return lines, EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _report_line(r: Report) -> str:
    obj = r.to_json()
    if "worst_deviation" in r.metrics:
        obj["worst_deviation"] = r.metrics["worst_deviation"]
    return dumps(obj)


def cmd_closure(cfg: RunConfig) -> tuple[list[str], int]:
    labels = None
    if cfg.twoJ is not None:
        bs.check_label(cfg.model, cfg.n, cfg.twoJ)
        labels = [cfg.twoJ]
    gens = [parse_generator(t, cfg.n) for t in cfg.generators] if cfg.generators else None
    rep = closure_report(cfg.model, cfg.n, labels, gens, cfg.tol)
    report = Report("closure", rep["pass"], {"total_dim": rep["total_dim"]},
                    f"{cfg.model} collective universality certificate", {"per_block": rep["per_block"]})
    obj = report.to_json()
    obj.update({"model": cfg.model, "n": cfg.n, "per_block": rep["per_block"]})
    return [dumps(obj)], EXIT_OK if rep["pass"] else EXIT_FAIL


def cmd_compile(cfg: RunConfig) -> tuple[list[str], int]:
    blk = _resolve_block(cfg)
    if cfg.target is None:
        raise InputError("--target is required")
    target = decode_matrix(_load_json(cfg.target))
    prims = _primitives(cfg.model, cfg.n, cfg.generators)
    try:
        res = compile_unitary(target, blk, prims, cfg.epsilon)
    except CompileError as err:
        rep = Report("compile", False, {"best_error": err.best_error, "length": err.length},
                     PLUMBING, {"reason": str(err)})
        return [dumps(rep.to_json())], EXIT_FAIL
    obj = res.sequence.to_json()
    obj.update({"check": "compile", "pass": True, "prefix_leakage": res.leakage, "n_trotter": res.n_trotter,
                "primitives": [p.to_json() for p in prims], "provenance": PLUMBING})
    return [dumps(obj)], EXIT_OK


def _simulation_inputs(cfg: RunConfig):
    blk = None
    if cfg.model_file:
        spec = _load_json(cfg.model_file)
        f_ops = [decode_matrix(f) for f in spec["F_ops"]]
        a = decode_matrix(spec["a"])
        h_s = decode_matrix(spec["H_S"]) if spec.get("H_S") is not None else None
        rho0 = spec["rho0"]
        rho0 = decode_matrix(rho0) if isinstance(rho0[0][0], list) else decode_vector(rho0)
        T, dt = float(spec["T"]), float(spec.get("dt", 1e-3))
        if "block" in spec:
            b = spec["block"]
            bs.check_label(b["model"], int(b["n"]), int(b["twoJ"]))
            blk = bs.block(b["model"], int(b["n"]), int(b["twoJ"]))
        elif cfg.twoJ is not None:
            blk = _resolve_block(cfg)
        model = LindbladModel(f_ops, a, h_s)
    else:
        blk = _resolve_block(cfg)
        f_ops = coupling_operators(cfg.model, cfg.n)
        model = LindbladModel(f_ops, np.eye(len(f_ops)))
        lam = np.zeros(blk.n_J)
        lam[0] = 1.0
        rho0 = encode(blk, lam, np.eye(blk.d_J) / blk.d_J)
        T, dt = 1.0, 1e-3
    if rho0.ndim == 1:
        rho0 = np.outer(rho0, rho0.conj())
    return model, rho0, T, dt, blk


def simulate_rows(model, rho0, T, dt, blk=None) -> list[dict]:
    traj = evolve(model, rho0, T, dt)
    ref = None
    if blk is not None:
        pop0 = block_population(blk, rho0)
        if pop0 > 1e-12:
            ref = lambda_state(blk, rho0) / pop0
    rows = []
    for t, rho in zip(traj.times, traj.states):
        row = {"t": float(t), "trace": float(np.trace(rho).real)}
        if blk is not None:
            row["block_population"] = block_population(blk, rho)
            row["lambda_fidelity"] = fidelity(lambda_state(blk, rho), ref) if ref is not None else ""
        rows.append(row)
    return rows


def cmd_simulate(cfg: RunConfig) -> tuple[list[str], int]:
    model, rho0, T, dt, blk = _simulation_inputs(cfg)
    try:
        rows = simulate_rows(model, rho0, T, dt, blk)
    except IntegrationError as err:
        rep = Report("simulate", False, {}, PLUMBING, {"reason": str(err)})
        return [dumps(rep.to_json())], EXIT_FAIL
    if cfg.format == "csv":
        return [to_csv(rows, TRACE_COLUMNS).rstrip("\n")], EXIT_OK
    final = rows[-1]
    rep = Report("simulate", True, {k: v for k, v in final.items() if v != ""}, PLUMBING, {"samples": len(rows)})
    return [dumps(rep.to_json())], EXIT_OK


def cmd_table(cfg: RunConfig) -> tuple[list[str], int]:
    rep = table_degeneracies(cfg.max_n)
    code = EXIT_OK if rep.passed else EXIT_FAIL
    if cfg.format == "csv":
        return [to_csv(rep.details["rows"], TABLE_COLUMNS).rstrip("\n")], code
    return [rep.line()], code


def cmd_efficiency(cfg: RunConfig) -> tuple[list[str], int]:
    rep = efficiency_curve(cfg.n_list)
    code = EXIT_OK if rep.passed else EXIT_FAIL
    if cfg.format == "csv":
        return [to_csv(rep.details["points"], EFFICIENCY_COLUMNS).rstrip("\n")], code
    return [rep.line()], code


COMMANDS = {
    "basis": cmd_basis, "verify": cmd_verify, "closure": cmd_closure, "compile": cmd_compile,
    "simulate": cmd_simulate, "table": cmd_table, "efficiency": cmd_efficiency,
}


def run(cfg: RunConfig, stream=None) -> int:
    """Dispatch one configured run; returns the exit code."""
    stream = stream or sys.stdout
    try:
        if cfg.subcommand not in COMMANDS:
            raise InputError(f"unknown subcommand {cfg.subcommand!r}")
        if cfg.n < 1:
            raise InputError("n must be >= 1")
        if cfg.model not in (bs.WEAK, bs.STRONG):
            raise InputError(f"model must be weak or strong, got {cfg.model!r}")
        lines, code = COMMANDS[cfg.subcommand](cfg)
    except INPUT_ERRORS as err:
        log.error("invalid input: %s", err)
        stream.write(dumps({"check": cfg.subcommand, "pass": False, "error": str(err),
                            "provenance": "plumbing"}) + "\n")
        return EXIT_INPUT
    text = "\n".join(lines) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        stream.write(text)
    return code


def _csv_list(s: str) -> list[str]:
    return [t for t in s.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dfs-forge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, twoj_required=False):
        sp.add_argument("--model", choices=(bs.WEAK, bs.STRONG), default=bs.STRONG)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--twoj", type=int, required=twoj_required,
                        help="2J for the strong model, lambda for the weak model")
        sp.add_argument("--output", "-o")

    sp = sub.add_parser("basis", help="emit a DFS block as JSON")
    common(sp, twoj_required=True)

    sp = sub.add_parser("verify", help="membership, stabilizer and detection checks on one block")
    common(sp, twoj_required=True)
    sp.add_argument("--checks", type=_csv_list, default=["dfs", "stabilizer"],
                    help=f"comma list from {','.join(CHECKS)}")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=200)

    sp = sub.add_parser("closure", help="Lie closure of the generators with per-block certificate")
    common(sp)
    sp.add_argument("--generators", type=_csv_list, help="comma list such as E12,E23 or TP1:2")
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = sub.add_parser("compile", help="compile a block unitary into a pulse schedule")
    common(sp, twoj_required=True)
    sp.add_argument("--target", required=True, help="JSON matrix file acting on the degeneracy factor")
    sp.add_argument("--epsilon", type=float, default=1e-3)
    sp.add_argument("--generators", type=_csv_list)

    sp = sub.add_parser("simulate", help="integrate the master equation and trace block observables")
    sp.add_argument("--model", choices=(bs.WEAK, bs.STRONG), default=bs.STRONG)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--twoj", type=int)
    sp.add_argument("--model-file", help="JSON {F_ops, a, H_S, rho0, T, dt[, block]}")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", "-o")

    sp = sub.add_parser("table", help="strong-collective degeneracy triangle")
    sp.add_argument("--max-n", type=int, default=6)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--output", "-o")

    sp = sub.add_parser("efficiency", help="encoding rate of the J=0 code versus its asymptote")
    sp.add_argument("--n-list", type=lambda s: [int(x) for x in _csv_list(s)], default=[10, 20, 40, 60])
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--output", "-o")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(args.subcommand)
    ns = vars(args)
    mapping = {"model": "model", "n": "n", "twoj": "twoJ", "tol": "tol", "output": "output", "seed": "seed",
               "epsilon": "epsilon", "target": "target", "model_file": "model_file", "generators": "generators",
               "max_n": "max_n", "samples": "n_samples", "format": "format"}
    updates = {dst: ns[src] for src, dst in mapping.items() if src in ns and ns[src] is not None}
    if "checks" in ns:
        updates["checks"] = tuple(ns["checks"])
    if "n_list" in ns:
        updates["n_list"] = tuple(ns["n_list"])
    if cfg.subcommand in ("table", "efficiency"):
        updates.setdefault("n", 1)
    return replace(cfg, **updates)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
