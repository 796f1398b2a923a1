"""Command-line front end.

Reads system files in the JSON document format, runs the requested
analysis, and emits a deterministic report (JSON by default; CSV for mu
tables; a human rendering on request). Exit codes: 0 success, 1 negative
analysis verdict, 2 input error, 3 budget exhaustion or non-certified
result. Errors are mirrored as one-line JSON objects on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import adversary as adversary_mod
from . import certify as certify_mod
from . import minimax, stanford
from .errors import (
    AlphaTooLarge,
    AltboundError,
    BudgetExceeded,
    DeterminantNotOne,
    EmptyAlphabet,
    GammaIsOne,
    HypothesisViolated,
    IndexOutOfRange,
    LengthMismatch,
    MaxStepsExceeded,
    NonSquare,
    NotFoundWithinCap,
    ParseError,
    ShapeError,
    Singular,
    ZeroVector,
)
from .linalg import as_matrix
from .system import (
    AlternatingSystem,
    check_hypotheses,
    load_system,
    save_system,
    system_to_dict,
    to_left_variant,
)

INPUT_ERRORS = (
    ParseError,
    ShapeError,
    EmptyAlphabet,
    NonSquare,
    Singular,
    IndexOutOfRange,
    LengthMismatch,
    ZeroVector,
    DeterminantNotOne,
    GammaIsOne,
    AlphaTooLarge,
    HypothesisViolated,
    FileNotFoundError,
    ValueError,
)

MIN_NODE_BUDGET = 1_000

TOLERANCES = {
    "bound_check": adversary_mod.BOUND_TOL,
    "strict_contraction": certify_mod.STRICT_TOL,
    "flat_tail_rel": minimax.FLAT_TAIL_REL_TOL,
    "invertibility_det": 1e-12,
}


@dataclass
class RunConfig:
    """Everything one invocation needs; produced by the argument parser."""

    command: str
    input_path: str | None = None
    n_max: int = 6
    horizon: int = 8
    m_target: int = 2
    n_cap: int = 8
    alpha: float = 1.02
    n: int = 10
    target: float = 1e-6
    max_steps: int = 1000
    cap: float = 10.0
    lookahead: int = 7
    a_indices: str | None = None
    x: str | None = None
    mode: str = "auto"
    node_budget: int = minimax.DEFAULT_NODE_BUDGET
    fmt: str = "json"
    seed: int = 42
    out: str | None = None


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _render_json(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def _parse_indices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise ParseError(f"cannot parse index list {text!r}") from None


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError:
        raise ParseError(f"cannot parse vector {text!r}") from None


def _load(config: RunConfig) -> AlternatingSystem:
    if config.input_path is None:
        raise ParseError(f"command {config.command!r} requires an input file")
    return load_system(Path(config.input_path).read_text())


def _sample_unit_vector(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    while True:
        v = rng.standard_normal(dim)
        norm = float(np.linalg.norm(v))
        if norm > 1e-12:
            return v / norm


def _settings(config: RunConfig, sys_obj: AlternatingSystem | None = None, **extra) -> dict:
    settings = {
        "node_budget": config.node_budget,
        "seed": config.seed,
        **extra,
    }
    if sys_obj is not None:
        settings["norm"] = sys_obj.norm.value
        settings["orientation"] = sys_obj.orientation.value
    return settings


# ---- command handlers ----------------------------------------------------


def _cmd_validate(config: RunConfig) -> tuple[int, dict]:
    sys_obj = _load(config)
    report = check_hypotheses(sys_obj)
    result = {
        "invertible": report.invertible,
        "invertible_reason": report.invertible_reason,
        "gamma_inv": report.gamma_inv,
        "nonnegative": report.nonnegative,
        "nonzero_rows": report.nonzero_rows,
        "gamma": report.gamma,
        "gamma_products": report.gamma_products,
        "norm_bound_a": report.norm_bound_a,
        "norm_bound_b": report.norm_bound_b,
        "alphabet_sizes": [len(sys_obj.a_set), len(sys_obj.b_set)],
    }
    return 0, {
        "command": "validate",
        "settings": _settings(config, sys_obj),
        "tolerances": TOLERANCES,
        "result": result,
    }


def _cmd_mu_table(config: RunConfig) -> tuple[int, dict]:
    sys_obj = _load(config)
    table = minimax.mu_table(sys_obj, config.n_max, config.node_budget)
    verdict = {
        "kind": table.verdict.kind,
        "bound": table.verdict.bound,
        "rate": table.verdict.rate,
    }
    result = {
        "rows": minimax.mu_table_rows(table),
        "verdict": verdict,
        "truncated_at": table.truncated_at,
    }
    degraded = table.truncated_at is not None or not all(
        r.certified for r in table.records
    )
    code = 3 if degraded else 0
    return code, {
        "command": "mu-table",
        "settings": _settings(config, sys_obj, n_max=config.n_max),
        "tolerances": TOLERANCES,
        "result": result,
        "_table": table,  # consumed by the csv / human renderers
    }


def _cmd_best_response(config: RunConfig) -> tuple[int, dict]:
    sys_obj = _load(config)
    if config.a_indices is None:
        raise ParseError("best-response requires --a-indices")
    a_idx = _parse_indices(config.a_indices)
    resp = minimax.best_response(sys_obj, a_idx, config.node_budget)
    result = {
        "a_indices": list(a_idx),
        "b_indices": list(resp.b_indices),
        "value": resp.value,
        "nodes": resp.nodes,
        "certified": resp.certified,
    }
    return (0 if resp.certified else 3), {
        "command": "best-response",
        "settings": _settings(config, sys_obj),
        "tolerances": TOLERANCES,
        "result": result,
    }


def _cmd_adversary(config: RunConfig) -> tuple[int, dict]:
    sys_obj = _load(config)
    mode = None if config.mode == "auto" else adversary_mod.AdversaryMode(config.mode)
    settings = _settings(
        config, sys_obj, m_target=config.m_target, n_cap=config.n_cap, mode=config.mode
    )
    try:
        cert = adversary_mod.build_adversary(
            sys_obj, config.m_target, config.n_cap, mode, config.node_budget
        )
    except NotFoundWithinCap as exc:
        result = {"found": False, "reason": str(exc)}
        return 1, {
            "command": "adversary",
            "settings": settings,
            "tolerances": TOLERANCES,
            "result": result,
        }
    verified = adversary_mod.verify_certificate(sys_obj, cert, config.node_budget)
    result = {"found": True, "certificate": cert.to_dict(), "verified": verified}
    return (0 if verified else 1), {
        "command": "adversary",
        "settings": settings,
        "tolerances": TOLERANCES,
        "result": result,
    }


def _cmd_contractivity(config: RunConfig) -> tuple[int, dict]:
    sys_obj = _load(config)
    verdict = certify_mod.certify_contractivity(
        sys_obj, config.horizon, config.node_budget
    )
    result = {
        "result": verdict.result.value,
        "k": verdict.k,
        "witness": list(verdict.witness) if verdict.witness is not None else None,
        "horizon": verdict.horizon,
        "nodes": verdict.nodes,
    }
    codes = {
        certify_mod.ContractivityResult.CERTIFIED_YES: 0,
        certify_mod.ContractivityResult.NO_WITHIN_HORIZON: 1,
        certify_mod.ContractivityResult.INCONCLUSIVE: 3,
    }
    return codes[verdict.result], {
        "command": "contractivity",
        "settings": _settings(config, sys_obj, horizon=config.horizon),
        "tolerances": TOLERANCES,
        "result": result,
    }


def _stabilize_trace_rows(trace: stanford.StabilizeTrace) -> list[dict]:
    names = {0: "squeeze", 1: "rotation"}
    rows = []
    for step, idx in enumerate(trace.indices, start=1):
        vec = trace.vectors[step]
        rows.append(
            {
                "step": step,
                "matrix_applied": names[idx],
                "vector": vec.tolist(),
                "norm": float(np.linalg.norm(vec)),
            }
        )
    return rows


def _cmd_stanford(config: RunConfig) -> tuple[int, dict]:
    pair, params = stanford.make_stanford(config.alpha)
    x = (
        _parse_vector(config.x)
        if config.x is not None
        else _sample_unit_vector(2, config.seed)
    )
    trace = stanford.stabilize_pointwise(params, x, config.target, config.max_steps)
    min_norm = stanford.check_products_lower_bound(pair, config.n, config.node_budget)
    result = {
        "alpha": params.alpha,
        "q": params.q,
        "x": x.tolist(),
        "steps": len(trace.indices),
        "final_norm": float(trace.norms[-1]),
        "trace": _stabilize_trace_rows(trace),
        "lower_bound": {
            "n": config.n,
            "min_product_norm": min_norm,
            "floor": params.alpha**config.n,
        },
    }
    return 0, {
        "command": "stanford",
        "settings": _settings(
            config,
            None,
            norm="euclidean",
            alpha=config.alpha,
            n=config.n,
            target=config.target,
        ),
        "tolerances": TOLERANCES,
        "result": result,
    }


def _read_a_set(config: RunConfig) -> list:
    if config.input_path is None:
        raise ParseError("counterexample requires an input file with an A array")
    try:
        doc = json.loads(Path(config.input_path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "A" not in doc or not isinstance(doc["A"], list):
        raise ParseError("counterexample input must be an object with an A array")
    return [as_matrix(m) for m in doc["A"]]


def _cmd_counterexample(config: RunConfig) -> tuple[int, dict]:
    a_set = _read_a_set(config)
    sys_ce = stanford.build_counterexample(a_set, config.alpha)
    schedule = tuple(i % len(sys_ce.a_set) for i in range(config.n))
    min_norm = minimax.min_final_norm(sys_ce, schedule, config.node_budget)
    x = (
        _parse_vector(config.x)
        if config.x is not None
        else _sample_unit_vector(2, config.seed)
    )
    run = stanford.counterexample_pointwise_run(
        sys_ce,
        tuple(range(len(sys_ce.a_set))),
        x,
        config.target,
        config.max_steps,
    )
    result = {
        "alpha": config.alpha,
        "system": system_to_dict(sys_ce),
        "norm_floor": {
            "n": config.n,
            "a_schedule": list(schedule),
            "min_product_norm": min_norm,
            "floor": config.alpha**config.n,
        },
        "pointwise": {
            "x": x.tolist(),
            "target": config.target,
            "steps": len(run.trace.a_indices),
            "final_vector_norm": float(run.norms[-1]),
            "product_norm_peak": run.trace.nu,
            "h_indices": list(run.h_indices),
        },
    }
    return 0, {
        "command": "counterexample",
        "settings": _settings(
            config, sys_ce, alpha=config.alpha, n=config.n, target=config.target
        ),
        "tolerances": TOLERANCES,
        "result": result,
    }


def _cmd_probe(config: RunConfig) -> tuple[int, dict]:
    sys_obj = _load(config)
    x = (
        _parse_vector(config.x)
        if config.x is not None
        else _sample_unit_vector(sys_obj.product_dim, config.seed)
    )
    probe = certify_mod.pointwise_probe(
        sys_obj, x, config.horizon, config.cap, config.lookahead
    )
    result = {
        "outcome": probe.outcome.value,
        "exceeded_at": probe.exceeded_at,
        "steps": len(probe.a_indices),
        "cap": config.cap,
        "x": x.tolist(),
        "peak_norm": max(probe.norms),
        "final_norm": probe.norms[-1],
        "heuristic": True,
    }
    code = 1 if probe.outcome is certify_mod.ProbeOutcome.EXCEEDED_CAP else 0
    return code, {
        "command": "probe",
        "settings": _settings(
            config,
            sys_obj,
            horizon=config.horizon,
            cap=config.cap,
            lookahead=config.lookahead,
        ),
        "tolerances": TOLERANCES,
        "result": result,
    }


def _cmd_convert(config: RunConfig) -> tuple[int, dict]:
    sys_obj = _load(config)
    converted = to_left_variant(sys_obj)
    # the report IS the converted document, so it can be piped back in
    return 0, {"_document": converted}


_HANDLERS = {
    "validate": _cmd_validate,
    "mu-table": _cmd_mu_table,
    "best-response": _cmd_best_response,
    "adversary": _cmd_adversary,
    "contractivity": _cmd_contractivity,
    "stanford": _cmd_stanford,
    "counterexample": _cmd_counterexample,
    "probe": _cmd_probe,
    "convert": _cmd_convert,
}


def _render_human(report: dict) -> str:
    table = report.get("_table")
    if report.get("command") == "mu-table" and table is not None:
        lines = [f"{'n':>4}  {'mu':>20}  {'certified':>9}  witness_a / best_b"]
        for r in table.records:
            lines.append(
                f"{r.n:>4}  {r.mu:>20.12g}  {str(r.certified):>9}  "
                f"{' '.join(map(str, r.witness_a))} / {' '.join(map(str, r.best_b))}"
            )
        v = table.verdict
        if v.kind == "growing":
            lines.append(f"verdict: growing, log-slope {v.rate:.6g} per step")
        else:
            lines.append(f"verdict: bounded up to horizon, C = {v.bound:.6g}")
        if table.truncated_at is not None:
            lines.append(f"truncated at n = {table.truncated_at} (budget)")
        return "\n".join(lines) + "\n"
    return _render_json(_strip_private(report))


def _strip_private(report: dict) -> dict:
    return {k: v for k, v in report.items() if not k.startswith("_")}


def render(report: dict, fmt: str) -> str:
    if "_document" in report:
        return save_system(report["_document"])
    if fmt == "json":
        return _render_json(_strip_private(report))
    if fmt == "csv":
        table = report.get("_table")
        if table is None:
            raise ParseError("csv format is only available for mu-table")
        return minimax.mu_table_to_csv(table)
    if fmt == "human":
        return _render_human(report)
    raise ParseError(f"unknown format {fmt!r}")


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit code, rendered report)."""
    if config.node_budget < MIN_NODE_BUDGET:
        raise ParseError(f"node budget must be at least {MIN_NODE_BUDGET}")
    if config.command not in _HANDLERS:
        raise ParseError(f"unknown command {config.command!r}")
    code, report = _HANDLERS[config.command](config)
    return code, render(report, config.fmt)


def _error_code(exc: Exception) -> int:
    if isinstance(exc, BudgetExceeded):
        return 3
    if isinstance(exc, INPUT_ERRORS):
        return 2
    if isinstance(exc, (NotFoundWithinCap, MaxStepsExceeded, AltboundError)):
        return 1
    raise exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altbound",
        description="Boundedness analysis for alternating matrix products",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_input: bool = True):
        if needs_input:
            p.add_argument("input", help="system JSON file")
        p.add_argument("--node-budget", type=int, default=minimax.DEFAULT_NODE_BUDGET)
        p.add_argument("--format", choices=["json", "csv", "human"], default="json")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--out", help="write the report to this path instead of stdout")

    p = sub.add_parser("validate", help="hypothesis report for a system file")
    common(p)

    p = sub.add_parser("mu-table", help="mu_n for n = 1..n_max with growth verdict")
    common(p)
    p.add_argument("--n-max", type=int, default=6)

    p = sub.add_parser("best-response", help="minimizing B-sequence for an A-sequence")
    common(p)
    p.add_argument("--a-indices", required=True, help='e.g. "0,1,0"')

    p = sub.add_parser("adversary", help="build and verify an adversarial certificate")
    common(p)
    p.add_argument("--m-target", type=int, default=2)
    p.add_argument("--n-cap", type=int, default=8)
    p.add_argument(
        "--mode", choices=["auto", "invertible", "nonnegative"], default="auto"
    )

    p = sub.add_parser("contractivity", help="game-tree contraction check")
    common(p)
    p.add_argument("--horizon", type=int, default=8)

    p = sub.add_parser("stanford", help="sector stabilizer demo and norm floor")
    common(p, needs_input=False)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n", type=int, default=10, help="product length for the floor check")
    p.add_argument("--target", type=float, default=1e-6)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--x", help='start vector, e.g. "1,0" (default: random unit)')

    p = sub.add_parser(
        "counterexample",
        help="pointwise-bounded but norm-divergent system from an A array",
    )
    common(p)
    p.add_argument("--alpha", type=float, default=1.02)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--target", type=float, default=1e-3)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--x", help="start vector (default: random unit)")

    p = sub.add_parser("probe", help="heuristic pointwise boundedness probe")
    common(p)
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--cap", type=float, default=10.0)
    p.add_argument("--lookahead", type=int, default=7)
    p.add_argument("--x", help="start vector (default: random unit)")

    p = sub.add_parser("convert", help="flip right/left orientation of a system file")
    common(p)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    mapping = {
        "input": "input_path",
        "n_max": "n_max",
        "horizon": "horizon",
        "m_target": "m_target",
        "n_cap": "n_cap",
        "alpha": "alpha",
        "n": "n",
        "target": "target",
        "max_steps": "max_steps",
        "cap": "cap",
        "lookahead": "lookahead",
        "a_indices": "a_indices",
        "x": "x",
        "mode": "mode",
        "node_budget": "node_budget",
        "format": "fmt",
        "seed": "seed",
        "out": "out",
    }
    for arg_name, field_name in mapping.items():
        if hasattr(args, arg_name) and getattr(args, arg_name) is not None:
            setattr(config, field_name, getattr(args, arg_name))
    return config


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    config = config_from_args(args)
    try:
        code, text = run(config)
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes below
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload, sort_keys=True), file=_sys.stderr)
        return _error_code(exc)
    if config.out:
        Path(config.out).write_text(text)
    else:
        _sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
