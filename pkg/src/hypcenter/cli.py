"""Batch command-line front end.

Subcommands: ``center`` solves an input measure, ``energy`` samples the energy
along a geodesic ray, ``verify`` runs the oracle property scans, ``fold``
pushes a measure through a halfspace fold before solving, and ``reproduce``
re-runs a named built-in fixture.

Reports are JSON with a fixed key order and 17-significant-digit decimal
floats, so identical (input, seed) pairs produce bit-identical files.  Exit
codes: 0 solved, 1 usage or schema error, 2 ambiguous center, 3 divergent
iterates (no center exists), 4 not converged.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Mapping, Sequence

import numpy as np

from . import fixtures, oracle
from .energy import EnergyContext, energy_context, field_V, renormalized_energy
from .errors import DivergentIterates, HypcenterError, SchemaError
from .geometry import fold_map, geodesic, geodesic_point, halfspace, mobius_map, point
from .measures import atomic_measure, pushforward
from .solver import SolveOptions, SolveResult, Strategy, UniquenessKind, solve_center
from .weights import weight_from_config

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_AMBIGUOUS = 2
EXIT_DIVERGENT = 3
EXIT_NOT_CONVERGED = 4


# -- deterministic JSON ------------------------------------------------------

def _render(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise SchemaError("reports cannot carry non-finite numbers")
        return format(v, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, np.ndarray):
        return _render(value.tolist())
    if isinstance(value, Mapping):
        inner = ", ".join(f"{json.dumps(k)}: {_render(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_render(v) for v in value) + "]"
    raise SchemaError(f"cannot serialize {type(value).__name__} into a report")


def write_report(report: Mapping, output: str | None) -> None:
    text = _render(report) + "\n"
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- input parsing ------------------------------------------------------------

def load_job(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read input: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"input is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("input must be a JSON object")
    return doc


def parse_measure(doc: Mapping):
    if "dimension" not in doc or "atoms" not in doc:
        raise SchemaError('input needs "dimension" and "atoms"')
    n = doc["dimension"]
    if not isinstance(n, int) or n < 1:
        raise SchemaError('"dimension" must be a positive integer')
    atoms = doc["atoms"]
    if not isinstance(atoms, list) or not atoms:
        raise SchemaError('"atoms" must be a nonempty list')
    pairs = []
    for entry in atoms:
        if not isinstance(entry, dict) or "x" not in entry or "w" not in entry:
            raise SchemaError('each atom needs "x" and "w"')
        x = entry["x"]
        if not isinstance(x, list) or len(x) != n:
            raise SchemaError(f'atom coordinates must be lists of length {n}')
        pairs.append((x, float(entry["w"])))
    try:
        return atomic_measure(pairs, dimension=n)
    except HypcenterError as exc:
        raise SchemaError(str(exc)) from exc


def parse_weight(doc: Mapping):
    if "weight" not in doc or not isinstance(doc["weight"], dict):
        raise SchemaError('input needs a "weight" object')
    try:
        return weight_from_config(doc["weight"])
    except HypcenterError as exc:
        raise SchemaError(str(exc)) from exc


def parse_options(doc: Mapping, args: argparse.Namespace) -> SolveOptions:
    """Merge solve options: defaults < input file overlay < CLI flags."""
    overlay = doc.get("options", {})
    if not isinstance(overlay, dict):
        raise SchemaError('"options" must be an object')
    merged: dict = {}
    for key in ("tol_residual", "max_iters", "multistart"):
        if key in overlay:
            merged[key] = overlay[key]
    if "strategy" in overlay:
        merged["strategy"] = Strategy(overlay["strategy"])
    if "initial" in overlay:
        merged["initial"] = overlay["initial"]
    if args.tol is not None:
        merged["tol_residual"] = args.tol
    if args.max_iters is not None:
        merged["max_iters"] = args.max_iters
    if args.strategy is not None:
        merged["strategy"] = Strategy(args.strategy)
    if args.multistart is not None:
        merged["multistart"] = args.multistart
    try:
        return SolveOptions(**merged)
    except (TypeError, ValueError, HypcenterError) as exc:
        raise SchemaError(f"bad solve options: {exc}") from exc


def build_context(doc: Mapping) -> EnergyContext:
    measure = parse_measure(doc)
    weight = parse_weight(doc)
    try:
        return energy_context(weight, measure)
    except HypcenterError as exc:
        raise SchemaError(str(exc)) from exc


# -- report pieces ------------------------------------------------------------

def _atoms_payload(ctx_or_measure) -> list:
    measure = getattr(ctx_or_measure, "measure", ctx_or_measure)
    return [
        {"x": p.coords.tolist(), "w": float(w)} for p, w in measure.atoms()
    ]


def _solve_payload(ctx: EnergyContext, result: SolveResult, doc: Mapping, seed: int) -> dict:
    pushed = pushforward(ctx.measure, mobius_map(result.x_c))
    return {
        "command": "center",
        "seed": seed,
        "dimension": ctx.dimension,
        "hypothesis_class": result.hypothesis_class.value,
        "converged": result.converged,
        "x_c": result.x_c.coords.tolist(),
        "residual": result.residual,
        "iterations": result.iterations,
        "energy": result.energy_at_min,
        "uniqueness": {
            "kind": result.uniqueness.kind.value,
            "representatives": [
                p.coords.tolist() for p in result.uniqueness.representatives
            ],
        },
        "recentered_input": {
            "dimension": ctx.dimension,
            "atoms": _atoms_payload(pushed),
            "weight": ctx.weight.describe(),
        },
    }


def _exit_code(result: SolveResult) -> int:
    if result.uniqueness.kind is UniquenessKind.AMBIGUOUS:
        return EXIT_AMBIGUOUS
    if not result.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# -- subcommands ---------------------------------------------------------------

def run_center(args: argparse.Namespace) -> int:
    doc = load_job(args.input)
    ctx = build_context(doc)
    opts = parse_options(doc, args)
    try:
        result = solve_center(ctx, opts)
    except DivergentIterates as exc:
        write_report(
            {"command": "center", "seed": args.seed, "error": "divergent_iterates",
             "message": str(exc)},
            args.output,
        )
        return EXIT_DIVERGENT
    write_report(_solve_payload(ctx, result, doc, args.seed), args.output)
    return _exit_code(result)


def run_energy(args: argparse.Namespace) -> int:
    doc = load_job(args.input)
    ctx = build_context(doc)
    ray = doc.get("ray", {})
    if not isinstance(ray, dict):
        raise SchemaError('"ray" must be an object')
    base = ray.get("base", [0.0] * ctx.dimension)
    direction = ray.get("dir")
    if direction is None:
        raise SchemaError('energy profiles need "ray": {"dir": [...]}')
    tau_max = float(ray.get("tau_max", 5.0))
    count = int(ray.get("count", 26))
    if count < 2 or tau_max <= 0:
        raise SchemaError("ray needs count >= 2 and tau_max > 0")
    samples = []
    for sign in (1.0, -1.0):
        g = geodesic(point(base), sign * np.asarray(direction, dtype=float))
        for tau in np.linspace(0.0, tau_max, count):
            x = geodesic_point(g, math.tanh(tau)).coords
            samples.append(
                {
                    "direction": int(sign),
                    "tau": float(tau),
                    "energy": renormalized_energy(ctx, x),
                    "field_norm": float(np.linalg.norm(field_V(ctx, x))),
                }
            )
    write_report(
        {"command": "energy", "seed": args.seed, "dimension": ctx.dimension,
         "samples": samples},
        args.output,
    )
    return EXIT_OK


def _verify_contexts() -> list[tuple[str, EnergyContext]]:
    interior = energy_context(
        weight_from_config({"kind": "identity", "params": {}}),
        atomic_measure(
            [([0.3, 0.1], 1.0), ([-0.2, 0.4], 2.0), ([0.1, -0.5], 0.5)]
        ),
    )
    sphere = fixtures.signed_circle_context()
    unsigned_sphere = energy_context(
        weight_from_config({"kind": "identity", "params": {}}),
        atomic_measure(
            [
                ([math.cos(a), math.sin(a)], 0.6 + 0.1 * k)
                for k, a in enumerate(np.linspace(0.2, 5.8, 7))
            ]
        ),
    )
    mixed = energy_context(
        weight_from_config({"kind": "clamped_linear", "params": {"c": 0.5}}),
        atomic_measure([([0.3, 0.1], 1.0), ([0.6, 0.8], 0.7), ([-0.2, 0.4], 1.3)]),
    )
    return [
        ("interior", interior),
        ("sphere", unsigned_sphere),
        ("signed_sphere", sphere),
        ("mixed", mixed),
    ]


def run_verify(args: argparse.Namespace) -> int:
    seed = args.seed
    scans: list[dict] = []

    def add(label: str, report: oracle.ScanReport) -> None:
        entry = {"label": label}
        entry.update(report.as_dict())
        scans.append(entry)

    named = _verify_contexts()
    for label, ctx in named:
        if label == "signed_sphere":
            continue  # gradient identity checked on the unsigned contexts
        add(f"gradient[{label}]", oracle.gradient_check(ctx, samples=300, seed=seed))
    add("cocycle[n=2,3]", oracle.cocycle_check(samples=1000, seed=seed))
    for label, ctx in named[:2]:
        add(f"convexity[{label}]", oracle.convexity_scan(ctx, seed=seed))
    add("kernel_linearity", oracle.kernel_linearity_check(named[1][1], seed=seed))
    add(
        "boundary_continuity[identity]",
        oracle.boundary_continuity_check(
            weight_from_config({"kind": "identity", "params": {}}),
            [0.5, 0.2],
            [1.0, 0.0],
        ),
    )
    add(
        "boundary_continuity[staircase]",
        oracle.boundary_continuity_check(
            fixtures.staircase_weight(), [0.3, -0.4], [0.0, 1.0]
        ),
    )
    add("distance_convexity", oracle.distance_convexity_check(seed=seed))

    zeros = oracle.brute_force_zeros_1d(fixtures.two_zeros_context())
    half = [p for p in zeros.points if p >= 0.0]
    scans.append(
        {
            "label": "zero_set[two-zeros]",
            "kind": "zero_set_1d",
            "worst_case": float(len(zeros.points)),
            "samples": 2001,
            "pass": len(half) == 2 and not zeros.intervals,
            "tolerance": 0.0,
            "seed": seed,
            "details": [f"points={list(zeros.points)}"],
        }
    )
    zeros = oracle.brute_force_zeros_1d(fixtures.flat_interval_context())
    scans.append(
        {
            "label": "zero_set[flat-interval]",
            "kind": "zero_set_1d",
            "worst_case": float(len(zeros.intervals)),
            "samples": 2001,
            "pass": len(zeros.intervals) == 1,
            "tolerance": 0.0,
            "seed": seed,
            "details": [f"intervals={list(zeros.intervals)}"],
        }
    )

    ok = all(s["pass"] for s in scans)
    write_report(
        {"command": "verify", "seed": seed, "pass": ok, "scans": scans}, args.output
    )
    return EXIT_OK if ok else EXIT_USAGE


def run_fold(args: argparse.Namespace) -> int:
    doc = load_job(args.input)
    ctx = build_context(doc)
    entry = doc.get("halfspace")
    if not isinstance(entry, dict) or "p" not in entry or "t" not in entry:
        raise SchemaError('fold needs "halfspace": {"p": [...], "t": ...}')
    try:
        h = halfspace(entry["p"], float(entry["t"]))
        folded = pushforward(ctx.measure, fold_map(h))
        folded_ctx = energy_context(ctx.weight, folded)
    except HypcenterError as exc:
        raise SchemaError(str(exc)) from exc
    opts = parse_options(doc, args)
    try:
        result = solve_center(folded_ctx, opts)
    except DivergentIterates as exc:
        write_report(
            {"command": "fold", "seed": args.seed, "error": "divergent_iterates",
             "message": str(exc)},
            args.output,
        )
        return EXIT_DIVERGENT
    residual_vec = field_V(folded_ctx, result.x_c.coords)
    payload = _solve_payload(folded_ctx, result, doc, args.seed)
    payload["command"] = "fold"
    payload["halfspace"] = {"p": h.p.tolist(), "t": h.t}
    payload["orthogonality_residual"] = float(np.linalg.norm(residual_vec))
    write_report(payload, args.output)
    return _exit_code(result)


def run_reproduce(args: argparse.Namespace) -> int:
    if args.list:
        write_report({"fixtures": sorted(fixtures.REGISTRY)}, args.output)
        return EXIT_OK
    if not args.name:
        raise SchemaError("reproduce needs a fixture name (or --list)")
    report = fixtures.run_fixture(args.name, seed=args.seed)
    payload = {"command": "reproduce", "seed": args.seed}
    payload.update(report.as_dict())
    write_report(payload, args.output)
    return EXIT_OK if report.ok else EXIT_USAGE


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypcenter",
        description="Weighted hyperbolic centers of mass on the unit ball.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_input: bool) -> None:
        if needs_input:
            p.add_argument("--input", "-i", required=True, help="job JSON file")
        p.add_argument("--output", "-o", default=None, help="report path (default stdout)")
        p.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
        p.add_argument("--tol", type=float, default=None, help="residual tolerance")
        p.add_argument("--max-iters", type=int, default=None)
        p.add_argument("--strategy", choices=["descent", "newton"], default=None)
        p.add_argument("--multistart", type=int, default=None)

    common(sub.add_parser("center", help="solve for the center of mass"), True)
    common(sub.add_parser("energy", help="sample the energy along a ray"), True)
    common(sub.add_parser("verify", help="run the oracle property scans"), False)
    common(sub.add_parser("fold", help="fold the measure into a halfspace, then solve"), True)
    rep = sub.add_parser("reproduce", help="re-run a built-in fixture")
    rep.add_argument("name", nargs="?", help="fixture name")
    rep.add_argument("--list", action="store_true", help="list fixture names")
    common(rep, False)
    return parser


_RUNNERS = {
    "center": run_center,
    "energy": run_energy,
    "verify": run_verify,
    "fold": run_fold,
    "reproduce": run_reproduce,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _RUNNERS[args.command](args)
    except (SchemaError, HypcenterError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
