"""Command-line front end.

Runs named checks on JSON space/scenario descriptions and writes
deterministic report bodies (JSON or CSV).  Timestamps never enter the
body; they go to a sidecar `<output>.meta.json`, so identical runs produce
byte-identical reports.

Exit codes: 0 = check passed / scan completed; 2 = the inequality under
test failed (report still written); 1 = usage or schema errors.  FAIL is
exit 2, not 1, so CI can tell "the math says no" from "the tool broke".
"""

from __future__ import annotations

import argparse
import datetime
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .coefficients import CurvatureParams, conjugate_radius, f_vol, s_vol, sigma
from .space1d import Space1D, WindowError, load_space
from . import transport1d as tr
from . import curvature as cv
from . import geometry_scan as gs
from . import branching as br

_EPS_SWEEP_FACTORS = (1.0, 0.4, 0.2, 0.1, 0.04)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def _dump_body(body: dict) -> str:
    return json.dumps(_jsonable(body), sort_keys=True, separators=(",", ":")) + "\n"


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValueError(f"input file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"input file {path} is not valid JSON: {exc}")


def _space_from_args(args) -> Space1D:
    if not args.input:
        raise ValueError("this command needs --input with a space description")
    data = _load_json(args.input)
    if args.grid_step is not None:
        data = dict(data)
        data["grid_step"] = args.grid_step
    return load_space(data)


def _scenario_from_args(args) -> tuple[br.Tripod, br.BranchingScenario, list[float]]:
    if not args.input:
        raise ValueError("this command needs --input with a scenario description")
    data = _load_json(args.input)
    for field in ("a", "b", "eps", "eta"):
        if field not in data:
            raise ValueError(f"scenario description: missing field {field!r}")
    lengths = data.get("edge_lengths", [1.0, 1.0, 1.0])
    if len(lengths) != 3:
        raise ValueError("scenario description: edge_lengths must have 3 entries")
    tripod = br.Tripod(tuple(float(l) for l in lengths))
    scenario = br.BranchingScenario(
        a=float(data["a"]), b=float(data["b"]), eps=float(data["eps"]),
        eta=float(data["eta"]), beta=float(data.get("beta", 1.0)),
        N=float(data.get("N", 2.0)),
    )
    sweep = [float(v) for v in data.get("eps_sweep",
             [scenario.eps * f for f in _EPS_SWEEP_FACTORS])]
    return tripod, scenario, sweep


def _params_from_args(args) -> CurvatureParams:
    return CurvatureParams(args.k, args.n)


def _default_pair_battery(space: Space1D, seed: int, count: int = 50):
    lo, hi = space.domain()
    span = hi - lo
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        w0 = span * rng.uniform(0.05, 0.3)
        a0 = lo + rng.uniform(0.0, span - w0)
        w1 = span * rng.uniform(0.05, 0.3)
        a1 = lo + rng.uniform(0.0, span - w1)
        pairs.append((tr.uniform_measure(space, a0, a0 + w0),
                      tr.uniform_measure(space, a1, a1 + w1)))
    return pairs


def _reach(space: Space1D, x0: float) -> float:
    lo, hi = space.domain()
    if space.topology.kind == "circle":
        return space.topology.circumference / 2.0
    return min(x0 - lo, hi - x0)


def _default_radii(space: Space1D, x0: float, params: CurvatureParams, n: int = 10):
    r_max = min(0.95 * conjugate_radius(params), 0.98 * _reach(space, x0))
    return list(np.linspace(0.1 * r_max, 0.7 * r_max, n))


def _base_body(args, check_id: str) -> dict:
    return {
        "check_id": check_id,
        "seed": args.seed,
        "tool_version": __version__,
    }


# -- command handlers: return (exit_code, body_dict, csv_rows_or_None) -------

def _cmd_check_kn_convex(args):
    space = _space_from_args(args)
    params = _params_from_args(args)
    battery = cv.default_triple_battery(space, seed=args.seed)
    report = cv.check_kn_convex(space.weight, space, params, battery,
                                tol=args.tol, seed=args.seed)
    body = _base_body(args, report.kind)
    body.update(report.to_dict())
    body["params"] = {"K": params.K, "N": params.N}
    body["margin"] = report.max_violation
    return (0 if report.passed else 2), body, None


def _cmd_verify_cde(args):
    space = _space_from_args(args)
    params = _params_from_args(args)
    pairs = _default_pair_battery(space, args.seed)
    report = cv.verify_cde(space, params, pairs, tol=args.tol or 5e-4, seed=args.seed)
    body = _base_body(args, report.kind)
    body.update(report.to_dict())
    body["params"] = {"K": params.K, "N": params.N}
    body["margin"] = report.max_violation
    return (0 if report.passed else 2), body, None


def _cmd_verify_cd_infty(args):
    space = _space_from_args(args)
    pairs = _default_pair_battery(space, args.seed)
    report = cv.verify_cd_infty(space, args.k, pairs, tol=args.tol or 5e-4, seed=args.seed)
    body = _base_body(args, report.kind)
    body.update(report.to_dict())
    body["params"] = {"K": args.k}
    body["margin"] = report.max_violation
    return (0 if report.passed else 2), body, None


def _cmd_circle_obstruction(args):
    space = _space_from_args(args)
    params = _params_from_args(args)
    report = cv.circle_obstruction(space, params)
    body = _base_body(args, report.kind)
    body.update(report.to_dict())
    body["params"] = {"K": params.K, "N": params.N}
    body["margin"] = report.max_violation
    found = not report.extra.get("anomaly", True)
    return (0 if found else 2), body, None


def _cmd_bg_scan(args):
    space = _space_from_args(args)
    params = _params_from_args(args)
    lo, hi = space.domain()
    x0 = args.x if args.x is not None else 0.5 * (lo + hi)
    radii = _default_radii(space, x0, params)
    report = gs.bg_ratio_scan(space, x0, params, radii, tol=args.tol or 1e-9)
    body = _base_body(args, report.kind)
    body.update(report.to_dict())
    body["params"] = {"K": params.K, "N": params.N}
    body["margin"] = report.max_violation
    return (0 if report.passed else 2), body, None


def _cmd_bg_boundary(args):
    space = _space_from_args(args)
    params = _params_from_args(args)
    lo, hi = space.domain()
    x0 = args.x if args.x is not None else 0.5 * (lo + hi)
    radii = _default_radii(space, x0, params)
    report = gs.bg_boundary_check(space, x0, params, radii, tol=args.tol or 0.0)
    body = _base_body(args, report.kind)
    body.update(report.to_dict())
    body["params"] = {"K": params.K, "N": params.N}
    body["margin"] = report.max_violation
    return (0 if report.passed else 2), body, None


def _cmd_density_ratio(args):
    space = _space_from_args(args)
    lo, hi = space.domain()
    x0 = args.x if args.x is not None else 0.5 * (lo + hi)
    reach = _reach(space, x0)
    r_hi = 0.45 * reach
    r_lo = max(10.0 * space.grid_step, r_hi / 50.0)
    radii = list(np.geomspace(r_hi, r_lo, 20))
    trace = gs.density_ratio_trace(space, x0, args.kexp, radii)
    body = _base_body(args, "density-ratio-trace")
    body.update({
        "params": {"k": args.kexp, "x": x0},
        "margin": min(trace.ratios),
        "witness": {"min_ratio": min(trace.ratios), "max_ratio": max(trace.ratios)},
        "grid_step": space.grid_step,
        "in_mk": trace.in_mk,
        "threshold_factor": trace.threshold_factor,
        "rows": [[r, v] for r, v in trace.rows()],
    })
    rows = [("r", "ratio")] + list(trace.rows())
    return 0, body, rows


def _cmd_lipschitz(args):
    space = _space_from_args(args)
    params = _params_from_args(args)
    lo, hi = space.domain()
    x0 = 0.5 * (lo + hi)
    reach = _reach(space, x0)
    r = 0.25 * reach
    rng = np.random.default_rng(args.seed)
    pairs = []
    for _ in range(200):
        x = lo + (hi - lo) * rng.random()
        d = r / 2.0 * rng.uniform(0.05, 0.95)
        y = x + d
        if space.topology.kind != "circle":
            if y + r > hi or x - r < lo:
                continue
        pairs.append((float(x), float(y)))
    emp, theory, report = gs.lipschitz_modulus(space, params, r, pairs)
    body = _base_body(args, report.kind)
    body.update(report.to_dict())
    body["params"] = {"K": params.K, "N": params.N, "r": r}
    body["margin"] = report.max_violation
    return (0 if report.max_violation <= 0 else 2), body, None


def _cmd_classify(args):
    space = _space_from_args(args)
    ks = [float(v) for v in str(args.k).split(",")]
    ns = [float(v) for v in str(args.n).split(",")]
    if len(ks) != len(ns):
        raise ValueError("--k and --n must list the same number of candidates")
    candidates = [CurvatureParams(k, n) for k, n in zip(ks, ns)]
    verdict = gs.classify(space, candidates, seed=args.seed, tol=args.tol)
    body = _base_body(args, "classification")
    body.update({
        "params": {"candidates": [[p.K, p.N] for p in candidates]},
        "model": {"kind": verdict.model.kind, "param": verdict.model.param},
        "admissible": verdict.admissible,
        "kn_params": ([verdict.kn_params.K, verdict.kn_params.N]
                      if verdict.kn_params else None),
        "margin": (verdict.report.max_violation if verdict.report else None),
        "witness": (verdict.report.witness if verdict.report else {}),
        "grid_step": space.grid_step,
    })
    return 0, body, None


def _cmd_tripod_shannon(args):
    tripod, scenario, sweep = _scenario_from_args(args)
    rows = [("eps", "lhs", "rhs", "ratio")]
    results = []
    for eps in sweep:
        sc = scenario.replace_eps(eps)
        pair = br.build_branching_plans(tripod, sc)
        lhs, rhs, rep = br.entropy_chain_inequality(pair, tripod, sc)
        ratio, _, _ = br.renyi_contradiction(pair, tripod, sc)
        rows.append((eps, lhs, rhs, ratio))
        results.append(rep)
    final = results[-1]
    body = _base_body(args, "tripod-shannon-chain")
    body.update({
        "params": {"a": scenario.a, "b": scenario.b, "eta": scenario.eta,
                   "beta": scenario.beta, "N": scenario.N},
        "margin": final["lhs"] - final["rhs"],
        "witness": final,
        "grid_step": None,
        "sweep": [list(r) for r in rows[1:]],
        "contradiction_reproduced": final["contradiction"],
    })
    return (0 if final["contradiction"] else 2), body, rows


def _cmd_tripod_renyi(args):
    tripod, scenario, sweep = _scenario_from_args(args)
    rows = [("eps", "lhs", "rhs", "ratio")]
    last = None
    for eps in sweep:
        sc = scenario.replace_eps(eps)
        pair = br.build_branching_plans(tripod, sc)
        lhs, rhs, _ = br.entropy_chain_inequality(pair, tripod, sc)
        ratio, thr, rep = br.renyi_contradiction(pair, tripod, sc)
        rows.append((eps, lhs, rhs, ratio))
        last = rep
    body = _base_body(args, "tripod-renyi-chain")
    body.update({
        "params": {"a": scenario.a, "b": scenario.b, "eta": scenario.eta,
                   "beta": scenario.beta, "N": scenario.N},
        "margin": last["threshold"] - last["ratio"],
        "witness": last,
        "grid_step": None,
        "sweep": [list(r) for r in rows[1:]],
        "contradiction_reproduced": last["contradiction"],
    })
    return (0 if last["contradiction"] else 2), body, rows


def _cmd_coefficients_table(args):
    if not args.input:
        raise ValueError("coefficients-table needs --input with grids "
                         '{"t": [...], "K": [...], "N": [...], "theta": [...]}')
    data = _load_json(args.input)
    for fieldname in ("t", "K", "N", "theta"):
        if fieldname not in data or not isinstance(data[fieldname], list):
            raise ValueError(f"coefficients grid: missing list field {fieldname!r}")
    rows = [("t", "K", "N", "theta", "sigma", "s_vol", "f_vol")]
    for t in data["t"]:
        for K in data["K"]:
            for N in data["N"]:
                params = CurvatureParams(float(K), float(N))
                for theta in data["theta"]:
                    sg = sigma(float(t), params, float(theta))
                    sv = s_vol(params, float(theta))
                    try:
                        fv = f_vol(params, float(theta))
                    except ValueError:
                        fv = float("nan")
                    rows.append((float(t), float(K), float(N), float(theta),
                                 sg, sv, fv))
    body = _base_body(args, "coefficients-table")
    body.update({
        "params": {"t": data["t"], "K": data["K"], "N": data["N"],
                   "theta": data["theta"]},
        "margin": None, "witness": {}, "grid_step": None,
        "rows": [list(r) for r in rows[1:]],
    })
    return 0, body, rows


_COMMANDS = {
    "check-kn-convex": _cmd_check_kn_convex,
    "verify-cde": _cmd_verify_cde,
    "verify-cd-infty": _cmd_verify_cd_infty,
    "circle-obstruction": _cmd_circle_obstruction,
    "bg-scan": _cmd_bg_scan,
    "bg-boundary": _cmd_bg_boundary,
    "density-ratio": _cmd_density_ratio,
    "lipschitz": _cmd_lipschitz,
    "classify": _cmd_classify,
    "tripod-shannon": _cmd_tripod_shannon,
    "tripod-renyi": _cmd_tripod_renyi,
    "coefficients-table": _cmd_coefficients_table,
}


def _csv_text(rows) -> str:
    buf = io.StringIO()
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (np.floating, np.integer)):
                v = v.item()
            cells.append(repr(v) if isinstance(v, float) else str(v))
        buf.write(",".join(cells))
        buf.write("\n")
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvlab-1d",
        description="Curvature-dimension checks on 1D weighted spaces and the tripod",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--input", help="JSON space or scenario description")
    parser.add_argument("--output", help="report body path (sidecar .meta.json gets the timestamp)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--grid-step", dest="grid_step", type=float, default=None)
    parser.add_argument("--k", default="0.0", help="curvature bound K (comma list for classify)")
    parser.add_argument("--n", default="2.0", help="dimension bound N (comma list for classify)")
    parser.add_argument("--x", type=float, default=None, help="scan center coordinate")
    parser.add_argument("--kexp", type=int, default=1, help="density-ratio exponent k")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    # classify takes comma lists in --k/--n; other commands need floats
    if args.command != "classify":
        try:
            args.k = float(args.k)
            args.n = float(args.n)
        except (TypeError, ValueError):
            print("error: --k and --n must be numbers", file=sys.stderr)
            return 1

    try:
        code, body, rows = _COMMANDS[args.command](args)
    except (ValueError, WindowError, br.InfeasibleScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    fmt = args.format or ("csv" if args.command == "coefficients-table" else "json")
    if fmt == "csv" and rows is not None:
        text = _csv_text(rows)
    else:
        text = _dump_body(body)

    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        meta = {"generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat()}
        with open(args.output + ".meta.json", "w") as fh:
            json.dump(meta, fh)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
