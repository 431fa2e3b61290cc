"""Command-line driver: verify-calculus, build, eval, sweep, bounds.

Exit status: 0 ok, 1 a check failed, 2 bad usage or unreadable input.
Any flag may also come from a JSON file given with --config; flags win.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds as B
from .euler import frozen_estimate, reference_solution
from .kolmogorov import (
    build_solution_net,
    choose_discretization,
    desk_config,
    param_bound,
    solution_param_count,
)
from .network import RELU, load, realize, save
from .problems import BUNDLED, get_problem, load_problem
from .sampling import GaussianSampler
from .stats import cube_points, loglog_fit, lp_error
from .verify import run_suites

log = logging.getLogger("netforge")

OK, FAILED, USAGE = 0, 1, 2
CSV_COLUMNS = ["d", "eps", "seed", "N", "eps_inner", "param_count", "bound", "lp_error", "lp_stderr"]

DEFAULTS = {
    "problem": "heat_abs",
    "d": 2,
    "eps": 0.5,
    "best_of": 1,
    "p": 2.0,
    "quad_points": 1 << 14,
    "jobs": 1,
    "kappa": 1.0,
    "d0": 0.0,
    "T": None,
    "max_params": 20_000_000,
    "max_work": 2e9,
    "instances": 200,
}


class UsageError(Exception):
    pass


def default_seed():
    raw = os.environ.get("NETFORGE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"NETFORGE_SEED={raw!r} is not an integer") from None


# --- option merging -------------------------------------------------------

def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def options(args, defaults=DEFAULTS):
    """Merge defaults, the --config file and explicit flags (in increasing priority)."""
    merged = dict(defaults)
    merged["seed"] = None
    if getattr(args, "config", None):
        conf = _read_json(args.config)
        if not isinstance(conf, dict):
            raise UsageError(f"{args.config}: config must be a JSON object")
        merged.update({k.replace("-", "_"): v for k, v in conf.items()})
    merged.update({k: v for k, v in vars(args).items() if v is not None})
    if merged["seed"] is None:
        merged["seed"] = default_seed()
    return merged


def _as_list(value, cast):
    if isinstance(value, (list, tuple)):
        return [cast(v) for v in value]
    return [cast(v) for v in str(value).split(",") if v.strip()]


def _check_eps(eps):
    if not 0 < eps <= 1:
        raise UsageError(f"--eps {eps} is outside (0, 1]")
    return eps


def _problem(opts):
    name = opts["problem"]
    if name in BUNDLED:
        spec = get_problem(name, opts.get("T"))
    elif Path(name).is_file():
        try:
            spec = load_problem(name)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{name}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        except ValueError as exc:
            raise UsageError(f"{name}: {exc}") from None
    else:
        raise UsageError(f"unknown problem {name!r}; bundled: {', '.join(BUNDLED)} or a JSON file")
    return spec


# --- commands -------------------------------------------------------------

def cmd_verify_calculus(opts, out=None):
    out = out or sys.stdout
    results = run_suites(instances=int(opts["instances"]), seed=int(opts["seed"]),
                         corrupt=bool(opts.get("inject_fault")))
    width = max(len(name) for name, _, _ in results)
    failed = 0
    for name, failures, total in results:
        status = "pass" if failures == 0 else f"FAIL ({failures}/{total})"
        failed += failures > 0
        print(f"{name}: {status}" if name.startswith("P(") else f"{name:<{width}}  {status}", file=out)
    print(f"{len(results) - failed}/{len(results)} suites passed", file=out)
    return OK if failed == 0 else FAILED


def _evaluate(net, spec, d, T, Q, p, point_seed=0):
    if not spec.has_reference():
        return float("nan"), float("nan")
    X = cube_points(Q, d, point_seed)
    approx = realize(net, RELU, X)[:, 0]
    return lp_error(approx, reference_solution(spec.id, d, T, X), p)


def build_best(spec, d, eps, seed, best_of, Q, p, kappa=1.0, d0=0.0):
    """Build with seeds seed..seed+best_of-1 and keep the smallest L^p error."""
    fam = spec.family()
    config = desk_config(fam, kappa=kappa, d0=d0, p=max(2.0, p))
    best = None
    for s in range(seed, seed + best_of):
        net, report = build_solution_net(fam, config, d, eps, spec.T, s)
        err, se = _evaluate(net, spec, d, spec.T, Q, p) if best_of > 1 else (float("nan"), float("nan"))
        log.info("seed %d: N=%d params=%d lp_error=%.6g", s, report.N, report.param_count, err)
        if best is None or err < best[2]:
            best = (net, report, err, se)
    return best


def cmd_build(opts):
    spec = _problem(opts)
    try:
        d, eps, seed = int(opts["d"]), float(opts["eps"]), int(opts["seed"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _check_eps(eps)
    best_of = int(opts["best_of"])
    if best_of < 1:
        raise UsageError("--best-of must be at least 1")
    if not opts.get("out"):
        raise UsageError("build needs --out DIR")
    net, report, err, se = build_best(spec, d, eps, seed, best_of,
                                      int(opts["quad_points"]), float(opts["p"]),
                                      float(opts["kappa"]), float(opts["d0"]))
    if best_of == 1 and opts.get("evaluate"):
        err, se = _evaluate(net, spec, d, spec.T, int(opts["quad_points"]), float(opts["p"]))
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    save(net, out / "network.json")
    doc = report.to_dict()
    doc.update({"problem": spec.id, "T": spec.T})
    if not math.isnan(err):
        doc.update({"lp_error": err, "lp_stderr": se, "p": float(opts["p"])})
    (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(json.dumps({"network": str(out / "network.json"), "report": str(out / "report.json"),
                      "N": report.N, "param_count": report.param_count}))
    return OK


def _read_points(path, d):
    text = Path(path).read_text()
    if path.endswith(".json"):
        try:
            pts = np.asarray(json.loads(text), dtype=np.float64)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    else:
        rows = []
        for k, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise UsageError(f"{path}:{k}: not a row of numbers") from None
        pts = np.asarray(rows, dtype=np.float64)
    pts = pts.reshape(-1, d) if pts.size else np.zeros((0, d))
    return pts


def cmd_eval(opts, out=None):
    out = out or sys.stdout
    net_path, points_path = opts["net"], opts["points"]
    try:
        net = load(net_path)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{net_path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except (OSError, ValueError) as exc:
        raise UsageError(f"{net_path}: {exc}") from None
    try:
        pts = _read_points(points_path, net.input_dim)
    except OSError as exc:
        raise UsageError(f"cannot read {points_path}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"{points_path}: {exc}") from None
    values = realize(net, RELU, pts) if len(pts) else np.zeros((0, net.output_dim))
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{i}" for i in range(1, net.input_dim + 1)] + [f"y{i}" for i in range(1, net.output_dim + 1)])
    for x, y in zip(pts, values):
        w.writerow([repr(float(v)) for v in x] + [repr(float(v)) for v in y])
    return OK


def sweep_cell(spec, d, eps, seed, opts):
    """One CSV row: parameter count from the dims planner, L^p error when affordable."""
    fam = spec.family()
    p = float(opts["p"])
    config = desk_config(fam, kappa=float(opts["kappa"]), d0=float(opts["d0"]), p=max(2.0, p))
    N, P = solution_param_count(fam, config, d, eps)
    bound, _ = param_bound(config, d, eps)
    _, eps_inner = choose_discretization(config, d, eps)
    Q = int(opts["quad_points"])
    err = se = float("nan")
    if spec.has_reference():
        if P <= float(opts["max_params"]):
            net, _ = build_solution_net(fam, config, d, eps, spec.T, seed)
            err, se = _evaluate(net, spec, d, spec.T, Q, p)
        elif N * N * Q * d <= float(opts["max_work"]):
            # same values as the network by the emulation identity, without its dense layers
            X = cube_points(Q, d, 0)
            approx = frozen_estimate(spec.sde_problem(d, net_backed=True), N, N, X, GaussianSampler(seed))
            err, se = lp_error(approx, reference_solution(spec.id, d, spec.T, X), p)
        else:
            log.warning("d=%d eps=%g: N=%d too large to evaluate, lp_error left empty", d, eps, N)
    return {"d": d, "eps": eps, "seed": seed, "N": N, "eps_inner": eps_inner,
            "param_count": P, "bound": bound, "lp_error": err, "lp_stderr": se}


def sweep_summary(rows, T):
    """Fitted exponents, keyed by name, each (slope, residual norm)."""
    out = {}
    ds = sorted({r["d"] for r in rows})
    epss = sorted({r["eps"] for r in rows})
    for d in ds:
        sub = [r for r in rows if r["d"] == d]
        if len({r["eps"] for r in sub}) >= 2:
            f = loglog_fit([1 / r["eps"] for r in sub], [r["param_count"] for r in sub])
            out[f"params_vs_inv_eps[d={d}]"] = (f.slope, f.residual_norm)
        errs = [r for r in sub if np.isfinite(r["lp_error"]) and r["lp_error"] > 0]
        if len({r["N"] for r in errs}) >= 2:
            f = loglog_fit([r["N"] for r in errs], [r["lp_error"] for r in errs])
            out[f"error_vs_M[d={d}]"] = (f.slope, f.residual_norm)
            f = loglog_fit([T / r["N"] for r in errs], [r["lp_error"] for r in errs])
            out[f"error_vs_h[d={d}]"] = (f.slope, f.residual_norm)
    for eps in epss:
        sub = [r for r in rows if r["eps"] == eps]
        if len({r["d"] for r in sub}) >= 2:
            f = loglog_fit([r["d"] for r in sub], [r["param_count"] for r in sub])
            out[f"params_vs_d[eps={eps:g}]"] = (f.slope, f.residual_norm)
    return out


def _fmt(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def cmd_sweep(opts, out=None):
    out = out or sys.stdout
    spec = _problem(opts)
    ds = _as_list(opts["d"], int)
    epss = [_check_eps(e) for e in _as_list(opts["eps"], float)]
    seeds = _as_list(opts["seed"], int)
    if any(d < 1 for d in ds) or int(opts["quad_points"]) < 100:
        raise UsageError("sweep needs d >= 1 and --quad-points >= 100")
    cells = [(d, e, s) for d in ds for e in epss for s in seeds]
    jobs = max(1, int(opts["jobs"]))
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        rows = list(pool.map(lambda c: sweep_cell(spec, *c, opts), cells))
    summary = sweep_summary(rows, spec.T)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    buf.write("# summary: name,slope,residual_norm\n")
    for name, (slope, resid) in summary.items():
        buf.write(f"# {name},{slope!r},{resid!r}\n")
    if opts.get("out"):
        Path(opts["out"]).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return OK


def cmd_bounds(opts, out=None):
    out = out or sys.stdout
    try:
        params = B.BoundParams(**{k: float(opts[k]) for k in ("kappa", "theta", "p", "e", "d0", "d1")})
        d, T, h, M = int(opts["d"]), float(opts["T_bound"]), float(opts["h"]), int(opts["M"])
        n = int(opts["n"])
        geo, expo = B.gronwall_bound(float(opts["alpha"]), float(opts["beta"]), float(opts["x0"]), n)
        values = {
            "gronwall": {"geometric": geo, "exponential": expo},
            "apriori_moment": B.apriori_moment_bound(float(opts["alpha"]), float(opts["beta"]),
                                                      float(opts["gamma"]), float(opts["x0"]),
                                                      float(opts["z_sup"]), n),
            "euler_weak": B.euler_weak_bound(float(opts["L0"]), float(opts["L1"]), float(opts["l"]), T, h,
                                             float(opts["trace"]), float(opts["xi"]), float(opts["f1"])),
            "mc_error": B.mc_error_bound(params, d, T, M),
            "combined_weak": B.combined_weak_bound(params, d, T, h, M),
        }
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(json.dumps(values, indent=2), file=out)
    return OK


# --- argument parsing ------------------------------------------------------

BOUND_DEFAULTS = {
    "kappa": 1.0, "theta": 1.0, "p": 2.0, "e": 0.0, "d0": 0.0, "d1": 0.0, "d": 1,
    "T_bound": 1.0, "h": 1.0, "M": 1, "alpha": 1.0, "beta": 1.0, "gamma": 0.0, "x0": 0.0,
    "z_sup": 1.0, "n": 1, "L0": 0.0, "L1": 0.0, "l": 0.0, "trace": 0.0, "xi": 0.0, "f1": 0.0,
}


def parser():
    ap = argparse.ArgumentParser(prog="netforge", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file supplying any flag")
        p.add_argument("--seed", help="integer seed (default $NETFORGE_SEED or 0)")
        return p

    v = common(sub.add_parser("verify-calculus", help="run the calculus property suites"))
    v.add_argument("--instances", type=int)
    v.add_argument("--inject-fault", action="store_true", default=None,
                   help="test mode: corrupt every constructed network")

    for name in ("build", "sweep"):
        p = common(sub.add_parser(name))
        p.add_argument("--problem", help="heat_abs, ou_abs or a problem JSON file")
        p.add_argument("--d", help="dimension (sweep: comma list)")
        p.add_argument("--eps", help="target accuracy in (0, 1] (sweep: comma list)")
        p.add_argument("--T", type=float, help="horizon for bundled problems")
        p.add_argument("--p", type=float, help="error exponent")
        p.add_argument("--quad-points", type=int, help="uniform points for the L^p estimate")
        p.add_argument("--kappa", type=float, help="scheme constant used by the scheduler")
        p.add_argument("--d0", type=float, help="dimension exponent used by the scheduler")
        p.add_argument("--out", help="output directory (build) or CSV file (sweep)")
        if name == "build":
            p.add_argument("--best-of", type=int)
            p.add_argument("--evaluate", action="store_true", default=None)
        else:
            p.add_argument("--jobs", type=int)
            p.add_argument("--max-params", type=float, help="largest network realized directly")
            p.add_argument("--max-work", type=float, help="largest N*M*Q*d emulated otherwise")

    e = common(sub.add_parser("eval", help="evaluate a network JSON at CSV or JSON points"))
    e.add_argument("net")
    e.add_argument("points")

    b = common(sub.add_parser("bounds", help="print every bound formula as JSON"))
    for key, val in BOUND_DEFAULTS.items():
        flag = "--T" if key == "T_bound" else "--" + key.replace("_", "-")
        b.add_argument(flag, dest=key, type=type(val))
    return ap


COMMANDS = {
    "verify-calculus": cmd_verify_calculus,
    "build": cmd_build,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
}


def main(argv=None):
    try:
        args = parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    cmd = args.command
    del args.command, args.verbose
    try:
        opts = options(args, BOUND_DEFAULTS if cmd == "bounds" else DEFAULTS)
        return COMMANDS[cmd](opts)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
