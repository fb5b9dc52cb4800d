"""``mpp`` command line: verify, scan, search, decompose, oracle.

Every flag may also come from a JSON object passed with ``--config``; keys
are the flag names without dashes (``lambda`` for ``--lambda``) and flags
given on the command line win.  Exit status: 0 when every bounded check and
oracle comparison passes, 1 otherwise, 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import generators as gen
from ._parallel import parallel_map
from .gundy import gundy_report
from .io import load_space
from .martingale import martingale_lp_norm
from .report import CheckReport, sorted_reports, to_csv, to_json
from .space import SpaceError
from .variation import (
    BRUTE_FORCE_MAX_DEPTH,
    ParaproductKernel,
    ScalarKernel,
    brute_force_jump_count,
    brute_force_variation,
    jump_count,
    rho_variation,
    jump_stopping_times,
)
from .verify import run_suite

COMMANDS = ("verify", "scan", "search", "decompose", "oracle")
GENERATORS = ("rademacher", "random", "space")
DEFAULT_RHOS = [1.1, 1.5, 2.0, 2.5, 3.0]
DEFAULT_LAMBDAS = [2.0 ** j for j in range(-3, 4)]
ORACLE_RTOL = 1e-12

DEFAULTS = {
    "generator": "random",
    "seed": [0],
    "bias": 0.5,
    "scale": "normal",
    "p": [2.0],
    "q": [2.0],
    "rho": [1.5],
    "lambda": [1.0],
    "alpha": None,
    "format": "csv",
    "output": None,
    "space": None,
    "target": "lepingle",
    "iterations": 200,
    "restarts": 4,
    "trace": None,
    "instances": 3,
}
LIST_KEYS = ("seed", "p", "q", "rho", "lambda", "alpha")


class ConfigError(Exception):
    pass


def _parser():
    parser = argparse.ArgumentParser(prog="mpp", description="Exact martingale paraproduct computations.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file with default settings")
    parser.add_argument("--generator", choices=GENERATORS)
    parser.add_argument("--depth", type=int)
    parser.add_argument("--seed", "--seeds", dest="seed", type=int, nargs="+")
    parser.add_argument("--bias", type=float, help="left-child probability of random dyadic trees")
    parser.add_argument("--scale", choices=gen.SCALES)
    parser.add_argument("--p", type=float, nargs="+")
    parser.add_argument("--q", type=float, nargs="+")
    parser.add_argument("--rho", type=float, nargs="+")
    parser.add_argument("--lambda", dest="lambda", type=float, nargs="+")
    parser.add_argument("--alpha", type=float, nargs="+")
    parser.add_argument("--space", help="space JSON with processes f (and optionally g, w)")
    parser.add_argument("--target", help="search target check id")
    parser.add_argument("--iterations", type=int)
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--trace", help="write the search trace CSV here")
    parser.add_argument("--instances", type=int, help="random instances per oracle run")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--output", help="write the report here instead of stdout")
    return parser


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config} ({exc})") from None
        if not isinstance(doc, dict):
            raise ConfigError("config: expected a JSON object")
        for key, value in doc.items():
            if key not in DEFAULTS and key not in ("depth", "command"):
                raise ConfigError(f"{key}: unknown field")
            cfg[key] = value
    for key, value in vars(args).items():
        if key != "config" and value is not None:
            cfg[key] = value
    return _validate(cfg)


def _validate(cfg):
    for key in LIST_KEYS:
        v = cfg[key]
        if v is None:
            continue
        if not isinstance(v, list):
            v = [v]
        if not v:
            raise ConfigError(f"{key}: grid must be nonempty")
        cfg[key] = v
    if cfg["generator"] not in GENERATORS:
        raise ConfigError(f"generator: expected one of {GENERATORS}")
    if cfg["generator"] == "space":
        if not cfg["space"]:
            raise ConfigError("space: required for the space generator")
    elif cfg.get("depth") is None:
        raise ConfigError("depth: required")
    depth = cfg.get("depth")
    if depth is not None and (not isinstance(depth, int) or depth < 1):
        raise ConfigError("depth: must be a positive integer")
    if cfg["command"] == "oracle" and depth is not None and depth > BRUTE_FORCE_MAX_DEPTH:
        raise ConfigError(f"depth: oracle comparisons are limited to depth <= {BRUTE_FORCE_MAX_DEPTH}")
    if cfg["command"] == "verify":
        for key in ("seed", "p", "q", "rho", "lambda"):
            if len(cfg[key]) != 1:
                raise ConfigError(f"{key}: verify takes a single value (use scan for grids)")
    for key in ("iterations", "restarts", "instances"):
        if not isinstance(cfg[key], int) or cfg[key] < 1:
            raise ConfigError(f"{key}: must be a positive integer")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError("format: expected csv or json")
    return cfg


# ---------------------------------------------------------------- inputs


def make_inputs(cfg, seed):
    """``(f, g, w)`` for one seed."""
    kind = cfg["generator"]
    if kind == "space":
        space, procs = load_space(cfg["space"])
        if "f" not in procs:
            raise ConfigError("space: document has no process named 'f'")
        f = procs["f"]
        g = procs.get("g", f)
        w = procs["w"].final if "w" in procs else np.ones(space.n_leaves)
        return f, g, w
    depth = cfg["depth"]
    if kind == "rademacher":
        f = gen.rademacher_walk(depth)
        return f, f, gen.random_weight(f.space, np.random.default_rng(seed))
    f = gen.random_dyadic(depth, seed, cfg["scale"], cfg["bias"])
    g = gen.random_dyadic(depth, seed + 1, cfg["scale"], cfg["bias"])
    return f, g, gen.random_weight(f.space, np.random.default_rng(seed))


def _labels(cfg, seed, f):
    return {"depth": f.depth, "seed": seed, "generator": cfg["generator"]}


def _suite_task(cfg):
    def task(point):
        seed, p, q, rho, lam = point
        f, g, w = make_inputs(cfg, seed)
        S = jump_stopping_times(f, g, lam).sequence(f.space)
        reports = run_suite(f, g, w, S, p=p, q=q, rho=rho, lam=lam, **_labels(cfg, seed, f))
        alphas = cfg["alpha"] or [martingale_lp_norm(f, 1)]
        for alpha in alphas:
            if alpha > 0:
                reports += gundy_report(f, alpha, **_labels(cfg, seed, f))
        return reports
    return task


def run_grid(cfg):
    points = list(itertools.product(cfg["seed"], cfg["p"], cfg["q"], cfg["rho"], cfg["lambda"]))
    chunks = parallel_map(_suite_task(cfg), points)
    return sorted_reports([rep for chunk in chunks for rep in chunk])


def run_decompose(cfg):
    def task(seed):
        f, _, _ = make_inputs(cfg, seed)
        g1 = martingale_lp_norm(f, 1)
        alphas = cfg["alpha"] or [0.25 * g1, g1, 4.0 * g1]
        return [rep for a in alphas if a > 0 for rep in gundy_report(f, a, **_labels(cfg, seed, f))]
    chunks = parallel_map(task, cfg["seed"])
    return sorted_reports([rep for chunk in chunks for rep in chunk])


def run_search(cfg):
    params = {"p": cfg["p"][0], "q": cfg["q"][0], "rho": cfg["rho"][0], "lam": cfg["lambda"][0]}
    if cfg.get("depth") is None:
        raise ConfigError("depth: required")
    try:
        result = gen.ratio_search(
            cfg["target"], params, cfg["iterations"], cfg["restarts"], cfg["seed"][0], cfg["depth"]
        )
    except SpaceError as exc:
        raise ConfigError(f"target: {exc}") from None
    if cfg["trace"]:
        with open(cfg["trace"], "w", encoding="utf-8") as fh:
            fh.write(result.trace_csv())
    reports = [result.best_report] + list(result.violations)
    return reports


def oracle_reports(depth, instances, seed):
    """DP versus brute force on random dyadic martingales, scalar and paraproduct kernels."""
    out = []
    for i in range(instances):
        f = gen.random_dyadic(depth, seed + 2 * i)
        g = gen.random_dyadic(depth, seed + 2 * i + 1)
        for name, kernel in (("oracle_scalar", ScalarKernel(f)), ("oracle_paraproduct", ParaproductKernel(f, g))):
            for rho in DEFAULT_RHOS:
                out.append(_oracle_row(f"{name}_variation", rho_variation(kernel, rho),
                                       brute_force_variation(kernel, rho), depth, seed + 2 * i, rho=rho))
            for lam in DEFAULT_LAMBDAS:
                out.append(_oracle_row(f"{name}_jump", jump_count(kernel, lam),
                                       brute_force_jump_count(kernel, lam), depth, seed + 2 * i, lam=lam))
    return out


def _oracle_row(name, dp, brute, depth, seed, **params):
    dp, brute = np.asarray(dp, dtype=np.float64), np.asarray(brute, dtype=np.float64)
    err = float(np.max(np.abs(dp - brute) / np.maximum(1.0, np.abs(brute))))
    rep = CheckReport.make(name, err, ORACLE_RTOL, bound=1.0, depth=depth, seed=seed, generator="random", **params)
    return rep


def run_oracle(cfg):
    if cfg.get("depth") is None:
        raise ConfigError("depth: required")
    return sorted_reports(oracle_reports(cfg["depth"], cfg["instances"], cfg["seed"][0]))


def run(cfg):
    """Run a resolved config; returns ``(exit_code, reports)``."""
    command = cfg["command"]
    if command in ("verify", "scan"):
        reports = run_grid(cfg)
    elif command == "decompose":
        reports = run_decompose(cfg)
    elif command == "search":
        reports = run_search(cfg)
    else:
        reports = run_oracle(cfg)
    failed = any(rep.bound is not None and not rep.passed for rep in reports)
    return (1 if failed else 0), reports


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        code, reports = run(cfg)
    except (ConfigError, SpaceError) as exc:
        print(f"mpp: config error: {exc}", file=sys.stderr)
        return 2
    text = to_csv(reports) if cfg["format"] == "csv" else to_json(reports) + "\n"
    if cfg["output"]:
        with open(cfg["output"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code:
        bad = sum(1 for rep in reports if rep.bound is not None and not rep.passed)
        print(f"mpp: {bad} bounded check(s) failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
