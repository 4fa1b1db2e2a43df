"""Experiment driver: seeded JSON configs in, deterministic artifacts out.

Commands::

    nttkit run <config.json> [--jobs N] [--out DIR]
    nttkit report <DIR>

A config is a JSON object with an "experiment" key naming one of
complete | phase | eigen-laplace | eigen-ising | stabrank | renyi, the
experiment parameters, mandatory seeds (no entropy is ever drawn from the
environment), and an optional "out" directory ("--out" overrides it).

Artifacts written into the output directory:

    manifest.json   config echo, applied defaults, package version, seeds
    results.csv     deterministic metrics (per-experiment headers below)
    report.json     wall-clock timings and other host-dependent values
    traces/*.csv    per-iteration optimizer traces (no time column)

results.csv is reproducible byte for byte from manifest.json alone: all
randomness flows from the configured seeds, floats print as '%.17g', rows
keep task order regardless of --jobs, and no wall-clock data lands in it
(timings go to report.json).

results.csv headers:

    complete       seed,m,noise,iterations,train_error,test_error,
                   best_test_error,success
    phase          n,m,success_fraction
    eigen-laplace  d,n,r,n_params,relerr,dist
    eigen-ising    d,t,r,n_params,relerr
    stabrank       n,R,r,lam,restart,infidelity,max_sre
    renyi          channel,n,r,restarts,entropy,entropy_per_site

Exit codes: 0 success, 1 runtime failure (partial artifacts are flagged in
manifest.json), 2 config violation (nothing is written).

The environment variable NTTKIT_LOG in {error, info, debug} sets the
stderr log level (default error).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .completion import phase_cell, recovery_run
from .eigen import (ising_operator, laplace_operator, laplace_reference,
                    eigen_solve, eigen_solve_continuation, subspace_distance)
from .manifold import manifold_dim
from .optim import RCGConfig
from .quantum import (basis_state, channel_from_config, channel_ranks,
                      hadamard_target, min_output_entropy, stab_rank_solve)
from .tensor_train import check_ranks, max_ranks, uniform_ranks

log = logging.getLogger("nttkit")

EXPERIMENTS = ("complete", "phase", "eigen-laplace", "eigen-ising",
               "stabrank", "renyi")

HEADERS = {
    "complete": ["seed", "m", "noise", "iterations", "train_error",
                 "test_error", "best_test_error", "success"],
    "phase": ["n", "m", "success_fraction"],
    "eigen-laplace": ["d", "n", "r", "n_params", "relerr", "dist"],
    "eigen-ising": ["d", "t", "r", "n_params", "relerr"],
    "stabrank": ["n", "R", "r", "lam", "restart", "infidelity", "max_sre"],
    "renyi": ["channel", "n", "r", "restarts", "entropy", "entropy_per_site"],
}


class ConfigError(Exception):
    """A config file violates the experiment schema."""


# ---------------------------------------------------------------------------
# schema validation


def _take(cfg, key, kind, default=..., minimum=None):
    """Pop a scalar field, checking its type and optional lower bound."""
    if key not in cfg:
        if default is ...:
            raise ConfigError(f"missing required field {key!r}")
        return default
    v = cfg.pop(key)
    if kind is float and isinstance(v, int) and not isinstance(v, bool):
        v = float(v)
    if not isinstance(v, kind) or isinstance(v, bool):
        raise ConfigError(f"field {key!r} must be {kind.__name__}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"field {key!r} must be >= {minimum}")
    return v


def _take_int_list(cfg, key, default=..., minimum=None, min_len=1):
    if key not in cfg:
        if default is ...:
            raise ConfigError(f"missing required field {key!r}")
        return default
    v = cfg.pop(key)
    if not isinstance(v, list) or len(v) < min_len or \
            any(isinstance(e, bool) or not isinstance(e, int) for e in v):
        raise ConfigError(f"field {key!r} must be a list of ints")
    if minimum is not None and any(e < minimum for e in v):
        raise ConfigError(f"entries of {key!r} must be >= {minimum}")
    return list(v)


def _take_ranks(cfg, key, shape):
    """A rank field: a positive int (uniform, clamped) or a full profile."""
    v = cfg.pop(key, ...)
    if v is ...:
        raise ConfigError(f"missing required field {key!r}")
    if isinstance(v, int) and not isinstance(v, bool):
        if v < 1:
            raise ConfigError(f"field {key!r} must be >= 1")
        caps = max_ranks(shape)
        return [min(c, u) for c, u in zip(caps, uniform_ranks(shape, v))]
    if isinstance(v, list):
        try:
            return list(check_ranks(tuple(shape), v))
        except (ValueError, TypeError) as e:
            raise ConfigError(f"invalid rank profile {key!r}: {e}") from None
    raise ConfigError(f"field {key!r} must be an int or a rank profile")


def _reject_unknown(cfg):
    if cfg:
        raise ConfigError(f"unknown config fields: {sorted(cfg)}")


def _validate_complete(cfg):
    shape = _take_int_list(cfg, "shape", minimum=2, min_len=1)
    out = {
        "shape": shape,
        "ranks": _take_ranks(cfg, "ranks", shape),
        "m": _take(cfg, "m", int, minimum=1),
        "noise": _take(cfg, "noise", float, default=0.0, minimum=0.0),
        "seeds": _take_int_list(cfg, "seeds"),
        "max_iters": _take(cfg, "max_iters", int, default=250, minimum=1),
    }
    if out["m"] > math.prod(shape):
        raise ConfigError("field 'm' exceeds the number of tensor entries")
    return out


def _validate_phase(cfg):
    return {
        "n_values": _take_int_list(cfg, "n_values", minimum=2),
        "m_values": _take_int_list(cfg, "m_values", minimum=1),
        "trials": _take(cfg, "trials", int, default=3, minimum=1),
        "seed": _take(cfg, "seed", int),
        "d": _take(cfg, "d", int, default=3, minimum=2),
        "rank": _take(cfg, "rank", int, default=2, minimum=1),
        "max_iters": _take(cfg, "max_iters", int, default=250, minimum=1),
    }


def _validate_eigen_laplace(cfg):
    d = _take(cfg, "d", int, minimum=2)
    n = _take(cfg, "n", int, minimum=2)
    out = {
        "d": d, "n": n,
        "ranks": _take_ranks(cfg, "r", [n] * d),
        "extremum": _take(cfg, "extremum", str, default="max"),
        "seed": _take(cfg, "seed", int),
        "max_iters": _take(cfg, "max_iters", int, default=500, minimum=1),
    }
    if out["extremum"] not in ("min", "max"):
        raise ConfigError("field 'extremum' must be 'min' or 'max'")
    return out


def _validate_eigen_ising(cfg):
    out = {
        "d": _take(cfg, "d", int, minimum=2),
        "t": _take(cfg, "t", float, default=1.0),
        "r_max": _take(cfg, "r_max", int, minimum=1),
        "extremum": _take(cfg, "extremum", str, default="min"),
        "seed": _take(cfg, "seed", int),
        "stage_iters": _take(cfg, "stage_iters", int, default=50, minimum=1),
    }
    if out["extremum"] not in ("min", "max"):
        raise ConfigError("field 'extremum' must be 'min' or 'max'")
    if out["d"] > 12:
        raise ConfigError("field 'd' must be <= 12 (dense reference solve)")
    return out


def _validate_stabrank(cfg):
    target = cfg.pop("target", "hadamard")
    if isinstance(target, dict) and set(target) == {"basis"}:
        bits = target["basis"]
        if not isinstance(bits, list) or not bits or \
                any(b not in (0, 1) for b in bits):
            raise ConfigError("field 'target.basis' must be a list of bits")
        n = _take(cfg, "n", int, default=len(bits), minimum=1)
        if n != len(bits):
            raise ConfigError("field 'n' contradicts the target length")
        target = {"basis": list(bits)}
    elif target == "hadamard":
        n = _take(cfg, "n", int, minimum=1)
    else:
        raise ConfigError("field 'target' must be 'hadamard' or {'basis': [...]}")
    return {
        "target": target, "n": n,
        "R": _take(cfg, "R", int, minimum=1),
        "r": _take(cfg, "r", int, minimum=1),
        "lam": _take(cfg, "lam", float, default=1.0, minimum=0.0),
        "restarts": _take(cfg, "restarts", int, default=5, minimum=1),
        "seed": _take(cfg, "seed", int),
        "rounds": _take(cfg, "rounds", int, default=60, minimum=1),
        "inner_iters": _take(cfg, "inner_iters", int, default=8, minimum=1),
    }


def _validate_renyi(cfg):
    channel = cfg.pop("channel", None)
    if not isinstance(channel, dict):
        raise ConfigError("field 'channel' must be a channel description")
    try:
        channel_from_config(channel)
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"invalid channel: {e}") from None
    if "n_values" in cfg:
        n_values = _take_int_list(cfg, "n_values", minimum=1)
    else:
        n_values = [_take(cfg, "n", int, minimum=1)]
    return {
        "channel": channel, "n_values": n_values,
        "r": _take(cfg, "r", int, minimum=1),
        "restarts": _take(cfg, "restarts", int, default=5, minimum=1),
        "seed": _take(cfg, "seed", int),
        "max_iters": _take(cfg, "max_iters", int, default=300, minimum=1),
    }


VALIDATORS = {
    "complete": _validate_complete,
    "phase": _validate_phase,
    "eigen-laplace": _validate_eigen_laplace,
    "eigen-ising": _validate_eigen_ising,
    "stabrank": _validate_stabrank,
    "renyi": _validate_renyi,
}


def validate_config(raw: dict):
    """Check a raw config dict; returns (experiment, effective params, out).

    Raises ConfigError on any schema violation. The effective dict has all
    defaults applied, so it fully determines the run together with the
    package version.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    cfg = dict(raw)
    experiment = cfg.pop("experiment", None)
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"field 'experiment' must be one of {', '.join(EXPERIMENTS)}")
    out = cfg.pop("out", None)
    if out is not None and not isinstance(out, str):
        raise ConfigError("field 'out' must be a directory path")
    effective = VALIDATORS[experiment](cfg)
    _reject_unknown(cfg)
    return experiment, effective, out


# ---------------------------------------------------------------------------
# experiment tasks (top-level functions so process pools can pickle them)


def _complete_task(shape, ranks, m, noise, seed, max_iters):
    out = recovery_run(tuple(shape), ranks, m, np.random.default_rng(seed),
                       noise=noise, cfg=RCGConfig(max_iters=max_iters))
    rep = out["report"]
    row = {"seed": seed, "m": m, "noise": noise,
           "iterations": rep["iterations"],
           "train_error": rep["train_error"],
           "test_error": rep["test_error"],
           "best_test_error": rep["best_test_error"],
           "success": int(rep["success"])}
    return [row], [(f"complete-seed{seed}", out["trace"])]


def _phase_task(n, m, trials, seed, cell_index, d, rank, max_iters):
    row = phase_cell(n, m, trials, seed, cell_index, d=d, rank=rank,
                     cfg=RCGConfig(max_iters=max_iters))
    return [row], []


def _laplace_task(d, n, ranks, extremum, seed, max_iters):
    H = laplace_operator(d, n)
    val, x, trace = eigen_solve(H, ranks, extremum,
                                RCGConfig(max_iters=max_iters),
                                np.random.default_rng(seed))
    ref, vstar = laplace_reference(d, n, n if extremum == "max" else 1)
    row = {"d": d, "n": n, "r": max(list(x.ranks)[1:-1] or [1]),
           "n_params": manifold_dim(H.shape, x.ranks),
           "relerr": abs(val - ref) / abs(ref),
           "dist": subspace_distance(x, vstar)}
    return [row], [("eigen-laplace", trace)]


def _ising_task(d, t, r_max, extremum, seed, stage_iters):
    H = ising_operator(d, t)
    val, x, stages = eigen_solve_continuation(
        H, r_max, extremum, rng=np.random.default_rng(seed),
        stage_iters=stage_iters)
    evals = np.linalg.eigvalsh(H.dense())
    ref = evals[-1] if extremum == "max" else evals[0]
    sign = -1.0 if extremum == "max" else 1.0
    rows, traces = [], []
    for ranks, trace in stages:
        r = max(list(ranks)[1:-1] or [1])
        rows.append({"d": d, "t": t, "r": r,
                     "n_params": manifold_dim(H.shape, ranks),
                     "relerr": abs(sign * trace.final_cost() - ref) / abs(ref)})
        traces.append((f"eigen-ising-r{r}", trace))
    return rows, traces


def _stabrank_task(target, n, R, r, lam, restart, seed, rounds, inner_iters):
    tt = hadamard_target(n) if target == "hadamard" \
        else basis_state(target["basis"])
    infid, sres, dec = stab_rank_solve(
        tt, R, lam, r, rounds=rounds, inner_iters=inner_iters,
        rng=np.random.default_rng(seed),
        init="target" if restart == 0 else "random")
    row = {"n": n, "R": R, "r": max(channel_ranks((2,) * n, r)),
           "lam": lam, "restart": restart, "infidelity": infid,
           "max_sre": max(sres)}
    return [row], []


def _renyi_task(channel, n, r, restarts, seed, max_iters):
    ch = channel_from_config(channel)
    val, x, traces = min_output_entropy(ch, n, r,
                                        cfg=RCGConfig(max_iters=max_iters),
                                        restarts=restarts, base_seed=seed)
    row = {"channel": ch.name, "n": n,
           "r": max(channel_ranks((ch.dim_in,) * n, r)),
           "restarts": restarts, "entropy": val,
           "entropy_per_site": val / n}
    named = [(f"renyi-n{n}-restart{i}", tr) for i, tr in enumerate(traces)]
    return [row], named


def build_tasks(experiment: str, p: dict):
    """The ordered list of (function, kwargs) pairs for one experiment.

    Tasks are independent (each carries its own derived seed), so they can
    run in any order; results keep this list's order regardless.
    """
    if experiment == "complete":
        return [(_complete_task,
                 {"shape": p["shape"], "ranks": p["ranks"], "m": p["m"],
                  "noise": p["noise"], "seed": s, "max_iters": p["max_iters"]})
                for s in p["seeds"]]
    if experiment == "phase":
        ms = p["m_values"]
        return [(_phase_task,
                 {"n": n, "m": m, "trials": p["trials"], "seed": p["seed"],
                  "cell_index": i * len(ms) + j, "d": p["d"],
                  "rank": p["rank"], "max_iters": p["max_iters"]})
                for i, n in enumerate(p["n_values"])
                for j, m in enumerate(ms)]
    if experiment == "eigen-laplace":
        return [(_laplace_task,
                 {"d": p["d"], "n": p["n"], "ranks": p["ranks"],
                  "extremum": p["extremum"], "seed": p["seed"],
                  "max_iters": p["max_iters"]})]
    if experiment == "eigen-ising":
        return [(_ising_task,
                 {"d": p["d"], "t": p["t"], "r_max": p["r_max"],
                  "extremum": p["extremum"], "seed": p["seed"],
                  "stage_iters": p["stage_iters"]})]
    if experiment == "stabrank":
        return [(_stabrank_task,
                 {"target": p["target"], "n": p["n"], "R": p["R"],
                  "r": p["r"], "lam": p["lam"], "restart": i,
                  "seed": p["seed"] + i, "rounds": p["rounds"],
                  "inner_iters": p["inner_iters"]})
                for i in range(p["restarts"])]
    if experiment == "renyi":
        return [(_renyi_task,
                 {"channel": p["channel"], "n": n, "r": p["r"],
                  "restarts": p["restarts"], "seed": p["seed"],
                  "max_iters": p["max_iters"]})
                for n in p["n_values"]]
    raise ValueError(experiment)


def config_seeds(experiment: str, p: dict) -> list:
    if experiment == "complete":
        return list(p["seeds"])
    return [p["seed"]]


def _execute(tasks, jobs: int):
    log.info("running %d task(s) with jobs=%d", len(tasks), jobs)
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(**kw) for fn, kw in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, **kw) for fn, kw in tasks]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# artifacts


def _csv_cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for r in rows:
            w.writerow([_csv_cell(r[k]) for k in header])


def _write_json(path, obj):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2)
        f.write("\n")


def cmd_run(args) -> int:
    try:
        with open(args.config) as f:
            raw = json.load(f)
    except OSError as e:
        print(f"nttkit: config error: {e}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as e:
        print(f"nttkit: config error: invalid JSON ({e})", file=sys.stderr)
        return 2
    try:
        experiment, params, cfg_out = validate_config(raw)
        outdir = args.out or cfg_out
        if outdir is None:
            raise ConfigError("no output directory (config 'out' or --out)")
    except ConfigError as e:
        print(f"nttkit: config error: {e}", file=sys.stderr)
        return 2

    log.debug("effective config: %r", params)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = build_tasks(experiment, params)
    manifest = {
        "experiment": experiment,
        "config": raw,
        "effective_config": params,
        "version": __version__,
        "seeds": config_seeds(experiment, params),
        "results_header": HEADERS[experiment],
    }

    t0 = time.perf_counter()
    try:
        outputs = _execute(tasks, args.jobs)
    except Exception as e:  # runtime failure: flag partial artifacts
        log.exception("experiment failed")
        manifest["status"] = "failed"
        manifest["error"] = f"{type(e).__name__}: {e}"
        manifest["artifacts"] = sorted(
            str(p.relative_to(out)) for p in out.rglob("*") if p.is_file())
        _write_json(out / "manifest.json", manifest)
        print(f"nttkit: runtime failure: {e}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - t0

    rows = [row for rs, _ in outputs for row in rs]
    traces = [(name, tr) for _, ts in outputs for name, tr in ts]
    _write_csv(out / "results.csv", HEADERS[experiment], rows)

    tdir = out / "traces"
    if tdir.exists():
        for stale in tdir.glob("*.csv"):
            stale.unlink()
    for name, tr in traces:
        tdir.mkdir(exist_ok=True)
        tr.to_csv(tdir / f"{name}.csv", include_time=False)

    _write_json(out / "report.json", {
        "experiment": experiment,
        "wall_time_s": wall,
        "jobs": args.jobs,
        "tasks": len(tasks),
    })
    manifest["status"] = "complete"
    manifest["artifacts"] = ["results.csv", "report.json"] + \
        sorted(f"traces/{name}.csv" for name, _ in traces)
    _write_json(out / "manifest.json", manifest)
    log.info("wrote %d row(s) to %s in %.1fs", len(rows),
             out / "results.csv", wall)
    return 0


# ---------------------------------------------------------------------------
# report


def _read_results(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _fmt_cell(key, value):
    try:
        f = float(value)
    except (TypeError, ValueError):
        return str(value)
    if f == int(f) and "e" not in value.lower() and "." not in value:
        return value
    return format(f, ".6g")


def _print_table(header, rows):
    cells = [[_fmt_cell(k, r.get(k, "")) for k in header] for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) if cells else len(h)
              for i, h in enumerate(header)]
    print("  " + "  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for c in cells:
        print("  " + "  ".join(v.rjust(w) for v, w in zip(c, widths)))


def _headline(experiment, rows):
    if not rows:
        return "no rows"
    if experiment == "complete":
        succ = sum(int(r["success"]) for r in rows)
        return f"{succ}/{len(rows)} seeds succeeded"
    if experiment == "phase":
        full = sum(float(r["success_fraction"]) == 1.0 for r in rows)
        return f"{full}/{len(rows)} cells fully successful"
    if experiment == "eigen-laplace":
        r = rows[-1]
        return f"relerr={_fmt_cell('relerr', r['relerr'])} " \
               f"dist={_fmt_cell('dist', r['dist'])}"
    if experiment == "eigen-ising":
        r = rows[-1]
        return f"final r={r['r']} relerr={_fmt_cell('relerr', r['relerr'])}"
    if experiment == "stabrank":
        best = min(rows, key=lambda r: float(r["infidelity"]))
        return f"best infidelity={_fmt_cell('', best['infidelity'])} " \
               f"(restart {best['restart']}, " \
               f"max_sre={_fmt_cell('', best['max_sre'])})"
    if experiment == "renyi":
        parts = [f"n={r['n']}: {_fmt_cell('', r['entropy'])}" for r in rows]
        return "entropy " + ", ".join(parts)
    return ""


def _print_phase_grid(rows):
    ns = sorted({int(r["n"]) for r in rows})
    ms = sorted({int(r["m"]) for r in rows})
    frac = {(int(r["n"]), int(r["m"])): r["success_fraction"] for r in rows}
    width = max(8, *(len(str(m)) for m in ms))
    print("  success fraction (rows n, columns m)")
    print("  " + "n\\m".rjust(6) + "".join(str(m).rjust(width) for m in ms))
    for n in ns:
        line = "".join(_fmt_cell("", frac.get((n, m), "")).rjust(width)
                       for m in ms)
        print("  " + str(n).rjust(6) + line)


def _report_block(mdir: Path) -> None:
    with open(mdir / "manifest.json") as f:
        manifest = json.load(f)
    experiment = manifest.get("experiment", "?")
    params = manifest.get("effective_config", {})
    keys = [k for k in ("shape", "ranks", "m", "noise", "d", "n", "t", "r",
                        "r_max", "R", "lam", "restarts", "trials", "channel",
                        "n_values", "m_values", "extremum")
            if k in params]
    brief = " ".join(f"{k}={params[k]}" for k in keys)
    print(f"{experiment}  [{mdir}]")
    if brief:
        print(f"  {brief}")
    status = manifest.get("status", "?")
    if status != "complete":
        print(f"  status: {status}: {manifest.get('error', '')}")
        return
    results = mdir / "results.csv"
    if not results.exists():
        print("  status: complete, but results.csv is missing")
        return
    rows = _read_results(results)
    if experiment == "phase":
        _print_phase_grid(rows)
    else:
        _print_table(manifest.get("results_header", rows and list(rows[0])),
                     rows)
    print(f"  => {_headline(experiment, rows)}")


def cmd_report(args) -> int:
    base = Path(args.dir)
    if (base / "manifest.json").is_file():
        dirs = [base]
    else:
        dirs = sorted(p.parent for p in base.glob("*/manifest.json"))
    if not dirs:
        print(f"nttkit: no manifest found in {base}", file=sys.stderr)
        return 1
    for i, mdir in enumerate(dirs):
        if i:
            print()
        _report_block(mdir)
    return 0


# ---------------------------------------------------------------------------
# entry point


def _setup_logging():
    name = os.environ.get("NTTKIT_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO,
              "debug": logging.DEBUG}
    if name not in levels:
        print(f"nttkit: ignoring invalid NTTKIT_LOG={name!r}",
              file=sys.stderr)
        name = "error"
    logging.basicConfig(level=levels[name],
                        format="nttkit: %(levelname)s: %(message)s",
                        stream=sys.stderr)


def main(argv=None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="nttkit", description="Run and summarize nttkit experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="parallel workers across independent runs")
    p_run.add_argument("--out", default=None,
                       help="output directory (overrides config 'out')")
    p_rep = sub.add_parser("report", help="summarize a results directory")
    p_rep.add_argument("dir", help="directory holding manifest.json "
                                   "(or subdirectories with manifests)")
    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_report(args)


if __name__ == "__main__":
    sys.exit(main())
