"""Riemannian conjugate gradient on the unit-norm fixed-rank TT manifold.

The search direction mixes the current Riemannian gradient with the
transported previous direction using the Polak-Ribiere+ rule (transport is
tangent projection at the new point; beta is clamped at zero and the
direction falls back to steepest descent whenever it stops being a descent
direction). Steps are chosen by Armijo backtracking; objectives that know
their exact one-dimensional model can supply the initial trial step,
otherwise twice the previously accepted step is tried first.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .manifold import (
    NTTPoint,
    RankCollapseError,
    fd_gradient,
    pad_rank,
    retract,
    tangent_combine,
    tangent_inner,
    tangent_scale,
    vector_transport,
)
from .tensor_train import max_ranks, uniform_ranks


class Objective:
    """A cost function on the manifold, with optional analytic extras.

    Args:
        cost: point -> float.
        grad: point -> NTTTangent (Riemannian gradient). None means the
            optimizer falls back to finite differences of ``cost``.
        exact_step: (point, direction) -> float or None; the exact minimizer
            of the one-dimensional model of the cost along the direction,
            used as the initial line-search trial when available.
        name: label used in traces.
    """

    def __init__(self, cost, grad=None, exact_step=None, name=""):
        self.cost = cost
        self.grad = grad
        self.exact_step = exact_step
        self.name = name


@dataclass
class RCGConfig:
    max_iters: int = 2000
    grad_tol: float = 1e-10        # on gradnorm / max(1, |cost|)
    cost_tol: float = 1e-14        # relative cost change over cost_window iters
    cost_window: int = 5
    beta_rule: str = "pr+"         # 'pr+', 'fr' or 'none' (steepest descent)
    armijo_c1: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 25
    init_step: float = 1.0
    fd_step: float | None = None   # finite-difference step when grad is None
    metrics: object = None         # optional point -> dict, merged per row


@dataclass
class RunTrace:
    """Per-iteration records of one optimizer run."""

    rows: list = field(default_factory=list)
    reason: str = ""
    name: str = ""

    FIELDS = ("iter", "cost", "gradnorm", "step", "beta", "time_ms")

    @property
    def costs(self):
        return [r["cost"] for r in self.rows]

    def final_cost(self) -> float:
        return self.rows[-1]["cost"]

    def to_csv(self, path, include_time: bool = True) -> None:
        fields = [f for f in self.FIELDS if include_time or f != "time_ms"]
        extras = sorted(set().union(*(set(r) for r in self.rows)) - set(self.FIELDS)) \
            if self.rows else []
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(fields + extras)
            for r in self.rows:
                w.writerow([_fmt(r.get(k)) for k in fields + extras])

    def to_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump({"name": self.name, "reason": self.reason,
                       "rows": self.rows}, f)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return x


def _evaluate(obj: Objective, x: NTTPoint, cfg: RCGConfig):
    if obj.grad is not None:
        return float(obj.cost(x)), obj.grad(x)
    g, f0 = fd_gradient(obj.cost, x, t=cfg.fd_step)
    return f0, g


def line_search(obj, x, v, f, slope, s0, cfg):
    """Armijo backtracking; returns (step, point, cost) or None.

    A failed trial shrinks by quadratic interpolation through f(0), f'(0)
    and the rejected value, safeguarded into [0.1 s, backtrack * s], which
    avoids stagnating near the zero-decrease point of quadratic costs.
    """
    s = s0
    for _ in range(cfg.max_backtracks + 1):
        try:
            xc = retract(x, v, s)
            fc = float(obj.cost(xc))
        except RankCollapseError:
            fc = np.inf
        if np.isfinite(fc) and fc <= f + cfg.armijo_c1 * s * slope:
            return s, xc, fc
        s_next = cfg.backtrack * s
        if np.isfinite(fc):
            denom = 2.0 * (fc - f - slope * s)
            if denom > 0:
                s_next = min(s_next, max(0.1 * s, -slope * s * s / denom))
        s = s_next
    return None


def rcg_minimize(obj: Objective, x0: NTTPoint,
                 cfg: RCGConfig | None = None):
    """Minimize an objective from a starting point; returns (point, trace)."""
    cfg = cfg or RCGConfig()
    if cfg.beta_rule not in ("pr+", "fr", "none"):
        raise ValueError(f"unknown beta rule {cfg.beta_rule!r}")
    trace = RunTrace(name=obj.name)
    x = x0
    v_prev = None
    g_prev = None
    gnorm2_prev = None
    prev_step = cfg.init_step
    t0 = time.perf_counter()

    for it in range(cfg.max_iters + 1):
        f, g = _evaluate(obj, x, cfg)
        gnorm = g.norm()
        row = {"iter": it, "cost": f, "gradnorm": gnorm, "step": 0.0,
               "beta": 0.0, "time_ms": (time.perf_counter() - t0) * 1e3}
        if cfg.metrics is not None:
            row.update(cfg.metrics(x))
        trace.rows.append(row)

        if gnorm <= cfg.grad_tol * max(1.0, abs(f)):
            trace.reason = "grad_tol"
            break
        costs = trace.costs
        if (len(costs) > cfg.cost_window
                and abs(costs[-1 - cfg.cost_window] - f) <= cfg.cost_tol * max(1.0, abs(f))):
            trace.reason = "cost_tol"
            break
        if it == cfg.max_iters:
            trace.reason = "max_iters"
            break

        beta = 0.0
        v = tangent_scale(g, -1.0)
        if v_prev is not None and cfg.beta_rule != "none":
            if cfg.beta_rule == "pr+":
                tg = vector_transport(x, g_prev)
                num = tangent_inner(g, g).real - tangent_inner(g, tg).real
                beta = max(0.0, num / gnorm2_prev)
            else:
                beta = tangent_inner(g, g).real / gnorm2_prev
            if beta > 0.0:
                tv = vector_transport(x, v_prev)
                cand = tangent_combine([(-1.0, g), (beta, tv)])
                dd = tangent_inner(g, cand).real
                if dd < -1e-14 * gnorm * cand.norm():
                    v = cand
                else:
                    beta = 0.0

        slope = tangent_inner(g, v).real
        s0 = None
        if obj.exact_step is not None:
            s0 = obj.exact_step(x, v)
        if s0 is None or not np.isfinite(s0) or s0 <= 0:
            s0 = 2.0 * prev_step
        hit = line_search(obj, x, v, f, slope, s0, cfg)
        if hit is None and beta > 0.0:
            # conjugate direction failed; restart from steepest descent
            v = tangent_scale(g, -1.0)
            beta = 0.0
            slope = -gnorm * gnorm
            hit = line_search(obj, x, v, f, slope, s0, cfg)
        if hit is None:
            trace.reason = "line_search_failed"
            break

        s, xc, _ = hit
        row["step"] = s
        row["beta"] = beta
        prev_step = s
        v_prev = v
        g_prev = g
        gnorm2_prev = gnorm * gnorm
        x = xc

    return x, trace


def continuation_schedule(shape, r_max: int) -> list:
    """Rank vectors for warm-started continuation: uniform r clamped to the
    feasibility profile, r = 1..r_max, consecutive duplicates dropped."""
    caps = max_ranks(shape)
    out = []
    for r in range(1, r_max + 1):
        ranks = [min(c, u) for c, u in zip(caps, uniform_ranks(shape, r))]
        if not out or ranks != out[-1]:
            out.append(ranks)
    return out


def rank_continuation(obj_factory, x0: NTTPoint, schedule,
                      cfg: RCGConfig | None = None, stage_iters: int = 50):
    """Optimize through a sequence of growing ranks with warm starts.

    Each stage runs ``stage_iters`` iterations (the final stage runs with the
    full config limits); between stages the point is zero-pad embedded into
    the larger set, which preserves the tensor and hence the cost. Returns
    (point, list of (ranks, trace)).
    """
    cfg = cfg or RCGConfig()
    x = x0
    stages = []
    for num, ranks in enumerate(schedule):
        if tuple(ranks) != tuple(x.ranks):
            x = pad_rank(x, ranks)
        last = num == len(schedule) - 1
        stage_cfg = RCGConfig(**{**cfg.__dict__,
                                 "max_iters": cfg.max_iters if last else stage_iters})
        x, trace = rcg_minimize(obj_factory(ranks), x, stage_cfg)
        stages.append((list(ranks), trace))
    return x, stages
