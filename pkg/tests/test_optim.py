"""Tests for the Riemannian conjugate-gradient driver: termination, line
search, beta rules, trace recording, determinism and rank continuation."""

import csv
import json
import math

import numpy as np
import pytest

from nttkit.manifold import (
    membership_residuals,
    project_tangent,
    random_point,
    tangent_norm,
    tangent_scale,
    tangent_to_tt,
)
from nttkit.optim import (
    Objective,
    RCGConfig,
    RunTrace,
    continuation_schedule,
    line_search,
    rank_continuation,
    rcg_minimize,
)
from nttkit.tensor_train import tt_full

from conftest import crandn, dense_from_cores


def vec(a):
    return np.ravel(a, order="F")


def point_dense(p):
    return dense_from_cores(p.left)


def distance_objective(a):
    """f(X) = 0.5 ||X - A||^2 with analytic gradient and exact step model."""

    def cost(x):
        return 0.5 * float(np.linalg.norm(point_dense(x) - a) ** 2)

    def grad(x):
        return project_tangent(x, point_dense(x) - a)

    def exact_step(x, v):
        e = vec(point_dense(x) - a)
        h = vec(tt_full(tangent_to_tt(v)))
        g = float(np.vdot(h, h).real)
        if g == 0.0:
            return None
        return -float(np.vdot(h, e).real) / g

    return Objective(cost, grad=grad, exact_step=exact_step, name="distance")


def kron_sum_dense(terms):
    """Dense Kronecker-sum operator, mode 1 fastest."""
    ns = [t.shape[0] for t in terms]
    total = int(np.prod(ns))
    h = np.zeros((total, total), dtype=complex)
    for k, t in enumerate(terms):
        op = np.eye(1)
        for j, n in enumerate(ns):
            op = np.kron(t if j == k else np.eye(n), op)
        h += op
    return h


def rayleigh_objective(h, shape):
    def cost(x):
        xv = vec(point_dense(x))
        return float(np.vdot(xv, h @ xv).real)

    def grad(x):
        xv = vec(point_dense(x))
        z = 2.0 * (h @ xv)
        return project_tangent(x, z.reshape(shape, order="F"))

    def exact_step(x, v):
        xv = vec(point_dense(x))
        vv = vec(tt_full(tangent_to_tt(v)))
        hx = h @ xv
        a = float(np.vdot(xv, hx).real)
        b = float(np.vdot(vv, hx).real)
        c = float(np.vdot(vv, h @ vv).real)
        g = float(np.vdot(vv, vv).real)
        coeffs = [b * g, -(c - a * g), -b]
        if abs(coeffs[0]) < 1e-300:
            return None
        roots = np.roots(coeffs)
        best = None
        for r in roots:
            if abs(r.imag) < 1e-12 and r.real > 0:
                if best is None or r.real < best:
                    best = float(r.real)
        return best

    return Objective(cost, grad=grad, exact_step=exact_step, name="rayleigh")


SHAPE = (3, 4, 3)
RANKS = (1, 2, 2, 1)


# ---------------------------------------------------------------------------
# termination and basic behavior


def test_terminates_at_minimizer(rng):
    p = random_point(SHAPE, RANKS, rng)
    obj = distance_objective(point_dense(p))
    x, trace = rcg_minimize(obj, p, RCGConfig())
    assert trace.reason == "grad_tol"
    assert len(trace.rows) == 1
    assert trace.rows[0]["cost"] < 1e-20


def test_converges_to_known_minimizer(rng):
    # the cost is not phase invariant, so this workflow stays real valued
    target = random_point(SHAPE, RANKS, rng, real=True)
    a = point_dense(target)
    x0 = random_point(SHAPE, RANKS, np.random.default_rng(7), real=True)
    x, trace = rcg_minimize(distance_objective(a), x0,
                            RCGConfig(max_iters=400))
    assert trace.final_cost() < 1e-12
    assert np.linalg.norm(point_dense(x) - a) < 1e-5


def test_cost_monotone_and_iterates_feasible(rng):
    target = random_point(SHAPE, RANKS, rng)
    x0 = random_point(SHAPE, RANKS, np.random.default_rng(11))

    def metrics(p):
        res = membership_residuals(p)
        return {"norm_err": res["norm_err"], "sigma_min": res["sigma_min"]}

    cfg = RCGConfig(max_iters=60, metrics=metrics)
    _, trace = rcg_minimize(distance_objective(point_dense(target)), x0, cfg)
    costs = trace.costs
    assert all(c1 <= c0 + 1e-14 for c0, c1 in zip(costs, costs[1:]))
    for row in trace.rows:
        assert row["norm_err"] < 1e-10
        assert row["sigma_min"] > 1e-12


def test_exact_step_accepted_for_quadratic(rng):
    target = random_point(SHAPE, RANKS, rng)
    x0 = random_point(SHAPE, RANKS, np.random.default_rng(3))
    obj = distance_objective(point_dense(target))
    _, trace = rcg_minimize(obj, x0, RCGConfig(max_iters=30))
    # steepest-descent step of a unit-Hessian quadratic is exactly 1
    assert trace.rows[0]["beta"] == 0.0
    assert trace.rows[0]["step"] == pytest.approx(1.0, abs=1e-9)


def test_rayleigh_quotient_reaches_dense_ground_state(rng):
    terms = []
    r = np.random.default_rng(17)
    for _ in range(3):
        m = r.standard_normal((2, 2))
        terms.append(m + m.T)
    h = kron_sum_dense(terms)
    lam_min = float(np.linalg.eigh(h)[0][0])
    shape = (2, 2, 2)
    obj = rayleigh_objective(h, shape)
    best = np.inf
    for seed in range(3):
        x0 = random_point(shape, (1, 1, 1, 1), np.random.default_rng(seed))
        _, trace = rcg_minimize(obj, x0, RCGConfig(max_iters=500))
        best = min(best, trace.final_cost())
    assert abs(best - lam_min) < 1e-8


# ---------------------------------------------------------------------------
# line search


def test_line_search_accepts_model_step_and_scaling(rng):
    target = random_point(SHAPE, RANKS, rng)
    a = point_dense(target)
    obj = distance_objective(a)
    x = random_point(SHAPE, RANKS, np.random.default_rng(23))
    g = obj.grad(x)
    v = tangent_scale(g, -0.05 / tangent_norm(g))
    f = obj.cost(x)
    slope = -0.05 * tangent_norm(g)
    cfg = RCGConfig()
    s_model = obj.exact_step(x, v)
    hit = line_search(obj, x, v, f, slope, s_model, cfg)
    assert hit is not None
    s1, _, f1 = hit
    assert s1 == s_model
    assert f1 < f
    v10 = tangent_scale(v, 10.0)
    s_model10 = obj.exact_step(x, v10)
    assert s_model10 == pytest.approx(s_model / 10.0, rel=1e-12)
    hit10 = line_search(obj, x, v10, f, 10 * slope, s_model10, cfg)
    assert hit10 is not None
    assert hit10[0] == s_model10


def test_line_search_failure_reported(rng):
    c = crandn(SHAPE, rng)

    def cost(x):
        return float(np.vdot(vec(c), vec(point_dense(x))).real)

    def ascent(x):
        return tangent_scale(project_tangent(x, c), -1.0)

    x0 = random_point(SHAPE, RANKS, np.random.default_rng(2))
    obj = Objective(cost, grad=ascent)
    _, trace = rcg_minimize(obj, x0, RCGConfig(max_iters=10))
    assert trace.reason == "line_search_failed"


# ---------------------------------------------------------------------------
# beta rules


def test_steepest_descent_records_zero_beta(rng):
    target = random_point(SHAPE, RANKS, rng)
    x0 = random_point(SHAPE, RANKS, np.random.default_rng(5))
    cfg = RCGConfig(max_iters=40, beta_rule="none")
    _, trace = rcg_minimize(distance_objective(point_dense(target)), x0, cfg)
    assert all(row["beta"] == 0.0 for row in trace.rows)


def test_beta_rules_run_and_converge(rng):
    target = random_point(SHAPE, RANKS, rng, real=True)
    a = point_dense(target)
    for rule in ("pr+", "fr"):
        x0 = random_point(SHAPE, RANKS, np.random.default_rng(9), real=True)
        cfg = RCGConfig(max_iters=300, beta_rule=rule)
        _, trace = rcg_minimize(distance_objective(a), x0, cfg)
        assert trace.final_cost() < 1e-10


def test_unknown_beta_rule_rejected(rng):
    p = random_point(SHAPE, RANKS, rng)
    with pytest.raises(ValueError):
        rcg_minimize(distance_objective(point_dense(p)), p,
                     RCGConfig(beta_rule="dy"))


def test_pr_plus_uses_conjugate_directions(rng):
    target = random_point(SHAPE, RANKS, rng)
    x0 = random_point(SHAPE, RANKS, np.random.default_rng(29))
    cfg = RCGConfig(max_iters=50)
    _, trace = rcg_minimize(distance_objective(point_dense(target)), x0, cfg)
    assert any(row["beta"] > 0 for row in trace.rows)


# ---------------------------------------------------------------------------
# finite-difference fallback


def test_fd_backed_objective(rng):
    shape = (2, 3)
    ranks = (1, 2, 1)
    target = random_point(shape, ranks, rng, real=True)
    a = point_dense(target)
    x0 = random_point(shape, ranks, np.random.default_rng(31), real=True)
    obj = Objective(lambda x: 0.5 * float(np.linalg.norm(point_dense(x) - a) ** 2))
    _, trace = rcg_minimize(obj, x0, RCGConfig(max_iters=150, grad_tol=1e-6))
    assert trace.final_cost() < 1e-6


# ---------------------------------------------------------------------------
# determinism and traces


def test_identical_runs_identical_traces(rng):
    target = random_point(SHAPE, RANKS, rng)
    a = point_dense(target)
    rows = []
    for _ in range(2):
        x0 = random_point(SHAPE, RANKS, np.random.default_rng(13))
        _, trace = rcg_minimize(distance_objective(a), x0,
                                RCGConfig(max_iters=40))
        rows.append([(r["iter"], r["cost"], r["gradnorm"], r["step"], r["beta"])
                     for r in trace.rows])
    assert rows[0] == rows[1]


def test_trace_csv_and_json(tmp_path, rng):
    target = random_point(SHAPE, RANKS, rng)
    x0 = random_point(SHAPE, RANKS, np.random.default_rng(19))
    _, trace = rcg_minimize(distance_objective(point_dense(target)), x0,
                            RCGConfig(max_iters=10))
    p_time = tmp_path / "trace.csv"
    p_flat = tmp_path / "trace_no_time.csv"
    trace.to_csv(p_time)
    trace.to_csv(p_flat, include_time=False)
    with open(p_time) as f:
        rows = list(csv.reader(f))
    assert rows[0] == list(RunTrace.FIELDS)
    assert len(rows) == len(trace.rows) + 1
    assert float(rows[1][1]) == trace.rows[0]["cost"]
    with open(p_flat) as f:
        rows2 = list(csv.reader(f))
    assert rows2[0] == [f for f in RunTrace.FIELDS if f != "time_ms"]
    jp = tmp_path / "trace.json"
    trace.to_json(jp)
    with open(jp) as f:
        doc = json.load(f)
    assert doc["reason"] == trace.reason
    assert len(doc["rows"]) == len(trace.rows)


# ---------------------------------------------------------------------------
# rank continuation


def test_continuation_schedule_profiles():
    sched = continuation_schedule((2,) * 6, 4)
    assert sched[0] == [1, 1, 1, 1, 1, 1, 1]
    assert sched[1] == [1, 2, 2, 2, 2, 2, 1]
    assert sched[-1] == [1, 2, 4, 4, 4, 2, 1]
    assert continuation_schedule(SHAPE, 1) == [[1, 1, 1, 1]]


def test_single_stage_equals_plain_rcg(rng):
    target = random_point(SHAPE, RANKS, rng)
    a = point_dense(target)
    x0 = random_point(SHAPE, RANKS, np.random.default_rng(41))
    cfg = RCGConfig(max_iters=60)
    x1, trace1 = rcg_minimize(distance_objective(a), x0, cfg)
    x2, stages = rank_continuation(lambda r: distance_objective(a), x0,
                                   [list(RANKS)], cfg)
    assert len(stages) == 1
    assert stages[0][1].costs == trace1.costs


def test_continuation_warm_start_preserves_cost(rng):
    target = random_point(SHAPE, (1, 3, 3, 1), rng, real=True)
    a = point_dense(target)
    x0 = random_point(SHAPE, (1, 1, 1, 1), np.random.default_rng(43), real=True)
    sched = continuation_schedule(SHAPE, 3)
    cfg = RCGConfig(max_iters=300)
    x, stages = rank_continuation(lambda r: distance_objective(a), x0, sched,
                                  cfg, stage_iters=40)
    assert [list(s[0]) for s in stages] == [list(s) for s in sched]
    for (_, t0), (_, t1) in zip(stages, stages[1:]):
        assert t1.rows[0]["cost"] <= t0.final_cost() + 1e-10
    assert stages[-1][1].final_cost() < 1e-10
    assert x.ranks == (1, 3, 3, 1)


def test_continuation_final_stage_uses_full_budget(rng):
    target = random_point(SHAPE, (1, 2, 2, 1), rng)
    x0 = random_point(SHAPE, (1, 1, 1, 1), np.random.default_rng(47))
    cfg = RCGConfig(max_iters=200)
    _, stages = rank_continuation(
        lambda r: distance_objective(point_dense(target)), x0,
        continuation_schedule(SHAPE, 2), cfg, stage_iters=5)
    assert len(stages[0][1].rows) <= 6
    assert len(stages[-1][1].rows) > 6
