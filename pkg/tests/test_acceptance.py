"""Acceptance suite: one test per shipped guarantee, each printing a
single pass/fail line (run with -s to see them on success).

Every criterion pins the tolerance it promises; run times are asserted
where the guarantee includes one. Oracles are dense/naive recomputations,
closed forms, or independently derived references.
"""

import json
import time

import numpy as np

from conftest import tt_from_dense_by_svd
from nttkit.cli import main as cli_main
from nttkit.completion import (completion_objective, make_instance,
                               phase_experiment, recovery_run)
from nttkit.eigen import (KroneckerSumOperator, eigen_objective, eigen_solve,
                          eigen_solve_continuation, ising_operator,
                          laplace_operator, laplace_reference,
                          subspace_distance)
from nttkit.manifold import (fd_gradient, membership_residuals, project_tangent,
                             random_point, retract, tangent_basis,
                             tangent_to_tt, zero_tangent)
from nttkit.optim import RCGConfig, rcg_minimize
from nttkit.quantum import (antisymmetric_channel, gadc, hadamard_target,
                            min_output_entropy, sre2_dense, sre2_mps,
                            stab_rank_best_of)
from nttkit.tensor_train import (kron_apply, max_ranks, random_tt, tt_full,
                                 tt_inner, tt_norm, tt_round, tt_svd,
                                 uniform_ranks)


def _criterion(num, label, ok, detail):
    print(f"[acceptance {num}] {label}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"acceptance criterion {num} ({label}): {detail}"


def _clamped(shape, r):
    return [min(c, u) for c, u in zip(max_ranks(shape), uniform_ranks(shape, r))]


def _random_shape(rng):
    d = int(rng.integers(2, 5))
    return tuple(int(rng.integers(2, 6)) for _ in range(d))


def _dense_tangent(v):
    return tt_full(tangent_to_tt(v))


# ---------------------------------------------------------------------------


def test_criterion_1_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = {k: 0.0 for k in ("tt_svd", "tt_round", "tt_inner", "tt_norm",
                              "kron_apply", "apply_operator",
                              "project_tangent")}

    def crandn(shape):
        return (rng.standard_normal(shape)
                + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    for _ in range(50):
        shape = _random_shape(rng)
        d = len(shape)
        ranks = _clamped(shape, int(rng.integers(1, 5)))

        # exact-rank reconstruction plus agreement with the naive SVD chain
        big = random_tt(shape, max_ranks(shape), rng)
        dense = tt_full(big)
        scale = np.linalg.norm(dense)
        lib = tt_full(tt_svd(dense, ranks))
        naive = tt_full(tt_from_dense_by_svd(dense, ranks))
        worst["tt_svd"] = max(worst["tt_svd"],
                              np.linalg.norm(lib - naive) / scale)
        rounded = tt_full(tt_round(big, ranks))
        worst["tt_round"] = max(worst["tt_round"],
                                np.linalg.norm(rounded - naive) / scale)

        x = random_tt(shape, ranks, rng)
        y = random_tt(shape, ranks, rng)
        dx, dy = tt_full(x), tt_full(y)
        ref = np.vdot(dx, dy)
        worst["tt_inner"] = max(worst["tt_inner"],
                                abs(tt_inner(x, y) - ref)
                                / max(1.0, abs(ref)))
        worst["tt_norm"] = max(worst["tt_norm"],
                               abs(tt_norm(x) - np.linalg.norm(dx))
                               / np.linalg.norm(dx))

        mats = [crandn((n, n)) if rng.random() > 0.2 else None for n in shape]
        full = np.eye(1)
        for n, m in zip(shape, mats):
            full = np.kron(m if m is not None else np.eye(n), full)
        got = tt_full(kron_apply(x, mats)).ravel(order="F")
        want = full @ dx.ravel(order="F")
        worst["kron_apply"] = max(worst["kron_apply"],
                                  np.linalg.norm(got - want)
                                  / np.linalg.norm(want))

        terms = []
        for _ in range(2):
            term = []
            for n in shape:
                if rng.random() > 0.3:
                    a = crandn((n, n))
                    term.append(a + a.conj().T)
                else:
                    term.append(None)
            terms.append(term)
        H = KroneckerSumOperator(terms, shape=shape)
        from nttkit.eigen import apply_operator
        got = tt_full(apply_operator(H, x)).ravel(order="F")
        want = H.dense() @ dx.ravel(order="F")
        worst["apply_operator"] = max(worst["apply_operator"],
                                      np.linalg.norm(got - want)
                                      / max(1.0, np.linalg.norm(want)))

        pshape = tuple(int(s) for s in shape[:3]) or (3, 3, 3)
        pranks = _clamped(pshape, min(3, max(ranks)))
        point = random_point(pshape, pranks, rng)
        z = crandn(pshape)
        proj = _dense_tangent(project_tangent(point, z))
        oracle = np.zeros(pshape, dtype=np.complex128)
        for b in tangent_basis(point):
            bd = _dense_tangent(b)
            oracle += np.vdot(bd, z).real * bd
        worst["project_tangent"] = max(worst["project_tangent"],
                                       np.linalg.norm(proj - oracle)
                                       / np.linalg.norm(z))

    elapsed = time.perf_counter() - t0
    bad = {k: v for k, v in worst.items() if v > 1e-9}
    ok = not bad and elapsed < 60
    detail = f"50 instances/op, max relerr {max(worst.values()):.2e}, " \
             f"{elapsed:.1f}s"
    _criterion(1, "oracle equivalence", ok, detail)


def test_criterion_2_geometry():
    rng = np.random.default_rng(202)
    shape = (4, 5, 3, 4)
    ranks = _clamped(shape, 3)
    x = random_point(shape, ranks, rng)

    def crandn(s):
        return (rng.standard_normal(s) + 1j * rng.standard_normal(s)) \
            / np.sqrt(2)

    # projection: idempotent, self-adjoint, annihilates the radial direction
    z, y = crandn(shape), crandn(shape)
    pz, py = project_tangent(x, z), project_tangent(x, y)
    ppz = project_tangent(x, tangent_to_tt(pz))
    idem = np.linalg.norm(_dense_tangent(ppz) - _dense_tangent(pz))
    adj = abs(np.vdot(_dense_tangent(py), z).real
              - np.vdot(y, _dense_tangent(pz)).real)
    radial = np.linalg.norm(_dense_tangent(project_tangent(x, x.to_tt())))

    # retraction: fixed point at 0 and second-order contact
    assert retract(x, zero_tangent(x), 0.0) is x
    v = pz
    xd = tt_full(x.to_tt())
    vd = _dense_tangent(v)
    ts = np.logspace(-1, -3.5, 6)
    errs = [np.linalg.norm(tt_full(retract(x, v, t).to_tt()) - (xd + t * vd))
            for t in ts]
    slope = np.polyfit(np.log(ts), np.log(errs), 1)[0]

    # every iterate of two optimizer runs stays on the constraint set
    worst_norm, worst_sigma = 0.0, 1.0

    def metrics(p):
        nonlocal worst_norm, worst_sigma
        res = membership_residuals(p)
        worst_norm = max(worst_norm, res["norm_err"])
        worst_sigma = min(worst_sigma, res["sigma_min"])
        return {}

    truth, obs = make_instance((8, 8, 8), (1, 2, 2, 1), 600,
                               np.random.default_rng(7))
    obj = completion_objective(obs)
    rcg_minimize(obj, random_point((8, 8, 8), (1, 2, 2, 1),
                                   np.random.default_rng(8), real=True),
                 RCGConfig(max_iters=40, metrics=metrics))
    H = laplace_operator(3, 5)
    rcg_minimize(eigen_objective(H, "min"),
                 random_point(H.shape, _clamped(H.shape, 2),
                              np.random.default_rng(9), real=True),
                 RCGConfig(max_iters=40, metrics=metrics))

    # finite differences against the analytic gradients at t = 1e-5
    xc = random_point((8, 8, 8), (1, 2, 2, 1), np.random.default_rng(10),
                      real=True)
    fd_c = fd_gradient(obj.cost, xc, t=1e-5)[0]
    diff_c = np.max(np.abs(_dense_tangent(fd_c)
                           - _dense_tangent(obj.grad(xc))))
    eobj = eigen_objective(H, "min")
    xe = random_point(H.shape, _clamped(H.shape, 2),
                      np.random.default_rng(11), real=True)
    fd_e = fd_gradient(eobj.cost, xe, t=1e-5)[0]
    diff_e = np.max(np.abs(_dense_tangent(fd_e)
                           - _dense_tangent(eobj.grad(xe))))

    ok = (idem < 1e-10 and adj < 1e-10 and radial < 1e-10
          and slope >= 1.9 and worst_norm <= 1e-10 and worst_sigma > 1e-12
          and diff_c <= 1e-4 and diff_e <= 1e-4)
    detail = f"idem {idem:.1e}, adj {adj:.1e}, radial {radial:.1e}, " \
             f"slope {slope:.2f}, iterate norm_err {worst_norm:.1e}, " \
             f"fd diff {max(diff_c, diff_e):.1e}"
    _criterion(2, "geometry suite", ok, detail)


def test_criterion_3_laplace_eigenproblem():
    t0 = time.perf_counter()
    H = laplace_operator(8, 10)
    val, x, trace = eigen_solve(H, 1, "max", RCGConfig(max_iters=500),
                                np.random.default_rng(0))
    ref, vstar = laplace_reference(8, 10, 10)
    relerr = abs(val - ref) / abs(ref)
    dist = subspace_distance(x, vstar)
    elapsed = time.perf_counter() - t0
    ok = relerr <= 1e-8 and dist <= 1e-4 and elapsed <= 60
    detail = f"relerr {relerr:.2e} (<=1e-8), dist {dist:.2e} (<=1e-4), " \
             f"{elapsed:.1f}s (<=60)"
    _criterion(3, "Laplace d=8 n=10 r=1", ok, detail)


def test_criterion_4_ising_eigenproblem():
    t0 = time.perf_counter()
    H = ising_operator(8, 1.0)
    ref = np.linalg.eigvalsh(H.dense())[0]
    val, x, stages = eigen_solve_continuation(H, 8, "min",
                                              rng=np.random.default_rng(0))
    relerr = abs(val - ref) / abs(ref)
    by_rank = {}
    for ranks, trace in stages:
        r = max(list(ranks)[1:-1] or [1])
        by_rank[r] = abs(trace.final_cost() - ref) / abs(ref)
    trend = [by_rank[r] for r in (1, 4, 8)]
    monotone = trend[0] >= trend[1] >= trend[2]
    elapsed = time.perf_counter() - t0
    ok = relerr <= 1e-6 and monotone and elapsed <= 120
    detail = f"relerr {relerr:.2e} (<=1e-6), trend r=1,4,8: " \
             f"{trend[0]:.1e} >= {trend[1]:.1e} >= {trend[2]:.1e}, " \
             f"{elapsed:.1f}s (<=120)"
    _criterion(4, "Ising d=8 continuation to r=8", ok, detail)


def test_criterion_5_completion():
    shape, ranks = (20, 20, 20), (1, 3, 3, 1)
    m = 10 * 3 * 20 * 3 ** 2
    succ = 0
    for seed in range(5):
        out = recovery_run(shape, ranks, m, np.random.default_rng(seed))
        succ += int(out["report"]["success"]
                    and out["report"]["iterations"] <= 250)
    plateaus = []
    for lam in (1e-4, 1e-8):
        out = recovery_run(shape, ranks, m, np.random.default_rng(42),
                           noise=lam)
        te = out["report"]["test_error"]
        plateaus.append(lam / 10 <= te <= 10 * lam)
    grid = phase_experiment([10, 15], [500, 4000], trials=3, base_seed=100)
    frac = {(r["n"], r["m"]): r["success_fraction"] for r in grid}
    monotone = all(frac[(n, 500)] <= frac[(n, 4000)] for n in (10, 15))
    saturated = frac[(10, 4000)] == 1.0 and frac[(15, 4000)] == 1.0
    ok = succ >= 4 and all(plateaus) and monotone and saturated
    detail = f"{succ}/5 seeds, plateaus {plateaus}, grid monotone in m " \
             f"{monotone}, m=4000 fractions 1.0 {saturated}"
    _criterion(5, "completion recovery + noise + phase grid", ok, detail)


def test_criterion_6_sre_values():
    h = np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)])
    v_exact = abs(sre2_dense(h) - (2 - np.log2(3)))
    rng = np.random.default_rng(606)
    v_agree = 0.0
    for _ in range(100):
        x = random_point((2, 2, 2), (1, 2, 2, 1), rng)
        dense = tt_full(x.to_tt()).ravel(order="F")
        v_agree = max(v_agree, abs(sre2_mps(x) - sre2_dense(dense)))
    v_add = 0.0
    for n in range(1, 6):
        v_add = max(v_add, abs(sre2_mps(hadamard_target(n))
                               - n * (2 - np.log2(3))))
    ok = v_exact < 1e-12 and v_agree < 1e-9 and v_add < 1e-9
    detail = f"|H> err {v_exact:.1e} (<1e-12), mps vs dense {v_agree:.1e} " \
             f"(<1e-9, 100 states), additivity n<=5 {v_add:.1e} (<1e-9)"
    _criterion(6, "stabilizer Renyi-2 entropy", ok, detail)


def test_criterion_7_stabilizer_rank():
    t0 = time.perf_counter()
    infid, sres, dec = stab_rank_best_of(hadamard_target(2), 2, 1.0, 2,
                                         restarts=5, base_seed=0)
    elapsed = time.perf_counter() - t0
    ok = infid <= 1e-3 and max(sres) <= 1e-2 and elapsed <= 600
    detail = f"infidelity {infid:.2e} (<=1e-3), max SRE {max(sres):.2e} " \
             f"(<=1e-2), {elapsed:.0f}s (<=600)"
    _criterion(7, "stabilizer rank |H>^2 R=2", ok, detail)


def test_criterion_8_channel_entropy():
    ch = antisymmetric_channel()
    rng = np.random.default_rng(808)
    sweep_dev = 0.0
    for _ in range(200):
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        v /= np.linalg.norm(v)
        rho = ch.apply(np.outer(v, v.conj()))
        sweep_dev = max(sweep_dev,
                        abs(-np.log2(np.trace(rho @ rho).real) - 1.0))
    rcg1, _, _ = min_output_entropy(ch, 1, 1, restarts=2)
    rcg_dev = abs(rcg1 - 1.0)
    add_dev = 0.0
    for n in (2, 3):
        vn, _, _ = min_output_entropy(ch, n, 2, restarts=5)
        add_dev = max(add_dev, abs(vn / n - 1.0))
    gadc0, _, _ = min_output_entropy(gadc(0.0, 0.0), 1, 1, restarts=1)

    min_output_entropy(ch, 2, 2, cfg=RCGConfig(max_iters=3), restarts=1)
    per_iter = []
    ns = range(2, 7)
    for n in ns:
        t0 = time.perf_counter()
        _, _, traces = min_output_entropy(ch, n, 2,
                                          cfg=RCGConfig(max_iters=10),
                                          restarts=1)
        iters = max(1, len(traces[0].rows) - 1)
        per_iter.append((time.perf_counter() - t0) / iters)
    t = np.array(per_iter)
    fit = np.polyval(np.polyfit(np.array(ns, float), t, 3),
                     np.array(ns, float))
    r2 = 1 - np.sum((t - fit) ** 2) / np.sum((t - t.mean()) ** 2)

    ok = (sweep_dev <= 1e-6 and rcg_dev <= 1e-3 and add_dev <= 1e-3
          and gadc0 == 0.0 and r2 >= 0.95)
    detail = f"dense sweep dev {sweep_dev:.1e} (<=1e-6), rcg dev " \
             f"{rcg_dev:.1e} (<=1e-3), additivity dev {add_dev:.1e} " \
             f"(<=1e-3), gadc(0) {gadc0!r} (==0), timing R^2 {r2:.3f} " \
             f"(>=0.95)"
    _criterion(8, "channel output entropy", ok, detail)


def test_criterion_9_determinism(tmp_path):
    configs = [
        {"experiment": "eigen-laplace", "d": 4, "n": 6, "r": 1, "seed": 0},
        {"experiment": "stabrank", "target": {"basis": [0, 1]}, "R": 1,
         "r": 1, "restarts": 2, "seed": 0},
    ]
    identical = True
    for i, raw in enumerate(configs):
        cfg = tmp_path / f"cfg{i}.json"
        cfg.write_text(json.dumps(raw))
        runs = []
        for tag in ("a", "b"):
            out = tmp_path / f"run{i}{tag}"
            assert cli_main(["run", str(cfg), "--out", str(out)]) == 0
            csvs = sorted(p.relative_to(out) for p in out.rglob("*.csv"))
            runs.append({str(p): (out / p).read_bytes() for p in csvs})
        identical = identical and runs[0] == runs[1] and runs[0]
    ok = bool(identical)
    _criterion(9, "byte-identical reruns", ok,
               f"{len(configs)} configs, all CSV artifacts compared")


if __name__ == "__main__":
    import pytest
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
