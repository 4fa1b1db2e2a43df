"""Low-rank tensor completion from partially observed entries.

The observed data lives on a sparse index set, so the cost touches only
those entries and the Riemannian gradient goes through the sparse projection
branch; nothing here densifies the full tensor. Ground truths and starting
points are drawn real valued: the squared residual cost is not phase
invariant, and real-valued iterates keep the whole run inside the real
slice of the manifold where that is no restriction at all.
"""

from __future__ import annotations

import math

import numpy as np

from .manifold import (
    NTTPoint,
    SparseTensor,
    project_tangent,
    random_point,
    tangent_to_tt,
)
from .optim import Objective, RCGConfig, rcg_minimize

SUCCESS_TEST_ERROR = 1e-4
DENSE_NOISE_GUARD = 2 ** 22


class ObservationSet:
    """Observed entries at Omega plus an optional held-out test set."""

    def __init__(self, shape, idx, vals, test_idx=None, test_vals=None):
        self.shape = tuple(int(n) for n in shape)
        self.idx = np.asarray(idx, dtype=np.int64)
        self.vals = np.asarray(vals, dtype=np.complex128)
        if self.idx.ndim != 2 or self.idx.shape[1] != len(self.shape):
            raise ValueError("idx must be (m, d)")
        if self.vals.shape != (self.idx.shape[0],):
            raise ValueError("vals must match idx rows")
        for k, n in enumerate(self.shape):
            if self.idx.size and (self.idx[:, k].min() < 0
                                  or self.idx[:, k].max() >= n):
                raise ValueError(f"index out of range in mode {k}")
        self.test_idx = None if test_idx is None else np.asarray(test_idx,
                                                                 dtype=np.int64)
        self.test_vals = None if test_vals is None else np.asarray(
            test_vals, dtype=np.complex128)
        if (self.test_idx is None) != (self.test_vals is None):
            raise ValueError("test indices and values must come together")
        if self.test_idx is not None:
            lin = self._linear(self.idx)
            lin_t = self._linear(self.test_idx)
            if np.intersect1d(lin, lin_t).size:
                raise ValueError("train and test sets overlap")

    def _linear(self, idx):
        return np.ravel_multi_index(tuple(idx.T), self.shape, order="F")

    @property
    def m(self) -> int:
        return self.idx.shape[0]


def sample_omega(shape, m: int, rng: np.random.Generator) -> np.ndarray:
    """m distinct uniform multi-indices, via a seeded shuffle of the
    linearized index range."""
    total = math.prod(shape)
    if not 1 <= m <= total:
        raise ValueError(f"sample size {m} out of range for {total} entries")
    lin = rng.permutation(total)[:m]
    return np.stack(np.unravel_index(lin, shape, order="F"), axis=1).astype(np.int64)


def sample_split(shape, m: int, m_test: int, rng: np.random.Generator):
    """Disjoint observation and test index sets from one shuffle."""
    total = math.prod(shape)
    if m + m_test > total:
        raise ValueError("train and test sizes exceed the tensor")
    lin = rng.permutation(total)[:m + m_test]
    idx = np.stack(np.unravel_index(lin, shape, order="F"), axis=1).astype(np.int64)
    return idx[:m], idx[m:]


def _entry_getter(idx):
    """Memoized point -> entries-at-idx map (the optimizer asks for cost and
    gradient at the same point back to back)."""
    cache = {}
    order = []

    def get(point: NTTPoint) -> np.ndarray:
        key = id(point)
        if key not in cache:
            cache[key] = (point, point.entries(idx))
            order.append(key)
            if len(order) > 4:
                cache.pop(order.pop(0), None)
        return cache[key][1]

    return get


def completion_objective(obs: ObservationSet) -> Objective:
    """f(X) = 0.5 * sum over Omega of |X(i) - a(i)|^2."""
    entries_at = _entry_getter(obs.idx)

    def cost(x):
        resid = entries_at(x) - obs.vals
        return 0.5 * float(np.vdot(resid, resid).real)

    def grad(x):
        resid = entries_at(x) - obs.vals
        return project_tangent(x, SparseTensor(obs.shape, obs.idx, resid))

    def exact_step(x, v):
        resid = entries_at(x) - obs.vals
        vw = tangent_to_tt(v).entries(obs.idx)
        den = float(np.vdot(vw, vw).real)
        if den <= 0.0:
            return None
        return -float(np.vdot(vw, resid).real) / den

    return Objective(cost, grad=grad, exact_step=exact_step, name="completion")


def test_error(point: NTTPoint, obs: ObservationSet) -> float:
    """Relative residual on the held-out set (falls back to Omega when the
    tensor is fully observed and no entries are left over)."""
    if obs.test_idx is not None and obs.test_idx.shape[0] > 0:
        idx, vals = obs.test_idx, obs.test_vals
    else:
        idx, vals = obs.idx, obs.vals
    resid = point.entries(idx) - vals
    return float(np.linalg.norm(resid) / max(np.linalg.norm(vals), 1e-300))


def train_error(point: NTTPoint, obs: ObservationSet) -> float:
    resid = point.entries(obs.idx) - obs.vals
    return float(np.linalg.norm(resid) / max(np.linalg.norm(obs.vals), 1e-300))


def _noise_at(shape, idx, lam: float, rng: np.random.Generator) -> np.ndarray:
    """lam * E/||E||_F read off at the given indices, E i.i.d. standard normal.

    Desk-sized tensors materialize E and use its exact norm; larger ones draw
    only the needed entries and use the concentration value sqrt(total).
    """
    total = math.prod(shape)
    if total <= DENSE_NOISE_GUARD:
        e = rng.standard_normal(shape)
        return lam * e[tuple(idx.T)] / np.linalg.norm(e)
    draws = rng.standard_normal(idx.shape[0])
    return lam * draws / math.sqrt(total)


def make_instance(shape, ranks, m: int, rng: np.random.Generator,
                  noise: float = 0.0, m_test=None):
    """Ground truth point plus observations: (truth, ObservationSet)."""
    total = math.prod(shape)
    truth = random_point(shape, ranks, rng, real=True)
    if m_test is None:
        m_test = min(m, total - m)
    omega, gamma = sample_split(shape, m, m_test, rng)
    both = np.concatenate([omega, gamma], axis=0)
    vals = truth.entries(both)
    if noise > 0.0:
        vals = vals + _noise_at(shape, both, noise, rng)
    obs = ObservationSet(shape, omega, vals[:m],
                         test_idx=gamma if m_test else None,
                         test_vals=vals[m:] if m_test else None)
    return truth, obs


def recovery_run(shape, ranks, m: int, rng: np.random.Generator,
                 noise: float = 0.0, cfg: RCGConfig | None = None,
                 m_test=None) -> dict:
    """One completion instance solved by NTT-RCG; per-iteration test errors
    land in the trace rows."""
    truth, obs = make_instance(shape, ranks, m, rng, noise=noise, m_test=m_test)
    x0 = random_point(shape, ranks, rng, real=True)
    cfg = cfg or RCGConfig(max_iters=250)
    cfg = RCGConfig(**{**cfg.__dict__,
                       "metrics": lambda p: {"test_error": test_error(p, obs)}})
    x, trace = rcg_minimize(completion_objective(obs), x0, cfg)
    errs = [row["test_error"] for row in trace.rows]
    best = min(errs)
    report = {
        "shape": list(shape),
        "ranks": list(ranks),
        "m": int(m),
        "noise": float(noise),
        "iterations": len(trace.rows) - 1,
        "reason": trace.reason,
        "train_error": train_error(x, obs),
        "test_error": errs[-1],
        "best_test_error": best,
        "success": bool(best < SUCCESS_TEST_ERROR),
    }
    return {"point": x, "trace": trace, "truth": truth, "obs": obs,
            "report": report}


def phase_cell(n, m, trials: int, base_seed: int, cell_index: int,
               d: int = 3, rank: int = 2, cfg: RCGConfig | None = None) -> dict:
    """One (n, m) grid cell: the success fraction over ``trials`` seeded runs.

    Cells are independent given (base_seed, cell_index), so a grid can be
    evaluated in any order or in parallel.
    """
    from .tensor_train import uniform_ranks

    shape = (int(n),) * d
    total = math.prod(shape)
    m_eff = min(int(m), total)
    ranks = uniform_ranks(shape, rank)
    hits = 0
    for t in range(trials):
        seed = base_seed + 10000 * cell_index + t
        out = recovery_run(shape, ranks, m_eff,
                           np.random.default_rng(seed), cfg=cfg)
        hits += int(out["report"]["success"])
    return {"n": int(n), "m": int(m), "success_fraction": hits / trials}


def phase_experiment(ns, ms, trials: int, base_seed: int, d: int = 3,
                     rank: int = 2, cfg: RCGConfig | None = None) -> list:
    """Success fractions over an (n, m) grid: each cell runs ``trials``
    instances and counts test error < 1e-4 within the iteration budget."""
    return [phase_cell(n, m, trials, base_seed, i * len(ms) + j,
                       d=d, rank=rank, cfg=cfg)
            for i, n in enumerate(ns) for j, m in enumerate(ms)]
