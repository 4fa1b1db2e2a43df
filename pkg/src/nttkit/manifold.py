"""The manifold of unit-norm, fixed-rank TT tensors.

A point is stored through two equivalent core families:

* ``left``: every core left-orthogonal (for a unit-norm tensor the last core
  is left-orthogonal too, since its Frobenius norm is the tensor norm);
* ``right``: every core right-orthogonal.

Together they give orthonormal interface frames on both sides of every mode,
so the tangent projection needs no normal-equation inverses. Tangent vectors
are kept in gauged parameter form: one perturbation core W_k per mode with
L(U_k)^H L(W_k) = 0 for every k, including the last mode, which also removes
the radial and global-phase directions of the norm constraint. The embedded
tangent tensor is sum_k [[U_1, ..., U_{k-1}, W_k, Y_{k+1}, ..., Y_d]], a sum
of pairwise orthogonal terms, so inner products reduce to the parameters.

The retraction is truncation back to the rank/norm constraint set: densify-free
TT rounding of X + sV (interior ranks at most 2r) followed by normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .tensor_train import (
    TTTensor,
    check_ranks,
    orthogonalize,
    qr_fixed,
    tt_round,
    tt_svd,
)

RANK_TOL = 1e-12      # minimal singular value for exact-rank membership
NORM_TOL = 1e-14      # inputs with smaller norm cannot be normalized
ORTH_TOL = 1e-10      # orthogonality / unit-norm residual tolerance


class RankCollapseError(RuntimeError):
    """A truncation or normalization produced a rank-deficient point."""


@dataclass
class SparseTensor:
    """A few entries of a large tensor: values ``vals`` at rows ``idx``."""

    shape: tuple
    idx: np.ndarray   # (m, d) int64, zero based
    vals: np.ndarray  # (m,) complex128

    def __post_init__(self):
        self.shape = tuple(int(n) for n in self.shape)
        self.idx = np.asarray(self.idx, dtype=np.int64)
        self.vals = np.asarray(self.vals, dtype=np.complex128)
        if self.idx.ndim != 2 or self.idx.shape[1] != len(self.shape):
            raise ValueError("idx must be (m, d)")
        if self.vals.shape != (self.idx.shape[0],):
            raise ValueError("vals must match idx rows")


@dataclass
class NTTPoint:
    """A unit-norm fixed-rank TT tensor with dual orthogonal families."""

    left: list
    right: list
    gauge: list            # gauge[k] = (left frame)^H (right frame) at bond k
    rank_deficient: bool = False

    @property
    def d(self) -> int:
        return len(self.left)

    @property
    def shape(self) -> tuple:
        return tuple(c.shape[1] for c in self.left)

    @property
    def ranks(self) -> tuple:
        return (1,) + tuple(c.shape[2] for c in self.left)

    def to_tt(self) -> TTTensor:
        return TTTensor([c.copy() for c in self.left], orth="left")

    def entries(self, idx) -> np.ndarray:
        return _kernels.tt_entries(list(self.left), np.asarray(idx, dtype=np.int64))

    def full(self) -> np.ndarray:
        return self.to_tt().full()


@dataclass
class NTTTangent:
    """Gauged tangent parameters: one core-shaped block per mode."""

    point: NTTPoint
    W: list

    def norm(self) -> float:
        return math.sqrt(sum(float(np.sum(np.abs(w) ** 2)) for w in self.W))


def manifold_dim(shape, ranks) -> int:
    """Parameter count of the fixed-rank unit-norm TT set.

    Complex-parameter convention: gauge freedom removes r_k^2 per interior
    bond and the norm constraint removes one more.
    """
    ranks = check_ranks(shape, ranks)
    total = sum(ranks[k] * shape[k] * ranks[k + 1] for k in range(len(shape)))
    return total - sum(r * r for r in ranks[1:-1]) - 1


def _gauge_matrices(left, right):
    s = [np.ones((1, 1), dtype=np.complex128)]
    for u, y in zip(left, right):
        s.append(np.einsum("aib,ac,cid->bd", u.conj(), s[-1], y))
    return s


def _point_from_left(cores, validate: bool = True,
                     rank_deficient: bool = False) -> NTTPoint:
    """Assemble a point from a fully left-orthogonal, unit-norm core family."""
    tt = TTTensor([np.ascontiguousarray(c) for c in cores])
    right = orthogonalize(tt, 1).cores
    gauge = _gauge_matrices(tt.cores, right)
    if validate:
        for k in range(1, len(cores)):
            sv = np.linalg.svd(gauge[k], compute_uv=False)
            if sv[-1] <= RANK_TOL:
                raise RankCollapseError(
                    f"bond {k} is rank deficient (sigma_min = {sv[-1]:.3e})")
    return NTTPoint(list(tt.cores), list(right), gauge,
                    rank_deficient=rank_deficient)


def ntt_svd(a, ranks) -> NTTPoint:
    """Best-effort projection of an ambient tensor onto the constraint set.

    Runs the sequential-SVD truncation (dense input) or TT rounding (TT
    input), then pushes the norm into the last core and normalizes it, which
    leaves every core left-orthogonal. Raises RankCollapseError for inputs of
    negligible norm or with collapsed bond ranks.
    """
    if isinstance(a, TTTensor):
        x = tt_round(a, ranks)
    elif isinstance(a, SparseTensor):
        dense = np.zeros(a.shape, dtype=np.complex128)
        dense[tuple(a.idx.T)] = a.vals
        x = tt_svd(dense, ranks)
    else:
        x = tt_svd(np.asarray(a), ranks)
    cores = list(x.cores)
    nrm = float(np.linalg.norm(cores[-1]))
    if nrm < NORM_TOL:
        raise RankCollapseError("input norm too small to normalize")
    cores[-1] = cores[-1] / nrm
    return _point_from_left(cores)


def random_point(shape, ranks, rng: np.random.Generator,
                 real: bool = False) -> NTTPoint:
    """Random point: i.i.d. Gaussian cores pushed through ntt_svd.

    ``real=True`` draws real-valued cores (still complex dtype); downstream
    arithmetic then stays exactly real, which is what the real-data
    applications use.
    """
    from .tensor_train import random_tt

    return ntt_svd(random_tt(shape, ranks, rng, real=real), ranks)


def _scrub(point: NTTPoint, W: list) -> list:
    """Enforce the gauge L(U_k)^H L(W_k) = 0 for every mode."""
    out = []
    for u, w in zip(point.left, W):
        ra, n, rb = u.shape
        lu = u.reshape(ra * n, rb, order="F")
        lw = w.reshape(ra * n, w.shape[2], order="F")
        lw = lw - lu @ (lu.conj().T @ lw)
        out.append(lw.reshape(ra, n, w.shape[2], order="F"))
    return out


def _project_dense(point: NTTPoint, z: np.ndarray) -> list:
    if z.shape != point.shape:
        raise ValueError("ambient shape mismatch")
    d = point.d
    z = np.asarray(z, dtype=np.complex128)
    les = [np.ones((1, 1), dtype=np.complex128)]
    for c in point.left[:-1]:
        p = les[-1].shape[0]
        les.append(np.einsum("pa,aib->pib", les[-1], c)
                   .reshape(p * c.shape[1], c.shape[2], order="F"))
    ges = [np.ones((1, 1), dtype=np.complex128)]
    for c in reversed(point.right[1:]):
        p = ges[-1].shape[0]
        ges.append(np.einsum("pb,aib->ipa", ges[-1], c)
                   .reshape(c.shape[1] * p, c.shape[0], order="F"))
    ges.reverse()  # ges[k] is the frame for modes k+2..d, k = 0..d-1
    W = []
    for k in range(d):
        le = les[k]
        ge = ges[k]
        zk = z.reshape(le.shape[0], point.shape[k], ge.shape[0], order="F")
        W.append(np.einsum("pa,piq,qb->aib", le.conj(), zk, ge.conj()))
    return W


def _project_tt(point: NTTPoint, z: TTTensor) -> list:
    if z.shape != point.shape:
        raise ValueError("ambient shape mismatch")
    d = point.d
    A = [np.ones((1, 1), dtype=np.complex128)]
    for u, zc in zip(point.left, z.cores):
        A.append(np.einsum("aib,ac,cid->bd", u.conj(), A[-1], zc))
    B = [np.ones((1, 1), dtype=np.complex128)] * (d + 1)
    for k in range(d - 1, -1, -1):
        B[k] = np.einsum("aic,cd,bid->ab", z.cores[k], B[k + 1],
                         point.right[k].conj())
    return [np.einsum("ac,cid,db->aib", A[k], z.cores[k], B[k + 1])
            for k in range(d)]


def _project_sparse(point: NTTPoint, z: SparseTensor) -> list:
    if z.shape != point.shape:
        raise ValueError("ambient shape mismatch")
    return _kernels.sparse_gradient_cores(list(point.left), list(point.right),
                                          z.idx, z.vals)


def project_tangent(point: NTTPoint, z) -> NTTTangent:
    """Orthogonal projection of an ambient vector onto the tangent space.

    Accepts a dense ndarray, a TTTensor or a SparseTensor and never densifies
    structured input. The result satisfies every gauge condition exactly
    (a final scrub re-applies them).
    """
    if isinstance(z, TTTensor):
        W = _project_tt(point, z)
    elif isinstance(z, SparseTensor):
        W = _project_sparse(point, z)
    else:
        W = _project_dense(point, np.asarray(z))
    return NTTTangent(point, _scrub(point, W))


def zero_tangent(point: NTTPoint) -> NTTTangent:
    return NTTTangent(point, [np.zeros_like(c) for c in point.left])


def tangent_inner(v: NTTTangent, w: NTTTangent) -> complex:
    """<V, W> (conjugate linear in V); the metric value is the real part."""
    if v.point is not w.point and v.point.shape != w.point.shape:
        raise ValueError("tangents live at different points")
    return complex(sum(np.vdot(a, b) for a, b in zip(v.W, w.W)))


def tangent_norm(v: NTTTangent) -> float:
    return v.norm()


def tangent_combine(terms) -> NTTTangent:
    """Linear combination sum_i alpha_i V_i of tangents at one point."""
    terms = list(terms)
    point = terms[0][1].point
    W = [np.zeros_like(c) for c in point.left]
    for alpha, v in terms:
        for k, w in enumerate(v.W):
            W[k] = W[k] + alpha * w
    return NTTTangent(point, W)


def tangent_scale(v: NTTTangent, alpha) -> NTTTangent:
    return NTTTangent(v.point, [alpha * w for w in v.W])


def tangent_to_tt(v: NTTTangent) -> TTTensor:
    """Embed a tangent vector as a TT tensor with interior ranks doubled."""
    p = v.point
    d = p.d
    if d == 1:
        return TTTensor([v.W[0].copy()])
    cores = [np.concatenate([v.W[0], p.left[0]], axis=2)]
    for k in range(1, d - 1):
        y, w, u = p.right[k], v.W[k], p.left[k]
        ra, n, rb = u.shape
        c = np.zeros((2 * ra, n, 2 * rb), dtype=np.complex128)
        c[:ra, :, :rb] = y
        c[ra:, :, :rb] = w
        c[ra:, :, rb:] = u
        cores.append(c)
    cores.append(np.concatenate([p.right[-1], v.W[-1]], axis=0))
    return TTTensor(cores)


def step_tt(point: NTTPoint, v: NTTTangent, s: float) -> TTTensor:
    """The ambient tensor X + s V in TT form (interior ranks doubled)."""
    d = point.d
    if d == 1:
        return TTTensor([point.left[0] + s * v.W[0]])
    cores = [np.concatenate([s * v.W[0], point.left[0]], axis=2)]
    for k in range(1, d - 1):
        y, w, u = point.right[k], v.W[k], point.left[k]
        ra, n, rb = u.shape
        c = np.zeros((2 * ra, n, 2 * rb), dtype=np.complex128)
        c[:ra, :, :rb] = y
        c[ra:, :, :rb] = s * w
        c[ra:, :, rb:] = u
        cores.append(c)
    cores.append(np.concatenate([point.right[-1],
                                 point.left[-1] + s * v.W[-1]], axis=0))
    return TTTensor(cores)


def retract(point: NTTPoint, v: NTTTangent, s: float) -> NTTPoint:
    """Truncate X + sV back to the constraint set (rank, then norm)."""
    if s == 0:
        return point
    rounded = tt_round(step_tt(point, v, s), point.ranks)
    if rounded.ranks != point.ranks:
        raise RankCollapseError(
            f"retraction lost rank: {rounded.ranks} vs {point.ranks}")
    cores = list(rounded.cores)
    nrm = float(np.linalg.norm(cores[-1]))
    if nrm < NORM_TOL:
        raise RankCollapseError("retraction norm collapsed")
    cores[-1] = cores[-1] / nrm
    return _point_from_left(cores)


def vector_transport(target: NTTPoint, v: NTTTangent) -> NTTTangent:
    """Move a tangent vector to another point's tangent space by projection."""
    return project_tangent(target, tangent_to_tt(v))


def tangent_basis(point: NTTPoint) -> list:
    """Orthonormal real basis of the gauged tangent space.

    Per mode, the parameter block ranges over the orthogonal complement of
    L(U_k), giving (r_{k-1} n_k - r_k) r_k complex directions; each yields a
    real pair (B, iB). The basis is orthonormal for the real inner product
    Re<.,.> and every element satisfies all gauge conditions.
    """
    out = []
    for k, u in enumerate(point.left):
        ra, n, rb = u.shape
        lu = u.reshape(ra * n, rb, order="F")
        full, _, _ = np.linalg.svd(lu, full_matrices=True)
        comp = full[:, rb:]  # orthonormal complement of the frame
        for c in range(comp.shape[1]):
            for j in range(rb):
                for phase in (1.0, 1.0j):
                    W = [np.zeros_like(cc) for cc in point.left]
                    blk = np.zeros((ra * n, rb), dtype=np.complex128)
                    blk[:, j] = phase * comp[:, c]
                    W[k] = blk.reshape(ra, n, rb, order="F")
                    out.append(NTTTangent(point, W))
    return out


def fd_gradient(cost, point: NTTPoint, t: float | None = None):
    """Finite-difference Riemannian gradient.

    Forward differences of ``cost`` along retractions of an orthonormal
    tangent basis; the default step is 1e-5 * max(1, |cost(X)|). Returns
    (gradient, cost(X)).
    """
    f0 = float(cost(point))
    if t is None:
        t = 1e-5 * max(1.0, abs(f0))
    basis = tangent_basis(point)
    W = [np.zeros_like(c) for c in point.left]
    for b in basis:
        alpha = (float(cost(retract(point, b, t))) - f0) / t
        if alpha != 0.0:
            for k in range(len(W)):
                W[k] = W[k] + alpha * b.W[k]
    return NTTTangent(point, W), f0


def pad_rank(point: NTTPoint, ranks) -> NTTPoint:
    """Embed a point into a larger-rank constraint set (warm start).

    Cores are zero-padded and re-orthonormalized; the tensor value is
    unchanged, so the new point is rank deficient by construction and is
    flagged as such (membership validation is skipped). The first optimizer
    step restores exact rank.
    """
    ranks = check_ranks(point.shape, ranks)
    old = point.ranks
    if any(rn < ro for rn, ro in zip(ranks, old)):
        raise ValueError("pad_rank cannot shrink ranks")
    d = point.d
    cores = []
    for k, c in enumerate(point.left):
        ra, n, rb = ranks[k], c.shape[1], ranks[k + 1]
        nc = np.zeros((ra, n, rb), dtype=np.complex128)
        nc[:c.shape[0], :, :c.shape[2]] = c
        cores.append(nc)
    for j in range(d - 1):
        ra, n, rb = cores[j].shape
        q, r = qr_fixed(cores[j].reshape(ra * n, rb, order="F"))
        cores[j] = q.reshape(ra, n, rb, order="F")
        cores[j + 1] = np.einsum("ab,bic->aic", r, cores[j + 1])
    nrm = float(np.linalg.norm(cores[-1]))
    cores[-1] = cores[-1] / nrm
    return _point_from_left(cores, validate=False, rank_deficient=True)


def membership_residuals(point: NTTPoint) -> dict:
    """Diagnostics for the constraint set: norm, orthogonality, bond ranks."""
    res = {}
    res["norm_err"] = abs(float(np.linalg.norm(point.left[-1])) - 1.0)
    worst_left = 0.0
    for u in point.left:
        ra, n, rb = u.shape
        lu = u.reshape(ra * n, rb, order="F")
        worst_left = max(worst_left, float(np.linalg.norm(
            lu.conj().T @ lu - np.eye(rb))))
    res["left_orth_err"] = worst_left
    worst_right = 0.0
    for y in point.right:
        ra, n, rb = y.shape
        ry = y.reshape(ra, n * rb, order="F")
        worst_right = max(worst_right, float(np.linalg.norm(
            ry @ ry.conj().T - np.eye(ra))))
    res["right_orth_err"] = worst_right
    sigma_min = 1.0
    for k in range(1, point.d):
        sv = np.linalg.svd(point.gauge[k], compute_uv=False)
        sigma_min = min(sigma_min, float(sv[-1]))
    res["sigma_min"] = sigma_min
    return res
