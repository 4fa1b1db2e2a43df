"""Tensor-train (TT) tensors and their basic algebra.

Conventions used across the package:

* A dense order-d tensor is a complex128 ndarray with axes (i_1, ..., i_d).
  Linearization is column major (first index fastest), so every reshape that
  merges or splits axes uses ``order='F'``.
* A TT core for mode k is an array of shape (r_{k-1}, n_k, r_k) with
  r_0 = r_d = 1. The left unfolding L(U) is the (r_{k-1} n_k, r_k) matrix with
  row index a + i * r_{k-1}; the right unfolding R(U) is the
  (r_{k-1}, n_k r_k) matrix with column index i + b * n_k.
* The k-th unfolding of X factors as X_<k> = X_<=k @ X_>=k+1.T where the
  interface matrices carry the partial core chain products.
* Inner products are conjugate linear in the first argument.

SVD and QR results are post-processed with a fixed phase convention so that
repeated runs (and real-valued inputs) give identical, real-stable factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

DENSE_GUARD = 2 ** 24  # refuse to materialize anything bigger than this


class RankError(ValueError):
    """Requested TT ranks are infeasible for the shape."""


def max_ranks(shape) -> list[int]:
    """Largest feasible TT ranks for a shape: r_k = min(prod left, prod right)."""
    d = len(shape)
    out = [1]
    for k in range(1, d):
        out.append(int(min(math.prod(shape[:k]), math.prod(shape[k:]))))
    out.append(1)
    return out


def uniform_ranks(shape, r: int) -> list[int]:
    """The rank vector min(max_ranks, (1, r, ..., r, 1))."""
    return [min(m, r) if 0 < k < len(shape) else 1
            for k, m in enumerate(max_ranks(shape))]


def check_ranks(shape, ranks) -> list[int]:
    """Validate a rank vector against a shape and return it as a list of ints."""
    shape = [int(n) for n in shape]
    ranks = [int(r) for r in ranks]
    d = len(shape)
    if len(ranks) != d + 1:
        raise RankError(f"rank vector must have length d+1 = {d + 1}, got {len(ranks)}")
    if ranks[0] != 1 or ranks[-1] != 1:
        raise RankError("boundary ranks must be 1")
    if any(r < 1 for r in ranks):
        raise RankError("ranks must be positive")
    caps = max_ranks(shape)
    for k in range(1, d):
        if ranks[k] > caps[k]:
            raise RankError(f"rank {ranks[k]} at bond {k} exceeds the "
                            f"unfolding bound {caps[k]}")
    for k in range(1, d + 1):
        if ranks[k] > ranks[k - 1] * shape[k - 1]:
            raise RankError(f"rank chain violated at bond {k}: "
                            f"{ranks[k]} > {ranks[k - 1]} * {shape[k - 1]}")
        if ranks[k - 1] > shape[k - 1] * ranks[k]:
            raise RankError(f"rank chain violated at bond {k - 1}: "
                            f"{ranks[k - 1]} > {shape[k - 1]} * {ranks[k]}")
    return ranks


def _dense_guard(shape):
    total = math.prod(shape)
    if total > DENSE_GUARD:
        raise ValueError(f"refusing to densify {total} entries (guard {DENSE_GUARD})")
    return total


def svd_fixed(m: np.ndarray):
    """Thin SVD with each left singular vector's largest entry made real positive."""
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    for j in range(u.shape[1]):
        i = int(np.argmax(np.abs(u[:, j])))
        p = u[i, j]
        a = abs(p)
        if a > 0:
            c = p / a
            u[:, j] *= np.conj(c)
            vh[j, :] *= c
    return u, s, vh


def qr_fixed(m: np.ndarray):
    """Reduced QR with the diagonal of R made real non-negative."""
    q, r = np.linalg.qr(m)
    for j in range(r.shape[0]):
        p = r[j, j]
        a = abs(p)
        if a > 0:
            c = p / a
            q[:, j] *= c
            r[j, :] *= np.conj(c)
    return q, r


@dataclass
class TTTensor:
    """A tensor in TT format.

    Attributes:
        cores: list of (r_{k-1}, n_k, r_k) complex arrays.
        orth: orthogonality marker. None (unknown), 'left' (cores 1..d-1
            left-orthogonal), 'right' (cores 2..d right-orthogonal) or an
            integer k (cores left of k left-orthogonal, right of k
            right-orthogonal, core k carries the weight).
        effective_ranks: numerical ranks observed at the last truncation,
            when known.
    """

    cores: list[np.ndarray]
    orth: object = None
    effective_ranks: list[int] | None = field(default=None, compare=False)

    def __post_init__(self):
        self.cores = [np.asarray(c, dtype=np.complex128) for c in self.cores]
        for k, c in enumerate(self.cores):
            if c.ndim != 3:
                raise ValueError(f"core {k} must have 3 axes")
            if k > 0 and c.shape[0] != self.cores[k - 1].shape[2]:
                raise ValueError(f"bond mismatch between cores {k - 1} and {k}")
        if self.cores[0].shape[0] != 1 or self.cores[-1].shape[2] != 1:
            raise ValueError("boundary ranks must be 1")

    @property
    def d(self) -> int:
        return len(self.cores)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        return (1,) + tuple(c.shape[2] for c in self.cores)

    def copy(self) -> "TTTensor":
        return TTTensor([c.copy() for c in self.cores], orth=self.orth,
                        effective_ranks=self.effective_ranks)

    def entry(self, idx) -> complex:
        v = np.ones((1, 1), dtype=np.complex128)
        for k, c in enumerate(self.cores):
            v = v @ c[:, idx[k], :]
        return complex(v[0, 0])

    def entries(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return _kernels.tt_entries(list(self.cores), idx)

    def full(self) -> np.ndarray:
        return tt_full(self)

    def norm(self) -> float:
        return tt_norm(self)


def unfold(a: np.ndarray, k: int) -> np.ndarray:
    """The k-th unfolding: the first k axes become rows (first index fastest)."""
    if not 1 <= k <= a.ndim - 1:
        raise ValueError("unfold requires 1 <= k <= d-1")
    rows = math.prod(a.shape[:k])
    return a.reshape(rows, -1, order="F")


def fold(m: np.ndarray, shape, k: int) -> np.ndarray:
    """Inverse of unfold(A, k) for a tensor of the given shape."""
    if m.shape != (math.prod(shape[:k]), math.prod(shape[k:])):
        raise ValueError("matrix shape does not match the target unfolding")
    return m.reshape(shape, order="F")


def mode_product(a: np.ndarray, mat: np.ndarray, mode: int) -> np.ndarray:
    """Multiply matrix `mat` into axis `mode` (0-based) of a dense tensor."""
    return np.moveaxis(np.tensordot(mat, a, axes=(1, mode)), 0, mode)


def core_unfold(core: np.ndarray, side: str) -> np.ndarray:
    """Left (r_{k-1} n_k, r_k) or right (r_{k-1}, n_k r_k) core unfolding."""
    ra, n, rb = core.shape
    if side == "left":
        return core.reshape(ra * n, rb, order="F")
    if side == "right":
        return core.reshape(ra, n * rb, order="F")
    raise ValueError("side must be 'left' or 'right'")


def tt_full(x: TTTensor) -> np.ndarray:
    """Densify a TT tensor (guarded by DENSE_GUARD)."""
    _dense_guard(x.shape)
    t = np.ones((1, 1), dtype=np.complex128)
    for c in x.cores:
        p, r = t.shape
        t = np.einsum("pa,aib->pib", t, c).reshape(p * c.shape[1], c.shape[2],
                                                   order="F")
    return t[:, 0].reshape(x.shape, order="F")


def tt_entry(x: TTTensor, idx) -> complex:
    return x.entry(idx)


def tt_svd(a: np.ndarray, ranks) -> TTTensor:
    """Sequential-SVD decomposition of a dense tensor at fixed TT ranks.

    Cores 1..d-1 come out left-orthogonal; the last core carries the norm.
    When the input has numerical rank below the requested ranks the extra
    frame columns are the SVD's orthonormal completion and the observed
    numerical ranks are recorded in ``effective_ranks``.
    """
    a = np.asarray(a, dtype=np.complex128)
    shape = a.shape
    ranks = check_ranks(shape, ranks)
    d = len(shape)
    cores = []
    eff = [1]
    c = a
    rprev = 1
    for k in range(d - 1):
        m = c.reshape(rprev * shape[k], -1, order="F")
        u, s, vh = svd_fixed(m)
        rk = ranks[k + 1]
        tol = 1e-14 * (s[0] if s.size and s[0] > 0 else 1.0)
        eff.append(int(min(rk, np.count_nonzero(s > tol))))
        cores.append(u[:, :rk].reshape(rprev, shape[k], rk, order="F"))
        c = (s[:rk, None] * vh[:rk]).reshape((rk,) + shape[k + 1:], order="F")
        rprev = rk
    cores.append(c.reshape(rprev, shape[-1], 1))
    eff.append(1)
    return TTTensor(cores, orth="left", effective_ranks=eff)


def orthogonalize(x: TTTensor, k: int) -> TTTensor:
    """Return an equivalent TT tensor in k-orthogonal form (1 <= k <= d).

    Cores 1..k-1 are made left-orthogonal, cores k+1..d right-orthogonal;
    core k absorbs the transfer factors. k = d gives the left-orthogonalized
    ('left') form, k = 1 the right-orthogonalized ('right') form.
    """
    d = x.d
    if not 1 <= k <= d:
        raise ValueError("orthogonality center out of range")
    cores = [c.copy() for c in x.cores]
    for j in range(k - 1):
        ra, n, rb = cores[j].shape
        q, r = qr_fixed(cores[j].reshape(ra * n, rb, order="F"))
        cores[j] = q.reshape(ra, n, q.shape[1], order="F")
        cores[j + 1] = np.einsum("ab,bic->aic", r, cores[j + 1])
    for j in range(d - 1, k - 1, -1):
        ra, n, rb = cores[j].shape
        q, r = qr_fixed(cores[j].reshape(ra, n * rb, order="F").conj().T)
        cores[j] = q.conj().T.reshape(q.shape[1], n, rb, order="F")
        cores[j - 1] = np.einsum("aib,bc->aic", cores[j - 1], r.conj().T)
    marker = "left" if k == d else ("right" if k == 1 else k)
    return TTTensor(cores, orth=marker)


def tt_norm(x: TTTensor) -> float:
    """Frobenius norm via orthogonalization (no densification)."""
    if x.orth == "left":
        return float(np.linalg.norm(x.cores[-1]))
    if x.orth == "right":
        return float(np.linalg.norm(x.cores[0]))
    if isinstance(x.orth, int):
        return float(np.linalg.norm(x.cores[x.orth - 1]))
    return float(np.linalg.norm(orthogonalize(x, x.d).cores[-1]))


def tt_inner(x: TTTensor, y: TTTensor) -> complex:
    """<X, Y>, conjugate linear in X, by transfer-matrix contraction."""
    if x.shape != y.shape:
        raise ValueError("shape mismatch")
    e = np.ones((1, 1), dtype=np.complex128)
    for cx, cy in zip(x.cores, y.cores):
        e = np.einsum("aib,ac,cid->bd", cx.conj(), e, cy)
    return complex(e[0, 0])


def tt_scale(x: TTTensor, alpha: complex) -> TTTensor:
    """Scale a TT tensor by multiplying the last core."""
    cores = [c.copy() for c in x.cores]
    cores[-1] = cores[-1] * alpha
    return TTTensor(cores, orth=x.orth if x.orth in (None, "left") else None)


def tt_add(x: TTTensor, y: TTTensor) -> TTTensor:
    """Sum of two TT tensors; interior ranks add."""
    if x.shape != y.shape:
        raise ValueError("shape mismatch")
    d = x.d
    if d == 1:
        return TTTensor([x.cores[0] + y.cores[0]])
    cores = []
    for k in range(d):
        cx, cy = x.cores[k], y.cores[k]
        if k == 0:
            cores.append(np.concatenate([cx, cy], axis=2))
        elif k == d - 1:
            cores.append(np.concatenate([cx, cy], axis=0))
        else:
            ra = cx.shape[0] + cy.shape[0]
            rb = cx.shape[2] + cy.shape[2]
            c = np.zeros((ra, cx.shape[1], rb), dtype=np.complex128)
            c[:cx.shape[0], :, :cx.shape[2]] = cx
            c[cx.shape[0]:, :, cx.shape[2]:] = cy
            cores.append(c)
    return TTTensor(cores)


def tt_round(x: TTTensor, ranks) -> TTTensor:
    """Truncate a TT tensor to the given ranks.

    Right-orthogonalizes first, then sweeps left to right with truncated SVDs;
    in exact arithmetic this equals tt_svd applied to the densified tensor.
    Ranks are clamped to what the current representation can hold, and the
    result is left-orthogonal with effective_ranks recorded.
    """
    ranks = check_ranks(x.shape, ranks)
    d = x.d
    y = orthogonalize(x, 1)
    cores = list(y.cores)
    out = []
    eff = [1]
    for k in range(d - 1):
        ra, n, rb = cores[k].shape
        u, s, vh = svd_fixed(cores[k].reshape(ra * n, rb, order="F"))
        rk = min(ranks[k + 1], s.size)
        tol = 1e-14 * (s[0] if s.size and s[0] > 0 else 1.0)
        eff.append(int(min(rk, np.count_nonzero(s > tol))))
        out.append(u[:, :rk].reshape(ra, n, rk, order="F"))
        carry = s[:rk, None] * vh[:rk]
        cores[k + 1] = np.einsum("ab,bic->aic", carry, cores[k + 1])
    out.append(cores[-1])
    eff.append(1)
    return TTTensor(out, orth="left", effective_ranks=eff)


def interface_matrices(x: TTTensor, k: int):
    """The pair (X_<=k, X_>=k+1) of interface matrices, 0 <= k <= d.

    X_<=k has shape (n_1 ... n_k, r_k) and X_>=k+1 has shape
    (n_{k+1} ... n_d, r_k); rows follow the column-major index map, and
    X_<k> = X_<=k @ X_>=k+1.T. Densifies partially, so sizes are guarded.
    """
    d = x.d
    if not 0 <= k <= d:
        raise ValueError("interface index out of range")
    _dense_guard(x.shape)
    le = np.ones((1, 1), dtype=np.complex128)
    for j in range(k):
        p = le.shape[0]
        c = x.cores[j]
        le = np.einsum("pa,aib->pib", le, c).reshape(p * c.shape[1], c.shape[2],
                                                     order="F")
    ge = np.ones((1, 1), dtype=np.complex128)
    for j in range(d - 1, k - 1, -1):
        p = ge.shape[0]
        c = x.cores[j]
        ge = np.einsum("pb,aib->ipa", ge, c).reshape(c.shape[1] * p, c.shape[0],
                                                     order="F")
    return le, ge


def kron_apply(x: TTTensor, mats) -> TTTensor:
    """Apply the Kronecker operator (K_d x ... x K_1) to a TT tensor.

    With the column-major vectorization, mode 1 is the fastest index, so the
    operator acts core-wise: core k is multiplied along its physical axis by
    K_k. Entries of `mats` may be None to mean the identity.
    """
    if len(mats) != x.d:
        raise ValueError("need one matrix (or None) per mode")
    cores = []
    for c, m in zip(x.cores, mats):
        if m is None:
            cores.append(c.copy())
        else:
            cores.append(np.einsum("ij,ajb->aib", np.asarray(m, dtype=np.complex128), c))
    return TTTensor(cores)


def random_tt(shape, ranks, rng: np.random.Generator, real: bool = False) -> TTTensor:
    """TT tensor with i.i.d. Gaussian cores (complex standard by default)."""
    ranks = check_ranks(shape, ranks)
    cores = []
    for k, n in enumerate(shape):
        size = (ranks[k], n, ranks[k + 1])
        if real:
            c = rng.standard_normal(size).astype(np.complex128)
        else:
            c = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)
        cores.append(c)
    return TTTensor(cores)
