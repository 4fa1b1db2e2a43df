"""Vectorized NumPy implementations of the batched index kernels.

Conventions shared with the compiled backend:
  * a core is a complex128 array of shape (r_{k-1}, n_k, r_k);
  * `idx` is an int64 array of shape (m, d) holding zero-based multi-indices;
  * entry evaluation is the chain product U_1(i_1) ... U_d(i_d).
"""

from __future__ import annotations

import numpy as np


def tt_entries(cores: list[np.ndarray], idx: np.ndarray) -> np.ndarray:
    """Evaluate a batch of entries of a tensor given by its cores."""
    m = idx.shape[0]
    v = np.ones((m, 1), dtype=np.complex128)
    for k, core in enumerate(cores):
        g = core[:, idx[:, k], :]  # (r_{k-1}, m, r_k)
        v = np.einsum("qa,aqb->qb", v, g)
    return v[:, 0]


def _prefixes(cores: list[np.ndarray], idx: np.ndarray) -> list[np.ndarray]:
    """p[k] has shape (m, r_k): the product of cores 1..k at each index row."""
    m = idx.shape[0]
    out = [np.ones((m, 1), dtype=np.complex128)]
    for k, core in enumerate(cores):
        g = core[:, idx[:, k], :]
        out.append(np.einsum("qa,aqb->qb", out[-1], g))
    return out


def _suffixes(cores: list[np.ndarray], idx: np.ndarray) -> list[np.ndarray]:
    """s[k] has shape (m, r_{k-1}): the product of cores k..d at each row."""
    d = len(cores)
    m = idx.shape[0]
    out = [np.ones((m, 1), dtype=np.complex128)]
    for k in range(d - 1, -1, -1):
        g = cores[k][:, idx[:, k], :]
        out.append(np.einsum("aqb,qb->qa", g, out[-1]))
    out.reverse()
    return out


def sparse_gradient_cores(
    left_cores: list[np.ndarray],
    right_cores: list[np.ndarray],
    idx: np.ndarray,
    vals: np.ndarray,
) -> list[np.ndarray]:
    """Accumulate the per-mode projection cores of a sparse ambient vector.

    For each mode k the result W_k (same shape as the k-th core) collects
        W_k[a, i, b] += conj(prefix_q[a]) * vals[q] * conj(suffix_q[b])
    over all rows q with idx[q, k] == i, where prefix_q runs over
    left_cores[0..k-1] and suffix_q over right_cores[k+1..d-1].
    """
    d = len(left_cores)
    pre = _prefixes(left_cores, idx)
    suf = _suffixes(right_cores, idx)
    out = []
    for k in range(d):
        rkm1, nk, rk = left_cores[k].shape[0], left_cores[k].shape[1], right_cores[k].shape[2]
        contrib = (vals[:, None, None]
                   * np.conj(pre[k])[:, :, None]
                   * np.conj(suf[k + 1])[:, None, :])  # (m, r_{k-1}, r_k)
        acc = np.zeros((nk, rkm1, rk), dtype=np.complex128)
        np.add.at(acc, idx[:, k], contrib)
        out.append(np.ascontiguousarray(acc.transpose(1, 0, 2)))
    return out
