"""Shared helpers for the test suite: reference implementations that stay
deliberately naive (dense, loop based) so library results are checked against
independent code paths."""

from __future__ import annotations

import math

import numpy as np
import pytest

from nttkit.tensor_train import TTTensor


def crandn(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian array."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def dense_unfold(a: np.ndarray, k: int) -> np.ndarray:
    """Reference k-th unfolding built entry by entry from the index map."""
    shape = a.shape
    rows = math.prod(shape[:k])
    cols = math.prod(shape[k:])
    out = np.zeros((rows, cols), dtype=complex)
    for idx in np.ndindex(*shape):
        r = 0
        mult = 1
        for j in range(k):
            r += idx[j] * mult
            mult *= shape[j]
        c = 0
        mult = 1
        for j in range(k, len(shape)):
            c += idx[j] * mult
            mult *= shape[j]
        out[r, c] = a[idx]
    return out


def dense_from_cores(cores) -> np.ndarray:
    """Reference densification by explicit chain products per entry."""
    shape = tuple(c.shape[1] for c in cores)
    out = np.zeros(shape, dtype=complex)
    for idx in np.ndindex(*shape):
        v = np.eye(1, dtype=complex)
        for k, c in enumerate(cores):
            v = v @ c[:, idx[k], :]
        out[idx] = v[0, 0]
    return out


def left_unfold(core: np.ndarray) -> np.ndarray:
    ra, n, rb = core.shape
    return core.reshape(ra * n, rb, order="F")


def right_unfold(core: np.ndarray) -> np.ndarray:
    ra, n, rb = core.shape
    return core.reshape(ra, n * rb, order="F")


def random_dense(shape, rng, real=False):
    if real:
        return rng.standard_normal(shape).astype(np.complex128)
    return crandn(shape, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def tt_from_dense_by_svd(a: np.ndarray, ranks) -> TTTensor:
    """Independent sequential-SVD reference (no shared code with tt_svd)."""
    shape = a.shape
    d = len(shape)
    c = np.array(a, dtype=complex)
    cores = []
    rprev = 1
    for k in range(d - 1):
        m = c.reshape(rprev * shape[k], -1, order="F")
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        r = ranks[k + 1]
        cores.append(u[:, :r].reshape(rprev, shape[k], r, order="F"))
        c = (np.diag(s[:r]) @ vh[:r]).reshape((r,) + shape[k + 1:], order="F")
        rprev = r
    cores.append(c.reshape(rprev, shape[-1], 1))
    return TTTensor(cores)
