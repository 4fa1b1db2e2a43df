"""JSON serialization of TT tensors and complex matrices.

A TT tensor is stored as::

    {
      "shape": [n_1, ..., n_d],
      "ranks": [1, r_1, ..., r_{d-1}, 1],
      "orth": null | "left" | "right" | k,
      "cores": [ [[re, im], ...], ... ]
    }

where the k-th entry of "cores" flattens the (r_{k-1}, n_k, r_k) core in
column-major order (first axis fastest) into [re, im] pairs. Complex matrices
(operator factors, Kraus operators) are stored as nested row lists of
[re, im] pairs.
"""

from __future__ import annotations

import json

import numpy as np

from .tensor_train import TTTensor


def _complex_list(a: np.ndarray) -> list:
    flat = np.asarray(a, dtype=np.complex128).reshape(-1, order="F")
    return [[float(z.real), float(z.imag)] for z in flat]


def _complex_array(pairs, shape) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    return flat.reshape(shape, order="F")


def tt_to_dict(x: TTTensor) -> dict:
    orth = x.orth if (x.orth is None or isinstance(x.orth, (str, int))) else None
    return {
        "shape": [int(n) for n in x.shape],
        "ranks": [int(r) for r in x.ranks],
        "orth": orth,
        "cores": [_complex_list(c) for c in x.cores],
    }


def tt_from_dict(d: dict) -> TTTensor:
    shape = d["shape"]
    ranks = d["ranks"]
    cores = []
    for k, pairs in enumerate(d["cores"]):
        cores.append(_complex_array(pairs, (ranks[k], shape[k], ranks[k + 1])))
    return TTTensor(cores, orth=d.get("orth"))


def save_tt(x: TTTensor, path) -> None:
    with open(path, "w") as f:
        json.dump(tt_to_dict(x), f)


def load_tt(path) -> TTTensor:
    with open(path) as f:
        return tt_from_dict(json.load(f))


def matrix_to_lists(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_lists(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows],
                    dtype=np.complex128)
