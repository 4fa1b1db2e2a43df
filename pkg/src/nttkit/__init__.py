"""nttkit: unit-norm tensor-train decompositions, Riemannian optimization,
and the sampled-recovery / extreme-eigenvalue / quantum-entropy applications
built on them."""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: F401
