"""Transfer matrices, propagation matrices and renormalized cocycle products.

2x2 matrices are plain float64 numpy arrays. The propagation matrix of a
resonator (l, s, v) at frequency parameter ``lam`` is

    [[1 - s*l*lam/v^2, s], [-l*lam/v^2, 1]]

with determinant exactly 1; it advances the (value, derivative) pair across
one resonator. Block propagation matrices multiply the constituent
resonator matrices with the first resonator applied first, i.e. as the
rightmost factor, matching the forward cocycle iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from blockspec import kernels
from blockspec.blocks import Block, Resonator

__all__ = [
    "propagation_matrix",
    "transfer_matrix",
    "conjugacy",
    "block_propagation",
    "block_propagation_trace",
    "IteratedProduct",
    "iterate",
]


def propagation_matrix(r: Resonator, lam: float) -> np.ndarray:
    """SL(2,R) matrix propagating (value, derivative) across one resonator."""
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    c = r.length * lam / (r.wave_speed * r.wave_speed)
    return np.array([[1.0 - r.spacing * c, r.spacing], [-c, 1.0]])


def transfer_matrix(a_prev: float, a_cur: float, b_cur: float, lam: float) -> np.ndarray:
    """Jacobi cocycle map advancing consecutive solution entries by one site."""
    if a_cur == 0.0:
        raise ValueError("off-diagonal entry a_cur must be nonzero")
    return np.array([[(lam - b_cur) / a_cur, -a_prev / a_cur], [1.0, 0.0]])


def conjugacy(r_cur: Resonator, r_prev: Resonator) -> np.ndarray:
    """Change of basis from solution-entry pairs to (value, derivative) pairs.

    Depends on the resonator at the current site and its left neighbour
    (whose trailing gap separates the two).
    """
    s_prev = r_prev.spacing
    return np.array(
        [
            [r_cur.wave_speed / np.sqrt(r_cur.length), 0.0],
            [
                r_cur.wave_speed / (np.sqrt(r_cur.length) * s_prev),
                -r_prev.wave_speed / (np.sqrt(r_prev.length) * s_prev),
            ],
        ]
    )


def block_propagation(b: Block, lam: float) -> np.ndarray:
    """Product of a block's resonator matrices, first resonator rightmost."""
    acc = np.eye(2)
    for r in b.resonators:
        acc = propagation_matrix(r, lam) @ acc
    return acc


def block_propagation_trace(b: Block, lam: float) -> float:
    return float(np.trace(block_propagation(b, lam)))


@dataclass(frozen=True)
class IteratedProduct:
    """Renormalized cocycle product: true product = exp(log_scale) * matrix."""

    matrix: np.ndarray
    log_scale: float

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.float64)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls) -> "IteratedProduct":
        return cls(np.eye(2), 0.0)

    def reconstruct(self) -> np.ndarray:
        return np.exp(self.log_scale) * self.matrix

    def apply(self, vec: np.ndarray) -> tuple[np.ndarray, float]:
        """Image of ``vec`` as (renormalized vector, log magnitude)."""
        w = self.matrix @ np.asarray(vec, dtype=np.float64)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            raise FloatingPointError("cocycle product annihilated the vector")
        return w / norm, self.log_scale + float(np.log(norm))


def iterate(
    source: Callable[[int], np.ndarray] | Sequence[np.ndarray],
    start: int,
    n: int,
) -> IteratedProduct:
    """Cocycle iteration from index ``start`` over ``n`` steps.

    ``n > 0`` multiplies the factors at start, start+1, ..., start+n-1 with
    later factors on the left; ``n < 0`` multiplies the inverses of the
    factors at start-1 down to start+n, with the factor at start+n leftmost.
    ``n = 0`` is the identity. Per-step max-abs renormalization keeps the
    stored matrix bounded; the factored scale accumulates in ``log_scale``.
    """
    if not callable(source):
        seq = source
        source = lambda i: seq[i]  # noqa: E731
    if n == 0:
        return IteratedProduct.identity()
    if n > 0:
        mats = np.array([source(start + k) for k in range(n)])
    else:
        factors = []
        for i in range(start - 1, start + n - 1, -1):
            m = np.asarray(source(i), dtype=np.float64)
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            if det == 0.0 or not np.isfinite(det):
                raise FloatingPointError(f"singular cocycle factor at index {i}")
            factors.append(np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det)
        mats = np.array(factors)
    matrix, log_scale = kernels.product_renorm(mats)
    return IteratedProduct(matrix, log_scale)
