"""Material matrix, capacitance matrix and the symmetric finite Jacobi matrix.

Resonators are indexed 0..N-1 throughout. With lengths l_i, trailing gaps
s_i and wave speeds v_i, the material matrix is V = diag(v_i^2 / l_i) and C
is the tridiagonal capacitance matrix built from the N-1 interior gaps. The
finite spectral problem is the symmetric J_N = V^(1/2) C V^(1/2), which is
tridiagonal with

    a_i = -v_i v_{i+1} / (s_i sqrt(l_i l_{i+1}))            (off-diagonal)
    b_i = (v_i^2 / l_i) (1/s_{i-1} + 1/s_i)                 (interior)
    b_0 = v_0^2 / (l_0 s_0),   b_{N-1} = v_{N-1}^2 / (l_{N-1} s_{N-2})

The trailing gap of the last resonator never enters the finite matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from blockspec.blocks import ResonatorSequence, ValidationError

__all__ = [
    "Tridiagonal",
    "assemble_capacitance",
    "assemble_material",
    "assemble_jacobi_finite",
    "subwavelength_frequency",
]


@dataclass(frozen=True)
class Tridiagonal:
    """Symmetric tridiagonal matrix: diagonal ``diag``, off-diagonal ``offdiag``."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=np.float64)
        e = np.array(self.offdiag, dtype=np.float64)
        if d.ndim != 1 or d.size < 1:
            raise ValidationError("diagonal must be a nonempty 1-d array")
        if e.shape != (d.size - 1,):
            raise ValidationError("off-diagonal must have length N-1")
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        mat = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        mat[idx, idx + 1] = self.offdiag
        mat[idx + 1, idx] = self.offdiag
        return mat

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def norm_inf(self) -> float:
        pad = np.concatenate(([0.0], np.abs(self.offdiag), [0.0]))
        return float(np.max(np.abs(self.diag) + pad[:-1] + pad[1:]))

    def to_dict(self) -> dict:
        return {"diag": self.diag.tolist(), "offdiag": self.offdiag.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Tridiagonal":
        return cls(np.array(data["diag"]), np.array(data["offdiag"]))

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")


def assemble_capacitance(spacings) -> Tridiagonal:
    """Capacitance matrix from the N-1 interior gaps; row sums are zero."""
    s = np.asarray(spacings, dtype=np.float64)
    if s.size < 1:
        raise ValidationError("need at least one gap (N >= 2)")
    if np.any(s <= 0.0) or not np.all(np.isfinite(s)):
        raise ValidationError("all gaps must be positive and finite")
    inv = 1.0 / s
    diag = np.concatenate(([inv[0]], inv[:-1] + inv[1:], [inv[-1]]))
    return Tridiagonal(diag, -inv)


def assemble_material(resonators: ResonatorSequence) -> np.ndarray:
    """Diagonal of the material matrix, entries v_i^2 / l_i."""
    if len(resonators) == 0:
        raise ValidationError("empty resonator sequence")
    v = resonators.wave_speeds
    ell = resonators.lengths
    return v * v / ell


def assemble_jacobi_finite(resonators: ResonatorSequence) -> Tridiagonal:
    """Symmetric finite Jacobi matrix V^(1/2) C V^(1/2) with physical edges."""
    n = len(resonators)
    if n < 2:
        raise ValidationError("finite Jacobi matrix needs N >= 2 resonators")
    ell = resonators.lengths
    s = resonators.spacings
    v = resonators.wave_speeds
    inv = 1.0 / s[:-1]
    offdiag = -v[:-1] * v[1:] * inv / np.sqrt(ell[:-1] * ell[1:])
    weight = v * v / ell
    diag = np.empty(n)
    diag[0] = weight[0] * inv[0]
    diag[-1] = weight[-1] * inv[-1]
    if n > 2:
        diag[1:-1] = weight[1:-1] * (inv[:-1] + inv[1:])
    return Tridiagonal(diag, offdiag)


def subwavelength_frequency(lam: float, delta: float) -> float:
    """Leading-order resonant frequency sqrt(delta * lambda)."""
    if lam < 0.0:
        raise ValidationError("lambda must be nonnegative")
    if not 0.0 < delta:
        raise ValidationError("contrast delta must be positive")
    return math.sqrt(delta * lam)
