"""Finite-system spectra and the spectral-inclusion check.

The spectrum of a finite chain is contained in the union of the
semi-infinite spectra over all one-sided sequences. Operationally that set
is over-approximated from the other side: certified gaps are the only
regions a finite eigenvalue must avoid, up to detected edge-mode
frequencies. The inclusion report errs conservatively — gaps only where
certified, edge sets only where roots were found — and flags eigenvalues
that sit strictly inside a certified gap away from every edge mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from blockspec.blocks import BlockLibrary, BlockSequence, expand_blocks
from blockspec.capacitance import assemble_jacobi_finite
from blockspec.classify import BandReport, Verdict
from blockspec.eigen import Spectrum, eigenvalues

__all__ = [
    "FiniteSpectrumResult",
    "InclusionReport",
    "finite_spectrum",
    "inclusion_check",
    "density_of_states",
]


@dataclass(frozen=True)
class FiniteSpectrumResult:
    library: BlockLibrary
    sequence: BlockSequence
    spectrum: Spectrum

    @property
    def num_resonators(self) -> int:
        return self.spectrum.eigenvalues.size


def finite_spectrum(
    library: BlockLibrary, seq: BlockSequence, tol: float = 1e-11
) -> FiniteSpectrumResult:
    """Eigenvalues of the symmetric finite Jacobi matrix of the chain."""
    jac = assemble_jacobi_finite(expand_blocks(library, seq))
    return FiniteSpectrumResult(library, seq, eigenvalues(jac, tol=tol))


@dataclass(frozen=True)
class InclusionReport:
    distances: np.ndarray  # per eigenvalue, distance to the allowed set
    flags: tuple[int, ...]  # indices violating the inclusion at tolerance
    tolerance: float


def inclusion_check(
    result: FiniteSpectrumResult,
    band_report: BandReport,
    edge_modes=(),
    tolerance: float = 1e-8,
) -> InclusionReport:
    """Distance of each eigenvalue to the allowed set.

    The allowed set is the union of all non-CertifiedGap intervals of the
    band report and the detected edge-mode frequencies. Eigenvalues farther
    than ``tolerance`` from it are flagged.
    """
    vals = result.spectrum.eigenvalues
    lo = band_report.intervals[0].lo - tolerance
    hi = band_report.intervals[-1].hi + tolerance
    if not (lo <= vals[0] and vals[-1] <= hi):
        raise ValueError("band report does not cover the eigenvalue range")
    allowed = [
        (iv.lo, iv.hi)
        for iv in band_report.intervals
        if iv.verdict != Verdict.CERTIFIED_GAP
    ]
    roots = [getattr(em, "lam", em) for em in edge_modes]
    distances = np.empty(vals.size)
    for i, lam in enumerate(vals):
        d = min((_interval_distance(lam, lo, hi) for lo, hi in allowed), default=np.inf)
        for r in roots:
            d = min(d, abs(lam - float(r)))
        distances[i] = d
    flags = tuple(int(i) for i in np.nonzero(distances > tolerance)[0])
    return InclusionReport(distances, flags, tolerance)


def _interval_distance(lam: float, lo: float, hi: float) -> float:
    if lam < lo:
        return lo - lam
    if lam > hi:
        return lam - hi
    return 0.0


def density_of_states(
    result: FiniteSpectrumResult, bins: int, value_range=None
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized eigenvalue histogram: (density, bin_edges)."""
    if bins < 1:
        raise ValueError("need at least one bin")
    hist, edges = np.histogram(
        result.spectrum.eigenvalues, bins=bins, range=value_range
    )
    total = hist.sum()
    weights = hist / total if total else hist.astype(float)
    return weights, edges
