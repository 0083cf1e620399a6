"""Per-frequency spectral classification of a block library.

A frequency lies in the spectrum of every (pseudo-ergodic) chain built from
the library iff some block propagation matrix has |trace| <= 2. If all
traces exceed 2 in magnitude and the family passes the source-sink plus
invariant-cone certification, the frequency is a certified spectral gap for
every chain. Otherwise the verdict is Indeterminate: the certificate is
sufficient, not necessary, and the classifier never claims a gap it cannot
certify. The verdict depends only on the library, not on any particular
block sequence.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from blockspec.blocks import BlockLibrary, ValidationError, expand_blocks, sample_iid
from blockspec.capacitance import assemble_jacobi_finite
from blockspec.cocycle import block_propagation
from blockspec.eigen import Spectrum, eigenvalues
from blockspec.projective import (
    Arc,
    NotHyperbolicError,
    invariant_cone,
    source_sink_condition,
)

__all__ = [
    "Verdict",
    "SpectralVerdict",
    "BandInterval",
    "BandReport",
    "classify_frequency",
    "scan",
    "finite_size_probe",
]


class Verdict(str, Enum):
    IN_SPECTRUM = "InSpectrum"
    CERTIFIED_GAP = "CertifiedGap"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SpectralVerdict:
    lam: float
    verdict: Verdict
    traces: tuple[float, ...]
    nonhyperbolic_blocks: tuple[int, ...]  # 1-based indices with |trace| <= 2
    sink_component: Arc | None = None
    cone: Arc | None = None


@dataclass(frozen=True)
class BandInterval:
    lo: float
    hi: float
    verdict: Verdict
    nonhyperbolic_blocks: tuple[int, ...]  # sampled at the interval midpoint


@dataclass(frozen=True)
class BandReport:
    intervals: tuple[BandInterval, ...]
    endpoints: tuple[float, ...]

    def covers(self, lam: float) -> bool:
        return self.intervals[0].lo <= lam <= self.intervals[-1].hi

    def verdict_at(self, lam: float) -> Verdict:
        for iv in self.intervals:
            if iv.lo <= lam <= iv.hi:
                return iv.verdict
        raise ValueError(f"lambda {lam} outside the scanned range")

    def intervals_with(self, verdict: Verdict) -> tuple[BandInterval, ...]:
        return tuple(iv for iv in self.intervals if iv.verdict == verdict)

    def to_dict(self) -> dict:
        return {
            "intervals": [
                {
                    "lambda_lo": iv.lo,
                    "lambda_hi": iv.hi,
                    "verdict": iv.verdict.value,
                    "nonhyperbolic_blocks": list(iv.nonhyperbolic_blocks),
                }
                for iv in self.intervals
            ],
            "endpoints": list(self.endpoints),
        }

    def to_json(self, path, meta: dict | None = None) -> None:
        payload = self.to_dict()
        if meta:
            payload.update(meta)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    def to_csv(self, path, meta_comment: str | None = None) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if meta_comment:
                fh.write(f"# {meta_comment}\r\n")
            writer = csv.writer(fh)
            writer.writerow(["lambda_lo", "lambda_hi", "verdict"])
            for iv in self.intervals:
                writer.writerow([repr(iv.lo), repr(iv.hi), iv.verdict.value])


def classify_frequency(library: BlockLibrary, lam: float) -> SpectralVerdict:
    """Classify one frequency from the block propagation matrix family."""
    if lam < 0.0:
        raise ValidationError("lambda must be nonnegative")
    mats = [block_propagation(b, lam) for b in library.blocks]
    traces = tuple(float(np.trace(m)) for m in mats)
    nonhyp = tuple(d + 1 for d, t in enumerate(traces) if abs(t) <= 2.0)
    if nonhyp:
        return SpectralVerdict(lam, Verdict.IN_SPECTRUM, traces, nonhyp)
    try:
        ss = source_sink_condition(mats)
    except NotHyperbolicError:
        # hyperbolic in trace but numerically too close to the boundary
        return SpectralVerdict(lam, Verdict.INDETERMINATE, traces, ())
    if not ss.holds:
        return SpectralVerdict(lam, Verdict.INDETERMINATE, traces, ())
    cone = invariant_cone(mats)
    if cone is None:
        return SpectralVerdict(lam, Verdict.INDETERMINATE, traces, ())
    return SpectralVerdict(
        lam,
        Verdict.CERTIFIED_GAP,
        traces,
        (),
        sink_component=ss.sink_component,
        cone=cone,
    )


def scan(
    library: BlockLibrary,
    lambda_min: float,
    lambda_max: float,
    grid: int = 1000,
    refine_tol: float = 1e-10,
) -> BandReport:
    """Classify a frequency range and refine the verdict boundaries.

    Grid verdicts are merged into runs; each boundary between differing
    verdicts is sharpened by bisecting the verdict predicate down to
    ``refine_tol``, which pins the trace-equation roots |trace| = 2 to the
    same tolerance.
    """
    if not (0.0 <= lambda_min < lambda_max):
        raise ValidationError("need 0 <= lambda_min < lambda_max")
    if grid < 2:
        raise ValidationError("grid must have at least 2 points")
    lams = np.linspace(lambda_min, lambda_max, grid)
    verdicts = [classify_frequency(library, float(l)).verdict for l in lams]

    def in_spectrum(lam: float) -> bool:
        return any(
            abs(np.trace(block_propagation(b, lam))) <= 2.0 for b in library.blocks
        )

    # boundary between grid neighbours with different verdicts
    cuts: list[float] = [lambda_min]
    cut_verdicts: list[Verdict] = [verdicts[0]]
    for k in range(1, grid):
        if verdicts[k] != verdicts[k - 1]:
            lo, hi = float(lams[k - 1]), float(lams[k])
            left = verdicts[k - 1]
            if (left == Verdict.IN_SPECTRUM) != (verdicts[k] == Verdict.IN_SPECTRUM):
                # band boundary: bisect the exact trace condition |trace| = 2
                keep_left = left == Verdict.IN_SPECTRUM

                def predicate(lam: float) -> bool:
                    return in_spectrum(lam) == keep_left

            else:
                # certification boundary: bisect the full verdict
                def predicate(lam: float) -> bool:
                    return classify_frequency(library, lam).verdict == left

            while hi - lo > refine_tol:
                mid = 0.5 * (lo + hi)
                if predicate(mid):
                    lo = mid
                else:
                    hi = mid
            cuts.append(0.5 * (lo + hi))
            cut_verdicts.append(verdicts[k])
    cuts.append(lambda_max)

    intervals = []
    for j in range(len(cut_verdicts)):
        lo, hi = cuts[j], cuts[j + 1]
        mid = 0.5 * (lo + hi)
        detail = classify_frequency(library, mid)
        intervals.append(BandInterval(lo, hi, cut_verdicts[j], detail.nonhyperbolic_blocks))
    return BandReport(tuple(intervals), tuple(cuts[1:-1]))


@lru_cache(maxsize=256)
def _sampled_spectrum(library: BlockLibrary, m: int, seed: int) -> Spectrum:
    seq = sample_iid(library, m, seed)
    jac = assemble_jacobi_finite(expand_blocks(library, seq))
    return eigenvalues(jac, tol=1e-11)


def finite_size_probe(library: BlockLibrary, lam: float, sizes, seeds) -> list[float]:
    """Distances from ``lam`` to sampled finite spectra, one per (size, seed).

    The empirical finite-section oracle for the classifier: distances stay
    bounded below on certified gaps and shrink to zero inside the spectrum.
    """
    out = []
    for m in sizes:
        for seed in seeds:
            out.append(_sampled_spectrum(library, int(m), int(seed)).distance(lam))
    return out
