"""Edge modes of semi-infinite block chains.

Inside a certified gap the propagation cocycle is uniformly hyperbolic, so
the set of initial data giving decaying solutions is a single projective
direction s(0): the most-contracted right-singular direction of the forward
product over the sequence. A point-mass edge mode exists at frequencies
where the Neumann boundary datum (1, 0) lies in s(0); the signed sine of
the angle between them is a continuous indicator whose simple zeros are
edge-mode frequencies.
"""

from __future__ import annotations

import importlib.resources
import json
import math
from dataclasses import dataclass

import numpy as np

from blockspec import kernels
from blockspec.blocks import (
    BlockLibrary,
    BlockSequence,
    ResonatorSequence,
    expand_blocks,
    sample_iid,
)
from blockspec.capacitance import assemble_jacobi_finite
from blockspec.classify import Verdict, classify_frequency, scan
from blockspec.cocycle import block_propagation, conjugacy, propagation_matrix
from blockspec.projective import ProjectivePoint, proj_distance, source_sink_condition

__all__ = [
    "StableDirection",
    "EdgeMode",
    "EdgeModeError",
    "stable_direction",
    "edge_mode_indicator",
    "find_edge_modes",
    "exclusion_check",
    "coburn_check",
    "search_edge_mode_library",
    "edge_mode_fixture",
]

_RATIO_MIN = 1e8  # singular-value separation certifying contraction
_CHECKPOINT = 20  # blocks between direction checkpoints


class EdgeModeError(RuntimeError):
    """Stable direction did not converge within the available sequence."""


@dataclass(frozen=True)
class StableDirection:
    point: ProjectivePoint
    singular_ratio: float
    depth_used: int
    contraction_rate: float  # per-step geometric estimate, < 1 in a gap


@dataclass(frozen=True)
class EdgeMode:
    lam: float
    indicator_residual: float
    eigenvector: np.ndarray
    decay_rate: float
    fit_residual: float
    truncation_residual: float


def _stable_from_factors(factors: np.ndarray, tol: float) -> StableDirection:
    """Most-contracted right-singular direction of the growing product.

    ``factors[k]`` is applied k-th (leftmost factor of the final product is
    ``factors[-1]``). Converged when the singular ratio exceeds 1e8 and the
    direction moves by less than ``tol`` over one more checkpoint window.
    """
    n = factors.shape[0]
    acc = np.eye(2)
    log_scale = 0.0
    prev_angle = None
    depth = 0
    while depth < n:
        chunk = factors[depth : depth + _CHECKPOINT]
        head, log_head = kernels.product_renorm(list(chunk))
        acc = head @ acc
        norm = np.abs(acc).max()
        if norm == 0.0 or not np.isfinite(norm):
            raise EdgeModeError("product collapsed; frequency not in a gap?")
        acc /= norm
        log_scale += log_head + math.log(norm)
        depth += chunk.shape[0]
        _, sing, vt = np.linalg.svd(acc)
        if sing[1] == 0.0:
            ratio = np.inf
        else:
            ratio = sing[0] / sing[1]
        angle = math.atan2(vt[1, 1], vt[1, 0]) % math.pi
        if prev_angle is not None and ratio >= _RATIO_MIN:
            moved = proj_distance(ProjectivePoint(prev_angle), ProjectivePoint(angle))
            if moved < tol:
                point = ProjectivePoint(angle)
                rate = _forward_decay_rate(factors, point, depth)
                return StableDirection(point, float(ratio), depth, rate)
        prev_angle = angle
    raise EdgeModeError(
        f"stable direction not converged after {n} factors; "
        "sequence too short or frequency too close to a band edge"
    )


def _forward_decay_rate(factors: np.ndarray, point: ProjectivePoint, depth: int) -> float:
    """Geometric per-step decay of the orbit of the stable direction.

    Tracking stops once the accumulated contraction nears the float noise
    floor, where rounding re-injects the expanding mode.
    """
    w = point.vector()
    log_total = 0.0
    best_log, best_step = 0.0, 0
    for k in range(depth):
        w = factors[k] @ w
        nrm = float(np.hypot(w[0], w[1]))
        if nrm == 0.0:
            break
        w /= nrm
        log_total += math.log(nrm)
        if log_total < best_log:
            best_log, best_step = log_total, k + 1
        if log_total < -17.0 or log_total > best_log + 3.0:
            break
    if best_step == 0:
        return 1.0
    return math.exp(best_log / best_step)


def _block_factor_chain(
    library: BlockLibrary, seq: BlockSequence, lam: float
) -> np.ndarray:
    mats = [block_propagation(b, lam) for b in library.blocks]
    return np.array([mats[d - 1] for d in seq.indices])


def _resonator_factor_chain(rs: ResonatorSequence, lam: float) -> np.ndarray:
    return np.array([propagation_matrix(r, lam) for r in rs.resonators])


def stable_direction(
    library: BlockLibrary, seq: BlockSequence, lam: float, tol: float = 1e-9
) -> StableDirection:
    """Stable direction s(0) of the forward cocycle at frequency ``lam``."""
    seq.validate(library)
    return _stable_from_factors(_block_factor_chain(library, seq, lam), tol)


def _signed_sine(point: ProjectivePoint) -> float:
    # map the angle to (-pi/2, pi/2] so the boundary direction (1, 0) sits
    # at the interior zero of sin; the jump point is the line (0, 1)
    theta = point.angle
    if theta > math.pi / 2:
        theta -= math.pi
    return math.sin(theta)


def edge_mode_indicator(
    library: BlockLibrary, seq: BlockSequence, lam: float, tol: float = 1e-9
) -> float:
    """Signed sine of the angle between (1, 0) and the stable direction.

    Continuous in ``lam`` except where the stable direction crosses the
    vertical line, where it jumps between -1 and 1; zeros are edge modes.
    """
    return _signed_sine(stable_direction(library, seq, lam, tol=tol).point)


def _indicator_from_factors(factors: np.ndarray, tol: float = 1e-9) -> float:
    return _signed_sine(_stable_from_factors(factors, tol).point)


def _require_certified_gap(library: BlockLibrary, gap: tuple[float, float]) -> None:
    lo, hi = gap
    if not lo < hi:
        raise ValueError("empty gap interval")
    for lam in (lo, 0.5 * (lo + hi), hi):
        verdict = classify_frequency(library, lam).verdict
        if verdict != Verdict.CERTIFIED_GAP:
            raise ValueError(
                f"gap probe at lambda={lam} classified as {verdict.value}"
            )


def _bisect_indicator_root(fn, lo, hi, f_lo, f_hi, lam_tol=1e-10):
    """Sign-change bisection; returns (root, value at root)."""
    best = (lo, f_lo) if abs(f_lo) < abs(f_hi) else (hi, f_hi)
    while hi - lo > lam_tol:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if abs(f_mid) < abs(best[1]):
            best = (mid, f_mid)
        if f_mid == 0.0:
            return mid, 0.0
        if (f_lo < 0.0) != (f_mid < 0.0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    # polish: keep halving on sign until the indicator itself is tiny or
    # the bracket hits rounding; distinguishes roots from jump points
    for _ in range(60):
        if abs(best[1]) <= 1e-14:
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f_mid = fn(mid)
        if abs(f_mid) < abs(best[1]):
            best = (mid, f_mid)
        if (f_lo < 0.0) != (f_mid < 0.0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return best


def _reconstruct_eigenvector(
    rs: ResonatorSequence, lam: float
) -> tuple[np.ndarray, float, float, float]:
    """Mode profile from the boundary datum (1, 0) propagated forward.

    Returns (eigenvector, decay_rate, fit_residual, truncation_residual).
    Entry i is recovered from the conjugacy Q(i) applied to the running
    cocycle vector; magnitudes are carried in log scale and rescaled by the
    global maximum so underflow never zeroes the tail.
    """
    res = rs.resonators
    n = len(res)
    comps = np.zeros(n)
    logs = np.full(n, -np.inf)
    w = np.array([1.0, 0.0])
    log_w = 0.0
    log_track = np.empty(n - 1)
    # beyond the float noise floor the expanding mode (seeded by rounding)
    # overtakes the decaying one; entries there are set to zero, which is
    # where the true mode sits to working precision anyway
    k_cut = n - 1
    for i in range(1, n):
        w = propagation_matrix(res[i - 1], lam) @ w
        nrm = float(np.hypot(w[0], w[1]))
        if nrm == 0.0:
            raise EdgeModeError("cocycle vector vanished during reconstruction")
        w /= nrm
        log_w += math.log(nrm)
        log_track[i - 1] = log_w
        if i > 1 and log_w > log_track[: i - 1].min() + 1.0:
            k_cut = i - 1
            break
        q = conjugacy(res[i], res[i - 1])
        pair = np.linalg.solve(q, w)
        comps[i] = pair[0]
        logs[i] = log_w
    jac = assemble_jacobi_finite(rs)
    # first-resonator alignment: v_0 is bootstrapped from the boundary row
    # (b_0 - lam) v_0 + a_0 v_1 = 0 of the physical truncation
    gap0 = jac.diag[0] - lam
    if abs(gap0) > 1e-12 * jac.norm_inf():
        comps[0] = -jac.offdiag[0] * comps[1] / gap0
    else:
        pair = np.linalg.solve(
            conjugacy(res[1], res[0]),
            propagation_matrix(res[0], lam) @ np.array([1.0, 0.0]),
        )
        comps[0] = pair[1]
    logs[0] = logs[1]
    log_max = logs[np.isfinite(logs)].max()
    with np.errstate(under="ignore"):
        vec = comps * np.exp(logs - log_max)
    vec[~np.isfinite(vec)] = 0.0
    nrm = float(np.linalg.norm(vec))
    vec /= nrm

    # per-resonator decay from the log-linear trend of the cocycle norm,
    # sampled at block boundaries so intra-block structure does not enter;
    # the fit stops a few e-foldings above the noise floor, where the track
    # bends away from the linear decay
    floor = log_track[:k_cut].min() + 4.0
    while k_cut > 1 and log_track[k_cut - 1] < floor:
        k_cut -= 1
    offs = [o for o in rs.block_offsets if 1 <= o <= k_cut]
    if len(offs) >= 3:
        idx = np.array(offs, dtype=float)
        track = log_track[np.array(offs) - 1]
    else:
        idx = np.arange(1.0, k_cut + 1)
        track = log_track[:k_cut]
    if idx.size < 3:
        raise EdgeModeError("no decaying window; frequency is not an edge mode")
    slope, intercept = np.polyfit(idx, track, 1)
    fit_residual = float(np.sqrt(np.mean((track - (slope * idx + intercept)) ** 2)))
    decay_rate = math.exp(slope)

    resid = jac.matvec(vec) - lam * vec
    truncation_residual = float(np.linalg.norm(resid[: n - 2]))
    return vec, decay_rate, fit_residual, truncation_residual


def find_edge_modes(
    library: BlockLibrary,
    seq: BlockSequence,
    gap: tuple[float, float],
    grid: int = 200,
    truncation: int = 400,
    lam_tol: float = 1e-10,
) -> list[EdgeMode]:
    """Edge-mode frequencies of the chain ``seq`` inside a certified gap.

    Brackets sign changes of the indicator on a grid over the open gap,
    bisects each to ``lam_tol``, and keeps only genuine zeros (the
    indicator also flips sign, with value near +-1, when the stable
    direction crosses the vertical line; those brackets are discarded).
    """
    seq.validate(library)
    _require_certified_gap(library, gap)
    lo, hi = gap
    pad = 1e-4 * (hi - lo)
    lams = np.linspace(lo + pad, hi - pad, grid)

    def fn(lam):
        return edge_mode_indicator(library, seq, lam)

    values = np.array([fn(lam) for lam in lams])
    modes: list[EdgeMode] = []
    rs = expand_blocks(library, seq)
    if len(rs.resonators) < truncation:
        raise ValueError(
            f"sequence expands to {len(rs.resonators)} resonators; "
            f"need at least {truncation} for reconstruction"
        )
    rs_trunc = ResonatorSequence(
        rs.resonators[:truncation],
        tuple(o for o in rs.block_offsets if o < truncation),
    )
    for k in range(grid - 1):
        if (values[k] < 0.0) == (values[k + 1] < 0.0):
            continue
        if abs(values[k]) > 0.98 and abs(values[k + 1]) > 0.98:
            continue  # jump through the vertical line, not a zero
        root, val = _bisect_indicator_root(
            fn, lams[k], lams[k + 1], values[k], values[k + 1], lam_tol
        )
        if abs(val) > 1e-10:
            continue  # bracket closed on a discontinuity
        vec, rate, fit_res, trunc_res = _reconstruct_eigenvector(rs_trunc, root)
        modes.append(EdgeMode(root, abs(val), vec, rate, fit_res, trunc_res))
    return modes


def exclusion_check(library: BlockLibrary, lam: float) -> bool:
    """True when no sequence of the library admits an edge mode at ``lam``.

    In a certified gap every half-line stable direction lies in the source
    component of the source-sink decomposition. If the boundary direction
    (1, 0) lies strictly inside the sink component it cannot coincide with
    any stable direction, so no indicator can vanish, uniformly over all
    sequences.
    """
    mats = [block_propagation(b, lam) for b in library.blocks]
    result = source_sink_condition(mats)
    if not result.holds:
        raise ValueError(
            f"source-sink condition fails at lambda={lam}; not a certified gap"
        )
    return result.sink_component.contains(ProjectivePoint(0.0), margin=1e-9)


def coburn_check(
    library: BlockLibrary,
    seq_plus: BlockSequence,
    gap: tuple[float, float],
    grid: int = 2000,
    threshold: float = 1e-8,
) -> tuple[bool, float]:
    """No frequency in the gap carries an edge mode on both half-lines.

    The right half-line indicator is computed from the reflected resonator
    sequence. Returns (holds, min over the grid of max(|left|, |right|));
    ``holds`` is True when that minimum stays above ``threshold``.
    """
    seq_plus.validate(library)
    _require_certified_gap(library, gap)
    rs = expand_blocks(library, seq_plus)
    rs_ref = rs.reflected()
    lo, hi = gap
    pad = 1e-6 * (hi - lo)
    lams = np.linspace(lo + pad, hi - pad, grid)
    worst = np.inf
    for lam in lams:
        left = _indicator_from_factors(_resonator_factor_chain(rs, lam))
        if abs(left) >= threshold:
            worst = min(worst, max(abs(left), threshold))
            continue
        right = _indicator_from_factors(_resonator_factor_chain(rs_ref, lam))
        both = max(abs(left), abs(right))
        worst = min(worst, both)
        if both < threshold:
            return False, worst
    return True, worst


def search_edge_mode_library(
    base: BlockLibrary,
    budget: float = 0.25,
    attempts: int = 50,
    seed: int = 0,
    num_blocks: int = 600,
) -> BlockLibrary | None:
    """Random perturbation search for a library exhibiting an edge mode.

    Lengths and spacings of ``base`` are jittered multiplicatively within
    ``budget``; a candidate is accepted when some certified gap of the
    perturbed library contains an indicator sign change (away from the
    indicator's jump points) for an i.i.d. sequence.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    for _ in range(attempts):
        lib = _perturb(base, rng, budget)
        # pure block words probe each block's own boundary behavior; the
        # i.i.d. word probes a generic sequence of the same library
        candidates = [
            BlockSequence((d,) * num_blocks, "periodic")
            for d in range(1, lib.num_blocks + 1)
        ]
        candidates.append(sample_iid(lib, num_blocks, seed=seed + 7))
        report = scan(lib, 0.0, 5.0, grid=400)
        for iv in report.intervals_with(Verdict.CERTIFIED_GAP):
            if iv.hi - iv.lo < 0.05:
                continue
            lams = np.linspace(iv.lo + 0.02 * (iv.hi - iv.lo),
                               iv.hi - 0.02 * (iv.hi - iv.lo), 40)
            for seq in candidates:
                vals: list[float | None] = []
                for lam in lams:
                    try:
                        vals.append(edge_mode_indicator(lib, seq, lam))
                    except EdgeModeError:
                        vals.append(None)
                for k in range(len(vals) - 1):
                    a, b = vals[k], vals[k + 1]
                    if a is None or b is None:
                        continue
                    if (a < 0.0) != (b < 0.0) and (abs(a) < 0.9 or abs(b) < 0.9):
                        return lib
    return None


def _perturb(base: BlockLibrary, rng, budget: float) -> BlockLibrary:
    from blockspec.blocks import Block, Resonator

    blocks = []
    for b in base.blocks:
        rs = []
        for r in b.resonators:
            rs.append(
                Resonator(
                    r.length * (1.0 + budget * rng.uniform(-1.0, 1.0)),
                    r.spacing * (1.0 + budget * rng.uniform(-1.0, 1.0)),
                    r.wave_speed,
                )
            )
        blocks.append(Block(tuple(rs)))
    return BlockLibrary(tuple(blocks), base.probabilities)


def edge_mode_fixture() -> dict:
    """Pinned library, sequence, and gap known to host one edge mode."""
    data = (
        importlib.resources.files("blockspec") / "fixtures" / "edge_mode.json"
    ).read_text(encoding="utf-8")
    raw = json.loads(data)
    return {
        "library": BlockLibrary.from_dict(raw["library"]),
        "sequence": BlockSequence(tuple(raw["sequence"]), raw.get("provenance", "fixture")),
        "gap": (raw["gap"][0], raw["gap"][1]),
        "root": raw["root"],
    }
