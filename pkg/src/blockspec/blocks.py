"""Resonator blocks, block libraries and block/resonator sequences.

A chain is built from a small library of building blocks, each a short list
of resonators ``(length, spacing, wave_speed)``. Block sequences index into
the library (1-based) and expand to resonator sequences. Sampling is
reproducible: sequences are drawn from a seeded counter-based generator
(NumPy Philox), so identical seeds give identical sequences on every
platform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Resonator",
    "Block",
    "BlockLibrary",
    "BlockSequence",
    "ResonatorSequence",
    "expand_blocks",
    "sample_iid",
    "pseudo_ergodic_word",
    "contains_all_words",
    "transition_matrix",
    "standard_library",
]


class ValidationError(ValueError):
    """Raised when a domain object violates its invariants."""


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Resonator:
    """One resonator: its length, the gap to the next resonator, wave speed."""

    length: float
    spacing: float
    wave_speed: float

    def __post_init__(self):
        object.__setattr__(self, "length", _check_positive("length", self.length))
        object.__setattr__(self, "spacing", _check_positive("spacing", self.spacing))
        object.__setattr__(
            self, "wave_speed", _check_positive("wave_speed", self.wave_speed)
        )


@dataclass(frozen=True)
class Block:
    """A nonempty ordered group of resonators."""

    resonators: tuple[Resonator, ...]

    def __post_init__(self):
        object.__setattr__(self, "resonators", tuple(self.resonators))
        if len(self.resonators) == 0:
            raise ValidationError("a block must contain at least one resonator")

    def __len__(self) -> int:
        return len(self.resonators)


@dataclass(frozen=True)
class BlockLibrary:
    """D blocks together with their sampling probabilities."""

    blocks: tuple[Block, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(
            self, "probabilities", tuple(float(p) for p in self.probabilities)
        )
        if len(self.blocks) == 0:
            raise ValidationError("library needs at least one block")
        if len(self.probabilities) != len(self.blocks):
            raise ValidationError("one probability per block required")
        if any(p <= 0.0 for p in self.probabilities):
            raise ValidationError("all sampling probabilities must be > 0")
        if abs(sum(self.probabilities) - 1.0) > 1e-12:
            raise ValidationError("sampling probabilities must sum to 1")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def to_dict(self) -> dict:
        return {
            "blocks": [
                [
                    {"length": r.length, "spacing": r.spacing, "wave_speed": r.wave_speed}
                    for r in b.resonators
                ]
                for b in self.blocks
            ],
            "probabilities": list(self.probabilities),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BlockLibrary":
        try:
            blocks = tuple(
                Block(tuple(Resonator(r["length"], r["spacing"], r["wave_speed"]) for r in b))
                for b in data["blocks"]
            )
            probs = tuple(data["probabilities"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed block library: {exc}") from exc
        return cls(blocks, probs)

    @classmethod
    def from_json(cls, path) -> "BlockLibrary":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def standard_library(p_single: float = 0.5) -> BlockLibrary:
    """Monomer + dimer reference library.

    Block 1 is a single resonator (2, 2, 1); block 2 a dimer
    (1, 1, 1), (1, 2, 1). Periodically repeated, both share the band [0, 1]
    and the dimer adds the band [2, 3].
    """
    single = Block((Resonator(2.0, 2.0, 1.0),))
    dimer = Block((Resonator(1.0, 1.0, 1.0), Resonator(1.0, 2.0, 1.0)))
    return BlockLibrary((single, dimer), (p_single, 1.0 - p_single))


@dataclass(frozen=True)
class BlockSequence:
    """Finite word of 1-based block indices plus how it was produced."""

    indices: tuple[int, ...]
    provenance: str = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def validate(self, library: BlockLibrary) -> None:
        for i in self.indices:
            if not 1 <= i <= library.num_blocks:
                raise ValidationError(
                    f"block index {i} out of range 1..{library.num_blocks}"
                )


@dataclass(frozen=True)
class ResonatorSequence:
    """Expanded chain of resonators with the start offset of each block."""

    resonators: tuple[Resonator, ...]
    block_offsets: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "resonators", tuple(self.resonators))
        object.__setattr__(self, "block_offsets", tuple(self.block_offsets))
        offs = self.block_offsets
        if any(offs[i] >= offs[i + 1] for i in range(len(offs) - 1)):
            raise ValidationError("block offsets must be strictly increasing")
        if offs and (offs[0] != 0 or offs[-1] >= len(self.resonators) + 1):
            raise ValidationError("block offsets inconsistent with resonator count")

    def __len__(self) -> int:
        return len(self.resonators)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([r.length for r in self.resonators])

    @property
    def spacings(self) -> np.ndarray:
        return np.array([r.spacing for r in self.resonators])

    @property
    def wave_speeds(self) -> np.ndarray:
        return np.array([r.wave_speed for r in self.resonators])

    def reflected(self) -> "ResonatorSequence":
        """Mirror image of the chain.

        Resonator order is reversed; the trailing gap of mirrored resonator k
        is the gap that sat to the *left* of its original. The first
        resonator's left gap has no mirror partner inside the chain, so the
        last mirrored resonator keeps its own spacing (unused by finite
        assembly anyway).
        """
        rs = self.resonators
        n = len(rs)
        out = []
        for k in range(n):
            orig = rs[n - 1 - k]
            spacing = rs[n - 2 - k].spacing if k < n - 1 else orig.spacing
            out.append(Resonator(orig.length, spacing, orig.wave_speed))
        return ResonatorSequence(tuple(out), ())


def expand_blocks(library: BlockLibrary, seq: BlockSequence) -> ResonatorSequence:
    """Concatenate the blocks selected by ``seq`` into one resonator chain."""
    seq.validate(library)
    resonators: list[Resonator] = []
    offsets: list[int] = []
    for idx in seq.indices:
        offsets.append(len(resonators))
        resonators.extend(library.blocks[idx - 1].resonators)
    return ResonatorSequence(tuple(resonators), tuple(offsets))


def sample_iid(library: BlockLibrary, m: int, seed: int) -> BlockSequence:
    """Draw ``m`` block indices i.i.d. with the library's probabilities."""
    if m < 0:
        raise ValidationError("sequence length must be >= 0")
    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.choice(library.num_blocks, size=m, p=np.array(library.probabilities))
    return BlockSequence(tuple(int(d) + 1 for d in draws), provenance=f"iid(seed={seed})")


def _de_bruijn(alphabet: int, order: int) -> list[int]:
    """Cyclic de Bruijn sequence over {0..alphabet-1} of the given order."""
    a = [0] * alphabet * order
    sequence: list[int] = []

    def db(t: int, p: int) -> None:
        if t > order:
            if order % p == 0:
                sequence.extend(a[1 : p + 1])
        else:
            a[t] = a[t - p]
            db(t + 1, p)
            for j in range(a[t - p] + 1, alphabet):
                a[t] = j
                db(t + 1, t)

    db(1, 1)
    return sequence


def pseudo_ergodic_word(d: int, k: int) -> BlockSequence:
    """Finite word over {1..d} containing every word of length <= k.

    Finite-depth stand-in for pseudo-ergodicity (an infinite-sequence
    property): a de Bruijn sequence of order ``k`` extended by its first
    ``k - 1`` letters so the cyclic wraparound words appear contiguously.
    """
    if d < 1 or k < 1:
        raise ValidationError("need d >= 1 and k >= 1")
    cyc = _de_bruijn(d, k)
    word = cyc + cyc[: k - 1]
    return BlockSequence(tuple(x + 1 for x in word), provenance=f"pseudo_ergodic(k={k})")


def contains_all_words(seq: BlockSequence | Sequence[int], d: int, k: int) -> bool:
    """True iff every word over {1..d} of length <= k occurs contiguously."""
    letters = tuple(seq.indices if isinstance(seq, BlockSequence) else seq)
    for j in range(1, k + 1):
        seen = {letters[i : i + j] for i in range(len(letters) - j + 1)}
        if len(seen) < d**j:
            return False
    return True


def transition_matrix(library: BlockLibrary) -> np.ndarray:
    """Row-stochastic transition matrix over resonator states (d, r).

    States are ordered lexicographically: all resonators of block 1, then
    block 2, etc. Inside a block the transition is deterministic; from the
    last resonator of a block the next block is drawn with the library's
    probabilities.
    """
    states = [
        (d, r) for d in range(library.num_blocks) for r in range(len(library.blocks[d]))
    ]
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    mat = np.zeros((n, n))
    starts = [index[(d, 0)] for d in range(library.num_blocks)]
    for (d, r), i in index.items():
        if r + 1 < len(library.blocks[d]):
            mat[i, index[(d, r + 1)]] = 1.0
        else:
            for dnext, p in enumerate(library.probabilities):
                mat[i, starts[dnext]] = p
    return mat
