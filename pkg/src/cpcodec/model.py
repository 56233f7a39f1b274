"""Probability models over coding-pair alphabets.

A model assigns each code an integer frequency n_i out of 2^N (N = 8 or 16),
a fixed payload width, and a semantic mapping (which exponent / value / run /
group the code stands for). Frequencies are produced from raw counts by a
largest-remainder normalizer; entropy accounting is done in double precision.

Models are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import AlphabetError, CapacityError, EmptyInputError

#: Hard cap on alphabet size, independent of precision.
MAX_CODES = 256

#: Probability precisions supported by the coder cores.
SUPPORTED_PRECISIONS = (8, 16)


class MappingKind(IntEnum):
    """Semantic role of a code; the serialized tag byte uses these values."""

    EXPONENT = 0
    DIRECT_VALUE = 1
    RUN_LENGTH = 2
    GROUP_MASK = 3
    INT_MAGNITUDE = 4
    # Same exponent as an EXPONENT code but marking a high-precision
    # ("important") value; having a distinct kind lets decoders recover the
    # importance flag from the code alone.
    EXPONENT_IMPORTANT = 5


@dataclass(frozen=True, slots=True)
class Mapping:
    """Tagged (kind, value) pair describing what a code stands for."""

    kind: MappingKind
    value: int

    @classmethod
    def exponent(cls, e: int, important: bool = False) -> "Mapping":
        kind = MappingKind.EXPONENT_IMPORTANT if important else MappingKind.EXPONENT
        return cls(kind, e)

    @classmethod
    def direct_value(cls, bits: int) -> "Mapping":
        """Code stands for a literal value, given as a 32-bit pattern."""
        return cls(MappingKind.DIRECT_VALUE, bits & 0xFFFFFFFF)

    @classmethod
    def run_length(cls, base: int) -> "Mapping":
        """Code stands for zero-runs of length in [base, 2*base) (base 0 -> run 0)."""
        return cls(MappingKind.RUN_LENGTH, base)

    @classmethod
    def group_mask(cls, mask: int) -> "Mapping":
        return cls(MappingKind.GROUP_MASK, mask & 0xFF)

    @classmethod
    def int_magnitude(cls, k: int) -> "Mapping":
        return cls(MappingKind.INT_MAGNITUDE, k)

    @property
    def important(self) -> bool:
        return self.kind == MappingKind.EXPONENT_IMPORTANT


@dataclass(frozen=True, slots=True)
class CodeSpec:
    """One code of a model: its normalized frequency, payload width, meaning."""

    code_index: int
    freq: int
    payload_bits: int
    mapping: Optional[Mapping] = None


@dataclass(frozen=True)
class FrequencyTable:
    """Raw occurrence counts over an alphabet of code indices."""

    counts: np.ndarray  # int64, length = alphabet size
    total: int

    def __post_init__(self):
        self.counts.flags.writeable = False

    def nonzero_codes(self) -> np.ndarray:
        """Indices with count > 0, ascending; aligns with normalized models."""
        return np.flatnonzero(self.counts)


@dataclass(frozen=True)
class ProbabilityModel:
    """Immutable code alphabet with frequencies summing to exactly 2^N."""

    precision_bits: int
    codes: tuple[CodeSpec, ...]
    cumulative: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        cum = []
        c = 0
        for spec in self.codes:
            cum.append(c)
            c += spec.freq
        object.__setattr__(self, "cumulative", tuple(cum))

    @property
    def num_codes(self) -> int:
        return len(self.codes)

    @property
    def total_freq(self) -> int:
        return 1 << self.precision_bits

    @property
    def dual_code(self) -> bool:
        """True when the model carries importance-tagged exponent codes."""
        return any(
            s.mapping is not None and s.mapping.kind == MappingKind.EXPONENT_IMPORTANT
            for s in self.codes
        )

    def freq_array(self) -> np.ndarray:
        return np.array([s.freq for s in self.codes], dtype=np.uint32)

    def cum_array(self) -> np.ndarray:
        return np.array(self.cumulative, dtype=np.uint32)

    def payload_array(self) -> np.ndarray:
        return np.array([s.payload_bits for s in self.codes], dtype=np.uint8)

    def slot_to_code(self) -> np.ndarray:
        """Dense decode LUT: (state mod 2^N) -> code index."""
        lut = np.zeros(self.total_freq, dtype=np.uint8 if self.num_codes <= 256 else np.uint16)
        for spec, c in zip(self.codes, self.cumulative):
            lut[c : c + spec.freq] = spec.code_index
        return lut


PairLike = Union["object", int]


def count_codes(pairs: Iterable, alphabet_size: int) -> FrequencyTable:
    """Tally code occurrences from pairs, raw code ints, or a numpy array."""
    if alphabet_size < 1:
        raise AlphabetError("alphabet size must be >= 1")
    if isinstance(pairs, np.ndarray):
        codes = pairs.astype(np.int64, copy=False)
    else:
        codes = np.fromiter(
            (p if isinstance(p, (int, np.integer)) else p.code_index for p in pairs),
            dtype=np.int64,
        )
    if codes.size and (codes.min() < 0 or codes.max() >= alphabet_size):
        bad = codes[(codes < 0) | (codes >= alphabet_size)][0]
        raise AlphabetError(f"code {int(bad)} outside alphabet of size {alphabet_size}")
    counts = np.bincount(codes, minlength=alphabet_size).astype(np.int64)
    return FrequencyTable(counts=counts, total=int(codes.size))


def normalize_counts(
    freq: FrequencyTable,
    precision_bits: int,
    *,
    payload_bits: Optional[Sequence[int]] = None,
    mappings: Optional[Sequence[Optional[Mapping]]] = None,
) -> ProbabilityModel:
    """Largest-remainder normalization of raw counts to frequencies/2^N.

    Codes with zero count are dropped; the surviving codes are renumbered
    densely in ascending original order (``freq.nonzero_codes()`` gives the
    original indices). Every kept code receives n_i >= 1. The unit-by-unit
    redistribution is ordered by the exact integer shortfall
    count_i * 2^N - n_i * total, which keeps the assignment count-monotone
    even when minimum-frequency clamping kicks in.

    ``payload_bits`` and ``mappings``, when given, are indexed by the
    *original* alphabet and carried onto the surviving codes.
    """
    if precision_bits not in SUPPORTED_PRECISIONS:
        raise CapacityError(f"precision must be one of {SUPPORTED_PRECISIONS}")
    if freq.total <= 0:
        raise EmptyInputError("cannot normalize an empty frequency table")
    kept = freq.nonzero_codes()
    capacity = min(1 << precision_bits, MAX_CODES)
    if len(kept) > capacity:
        raise CapacityError(
            f"{len(kept)} nonzero codes exceed capacity {capacity} at {precision_bits}-bit precision"
        )
    scale = 1 << precision_bits
    total = int(freq.total)
    counts = [int(freq.counts[i]) for i in kept]
    n = [max(1, c * scale // total) for c in counts]

    diff = scale - sum(n)
    if diff > 0:
        # Under-allocated codes first (largest shortfall), ties by low index.
        order = sorted(range(len(n)), key=lambda i: (-(counts[i] * scale - n[i] * total), i))
        assert diff <= len(n)
        for i in order[:diff]:
            n[i] += 1
    elif diff < 0:
        # Clamping overshot; shave one unit at a time from the most
        # over-allocated code that can still spare it.
        heap = [(-(n[i] * total - counts[i] * scale), i) for i in range(len(n)) if n[i] > 1]
        heapq.heapify(heap)
        while diff < 0:
            _, i = heapq.heappop(heap)
            n[i] -= 1
            diff += 1
            if n[i] > 1:
                heapq.heappush(heap, (-(n[i] * total - counts[i] * scale), i))

    specs = []
    for pos, (orig, ni) in enumerate(zip(kept, n)):
        pb = int(payload_bits[orig]) if payload_bits is not None else 0
        mp = mappings[orig] if mappings is not None else None
        specs.append(CodeSpec(code_index=pos, freq=ni, payload_bits=pb, mapping=mp))
    return ProbabilityModel(precision_bits=precision_bits, codes=tuple(specs))


def ideal_bits(model: ProbabilityModel, freq: FrequencyTable) -> tuple[float, float]:
    """Entropy-coder lower bound: (total bits, average bits per pair).

    Each occurrence of code i costs -log2(n_i / 2^N) bits plus its payload
    width; everything is accumulated in IEEE double precision.
    """
    if len(freq.counts) != model.num_codes:
        raise AlphabetError(
            f"frequency table has {len(freq.counts)} codes, model has {model.num_codes}"
        )
    if freq.total <= 0:
        raise EmptyInputError("ideal_bits needs at least one pair")
    scale = float(model.total_freq)
    total = 0.0
    for spec, cnt in zip(model.codes, freq.counts):
        if cnt == 0:
            continue
        total += float(cnt) * (-math.log2(spec.freq / scale) + spec.payload_bits)
    return total, total / float(freq.total)


def validate_model(model: ProbabilityModel) -> list[str]:
    """Check every model invariant; returns all violations (empty = valid)."""
    v: list[str] = []
    if model.precision_bits not in SUPPORTED_PRECISIONS:
        v.append(f"unsupported precision {model.precision_bits}")
        return v
    scale = 1 << model.precision_bits
    if model.num_codes == 0:
        v.append("empty alphabet")
        return v
    if model.num_codes > min(scale, MAX_CODES):
        v.append(f"alphabet of {model.num_codes} codes exceeds capacity")
    for pos, spec in enumerate(model.codes):
        if spec.code_index != pos:
            v.append(f"code at position {pos} has index {spec.code_index} (must be dense)")
        if spec.freq <= 0:
            v.append(f"zero probability: code {pos} has n={spec.freq}")
        elif spec.freq > scale:
            v.append(f"code {pos} frequency {spec.freq} exceeds 2^{model.precision_bits}")
        if not 0 <= spec.payload_bits <= 32:
            v.append(f"code {pos} payload width {spec.payload_bits} outside [0, 32]")
    total = sum(s.freq for s in model.codes)
    if total != scale:
        v.append(f"sum mismatch: frequencies add to {total}, need {scale}")
    seen: dict[tuple, int] = {}
    for spec in model.codes:
        if spec.mapping is None:
            continue
        key = (spec.mapping.kind, spec.mapping.value, spec.payload_bits)
        if key in seen:
            v.append(
                f"duplicate semantics: codes {seen[key]} and {spec.code_index} share "
                f"mapping {spec.mapping.kind.name}({spec.mapping.value}) at equal payload width"
            )
        else:
            seen[key] = spec.code_index
    return v
