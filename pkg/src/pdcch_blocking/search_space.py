"""PDCCH search-space candidate mapping (TS 38.213 section 10.1 hash function)."""

from dataclasses import dataclass

from .coreset import AGGREGATION_LEVELS, CoresetConfig

Y_MODULUS = 65537
A_MULTIPLIERS = (39827, 39829, 39839)  # selected by coreset_index mod 3
ALLOWED_CANDIDATE_COUNTS = (0, 1, 2, 3, 4, 5, 6, 8)
RNTI_MAX = 65535

SPACE_TYPE_COMMON = "css"
SPACE_TYPE_UE_SPECIFIC = "uss"
SPACE_TYPES = (SPACE_TYPE_COMMON, SPACE_TYPE_UE_SPECIFIC)


class NoCandidateFitsError(ValueError):
    """The aggregation level is larger than the CORESET, no candidate can fit."""


@dataclass(frozen=True)
class SearchSpaceConfig:
    """Candidate counts per aggregation level, plus search-space type and slot.

    ``candidates_per_al`` is ordered as AGGREGATION_LEVELS, i.e. the counts for
    ALs (1, 2, 4, 8, 16); a mapping {AL: count} is accepted and normalized.
    """

    candidates_per_al: tuple
    space_type: str = SPACE_TYPE_UE_SPECIFIC
    slot_index: int = 0

    def __post_init__(self):
        counts = self.candidates_per_al
        if isinstance(counts, dict):
            unknown = set(counts) - set(AGGREGATION_LEVELS)
            if unknown:
                raise ValueError(f"unknown aggregation levels: {sorted(unknown)}")
            counts = tuple(int(counts.get(al, 0)) for al in AGGREGATION_LEVELS)
        else:
            counts = tuple(int(m) for m in counts)
            if len(counts) != len(AGGREGATION_LEVELS):
                raise ValueError(
                    f"candidates_per_al needs {len(AGGREGATION_LEVELS)} entries "
                    f"(ALs {AGGREGATION_LEVELS}), got {len(counts)}")
        object.__setattr__(self, "candidates_per_al", counts)
        for al, m in zip(AGGREGATION_LEVELS, counts):
            if m not in ALLOWED_CANDIDATE_COUNTS:
                raise ValueError(
                    f"candidate count {m} for AL {al} not in {ALLOWED_CANDIDATE_COUNTS}")
        if not any(counts):
            raise ValueError("at least one aggregation level needs a nonzero candidate count")
        if self.space_type not in SPACE_TYPES:
            raise ValueError(f"space_type must be one of {SPACE_TYPES}, got {self.space_type!r}")
        if self.slot_index < 0:
            raise ValueError(f"slot_index must be >= 0, got {self.slot_index}")

    def count_for(self, aggregation_level: int) -> int:
        return self.candidates_per_al[AGGREGATION_LEVELS.index(aggregation_level)]

    @property
    def total_blind_decodes(self) -> int:
        return sum(self.candidates_per_al)


@dataclass(frozen=True)
class Candidate:
    """One PDCCH candidate: ``aggregation_level`` contiguous CCEs starting at
    a multiple of the aggregation level."""

    aggregation_level: int
    candidate_index: int
    cces: tuple

    def __post_init__(self):
        object.__setattr__(self, "cces", tuple(self.cces))
        if len(self.cces) != self.aggregation_level:
            raise ValueError(
                f"candidate needs {self.aggregation_level} CCEs, got {len(self.cces)}")
        start = self.cces[0]
        if start % self.aggregation_level != 0:
            raise ValueError(f"first CCE {start} not aligned to AL {self.aggregation_level}")
        if self.cces != tuple(range(start, start + self.aggregation_level)):
            raise ValueError("candidate CCEs must be contiguous")

    @property
    def first_cce(self) -> int:
        return self.cces[0]


def _check_rnti(c_rnti: int):
    if not 1 <= c_rnti <= RNTI_MAX:
        raise ValueError(f"c_rnti must be in [1, {RNTI_MAX}], got {c_rnti}")


def y_value(c_rnti: int, coreset_index: int = 0, slot_index: int = 0,
            space_type: str = SPACE_TYPE_UE_SPECIFIC) -> int:
    """Per-UE, per-slot hash seed Y.

    A CSS uses Y = 0 for every UE. For a USS the value is obtained by
    iterating Y <- (A * Y) mod 65537 for slot_index + 1 steps starting from
    the UE's C-RNTI, with the multiplier A picked by coreset_index mod 3.
    """
    if space_type == SPACE_TYPE_COMMON:
        return 0
    if space_type != SPACE_TYPE_UE_SPECIFIC:
        raise ValueError(f"space_type must be one of {SPACE_TYPES}, got {space_type!r}")
    _check_rnti(c_rnti)
    if coreset_index < 0:
        raise ValueError(f"coreset_index must be >= 0, got {coreset_index}")
    if slot_index < 0:
        raise ValueError(f"slot_index must be >= 0, got {slot_index}")
    a = A_MULTIPLIERS[coreset_index % 3]
    y = int(c_rnti)
    for _ in range(slot_index + 1):
        y = (a * y) % Y_MODULUS
    return y


def candidate_start(aggregation_level: int, candidate_index: int, cce_count: int,
                    candidate_count: int, y: int) -> int:
    """First CCE index of candidate ``candidate_index``.

    Raises NoCandidateFitsError when the aggregation level exceeds the CORESET
    size, i.e. floor(cce_count / aggregation_level) == 0.
    """
    L, k, C, M = aggregation_level, candidate_index, cce_count, candidate_count
    if L not in AGGREGATION_LEVELS:
        raise ValueError(f"aggregation level must be one of {AGGREGATION_LEVELS}, got {L}")
    if C < 1:
        raise ValueError(f"cce_count must be >= 1, got {C}")
    if M < 1 or not 0 <= k < M:
        raise ValueError(f"candidate index {k} out of range for {M} candidates")
    positions = C // L
    if positions == 0:
        raise NoCandidateFitsError(f"AL {L} does not fit in a CORESET of {C} CCEs")
    return L * ((y + (k * C) // (L * M)) % positions)


def candidate_cces(aggregation_level: int, candidate_index: int, cce_count: int,
                   candidate_count: int, y: int) -> tuple:
    """CCE indices of one candidate: L contiguous CCEs from the hashed start."""
    start = candidate_start(aggregation_level, candidate_index, cce_count,
                            candidate_count, y)
    return tuple(range(start, start + aggregation_level))


def candidate_starts(aggregation_level: int, cce_count: int, candidate_count: int,
                     y: int) -> list:
    """Start CCEs of all ``candidate_count`` candidates, in candidate order."""
    return [candidate_start(aggregation_level, k, cce_count, candidate_count, y)
            for k in range(candidate_count)]


def ue_candidate_set(c_rnti: int, search_space: SearchSpaceConfig,
                     coreset: CoresetConfig, aggregation_level: int) -> list:
    """All candidates a UE monitors at one aggregation level, in increasing
    candidate order. Candidates of one UE may overlap each other; that is a
    property of the hash, not an error."""
    m = search_space.count_for(aggregation_level)
    if m < 1:
        raise ValueError(f"no candidates configured for AL {aggregation_level}")
    y = y_value(c_rnti, coreset.coreset_index, search_space.slot_index,
                search_space.space_type)
    return [Candidate(aggregation_level, k,
                      candidate_cces(aggregation_level, k, coreset.cce_count, m, y))
            for k in range(m)]
