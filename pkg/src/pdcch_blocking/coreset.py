"""CORESET geometry and the CCE index space."""

from dataclasses import dataclass

AGGREGATION_LEVELS = (1, 2, 4, 8, 16)

RBS_PER_CCE = 6  # one CCE = 6 REGs, one REG = one RB in one OFDM symbol


class InvalidGeometryError(ValueError):
    """CORESET dimensions violate the NR constraints."""


@dataclass(frozen=True)
class CoresetConfig:
    """A CORESET spanning ``rb_count`` RBs over ``symbol_duration`` OFDM symbols.

    The frequency span must be a whole number of 6-RB chunks and the duration
    1 to 3 symbols, so the CCE count rb_count * symbol_duration / 6 is always
    a positive integer.
    """

    rb_count: int
    symbol_duration: int
    coreset_index: int = 0

    def __post_init__(self):
        if self.rb_count <= 0 or self.rb_count % RBS_PER_CCE != 0:
            raise InvalidGeometryError(
                f"rb_count must be a positive multiple of {RBS_PER_CCE}, got {self.rb_count}")
        if self.symbol_duration not in (1, 2, 3):
            raise InvalidGeometryError(
                f"symbol_duration must be 1, 2 or 3, got {self.symbol_duration}")
        if self.coreset_index < 0:
            raise InvalidGeometryError(
                f"coreset_index must be >= 0, got {self.coreset_index}")

    @property
    def cce_count(self) -> int:
        return self.rb_count * self.symbol_duration // RBS_PER_CCE

    @classmethod
    def from_cce_count(cls, cce_count: int, coreset_index: int = 0) -> "CoresetConfig":
        """Synthesize a one-symbol CORESET with exactly ``cce_count`` CCEs."""
        if cce_count < 1:
            raise InvalidGeometryError(f"cce_count must be >= 1, got {cce_count}")
        return cls(rb_count=RBS_PER_CCE * cce_count, symbol_duration=1,
                   coreset_index=coreset_index)
