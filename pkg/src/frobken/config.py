"""Run parameters shared by the CLI, the experiment scripts and the tests."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from .frobenius import DEFAULT_CAP


@dataclass(frozen=True)
class RunConfig:
    p: int
    e: int = 1
    e0: Optional[int] = None
    e_max: int = 3
    box: int = 6
    cap: Optional[int] = DEFAULT_CAP  # None lifts the q^d enumeration cap
    workers: int = 1

    def __post_init__(self):
        if self.e < 0 or self.e_max < 1 or self.box < 0 or self.workers < 1:
            raise ValueError(f"invalid run parameters: {self}")
        if self.e0 is not None and self.e0 < 0:
            raise ValueError("e0 must be nonnegative")

    def key_fields(self):
        """Fields that determine the result; worker count does not."""
        doc = asdict(self)
        del doc["workers"]
        return doc
