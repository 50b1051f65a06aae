"""The :class:`Sample` container shared by sampling, fitting and reporting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["Sample", "as_values"]


@dataclass(frozen=True, eq=False)
class Sample:
    """Observations in their original order plus a provenance label.

    ``values`` is stored as a read-only float64 array.  ``metadata`` holds
    free-form provenance (generator name, seeds, source path...).
    """

    values: np.ndarray
    source: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        bad = np.flatnonzero(~np.isfinite(v))
        if bad.size:
            raise DomainError(f"non-finite value at index {bad[0]}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return (
            self.source == other.source
            and self.metadata == other.metadata
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def as_values(data) -> np.ndarray:
    """Float array view of a :class:`Sample` or any array-like."""
    if isinstance(data, Sample):
        return data.values
    v = np.asarray(data, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise DomainError(f"non-finite value at index {np.flatnonzero(~np.isfinite(v))[0]}")
    return v
