"""Tail-curve container shared by the bound and simulation layers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class TailCurve:
    """Values of a tail function on a strictly increasing u-grid.

    Entries must lie in [0, 1]; nan marks points where a theoretical bound is
    not asserted (below its validity threshold).  Empirical curves carry
    Clopper-Pearson confidence limits and the sample count.
    """

    u: tuple[float, ...]
    value: tuple[float, ...]
    ci_lo: Optional[tuple[float, ...]] = None
    ci_hi: Optional[tuple[float, ...]] = None
    n_samples: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.u) != len(self.value):
            raise ValueError("u and value must have equal length")
        if any(b <= a for a, b in zip(self.u, self.u[1:])):
            raise ValueError("u grid must be strictly increasing")
        for v in self.value:
            if not math.isnan(v) and not (0.0 <= v <= 1.0):
                raise ValueError(f"tail values must lie in [0, 1] (or nan), got {v}")
        for ci in (self.ci_lo, self.ci_hi):
            if ci is not None and len(ci) != len(self.u):
                raise ValueError("confidence limits must match the u grid")

    def __len__(self) -> int:
        return len(self.u)
