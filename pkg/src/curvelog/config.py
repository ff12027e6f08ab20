"""Run configuration shared by the CLI and the experiment scripts."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class RunConfig:
    """Truncation and reproducibility knobs.

    deg:     total-degree cutoff for commutative deformation series
    words:   word-length cutoff for noncommutative series
    logdeg:  degree cutoff in the formal edge-log variables
    prec:    absolute tolerance for numeric evaluation
    seed:    seed feeding every random choice (chart specialization,
             sampled test words); identical inputs and seed give
             byte-identical outputs
    """

    deg: int = 6
    words: int = 4
    logdeg: int = 4
    prec: float = 1e-9
    seed: int = 0
    fmt: str = "json"

    def __post_init__(self):
        if self.deg < 0 or self.words < 0 or self.logdeg < 0:
            raise ValueError("truncations must be nonnegative")
        if not (1e-12 <= self.prec <= 1e-4):
            raise ValueError("prec outside supported range [1e-12, 1e-4]")
        if self.fmt not in ("json", "text"):
            raise ValueError("format must be json or text")
