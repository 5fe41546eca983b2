"""Smallest high-probability sets of i.i.d. symbol blocks.

Brute-force companion to the asymptotic equipartition story: enumerate all
K^m blocks, sort by probability, and take the shortest prefix whose mass
clears 1 - delta. Comparing log2(size)/m against the source entropy shows
the compression rate an optimal fixed set achieves at small m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import BudgetExceeded, DomainError


@dataclass(frozen=True)
class SourceModel:
    """An i.i.d. source over K symbols given by its probability vector."""

    pmf: tuple[float, ...]

    def __post_init__(self):
        if len(self.pmf) < 1:
            raise DomainError("pmf must be non-empty")
        if any(p < 0.0 for p in self.pmf):
            raise DomainError("pmf entries must be nonnegative")
        total = math.fsum(self.pmf)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"pmf must sum to 1 within 1e-12, got {total!r}")

    @cached_property
    def entropy_bits(self) -> float:
        return -math.fsum(p * math.log2(p) for p in self.pmf if p > 0.0)


def entropy_bits(pmf) -> float:
    return SourceModel(tuple(pmf)).entropy_bits


@dataclass(frozen=True)
class TypicalSetReport:
    m: int
    delta: float
    set_size: int
    mass: float
    rate: float  # log2(set_size) / m
    entropy_gap: float  # rate - source entropy


def smallest_high_mass_set(
    source: SourceModel, m: int, delta: float, budget: int = 10**7
) -> TypicalSetReport:
    """Exhaustively find the size of the smallest set of m-blocks with mass
    above 1 - delta (greedy by probability, which is optimal)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0,1), got {delta}")
    k = len(source.pmf)
    total = k**m
    if total > budget:
        raise BudgetExceeded(
            f"enumerating {total} blocks exceeds budget {budget}",
            required=total,
            budget=budget,
        )
    probs = kernels.product_probs(np.asarray(source.pmf, dtype=np.float64), m)
    order = np.argsort(-probs, kind="stable")
    cumulative = np.cumsum(probs[order])
    idx = int(np.searchsorted(cumulative, 1.0 - delta, side="right"))
    if idx >= total:
        idx = total - 1
    size = idx + 1
    mass = float(cumulative[idx])
    rate = math.log2(size) / m
    return TypicalSetReport(
        m=m,
        delta=delta,
        set_size=size,
        mass=mass,
        rate=rate,
        entropy_gap=rate - source.entropy_bits,
    )


def check_source_coding(report: TypicalSetReport, epsilon: float) -> bool:
    """Does the found set witness rate within epsilon of entropy at mass
    above 1 - delta?"""
    return report.entropy_gap < epsilon and report.mass > 1.0 - report.delta
