"""String distributions and length-CDF lower bounds.

Three distribution families over the strings of an alphabet:

  FiniteSupport   explicit atoms with exact rational masses
  UniformOverSet  uniform over a finite set of strings
  LengthFactored  a law on lengths (table plus optional geometric tail),
                  uniform over all strings of a given length

CdfLowerBound is a nondecreasing lower bound on Pr(len(S) <= n), given as a
table plus an analytic tail rule; the tail rule is what makes both the
"converges to 1" premise and tail domination checks decidable rather than
sampled.

Sampling consumes a fixed number of uniforms per draw: two for LengthFactored
(length, then offset within the level), one for the other variants. Batch
draws consume whole uniform arrays in that order, so alternative samplers
sharing the uniform stream reproduce draws bit for bit.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .core import Alphabet, Str
from .errors import DomainError, DominationError

_SUM_TOL = 1e-12
# int64 code space; offsets above this use exact big-int arithmetic instead
_FLOAT_OFFSET_LIMIT = 2**62
_MAX_TAIL_TABLE = 4_000_000


@dataclass(frozen=True)
class GeometricTail:
    """Defect decays geometrically beyond the table: 1 - value ~ ratio^n."""

    ratio: float

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise DomainError(f"tail ratio must lie in (0,1), got {self.ratio}")


@dataclass(frozen=True)
class ReachesOne:
    """The bound equals 1 everywhere beyond the table."""


@dataclass(frozen=True)
class CdfLowerBound:
    """Known nondecreasing lower bound on the input-length CDF.

    table[n] is the bound at length n for n <= N = len(table) - 1; beyond the
    table the tail rule applies. Both tail rules converge to exactly 1.
    """

    table: tuple[float, ...]
    tail: GeometricTail | ReachesOne

    def __post_init__(self):
        if not self.table:
            raise DomainError("bound table must be non-empty")
        prev = 0.0
        for c in self.table:
            if not 0.0 <= c <= 1.0:
                raise DomainError(f"bound entry {c} outside [0,1]")
            if c < prev:
                raise DomainError("bound table must be non-decreasing")
            prev = c

    def value(self, n: int) -> float:
        if n < 0:
            raise DomainError(f"n must be >= 0, got {n}")
        last = len(self.table) - 1
        if n <= last:
            return self.table[n]
        if isinstance(self.tail, ReachesOne):
            return 1.0
        return 1.0 - (1.0 - self.table[last]) * self.tail.ratio ** (n - last)

    def defect(self, n: int) -> float:
        """1 - value(n), computed without cancellation in the tail."""
        if n < 0:
            raise DomainError(f"n must be >= 0, got {n}")
        last = len(self.table) - 1
        if n <= last:
            return 1.0 - self.table[n]
        if isinstance(self.tail, ReachesOne):
            return 0.0
        return (1.0 - self.table[last]) * self.tail.ratio ** (n - last)


@dataclass(frozen=True)
class FiniteSupport:
    """Explicit atoms (string, mass) with exact rational masses summing to 1."""

    atoms: tuple[tuple[Str, Fraction], ...]

    def __post_init__(self):
        if not self.atoms:
            raise DomainError("finite-support distribution needs at least one atom")
        norm = tuple((s, Fraction(p)) for s, p in self.atoms)
        object.__setattr__(self, "atoms", norm)
        alphabet = norm[0][0].alphabet
        seen = set()
        total = Fraction(0)
        for s, p in norm:
            if s.alphabet != alphabet:
                raise DomainError("atoms must share one alphabet")
            if s.symbols in seen:
                raise DomainError(f"duplicate atom {s.symbols}")
            seen.add(s.symbols)
            if not 0 <= p <= 1:
                raise DomainError(f"mass {p} outside [0,1]")
            total += p
        if total != 1:
            raise DomainError(f"masses must sum to exactly 1, got {total}")

    @property
    def alphabet(self) -> Alphabet:
        return self.atoms[0][0].alphabet

    @property
    def is_support_infinite(self) -> bool:
        return False

    @property
    def max_length(self) -> int:
        return max(len(s) for s, _ in self.atoms)

    @cached_property
    def _mass_map(self):
        return {s: p for s, p in self.atoms}

    @cached_property
    def _sampling_cum(self):
        cum = np.cumsum([float(p) for _, p in self.atoms])
        cum[-1] = 1.0
        return cum

    def support(self):
        return iter(self.atoms)

    def pmf(self, s: Str) -> Fraction:
        return self._mass_map.get(s, Fraction(0))

    def length_cdf(self, n: int) -> Fraction:
        if n < 0:
            raise DomainError(f"n must be >= 0, got {n}")
        return sum((p for s, p in self.atoms if len(s) <= n), Fraction(0))

    def sample_batch(self, rng, size: int) -> list[Str]:
        u = rng.random(size)
        idx = np.searchsorted(self._sampling_cum, u, side="right")
        idx = np.minimum(idx, len(self.atoms) - 1)
        return [self.atoms[int(i)][0] for i in idx]


@dataclass(frozen=True)
class UniformOverSet:
    """Uniform distribution over a finite set of distinct strings."""

    members: tuple[Str, ...]

    def __post_init__(self):
        if not self.members:
            raise DomainError("uniform-over-set needs at least one member")
        alphabet = self.members[0].alphabet
        seen = set()
        for s in self.members:
            if s.alphabet != alphabet:
                raise DomainError("members must share one alphabet")
            if s.symbols in seen:
                raise DomainError(f"duplicate member {s.symbols}")
            seen.add(s.symbols)

    @property
    def alphabet(self) -> Alphabet:
        return self.members[0].alphabet

    @property
    def is_support_infinite(self) -> bool:
        return False

    @property
    def max_length(self) -> int:
        return max(len(s) for s in self.members)

    @cached_property
    def _member_set(self):
        return frozenset(self.members)

    @cached_property
    def _sorted_lengths(self):
        return sorted(len(s) for s in self.members)

    def support(self):
        p = Fraction(1, len(self.members))
        return ((s, p) for s in self.members)

    def pmf(self, s: Str) -> Fraction:
        if s in self._member_set:
            return Fraction(1, len(self.members))
        return Fraction(0)

    def length_cdf(self, n: int) -> Fraction:
        if n < 0:
            raise DomainError(f"n must be >= 0, got {n}")
        k = bisect.bisect_right(self._sorted_lengths, n)
        return Fraction(k, len(self.members))

    def sample_batch(self, rng, size: int) -> list[Str]:
        u = rng.random(size)
        k = len(self.members)
        idx = np.minimum((u * k).astype(np.int64), k - 1)
        return [self.members[int(i)] for i in idx]


@dataclass(frozen=True)
class LengthFactored:
    """Length law (table + optional geometric tail), uniform within each length.

    length_probs[i] = Pr(len = i) for i < L; with tail_ratio r, the remaining
    mass 1 - sum(length_probs) is spread as Pr(len = L + j) proportional to
    r^j. The empty table with r = 1/2 gives Pr(len = i) = (1/2)^(i+1), whose
    tail Pr(len >= m) = (1/2)^m exactly.
    """

    alphabet: Alphabet
    length_probs: tuple[float, ...]
    tail_ratio: float | None = None

    def __post_init__(self):
        total = 0.0
        for p in self.length_probs:
            if p < 0.0:
                raise DomainError(f"length probability {p} is negative")
            total += p
        if total > 1.0 + _SUM_TOL:
            raise DomainError(f"length probabilities sum to {total} > 1")
        if self.tail_ratio is None:
            if abs(total - 1.0) > _SUM_TOL:
                raise DomainError(
                    f"without a tail, length probabilities must sum to 1, got {total}"
                )
        else:
            if not 0.0 < self.tail_ratio < 1.0:
                raise DomainError(f"tail ratio must lie in (0,1), got {self.tail_ratio}")

    @cached_property
    def tail_mass(self) -> float:
        if self.tail_ratio is None:
            return 0.0
        return max(0.0, 1.0 - math.fsum(self.length_probs))

    @property
    def is_support_infinite(self) -> bool:
        return self.tail_mass > 0.0

    @cached_property
    def _cdf_table(self):
        out = []
        acc = 0.0
        for p in self.length_probs:
            acc += p
            out.append(acc)
        return tuple(out)

    @cached_property
    def _sampling_cum(self):
        """Cumulative length table used by every sampler; last entry is 1.0.

        A geometric tail is extended until the float cumulative reaches 1.0,
        truncating total variation below 1e-15; pmf and length_cdf stay
        closed-form and untruncated.
        """
        cum = list(self._cdf_table)
        mass = self.tail_mass
        if self.tail_ratio is not None and mass > 0.0:
            r = self.tail_ratio
            j = 0
            while True:
                val = 1.0 - mass * r ** (j + 1)
                cum.append(val)
                if val >= 1.0:
                    break
                j += 1
                if j > _MAX_TAIL_TABLE:
                    raise DomainError("tail ratio too close to 1 to tabulate")
        if not cum:
            raise DomainError("empty length law")
        cum[-1] = 1.0
        return np.asarray(cum, dtype=np.float64)

    @property
    def max_sample_length(self) -> int:
        return len(self._sampling_cum) - 1

    @cached_property
    def _offset_scales(self):
        """Per-length (float_scale_or_None, exact_size) for offset decoding."""
        q = self.alphabet.size
        scales = []
        p = 1
        for _ in range(self.max_sample_length + 1):
            scales.append((float(p) if p < _FLOAT_OFFSET_LIMIT else None, p))
            p *= q
        return scales

    def _length_prob(self, n: int) -> float:
        if n < len(self.length_probs):
            return self.length_probs[n]
        if self.tail_ratio is None:
            return 0.0
        r = self.tail_ratio
        return self.tail_mass * (1.0 - r) * r ** (n - len(self.length_probs))

    def pmf(self, s: Str) -> float:
        n = len(s)
        return self._length_prob(n) * float(self.alphabet.size) ** (-n)

    def length_cdf(self, n: int) -> float:
        if n < 0:
            raise DomainError(f"n must be >= 0, got {n}")
        table = self._cdf_table
        if n < len(table):
            return table[n]
        if self.tail_ratio is None:
            return 1.0
        return 1.0 - self.tail_mass * self.tail_ratio ** (n - len(table) + 1)

    def sample_batch(self, rng, size: int) -> list[Str]:
        u_len = rng.random(size)
        u_off = rng.random(size)
        lengths = np.searchsorted(self._sampling_cum, u_len, side="right")
        scales = self._offset_scales
        q = self.alphabet.size
        out = []
        for i in range(size):
            n = int(lengths[i])
            scale, level = scales[n]
            if scale is not None:
                off = int(u_off[i] * scale)
            else:
                off = int(Fraction(float(u_off[i])) * level)
            if off >= level:
                off = level - 1
            syms = [0] * n
            for j in range(n - 1, -1, -1):
                off, syms[j] = divmod(off, q)
            out.append(Str(self.alphabet, tuple(syms)))
        return out


StringDistribution = FiniteSupport | UniformOverSet | LengthFactored


def sample(dist: StringDistribution, rng) -> Str:
    return dist.sample_batch(rng, 1)[0]


def pmf(dist: StringDistribution, s: Str):
    return dist.pmf(s)


def length_cdf(dist: StringDistribution, n: int):
    return dist.length_cdf(n)


def _dist_tail(dist):
    """("one", a): CDF is 1 for n >= a. ("geom", anchor, defect, ratio):
    defect(n) = defect * ratio^(n - anchor) for n >= anchor."""
    if isinstance(dist, (FiniteSupport, UniformOverSet)):
        return ("one", dist.max_length)
    if isinstance(dist, LengthFactored):
        table_len = len(dist.length_probs)
        if dist.tail_mass <= 0.0:
            # length_cdf returns exactly 1.0 from the end of the table on
            return ("one", table_len)
        # defect(n) = tail_mass * ratio^(n - (L-1)) for n >= L-1, L possibly 0
        return ("geom", table_len - 1, dist.tail_mass, dist.tail_ratio)
    raise DominationError(
        f"cannot decide tail domination analytically for {type(dist).__name__}"
    )


def _bound_tail(bound: CdfLowerBound):
    last = len(bound.table) - 1
    defect = 1.0 - bound.table[last]
    if isinstance(bound.tail, ReachesOne) or defect == 0.0:
        return ("one", last + 1 if defect > 0.0 else last)
    return ("geom", last, defect, bound.tail.ratio)


def dominates(dist: StringDistribution, bound: CdfLowerBound, horizon: int) -> bool:
    """True iff length_cdf(dist, n) >= bound(n) for every n, checked pointwise
    up to max(horizon, table and support extents) and analytically beyond."""
    table_last = len(bound.table) - 1
    if horizon < table_last:
        raise DomainError("horizon must be at least the bound table length")
    d_tail = _dist_tail(dist)
    b_tail = _bound_tail(bound)
    high = max(horizon, table_last, d_tail[1], b_tail[1]) + 1
    exact = isinstance(dist, (FiniteSupport, UniformOverSet))
    for n in range(high + 1):
        cdf_n = dist.length_cdf(n)
        b_n = bound.value(n)
        if exact:
            if cdf_n < Fraction(b_n):
                return False
        elif cdf_n < b_n:
            return False
    # Beyond `high`, both sides follow their tail forms.
    if d_tail[0] == "one":
        return True  # dist CDF is exactly 1 there, and the bound never exceeds 1
    if b_tail[0] == "one":
        return False  # bound is exactly 1 while the dist keeps a positive defect
    _, d_anchor, d_defect, d_ratio = d_tail
    _, b_anchor, b_defect, b_ratio = b_tail
    n0 = high + 1
    dist_defect = d_defect * d_ratio ** (n0 - d_anchor)
    bound_defect = b_defect * b_ratio ** (n0 - b_anchor)
    if dist_defect > bound_defect:
        return False
    # Equal boundary with a faster-or-equal decay stays dominated forever;
    # a strictly slower decay must eventually cross.
    return d_ratio <= b_ratio
