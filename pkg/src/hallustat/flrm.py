"""Length-thresholded rote memorizer.

Training picks the largest length threshold the sample size can support,
memorizes every training pair at or below it (later pairs overwrite earlier
ones), and predicts by lookup with the empty string as the default output.
"""

from __future__ import annotations

import math
import types
from dataclasses import dataclass, field

from .core import Alphabet, Str, empty_string
from .errors import ConfigError, DomainError
from .measures import CdfLowerBound
from .oracle import TrainingSequence


def threshold_length(m: int, alphabet: Alphabet, bound: CdfLowerBound) -> int:
    """Largest n' >= 0 with m > (q^(n'+1)/d) * ln(q^(n'+1)/(2d)) where
    d = 1 - bound(n'); -1 when no n' qualifies.

    d = 0 never qualifies (the factor is +infinity). The right side is
    nondecreasing in n', so the qualifying set is a prefix and the scan can
    stop once q^(n'+1) alone reaches max(m, 6): from there x*ln(x/2) >= x >= m.
    """
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    q = alphabet.size
    stop = max(m, 6)
    best = -1
    n = 0
    level = q
    while level <= stop:
        d = bound.defect(n)
        if d > 0.0:
            x = float(level)
            rhs = x / d * math.log(x / (2.0 * d))
            if m > rhs:
                best = n
        n += 1
        level *= q
    return best


@dataclass(frozen=True)
class MemorizerModel:
    """Finite lookup table capped at a length threshold; unknown inputs map
    to the empty string."""

    alphabet: Alphabet
    table: dict[Str, Str] = field(default_factory=dict)
    threshold: int = -1

    def __post_init__(self):
        if self.threshold < -1:
            raise DomainError(f"threshold must be >= -1, got {self.threshold}")
        frozen = types.MappingProxyType(dict(self.table))
        for s, y in frozen.items():
            if len(s) > self.threshold:
                raise DomainError(
                    f"table key of length {len(s)} exceeds threshold {self.threshold}"
                )
            if s.alphabet != self.alphabet or y.alphabet != self.alphabet:
                raise DomainError("table entries must use the model's alphabet")
        object.__setattr__(self, "table", frozen)

    @property
    def default_output(self) -> Str:
        return empty_string(self.alphabet)

    def predict(self, s: Str) -> Str:
        return self.table.get(s, self.default_output)

    __call__ = predict


def train(t: TrainingSequence, alphabet: Alphabet, bound: CdfLowerBound) -> MemorizerModel:
    n_bar = threshold_length(len(t), alphabet, bound)
    table = {}
    for s, y in t:
        if len(s) <= n_bar:
            table[s] = y
    return MemorizerModel(alphabet, table, n_bar)


def predict(model: MemorizerModel, s: Str) -> Str:
    return model.predict(s)


@dataclass(frozen=True)
class FlrmTrainer:
    """Trainer closure over (alphabet, bound); callable on a TrainingSequence."""

    alphabet: Alphabet
    bound: CdfLowerBound

    def __call__(self, t: TrainingSequence) -> MemorizerModel:
        return train(t, self.alphabet, self.bound)


def model_to_json(model: MemorizerModel) -> dict:
    entries = sorted(model.table.items(), key=lambda kv: kv[0].sort_key())
    return {
        "threshold": model.threshold,
        "table": [{"s": list(s.symbols), "y": list(y.symbols)} for s, y in entries],
    }


def model_from_json(alphabet: Alphabet, doc: dict) -> MemorizerModel:
    try:
        threshold = int(doc["threshold"])
        table = {
            Str(alphabet, tuple(entry["s"])): Str(alphabet, tuple(entry["y"]))
            for entry in doc["table"]
        }
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed model document: {exc}") from exc
    return MemorizerModel(alphabet, table, threshold)
