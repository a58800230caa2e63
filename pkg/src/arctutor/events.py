"""Interface action events and their statistical summary.

A user's behavior is summarized by 13 features: the relative frequency of
each of the six tool actions, the mean pause after each action type (time
to the next event of any kind), and the total action count. Features are
discretized into Low/Medium/High bins by equal-frequency tertiles fitted
on a training corpus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence


class ActionType(str, Enum):
    FINE_STEP = "FineStep"
    DIRECT_ARC_CLICK = "DirectArcClick"
    AUTO_AC = "AutoAC"
    DOMAIN_SPLIT = "DomainSplit"
    BACKTRACK = "Backtrack"
    RESET = "Reset"


ACTIONS: tuple[ActionType, ...] = tuple(ActionType)

FREQ_FEATURES = tuple(f"freq_{a.value}" for a in ACTIONS)
PAUSE_FEATURES = tuple(f"pause_{a.value}" for a in ACTIONS)
TOTAL_FEATURE = "total_actions"
FEATURES: tuple[str, ...] = FREQ_FEATURES + PAUSE_FEATURES + (TOTAL_FEATURE,)

_FEATURE_INDEX = {name: i for i, name in enumerate(FEATURES)}


def feature_action(feature: str) -> Optional[ActionType]:
    """The tool action a frequency/pause feature refers to, if any."""
    for a in ACTIONS:
        if feature in (f"freq_{a.value}", f"pause_{a.value}"):
            return a
    return None


class EventError(Exception):
    code = "EventError"


class SequenceGap(EventError):
    code = "SequenceGap"


class TimestampRegression(EventError):
    code = "TimestampRegression"


class CorpusTooSmall(EventError):
    code = "CorpusTooSmall"


@dataclass(frozen=True)
class ActionEvent:
    session: str
    seq: int
    t_ms: int
    action: ActionType
    target: Optional[str] = None

    def to_record(self) -> dict:
        return {
            "session": self.session,
            "seq": self.seq,
            "t_ms": self.t_ms,
            "action": self.action.value,
            "target": self.target,
        }

    @staticmethod
    def from_record(record: dict) -> "ActionEvent":
        return ActionEvent(
            session=str(record["session"]),
            seq=int(record["seq"]),
            t_ms=int(record["t_ms"]),
            action=ActionType(record["action"]),
            target=record.get("target"),
        )


def record_event(log: list[ActionEvent], event: ActionEvent) -> list[ActionEvent]:
    """Append with sequence/timestamp validation; returns a new log."""
    expected = log[-1].seq + 1 if log else 1
    if event.seq != expected:
        raise SequenceGap(f"expected seq {expected}, got {event.seq}")
    if log and event.t_ms < log[-1].t_ms:
        raise TimestampRegression(
            f"timestamp {event.t_ms} before predecessor {log[-1].t_ms}")
    return log + [event]


@dataclass(frozen=True)
class FeatureVector:
    freq: dict[str, float]
    pause: dict[str, float]
    total_actions: int

    def value(self, feature: str) -> float:
        if feature == TOTAL_FEATURE:
            return float(self.total_actions)
        if feature in self.freq:
            return self.freq[feature]
        return self.pause[feature]

    def values(self) -> tuple[float, ...]:
        return tuple(self.value(name) for name in FEATURES)


class FeatureAccumulator:
    """Incremental feature extraction; one per live session."""

    def __init__(self) -> None:
        self.counts = {a: 0 for a in ACTIONS}
        self.pause_sum = {a: 0.0 for a in ACTIONS}
        self.pause_count = {a: 0 for a in ACTIONS}
        self.total = 0
        self._last: Optional[tuple[ActionType, int]] = None

    def push(self, action: ActionType, t_ms: int) -> None:
        if self._last is not None:
            prev_action, prev_t = self._last
            self.pause_sum[prev_action] += float(t_ms - prev_t)
            self.pause_count[prev_action] += 1
        self.counts[action] += 1
        self.total += 1
        self._last = (action, t_ms)

    def vector(self) -> FeatureVector:
        freq = {}
        pause = {}
        for a in ACTIONS:
            freq[f"freq_{a.value}"] = (
                self.counts[a] / self.total if self.total else 0.0)
            pause[f"pause_{a.value}"] = (
                self.pause_sum[a] / self.pause_count[a]
                if self.pause_count[a] else 0.0)
        return FeatureVector(freq=freq, pause=pause, total_actions=self.total)


def extract_features(events: Sequence[ActionEvent]) -> FeatureVector:
    """Fold an event stream into its feature vector.

    The pause after the final event is excluded (it has no successor).
    """
    acc = FeatureAccumulator()
    for event in events:
        acc.push(event.action, event.t_ms)
    return acc.vector()


class Bin(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


@dataclass(frozen=True)
class DiscreteVector:
    bins: tuple[Bin, ...]

    def bin(self, feature: str) -> Bin:
        return self.bins[_FEATURE_INDEX[feature]]


@dataclass(frozen=True)
class BinningModel:
    """Per-feature (low, high) cut points; values on a cut bin as Medium."""

    cuts: dict[str, tuple[float, float]]

    def discretize_value(self, feature: str, value: float) -> Bin:
        low, high = self.cuts[feature]
        if value < low:
            return Bin.LOW
        if value > high:
            return Bin.HIGH
        return Bin.MEDIUM

    def to_json(self) -> dict:
        return {name: [low, high] for name, (low, high) in self.cuts.items()}

    @staticmethod
    def from_json(doc: dict) -> "BinningModel":
        cuts = {}
        for name in FEATURES:
            if name not in doc:
                raise EventError(f"binning missing feature {name!r}")
            low, high = doc[name]
            cuts[name] = (float(low), float(high))
        return BinningModel(cuts=cuts)


def fit_binning(corpus: Iterable[FeatureVector]) -> BinningModel:
    """Equal-frequency tertile cuts per feature over a training corpus.

    Cut points fall midway between adjacent tertile groups; a constant
    feature gets both cuts at the constant, binning everything Medium.
    """
    rows = [vec.values() for vec in corpus]
    n = len(rows)
    if n < 3:
        raise CorpusTooSmall(f"need at least 3 vectors, got {n}")
    cuts: dict[str, tuple[float, float]] = {}
    lo_idx = math.ceil(n / 3)
    hi_idx = math.ceil(2 * n / 3)
    for fi, name in enumerate(FEATURES):
        col = sorted(row[fi] for row in rows)
        low = (col[lo_idx - 1] + col[lo_idx]) / 2.0 if lo_idx < n else col[-1]
        high = (col[hi_idx - 1] + col[hi_idx]) / 2.0 if hi_idx < n else col[-1]
        cuts[name] = (low, high)
    return BinningModel(cuts=cuts)


def discretize(vector: FeatureVector, binning: BinningModel) -> DiscreteVector:
    return DiscreteVector(bins=tuple(
        binning.discretize_value(name, vector.value(name)) for name in FEATURES))
