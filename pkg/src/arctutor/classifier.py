"""Online associative classification from the live action stream.

After every action the user's feature vector is rebuilt, discretized with
the model's binning, and matched against the mined rules. Each cluster's
membership score is the weight of its satisfied rules over the weight of
all its rules; the higher score wins, with ties going to HLG (no hint).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .discovery import HLG, LLG, CLUSTER_LABELS, MODEL_FORMAT, ModelFormatError
from .events import (
    ActionEvent,
    ActionType,
    Bin,
    BinningModel,
    DiscreteVector,
    FEATURES,
    FeatureAccumulator,
    TOTAL_FEATURE,
    discretize,
    extract_features,
    feature_action,
    record_event,
)


class ClassifierError(Exception):
    code = "ClassifierError"


class ZeroTotalWeight(ClassifierError):
    code = "ZeroTotalWeight"


class EmptyCorpus(ClassifierError):
    code = "EmptyCorpus"


@dataclass(frozen=True)
class ModelRule:
    index: int
    conditions: tuple[tuple[str, Bin], ...]
    consequent: str
    confidence: float
    support: float
    weight: int

    def satisfied_by(self, bins: DiscreteVector) -> bool:
        return all(bins.bin(f) is b for f, b in self.conditions)


@dataclass
class RuleModel:
    """Parsed model document: binning, weighted rules, provenance counts."""

    binning: BinningModel
    rules: list[ModelRule]
    totals: dict[str, int]
    cluster_sizes: dict[str, int]
    separated: bool
    meta: dict

    def rules_for(self, label: str) -> list[ModelRule]:
        return [r for r in self.rules if r.consequent == label]

    def training_users(self) -> int:
        return sum(self.cluster_sizes.values())


def load_model(doc: dict) -> RuleModel:
    """Validate and parse a model document; totals are recomputed."""
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"expected format {MODEL_FORMAT!r}")
    if "binning" not in doc:
        raise ModelFormatError("model document missing binning")
    if doc.get("features") != list(FEATURES):
        raise ModelFormatError("model document feature list mismatch")
    binning = BinningModel.from_json(doc["binning"])
    rules: list[ModelRule] = []
    for index, raw in enumerate(doc.get("rules", [])):
        conditions = tuple(
            (str(f), Bin(b)) for f, b in raw["conditions"])
        for f, _ in conditions:
            if f not in FEATURES:
                raise ModelFormatError(f"rule condition on unknown feature {f!r}")
        consequent = raw["consequent"]
        if consequent not in CLUSTER_LABELS:
            raise ModelFormatError(f"unknown consequent {consequent!r}")
        rules.append(ModelRule(
            index=index, conditions=conditions, consequent=consequent,
            confidence=float(raw["confidence"]), support=float(raw["support"]),
            weight=int(raw["weight"])))
    totals = {label: sum(r.weight for r in rules if r.consequent == label)
              for label in CLUSTER_LABELS}
    stored = doc.get("totals", {})
    for label in CLUSTER_LABELS:
        if totals[label] <= 0:
            raise ModelFormatError(f"cluster {label} has no rule weight")
        if label in stored and int(stored[label]) != totals[label]:
            raise ModelFormatError(
                f"stored total for {label} is {stored[label]}, rules sum to {totals[label]}")
    clusters = doc.get("clusters", {})
    sizes = {label: int(clusters.get(label, {}).get("size", 0))
             for label in CLUSTER_LABELS}
    return RuleModel(
        binning=binning, rules=rules, totals=totals, cluster_sizes=sizes,
        separated=bool(doc.get("separated", False)), meta=dict(doc.get("meta", {})))


def membership_score(satisfied_weight: int, total_weight: int) -> float:
    """Exact quotient of satisfied rule weight over the cluster's total."""
    if total_weight <= 0:
        raise ZeroTotalWeight("cluster total weight must be positive")
    if not 0 <= satisfied_weight <= total_weight:
        raise ClassifierError(
            f"satisfied weight {satisfied_weight} outside [0, {total_weight}]")
    return satisfied_weight / total_weight


@dataclass(frozen=True)
class Triggering:
    feature: str
    action: Optional[ActionType]
    count: int


@dataclass(frozen=True)
class ClassifierSnapshot:
    scores: dict[str, float]
    label: str
    satisfied: dict[str, tuple[ModelRule, ...]]
    satisfied_weight: dict[str, int]
    triggering: Optional[Triggering]
    total_actions: int
    last_action: Optional[ActionType]
    action_counts: dict[ActionType, int]

    def to_json(self) -> dict:
        return {
            "scores": {label: self.scores[label] for label in CLUSTER_LABELS},
            "label": self.label,
            "satisfied": {
                label: [r.index for r in self.satisfied[label]]
                for label in CLUSTER_LABELS
            },
            "satisfied_weight": {
                label: self.satisfied_weight[label] for label in CLUSTER_LABELS
            },
            "triggering": None if self.triggering is None else {
                "feature": self.triggering.feature,
                "action": (self.triggering.action.value
                           if self.triggering.action else None),
                "count": self.triggering.count,
            },
            "total_actions": self.total_actions,
            "last_action": self.last_action.value if self.last_action else None,
        }


def _pick_triggering(satisfied: Sequence[ModelRule],
                     counts: dict[ActionType, int],
                     total: int) -> Optional[Triggering]:
    # Prefer the heaviest single-condition rule; fall back to the heaviest
    # rule's first condition when only conjunctions are satisfied.
    if not satisfied:
        return None
    singles = [r for r in satisfied if len(r.conditions) == 1]
    pool = singles if singles else list(satisfied)
    best = max(pool, key=lambda r: (r.weight, -r.index))
    feature = best.conditions[0][0]
    action = feature_action(feature)
    count = total if feature == TOTAL_FEATURE else counts[action]
    return Triggering(feature=feature, action=action, count=count)


def empty_snapshot(model: RuleModel) -> ClassifierSnapshot:
    """The start state before any action: nothing satisfied, HLG by tie."""
    return ClassifierSnapshot(
        scores={label: 0.0 for label in CLUSTER_LABELS},
        label=HLG,
        satisfied={label: () for label in CLUSTER_LABELS},
        satisfied_weight={label: 0 for label in CLUSTER_LABELS},
        triggering=None, total_actions=0, last_action=None,
        action_counts={a: 0 for a in ActionType})


def evaluate(model: RuleModel, bins: DiscreteVector,
             counts: dict[ActionType, int], total: int,
             last_action: Optional[ActionType]) -> ClassifierSnapshot:
    """Score both clusters for one discretized vector."""
    satisfied = {
        label: tuple(r for r in model.rules_for(label) if r.satisfied_by(bins))
        for label in CLUSTER_LABELS
    }
    satisfied_weight = {
        label: sum(r.weight for r in satisfied[label]) for label in CLUSTER_LABELS
    }
    scores = {
        label: membership_score(satisfied_weight[label], model.totals[label])
        for label in CLUSTER_LABELS
    }
    label = LLG if scores[LLG] > scores[HLG] else HLG
    return ClassifierSnapshot(
        scores=scores, label=label, satisfied=satisfied,
        satisfied_weight=satisfied_weight,
        triggering=_pick_triggering(satisfied[label], counts, total),
        total_actions=total, last_action=last_action,
        action_counts=dict(counts))


class ClassifierState:
    """Per-session incremental classifier; one writer per session."""

    def __init__(self, model: RuleModel, session: str) -> None:
        self.model = model
        self.session = session
        self.events: list[ActionEvent] = []
        self._acc = FeatureAccumulator()
        self.current = empty_snapshot(model)

    def update(self, event: ActionEvent) -> ClassifierSnapshot:
        self.events = record_event(self.events, event)
        self._acc.push(event.action, event.t_ms)
        bins = discretize(self._acc.vector(), self.model.binning)
        self.current = evaluate(
            self.model, bins, dict(self._acc.counts), self._acc.total, event.action)
        return self.current


def classify_events(model: RuleModel,
                    events: Sequence[ActionEvent]) -> ClassifierSnapshot:
    """One batch evaluation of a full stream (reference path for tests)."""
    if not events:
        return empty_snapshot(model)
    vector = extract_features(events)
    bins = discretize(vector, model.binning)
    acc = FeatureAccumulator()
    for e in events:
        acc.push(e.action, e.t_ms)
    return evaluate(model, bins, dict(acc.counts), acc.total, events[-1].action)


def evaluate_accuracy(model: RuleModel,
                      corpus: Sequence[tuple[Sequence[ActionEvent], str]],
                      prefix_fraction: float = 1.0) -> float:
    """Classify each user from a prefix of their stream; fraction correct."""
    if not corpus:
        raise EmptyCorpus("held-out corpus is empty")
    hits = 0
    for events, truth in corpus:
        n = int(len(events) * prefix_fraction)
        snapshot = classify_events(model, list(events)[:n])
        if snapshot.label == truth:
            hits += 1
    return hits / len(corpus)
