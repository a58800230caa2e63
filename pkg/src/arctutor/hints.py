"""Adaptive hint selection and one-at-a-time delivery.

Every catalog item targets one feature in one direction. When the user is
classified as lower learning, items are ranked by the summed weight of the
satisfied lower-learning rules mentioning their target feature, and the
top item is delivered. A delivered hint opens a reaction window of 40
actions during which no further hint is given; an unfollowed hint is
redelivered once with strong guidance, after which the item is retired.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence

from .classifier import ClassifierSnapshot, ModelRule
from .discovery import LLG
from .events import ActionEvent, Bin, BinningModel, discretize, extract_features

REACTION_WINDOW = 40

EXPLAIN_BUTTON_LABEL = "Why am I delivered this hint?"

STAGE_TEXT = "Text"
STAGE_STRONG = "Strong"


@dataclass(frozen=True)
class HintItem:
    id: str
    behavior_text: str
    list_text: str
    feature: str
    direction: str              # "increase" or "decrease"
    message: str
    strong_guidance: tuple[str, ...]


def load_catalog(path: Optional[str] = None) -> list[HintItem]:
    """Load the hint catalog; defaults to the nine-item built-in file."""
    if path is None:
        raw = resources.files("arctutor.data").joinpath("hint_catalog.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    items = []
    for entry in json.loads(raw):
        items.append(HintItem(
            id=entry["id"],
            behavior_text=entry["behavior_text"],
            list_text=entry["list_text"],
            feature=entry["feature"],
            direction=entry["direction"],
            message=entry["message"],
            strong_guidance=tuple(entry.get("strong_guidance", [])),
        ))
    return items


@dataclass(frozen=True)
class RankedHint:
    item: HintItem
    rank: int
    contributing_rules: tuple[ModelRule, ...]


def score_hints(snapshot: ClassifierSnapshot,
                catalog: Sequence[HintItem]) -> list[RankedHint]:
    """Rank catalog items by summed weight of satisfied LLG rules that
    mention the item's target feature; descending, catalog order on ties."""
    satisfied = snapshot.satisfied.get(LLG, ())
    ranked: list[RankedHint] = []
    for item in catalog:
        contributing = tuple(
            r for r in satisfied
            if any(f == item.feature for f, _ in r.conditions))
        if not contributing:
            continue
        ranked.append(RankedHint(
            item=item,
            rank=sum(r.weight for r in contributing),
            contributing_rules=contributing))
    order = {item.id: i for i, item in enumerate(catalog)}
    ranked.sort(key=lambda rh: (-rh.rank, order[rh.item.id]))
    return ranked


@dataclass
class ActiveHint:
    item_id: str
    delivered_at_seq: int
    stage: str


@dataclass
class DeliveryRecord:
    ordinal: int
    item_id: str
    stage: str
    seq: int
    followed: Optional[bool] = None


@dataclass
class DeliveryState:
    window: int = REACTION_WINDOW
    active: Optional[ActiveHint] = None
    pending_escalation: Optional[HintItem] = None
    exhausted: set[str] = field(default_factory=set)
    history: list[DeliveryRecord] = field(default_factory=list)

    def hints_received(self) -> int:
        return len(self.history)


def check_followed(item: HintItem, window_events: Sequence[ActionEvent],
                   binning: BinningModel) -> bool:
    """Did the window's behavior leave the item's discouraged bin?

    Decrease targets are unfollowed while the feature stays High over the
    window; increase targets while it stays Low.
    """
    vector = extract_features(window_events)
    bins = discretize(vector, binning)
    feature_bin = bins.bin(item.feature)
    if item.direction == "decrease":
        return feature_bin is not Bin.HIGH
    return feature_bin is not Bin.LOW


def select_hint(ranked: Sequence[RankedHint], delivery: DeliveryState,
                seq: int) -> Optional[tuple[HintItem, str]]:
    """Pick the next hint to deliver, if any.

    Nothing is delivered while a reaction window is open (window
    bookkeeping is the engine's job before calling this). A pending
    escalation is redelivered at the Strong stage; otherwise the top-ranked
    unexhausted item goes out at the Text stage.
    """
    if delivery.active is not None:
        return None
    pending = delivery.pending_escalation
    if pending is not None and pending.id not in delivery.exhausted:
        return pending, STAGE_STRONG
    for rh in ranked:
        if rh.item.id not in delivery.exhausted:
            return rh.item, STAGE_TEXT
    return None


def render_hint(item: HintItem, stage: str, ordinal: int) -> dict:
    """Wire payload for a delivery; Strong adds interface highlights."""
    return {
        "hint": ordinal,
        "item": item.id,
        "title": item.list_text,
        "message": item.message,
        "stage": stage,
        "highlights": list(item.strong_guidance) if stage == STAGE_STRONG else [],
        "explain_label": EXPLAIN_BUTTON_LABEL,
    }


@dataclass(frozen=True)
class Delivery:
    hint: RankedHint
    stage: str
    ranking: tuple[RankedHint, ...]
    ordinal: int


class DeliveryEngine:
    """Session-scoped delivery loop: window bookkeeping plus selection."""

    def __init__(self, catalog: Sequence[HintItem], binning: BinningModel,
                 window: int = REACTION_WINDOW) -> None:
        self.catalog = list(catalog)
        self._by_id = {item.id: item for item in self.catalog}
        self.binning = binning
        self.state = DeliveryState(window=window)

    def on_event(self, seq: int, snapshot: ClassifierSnapshot,
                 events: Sequence[ActionEvent]) -> Optional[Delivery]:
        """Process one action; returns a delivery when one goes out."""
        state = self.state
        if state.active is not None:
            elapsed = seq - state.active.delivered_at_seq
            if elapsed < state.window:
                return None
            self._close_window(events)
        if snapshot.label != LLG:
            return None
        ranked = score_hints(snapshot, self.catalog)
        selected = select_hint(ranked, state, seq)
        if selected is None:
            return None
        item, stage = selected
        if stage == STAGE_STRONG:
            state.pending_escalation = None
        self._deliver(item, stage, seq)
        rh = next((r for r in ranked if r.item.id == item.id),
                  RankedHint(item=item, rank=0, contributing_rules=()))
        return Delivery(hint=rh, stage=stage, ranking=tuple(ranked),
                        ordinal=state.history[-1].ordinal)

    def _deliver(self, item: HintItem, stage: str, seq: int) -> None:
        state = self.state
        state.active = ActiveHint(item_id=item.id, delivered_at_seq=seq, stage=stage)
        state.history.append(DeliveryRecord(
            ordinal=len(state.history) + 1, item_id=item.id, stage=stage, seq=seq))
        if stage == STAGE_STRONG:
            state.exhausted.add(item.id)

    def _close_window(self, events: Sequence[ActionEvent]) -> None:
        state = self.state
        active = state.active
        assert active is not None
        start = active.delivered_at_seq          # events are 1-based by seq
        window_events = [e for e in events
                         if start < e.seq <= start + state.window]
        item = self._by_id[active.item_id]
        followed = check_followed(item, window_events, self.binning)
        state.history[-1].followed = followed
        if not followed and active.stage == STAGE_TEXT:
            state.pending_escalation = item
        state.active = None
