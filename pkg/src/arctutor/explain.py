"""Incremental why/how explanation pages and their usage telemetry.

Six pages explain a delivered hint from the model state that triggered it:
three "why" tabs reachable from everywhere, plus three "how" detail pages
hanging off the second tab. Every page carries a feedback control. Page
generation is a pure function of (hint context, model), so re-rendering a
page for the same delivery is byte-identical.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Optional, Sequence

from .classifier import ClassifierSnapshot, ModelRule, RuleModel
from .discovery import HLG, LLG
from .events import ActionType, feature_action
from .hints import HintItem, RankedHint
from .phrases import action_count_text, rule_text


class PageId(str, Enum):
    WHY_HINT = "WhyHint"
    WHY_LOW = "WhyLow"
    WHY_RULES = "WhyRules"
    HOW_SCORE = "HowScore"
    HOW_HINT = "HowHint"
    HOW_RANK = "HowRank"


TABS = (PageId.WHY_HINT, PageId.WHY_LOW, PageId.WHY_RULES)

# Parent of each how-page; "back" leads here.
PARENT = {
    PageId.HOW_SCORE: PageId.WHY_LOW,
    PageId.HOW_HINT: PageId.WHY_LOW,
    PageId.HOW_RANK: PageId.HOW_HINT,
}


def available_transitions(page: PageId) -> set[PageId]:
    """Pages reachable in one step: the other tabs, child how-pages, back."""
    out = {tab for tab in TABS if tab is not page}
    if page is PageId.WHY_LOW:
        out |= {PageId.HOW_SCORE, PageId.HOW_HINT}
    if page is PageId.HOW_HINT:
        out.add(PageId.HOW_RANK)
    if page in PARENT:
        out.add(PARENT[page])
    return out


class ExplainError(Exception):
    code = "ExplainError"


class NoActiveHint(ExplainError):
    code = "NoActiveHint"


class UnknownPage(ExplainError):
    code = "UnknownPage"


class MalformedNesting(ExplainError):
    code = "MalformedNesting"


def quotient_text(numerator: int, denominator: int) -> str:
    """Display form of a score quotient, e.g. '432/1383 = .313'.

    Quotients are shown to three decimals, rounded up, with trailing zeros
    and a leading zero trimmed ('0', '.5', '.313', '1').
    """
    scaled = -(-numerator * 1000 // denominator)  # ceiling at 3 decimals
    whole, frac = divmod(scaled, 1000)
    if frac == 0:
        rendered = str(whole)
    else:
        digits = f"{frac:03d}".rstrip("0")
        rendered = f"{whole if whole else ''}.{digits}"
    return f"{numerator}/{denominator} = {rendered}"


@dataclass(frozen=True)
class ExplanationContext:
    """Everything a delivery pinned down: the hint and its model state."""

    ordinal: int
    item: HintItem
    stage: str
    rank: int
    contributing: tuple[ModelRule, ...]
    ranked: tuple[RankedHint, ...]
    snapshot: ClassifierSnapshot


class PageTemplates:
    """Slot-bearing default copy; overridable from a JSON file."""

    def __init__(self, doc: dict) -> None:
        self.doc = doc

    @staticmethod
    def load(path: Optional[str] = None) -> "PageTemplates":
        if path is None:
            raw = resources.files("arctutor.data").joinpath(
                "page_templates.json").read_text()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                raw = fh.read()
        return PageTemplates(json.loads(raw))

    @property
    def feedback_label(self) -> str:
        return self.doc["feedback_label"]

    def page(self, page: PageId) -> dict:
        return self.doc[page.value]


def _rule_entry(rule: ModelRule, item_template: str,
                counts: Optional[dict[ActionType, int]] = None) -> dict:
    text = rule_text(list(rule.conditions))
    entry = {
        "rule": rule.index,
        "text": text,
        "weight": rule.weight,
        "display": item_template.format(text=text, weight=rule.weight),
    }
    if counts is not None:
        involved = {}
        for feature, _ in rule.conditions:
            action = feature_action(feature)
            if action is not None:
                involved[action.value] = counts[action]
        entry["action_counts"] = involved
    return entry


def generate_page(page: PageId, context: Optional[ExplanationContext],
                  model: RuleModel, templates: PageTemplates) -> dict:
    """Render one page for the delivery in `context`."""
    if context is None:
        raise NoActiveHint("no hint has been delivered in this session")
    spec = templates.page(page)
    snapshot = context.snapshot
    slots = {
        "triggering": "your recent actions",
        "hint_title": context.item.list_text,
        "hint_behavior": context.item.behavior_text,
        "users": str(model.training_users()),
        "hlg_rules": str(len(model.rules_for(HLG))),
        "llg_rules": str(len(model.rules_for(LLG))),
    }
    if snapshot.triggering is not None and snapshot.triggering.action is not None:
        slots["triggering"] = action_count_text(
            snapshot.triggering.action, snapshot.triggering.count)

    blocks: list[dict] = []
    for block in spec["blocks"]:
        kind = block["kind"]
        if kind == "text":
            blocks.append({"kind": "text",
                           "text": block["template"].format(**slots)})
        elif kind == "diagram":
            blocks.append({"kind": "diagram", "ref": block["ref"]})
        elif kind == "score_arithmetic":
            cluster = block["cluster"]
            satisfied = snapshot.satisfied_weight[cluster]
            total = model.totals[cluster]
            quotient = quotient_text(satisfied, total)
            lines = [line.format(satisfied=satisfied, total=total,
                                 quotient=quotient)
                     for line in block["lines"]]
            blocks.append({
                "kind": "score_arithmetic", "cluster": cluster,
                "satisfied": satisfied, "total": total,
                "quotient": quotient, "lines": lines,
            })
        elif kind == "rule_list":
            if block["source"] == "contributing":
                rules = context.contributing
                counts = None
            else:
                rules = snapshot.satisfied[LLG]
                counts = snapshot.action_counts
            blocks.append({
                "kind": "rule_list",
                "rules": [_rule_entry(r, block["item_template"], counts)
                          for r in rules],
            })
        elif kind == "hint_list":
            items = [{
                "item": rh.item.id,
                "text": rh.item.list_text,
                "rank": rh.rank,
                "display": block["item_template"].format(
                    text=rh.item.list_text, rank=rh.rank),
            } for rh in context.ranked]
            blocks.append({"kind": "hint_list", "items": items,
                           "chosen": context.item.id})
        elif kind == "sum_arithmetic":
            addends = [r.weight for r in context.contributing]
            total = sum(addends)
            summation = f"{' + '.join(str(a) for a in addends)} = {total}"
            blocks.append({
                "kind": "sum_arithmetic", "addends": addends, "total": total,
                "text": block["template"].format(summation=summation),
            })
        else:
            raise ExplainError(f"unknown block kind {kind!r} in templates")

    return {
        "page": page.value,
        "title": spec["title"],
        "hint": context.ordinal,
        "blocks": blocks,
        "transitions": sorted(t.value for t in available_transitions(page)),
        "back": PARENT[page].value if page in PARENT else None,
        "feedback_label": templates.feedback_label,
    }


INITIATION = "Initiation"
PAGE_ACCESS = "PageAccess"
FEEDBACK = "Feedback"


@dataclass
class ExplanationEvent:
    kind: str
    hint: int
    page: Optional[PageId] = None
    opened_at_ms: int = 0
    dwell_ms: Optional[int] = None


@dataclass
class Telemetry:
    """Append-only explanation usage log for one session."""

    records: list[ExplanationEvent] = field(default_factory=list)
    _open_hint: Optional[int] = None

    def page_access(self, page: PageId, hint: int, at_ms: int = 0) -> None:
        """Record one page access; the first for a hint opens an initiation."""
        if self._open_hint != hint:
            self.records.append(ExplanationEvent(
                kind=INITIATION, hint=hint, opened_at_ms=at_ms))
            self._open_hint = hint
        self.records.append(ExplanationEvent(
            kind=PAGE_ACCESS, hint=hint, page=page, opened_at_ms=at_ms))

    def page_closed(self, page: PageId, hint: int, dwell_ms: int) -> None:
        """Attach dwell time to the latest unclosed access of that page."""
        if dwell_ms < 0:
            raise MalformedNesting("dwell must be non-negative")
        for record in reversed(self.records):
            if (record.kind == PAGE_ACCESS and record.page is page
                    and record.hint == hint):
                if record.dwell_ms is not None:
                    break
                record.dwell_ms = dwell_ms
                return
        raise MalformedNesting(
            f"no open access of {page.value} for hint {hint}")

    def feedback(self, page: PageId, hint: int) -> None:
        """'I would have liked to know more' pressed on an accessed page."""
        if not any(r.kind == PAGE_ACCESS and r.page is page and r.hint == hint
                   for r in self.records):
            raise MalformedNesting(
                f"feedback on {page.value} before any access for hint {hint}")
        self.records.append(ExplanationEvent(kind=FEEDBACK, hint=hint, page=page))


def compute_usage_stats(telemetry: Telemetry, hints_received: int) -> dict:
    """Summative usage report over one session's explanation telemetry."""
    initiations = [r for r in telemetry.records if r.kind == INITIATION]
    accesses = [r for r in telemetry.records if r.kind == PAGE_ACCESS]
    feedbacks = [r for r in telemetry.records if r.kind == FEEDBACK]
    n_init = len(initiations)
    n_acc = len(accesses)
    dwell_ms = sum(r.dwell_ms or 0 for r in accesses)
    pages_seen = [r.page.value for r in accesses if r.page is not None]
    type_counts = {page.value: pages_seen.count(page.value) for page in PageId}
    return {
        "hints_received": hints_received,
        "initiations": n_init,
        "page_accesses": n_acc,
        "feedback_presses": len(feedbacks),
        "hints_before_first_initiation": initiations[0].hint if initiations else 0,
        "initiations_per_hint": n_init / hints_received if hints_received else 0.0,
        "accesses_per_initiation": n_acc / n_init if n_init else 0.0,
        "attention_per_hint_s": (dwell_ms / 1000.0 / hints_received
                                 if hints_received else 0.0),
        "types_accessed": len(set(pages_seen)),
        "type_proportions": {
            name: (count / n_acc if n_acc else 0.0)
            for name, count in type_counts.items()
        },
    }
