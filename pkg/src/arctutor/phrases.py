"""English phrasing for rule conditions, mined rules, and action counts."""
from __future__ import annotations

from .events import ActionType, Bin, TOTAL_FEATURE, feature_action

_DOING = {
    ActionType.FINE_STEP: "stepping through the problem",
    ActionType.DIRECT_ARC_CLICK: "clicking on CSP arcs",
    ActionType.AUTO_AC: "auto solving the CSP",
    ActionType.DOMAIN_SPLIT: "splitting domains",
    ActionType.BACKTRACK: "backtracking through the CSP",
    ActionType.RESET: "resetting the CSP",
}

_AFTER = {
    ActionType.FINE_STEP: "fine stepping",
    ActionType.DIRECT_ARC_CLICK: "clicking CSP arcs",
    ActionType.AUTO_AC: "auto solving",
    ActionType.DOMAIN_SPLIT: "performing domain splitting",
    ActionType.BACKTRACK: "backtracking",
    ActionType.RESET: "performing reset",
}

_FREQ_ADVERB = {Bin.LOW: "infrequently", Bin.MEDIUM: "moderately", Bin.HIGH: "frequently"}

_PAUSE_STYLE = {
    Bin.LOW: "not pausing for reflection after",
    Bin.MEDIUM: "briefly pausing after",
    Bin.HIGH: "pausing for reflection after",
}

DISPLAY_NAME = {
    ActionType.FINE_STEP: "Fine Step",
    ActionType.DIRECT_ARC_CLICK: "Direct Arc Click",
    ActionType.AUTO_AC: "Auto AC",
    ActionType.DOMAIN_SPLIT: "Domain Splitting",
    ActionType.BACKTRACK: "Back Track",
    ActionType.RESET: "Reset",
}


def condition_text(feature: str, bin_: Bin) -> str:
    """One rule condition, e.g. ('freq_AutoAC', High) -> 'frequently auto solving the CSP'."""
    if feature == TOTAL_FEATURE:
        amount = {Bin.LOW: "few", Bin.MEDIUM: "a moderate number of", Bin.HIGH: "many"}
        return f"performing {amount[bin_]} actions overall"
    action = feature_action(feature)
    assert action is not None, feature
    if feature.startswith("freq_"):
        return f"{_FREQ_ADVERB[bin_]} {_DOING[action]}"
    return f"{_PAUSE_STYLE[bin_]} {_AFTER[action]}"


def rule_text(conditions: list[tuple[str, Bin]]) -> str:
    """Conjunction of condition phrases with the first letter capitalized."""
    joined = " and ".join(condition_text(f, b) for f, b in conditions)
    return joined[:1].upper() + joined[1:]


def action_count_text(action: ActionType, count: int) -> str:
    """E.g. 'Using Reset 4 times' for the WhyHint triggering-action slot."""
    times = "time" if count == 1 else "times"
    return f"Using {DISPLAY_NAME[action]} {count} {times}"
