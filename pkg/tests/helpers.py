"""Shared test builders: quick networks and the handcrafted rule model."""
from __future__ import annotations

import json
import random

from arctutor.classifier import RuleModel, load_model
from arctutor.events import ActionEvent, ActionType
from arctutor.problems import ProblemSpec, compile_network, parse_expression


def make_network(domains: dict[str, list[int]], exprs: list[str]):
    spec = ProblemSpec(
        name="test",
        variables=[(name, values) for name, values in domains.items()],
        constraints=[parse_expression(e) for e in exprs],
    )
    return compile_network(spec)


def make_events(actions: list[tuple[str, int]], session: str = "s") -> list[ActionEvent]:
    """Events from (action name, t_ms) pairs, seq assigned in order."""
    return [
        ActionEvent(session=session, seq=i + 1, t_ms=t, action=ActionType(name))
        for i, (name, t) in enumerate(actions)
    ]


# ---------------------------------------------------------------------------
# A handcrafted model document shaped after the worked score/rank example:
# LLG rules total 1383 (432 satisfied by the crafted stream below), HLG
# rules total 376 (none satisfied). The satisfied set ranks three hints
# 98 > 87 > 18, with the reset hint's four contributing rules weighing
# 18 + 21 + 19 + 40.
# ---------------------------------------------------------------------------

_PAUSE_CUTS = [2000.0, 4000.0]

_FIXTURE_CUTS = {
    "freq_FineStep": [0.2, 0.5],
    "freq_DirectArcClick": [0.15, 0.5],
    "freq_AutoAC": [0.1, 0.3],
    "freq_DomainSplit": [0.15, 0.5],
    "freq_Backtrack": [0.15, 0.5],
    "freq_Reset": [0.05, 0.12],
    "pause_FineStep": _PAUSE_CUTS,
    "pause_DirectArcClick": _PAUSE_CUTS,
    "pause_AutoAC": _PAUSE_CUTS,
    "pause_DomainSplit": _PAUSE_CUTS,
    "pause_Backtrack": _PAUSE_CUTS,
    "pause_Reset": _PAUSE_CUTS,
    "total_actions": [10.0, 25.0],
}


def _rule(conditions, consequent, weight):
    # confidence 1.0, support weight/100 keeps weight == round(100*c*s)
    return {
        "conditions": conditions,
        "consequent": consequent,
        "confidence": 1.0,
        "support": weight / 100.0,
        "weight": weight,
    }


FIXTURE_RULES = [
    # Satisfied LLG rules (sum 432); the first four mention freq_Reset.
    _rule([["freq_Reset", "High"], ["pause_FineStep", "Low"]], "LLG", 18),
    _rule([["freq_AutoAC", "High"], ["freq_Reset", "High"]], "LLG", 21),
    _rule([["freq_Reset", "High"], ["pause_DomainSplit", "High"]], "LLG", 19),
    _rule([["freq_Reset", "High"]], "LLG", 40),
    _rule([["freq_AutoAC", "High"], ["pause_AutoAC", "Low"]], "LLG", 33),
    _rule([["freq_AutoAC", "High"], ["total_actions", "High"]], "LLG", 33),
    _rule([["pause_AutoAC", "Low"]], "LLG", 39),
    _rule([["pause_Backtrack", "Low"]], "LLG", 39),
    _rule([["pause_DomainSplit", "High"]], "LLG", 39),
    _rule([["total_actions", "High"]], "LLG", 39),
    _rule([["pause_AutoAC", "Low"], ["pause_Backtrack", "Low"]], "LLG", 39),
    _rule([["pause_AutoAC", "Low"], ["total_actions", "High"]], "LLG", 39),
    _rule([["pause_Backtrack", "Low"], ["total_actions", "High"]], "LLG", 34),
    # Unsatisfied LLG rules (sum 951).
    _rule([["freq_DirectArcClick", "High"]], "LLG", 100),
    _rule([["pause_DirectArcClick", "High"]], "LLG", 100),
    _rule([["freq_FineStep", "High"]], "LLG", 100),
    _rule([["freq_Backtrack", "High"]], "LLG", 100),
    _rule([["freq_DomainSplit", "High"]], "LLG", 100),
    _rule([["pause_Reset", "High"]], "LLG", 100),
    _rule([["freq_FineStep", "Medium"]], "LLG", 100),
    _rule([["pause_DomainSplit", "Low"]], "LLG", 100),
    _rule([["freq_AutoAC", "High"], ["freq_DirectArcClick", "High"]], "LLG", 100),
    _rule([["total_actions", "Low"]], "LLG", 51),
    # HLG rules (sum 376), none satisfied by the crafted stream.
    _rule([["pause_FineStep", "High"]], "HLG", 100),
    _rule([["freq_AutoAC", "Low"]], "HLG", 100),
    _rule([["pause_DirectArcClick", "High"], ["freq_Reset", "Low"]], "HLG", 100),
    _rule([["freq_FineStep", "High"], ["pause_FineStep", "High"]], "HLG", 76),
]


def fixture_model_doc() -> dict:
    return {
        "format": "arctutor-model/1",
        "meta": {"users": 110, "seed": 0},
        "features": [
            "freq_FineStep", "freq_DirectArcClick", "freq_AutoAC",
            "freq_DomainSplit", "freq_Backtrack", "freq_Reset",
            "pause_FineStep", "pause_DirectArcClick", "pause_AutoAC",
            "pause_DomainSplit", "pause_Backtrack", "pause_Reset",
            "total_actions",
        ],
        "standardization": {"mean": [0.0] * 13, "std": [1.0] * 13},
        "binning": dict(_FIXTURE_CUTS),
        "clusters": {
            "HLG": {"size": 55, "mean_plg": 0.55, "centroid": [0.0] * 13},
            "LLG": {"size": 55, "mean_plg": 0.25, "centroid": [0.0] * 13},
        },
        "separated": True,
        "rules": [dict(r) for r in FIXTURE_RULES],
        "totals": {"HLG": 376, "LLG": 1383},
    }


def fixture_model() -> RuleModel:
    return load_model(fixture_model_doc())


def fixture_stream(session: str = "s") -> list[ActionEvent]:
    """30 actions whose final feature bins satisfy exactly the 13 rules above.

    Counts: FineStep 5, DirectArcClick 3, AutoAC 12, DomainSplit 3,
    Backtrack 3, Reset 4; every gap is 1000 ms except 5000 ms after each
    domain split, so only the split pause bins High.
    """
    order = (
        ["AutoAC"] * 4 + ["FineStep"] * 2 + ["Reset"]
        + ["AutoAC"] * 3 + ["DirectArcClick"] * 2 + ["DomainSplit"]
        + ["Backtrack"] + ["Reset"] + ["AutoAC"] * 3 + ["FineStep"] * 2
        + ["DomainSplit"] + ["Backtrack"] + ["Reset"] + ["AutoAC"] * 2
        + ["DirectArcClick"] + ["DomainSplit"] + ["Backtrack"]
        + ["FineStep"] + ["Reset"]
    )
    assert len(order) == 30
    events = []
    t = 0
    for i, name in enumerate(order):
        events.append(ActionEvent(session=session, seq=i + 1, t_ms=t,
                                  action=ActionType(name)))
        t += 5000 if name == "DomainSplit" else 1000
    return events


def random_stream(rng: random.Random, length: int,
                  session: str = "s") -> list[ActionEvent]:
    actions = list(ActionType)
    weights = [rng.random() + 0.05 for _ in actions]
    events = []
    t = 0
    for i in range(length):
        action = rng.choices(actions, weights=weights, k=1)[0]
        events.append(ActionEvent(session=session, seq=i + 1, t_ms=t, action=action))
        t += rng.choice([200, 600, 1000, 2500, 3000, 4500, 6000])
    return events


def dump_model(path, doc=None) -> None:
    path.write_text(json.dumps(doc or fixture_model_doc(), indent=2,
                               sort_keys=True) + "\n", encoding="utf-8")
