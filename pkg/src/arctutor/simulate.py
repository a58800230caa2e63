"""Synthetic user corpora with planted learning-gain archetypes.

Since no real interaction dataset ships with the project, quantitative
classifier claims are grounded on generated corpora where the true
archetype of every user is known. The two default archetypes follow the
mined-rule directions: the low-gain archetype leans on auto-solving and
resetting with short pauses, the high-gain archetype steps and clicks arcs
deliberately with longer pauses.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .discovery import HLG, LLG, LabeledUser
from .events import ACTIONS, ActionEvent, ActionType, extract_features

CORPUS_FORMAT = "arctutor-corpus/1"

HLG_LIKE = "HLG-like"
LLG_LIKE = "LLG-like"

ARCHETYPE_LABEL = {HLG_LIKE: HLG, LLG_LIKE: LLG}


@dataclass(frozen=True)
class ArchetypeSpec:
    name: str
    action_weights: dict[ActionType, float]
    pause_mean_ms: dict[ActionType, float]
    plg_mean: float
    plg_sd: float
    freq_jitter: float = 0.25
    pause_jitter: float = 0.25

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "action_weights": {a.value: w for a, w in self.action_weights.items()},
            "pause_mean_ms": {a.value: p for a, p in self.pause_mean_ms.items()},
            "plg_mean": self.plg_mean,
            "plg_sd": self.plg_sd,
            "freq_jitter": self.freq_jitter,
            "pause_jitter": self.pause_jitter,
        }


def default_archetypes(plg_gap: float = 0.3) -> dict[str, ArchetypeSpec]:
    """The two built-in archetypes, spaced `plg_gap` apart in mean gain."""
    base = 0.4
    hlg = ArchetypeSpec(
        name=HLG_LIKE,
        action_weights={
            ActionType.FINE_STEP: 0.30,
            ActionType.DIRECT_ARC_CLICK: 0.30,
            ActionType.AUTO_AC: 0.05,
            ActionType.DOMAIN_SPLIT: 0.15,
            ActionType.BACKTRACK: 0.08,
            ActionType.RESET: 0.12,
        },
        pause_mean_ms={
            ActionType.FINE_STEP: 5000.0,
            ActionType.DIRECT_ARC_CLICK: 6000.0,
            ActionType.AUTO_AC: 4000.0,
            ActionType.DOMAIN_SPLIT: 5000.0,
            ActionType.BACKTRACK: 4000.0,
            ActionType.RESET: 5000.0,
        },
        plg_mean=base + plg_gap / 2.0,
        plg_sd=0.12,
    )
    llg = ArchetypeSpec(
        name=LLG_LIKE,
        action_weights={
            ActionType.FINE_STEP: 0.14,
            ActionType.DIRECT_ARC_CLICK: 0.08,
            ActionType.AUTO_AC: 0.32,
            ActionType.DOMAIN_SPLIT: 0.08,
            ActionType.BACKTRACK: 0.12,
            ActionType.RESET: 0.26,
        },
        pause_mean_ms={
            ActionType.FINE_STEP: 900.0,
            ActionType.DIRECT_ARC_CLICK: 1100.0,
            ActionType.AUTO_AC: 800.0,
            ActionType.DOMAIN_SPLIT: 1200.0,
            ActionType.BACKTRACK: 900.0,
            ActionType.RESET: 700.0,
        },
        plg_mean=base - plg_gap / 2.0,
        plg_sd=0.12,
    )
    return {HLG_LIKE: hlg, LLG_LIKE: llg}


@dataclass(frozen=True)
class SimulatedUser:
    user: str
    archetype: str
    plg: float
    events: tuple[ActionEvent, ...]

    def label(self) -> str:
        return ARCHETYPE_LABEL[self.archetype]

    def labeled(self) -> LabeledUser:
        return LabeledUser(user=self.user, features=extract_features(self.events),
                           plg=self.plg)


def _generate_user(spec: ArchetypeSpec, user_id: str, session: str,
                   rng: random.Random) -> SimulatedUser:
    n = rng.randint(50, 200)
    weights = [
        spec.action_weights[a] * max(0.05, rng.gauss(1.0, spec.freq_jitter))
        for a in ACTIONS
    ]
    pause_scale = max(0.2, rng.gauss(1.0, spec.pause_jitter))
    events = []
    t = 0
    for seq in range(1, n + 1):
        action = rng.choices(ACTIONS, weights=weights, k=1)[0]
        events.append(ActionEvent(session=session, seq=seq, t_ms=t, action=action))
        mean = spec.pause_mean_ms[action] * pause_scale
        t += max(100, int(rng.gauss(mean, mean * 0.3)))
    plg = min(1.0, max(-1.0, rng.gauss(spec.plg_mean, spec.plg_sd)))
    return SimulatedUser(user=user_id, archetype=spec.name, plg=plg,
                         events=tuple(events))


def generate_corpus(archetypes: dict[str, ArchetypeSpec], n_users: int,
                    seed: int) -> list[SimulatedUser]:
    """Deterministic labeled corpus; users alternate between archetypes."""
    if n_users < 6:
        raise ValueError(f"need at least 6 users, got {n_users}")
    names = sorted(archetypes)
    users = []
    for i in range(n_users):
        spec = archetypes[names[i % len(names)]]
        rng = random.Random(seed * 1_000_003 + i)
        user_id = f"u{i:04d}"
        users.append(_generate_user(spec, user_id, session=user_id, rng=rng))
    return users


def corpus_to_json(users: list[SimulatedUser],
                   archetypes: dict[str, ArchetypeSpec], seed: int) -> dict:
    return {
        "format": CORPUS_FORMAT,
        "seed": seed,
        "archetypes": {name: spec.to_json() for name, spec in archetypes.items()},
        "users": [
            {
                "user": u.user,
                "archetype": u.archetype,
                "plg": u.plg,
                "events": [e.to_record() for e in u.events],
            }
            for u in users
        ],
    }


def corpus_from_json(doc: dict) -> list[SimulatedUser]:
    if not isinstance(doc, dict) or doc.get("format") != CORPUS_FORMAT:
        raise ValueError(f"expected corpus format {CORPUS_FORMAT!r}")
    users = []
    for entry in doc["users"]:
        events = tuple(ActionEvent.from_record(r) for r in entry["events"])
        users.append(SimulatedUser(
            user=entry["user"], archetype=entry["archetype"],
            plg=float(entry["plg"]), events=events))
    return users


def eval_pairs(users: list[SimulatedUser]) -> list[tuple[tuple[ActionEvent, ...], str]]:
    """(event stream, ground-truth label) pairs for accuracy evaluation."""
    return [(u.events, u.label()) for u in users]
