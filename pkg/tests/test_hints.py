"""Hint ranking, reaction-window delivery, escalation, and rendering."""
from __future__ import annotations

import random

import pytest

from arctutor.classifier import ClassifierState, classify_events
from arctutor.discovery import HLG, LLG
from arctutor.events import ActionEvent, ActionType
from arctutor.hints import (
    EXPLAIN_BUTTON_LABEL,
    REACTION_WINDOW,
    STAGE_STRONG,
    STAGE_TEXT,
    DeliveryEngine,
    check_followed,
    load_catalog,
    render_hint,
    score_hints,
)

from helpers import fixture_model, fixture_stream, make_events, random_stream

CATALOG = load_catalog()
BY_FEATURE = {item.feature: item for item in CATALOG}


def fixture_snapshot():
    return classify_events(fixture_model(), fixture_stream())


class TestScoreHints:
    def test_worked_ranking(self):
        ranked = score_hints(fixture_snapshot(), CATALOG)
        assert [(rh.item.list_text, rh.rank) for rh in ranked] == [
            ("Using Reset less frequently", 98),
            ("Using Auto Arc Consistency less frequently", 87),
            ("Spending more time after performing Fine Steps", 18),
        ]

    def test_reset_rank_is_sum_of_its_four_rule_weights(self):
        ranked = score_hints(fixture_snapshot(), CATALOG)
        top = ranked[0]
        assert sorted(r.weight for r in top.contributing_rules) == [18, 19, 21, 40]
        assert top.rank == sum(r.weight for r in top.contributing_rules)

    def test_rank_exactness_on_random_streams(self):
        model = fixture_model()
        rng = random.Random(41)
        for _ in range(100):
            snap = classify_events(model, random_stream(rng, rng.randint(1, 60)))
            for rh in score_hints(snap, CATALOG):
                assert rh.rank == sum(r.weight for r in rh.contributing_rules) > 0
                assert all(
                    any(f == rh.item.feature for f, _ in r.conditions)
                    and r.consequent == LLG
                    for r in rh.contributing_rules)

    def test_no_satisfied_rules_gives_empty_list(self):
        state = ClassifierState(fixture_model(), "s")
        assert score_hints(state.current, CATALOG) == []


class TestCheckFollowed:
    binning = fixture_model().binning

    def test_zero_resets_follows_decrease_hint(self):
        window = make_events([("FineStep", i * 1000) for i in range(40)])
        assert check_followed(BY_FEATURE["freq_Reset"], window, self.binning)

    def test_heavy_resetting_does_not_follow(self):
        actions = []
        for i in range(40):
            actions.append(("Reset" if i % 2 == 0 else "FineStep", i * 1000))
        window = make_events(actions)
        # 20 resets in 40 actions: frequency 0.5 sits in the High bin.
        assert not check_followed(BY_FEATURE["freq_Reset"], window, self.binning)

    def test_increase_hint_followed_when_high(self):
        window = make_events([("DirectArcClick", i * 1000) for i in range(40)])
        assert check_followed(BY_FEATURE["freq_DirectArcClick"], window, self.binning)


def run_engine(events, model=None, catalog=CATALOG):
    model = model or fixture_model()
    state = ClassifierState(model, "s")
    engine = DeliveryEngine(catalog, model.binning)
    deliveries = []
    labels = []
    for event in events:
        snap = state.update(event)
        labels.append(snap.label)
        delivery = engine.on_event(event.seq, snap, state.events)
        if delivery is not None:
            deliveries.append((event.seq, delivery.hint.item.id, delivery.stage))
    return deliveries, labels, engine


def alternating_stream(n):
    return make_events([
        ("Reset" if i % 2 == 0 else "AutoAC", i * 1000) for i in range(n)])


class TestDeliveryEngine:
    def test_escalation_sequence(self):
        deliveries, labels, engine = run_engine(alternating_stream(90))
        assert deliveries[0] == (2, "reset-less", STAGE_TEXT)
        assert deliveries[1] == (42, "reset-less", STAGE_STRONG)
        assert deliveries[2][0] == 82 and deliveries[2][2] == STAGE_TEXT
        assert deliveries[2][1] != "reset-less"  # retired after Strong
        followed = [h.followed for h in engine.state.history]
        assert followed[0] is False

    def test_no_hint_during_active_window(self):
        deliveries, _, _ = run_engine(alternating_stream(41))
        assert [seq for seq, _, _ in deliveries] == [2]

    def test_followed_window_moves_to_fresh_ranking(self):
        # Two resets deliver the reset hint; the window then contains no
        # resets at all, so the hint counts as followed and the next
        # delivery is the fresh top item at the Text stage.
        names = ["Reset", "Reset"] + ["AutoAC"] * 88
        deliveries, _, engine = run_engine(
            make_events([(n, i * 1000) for i, n in enumerate(names)]))
        first_seq = deliveries[0][0]
        assert deliveries[0][1] == "reset-less"
        assert engine.state.history[0].followed is True
        assert deliveries[1][0] == first_seq + REACTION_WINDOW
        assert deliveries[1][1] != "reset-less"
        assert deliveries[1][2] == STAGE_TEXT

    def test_window_property_on_random_streams(self):
        model = fixture_model()
        rng = random.Random(101)
        total_deliveries = 0
        for _ in range(500):
            events = random_stream(rng, rng.randint(0, 120))
            deliveries, labels, engine = run_engine(events, model)
            seqs = [seq for seq, _, _ in deliveries]
            assert all(b - a >= REACTION_WINDOW for a, b in zip(seqs, seqs[1:]))
            for seq, _, _ in deliveries:
                assert labels[seq - 1] == LLG  # HLG silence
            strong = [item for _, item, stage in deliveries
                      if stage == STAGE_STRONG]
            assert len(strong) == len(set(strong))  # escalate at most once
            # A Strong delivery retires the item for the session.
            seen_strong = set()
            for _, item, stage in deliveries:
                assert item not in seen_strong
                if stage == STAGE_STRONG:
                    seen_strong.add(item)
            total_deliveries += len(deliveries)
        assert total_deliveries > 100

    def test_hlg_silence_once_label_recovers(self):
        # The label-flip stream from the classifier tests: LLG early, HLG
        # once reset frequency leaves the High bin and pauses sit mid-range.
        names = (["Reset", "AutoAC", "Reset", "AutoAC", "FineStep"]
                 + ["AutoAC"] * 4 + ["DirectArcClick"] * 3 + ["FineStep"] * 2
                 + ["DomainSplit", "Backtrack"] + ["DirectArcClick"] * 2
                 + ["FineStep", "AutoAC", "AutoAC", "AutoAC", "AutoAC"])
        events = make_events([(n, i * 3000) for i, n in enumerate(names)])
        deliveries, labels, _ = run_engine(events)
        assert labels[-1] == HLG
        for seq, _, _ in deliveries:
            assert labels[seq - 1] == LLG


class TestRenderHint:
    def test_text_stage_payload(self):
        item = BY_FEATURE["freq_DirectArcClick"]
        payload = render_hint(item, STAGE_TEXT, 1)
        assert payload["message"] == ("Do you know that you can tell AC-3 which "
                                      "arc to make consistent by clicking on that arc?")
        assert payload["highlights"] == []
        assert payload["explain_label"] == EXPLAIN_BUTTON_LABEL

    def test_strong_stage_carries_highlights(self):
        item = BY_FEATURE["freq_Reset"]
        payload = render_hint(item, STAGE_STRONG, 2)
        assert payload["highlights"] == ["toolbar.reset"]

    def test_every_payload_carries_explain_label(self):
        for item in CATALOG:
            for stage in (STAGE_TEXT, STAGE_STRONG):
                payload = render_hint(item, stage, 3)
                assert payload["explain_label"] == "Why am I delivered this hint?"


class TestCatalog:
    def test_covers_the_nine_advised_behaviors(self):
        texts = [item.behavior_text for item in CATALOG]
        assert texts == [
            "Use Direct Arc Click more often",
            "Spend more time after performing Direct Arc Clicks",
            "Use Reset less frequently",
            "Use Auto Arc-consistency less frequently",
            "Use Domain Splitting less frequently",
            "Spend more time after performing Fine Steps",
            "Use Back Track less frequently",
            "Use Fine Step less frequently",
            "Spend more time after performing reset",
        ]

    def test_targets_are_known_features(self):
        from arctutor.events import FEATURES
        for item in CATALOG:
            assert item.feature in FEATURES
            assert item.direction in ("increase", "decrease")
