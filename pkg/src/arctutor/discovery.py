"""Offline behavior discovery: cluster users, mine class association rules.

Users are clustered (k-means, k=2) on standardized feature vectors and the
clusters labeled HLG/LLG by mean learning gain. Per cluster, an exhaustive
level-wise search over the discretized feature space yields association
rules `conditions -> cluster`, weighted by confidence x support on a 0-100
scale. The exported model document is the sole input to the online
classifier.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np
from scipy import stats as scipy_stats

from .events import (
    Bin,
    BinningModel,
    DiscreteVector,
    FEATURES,
    FeatureVector,
    discretize,
    fit_binning,
)
from .phrases import rule_text

HLG = "HLG"
LLG = "LLG"
CLUSTER_LABELS = (HLG, LLG)

MODEL_FORMAT = "arctutor-model/1"


class DiscoveryError(Exception):
    code = "DiscoveryError"


class DegenerateCorpus(DiscoveryError):
    code = "DegenerateCorpus"


class EmptyClusterError(DiscoveryError):
    code = "EmptyCluster"


class NoRulesForCluster(DiscoveryError):
    code = "NoRulesForCluster"

    def __init__(self, cluster: str, message: str) -> None:
        super().__init__(message)
        self.cluster = cluster


class ModelFormatError(DiscoveryError):
    code = "ModelFormatError"


@dataclass(frozen=True)
class LabeledUser:
    user: str
    features: FeatureVector
    plg: float


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray            # (k, 13) in standardized space
    labels: dict[int, str]           # cluster index -> HLG/LLG
    mean: np.ndarray
    std: np.ndarray
    binning: BinningModel
    sizes: dict[str, int]
    mean_plg: dict[str, float]
    separated: bool

    def standardize(self, vector: FeatureVector) -> np.ndarray:
        return (np.asarray(vector.values(), dtype=float) - self.mean) / self.std

    def assign(self, vector: FeatureVector) -> str:
        z = self.standardize(vector)
        dists = np.linalg.norm(self.centroids - z, axis=1)
        return self.labels[int(np.argmin(dists))]


def _kmeans_pp_init(z: np.ndarray, k: int, rng: np.random.RandomState) -> np.ndarray:
    n = z.shape[0]
    centers = [z[rng.randint(n)]]
    for _ in range(1, k):
        d2 = np.min(
            [np.sum((z - c) ** 2, axis=1) for c in centers], axis=0)
        total = d2.sum()
        if total <= 0.0:
            centers.append(z[rng.randint(n)])
            continue
        r = rng.random_sample() * total
        idx = int(np.searchsorted(np.cumsum(d2), r))
        centers.append(z[min(idx, n - 1)])
    return np.array(centers)


def cluster_users(corpus: Sequence[LabeledUser], k: int = 2,
                  seed: int = 0) -> ClusterModel:
    """K-means over standardized features, labeled HLG/LLG by mean gain."""
    if len(corpus) < 2 * k:
        raise DegenerateCorpus(f"need at least {2 * k} users, got {len(corpus)}")
    x = np.array([u.features.values() for u in corpus], dtype=float)
    if np.all(x == x[0]):
        raise DegenerateCorpus("all feature vectors are identical")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    z = (x - mean) / std

    rng = np.random.RandomState(seed)
    assignments: Optional[np.ndarray] = None
    centroids: Optional[np.ndarray] = None
    for _attempt in range(10):
        centroids = _kmeans_pp_init(z, k, rng)
        ok = True
        for _ in range(100):
            dists = np.linalg.norm(z[:, None, :] - centroids[None, :, :], axis=2)
            assignments = np.argmin(dists, axis=1)
            moved = 0.0
            for c in range(k):
                members = z[assignments == c]
                if len(members) == 0:
                    ok = False
                    break
                new_c = members.mean(axis=0)
                moved = max(moved, float(np.linalg.norm(new_c - centroids[c])))
                centroids[c] = new_c
            if not ok or moved <= 1e-9:
                break
        if ok:
            break
    else:
        raise EmptyClusterError("k-means produced an empty cluster 10 times")

    plg = np.array([u.plg for u in corpus], dtype=float)
    cluster_plg = [float(plg[assignments == c].mean()) for c in range(k)]
    hlg_index = int(np.argmax(cluster_plg))
    labels = {c: (HLG if c == hlg_index else LLG) for c in range(k)}

    a, b = plg[assignments == hlg_index], plg[assignments != hlg_index]
    separated = False
    if len(a) >= 2 and len(b) >= 2:
        t = scipy_stats.ttest_ind(a, b, equal_var=False)
        separated = bool(np.isfinite(t.pvalue) and t.pvalue < 0.05)

    binning = fit_binning([u.features for u in corpus])
    sizes = {label: int(np.sum(assignments == c)) for c, label in labels.items()}
    mean_plg = {label: cluster_plg[c] for c, label in labels.items()}
    return ClusterModel(
        k=k, centroids=centroids, labels=labels, mean=mean, std=std,
        binning=binning, sizes=sizes, mean_plg=mean_plg, separated=separated)


@dataclass(frozen=True)
class AssociationRule:
    conditions: tuple[tuple[str, Bin], ...]
    consequent: str
    confidence: float
    support: float
    weight: int

    def text(self) -> str:
        return rule_text(list(self.conditions))

    def satisfied_by(self, bins: DiscreteVector) -> bool:
        return all(bins.bin(f) is b for f, b in self.conditions)


@dataclass
class RuleSet:
    rules: list[AssociationRule]

    def for_cluster(self, label: str) -> list[AssociationRule]:
        return [r for r in self.rules if r.consequent == label]

    def total_weight(self, label: str) -> int:
        return sum(r.weight for r in self.for_cluster(label))


def rule_weight(confidence: float, support: float) -> int:
    """Confidence x support on a 0-100 integer scale, at least 1."""
    return max(1, math.floor(100.0 * confidence * support + 0.5))


def mine_rules(model: ClusterModel, corpus: Sequence[LabeledUser],
               min_support: float = 0.3, min_confidence: float = 0.8,
               max_len: int = 3) -> RuleSet:
    """Level-wise exhaustive search for class association rules per cluster.

    `support` is the antecedent's frequency within its cluster; `confidence`
    is measured over the whole corpus. Supersets of an accepted antecedent
    with no confidence gain are pruned.
    """
    bins = [discretize(u.features, model.binning) for u in corpus]
    assigned = [model.assign(u.features) for u in corpus]
    item_rows = [frozenset((f, vec.bin(f)) for f in FEATURES) for vec in bins]

    def corpus_count(antecedent: frozenset) -> int:
        return sum(1 for row in item_rows if antecedent <= row)

    rules: list[AssociationRule] = []
    for label in CLUSTER_LABELS:
        member_rows = [row for row, a in zip(item_rows, assigned) if a == label]
        cluster_n = len(member_rows)
        if cluster_n == 0:
            raise NoRulesForCluster(label, f"cluster {label} has no members")

        def member_count(antecedent: frozenset) -> int:
            return sum(1 for row in member_rows if antecedent <= row)

        items = [frozenset([(f, b)]) for f in FEATURES for b in Bin]
        frequent: dict[int, list[frozenset]] = {}
        frequent[1] = [
            it for it in items if member_count(it) / cluster_n >= min_support]
        for size in range(2, max_len + 1):
            prev = frequent.get(size - 1, [])
            prev_set = set(prev)
            seen: set[frozenset] = set()
            level: list[frozenset] = []
            for i, j in combinations(range(len(prev)), 2):
                cand = prev[i] | prev[j]
                if len(cand) != size or cand in seen:
                    continue
                seen.add(cand)
                if len({f for f, _ in cand}) != size:
                    continue
                if any(frozenset(sub) not in prev_set
                       for sub in combinations(cand, size - 1)):
                    continue
                if member_count(cand) / cluster_n >= min_support:
                    level.append(cand)
            if not level:
                break
            frequent[size] = level

        accepted: list[tuple[frozenset, float, float]] = []
        for size in sorted(frequent):
            for antecedent in frequent[size]:
                covered = corpus_count(antecedent)
                if covered == 0:
                    continue
                confidence = member_count(antecedent) / covered
                if confidence < min_confidence:
                    continue
                support = member_count(antecedent) / cluster_n
                if any(prev_ant < antecedent and prev_conf >= confidence
                       for prev_ant, prev_conf, _ in accepted):
                    continue
                accepted.append((antecedent, confidence, support))

        if not accepted:
            raise NoRulesForCluster(
                label,
                f"no rules for cluster {label}; relax min_support/min_confidence")
        for antecedent, confidence, support in accepted:
            conditions = tuple(sorted(
                antecedent, key=lambda c: (FEATURES.index(c[0]), c[1].value)))
            rules.append(AssociationRule(
                conditions=conditions, consequent=label,
                confidence=confidence, support=support,
                weight=rule_weight(confidence, support)))

    def order(rule: AssociationRule) -> tuple:
        key = tuple((FEATURES.index(f), b.value) for f, b in rule.conditions)
        return (rule.consequent, -rule.weight, len(rule.conditions), key)

    return RuleSet(rules=sorted(rules, key=order))


def export_model(model: ClusterModel, rule_set: RuleSet,
                 meta: Optional[dict] = None) -> dict:
    """Self-contained model document consumed by the online classifier."""
    totals = {label: rule_set.total_weight(label) for label in CLUSTER_LABELS}
    return {
        "format": MODEL_FORMAT,
        "meta": dict(meta or {}),
        "features": list(FEATURES),
        "standardization": {
            "mean": [float(v) for v in model.mean],
            "std": [float(v) for v in model.std],
        },
        "binning": model.binning.to_json(),
        "clusters": {
            label: {
                "size": model.sizes[label],
                "mean_plg": model.mean_plg[label],
                "centroid": [float(v) for v in model.centroids[index]],
            }
            for index, label in model.labels.items()
        },
        "separated": model.separated,
        "rules": [
            {
                "conditions": [[f, b.value] for f, b in rule.conditions],
                "consequent": rule.consequent,
                "confidence": rule.confidence,
                "support": rule.support,
                "weight": rule.weight,
            }
            for rule in rule_set.rules
        ],
        "totals": totals,
    }
