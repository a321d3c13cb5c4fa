"""Channel recommendation from secondary users' access experience.

Every resolved channel access leaves a rating: how many slots the user
transmitted before the primary user came back (the full K when it never
did). Channels are ranked by the mean rating over a recent time window,
optionally discounting each record by the distance between its author and
the target user, and channels above a threshold form the recommendation
list. A generic neighborhood rating predictor covers the mean, weighted,
and mean-centered variants.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


def score_access(slots_transmitted: int, k: int) -> int:
    """Rating for one access: slots sent before interruption, at most K."""
    if not 0 <= slots_transmitted <= k:
        raise ValueError(
            f"slots_transmitted must be in [0, {k}], got {slots_transmitted}"
        )
    return int(slots_transmitted)


@dataclass(frozen=True)
class AccessRecord:
    """One access outcome: user, channel, start slot, rating."""

    su: int
    channel: int
    t: int
    rating: int

    def __post_init__(self):
        if self.rating < 0:
            raise ValueError(f"rating must be nonnegative, got {self.rating}")


@dataclass
class ScoreMatrix:
    """Append-only, time-ordered log of access records.

    Records are also indexed per channel so recent-window queries stay cheap
    inside the slot loop.
    """

    n_su: int
    m_ch: int
    records: list = field(default_factory=list)

    def __post_init__(self):
        self._by_channel = [[] for _ in range(self.m_ch)]
        for r in self.records:
            self._by_channel[r.channel].append(r)

    def append(self, record: AccessRecord) -> None:
        if not 0 <= record.su < self.n_su:
            raise ValueError(f"su {record.su} out of range")
        if not 0 <= record.channel < self.m_ch:
            raise ValueError(f"channel {record.channel} out of range")
        if self.records and record.t < self.records[-1].t:
            raise ValueError("records must be appended in nondecreasing time order")
        self.records.append(record)
        self._by_channel[record.channel].append(record)

    def window_records(self, channel: int, now: int, window: int) -> list:
        """Records for a channel within the latest `window` slots before now."""
        lo = now - window
        per_ch = self._by_channel[channel]
        i = bisect.bisect_left(per_ch, lo, key=lambda r: r.t)
        return [r for r in per_ch[i:] if r.t < now]


def cf_predict(
    target: int,
    item: int,
    neighbors: Sequence[int],
    ratings: np.ndarray,
    similarities: Optional[Sequence[float]] = None,
    mode: str = "mean",
) -> float:
    """Predict the target user's rating of an item from its neighbors.

    ratings is users x items with NaN marking unrated cells. mean averages
    the neighbors' ratings; weighted scales them by similarity over the
    total absolute similarity; centered removes each neighbor's own rating
    bias and re-anchors at the target's mean (means taken over rated items
    only).
    """
    ratings = np.asarray(ratings, dtype=np.float64)
    neighbors = list(neighbors)
    if not neighbors:
        raise ValueError("neighbor set is empty, rating undefined")
    r_vi = np.array([ratings[v, item] for v in neighbors])
    if np.any(np.isnan(r_vi)):
        raise ValueError("a neighbor has not rated this item")
    if mode == "mean":
        return float(np.mean(r_vi))
    if similarities is None:
        raise ValueError(f"mode {mode!r} needs similarities")
    sims = np.asarray(similarities, dtype=np.float64)
    if sims.shape != (len(neighbors),):
        raise ValueError("one similarity per neighbor required")
    sim_mass = float(np.sum(np.abs(sims)))
    if sim_mass == 0.0:
        raise ValueError("zero similarity mass, rating undefined")
    if mode == "weighted":
        return float(np.sum(sims * r_vi) / sim_mass)
    if mode == "centered":
        means = np.array([_user_mean(ratings, v) for v in neighbors])
        anchor = _user_mean(ratings, target)
        return float(np.sum(sims * (r_vi - means)) / sim_mass + anchor)
    raise ValueError(f"unknown mode {mode!r}")


def _user_mean(ratings: np.ndarray, user: int) -> float:
    row = ratings[user]
    rated = row[~np.isnan(row)]
    if len(rated) == 0:
        raise ValueError(f"user {user} has no rated items, mean undefined")
    return float(np.mean(rated))


def final_score(
    matrix: ScoreMatrix, channel: int, now: int, window: int
) -> Optional[float]:
    """Mean rating of a channel over the recent window; None when untried.

    All raters count equally (unit similarity).
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    recs = matrix.window_records(channel, now, window)
    if not recs:
        return None
    return sum(r.rating for r in recs) / len(recs)


def final_score_located(
    matrix: ScoreMatrix,
    channel: int,
    target: int,
    locations: Sequence,
    now: int,
    window: int,
) -> Optional[float]:
    """Distance-weighted mean rating: each record counts rating * e^(-d).

    d is the Euclidean distance from the record's author to the target
    user, so far-away experience contributes almost nothing.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    recs = matrix.window_records(channel, now, window)
    if not recs:
        return None
    me = locations[target]
    total = 0.0
    for r in recs:
        d = me.distance_to(locations[r.su])
        total += r.rating * math.exp(-d)
    return total / len(recs)


@dataclass
class RecommendationList:
    """Channels scoring above the threshold, best first."""

    entries: list  # (channel, score) tuples, descending score, ties by index
    threshold: float

    @property
    def channels(self) -> list:
        return [ch for ch, _ in self.entries]


def default_threshold(scores: Sequence[Optional[float]]) -> Optional[float]:
    """Half the best defined score; None when every channel is unscored."""
    defined = [s for s in scores if s is not None]
    if not defined:
        return None
    return max(defined) / 2.0


def recommend(scores: Sequence[Optional[float]], th: float) -> RecommendationList:
    """Filter channels scoring strictly above th and sort best-first."""
    if th is None or not math.isfinite(th):
        raise ValueError(f"threshold must be finite, got {th}")
    entries = [
        (ch, float(s)) for ch, s in enumerate(scores) if s is not None and s > th
    ]
    entries.sort(key=lambda e: (-e[1], e[0]))
    return RecommendationList(entries=entries, threshold=float(th))


def score_matrix_to_csv(matrix: ScoreMatrix) -> str:
    """Dump the access log as CSV: t,su,channel,rating."""
    lines = ["t,su,channel,rating"]
    for r in matrix.records:
        lines.append(f"{r.t},{r.su},{r.channel},{r.rating}")
    return "\n".join(lines) + "\n"
