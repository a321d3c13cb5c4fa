"""Primary-user channel occupancy traces and secondary-user placement.

Each licensed channel alternates between idle (0) and busy (1) periods:
idle gaps are geometric with mean ``mean_interarrival`` slots (the discrete
analogue of Poisson arrivals) and busy holding times are geometric with mean
``mean_holding`` slots, P(X=k) = (1-p)^(k-1) p with p = 1/mean. Traces are a
pure function of (params, n_slots, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .seeding import make_rng


@dataclass(frozen=True)
class ChannelParams:
    """Occupancy process parameters for one primary-user channel.

    Means are in slots. Both must be >= 1 so the geometric laws are well
    defined; ``always_idle`` channels skip the check and never turn busy.
    """

    mean_interarrival: float  # mean idle gap between busy periods
    mean_holding: float       # mean busy period length
    always_idle: bool = False

    def __post_init__(self):
        if self.always_idle:
            return
        if not (self.mean_interarrival >= 1.0) or not math.isfinite(self.mean_interarrival):
            raise ValueError(
                f"mean_interarrival must be >= 1 slot, got {self.mean_interarrival}"
            )
        if not (self.mean_holding >= 1.0) or not math.isfinite(self.mean_holding):
            raise ValueError(f"mean_holding must be >= 1 slot, got {self.mean_holding}")

    @classmethod
    def idle(cls) -> "ChannelParams":
        """A channel that is never occupied."""
        return cls(mean_interarrival=1.0, mean_holding=1.0, always_idle=True)


@dataclass(frozen=True)
class SlotConfig:
    """Slot phase durations: sensing time followed by communication time."""

    t_sense: float
    t_comm: float

    def __post_init__(self):
        if self.t_sense <= 0 or self.t_comm <= 0:
            raise ValueError("slot phases must be positive")

    @property
    def slot_length(self) -> float:
        return self.t_sense + self.t_comm


@dataclass(frozen=True)
class ChannelTrace:
    """Binary per-slot occupancy of one channel (0 idle, 1 busy)."""

    states: np.ndarray  # uint8 array of 0/1, length n_slots
    params: ChannelParams
    seed: int

    @property
    def n_slots(self) -> int:
        return len(self.states)

    def busy_fraction(self) -> float:
        return float(np.mean(self.states)) if len(self.states) else 0.0


@dataclass(frozen=True)
class SuLocation:
    """Secondary-user position and communication radius, arena units."""

    x: float
    y: float
    comm_radius: float

    def __post_init__(self):
        if self.comm_radius <= 0:
            raise ValueError(f"comm_radius must be positive, got {self.comm_radius}")

    def distance_to(self, other: "SuLocation") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


def generate_trace(params: ChannelParams, n_slots: int, seed: int) -> ChannelTrace:
    """Generate one alternating idle/busy occupancy trace.

    The channel starts idle; the first busy period begins after a geometric
    gap. Identical (params, n_slots, seed) give bit-identical traces.
    """
    if n_slots < 0:
        raise ValueError(f"n_slots must be >= 0, got {n_slots}")
    states = np.zeros(n_slots, dtype=np.uint8)
    if params.always_idle or n_slots == 0:
        return ChannelTrace(states=states, params=params, seed=seed)

    rng = make_rng(seed)
    p_arrival = 1.0 / params.mean_interarrival
    p_depart = 1.0 / params.mean_holding
    t = 0
    while t < n_slots:
        gap = int(rng.geometric(p_arrival))
        t += gap
        if t >= n_slots:
            break
        hold = int(rng.geometric(p_depart))
        states[t:t + hold] = 1
        t += hold
    return ChannelTrace(states=states, params=params, seed=seed)


def generate_multi(params_list, n_slots: int, seed: int) -> list[ChannelTrace]:
    """Generate independent traces, one per parameter set.

    Channel i uses sub-seed derive_seed(seed, i), so extending the list never
    changes the traces of earlier channels.
    """
    params_list = list(params_list)
    if not params_list:
        raise ValueError("params_list must be nonempty")
    from .seeding import derive_seed

    return [
        generate_trace(params, n_slots, derive_seed(seed, i))
        for i, params in enumerate(params_list)
    ]


def place_users(n: int, arena_side: float, radius: float, seed: int) -> list[SuLocation]:
    """Drop n users uniformly over the [0, arena_side]^2 square."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if arena_side <= 0:
        raise ValueError(f"arena_side must be positive, got {arena_side}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    rng = make_rng(seed)
    coords = rng.uniform(0.0, arena_side, size=(n, 2))
    return [SuLocation(float(x), float(y), radius) for x, y in coords]


def neighbors(locs, k: int) -> set[int]:
    """Indices within communication range of user k (boundary inclusive)."""
    locs = list(locs)
    if not 0 <= k < len(locs):
        raise IndexError(f"user index {k} out of range for {len(locs)} users")
    me = locs[k]
    return {
        j for j, other in enumerate(locs)
        if j != k and me.distance_to(other) <= me.comm_radius
    }


def traces_to_csv(traces) -> str:
    """Render traces as CSV text: slot,channel_0,...,channel_{M-1}."""
    traces = list(traces)
    header = "slot," + ",".join(f"channel_{i}" for i in range(len(traces)))
    lines = [header]
    n_slots = traces[0].n_slots if traces else 0
    for t in range(n_slots):
        lines.append(f"{t}," + ",".join(str(int(tr.states[t])) for tr in traces))
    return "\n".join(lines) + "\n"
