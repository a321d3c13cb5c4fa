"""Spectrum decision agents over the packed channel-occupancy state.

The sensed per-channel states of one slot pack into an M-bit integer; a
shared Q-table (or an empirical MDP solved by value iteration) maps that
state to a channel choice among the currently idle candidates. Rewards
combine the collision outcome with two advisory bits: the predicted next
state of the chosen channel (A) and whether the channel was on the
recommendation list (B). A random-access baseline and the central node's
random priority arbitration live here too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

# 2^M states must stay tabulable
_MAX_CHANNELS = 20


def encode_env_state(channel_states) -> int:
    """Pack M per-channel states into one integer, channel i weighted 2^i."""
    bits = np.asarray(
        getattr(channel_states, "states", channel_states), dtype=np.int64
    )
    if bits.ndim != 1 or len(bits) == 0:
        raise ValueError("need a nonempty 1-d state vector")
    if len(bits) > _MAX_CHANNELS:
        raise ValueError(f"at most {_MAX_CHANNELS} channels, got {len(bits)}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("channel states must be 0 or 1")
    return int(bits @ (1 << np.arange(len(bits), dtype=np.int64)))


def decode_env_state(code: int, m_channels: int) -> np.ndarray:
    """Inverse of encode_env_state for a known channel count."""
    if not 0 <= code < (1 << m_channels):
        raise ValueError(f"code {code} out of range for {m_channels} channels")
    return (code >> np.arange(m_channels, dtype=np.int64)) & 1


@dataclass(frozen=True)
class RewardInputs:
    """Outcome bits of one resolved access."""

    collision: bool
    a: int  # predicted next state of the chosen channel
    b: int  # 1 if the channel was on the recommendation list


# (A, B) -> no-collision reward; a collision negates it
_REWARD_TABLE = {
    (0, 1): 300.0,
    (0, 0): 200.0,
    (1, 1): 200.0,
    (1, 0): 100.0,
}


def reward(inputs: RewardInputs) -> float:
    """Composite reward of one access outcome."""
    if inputs.a not in (0, 1) or inputs.b not in (0, 1):
        raise ValueError("A and B must be 0 or 1")
    base = _REWARD_TABLE[(inputs.a, inputs.b)]
    return -base if inputs.collision else base


@dataclass
class DecisionQTable:
    """Shared state-action values: packed sensed state x channel."""

    values: np.ndarray  # 2^M x M
    alpha: float = 0.5
    gamma: float = 0.5
    epsilon: float = 0.1

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    @property
    def n_actions(self) -> int:
        return self.values.shape[1]


def new_decision_table(
    m_channels: int, alpha: float = 0.5, gamma: float = 0.5, epsilon: float = 0.1
) -> DecisionQTable:
    if not 1 <= m_channels <= _MAX_CHANNELS:
        raise ValueError(
            f"m_channels must be in [1, {_MAX_CHANNELS}], got {m_channels}"
        )
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    return DecisionQTable(
        values=np.zeros((1 << m_channels, m_channels)),
        alpha=alpha,
        gamma=gamma,
        epsilon=epsilon,
    )


def select_action(
    table: DecisionQTable,
    state: int,
    candidates: Iterable[int],
    epsilon: float,
    rng: np.random.Generator,
) -> Optional[int]:
    """Epsilon-greedy channel choice among the candidates; None when empty.

    Greedy ties resolve to the lowest channel index.
    """
    if not 0 <= state < table.n_states:
        raise ValueError(f"state {state} out of range")
    cands = sorted(set(candidates))
    if not cands:
        return None
    if any(not 0 <= a < table.n_actions for a in cands):
        raise ValueError("candidate channel out of range")
    if epsilon > 0 and rng.random() < epsilon:
        return int(cands[int(rng.integers(0, len(cands)))])
    row = table.values[state]
    best, best_q = cands[0], row[cands[0]]
    for a in cands[1:]:
        if row[a] > best_q:
            best, best_q = a, row[a]
    return int(best)


def q_update(
    table: DecisionQTable, s: int, a: int, r: float, s_next: int
) -> DecisionQTable:
    """Standard one-step update toward r + gamma * best next value."""
    if not 0 <= s < table.n_states or not 0 <= s_next < table.n_states:
        raise ValueError("state out of range")
    if not 0 <= a < table.n_actions:
        raise ValueError(f"action {a} out of range")
    target = r + table.gamma * float(np.max(table.values[s_next]))
    table.values[s, a] += table.alpha * (target - table.values[s, a])
    return table


def transition_counts(codes: Sequence[int], n_states: int) -> np.ndarray:
    """Count consecutive-slot transitions of an encoded state sequence."""
    codes = np.asarray(codes, dtype=np.int64)
    if len(codes) < 2:
        raise ValueError("need at least 2 slots to count transitions")
    if codes.min() < 0 or codes.max() >= n_states:
        raise ValueError("encoded state out of range")
    counts = np.zeros((n_states, n_states))
    np.add.at(counts, (codes[:-1], codes[1:]), 1.0)
    return counts


def normalize_transitions(counts: np.ndarray) -> np.ndarray:
    """Row-normalize counts; states never left get a self-loop row."""
    counts = np.asarray(counts, dtype=np.float64)
    totals = counts.sum(axis=1)
    P = np.zeros_like(counts)
    observed = totals > 0
    P[observed] = counts[observed] / totals[observed, None]
    for s in np.flatnonzero(~observed):
        P[s, s] = 1.0
    return P


def estimate_transitions(traces) -> np.ndarray:
    """Empirical state-evolution matrix from per-channel occupancy traces.

    Channel evolution does not depend on the agents' choices, so one row
    per state serves every action.
    """
    arrays = [np.asarray(getattr(tr, "states", tr)) for tr in traces]
    m = len(arrays)
    if m == 0:
        raise ValueError("need at least one channel trace")
    stacked = np.stack(arrays, axis=1)  # T x M
    if stacked.shape[0] < 2:
        raise ValueError("need at least 2 slots to estimate transitions")
    codes = stacked @ (1 << np.arange(m, dtype=np.int64))
    return normalize_transitions(transition_counts(codes, 1 << m))


@dataclass
class MdpModel:
    """Empirical decision process: shared transitions, per-(s,a) rewards."""

    transition: np.ndarray       # S x S (shared rows) or S x A x S
    reward: np.ndarray           # S (state reward) or S x A
    gamma: float = 0.5
    v: Optional[np.ndarray] = None
    policy: Optional[np.ndarray] = None


def value_iteration(model: MdpModel, gamma: Optional[float] = None, tol: float = 1e-6):
    """Iterate Bellman backups to the optimal value function and policy.

    Stops when the max-norm change drops below tol; greedy ties resolve to
    the lowest action index. Accepts shared (S x S) or per-action
    (S x A x S) transitions and per-state or per-(s,a) rewards.
    """
    g = model.gamma if gamma is None else gamma
    if not 0 <= g < 1:
        raise ValueError(f"gamma must be in [0, 1), got {g}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    R = np.asarray(model.reward, dtype=np.float64)
    if R.ndim == 1:
        R = R[:, None]
    P = np.asarray(model.transition, dtype=np.float64)
    S, A = R.shape
    V = np.zeros(S)
    for _ in range(1_000_000):
        if P.ndim == 2:
            future = (P @ V)[:, None]  # same continuation for every action
        else:
            future = P @ V  # S x A
        Q = R + g * future
        V_new = Q.max(axis=1)
        delta = float(np.max(np.abs(V_new - V)))
        V = V_new
        if delta < tol:
            break
    else:
        raise RuntimeError("value iteration failed to converge")
    policy = np.argmax(Q, axis=1)
    model.v = V
    model.policy = policy
    return V, policy


def arbitrate(
    requests: Iterable[int],
    holding: Optional[Iterable[int]],
    rng: np.random.Generator,
) -> list:
    """Random priority order over this slot's requesting users.

    Users already holding a channel are dropped; earlier positions pick
    channels first.
    """
    held = set(holding) if holding is not None else set()
    pending = sorted(set(requests) - held)
    if not pending:
        return []
    order = rng.permutation(len(pending))
    return [pending[i] for i in order]


def random_access(
    candidates: Iterable[int], rng: np.random.Generator
) -> Optional[int]:
    """Uniform channel choice among the candidates; None when empty."""
    cands = sorted(set(candidates))
    if not cands:
        return None
    return int(cands[int(rng.integers(0, len(cands)))])


def decision_table_to_json(table: DecisionQTable) -> str:
    doc = {
        "kind": "decision_q",
        "n_states": table.n_states,
        "n_actions": table.n_actions,
        "values": table.values.ravel().tolist(),
        "alpha": table.alpha,
        "gamma": table.gamma,
        "epsilon": table.epsilon,
    }
    return json.dumps(doc, sort_keys=True)


def decision_table_from_json(text: str) -> DecisionQTable:
    doc = json.loads(text)
    if doc.get("kind") != "decision_q":
        raise ValueError("not a decision table document")
    values = np.array(doc["values"]).reshape(doc["n_states"], doc["n_actions"])
    return DecisionQTable(
        values=values,
        alpha=doc["alpha"],
        gamma=doc["gamma"],
        epsilon=doc["epsilon"],
    )


def mdp_to_json(model: MdpModel) -> str:
    doc = {
        "kind": "mdp",
        "gamma": model.gamma,
        "transition_shape": list(np.shape(model.transition)),
        "transition": np.asarray(model.transition).ravel().tolist(),
        "reward_shape": list(np.shape(model.reward)),
        "reward": np.asarray(model.reward).ravel().tolist(),
        "v": None if model.v is None else np.asarray(model.v).tolist(),
        "policy": None if model.policy is None else np.asarray(model.policy).tolist(),
    }
    return json.dumps(doc, sort_keys=True)


def mdp_from_json(text: str) -> MdpModel:
    doc = json.loads(text)
    if doc.get("kind") != "mdp":
        raise ValueError("not an MDP document")
    return MdpModel(
        transition=np.array(doc["transition"]).reshape(doc["transition_shape"]),
        reward=np.array(doc["reward"]).reshape(doc["reward_shape"]),
        gamma=doc["gamma"],
        v=None if doc["v"] is None else np.array(doc["v"]),
        policy=None if doc["policy"] is None else np.array(doc["policy"], dtype=np.int64),
    )
