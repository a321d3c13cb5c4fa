"""Cooperative spectrum prediction: fusing per-user local predictions.

N secondary users each report a binary prediction for the slot; the reports
are packed into one table index and a two-action Q-table learns which fused
call (idle/busy) pays off against the realized state. Hard M-out-of-N voting
and probability-ratio soft combining serve as baselines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .seeding import make_rng

# table index space is 2^N, so the user count must stay tabulable
_MAX_USERS = 20


@dataclass
class LocalPredictions:
    """One slot's per-user binary predictions."""

    bits: np.ndarray  # length N, entries 0/1, user i at position i
    t: int = 0


def _bits_of(preds) -> np.ndarray:
    bits = getattr(preds, "bits", preds)
    return np.asarray(bits, dtype=np.int64)


def encode_state(preds) -> int:
    """Pack N prediction bits into one integer, user i weighted 2^i."""
    bits = _bits_of(preds)
    if bits.ndim != 1 or len(bits) == 0:
        raise ValueError("need a nonempty 1-d bit vector")
    if len(bits) > _MAX_USERS:
        raise ValueError(f"at most {_MAX_USERS} users, got {len(bits)}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("prediction bits must be 0 or 1")
    return int(bits @ (1 << np.arange(len(bits), dtype=np.int64)))


def decode_state(code: int, n_users: int) -> np.ndarray:
    """Inverse of encode_state for a known user count."""
    if not 0 <= code < (1 << n_users):
        raise ValueError(f"code {code} out of range for {n_users} users")
    return (code >> np.arange(n_users, dtype=np.int64)) & 1


@dataclass
class FusionQTable:
    """State-action values over packed prediction vectors.

    Rewards are r_p for a fused call that matches the realized state and r_n
    otherwise. alpha and epsilon are defaults; training may override both
    per step (visit-count averaging, exploration annealing).
    """

    values: np.ndarray  # 2^N x 2
    alpha: float = 0.5
    gamma: float = 0.5
    r_p: float = 1.0
    r_n: float = -1.0
    epsilon: float = 0.1

    @property
    def n_states(self) -> int:
        return self.values.shape[0]


def new_table(
    n_users: int,
    alpha: float = 0.5,
    gamma: float = 0.5,
    r_p: float = 1.0,
    r_n: float = -1.0,
    epsilon: float = 0.1,
) -> FusionQTable:
    if not 1 <= n_users <= _MAX_USERS:
        raise ValueError(f"n_users must be in [1, {_MAX_USERS}], got {n_users}")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    return FusionQTable(
        values=np.zeros((1 << n_users, 2)),
        alpha=alpha,
        gamma=gamma,
        r_p=r_p,
        r_n=r_n,
        epsilon=epsilon,
    )


def fusion_step(
    table: FusionQTable,
    state: int,
    next_state: int,
    actual: int,
    rng: np.random.Generator,
    alpha: Optional[float] = None,
    epsilon: Optional[float] = None,
):
    """One epsilon-greedy act-and-learn step; returns (action, table).

    The action is chosen from the pre-update table: greedy argmax with
    probability 1-epsilon (ties toward idle), uniform otherwise. The update
    is in place.
    """
    if not 0 <= state < table.n_states or not 0 <= next_state < table.n_states:
        raise ValueError(f"state {state}/{next_state} out of range")
    if actual not in (0, 1):
        raise ValueError(f"actual must be 0 or 1, got {actual}")
    eps = table.epsilon if epsilon is None else epsilon
    lr = table.alpha if alpha is None else alpha
    if eps > 0 and rng.random() < eps:
        action = int(rng.integers(0, 2))
    else:
        action = int(np.argmax(table.values[state]))
    r = table.r_p if action == actual else table.r_n
    target = r + table.gamma * float(np.max(table.values[next_state]))
    table.values[state, action] += lr * (target - table.values[state, action])
    return action, table


def greedy_actions(table: FusionQTable) -> np.ndarray:
    """Per-state greedy action, ties toward idle."""
    return np.argmax(table.values, axis=1)


def train_fusion(
    local_bits: np.ndarray,
    actual: Sequence[int],
    seed: int,
    gamma: float = 0.5,
    r_p: float = 1.0,
    r_n: float = -1.0,
    epsilon: float = 0.1,
    sample_average: bool = True,
) -> FusionQTable:
    """Run the fusion learner over a full trace of local predictions.

    local_bits is T x N. Exploration decays linearly from epsilon to zero
    over the first half of the run; with sample_average the learning rate
    for each (state, action) is 1/visit-count, which settles the greedy
    policy on the empirically best action per state.
    """
    local_bits = np.asarray(local_bits, dtype=np.int64)
    actual = np.asarray(actual, dtype=np.int64)
    if local_bits.ndim != 2 or local_bits.shape[0] != len(actual):
        raise ValueError("local_bits must be T x N aligned with actual")
    T, n_users = local_bits.shape
    if T < 2:
        raise ValueError("need at least 2 slots to train")
    table = new_table(n_users, gamma=gamma, r_p=r_p, r_n=r_n, epsilon=epsilon)
    rng = make_rng(seed)
    codes = local_bits @ (1 << np.arange(n_users, dtype=np.int64))
    visits = np.zeros((table.n_states, 2), dtype=np.int64)
    half = (T - 1) / 2.0
    for t in range(T - 1):
        eps_t = epsilon * max(0.0, 1.0 - t / half)
        s, s_next = int(codes[t]), int(codes[t + 1])
        if eps_t > 0 and rng.random() < eps_t:
            action = int(rng.integers(0, 2))
        else:
            action = int(np.argmax(table.values[s]))
        visits[s, action] += 1
        lr = 1.0 / visits[s, action] if sample_average else table.alpha
        r = r_p if action == actual[t] else r_n
        target = r + gamma * float(np.max(table.values[s_next]))
        table.values[s, action] += lr * (target - table.values[s, action])
    return table


def m_out_of_n(preds, m: int) -> int:
    """Hard vote: busy when at least m of the N users predict busy."""
    bits = _bits_of(preds)
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("prediction bits must be 0 or 1")
    if not 1 <= m <= len(bits):
        raise ValueError(f"m must be in [1, {len(bits)}], got {m}")
    return 1 if int(bits.sum()) >= m else 0


def soft_fuse(p0: Sequence[float], p1: Sequence[float]) -> int:
    """Probability-ratio combining: idle when sum (p0-p1)/(p0+p1) >= 0."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    if p0.shape != p1.shape or p0.ndim != 1 or len(p0) == 0:
        raise ValueError("p0 and p1 must be equal-length nonempty vectors")
    denom = p0 + p1
    if np.any(denom <= 0):
        raise ValueError("each p0_i + p1_i must be positive")
    score = float(np.sum((p0 - p1) / denom))
    return 0 if score >= 0 else 1


def noisy_local_predictions(
    true_states: Sequence[int], error_rates: Sequence[float], seed: int
) -> np.ndarray:
    """Simulate N users whose predictions flip the truth independently.

    Entry (t, i) equals the true state at slot t flipped with probability
    error_rates[i].
    """
    states = np.asarray(true_states, dtype=np.int64)
    rates = np.asarray(error_rates, dtype=np.float64)
    if np.any(rates < 0) or np.any(rates > 1):
        raise ValueError("error rates must lie in [0, 1]")
    rng = make_rng(seed)
    flips = rng.random((len(states), len(rates))) < rates[None, :]
    return np.where(flips, 1 - states[:, None], states[:, None]).astype(np.int64)


def table_to_csv(table: FusionQTable) -> str:
    """Dump the table as CSV: state,q_idle,q_busy."""
    lines = ["state,q_idle,q_busy"]
    for s in range(table.n_states):
        lines.append(f"{s},{float(table.values[s, 0])!r},{float(table.values[s, 1])!r}")
    return "\n".join(lines) + "\n"
