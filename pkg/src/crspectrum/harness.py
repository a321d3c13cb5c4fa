"""Experiment drivers: prediction, fusion, recommendation, decision runs.

Every run is a pure function of (config, master seed). The master seed
fans out to one seed per repetition, and each repetition derives one
stream per component (channel traces, predictor training, request
arrivals, arbitration, agent exploration), so adding a method or a K
value never perturbs the others.

Wall-clock timings are collected for reporting but kept out of the
emitted JSON/CSV so identical runs serialize to identical bytes.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import ChannelParams, generate_multi, generate_trace, place_users, neighbors
from .config import SimConfig, config_to_dict
from .decision import (
    RewardInputs,
    new_decision_table,
    q_update,
    random_access,
    reward,
    select_action,
)
from .fusion import (
    greedy_actions,
    m_out_of_n,
    noisy_local_predictions,
    soft_fuse,
    train_fusion,
)
from .predictors import (
    bp_predict_many,
    bp_train,
    elm_predict,
    elm_predict_many,
    elm_train,
    eval_prediction,
    hmm_fit,
    hmm_predict,
    make_training_set,
    threshold,
    transition_error_fraction,
)
from .recommender import (
    AccessRecord,
    ScoreMatrix,
    default_threshold,
    final_score,
    final_score_located,
    score_access,
)
from .seeding import derive_seed, make_rng

# sub-seed namespace per repetition
_TAG_CHANNELS = 1
_TAG_ELM = 2
_TAG_BP = 3
_TAG_NOISE = 4
_TAG_FUSION = 5
_TAG_LOCATIONS = 6
_TAG_SIM = 7

_METHOD_IDS = {"q": 0, "mdp": 1, "random": 2, "cf": 3}


@dataclass
class DecisionMetrics:
    """Access outcome rates; undefined rates are None, never zero."""

    n_total: int
    n_collision: int
    d_success: int

    @property
    def p_collision(self) -> Optional[float]:
        return self.n_collision / self.n_total if self.n_total > 0 else None

    @property
    def d_e(self) -> Optional[float]:
        return self.d_success / self.n_total if self.n_total > 0 else None


@dataclass
class RunSummary:
    """Everything one scenario run produced.

    rows is flat (one dict per method x K x seed cell) and fully determined
    by (config, seed); timings hold wall-clock seconds and stay out of the
    canonical exports.
    """

    scenario: str
    config: dict
    seeds: list
    rows: list
    aggregates: dict
    series: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    events: Optional[list] = None


def _channel_params(cfg: SimConfig, rng: np.random.Generator) -> list:
    """Per-channel occupancy parameters, drawn from ranges when configured."""
    params = []
    active = cfg.n_channels - (1 if cfg.last_channel_idle else 0)
    for _ in range(active):
        if cfg.holding_range is not None:
            hold = float(rng.uniform(cfg.holding_range[0], cfg.holding_range[1]))
        else:
            hold = cfg.mean_holding
        if cfg.interarrival_range is not None:
            gap = float(
                rng.uniform(cfg.interarrival_range[0], cfg.interarrival_range[1])
            )
        else:
            gap = cfg.mean_interarrival
        params.append(ChannelParams(mean_interarrival=gap, mean_holding=hold))
    if cfg.last_channel_idle:
        params.append(ChannelParams.idle())
    return params


# ---------------------------------------------------------------------------
# prediction benchmark


def run_prediction_benchmark(cfg: SimConfig) -> RunSummary:
    """Train the three predictors on the first half of a trace, score the rest."""
    rows = []
    timings = {}
    sweep_windows = [2, 4, 6, 8, 10, 12, 14]
    sweep_mse = np.zeros((cfg.reps, len(sweep_windows)))
    for rep in range(cfg.reps):
        rep_seed = derive_seed(cfg.seed, rep)
        params = _channel_params(cfg, make_rng(rep_seed, _TAG_CHANNELS, 0))
        trace = generate_trace(
            params[0], cfg.n_slots, derive_seed(rep_seed, _TAG_CHANNELS, 1)
        )
        states = trace.states
        half = cfg.n_slots // 2
        train = make_training_set(states[:half], cfg.window)
        test = make_training_set(states[half - cfg.window:], cfg.window)
        actual = test.targets.astype(np.int64)

        t0 = time.perf_counter()
        elm = elm_train(train, cfg.elm_hidden, derive_seed(rep_seed, _TAG_ELM))
        t_elm = time.perf_counter() - t0
        t0 = time.perf_counter()
        bp = bp_train(
            train,
            hidden_count=cfg.bp_hidden,
            learning_rate=cfg.bp_lr,
            max_epochs=cfg.bp_epochs,
            goal_mse=cfg.bp_goal,
            seed=derive_seed(rep_seed, _TAG_BP),
        )
        t_bp = time.perf_counter() - t0
        t0 = time.perf_counter()
        hmm = hmm_fit(states[:half])
        t_hmm = time.perf_counter() - t0

        raw_elm = elm_predict_many(elm, test.inputs)
        raw_bp = bp_predict_many(bp, test.inputs)
        pred_hmm = np.array(
            [hmm_predict(hmm, w) for w in test.inputs.astype(np.int64)]
        )
        per_method = {
            "elm": ((raw_elm >= cfg.lam).astype(np.int64), raw_elm, t_elm),
            "bp": ((raw_bp >= cfg.lam).astype(np.int64), raw_bp, t_bp),
            "hmm": (pred_hmm, None, t_hmm),
        }
        for method, (pred, raw, t_train) in per_method.items():
            m = eval_prediction(pred, actual, train_times=(t_train, t_bp), raw=raw)
            near = transition_error_fraction(pred, actual)
            tp = int(np.sum((pred == 1) & (actual == 1)))
            tn = int(np.sum((pred == 0) & (actual == 0)))
            fp = int(np.sum((pred == 1) & (actual == 0)))
            fn = int(np.sum((pred == 0) & (actual == 1)))
            rows.append(
                {
                    "method": method,
                    "seed": rep,
                    "p_d": m.p_d,
                    "p_fa": m.p_fa,
                    "accuracy": m.accuracy,
                    "mse": m.mse,
                    "tp": tp,
                    "tn": tn,
                    "fp": fp,
                    "fn": fn,
                    "errors_near_transition": near,
                }
            )
            timings[f"{method}_train_s_rep{rep}"] = t_train
            if m.i_speed is not None:
                timings[f"{method}_i_speed_rep{rep}"] = m.i_speed
                timings[f"{method}_d_time_rep{rep}"] = m.d_time
        for j, w in enumerate(sweep_windows):
            tr_w = make_training_set(states[:half], w)
            te_w = make_training_set(states[half - w:], w)
            model_w = elm_train(tr_w, cfg.elm_hidden, derive_seed(rep_seed, _TAG_ELM, w))
            raw_w = elm_predict_many(model_w, te_w.inputs)
            sweep_mse[rep, j] = float(np.mean((raw_w - te_w.targets) ** 2))

    aggregates = _mean_rows(rows, group=("method",), metrics=("accuracy", "p_d", "p_fa", "mse"))
    series = {
        "mse_vs_window": {
            "x": sweep_windows,
            "x_label": "input window (slots)",
            "y_label": "test mse",
            "lines": {"elm": [float(v) for v in sweep_mse.mean(axis=0)]},
        }
    }
    return RunSummary(
        scenario=cfg.scenario,
        config=config_to_dict(cfg),
        seeds=list(range(cfg.reps)),
        rows=rows,
        aggregates=aggregates,
        series=series,
        timings=timings,
    )


# ---------------------------------------------------------------------------
# fusion benchmark


def run_fusion_benchmark(cfg: SimConfig) -> RunSummary:
    """Q-fusion against hard voting, soft combining, and a Markov baseline."""
    rows = []
    rates = np.asarray(cfg.error_rates, dtype=np.float64)
    if len(rates) > 20:
        raise ValueError("fusion state space needs at most 20 cooperating users")
    for rep in range(cfg.reps):
        rep_seed = derive_seed(cfg.seed, rep)
        params = _channel_params(cfg, make_rng(rep_seed, _TAG_CHANNELS, 0))
        trace = generate_trace(
            params[0], cfg.n_slots, derive_seed(rep_seed, _TAG_CHANNELS, 1)
        )
        states = trace.states.astype(np.int64)
        bits = noisy_local_predictions(states, rates, derive_seed(rep_seed, _TAG_NOISE))
        table = train_fusion(
            bits,
            states,
            derive_seed(rep_seed, _TAG_FUSION),
            gamma=cfg.gamma,
            r_p=cfg.r_p,
            r_n=cfg.r_n,
            epsilon=cfg.epsilon,
        )
        policy = greedy_actions(table)
        codes = bits @ (1 << np.arange(bits.shape[1], dtype=np.int64))
        preds = {"q_fusion": policy[codes]}
        n = bits.shape[1]
        for m in range(1, n + 1):
            preds[f"vote_m{m}"] = np.array([m_out_of_n(b, m) for b in bits])
        # likelihood-calibrated soft inputs: p1 is the chance the channel is
        # busy given that user's report and its error rate
        p1 = np.where(bits == 1, 1.0 - rates[None, :], rates[None, :])
        preds["soft"] = np.array(
            [soft_fuse(1.0 - p, p) for p in p1]
        )
        half = cfg.n_slots // 2
        hmm = hmm_fit(states[:half])
        test = make_training_set(states[half - cfg.window:], cfg.window)
        hmm_pred = np.array([hmm_predict(hmm, w) for w in test.inputs.astype(np.int64)])

        for i in range(n):
            preds[f"local_{i}"] = bits[:, i]
        for method, pred in preds.items():
            m = eval_prediction(pred, states)
            rows.append(
                {
                    "method": method,
                    "seed": rep,
                    "p_d": m.p_d,
                    "p_fa": m.p_fa,
                    "accuracy": m.accuracy,
                    "n_evaluated": int(len(states)),
                }
            )
        m = eval_prediction(hmm_pred, test.targets.astype(np.int64))
        rows.append(
            {
                "method": "hmm",
                "seed": rep,
                "p_d": m.p_d,
                "p_fa": m.p_fa,
                "accuracy": m.accuracy,
                "n_evaluated": int(len(hmm_pred)),
            }
        )
    aggregates = _mean_rows(rows, group=("method",), metrics=("accuracy", "p_d", "p_fa"))
    return RunSummary(
        scenario=cfg.scenario,
        config=config_to_dict(cfg),
        seeds=list(range(cfg.reps)),
        rows=rows,
        aggregates=aggregates,
    )


# ---------------------------------------------------------------------------
# slot-loop access simulator (recommendation and decision scenarios)


def _simulate_access(
    cfg: SimConfig,
    pu: np.ndarray,
    method: str,
    k: int,
    env_seed: int,
    act_seed: int,
    elm_models=None,
    locations=None,
    neighbor_sets=None,
    collect_events: bool = False,
    audit: Optional[list] = None,
):
    """Run one policy over shared channel traces for a full horizon.

    pu is the M x T occupancy matrix. env_seed drives the request and
    arbitration streams (shared across methods so policies face identical
    demand); act_seed drives the agent's own randomness. Returns the
    metric counts, the score matrix, and (optionally) per-decision events.
    Accesses granted during the warm-up phase train the agents and seed
    the score matrix but are excluded from the metric counts.
    """
    m_ch, n_slots = pu.shape
    pu_list = pu.tolist()
    weights = 1 << np.arange(m_ch, dtype=np.int64)
    codes = (pu.T.astype(np.int64) @ weights).tolist()

    rng_req = make_rng(env_seed, 0)
    rng_arb = make_rng(env_seed, 1)
    rng_act = make_rng(act_seed, 2)

    table = new_decision_table(
        m_ch, alpha=cfg.alpha, gamma=cfg.gamma, epsilon=cfg.epsilon
    )
    r_sums = np.zeros((1 << m_ch, m_ch))
    r_counts = np.zeros((1 << m_ch, m_ch), dtype=np.int64)

    matrix = ScoreMatrix(n_su=cfg.n_su, m_ch=m_ch)
    holds = {}          # su -> dict(channel, t0, a, b, state)
    holder = [-1] * m_ch
    partner_of = {}     # receiving su -> transmitting su (scenario 2)
    paired = {}         # transmitting su -> receiving su

    n_total = n_collision = d_success = 0
    events = [] if collect_events else None
    half_horizon = max(1, n_slots // 2)

    def resolve(su, hold, t, collision):
        nonlocal n_total, n_collision, d_success
        rating = score_access(t - hold["t0"] if collision else k, k)
        holder[hold["channel"]] = -1
        if su in paired:
            partner_of.pop(paired.pop(su), None)
        matrix.append(
            AccessRecord(su=su, channel=hold["channel"], t=t, rating=rating)
        )
        r = reward(RewardInputs(collision=collision, a=hold["a"], b=hold["b"]))
        q_update(table, hold["state"], hold["channel"], r, codes[t] if t < n_slots else hold["state"])
        r_sums[hold["state"], hold["channel"]] += r
        r_counts[hold["state"], hold["channel"]] += 1
        if hold["t0"] >= cfg.warmup_slots:
            n_total += 1
            if collision:
                n_collision += 1
            else:
                d_success += 1
        if events is not None:
            events.append(
                {
                    "slot": t,
                    "t0": hold["t0"],
                    "su": su,
                    "state": hold["state"],
                    "action": hold["channel"],
                    "A": hold["a"],
                    "B": hold["b"],
                    "reward": r,
                    "collision": bool(collision),
                    "counted": hold["t0"] >= cfg.warmup_slots,
                }
            )

    def predict_bit(channel, t):
        # advisory bit A: thresholded next-slot prediction for the channel
        model = elm_models[channel] if elm_models else None
        if model is None or t + 1 < cfg.window:
            return pu_list[channel][t]  # not enough history: persistence
        window = pu[channel, t - cfg.window + 1: t + 1]
        return threshold(elm_predict(model, window), cfg.lam)

    for t in range(n_slots):
        # resolve running holds before anything else this slot
        for su in sorted(holds):
            hold = holds[su]
            if t >= hold["t0"] + k:
                del holds[su]
                resolve(su, hold, t, collision=False)
            elif pu_list[hold["channel"]][t] == 1:
                del holds[su]
                resolve(su, hold, t, collision=True)

        state = codes[t]

        # who requests: idle users, by coin flip or in periodic bursts
        busy = set(holds) | set(partner_of)
        if cfg.burst_requests:
            requesting = [u for u in range(cfg.n_su) if u not in busy] if t % cfg.t == 0 else []
        else:
            draws = rng_req.random(cfg.n_su)
            requesting = [
                u for u in range(cfg.n_su) if u not in busy and draws[u] < cfg.request_prob
            ]
        if requesting:
            order = [requesting[i] for i in rng_arb.permutation(len(requesting))]
        else:
            order = []
        if not order:
            if audit is not None:
                _append_audit(audit, t, pu_list, holder, m_ch)
            continue

        # channel scores for the recommendation signal, frozen for this slot
        if locations is None:
            scores = [
                final_score(matrix, ch, now=t, window=cfg.score_window)
                for ch in range(m_ch)
            ]
            th = _threshold_of(cfg, scores)
            recommended = _listed(scores, th)

        granted_this_slot = set()
        warmup = t < cfg.warmup_slots
        for su in order:
            if su in busy:
                continue  # claimed as a partner earlier this slot
            if locations is not None:
                scores = [
                    final_score_located(
                        matrix, ch, su, locations, now=t, window=cfg.score_window
                    )
                    for ch in range(m_ch)
                ]
                th = _threshold_of(cfg, scores)
                recommended = _listed(scores, th)
                # pairwise link: without a free neighbor the request dies
                partner = None
                for v in sorted(neighbor_sets[su]):
                    if v not in busy:
                        partner = v
                        break
                if partner is None:
                    continue
            candidates = [
                c
                for c in range(m_ch)
                if pu_list[c][t] == 0
                and holder[c] < 0
                and c not in granted_this_slot
                and t + k <= n_slots
            ]
            if not candidates:
                continue
            if warmup or method == "random":
                channel = random_access(candidates, rng_act)
            elif method == "q":
                eps_t = cfg.epsilon * max(0.0, 1.0 - t / half_horizon)
                channel = select_action(table, state, candidates, eps_t, rng_act)
            elif method == "mdp":
                channel = _argmax_reward(r_sums, r_counts, state, candidates)
            elif method == "cf":
                listed = [c for c in candidates if c in recommended]
                if listed:
                    channel = max(listed, key=lambda c: (scores[c], -c))
                else:
                    channel = random_access(candidates, rng_act)
            else:
                raise ValueError(f"unknown access method {method!r}")
            if channel is None:
                continue
            granted_this_slot.add(channel)
            holder[channel] = su
            holds[su] = {
                "channel": channel,
                "t0": t,
                "a": predict_bit(channel, t),
                "b": 1 if channel in recommended else 0,
                "state": state,
            }
            if locations is not None:
                paired[su] = partner
                partner_of[partner] = su
                busy.add(partner)
            busy.add(su)
        if audit is not None:
            _append_audit(audit, t, pu_list, holder, m_ch)

    # flush holds that run past the horizon: grants are fitted to the
    # horizon, so anything still alive completed its K slots cleanly
    for su in sorted(holds):
        resolve(su, holds[su], n_slots, collision=False)

    return {
        "n_total": n_total,
        "n_collision": n_collision,
        "d_success": d_success,
        "score_matrix": matrix,
        "q_table": table,
        "r_sums": r_sums,
        "r_counts": r_counts,
        "events": events,
    }


def _append_audit(audit, t, pu_list, holder, m_ch):
    pu_busy = sum(pu_list[c][t] for c in range(m_ch))
    held = sum(1 for c in range(m_ch) if holder[c] >= 0)
    audit.append({"slot": t, "pu_busy": pu_busy, "held": held, "free": m_ch - pu_busy - held})


def _threshold_of(cfg: SimConfig, scores):
    if cfg.th_mode == "fixed":
        return cfg.th_value
    th = default_threshold(scores)
    return 0.0 if th is None else th


def _listed(scores, th):
    return {ch for ch, s in enumerate(scores) if s is not None and s > th}


def _argmax_reward(r_sums, r_counts, state, candidates):
    # empirical mean reward per action; channel evolution ignores actions,
    # so the continuation term is action-independent and greedy-on-R is the
    # value-iteration-greedy choice
    best, best_r = None, -np.inf
    for c in sorted(candidates):
        n = r_counts[state, c]
        mean_r = (r_sums[state, c] / n) if n > 0 else 0.0
        if mean_r > best_r:
            best, best_r = c, mean_r
    return best


def _train_channel_elms(cfg: SimConfig, pu: np.ndarray, rep_seed: int):
    """One next-slot predictor per channel, fitted on the warm-up prefix."""
    models = []
    for ch in range(pu.shape[0]):
        prefix = pu[ch, : cfg.warmup_slots]
        if len(prefix) <= cfg.window + 1:
            models.append(None)
            continue
        data = make_training_set(prefix, cfg.window)
        models.append(
            elm_train(data, cfg.elm_hidden, derive_seed(rep_seed, _TAG_ELM, ch))
        )
    return models


# ---------------------------------------------------------------------------
# recommendation benchmark


def run_recommendation_benchmark(
    cfg: SimConfig, collect_events: bool = False
) -> RunSummary:
    """Score-guided channel choice against blind random access."""
    rows = []
    events = [] if collect_events else None
    for rep in range(cfg.reps):
        rep_seed = derive_seed(cfg.seed, rep)
        params = _channel_params(cfg, make_rng(rep_seed, _TAG_CHANNELS, 0))
        traces = generate_multi(
            params, cfg.n_slots, derive_seed(rep_seed, _TAG_CHANNELS, 1)
        )
        pu = np.stack([tr.states for tr in traces])
        elms = _train_channel_elms(cfg, pu, rep_seed)
        for method in ("cf", "random"):
            res = _simulate_access(
                cfg,
                pu,
                method,
                cfg.k,
                env_seed=derive_seed(rep_seed, _TAG_SIM, cfg.k),
                act_seed=derive_seed(rep_seed, _TAG_SIM, cfg.k, _METHOD_IDS[method]),
                elm_models=elms,
                collect_events=collect_events,
            )
            rows.append(_metrics_row(method, cfg.k, rep, res))
            if events is not None:
                for ev in res["events"]:
                    events.append({"method": method, "k": cfg.k, "seed": rep, **ev})
    aggregates = _mean_rows(rows, group=("method",), metrics=("p_collision", "d_e"))
    return RunSummary(
        scenario=cfg.scenario,
        config=config_to_dict(cfg),
        seeds=list(range(cfg.reps)),
        rows=rows,
        aggregates=aggregates,
        events=events,
    )


# ---------------------------------------------------------------------------
# decision scenarios


def run_decision_scenario(
    cfg: SimConfig, scenario: int, collect_events: bool = False
) -> RunSummary:
    """Q-learning and greedy-MDP agents against random access over a K sweep."""
    if scenario not in (1, 2):
        raise ValueError(f"scenario must be 1 or 2, got {scenario}")
    rows = []
    events = [] if collect_events else None
    k_values = list(range(cfg.k_min, cfg.k_max + 1))
    for rep in range(cfg.reps):
        rep_seed = derive_seed(cfg.seed, rep)
        params = _channel_params(cfg, make_rng(rep_seed, _TAG_CHANNELS, 0))
        traces = generate_multi(
            params, cfg.n_slots, derive_seed(rep_seed, _TAG_CHANNELS, 1)
        )
        pu = np.stack([tr.states for tr in traces])
        elms = _train_channel_elms(cfg, pu, rep_seed)
        locations = neighbor_sets = None
        if scenario == 2:
            locations = place_users(
                cfg.n_su,
                cfg.arena_side,
                cfg.comm_radius,
                derive_seed(rep_seed, _TAG_LOCATIONS),
            )
            neighbor_sets = [neighbors(locations, u) for u in range(cfg.n_su)]
        for k in k_values:
            for method in ("q", "mdp", "random"):
                res = _simulate_access(
                    cfg,
                    pu,
                    method,
                    k,
                    env_seed=derive_seed(rep_seed, _TAG_SIM, k),
                    act_seed=derive_seed(rep_seed, _TAG_SIM, k, _METHOD_IDS[method]),
                    elm_models=elms,
                    locations=locations,
                    neighbor_sets=neighbor_sets,
                    collect_events=collect_events,
                )
                rows.append(_metrics_row(method, k, rep, res))
                if events is not None:
                    for ev in res["events"]:
                        events.append({"method": method, "k": k, "seed": rep, **ev})
    aggregates = _mean_rows(
        rows, group=("method", "k"), metrics=("p_collision", "d_e")
    )
    aggregates["total_success"] = int(sum(r["d_success"] for r in rows))
    for method in ("q", "mdp", "random"):
        aggregates[f"total_success_{method}"] = int(
            sum(r["d_success"] for r in rows if r["method"] == method)
        )
    series = {
        "p_collision_vs_k": _series_of(rows, k_values, "p_collision"),
        "d_e_vs_k": _series_of(rows, k_values, "d_e"),
    }
    return RunSummary(
        scenario=cfg.scenario,
        config=config_to_dict(cfg),
        seeds=list(range(cfg.reps)),
        rows=rows,
        aggregates=aggregates,
        series=series,
        events=events,
    )


def _metrics_row(method: str, k: int, rep: int, res: dict) -> dict:
    dm = DecisionMetrics(
        n_total=res["n_total"],
        n_collision=res["n_collision"],
        d_success=res["d_success"],
    )
    return {
        "method": method,
        "k": k,
        "seed": rep,
        "p_collision": dm.p_collision,
        "d_e": dm.d_e,
        "n_total": dm.n_total,
        "n_collision": dm.n_collision,
        "d_success": dm.d_success,
    }


def _mean_rows(rows, group, metrics) -> dict:
    """Mean of each metric per group key, skipping undefined entries."""
    out = {}
    keys = sorted({tuple(r[g] for g in group) for r in rows})
    for key in keys:
        bucket = [r for r in rows if tuple(r[g] for g in group) == key]
        name = "_".join(str(part) for part in key)
        for metric in metrics:
            values = [r[metric] for r in bucket if r.get(metric) is not None]
            out[f"mean_{metric}_{name}"] = (
                float(np.mean(values)) if values else None
            )
    return out


def _series_of(rows, k_values, metric) -> dict:
    lines = {}
    for method in sorted({r["method"] for r in rows}):
        ys = []
        for k in k_values:
            vals = [
                r[metric]
                for r in rows
                if r["method"] == method and r["k"] == k and r[metric] is not None
            ]
            ys.append(float(np.mean(vals)) if vals else None)
        lines[method] = ys
    return {
        "x": list(k_values),
        "x_label": "transmission length K (slots)",
        "y_label": metric,
        "lines": lines,
    }


def run_scenario(cfg: SimConfig, collect_events: bool = False) -> RunSummary:
    """Dispatch a configured scenario to its driver.

    collect_events attaches per-decision event dicts to the summary for the
    scenarios that grant channel access; the benchmark scenarios have no
    slot-level decisions and ignore it.
    """
    if cfg.scenario == "prediction":
        return run_prediction_benchmark(cfg)
    if cfg.scenario == "fusion":
        return run_fusion_benchmark(cfg)
    if cfg.scenario == "recommendation":
        return run_recommendation_benchmark(cfg, collect_events=collect_events)
    if cfg.scenario == "decision-1":
        return run_decision_scenario(cfg, 1, collect_events=collect_events)
    if cfg.scenario == "decision-2":
        return run_decision_scenario(cfg, 2, collect_events=collect_events)
    raise ValueError(f"unknown scenario {cfg.scenario!r}")


# ---------------------------------------------------------------------------
# exports


def summary_to_json(summary: RunSummary) -> str:
    """Canonical JSON: sorted keys, no timing fields, trailing newline."""
    doc = {
        "scenario": summary.scenario,
        "config": summary.config,
        "seeds": summary.seeds,
        "rows": summary.rows,
        "aggregates": summary.aggregates,
        "series": summary.series,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


_CSV_COLUMNS = {
    "prediction": (
        "method", "seed", "p_d", "p_fa", "accuracy", "mse",
        "tp", "tn", "fp", "fn", "errors_near_transition",
    ),
    "fusion": ("method", "seed", "p_d", "p_fa", "accuracy", "n_evaluated"),
    "recommendation": (
        "method", "k", "seed", "p_collision", "d_e",
        "n_total", "n_collision", "d_success",
    ),
    "decision-1": (
        "method", "k", "seed", "p_collision", "d_e",
        "n_total", "n_collision", "d_success",
    ),
    "decision-2": (
        "method", "k", "seed", "p_collision", "d_e",
        "n_total", "n_collision", "d_success",
    ),
}


def summary_to_csv(summary: RunSummary) -> str:
    """One row per method x K x seed, fixed column order, sorted rows."""
    columns = _CSV_COLUMNS[summary.scenario]
    lines = [",".join(columns)]
    def sort_key(row):
        return tuple(str(row.get(c, "")) for c in ("method", "k", "seed"))
    for row in sorted(summary.rows, key=sort_key):
        cells = []
        for col in columns:
            value = row.get(col)
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit_outputs(
    summary: RunSummary, formats, out_dir: str, verbose: bool = False
) -> list:
    """Write the summary to out_dir; returns the created file paths.

    formats is an iterable drawn from {json, csv, svg}. File names embed
    the scenario and master seed. Unwritable paths raise OSError.
    """
    from .svg import line_chart

    formats = set(formats)
    unknown = formats - {"json", "csv", "svg"}
    if unknown:
        raise ValueError(f"unknown output formats: {sorted(unknown)}")
    os.makedirs(out_dir, exist_ok=True)
    base = f"{summary.scenario}_seed{summary.config.get('seed', 0)}"
    written = []

    def _write(name, text):
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        written.append(path)

    if "json" in formats:
        _write(f"{base}_summary.json", summary_to_json(summary))
    if "csv" in formats:
        _write(f"{base}_metrics.csv", summary_to_csv(summary))
    if "svg" in formats:
        for name in sorted(summary.series):
            chart = summary.series[name]
            if not chart.get("lines"):
                continue
            svg_text = line_chart(
                title=f"{summary.scenario}: {name}",
                x_label=chart.get("x_label", "x"),
                y_label=chart.get("y_label", "y"),
                x_values=chart["x"],
                series={k: chart["lines"][k] for k in sorted(chart["lines"])},
            )
            _write(f"{base}_{name}.svg", svg_text)
    if verbose and summary.events:
        text = "".join(json.dumps(ev, sort_keys=True) + "\n" for ev in summary.events)
        _write(f"{base}_events.jsonl", text)
    return written
