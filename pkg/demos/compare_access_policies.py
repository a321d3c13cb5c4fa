"""Race the channel-access policies over a shared slotted spectrum.

First the recommendation scenario: ten users on five channels, where a
score-guided chooser faces blind random access. Then decision scenario
one: thirty users on ten channels with a transmission-length sweep,
comparing the Q-table agent, the empirical-model agent, and random
access under identical demand (the request and arbitration streams are
seeded separately from the agents, so every policy sees the same traffic).

Run: python3 demos/compare_access_policies.py
"""

import os

import numpy as np

from crspectrum.config import default_config
from crspectrum.harness import emit_outputs, run_scenario

OUT_DIR = os.path.join(os.path.dirname(__file__), "out")
SEED = 3


def show_recommendation():
    cfg = default_config("recommendation")
    cfg.seed = SEED
    summary = run_scenario(cfg)
    agg = summary.aggregates
    print(
        f"recommendation scenario ({cfg.n_su} users, {cfg.n_channels} channels, "
        f"{cfg.reps} repetitions):"
    )
    for method in ("cf", "random"):
        print(
            f"  {method:7s} p_collision={agg[f'mean_p_collision_{method}']:.4f} "
            f"d_e={agg[f'mean_d_e_{method}']:.4f}"
        )
    gain = agg["mean_p_collision_random"] - agg["mean_p_collision_cf"]
    print(f"  score-guided choice avoids {gain:.4f} of the collision probability\n")


def show_decision():
    cfg = default_config("decision-1")
    cfg.seed = SEED
    summary = run_scenario(cfg)
    agg = summary.aggregates
    ks = list(range(cfg.k_min, cfg.k_max + 1))
    print(
        f"decision scenario one ({cfg.n_su} users, {cfg.n_channels} channels, "
        f"K = {ks[0]}..{ks[-1]}, {cfg.reps} repetitions):"
    )
    header = "  K    " + "".join(f"{m:>10s}" for m in ("q", "mdp", "random"))
    print(header + "   (mean p_collision)")
    for k in ks:
        cells = "".join(
            f"{agg[f'mean_p_collision_{m}_{k}']:10.4f}" for m in ("q", "mdp", "random")
        )
        print(f"  {k:<4d} {cells}")
    pc_random = np.array([agg[f"mean_p_collision_random_{k}"] for k in ks])
    pc_q = np.array([agg[f"mean_p_collision_q_{k}"] for k in ks])
    print(
        "\n  collision risk grows with K for every policy: holding a channel"
        "\n  longer leaves more slots for its owner to return."
    )
    print(
        f"  largest per-K spread between the learned and random policies here: "
        f"{np.max(np.abs(pc_random - pc_q)):.4f}."
    )
    print(
        "  with thirty users contending for roughly seven idle channels, the"
        "\n  grant arbitration, not the choice rule, decides most accesses; the"
        "\n  policies separate only when demand is far below capacity."
    )
    written = emit_outputs(summary, ["svg"], OUT_DIR)
    for path in written:
        print(f"  chart written to {path}")


if __name__ == "__main__":
    show_recommendation()
    show_decision()
