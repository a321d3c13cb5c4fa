"""Seed-reproducible cognitive-radio spectrum decision simulator.

Components: licensed-channel ON/OFF traffic traces, single-channel
occupancy predictors (ELM, BP, HMM), cooperative fusion of noisy local
predictions, access-experience channel recommendation, and learning
agents (tabular Q, empirical MDP) for slotted opportunistic access.
"""

from .channel import (
    ChannelParams,
    ChannelTrace,
    SlotConfig,
    SuLocation,
    generate_multi,
    generate_trace,
    neighbors,
    place_users,
    traces_to_csv,
)
from .config import (
    SCENARIOS,
    ConfigError,
    SimConfig,
    config_to_dict,
    default_config,
    load_config,
    parse_config_text,
    validate_config,
)
from .decision import (
    DecisionQTable,
    MdpModel,
    RewardInputs,
    arbitrate,
    decision_table_from_json,
    decision_table_to_json,
    decode_env_state,
    encode_env_state,
    estimate_transitions,
    mdp_from_json,
    mdp_to_json,
    new_decision_table,
    normalize_transitions,
    q_update,
    random_access,
    reward,
    select_action,
    transition_counts,
    value_iteration,
)
from .fusion import (
    FusionQTable,
    decode_state,
    encode_state,
    fusion_step,
    greedy_actions,
    m_out_of_n,
    new_table,
    noisy_local_predictions,
    soft_fuse,
    table_to_csv,
    train_fusion,
)
from .harness import (
    DecisionMetrics,
    RunSummary,
    emit_outputs,
    run_decision_scenario,
    run_fusion_benchmark,
    run_prediction_benchmark,
    run_recommendation_benchmark,
    run_scenario,
    summary_to_csv,
    summary_to_json,
)
from .predictors import (
    BpModel,
    ElmModel,
    HmmModel,
    PredictionMetrics,
    TrainingSet,
    bp_gradients,
    bp_loss,
    bp_predict,
    bp_predict_many,
    bp_train,
    elm_predict,
    elm_predict_many,
    elm_train,
    eval_prediction,
    hmm_fit,
    hmm_predict,
    make_training_set,
    model_from_json,
    model_to_json,
    pinv_solve,
    threshold,
    transition_error_fraction,
)
from .recommender import (
    AccessRecord,
    RecommendationList,
    ScoreMatrix,
    cf_predict,
    default_threshold,
    final_score,
    final_score_located,
    recommend,
    score_access,
    score_matrix_to_csv,
)
from .seeding import derive_seed, make_rng, splitmix64
from .svg import line_chart

__all__ = [
    "AccessRecord",
    "BpModel",
    "ChannelParams",
    "ChannelTrace",
    "ConfigError",
    "DecisionMetrics",
    "DecisionQTable",
    "ElmModel",
    "FusionQTable",
    "HmmModel",
    "MdpModel",
    "PredictionMetrics",
    "RecommendationList",
    "RewardInputs",
    "RunSummary",
    "SCENARIOS",
    "ScoreMatrix",
    "SimConfig",
    "SlotConfig",
    "SuLocation",
    "TrainingSet",
    "arbitrate",
    "bp_gradients",
    "bp_loss",
    "bp_predict",
    "bp_predict_many",
    "bp_train",
    "cf_predict",
    "config_to_dict",
    "decision_table_from_json",
    "decision_table_to_json",
    "decode_env_state",
    "decode_state",
    "default_config",
    "default_threshold",
    "derive_seed",
    "elm_predict",
    "elm_predict_many",
    "elm_train",
    "emit_outputs",
    "encode_env_state",
    "encode_state",
    "estimate_transitions",
    "eval_prediction",
    "final_score",
    "final_score_located",
    "fusion_step",
    "generate_multi",
    "generate_trace",
    "greedy_actions",
    "hmm_fit",
    "hmm_predict",
    "line_chart",
    "load_config",
    "m_out_of_n",
    "make_rng",
    "make_training_set",
    "mdp_from_json",
    "mdp_to_json",
    "model_from_json",
    "model_to_json",
    "neighbors",
    "new_decision_table",
    "new_table",
    "noisy_local_predictions",
    "normalize_transitions",
    "parse_config_text",
    "pinv_solve",
    "place_users",
    "q_update",
    "random_access",
    "recommend",
    "reward",
    "run_decision_scenario",
    "run_fusion_benchmark",
    "run_prediction_benchmark",
    "run_recommendation_benchmark",
    "run_scenario",
    "score_access",
    "score_matrix_to_csv",
    "select_action",
    "soft_fuse",
    "splitmix64",
    "summary_to_csv",
    "summary_to_json",
    "table_to_csv",
    "threshold",
    "traces_to_csv",
    "train_fusion",
    "transition_counts",
    "transition_error_fraction",
    "validate_config",
    "value_iteration",
]
