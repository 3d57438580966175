"""Emotion-similarity rewards and group-relative policy optimisation on a synthetic SER task."""
from .config import RunConfig
from .errors import (ConfigError, EmoLabError, EmptyMatrix, InvalidSchedule, LabelNotInSet, MissingPlacement,
                     NeutralAngleQuery, NonFiniteLoss, UnknownGoldLabel, UnknownRun)
from .geometry import (EmotionLabel, LabelSet, TransitionMatrix, WheelPlacement, build_transition_matrix,
                       default_label_sets, load_label_set, plutchik_angle)
from .grpo import (PolicyParams, SampledGroup, TrainerConfig, TrainingRun, compute_advantages, kl_penalty,
                   policy_gradient, sample_group, surrogate_loss, train)
from .experiments import AblationGrid, evaluate_policy, run_ablation, run_training
from .metrics import ConfusionMatrix, MetricsReport, accumulate, compare_runs, evaluate, report
from .rewards import (AlphaSchedule, ParsedResponse, ReasoningPattern, RewardBreakdown, RewardConfig, Scorer,
                      alpha_at, bcr_reward, eswr_reward, format_reward, parse_response, total_reward)
from .sim import (ActionTemplate, EnvConfig, FormatVariant, SpeechEmotionEnv, SyntheticEpisode, featurize,
                  generate_episode, render_response, render_template)

__version__ = "0.1.0"
