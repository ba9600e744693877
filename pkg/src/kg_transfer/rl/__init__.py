from .schedule import epsilon_at
from .actions import select_actions
from .replay import ReplayBuffer, Transition
from .td import MatchedTerms, encode_states, state_graph, td_loss, td_targets
from .learned import LearnedTransfer
from .episode import EpisodeResult, eval_episode_seed, run_episode, train_episode_seed
from .trainer import METRIC_COLUMNS, DQNTrainer, TrainResult, build_network, train
from .evaluate import EPISODE_COLUMNS, EvalResult, evaluate, make_policy

__all__ = [
    "epsilon_at",
    "select_actions",
    "ReplayBuffer",
    "Transition",
    "MatchedTerms",
    "encode_states",
    "state_graph",
    "td_loss",
    "td_targets",
    "LearnedTransfer",
    "EpisodeResult",
    "eval_episode_seed",
    "run_episode",
    "train_episode_seed",
    "METRIC_COLUMNS",
    "DQNTrainer",
    "TrainResult",
    "build_network",
    "train",
    "EPISODE_COLUMNS",
    "EvalResult",
    "evaluate",
    "make_policy",
]
