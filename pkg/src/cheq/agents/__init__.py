from .core import AgentConfig, SacEnsembleAgent, TrainMetrics
from .loop import run_training, eval_episode
from .variants import build_agent, make_adaptor

__all__ = [
    "AgentConfig", "SacEnsembleAgent", "TrainMetrics",
    "run_training", "eval_episode", "build_agent", "make_adaptor",
]
