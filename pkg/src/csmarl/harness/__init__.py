"""Run configuration, training/evaluation drivers, plots, verification, CLI."""

from .config import RunConfig, load_run_config, save_run_config
from .evaluate import evaluate, evaluate_pair
from .metrics import MetricsRow, read_metrics, write_metrics
from .persistence import load_pair, save_pair
from .plots import emit_plots
from .train import run_training
from .verify import verify_appendix, verify_game_file

__all__ = [
    "RunConfig",
    "load_run_config",
    "save_run_config",
    "MetricsRow",
    "read_metrics",
    "write_metrics",
    "evaluate",
    "evaluate_pair",
    "save_pair",
    "load_pair",
    "emit_plots",
    "run_training",
    "verify_appendix",
    "verify_game_file",
]
