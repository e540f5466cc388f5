"""Training driver, evaluation, experiment presets, reporting and the command line."""
from .config import ConfigError, RunConfig, format_config, load_config, parse_config
from .presets import CATALOG, PRESETS, make_experiment, preset_text
from .training import (
    DataError, EvalRecord, TrainResult, build_map, evaluate, evaluate_run, final_event,
    metrics_csv, resolve_tasks, train, write_run,
)
