from .config_schema import (
    EncoderConfig, EvaluationConfig, ExperimentConfig, OutputConfig,
    PoliciesConfig, TrainerConfig, WorldConfig, WorldSection,
)

__all__ = [
    "EncoderConfig",
    "EvaluationConfig",
    "ExperimentConfig",
    "OutputConfig",
    "PoliciesConfig",
    "TrainerConfig",
    "WorldConfig",
    "WorldSection",
]
