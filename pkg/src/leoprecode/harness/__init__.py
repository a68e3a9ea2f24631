from .beams import BeamPatternResult, run_beam_pattern, write_beam_outputs
from .sweep import (DEFAULT_ERROR_GRID, SweepResult, SweepSpec, load_policy, run_sweep,
                    spec_from_output, write_sweep_outputs)
from .training import TrainingResult, run_training

__all__ = [
    "BeamPatternResult", "DEFAULT_ERROR_GRID", "SweepResult", "SweepSpec", "TrainingResult",
    "load_policy", "run_beam_pattern", "run_sweep", "run_training", "spec_from_output",
    "write_beam_outputs", "write_sweep_outputs",
]
