"""Learning a K-simplex from noisy uniform samples: bounding ball, quantization, Scheffe tournament."""

__version__ = "0.1.0"

from .bounding import BoundingBall, NoiseModel, bounding_ball, min_samples_lemma1
from .errors import SimplexLearnError, StageError
from .geometry import (IsoperimetryParams, Simplex, contains, diameter, facet_volumes,
                       is_isoperimetric, random_simplex, standard_simplex, volume)
from .metrics import (GuaranteeRecord, TvEstimate, complexity_report, intersection_volume,
                      lemma3_bound, sample_complexity_thm2, sample_complexity_thm3,
                      tv_noisy_vs_clean_mc, tv_uniform)
from .pipeline import ExperimentConfig, RunResult, learn, sweep
from .quantize import (CandidateFamily, CoveringSet, Filters, QuantizationParams,
                       enumerate_candidates, grid_covering, random_covering, verify_cover)
from .rng import RngStream
from .sampling import NoisyDataset, generate_dataset, split_half
from .select import SelectionReport, min_samples_selection, scheffe_tournament

__all__ = [
    "BoundingBall", "CandidateFamily", "CoveringSet", "ExperimentConfig", "Filters",
    "GuaranteeRecord", "IsoperimetryParams", "NoiseModel", "NoisyDataset", "QuantizationParams",
    "RngStream", "RunResult", "SelectionReport", "Simplex", "SimplexLearnError", "StageError",
    "TvEstimate", "bounding_ball", "complexity_report", "contains", "diameter",
    "enumerate_candidates", "facet_volumes", "generate_dataset", "grid_covering",
    "intersection_volume", "is_isoperimetric", "learn", "lemma3_bound", "min_samples_lemma1",
    "min_samples_selection", "random_covering", "random_simplex", "sample_complexity_thm2",
    "sample_complexity_thm3", "scheffe_tournament", "split_half", "standard_simplex", "sweep",
    "tv_noisy_vs_clean_mc", "tv_uniform", "verify_cover", "volume",
]
