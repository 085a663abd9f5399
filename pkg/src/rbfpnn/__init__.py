"""Fréchet-distance RBF process neural networks trained by a GA-SA hybrid."""

from .dataset import (
    NormalizationStats,
    RawTable,
    SplitSpec,
    apply_normalization,
    derive_gene_bounds,
    fit_normalization,
    load_csv,
    stratified_split,
    synth_generate,
    to_samples,
)
from .errors import DataError, NumericalError, RBFPNNError
from .frechet import discrete_frechet, discrete_frechet_bruteforce, generalized_frechet
from .gasa import GeneBounds, TrainerConfig, TrainingTrace, train
from .model import Model, load_model, save_model
from .network import LabeledSample, NetworkParams, NetworkShape, classify, forward, objective
from .pipeline import EvalReport, RunConfig, evaluate_model, fit_model, run_experiment

__version__ = "0.1.0"
