"""End-to-end training and evaluation shared by the CLI and experiments."""

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .dataset import (
    SplitSpec,
    apply_normalization,
    derive_gene_bounds,
    fit_normalization,
    load_csv,
    sigma_floor,
    stratified_split,
    to_samples,
)
from .errors import ConfigError, UsageError
from .gasa import TrainerConfig, train
from .model import Model
from .network import NetworkShape, PopulationObjective, classify, encode, stack_samples

__all__ = ["RunConfig", "EvalReport", "fit_model", "evaluate_model", "load_run_data", "run_experiment"]

NORMALIZATION_CHOICES = ("per-position", "global", "none")


@dataclass
class RunConfig:
    data: str = None
    test_data: str = None
    split: SplitSpec = None
    hidden_nodes: int = 8
    normalization: str = "per-position"
    model_out: str = "model.json"
    trace_out: str = "trace.csv"
    trainer: TrainerConfig = field(default_factory=TrainerConfig)

    def __post_init__(self):
        if self.normalization not in NORMALIZATION_CHOICES:
            raise ConfigError(f"normalization must be one of {', '.join(NORMALIZATION_CHOICES)}")
        if int(self.hidden_nodes) != self.hidden_nodes or self.hidden_nodes < 1:
            raise ConfigError("hidden_nodes must be a positive integer")
        if self.split is not None:
            if self.split.train_count < 1 or self.split.test_count < 0:
                raise ConfigError("split needs train_count >= 1 and test_count >= 0")

    @property
    def mode(self):
        return self.trainer.mode

    @classmethod
    def from_dict(cls, data, base_dir="."):
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        trainer = data.pop("trainer", None) or {}
        if not isinstance(trainer, dict):
            raise ConfigError("'trainer' must be an object")
        split = data.pop("split", None)
        if split is not None:
            try:
                split = SplitSpec(**split)
            except TypeError as exc:
                raise ConfigError(f"bad split: {exc}") from None
        for key in ("data", "test_data"):
            if data.get(key) and not os.path.isabs(data[key]):
                data[key] = os.path.join(base_dir, data[key])
        try:
            return cls(split=split, trainer=TrainerConfig.from_dict(trainer), **data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror or exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))

    def to_dict(self):
        out = asdict(self)
        out["trainer"] = self.trainer.to_dict()
        return out

    def with_trainer(self, **changes):
        return replace(self, trainer=replace(self.trainer, **changes))


@dataclass
class EvalReport:
    accuracy: float
    total: int
    per_class: dict
    tp: int
    tn: int
    fp: int
    fn: int
    E: float
    seed: int = None
    mode: str = None

    def to_dict(self):
        return asdict(self)

    def format(self):
        lines = [
            f"mode      {self.mode}",
            f"seed      {self.seed}",
            f"samples   {self.total}",
            f"accuracy  {self.accuracy:.6f}",
            f"objective {self.E!r}",
            f"confusion TP={self.tp} TN={self.tn} FP={self.fp} FN={self.fn}",
        ]
        for label, counts in sorted(self.per_class.items()):
            lines.append(f"class {label}   {counts['correct']}/{counts['total']} correct")
        return "\n".join(lines)


def load_run_data(config, split_seed=None):
    """Raw (train, test) sample lists for a run; ``test`` may be empty."""
    if not config.data:
        raise ConfigError("config needs a 'data' path")
    samples = to_samples(load_csv(config.data))
    if config.split is not None:
        spec = config.split if split_seed is None else replace(config.split, seed=split_seed)
        train_raw, test_raw = stratified_split(samples, spec)
    else:
        train_raw, test_raw = samples, []
    if config.test_data:
        test_raw = to_samples(load_csv(config.test_data))
    return train_raw, test_raw


def fit_model(train_raw, trainer, hidden_nodes=8, normalization="per-position", callback=None):
    """Normalize, derive the search box, and run GA-SA (or GA) training.

    Returns the trained :class:`Model` and the training trace.
    """
    train_raw = list(train_raw)
    if not train_raw:
        raise UsageError("training set is empty")
    norm = None if normalization == "none" else fit_normalization(train_raw, normalization)
    train_set = train_raw if norm is None else apply_normalization(norm, train_raw)
    n, S = train_set[0].input.shape
    shape = NetworkShape(n=n, m=hidden_nodes, S=S)
    sigma_min = sigma_floor(train_set, trainer.sigma_min_factor)
    bounds = derive_gene_bounds(
        train_set, shape, sigma_min=sigma_min, w_max=trainer.w_max, seed=trainer.rng_seed
    )
    params, trace = train(shape, train_set, bounds, trainer, sigma_min=sigma_min, callback=callback)
    model = Model(params, norm, trainer.threshold, trainer.rng_seed)
    return model, trace


def evaluate_model(model, samples, seed=None, mode=None):
    """Classify raw samples with ``model`` and tally the results."""
    samples = list(samples)
    if not samples:
        raise UsageError("nothing to evaluate")
    prepared = model.prepare(samples)
    obj = PopulationObjective(prepared, model.shape, sigma_min=0.0)
    genes = encode(model.params)[None, :]
    y = obj.outputs(genes)[0]
    E = float(obj.evaluate(genes)[0])
    _, targets = stack_samples(prepared)
    truth = targets.astype(int)
    pred = np.array([classify(v, model.threshold) for v in y])
    tp = int(np.sum((pred == 1) & (truth == 1)))
    tn = int(np.sum((pred == 0) & (truth == 0)))
    fp = int(np.sum((pred == 1) & (truth == 0)))
    fn = int(np.sum((pred == 0) & (truth == 1)))
    per_class = {
        int(label): {
            "total": int(np.sum(truth == label)),
            "correct": int(np.sum((truth == label) & (pred == label))),
        }
        for label in np.unique(truth)
    }
    return EvalReport(
        accuracy=(tp + tn) / len(samples),
        total=len(samples),
        per_class=per_class,
        tp=tp, tn=tn, fp=fp, fn=fn,
        E=E,
        seed=model.seed if seed is None else seed,
        mode=mode,
    )


def run_experiment(config, repeats=1, resplit=False, modes=None, callback=None):
    """Train/evaluate ``repeats`` times per mode with seeds ``seed, seed+1, ...``.

    With ``resplit`` the data split seed follows the optimizer seed; otherwise
    every repeat shares one split. Returns ``{mode: [record, ...]}`` where each
    record holds the seed, trace, model and train/test reports.
    """
    modes = modes or [config.mode]
    base = config.trainer.rng_seed
    results = {mode: [] for mode in modes}
    fixed = None if resplit else load_run_data(config)
    for r in range(repeats):
        seed = base + r
        train_raw, test_raw = load_run_data(config, split_seed=seed) if resplit else fixed
        for mode in modes:
            trainer = replace(config.trainer, rng_seed=seed, mode=mode)
            model, trace = fit_model(
                train_raw, trainer, config.hidden_nodes, config.normalization, callback
            )
            record = {
                "seed": seed,
                "mode": mode,
                "model": model,
                "trace": trace,
                "train": evaluate_model(model, train_raw, seed, mode),
                "test": evaluate_model(model, test_raw, seed, mode) if test_raw else None,
            }
            results[mode].append(record)
    return results


def summarize(values):
    """Mean and sample standard deviation (0 for a single value)."""
    values = [float(v) for v in values]
    mean = sum(values) / len(values)
    if len(values) < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(var)
