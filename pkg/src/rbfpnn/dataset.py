"""CSV ingestion, normalization, splitting and synthetic data.

The expected CSV layout is a header row, ``F`` numeric feature columns and a
final integer label column in ``{0, 1}``. Each record becomes one sample with
a single component of length ``F`` (for the UCI EEG Eye State data: 14
channel readings, one sequence per record).
"""

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DataError,
    LabelDomainError,
    MissingFileError,
    NonNumericError,
    RaggedRowError,
    UsageError,
)
from .frechet import pairwise_generalized
from .gasa import GeneBounds
from .network import DEFAULT_SIGMA_MIN, LabeledSample, stack_samples

__all__ = [
    "RawTable",
    "NORMALIZATION_SCOPES",
    "NormalizationStats",
    "SplitSpec",
    "load_csv",
    "write_csv",
    "to_samples",
    "samples_to_table",
    "fit_normalization",
    "apply_normalization",
    "stratified_split",
    "synth_generate",
    "sigma_floor",
    "derive_gene_bounds",
]


@dataclass(frozen=True, eq=False)
class RawTable:
    columns: list  # feature column names, label column excluded
    label_column: str
    features: np.ndarray  # (rows, F)
    labels: np.ndarray  # (rows,) int

    def __len__(self):
        return self.features.shape[0]


NORMALIZATION_SCOPES = ("per-position", "global")


@dataclass(frozen=True, eq=False)
class NormalizationStats:
    """Minima and maxima broadcast to ``(n, S)``.

    ``scope`` records how they were fitted: ``per-position`` scales every
    position on its own (columns are distinct channels, as in the EEG
    records), ``global`` uses one range for the whole training set (columns
    are successive time steps of one signal).
    """

    mins: np.ndarray
    maxs: np.ndarray
    scope: str = "per-position"

    def to_dict(self):
        return {"scope": self.scope, "min": self.mins.tolist(), "max": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(
            np.asarray(data["min"], dtype=np.float64),
            np.asarray(data["max"], dtype=np.float64),
            data.get("scope", "per-position"),
        )


@dataclass(frozen=True)
class SplitSpec:
    train_count: int = 30
    test_count: int = 30
    seed: int = 0


def load_csv(path):
    """Read a labeled time-series CSV into a :class:`RawTable`."""
    if not os.path.isfile(path):
        raise MissingFileError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if len(header) < 2:
            raise DataError(f"{path}: need at least one feature column and a label column")
        width = len(header)
        features, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != width:
                raise RaggedRowError(
                    f"{path}:{lineno}: expected {width} columns, found {len(row)}"
                )
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                bad = next(c for c in row if not _is_float(c))
                raise NonNumericError(f"{path}:{lineno}: non-numeric cell {bad!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise NonNumericError(f"{path}:{lineno}: non-finite value")
            label = values[-1]
            if label not in (0.0, 1.0):
                raise LabelDomainError(f"{path}:{lineno}: label {row[-1].strip()!r} is not 0 or 1")
            features.append(values[:-1])
            labels.append(int(label))
    F = width - 1
    return RawTable(
        columns=header[:-1],
        label_column=header[-1],
        features=np.asarray(features, dtype=np.float64).reshape(len(features), F),
        labels=np.asarray(labels, dtype=np.int64),
    )


def _is_float(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def write_csv(path, table):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(table.columns) + [table.label_column])
        for row, label in zip(table.features, table.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def to_samples(table):
    """One single-component sample per row, features in column order."""
    return [
        LabeledSample(row.reshape(1, -1), float(label))
        for row, label in zip(table.features, table.labels)
    ]


def samples_to_table(samples, label_column="label"):
    """Inverse of :func:`to_samples` for single-component samples."""
    X, d = stack_samples(samples)
    if X.shape[1] != 1:
        raise UsageError("only single-component samples can be written as CSV rows")
    S = X.shape[2]
    return RawTable(
        columns=[f"x{s}" for s in range(S)],
        label_column=label_column,
        features=X[:, 0, :].copy(),
        labels=d.astype(np.int64),
    )


def fit_normalization(train, scope="per-position"):
    train = list(train)
    if not train:
        raise UsageError("cannot fit normalization on an empty training set")
    if scope not in NORMALIZATION_SCOPES:
        raise UsageError(f"unknown normalization scope {scope!r}")
    X, _ = stack_samples(train)
    if scope == "global":
        shape = X.shape[1:]
        return NormalizationStats(np.full(shape, X.min()), np.full(shape, X.max()), scope)
    return NormalizationStats(X.min(axis=0), X.max(axis=0), scope)


def apply_normalization(stats, samples):
    """Min-max scale each position with training statistics.

    Constant positions map to 0.5. Values outside the training range are
    left unclipped.
    """
    span = stats.maxs - stats.mins
    flat = span == 0
    safe = np.where(flat, 1.0, span)
    out = []
    for s in samples:
        if s.input.shape != stats.mins.shape:
            raise DataError(
                f"sample shape {s.input.shape} does not match normalization {stats.mins.shape}"
            )
        z = np.where(flat, 0.5, (s.input - stats.mins) / safe)
        out.append(LabeledSample(z, s.target))
    return out


def stratified_split(samples, spec, rng=None):
    """Seeded per-class split into disjoint train and test lists.

    For each label (ascending) ``train_count`` samples go to train and then
    ``test_count`` of the remainder to test, drawn without replacement.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    samples = list(samples)
    by_class = {}
    for idx, s in enumerate(samples):
        by_class.setdefault(s.target, []).append(idx)
    need = spec.train_count + spec.test_count
    short = {
        label: need - len(idx) for label, idx in by_class.items() if len(idx) < need
    }
    if short:
        detail = ", ".join(
            f"class {label:g}: have {len(by_class[label])}, need {need}" for label in sorted(short)
        )
        raise DataError(f"not enough samples for the requested split ({detail})")
    train, test = [], []
    for label in sorted(by_class):
        picked = rng.permutation(by_class[label])
        train.extend(samples[i] for i in picked[: spec.train_count])
        test.extend(samples[i] for i in picked[spec.train_count:need])
    return train, test


def synth_generate(n_per_class, S, noise_sd, rng):
    """Two-class benchmark: sine template (label 0) and linear ramp (label 1).

    Class 0 rows come first. Both templates are sampled at ``s = 0..S-1``
    and get independent Gaussian noise.
    """
    if n_per_class < 1 or S < 2 or noise_sd < 0:
        raise UsageError("need n_per_class >= 1, S >= 2 and noise_sd >= 0")
    s = np.arange(S)
    templates = {
        0: np.sin(2.0 * np.pi * s / (S - 1)),
        1: s / (S - 1),
    }
    out = []
    for label in (0, 1):
        for _ in range(n_per_class):
            noise = rng.normal(0.0, noise_sd, size=S) if noise_sd > 0 else np.zeros(S)
            out.append(LabeledSample((templates[label] + noise).reshape(1, S), float(label)))
    return out


def sigma_floor(train, factor=1e-3):
    """Kernel-width floor: ``factor`` times the global value range of ``train``."""
    X, _ = stack_samples(train)
    span = float(X.max() - X.min())
    return factor * span if span > 0 else DEFAULT_SIGMA_MIN


def derive_gene_bounds(train, shape, sigma_min=DEFAULT_SIGMA_MIN, w_max=2.0, max_pairs_sample=50, seed=0):
    """Search box for every gene of the chromosome.

    Centers span the per-component range of the training values, widths span
    ``[sigma_min, D_max]`` with ``D_max`` the largest pairwise generalized
    distance in a seeded subsample, and weights span ``[-w_max, w_max]``.
    """
    train = list(train)
    if not train:
        raise UsageError("cannot derive gene bounds from an empty training set")
    X, _ = stack_samples(train)
    if X.shape[1:] != (shape.n, shape.S):
        raise DataError(f"training samples are {X.shape[1:]}, network expects {(shape.n, shape.S)}")

    comp_lo = X.min(axis=(0, 2))
    comp_hi = X.max(axis=(0, 2))
    flat = comp_hi <= comp_lo
    comp_lo = np.where(flat, comp_lo - 0.5, comp_lo)
    comp_hi = np.where(flat, comp_hi + 0.5, comp_hi)

    rng = np.random.default_rng(seed)
    if X.shape[0] > max_pairs_sample:
        X = X[np.sort(rng.choice(X.shape[0], size=max_pairs_sample, replace=False))]
    d_max = float(pairwise_generalized(X).max()) if X.shape[0] > 1 else 0.0
    if d_max <= sigma_min:
        d_max = sigma_min + 1.0

    per_center_lo = np.repeat(comp_lo, shape.S)
    per_center_hi = np.repeat(comp_hi, shape.S)
    lower = np.concatenate([
        np.tile(per_center_lo, shape.m),
        np.full(shape.m, sigma_min),
        np.full(shape.m, -w_max),
    ])
    upper = np.concatenate([
        np.tile(per_center_hi, shape.m),
        np.full(shape.m, d_max),
        np.full(shape.m, w_max),
    ])
    return GeneBounds(lower, upper)
