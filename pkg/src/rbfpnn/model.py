"""JSON model files.

Schema (all numbers written with full ``repr`` precision)::

    {
      "shape":     {"n": int, "m": int, "S": int},
      "centers":   [[[float, ...] x S] x n] x m,
      "sigmas":    [float] x m,
      "weights":   [float] x m,
      "norm":      {"scope": str, "min": [[...]], "max": [[...]]} | null,
      "threshold": float,
      "seed":      int | null
    }
"""

import json
from dataclasses import dataclass

from .dataset import NormalizationStats, apply_normalization
from .errors import DataError
from .network import NetworkParams, NetworkShape, PopulationObjective, classify, encode

__all__ = ["Model", "save_model", "load_model"]

MODEL_FIELDS = ("shape", "centers", "sigmas", "weights", "norm", "threshold", "seed")


@dataclass(eq=False)
class Model:
    params: NetworkParams
    norm: NormalizationStats = None
    threshold: float = 0.5
    seed: int = None

    @property
    def shape(self):
        return self.params.shape

    def prepare(self, samples):
        """Apply the stored normalization (if any) to raw samples."""
        samples = list(samples)
        if self.norm is None:
            return samples
        return apply_normalization(self.norm, samples)

    def outputs(self, samples):
        """Network outputs for raw (unnormalized) samples."""
        prepared = self.prepare(samples)
        obj = PopulationObjective(prepared, self.shape, sigma_min=0.0)
        return obj.outputs(encode(self.params))[0]

    def predict(self, samples):
        return [classify(y, self.threshold) for y in self.outputs(samples)]

    def to_dict(self):
        shape = self.shape
        return {
            "shape": {"n": shape.n, "m": shape.m, "S": shape.S},
            "centers": self.params.centers.tolist(),
            "sigmas": self.params.sigmas.tolist(),
            "weights": self.params.weights.tolist(),
            "norm": None if self.norm is None else self.norm.to_dict(),
            "threshold": self.threshold,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        missing = [k for k in MODEL_FIELDS if k not in data]
        if missing:
            raise DataError(f"model file lacks fields: {', '.join(missing)}")
        shape = NetworkShape(**data["shape"])
        params = NetworkParams(data["centers"], data["sigmas"], data["weights"])
        if params.shape != shape:
            raise DataError(f"model arrays have shape {params.shape}, header says {shape}")
        norm = None if data["norm"] is None else NormalizationStats.from_dict(data["norm"])
        return cls(params, norm, float(data["threshold"]), data["seed"])


def save_model(path, model):
    with open(path, "w", encoding="utf-8") as fh:
        # json writes floats via repr, which round-trips exactly
        json.dump(model.to_dict(), fh, indent=1)
        fh.write("\n")


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    return Model.from_dict(data)
