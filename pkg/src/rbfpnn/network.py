"""RBF process neural network: Gaussian process neurons over Fréchet distance.

A network with ``m`` hidden nodes maps an ``(n, S)`` input sample ``X`` to

    y = sum_j w_j * exp(-d(X, C_j)**2 / (2 * sigma_j**2))

where ``d`` is the generalized Fréchet distance and ``C_j`` an ``(n, S)``
center. Training minimizes the summed squared error over labeled samples.

Chromosome gene layout (fixed, shared with model files)::

    [ centers (j outer, i middle, s inner) | m sigmas | m weights ]
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CodecError, DimensionError, ParameterError, UsageError, ValidationError
from .frechet import _gfd_to_centers, as_sample, generalized_frechet

__all__ = [
    "DEFAULT_SIGMA_MIN",
    "NetworkShape",
    "NetworkParams",
    "LabeledSample",
    "neuron_activation",
    "forward",
    "objective",
    "fitness",
    "classify",
    "encode",
    "decode",
    "stack_samples",
    "PopulationObjective",
]

DEFAULT_SIGMA_MIN = 1e-3


@dataclass(frozen=True)
class NetworkShape:
    n: int
    m: int
    S: int

    def __post_init__(self):
        for name in ("n", "m", "S"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ParameterError(f"shape.{name} must be a positive integer, got {value!r}")

    def gene_count(self):
        return self.m * (self.n * self.S + 2)

    @property
    def center_genes(self):
        return self.m * self.n * self.S


@dataclass(frozen=True, eq=False)
class NetworkParams:
    centers: np.ndarray  # (m, n, S)
    sigmas: np.ndarray  # (m,)
    weights: np.ndarray  # (m,)

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.float64)
        sigmas = np.asarray(self.sigmas, dtype=np.float64).reshape(-1)
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if centers.ndim != 3:
            raise DimensionError(f"centers must be (m, n, S), got shape {centers.shape}")
        m = centers.shape[0]
        if sigmas.shape != (m,) or weights.shape != (m,):
            raise DimensionError(
                f"need {m} sigmas and weights, got {sigmas.size} and {weights.size}"
            )
        for name, arr in (("centers", centers), ("sigmas", sigmas), ("weights", weights)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} contain non-finite values")
        if np.any(sigmas <= 0):
            raise ParameterError("kernel widths must be positive")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "sigmas", sigmas)
        object.__setattr__(self, "weights", weights)

    @property
    def shape(self):
        m, n, S = self.centers.shape
        return NetworkShape(n=n, m=m, S=S)

    def __eq__(self, other):
        if not isinstance(other, NetworkParams):
            return NotImplemented
        return (
            np.array_equal(self.centers, other.centers)
            and np.array_equal(self.sigmas, other.sigmas)
            and np.array_equal(self.weights, other.weights)
        )


@dataclass(frozen=True, eq=False)
class LabeledSample:
    input: np.ndarray  # (n, S)
    target: float

    def __post_init__(self):
        object.__setattr__(self, "input", as_sample(self.input, "input"))
        target = float(self.target)
        if not np.isfinite(target):
            raise ValidationError("target must be finite")
        object.__setattr__(self, "target", target)


def neuron_activation(x, center, sigma, sigma_min=DEFAULT_SIGMA_MIN):
    """Gaussian response of one process neuron, in ``(0, 1]``."""
    if sigma < sigma_min:
        raise ParameterError(f"sigma {sigma} below floor {sigma_min}")
    d = generalized_frechet(x, center)
    return float(np.exp(-(d * d) / (2.0 * sigma * sigma)))


def _check_input(params, x):
    x = as_sample(x, "input")
    if x.shape != params.centers.shape[1:]:
        raise DimensionError(
            f"input shape {x.shape} does not match network (n, S) = {params.centers.shape[1:]}"
        )
    return x


def forward(params, x):
    """Network output for one ``(n, S)`` input sample."""
    x = _check_input(params, x)
    return float(
        sum(
            w * neuron_activation(x, c, s, sigma_min=0.0)
            for c, s, w in zip(params.centers, params.sigmas, params.weights)
        )
    )


def objective(params, samples):
    """Sum of squared residuals ``sum_k (y_k - d_k)**2`` over ``samples``."""
    samples = list(samples)
    if not samples:
        raise UsageError("objective needs at least one sample")
    return float(sum((forward(params, s.input) - s.target) ** 2 for s in samples))


def fitness(E):
    """Map an objective value onto ``(0, 1]`` as ``1 / (1 + E)``."""
    if E < 0:
        raise ParameterError(f"objective must be non-negative, got {E}")
    return 1.0 / (1.0 + E)


def classify(y, threshold=0.5):
    return 1 if y >= threshold else 0


def encode(params):
    """Flatten parameters to a chromosome (centers, then sigmas, then weights)."""
    return np.concatenate([params.centers.reshape(-1), params.sigmas, params.weights])


def decode(genes, shape, sigma_min=DEFAULT_SIGMA_MIN):
    """Inverse of :func:`encode`; kernel widths are clamped up to ``sigma_min``."""
    genes = np.asarray(genes, dtype=np.float64)
    if genes.ndim != 1 or genes.size != shape.gene_count():
        raise CodecError(
            f"chromosome length {genes.size} != m*(n*S+2) = {shape.gene_count()}"
        )
    c = shape.center_genes
    m = shape.m
    centers = genes[:c].reshape(m, shape.n, shape.S).copy()
    sigmas = np.maximum(genes[c:c + m], sigma_min)
    weights = genes[c + m:].copy()
    return NetworkParams(centers, sigmas, weights)


def stack_samples(samples):
    """Stack inputs into ``(K, n, S)`` and targets into ``(K,)``."""
    samples = list(samples)
    if not samples:
        raise UsageError("need at least one sample")
    shapes = {s.input.shape for s in samples}
    if len(shapes) != 1:
        raise DimensionError(f"samples have mixed shapes: {sorted(shapes)}")
    X = np.ascontiguousarray(np.stack([s.input for s in samples]))
    d = np.array([s.target for s in samples], dtype=np.float64)
    return X, d


class PopulationObjective:
    """Batched objective over many chromosomes for a fixed training set.

    ``workers > 1`` splits a batch across threads; the compiled distance
    kernel releases the GIL. Results do not depend on the worker count.
    """

    def __init__(self, samples, shape, sigma_min=DEFAULT_SIGMA_MIN, workers=1):
        self.X, self.targets = stack_samples(samples)
        if self.X.shape[1:] != (shape.n, shape.S):
            raise DimensionError(
                f"samples are (n, S) = {self.X.shape[1:]}, network expects {(shape.n, shape.S)}"
            )
        self.shape = shape
        self.sigma_min = sigma_min
        self.workers = max(1, int(workers))

    def __call__(self, genes):
        return float(self.evaluate(np.asarray(genes, dtype=np.float64)[None, :])[0])

    def outputs(self, genes_batch):
        """Network outputs, shape ``(P, K)``, for a ``(P, G)`` chromosome batch."""
        genes_batch = np.atleast_2d(np.asarray(genes_batch, dtype=np.float64))
        if genes_batch.shape[1] != self.shape.gene_count():
            raise CodecError(
                f"chromosome length {genes_batch.shape[1]} != {self.shape.gene_count()}"
            )
        sh = self.shape
        c = sh.center_genes
        P = genes_batch.shape[0]
        centers = np.ascontiguousarray(genes_batch[:, :c].reshape(P, sh.m, sh.n, sh.S))
        sigmas = np.maximum(genes_batch[:, c:c + sh.m], self.sigma_min)
        weights = genes_batch[:, c + sh.m:]
        dist = self._distances(centers)
        act = np.exp(-(dist ** 2) / (2.0 * sigmas[:, None, :] ** 2))
        return np.einsum("pkj,pj->pk", act, weights)

    def evaluate(self, genes_batch):
        """Objective values, shape ``(P,)``."""
        y = self.outputs(genes_batch)
        return np.sum((y - self.targets[None, :]) ** 2, axis=1)

    def _distances(self, centers):
        P = centers.shape[0]
        out = np.empty((P, self.X.shape[0], centers.shape[1]))
        if self.workers == 1 or P < 2:
            return _gfd_to_centers(self.X, centers, out)
        chunks = np.array_split(np.arange(P), min(self.workers, P))

        def run(idx):
            lo, hi = idx[0], idx[-1] + 1
            _gfd_to_centers(self.X, centers[lo:hi], out[lo:hi])

        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(run, chunks))
        return out
