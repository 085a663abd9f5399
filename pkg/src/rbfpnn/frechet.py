"""Discrete and generalized Fréchet distances for sampled time functions.

Sequences are one-dimensional: every vertex is a real number and the ground
distance is ``|a - b|``. A function-vector sample is an ``(n, S)`` array whose
rows are the sampled components.

The production path is the coupling dynamic program (Eiter & Mannila), compiled
with numba. :func:`discrete_frechet_bruteforce` enumerates paired walks
explicitly and exists only to check it.
"""

import math

import numpy as np
from numba import njit

from .errors import DimensionError, ParameterError, ValidationError

__all__ = [
    "as_sequence",
    "as_sample",
    "point_dist",
    "discrete_frechet",
    "discrete_frechet_bruteforce",
    "enumerate_paired_walks",
    "walk_cost",
    "generalized_frechet",
    "pairwise_generalized",
]

BRUTEFORCE_MAX_TOTAL = 16


def as_sequence(values, name="sequence"):
    """Validate ``values`` as a non-empty, finite 1-D float array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{name} must contain at least one value")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def as_sample(components, name="sample"):
    """Validate a function-vector sample and return it as an ``(n, S)`` array.

    A bare 1-D input is promoted to a single-component sample.
    """
    try:
        arr = np.asarray(components, dtype=np.float64)
    except ValueError as exc:
        raise DimensionError(f"{name} components have unequal lengths") from exc
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be (n, S), got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValidationError(f"{name} must have n >= 1 components of length S >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def point_dist(a, b):
    """Ground distance between two scalar vertices."""
    return abs(float(a) - float(b))


@njit(cache=True, nogil=True)
def _dfd(a, b):
    # keep the rolling row over the shorter sequence
    if b.shape[0] > a.shape[0]:
        a, b = b, a
    n = b.shape[0]
    row = np.empty(n)
    row[0] = abs(a[0] - b[0])
    for j in range(1, n):
        row[j] = max(row[j - 1], abs(a[0] - b[j]))
    for i in range(1, a.shape[0]):
        diag = row[0]
        row[0] = max(row[0], abs(a[i] - b[0]))
        for j in range(1, n):
            up = row[j]
            best = min(up, row[j - 1], diag)
            d = abs(a[i] - b[j])
            row[j] = d if d > best else best
            diag = up
    return row[n - 1]


@njit(cache=True, nogil=True)
def _gfd(x, y):
    acc = 0.0
    for i in range(x.shape[0]):
        d = _dfd(x[i], y[i])
        acc += d * d
    return math.sqrt(acc)


@njit(cache=True, nogil=True)
def _gfd_to_centers(samples, centers, out):
    # samples (K, n, S), centers (P, m, n, S) -> out (P, K, m)
    for p in range(centers.shape[0]):
        for k in range(samples.shape[0]):
            for j in range(centers.shape[1]):
                out[p, k, j] = _gfd(samples[k], centers[p, j])
    return out


@njit(cache=True, nogil=True)
def _gfd_pairwise(samples, out):
    for a in range(samples.shape[0]):
        out[a, a] = 0.0
        for b in range(a + 1, samples.shape[0]):
            d = _gfd(samples[a], samples[b])
            out[a, b] = d
            out[b, a] = d
    return out


def discrete_frechet(a, b):
    """Discrete Fréchet distance between two scalar sequences.

    Parameters
    ----------
    a, b : array_like
        Non-empty 1-D sequences of finite values; lengths may differ.

    Returns
    -------
    float

    Examples
    --------
    >>> discrete_frechet([0, 1, 2], [0, 2])
    1.0
    """
    return float(_dfd(as_sequence(a, "A"), as_sequence(b, "B")))


def enumerate_paired_walks(m, n):
    """Yield every paired walk along chains of ``m`` and ``n`` vertices.

    A walk is a tuple of segments ``((a0, a1), (b0, b1))`` of half-open index
    ranges. The A ranges partition ``range(m)`` in order, the B ranges
    partition ``range(n)``, and in each segment at least one side holds
    exactly one vertex.
    """

    def rec(i, j):
        if i == m and j == n:
            yield ()
            return
        if i == m or j == n:
            return
        # |A_i| == 1, any non-empty B block
        for q in range(1, n - j + 1):
            seg = ((i, i + 1), (j, j + q))
            for rest in rec(i + 1, j + q):
                yield (seg,) + rest
        # |B_i| == 1 with |A_i| >= 2 (|A_i| == 1 already covered above)
        for p in range(2, m - i + 1):
            seg = ((i, i + p), (j, j + 1))
            for rest in rec(i + p, j + 1):
                yield (seg,) + rest

    yield from rec(0, 0)


def walk_cost(a, b, walk):
    """Max over segments of the max ground distance inside the segment."""
    cost = 0.0
    for (a0, a1), (b0, b1) in walk:
        for x in a[a0:a1]:
            for y in b[b0:b1]:
                cost = max(cost, point_dist(x, y))
    return cost


def discrete_frechet_bruteforce(a, b):
    """Minimum paired-walk cost by exhaustive enumeration (test oracle).

    Raises
    ------
    ParameterError
        If ``len(a) + len(b)`` exceeds 16; the walk count grows exponentially.
    """
    a = as_sequence(a, "A")
    b = as_sequence(b, "B")
    if a.size + b.size > BRUTEFORCE_MAX_TOTAL:
        raise ParameterError(
            f"brute force limited to len(A) + len(B) <= {BRUTEFORCE_MAX_TOTAL}, "
            f"got {a.size + b.size}"
        )
    av, bv = a.tolist(), b.tolist()
    return min(walk_cost(av, bv, w) for w in enumerate_paired_walks(len(av), len(bv)))


def generalized_frechet(x, y):
    """Euclidean combination of componentwise discrete Fréchet distances.

    ``x`` and ``y`` need the same component count; component lengths may
    differ between the two samples.
    """
    xs = _components(x, "X")
    ys = _components(y, "Y")
    if len(xs) != len(ys):
        raise DimensionError(f"component count mismatch: {len(xs)} vs {len(ys)}")
    return math.sqrt(sum(_dfd(p, q) ** 2 for p, q in zip(xs, ys)))


def _components(sample, name):
    if isinstance(sample, np.ndarray) and sample.ndim == 2:
        return [as_sequence(row, name) for row in sample]
    if isinstance(sample, np.ndarray) and sample.ndim == 1:
        return [as_sequence(sample, name)]
    comps = list(sample)
    if comps and np.ndim(comps[0]) == 0:
        return [as_sequence(comps, name)]
    if not comps:
        raise ValidationError(f"{name} needs at least one component")
    return [as_sequence(c, name) for c in comps]


def pairwise_generalized(samples):
    """Symmetric matrix of generalized distances for a ``(K, n, S)`` stack."""
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    out = np.empty((samples.shape[0], samples.shape[0]))
    return _gfd_pairwise(samples, out)
