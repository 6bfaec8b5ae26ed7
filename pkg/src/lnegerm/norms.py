"""Ambient norms: Euclidean and weighted max.

A norm object is callable on a single point or an (m, n) array of points
and returns the norm value(s).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class EuclideanNorm:
    name: str = "euclid"

    def __call__(self, x):
        return np.linalg.norm(np.asarray(x, dtype=float), axis=-1)


@dataclass(frozen=True)
class WeightedMaxNorm:
    """max_i v_i |x_i| with strictly positive weights."""

    weights: tuple
    name: str = "maxv"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or np.any(w <= 0):
            raise InputError("max-norm weights must be a vector of positive reals")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        return np.max(w * np.abs(x), axis=-1)


EUCLID = EuclideanNorm()


def make_norm(kind: str, weights=None, dim: int | None = None):
    if kind == "euclid":
        return EUCLID
    if kind == "maxv":
        if weights is None:
            if dim is None:
                raise InputError("maxv norm needs weights or an ambient dimension")
            weights = (1.0,) * dim
        return WeightedMaxNorm(tuple(float(w) for w in weights))
    raise InputError(f"unknown norm kind {kind!r}")
