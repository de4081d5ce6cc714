"""Radial basis first layer shared by the RBNN and GRNN regressors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonPositiveSpread, ValidationError

#: Net input at which radbas falls to one half.
HALF_ACTIVATION_INPUT = math.sqrt(math.log(2.0))


def radbas(n):
    """Gaussian transfer function ``exp(-n**2)``; accepts scalars or arrays."""
    return np.exp(-np.square(n))


def bias_from_spread(spread: float) -> float:
    """Bias that makes a neuron output exactly 0.5 at distance ``spread`` from its center."""
    spread = float(spread)
    if not (spread > 0 and math.isfinite(spread)):
        raise NonPositiveSpread(f"spread must be a positive finite number, got {spread}")
    return HALF_ACTIVATION_INPUT / spread


@dataclass(frozen=True, eq=False)
class RadialLayer:
    """Stored centers (one per row) and the scalar bias shared by every neuron."""

    centers: np.ndarray
    bias: float

    def __post_init__(self):
        centers = np.array(self.centers, dtype=float)
        if centers.ndim == 1:
            centers = centers[:, None]
        if centers.ndim != 2 or centers.shape[0] < 1 or centers.shape[1] < 1:
            raise ValidationError("centers must be a non-empty Q x R matrix")
        if not np.all(np.isfinite(centers)):
            raise ValidationError("centers must be finite")
        if not (self.bias > 0 and math.isfinite(self.bias)):
            raise ValidationError(f"bias must be positive, got {self.bias}")
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "bias", float(self.bias))

    @classmethod
    def from_spread(cls, centers, spread: float) -> "RadialLayer":
        return cls(centers, bias_from_spread(spread))

    @property
    def n_neurons(self) -> int:
        return self.centers.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.centers.shape[1]

    def _as_batch(self, p) -> tuple[np.ndarray, bool]:
        p = np.asarray(p, dtype=float)
        single = p.ndim <= 1
        batch = np.atleast_2d(p) if p.ndim == 1 else p.reshape(1, -1) if p.ndim == 0 else p
        if batch.ndim != 2 or batch.shape[1] != self.n_inputs:
            raise DimensionMismatch(
                f"input has dimension {batch.shape[-1]}, layer expects {self.n_inputs}"
            )
        return batch, single

    def net_input(self, p) -> np.ndarray:
        """Distances to every center scaled by the bias; shape (Q,) or (M, Q)."""
        batch, single = self._as_batch(p)
        diff = batch[:, None, :] - self.centers[None, :, :]
        n = np.sqrt(np.einsum("mqr,mqr->mq", diff, diff)) * self.bias
        return n[0] if single else n

    def output(self, p) -> np.ndarray:
        """First-layer activations ``radbas(||p - c_i|| * bias)`` for each center."""
        return radbas(self.net_input(p))


def layer1_output(layer: RadialLayer, p) -> np.ndarray:
    return layer.output(p)
