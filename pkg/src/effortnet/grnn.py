"""Generalized regression network (Nadaraya-Watson kernel regression).

The second-layer weights are the training targets themselves; the output is
the activation-weighted mean of those targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .radial import RadialLayer


@dataclass(frozen=True, eq=False)
class FittedGrnn:
    layer: RadialLayer
    targets: np.ndarray
    spread: float

    def __post_init__(self):
        targets = np.array(self.targets, dtype=float).ravel()
        if targets.shape != (self.layer.n_neurons,):
            raise DimensionMismatch(
                f"{self.layer.n_neurons} centers but {targets.shape[0]} targets"
            )
        targets.setflags(write=False)
        object.__setattr__(self, "targets", targets)

    def predict(self, p) -> np.ndarray | float:
        n = self.layer.net_input(p)
        # Shift the squared net input by its row minimum before exponentiating.
        # The common factor cancels in the ratio and keeps the nearest
        # neuron's weight at 1, so small spreads cannot underflow to 0/0.
        sq = np.square(n)
        weights = np.exp(-(sq - sq.min(axis=-1, keepdims=True)))
        out = (weights @ self.targets) / weights.sum(axis=-1)
        # Rounding can push a convex combination a few ulps past its extremes.
        out = np.clip(out, self.targets.min(), self.targets.max())
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {
            "kind": "grnn",
            "spread": self.spread,
            "centers": self.layer.centers.tolist(),
            "targets": self.targets.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FittedGrnn":
        layer = RadialLayer.from_spread(data["centers"], data["spread"])
        return cls(layer=layer, targets=data["targets"], spread=float(data["spread"]))


def fit_grnn(train_inputs, train_targets, spread: float) -> FittedGrnn:
    """Store centers and targets; no solve is involved. Duplicate inputs are kept."""
    x = np.asarray(train_inputs, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    t = np.asarray(train_targets, dtype=float).ravel()
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValidationError("training inputs must be a non-empty Q x R matrix")
    if not np.all(np.isfinite(t)):
        raise ValidationError("training targets must be finite")
    return FittedGrnn(layer=RadialLayer.from_spread(x, spread), targets=t, spread=float(spread))


def predict_grnn(model: FittedGrnn, p) -> np.ndarray | float:
    return model.predict(p)
