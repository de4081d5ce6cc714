"""Exact-design radial basis network.

One hidden neuron is placed on every training vector. The linear output
layer ``[LW b2]`` is the minimum-norm least-squares solution of

    [LW b2] @ [A1; ones(1, Q)] = T

where column ``j`` of ``A1`` holds the hidden activations for training input
``j``. With distinct inputs ``A1`` is nonsingular, so the network reproduces
every training target.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DuplicateInputs, IllConditioned, NumericalError, ValidationError
from .radial import RadialLayer

log = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
RIDGE_LAMBDA = 1e-8


@dataclass(frozen=True, eq=False)
class FittedRbnn:
    layer: RadialLayer
    lw2: np.ndarray
    b2: float
    spread: float
    train_residual: float = 0.0
    condition: float = 1.0
    ridge: bool = False

    def predict(self, p) -> np.ndarray | float:
        """``LW . a1(p) + b2``; a 1-D ``p`` gives a float, a 2-D batch gives an array."""
        a1 = self.layer.output(p)
        out = a1 @ self.lw2 + self.b2
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {
            "kind": "rbnn",
            "spread": self.spread,
            "centers": self.layer.centers.tolist(),
            "lw2": self.lw2.tolist(),
            "b2": self.b2,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FittedRbnn":
        layer = RadialLayer.from_spread(data["centers"], data["spread"])
        lw2 = np.asarray(data["lw2"], dtype=float)
        if lw2.shape != (layer.n_neurons,):
            raise ValidationError("lw2 length must equal the number of centers")
        return cls(layer=layer, lw2=lw2, b2=float(data["b2"]), spread=float(data["spread"]))


def _check_training_data(inputs, targets) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(inputs, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    t = np.asarray(targets, dtype=float).ravel()
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValidationError("training inputs must be a non-empty Q x R matrix")
    if t.shape[0] != x.shape[0]:
        raise DimensionMismatch(f"{x.shape[0]} training inputs but {t.shape[0]} targets")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(t))):
        raise ValidationError("training data must be finite")
    return x, t


def _dedupe(x: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse identical rows that share a target; conflicting targets are an error."""
    _, first, inverse = np.unique(x, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    if len(first) == len(x):
        return x, t
    for group in range(len(first)):
        members = np.flatnonzero(inverse == group)
        if np.ptp(t[members]) != 0:
            raise DuplicateInputs(
                f"training rows {members.tolist()} have identical inputs but different targets"
            )
    keep = np.sort(first)
    return x[keep], t[keep]


def _min_norm_solve(design: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, float, bool]:
    """Solve ``wb @ design = targets`` for the minimum-norm row ``wb``.

    ``design`` is (Q+1) x Q, so there are Q equations in Q+1 unknowns.
    """
    system = design.T
    singular = np.linalg.svd(system, compute_uv=False)
    condition = math.inf if singular[-1] == 0 else float(singular[0] / singular[-1])
    if condition <= CONDITION_LIMIT:
        wb, *_ = np.linalg.lstsq(system, targets, rcond=None)
        return wb, condition, False
    warnings.warn(
        f"RBNN design matrix condition {condition:.3g} exceeds {CONDITION_LIMIT:.0e}; "
        f"applying ridge {RIDGE_LAMBDA:g}",
        IllConditioned,
        stacklevel=3,
    )
    log.warning("ill-conditioned RBNN fit (cond=%.3g), ridge %g applied", condition, RIDGE_LAMBDA)
    gram = system @ system.T + RIDGE_LAMBDA * np.eye(system.shape[0])
    wb = system.T @ np.linalg.solve(gram, targets)
    return wb, condition, True


def fit_rbnn(train_inputs, train_targets, spread: float) -> FittedRbnn:
    """Build an exact-design radial basis network on the training pairs.

    Identical training inputs with equal targets are merged into a single
    neuron; with different targets no exact fit exists and
    :class:`DuplicateInputs` is raised.
    """
    x, t = _check_training_data(train_inputs, train_targets)
    x, t = _dedupe(x, t)
    layer = RadialLayer.from_spread(x, spread)
    a1 = layer.output(x).T  # column j = activations for training input j
    design = np.vstack([a1, np.ones((1, x.shape[0]))])
    wb, condition, ridge = _min_norm_solve(design, t)
    if not np.all(np.isfinite(wb)):
        raise NumericalError("RBNN second-layer solve produced non-finite weights")
    model = FittedRbnn(
        layer=layer,
        lw2=wb[:-1].copy(),
        b2=float(wb[-1]),
        spread=float(spread),
        condition=condition,
        ridge=ridge,
    )
    residual = float(np.max(np.abs(model.predict(x) - t)))
    object.__setattr__(model, "train_residual", residual)
    return model


def predict_rbnn(model: FittedRbnn, p) -> np.ndarray | float:
    return model.predict(p)
