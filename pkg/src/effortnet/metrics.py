"""Accuracy criteria for effort estimates.

Every project carries unit frequency, so MARE and MMRE coincide. VARE is
the mean squared deviation of the relative errors from their mean.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import EmptyInput, NonPositiveActual, NonPositiveEstimate, ValidationError

log = logging.getLogger(__name__)

DEFAULT_PRED_LEVELS = (25, 40)


@dataclass(frozen=True)
class EvaluationPair:
    actual: float
    estimated: float
    id: Optional[int] = None

    def __post_init__(self):
        if not self.actual > 0:
            raise NonPositiveActual(f"actual effort must be positive, got {self.actual}")
        if not math.isfinite(self.estimated):
            raise ValidationError(f"estimated effort must be finite, got {self.estimated}")


def _pairs(pairs) -> list[EvaluationPair]:
    out = [p if isinstance(p, EvaluationPair) else EvaluationPair(*p) for p in pairs]
    if not out:
        raise EmptyInput("at least one (actual, estimated) pair is required")
    return out


def relative_error(pair) -> float:
    """``|actual - estimated| / actual``."""
    if not isinstance(pair, EvaluationPair):
        pair = EvaluationPair(*pair)
    return abs(pair.actual - pair.estimated) / pair.actual


def bre(pair) -> float:
    """Balanced relative error ``|estimated - actual| / min(estimated, actual)``."""
    if not isinstance(pair, EvaluationPair):
        pair = EvaluationPair(*pair)
    if not pair.estimated > 0:
        raise NonPositiveEstimate(
            f"BRE is undefined for non-positive estimate {pair.estimated}"
            + (f" (project {pair.id})" if pair.id is not None else "")
        )
    return abs(pair.estimated - pair.actual) / min(pair.estimated, pair.actual)


def _relative_errors(pairs) -> np.ndarray:
    return np.array([relative_error(p) for p in _pairs(pairs)])


def mare(pairs) -> float:
    return float(np.mean(_relative_errors(pairs)) * 100.0)


def mmre(pairs) -> float:
    return float(np.mean(_relative_errors(pairs)) * 100.0)


def vare(pairs) -> float:
    re = _relative_errors(pairs)
    return float(np.mean(np.square(re - re.mean())) * 100.0)


def mean_bre(pairs) -> tuple[float, int]:
    """Mean BRE over pairs with a positive estimate, and how many pairs were excluded.

    The mean is NaN when every estimate is non-positive.
    """
    values, excluded = [], 0
    for p in _pairs(pairs):
        try:
            values.append(bre(p))
        except NonPositiveEstimate as exc:
            log.warning("excluded from mean BRE: %s", exc)
            excluded += 1
    return (float(np.mean(values)) if values else math.nan), excluded


def pred(pairs, n: float) -> float:
    """Percentage of pairs whose relative error is strictly below ``n`` percent."""
    if not n > 0:
        raise ValidationError(f"Pred level must be positive, got {n}")
    re = _relative_errors(pairs)
    return 100.0 * int(np.count_nonzero(re < n / 100.0)) / len(re)


@dataclass(frozen=True)
class ProjectError:
    id: Optional[int]
    actual: float
    estimated: float
    re: float
    bre: Optional[float]


@dataclass(frozen=True)
class EvaluationReport:
    mare_pct: float
    vare_pct: float
    mean_bre: float
    mmre_pct: float
    pred: Mapping[float, float]
    per_project: Sequence[ProjectError] = field(default_factory=tuple)
    bre_excluded: int = 0

    @property
    def pred40(self) -> float:
        return self.pred[40]


def evaluate(
    actual: Iterable[float],
    estimated: Iterable[float],
    ids: Optional[Iterable[int]] = None,
    pred_levels: Sequence[float] = DEFAULT_PRED_LEVELS,
) -> EvaluationReport:
    actual, estimated = list(actual), list(estimated)
    if len(actual) != len(estimated):
        raise ValidationError(f"{len(actual)} actual values but {len(estimated)} estimates")
    ids = list(ids) if ids is not None else [None] * len(actual)
    pairs = _pairs(EvaluationPair(float(a), float(e), i) for a, e, i in zip(actual, estimated, ids))
    levels = sorted(set(pred_levels) | {40})
    mean_b, excluded = mean_bre(pairs)
    per_project = tuple(
        ProjectError(
            id=p.id,
            actual=p.actual,
            estimated=p.estimated,
            re=relative_error(p),
            bre=bre(p) if p.estimated > 0 else None,
        )
        for p in pairs
    )
    return EvaluationReport(
        mare_pct=mare(pairs),
        vare_pct=vare(pairs),
        mean_bre=mean_b,
        mmre_pct=mmre(pairs),
        pred={lvl: pred(pairs, lvl) for lvl in levels},
        per_project=per_project,
        bre_excluded=excluded,
    )
