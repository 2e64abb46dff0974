"""Error quantification (per-case APE/AbsE, aggregate MAE/MAPE/Pearson R),
the three-way feedback trigger, and the stopping rule.

Percent errors are undefined where the measured value is zero; such cases
are dropped from MAPE and from the APE trigger condition, but their
absolute errors still count toward MAE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import FeedbackPolicy, Sample
from .errors import EmptyArchive, LengthMismatch
from .sampling import FeedbackCenter
from .svr import SvrModel, predict_batch


@dataclass(frozen=True)
class CaseError:
    """Errors of one archived case against the model."""

    index: int
    ape: Optional[float]  # percent; None when the measured value is 0
    abse: float


@dataclass(frozen=True)
class ErrorReport:
    per_case: tuple[CaseError, ...]
    mae: float
    mape: float
    r: float
    r_degenerate: bool
    reference: str  # "training" | "verification"

    def case(self, index: int) -> CaseError:
        for c in self.per_case:
            if c.index == index:
                return c
        raise KeyError(index)


class PearsonResult(NamedTuple):
    value: float
    degenerate: bool


def pearson_r(x: Sequence[float], y: Sequence[float]) -> PearsonResult:
    """Population-moment Pearson correlation Cov(x,y)/(sd(x)*sd(y)).

    A constant series makes the ratio undefined; that is flagged (not
    raised) and the value reported as 1.0.
    """
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise LengthMismatch(f"series shapes differ: {xv.shape} vs {yv.shape}")
    if len(xv) < 2:
        raise LengthMismatch("need at least 2 points")
    dx = xv - xv.mean()
    dy = yv - yv.mean()
    vx = float(np.mean(dx * dx))
    vy = float(np.mean(dy * dy))
    if vx == 0.0 or vy == 0.0:
        return PearsonResult(1.0, True)
    cov = float(np.mean(dx * dy))
    return PearsonResult(cov / math.sqrt(vx * vy), False)


def error_series(predicted: Sequence[float], actual: Sequence[float],
                 reference: str = "verification") -> ErrorReport:
    """Build a report from parallel prediction/measurement series."""
    pred = np.asarray(predicted, dtype=float)
    act = np.asarray(actual, dtype=float)
    if pred.shape != act.shape:
        raise LengthMismatch(f"{pred.shape} vs {act.shape}")
    if len(pred) == 0:
        raise EmptyArchive("no cases to score")
    cases = []
    for i, (p, a) in enumerate(zip(pred, act)):
        abse = abs(p - a)
        ape = None if a == 0.0 else abs((p - a) / a) * 100.0
        cases.append(CaseError(index=i, ape=ape, abse=abse))
    mae = float(np.mean([c.abse for c in cases]))
    apes = [c.ape for c in cases if c.ape is not None]
    mape = float(np.mean(apes)) if apes else 0.0
    if len(pred) >= 2:
        r, degenerate = pearson_r(pred, act)
    else:
        r, degenerate = 1.0, True
    return ErrorReport(
        per_case=tuple(cases), mae=mae, mape=mape, r=r,
        r_degenerate=degenerate, reference=reference,
    )


def case_errors(model: SvrModel, archive: Sequence[Sample],
                reference: str = "training") -> ErrorReport:
    """Score the model against every measured sample in the archive."""
    if len(archive) == 0:
        raise EmptyArchive("cannot score an empty archive")
    for s in archive:
        if not s.measured:
            raise EmptyArchive("archive contains unmeasured samples")
    coords = np.array([s.coords for s in archive], dtype=float)
    preds = predict_batch(model, coords)
    actuals = [s.value for s in archive]
    report = error_series(preds, actuals, reference)
    # re-key per-case indices to the samples' sequence indices
    cases = tuple(
        CaseError(index=s.sequence_index, ape=c.ape, abse=c.abse)
        for s, c in zip(archive, report.per_case)
    )
    return ErrorReport(
        per_case=cases, mae=report.mae, mape=report.mape, r=report.r,
        r_degenerate=report.r_degenerate, reference=reference,
    )


def observed_dv_range(archive: Sequence[Sample]) -> float:
    """Largest known dv spread: max minus min over measured samples."""
    values = [s.value for s in archive if s.measured]
    if not values:
        raise EmptyArchive("no measured samples")
    return max(values) - min(values)


def feedback_check(
    report: ErrorReport,
    archive: Sequence[Sample],
    policy: FeedbackPolicy,
    dv_range: float,
) -> Optional[FeedbackCenter]:
    """Return the worst qualifying case, or None when no case qualifies.

    Three conditions must hold at once: the archive is larger than
    dimension^2 + 1; a case's APE exceeds the threshold; and that same
    case's absolute error exceeds range_fraction of the dv range. Among
    qualifying cases the largest APE wins (ties: larger AbsE, then lower
    sample index).
    """
    if len(archive) <= policy.dimension**2 + 1:
        return None
    by_index = {s.sequence_index: s for s in archive}
    qualifying = [
        c for c in report.per_case
        if c.ape is not None
        and c.ape > policy.ape_threshold
        and c.abse > policy.range_fraction * dv_range
    ]
    if not qualifying and policy.abse_only_trigger:
        zero_cases = [
            c for c in report.per_case
            if c.ape is None and c.abse > policy.range_fraction * dv_range
        ]
        if zero_cases:
            worst = max(zero_cases, key=lambda c: (c.abse, -c.index))
            return FeedbackCenter(by_index[worst.index].coords, float("inf"))
    if not qualifying:
        return None
    worst = max(qualifying, key=lambda c: (c.ape, c.abse, -c.index))
    return FeedbackCenter(by_index[worst.index].coords, worst.ape)


def stopping_check(pass_history: Sequence[bool], run_length: int) -> bool:
    """True iff the last ``run_length`` iterations all passed.

    A shorter history never stops: the run must be fully observed.
    """
    if run_length < 1:
        raise ValueError("run_length must be >= 1")
    if len(pass_history) < run_length:
        return False
    return all(pass_history[-run_length:])
