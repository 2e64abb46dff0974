"""The adaptive loop: propose a case, record its measured value, refit the
surrogate, score the archive, and decide between exploratory sampling,
error-feedback sampling, and stopping.

A session strictly alternates propose_next / record_result. The stopping
rule fires once the configured number of consecutive iterations were
trigger-eligible yet produced no qualifying feedback case.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from . import metrics, sampling, svr
from .core import Domain, Provenance, Sample, SessionConfig, validate_domain
from .errors import (
    CaseBudgetExceeded,
    DrawExhausted,
    MissingEndpoints,
    NonFiniteValue,
    NotConverged,
    UnmeasuredInitialSample,
    WrongState,
)
from .metrics import ErrorReport
from .sampling import ConstrainedDraw, FeedbackCenter


class SessionStatus(str, Enum):
    READY_TO_PROPOSE = "ready_to_propose"
    AWAITING_MEASUREMENT = "awaiting_measurement"
    CONVERGED = "converged"
    FAILED = "failed"


@dataclass(frozen=True)
class IterationRecord:
    """One record per measured case: the post-refit error analysis and the
    resulting feedback/stop bookkeeping."""

    archive_size: int
    report: ErrorReport
    eligible: bool
    passed: bool
    feedback: Optional[FeedbackCenter]
    hyperparams: svr.SvrHyperparams
    fold_permutation: tuple[int, ...]


@dataclass
class SessionState:
    config: SessionConfig
    archive: list[Sample]
    rng: np.random.Generator
    v: int = 0
    model: Optional[svr.SvrModel] = None
    error_history: list[IterationRecord] = field(default_factory=list)
    pending: Optional[Sample] = None
    pending_audit: Optional[ConstrainedDraw] = None
    consecutive_passes: int = 0
    status: SessionStatus = SessionStatus.READY_TO_PROPOSE

    @property
    def domain(self) -> Domain:
        return self.config.domain

    def last_feedback(self) -> Optional[FeedbackCenter]:
        if self.error_history:
            return self.error_history[-1].feedback
        return None

    def selected_count(self) -> int:
        return sum(
            1 for s in self.archive if s.provenance is not Provenance.INITIAL
        )

    def provenance_counts(self) -> dict[str, int]:
        counts = {p.value: 0 for p in Provenance}
        for s in self.archive:
            counts[s.provenance.value] += 1
        return counts


def _required_corners(domain: Domain) -> list[tuple[float, ...]]:
    axes = [(r.low, r.high) for r in domain.ivs]
    return [tuple(c) for c in itertools.product(*axes)]


def _refit(state: SessionState) -> None:
    """Grid search + final fit on the whole archive."""
    state.model = svr.refit(
        state.model, state.archive, state.domain, state.config.svr_config, state.rng
    )


def start_session(config: SessionConfig, initial_samples: Sequence[Sample]) -> SessionState:
    """Validate the initial archive and fit the first surrogate.

    Every corner of the domain box must be present and measured; extra
    known key points are welcome.
    """
    validate_domain(config.domain)
    samples = list(initial_samples)
    coords_set = set()
    for s in samples:
        if s.provenance is not Provenance.INITIAL:
            raise UnmeasuredInitialSample(
                f"initial archive contains non-initial provenance {s.provenance}"
            )
        if not s.measured:
            raise UnmeasuredInitialSample(f"initial sample at {s.coords} has no value")
        if not math.isfinite(s.value):
            raise NonFiniteValue(f"initial sample value {s.value} is not finite")
        if not config.domain.contains(s.coords):
            raise MissingEndpoints(f"initial sample {s.coords} outside the domain")
        coords_set.add(s.coords)
    for corner in _required_corners(config.domain):
        if corner not in coords_set:
            raise MissingEndpoints(f"missing initial sample at domain corner {corner}")

    archive = [
        Sample(s.coords, s.value, Provenance.INITIAL, i)
        for i, s in enumerate(samples)
    ]
    state = SessionState(
        config=config,
        archive=archive,
        rng=np.random.default_rng(config.rng_seed),
    )
    _refit(state)
    return state


def propose_next(state: SessionState) -> Sample:
    """Draw the next case; exploratory unless the last iteration triggered
    feedback, in which case the draw concentrates around the worst case."""
    if state.status is not SessionStatus.READY_TO_PROPOSE:
        raise WrongState(f"cannot propose while {state.status.value}")
    center = state.last_feedback()
    if center is not None:
        spec = sampling.feedback_spec(state.domain, center)
        params = state.config.feedback_params
        provenance = Provenance.FEEDBACK
        length_scale = state.config.feedback_length_scale
    else:
        spec = sampling.exploratory_spec(state.domain)
        params = state.config.draw_params
        provenance = Provenance.DRAWN
        length_scale = state.config.exploratory_length_scale

    draw = sampling.draw_constrained(
        spec,
        state.archive,
        state.v,
        params,
        state.domain,
        state.rng,
        max_attempts=state.config.max_draw_attempts,
        length_scale=length_scale,
    )
    sample = Sample(draw.coords, None, provenance, len(state.archive))
    state.v += 1
    state.pending = sample
    state.pending_audit = draw
    state.status = SessionStatus.AWAITING_MEASUREMENT
    return sample


def predicted_value(state: SessionState, coords: Sequence[float]) -> Optional[float]:
    if state.model is None:
        return None
    return svr.predict(state.model, coords)


def record_result(state: SessionState, value: float) -> IterationRecord:
    """Attach the measured value, refit, score, and decide what comes next."""
    if state.status is not SessionStatus.AWAITING_MEASUREMENT:
        raise WrongState(f"cannot record while {state.status.value}")
    if not math.isfinite(value):
        raise NonFiniteValue(f"measured value {value!r} is not finite")

    measured = Sample(
        state.pending.coords, float(value), state.pending.provenance,
        state.pending.sequence_index,
    )
    state.archive.append(measured)
    state.pending = None
    state.pending_audit = None

    fold_perm = _peek_fold_permutation(state)
    _refit(state)
    report = metrics.case_errors(state.model, state.archive, reference="training")
    dv_range = metrics.observed_dv_range(state.archive)
    policy = state.config.feedback_policy
    center = metrics.feedback_check(report, state.archive, policy, dv_range)
    eligible = len(state.archive) > policy.dimension**2 + 1
    passed = eligible and center is None
    state.consecutive_passes = state.consecutive_passes + 1 if passed else 0

    record = IterationRecord(
        archive_size=len(state.archive),
        report=report,
        eligible=eligible,
        passed=passed,
        feedback=center,
        hyperparams=state.model.hyperparams,
        fold_permutation=fold_perm,
    )
    state.error_history.append(record)

    history = [r.passed for r in state.error_history]
    if metrics.stopping_check(history, state.config.stopping_run_length):
        state.status = SessionStatus.CONVERGED
    else:
        state.status = SessionStatus.READY_TO_PROPOSE
    return record


def _peek_fold_permutation(state: SessionState) -> tuple[int, ...]:
    """Fold order the upcoming refit will draw, recorded for audit.

    Replays the RNG from its current state without consuming it.
    """
    probe = np.random.default_rng()
    probe.bit_generator.state = state.rng.bit_generator.state
    m = len(state.archive)
    return tuple(int(i) for i in probe.permutation(m))


@dataclass(frozen=True)
class SessionReport:
    """Outcome of an autonomous run."""

    state: SessionState
    converged: bool
    selected_count: int
    provenance_counts: dict[str, int]
    failure: Optional[str] = None


Oracle = Callable[..., float]


def run_autonomous(
    config: SessionConfig,
    initial_samples: Sequence[Sample],
    oracle: Oracle,
) -> SessionReport:
    """Alternate propose/measure against a callable oracle until the session
    converges or the case budget runs out (reported, never raised)."""
    state = start_session(config, initial_samples)
    failure = None
    while state.status is SessionStatus.READY_TO_PROPOSE:
        if state.v >= config.case_budget:
            state.status = SessionStatus.FAILED
            failure = CaseBudgetExceeded(
                f"no convergence within {config.case_budget} selected cases"
            )
            break
        try:
            sample = propose_next(state)
        except DrawExhausted as err:
            # the spacing constraint left no admissible room; report the
            # partial session rather than blowing up an unattended run
            state.status = SessionStatus.FAILED
            failure = err
            break
        record_result(state, float(oracle(*sample.coords)))
    return SessionReport(
        state=state,
        converged=state.status is SessionStatus.CONVERGED,
        selected_count=state.selected_count(),
        provenance_counts=state.provenance_counts(),
        failure=str(failure) if failure is not None else None,
    )


def export_model(state: SessionState, force: bool = False) -> dict:
    """Self-contained artifact: the model document plus full provenance."""
    if state.status is not SessionStatus.CONVERGED and not force:
        raise NotConverged(
            f"session is {state.status.value}; pass force=True to export anyway"
        )
    if state.model is None:
        raise NotConverged("no model fitted yet")
    from .session_io import config_to_doc  # local import: io depends on us

    return {
        "model": svr.model_to_doc(state.model),
        "config": config_to_doc(state.config),
        "archive": [
            {
                "coords": list(s.coords),
                "value": s.value,
                "provenance": s.provenance.value,
                "sequence_index": s.sequence_index,
            }
            for s in state.archive
        ],
        "error_history": [
            {
                "archive_size": r.archive_size,
                "mae": r.report.mae,
                "mape": r.report.mape,
                "r": r.report.r,
                "eligible": r.eligible,
                "passed": r.passed,
            }
            for r in state.error_history
        ],
        "status": state.status.value,
    }
