"""Persistence: session documents, model artifacts, and CSV exports.

Documents are single JSON files with an embedded content digest. Floats
serialize through repr (shortest round-trip), and the RNG state is stored
verbatim, so a reloaded session continues bit-identically to an
uninterrupted one.
"""

from __future__ import annotations

import csv
import hashlib
import json
from typing import Sequence

import numpy as np

from . import svr
from .benchmarks import ComparisonTable
from .controller import IterationRecord, SessionState, SessionStatus
from .core import (
    ConstraintParams,
    Domain,
    FeedbackPolicy,
    Provenance,
    Sample,
    SessionConfig,
    SvrConfig,
    VariableRange,
)
from .errors import CorruptDocument, IoFailure, SchemaMismatch
from .metrics import CaseError, ErrorReport
from .sampling import ConstrainedDraw, FeedbackCenter

SESSION_SCHEMA_VERSION = 1
MODEL_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# config/dataclass <-> document helpers

def config_to_doc(config: SessionConfig) -> dict:
    return {
        "domain": {
            "ivs": [
                {"name": r.name, "low": r.low, "high": r.high}
                for r in config.domain.ivs
            ],
            "dv_name": config.domain.dv_name,
        },
        "draw_params": {"p": config.draw_params.p, "q": config.draw_params.q},
        "feedback_params": {
            "p": config.feedback_params.p,
            "q": config.feedback_params.q,
        },
        "feedback_policy": {
            "dimension": config.feedback_policy.dimension,
            "ape_threshold": config.feedback_policy.ape_threshold,
            "range_fraction": config.feedback_policy.range_fraction,
            "abse_only_trigger": config.feedback_policy.abse_only_trigger,
        },
        "svr_config": {
            "grid_log10_min": config.svr_config.grid_log10_min,
            "grid_log10_max": config.svr_config.grid_log10_max,
            "grid_log10_step": config.svr_config.grid_log10_step,
            "cv_folds": config.svr_config.cv_folds,
            "epsilon_fraction": config.svr_config.epsilon_fraction,
            "solver_tolerance": config.svr_config.solver_tolerance,
            "max_solver_passes": config.svr_config.max_solver_passes,
            "cv_solver_tolerance": config.svr_config.cv_solver_tolerance,
            "cv_solver_passes": config.svr_config.cv_solver_passes,
            "coarse_to_fine": config.svr_config.coarse_to_fine,
        },
        "stopping_run_length": config.stopping_run_length,
        "rng_seed": config.rng_seed,
        "max_draw_attempts": config.max_draw_attempts,
        "case_budget": config.case_budget,
        "exploratory_length_scale": config.exploratory_length_scale,
        "feedback_length_scale": config.feedback_length_scale,
    }


def config_from_doc(doc: dict) -> SessionConfig:
    domain = Domain(
        ivs=[VariableRange(r["name"], r["low"], r["high"]) for r in doc["domain"]["ivs"]],
        dv_name=doc["domain"]["dv_name"],
    )
    return SessionConfig(
        domain=domain,
        draw_params=ConstraintParams(**doc["draw_params"]),
        feedback_params=ConstraintParams(**doc["feedback_params"]),
        feedback_policy=FeedbackPolicy(**doc["feedback_policy"]),
        svr_config=SvrConfig(**doc["svr_config"]),
        stopping_run_length=doc["stopping_run_length"],
        rng_seed=doc["rng_seed"],
        max_draw_attempts=doc["max_draw_attempts"],
        case_budget=doc["case_budget"],
        exploratory_length_scale=doc.get("exploratory_length_scale"),
        feedback_length_scale=doc.get("feedback_length_scale"),
    )


def _sample_to_doc(s: Sample) -> dict:
    return {
        "coords": list(s.coords),
        "value": s.value,
        "provenance": s.provenance.value,
        "sequence_index": s.sequence_index,
    }


def _sample_from_doc(doc: dict) -> Sample:
    return Sample(
        doc["coords"], doc["value"], Provenance(doc["provenance"]),
        doc["sequence_index"],
    )


def _report_to_doc(report: ErrorReport) -> dict:
    return {
        "per_case": [
            {"index": c.index, "ape": c.ape, "abse": c.abse}
            for c in report.per_case
        ],
        "mae": report.mae,
        "mape": report.mape,
        "r": report.r,
        "r_degenerate": report.r_degenerate,
        "reference": report.reference,
    }


def _report_from_doc(doc: dict) -> ErrorReport:
    return ErrorReport(
        per_case=tuple(
            CaseError(index=c["index"], ape=c["ape"], abse=c["abse"])
            for c in doc["per_case"]
        ),
        mae=doc["mae"],
        mape=doc["mape"],
        r=doc["r"],
        r_degenerate=doc["r_degenerate"],
        reference=doc["reference"],
    )


def _record_to_doc(rec: IterationRecord) -> dict:
    return {
        "archive_size": rec.archive_size,
        "report": _report_to_doc(rec.report),
        "eligible": rec.eligible,
        "passed": rec.passed,
        "feedback": None if rec.feedback is None else {
            "coords": list(rec.feedback.coords),
            "triggering_ape": rec.feedback.triggering_ape,
        },
        "hyperparams": {
            "C": rec.hyperparams.C,
            "gamma": rec.hyperparams.gamma,
            "epsilon": rec.hyperparams.epsilon,
        },
        "fold_permutation": list(rec.fold_permutation),
    }


def _record_from_doc(doc: dict) -> IterationRecord:
    fb = doc["feedback"]
    return IterationRecord(
        archive_size=doc["archive_size"],
        report=_report_from_doc(doc["report"]),
        eligible=doc["eligible"],
        passed=doc["passed"],
        feedback=None if fb is None else FeedbackCenter(fb["coords"], fb["triggering_ape"]),
        hyperparams=svr.SvrHyperparams(**doc["hyperparams"]),
        fold_permutation=tuple(doc["fold_permutation"]),
    )


# ---------------------------------------------------------------------------
# digest plumbing

def _canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _with_digest(doc: dict) -> dict:
    doc = dict(doc)
    doc["digest"] = ""
    doc["digest"] = hashlib.sha256(_canonical(doc).encode()).hexdigest()
    return doc


def _check_digest(doc: dict) -> dict:
    if "digest" not in doc:
        raise CorruptDocument("document has no digest")
    claimed = doc["digest"]
    probe = dict(doc)
    probe["digest"] = ""
    actual = hashlib.sha256(_canonical(probe).encode()).hexdigest()
    if claimed != actual:
        raise CorruptDocument("digest mismatch: document was modified or truncated")
    return doc


def _write_json(doc: dict, path: str) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    except OSError as err:
        raise IoFailure(f"cannot write {path}: {err}") from err


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise IoFailure(f"cannot read {path}: {err}") from err
    if not text.strip():
        raise CorruptDocument(f"{path} is empty")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise CorruptDocument(f"{path} is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise CorruptDocument(f"{path} does not hold a document object")
    return doc


# ---------------------------------------------------------------------------
# session documents

def session_to_doc(state: SessionState) -> dict:
    doc = {
        "kind": "ared-session",
        "schema_version": SESSION_SCHEMA_VERSION,
        "config": config_to_doc(state.config),
        "archive": [_sample_to_doc(s) for s in state.archive],
        "v": state.v,
        "status": state.status.value,
        "consecutive_passes": state.consecutive_passes,
        "pending": None if state.pending is None else _sample_to_doc(state.pending),
        "pending_audit": None if state.pending_audit is None else {
            "coords": list(state.pending_audit.coords),
            "nearest_distance": state.pending_audit.nearest_distance,
            "threshold": state.pending_audit.threshold,
            "attempts": state.pending_audit.attempts,
        },
        "error_history": [_record_to_doc(r) for r in state.error_history],
        "model": None if state.model is None else svr.model_to_doc(state.model),
        "rng_state": state.rng.bit_generator.state,
    }
    return _with_digest(doc)


def session_from_doc(doc: dict) -> SessionState:
    _check_digest(doc)
    if doc.get("kind") != "ared-session":
        raise SchemaMismatch(f"not a session document: kind={doc.get('kind')!r}")
    if doc.get("schema_version") != SESSION_SCHEMA_VERSION:
        raise SchemaMismatch(
            f"unsupported session schema version {doc.get('schema_version')!r}"
        )
    config = config_from_doc(doc["config"])
    rng = np.random.default_rng()
    rng.bit_generator.state = doc["rng_state"]
    pending = doc["pending"]
    audit = doc["pending_audit"]
    state = SessionState(
        config=config,
        archive=[_sample_from_doc(d) for d in doc["archive"]],
        rng=rng,
        v=doc["v"],
        model=None if doc["model"] is None else svr.model_from_doc(doc["model"]),
        error_history=[_record_from_doc(d) for d in doc["error_history"]],
        pending=None if pending is None else _sample_from_doc(pending),
        pending_audit=None if audit is None else ConstrainedDraw(
            coords=tuple(audit["coords"]),
            nearest_distance=audit["nearest_distance"],
            threshold=audit["threshold"],
            attempts=audit["attempts"],
        ),
        consecutive_passes=doc["consecutive_passes"],
        status=SessionStatus(doc["status"]),
    )
    return state


def save_session(state: SessionState, path: str) -> None:
    _write_json(session_to_doc(state), path)


def load_session(path: str) -> SessionState:
    return session_from_doc(_read_json(path))


# ---------------------------------------------------------------------------
# model artifacts

def artifact_to_doc(artifact: dict) -> dict:
    doc = {
        "kind": "ared-model",
        "schema_version": MODEL_SCHEMA_VERSION,
        **artifact,
    }
    return _with_digest(doc)


def save_model_artifact(artifact: dict, path: str) -> None:
    _write_json(artifact_to_doc(artifact), path)


def load_model_artifact(path: str) -> dict:
    doc = _read_json(path)
    _check_digest(doc)
    if doc.get("kind") != "ared-model":
        raise SchemaMismatch(f"not a model artifact: kind={doc.get('kind')!r}")
    if doc.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise SchemaMismatch(
            f"unsupported model schema version {doc.get('schema_version')!r}"
        )
    return doc


def load_model(path: str) -> svr.SvrModel:
    return svr.model_from_doc(load_model_artifact(path)["model"])


# ---------------------------------------------------------------------------
# CSV exports

COMPARISON_HEADER = ["trial", "case_count", "source", "mae", "mape", "r"]


def export_comparison_csv(table: ComparisonTable, path: str) -> None:
    """Comparison rows as RFC-4180 CSV; a missing MAPE becomes an empty field."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(COMPARISON_HEADER)
            for row in table.rows:
                writer.writerow([
                    row.trial,
                    row.case_count,
                    row.source,
                    repr(row.mae),
                    "" if row.mape is None else repr(row.mape),
                    repr(row.r),
                ])
    except OSError as err:
        raise IoFailure(f"cannot write {path}: {err}") from err


def import_comparison_csv(path: str) -> list[dict]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = []
            for rec in reader:
                rows.append({
                    "trial": int(rec["trial"]),
                    "case_count": int(rec["case_count"]),
                    "source": rec["source"],
                    "mae": float(rec["mae"]),
                    "mape": float(rec["mape"]) if rec["mape"] != "" else None,
                    "r": float(rec["r"]),
                })
            return rows
    except OSError as err:
        raise IoFailure(f"cannot read {path}: {err}") from err


ARCHIVE_HEADER_PREFIX = ["sequence_index", "provenance"]


def export_archive_csv(archive: Sequence[Sample], domain: Domain, path: str) -> None:
    """Archive rows with one column per iv plus the dv and provenance."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ARCHIVE_HEADER_PREFIX
                + [r.name for r in domain.ivs]
                + [domain.dv_name]
            )
            for s in archive:
                writer.writerow(
                    [s.sequence_index, s.provenance.value]
                    + [repr(c) for c in s.coords]
                    + ["" if s.value is None else repr(s.value)]
                )
    except OSError as err:
        raise IoFailure(f"cannot write {path}: {err}") from err
