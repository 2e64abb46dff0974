"""Epsilon-insensitive support vector regression with an RBF kernel.

Training always happens in scaled space: iv coordinates are normalized to
the unit cube and the dv is standardized to zero mean and unit scale, so
hyperparameters transfer across unit systems. Hyperparameters come from an
exhaustive logarithmic grid search scored by K-fold cross-validation MAE;
"incremental" retraining is a full refit in which the previous winner only
breaks exact CV ties.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _smo
from .core import Domain, Sample, SvrConfig, normalize
from .errors import InsufficientData, SolverDiverged


@dataclass(frozen=True)
class SvrHyperparams:
    """Penalty C, kernel width gamma, and tube half-width epsilon.

    epsilon is expressed in scaled (standardized) dv units.
    """

    C: float
    gamma: float
    epsilon: float

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be > 0")
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")


@dataclass(frozen=True)
class DualSolution:
    """Raw solver output in scaled space."""

    theta: np.ndarray
    bias: float
    gap: float
    iterations: int
    converged: bool
    objective: float


@dataclass(frozen=True)
class SvrModel:
    """A trained surrogate: support coefficients over normalized inputs plus
    the scaling transforms needed to answer in engineering units."""

    domain: Domain
    x_norm: np.ndarray
    coef: np.ndarray
    bias: float
    hyperparams: SvrHyperparams
    dv_mean: float
    dv_scale: float
    fingerprint: str
    kkt_gap: float
    iterations: int


def rbf_kernel(x: Sequence[float], y: Sequence[float], gamma: float) -> float:
    """exp(-gamma * ||x - y||^2) for one pair of (normalized) points."""
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.shape != yv.shape:
        raise ValueError(f"dimension mismatch: {xv.shape} vs {yv.shape}")
    return float(np.exp(-gamma * float(np.sum((xv - yv) ** 2))))


def solve_dual(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    epsilon: float,
    tol: float = 1e-6,
    max_iter: int = 500_000,
) -> DualSolution:
    """Run the SMO solver on an explicit kernel matrix and target vector."""
    K = np.ascontiguousarray(K, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    theta, bias, gap, iters, conv, obj = _smo.smo_solve(
        K, y, float(C), float(epsilon), float(tol), int(max_iter)
    )
    return DualSolution(theta, float(bias), float(gap), int(iters), bool(conv), float(obj))


def training_fingerprint(samples: Sequence[Sample]) -> str:
    payload = [[list(s.coords), s.value] for s in samples]
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _training_arrays(samples: Sequence[Sample], domain: Domain):
    if len(samples) < 2:
        raise InsufficientData(f"need >= 2 measured samples, got {len(samples)}")
    for s in samples:
        if not s.measured:
            raise InsufficientData("every training sample needs a measured value")
    X = np.array([normalize(domain, s.coords) for s in samples])
    y = np.array([s.value for s in samples], dtype=float)
    mean = float(np.mean(y))
    std = float(np.std(y))
    scale = std if std > 0.0 else 1.0
    return X, (y - mean) / scale, mean, scale


def scaled_epsilon(samples: Sequence[Sample], domain: Domain, fraction: float) -> float:
    """Tube half-width: a fraction of the observed dv range, in scaled units."""
    _, ys, _, _ = _training_arrays(samples, domain)
    return fraction * float(ys.max() - ys.min())


def train(
    samples: Sequence[Sample],
    hp: SvrHyperparams,
    domain: Domain,
    tol: float = 1e-6,
    max_iter: int = 500_000,
) -> SvrModel:
    """Fit the dual problem at fixed hyperparameters.

    Raises SolverDiverged if the KKT gap does not reach ``tol`` within
    ``max_iter`` pair optimizations.
    """
    X, ys, mean, scale, = _training_arrays(samples, domain)
    K = _smo.rbf_matrix(X, X, hp.gamma)
    sol = solve_dual(K, ys, hp.C, hp.epsilon, tol, max_iter)
    if not sol.converged:
        raise SolverDiverged(
            f"KKT gap {sol.gap:.3e} > {tol:.1e} after {sol.iterations} iterations "
            f"(C={hp.C:.3g}, gamma={hp.gamma:.3g})"
        )
    return SvrModel(
        domain=domain,
        x_norm=X,
        coef=sol.theta,
        bias=sol.bias,
        hyperparams=hp,
        dv_mean=mean,
        dv_scale=scale,
        fingerprint=training_fingerprint(samples),
        kkt_gap=sol.gap,
        iterations=sol.iterations,
    )


def _query_matrix(model: SvrModel, coords_rows: np.ndarray) -> np.ndarray:
    lows = model.domain.lows()
    highs = model.domain.highs()
    return (np.atleast_2d(np.asarray(coords_rows, dtype=float)) - lows) / (highs - lows)


def predict_batch(model: SvrModel, coords_rows: np.ndarray) -> np.ndarray:
    """Predict dv values (engineering units) for a matrix of coordinate rows."""
    U = np.ascontiguousarray(_query_matrix(model, coords_rows))
    dec = _smo.rbf_decision(
        model.x_norm, model.coef, model.bias, model.hyperparams.gamma, U
    )
    return dec * model.dv_scale + model.dv_mean


def predict(model: SvrModel, coords: Sequence[float]) -> float:
    """Predict one dv value; warns when extrapolating outside the domain."""
    U = _query_matrix(model, np.asarray(coords, dtype=float))
    if np.any(U < 0.0) or np.any(U > 1.0):
        warnings.warn(
            f"predicting outside the training domain at {list(coords)} (extrapolating)",
            stacklevel=2,
        )
    dec = _smo.rbf_decision(
        model.x_norm, model.coef, model.bias, model.hyperparams.gamma,
        np.ascontiguousarray(U),
    )
    return float(dec[0] * model.dv_scale + model.dv_mean)


def _fold_assignment(m: int, k: int, rng: np.random.Generator) -> np.ndarray:
    perm = rng.permutation(m)
    fold_ids = np.empty(m, dtype=np.int64)
    for pos, idx in enumerate(perm):
        fold_ids[idx] = pos % k
    return fold_ids


def _scan(X, ys, eps, c_exponents, g_exponents, fold_ids, n_folds, config: SvrConfig):
    Cs = np.ascontiguousarray(10.0 ** np.asarray(c_exponents, dtype=float))
    gammas = 10.0 ** np.asarray(g_exponents, dtype=float)
    diff = X[:, None, :] - X[None, :, :]
    D2 = np.sum(diff * diff, axis=2)
    K_all = np.ascontiguousarray(np.exp(-gammas[:, None, None] * D2[None, :, :]))
    mae, conv = _smo.grid_cv_scan(
        K_all,
        np.ascontiguousarray(ys),
        Cs,
        float(eps),
        np.ascontiguousarray(fold_ids),
        int(n_folds),
        float(config.cv_solver_tolerance),
        int(config.cv_solver_passes),
    )
    return mae, conv, Cs, gammas


# CV scores inside a flat near-tie plateau differ only by float noise; treat
# them as equal so the smaller-C preference actually selects simpler models.
_TIE_RTOL = 1e-9


def _ranked_cells(mae, Cs, gammas):
    """All (C, gamma, mae) cells ordered by score, then smaller C, then gamma."""
    cells = [
        (mae[g, c], Cs[c], gammas[g])
        for g in range(len(gammas))
        for c in range(len(Cs))
    ]
    cells.sort(key=lambda t: (t[0], t[1], t[2]))
    return cells


def _select(mae, Cs, gammas, prefer: Optional[tuple[float, float]]):
    cells = _ranked_cells(mae, Cs, gammas)
    best = cells[0][0]
    cutoff = best + _TIE_RTOL * abs(best)
    tied = [(C, g) for score, C, g in cells if score <= cutoff]
    if prefer is not None and prefer in tied:
        return prefer
    return min(tied)


def grid_search(
    samples: Sequence[Sample],
    domain: Domain,
    config: SvrConfig,
    rng: np.random.Generator,
    prefer: Optional[SvrHyperparams] = None,
) -> SvrHyperparams:
    """Pick (C, gamma) by exhaustive grid CV; epsilon comes from the dv range.

    Folds are drawn once from ``rng`` (leave-one-out when there are fewer
    samples than folds). Exact CV-score ties resolve to ``prefer`` when
    given, else to the smaller C, then the smaller gamma.
    """
    X, ys, _, _ = _training_arrays(samples, domain)
    m = len(samples)
    eps = config.epsilon_fraction * float(ys.max() - ys.min())
    k = min(config.cv_folds, m)
    fold_ids = _fold_assignment(m, k, rng)
    prefer_pair = None if prefer is None else (prefer.C, prefer.gamma)

    exps = config.grid_exponents()
    if not config.coarse_to_fine:
        mae, _, Cs, gammas = _scan(X, ys, eps, exps, exps, fold_ids, k, config)
        C, gamma = _select(mae, Cs, gammas, prefer_pair)
        return SvrHyperparams(C=C, gamma=gamma, epsilon=eps)

    # two-stage: coarse pass at exponent step 2, refine +/-2 around the winner
    coarse = np.arange(config.grid_log10_min, config.grid_log10_max + 1e-9, 2.0)
    mae, _, Cs, gammas = _scan(X, ys, eps, coarse, coarse, fold_ids, k, config)
    C0, g0 = _select(mae, Cs, gammas, prefer_pair)
    ec, eg = np.log10(C0), np.log10(g0)

    def refine(center):
        lo = max(config.grid_log10_min, center - 2.0)
        hi = min(config.grid_log10_max, center + 2.0)
        n = round((hi - lo) / config.grid_log10_step)
        return lo + config.grid_log10_step * np.arange(n + 1)

    mae, _, Cs, gammas = _scan(X, ys, eps, refine(ec), refine(eg), fold_ids, k, config)
    C, gamma = _select(mae, Cs, gammas, prefer_pair)
    return SvrHyperparams(C=C, gamma=gamma, epsilon=eps)


def refit(
    previous: Optional[SvrModel],
    samples: Sequence[Sample],
    domain: Domain,
    config: SvrConfig,
    rng: np.random.Generator,
) -> SvrModel:
    """Grid search plus final fit on the full sample set.

    The previous model's hyperparameters win exact CV ties. If the CV
    winner fails to converge at the strict final tolerance, the next-ranked
    cells are tried (the selection stays deterministic); only if several
    fall over is SolverDiverged propagated.
    """
    X, ys, _, _ = _training_arrays(samples, domain)
    m = len(samples)
    eps = config.epsilon_fraction * float(ys.max() - ys.min())
    k = min(config.cv_folds, m)
    fold_ids = _fold_assignment(m, k, rng)
    prefer_pair = None if previous is None else (
        previous.hyperparams.C,
        previous.hyperparams.gamma,
    )

    exps = config.grid_exponents()
    mae, _, Cs, gammas = _scan(X, ys, eps, exps, exps, fold_ids, k, config)
    C, gamma = _select(mae, Cs, gammas, prefer_pair)

    candidates = [(C, gamma)]
    for _, cc, gg in _ranked_cells(mae, Cs, gammas):
        if (cc, gg) != (C, gamma):
            candidates.append((cc, gg))
    # divergence is driven by large C on ill-conditioned kernels, so after a
    # failure only smaller-C candidates are worth trying
    c_ceiling = math.inf
    attempts = 0
    last_err: Optional[SolverDiverged] = None
    for cc, gg in candidates:
        if cc >= c_ceiling:
            continue
        attempts += 1
        if attempts > 12:
            break
        hp = SvrHyperparams(C=cc, gamma=gg, epsilon=eps)
        try:
            return train(
                samples, hp, domain,
                tol=config.solver_tolerance,
                max_iter=config.max_solver_passes,
            )
        except SolverDiverged as err:
            warnings.warn(
                f"final fit diverged at C={cc:.3g}, gamma={gg:.3g}; "
                "falling back to the best smaller-C candidate",
                stacklevel=2,
            )
            last_err = err
            c_ceiling = cc
    raise last_err  # pragma: no cover - needs a run of pathological cells


def model_to_doc(model: SvrModel) -> dict:
    """Self-describing document reproducing predict() exactly on reload."""
    return {
        "domain": {
            "ivs": [
                {"name": r.name, "low": r.low, "high": r.high}
                for r in model.domain.ivs
            ],
            "dv_name": model.domain.dv_name,
        },
        "support_coords_normalized": [[float(v) for v in row] for row in model.x_norm],
        "coefficients": [float(v) for v in model.coef],
        "bias": model.bias,
        "C": model.hyperparams.C,
        "gamma": model.hyperparams.gamma,
        "epsilon": model.hyperparams.epsilon,
        "dv_mean": model.dv_mean,
        "dv_scale": model.dv_scale,
        "fingerprint": model.fingerprint,
        "kkt_gap": model.kkt_gap,
        "iterations": model.iterations,
    }


def model_from_doc(doc: dict) -> SvrModel:
    from .core import VariableRange

    domain = Domain(
        ivs=[VariableRange(r["name"], r["low"], r["high"]) for r in doc["domain"]["ivs"]],
        dv_name=doc["domain"]["dv_name"],
    )
    return SvrModel(
        domain=domain,
        x_norm=np.array(doc["support_coords_normalized"], dtype=float).reshape(
            len(doc["coefficients"]), domain.n
        ),
        coef=np.array(doc["coefficients"], dtype=float),
        bias=float(doc["bias"]),
        hyperparams=SvrHyperparams(doc["C"], doc["gamma"], doc["epsilon"]),
        dv_mean=float(doc["dv_mean"]),
        dv_scale=float(doc["dv_scale"]),
        fingerprint=doc["fingerprint"],
        kkt_gap=float(doc["kkt_gap"]),
        iterations=int(doc["iterations"]),
    )
