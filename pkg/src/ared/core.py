"""Domain types shared by every other module: variable ranges, samples,
session configuration, and coordinate normalization.

All inter-point distances elsewhere in the package are computed in the
normalized unit cube [0,1]^n produced by :func:`normalize`, so constraint
parameters stay unit-free. The dependent variable never participates in
distance computations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateRange, EmptyDomain, OutOfDomain


class Provenance(str, Enum):
    """How a sample entered the archive."""

    INITIAL = "initial"
    DRAWN = "drawn"
    FEEDBACK = "feedback"


@dataclass(frozen=True)
class VariableRange:
    """Closed value range of one independent variable, in engineering units."""

    name: str
    low: float
    high: float

    def length(self) -> float:
        return self.high - self.low


@dataclass(frozen=True)
class Domain:
    """Ordered independent-variable ranges plus the dependent-variable name.

    The dimension n used for distances and diagonals is the number of
    independent variables; the dependent variable is bookkept separately.
    """

    ivs: tuple[VariableRange, ...]
    dv_name: str

    def __init__(self, ivs: Iterable[VariableRange], dv_name: str):
        object.__setattr__(self, "ivs", tuple(ivs))
        object.__setattr__(self, "dv_name", dv_name)

    @property
    def n(self) -> int:
        return len(self.ivs)

    def diagonal(self) -> float:
        """Length of the unit-hypercube diagonal after normalization: sqrt(n)."""
        return math.sqrt(self.n)

    def lows(self) -> np.ndarray:
        return np.array([r.low for r in self.ivs], dtype=float)

    def highs(self) -> np.ndarray:
        return np.array([r.high for r in self.ivs], dtype=float)

    def contains(self, coords: Sequence[float]) -> bool:
        c = np.asarray(coords, dtype=float)
        if c.shape != (self.n,):
            return False
        return bool(np.all(c >= self.lows()) and np.all(c <= self.highs()))


def validate_domain(domain: Domain) -> Domain:
    """Check every range invariant; return the domain unchanged if valid."""
    if len(domain.ivs) == 0:
        raise EmptyDomain("domain must have at least one independent variable")
    for r in domain.ivs:
        if not (math.isfinite(r.low) and math.isfinite(r.high)):
            raise DegenerateRange(f"range {r.name!r} has non-finite bounds")
        if not r.high > r.low:
            raise DegenerateRange(
                f"range {r.name!r} has high={r.high} <= low={r.low}"
            )
    return domain


def normalize(domain: Domain, coords: Sequence[float]) -> np.ndarray:
    """Map engineering-unit coordinates onto the unit cube [0,1]^n."""
    c = np.asarray(coords, dtype=float)
    if c.shape != (domain.n,):
        raise OutOfDomain(f"expected {domain.n} coordinates, got shape {c.shape}")
    lows, highs = domain.lows(), domain.highs()
    if np.any(c < lows) or np.any(c > highs):
        raise OutOfDomain(f"coordinates {c.tolist()} outside domain box")
    return (c - lows) / (highs - lows)


def denormalize(domain: Domain, unit: Sequence[float]) -> np.ndarray:
    """Inverse of :func:`normalize`."""
    u = np.asarray(unit, dtype=float)
    lows, highs = domain.lows(), domain.highs()
    return lows + u * (highs - lows)


@dataclass(frozen=True)
class Sample:
    """One experimental point: iv coordinates plus an optional measured dv."""

    coords: tuple[float, ...]
    value: Optional[float]
    provenance: Provenance
    sequence_index: int

    def __init__(
        self,
        coords: Sequence[float],
        value: Optional[float],
        provenance: Provenance,
        sequence_index: int,
    ):
        object.__setattr__(self, "coords", tuple(float(c) for c in coords))
        object.__setattr__(
            self, "value", None if value is None else float(value)
        )
        object.__setattr__(self, "provenance", Provenance(provenance))
        object.__setattr__(self, "sequence_index", int(sequence_index))

    @property
    def measured(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class ConstraintParams:
    """Coefficients of the decreasing spacing control function p*v + q."""

    p: float
    q: float

    def __post_init__(self):
        if not self.p >= 0:
            raise ValueError(f"p must be >= 0, got {self.p}")
        if not self.q > 0:
            raise ValueError(f"q must be > 0, got {self.q}")


@dataclass(frozen=True)
class FeedbackPolicy:
    """Three-way trigger for switching into error-feedback sampling.

    ``dimension`` is the bookkeeping dimension n used in the archive-size
    gate (> n^2 + 1); by default it counts the dv alongside the ivs, so a
    one-iv session has dimension 2. ``ape_threshold`` is in percent;
    ``range_fraction`` is the share of the observed dv range an absolute
    error must exceed.
    """

    dimension: int
    ape_threshold: float = 10.0
    range_fraction: float = 0.10
    abse_only_trigger: bool = False

    def __post_init__(self):
        if not self.ape_threshold > 0:
            raise ValueError("ape_threshold must be > 0")
        if not 0 < self.range_fraction < 1:
            raise ValueError("range_fraction must be in (0, 1)")

    def min_archive_size(self) -> int:
        """Smallest archive size at which the trigger becomes eligible."""
        return self.dimension**2 + 2


# Empirical spacing coefficients by iv count (exploratory and feedback
# regimes).  No values exist beyond two ivs; those domains reuse the two-iv
# pair and emit a warning so the caller knows to override.  The two-iv
# feedback pair keeps q > p like every other pair; swapping it to (7, 0.5)
# collapses the spacing threshold after a handful of cases, so anyone who
# really wants that behavior must pass explicit ConstraintParams.
_EXPLORATORY_PARAMS = {1: ConstraintParams(0.7, 10.0), 2: ConstraintParams(0.4, 5.0)}
_FEEDBACK_PARAMS = {1: ConstraintParams(1.5, 15.0), 2: ConstraintParams(0.5, 7.0)}


def default_draw_params(n_ivs: int) -> ConstraintParams:
    if n_ivs in _EXPLORATORY_PARAMS:
        return _EXPLORATORY_PARAMS[n_ivs]
    warnings.warn(
        f"no calibrated exploratory spacing parameters for {n_ivs} ivs; "
        "reusing the two-iv defaults -- override them explicitly",
        stacklevel=2,
    )
    return _EXPLORATORY_PARAMS[2]


def default_feedback_params(n_ivs: int) -> ConstraintParams:
    if n_ivs in _FEEDBACK_PARAMS:
        return _FEEDBACK_PARAMS[n_ivs]
    warnings.warn(
        f"no calibrated feedback spacing parameters for {n_ivs} ivs; "
        "reusing the two-iv defaults -- override them explicitly",
        stacklevel=2,
    )
    return _FEEDBACK_PARAMS[2]


@dataclass(frozen=True)
class SvrConfig:
    """Hyperparameter search and solver settings for the SVR surrogate.

    The C/gamma grid is logarithmic: base-10 exponents from
    ``grid_log10_min`` to ``grid_log10_max`` in steps of ``grid_log10_step``
    (45 values per axis with the defaults). ``epsilon_fraction`` sizes the
    insensitive tube as a fraction of the observed dv range.  CV solves run
    under a looser tolerance/cap than the final fit; ``coarse_to_fine``
    replaces the full grid with a two-stage search (step 2.0, then 0.5
    around the winner).
    """

    grid_log10_min: float = -11.0
    grid_log10_max: float = 11.0
    grid_log10_step: float = 0.5
    cv_folds: int = 5
    epsilon_fraction: float = 0.01
    solver_tolerance: float = 1e-6
    max_solver_passes: int = 500_000
    cv_solver_tolerance: float = 1e-3
    cv_solver_passes: int = 3_000
    coarse_to_fine: bool = False

    def __post_init__(self):
        if not self.grid_log10_min < self.grid_log10_max:
            raise ValueError("grid_log10_min must be < grid_log10_max")
        if not self.grid_log10_step > 0:
            raise ValueError("grid_log10_step must be > 0")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")

    def grid_exponents(self) -> np.ndarray:
        steps = round((self.grid_log10_max - self.grid_log10_min) / self.grid_log10_step)
        return self.grid_log10_min + self.grid_log10_step * np.arange(steps + 1)


@dataclass(frozen=True)
class SessionConfig:
    """Everything that determines a session's behavior besides the measured
    values themselves: domain, spacing parameters for both regimes, the
    feedback trigger policy, surrogate settings, the stopping run length,
    and the RNG seed."""

    domain: Domain
    draw_params: ConstraintParams
    feedback_params: ConstraintParams
    feedback_policy: FeedbackPolicy
    svr_config: SvrConfig
    stopping_run_length: int
    rng_seed: int
    max_draw_attempts: int = 10_000
    case_budget: int = 200
    # Distance-scale overrides; None means the normalized diagonal sqrt(n).
    exploratory_length_scale: Optional[float] = None
    feedback_length_scale: Optional[float] = None

    def __post_init__(self):
        if self.stopping_run_length < 1:
            raise ValueError("stopping_run_length must be >= 1")
        if self.max_draw_attempts < 1:
            raise ValueError("max_draw_attempts must be >= 1")

    @classmethod
    def for_domain(cls, domain: Domain, rng_seed: int, **overrides) -> "SessionConfig":
        """Build a config with dimension-derived defaults for a domain.

        Defaults: spacing parameters by iv count, trigger dimension
        n = ivs + 1, stopping run length n + 1, ape threshold 10%, range
        fraction 10%.
        """
        validate_domain(domain)
        dimension = domain.n + 1
        defaults = dict(
            domain=domain,
            draw_params=default_draw_params(domain.n),
            feedback_params=default_feedback_params(domain.n),
            feedback_policy=FeedbackPolicy(dimension=dimension),
            svr_config=SvrConfig(),
            stopping_run_length=dimension + 1,
            rng_seed=int(rng_seed),
        )
        defaults.update(overrides)
        return cls(**defaults)

    def with_overrides(self, **overrides) -> "SessionConfig":
        return replace(self, **overrides)
