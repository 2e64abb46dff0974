"""Candidate draws from truncated normal distributions under a minimum
nearest-neighbor distance constraint.

Two regimes share the same machinery: exploratory draws centered on the
domain midpoint with mu +/- 2*sigma spanning each full iv range, and
feedback draws centered on the worst-error case with sigma equal to 10% of
each iv length (so the clipped mu +/- 2*sigma box covers 40% of each axis).
A candidate is accepted once its normalized distance to the nearest
archived point strictly exceeds L / (p*v + q), where L defaults to the
normalized diagonal sqrt(n) and v counts previously selected cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import ConstraintParams, Domain, Sample, normalize
from .errors import DrawExhausted, EmptyArchive, OutOfDomain

FEEDBACK_SIGMA_FRACTION = 0.10


@dataclass(frozen=True)
class NormalDrawSpec:
    """Per-axis normal parameters plus the clipped mu +/- 2*sigma intervals.

    All values are in engineering units; truncation intervals are already
    intersected with the iv ranges, so accepted draws are always in-domain.
    """

    mu: tuple[float, ...]
    sigma: tuple[float, ...]
    truncation: tuple[tuple[float, float], ...]

    def __post_init__(self):
        for s in self.sigma:
            if not s > 0:
                raise ValueError(f"sigma must be > 0, got {s}")
        for lo, hi in self.truncation:
            if not hi >= lo:
                raise ValueError(f"empty truncation interval [{lo}, {hi}]")


@dataclass(frozen=True)
class FeedbackCenter:
    """Coordinates of the worst-error case and the error that selected it."""

    coords: tuple[float, ...]
    triggering_ape: float

    def __init__(self, coords: Sequence[float], triggering_ape: float):
        object.__setattr__(self, "coords", tuple(float(c) for c in coords))
        object.__setattr__(self, "triggering_ape", float(triggering_ape))


@dataclass(frozen=True)
class ConstrainedDraw:
    """An accepted candidate plus the audit trail of its acceptance."""

    coords: tuple[float, ...]
    nearest_distance: float
    threshold: float
    attempts: int


def exploratory_spec(domain: Domain) -> NormalDrawSpec:
    """Center each axis on its midpoint with mu +/- 2*sigma = the full range."""
    mu, sigma, trunc = [], [], []
    for r in domain.ivs:
        m = (r.low + r.high) / 2.0
        s = r.length() / 4.0
        mu.append(m)
        sigma.append(s)
        trunc.append((r.low, r.high))
    return NormalDrawSpec(tuple(mu), tuple(sigma), tuple(trunc))


def feedback_spec(domain: Domain, center: FeedbackCenter) -> NormalDrawSpec:
    """Center each axis on the feedback case with sigma = 10% of the range."""
    if not domain.contains(center.coords):
        raise OutOfDomain(f"feedback center {center.coords} outside domain")
    mu, sigma, trunc = [], [], []
    for r, c in zip(domain.ivs, center.coords):
        s = FEEDBACK_SIGMA_FRACTION * r.length()
        lo = max(r.low, c - 2.0 * s)
        hi = min(r.high, c + 2.0 * s)
        mu.append(c)
        sigma.append(s)
        trunc.append((lo, hi))
    return NormalDrawSpec(tuple(mu), tuple(sigma), tuple(trunc))


def draw_point(
    spec: NormalDrawSpec, rng: np.random.Generator, max_attempts: int = 10_000
) -> np.ndarray:
    """Draw one point, each coordinate by normal rejection sampling.

    Re-draws a coordinate until it lands inside its truncation interval;
    raises DrawExhausted after ``max_attempts`` rejections on one axis.
    """
    coords = np.empty(len(spec.mu))
    for i, (m, s, (lo, hi)) in enumerate(zip(spec.mu, spec.sigma, spec.truncation)):
        for _ in range(max_attempts):
            x = rng.normal(m, s)
            if lo <= x <= hi:
                coords[i] = x
                break
        else:
            raise DrawExhausted(
                f"no draw inside [{lo}, {hi}] after {max_attempts} attempts "
                f"(mu={m}, sigma={s})"
            )
    return coords


def constraint_threshold(L: float, v: int, params: ConstraintParams) -> float:
    """Minimum-spacing threshold L / (p*v + q); decreasing in v for p > 0."""
    if v < 0:
        raise ValueError(f"v must be >= 0, got {v}")
    return L / (params.p * v + params.q)


ArchiveLike = Sequence[Union[Sample, Sequence[float]]]


def _archive_matrix(archive: ArchiveLike, domain: Domain) -> np.ndarray:
    rows = []
    for entry in archive:
        coords = entry.coords if isinstance(entry, Sample) else entry
        rows.append(normalize(domain, coords))
    return np.asarray(rows)


def min_distance(candidate: Sequence[float], archive: ArchiveLike, domain: Domain) -> float:
    """Normalized Euclidean distance from candidate to its nearest neighbor."""
    if len(archive) == 0:
        raise EmptyArchive("distance to an empty archive is undefined")
    c = normalize(domain, candidate)
    pts = _archive_matrix(archive, domain)
    return float(np.min(np.sqrt(np.sum((pts - c) ** 2, axis=1))))


def draw_constrained(
    spec: NormalDrawSpec,
    archive: ArchiveLike,
    v: int,
    params: ConstraintParams,
    domain: Domain,
    rng: np.random.Generator,
    max_attempts: int = 10_000,
    length_scale: Optional[float] = None,
) -> ConstrainedDraw:
    """Draw until a candidate strictly clears the spacing threshold.

    ``length_scale`` overrides L; by default it is the normalized diagonal
    sqrt(n). The archive must already contain the initial samples; proposed
    but unmeasured samples count as neighbors too.
    """
    if len(archive) == 0:
        raise EmptyArchive("constrained draws need a non-empty archive")
    L = domain.diagonal() if length_scale is None else float(length_scale)
    threshold = constraint_threshold(L, v, params)
    pts = _archive_matrix(archive, domain)
    for attempt in range(1, max_attempts + 1):
        candidate = draw_point(spec, rng, max_attempts)
        c = normalize(domain, candidate)
        d = float(np.min(np.sqrt(np.sum((pts - c) ** 2, axis=1))))
        if d > threshold:
            return ConstrainedDraw(
                coords=tuple(float(x) for x in candidate),
                nearest_distance=d,
                threshold=threshold,
                attempts=attempt,
            )
    raise DrawExhausted(
        f"no candidate cleared spacing threshold {threshold:.6g} "
        f"after {max_attempts} attempts (v={v}, p={params.p}, q={params.q})"
    )
