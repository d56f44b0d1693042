"""Finite atomic (possibly signed) measures on the closed unit ball.

Construction and validation against the solver's guarantee hypotheses,
pushforwards
through point maps, and quantization of densities into reproducible atom
lists.  Measures are immutable after construction; quantization is
deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import (
    DimensionMismatch,
    DomainError,
    EmptyMeasure,
    NonpositiveMass,
    RegionTouchesBoundary,
    ZeroTotal,
)
from .geometry import (
    BallPoint,
    Geodesic,
    geodesic_through,
    on_geodesic,
    one_minus_sq_norm,
    point,
)

CO_LOCATION_TOL = 1e-12
GEODESIC_MEMBER_TOL = 1e-10
REGION_MARGIN = 1e-6


class Support(Enum):
    COMPACT_INTERIOR = "compact_interior"
    TOUCHES_BOUNDARY = "touches_boundary"
    SPHERE_ONLY = "sphere_only"


class GeodesicSupport(Enum):
    NOT_IN_GEODESIC = "not_in_geodesic"
    IN_GEODESIC = "in_geodesic"
    IN_GEODESIC_CLOSURE = "in_geodesic_closure"


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finite list of (location, signed weight) atoms in one ambient dimension."""

    points: tuple[BallPoint, ...]
    weights: np.ndarray
    dimension: int

    def __post_init__(self) -> None:
        self.weights.flags.writeable = False

    @property
    def total(self) -> float:
        return float(math.fsum(self.weights))

    @property
    def abs_total(self) -> float:
        return float(math.fsum(abs(w) for w in self.weights))

    @property
    def signed(self) -> bool:
        return bool(np.any(self.weights < 0.0))

    @property
    def locations(self) -> np.ndarray:
        return np.stack([p.coords for p in self.points])

    @property
    def boundary_mask(self) -> np.ndarray:
        return np.array([p.is_boundary for p in self.points])

    def atoms(self) -> Iterable[tuple[BallPoint, float]]:
        return zip(self.points, self.weights)

    def __len__(self) -> int:
        return len(self.points)


def atomic_measure(
    atoms: Iterable[tuple[Sequence[float], float]],
    dimension: int | None = None,
) -> AtomicMeasure:
    """Build a measure from (coords, weight) pairs; snaps near-sphere atoms."""
    pts: list[BallPoint] = []
    ws: list[float] = []
    for coords, w in atoms:
        p = point(coords)
        if not math.isfinite(w):
            raise DomainError("atom weights must be finite")
        pts.append(p)
        ws.append(float(w))
    if not pts:
        raise EmptyMeasure("a measure needs at least one atom")
    dims = {p.dim for p in pts}
    if len(dims) != 1:
        raise DimensionMismatch(f"atoms span dimensions {sorted(dims)}")
    (n,) = dims
    if dimension is not None and dimension != n:
        raise DimensionMismatch(f"atoms have dimension {n}, expected {dimension}")
    return AtomicMeasure(tuple(pts), np.array(ws, dtype=float), n)


def delta(coords: Sequence[float], weight: float = 1.0) -> tuple[Sequence[float], float]:
    """Atom shorthand so measures read as sums of point masses."""
    return (coords, weight)


@dataclass(frozen=True, eq=False)
class ValidationReport:
    total: float
    abs_total: float
    support: Support
    max_radius: float
    boundary_pointmass_ok: bool
    geodesic_support: GeodesicSupport
    geodesic: Geodesic | None
    signed: bool


def _aggregate(measure: AtomicMeasure) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Merge atoms co-located within CO_LOCATION_TOL.

    Returns (locations, weights, is_boundary) of the aggregated atoms; the
    result is invariant under permutation and under splitting an atom into
    co-located halves.
    """
    locs = measure.locations
    ws = measure.weights
    bd = measure.boundary_mask
    m = len(ws)
    assigned = np.full(m, -1, dtype=int)
    reps: list[int] = []
    for i in range(m):
        if assigned[i] >= 0:
            continue
        close = np.linalg.norm(locs - locs[i], axis=1) <= CO_LOCATION_TOL
        close &= assigned < 0
        assigned[close] = len(reps)
        reps.append(i)
    k = len(reps)
    agg_w = np.zeros(k)
    for i in range(m):
        agg_w[assigned[i]] += ws[i]
    return locs[reps], agg_w, bd[reps]


def validate(measure: AtomicMeasure) -> ValidationReport:
    """Check the measure against the hypotheses the guarantees condition on."""
    total = measure.total
    abs_total = measure.abs_total
    signed = measure.signed
    if not signed and total <= 0.0:
        raise ZeroTotal("unsigned measure must have positive total mass")

    bd = measure.boundary_mask
    if np.all(bd):
        support = Support.SPHERE_ONLY
        max_radius = 1.0
    elif np.any(bd):
        support = Support.TOUCHES_BOUNDARY
        max_radius = 1.0
    else:
        support = Support.COMPACT_INTERIOR
        max_radius = max(p.r for p in measure.points)

    locs, agg_w, agg_bd = _aggregate(measure)
    pointmass_ok = all(
        w < 0.5 * total for w, isbd in zip(agg_w, agg_bd) if isbd
    )

    geodesic_support, geo = _geodesic_support(measure, locs, agg_bd)
    return ValidationReport(
        total=total,
        abs_total=abs_total,
        support=support,
        max_radius=max_radius,
        boundary_pointmass_ok=pointmass_ok,
        geodesic_support=geodesic_support,
        geodesic=geo,
        signed=signed,
    )


def _geodesic_support(
    measure: AtomicMeasure, locs: np.ndarray, bd: np.ndarray
) -> tuple[GeodesicSupport, Geodesic | None]:
    any_boundary = bool(np.any(bd))
    closure = (
        GeodesicSupport.IN_GEODESIC_CLOSURE
        if any_boundary
        else GeodesicSupport.IN_GEODESIC
    )
    if measure.dimension == 1:
        return closure, None
    if len(locs) == 1:
        anchor = locs[0] if np.linalg.norm(locs[0]) > 1e-12 else np.eye(
            measure.dimension
        )[0] * 0.5
        geo = geodesic_through(point(np.zeros(measure.dimension)), point(anchor))
        return closure, geo
    geo = geodesic_through(point(locs[0]), point(locs[1]))
    for z in locs[2:]:
        if not on_geodesic(geo, point(z), tol=GEODESIC_MEMBER_TOL):
            return GeodesicSupport.NOT_IN_GEODESIC, None
    return closure, geo


def pushforward(
    measure: AtomicMeasure, mapping: Callable[[BallPoint], BallPoint]
) -> AtomicMeasure:
    """Relocate atoms through a point map; weights and totals are untouched."""
    pts = tuple(mapping(p) for p in measure.points)
    for p in pts:
        if not isinstance(p, BallPoint):
            raise DomainError("pushforward maps must return ball points")
        if p.dim != measure.dimension:
            raise DimensionMismatch("pushforward map changed the dimension")
    return AtomicMeasure(pts, measure.weights.copy(), measure.dimension)


@dataclass(frozen=True, eq=False)
class BallRegion:
    """Euclidean ball compactly contained in the open unit ball."""

    center: np.ndarray
    radius: float

    @property
    def max_radius(self) -> float:
        return float(np.linalg.norm(self.center)) + self.radius

    def volume(self) -> float:
        n = self.center.shape[0]
        unit = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
        return unit * self.radius**n


def ball_region(center: Sequence[float], radius: float) -> BallRegion:
    c = np.array(center, dtype=float)
    if radius <= 0.0:
        raise DomainError("region radius must be positive")
    region = BallRegion(c, float(radius))
    if region.max_radius >= 1.0 - REGION_MARGIN:
        raise RegionTouchesBoundary(
            f"region reaches radius {region.max_radius}; must stay below "
            f"{1.0 - REGION_MARGIN}"
        )
    return region


def quantize_density(
    f: Callable[[np.ndarray], float],
    region: BallRegion,
    dimension: int,
    count: int,
    seed: int = 0,
) -> AtomicMeasure:
    """Quantize the hyperbolic-volume density f into ``count`` atoms.

    Samples low-discrepancy (scrambled Halton, seeded) points y_i of the
    region and assigns weights f(y_i) (1-|y_i|^2)^{-n} vol(region)/count, so
    the atom list approximates the measure f(y) dVol_hyp(y) reproducibly.
    """
    if region.center.shape[0] != dimension:
        raise DimensionMismatch("region and requested dimension differ")
    if count < 1:
        raise DomainError("count must be >= 1")
    sampler = qmc.Halton(d=dimension, scramble=True, seed=seed)
    lo = region.center - region.radius
    span = 2.0 * region.radius
    samples: list[np.ndarray] = []
    while len(samples) < count:
        block = sampler.random(max(64, count))
        for row in block:
            y = lo + span * row
            if np.linalg.norm(y - region.center) <= region.radius:
                samples.append(y)
                if len(samples) == count:
                    break
    vol = region.volume()
    atoms = []
    for y in samples:
        fy = float(f(y))
        if fy < 0.0:
            raise DomainError("density must be nonnegative on the region")
        w = fy * one_minus_sq_norm(y) ** (-dimension) * vol / count
        atoms.append((y, w))
    measure = atomic_measure(atoms, dimension)
    if measure.abs_total <= 0.0:
        raise NonpositiveMass("density vanished at every sample point")
    return measure
