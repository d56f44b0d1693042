"""Independent brute-force verification of the library's analytic claims.

Everything here recomputes what it checks from geometry and weight primitives:
finite differences of an atomwise energy (never the gradient code), grid scans
with bisection for zeros of the field, second-difference convexity scans, the
sphere-kernel cocycle identity, and the boundary-continuity limit.  Scans are
deterministic given their seed, which every report records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .energy import (
    EnergyContext,
    energy_context,
    field_V,
    kernel_K,
    renormalized_energy,
)
from .errors import DomainError
from .geometry import (
    BallPoint,
    Locus,
    geodesic,
    geodesic_point,
    mobius,
    one_minus_sq_norm,
    point,
)
from .measures import atomic_measure
from .weights import RadialWeight, eval_G, identity, normalized_for_boundary


@dataclass(frozen=True)
class OracleTolerances:
    """Single source of truth for every scan's pass thresholds."""

    gradient_step: float = 1e-6
    gradient_rel: float = 1e-5
    cocycle_abs: float = 1e-11
    convexity_step: float = 1e-3
    convexity_floor: float = -1e-8
    convexity_strict: float = 1e-8
    # floor for sphere-kernel convexity along geodesics whose endpoints stay
    # at least 0.1 away from the atom's antipode
    away_strict: float = 1e-6
    linear_abs: float = 1e-8
    continuity_final_gap: float = 1e-6
    distance_line_abs: float = 1e-9
    arc_closed_form_rel: float = 1e-4
    zero_grid_span: float = 6.0
    zero_bisect_tol: float = 1e-12
    zero_flat_tol: float = 1e-13
    refine_tol: float = 1e-10


TOL = OracleTolerances()


class ScanKind(Enum):
    GRADIENT_CHECK = "gradient_check"
    CONVEXITY_SCAN = "convexity_scan"
    COCYCLE_CHECK = "cocycle_check"
    CONTINUITY_CHECK = "continuity_check"
    ZERO_SET_1D = "zero_set_1d"
    ZERO_SET_2D = "zero_set_2d"
    DISTANCE_CONVEXITY = "distance_convexity"


@dataclass(frozen=True)
class ScanReport:
    kind: ScanKind
    worst_case: float
    samples: int
    passed: bool
    tolerance: float
    seed: int | None = None
    details: tuple[str, ...] = field(default=(), repr=False)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "worst_case": self.worst_case,
            "samples": self.samples,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "details": list(self.details),
        }


def _random_interior(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    v = rng.normal(size=n)
    v /= np.linalg.norm(v)
    return v * radius * rng.uniform() ** (1.0 / n)


def _atomwise_energy(ctx: EnergyContext, x: np.ndarray) -> float:
    """Renormalized energy recomputed from geometry + weight primitives only."""
    omx = one_minus_sq_norm(x)
    xp = BallPoint(np.array(x, dtype=float), Locus.INTERIOR)
    terms = []
    for p, w in ctx.measure.atoms():
        if p.is_boundary:
            diff = x + p.coords
            val = 0.5 * math.log(float(diff @ diff) / omx)
        else:
            img = mobius(xp, p)
            val = eval_G(ctx.weight, img.r) - eval_G(ctx.weight, p.r)
        terms.append(float(w) * val)
    return math.fsum(terms)


def gradient_check(
    ctx: EnergyContext, samples: int = 1000, seed: int = 0, tol: OracleTolerances = TOL
) -> ScanReport:
    """Finite differences of the atomwise energy against energy_gradient."""
    rng = np.random.default_rng(seed)
    h = tol.gradient_step
    worst = 0.0
    worst_at = np.zeros(ctx.dimension)
    for _ in range(samples):
        x = _random_interior(rng, ctx.dimension, 0.95 - 2 * h)
        grad = field_V(ctx, x) / one_minus_sq_norm(x)
        fd = np.empty_like(grad)
        for j in range(ctx.dimension):
            e = np.zeros(ctx.dimension)
            e[j] = h
            fd[j] = (_atomwise_energy(ctx, x + e) - _atomwise_energy(ctx, x - e)) / (
                2.0 * h
            )
        rel = float(np.linalg.norm(fd - grad)) / max(float(np.linalg.norm(grad)), 1e-8)
        if rel > worst:
            worst, worst_at = rel, x
    return ScanReport(
        kind=ScanKind.GRADIENT_CHECK,
        worst_case=worst,
        samples=samples,
        passed=worst < tol.gradient_rel,
        tolerance=tol.gradient_rel,
        seed=seed,
        details=(f"worst at x={worst_at.tolist()}",),
    )


def convexity_scan(
    ctx: EnergyContext,
    geodesics: int = 20,
    steps: int = 15,
    seed: int = 0,
    tol: OracleTolerances = TOL,
) -> ScanReport:
    """Second differences of the energy in arclength along random geodesics.

    Pass requires every second difference >= the convexity floor; the report
    also records whether strictness held (minimum above the strict margin).
    """
    rng = np.random.default_rng(seed)
    h = tol.convexity_step
    lowest = math.inf
    count = 0
    for _ in range(geodesics):
        base = _random_interior(rng, ctx.dimension, 0.7)
        d = rng.normal(size=ctx.dimension)
        g = geodesic(point(base), d)
        for tau in np.linspace(-1.2, 1.2, steps):
            vals = [
                renormalized_energy(ctx, geodesic_point(g, math.tanh(tau + k * h)).coords)
                for k in (-1, 0, 1)
            ]
            second = (vals[0] - 2.0 * vals[1] + vals[2]) / h**2
            lowest = min(lowest, second)
            count += 1
    strict = lowest > tol.convexity_strict
    return ScanReport(
        kind=ScanKind.CONVEXITY_SCAN,
        worst_case=lowest,
        samples=count,
        passed=lowest >= tol.convexity_floor,
        tolerance=tol.convexity_floor,
        seed=seed,
        details=(f"strict={strict}",),
    )


def kernel_linearity_check(
    ctx: EnergyContext, samples: int = 50, seed: int = 0, tol: OracleTolerances = TOL
) -> ScanReport:
    """Sphere-kernel second differences along geodesics aimed at the antipode.

    Along the geodesic through x with chart direction T_x(y) the kernel is
    linear in arclength; every other direction is strictly convex.
    """
    rng = np.random.default_rng(seed)
    h = tol.convexity_step
    worst_linear = 0.0
    lowest_generic = math.inf
    for _ in range(samples):
        x = _random_interior(rng, ctx.dimension, 0.7)
        yv = rng.normal(size=ctx.dimension)
        y = point(yv / np.linalg.norm(yv))
        aimed = geodesic(point(x), mobius(point(x), y).coords)
        for tau in (-0.5, 0.0, 0.7):
            vals = [
                kernel_K(ctx, geodesic_point(aimed, math.tanh(tau + k * h)).coords, y)
                for k in (-1, 0, 1)
            ]
            second = (vals[0] - 2.0 * vals[1] + vals[2]) / h**2
            worst_linear = max(worst_linear, abs(second))
        generic = geodesic(point(x), rng.normal(size=ctx.dimension))
        ends = [geodesic_point(generic, t).coords for t in (0.999, -0.999)]
        if all(float(np.linalg.norm(e + y.coords)) > 0.1 for e in ends):
            vals = [
                kernel_K(ctx, geodesic_point(generic, math.tanh(k * h)).coords, y)
                for k in (-1, 0, 1)
            ]
            lowest_generic = min(lowest_generic, (vals[0] - 2 * vals[1] + vals[2]) / h**2)
    passed = worst_linear < tol.linear_abs and lowest_generic > tol.away_strict
    return ScanReport(
        kind=ScanKind.CONVEXITY_SCAN,
        worst_case=worst_linear,
        samples=samples,
        passed=passed,
        tolerance=tol.linear_abs,
        seed=seed,
        details=(f"lowest generic second difference {lowest_generic:.3e}",),
    )


def cocycle_check(
    samples: int = 1000,
    seed: int = 0,
    dimensions: Sequence[int] = (2, 3),
    tol: OracleTolerances = TOL,
) -> ScanReport:
    """Mobius action identity for the sphere kernel on random triples."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    total = 0
    for n in dimensions:
        anchor = np.zeros(n)
        anchor[0] = 1.0
        ctx = energy_context(identity(), atomic_measure([(anchor, 1.0)]))
        for _ in range(samples):
            x = _random_interior(rng, n, 0.9)
            z = _random_interior(rng, n, 0.9)
            yv = rng.normal(size=n)
            y = point(yv / np.linalg.norm(yv))
            lhs = kernel_K(ctx, mobius(point(x), point(z)).coords, y)
            rhs = kernel_K(ctx, z, mobius(point(x), y)) + kernel_K(ctx, x, y)
            worst = max(worst, abs(lhs - rhs))
            total += 1
    return ScanReport(
        kind=ScanKind.COCYCLE_CHECK,
        worst_case=worst,
        samples=total,
        passed=worst < tol.cocycle_abs,
        tolerance=tol.cocycle_abs,
        seed=seed,
    )


def boundary_continuity_check(
    weight: RadialWeight,
    x: Sequence[float],
    y_hat: Sequence[float],
    eps_values: Sequence[float] = tuple(10.0**-k for k in range(2, 9)),
    tol: OracleTolerances = TOL,
) -> ScanReport:
    """Interior kernel branch converging to the sphere branch as |y| -> 1.

    Uses the boundary-normalized weight; the gap must shrink monotonically
    and end below the final-gap tolerance.
    """
    w = normalized_for_boundary(weight)
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y_hat, dtype=float)
    yv = yv / np.linalg.norm(yv)
    omx = one_minus_sq_norm(xv)
    diff = xv + yv
    target = 0.5 * math.log(float(diff @ diff) / omx)
    xp = point(xv)
    gaps = []
    for eps in eps_values:
        yp = point((1.0 - eps) * yv)
        if yp.is_boundary:
            raise DomainError("eps too small: point snapped onto the sphere")
        img = mobius(xp, yp)
        val = eval_G(w, img.r) - eval_G(w, yp.r)
        gaps.append(abs(val - target))
    if all(g == 0.0 for g in gaps):
        # degenerate geometries (x = 0) agree exactly at every radius
        monotone = True
    else:
        # once the gap reaches the double-precision floor (arctanh round-trip
        # noise ~ cosh^2(s) ulp) further shrinking is meaningless
        floor = 1e-8
        monotone = all(
            a > b or max(a, b) < floor for a, b in zip(gaps, gaps[1:])
        )
    passed = monotone and gaps[-1] < tol.continuity_final_gap
    return ScanReport(
        kind=ScanKind.CONTINUITY_CHECK,
        worst_case=gaps[-1],
        samples=len(gaps),
        passed=passed,
        tolerance=tol.continuity_final_gap,
        details=tuple(f"eps={e:.0e} gap={g:.3e}" for e, g in zip(eps_values, gaps)),
    )


def distance_convexity_check(
    samples: int = 40, seed: int = 0, tol: OracleTolerances = TOL
) -> ScanReport:
    """Convexity of the distance to the origin in hyperbolic arclength.

    Off-origin geodesics: strictly positive second differences.  Lines through
    the origin: zero away from the corner.  Circular arcs centered at (a, 0)
    with a^2 = b^2 + 1: the euclidean-arclength second derivative of |x(t)|
    matches its closed form.
    """
    rng = np.random.default_rng(seed)
    h = tol.convexity_step
    lowest = math.inf
    checked = 0
    while checked < samples:
        n = int(rng.integers(2, 4))
        base = _random_interior(rng, n, 0.7)
        g = geodesic(point(base), rng.normal(size=n))
        taus = np.linspace(-1.2, 1.2, 9)
        radii = [geodesic_point(g, math.tanh(t)).r for t in taus]
        if min(radii) < 0.05:
            continue
        checked += 1
        for tau in taus:
            vals = [
                math.atanh(geodesic_point(g, math.tanh(tau + k * h)).r)
                for k in (-1, 0, 1)
            ]
            lowest = min(lowest, (vals[0] - 2.0 * vals[1] + vals[2]) / h**2)
    positive_ok = lowest > 0.0

    line_worst = 0.0
    e1 = np.array([1.0, 0.0])
    line = geodesic(point([0.0, 0.0]), e1)
    for tau in (0.3, 0.9, -0.6, -1.4):
        vals = [
            math.atanh(geodesic_point(line, math.tanh(tau + k * h)).r)
            for k in (-1, 0, 1)
        ]
        line_worst = max(line_worst, abs((vals[0] - 2.0 * vals[1] + vals[2]) / h**2))
    line_ok = line_worst < tol.distance_line_abs

    # circular-arc geodesic with a = sqrt(2), b = 1
    a, b = math.sqrt(2.0), 1.0
    arc_worst = 0.0

    def arc_norm(t: float) -> float:
        return math.sqrt(a * a - 2.0 * a * b * math.cos(t / b) + b * b)

    def closed_form(t: float) -> float:
        c = math.cos(t / b)
        return a * a * (a / b - c) * (c - b / a) / (
            a * a - 2.0 * a * b * c + b * b
        ) ** 1.5

    t_max = b * math.acos(b / a)
    for t in np.linspace(-0.8 * t_max, 0.8 * t_max, 9):
        fd = (arc_norm(t + h) - 2.0 * arc_norm(t) + arc_norm(t - h)) / h**2
        arc_worst = max(arc_worst, abs(fd - closed_form(t)) / abs(closed_form(t)))
    arc_ok = arc_worst < tol.arc_closed_form_rel

    return ScanReport(
        kind=ScanKind.DISTANCE_CONVEXITY,
        worst_case=lowest,
        samples=checked,
        passed=positive_ok and line_ok and arc_ok,
        tolerance=0.0,
        seed=seed,
        details=(
            f"lowest off-origin second difference {lowest:.3e}",
            f"origin-line worst |second difference| {line_worst:.3e}",
            f"arc closed-form worst relative error {arc_worst:.3e}",
        ),
    )


@dataclass(frozen=True)
class ZeroSet:
    """Zeros of the field component along a line through the origin."""

    points: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...]

    @property
    def cluster_count(self) -> int:
        return len(self.points) + len(self.intervals)


def brute_force_zeros_along_line(
    ctx: EnergyContext,
    direction: Sequence[float],
    resolution: int = 2001,
    tol: OracleTolerances = TOL,
) -> ZeroSet:
    """Scan V . dir on x = tanh(s) dir, bracketing sign changes by bisection.

    Grid points where |V . dir| stays below the flat tolerance merge into
    zero intervals (reported in x); isolated sign changes refine to points.
    """
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)

    def f(s: float) -> float:
        return float(field_V(ctx, math.tanh(s) * d) @ d)

    S = tol.zero_grid_span
    grid = np.linspace(-S, S, resolution)
    vals = np.array([f(s) for s in grid])
    flat = np.abs(vals) < tol.zero_flat_tol

    points: list[float] = []
    intervals: list[tuple[float, float]] = []
    # maximal flat runs: single grid points are point zeros, longer runs are
    # intervals
    i = 0
    while i < resolution:
        if not flat[i]:
            i += 1
            continue
        j = i
        while j + 1 < resolution and flat[j + 1]:
            j += 1
        if j > i:
            intervals.append((math.tanh(grid[i]), math.tanh(grid[j])))
        else:
            points.append(math.tanh(grid[i]))
        i = j + 1

    # sign changes between adjacent non-flat samples
    for i in range(resolution - 1):
        if flat[i] or flat[i + 1]:
            continue
        if (vals[i] > 0) == (vals[i + 1] > 0):
            continue
        lo, hi = grid[i], grid[i + 1]
        flo = vals[i]
        while math.tanh(hi) - math.tanh(lo) > tol.zero_bisect_tol:
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        points.append(math.tanh(0.5 * (lo + hi)))

    return ZeroSet(tuple(sorted(points)), tuple(intervals))


def brute_force_zeros_1d(
    ctx: EnergyContext, resolution: int = 2001, tol: OracleTolerances = TOL
) -> ZeroSet:
    """One-dimensional zero scan of V over x = tanh(s), s in [-S, S]."""
    if ctx.dimension != 1:
        raise DomainError("1-d zero scan needs a 1-d context")
    return brute_force_zeros_along_line(ctx, [1.0], resolution, tol)


def brute_force_zeros_2d(
    ctx: EnergyContext,
    resolution: int = 200,
    span: float = 3.0,
    tol: OracleTolerances = TOL,
) -> tuple[list[np.ndarray], ScanReport]:
    """Sign-change cell scan on a tanh-warped grid with damped refinement.

    Cells where both components of V change sign seed a damped
    finite-difference Newton iteration on V (2n field calls per step); this
    reaches repelling zeros of the -V flow that a plain fixed point cannot.
    """
    if ctx.dimension != 2:
        raise DomainError("2-d zero scan needs a 2-d context")
    s_grid = np.linspace(-span, span, resolution)
    xs = np.tanh(s_grid)
    V1 = np.full((resolution, resolution), np.nan)
    V2 = np.full((resolution, resolution), np.nan)
    for i, a in enumerate(xs):
        for j, b in enumerate(xs):
            if a * a + b * b >= 1.0 - 1e-10:
                continue
            v = field_V(ctx, np.array([a, b]))
            V1[i, j], V2[i, j] = v[0], v[1]

    def refine(x0: np.ndarray) -> np.ndarray | None:
        x = x0.copy()
        for _ in range(60):
            v = field_V(ctx, x)
            nv = float(np.linalg.norm(v))
            if nv < tol.refine_tol:
                return x
            h = 1e-6
            jac = np.empty((2, 2))
            for k in range(2):
                e = np.zeros(2)
                e[k] = h
                jac[:, k] = (field_V(ctx, x + e) - field_V(ctx, x - e)) / (2 * h)
            try:
                step = np.linalg.solve(jac, -v)
            except np.linalg.LinAlgError:
                return None
            lam = 1.0
            while lam > 1e-6:
                trial = x + lam * step
                if float(np.linalg.norm(trial)) < 0.999 and float(
                    np.linalg.norm(field_V(ctx, trial))
                ) < nv:
                    x = trial
                    break
                lam *= 0.5
            else:
                return None
        return None

    zeros: list[np.ndarray] = []
    for i in range(resolution - 1):
        for j in range(resolution - 1):
            cell1 = V1[i : i + 2, j : j + 2].ravel()
            cell2 = V2[i : i + 2, j : j + 2].ravel()
            if np.any(np.isnan(cell1)):
                continue
            if np.min(cell1) < 0 < np.max(cell1) and np.min(cell2) < 0 < np.max(cell2):
                seed = np.array([0.5 * (xs[i] + xs[i + 1]), 0.5 * (xs[j] + xs[j + 1])])
                z = refine(seed)
                if z is not None and all(
                    float(np.linalg.norm(z - zz)) > 1e-6 for zz in zeros
                ):
                    zeros.append(z)
    worst = max(
        (float(np.linalg.norm(field_V(ctx, z))) for z in zeros), default=0.0
    )
    report = ScanReport(
        kind=ScanKind.ZERO_SET_2D,
        worst_case=worst,
        samples=resolution * resolution,
        passed=worst < tol.refine_tol,
        tolerance=tol.refine_tol,
        details=tuple(str(z.tolist()) for z in zeros),
    )
    return zeros, report
