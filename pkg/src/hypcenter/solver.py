"""Center-of-mass solver: geodesic descent on the renormalized energy.

The iterate moves along exact hyperbolic geodesics, x <- T_x(-tanh(tau) V/|V|),
with an Armijo-backtracked arclength step; along a unit-speed geodesic the
energy's directional derivative is -|V|, so the sufficient-decrease test reads
E_new <= E - c1 tau |V|.  A Newton-accelerated strategy builds a trust-region
quadratic model from finite differences of the gradient and falls back to the
descent step whenever the model is not positive definite or fails to decrease
the energy.

Non-convergence is a result state (converged=False), with one exception:
iterates escaping to the boundary without residual decrease raise
DivergentIterates, the signature of a measure with no center (signed measures
with vanishing total mass behave exactly this way).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .errors import DivergentIterates, DomainError
from .energy import (
    EnergyContext,
    energy_and_field,
    energy_context,
    field_V,
    renormalized_energy,
)
from .geometry import (
    BallPoint,
    Locus,
    hyp_distance,
    one_minus_sq_norm,
    point,
    translate_coords,
)
from .measures import AtomicMeasure, GeodesicSupport, Support
from .weights import Monotonicity

ARMIJO_DECREASE = 1e-4
ARMIJO_BACKTRACK = 0.5
NEWTON_FD_STEP = 1e-5
BOUNDARY_ESCAPE = 1e-14
CLUSTER_TOL = 1e-6
MULTISTART_RADIUS = math.tanh(2.0)


class Strategy(Enum):
    GEODESIC_DESCENT = "descent"
    NEWTON_ACCELERATED = "newton"


class HypothesisClass(Enum):
    """Strongest guarantee the (weight, measure) pair supports.

    The first four imply a unique center; SIGNED_EXISTENCE_ONLY implies a
    center exists but says nothing about uniqueness; NO_GUARANTEE promises
    nothing (the solver still runs).
    """

    INTERIOR_STRICT = "interior_strict"
    INTERIOR_SPREAD = "interior_spread"
    BOUNDARY_STRICT = "boundary_strict"
    BOUNDARY_SPREAD = "boundary_spread"
    SIGNED_EXISTENCE_ONLY = "signed_existence_only"
    NO_GUARANTEE = "no_guarantee"


UNIQUENESS_CLASSES = frozenset(
    {
        HypothesisClass.INTERIOR_STRICT,
        HypothesisClass.INTERIOR_SPREAD,
        HypothesisClass.BOUNDARY_STRICT,
        HypothesisClass.BOUNDARY_SPREAD,
    }
)


class UniquenessKind(Enum):
    GUARANTEED = "guaranteed"
    MULTISTART_AGREE = "multistart_agree"
    AMBIGUOUS = "ambiguous"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Uniqueness:
    kind: UniquenessKind
    representatives: tuple = ()


@dataclass(frozen=True)
class SolveOptions:
    tol_residual: float = 1e-10
    max_iters: int = 500
    initial: Sequence[float] | BallPoint | None = None
    strategy: Strategy = Strategy.GEODESIC_DESCENT
    multistart: int = 1

    def __post_init__(self) -> None:
        if self.tol_residual <= 0.0:
            raise DomainError("tol_residual must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")


@dataclass(frozen=True, eq=False)
class SolveResult:
    x_c: BallPoint
    residual: float
    iterations: int
    energy_at_min: float
    converged: bool
    uniqueness: Uniqueness
    hypothesis_class: HypothesisClass
    trace: tuple = field(default=(), repr=False)


def classify_hypotheses(ctx: EnergyContext) -> HypothesisClass:
    """Strongest guarantee class whose hypotheses the context satisfies."""
    report = ctx.validation
    w = ctx.weight
    if report.signed:
        if (
            report.total > 0.0
            and w.g1 is not None
            and w.g1 > 0.0
            and report.boundary_pointmass_ok
        ):
            return HypothesisClass.SIGNED_EXISTENCE_ONLY
        return HypothesisClass.NO_GUARANTEE

    strict = w.monotonicity is Monotonicity.STRICTLY_INCREASING
    spread = (
        w.monotonicity is Monotonicity.INCREASING
        and w.positive_interior
        and report.geodesic_support is GeodesicSupport.NOT_IN_GEODESIC
    )
    if report.support is Support.COMPACT_INTERIOR:
        if not w.divergent_G:
            return HypothesisClass.NO_GUARANTEE
        if strict:
            return HypothesisClass.INTERIOR_STRICT
        if spread:
            return HypothesisClass.INTERIOR_SPREAD
        return HypothesisClass.NO_GUARANTEE
    # touches the sphere: existence needs g(1) > 0 and the point-mass bound
    if w.g1 is None or w.g1 <= 0.0 or not report.boundary_pointmass_ok:
        return HypothesisClass.NO_GUARANTEE
    if strict:
        return HypothesisClass.BOUNDARY_STRICT
    if spread:
        return HypothesisClass.BOUNDARY_SPREAD
    return HypothesisClass.NO_GUARANTEE


def _auto_initial(ctx: EnergyContext) -> np.ndarray:
    """Euclidean weighted mean of the atoms, clipped to radius 0.9."""
    total = ctx.total
    if total <= 0.0:
        mean = np.zeros(ctx.dimension)
    else:
        mean = (ctx.weights_arr @ ctx.locations) / total
    nr = float(np.linalg.norm(mean))
    if nr > 0.9:
        mean = mean * (0.9 / nr)
    return mean


def _initial_coords(ctx: EnergyContext, opts: SolveOptions) -> np.ndarray:
    if opts.initial is None:
        return _auto_initial(ctx)
    p = point(opts.initial) if not isinstance(opts.initial, BallPoint) else opts.initial
    if p.locus is not Locus.INTERIOR:
        raise DomainError("initial point must be interior")
    return np.array(p.coords)


def _step(x: np.ndarray, direction: np.ndarray, tau: float) -> np.ndarray:
    """Geodesic step of hyperbolic length tau from x along the unit direction."""
    return translate_coords(x, math.tanh(tau) * direction)


def _newton_step(
    ctx: EnergyContext, x: np.ndarray, v: np.ndarray
) -> np.ndarray | None:
    """Trust-region Newton trial step, or None when the model is unusable."""
    n = x.shape[0]
    omx = one_minus_sq_norm(x)
    h = NEWTON_FD_STEP * omx
    grad0 = v / omx
    hess = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        if np.linalg.norm(x + e) >= 1.0 or np.linalg.norm(x - e) >= 1.0:
            return None
        gp = field_V(ctx, x + e) / one_minus_sq_norm(x + e)
        gm = field_V(ctx, x - e) / one_minus_sq_norm(x - e)
        hess[:, j] = (gp - gm) / (2.0 * h)
    hess = 0.5 * (hess + hess.T)
    try:
        low = np.linalg.cholesky(hess)
    except np.linalg.LinAlgError:
        return None
    delta = -np.linalg.solve(hess, grad0)
    # keep the trial inside the ball with margin
    trust = 0.5 * omx
    nd = float(np.linalg.norm(delta))
    if nd > trust:
        delta = delta * (trust / nd)
    trial = x + delta
    if float(np.linalg.norm(trial)) >= 1.0 - 1e-12:
        return None
    return trial


def solve_center(ctx: EnergyContext, opts: SolveOptions = SolveOptions()) -> SolveResult:
    """Find a zero of V by minimizing the renormalized energy along geodesics.

    With ``opts.multistart >= 2`` this delegates to multistart_probe.  Raises
    DivergentIterates when iterates reach |x| >= 1 - 1e-14, which existence
    theory reserves for measures without a center.
    """
    if opts.multistart >= 2:
        return multistart_probe(ctx, replace(opts, multistart=1), opts.multistart)

    cls = classify_hypotheses(ctx)
    scale = ctx.residual_scale()
    x = _initial_coords(ctx, opts)
    e_x, v = energy_and_field(ctx, x)
    res = float(np.linalg.norm(v)) / scale
    res0 = res
    best = (x, res, e_x, 0)
    trace: list[tuple[float, float]] = [(e_x, res)]

    iters = 0
    gain = 1.0  # adaptive multiple of the gradient-scaled step
    converged = res <= opts.tol_residual
    while not converged and iters < opts.max_iters:
        iters += 1
        moved = False
        if opts.strategy is Strategy.NEWTON_ACCELERATED:
            trial = _newton_step(ctx, x, v)
            if trial is not None:
                e_t = renormalized_energy(ctx, trial)
                if e_t < e_x:
                    x, e_x = trial, e_t
                    v = field_V(ctx, x)
                    moved = True
        if not moved:
            vnorm = float(np.linalg.norm(v))
            direction = -v / vnorm
            # step proportional to |V|/total, with a gain that doubles on
            # clean acceptance and shrinks with backtracks: the bare rule
            # contracts like (1 - curvature/total) and stalls past the
            # iteration budget on ill-conditioned measures
            tau0 = min(1.0, gain * vnorm / scale)
            tau = tau0
            # once tau*|V| falls below the energy's floating-point resolution
            # the Armijo test reads pure noise; in that regime steps are
            # accepted on a decrease of |V| instead
            slack = 1e-15 * (1.0 + abs(e_x))
            accepted = False
            v_t = None
            while tau > 1e-15:
                x_t = _step(x, direction, tau)
                e_t = renormalized_energy(ctx, x_t)
                if e_t <= e_x - ARMIJO_DECREASE * tau * vnorm:
                    accepted, v_t = True, None
                    break
                if e_t <= e_x + slack:
                    v_t = field_V(ctx, x_t)
                    if float(np.linalg.norm(v_t)) < vnorm:
                        accepted = True
                        break
                tau *= ARMIJO_BACKTRACK
            if not accepted:
                break  # stationary to machine precision
            gain_eff = gain * (tau / tau0)
            if v_t is None:
                # decrease ratio against the linear model: near 1 means the
                # step is far below the curvature scale (grow the gain), small
                # means overshoot past the valley floor (shrink it)
                ratio = (e_x - e_t) / (tau * vnorm)
                if ratio >= 0.7:
                    gain = max(1.0, 2.0 * gain_eff)
                elif ratio >= 0.3:
                    gain = max(1.0, gain_eff)
                else:
                    gain = max(1.0, 0.5 * gain_eff)
                v = field_V(ctx, x_t)
            else:
                gain = max(1.0, gain_eff)
                v = v_t
            x, e_x = x_t, e_t
        res = float(np.linalg.norm(v)) / scale
        trace.append((e_x, res))
        if res < best[1]:
            best = (x, res, e_x, iters)
        if float(np.linalg.norm(x)) >= 1.0 - BOUNDARY_ESCAPE:
            if best[1] >= 0.5 * res0:
                raise DivergentIterates(
                    f"iterates reached the boundary with residual {res:.3e} "
                    f"(initial {res0:.3e}); no center of mass exists"
                )
            break
        converged = res <= opts.tol_residual

    if not converged:
        x, res, e_x, _ = best
    uniq = (
        Uniqueness(UniquenessKind.GUARANTEED)
        if cls in UNIQUENESS_CLASSES
        else Uniqueness(UniquenessKind.UNKNOWN)
    )
    # iterates are interior by construction; bypass the boundary snap so a
    # near-sphere best iterate cannot come back classified as Boundary
    return SolveResult(
        x_c=BallPoint(np.array(x), Locus.INTERIOR),
        residual=res,
        iterations=iters,
        energy_at_min=e_x,
        converged=converged,
        uniqueness=uniq,
        hypothesis_class=cls,
        trace=tuple(trace),
    )


def _multistart_points(ctx: EnergyContext, starts: int, seed: int = 0) -> list[np.ndarray]:
    """Auto initial plus low-discrepancy points of hyperbolic radius <= 2."""
    pts = [_auto_initial(ctx)]
    sampler = qmc.Halton(d=ctx.dimension, scramble=True, seed=seed)
    while len(pts) < starts + 1:
        for row in sampler.random(max(32, starts)):
            y = MULTISTART_RADIUS * (2.0 * row - 1.0)
            if float(np.linalg.norm(y)) <= MULTISTART_RADIUS:
                pts.append(y)
                if len(pts) == starts + 1:
                    break
    return pts


def multistart_probe(
    ctx: EnergyContext, opts: SolveOptions, starts: int, seed: int = 0
) -> SolveResult:
    """Solve from many starts and cluster the converged endpoints.

    Endpoints within hyperbolic distance 1e-6 merge into one cluster; a single
    cluster reports MULTISTART_AGREE, several report AMBIGUOUS with sorted
    representatives.
    """
    if starts < 2:
        raise DomainError("multistart needs at least 2 starts")
    single = replace(opts, multistart=1)
    runs: list[SolveResult] = []
    diverged = 0
    for x0 in _multistart_points(ctx, starts, seed):
        try:
            runs.append(solve_center(ctx, replace(single, initial=point(x0))))
        except DivergentIterates:
            diverged += 1
    converged = [r for r in runs if r.converged]
    if not converged:
        if diverged and not runs:
            raise DivergentIterates("every start diverged to the boundary")
        fallback = min(runs, key=lambda r: r.residual)
        return replace(fallback, uniqueness=Uniqueness(UniquenessKind.UNKNOWN))

    # sorted clustering: order-independent representatives
    endpoints = sorted(converged, key=lambda r: tuple(r.x_c.coords))
    clusters: list[list[SolveResult]] = []
    for run in endpoints:
        for cluster in clusters:
            if hyp_distance(cluster[0].x_c, run.x_c) <= CLUSTER_TOL:
                cluster.append(run)
                break
        else:
            clusters.append([run])
    reps = tuple(
        min(cl, key=lambda r: r.energy_at_min).x_c for cl in clusters
    )
    best = min(converged, key=lambda r: r.energy_at_min)
    kind = (
        UniquenessKind.MULTISTART_AGREE
        if len(clusters) == 1
        else UniquenessKind.AMBIGUOUS
    )
    return replace(best, uniqueness=Uniqueness(kind, reps))


def measure_delta(base: AtomicMeasure, other: AtomicMeasure) -> float:
    """Total-variation-style distance between atom lists.

    Atoms are matched by location (within 1e-12); the result sums |weight
    difference| over matched locations plus |weight| of unmatched atoms.
    """
    def keyed(mu: AtomicMeasure) -> dict:
        table: dict[tuple, float] = {}
        for p, w in mu.atoms():
            key = tuple(np.round(p.coords, 12))
            table[key] = table.get(key, 0.0) + float(w)
        return table

    a, b = keyed(base), keyed(other)
    return float(
        math.fsum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))
    )


def continuity_probe(
    ctx: EnergyContext,
    perturbations: Sequence[AtomicMeasure],
    opts: SolveOptions = SolveOptions(),
) -> list[tuple[float, float]]:
    """Solve the base and each perturbed measure; report displacements.

    Returns (perturbation size, hyperbolic displacement of the center) per
    perturbation, in input order.  Under the continuous-dependence hypotheses
    the displacement shrinks with the perturbation; families escaping every
    compact subset of the ball are exactly the documented failure mode.
    """
    base = solve_center(ctx, opts)
    out = []
    for mu in perturbations:
        pert_ctx = energy_context(ctx.weight, mu)
        moved = solve_center(pert_ctx, opts)
        out.append(
            (
                measure_delta(ctx.measure, mu),
                hyp_distance(base.x_c, moved.x_c),
            )
        )
    return out
