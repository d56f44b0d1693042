"""Renormalized energy, its kernel, and the center-of-mass vector field.

For a weight g and an atomic measure the field is

    V(x) = sum_i w_i g(|T_x(y_i)|) T_x(y_i)/|T_x(y_i)|,

and the renormalized energy sums the kernel K(x, y): the difference of
weighted antiderivatives for interior atoms, and the Busemann-type logarithm
(1/2) log(|x+y|^2 / (1-|x|^2)) for sphere atoms.  The euclidean gradient of
the energy is V(x)/(1-|x|^2), so zeros of V are exactly the critical points.

When the measure touches the sphere the context rescales the weight so
g(1) = 1; both kernel branches then share the same normalization and the
energy splits exactly into ball and sphere parts.  Atom sums use fsum over a
fixed atom order: deterministic and exactly rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    BusemannSingularity,
    DimensionMismatch,
    DomainError,
    NotBoundaryCompatible,
)
from .geometry import (
    BallPoint,
    MobiusBatch,
    mobius_batch,
    one_minus_sq_norm,
    point,
)
from .measures import AtomicMeasure, Support, ValidationReport, validate
from .weights import RadialWeight, eval_G_rs, eval_g_rs, normalized_for_boundary

XLike = Union[BallPoint, np.ndarray, list]


@dataclass(frozen=True, eq=False)
class EnergyContext:
    """A (weight, measure) pair with precomputed per-atom radial metadata.

    The stored weight is boundary-normalized whenever the measure has sphere
    atoms; construction fails if that is impossible (g(1) undefined or <= 0).
    """

    weight: RadialWeight
    measure: AtomicMeasure
    dimension: int
    validation: ValidationReport
    locations: np.ndarray
    weights_arr: np.ndarray
    boundary: np.ndarray
    interior: np.ndarray
    any_boundary: bool
    sq_norms: np.ndarray
    one_minus_sq: np.ndarray
    gamma_y: np.ndarray  # G(|y_i|) for interior atoms, 0.0 on sphere rows

    @property
    def total(self) -> float:
        return self.validation.total

    @property
    def abs_total(self) -> float:
        return self.validation.abs_total

    def residual_scale(self) -> float:
        """Mass scale for relative residuals: total, or |mu| if total <= 0."""
        t = self.total
        return t if t > 0.0 else self.abs_total


def energy_context(weight: RadialWeight, measure: AtomicMeasure) -> EnergyContext:
    """Validate and precompute; normalizes the weight for sphere atoms."""
    report = validate(measure)
    if report.support is not Support.COMPACT_INTERIOR:
        weight = normalized_for_boundary(weight)
    locations = measure.locations
    boundary = measure.boundary_mask
    sq_norms = np.einsum("ij,ij->i", locations, locations)
    one_minus_sq = np.array(
        [
            0.0 if isbd else one_minus_sq_norm(loc)
            for loc, isbd in zip(locations, boundary)
        ]
    )
    sq_norms[boundary] = 1.0
    # G at the atom radii through the same batch path used at evaluation time,
    # so the interior kernel vanishes identically at x = 0
    batch = mobius_batch(
        np.zeros(measure.dimension), locations, sq_norms, one_minus_sq, boundary
    )
    gamma_y = np.zeros(len(measure))
    interior = ~boundary
    if np.any(interior):
        gamma_y[interior] = eval_G_rs(
            weight,
            batch.radii[interior],
            batch.arclengths[interior],
            batch.one_minus_r2[interior],
        )
    return EnergyContext(
        weight=weight,
        measure=measure,
        dimension=measure.dimension,
        validation=report,
        locations=locations,
        weights_arr=np.asarray(measure.weights, dtype=float),
        boundary=boundary,
        interior=interior,
        any_boundary=bool(np.any(boundary)),
        sq_norms=sq_norms,
        one_minus_sq=one_minus_sq,
        gamma_y=gamma_y,
    )


def _as_interior_coords(ctx: EnergyContext, x: XLike) -> np.ndarray:
    v = x.coords if isinstance(x, BallPoint) else np.asarray(x, dtype=float)
    if v.shape != (ctx.dimension,):
        raise DimensionMismatch(
            f"evaluation point has shape {v.shape}, measure dimension {ctx.dimension}"
        )
    if float(v @ v) >= 1.0:
        raise DomainError("evaluation point must lie in the open ball")
    return v


def _batch(ctx: EnergyContext, x: np.ndarray) -> MobiusBatch:
    return mobius_batch(x, ctx.locations, ctx.sq_norms, ctx.one_minus_sq, ctx.boundary)


def _fsum_vector(contrib: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(col) for col in contrib.T.tolist()])


def _field_contrib(ctx: EnergyContext, batch: MobiusBatch) -> np.ndarray:
    """Per-atom field contributions w_i g(|T_x(y_i)|) direction_i.

    Directions are the images normalized by their own euclidean norm, so they
    are unit vectors to machine precision even where the image coordinates
    carry cancellation noise; magnitudes come from the stable radial data.
    """
    if not ctx.any_boundary:
        g_vals = eval_g_rs(ctx.weight, batch.radii, batch.arclengths)
    else:
        g_vals = np.empty(len(ctx.measure))
        g_vals[ctx.interior] = eval_g_rs(
            ctx.weight, batch.radii[ctx.interior], batch.arclengths[ctx.interior]
        )
        g_vals[ctx.boundary] = ctx.weight.g1
    norms = np.sqrt(np.einsum("ij,ij->i", batch.images, batch.images))
    with np.errstate(invalid="ignore", divide="ignore"):
        units = np.where(norms[:, None] > 0.0, batch.images / norms[:, None], 0.0)
    return (ctx.weights_arr * g_vals)[:, None] * units


def field_V(ctx: EnergyContext, x: XLike) -> np.ndarray:
    """The integrated radial field V(x); its zeros are the sought centers."""
    xv = _as_interior_coords(ctx, x)
    return _fsum_vector(_field_contrib(ctx, _batch(ctx, xv)))


def _kernel_terms(ctx: EnergyContext, xv: np.ndarray, batch: MobiusBatch) -> np.ndarray:
    """Per-atom kernel values K(x, y_i) sharing one Mobius batch."""
    if not ctx.any_boundary:
        return (
            eval_G_rs(ctx.weight, batch.radii, batch.arclengths, batch.one_minus_r2)
            - ctx.gamma_y
        )
    omx = one_minus_sq_norm(xv)
    vals = np.empty(len(ctx.measure))
    if ctx.interior.any():
        vals[ctx.interior] = (
            eval_G_rs(
                ctx.weight,
                batch.radii[ctx.interior],
                batch.arclengths[ctx.interior],
                batch.one_minus_r2[ctx.interior],
            )
            - ctx.gamma_y[ctx.interior]
        )
    # |x + y|^2 equals the Mobius denominator when |y| = 1
    sq = batch.dens[ctx.boundary]
    if sq.min() < 1e-300:
        raise BusemannSingularity("kernel diverges: x at the antipode of a sphere atom")
    vals[ctx.boundary] = 0.5 * (np.log(sq) - math.log(omx))
    return vals


def renormalized_energy(ctx: EnergyContext, x: XLike) -> float:
    """The renormalized energy; finite for sphere atoms and zero at x = 0."""
    xv = _as_interior_coords(ctx, x)
    vals = _kernel_terms(ctx, xv, _batch(ctx, xv))
    return float(math.fsum((ctx.weights_arr * vals).tolist()))


def energy_and_field(ctx: EnergyContext, x: XLike) -> tuple[float, np.ndarray]:
    """Energy and field from a single Mobius pass (solver hot path)."""
    xv = _as_interior_coords(ctx, x)
    batch = _batch(ctx, xv)
    vals = _kernel_terms(ctx, xv, batch)
    energy = float(math.fsum((ctx.weights_arr * vals).tolist()))
    return energy, _fsum_vector(_field_contrib(ctx, batch))


def kernel_K(ctx: EnergyContext, x: XLike, y: BallPoint) -> float:
    """Renormalized kernel K(x, y); continuous up to the sphere in y.

    The sphere branch presumes the normalized scale g(1) = 1, which the
    context guarantees whenever it owns sphere atoms.
    """
    xv = _as_interior_coords(ctx, x)
    yp = y if isinstance(y, BallPoint) else point(y)
    if yp.dim != ctx.dimension:
        raise DimensionMismatch("kernel arguments live in different dimensions")
    if yp.is_boundary:
        if ctx.weight.g1 is None or ctx.weight.g1 <= 0.0:
            raise NotBoundaryCompatible("sphere kernel needs a weight with g(1) > 0")
        omx = one_minus_sq_norm(xv)
        diff = xv + yp.coords
        sq = float(diff @ diff)
        if sq < 1e-300:
            raise BusemannSingularity("kernel diverges at the antipode of y")
        return 0.5 * (math.log(sq) - math.log(omx))
    yy = float(yp.coords @ yp.coords)
    omy = one_minus_sq_norm(yp.coords)
    batch = mobius_batch(
        xv,
        yp.coords[None, :],
        np.array([yy]),
        np.array([omy]),
        np.array([False]),
    )
    zero = mobius_batch(
        np.zeros(ctx.dimension),
        yp.coords[None, :],
        np.array([yy]),
        np.array([omy]),
        np.array([False]),
    )
    g_img = float(
        eval_G_rs(ctx.weight, batch.radii, batch.arclengths, batch.one_minus_r2)[0]
    )
    g_y = float(
        eval_G_rs(ctx.weight, zero.radii, zero.arclengths, zero.one_minus_r2)[0]
    )
    return g_img - g_y


def energy_gradient(ctx: EnergyContext, x: XLike) -> np.ndarray:
    """Euclidean-coordinate gradient of the renormalized energy: V/(1-|x|^2)."""
    xv = _as_interior_coords(ctx, x)
    return field_V(ctx, xv) / one_minus_sq_norm(xv)
