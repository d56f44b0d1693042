"""Radial weight profiles g(r) and their hyperbolic antiderivatives.

A weight carries its monotonicity class, its boundary value g(1) when finite,
and whether the hyperbolic antiderivative G(r) = int_0^r g(t)/(1-t^2) dt
diverges at r = 1 (the existence hypothesis for interior measures).  All
profiles satisfy the standing assumption g(0) = 0, spot-verified on a 10^4
point grid at construction together with the declared monotonicity.

Quadrature-backed profiles integrate in the arclength variable s = arctanh r
(so G(r) = int_0^{s(r)} g(tanh u) du), which removes the 1/(1-r^2) endpoint
blow-up that defeats naive quadrature near r = 1.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import (
    DomainError,
    InvalidWeight,
    NotBoundaryCompatible,
    UndefinedAtOne,
)
from .geometry import BallPoint, point

_CHECK_GRID = 10_000


class Monotonicity(Enum):
    STRICTLY_INCREASING = "strictly_increasing"
    INCREASING = "increasing"
    NONE = "none"


@dataclass(frozen=True, eq=False)
class RadialWeight:
    """A radial profile g with monotonicity metadata and scaling.

    ``g1`` is the effective value at r = 1 (scale included) or None when the
    profile has no finite boundary value.  ``positive_interior`` records the
    grid-verified claim g(r) > 0 for 0 < r < 1, which the uniqueness
    hypotheses condition on.
    """

    kind: str
    params: Mapping[str, object]
    monotonicity: Monotonicity
    g1: float | None
    divergent_G: bool
    scale: float = 1.0
    positive_interior: bool = False
    _interp: PchipInterpolator | None = field(default=None, repr=False)

    def describe(self) -> dict:
        """JSON-compatible description (round-trips through weight_from_config)."""
        params = {
            k: [list(row) for row in v] if k == "pieces" else
            (list(v) if isinstance(v, tuple) else v)
            for k, v in self.params.items()
            if not k.startswith("_")
        }
        out: dict = {"kind": self.kind, "params": params}
        if self.scale != 1.0:
            out["scale"] = self.scale
        return out


def _pieces_tuple(pieces) -> tuple[tuple[float, float, float], ...]:
    out = []
    prev = -math.inf
    for s0, slope, intercept in pieces:
        if s0 < 0 or s0 <= prev:
            raise InvalidWeight("piece breakpoints must be increasing and >= 0")
        prev = s0
        out.append((float(s0), float(slope), float(intercept)))
    if not out or out[0][0] != 0.0:
        raise InvalidWeight("first piece must start at s = 0")
    return tuple(out)


def _g_raw(w: RadialWeight, r, s):
    """Unscaled profile value; r and s = arctanh r are matching arrays."""
    kind = w.kind
    if kind == "identity":
        return r
    if kind == "arctanh_power":
        p = float(w.params["p"])
        return s ** (p - 1.0)
    if kind == "min_r_arctanh_inv":
        with np.errstate(divide="ignore", over="ignore"):
            inv = np.where(s > 0.0, 1.0 / np.maximum(s, 5e-324), np.inf)
        return np.minimum(s, inv)
    if kind == "clamped_linear":
        return np.minimum(r, float(w.params["c"]))
    if kind == "log_damped":
        with np.errstate(divide="ignore", over="ignore"):
            den = np.log(2.0 / np.maximum(1.0 - r, 5e-324))
        return np.where(r >= 1.0, 0.0, r / den)
    if kind == "clamped_arctanh":
        pieces = w.params["pieces"]
        starts = np.array([p[0] for p in pieces])
        slopes = np.array([p[1] for p in pieces])
        intercepts = np.array([p[2] for p in pieces])
        idx = np.minimum(np.searchsorted(starts, s, side="right") - 1, len(pieces) - 1)
        idx = np.maximum(idx, 0)
        m, b = slopes[idx], intercepts[idx]
        # avoid 0 * inf at r = 1 on a constant final piece
        with np.errstate(invalid="ignore"):
            return np.where(m != 0.0, m * s + b, b)
    if kind == "table":
        rmax = float(w.params["r"][-1])
        if np.any(np.asarray(r) > rmax + 1e-15):
            raise DomainError(f"table profile only covers r <= {rmax}")
        return w._interp(np.minimum(r, rmax))
    raise InvalidWeight(f"unknown profile kind {kind!r}")


def eval_g_rs(w: RadialWeight, r, s):
    """Scaled g given consistent (r, arctanh r) pairs; the precision path."""
    return w.scale * _g_raw(w, np.asarray(r, dtype=float), np.asarray(s, dtype=float))


def eval_g(w: RadialWeight, r):
    """g(r) for scalar or array r in [0, 1]; r = 1 needs a finite g(1)."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("radius outside [0, 1]")
    if np.any(arr == 1.0) and w.g1 is None:
        raise UndefinedAtOne(f"profile {w.kind!r} has no finite value at r = 1")
    with np.errstate(divide="ignore"):
        s = np.arctanh(np.minimum(arr, 1.0 - 1e-17))
    s = np.where(arr == 1.0, np.inf, s)
    out = eval_g_rs(w, arr, s)
    if np.isscalar(r) or np.ndim(r) == 0:
        return float(out)
    return out


def eval_v(w: RadialWeight, y) -> np.ndarray:
    """Radial field v(y) = g(|y|) y/|y|, zero at the origin."""
    p = point(y) if not isinstance(y, BallPoint) else y
    r = p.r
    if r == 0.0:
        return np.zeros(p.dim)
    return float(eval_g(w, min(r, 1.0))) * (p.coords / r)


def _G_raw(w: RadialWeight, r, s, one_minus_r2=None):
    """Unscaled G; ``one_minus_r2`` may carry accurate 1 - r^2 values."""
    kind = w.kind
    om = one_minus_r2
    if om is None:
        om = (1.0 - r) * (1.0 + r)
    if kind == "identity":
        return -0.5 * np.log(om)
    if kind == "arctanh_power":
        p = float(w.params["p"])
        return s**p / p
    if kind == "min_r_arctanh_inv":
        return np.where(s <= 1.0, 0.5 * s * s, 0.5 + np.log(np.maximum(s, 5e-324)))
    if kind == "clamped_linear":
        c = float(w.params["c"])
        below = -0.5 * np.log(om)
        g_c = -0.5 * math.log1p(-c * c)
        return np.where(r <= c, below, g_c + c * (s - math.atanh(c)))
    if kind == "clamped_arctanh":
        pieces = w.params["pieces"]
        starts = np.array([p[0] for p in pieces])
        slopes = np.array([p[1] for p in pieces])
        intercepts = np.array([p[2] for p in pieces])
        cum = w.params["_cumulative"]
        idx = np.minimum(np.searchsorted(starts, s, side="right") - 1, len(pieces) - 1)
        idx = np.maximum(idx, 0)
        s0, m, b = starts[idx], slopes[idx], intercepts[idx]
        return cum[idx] + 0.5 * m * (s - s0) * (s + s0) + b * (s - s0)
    # quadrature profiles: integrate the arclength-substituted integrand
    def tilde_g(u: float) -> float:
        return float(_g_raw(w, np.tanh(u), np.asarray(u)))

    def one(si: float) -> float:
        val, _err = quad(tilde_g, 0.0, si, epsabs=1e-10, epsrel=1e-12, limit=200)
        return val

    if np.ndim(s) == 0:
        return one(float(s))
    return np.array([one(float(si)) for si in np.ravel(s)]).reshape(np.shape(s))


def eval_G_rs(w: RadialWeight, r, s, one_minus_r2=None):
    """Scaled G given consistent (r, s) pairs; the precision path."""
    return w.scale * _G_raw(
        w, np.asarray(r, dtype=float), np.asarray(s, dtype=float), one_minus_r2
    )


def eval_G(w: RadialWeight, r):
    """Weighted hyperbolic antiderivative G(r) for 0 <= r < 1; G(0) = 0."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise DomainError("radius outside [0, 1)")
    s = np.arctanh(arr)
    out = eval_G_rs(w, arr, s)
    if np.isscalar(r) or np.ndim(r) == 0:
        return float(out)
    return out


def normalized_for_boundary(w: RadialWeight) -> RadialWeight:
    """Rescale so the boundary value becomes 1; the zero set of the induced
    field is unchanged (positive scaling)."""
    if w.g1 is None or w.g1 <= 0.0:
        raise NotBoundaryCompatible(
            f"profile {w.kind!r} has g(1) = {w.g1!r}; cannot normalize"
        )
    if w.g1 == 1.0:
        return w
    return dataclasses.replace(w, scale=w.scale / w.g1, g1=1.0)


def _spot_check(w: RadialWeight) -> RadialWeight:
    """Verify g(0) = 0, the declared monotonicity, and interior positivity."""
    upper = float(w.params["r"][-1]) if w.kind == "table" else 1.0
    rs = np.linspace(0.0, upper, _CHECK_GRID, endpoint=upper < 1.0)
    vals = eval_g(w, rs)
    if abs(float(vals[0])) > 1e-300:
        raise InvalidWeight(f"profile {w.kind!r} violates g(0) = 0")
    diffs = np.diff(vals)
    if w.monotonicity is Monotonicity.STRICTLY_INCREASING and not np.all(diffs > 0.0):
        raise InvalidWeight(f"profile {w.kind!r} is not strictly increasing")
    if w.monotonicity is Monotonicity.INCREASING and not np.all(diffs >= -1e-15):
        raise InvalidWeight(f"profile {w.kind!r} is not increasing")
    if w.g1 is not None and w.g1 > 0.0 and not w.divergent_G:
        raise InvalidWeight("g(1) > 0 forces a divergent antiderivative")
    if w.monotonicity is Monotonicity.STRICTLY_INCREASING and not w.divergent_G:
        raise InvalidWeight("strictly increasing profiles diverge; metadata lies")
    positive = bool(np.all(vals[1:] > 0.0))
    return dataclasses.replace(w, positive_interior=positive)


def identity() -> RadialWeight:
    """g(r) = r, the plain center-of-mass weight."""
    return _spot_check(
        RadialWeight(
            "identity", {}, Monotonicity.STRICTLY_INCREASING, 1.0, True
        )
    )


def arctanh_power(p: float) -> RadialWeight:
    """g(r) = (arctanh r)^(p-1); p = 2 is the quadratic-energy weight.

    Requires p > 1: at p = 1 the profile value at 0 would be 1, violating the
    standing assumption g(0) = 0.
    """
    if not p > 1.0:
        raise InvalidWeight("arctanh_power needs p > 1 so that g(0) = 0")
    return _spot_check(
        RadialWeight(
            "arctanh_power",
            {"p": float(p)},
            Monotonicity.STRICTLY_INCREASING,
            None,
            True,
        )
    )


def min_r_arctanh_inv() -> RadialWeight:
    """g(r) = min(s, 1/s) with s = arctanh r: increases then decays to 0."""
    return _spot_check(
        RadialWeight(
            "min_r_arctanh_inv", {}, Monotonicity.NONE, 0.0, True
        )
    )


def clamped_linear(c: float) -> RadialWeight:
    """g(r) = min(r, c): increasing with a flat plateau from r = c on."""
    if not 0.0 < c <= 1.0:
        raise InvalidWeight("plateau level c must lie in (0, 1]")
    return _spot_check(
        RadialWeight(
            "clamped_linear",
            {"c": float(c)},
            Monotonicity.INCREASING,
            float(c),
            True,
        )
    )


def log_damped() -> RadialWeight:
    """g(r) = r / log(2/(1-r)): vanishes at both ends, divergent G regardless.

    The slow divergence makes near-boundary solves ill-conditioned; observed
    in tests, not asserted.
    """
    return _spot_check(
        RadialWeight("log_damped", {}, Monotonicity.NONE, 0.0, True)
    )


def clamped_arctanh(pieces: Sequence[Sequence[float]]) -> RadialWeight:
    """Piecewise-linear profile in the arclength variable.

    ``pieces`` lists (s_start, slope, intercept) rows; each applies from its
    start to the next.  A constant final piece gives a finite boundary value.
    The rows must form a continuous increasing function with value 0 at 0.
    """
    pcs = _pieces_tuple(pieces)
    if pcs[0][2] != 0.0:
        raise InvalidWeight("profile must vanish at s = 0")
    for (s0, m0, b0), (s1, m1, b1) in zip(pcs, pcs[1:]):
        if abs((m0 * s1 + b0) - (m1 * s1 + b1)) > 1e-12:
            raise InvalidWeight("pieces must join continuously")
        if m0 < 0.0 or m1 < 0.0:
            raise InvalidWeight("pieces must be nondecreasing")
    # cumulative integral values at the breakpoints
    cum = [0.0]
    for (s0, m, b), (s1, _, _) in zip(pcs, pcs[1:]):
        cum.append(cum[-1] + 0.5 * m * (s1 - s0) * (s1 + s0) + b * (s1 - s0))
    last_slope = pcs[-1][1]
    g1 = pcs[-1][2] if last_slope == 0.0 else None
    strict = all(m > 0.0 for _, m, _ in pcs)
    return _spot_check(
        RadialWeight(
            "clamped_arctanh",
            {"pieces": pcs, "_cumulative": np.array(cum)},
            Monotonicity.STRICTLY_INCREASING if strict else Monotonicity.INCREASING,
            g1,
            True,
        )
    )


def table(
    r: Sequence[float],
    g: Sequence[float],
    monotonicity: Monotonicity = Monotonicity.NONE,
    divergent_G: bool | None = None,
) -> RadialWeight:
    """Sampled profile with monotone (PCHIP) interpolation.

    Monotone interpolation preserves the declared monotonicity by
    construction.  Whether G diverges cannot be inferred from finitely many
    samples, so the caller declares it (default: g(1) > 0 when covered,
    else False).
    """
    rs = np.asarray(r, dtype=float)
    gs = np.asarray(g, dtype=float)
    if rs.ndim != 1 or rs.shape != gs.shape or rs.shape[0] < 2:
        raise InvalidWeight("table needs matching 1-d r and g samples")
    if rs[0] != 0.0 or gs[0] != 0.0:
        raise InvalidWeight("table must start at (0, 0)")
    if np.any(np.diff(rs) <= 0.0) or rs[-1] > 1.0:
        raise InvalidWeight("table radii must increase within [0, 1]")
    interp = PchipInterpolator(rs, gs)
    g1 = float(gs[-1]) if rs[-1] == 1.0 else None
    if divergent_G is None:
        divergent_G = bool(g1 is not None and g1 > 0.0)
    return _spot_check(
        RadialWeight(
            "table",
            {"r": tuple(map(float, rs)), "g": tuple(map(float, gs))},
            monotonicity,
            g1,
            divergent_G,
            _interp=interp,
        )
    )


_FACTORIES = {
    "identity": identity,
    "arctanh_power": arctanh_power,
    "min_r_arctanh_inv": min_r_arctanh_inv,
    "clamped_linear": clamped_linear,
    "log_damped": log_damped,
    "clamped_arctanh": clamped_arctanh,
    "table": table,
}


def weight_from_config(config: Mapping) -> RadialWeight:
    """Build a weight from its JSON description {"kind": ..., "params": {...}}."""
    kind = config.get("kind")
    if kind not in _FACTORIES:
        raise InvalidWeight(f"unknown weight kind {kind!r}")
    params = dict(config.get("params", {}))
    if kind == "table" and "monotonicity" in params:
        params["monotonicity"] = Monotonicity(params["monotonicity"])
    w = _FACTORIES[kind](**params)
    scale = float(config.get("scale", 1.0))
    if scale <= 0.0:
        raise InvalidWeight("scale must be positive")
    if scale != 1.0:
        w = dataclasses.replace(
            w, scale=scale, g1=None if w.g1 is None else w.g1 * scale
        )
    return w
