"""Catalog of symmetric convex profiles and two-point translates.

A profile ``W`` is an even function with ``W(0) = 0``, strictly increasing on
``[0, a)`` where ``a`` is the support radius (possibly infinite).  Four kinds
are provided:

* ``cone``       W(x) = lam*|x|                 (a = inf, not strictly convex)
* ``parabola``   W(x) = lam*x**2                (a = inf)
* ``semicircle`` W(x) = 1/lam - sqrt(1/lam**2 - x**2)   (a = 1/lam)
* ``sos_wulff``  tabulated from the parametric slope representation of the
  solid-on-solid droplet profile at couplings (j2, k2); a = j2/k2.

The second building block is the unique translate of a profile through two
pinned points, obtained in closed form for cone/parabola/semicircle and by
monotone root-finding on the two-contact equation otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

ArrayLike = Union[float, np.ndarray]

#: Accuracy of the tabulated sos_wulff profile (validated in the test suite;
#: interpolation with exact nodal slopes is far better than this in practice).
INTERP_TOL = 1e-6

#: Absolute tolerance on the apex abscissa in the generic two-point solver.
ROOT_TOL = 1e-10

#: Fraction of the support radius covered by the tabulated profile; beyond
#: the last node evaluation falls back to the exact parametric form.
_TABLE_COVERAGE = 0.9995


class SupportError(ValueError):
    """Evaluation outside the open support (-a, a) of a profile."""


class UnreachablePair(Exception):
    """No translate of the profile passes through both anchor points."""

    def __init__(self, j: float, h_j: float, k: float, h_k: float, reason: str):
        self.pair = ((j, h_j), (k, h_k))
        super().__init__(f"no translate through ({j}, {h_j}) and ({k}, {h_k}): {reason}")


class NumericError(RuntimeError):
    """A numerical routine failed to reach its configured accuracy."""


# ---------------------------------------------------------------------------
# sos_wulff profile tabulation
# ---------------------------------------------------------------------------

def _sos_sigma_terms(s: np.ndarray, j2: float, k2: float):
    """Profile point (x, w) and slope t at reduced slope s = j2*tan(theta).

    The projected surface tension is sigma(t) = f(t) - log((f(t)+2)/j2) with
    f(t) = sqrt(1+(j2 t)^2) - 1, and the profile is the Legendre-type pair
    x(t) = sigma'(t)/k2, z(t) = -(sigma(t) - t sigma'(t))/k2 (right half,
    absolute-value sign convention so x >= 0 increases with t).  The vertical
    shift -log(2/j2)/k2 normalizes w(0) = 0.
    """
    S = np.sqrt(1.0 + s * s)
    f = S - 1.0
    t = s / j2
    sigma = f - np.log((f + 2.0) / j2)
    dsigma = j2 * s / (S + 1.0)  # d(sigma)/dt, in closed form
    x = dsigma / k2
    w = -(sigma - t * dsigma) / k2 - math.log(2.0 / j2) / k2
    return x, w, t


def _sos_wulff_exact(j2: float, k2: float, x: ArrayLike) -> ArrayLike:
    """Parametric profile with the slope parameter eliminated.

    Solving x(t) for t gives t = 2*xi / (j2*(1 - xi^2)) with xi = k2*x/j2,
    which collapses the parametric pair to w(x) = -log(1 - xi^2)/k2.  Used as
    the beyond-table fallback and as an independent oracle in tests.
    """
    xi = np.asarray(x, dtype=float) * (k2 / j2)
    w = -np.log1p(-(xi * xi)) / k2
    return float(w) if np.ndim(x) == 0 else w


@dataclass(frozen=True)
class WulffProfile:
    """Tabulated half-profile of the solid-on-solid Wulff shape."""

    j2: float
    k2: float
    xs: np.ndarray          # strictly increasing, xs[0] = 0
    ws: np.ndarray          # strictly increasing, ws[0] = 0
    dws: np.ndarray         # exact slopes dw/dx = tan(theta) at the nodes
    _spline: CubicHermiteSpline = field(repr=False, compare=False)

    @property
    def support_radius(self) -> float:
        return self.j2 / self.k2

    def __call__(self, x: ArrayLike) -> ArrayLike:
        """Evaluate the even extension w(|x|); caller checks the support."""
        ax = np.abs(np.asarray(x, dtype=float))
        out = self._spline(np.minimum(ax, self.xs[-1]))
        beyond = ax > self.xs[-1]
        if np.any(beyond):
            out = np.where(beyond, -np.log1p(-np.square(ax * (self.k2 / self.j2))) / self.k2, out)
        return float(out) if np.ndim(x) == 0 else out


def build_sos_wulff_profile(j2: float, k2: float, node_count: int = 4096) -> WulffProfile:
    """Tabulate the solid-on-solid Wulff half-profile for x >= 0.

    Nodes are geometric in the reduced slope s = j2*tan(theta) so that the
    table resolves the steep region near the support edge; the last node is
    placed where x reaches ``_TABLE_COVERAGE`` of the support radius j2/k2.
    The interpolant is a cubic Hermite spline using the exact nodal slopes
    tan(theta), which keeps it monotone and convex at the table's accuracy.
    """
    if j2 <= 0 or k2 <= 0:
        raise ValueError(f"couplings must be positive, got j2={j2}, k2={k2}")
    if node_count < 2:
        raise ValueError(f"node_count must be >= 2, got {node_count}")
    u = _TABLE_COVERAGE
    s_max = 2.0 * u / (1.0 - u * u)
    s = np.concatenate(([0.0], np.geomspace(1e-4, s_max, node_count - 1)))
    x, w, t = _sos_sigma_terms(s, j2, k2)
    if np.any(np.diff(x) <= 0):
        raise NumericError("non-monotone x(t) in profile tabulation (sign convention bug)")
    spline = CubicHermiteSpline(x, w, t)
    return WulffProfile(j2=j2, k2=k2, xs=x, ws=w, dws=t, _spline=spline)


# ---------------------------------------------------------------------------
# Shape catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeModel:
    """A symmetric convex profile with its parameters and evaluation strategy."""

    kind: str                      # "cone" | "parabola" | "semicircle" | "sos_wulff"
    lam: float = 0.0               # slope/curvature parameter (cone/parabola/semicircle)
    j2: float = 0.0                # sos_wulff couplings
    k2: float = 0.0
    profile: WulffProfile | None = field(default=None, repr=False, compare=False)

    @property
    def support_radius(self) -> float:
        if self.kind == "semicircle":
            return 1.0 / self.lam
        if self.kind == "sos_wulff":
            return self.j2 / self.k2
        return math.inf

    @property
    def strictly_convex(self) -> bool:
        return self.kind != "cone"

    def label(self) -> str:
        if self.kind == "sos_wulff":
            return f"sos_wulff(j2={self.j2}, k2={self.k2})"
        return f"{self.kind}(lam={self.lam})"


def _check_lam(lam: float) -> float:
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    return float(lam)


def cone(lam: float) -> ShapeModel:
    return ShapeModel(kind="cone", lam=_check_lam(lam))


def parabola(lam: float) -> ShapeModel:
    return ShapeModel(kind="parabola", lam=_check_lam(lam))


def semicircle(lam: float) -> ShapeModel:
    return ShapeModel(kind="semicircle", lam=_check_lam(lam))


def sos_wulff(j2: float, k2: float, node_count: int = 4096) -> ShapeModel:
    profile = build_sos_wulff_profile(j2, k2, node_count)
    return ShapeModel(kind="sos_wulff", j2=float(j2), k2=float(k2), profile=profile)


def eval_shape(shape: ShapeModel, x: ArrayLike) -> ArrayLike:
    """Evaluate W(x); raises SupportError outside the open support."""
    a = shape.support_radius
    scalar = np.ndim(x) == 0
    if scalar:
        if not abs(x) < a:
            raise SupportError(f"|x|={abs(x)} outside support radius {a} of {shape.label()}")
    elif not np.all(np.abs(x) < a):
        worst = float(np.max(np.abs(x)))
        raise SupportError(f"|x| up to {worst} outside support radius {a} of {shape.label()}")
    if shape.kind == "cone":
        return shape.lam * abs(float(x)) if scalar else shape.lam * np.abs(x)
    if shape.kind == "parabola":
        return shape.lam * float(x) ** 2 if scalar else shape.lam * np.square(x)
    if shape.kind == "semicircle":
        r = 1.0 / shape.lam
        if scalar:
            return r - math.sqrt(r * r - float(x) ** 2)
        return r - np.sqrt(r * r - np.square(x))
    return shape.profile(x)


# ---------------------------------------------------------------------------
# Two-point translates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoPointShape:
    """The translate of a profile pinned at two substrate points.

    ``value(x) = h_star + W(x - x_star)``; the cone and parabola carry exact
    closed forms instead (max of the two slope-lam rays, and the lam-leading
    quadratic through both anchors).
    """

    shape: ShapeModel
    x_star: float
    h_star: float
    j: float
    h_j: float
    k: float
    h_k: float


def eval_two_point(tps: TwoPointShape, x: ArrayLike) -> ArrayLike:
    """Evaluate the pinned translate; raises SupportError outside its support."""
    kind = tps.shape.kind
    scalar = np.ndim(x) == 0
    if kind == "cone" and tps.j != tps.k:
        lam = tps.shape.lam
        xv = np.asarray(x, dtype=float)
        out = np.maximum(tps.h_j - lam * (xv - tps.j), tps.h_k + lam * (xv - tps.k))
        return float(out) if scalar else out
    if kind == "parabola" and tps.j != tps.k:
        lam, j, k = tps.shape.lam, tps.j, tps.k
        xv = np.asarray(x, dtype=float)
        out = lam * (xv - j) * (xv - k) + ((k - xv) * tps.h_j + (xv - j) * tps.h_k) / (k - j)
        return float(out) if scalar else out
    dx = float(x) - tps.x_star if scalar else np.asarray(x, dtype=float) - tps.x_star
    return tps.h_star + eval_shape(tps.shape, dx)


def _two_point_semicircle(shape: ShapeModel, j, h_j, k, h_k) -> TwoPointShape:
    r = 1.0 / shape.lam
    dx, dy = k - j, h_k - h_j
    d = math.hypot(dx, dy)
    if d >= 2.0 * r:
        raise UnreachablePair(j, h_j, k, h_k, f"chord {d} exceeds diameter {2 * r}")
    # center on the perpendicular bisector, on the side with the larger
    # ordinate so both anchors sit on the lower arc
    off = math.sqrt(r * r - 0.25 * d * d)
    cx = 0.5 * (j + k) - off * dy / d
    cy = 0.5 * (h_j + h_k) + off * dx / d
    if cy <= max(h_j, h_k):
        raise UnreachablePair(j, h_j, k, h_k, "no lower arc through both points (height gap too steep)")
    return TwoPointShape(shape, cx, cy - r, j, h_j, k, h_k)


def _two_point_rootfind(shape: ShapeModel, j, h_j, k, h_k, tol: float) -> TwoPointShape:
    """Solve the two-contact equation W(k - x*) - W(j - x*) = h_k - h_j.

    The left side is strictly decreasing in x* for strictly convex W, so a
    bracketing bisection is safe.
    """
    a = shape.support_radius
    dh = h_k - h_j

    def gap(xs: float) -> float:
        return eval_shape(shape, k - xs) - eval_shape(shape, j - xs)

    if math.isfinite(a):
        if k - j >= 2.0 * a:
            raise UnreachablePair(j, h_j, k, h_k, f"gap {k - j} exceeds support diameter {2 * a}")
        eps = max(1e-12, 1e-12 * a)
        lo, hi = k - a + eps, j + a - eps
        if lo >= hi:
            raise UnreachablePair(j, h_j, k, h_k, "empty feasible apex interval")
        if gap(lo) < dh or gap(hi) > dh:
            raise UnreachablePair(j, h_j, k, h_k, "height gap not achievable within the support")
    else:
        lo, hi, step = float(j), float(k), max(1.0, k - j)
        for _ in range(300):
            if gap(lo) >= dh:
                break
            lo -= step
            step *= 2.0
        else:
            raise NumericError(f"no lower bracket for apex, last lo={lo}")
        step = max(1.0, k - j)
        for _ in range(300):
            if gap(hi) <= dh:
                break
            hi += step
            step *= 2.0
        else:
            raise NumericError(f"no upper bracket for apex, last hi={hi}")
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if gap(mid) >= dh:
            lo = mid
        else:
            hi = mid
    else:
        raise NumericError(f"apex bisection stalled on bracket [{lo}, {hi}]")
    x_star = 0.5 * (lo + hi)
    h_star = h_j - eval_shape(shape, j - x_star)
    return TwoPointShape(shape, x_star, h_star, j, h_j, k, h_k)


def two_point_shape(
    shape: ShapeModel,
    j: float,
    h_j: float,
    k: float,
    h_k: float,
    method: str = "auto",
    tol: float = ROOT_TOL,
) -> TwoPointShape:
    """Unique translate of the profile through (j, h_j) and (k, h_k).

    ``j == k`` is the degenerate single-contact translate (apex at the point).
    ``method="rootfind"`` forces the generic bisection path, used to
    cross-check the closed forms.
    """
    if j > k:
        raise ValueError(f"anchors must be ordered, got j={j} > k={k}")
    if j == k:
        if h_j != h_k:
            raise ValueError(f"degenerate anchors at {j} with conflicting heights")
        return TwoPointShape(shape, float(j), float(h_j), j, h_j, k, h_k)
    if method == "auto":
        if shape.kind == "cone":
            lam = shape.lam
            x_star = 0.5 * (j + k) + (h_j - h_k) / (2.0 * lam)
            h_star = 0.5 * (h_j + h_k) - 0.5 * lam * (k - j)
            return TwoPointShape(shape, x_star, h_star, j, h_j, k, h_k)
        if shape.kind == "parabola":
            lam = shape.lam
            x_star = 0.5 * (j + k) - (h_k - h_j) / (2.0 * lam * (k - j))
            h_star = h_j - lam * (j - x_star) ** 2
            return TwoPointShape(shape, x_star, h_star, j, h_j, k, h_k)
        if shape.kind == "semicircle":
            return _two_point_semicircle(shape, j, h_j, k, h_k)
        return _two_point_rootfind(shape, j, h_j, k, h_k, tol)
    if method == "rootfind":
        return _two_point_rootfind(shape, j, h_j, k, h_k, tol)
    raise ValueError(f"unknown method {method!r}")
