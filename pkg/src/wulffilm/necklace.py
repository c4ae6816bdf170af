"""Envelope interface and contact-point extraction.

Given a substrate and a convex profile, the envelope I(x) is the pointwise
infimum of all translates of the profile that avoid the substrate set,
equivalently the supremum of two-point translates pinned on substrate pairs.
The contact set B collects the sites where the envelope touches the
substrate; between consecutive contacts the envelope is a single pinned
translate, so a necklace is fully described by its ordered contacts.

Algorithms:

* generic left-to-right stack scan (pop while the stack top falls strictly
  below the translate through its neighbors), valid for strictly convex
  full-support profiles and for the two closed-form profiles;
* parabola fast path: upper concave hull of the shifted points
  (i, h_i - lam*i^2) by monotone chain;
* cone fast path: prefix/suffix maxima of the tent transforms h_i +- lam*i;
* an O(N^3) all-pairs brute force used as ground truth in tests.

Window convention: the first and last window sites are always contacts
(interior sites are tested against pairs strictly sandwiching them only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .shapes import (
    ShapeModel,
    SupportError,
    TwoPointShape,
    UnreachablePair,
    eval_shape,
    eval_two_point,
    two_point_shape,
)
from .substrate import PERIODIC, WINDOW, Substrate

#: Largest window accepted by the O(N^3) brute-force oracle.
BRUTEFORCE_CAP = 400


@dataclass(frozen=True)
class Necklace:
    """Ordered contact sites with heights, plus an envelope evaluator.

    ``indices`` may extend one contact past the window on either side for
    periodic necklaces, so that every in-window point falls inside a gap.
    Immutable after construction; the per-gap translate cache is memoized.
    """

    indices: np.ndarray
    heights: np.ndarray
    shape: ShapeModel
    window: tuple[int, int]
    boundary: str = WINDOW
    _gap_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if np.any(np.diff(self.indices) < 1):
            raise ValueError("contact indices must be strictly increasing")
        for name in ("indices", "heights"):
            arr = getattr(self, name)
            if arr.flags.writeable:
                try:
                    arr.flags.writeable = False
                except ValueError:  # view on foreign memory: freeze a copy
                    arr = arr.copy()
                    arr.flags.writeable = False
                    object.__setattr__(self, name, arr)

    @property
    def contacts(self) -> tuple[np.ndarray, np.ndarray]:
        """(sites, heights) of the contacts attributed to the window."""
        lo, hi = self.window
        sel = (self.indices >= lo) & (self.indices <= hi)
        return self.indices[sel], self.heights[sel]

    @property
    def gaps(self) -> np.ndarray:
        sites, _ = self.contacts
        return np.diff(sites)

    def _gap_shape(self, g: int) -> TwoPointShape:
        tps = self._gap_cache.get(g)
        if tps is None:
            b, h = self.indices, self.heights
            tps = two_point_shape(self.shape, float(b[g]), float(h[g]),
                                  float(b[g + 1]), float(h[g + 1]))
            self._gap_cache[g] = tps
        return tps

    def envelope(self, x):
        return envelope_eval(self, x)


# ---------------------------------------------------------------------------
# Fast scans
# ---------------------------------------------------------------------------

@njit(cache=True)
def _hull_scan(g: np.ndarray) -> np.ndarray:
    """Upper concave hull indices of (i, g_i), keeping collinear points."""
    n = g.shape[0]
    stack = np.empty(n, np.int64)
    top = 0
    stack[0] = 0
    for q in range(1, n):
        while top >= 1:
            m = stack[top]
            p = stack[top - 1]
            # pop m iff strictly below the chord p-q
            if (g[q] - g[p]) * (m - p) - (g[m] - g[p]) * (q - p) > 0.0:
                top -= 1
            else:
                break
        top += 1
        stack[top] = q
    return stack[: top + 1].copy()


@njit(cache=True)
def _stack_scan_parabola(h: np.ndarray, lam: float) -> np.ndarray:
    """Generic stack scan with the parabola two-point translate inlined."""
    n = h.shape[0]
    stack = np.empty(n, np.int64)
    top = 0
    stack[0] = 0
    for q in range(1, n):
        while top >= 1:
            m = stack[top]
            p = stack[top - 1]
            w = lam * (m - p) * (m - q) + ((q - m) * h[p] + (m - p) * h[q]) / (q - p)
            if h[m] < w:
                top -= 1
            else:
                break
        top += 1
        stack[top] = q
    return stack[: top + 1].copy()


def _tent_contacts_cone(h: np.ndarray, lam: float) -> np.ndarray:
    """Window contact set for the cone via tent-transform running maxima.

    Interior site i is a contact iff h_i + lam*i beats every site to its left
    and h_i - lam*i beats every site to its right; window endpoints are
    contacts by convention (no sandwiching pair exists).
    """
    n = h.size
    ok = np.ones(n, dtype=bool)
    if n > 2:
        i = np.arange(n, dtype=float)
        s = h + lam * i
        r = h - lam * i
        pre = np.maximum.accumulate(s)
        suf = np.maximum.accumulate(r[::-1])[::-1]
        ok[1:-1] = (s[1:-1] >= pre[:-2]) & (r[1:-1] >= suf[2:])
    return np.where(ok)[0].astype(np.int64)


def _stack_scan_generic(h: np.ndarray, shape: ShapeModel) -> np.ndarray:
    """Stack scan with two-point pop tests.

    A candidate pair through which no translate exists imposes no constraint,
    and any narrower pair with the same right end dominates it, so the pop
    loop stops there; final gaps are re-checked by the caller.
    """
    stack = [0]
    for q in range(1, h.size):
        hq = float(h[q])
        while len(stack) >= 2:
            m, p = stack[-1], stack[-2]
            try:
                tps = two_point_shape(shape, float(p), float(h[p]), float(q), hq)
            except UnreachablePair:
                break
            if h[m] < eval_two_point(tps, float(m)):
                stack.pop()
            else:
                break
        stack.append(q)
    return np.asarray(stack, dtype=np.int64)


def contact_set(
    substrate: Substrate,
    shape: ShapeModel,
    method: str = "auto",
    verify: bool = False,
) -> Necklace:
    """Contact set of the envelope over the substrate window.

    ``method``: "auto" picks the tent path for the cone, the hull transform
    for the parabola, and the generic stack otherwise; "stack", "hull" and
    "tent" force a specific algorithm.  Finite-support profiles whose gaps
    exceed the reachable span raise UnreachablePair (fall back to
    ``envelope_bruteforce`` in that case).
    """
    h = np.asarray(substrate.heights, dtype=float)
    if method == "auto":
        method = {"cone": "tent", "parabola": "hull"}.get(shape.kind, "stack")
    if method == "tent":
        if shape.kind != "cone":
            raise ValueError("tent method applies to the cone only")
        idx = _tent_contacts_cone(h, shape.lam)
    elif method == "hull":
        if shape.kind != "parabola":
            raise ValueError("hull method applies to the parabola only")
        g = h - shape.lam * np.square(np.arange(h.size, dtype=float))
        idx = _hull_scan(g)
    elif method == "stack":
        if shape.kind == "parabola":
            idx = _stack_scan_parabola(h, shape.lam)
        else:
            idx = _stack_scan_generic(h, shape)
    else:
        raise ValueError(f"unknown method {method!r}")
    neck = Necklace(indices=idx, heights=h[idx], shape=shape,
                    window=(0, h.size - 1), boundary=WINDOW)
    if math.isfinite(shape.support_radius):
        # a returned necklace must be evaluable on every gap; raise rather
        # than hand back a structure with holes (use envelope_bruteforce)
        for g in range(len(idx) - 1):
            neck._gap_shape(g)
    if verify:
        verify_local_conditions(neck, h)
    return neck


def contact_set_bruteforce(substrate: Substrate, shape: ShapeModel,
                           cap: int = BRUTEFORCE_CAP) -> Necklace:
    """Ground-truth contact set: test every interior site against all pairs.

    O(N^3); the cone pair maximum factorizes into independent left/right tent
    maxima, which is the same supremum evaluated directly.  Pairs through
    which no translate exists impose no constraint and are skipped.
    """
    h = np.asarray(substrate.heights, dtype=float)
    n = h.size
    if n > cap:
        raise ValueError(f"window {n} exceeds brute-force cap {cap}")
    ok = np.ones(n, dtype=bool)
    if shape.kind == "parabola":
        lam = shape.lam
        for i in range(1, n - 1):
            j = np.arange(0, i, dtype=float)[:, None]
            k = np.arange(i + 1, n, dtype=float)[None, :]
            w = lam * (i - j) * (i - k) + ((k - i) * h[:i, None] + (i - j) * h[None, i + 1:]) / (k - j)
            ok[i] = h[i] >= w.max()
    elif shape.kind == "cone":
        lam = shape.lam
        for i in range(1, n - 1):
            left = np.max(h[:i] - lam * (i - np.arange(i, dtype=float)))
            right = np.max(h[i + 1:] - lam * (np.arange(i + 1, n, dtype=float) - i))
            ok[i] = h[i] >= max(left, right)
    else:
        for i in range(1, n - 1):
            good = True
            for j in range(i):
                for k in range(i + 1, n):
                    try:
                        tps = two_point_shape(shape, float(j), float(h[j]), float(k), float(h[k]))
                    except UnreachablePair:
                        continue
                    if h[i] < eval_two_point(tps, float(i)):
                        good = False
                        break
                if not good:
                    break
            ok[i] = good
    idx = np.where(ok)[0].astype(np.int64)
    return Necklace(indices=idx, heights=h[idx], shape=shape,
                    window=(0, n - 1), boundary=WINDOW)


# ---------------------------------------------------------------------------
# Envelope evaluation
# ---------------------------------------------------------------------------

def envelope_eval(necklace: Necklace, x):
    """Envelope height I(x) for x inside the window span.

    Locates the gap containing x and evaluates its cached translate; at
    contact sites returns the substrate height exactly.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    b = necklace.indices
    if xs.size and (xs.min() < b[0] or xs.max() > b[-1]):
        raise SupportError(
            f"envelope evaluation outside contact span [{b[0]}, {b[-1]}]")
    g = np.clip(np.searchsorted(b, xs, side="right") - 1, 0, len(b) - 2)
    out = np.empty_like(xs)
    for gap in np.unique(g):
        sel = g == gap
        out[sel] = eval_two_point(necklace._gap_shape(int(gap)), xs[sel])
    pos = np.searchsorted(b, xs)
    pos = np.minimum(pos, len(b) - 1)
    at = b[pos] == xs
    if np.any(at):
        out[at] = necklace.heights[pos[at]]
    return float(out[0]) if scalar else out


def envelope_bruteforce(substrate: Substrate, shape: ShapeModel,
                        grid_step: float = 0.01, xs: np.ndarray | None = None):
    """Direct envelope: lower a translate above each apex until it touches.

    Discretizes apex positions on a grid of ``grid_step``; for each apex the
    resting height is the maximum over in-support sites of h_i - W(i - x*),
    and the envelope at x is the minimum over in-support apexes of
    h*(x*) + W(x - x*).  Converges to I(x) as the step shrinks; this is the
    only evaluator guaranteed for profiles whose support is too small for the
    two-point construction.  Returns (xs, values).
    """
    if grid_step <= 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    h = np.asarray(substrate.heights, dtype=float)
    n = h.size
    sites = np.arange(n, dtype=float)
    if xs is None:
        xs = sites.copy()
    else:
        xs = np.asarray(xs, dtype=float)
    a = shape.support_radius
    if math.isfinite(a):
        # only apexes within the support of some evaluation point matter
        pad = a * (1.0 - 1e-9)
        lo_apex, hi_apex = xs.min() - pad, xs.max() + pad
    else:
        # the translate realizing I(x) is pinned on two sites, so its apex
        # lies within the site hull plus the height-spread offset
        pad = float(h.max() - h.min()) / (2.0 * shape.lam) + 1.0
        lo_apex = min(0.0, float(xs.min())) - pad
        hi_apex = max(n - 1.0, float(xs.max())) + pad
    apexes = np.arange(lo_apex, hi_apex + grid_step, grid_step)
    a_eval = a * (1.0 - 1e-12) if math.isfinite(a) else math.inf
    env = np.full(xs.shape, np.inf)
    chunk = max(1, int(4_000_000 // max(n, xs.size)))
    for start in range(0, apexes.size, chunk):
        ap = apexes[start:start + chunk]
        d = sites[None, :] - ap[:, None]
        inside = np.abs(d) < a_eval
        w = eval_shape(shape, np.where(inside, d, 0.0))
        rest = np.where(inside, h[None, :] - w, -np.inf).max(axis=1)
        usable = np.isfinite(rest)
        if not np.any(usable):
            continue
        dx = xs[None, :] - ap[:, None]
        inside_x = (np.abs(dx) < a_eval) & usable[:, None]
        wx = eval_shape(shape, np.where(inside_x, dx, 0.0))
        vals = np.where(inside_x, rest[:, None] + wx, np.inf).min(axis=0)
        env = np.minimum(env, vals)
    return xs, env


def periodic_contact_set(substrate: Substrate, shape: ShapeModel,
                         method: str = "auto") -> Necklace:
    """Contact set under periodic boundary via three-fold tiling.

    Runs the window construction on three concatenated copies and attributes
    the contacts of the central copy; a documented approximation, accurate
    when the window greatly exceeds the typical contact gap.
    """
    if substrate.boundary != PERIODIC:
        raise ValueError("periodic_contact_set requires a periodic substrate")
    h = np.asarray(substrate.heights, dtype=float)
    n = h.size
    tiled = Substrate(heights=np.concatenate([h, h, h]), boundary=WINDOW,
                      provenance={"generator": "tiled", "base": substrate.provenance})
    neck3 = contact_set(tiled, shape, method=method)
    c = neck3.indices - n
    heights = neck3.heights
    central = np.where((c >= 0) & (c <= n - 1))[0]
    if central.size == 0:
        # every central site dominated from the copies; keep the bracketing pair
        g = int(np.searchsorted(c, 0)) - 1
        sel = slice(g, g + 2)
    else:
        lo = central[0] - 1 if c[central[0]] > 0 else central[0]
        hi = central[-1] + 1 if c[central[-1]] < n - 1 else central[-1]
        sel = slice(lo, hi + 1)
    return Necklace(indices=c[sel], heights=heights[sel], shape=shape,
                    window=(0, n - 1), boundary=PERIODIC)


# ---------------------------------------------------------------------------
# Post-hoc checks and margins
# ---------------------------------------------------------------------------

def verify_local_conditions(necklace: Necklace, heights: np.ndarray,
                            tol: float = 1e-8) -> None:
    """Check the two defining local conditions of a necklace; raise on failure.

    (i) every non-contact site sits strictly below the translate pinned on
    its gap endpoints, and (ii) every contact with two neighbors sits on or
    above the translate pinned on those neighbors.  Site indexing wraps for
    periodic necklaces.  A neighbor pair through which no translate exists
    imposes no constraint.
    """
    h = np.asarray(heights, dtype=float)
    n = h.size
    b = necklace.indices
    x = necklace.heights
    for g in range(len(b) - 1):
        tps = necklace._gap_shape(g)
        interior = np.arange(b[g] + 1, b[g + 1], dtype=float)
        if interior.size == 0:
            continue
        w = eval_two_point(tps, interior)
        hv = h[np.asarray(interior, dtype=int) % n]
        bad = hv >= w + tol
        if np.any(bad):
            i = interior[bad][0]
            raise ValueError(f"interior condition fails at site {int(i)}: "
                             f"h={hv[bad][0]} >= translate={w[bad][0]}")
    for m in range(1, len(b) - 1):
        try:
            tps = two_point_shape(necklace.shape, float(b[m - 1]), float(x[m - 1]),
                                  float(b[m + 1]), float(x[m + 1]))
        except UnreachablePair:
            continue
        w = eval_two_point(tps, float(b[m]))
        if not x[m] >= w - tol:
            raise ValueError(f"stability condition fails at contact {int(b[m])}: "
                             f"h={x[m]} < translate={w}")


def interior_margin(shape: ShapeModel, n: int) -> int:
    """Edge margin for infinite-line statistics on an n-site window.

    Smallest integer m with W(m) >= ln(n) + 10: exponential heights have
    maxima near ln(n), so profiles pinned beyond the margin cannot reach the
    interior (the constant 10 is a safety factor).  Reproduces
    ceil((ln n + 10)/lam) for the cone and ceil(sqrt((ln n + 10)/lam)) for
    the parabola.
    """
    c = math.log(n) + 10.0
    if shape.kind == "cone":
        return math.ceil(c / shape.lam)
    if shape.kind == "parabola":
        return math.ceil(math.sqrt(c / shape.lam))
    a = shape.support_radius
    m_cap = math.ceil(a) if math.isfinite(a) else None

    def w_at(m: int) -> float:
        xa = min(float(m), a * (1.0 - 1e-12)) if math.isfinite(a) else float(m)
        return eval_shape(shape, xa)

    if m_cap is not None and w_at(m_cap) < c:
        raise ValueError(f"profile {shape.label()} too shallow for an edge margin at n={n}")
    hi = 1
    while w_at(hi) < c:
        hi *= 2
        if m_cap is not None and hi >= m_cap:
            hi = m_cap
            break
    lo = 0
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if w_at(mid) < c:
            lo = mid
        else:
            hi = mid
    return hi
