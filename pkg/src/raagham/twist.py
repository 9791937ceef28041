"""Annulus twist maps and circle configurations in the plane.

Everything here is Euclidean: the symplectic form is dx^dy, a twist is the
time-tau map of a Hamiltonian depending only on the area coordinate of a
round annulus, and configurations of overlapping disks realize an Artin
graph as the nerve of round annuli.  All plane maps are exact closed forms;
the ODE integrator in ``flows`` is only ever a cross-check here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from scipy import ndimage, optimize

from .graphs import PlanarEmbedding, SimplicialGraph, incidence_nerve
from .words import Homomorphism, hom_pullback

TWO_PI = 2.0 * math.pi


# ------------------------------- profiles ----------------------------------


@dataclass(frozen=True)
class TwistProfile:
    """Flat bump h on [-a, a] with h'(b) = 2*pi at the rotation height b.

    h(t) = 2*pi*e * (t - b) * exp(-1 / (1 - ((t-b)/w)^2)) inside |t-b| < w
    and 0 elsewhere; w = min(a - b, a + b) keeps the support inside [-a, a],
    and h vanishes at the support ends together with all derivatives.
    """

    a: float
    b: float
    width: float

    def h(self, t):
        t = np.asarray(t, float)
        u = (t - self.b) / self.width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        out[inside] = TWO_PI * math.e * self.width * ui * np.exp(-1.0 / (1.0 - ui * ui))
        return out if out.ndim else float(out)

    def dh(self, t):
        t = np.asarray(t, float)
        u = (t - self.b) / self.width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        phi = np.exp(-1.0 / (1.0 - ui * ui))
        out[inside] = TWO_PI * math.e * phi * (1.0 - 2.0 * ui * ui / (1.0 - ui * ui) ** 2)
        return out if out.ndim else float(out)


def make_profile(a: float, b: float = 0.0) -> TwistProfile:
    if not (-a < b < a):
        raise ValueError(f"rotation height b={b} outside (-{a}, {a})")
    w = min(a - b, a + b)
    return TwistProfile(a=float(a), b=float(b), width=float(w))


def product_twist(profile: TwistProfile, tau: float, p):
    """Closed-form twist on the product annulus: (s, t) -> (s + tau*h'(t), t)."""
    s, t = float(p[0]), float(p[1])
    if abs(t) > profile.a + 1e-12:
        raise ValueError(f"t={t} outside [-a, a]")
    return ((s + tau * profile.dh(t)) % TWO_PI, t)


# ------------------------------- annuli ------------------------------------


@dataclass(frozen=True)
class RoundAnnulus:
    center: tuple
    r_inner: float
    r_outer: float

    def __post_init__(self):
        if not (0.0 < self.r_inner < self.r_outer):
            raise ValueError("need 0 < r_inner < r_outer")

    @property
    def area(self) -> float:
        return math.pi * (self.r_outer**2 - self.r_inner**2)

    def contains(self, pts, closed=True):
        pts = np.asarray(pts, float)
        rel = pts - np.asarray(self.center)
        r2 = np.einsum("...i,...i->...", rel, rel)
        if closed:
            return (r2 >= self.r_inner**2) & (r2 <= self.r_outer**2)
        return (r2 > self.r_inner**2) & (r2 < self.r_outer**2)

    def sample_points(self, n, rng, t_range=None):
        lo = self.r_inner**2 if t_range is None else t_range[0]
        hi = self.r_outer**2 if t_range is None else t_range[1]
        r = np.sqrt(rng.uniform(lo, hi, n))
        ang = rng.uniform(0.0, TWO_PI, n)
        return np.asarray(self.center) + np.stack([r * np.cos(ang), r * np.sin(ang)], -1)


def annuli_intersect(a: RoundAnnulus, b: RoundAnnulus) -> bool:
    """Exact test: some circle of radii in a meets some circle of radii in b."""
    d = math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
    min_sep = max(0.0, a.r_inner - b.r_outer, b.r_inner - a.r_outer)
    return min_sep <= d <= a.r_outer + b.r_outer


class AreaChart:
    """Symplectomorphism from a round annulus to a product annulus.

    s = -theta (mod 2*pi) and t = (r^2 - (r_i^2 + r_o^2)/2) / 2, so that
    ds^dt equals dx^dy including orientation; the target is S^1 x [-a, a]
    with a = (r_o^2 - r_i^2)/4.  The angular sign flip is what makes the
    chart honestly symplectic rather than merely area-preserving.
    """

    def __init__(self, annulus: RoundAnnulus):
        self.annulus = annulus
        self.mid = 0.5 * (annulus.r_inner**2 + annulus.r_outer**2)
        self.a = 0.25 * (annulus.r_outer**2 - annulus.r_inner**2)

    def to_product(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        rel = pts - np.asarray(self.annulus.center)
        r2 = np.einsum("ij,ij->i", rel, rel)
        theta = np.arctan2(rel[:, 1], rel[:, 0])
        s = (-theta) % TWO_PI
        t = 0.5 * (r2 - self.mid)
        return np.stack([s, t], -1)

    def to_plane(self, st):
        st = np.atleast_2d(np.asarray(st, float))
        r = np.sqrt(2.0 * st[:, 1] + self.mid)
        theta = -st[:, 0]
        return np.asarray(self.annulus.center) + np.stack(
            [r * np.cos(theta), r * np.sin(theta)], -1
        )

    def t_of_radius(self, r):
        return 0.5 * (np.asarray(r, float) ** 2 - self.mid)


def area_chart(annulus: RoundAnnulus) -> AreaChart:
    return AreaChart(annulus)


# ------------------------------ plane maps ---------------------------------


class PlaneMap:
    """Bijection of the plane, the identity outside its support annuli."""

    def __init__(self, forward, backward, supports, label=""):
        self._forward = forward
        self._backward = backward
        self.supports = list(supports)
        self.label = label

    def apply(self, pts):
        pts = np.asarray(pts, float)
        single = pts.ndim == 1
        out = self._forward(np.atleast_2d(pts))
        return out[0] if single else out

    def apply_inverse(self, pts):
        pts = np.asarray(pts, float)
        single = pts.ndim == 1
        out = self._backward(np.atleast_2d(pts))
        return out[0] if single else out

    @staticmethod
    def identity():
        return PlaneMap(lambda p: p.copy(), lambda p: p.copy(), [], label="id")


def _twist_forward(chart, profile, tau, t_lo, t_hi):
    ann = chart.annulus

    def f(pts):
        out = np.array(pts, float, copy=True)
        mask = ann.contains(out)
        if not mask.any():
            return out
        st = chart.to_product(out[mask])
        ds = tau * profile.dh(st[:, 1])
        sub = (st[:, 1] >= t_lo) & (st[:, 1] < t_hi) & (ds != 0.0)
        if sub.any():
            st_sub = st[sub]
            st_sub[:, 0] = (st_sub[:, 0] + ds[sub]) % TWO_PI
            moved = chart.to_plane(st_sub)
            idx = np.where(mask)[0][sub]
            out[idx] = moved
        return out

    return f


def double_dehn_twist(annulus: RoundAnnulus, profile: TwistProfile, tau: float) -> PlaneMap:
    """Twist supported on the annulus, extended by the identity.

    Conjugates the product twist through the area chart; tau = 1 rotates the
    circle at height b by a full turn, tau = N is the N-fold iterate, and
    the map is an exact closed form (Jacobian identically 1).
    """
    chart = AreaChart(annulus)
    if profile.a > chart.a + 1e-9:
        raise ValueError("profile wider than the annulus chart target")
    fwd = _twist_forward(chart, profile, tau, -np.inf, np.inf)
    bwd = _twist_forward(chart, profile, -tau, -np.inf, np.inf)
    return PlaneMap(fwd, bwd, [annulus], label=f"twist(tau={tau})")


def half_twists(annulus: RoundAnnulus, profile: TwistProfile, tau: float):
    """The two half twists below and above the rotation circle.

    The lower map acts on t < b, the upper on t >= b, so their composition
    reproduces the full twist exactly for every tau, and their supports are
    disjoint so they commute.
    """
    chart = AreaChart(annulus)
    b = profile.b
    lower = PlaneMap(
        _twist_forward(chart, profile, tau, -np.inf, b),
        _twist_forward(chart, profile, -tau, -np.inf, b),
        [annulus],
        label="half-",
    )
    upper = PlaneMap(
        _twist_forward(chart, profile, tau, b, np.inf),
        _twist_forward(chart, profile, -tau, b, np.inf),
        [annulus],
        label="half+",
    )
    return lower, upper


def twist_hamiltonian(annulus: RoundAnnulus, profile: TwistProfile):
    """The twist's generating function and gradient in plane coordinates.

    H(z) = h(t(z)) with t the area coordinate; grad t is simply the vector
    from the annulus center, so grad H = h'(t) * (z - c).
    """
    chart = AreaChart(annulus)
    c = np.asarray(annulus.center)

    def H(pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        rel = pts - c
        t = 0.5 * (np.einsum("ij,ij->i", rel, rel) - chart.mid)
        vals = np.zeros(len(pts))
        mask = annulus.contains(pts)
        vals[mask] = profile.h(t[mask])
        return vals

    def grad(pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        rel = pts - c
        t = 0.5 * (np.einsum("ij,ij->i", rel, rel) - chart.mid)
        g = np.zeros_like(rel)
        mask = annulus.contains(pts)
        g[mask] = profile.dh(t[mask])[:, None] * rel[mask]
        return g

    return H, grad


# ------------------------- configuration building --------------------------


class PackingError(RuntimeError):
    pass


def _pack_component(graph: SimplicialGraph, comp, pos0, gap_frac=0.35, tol=1e-10):
    """Tangency packing by iterative relaxation.

    Radii live on a log scale so they stay positive; adjacent circles are
    driven to exact tangency (polished by Gauss-Newton to 1e-13), all other
    pairs are pushed apart softly and verified strictly disjoint.
    """
    comp = list(comp)
    n = len(comp)
    if n == 1:
        return {comp[0]: (np.zeros(2), 1.0)}
    index = {v: i for i, v in enumerate(comp)}
    edges = [
        (index[u], index[v])
        for u, v in graph.sorted_edges()
        if u in index and v in index
    ]
    edge_set = {tuple(sorted(e)) for e in edges}
    non_edges = [
        (i, j)
        for i, j in itertools.combinations(range(n), 2)
        if (i, j) not in edge_set
    ]
    p0 = np.array([pos0[v] for v in comp], float)
    scale = max(p0.max(0) - p0.min(0)) if n > 1 else 1.0
    p0 = p0 / max(scale, 1e-9) * n
    # seed radii from the drawn edge lengths around each vertex
    y0 = np.zeros(n)
    for i in range(n):
        lens = [np.hypot(*(p0[i] - p0[j])) for a, b in edges for j in (a, b) if i in (a, b) and j != i]
        if lens:
            y0[i] = math.log(max(0.5 * min(lens), 1e-3))
    x0 = np.concatenate([p0.ravel(), y0])

    def unpack(x):
        return x[: 2 * n].reshape(n, 2), np.exp(x[2 * n :])

    e_i = np.array([e[0] for e in edges], int)
    e_j = np.array([e[1] for e in edges], int)
    ne_i = np.array([e[0] for e in non_edges], int)
    ne_j = np.array([e[1] for e in non_edges], int)

    def solve(start, gap):
        def residuals(x):
            pts, rad = unpack(x)
            d_e = np.hypot(*(pts[e_i] - pts[e_j]).T)
            r_tan = d_e / (rad[e_i] + rad[e_j]) - 1.0
            if len(ne_i):
                d_n = np.hypot(*(pts[ne_i] - pts[ne_j]).T)
                need = (1.0 + gap) * (rad[ne_i] + rad[ne_j])
                r_sep = np.minimum(0.0, d_n / need - 1.0) * 3.0
            else:
                r_sep = np.zeros(0)
            return np.concatenate([r_tan, r_sep, 0.01 * x[2 * n :], pts[0]])

        sol = optimize.least_squares(
            residuals, start, xtol=3e-16, ftol=3e-16, gtol=3e-16, max_nfev=6000
        )
        x = sol.x
        # Gauss-Newton polish on the tangency equalities alone; the manifold
        # of exact packings is a few steps from the least-squares point.
        for _ in range(100):
            pts, rad = unpack(x)
            r = np.array(
                [np.hypot(*(pts[i] - pts[j])) - rad[i] - rad[j] for i, j in edges]
            )
            if not len(r) or np.abs(r).max() < 1e-13:
                break
            J = np.zeros((len(edges), 3 * n))
            for row, (i, j) in enumerate(edges):
                diff = pts[i] - pts[j]
                d = np.hypot(*diff)
                u = diff / d
                J[row, 2 * i : 2 * i + 2] = u
                J[row, 2 * j : 2 * j + 2] = -u
                J[row, 2 * n + i] = -rad[i]
                J[row, 2 * n + j] = -rad[j]
            step, *_ = np.linalg.lstsq(J, r, rcond=None)
            x = x - step
        return x

    last_error = None
    x = x0
    for attempt_gap in (gap_frac, 2.0 * gap_frac, 4.0 * gap_frac):
        x = solve(x, attempt_gap)
        pts, rad = unpack(x)
        worst = 0.0
        for i, j in edges:
            worst = max(worst, abs(np.hypot(*(pts[i] - pts[j])) - rad[i] - rad[j]))
        if worst > tol:
            last_error = f"tangency residual {worst:.2e} above {tol:.0e}"
            continue
        # gap_frac is only a preference; strict disjointness is what must hold
        separated = all(
            np.hypot(*(pts[i] - pts[j])) > (rad[i] + rad[j]) * (1.0 + 1e-6)
            for i, j in non_edges
        )
        if not separated:
            last_error = "non-adjacent circles not separated"
            continue
        return {v: (pts[index[v]], float(rad[index[v]])) for v in comp}
    raise PackingError(last_error)


def _disk_triple_intersects(circles, i, j, k, margin=0.0):
    """Do three closed disks share a point?  Exact up to the margin."""

    def inside(p, idx):
        c, r = circles[idx]
        return np.hypot(*(p - c)) <= r + margin

    def crossings(ia, ib):
        (c1, r1), (c2, r2) = circles[ia], circles[ib]
        d = np.hypot(*(c2 - c1))
        if d > r1 + r2 or d < abs(r1 - r2) or d == 0:
            return []
        x = (d * d + r1 * r1 - r2 * r2) / (2 * d)
        h2 = r1 * r1 - x * x
        if h2 < 0:
            return []
        h = math.sqrt(max(h2, 0.0))
        u = (c2 - c1) / d
        n = np.array([-u[1], u[0]])
        base = c1 + x * u
        return [base + h * n, base - h * n]

    for a, b, c in ((i, j, k), (i, k, j), (j, k, i)):
        for p in crossings(a, b):
            if inside(p, c):
                return True
    for a, b, c in ((i, j, k), (j, i, k), (k, i, j)):
        if inside(circles[a][0], b) and inside(circles[a][0], c):
            return True
    return False


def _inflation_valid(graph, packed, order, delta, gap_floor):
    circles = {v: (packed[v][0], packed[v][1] * (1.0 + delta)) for v in order}
    for u, v in itertools.combinations(order, 2):
        (cu, ru), (cv, rv) = circles[u], circles[v]
        d = np.hypot(*(cu - cv))
        if graph.has_edge(u, v):
            if not (abs(ru - rv) + 1e-12 < d < ru + rv - 1e-12):
                return False
        else:
            if d - ru - rv < gap_floor:
                return False
    idx = list(order)
    carr = [circles[v] for v in idx]
    for i, j, k in itertools.combinations(range(len(idx)), 3):
        pairs = [(i, j), (i, k), (j, k)]
        if all(
            np.hypot(*(carr[a][0] - carr[b][0])) < carr[a][1] + carr[b][1]
            for a, b in pairs
        ):
            if _disk_triple_intersects(carr, i, j, k, margin=1e-9):
                return False
    return True


@dataclass
class Configuration:
    """Circles, disks, annuli and punctures realizing an Artin graph."""

    graph: SimplicialGraph
    centers: Mapping  # v -> np.array(2)
    radii: Mapping  # v -> inflated circle radius (the circle C_v)
    widths: Mapping  # v -> annulus half-width in radius
    annuli: Mapping  # v -> RoundAnnulus
    punctures_on_circles: Mapping  # v -> (2, 2) array, the two points of P_v
    region_points: list  # one (2, 2) array per complementary component
    far_point: np.ndarray  # q: avoids every annulus and every disk
    basepoint: np.ndarray
    provenance: dict

    def all_punctures(self):
        pts = [self.punctures_on_circles[v] for v in self.graph.vertices]
        pts += list(self.region_points)
        pts.append(self.far_point[None, :])
        return np.concatenate(pts, 0)

    def central_circle_points(self, v, n=8):
        c, r = self.centers[v], self.radii[v]
        ang = np.arange(n) * TWO_PI / n + 0.1
        return c + r * np.stack([np.cos(ang), np.sin(ang)], -1)

    def near_puncture_points(self, v, frac=0.4):
        """Points radially offset from each puncture of P_v, off the circle."""
        c, r, w = self.centers[v], self.radii[v], self.widths[v]
        out = []
        for p in self.punctures_on_circles[v]:
            u = (p - c) / np.hypot(*(p - c))
            out.append(c + (r + frac * w) * u)
            out.append(c + (r - frac * w) * u)
        return np.array(out)

    def overlap_points(self, u, v, n=4):
        """Points inside both A(u) and A(v), off both rotation circles.

        Points exactly on a central circle come back to themselves under the
        integer twist, so probes start on C_u inside A(v) and step radially
        off it by a fraction of the smaller width.
        """
        intervals = _circle_in_annulus_intervals(
            self.centers[u], self.radii[u], self.annuli[v]
        )
        if not intervals:
            raise ValueError(f"annuli of {u!r} and {v!r} do not overlap")
        lo, hi = max(intervals, key=lambda iv: iv[1] - iv[0])
        off = 0.35 * min(self.widths[u], self.widths[v])
        combos = [(0.5, off), (0.5, -off), (0.35, 0.6 * off), (0.65, -0.6 * off)]
        c, r = self.centers[u], self.radii[u]
        pts = []
        for k in range(n):
            frac, d = combos[k % len(combos)]
            ang = lo + (hi - lo) * frac
            unit = np.array([math.cos(ang), math.sin(ang)])
            pts.append(c + (r + d) * unit)
        pts = np.array(pts)
        keep = self.annuli[u].contains(pts) & self.annuli[v].contains(pts)
        if not keep.all():  # pragma: no cover - transversal crossings keep all
            pts = pts[keep]
        return pts

    def marked_points(self):
        pts = []
        for v in self.graph.vertices:
            pts.append(self.central_circle_points(v))
            pts.append(self.near_puncture_points(v))
        for u, v in self.graph.sorted_edges():
            pts.append(self.overlap_points(u, v))
            pts.append(self.overlap_points(v, u))
        return np.concatenate(pts, 0)


def _circle_in_annulus_intervals(center, radius, ann: RoundAnnulus):
    """Angular intervals of the circle (center, radius) lying inside ann."""
    c = np.asarray(center, float)
    rel = np.asarray(ann.center) - c
    d = np.hypot(*rel)
    if d < 1e-15:
        inside = ann.r_inner <= radius <= ann.r_outer
        return [(0.0, TWO_PI)] if inside else []
    phi = math.atan2(rel[1], rel[0])
    # dist(theta)^2 = radius^2 + d^2 - 2 radius d cos(theta - phi)
    def cos_bound(R):
        return (radius**2 + d**2 - R**2) / (2 * radius * d)

    c_out, c_in = cos_bound(ann.r_outer), cos_bound(ann.r_inner)
    lo_c, hi_c = max(c_out, -1.0), min(c_in, 1.0)
    if lo_c > 1.0 or hi_c < -1.0 or lo_c > hi_c:
        return []
    d_lo = math.acos(min(hi_c, 1.0))  # smallest |theta - phi| in the band
    d_hi = math.acos(max(lo_c, -1.0))
    if d_lo <= 1e-12 and d_hi >= math.pi - 1e-12:
        return [(0.0, TWO_PI)]
    out = []
    if d_hi - d_lo > 1e-12:
        out.append((phi + d_lo, phi + d_hi))
        out.append((phi - d_hi, phi - d_lo))
    return out


def _free_arc(forbidden, pad=0.02):
    """Largest arc of the circle avoiding all forbidden intervals."""
    if not forbidden:
        return (0.0, TWO_PI)
    marks = []
    for lo, hi in forbidden:
        lo, hi = lo % TWO_PI, hi % TWO_PI
        if hi < lo:
            marks.append((lo, TWO_PI))
            marks.append((0.0, hi))
        else:
            marks.append((lo, hi))
    marks.sort()
    merged = []
    for lo, hi in marks:
        if merged and lo <= merged[-1][1] + 1e-12:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    gaps = []
    for (l1, h1), (l2, h2) in zip(merged, merged[1:]):
        gaps.append((h1, l2))
    wrap = (merged[-1][1], merged[0][0] + TWO_PI)
    if wrap[1] - wrap[0] > 1e-12:
        gaps.append(wrap)
    if not gaps:
        return None
    lo, hi = max(gaps, key=lambda g: g[1] - g[0])
    if hi - lo <= 2 * pad:
        return None
    return (lo + pad, hi - pad)


def build_configuration(
    embedding: PlanarEmbedding,
    gap_frac: float = 0.35,
    grid: int = 1024,
    packing_tol: float = 1e-10,
) -> Configuration:
    """Realize the graph as the nerve of round annuli in the plane.

    Pipeline: tangency circle packing of each component (least-squares
    relaxation to tolerance 1e-10), inflation by the largest 1+delta,
    delta <= 0.2, keeping adjacent circles crossing in exactly two points and
    everything else separated with no triple disk intersections, then
    thickening each circle to an annulus of width a quarter of the local
    clearance.  Punctures: two per circle in an arc free of other annuli,
    two per complementary component located by grid flood fill, and one far
    point q outside every disk.
    """
    graph = embedding.graph
    if not graph.vertices:
        raise ValueError("empty graph has no configuration")
    gx_comps = []
    seen = set()
    for v in graph.vertices:
        if v in seen:
            continue
        comp, stack = {v}, [v]
        while stack:
            for w in graph.neighbors(stack.pop()):
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        gx_comps.append(sorted(comp, key=graph.index))

    packed = {}
    offset = 0.0
    for comp in gx_comps:
        sub = _pack_component(graph, comp, embedding.positions, gap_frac, packing_tol)
        xs = [c[0] - r for c, r in sub.values()] + [c[0] + r for c, r in sub.values()]
        lo, hi = min(xs), max(xs)
        shift = offset - lo
        for v, (c, r) in sub.items():
            packed[v] = (c + np.array([shift, 0.0]), r)
        offset += (hi - lo) + 2.0 * max(r for _, r in sub.values())

    order = list(graph.vertices)
    min_rad = min(packed[v][1] for v in order)
    min_gap = math.inf
    for u, v in itertools.combinations(order, 2):
        if not graph.has_edge(u, v):
            (cu, ru), (cv, rv) = packed[u], packed[v]
            min_gap = min(min_gap, np.hypot(*(cu - cv)) - ru - rv)
    gap_floor = 0.05 * min_rad if min_gap is math.inf else min(
        0.05 * min_rad, 0.3 * min_gap
    )

    if len(order) == 1:
        delta = 0.2
    else:
        if not _inflation_valid(graph, packed, order, 1e-6, gap_floor):
            raise PackingError("no inflation factor satisfies the crossing constraints")
        lo_d, hi_d = 1e-6, 0.2
        if _inflation_valid(graph, packed, order, hi_d, gap_floor):
            delta = hi_d
        else:
            for _ in range(60):
                mid = 0.5 * (lo_d + hi_d)
                if _inflation_valid(graph, packed, order, mid, gap_floor):
                    lo_d = mid
                else:
                    hi_d = mid
            delta = lo_d

    centers = {v: packed[v][0] for v in order}
    radii = {v: packed[v][1] * (1.0 + delta) for v in order}

    widths = {}
    for v in order:
        clearance = math.inf
        for u in order:
            if u == v:
                continue
            d = np.hypot(*(centers[v] - centers[u]))
            if graph.has_edge(u, v):
                clearance = min(
                    clearance, radii[v] + radii[u] - d, d - abs(radii[v] - radii[u])
                )
            else:
                clearance = min(clearance, d - radii[v] - radii[u])
        if clearance is math.inf:
            clearance = radii[v]
        widths[v] = min(0.25 * clearance, 0.5 * radii[v])

    annuli = {
        v: RoundAnnulus(tuple(centers[v]), radii[v] - widths[v], radii[v] + widths[v])
        for v in order
    }

    flags = np.zeros((len(order), len(order)), bool)
    for i, u in enumerate(order):
        for j, v in enumerate(order):
            if i < j:
                flags[i, j] = flags[j, i] = annuli_intersect(annuli[u], annuli[v])
    nerve = incidence_nerve(order, flags)
    if nerve.edges != graph.edges:
        raise PackingError("annulus nerve does not match the graph")

    punctures = {}
    for v in order:
        forbidden = []
        for u in order:
            if u != v:
                forbidden += _circle_in_annulus_intervals(centers[v], radii[v], annuli[u])
        arc = _free_arc(forbidden)
        if arc is None:
            raise PackingError(f"no free arc on the circle of {v!r}")
        lo, hi = arc
        ang = np.array([lo + (hi - lo) / 3.0, lo + 2.0 * (hi - lo) / 3.0])
        punctures[v] = centers[v] + radii[v] * np.stack([np.cos(ang), np.sin(ang)], -1)

    region_points, far, base, grid_info = _complementary_points(annuli, order, grid)

    return Configuration(
        graph=graph,
        centers=centers,
        radii=radii,
        widths=widths,
        annuli=annuli,
        punctures_on_circles=punctures,
        region_points=region_points,
        far_point=far,
        basepoint=base,
        provenance={
            "delta": delta,
            "gap_frac": gap_frac,
            "grid": grid,
            "widths": {str(v): widths[v] for v in order},
            "components": grid_info,
        },
    )


def _complementary_points(annuli, order, grid):
    """Two interior points per component of the annulus complement."""
    outs = np.array([annuli[v].r_outer for v in order])
    cs = np.array([annuli[v].center for v in order])
    margin = 0.6 * outs.max()
    lo = (cs - outs[:, None]).min(0) - margin
    hi = (cs + outs[:, None]).max(0) + margin
    xs = np.linspace(lo[0], hi[0], grid)
    ys = np.linspace(lo[1], hi[1], grid)
    cell = max(xs[1] - xs[0], ys[1] - ys[0])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    blocked = np.zeros(X.shape, bool)
    pad = 0.75 * cell
    for v in order:
        a = annuli[v]
        d2 = (X - a.center[0]) ** 2 + (Y - a.center[1]) ** 2
        blocked |= (d2 >= (a.r_inner - pad) ** 2) & (d2 <= (a.r_outer + pad) ** 2)
    labels, ncomp = ndimage.label(~blocked)
    region_points = []
    for comp_id in range(1, ncomp + 1):
        mask = labels == comp_id
        if mask.sum() < 4:
            continue
        edt = ndimage.distance_transform_edt(mask)
        i1 = np.unravel_index(np.argmax(edt), edt.shape)
        p1 = np.array([X[i1], Y[i1]])
        far_mask = mask & (
            (X - p1[0]) ** 2 + (Y - p1[1]) ** 2 > (3 * cell) ** 2
        )
        if far_mask.any():
            edt2 = np.where(far_mask, edt, -1.0)
            i2 = np.unravel_index(np.argmax(edt2), edt2.shape)
        else:  # tiny region: second-best point suffices
            edt[i1] = -1.0
            i2 = np.unravel_index(np.argmax(edt), edt.shape)
        p2 = np.array([X[i2], Y[i2]])
        region_points.append(np.stack([p1, p2]))
    far = hi + np.array([margin, margin])
    base = np.array([hi[0] + margin, lo[1] - margin])
    return region_points, far, base, {"n_components": len(region_points), "cell": cell}


# ----------------------------- representation ------------------------------


@dataclass
class Representation:
    """Vertex generators realized as iterated double Dehn twists.

    Words over word_graph are evaluated by the flows module; when the graph
    needed a planar emulator the stored pullback homomorphism rewrites words
    over the cover before any geometry is touched.
    """

    word_graph: SimplicialGraph
    config: Configuration
    N: int
    profiles: Mapping
    pullback: Optional[Homomorphism] = None

    def generator_map(self, v, tau) -> PlaneMap:
        return double_dehn_twist(self.config.annuli[v], self.profiles[v], tau)

    def generator_field(self, v):
        return twist_hamiltonian(self.config.annuli[v], self.profiles[v])

    def supports(self, v):
        """Annuli supporting the image of the word-graph generator g_v."""
        if self.pullback is None:
            return [self.config.annuli[v]]
        return [self.config.annuli[x] for x, _ in self.pullback.images[v].letters]


def _profile_for_circle(annulus: RoundAnnulus, circle_radius: float) -> TwistProfile:
    chart = AreaChart(annulus)
    b = float(chart.t_of_radius(circle_radius))
    return make_profile(chart.a, b)


def build_representation(
    graph: SimplicialGraph,
    N: int,
    emulator=None,
    gap_frac: float = 0.35,
    grid: int = 1024,
) -> Representation:
    """Send each generator to the N-th power of its double Dehn twist.

    N = 1 is rejected: injectivity of these twist representations is only
    guaranteed from the second iterate on.  Nonplanar graphs must supply a
    planar emulator (see find_planar_emulator); the representation is then
    the cover representation precomposed with the fiber-product pullback.
    """
    if N < 2:
        raise ValueError("iteration count N must be at least 2")
    from .graphs import NonplanarWitness, planarity

    if emulator is None:
        emb = planarity(graph)
        if isinstance(emb, NonplanarWitness):
            raise ValueError(
                "graph is nonplanar and no emulator was supplied; "
                "find a planar emulator or use the universal-cover route"
            )
        config = build_configuration(emb, gap_frac=gap_frac, grid=grid)
        profiles = {
            v: _profile_for_circle(config.annuli[v], config.radii[v])
            for v in graph.vertices
        }
        return Representation(
            word_graph=graph, config=config, N=N, profiles=profiles, pullback=None
        )

    config = build_configuration(emulator.embedding, gap_frac=gap_frac, grid=grid)
    profiles = {
        v: _profile_for_circle(config.annuli[v], config.radii[v])
        for v in emulator.cover.vertices
    }
    pullback = hom_pullback(emulator.projection)
    return Representation(
        word_graph=graph,
        config=config,
        N=N,
        profiles=profiles,
        pullback=pullback,
    )
