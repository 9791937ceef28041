"""Universal-cover machinery on the Poincare disk.

A discrete group of disk automorphisms spreads copies of one annulus toward
the boundary circle.  Each translate gets its own corrected twist
Hamiltonian, rescaled so the time-1 flow still rotates the translated circle
by one full turn even though the Euclidean area of the translate shrinks.
The assembled function is continuous on the closed disk, vanishes outside
the translates, and its boundary behaviour (decay of the scales, growth of
higher derivatives) is what the report functions measure.

The default group is a rank-2 Schottky pair: free reduction makes the
enumeration exact and translates of an annulus inside the fundamental
domain are guaranteed disjoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .flows import HamiltonianField
from .twist import RoundAnnulus, make_profile

TWO_PI = 2.0 * math.pi


class QuadratureError(RuntimeError):
    pass


class RegionOverlapError(RuntimeError):
    pass


# ------------------------------ Mobius maps ---------------------------------


class MobiusMap:
    """Disk automorphism z -> e^{i theta} (z - a) / (-conj(a) z + 1)."""

    def __init__(self, theta: float, a: complex):
        if abs(a) >= 1.0:
            raise ValueError("parameter a must lie inside the unit disk")
        self.theta = float(theta) % TWO_PI
        self.a = complex(a)

    @cached_property
    def matrix(self):
        e = np.exp(1j * self.theta)
        return np.array([[e, -e * self.a], [-np.conj(self.a), 1.0]], complex)

    @staticmethod
    def from_matrix(m) -> "MobiusMap":
        m = np.asarray(m, complex)
        w0 = m[0, 1] / m[1, 1]
        d0 = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) / m[1, 1] ** 2
        phase = d0 / abs(d0)
        a = -np.conj(phase) * w0
        return MobiusMap(float(np.angle(phase)), complex(a))

    @staticmethod
    def identity() -> "MobiusMap":
        return MobiusMap(0.0, 0.0)

    @staticmethod
    def rotation(phi: float) -> "MobiusMap":
        return MobiusMap(phi, 0.0)

    def __call__(self, z):
        z = np.asarray(z, complex)
        return np.exp(1j * self.theta) * (z - self.a) / (-np.conj(self.a) * z + 1.0)

    def derivative(self, z):
        z = np.asarray(z, complex)
        return (
            np.exp(1j * self.theta)
            * (1.0 - abs(self.a) ** 2)
            / (-np.conj(self.a) * z + 1.0) ** 2
        )

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "MobiusMap":
        m = self.matrix
        inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], complex)
        return MobiusMap.from_matrix(inv)

    def image_circle(self, center: complex, radius: float):
        """Center and radius of the image of a circle avoiding the pole."""
        if abs(self.a) < 1e-15:
            return self(center), radius
        pole = 1.0 / np.conj(self.a)
        refl = center + radius**2 / np.conj(pole - center)
        new_center = self(refl)
        new_radius = abs(self(center + radius) - new_center)
        return complex(new_center), float(new_radius)

    def __repr__(self):
        return f"MobiusMap(theta={self.theta:.6f}, a={self.a:.6f})"


def mobius_eval(sigma: MobiusMap, z):
    """Image and derivative at z, both by closed form."""
    return sigma(z), sigma.derivative(z)


# --------------------------- group enumeration ------------------------------


@dataclass(frozen=True)
class GroupElement:
    word: tuple  # letter ids: 2k for generator k, 2k+1 for its inverse
    map: MobiusMap

    @property
    def length(self) -> int:
        return len(self.word)

    def word_str(self, names="abcdefgh") -> str:
        if not self.word:
            return "1"
        return ".".join(
            names[l // 2] + ("" if l % 2 == 0 else "'") for l in self.word
        )


def schottky_pair(s: float = 0.98):
    """Two hyperbolic translations with disjoint isometric circles.

    The first translates along the real axis, the second along the imaginary
    axis; for s close to 1 the four isometric disks hug the boundary and the
    common exterior (a neighborhood of the origin) is a fundamental domain.
    """
    if not (0.0 < s < 1.0):
        raise ValueError("translation parameter s must be in (0, 1)")
    root = math.sqrt(1.0 - s * s)
    m1 = np.array([[1.0, s], [s, 1.0]], complex) / root
    r = np.array([[np.exp(1j * math.pi / 4), 0.0], [0.0, np.exp(-1j * math.pi / 4)]])
    m2 = r @ m1 @ np.conj(r.T)
    return [MobiusMap.from_matrix(m1), MobiusMap.from_matrix(m2)]


def schottky_interior_radius(s: float) -> float:
    """Largest disk about 0 avoiding the four isometric disks."""
    return (1.0 - math.sqrt(1.0 - s * s)) / s


def free_group_count(m: int, L: int) -> int:
    total = 1
    for k in range(1, L + 1):
        total += 2 * m * (2 * m - 1) ** (k - 1)
    return total


def enumerate_group(generators: Sequence[MobiusMap], L: int):
    """All freely reduced words of length <= L with their Mobius products."""
    gens = list(generators)
    letters = []
    for g in gens:
        letters.append(g)
        letters.append(g.inverse())
    out = [GroupElement(word=(), map=MobiusMap.identity())]
    frontier = [out[0]]
    for _ in range(L):
        nxt = []
        for el in frontier:
            last = el.word[-1] if el.word else None
            for lid, lmap in enumerate(letters):
                if last is not None and lid == last ^ 1:
                    continue
                nxt.append(
                    GroupElement(word=el.word + (lid,), map=el.map.compose(lmap))
                )
        out.extend(nxt)
        frontier = nxt
    return out


# ------------------------------- lambda scale -------------------------------


def _deriv_sq_polar(sigma: MobiusMap, center: complex, radii, thetas):
    z = center + radii[:, None] * np.exp(1j * thetas[None, :])
    d = sigma.derivative(z)
    return (d * np.conj(d)).real


def lambda_scale(
    sigma,
    annulus: RoundAnnulus,
    tol: float = 1e-8,
    max_level: int = 6,
) -> float:
    """Mass of the pulled-back area form: integral of |sigma'|^2 over the annulus.

    Adaptive polar quadrature (Gauss-Legendre radially, trapezoid in angle,
    both spectrally accurate for this smooth integrand); resolution doubles
    until successive values agree to the relative tolerance.
    """
    smap = sigma.map if isinstance(sigma, GroupElement) else sigma
    c = complex(annulus.center[0], annulus.center[1])
    prev = None
    nr, nt = 24, 48
    for _ in range(max_level):
        x, wgt = np.polynomial.legendre.leggauss(nr)
        r = 0.5 * (annulus.r_outer - annulus.r_inner) * (x + 1.0) + annulus.r_inner
        wr = 0.5 * (annulus.r_outer - annulus.r_inner) * wgt
        th = np.arange(nt) * TWO_PI / nt
        vals = _deriv_sq_polar(smap, c, r, th)
        integral = float((vals.sum(1) * (TWO_PI / nt) * r * wr).sum())
        if prev is not None and abs(integral - prev) <= tol * max(abs(integral), 1e-300):
            return integral
        prev = integral
        nr *= 2
        nt *= 2
    raise QuadratureError("lambda quadrature did not converge")


# ------------------------------ transport chart -----------------------------


class TransportChart:
    """Measure transport from the annulus with the pulled-back form to a
    product annulus S^1 x [-1/2, 1/2].

    Radius first: the height t matches the radial marginal of the density,
    so circles about the annulus center go to horizontal circles; the angle
    s then matches the conditional distribution at each radius (negated so
    the chart preserves orientation, like the flat area chart).  The
    pushforward of the normalized pulled-back form is exactly the normalized
    product form.
    """

    def __init__(
        self,
        annulus: RoundAnnulus,
        sigma,
        circle_radius: Optional[float] = None,
        n_cheb: int = 48,
        n_theta: int = 512,
    ):
        self.annulus = annulus
        self.sigma = sigma.map if isinstance(sigma, GroupElement) else sigma
        self.c = complex(annulus.center[0], annulus.center[1])
        if circle_radius is None:
            circle_radius = math.sqrt(0.5 * (annulus.r_inner**2 + annulus.r_outer**2))
        self.circle_radius = float(circle_radius)
        self.n_theta = n_theta
        thetas = np.arange(n_theta) * TWO_PI / n_theta

        def marginal(r):
            r = np.atleast_1d(np.asarray(r, float))
            vals = _deriv_sq_polar(self.sigma, self.c, r, thetas)
            return vals.mean(1) * TWO_PI * r

        self._marg = cheb.Chebyshev.interpolate(
            marginal, deg=n_cheb, domain=[annulus.r_inner, annulus.r_outer]
        )
        self._cum = self._marg.integ(lbnd=annulus.r_inner)
        self.mass = float(self._cum(annulus.r_outer))
        self._dmarg = self._marg  # dM/dr is the marginal itself
        self.b = float(self.t_of_r(self.circle_radius))
        self._angular = None

    # radial leg -------------------------------------------------------------

    def t_of_r(self, r):
        return self._cum(np.asarray(r, float)) / self.mass - 0.5

    def dt_dr(self, r):
        return self._marg(np.asarray(r, float)) / self.mass

    def r_of_t(self, t):
        t = np.atleast_1d(np.asarray(t, float))
        lo = np.full(t.shape, self.annulus.r_inner)
        hi = np.full(t.shape, self.annulus.r_outer)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            high = self.t_of_r(mid) > t
            hi = np.where(high, mid, hi)
            lo = np.where(high, lo, mid)
        return 0.5 * (lo + hi)

    # angular leg (built lazily) ----------------------------------------------

    def _build_angular(self):
        from scipy.interpolate import RectBivariateSpline

        nr, nt = 64, self.n_theta
        radii = np.linspace(self.annulus.r_inner, self.annulus.r_outer, nr)
        thetas = np.linspace(0.0, TWO_PI, nt + 1)
        dens = _deriv_sq_polar(self.sigma, self.c, radii, thetas[:-1] % TWO_PI)
        dens = np.concatenate([dens, dens[:, :1]], axis=1)
        cum = np.cumsum(0.5 * (dens[:, 1:] + dens[:, :-1]) * np.diff(thetas), axis=1)
        cum = np.concatenate([np.zeros((nr, 1)), cum], axis=1)
        cdf = cum / cum[:, -1:]
        self._F = RectBivariateSpline(radii, thetas, cdf, kx=3, ky=3)
        fgrid = np.linspace(0.0, 1.0, nt + 1)
        theta_inv = np.empty((nr, nt + 1))
        for i in range(nr):
            theta_inv[i] = np.interp(fgrid, cdf[i], thetas)
        self._Finv = RectBivariateSpline(radii, fgrid, theta_inv, kx=3, ky=3)
        self._angular = True

    def forward(self, w):
        """Plane points of the annulus (complex) -> (s, t) product points."""
        if self._angular is None:
            self._build_angular()
        w = np.atleast_1d(np.asarray(w, complex))
        rel = w - self.c
        r = np.abs(rel)
        theta = np.angle(rel) % TWO_PI
        F = self._F.ev(r, theta)
        s = (-TWO_PI * F) % TWO_PI
        t = self.t_of_r(r)
        return np.stack([s, np.asarray(t)], -1)

    def inverse(self, st):
        if self._angular is None:
            self._build_angular()
        st = np.atleast_2d(np.asarray(st, float))
        r = self.r_of_t(st[:, 1])
        F = (-st[:, 0] / TWO_PI) % 1.0
        theta = self._Finv.ev(r, F)
        # Newton polish against the exact conditional density
        norm = self._marg(r) / r  # integral of |sigma'|^2 over the circle
        for _ in range(4):
            resid = self._F.ev(r, theta % TWO_PI) - F
            dens = (
                np.abs(self.sigma.derivative(self.c + r * np.exp(1j * theta))) ** 2
                / norm
            )
            theta = theta - resid / np.maximum(dens, 1e-12)
        return self.c + r * np.exp(1j * theta)


def transport_chart(
    annulus: RoundAnnulus, sigma, circle_radius: Optional[float] = None
) -> TransportChart:
    return TransportChart(annulus, sigma, circle_radius=circle_radius)


# --------------------------- corrected Hamiltonians --------------------------


class CorrectedHamiltonian:
    """Twist Hamiltonian on one translate of the annulus.

    On sigma(A) the function is (lambda^2 / 2 pi) * h(t(sigma^{-1}(z)))
    where t is the transported height and h a bump with h'(b) = 2 pi at the
    height b of the translated circle; the scale makes the time-1 flow with
    respect to the Euclidean form rotate that circle exactly once.
    """

    def __init__(self, element: GroupElement, annulus: RoundAnnulus, circle_radius=None):
        self.element = element
        self.annulus = annulus
        self.chart = TransportChart(annulus, element.map, circle_radius=circle_radius)
        self.lambda2 = self.chart.mass
        self.b = self.chart.b
        self.profile = make_profile(0.5, self.b)
        self.scale = self.lambda2 / TWO_PI
        self.inv = element.map.inverse()
        c = complex(annulus.center[0], annulus.center[1])
        self.outer_center, self.outer_radius = element.map.image_circle(
            c, annulus.r_outer
        )
        self.inner_center, self.inner_radius = element.map.image_circle(
            c, annulus.r_inner
        )
        self.circle_center, self.circle_image_radius = element.map.image_circle(
            c, self.chart.circle_radius
        )

    @property
    def diameter(self) -> float:
        return 2.0 * self.outer_radius

    def sup_abs(self) -> float:
        tgrid = np.linspace(-0.5, 0.5, 2001)
        return float(self.scale * np.abs(self.profile.h(tgrid)).max())

    def contains(self, z):
        z = np.asarray(z, complex)
        return (np.abs(z - self.outer_center) <= self.outer_radius + 1e-13) & (
            np.abs(z - self.inner_center) >= self.inner_radius - 1e-13
        )

    def _t_of_z(self, z):
        w = self.inv(z)
        r = np.abs(w - self.chart.c)
        return self.chart.t_of_r(r), w, r

    def value_complex(self, z):
        z = np.atleast_1d(np.asarray(z, complex))
        out = np.zeros(z.shape, float)
        mask = self.contains(z)
        if mask.any():
            t, _, _ = self._t_of_z(z[mask])
            out[mask] = self.scale * self.profile.h(np.clip(t, -0.5, 0.5))
        return out

    def gradient_complex(self, z):
        """Complex gradient H_x + i H_y (chain rule through the inverse map)."""
        z = np.atleast_1d(np.asarray(z, complex))
        out = np.zeros(z.shape, complex)
        mask = self.contains(z)
        if mask.any():
            zm = z[mask]
            t, w, r = self._t_of_z(zm)
            t = np.clip(t, -0.5, 0.5)
            gw = (
                self.scale
                * self.profile.dh(t)
                * self.chart.dt_dr(r)
                * (w - self.chart.c)
                / np.where(r == 0, 1.0, r)
            )
            out[mask] = np.conj(self.inv.derivative(zm)) * gw
        return out

    def value(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        return self.value_complex(pts[:, 0] + 1j * pts[:, 1])

    def gradient(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        g = self.gradient_complex(pts[:, 0] + 1j * pts[:, 1])
        return np.stack([g.real, g.imag], -1)

    def field(self) -> HamiltonianField:
        return HamiltonianField(self.value, self.gradient, support_radius=1.0)

    def tracked_circle_points(self, n=8):
        ang = np.arange(n) * TWO_PI / n + 0.05
        w = self.chart.c + self.chart.circle_radius * np.exp(1j * ang)
        z = self.element.map(w)
        return np.stack([z.real, z.imag], -1)


def corrected_hamiltonian(
    sigma: GroupElement, annulus: RoundAnnulus, circle_radius=None
) -> CorrectedHamiltonian:
    return CorrectedHamiltonian(sigma, annulus, circle_radius=circle_radius)


def _regions_disjoint(a: CorrectedHamiltonian, b: CorrectedHamiltonian) -> bool:
    d = abs(a.outer_center - b.outer_center)
    if d > a.outer_radius + b.outer_radius - 1e-13:
        return True
    # nested: one translate sits entirely inside the other's hole
    d_ab = abs(a.inner_center - b.outer_center)
    if d_ab + b.outer_radius <= a.inner_radius + 1e-13:
        return True
    d_ba = abs(b.inner_center - a.outer_center)
    if d_ba + a.outer_radius <= b.inner_radius + 1e-13:
        return True
    return False


class AssembledHamiltonian:
    """Continuous Hamiltonian on the closed disk supported on the translates."""

    def __init__(self, vertex, pieces: Sequence[CorrectedHamiltonian], tail_estimate=None):
        self.vertex = vertex
        self.pieces = list(pieces)
        self.tail_estimate = tail_estimate
        for i in range(len(self.pieces)):
            for j in range(i + 1, len(self.pieces)):
                if not _regions_disjoint(self.pieces[i], self.pieces[j]):
                    raise RegionOverlapError(
                        f"translate regions {i} and {j} overlap"
                    )

    def value_complex(self, z):
        z = np.atleast_1d(np.asarray(z, complex))
        out = np.zeros(z.shape, float)
        todo = np.abs(z) < 1.0
        for piece in self.pieces:
            if not todo.any():
                break
            mask = todo & piece.contains(z)
            if mask.any():
                out[mask] = piece.value_complex(z[mask])
                todo &= ~mask
        return out

    def gradient_complex(self, z):
        z = np.atleast_1d(np.asarray(z, complex))
        out = np.zeros(z.shape, complex)
        todo = np.abs(z) < 1.0
        for piece in self.pieces:
            if not todo.any():
                break
            mask = todo & piece.contains(z)
            if mask.any():
                out[mask] = piece.gradient_complex(z[mask])
                todo &= ~mask
        return out

    def value(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        return self.value_complex(pts[:, 0] + 1j * pts[:, 1])

    def gradient(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        g = self.gradient_complex(pts[:, 0] + 1j * pts[:, 1])
        return np.stack([g.real, g.imag], -1)

    def field(self) -> HamiltonianField:
        return HamiltonianField(self.value, self.gradient, support_radius=1.0)

    def boundary_ring_sup(self, inner=0.999, n=4096) -> float:
        ang = np.arange(n) * TWO_PI / n
        rad = np.linspace(inner, 1.0, 8)
        z = rad[:, None] * np.exp(1j * ang[None, :])
        return float(np.abs(self.value_complex(z.ravel())).max())

    def diameters_by_length(self):
        out = {}
        for p in self.pieces:
            out.setdefault(p.element.length, []).append(p.diameter)
        return {k: max(v) for k, v in sorted(out.items())}


def assemble_Hv(
    vertex,
    elements: Sequence[GroupElement],
    annulus: RoundAnnulus,
    circle_radius=None,
    tail_elements: Optional[Sequence[GroupElement]] = None,
) -> AssembledHamiltonian:
    """Corrected Hamiltonians over every enumerated translate, glued by zero.

    tail_elements, when given (one word length beyond the enumeration), feed
    the reported truncation bound: the dropped tail is below
    max lambda^2(L+1) * sup|h| / 2 pi.
    """
    pieces = [CorrectedHamiltonian(el, annulus, circle_radius) for el in elements]
    tail = None
    if tail_elements:
        lam_max = max(lambda_scale(el, annulus) for el in tail_elements)
        sup_h = (
            np.abs(make_profile(0.5, pieces[0].b).h(np.linspace(-0.5, 0.5, 2001))).max()
            if pieces
            else 0.0
        )
        tail = float(lam_max * sup_h / TWO_PI)
    return AssembledHamiltonian(vertex, pieces, tail_estimate=tail)


# -------------------------------- mollifier ---------------------------------


class Mollifier:
    """Radial cutoff exp(-eps * tan(pi |z| / 2)^2), zero outside the disk."""

    def __init__(self, eps: float):
        if eps <= 0:
            raise ValueError("mollifier parameter eps must be positive")
        self.eps = float(eps)

    def value_radial(self, rho):
        rho = np.asarray(rho, float)
        out = np.zeros(rho.shape)
        inside = rho < 1.0
        y = np.tan(0.5 * math.pi * rho[inside])
        out[inside] = np.exp(-self.eps * y * y)
        return out

    def value(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        return self.value_radial(np.hypot(pts[:, 0], pts[:, 1]))

    def gradient(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        rho = np.hypot(pts[:, 0], pts[:, 1])
        out = np.zeros_like(pts)
        inside = (rho < 1.0) & (rho > 0.0)
        y = np.tan(0.5 * math.pi * rho[inside])
        eta = np.exp(-self.eps * y * y)
        drad = eta * (-self.eps) * 2.0 * y * (1.0 + y * y) * (0.5 * math.pi)
        unit = pts[inside] / rho[inside][:, None]
        out[inside] = drad[:, None] * unit
        return out


def mollifier_eval(eps: float, z) -> float:
    """eta_eps at a complex point (or array); 1 at 0, 0 off the disk."""
    m = Mollifier(eps)
    z = np.asarray(z, complex)
    vals = m.value_radial(np.abs(np.atleast_1d(z)))
    return float(vals[0]) if z.ndim == 0 else vals


def smooth_Hv(assembled: AssembledHamiltonian, eps: float) -> HamiltonianField:
    """Pointwise product with the mollifier, gradient by the product rule."""
    eta = Mollifier(eps)

    def value(pts):
        return eta.value(pts) * assembled.value(pts)

    def gradient(pts):
        ev = eta.value(pts)[:, None]
        hv = assembled.value(pts)[:, None]
        return ev * assembled.gradient(pts) + hv * eta.gradient(pts)

    return HamiltonianField(value, gradient, support_radius=1.0, label=f"smoothed(eps={eps})")


# ----------------------------- boundary estimates ----------------------------


@dataclass
class EstimateReport:
    lambda_table: list  # rows (length, count, max_lambda2)
    lambda_monotone: bool
    slopes: dict  # n -> regression slope of log(sup |D^n H|) vs log(1/r)
    slope_verdicts: dict
    d1_by_length: list  # rows (length, max first-derivative sup)
    d1_trend: bool
    d2_max: float
    rows: list = field(default_factory=list)


def _fd_derivative(f, z0, order, h):
    """n-th central difference along x and y; returns the larger magnitude."""
    best = 0.0
    for direction in (1.0, 1j):
        e = direction * h
        if order == 1:
            val = (f(z0 + e) - f(z0 - e)) / (2 * h)
        elif order == 2:
            val = (f(z0 + e) - 2 * f(z0) + f(z0 - e)) / h**2
        elif order == 3:
            val = (f(z0 + 2 * e) - 2 * f(z0 + e) + 2 * f(z0 - e) - f(z0 - 2 * e)) / (
                2 * h**3
            )
        else:
            raise ValueError("order must be 1, 2 or 3")
        best = max(best, float(np.abs(val).max()))
    return best


def analytic_report(
    assembled: AssembledHamiltonian,
    orders=(1, 2, 3),
    samples_per_piece: int = 8,
    slope_slack: float = 0.3,
) -> EstimateReport:
    """Decay and smoothness evidence near the boundary circle.

    (i) the largest scale lambda^2 per word length, which must not increase
    beyond length 2; (ii) log-log regression of the sup of n-th finite
    difference derivatives against 1/r, r the distance to the boundary,
    with slope verdicts slope_n <= max(0, n-2) + slack; (iii) the first
    derivative sup falling toward the boundary and the second staying
    bounded.
    """
    lengths = sorted({p.element.length for p in assembled.pieces})
    if len(lengths) < 5:
        raise ValueError("need enumeration depth at least 4 for the regression")
    lam = {}
    for p in assembled.pieces:
        lam.setdefault(p.element.length, []).append(p.lambda2)
    lambda_table = [(L, len(lam[L]), max(lam[L])) for L in lengths]
    lam_max = {L: max(lam[L]) for L in lengths}
    mono = all(
        lam_max[b] < lam_max[a]
        for a, b in zip(lengths, lengths[1:])
        if a >= 2
    )

    per_piece = []
    rows = []
    for p in assembled.pieces:
        pts = p.tracked_circle_points(samples_per_piece)
        z0 = pts[:, 0] + 1j * pts[:, 1]
        r = float((1.0 - np.abs(z0)).min())
        h = 1e-3 * r
        entry = {"length": p.element.length, "r": r, "lambda2": p.lambda2}
        for n in orders:
            entry[f"d{n}"] = _fd_derivative(p.value_complex, z0, n, h)
        per_piece.append(entry)
        rows.append(entry)

    slopes, verdicts = {}, {}
    for n in orders:
        xs = np.array([math.log(1.0 / e["r"]) for e in per_piece])
        ys = np.array([e[f"d{n}"] for e in per_piece])
        keep = ys > 0
        if keep.sum() < 4:
            raise ValueError("insufficient data points for the slope regression")
        slope = float(np.polyfit(xs[keep], np.log(ys[keep]), 1)[0])
        slopes[n] = slope
        verdicts[n] = slope <= max(0, n - 2) + slope_slack

    d1_by_length = []
    for L in lengths:
        vals = [e["d1"] for e in per_piece if e["length"] == L]
        d1_by_length.append((L, max(vals)))
    d1_trend = all(
        b_ < a_ for (La, a_), (Lb, b_) in zip(d1_by_length, d1_by_length[1:]) if La >= 2
    )
    d2_max = max(e["d2"] for e in per_piece) if 2 in orders else float("nan")

    return EstimateReport(
        lambda_table=lambda_table,
        lambda_monotone=mono,
        slopes=slopes,
        slope_verdicts=verdicts,
        d1_by_length=d1_by_length,
        d1_trend=d1_trend,
        d2_max=d2_max,
        rows=rows,
    )


def default_study_annulus() -> RoundAnnulus:
    return RoundAnnulus((0.0, 0.0), 0.35, 0.55)
