"""Hamiltonian flow integration and the numerical verification suite.

The integrator is implicit midpoint (symplectic, preserves quadratic first
integrals); every closed-form twist map doubles as its oracle.  Verification
never proves anything: relation checks report residuals, and the
faithfulness probe only ever says NONTRIVIAL or INCONCLUSIVE.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .words import (
    ResourceCapExceeded,
    Word,
    enumerate_normal_forms,
    hom_apply,
    normal_form,
)


class IntegrationError(RuntimeError):
    pass


class HamiltonianField:
    """Scalar Hamiltonian with gradient; the flow field is J grad H.

    With the area form dx^dy the sign convention is
    X_H = (dH/dy, -dH/dx), so H = pi*(x^2+y^2) rotates clockwise at angular
    speed 2*pi.
    """

    def __init__(self, value, gradient, support_radius=None, label=""):
        self._value = value
        self._gradient = gradient
        self.support_radius = support_radius
        self.label = label

    def value(self, pts):
        return self._value(np.atleast_2d(np.asarray(pts, float)))

    def gradient(self, pts):
        return self._gradient(np.atleast_2d(np.asarray(pts, float)))

    def vector_field(self, pts):
        g = self.gradient(pts)
        return np.stack([g[:, 1], -g[:, 0]], -1)


@dataclass
class FlowResult:
    final: np.ndarray
    energy_drift: float
    steps: int
    trajectory: Optional[np.ndarray] = None


def flow_map(
    field,
    z0,
    T: float,
    steps: Optional[int] = None,
    tol: float = 1e-12,
    max_iter: int = 50,
    record: bool = False,
) -> FlowResult:
    """Implicit-midpoint integration of z' = X_H(z) for time T.

    Works on batches: z0 may be a single point or an (n, d) array.  The
    implicit stage is solved by fixed-point iteration to tol; failure to
    contract raises IntegrationError rather than returning a bad point.
    """
    z = np.atleast_2d(np.asarray(z0, float)).copy()
    single = np.asarray(z0).ndim == 1
    if steps is None:
        steps = 1000  # default step 1e-3 * T
    h = T / steps
    H0 = field.value(z) if hasattr(field, "value") else None
    traj = [z.copy()] if record else None
    for _ in range(steps):
        y = z + h * field.vector_field(z)
        converged = False
        for _ in range(max_iter):
            y_new = z + h * field.vector_field(0.5 * (z + y))
            delta = np.abs(y_new - y).max()
            y = y_new
            if delta < tol:
                converged = True
                break
        if not converged:
            raise IntegrationError(
                f"implicit midpoint stage failed to contract (last delta {delta:.2e})"
            )
        z = y
        if record:
            traj.append(z.copy())
    drift = 0.0
    if H0 is not None:
        drift = float(np.abs(field.value(z) - H0).max())
    final = z[0] if single else z
    return FlowResult(
        final=final,
        energy_drift=drift,
        steps=steps,
        trajectory=np.array(traj) if record else None,
    )


# ------------------------- applying representations -------------------------


def rep_apply(rep, w: Word, pts, route: str = "closed", fields=None, steps=None):
    """Evaluate the image of a word on a batch of points.

    Letters act right to left.  The closed route multiplies exact twist maps
    (an inverse letter is the same twist run backwards); the integrated route
    flows the per-generator Hamiltonian fields for time N per letter, which
    is only as accurate as the integrator.
    """
    if rep.pullback is not None:
        w = hom_apply(rep.pullback, w)
    elif w.graph != rep.word_graph:
        raise ValueError("word is not over the representation's graph")
    pts = np.asarray(pts, float)
    single = pts.ndim == 1
    out = np.atleast_2d(pts).copy()
    if route == "closed":
        for v, e in reversed(w.letters):
            out = rep.generator_map(v, rep.N * e).apply(out)
    elif route == "integrated":
        for v, e in reversed(w.letters):
            if fields is not None and v in fields:
                fld = fields[v]
            else:
                H, grad = rep.generator_field(v)
                fld = HamiltonianField(H, grad)
            out = flow_map(fld, out, T=rep.N * e, steps=steps).final
    else:
        raise ValueError(f"unknown route {route!r}")
    return out[0] if single else out


# ------------------------------ verification --------------------------------


@dataclass
class RelationCheck:
    pair: tuple
    kind: str  # 'commuting' or 'twisting'
    displacement: float
    threshold: float
    passed: bool


@dataclass
class VerificationReport:
    seed: int
    samples: int
    relation_checks: list
    puncture_residual: float
    puncture_threshold: float
    jacobian_max_deviation: float
    displacement_floor: float

    def all_passed(self) -> bool:
        return (
            all(c.passed for c in self.relation_checks)
            and self.puncture_residual <= self.puncture_threshold
        )

    def rows(self):
        out = []
        for c in sorted(self.relation_checks, key=lambda c: (c.kind, str(c.pair))):
            out.append(
                {
                    "check": c.kind,
                    "pair": "|".join(str(x) for x in c.pair),
                    "displacement": c.displacement,
                    "threshold": c.threshold,
                    "passed": c.passed,
                }
            )
        out.append(
            {
                "check": "punctures-fixed",
                "pair": "*",
                "displacement": self.puncture_residual,
                "threshold": self.puncture_threshold,
                "passed": self.puncture_residual <= self.puncture_threshold,
            }
        )
        return out


def _sample_points(rep, samples, rng):
    cfg = rep.config
    annuli = list(cfg.annuli.values())
    per = max(4, samples // (2 * len(annuli)))
    pts = [a.sample_points(per, rng) for a in annuli]
    centers = np.array([a.center for a in annuli])
    outer = np.array([a.r_outer for a in annuli])
    lo = (centers - outer[:, None]).min(0)
    hi = (centers + outer[:, None]).max(0)
    free = rng.uniform(lo, hi, size=(max(samples - per * len(annuli), 8), 2))
    return np.concatenate(pts + [free], 0)


def verify_relations(
    rep,
    samples: int = 200,
    seed: int = 0,
    commute_tol: float = 1e-9,
    displacement_floor: float = 1e-3,
    puncture_tol: float = 1e-9,
) -> VerificationReport:
    """Check the defining relations of the representation numerically.

    Non-adjacent generators must commute (disjoint supports make this exact
    up to roundoff); adjacent ones must visibly fail to commute at some
    overlap probe; every puncture must be fixed by every generator image.
    """
    import itertools as it

    from .words import commutator, generator

    g = rep.word_graph
    rng = np.random.default_rng(seed)
    pts = _sample_points(rep, samples, rng)
    checks = []
    for u, v in it.combinations(g.vertices, 2):
        word = commutator(generator(g, u), generator(g, v))
        if not g.has_edge(u, v):
            moved = rep_apply(rep, word, pts)
            disp = float(np.abs(moved - pts).max())
            checks.append(
                RelationCheck((u, v), "commuting", disp, commute_tol, disp <= commute_tol)
            )
        else:
            probes = _edge_probes(rep, u, v)
            moved = rep_apply(rep, word, probes)
            disp = float(np.hypot(*(moved - probes).T).max())
            checks.append(
                RelationCheck(
                    (u, v), "twisting", disp, displacement_floor, disp > displacement_floor
                )
            )
    punct = rep.config.all_punctures()
    worst = 0.0
    for v in g.vertices if rep.pullback is None else rep.config.graph.vertices:
        fv = rep.generator_map(v, rep.N)
        worst = max(worst, float(np.abs(fv.apply(punct) - punct).max()))
    jac = jacobian_probe(
        rep.generator_map(g.vertices[0] if rep.pullback is None else rep.config.graph.vertices[0], rep.N),
        _sample_points(rep, 64, rng),
        1e-6,
    )
    return VerificationReport(
        seed=seed,
        samples=len(pts),
        relation_checks=checks,
        puncture_residual=worst,
        puncture_threshold=puncture_tol,
        jacobian_max_deviation=jac["max_deviation"],
        displacement_floor=displacement_floor,
    )


def _edge_probes(rep, u, v):
    cfg = rep.config
    if rep.pullback is None:
        return np.concatenate([cfg.overlap_points(u, v), cfg.overlap_points(v, u)], 0)
    cover = cfg.graph
    fu = [x for x, _ in rep.pullback.images[u].letters]
    fv = [x for x, _ in rep.pullback.images[v].letters]
    probes = []
    for x in fu:
        for y in fv:
            if cover.has_edge(x, y):
                probes.append(cfg.overlap_points(x, y))
                probes.append(cfg.overlap_points(y, x))
    return np.concatenate(probes, 0)


def _central_jacobian(apply, pts, step):
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    ax = (apply(pts + ex) - apply(pts - ex)) / (2 * step)
    ay = (apply(pts + ey) - apply(pts - ey)) / (2 * step)
    return ax, ay


def jacobian_probe(plane_map, pts, step: float = 1e-6, richardson: bool = True) -> dict:
    """Central-difference Jacobian determinants of a plane map at points.

    With richardson the stencil at step and step/2 is extrapolated, clearing
    the h^2 truncation term; twist bumps have enormous high derivatives near
    the support edge and a single step cannot certify 1e-6 there.
    """
    apply = plane_map.apply if hasattr(plane_map, "apply") else plane_map
    pts = np.atleast_2d(np.asarray(pts, float))
    ax, ay = _central_jacobian(apply, pts, step)
    if richardson:
        ax2, ay2 = _central_jacobian(apply, pts, step / 2)
        ax = (4 * ax2 - ax) / 3
        ay = (4 * ay2 - ay) / 3
    det = ax[:, 0] * ay[:, 1] - ax[:, 1] * ay[:, 0]
    dev = np.abs(det - 1.0)
    return {
        "mean_deviation": float(dev.mean()),
        "max_deviation": float(dev.max()),
        "count": int(len(pts)),
    }


def faithfulness_probe(
    rep,
    max_len: int,
    marked=None,
    seed: int = 0,
    extra_random: int = 20,
    word_cap: int = 5000,
    threshold: float = 1e-6,
):
    """Displacement table over short normal forms; a probe, not a proof.

    Every nontrivial normal form up to max_len (plus a few random longer
    words) is applied to the marked points; a word that moves something is
    NONTRIVIAL, one that does not is merely INCONCLUSIVE.
    """
    g = rep.word_graph
    forms = enumerate_normal_forms(g, max_len)
    if len(forms) > word_cap:
        raise ResourceCapExceeded(
            f"{len(forms)} normal forms exceed the probe cap {word_cap}"
        )
    rng = np.random.default_rng(seed)
    extra = []
    alphabet = [(v, e) for v in g.vertices for e in (1, -1)]
    for _ in range(extra_random):
        n = int(rng.integers(max_len + 1, max_len + 4))
        lets = [alphabet[i] for i in rng.integers(0, len(alphabet), n)]
        w = normal_form(Word(g, lets)).word
        if len(w) and w not in forms:
            extra.append(w)
    if marked is None:
        marked = rep.config.marked_points()
    table = []
    for w in forms + extra:
        if not len(w):
            continue
        moved = rep_apply(rep, w, marked)
        disp = float(np.hypot(*(moved - marked).T).max())
        table.append(
            {
                "word": " ".join(w.tokens()),
                "length": len(w),
                "displacement": disp,
                "verdict": "NONTRIVIAL" if disp > threshold else "INCONCLUSIVE",
            }
        )
    return table


# ------------------------------- polydisk -----------------------------------


class PolydiskField:
    """Product Hamiltonian on D^n: h(z) = k(z_1) * eta(z_2) * ... * eta(z_n).

    The symplectic form is c*w0 on the first factor and w0 on the others, so
    the flow velocity of the first block carries a 1/c.  At slice points
    (z_1, 0, ..., 0) the mollifier factors are exactly 1 with zero gradient,
    and the slice is invariant under the flow.
    """

    def __init__(self, k_field: HamiltonianField, n: int, c: float = 1.0, eps: float = 1.0):
        from .lift import Mollifier

        if n < 2:
            raise ValueError("polydisk dimension n must be at least 2")
        self.k = k_field
        self.n = n
        self.c = float(c)
        self.eta = Mollifier(eps)

    def _factors(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        if pts.shape[1] != 2 * self.n:
            raise ValueError(f"points must have {2 * self.n} coordinates")
        blocks = [pts[:, 2 * i : 2 * i + 2] for i in range(self.n)]
        kvals = self.k.value(blocks[0])
        evals = [self.eta.value(b) for b in blocks[1:]]
        return blocks, kvals, evals

    def value(self, pts):
        _, kvals, evals = self._factors(pts)
        out = kvals.copy()
        for e in evals:
            out = out * e
        return out

    def gradient(self, pts):
        blocks, kvals, evals = self._factors(pts)
        m = len(blocks[0])
        grads = np.zeros((m, 2 * self.n))
        prod_eta = np.ones(m)
        for e in evals:
            prod_eta *= e
        gk = self.k.gradient(blocks[0])
        grads[:, 0:2] = gk * prod_eta[:, None]
        for i in range(1, self.n):
            others = kvals.copy()
            for j, e in enumerate(evals, start=1):
                if j != i:
                    others = others * e
            ge = self.eta.gradient(blocks[i])
            grads[:, 2 * i : 2 * i + 2] = ge * others[:, None]
        return grads

    def vector_field(self, pts):
        g = self.gradient(pts)
        out = np.empty_like(g)
        for i in range(self.n):
            gx, gy = g[:, 2 * i], g[:, 2 * i + 1]
            scale = 1.0 / self.c if i == 0 else 1.0
            out[:, 2 * i] = scale * gy
            out[:, 2 * i + 1] = -scale * gx
        return out

    def embed_slice(self, pts2d):
        pts2d = np.atleast_2d(np.asarray(pts2d, float))
        out = np.zeros((len(pts2d), 2 * self.n))
        out[:, 0:2] = pts2d
        return out

    def slice_gradient_residual(self, pts2d):
        """Max difference between dh at slice points and dk, all components."""
        pts = self.embed_slice(pts2d)
        gh = self.gradient(pts)
        gk = self.k.gradient(np.atleast_2d(pts2d))
        first = np.abs(gh[:, 0:2] - gk).max()
        rest = np.abs(gh[:, 2:]).max() if self.n > 1 else 0.0
        return float(max(first, rest))


def polydisk_extend(k_field: HamiltonianField, n: int, c: float = 1.0, eps: float = 1.0) -> PolydiskField:
    """Extend a disk Hamiltonian to the polydisk by mollifier factors."""
    return PolydiskField(k_field, n, c=c, eps=eps)
