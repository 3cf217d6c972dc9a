"""Curvature-dimension verification core.

Every check reports a signed worst-case margin instead of a bare boolean:
positive margin = the inequality is violated at the witness, negative =
it holds with that much room.  PASS means worst margin <= tolerance, so
discretization error stays auditable.  Default tolerances scale like
c1*h + c2*h^2 in the grid step h (c1 = 0.05, c2 = 50.0, calibrated on the
model-space batteries).

Conjugate-point regime: whenever a distortion coefficient evaluates to
infinity the affected plan is skipped and flagged, never folded into a
margin.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coefficients import CurvatureParams, sigma
from .space1d import Space1D, WeightFn
from . import transport1d as tr

__all__ = [
    "CurvatureReport",
    "TriplePlan",
    "default_tolerance",
    "default_triple_battery",
    "triple_margin",
    "check_kn_convex",
    "differential_criterion",
    "verify_cde",
    "verify_cd_infty",
    "circle_obstruction",
]

_DEFAULT_T_GRID = tuple(k / 8.0 for k in range(1, 8))


def default_tolerance(grid_step: float) -> float:
    """PASS threshold c1*h + c2*h^2 used when the caller gives none."""
    return 0.05 * grid_step + 50.0 * grid_step * grid_step


@dataclass
class CurvatureReport:
    """Structured verdict of an inequality scan."""

    kind: str
    K: float
    N: float
    max_violation: float
    witness: dict
    tolerance: float
    grid_step: float
    seed: int | None = None
    conjugate_flags: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "K": self.K,
            "N": self.N,
            "max_violation": self.max_violation,
            "witness": self.witness,
            "tol": self.tolerance,
            "grid_step": self.grid_step,
            "seed": self.seed,
            "passed": self.passed,
        }
        if self.conjugate_flags:
            d["conjugate_flags"] = self.conjugate_flags
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class TriplePlan:
    """Geodesic triple: endpoints, interior times, and (circle) arc choice."""

    x0: float
    x1: float
    t_grid: tuple[float, ...] = _DEFAULT_T_GRID
    arc: str = "minor"  # minor | major (major only valid for antipodes)

    def __post_init__(self):
        if self.x0 == self.x1:
            raise ValueError("triple needs distinct endpoints")
        if self.arc not in ("minor", "major"):
            raise ValueError(f"unknown arc {self.arc!r}")
        for t in self.t_grid:
            if not 0.0 < t < 1.0:
                raise ValueError("interior times must lie in (0,1)")


def _geodesic_point(space: Space1D, x0: float, x1: float, t: float, arc: str) -> tuple[float, float]:
    """(x_t, geodesic length) along the requested arc."""
    if space.topology.kind != "circle":
        return (1.0 - t) * x0 + t * x1, abs(x1 - x0)
    c = space.topology.circumference
    fwd = (x1 - x0) % c
    if arc == "minor":
        delta = fwd if fwd <= c - fwd else fwd - c  # signed short way
    else:
        if abs(fwd - c / 2.0) > 1e-9:
            raise ValueError("major arc is only a geodesic between antipodes")
        delta = fwd - c
    return (x0 + t * delta) % c, abs(delta)


def triple_margin(f: WeightFn, space: Space1D, params: CurvatureParams,
                  x0: float, x1: float, t: float, arc: str = "minor") -> float:
    """sigma^{(1-t)}(d) g(x0) + sigma^{(t)}(d) g(x1) - g(x_t), g = exp(-f/N).

    Positive = the (K,N)-convexity inequality fails at this triple.
    Returns math.inf sentinel if the triple is in the conjugate regime.
    """
    xt, d = _geodesic_point(space, x0, x1, t, arc)
    s0 = sigma(1.0 - t, params, d)
    s1 = sigma(t, params, d)
    if math.isinf(s0) or math.isinf(s1):
        return math.inf
    N = params.N
    return (s0 * math.exp(-f(x0) / N) + s1 * math.exp(-f(x1) / N)
            - math.exp(-f(xt) / N))


def default_triple_battery(space: Space1D, seed: int = 0, coarse: int = 64,
                           n_random: int = 256,
                           t_grid: tuple[float, ...] = _DEFAULT_T_GRID) -> list[TriplePlan]:
    """All pairs from a coarse grid plus seeded random triples.

    Circle antipodal pairs get both arcs.  Deterministic for a fixed seed.
    """
    lo, hi = space.domain()
    kind = space.topology.kind
    if kind == "circle":
        pts = np.linspace(lo, hi, coarse, endpoint=False)
    else:
        pad = 1e-9 * (hi - lo)
        pts = np.linspace(lo + pad, hi - pad, coarse)
    plans = []
    half = space.topology.circumference / 2.0 if kind == "circle" else None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            x0, x1 = float(pts[i]), float(pts[j])
            plans.append(TriplePlan(x0, x1, t_grid))
            if half is not None and abs(space.distance(x0, x1) - half) < 1e-9:
                plans.append(TriplePlan(x0, x1, t_grid, arc="major"))
    rng = np.random.default_rng(seed)
    made = 0
    while made < n_random:
        x0, x1 = lo + (hi - lo) * rng.random(2)
        if abs(x1 - x0) < 1e-6 * (hi - lo):
            continue
        t = 0.05 + 0.9 * rng.random()
        plans.append(TriplePlan(float(x0), float(x1), (float(t),)))
        made += 1
    return plans


def check_kn_convex(f: WeightFn, space: Space1D, params: CurvatureParams,
                    plan_battery: Sequence[TriplePlan], tol: float | None = None,
                    seed: int | None = None) -> CurvatureReport:
    """Worst (K,N)-convexity margin of the weight over the plan battery."""
    if tol is None:
        tol = default_tolerance(space.grid_step)
    if not tol > 0.0:
        raise ValueError("tolerance must be positive")
    worst = -math.inf
    witness = {}
    flags = []
    for idx, plan in enumerate(plan_battery):
        for t in plan.t_grid:
            m = triple_margin(f, space, params, plan.x0, plan.x1, t, plan.arc)
            if math.isinf(m):
                flags.append({"plan": idx, "x0": plan.x0, "x1": plan.x1,
                              "regime": "conjugate-point"})
                break
            if m > worst:
                worst = m
                witness = {"x0": plan.x0, "x1": plan.x1, "t": t, "arc": plan.arc,
                           "margin": m}
    if not math.isfinite(worst):
        raise ValueError("no finite-margin plan in the battery")
    return CurvatureReport(
        kind="kn-convexity", K=params.K, N=params.N, max_violation=worst,
        witness=witness, tolerance=tol, grid_step=space.grid_step, seed=seed,
        conjugate_flags=flags,
        extra={"n_plans": len(plan_battery)},
    )


def differential_criterion(f: WeightFn, params: CurvatureParams,
                           tol: float | None = None) -> CurvatureReport:
    """Pointwise form of (K,N)-convexity: V'' >= K + (V')^2 / N.

    Checked at interior sample nodes by central differences (the form that
    exp(-V/N) solving u'' <= -(K/N) u forces).  Margin at a node is
    K + (V')^2/N - V''; positive = violated there.
    """
    xs = np.asarray(f.coords, dtype=float)
    vs = np.asarray(f.values, dtype=float)
    if len(xs) < 5:
        raise ValueError("need at least 5 weight samples for second differences")
    h_step = float(np.min(np.diff(xs)))
    if tol is None:
        tol = default_tolerance(h_step)
    hl = xs[1:-1] - xs[:-2]
    hr = xs[2:] - xs[1:-1]
    d1 = (vs[2:] - vs[:-2]) / (hl + hr)
    d2 = 2.0 * ((vs[2:] - vs[1:-1]) / hr - (vs[1:-1] - vs[:-2]) / hl) / (hl + hr)
    margins = params.K + d1 * d1 / params.N - d2
    k = int(np.argmax(margins))
    return CurvatureReport(
        kind="kn-differential", K=params.K, N=params.N,
        max_violation=float(margins[k]),
        witness={"x": float(xs[k + 1]), "margin": float(margins[k])},
        tolerance=tol, grid_step=h_step,
        extra={"node_margins": [float(v) for v in margins],
               "node_coords": [float(v) for v in xs[1:-1]]},
    )


def _entropies_along(space: Space1D, mu0, mu1, ts: Sequence[float]):
    """Exact entropies of the displacement interpolants at the given times.

    Evaluated on the exact interpolant segments (not the re-binned grid) so
    no histogramming bias enters the margins; endpoints go through the same
    formula at t = 0, 1.
    """
    if space.topology.kind == "circle":
        _, alpha = tr._circle_cut(space, mu0, mu1)
        bp0 = tr._breakpoints(mu0)
        bp1 = tr._shifted_bp(mu1, alpha)
    else:
        bp0 = tr._breakpoints(mu0)
        bp1 = tr._breakpoints(mu1)
    out = []
    for t in ts:
        xs, xe, masses = tr._interpolant_segments(bp0, bp1, t)
        out.append(tr.entropy_of_segments(space, xs, xe, masses))
    return out


def verify_cde(space: Space1D, params: CurvatureParams, pair_battery,
               t_grid: Sequence[float] = _DEFAULT_T_GRID, tol: float = 5e-4,
               seed: int | None = None) -> CurvatureReport:
    """Entropic curvature-dimension check along displacement interpolation.

    Margin per (pair, t): sigma^{(1-t)}(W2) exp(-Ent0/N) +
    sigma^{(t)}(W2) exp(-Ent1/N) - exp(-Ent_t/N); positive = violated.
    """
    N = params.N
    worst = -math.inf
    witness = {}
    flags = []
    for idx, (mu0, mu1) in enumerate(pair_battery):
        dist = tr.w2(space, mu0, mu1)
        ents = _entropies_along(space, mu0, mu1, [0.0, 1.0, *t_grid])
        e0, e1 = ents[0], ents[1]
        if not (math.isfinite(e0) and math.isfinite(e1)):
            raise ValueError(f"pair {idx}: endpoint entropy diverges")
        for t, et in zip(t_grid, ents[2:]):
            if not math.isfinite(et):
                raise ValueError(f"pair {idx}: entropy diverges at t={t}")
            s0 = sigma(1.0 - t, params, dist)
            s1 = sigma(t, params, dist)
            if math.isinf(s0) or math.isinf(s1):
                flags.append({"pair": idx, "w2": dist, "regime": "conjugate-point"})
                break
            m = (s0 * math.exp(-e0 / N) + s1 * math.exp(-e1 / N)
                 - math.exp(-et / N))
            if m > worst:
                worst = m
                witness = {"pair": idx, "t": t, "w2": dist, "ent0": e0,
                           "ent1": e1, "ent_t": et, "margin": m}
    return CurvatureReport(
        kind="cde-entropic", K=params.K, N=params.N, max_violation=worst,
        witness=witness, tolerance=tol, grid_step=space.grid_step, seed=seed,
        conjugate_flags=flags, extra={"n_pairs": len(pair_battery)},
    )


def verify_cd_infty(space: Space1D, K: float, pair_battery,
                    t_grid: Sequence[float] = _DEFAULT_T_GRID, tol: float = 5e-4,
                    seed: int | None = None) -> CurvatureReport:
    """K-convexity of the entropy: Ent_t <= (1-t)Ent0 + tEnt1 - K/2 t(1-t) W2^2."""
    worst = -math.inf
    witness = {}
    for idx, (mu0, mu1) in enumerate(pair_battery):
        dist = tr.w2(space, mu0, mu1)
        ents = _entropies_along(space, mu0, mu1, [0.0, 1.0, *t_grid])
        e0, e1 = ents[0], ents[1]
        if not (math.isfinite(e0) and math.isfinite(e1)):
            raise ValueError(f"pair {idx}: endpoint entropy diverges")
        for t, et in zip(t_grid, ents[2:]):
            bound = (1.0 - t) * e0 + t * e1 - 0.5 * K * t * (1.0 - t) * dist * dist
            m = et - bound
            if m > worst:
                worst = m
                witness = {"pair": idx, "t": t, "w2": dist, "ent_t": et,
                           "bound": bound, "margin": m}
    return CurvatureReport(
        kind="cd-infinity", K=K, N=math.inf, max_violation=worst,
        witness=witness, tolerance=tol, grid_step=space.grid_step, seed=seed,
        extra={"n_pairs": len(pair_battery)},
    )


def circle_obstruction(space: Space1D, params: CurvatureParams,
                       shrink: float = 0.8, min_steps: int = 40) -> CurvatureReport:
    """Find a (K,N)-convexity violation on a circle for K > 0.

    Centers symmetric triples (x0, argmax V, x1) and shrinks the endpoint
    separation until the convexity inequality fails.  For every continuous
    weight and K > 0 a violation must exist; returning none is reported as
    an anomaly (it would contradict the positive-curvature non-collapse
    statement and signals a bug).
    """
    if space.topology.kind != "circle":
        raise ValueError("circle_obstruction needs a circle space")
    if not params.K > 0.0:
        raise ValueError("circle_obstruction needs K > 0")
    w = space.weight
    circ = space.topology.circumference
    xbar = float(w.coords[int(np.argmax(w.values))])
    d_max = 0.95 * min(circ / 2.0, math.pi * math.sqrt(params.N / params.K))
    d = d_max
    best = -math.inf
    best_w = {}
    steps = 0
    while d > 4.0 * space.grid_step or steps < min_steps:
        if d <= 16.0 * np.finfo(float).eps * circ:
            break
        x0 = (xbar - d / 2.0) % circ
        x1 = (xbar + d / 2.0) % circ
        m = triple_margin(w, space, params, x0, x1, 0.5, arc="minor")
        if math.isfinite(m) and m > 0.0:
            gN = math.exp(-w(xbar) / params.N)
            s_sum = m + gN
            analytic = 1.0 / math.cos(0.5 * d * math.sqrt(params.K / params.N))
            return CurvatureReport(
                kind="circle-obstruction", K=params.K, N=params.N,
                max_violation=m,
                witness={"x0": x0, "xbar": xbar, "x1": x1, "t": 0.5, "d": d,
                         "margin": m, "violation_factor": s_sum / gN,
                         "analytic_factor": analytic},
                tolerance=default_tolerance(space.grid_step),
                grid_step=space.grid_step,
                extra={"anomaly": False},
            )
        if math.isfinite(m) and m > best:
            best, best_w = m, {"x0": x0, "x1": x1, "d": d, "margin": m}
        d *= shrink
        steps += 1
    return CurvatureReport(
        kind="circle-obstruction", K=params.K, N=params.N, max_violation=best,
        witness=best_w, tolerance=default_tolerance(space.grid_step),
        grid_step=space.grid_step,
        extra={"anomaly": True},
    )
