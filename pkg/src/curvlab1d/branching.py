"""Branching transport on the tripod and the failure of entropy K-convexity.

The tripod is the letter-"Y" graph: three segments glued at a single
branch point, with a constant density per edge.  Geodesics from the stem
(edge 0) to the two outer edges branch at the center at parameter-dependent
times, which is exactly what breaks K-convexity of the entropy.

Plan construction.  A scenario (a, b, eps, eta, beta, N) is realized by the
two-parameter family of constant-speed geodesics indexed by

    source s ~ U[eta/4, eta/2]   (distance from the center on the stem)
    crossing time tau ~ U[a + eps/4, a + 3 eps/4]   (independent of s)

going to target coordinate u = s (1 - tau)/tau on edge 1 (the "up" plan)
or edge 2 (the "down" plan).  Both plans share the same (s, tau) law, so
their time-t pushforwards agree exactly for t <= a and land on disjoint
edges for t >= a + eps.  The pushforward density at any time integrates in
closed form over tau (a log antiderivative), so entropies, the dimensional
functionals, and density certificates evaluate to quadrature accuracy with
no ensemble binning noise.  The 4096-geodesic stratified ensemble is kept
as the concrete plan representation (serialization, structural checks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .space1d import Space1D, Topology1D, WeightFn
from . import transport1d as tr

__all__ = [
    "InfeasibleScenarioError",
    "Tripod",
    "TripodPoint",
    "BranchingScenario",
    "PlanPair",
    "tripod_distance",
    "build_branching_plans",
    "entropy_along",
    "renyi_raw",
    "entropy_chain_inequality",
    "renyi_contradiction",
    "mixture_w2_correction",
]

_ENSEMBLE_SIDE = 64  # 64 x 64 strata = 4096 geodesics


class InfeasibleScenarioError(ValueError):
    """The tripod geometry cannot host the requested branching scenario."""


@dataclass(frozen=True)
class TripodPoint:
    """Point on a tripod: edge index and distance s from the center."""

    edge: int
    s: float

    def __post_init__(self):
        if self.edge not in (0, 1, 2):
            raise ValueError("edge must be 0, 1 or 2")
        if self.s < 0.0:
            raise ValueError("s must be >= 0")
        if self.s == 0.0 and self.edge != 0:
            object.__setattr__(self, "edge", 0)  # center aliases to edge 0


@dataclass(frozen=True)
class Tripod:
    """Three segments of given lengths glued at one branch point."""

    edge_lengths: tuple[float, float, float]
    densities: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if len(self.edge_lengths) != 3 or any(l <= 0 for l in self.edge_lengths):
            raise ValueError("need three positive edge lengths")
        if len(self.densities) != 3 or any(c <= 0 for c in self.densities):
            raise ValueError("need three positive edge densities")

    def check_point(self, p: TripodPoint):
        if p.s > self.edge_lengths[p.edge] + 1e-12:
            raise ValueError(f"point {p} beyond edge length")

    def distance(self, p: TripodPoint, q: TripodPoint) -> float:
        self.check_point(p)
        self.check_point(q)
        if p.edge == q.edge:
            return abs(p.s - q.s)
        return p.s + q.s

    def measure_ball(self, p: TripodPoint, r: float) -> float:
        """Mass of the metric ball of radius r around p."""
        if r < 0:
            raise ValueError("radius must be >= 0")
        self.check_point(p)
        total = 0.0
        for e in range(3):
            L, c = self.edge_lengths[e], self.densities[e]
            if e == p.edge:
                total += c * (min(L, p.s + r) - max(0.0, p.s - r))
            else:
                reach = r - p.s
                if reach > 0.0:
                    total += c * min(L, reach)
        return total

    @property
    def center(self) -> TripodPoint:
        return TripodPoint(0, 0.0)


def tripod_distance(tripod: Tripod, p: TripodPoint, q: TripodPoint) -> float:
    """Path metric of the tripod (through the center across edges)."""
    return tripod.distance(p, q)


@dataclass(frozen=True)
class BranchingScenario:
    """Timing/scale parameters of one branching experiment."""

    a: float      # common prefix fraction
    b: float      # early probe time, 0 < b < a
    eps: float    # branch window width, a + eps < 1
    eta: float    # spatial scale of the construction
    beta: float = 1.0
    N: float = 2.0

    def __post_init__(self):
        if not (0.0 < self.b < self.a < self.a + self.eps < 1.0):
            raise ValueError("need 0 < b < a < a + eps < 1")
        if not self.eta > 0.0:
            raise ValueError("eta must be > 0")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")
        if not self.N > 1.0:
            raise ValueError("N must be > 1")

    def replace_eps(self, eps: float) -> "BranchingScenario":
        return BranchingScenario(self.a, self.b, eps, self.eta, self.beta, self.N)

    # derived construction windows
    @property
    def s_window(self) -> tuple[float, float]:
        return self.eta / 4.0, self.eta / 2.0

    @property
    def tau_window(self) -> tuple[float, float]:
        return self.a + self.eps / 4.0, self.a + 3.0 * self.eps / 4.0


# double-exponential quadrature nodes on (-1, 1): handles the x*log(x)
# behaviour of the entropy integrand at piece edges at spectral accuracy
_DE_H = 7.0 / 240.0
_DE_T = np.arange(-120, 121) * _DE_H
_DE_X = np.tanh(0.5 * math.pi * np.sinh(_DE_T))
_DE_W = _DE_H * 0.5 * math.pi * np.cosh(_DE_T) / np.cosh(0.5 * math.pi * np.sinh(_DE_T)) ** 2


class _HalfDensity:
    """Closed-form pushforward density of one plan half at time t.

    Mass beta distributed over (s, tau) ~ U[s_lo,s_hi] x U[tau_lo,tau_hi];
    a geodesic sits at stem coordinate v = s (1 - t/tau) before crossing
    and at target coordinate u = s (t - tau)/tau after.  Integrating the
    Jacobian over the tau-window gives the length densities below.
    """

    def __init__(self, scenario: BranchingScenario, t: float):
        self.t = float(t)
        self.s_lo, self.s_hi = scenario.s_window
        self.tau_lo, self.tau_hi = scenario.tau_window
        self.rho0 = scenario.beta / ((self.s_hi - self.s_lo) * (self.tau_hi - self.tau_lo))

    # -- stem side: antiderivative of tau/(tau - t) is tau + t log(tau - t);
    #    the tau-window bounds are kept as stable offsets from t so the log
    #    arguments never cancel near the center
    def stem_arr(self, v) -> np.ndarray:
        t = self.t
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        if t >= self.tau_hi:
            return out
        if t <= 0.0:
            ok = (v >= self.s_lo) & (v <= self.s_hi)
            out[ok] = self.rho0 * (self.tau_hi - self.tau_lo)
            return out
        ok = (v >= 0.0) & (v < self.s_hi * (1.0 - t / self.tau_hi))
        if not np.any(ok):
            return out
        vv = v[ok]
        # lo - t and hi - t of the tau-window, each > 0 where the window lives
        lo_off = np.maximum(self.tau_lo - t, t * vv / (self.s_hi - vv))
        hi_off = np.where(
            vv < self.s_lo,
            np.minimum(self.tau_hi - t, t * vv / np.maximum(self.s_lo - vv, 1e-300)),
            self.tau_hi - t,
        )
        width = hi_off - lo_off
        pos = (width > 0.0) & (lo_off > 0.0)
        res = np.zeros_like(vv)
        res[pos] = width[pos] + t * (np.log(hi_off[pos]) - np.log(lo_off[pos]))
        out[ok] = self.rho0 * res
        return out

    # -- target side: antiderivative of tau/(t - tau) is -tau - t log(t - tau)
    def target_arr(self, u) -> np.ndarray:
        t = self.t
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        if t <= self.tau_lo:
            return out
        ok = u > 0.0
        if not np.any(ok):
            return out
        uu = u[ok]
        # t - lo and t - hi of the tau-window, as stable positive offsets
        t_minus_lo = np.minimum(t - self.tau_lo, t * uu / (uu + self.s_lo))
        t_minus_hi = np.maximum(t - self.tau_hi, t * uu / (uu + self.s_hi))
        width = t_minus_lo - t_minus_hi
        pos = (width > 0.0) & (t_minus_hi > 0.0)
        res = np.zeros_like(uu)
        res[pos] = -width[pos] + t * (np.log(t_minus_lo[pos]) - np.log(t_minus_hi[pos]))
        out[ok] = self.rho0 * res
        return out

    def stem(self, v: float) -> float:
        return float(self.stem_arr(np.array([v]))[0])

    def target(self, u: float) -> float:
        return float(self.target_arr(np.array([u]))[0])

    def stem_support(self) -> tuple[float, float]:
        t = self.t
        if t >= self.tau_hi:
            return 0.0, 0.0
        lo = max(0.0, self.s_lo * (1.0 - t / self.tau_lo))
        hi = self.s_hi * (1.0 - t / self.tau_hi)
        return lo, max(lo, hi)

    def target_support(self) -> tuple[float, float]:
        t = self.t
        if t <= self.tau_lo:
            return 0.0, 0.0
        lo = max(0.0, self.s_lo * (t - self.tau_hi) / self.tau_hi)
        hi = self.s_hi * (t - self.tau_lo) / self.tau_lo
        return lo, max(lo, hi)

    def _breaks(self, side: str) -> list[float]:
        s_lo, s_hi, t = self.s_lo, self.s_hi, self.t
        if side == "stem":
            lo, hi = self.stem_support()
            cands = [s_lo * (1.0 - t / self.tau_lo), s_lo * (1.0 - t / self.tau_hi),
                     s_hi * (1.0 - t / self.tau_lo), s_hi * (1.0 - t / self.tau_hi), s_lo]
        else:
            lo, hi = self.target_support()
            cands = [s * (t - tau) / tau for s in (s_lo, s_hi)
                     for tau in (self.tau_lo, self.tau_hi)]
        pts = sorted({lo, hi, *[c for c in cands if lo < c < hi]})
        return pts

    def integrate(self, side: str, g: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral of g(rho_length(y)) dy over the side's support.

        g must map arrays elementwise; double-exponential quadrature per
        smooth piece between breakpoints.
        """
        fn = self.stem_arr if side == "stem" else self.target_arr
        pts = self._breaks(side)
        total = 0.0
        for aa, bb in zip(pts[:-1], pts[1:]):
            if bb - aa > 1e-15:
                mid = 0.5 * (aa + bb)
                half = 0.5 * (bb - aa)
                ys = mid + half * _DE_X
                total += half * float(np.sum(_DE_W * g(fn(ys))))
        return total

    def sup_density(self, side: str, n_scan: int = 4096) -> float:
        fn = self.stem_arr if side == "stem" else self.target_arr
        pts = self._breaks(side)
        best = 0.0
        for aa, bb in zip(pts[:-1], pts[1:]):
            if bb - aa <= 1e-15:
                continue
            best = max(best, float(np.max(fn(np.linspace(aa, bb, n_scan)))))
        return best


@dataclass(frozen=True)
class PlanPair:
    """Mirrored branching plans pi^u (edge 1) and pi^d (edge 2).

    The ensemble is a 64 x 64 stratified lattice over (source, crossing
    time); endpoints stratify the target arcs.  Densities and entropies
    are evaluated from the closed-form continuum limit of that lattice.
    """

    tripod: Tripod
    scenario: BranchingScenario
    s_nodes: np.ndarray
    tau_nodes: np.ndarray
    certificate: dict = field(default_factory=dict)

    @property
    def mass(self) -> float:
        return self.scenario.beta

    def geodesic_count(self) -> int:
        return len(self.s_nodes) * len(self.tau_nodes)

    def geodesics(self, which: str):
        """Yield (start, end, mass) triples of the stratified ensemble."""
        edge = 1 if which == "u" else 2
        m = self.scenario.beta / self.geodesic_count()
        for s in self.s_nodes:
            for tau in self.tau_nodes:
                u = s * (1.0 - tau) / tau
                yield TripodPoint(0, float(s)), TripodPoint(edge, float(u)), m

    def ensemble_positions(self, which: str, t: float):
        """(edge, coordinate) arrays of all ensemble geodesics at time t."""
        s = self.s_nodes[:, None]
        tau = self.tau_nodes[None, :]
        xi = s * (1.0 - t / tau)  # >0 stem, <0 target
        edge_target = 1 if which == "u" else 2
        edges = np.where(xi >= 0.0, 0, edge_target)
        return edges.ravel(), np.abs(xi).ravel()

    def half_density(self, t: float) -> _HalfDensity:
        return _HalfDensity(self.scenario, t)

    def support_gap_at(self, t: float) -> float:
        """Distance between the two target supports at time t (via center)."""
        hd = self.half_density(t)
        lo, hi = hd.target_support()
        return 2.0 * lo if hi > lo else math.inf


def build_branching_plans(tripod: Tripod, scenario: BranchingScenario) -> PlanPair:
    """Construct the mirrored plan pair; validates the geometry fits."""
    if scenario.eps >= 1.0 - scenario.a:
        raise InfeasibleScenarioError("branch window eps must be < 1 - a")
    s_lo, s_hi = scenario.s_window
    tau_lo, tau_hi = scenario.tau_window
    if not (0.0 < scenario.a < tau_lo < tau_hi < scenario.a + scenario.eps):
        raise InfeasibleScenarioError("branch window does not straddle the center crossings")
    if s_hi > tripod.edge_lengths[0] + 1e-12:
        raise InfeasibleScenarioError(
            f"source arc reaches {s_hi}, beyond stem length {tripod.edge_lengths[0]}")
    u_reach = s_hi * (1.0 - tau_lo) / tau_lo
    if u_reach > min(tripod.edge_lengths[1], tripod.edge_lengths[2]) + 1e-12:
        raise InfeasibleScenarioError(
            f"target arcs reach {u_reach}, beyond the outer edge lengths")
    k = _ENSEMBLE_SIDE
    s_nodes = s_lo + (np.arange(k) + 0.5) * (s_hi - s_lo) / k
    tau_nodes = tau_lo + (np.arange(k) + 0.5) * (tau_hi - tau_lo) / k
    pair = PlanPair(tripod=tripod, scenario=scenario,
                    s_nodes=s_nodes, tau_nodes=tau_nodes)
    cert = _density_certificate(pair)
    object.__setattr__(pair, "certificate", cert)
    return pair


def _density_certificate(pair: PlanPair) -> dict:
    """Sups of d(e_b)# pi^d / dm and d(e_1)# pi^{u,d} / dm."""
    sc = pair.scenario
    c_stem = pair.tripod.densities[0]
    c_up, c_dn = pair.tripod.densities[1], pair.tripod.densities[2]
    hd_b = pair.half_density(sc.b)
    hd_1 = pair.half_density(1.0)
    sup_b = hd_b.sup_density("stem") / c_stem
    sup_1u = hd_1.sup_density("target") / c_up
    sup_1d = hd_1.sup_density("target") / c_dn
    return {
        "sup_density_at_b": sup_b,
        "sup_density_up_at_1": sup_1u,
        "sup_density_down_at_1": sup_1d,
        "C": max(sup_b, sup_1u, sup_1d),
    }


def _half_entropy_pieces(pair: PlanPair, t: float, which: str):
    """(edge, side, density_scale) integration pieces for one half plan."""
    target_edge = 1 if which == "u" else 2
    return [(0, "stem"), (target_edge, "target")]


def entropy_along(pair: PlanPair, tripod: Tripod, t: float, which: str = "mixed") -> float:
    """Entropy of the normalized pushforward at time t against the tripod measure.

    which = "u" | "d": (e_t)# pi^{u,d} / beta.  which = "mixed": the
    half-half mixture; at disjoint-support times it satisfies
    Ent(mixed) = (Ent(u) + Ent(d))/2 - log 2 exactly.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0,1]")
    sc = pair.scenario
    beta = sc.beta
    hd = pair.half_density(t)
    cs = tripod.densities

    def ent_piece(side: str, edge: int, scale: float) -> float:
        # integral of rho_hat log(rho_hat) dm with rho_hat = scale*rho_len/c_e
        c = cs[edge]

        def g(rho_len: np.ndarray) -> np.ndarray:
            rh = scale * rho_len / c
            out = np.zeros_like(rh)
            pos = rh > 0.0
            out[pos] = c * rh[pos] * np.log(rh[pos])
            return out

        return hd.integrate(side, g)

    if which in ("u", "d"):
        edge = 1 if which == "u" else 2
        return ent_piece("stem", 0, 1.0 / beta) + ent_piece("target", edge, 1.0 / beta)
    if which != "mixed":
        raise ValueError("which must be 'u', 'd' or 'mixed'")
    # stem parts of the two halves coincide: mixture density = rho_len/beta there
    total = ent_piece("stem", 0, 1.0 / beta)
    total += ent_piece("target", 1, 0.5 / beta)
    total += ent_piece("target", 2, 0.5 / beta)
    return total


def renyi_raw(pair: PlanPair, tripod: Tripod, t: float, which: str, N: float) -> float:
    """int rho^(1-1/N) dm of the unnormalized pushforward (mass beta)."""
    if not N > 1.0:
        raise ValueError("N must be > 1")
    hd = pair.half_density(t)
    cs = tripod.densities
    expo = 1.0 - 1.0 / N

    def piece(side: str, edge: int, scale: float) -> float:
        c = cs[edge]

        def g(rho_len: np.ndarray) -> np.ndarray:
            rh = scale * rho_len / c
            out = np.zeros_like(rh)
            pos = rh > 0.0
            out[pos] = c * rh[pos] ** expo
            return out

        return hd.integrate(side, g)

    if which in ("u", "d"):
        edge = 1 if which == "u" else 2
        return piece("stem", 0, 1.0) + piece("target", edge, 1.0)
    if which == "mixed_sum":
        # int (rho_u + rho_d)^(1-1/N) dm; stem parts add, targets are disjoint
        return piece("stem", 0, 2.0) + piece("target", 1, 1.0) + piece("target", 2, 1.0)
    raise ValueError("which must be 'u', 'd' or 'mixed_sum'")


def entropy_chain_inequality(pair: PlanPair, tripod: Tripod,
                        scenario: BranchingScenario) -> tuple[float, float, dict]:
    """Both sides of the branching entropy chain

        eps (log(eps / (10 m(B(x, eta/2)))) - log C)
            <= -(1 - a - eps) log 2 ((a-b)/(1-b) - a (a+eps-b)/3)

    with C the measured density certificate and m(B(x, eta/2)) the tripod
    ball mass at the branch point.  The right side is a fixed negative
    number while the left tends to 0 as eps -> 0, so for small eps the
    chain fails: that failure is the sought contradiction with entropy
    K-convexity under branching.
    """
    sc = scenario
    C = pair.certificate["C"]
    mball = tripod.measure_ball(tripod.center, sc.eta / 2.0)
    lhs = sc.eps * (math.log(sc.eps / (10.0 * mball)) - math.log(C))
    rhs = (-(1.0 - sc.a - sc.eps) * math.log(2.0)
           * ((sc.a - sc.b) / (1.0 - sc.b) - sc.a * (sc.a + sc.eps - sc.b) / 3.0))
    report = {
        "eps": sc.eps,
        "lhs": lhs,
        "rhs": rhs,
        "C": C,
        "ball_mass": mball,
        "rhs_negative": rhs < 0.0,
        "chain_holds": lhs <= rhs,
        "contradiction": (lhs > rhs) and (rhs < 0.0),
    }
    return lhs, rhs, report


def renyi_contradiction(pair: PlanPair, tripod: Tripod, scenario: BranchingScenario,
                        N: float | None = None, tol: float = 5e-3) -> tuple[float, float, dict]:
    """Measured value of the dimensional-entropy chain at the scenario's eps.

    ratio = [eps/(eps+a-b) R_b + 2^(1/N-1) (a-b)/(a+eps-b) R_mix(a+eps)] / R_a
    tends to 2^(1/N) as eps -> 0; concavity of the dimensional functionals
    would force ratio <= 1, so reaching the threshold reproduces the
    contradiction.
    """
    sc = scenario
    if N is None:
        N = sc.N
    gap = pair.support_gap_at(sc.a + sc.eps)
    if not gap > 0.0:
        raise AssertionError("target supports must be disjoint at a + eps")
    R_a = renyi_raw(pair, tripod, sc.a, "d", N)
    R_b = renyi_raw(pair, tripod, sc.b, "d", N)
    R_mix = renyi_raw(pair, tripod, sc.a + sc.eps, "mixed_sum", N)
    ratio = ((sc.eps / (sc.eps + sc.a - sc.b)) * R_b
             + 2.0 ** (1.0 / N - 1.0) * (sc.a - sc.b) / (sc.a + sc.eps - sc.b) * R_mix) / R_a
    threshold = 2.0 ** (1.0 / N)
    report = {
        "eps": sc.eps,
        "N": N,
        "ratio": ratio,
        "threshold": threshold,
        "R_a": R_a,
        "R_b": R_b,
        "R_mix": R_mix,
        "contradiction": ratio >= threshold * (1.0 - tol),
        "tol": tol,
    }
    return ratio, threshold, report


def mixture_w2_correction(pair: PlanPair, tripod: Tripod, scenario: BranchingScenario,
                          K: float, n_cells: int = 2048) -> dict:
    """|K|/2 * eps(a-b)/(a+eps-b)^2 * W2^2 between the time-b and time-(a+eps)
    mixtures, the curvature correction of the K != 0 chain.

    The two relevant edges unroll isometrically onto a line through the
    center (stem coordinates positive, target coordinates negative; both
    target edges see identical costs, so collapsing them is exact), and the
    distance is computed by the quantile transport path.
    """
    sc = scenario
    hd_b = pair.half_density(sc.b)
    hd_e = pair.half_density(sc.a + sc.eps)
    v_lo, v_hi = hd_b.stem_support()
    u_lo, u_hi = hd_e.target_support()
    pad = 0.05 * max(v_hi, u_hi, 1e-6)
    lo, hi = -u_hi - pad, v_hi + pad
    line = Space1D(Topology1D("line"), WeightFn.constant(0.0, lo, hi),
                   grid_step=(hi - lo) / n_cells, window=(lo, hi))

    def sample(fn, a, b):
        edges = np.linspace(a, b, n_cells + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        return edges, fn(mids)

    e_b, d_b = sample(hd_b.stem_arr, max(v_lo, 0.0), v_hi)
    mass_b = float(np.sum(d_b * np.diff(e_b)))
    nu_b = tr.ProbMeasure1D(line, e_b, d_b / mass_b)
    e_e, d_e = sample(hd_e.target_arr, max(u_lo, 0.0), u_hi)
    mass_e = float(np.sum(d_e * np.diff(e_e)))
    # unroll targets to negative coordinates (mirror, reversed order)
    nu_e = tr.ProbMeasure1D(line, -e_e[::-1], (d_e / mass_e)[::-1])
    dist = tr.w2(line, nu_b, nu_e)
    corr = abs(K) / 2.0 * sc.eps * (sc.a - sc.b) / (sc.a + sc.eps - sc.b) ** 2 * dist * dist
    envelope = abs(K) / 2.0 * sc.eps * (sc.a - sc.b) * sc.eta ** 2
    return {"w2": dist, "correction": corr, "envelope": envelope, "K": K}
