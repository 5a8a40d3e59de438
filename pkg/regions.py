"""Queryable rate regions built from parameterized constraint families.

A :class:`ParamRegion` is the union, over a power-split domain, of the
polytopes a generator returns. Membership is an existential search: the
generator is evaluated over a whole grid at once, then the cell around the
best grid point is halved repeatedly. A point the stencil leaves just
outside is finished with SLSQP on the epigraph form (minimize t subject to
every row violation <= t). No convexification is applied.

On top of membership this module traces 2-D boundary slices by bisection,
tests containment with boundary-biased samples, and measures the largest
boundary gap between two regions along a slice.
"""

import concurrent.futures
import logging
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from bounds import (
    CAPACITY_SPLIT_ARITY,
    GROUP7_SPLIT_MEMBERS,
    ChannelParams,
    ConstraintSet,
    PowerSplit,
    awgn_capacity,
    bestknown_inner,
    bestknown_outer,
    capacity_constraints,
    fourrx_capacity,
    group4_inner,
    group4_outer1,
    group4_outer2,
    group5_successive_inner,
    group7_inner,
    group7_outer1,
    groups56_outer,
    jointdecoding_inner_group7,
)
from graphs import FOUR_RECEIVER_LEADER_ARCS, SideInfoGraph, capacity_known, decompose
from settings import Settings

logger = logging.getLogger(__name__)

SELECTORS = ("capacity", "inner", "outer", "bestknown-inner", "bestknown-outer", "joint-inner")
CONTAIN_SCALES = (0.5, 0.9, 0.99, 1.0)
_REFINE_POINTS = 5  # Points per dimension in each refinement stencil.
_CHUNK = 65536      # Parameter points evaluated per vectorized call.
_POLISH_ITER = 100
_POLISH_LOCK = threading.Lock()  # SLSQP is not reentrant across threads.


class RegionError(ValueError):
    """Region query outside its domain (dimension mismatch, invalid selector)."""


class SelectorError(RegionError):
    """Bound selector not defined for the requested configuration."""


@dataclass(frozen=True)
class ParamDomain:
    """Power-split domain: a simplex of ``dim`` fractions or the unit box ``[0,1]^dim``."""
    kind: str
    dim: int

    def grid(self, points: int) -> np.ndarray:
        """Grid over the domain as a ``(dim, K)`` array."""
        if self.dim == 0:
            return np.zeros((0, 1))
        axis = np.linspace(0.0, 1.0, points)
        if self.kind == "box":
            mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
            return np.stack([m.ravel() for m in mesh])
        if self.dim == 1:
            return np.ones((1, 1))
        if self.dim == 2:
            return np.stack([axis, 1.0 - axis])
        # Triangular grid on the 2-simplex.
        i, j = np.meshgrid(np.arange(points), np.arange(points), indexing="ij")
        keep = i + j <= points - 1
        a1 = i[keep] / (points - 1)
        a2 = j[keep] / (points - 1)
        return np.stack([a1, a2, np.clip(1.0 - a1 - a2, 0.0, 1.0)])

    def free_dims(self) -> int:
        return self.dim if self.kind == "box" else max(self.dim - 1, 0)

    def complete(self, free: np.ndarray) -> np.ndarray:
        """``(dim, 1)`` split from its free coordinates, pulled back into the domain."""
        x = np.clip(np.asarray(free, dtype=float), 0.0, 1.0)
        if self.kind == "box":
            return x.reshape(-1, 1)
        total = x.sum()
        if total > 1.0:
            x = x / total
        return np.append(x, max(0.0, 1.0 - x.sum())).reshape(-1, 1)

    def stencil(self, center: np.ndarray, radius: float) -> np.ndarray:
        """Local grid of half-width ``radius`` around ``center``, clipped to the domain."""
        free = self.free_dims()
        if free == 0:
            return center.reshape(-1, 1)
        offsets = np.linspace(-radius, radius, _REFINE_POINTS)
        mesh = np.meshgrid(*([offsets] * free), indexing="ij")
        moved = center[:free, None] + np.stack([m.ravel() for m in mesh])
        moved = np.clip(moved, 0.0, 1.0)
        if self.kind == "box":
            return moved
        last = 1.0 - moved.sum(axis=0)
        ok = last >= 0.0
        return np.vstack([moved[:, ok], last[ok][None, :]])


@dataclass
class ParamRegion:
    """Union over ``domain`` of ``generator(params)``; ``params`` is ``(dim, K)``."""
    generator: Callable[[np.ndarray], ConstraintSet]
    domain: ParamDomain
    label: str
    num_rates: int
    rate_limit: float
    settings: Settings = field(default_factory=Settings)

    def _best(self, score, params: np.ndarray) -> "tuple[float, np.ndarray]":
        worst, best = np.inf, params[:, 0]
        for start in range(0, params.shape[1], _CHUNK):
            chunk = params[:, start:start + _CHUNK]
            v = np.atleast_1d(score(self.generator(chunk)))
            k = int(np.argmin(v))
            if v[k] < worst:
                worst, best = float(v[k]), chunk[:, k]
        return worst, best

    def _search(self, score, stop: float) -> "tuple[float, np.ndarray]":
        """Grid minimum of ``score`` followed by stencil refinement around it."""
        s = self.settings
        worst, best = self._best(score, self.domain.grid(s.param_grid))
        if worst <= stop or self.domain.free_dims() == 0:
            return worst, best
        radius = 1.0 / (s.param_grid - 1)
        for _ in range(s.refine_steps):
            cand, point = self._best(score, self.domain.stencil(best, radius))
            if cand < worst:
                worst, best = cand, point
            if worst <= stop:
                break
            radius /= 2.0
        return worst, best

    def _violation_at(self, r: np.ndarray, free: np.ndarray) -> float:
        return float(np.atleast_1d(self.generator(self.domain.complete(free)).violation(r))[0])

    def _polish(self, r: np.ndarray, best: np.ndarray) -> float:
        """Minimize the worst row from ``best`` with SLSQP on the epigraph ``rows <= t``."""
        free = self.domain.free_dims()

        def rows(z: np.ndarray) -> np.ndarray:
            cs = self.generator(self.domain.complete(z[:free]))
            return z[free] - (cs.coefs @ r - cs.bounds.reshape(len(cs), -1)[:, 0])

        constraints = [{"type": "ineq", "fun": rows}]
        if self.domain.kind == "simplex":
            constraints.append({"type": "ineq", "fun": lambda z: 1.0 - z[:free].sum()})
        unit = np.eye(free + 1)[free]
        start = np.append(best[:free], self._violation_at(r, best[:free]))
        try:
            with _POLISH_LOCK:
                res = minimize(lambda z: z[free], start, jac=lambda z: unit, method="SLSQP",
                               bounds=[(0.0, 1.0)] * free + [(None, None)], constraints=constraints,
                               options={"maxiter": _POLISH_ITER, "ftol": 1e-14})
            return self._violation_at(r, res.x[:free])
        except (ValueError, FloatingPointError) as e:
            logger.debug("polish failed for %s: %s", self.label, e)
            return np.inf

    def min_violation(self, r) -> float:
        """Smallest worst-row violation over the searched power splits."""
        r = np.asarray(r, dtype=float)
        if r.shape != (self.num_rates,):
            raise RegionError(f"rate vector has {r.size} entries, region {self.label} has {self.num_rates}")
        s = self.settings
        worst, best = self._search(lambda cs: cs.violation(r), s.member_tol)
        if worst > s.member_tol and self.domain.free_dims() > 0:
            worst = min(worst, self._polish(r, best))
        return worst

    def reach(self, direction) -> Optional[float]:
        """Largest searched ``t`` with ``t * direction`` in the region.

        None when the generator emits negative coefficients, where the
        feasible part of a ray need not start at the origin.
        """
        d = np.asarray(direction, dtype=float)
        if np.any(self.generator(self.domain.grid(2)[:, :1]).coefs < 0):
            return None
        score, _ = self._search(lambda cs: -cs.reach(d), -np.inf)
        return max(-score, 0.0)


@dataclass
class IntersectRegion:
    """Intersection of regions whose splits are chosen independently."""
    parts: "list[ParamRegion]"
    label: str

    @property
    def num_rates(self) -> int:
        return self.parts[0].num_rates

    @property
    def rate_limit(self) -> float:
        return min(p.rate_limit for p in self.parts)

    @property
    def settings(self) -> Settings:
        return self.parts[0].settings

    def min_violation(self, r) -> float:
        return max(p.min_violation(r) for p in self.parts)

    def reach(self, direction) -> Optional[float]:
        reaches = [p.reach(direction) for p in self.parts]
        return None if any(t is None for t in reaches) else min(reaches)


@dataclass
class BoundarySlice:
    fixed: "dict[int, float]"
    sweep_axis: int
    response_axis: int
    samples: "list[tuple[float, float]]"

    def to_csv(self) -> str:
        lines = ["sweep,response"]
        lines += [f"{s:.9g},{r:.9g}" for s, r in self.samples]
        return "\n".join(lines) + "\n"


def member(region, r, tol: Optional[float] = None) -> bool:
    """Whether some searched power split puts ``r`` inside the region."""
    r = np.asarray(r, dtype=float)
    if r.shape != (region.num_rates,):
        raise RegionError(f"rate vector has {r.size} entries, region has {region.num_rates}")
    tol = region.settings.member_tol if tol is None else tol
    return region.min_violation(r) <= tol


def _sup_along(region, base: np.ndarray, axis: int, hi: float, tol: float, resolution: float) -> float:
    """Largest t in [0, hi] with base + t e_axis a member (downward closure assumed)."""
    point = base.copy()
    point[axis] = hi
    if member(region, point, tol):
        return hi
    lo = 0.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        point[axis] = mid
        if member(region, point, tol):
            lo = mid
        else:
            hi = mid
    return lo


def slice2d(region, fixed: "tuple[int, float]", sweep: int, response: int,
            grid: Optional[int] = None, sweep_max: Optional[float] = None,
            tol: Optional[float] = None) -> BoundarySlice:
    """Boundary of the region in the (sweep, response) plane at a fixed third rate.

    Axes are 0-based rate indices. Sweep values run from 0 to the region's
    extent along ``sweep`` (or ``sweep_max``). An empty slice is returned when
    the fixed value already lies outside the region. Responses are kept
    non-increasing; a sample the running minimum has to clip is logged as a
    warning, since a downward-closed region never produces one.
    """
    fixed_axis, fixed_value = fixed
    axes = {fixed_axis, sweep, response}
    if len(axes) != 3 or any(not 0 <= a < region.num_rates for a in axes):
        raise RegionError(f"slice axes must be distinct rate indices, got {fixed_axis}, {sweep}, {response}")
    if fixed_value < 0:
        raise RegionError(f"fixed rate must be nonnegative, got {fixed_value}")
    s = region.settings
    grid = grid or s.slice_grid
    tol = s.member_tol if tol is None else tol
    label = getattr(region, "label", "")
    base = np.zeros(region.num_rates)
    base[fixed_axis] = fixed_value
    out = BoundarySlice({fixed_axis: fixed_value}, sweep, response, [])
    if not member(region, base, tol):
        logger.warning("fixed rate %.6g lies outside %s; empty slice", fixed_value, label)
        return out
    limit = region.rate_limit * (1 + 1e-9) + 1e-12
    if sweep_max is None:
        sweep_max = _sup_along(region, base, sweep, limit, tol, s.boundary_tol)
    running = limit
    for value in np.linspace(0.0, sweep_max, grid):
        point = base.copy()
        point[sweep] = value
        if not member(region, point, tol):
            continue
        resp = _sup_along(region, point, response, limit, tol, s.boundary_tol)
        if resp - running > s.boundary_tol:
            logger.warning("response %.6g at sweep %.6g clipped to %.6g: %s is not downward-closed",
                           resp, value, running, label)
        running = min(running, resp)
        out.samples.append((float(value), float(running)))
    logger.debug("traced %d slice samples for %s", len(out.samples), label)
    return out


def boundary_point(region, direction: Sequence[float], tol: Optional[float] = None) -> np.ndarray:
    """Furthest member point along a nonnegative ray from the origin.

    Regions with nonnegative rows are searched for the ray's reach directly;
    others are bisected on membership at ``tol``.
    """
    d = np.asarray(direction, dtype=float)
    if d.shape != (region.num_rates,) or np.any(d < 0) or not np.any(d > 0):
        raise RegionError("direction must be a nonzero nonnegative vector of the region's dimension")
    d = d / d.max()
    lo, hi = 0.0, region.rate_limit * (1 + 1e-9) + 1e-12
    reach = region.reach(d)
    if reach is not None:
        return min(reach, hi) * d
    tol = region.settings.member_tol if tol is None else tol
    if member(region, hi * d, tol):
        return hi * d
    while hi - lo > region.settings.boundary_tol:
        mid = 0.5 * (lo + hi)
        if member(region, mid * d, tol):
            lo = mid
        else:
            hi = mid
    return lo * d


def contains(a, b, samples: Optional[int] = None, tol: float = 1e-6,
             seed: int = 0) -> "tuple[bool, Optional[np.ndarray]]":
    """Sampled test of ``b ⊆ a``.

    Points on b's boundary along random rays, scaled by 0.5, 0.9, 0.99 and 1
    (members of b by downward closure), are checked against ``a``; the first
    point outside a is returned as a witness.
    """
    if a.num_rates != b.num_rates:
        raise RegionError(f"dimension mismatch: {a.num_rates} vs {b.num_rates}")
    samples = samples or b.settings.contain_samples
    rng = np.random.default_rng(seed)
    rays = max(1, -(-samples // len(CONTAIN_SCALES)))
    directions = rng.dirichlet(np.ones(b.num_rates), size=rays)

    def check(direction: np.ndarray) -> Optional[np.ndarray]:
        edge = boundary_point(b, direction)
        for scale in CONTAIN_SCALES:
            point = edge * scale
            if not member(a, point, tol):
                return point
        return None

    workers = max(1, min(b.settings.workers, rays))
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        for witness in executor.map(check, directions):
            if witness is not None:
                return False, witness
    return True, None


def hausdorff_gap(a, b, fixed: "tuple[int, float]", sweep: int, response: int,
                  grid: Optional[int] = None,
                  sweep_range: Optional["tuple[float, float]"] = None) -> float:
    """Largest boundary gap between two regions along a slice.

    Responses are compared on a sweep grid up to the shorter of the two
    extents; the difference between the extents counts too whenever the band
    reaches them. ``sweep_range`` restricts the comparison to a band of sweep
    values.
    """
    if a.num_rates != b.num_rates:
        raise RegionError(f"dimension mismatch: {a.num_rates} vs {b.num_rates}")
    s = a.settings
    base = np.zeros(a.num_rates)
    base[fixed[0]] = fixed[1]
    extents = [
        _sup_along(r, base, sweep, r.rate_limit * (1 + 1e-9) + 1e-12, s.member_tol, s.boundary_tol)
        if member(r, base) else 0.0
        for r in (a, b)
    ]
    lo, hi = (0.0, np.inf) if sweep_range is None else sweep_range
    # Stay off the shorter extent itself, where the response is decided by a tie.
    hi = min(hi, max(min(extents) - s.boundary_tol, 0.0))
    if hi < lo:
        raise RegionError("empty sweep band")
    resp_a = dict(slice2d(a, fixed, sweep, response, grid, sweep_max=hi).samples)
    resp_b = dict(slice2d(b, fixed, sweep, response, grid, sweep_max=hi).samples)
    gaps = [
        abs(resp_a[v] - resp_b[v])
        for v in resp_a
        if v in resp_b and lo - 1e-12 <= v <= hi + 1e-12
    ]
    if not gaps:
        raise RegionError("no shared slice samples inside the sweep band")
    if sweep_range is None or sweep_range[1] >= max(extents):
        gaps.append(abs(extents[0] - extents[1]))
    return max(gaps)


def _simplex(arity: int) -> ParamDomain:
    return ParamDomain("simplex", arity)


def _split(params: np.ndarray) -> PowerSplit:
    return PowerSplit(tuple(params))


def region_for(selector: str, g: SideInfoGraph, p: ChannelParams,
               settings: Optional[Settings] = None):
    """Build the region a CLI bound selector names for this configuration.

    Raises :class:`SelectorError` when the selector has no meaning for the
    configuration's group (e.g. ``capacity`` for an unsolved member).
    """
    settings = settings or Settings()
    if selector not in SELECTORS:
        raise SelectorError(f"unknown bound selector {selector!r}; choose from {', '.join(SELECTORS)}")
    limit = awgn_capacity(p.P / p.N[0])

    def make(generator, domain, label):
        return ParamRegion(generator, domain, label, g.num_receivers, limit, settings)

    outer_prior = make(lambda prm: bestknown_outer(g, p), ParamDomain("box", 0), "best-known outer")
    if g.num_receivers == 4:
        if selector == "capacity":
            if g.arcs != FOUR_RECEIVER_LEADER_ARCS:
                raise SelectorError("four-receiver capacity is known only for the leader in graphs.FOUR_RECEIVER_LEADER_ARCS")
            return make(lambda prm: fourrx_capacity(p, prm[0]), ParamDomain("box", 1), "four-receiver capacity")
        if selector == "bestknown-outer":
            return outer_prior
        raise SelectorError(f"selector {selector!r} is not defined for four receivers")
    if g.num_receivers != 3:
        raise SelectorError(f"no regions for {g.num_receivers} receivers")

    gm = decompose(g)
    if selector == "bestknown-outer":
        return outer_prior
    if selector == "bestknown-inner":
        return make(lambda prm: bestknown_inner(g, p, _split(prm)), _simplex(3), "best-known inner")
    if selector == "joint-inner":
        if gm.group != 7 or gm.member not in GROUP7_SPLIT_MEMBERS:
            raise SelectorError(f"joint-inner is defined for group-7 members 1, 3, 4, 6, not {gm.label()}")
        return make(lambda prm: jointdecoding_inner_group7(gm, g, p, _split(prm)), _simplex(3),
                    f"joint-decoding inner {gm.label()}")

    if gm.group in CAPACITY_SPLIT_ARITY:
        if selector == "capacity":
            return make(lambda prm: capacity_constraints(gm, g, p, _split(prm)),
                        _simplex(CAPACITY_SPLIT_ARITY[gm.group]), f"capacity {gm.label()}")
        if selector == "outer" and gm.group in (5, 6):
            own = make(lambda prm: groups56_outer(gm.group, p, prm[0]), ParamDomain("box", 1),
                       f"group-{gm.group} outer")
            return IntersectRegion([own, outer_prior], f"outer {gm.label()}")
        raise SelectorError(f"{selector!r} is not defined for {gm.label()}; its capacity is known")

    if gm.group == 4:
        if selector == "capacity":
            raise SelectorError(f"capacity of {gm.label()} is unknown; use inner or outer")
        if selector == "inner":
            return make(lambda prm: group4_inner(gm, g, p, prm[0], prm[1]), ParamDomain("box", 2),
                        f"group-4 inner {gm.label()}")
        first = make(lambda prm: group4_outer1(p, prm[0]), ParamDomain("box", 1), "group-4 outer 1")
        second = make(lambda prm: group4_outer2(gm, g, p, _split(prm)), _simplex(2),
                      f"group-4 outer 2 {gm.label()}")
        return IntersectRegion([first, second], f"outer {gm.label()}")

    # Group 7.
    if selector == "capacity" and not capacity_known(gm):
        raise SelectorError(f"capacity of {gm.label()} is unknown; use inner or outer")
    if selector in ("capacity", "inner"):
        return make(lambda prm: group7_inner(gm, g, p, prm[0]), ParamDomain("box", 1),
                    f"group-7 inner {gm.label()}")
    own = make(lambda prm: group7_outer1(p, prm[0]), ParamDomain("box", 1), "group-7 outer 1")
    return IntersectRegion([own, outer_prior], f"outer {gm.label()}")


def successive_region(p: ChannelParams, settings: Optional[Settings] = None) -> ParamRegion:
    """G15∪G21 under successive decoding only (see bounds.group5_successive_inner)."""
    return ParamRegion(
        lambda prm: group5_successive_inner(p, _split(prm)),
        _simplex(2),
        "group-5 successive inner",
        3,
        awgn_capacity(p.P / p.N[0]),
        settings or Settings(),
    )
