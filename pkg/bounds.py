"""Rate-region formulas evaluated as linear constraint sets.

Every region of the toolkit is a union, over a power split, of polytopes
``{R : sum_{i in S} R_i <= bound}`` with 0/1 coefficients. The functions here
evaluate one polytope of such a family at concrete channel parameters and a
concrete split. Splits may also be numpy arrays of equal shape: the bounds are
then evaluated elementwise and each :class:`ConstraintSet` row carries one
bound per split, which is how ``regions.py`` searches whole grids at once.

Rates are in bits per channel use (``C(t) = log2(1 + t) / 2``). Strict rate
inequalities are evaluated as closed ones; capacity regions are closures.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import bisect

from graphs import GroupMember, SideInfoGraph, decompose, induced_acyclic_subgraphs, relabel

logger = logging.getLogger(__name__)

SIMPLEX_TOL = 1e-12
THRESHOLD_XTOL = 1e-10
THRESHOLD_MAXITER = 200

# Power-split arity of each solved group (group 8 uses one codebook).
CAPACITY_SPLIT_ARITY = {1: 3, 2: 2, 3: 2, 5: 2, 6: 2, 8: 0}
GROUP4_FAMILY2_MEMBERS = frozenset({2, 5})
GROUP7_SPLIT_MEMBERS = frozenset({1, 3, 4, 6})

Scalar = Union[float, np.ndarray]


class BoundError(ValueError):
    """A bound was requested outside its domain (group, arity, range)."""


@dataclass(frozen=True)
class ChannelParams:
    """Transmit power and noise variances, receivers ordered strongest first."""
    P: float
    N: "tuple[float, ...]"

    def __post_init__(self):
        object.__setattr__(self, "N", tuple(float(n) for n in self.N))
        if self.P < 0:
            raise BoundError(f"transmit power must be nonnegative, got {self.P}")
        if any(n <= 0 for n in self.N):
            raise BoundError(f"noise variances must be positive, got {self.N}")
        if any(a > b for a, b in zip(self.N, self.N[1:])):
            raise BoundError(f"noise variances must be ascending, got {self.N}")

    @property
    def num_receivers(self) -> int:
        return len(self.N)

    def noise(self, i: int) -> float:
        """Noise variance of receiver ``i`` (1-based)."""
        return self.N[i - 1]

    def snr(self, i: int) -> float:
        return self.P / self.N[i - 1]

    def to_json(self) -> dict:
        return {"P": self.P, "N": list(self.N)}


@dataclass(frozen=True)
class PowerSplit:
    alphas: "tuple[Scalar, ...]" = ()
    beta: Optional[Scalar] = None

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        if self.alphas:
            stacked = np.asarray(np.broadcast_arrays(*self.alphas), dtype=float)
            if np.any(stacked < -SIMPLEX_TOL):
                raise BoundError("power fractions must be nonnegative")
            if np.any(np.abs(stacked.sum(axis=0) - 1.0) > SIMPLEX_TOL):
                raise BoundError("power fractions must sum to 1")
        if self.beta is not None:
            _check_unit("beta", self.beta)


@dataclass(eq=False)
class ConstraintSet:
    """Rows ``coefs[k] . R <= bounds[k]``.

    ``bounds`` is ``(m,)`` for a single split or ``(m, K)`` when evaluated
    over K splits at once.
    """
    coefs: np.ndarray
    bounds: np.ndarray
    label: str = field(default="")

    @classmethod
    def from_rows(cls, num_rates: int, rows, label: str = "") -> "ConstraintSet":
        """Build from ``(receivers, bound)`` pairs, receivers 1-based."""
        coefs = np.zeros((len(rows), num_rates), dtype=int)
        for k, (receivers, _) in enumerate(rows):
            for i in receivers:
                coefs[k, i - 1] = 1
        shape = np.broadcast_shapes(*(np.shape(b) for _, b in rows)) if rows else ()
        bounds = np.array([np.broadcast_to(np.asarray(b, dtype=float), shape) for _, b in rows])
        if not rows:
            bounds = np.zeros((0,), dtype=float)
        return cls(coefs, bounds, label)

    @property
    def num_rates(self) -> int:
        return self.coefs.shape[1]

    def __len__(self) -> int:
        return self.coefs.shape[0]

    @property
    def constraints(self) -> "list[tuple[tuple[int, ...], float]]":
        if self.bounds.ndim != 1:
            raise BoundError("constraints() needs a set evaluated at a single split")
        return [(tuple(int(c) for c in row), float(b)) for row, b in zip(self.coefs, self.bounds)]

    def violation(self, r) -> np.ndarray:
        """Largest ``coefs . r - bound`` over rows (per split when vectorized)."""
        r = np.asarray(r, dtype=float)
        if r.shape != (self.num_rates,):
            raise BoundError(f"rate vector has {r.size} entries, region has {self.num_rates}")
        if len(self) == 0:
            return np.full(self.bounds.shape[1:], -np.inf)
        lhs = self.coefs @ r
        return np.max(lhs.reshape((-1,) + (1,) * (self.bounds.ndim - 1)) - self.bounds, axis=0)

    def reach(self, direction) -> np.ndarray:
        """Largest ``t`` with ``t * direction`` satisfying every row (per split when vectorized).

        Meant for nonnegative coefficients and directions. A split whose
        polytope misses the origin gives ``-inf``.
        """
        d = np.asarray(direction, dtype=float)
        if d.shape != (self.num_rates,):
            raise BoundError(f"direction has {d.size} entries, region has {self.num_rates}")
        if len(self) == 0:
            return np.full(self.bounds.shape[1:], np.inf)
        lhs = (self.coefs @ d).reshape((-1,) + (1,) * (self.bounds.ndim - 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(lhs > 0, self.bounds / lhs, np.inf).min(axis=0)
        return np.where(np.any(self.bounds < 0, axis=0), -np.inf, t)

    def satisfied(self, r, tol: float = 0.0) -> bool:
        return bool(np.all(self.violation(r) <= tol))

    def slack(self, r) -> np.ndarray:
        """Per-row ``bound - coefs . r`` at a single split; negative entries are violated rows."""
        if self.bounds.ndim != 1:
            raise BoundError("slack() needs a set evaluated at a single split")
        return self.bounds - self.coefs @ np.asarray(r, dtype=float)

    def intersect(self, other: "ConstraintSet") -> "ConstraintSet":
        return ConstraintSet(
            np.vstack([self.coefs, other.coefs]),
            np.concatenate([self.bounds, other.bounds]),
            f"{self.label} ∩ {other.label}".strip(" ∩"),
        )

    def to_json(self) -> "list[dict]":
        return [{"coef": list(c), "bound": b} for c, b in self.constraints]


@dataclass(frozen=True)
class Thresholds:
    """Group-4 coincidence thresholds at a fixed R1; gamma/eta are the roots used."""
    r_thr3: float
    r_thr3_prime: float
    gamma: Optional[float] = None
    eta: Optional[float] = None


def _check_unit(name: str, value: Scalar) -> None:
    v = np.asarray(value, dtype=float)
    if np.any(v < -SIMPLEX_TOL) or np.any(v > 1 + SIMPLEX_TOL):
        raise BoundError(f"{name} must lie in [0, 1]")


def awgn_capacity(t: Scalar) -> Scalar:
    """C(t) = log2(1 + t) / 2 for a nonnegative SNR (scalar or array)."""
    if np.any(np.asarray(t) < 0):
        raise BoundError(f"SNR must be nonnegative, got {t}")
    out = 0.5 * np.log2(1.0 + np.asarray(t, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def _c(num: Scalar, den: Scalar) -> Scalar:
    """C(num/den) with split round-off clipped to zero."""
    return 0.5 * np.log2(1.0 + np.maximum(num, 0.0) / den)


def _unknown(g: SideInfoGraph, i: int, candidates: Sequence[int]) -> "tuple[int, ...]":
    known = g.out_neighbors(i)
    return tuple(j for j in candidates if j not in known)


def _check_member(gm: GroupMember, g: SideInfoGraph) -> None:
    if decompose(g) != gm:
        raise BoundError(f"graph decomposes to {decompose(g).label()}, not {gm.label()}")


def _check_channel(p: ChannelParams, num_receivers: int) -> None:
    if p.num_receivers != num_receivers:
        raise BoundError(f"channel has {p.num_receivers} receivers, expected {num_receivers}")


def capacity_constraints(gm: GroupMember, g: SideInfoGraph, p: ChannelParams,
                         s: PowerSplit) -> ConstraintSet:
    """Capacity row of the solved groups 1, 2, 3, 5, 6 and 8."""
    if gm.group not in CAPACITY_SPLIT_ARITY:
        raise BoundError(f"group {gm.group} has no capacity row; use the group-4/7 bounds")
    arity = CAPACITY_SPLIT_ARITY[gm.group]
    if len(s.alphas) != arity:
        raise BoundError(f"group {gm.group} needs {arity} power fractions, got {len(s.alphas)}")
    _check_member(gm, g)
    _check_channel(p, 3)
    P, (N1, N2, N3) = p.P, p.N
    a = s.alphas
    all3 = (1, 2, 3)

    if gm.group == 1:
        rows = [
            ((1,), _c(a[0] * P, N1)),
            ((2,), _c(a[1] * P, a[0] * P + N2)),
            ((3,), _c(a[2] * P, (a[0] + a[1]) * P + N3)),
        ]
    elif gm.group == 2:
        rows = [
            ((1,), _c(a[0] * P, N1)),
            (_unknown(g, 2, (2, 3)), _c(a[1] * P, a[0] * P + N2)),
            ((3,), _c(a[1] * P, a[0] * P + N3)),
        ]
    elif gm.group == 3:
        rows = [
            (_unknown(g, 1, (1, 2)), _c(a[0] * P, N1)),
            ((2,), _c(a[0] * P, N2)),
            ((3,), _c(a[1] * P, a[0] * P + N3)),
        ]
    elif gm.group == 5 and gm.member == 2:
        # R1 + max{R2, R3} <= C(P/N1), linearized.
        rows = [
            ((1, 2), _c(P, N1)),
            ((1, 3), _c(P, N1)),
            ((1,), _c(a[0] * P, N1)),
            ((2,), _c(P, N2)),
            ((3,), _c(a[1] * P, a[0] * P + N3)),
        ]
    elif gm.group == 5:
        rows = [
            (_unknown(g, 1, all3), _c(P, N1)),
            ((1,), _c(a[0] * P, N1)),
            (_unknown(g, 2, all3), _c(P, N2)),
            ((3,), _c(a[1] * P, a[0] * P + N3)),
        ]
    elif gm.group == 6:
        rows = [
            (_unknown(g, 1, all3), _c(P, N1)),
            ((2,), _c(a[0] * P, N2)),
            ((3,), _c(a[1] * P, a[0] * P + N3)),
        ]
    elif gm.member == 2:
        rows = [
            ((1, 2), _c(P, N1)),
            ((1, 3), _c(P, N1)),
            ((2,), _c(P, N2)),
            ((3,), _c(P, N3)),
        ]
    else:
        rows = [
            (_unknown(g, 1, all3), _c(P, N1)),
            (_unknown(g, 2, all3), _c(P, N2)),
            ((3,), _c(P, N3)),
        ]
    return ConstraintSet.from_rows(3, rows, f"capacity {gm.label()}")


def _group4_layers(p: ChannelParams, alpha: Scalar, beta: Scalar, noise: float) -> "tuple[Scalar, Scalar]":
    """Rates of the outer (x3) and dirty-paper (x1) layers seen at ``noise``."""
    P = p.P
    outer = _c(alpha * (1 - beta) * P, alpha * beta * P + (1 - alpha) * P + noise)
    inner = _c(alpha * beta * P, noise)
    return outer, inner


def _group4_family1_rows(g: SideInfoGraph, p: ChannelParams, alpha: Scalar, beta: Scalar):
    N1, N2, N3 = p.N
    a1, b1 = _group4_layers(p, alpha, beta, N1)
    a3, b3 = _group4_layers(p, alpha, beta, N3)
    return [
        (_unknown(g, 1, (1, 3)), a1 + b1),
        ((2,), _c((1 - alpha) * p.P, alpha * beta * p.P + N2)),
        ((3,), a3 + b3),
    ]


def group4_inner(gm: GroupMember, g: SideInfoGraph, p: ChannelParams,
                 alpha: Scalar, beta: Scalar) -> ConstraintSet:
    """Group-4 inner bound at (alpha, beta), by member family."""
    if gm.group != 4:
        raise BoundError(f"group4_inner needs group 4, got group {gm.group}")
    _check_unit("alpha", alpha)
    _check_unit("beta", beta)
    _check_member(gm, g)
    _check_channel(p, 3)
    rows = _group4_family1_rows(g, p, alpha, beta)
    if gm.member in GROUP4_FAMILY2_MEMBERS:
        a1, b1 = _group4_layers(p, alpha, beta, p.N[0])
        rows = [
            ((1,), a1 + b1),
            (_unknown(g, 1, (1, 2, 3)), _c(p.P, p.N[0])),
        ] + rows[1:]
    return ConstraintSet.from_rows(3, rows, f"group-4 inner {gm.label()}")


def group4_inner_basic(gm: GroupMember, g: SideInfoGraph, p: ChannelParams,
                       alpha: Scalar, beta: Scalar) -> ConstraintSet:
    """First-family group-4 region for any member.

    Also achievable for members 2 and 5, where it is contained in their
    dedicated region.
    """
    if gm.group != 4:
        raise BoundError(f"group4_inner_basic needs group 4, got group {gm.group}")
    _check_unit("alpha", alpha)
    _check_unit("beta", beta)
    _check_member(gm, g)
    _check_channel(p, 3)
    return ConstraintSet.from_rows(3, _group4_family1_rows(g, p, alpha, beta),
                                   f"group-4 basic inner {gm.label()}")


def dpc_coefficients(p: ChannelParams, alpha: float, beta: float) -> "tuple[float, float]":
    """(lambda1, lambda2) of the two dirty-paper layers in the group-4 schemes."""
    _check_unit("alpha", alpha)
    _check_unit("beta", beta)
    P, (_, N2, N3) = p.P, p.N
    lam2 = (1 - alpha) * P / ((1 - alpha) * P + alpha * beta * P + N2)
    lam1 = alpha * beta * P / (alpha * beta * P + N3)
    return lam1, lam2


def group4_outer1(p: ChannelParams, alpha: Scalar) -> ConstraintSet:
    _check_unit("alpha", alpha)
    _check_channel(p, 3)
    P, (N1, N2, N3) = p.P, p.N
    rows = [
        ((1,), _c(P, N1)),
        ((2,), _c((1 - alpha) * P, N2)),
        ((3,), _c(alpha * P, (1 - alpha) * P + N3)),
    ]
    return ConstraintSet.from_rows(3, rows, "group-4 outer 1")


_SWAP_23 = {2: 3, 3: 2}


def enhanced_channel(gm: GroupMember, g: SideInfoGraph,
                     p: ChannelParams) -> "tuple[SideInfoGraph, ChannelParams, GroupMember]":
    """Lower receiver 3's noise to N2 and swap receivers 2 and 3.

    The result is a group-5 member when receiver 2 knows M3, else group 3.
    """
    if gm.group != 4:
        raise BoundError(f"enhanced_channel needs group 4, got group {gm.group}")
    _check_member(gm, g)
    _check_channel(p, 3)
    eg = relabel(g, _SWAP_23)
    ep = ChannelParams(p.P, (p.N[0], p.N[1], p.N[1]))
    egm = decompose(eg)
    expected = 5 if (2, 3) in g.arcs else 3
    if egm.group != expected:
        raise BoundError(f"enhanced channel classified as {egm.label()}, expected group {expected}")
    return eg, ep, egm


def group4_outer2(gm: GroupMember, g: SideInfoGraph, p: ChannelParams, s: PowerSplit) -> ConstraintSet:
    """Capacity row of the enhanced channel, mapped back to the original rates."""
    eg, ep, egm = enhanced_channel(gm, g, p)
    cs = capacity_constraints(egm, eg, ep, s)
    return ConstraintSet(cs.coefs[:, [0, 2, 1]], cs.bounds, f"group-4 outer 2 {gm.label()}")


def group4_thresholds(p: ChannelParams, r1: float) -> Thresholds:
    """R_thr3 and R'_thr3 bracketing where the group-4 bounds coincide at this R1."""
    _check_channel(p, 3)
    P, (N1, _, N3) = p.P, p.N
    cap1 = awgn_capacity(P / N1)
    if r1 < 0 or r1 > cap1 + SIMPLEX_TOL:
        raise BoundError(f"R1={r1} outside [0, C(P/N1)={cap1}]")
    if r1 == 0:
        return Thresholds(0.0, 0.0)
    gap = cap1 - awgn_capacity(P / N3)
    if r1 >= gap:
        rest = max(cap1 - r1, 0.0)
        return Thresholds(rest, rest)

    def f_gamma(gamma: float) -> float:
        return _c(gamma * P, N1) - _c(gamma * P, N3) - r1

    def f_eta(eta: float) -> float:
        return _c(eta * P, (1 - eta) * P + N1) - _c(eta * P, (1 - eta) * P + N3) - r1

    try:
        gamma = bisect(f_gamma, 0.0, 1.0, xtol=THRESHOLD_XTOL, maxiter=THRESHOLD_MAXITER)
        eta = bisect(f_eta, 0.0, 1.0, xtol=THRESHOLD_XTOL, maxiter=THRESHOLD_MAXITER)
    except (ValueError, RuntimeError) as e:
        raise BoundError(f"threshold root not bracketed at R1={r1}: {e}") from e
    logger.debug("thresholds at R1=%.6g: gamma=%.12g eta=%.12g", r1, gamma, eta)
    return Thresholds(
        float(_c(gamma * P, N3)),
        float(_c(eta * P, (1 - eta) * P + N3)),
        gamma=float(gamma),
        eta=float(eta),
    )


def group7_inner(gm: GroupMember, g: SideInfoGraph, p: ChannelParams, alpha: Scalar) -> ConstraintSet:
    """Group-7 inner row at power split alpha (the capacity row for members 2, 5, 7, 8)."""
    if gm.group != 7:
        raise BoundError(f"group7_inner needs group 7, got group {gm.group}")
    _check_unit("alpha", alpha)
    _check_member(gm, g)
    _check_channel(p, 3)
    P, (N1, N2, N3) = p.P, p.N
    weak = _c((1 - alpha) * P, alpha * P + N2)
    full3 = _c(P, N3)
    if gm.member in GROUP7_SPLIT_MEMBERS:
        rows = [
            ((2,) + _unknown(g, 1, (1, 3)), weak + _c(alpha * P, N1)),
            ((2,), weak),
            ((2, 3), weak + _c(alpha * P, N3)),
            ((3,), full3),
        ]
    else:
        rows = [
            ((1,), _c(alpha * P, N1)),
            (_unknown(g, 1, (1, 3)), _c(P, N1)),
            ((2,), weak),
            ((3,), full3),
        ]
    return ConstraintSet.from_rows(3, rows, f"group-7 inner {gm.label()}")


def _split_outer(p: ChannelParams, alpha: Scalar, i: int, j: int, q: int, label: str) -> ConstraintSet:
    P = p.P
    rows = [
        ((i,), _c(alpha * P, p.noise(i))),
        ((j,), _c((1 - alpha) * P, alpha * P + p.noise(j))),
        ((q,), _c(P, p.noise(q))),
    ]
    return ConstraintSet.from_rows(3, rows, label)


def group7_outer1(p: ChannelParams, alpha: Scalar) -> ConstraintSet:
    _check_unit("alpha", alpha)
    _check_channel(p, 3)
    return _split_outer(p, alpha, 1, 2, 3, "group-7 outer 1")


def groups56_outer(group: int, p: ChannelParams, alpha: Scalar) -> ConstraintSet:
    """Single-split outer bound shared by groups 5 and 6."""
    if group not in (5, 6):
        raise BoundError(f"groups56_outer needs group 5 or 6, got {group}")
    _check_unit("alpha", alpha)
    _check_channel(p, 3)
    i, j, q = (1, 3, 2) if group == 5 else (2, 3, 1)
    return _split_outer(p, alpha, i, j, q, f"group-{group} outer")


def _layer_sums(p: ChannelParams, s: PowerSplit) -> "tuple[Scalar, Scalar, Scalar]":
    P, (N1, N2, N3) = p.P, p.N
    a = s.alphas
    b1 = _c(a[0] * P, N1)
    b2 = _c(a[1] * P, a[0] * P + N2)
    b3 = _c(a[2] * P, (a[0] + a[1]) * P + N3)
    return b1, b2, b3


def bestknown_inner(g: SideInfoGraph, p: ChannelParams, s: PowerSplit) -> ConstraintSet:
    """Prior inner bound: sum over each acyclic S at most A_min(S)."""
    if g.num_receivers != 3:
        raise BoundError("bestknown_inner is defined for three receivers")
    if len(s.alphas) != 3:
        raise BoundError(f"bestknown_inner needs 3 power fractions, got {len(s.alphas)}")
    _check_channel(p, 3)
    b1, b2, b3 = _layer_sums(p, s)
    tail = {1: b1 + b2 + b3, 2: b2 + b3, 3: b3}
    rows = [(subset, tail[min(subset)]) for subset in induced_acyclic_subgraphs(g)]
    return ConstraintSet.from_rows(3, rows, "best-known inner")


def bestknown_outer(g: SideInfoGraph, p: ChannelParams) -> ConstraintSet:
    """Prior outer bound: sum over each acyclic S at most C(P / N_min(S))."""
    _check_channel(p, g.num_receivers)
    rows = [(subset, _c(p.P, p.noise(min(subset)))) for subset in induced_acyclic_subgraphs(g)]
    return ConstraintSet.from_rows(g.num_receivers, rows, "best-known outer")


def jointdecoding_inner_group7(gm: GroupMember, g: SideInfoGraph, p: ChannelParams,
                               s: PowerSplit) -> ConstraintSet:
    """Three-layer joint-decoding inner bound for the rate-split group-7 members."""
    if gm.group != 7 or gm.member not in GROUP7_SPLIT_MEMBERS:
        raise BoundError(f"joint-decoding bound covers group-7 members 1, 3, 4, 6, not {gm.label()}")
    if len(s.alphas) != 3:
        raise BoundError(f"joint-decoding bound needs 3 power fractions, got {len(s.alphas)}")
    _check_member(gm, g)
    _check_channel(p, 3)
    P, (N1, N2, N3) = p.P, p.N
    a = s.alphas
    b1 = _c(a[0] * P, N1)
    b2 = _c(a[1] * P, a[0] * P + N2)
    b3p = _c(a[2] * P, (a[0] + a[1]) * P + N2)
    rows = [
        ((2,) + _unknown(g, 1, (1, 3)), b1 + b2 + b3p),
        ((2, 3), b2 + b3p),
        ((3,), np.minimum(_c(a[2] * P, N3), b3p)),
    ]
    return ConstraintSet.from_rows(3, rows, f"joint-decoding inner {gm.label()}")


def group5_successive_inner(p: ChannelParams, s: PowerSplit) -> ConstraintSet:
    """G15∪G21 with x1([m1,m21]) + x2([m22,m3]) and successive decoding only.

    Smaller than the group-5 capacity region whenever N1 < N2.
    """
    if len(s.alphas) != 2:
        raise BoundError(f"needs 2 power fractions, got {len(s.alphas)}")
    _check_channel(p, 3)
    P, (N1, N2, N3) = p.P, p.N
    a = s.alphas
    first = _c(a[0] * P, N1)
    second = _c(a[1] * P, a[0] * P + N2)
    rows = [
        ((1,), first),
        ((2, 3), _c(a[0] * P, N2) + second),
        ((1, 2, 3), first + second),
        ((3,), _c(a[1] * P, a[0] * P + N3)),
    ]
    return ConstraintSet.from_rows(3, rows, "group-5 successive inner")


def fourrx_capacity(p: ChannelParams, alpha: Scalar) -> ConstraintSet:
    """Capacity rows of the four-receiver leader (graphs.FOUR_RECEIVER_LEADER_ARCS)."""
    if p.num_receivers != 4:
        raise BoundError(f"four-receiver region needs 4 noise variances, got {p.num_receivers}")
    _check_unit("alpha", alpha)
    P, (N1, N2, N3, N4) = p.P, p.N
    rows = [
        ((1,), _c(alpha * P, N1)),
        ((1, 2, 3, 4), _c(P, N1)),
        ((2, 3, 4), _c(P, N2)),
        ((3, 4), _c((1 - alpha) * P, alpha * P + N3)),
        ((4,), _c((1 - alpha) * P, alpha * P + N4)),
    ]
    return ConstraintSet.from_rows(4, rows, "four-receiver capacity")


def group6_split_inner(gm: GroupMember, g: SideInfoGraph, p: ChannelParams, s: PowerSplit) -> ConstraintSet:
    """Group 6 with x1([m11,m2]) + x2([m12,m3]) and successive decoding.

    Receiver 1 peels x2 then x1; after eliminating the split of R1 the
    region matches the group-6 capacity rows at every split.
    """
    if gm.group != 6:
        raise BoundError(f"group6_split_inner needs group 6, got group {gm.group}")
    if len(s.alphas) != 2:
        raise BoundError(f"needs 2 power fractions, got {len(s.alphas)}")
    _check_member(gm, g)
    _check_channel(p, 3)
    P, (N1, N2, N3) = p.P, p.N
    a = s.alphas
    rows = [
        (_unknown(g, 1, (1, 2, 3)), _c(a[1] * P, a[0] * P + N1) + _c(a[0] * P, N1)),
        ((2,), _c(a[0] * P, N2)),
        ((3,), _c(a[1] * P, a[0] * P + N3)),
    ]
    return ConstraintSet.from_rows(3, rows, f"group-6 split inner {gm.label()}")
