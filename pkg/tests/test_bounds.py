"""Tests for bounds.py: capacity rows, group-4/7 bounds, thresholds and the prior bounds."""

import math

import numpy as np
import pytest

from bounds import (
    CAPACITY_SPLIT_ARITY,
    BoundError,
    ChannelParams,
    ConstraintSet,
    PowerSplit,
    awgn_capacity,
    bestknown_inner,
    bestknown_outer,
    capacity_constraints,
    dpc_coefficients,
    enhanced_channel,
    fourrx_capacity,
    group4_inner,
    group4_inner_basic,
    group4_outer1,
    group4_outer2,
    group4_thresholds,
    group5_successive_inner,
    group6_split_inner,
    group7_inner,
    group7_outer1,
    groups56_outer,
    jointdecoding_inner_group7,
)
from graphs import (
    FOUR_RECEIVER_LEADER_ARCS,
    GroupMember,
    capacity_known,
    decompose,
    enumerate_all,
    make_graph,
    recompose,
)

P10 = ChannelParams(10.0, (1.0, 2.0, 4.0))


def _c(t):
    return 0.5 * math.log2(1 + t)


def _member(group, member):
    gm = GroupMember(group, member)
    return gm, recompose(gm)


class TestChannel:
    def test_capacity_function(self):
        assert awgn_capacity(0.0) == 0.0
        assert awgn_capacity(3.0) == pytest.approx(1.0)
        assert np.allclose(awgn_capacity(np.array([0.0, 3.0])), [0.0, 1.0])

    def test_negative_snr_rejected(self):
        with pytest.raises(BoundError):
            awgn_capacity(-1.0)

    def test_noise_must_be_ascending(self):
        with pytest.raises(BoundError, match="ascending"):
            ChannelParams(10.0, (2.0, 1.0, 4.0))

    def test_noise_must_be_positive(self):
        with pytest.raises(BoundError):
            ChannelParams(10.0, (0.0, 1.0, 4.0))

    def test_accessors(self):
        assert P10.noise(3) == 4.0
        assert P10.snr(2) == 5.0
        assert P10.to_json() == {"P": 10.0, "N": [1.0, 2.0, 4.0]}

    def test_split_must_sum_to_one(self):
        with pytest.raises(BoundError):
            PowerSplit((0.5, 0.4))
        with pytest.raises(BoundError):
            PowerSplit((1.2, -0.2))


class TestConstraintSet:
    def test_violation_and_slack(self):
        cs = ConstraintSet.from_rows(3, [((1, 2), 1.0), ((3,), 0.5)])
        assert cs.satisfied([0.5, 0.5, 0.5])
        assert not cs.satisfied([0.6, 0.5, 0.0])
        assert cs.violation([0.6, 0.5, 0.0]) == pytest.approx(0.1)
        assert np.allclose(cs.slack([0.2, 0.3, 0.1]), [0.5, 0.4])

    def test_constraints_listing(self):
        cs = ConstraintSet.from_rows(3, [((1, 2), 1.0)])
        assert cs.constraints == [((1, 1, 0), 1.0)]
        assert cs.to_json() == [{"coef": [1, 1, 0], "bound": 1.0}]

    def test_intersect_stacks_rows(self):
        a = ConstraintSet.from_rows(3, [((1,), 1.0)], "a")
        b = ConstraintSet.from_rows(3, [((2,), 2.0)], "b")
        both = a.intersect(b)
        assert len(both) == 2
        assert both.label == "a ∩ b"

    def test_wrong_dimension(self):
        cs = ConstraintSet.from_rows(3, [((1,), 1.0)])
        with pytest.raises(BoundError):
            cs.violation([0.0, 0.0])

    def test_reach_along_a_ray(self):
        cs = ConstraintSet(np.array([[1, 1, 0], [0, 0, 1]]), np.array([1.0, 0.5]))
        assert float(cs.reach([1.0, 1.0, 0.0])) == pytest.approx(0.5)
        assert float(cs.reach([0.0, 0.0, 1.0])) == pytest.approx(0.5)
        assert float(cs.reach([1.0, 0.0, 0.0])) == 1.0

    def test_reach_per_split(self):
        cs = ConstraintSet(np.array([[1, 0], [0, 1]]), np.array([[1.0, 2.0, -1.0], [1.0, 1.0, 1.0]]))
        assert list(cs.reach([1.0, 1.0])) == [1.0, 1.0, -np.inf]
        assert float(ConstraintSet(np.zeros((0, 2)), np.zeros(0)).reach([1.0, 1.0])) == np.inf
        with pytest.raises(BoundError):
            cs.reach([1.0])


class TestCapacityRows:
    def test_group1_all_power_to_receiver1(self):
        gm, g = _member(1, 1)
        cs = capacity_constraints(gm, g, P10, PowerSplit((1.0, 0.0, 0.0)))
        bounds = [b for _, b in cs.constraints]
        assert bounds == pytest.approx([_c(10.0), 0.0, 0.0])

    def test_group8_member1(self):
        gm, g = _member(8, 1)
        cs = capacity_constraints(gm, g, P10, PowerSplit(()))
        assert cs.constraints == [
            ((1, 1, 1), pytest.approx(_c(10.0))),
            ((0, 1, 1), pytest.approx(_c(5.0))),
            ((0, 0, 1), pytest.approx(_c(2.5))),
        ]

    def test_group2_drops_known_message(self):
        gm, g = _member(2, 7)  # receiver 2 knows M3
        cs = capacity_constraints(gm, g, P10, PowerSplit((0.5, 0.5)))
        assert cs.constraints[1][0] == (0, 1, 0)

    def test_wrong_arity(self):
        gm, g = _member(1, 1)
        with pytest.raises(BoundError, match="3 power fractions"):
            capacity_constraints(gm, g, P10, PowerSplit((0.5, 0.5)))

    def test_unsolved_group_rejected(self):
        gm, g = _member(4, 1)
        with pytest.raises(BoundError):
            capacity_constraints(gm, g, P10, PowerSplit((0.5, 0.5)))

    def test_graph_must_match_member(self):
        gm, _ = _member(1, 1)
        with pytest.raises(BoundError):
            capacity_constraints(gm, make_graph(3, [(3, 1)]), P10, PowerSplit((1.0, 0.0, 0.0)))

    def test_vectorized_split(self):
        gm, g = _member(3, 1)
        a = np.linspace(0.0, 1.0, 5)
        cs = capacity_constraints(gm, g, P10, PowerSplit((a, 1.0 - a)))
        assert cs.bounds.shape == (3, 5)
        single = capacity_constraints(gm, g, P10, PowerSplit((0.25, 0.75)))
        assert np.allclose(cs.bounds[:, 1], single.bounds)

    def test_group6_split_scheme_matches_capacity(self):
        gm, g = _member(6, 1)
        s = PowerSplit((0.3, 0.7))
        split = group6_split_inner(gm, g, P10, s)
        cap = capacity_constraints(gm, g, P10, s)
        assert np.array_equal(split.coefs, cap.coefs)
        assert np.allclose(split.bounds, cap.bounds)


class TestGroup4:
    def test_family1_rows(self):
        gm, g = _member(4, 1)
        cs = group4_inner(gm, g, P10, 1.0, 1.0)
        coefs = [c for c, _ in cs.constraints]
        assert coefs == [(1, 0, 1), (0, 1, 0), (0, 0, 1)]
        # alpha = beta = 1: everything on the dirty-paper layer.
        assert cs.constraints[0][1] == pytest.approx(_c(10.0))
        assert cs.constraints[2][1] == pytest.approx(_c(2.5))

    def test_family2_adds_sum_row(self):
        gm, g = _member(4, 2)
        cs = group4_inner(gm, g, P10, 0.5, 0.5)
        assert len(cs) == 4
        assert cs.constraints[1] == ((1, 1, 1), pytest.approx(_c(10.0)))

    def test_basic_region_inside_family2(self):
        gm, g = _member(4, 5)
        basic = group4_inner_basic(gm, g, P10, 0.6, 0.4)
        assert len(basic) == 3

    def test_outer1(self):
        cs = group4_outer1(P10, 0.0)
        assert [b for _, b in cs.constraints] == pytest.approx([_c(10.0), _c(5.0), 0.0])

    def test_dpc_coefficients(self):
        lam1, lam2 = dpc_coefficients(P10, 1.0, 1.0)
        assert lam2 == 0.0
        assert lam1 == pytest.approx(10.0 / 14.0)

    def test_enhanced_channel_groups(self):
        gm, g = _member(4, 2)
        _, ep, egm = enhanced_channel(gm, g, P10)
        assert egm.group == 5
        assert ep.N == (1.0, 2.0, 2.0)
        gm, g = _member(4, 1)
        assert enhanced_channel(gm, g, P10)[2].group == 3

    def test_thresholds_at_zero(self):
        t = group4_thresholds(P10, 0.0)
        assert (t.r_thr3, t.r_thr3_prime) == (0.0, 0.0)

    def test_thresholds_saturate(self):
        t = group4_thresholds(P10, 1.0)
        assert t.r_thr3 == pytest.approx(_c(10.0) - 1.0)
        assert t.r_thr3_prime == t.r_thr3

    def test_thresholds_solve_root_equations(self):
        r1 = 0.3
        t = group4_thresholds(P10, r1)
        assert _c(t.gamma * 10.0) - _c(t.gamma * 10.0 / 4.0) == pytest.approx(r1, abs=1e-8)
        assert t.r_thr3 == pytest.approx(_c(t.gamma * 10.0 / 4.0))
        rest = (1 - t.eta) * 10.0
        assert t.r_thr3_prime == pytest.approx(_c(t.eta * 10.0 / (rest + 4.0)))

    def test_thresholds_across_r1(self):
        cap1 = _c(10.0)
        for r1 in [float(x) for x in np.arange(0.0, cap1, 0.1)] + [cap1]:
            t = group4_thresholds(P10, r1)
            if t.gamma is None:
                # Zero R1, or R1 past C(P/N1) - C(P/N3) where both thresholds saturate.
                assert r1 == 0.0 or r1 >= cap1 - _c(2.5)
                assert t.r_thr3 == t.r_thr3_prime == pytest.approx(max(cap1 - r1, 0.0) if r1 else 0.0)
                continue
            g, e = t.gamma, t.eta
            assert _c(10.0 * g) - _c(2.5 * g) == pytest.approx(r1, abs=1e-8)
            rest = 10.0 * (1 - e)
            assert _c(10.0 * e / (rest + 1.0)) - _c(10.0 * e / (rest + 4.0)) == pytest.approx(r1, abs=1e-8)
            assert t.r_thr3 == pytest.approx(_c(2.5 * g), abs=1e-12)
            assert t.r_thr3_prime == pytest.approx(_c(10.0 * e / (rest + 4.0)), abs=1e-12)
            assert t.r_thr3 <= t.r_thr3_prime

    def test_thresholds_out_of_range(self):
        with pytest.raises(BoundError):
            group4_thresholds(P10, 5.0)


class TestGroup7AndPriorBounds:
    def test_group7_split_member_rows(self):
        gm, g = _member(7, 1)
        cs = group7_inner(gm, g, P10, 0.5)
        assert [c for c, _ in cs.constraints] == [(1, 1, 1), (0, 1, 0), (0, 1, 1), (0, 0, 1)]

    def test_group7_solved_member_rows(self):
        gm, g = _member(7, 5)
        cs = group7_inner(gm, g, P10, 0.5)
        assert cs.constraints[0] == ((1, 0, 0), pytest.approx(_c(5.0)))

    def test_joint_decoding_only_for_split_members(self):
        gm, g = _member(7, 2)
        with pytest.raises(BoundError):
            jointdecoding_inner_group7(gm, g, P10, PowerSplit((0.2, 0.3, 0.5)))
        gm, g = _member(7, 1)
        assert len(jointdecoding_inner_group7(gm, g, P10, PowerSplit((0.2, 0.3, 0.5)))) == 3

    def test_bestknown_outer_empty_graph(self):
        cs = bestknown_outer(make_graph(3, []), P10)
        assert len(cs) == 7
        assert cs.constraints[-1] == ((1, 1, 1), pytest.approx(_c(10.0)))

    def test_bestknown_inner_layer_sums(self):
        cs = bestknown_inner(make_graph(3, []), P10, PowerSplit((0.0, 0.0, 1.0)))
        # Only the top layer carries power; every subset shares its rate.
        assert all(b == pytest.approx(_c(2.5)) for _, b in cs.constraints)

    def test_group5_successive_inside_capacity(self):
        gm, g = _member(5, 1)
        s = PowerSplit((0.4, 0.6))
        succ = group5_successive_inner(P10, s)
        cap = capacity_constraints(gm, g, P10, s)
        assert succ.constraints[1][1] == pytest.approx(cap.constraints[2][1])
        assert succ.constraints[2][1] <= cap.constraints[0][1] + 1e-12

    def test_four_receiver_capacity(self):
        p4 = ChannelParams(10.0, (1.0, 2.0, 3.0, 4.0))
        cs = fourrx_capacity(p4, 1.0)
        assert cs.num_rates == 4
        assert cs.constraints[3][1] == 0.0
        with pytest.raises(BoundError):
            fourrx_capacity(P10, 0.5)
        assert make_graph(4, FOUR_RECEIVER_LEADER_ARCS).num_receivers == 4


class TestWorkedValues:
    """Small plug-in cases with round capacities (C(1) = 0.5, C(3) = 1)."""

    def _bounds(self, cs):
        return [(c, round(b, 12)) for c, b in cs.constraints]

    def test_full_graph_capacity(self):
        gm, g = _member(8, 8)
        cs = capacity_constraints(gm, g, ChannelParams(3.0, (1.0, 1.0, 3.0)), PowerSplit(()))
        assert self._bounds(cs) == [((1, 0, 0), 1.0), ((0, 1, 0), 1.0), ((0, 0, 1), 0.5)]

    def test_index_coded_group5_member(self):
        gm, g = _member(5, 2)
        cs = capacity_constraints(gm, g, ChannelParams(1.0, (1.0, 1.0, 1.0)), PowerSplit((1.0, 0.0)))
        assert self._bounds(cs) == [
            ((1, 1, 0), 0.5), ((1, 0, 1), 0.5), ((1, 0, 0), 0.5), ((0, 1, 0), 0.5), ((0, 0, 1), 0.0),
        ]

    def test_group4_outer2_maps_enhanced_rates_back(self):
        gm, g = _member(4, 1)
        cs = group4_outer2(gm, g, P10, PowerSplit((1.0, 0.0)))
        assert cs.constraints == [
            ((1, 0, 1), pytest.approx(_c(10.0))),
            ((0, 0, 1), pytest.approx(_c(5.0))),
            ((0, 1, 0), 0.0),
        ]

    def test_group4_outer2_at_sampled_splits(self):
        gm, g = _member(4, 1)
        for a in np.linspace(0.05, 0.95, 10):
            rows = dict(group4_outer2(gm, g, P10, PowerSplit((a, 1 - a))).constraints)
            assert rows[(1, 0, 1)] == pytest.approx(_c(10.0 * a), abs=1e-12)
            assert rows[(0, 0, 1)] == pytest.approx(_c(10.0 * a / 2.0), abs=1e-12)
            assert rows[(0, 1, 0)] == pytest.approx(_c(10.0 * (1 - a) / (10.0 * a + 2.0)), abs=1e-12)

    def test_group7_inner_all_power_inside(self):
        gm, g = _member(7, 1)
        cs = group7_inner(gm, g, ChannelParams(3.0, (1.0, 2.0, 4.0)), 1.0)
        assert cs.constraints == [
            ((1, 1, 1), pytest.approx(1.0)),
            ((0, 1, 0), 0.0),
            ((0, 1, 1), pytest.approx(_c(0.75))),
            ((0, 0, 1), pytest.approx(_c(0.75))),
        ]

    def test_group7_outer1(self):
        cs = group7_outer1(ChannelParams(2.0, (1.0, 1.0, 1.0)), 0.5)
        assert [b for _, b in cs.constraints] == pytest.approx([0.5, _c(0.5), _c(2.0)])

    def test_group5_outer(self):
        cs = groups56_outer(5, ChannelParams(3.0, (1.0, 2.0, 4.0)), 1.0)
        assert cs.constraints == [((1, 0, 0), pytest.approx(1.0)), ((0, 0, 1), 0.0),
                                  ((0, 1, 0), pytest.approx(_c(1.5)))]

    def test_four_receivers_alpha_zero(self):
        cs = fourrx_capacity(ChannelParams(3.0, (1.0, 2.0, 4.0, 8.0)), 0.0)
        assert [b for _, b in cs.constraints] == pytest.approx([0.0, 1.0, _c(1.5), _c(0.75), _c(0.375)])

    def test_joint_decoding_top_layer(self):
        gm, g = _member(7, 1)
        cs = jointdecoding_inner_group7(gm, g, ChannelParams(1.0, (1.0, 2.0, 4.0)), PowerSplit((0.0, 0.0, 1.0)))
        assert cs.constraints[2][1] == pytest.approx(_c(0.25))

    def test_prior_bounds(self):
        empty = make_graph(3, [])
        outer = bestknown_outer(empty, ChannelParams(3.0, (1.0, 1.0, 3.0)))
        assert ((0, 1, 1), pytest.approx(1.0)) in outer.constraints
        inner = bestknown_inner(empty, ChannelParams(3.0, (1.0, 1.0, 1.0)), PowerSplit((1.0, 0.0, 0.0)))
        assert ((1, 1, 1), pytest.approx(1.0)) in inner.constraints
        assert ((0, 1, 1), 0.0) in inner.constraints


class TestMonotonicity:
    SPLITS = {3: (0.2, 0.3, 0.5), 2: (0.4, 0.6), 0: ()}

    @staticmethod
    def _rows(gm, g, p, split):
        if gm.group == 7:
            return group7_inner(gm, g, p, 0.4).bounds
        return capacity_constraints(gm, g, p, PowerSplit(split)).bounds

    def test_capacity_rows_follow_power_and_noise(self):
        louder = ChannelParams(20.0, P10.N)
        noisier = ChannelParams(10.0, (1.5, 2.5, 5.0))
        checked = 0
        for g in enumerate_all(3):
            gm = decompose(g)
            if not capacity_known(gm):
                continue
            split = self.SPLITS.get(CAPACITY_SPLIT_ARITY.get(gm.group), ())
            base = self._rows(gm, g, P10, split)
            assert np.all(self._rows(gm, g, louder, split) >= base - 1e-15)
            assert np.all(self._rows(gm, g, noisier, split) <= base + 1e-15)
            checked += 1
        assert checked == 52
