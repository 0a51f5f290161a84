import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from vandelab.errors import (
    ConfigValidationError,
    DegenerateInputError,
    InvalidParameterError,
)
from vandelab.geometry import (
    EQUISPACED,
    LINE,
    PERIODIC,
    RANDOM,
    ClusterSpec,
    NodeSet,
    PartitionResult,
    assign_multiplicities,
    center_nodes,
    count_q,
    generate_config,
    scale_to_circle,
    validate_config,
    wrap_distance,
    wrap_to_interval,
)

# frozen by direct evaluation of |6 mod (-pi, pi]| with the mpmath
# scalar calculator at 250 bits
TWO_PI_MINUS_SIX = "0.283185307179586476925286766559005768394338799"


class TestWrapDistance:
    def test_identity(self):
        assert wrap_distance(0, 0) == 0

    def test_two_pi_periodicity(self):
        with mp.workprec(192):
            assert wrap_distance(mp.pi, -mp.pi) < mpf(2) ** -180

    def test_frozen_value(self):
        with mp.workprec(192):
            assert abs(wrap_distance(3, -3) - mpf(TWO_PI_MINUS_SIX)) \
                < mpf(10) ** -44

    def test_tiny_distance_stays_exact(self):
        # the reduction must not route tiny gaps through 2*pi
        with mp.workprec(192):
            d = mpf("1e-25")
            assert wrap_distance(d / 2, -d / 2) == d

    @given(x=st.floats(-50, 50), y=st.floats(-50, 50), z=st.floats(-50, 50),
           k=st.integers(-3, 3))
    @settings(max_examples=120, deadline=None)
    def test_metric_properties(self, x, y, z, k):
        with mp.workprec(128):
            dxy = wrap_distance(x, y)
            assert dxy == wrap_distance(y, x)
            assert 0 <= dxy <= mp.pi
            slack = mpf(2) ** -(mp.prec - 8)
            assert dxy <= wrap_distance(x, z) + wrap_distance(z, y) + slack
            shifted = wrap_distance(x + 2 * mp.pi * k, y)
            assert abs(dxy - shifted) <= slack * (1 + abs(mpf(x)) + abs(mpf(y)))

    def test_wrap_to_interval(self):
        with mp.workprec(128):
            assert wrap_to_interval(mp.pi) == mp.pi
            assert wrap_to_interval(-mp.pi) == mp.pi
            # near the boundary either representative may come back;
            # what matters is the angle and the half-open range
            for x in (3 * mp.pi, -3 * mp.pi, 7 * mp.pi):
                r = wrap_to_interval(x)
                assert -mp.pi < r <= mp.pi
                assert wrap_distance(r, mp.pi) < mpf(2) ** -100
            x = mpf("0.7")
            assert abs(wrap_to_interval(x + 4 * mp.pi) - x) < mpf(2) ** -100


class TestNodeSet:
    def test_duplicates_rejected(self):
        with pytest.raises(DegenerateInputError):
            NodeSet((mpf(0), mpf(0)))

    def test_periodic_range_enforced(self):
        with pytest.raises(InvalidParameterError):
            NodeSet((mpf(4),), PERIODIC)
        NodeSet((mpf(4),), LINE)  # fine on the line

    def test_json_round_trip(self):
        ns = NodeSet((mpf("0.25"), mpf("-1.5")), PERIODIC)
        back = NodeSet.from_json_dict(ns.to_json_dict(192), 192)
        assert back.domain == ns.domain
        for a, b in zip(back.nodes, ns.nodes):
            assert abs(a - b) <= abs(b) * mpf(10) ** -50


class TestClusterSpec:
    def test_invariants(self):
        with pytest.raises(InvalidParameterError):
            ClusterSpec(delta="0.1", theta="1", s=2, ell=3, tau="5")
        with pytest.raises(InvalidParameterError):
            ClusterSpec(delta="0.1", theta="1", s=3, ell=3, tau="1")
        with pytest.raises(InvalidParameterError):
            ClusterSpec(delta="0", theta="1", s=2, ell=2, tau="1")
        with pytest.raises(InvalidParameterError):
            ClusterSpec(delta="0.1", theta="0", s=2, ell=2, tau="1")

    def test_json_round_trip(self):
        spec = ClusterSpec(delta="1e-6", theta="1.5", s=5, ell=3, tau="2.5")
        back = ClusterSpec.from_json_dict(spec.to_json_dict(192), 192)
        assert (back.s, back.ell) == (5, 3)
        assert abs(back.delta - spec.delta) < mpf(10) ** -40


class TestValidateConfig:
    def test_equispaced_triple_single_cluster(self):
        with mp.workprec(192):
            nodes = NodeSet((mpf(0), mpf("0.01"), mpf("0.02")))
            spec = ClusterSpec(delta="0.01", theta=mp.pi, s=3, ell=3, tau=2)
            part = validate_config(nodes, spec)
        assert part.multiplicities == (3,)
        assert part.q == (1, 1, 1)

    def test_two_cluster_example(self):
        with mp.workprec(192):
            nodes = NodeSet((mpf(0), mpf("0.001"), mpf("2.0"),
                             mpf("2.001"), mpf("2.002")))
            spec = ClusterSpec(delta="0.001", theta="1.9", s=5, ell=3, tau=2)
            part = validate_config(nodes, spec)
        assert part.clusters == ((0, 1), (2, 3, 4))
        assert part.multiplicities == (2, 3)
        assert part.q == (2, 2, 1)
        # exhaustive pairwise oracle: conditions hold with the wrap metric
        with mp.workprec(192):
            for ci, cluster in enumerate(part.clusters):
                for a in cluster:
                    for b in cluster:
                        if a < b:
                            d = wrap_distance(nodes.nodes[a], nodes.nodes[b])
                            assert spec.delta * mpf("0.999") <= d
                            assert d <= spec.tau * spec.delta * mpf("1.001")
                    for other in part.clusters[ci + 1:]:
                        for b in other:
                            assert wrap_distance(nodes.nodes[a],
                                                 nodes.nodes[b]) >= spec.theta

    def test_count_mismatch(self):
        with mp.workprec(192):
            nodes = NodeSet((mpf(0), mpf("0.01")))
            spec = ClusterSpec(delta="0.01", theta="1", s=3, ell=2, tau=1)
            with pytest.raises(ConfigValidationError):
                validate_config(nodes, spec)

    def test_separation_violation_names_pair(self):
        with mp.workprec(192):
            # two "clusters" closer than theta
            nodes = NodeSet((mpf(0), mpf("0.5")))
            spec = ClusterSpec(delta="0.01", theta="1.0", s=2, ell=1, tau=0)
            with pytest.raises(ConfigValidationError) as err:
                validate_config(nodes, spec)
            assert err.value.pair == (0, 1)
            assert "inter-cluster" in err.value.condition

    def test_diameter_violation(self):
        with mp.workprec(192):
            # consecutive gaps stay below tau*delta = 0.02 so linkage
            # chains all three, but the end-to-end spread exceeds it
            nodes = NodeSet((mpf(0), mpf("0.018"), mpf("0.036")))
            spec = ClusterSpec(delta="0.01", theta="1", s=3, ell=3, tau="2")
            with pytest.raises(ConfigValidationError) as err:
                validate_config(nodes, spec)
            assert err.value.condition == "within-cluster diameter"

    def test_multiplicity_overflow_flagged(self):
        with mp.workprec(192):
            nodes = NodeSet((mpf(0), mpf("0.01"), mpf("0.02")))
            spec = ClusterSpec(delta="0.01", theta="1", s=3, ell=2, tau=2)
            with pytest.raises(ConfigValidationError) as err:
                validate_config(nodes, spec)
            assert err.value.condition == "multiplicity"

    def test_below_delta_rejected(self):
        with mp.workprec(192):
            nodes = NodeSet((mpf(0), mpf("0.005")))
            spec = ClusterSpec(delta="0.01", theta="1", s=2, ell=2, tau=2)
            with pytest.raises(ConfigValidationError) as err:
                validate_config(nodes, spec)
            assert err.value.condition == "within-cluster minimum"

    def test_periodic_tau_cap(self):
        with mp.workprec(192):
            nodes = NodeSet((mpf(0), mpf(1)))
            spec = ClusterSpec(delta="1", theta="1", s=2, ell=2, tau=100)
            with pytest.raises(InvalidParameterError):
                validate_config(nodes, spec)


class TestGenerateConfig:
    def test_pair_centered_at_origin(self):
        with mp.workprec(192):
            spec = ClusterSpec(delta="1e-6", theta="1", s=2, ell=2, tau=1)
            nodes = generate_config(spec, EQUISPACED, [mpf(0)], seed=7)
            d = mpf("1e-6")
            assert nodes.nodes[0] == -d / 2
            assert nodes.nodes[1] == d / 2

    def test_equispaced_gaps_exact(self):
        with mp.workprec(192):
            spec = ClusterSpec(delta="1e-5", theta="1", s=3, ell=3, tau=2)
            # center 0: offsets are the nodes, gaps exactly delta
            nodes = generate_config(spec, EQUISPACED, [mpf(0)], seed=7)
            xs = sorted(nodes.nodes)
            assert xs[1] - xs[0] == spec.delta
            assert xs[2] - xs[1] == spec.delta
            assert xs[2] - xs[0] == 2 * spec.delta
            # shifted center: gaps exact up to one rounding of the shift
            nodes = generate_config(spec, EQUISPACED, [mpf("0.5")], seed=7)
            xs = sorted(nodes.nodes)
            ulp = mpf(2) ** -(192 - 4)
            for gap in (xs[1] - xs[0], xs[2] - xs[1]):
                assert abs(gap - spec.delta) <= ulp

    def test_determinism(self):
        with mp.workprec(192):
            spec = ClusterSpec(delta="1e-4", theta="1", s=4, ell=2, tau="1.5")
            centers = [mpf(-2), mpf(1)]
            a = generate_config(spec, RANDOM, centers, seed=123)
            b = generate_config(spec, RANDOM, centers, seed=123)
            assert a.nodes == b.nodes
            c = generate_config(spec, RANDOM, centers, seed=124)
            assert a.nodes != c.nodes

    def test_infeasible_centers(self):
        with mp.workprec(192):
            spec = ClusterSpec(delta="1e-4", theta="1", s=4, ell=2, tau=1)
            with pytest.raises(ConfigValidationError):
                generate_config(spec, EQUISPACED, [mpf(0), mpf("0.5")], seed=1)

    def test_round_trip_recovers_multiplicities(self):
        rng = random.Random(55)
        with mp.workprec(192):
            for _ in range(10):
                ell = rng.randint(1, 4)
                n_clusters = rng.randint(1, 3)
                s = ell + sum(rng.randint(1, ell) for _ in range(n_clusters - 1))
                tau = str(max(ell - 1, 0) + 1)
                spec = ClusterSpec(delta="1e-5", theta="0.8", s=s, ell=ell,
                                   tau=tau)
                centers = [mpf(-3) + j * mpf(2) for j in range(n_clusters)]
                layout = rng.choice([EQUISPACED, RANDOM])
                nodes = generate_config(spec, layout, centers,
                                        seed=rng.randrange(10 ** 6))
                part = validate_config(nodes, spec)
                assert part.cluster_count == n_clusters
                assert max(part.multiplicities) == ell
                assert sum(part.multiplicities) == s

    def test_assign_multiplicities(self):
        assert assign_multiplicities(5, 3, 2) == [3, 2]
        assert assign_multiplicities(3, 3, 1) == [3]
        assert assign_multiplicities(7, 3, 3) == [3, 2, 2]
        with pytest.raises(InvalidParameterError):
            assign_multiplicities(10, 2, 2)  # 8 > ell per extra cluster
        with pytest.raises(InvalidParameterError):
            assign_multiplicities(3, 2, 3)  # not enough nodes


class TestCountQ:
    def _partition(self, mults, ell):
        q = tuple(sum(1 for r in mults if r >= m) for m in range(1, ell + 1))
        clusters, i = [], 0
        for r in mults:
            clusters.append(tuple(range(i, i + r)))
            i += r
        return PartitionResult(tuple(clusters), tuple(mults), q)

    def test_examples(self):
        part = self._partition([3, 1, 2], 3)
        assert count_q(part, 1) == 3
        assert count_q(part, 2) == 2
        assert count_q(part, 3) == 1

    def test_out_of_range(self):
        part = self._partition([3, 1, 2], 3)
        with pytest.raises(InvalidParameterError):
            count_q(part, 0)
        with pytest.raises(InvalidParameterError):
            count_q(part, 4)

    def test_q_nonincreasing_and_sums(self):
        part = self._partition([3, 2, 2, 1], 3)
        assert list(part.q) == sorted(part.q, reverse=True)
        assert part.q[0] == len(part.multiplicities)
        assert sum(part.multiplicities) == 8


class TestCenterAndScale:
    def test_center_nodes(self):
        with mp.workprec(192):
            ns = NodeSet((mpf("0.1"), mpf("0.2"), mpf("0.4")))
            centered = center_nodes(ns)
            assert min(centered.nodes) + max(centered.nodes) == 0

    def test_scaling_property(self):
        # a line configuration maps to a circle configuration with both
        # separation scales divided by N
        rng = random.Random(99)
        with mp.workprec(192):
            for _ in range(5):
                ell = rng.randint(2, 3)
                spec = ClusterSpec(delta="0.001", theta="2.0", s=ell + 1,
                                   ell=ell, tau=str(ell))
                centers = [mpf(0), mpf(5)]
                nodes = generate_config(spec, RANDOM, centers,
                                        seed=rng.randrange(10 ** 6),
                                        domain=LINE)
                N = 40
                scaled = scale_to_circle(nodes, N)
                scaled_spec = ClusterSpec(
                    delta=spec.delta / N, theta=spec.theta / N,
                    s=spec.s, ell=spec.ell, tau=spec.tau)
                part = validate_config(scaled, scaled_spec)
                assert sum(part.multiplicities) == spec.s

    def test_scale_domain_check(self):
        ns = NodeSet((mpf(0), mpf(1)), PERIODIC)
        with pytest.raises(InvalidParameterError):
            scale_to_circle(ns, 10)
