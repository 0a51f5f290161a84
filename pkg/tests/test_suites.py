import random

from mpmath import mp, mpf

from vandelab.geometry import validate_config
from vandelab.hp import required_bits
from vandelab.matrices import VandermondeSpec
from vandelab.spectra import singular_values
from vandelab.suites import (
    band_counts,
    fit_level_constant,
    random_clustered_config,
    run_cor_turan_suite,
    run_nikolskii_suite,
    run_riemann_suite,
    run_salem_suite,
    run_turan_suite,
)


class TestInstanceGenerator:
    def test_configs_validate_and_record_multiplicities(self):
        rng = random.Random(4)
        for _ in range(10):
            inst = random_clustered_config(rng)
            part = validate_config(inst.nodes, inst.cluster)
            assert sorted(part.multiplicities) == sorted(inst.multiplicities)
            assert max(part.multiplicities) == inst.cluster.ell
            assert inst.N >= 10 * inst.cluster.s

    def test_distinct_multiplicities_knob(self):
        rng = random.Random(5)
        for _ in range(5):
            inst = random_clustered_config(rng, clusters_range=(2, 3),
                                           require_distinct_mults=True)
            assert len(set(inst.multiplicities)) >= 2


class TestInequalitySuites:
    def test_turan_small(self):
        res = run_turan_suite(instances=20, seed=11)
        assert res.all_hold
        assert len(res.records) == 20
        assert mpf(res.summary["min_rhs_over_lhs"]) >= 1

    def test_nikolskii_small(self):
        res = run_nikolskii_suite(instances=20, seed=11)
        assert res.all_hold

    def test_cor_turan_small(self):
        res = run_cor_turan_suite(instances=20, seed=11)
        assert res.all_hold

    def test_salem_small(self):
        res = run_salem_suite(instances=20, seed=11,
                              delta_list=("1e-2", "1e-4"))
        assert res.all_hold
        assert mpf(res.summary["empirical_constant"]) > 0
        assert mpf(res.summary["relative_spread"]) < mpf("0.2")

    def test_riemann_small_with_shape(self):
        res = run_riemann_suite(instances=15, seed=11, ell_max=3,
                                with_sup_shape=True)
        assert res.all_hold
        assert mpf(res.summary["max_gap_over_shape"]) < 8

    def test_determinism(self):
        a = run_turan_suite(instances=10, seed=77)
        b = run_turan_suite(instances=10, seed=77)
        assert [r.to_json_dict() for r in a.records] == \
            [r.to_json_dict() for r in b.records]
        c = run_turan_suite(instances=10, seed=78)
        assert [r.to_json_dict() for r in a.records] != \
            [r.to_json_dict() for r in c.records]


class TestLevelCounting:
    def test_band_counts_synthetic(self):
        # levels engineered around thresholds with c1 = 1: two values at
        # the first scaling level, one at each deeper level
        with mp.workprec(192):
            N, delta = 100, mpf("1e-6")
            c2 = 32 * mp.pi * mp.e
            shape = [mp.sqrt(N) * (N * delta / c2) ** m for m in range(3)]
            sigma = (2 * shape[0], mpf("1.5") * shape[0],
                     3 * shape[1], 5 * shape[2])
            q = (2, 1, 1)
            counts, thresholds = band_counts(sigma, q, N, delta, 1, 192)
            assert counts == [2, 1, 1]
            assert thresholds[0] > thresholds[1] > thresholds[2]

    def test_fit_on_real_instances(self):
        rng = random.Random(21)
        data = []
        for _ in range(4):
            inst = random_clustered_config(
                rng, ell_range=(2, 3), clusters_range=(2, 3),
                delta_exp_range=(6.5, 8.5), require_distinct_mults=True)
            part = validate_config(inst.nodes, inst.cluster)
            bits = required_bits(inst.cluster.ell, inst.N, inst.cluster.delta)
            sv = singular_values(VandermondeSpec(inst.N, inst.nodes),
                                 inst.cluster, bits)
            data.append((sv.values, part.q, inst.N, inst.cluster.delta))
        fit = fit_level_constant(data)
        assert fit.nonempty
        for sigma, q, N, delta in data:
            counts, _ = band_counts(sigma, q, N, delta, fit.c1)
            assert counts == list(q)
