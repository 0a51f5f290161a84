"""Seeded randomized verification suites.

Each suite draws reproducible random instances from a stated seed,
evaluates one inequality or spectral property on every instance, and
returns the verdicts together with the empirical constants it measured
(minimum Salem ratio, fitted c1 window, and so on).  The seed is part of
every record so a report can be replayed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from mpmath import mp, mpc, mpf

from .errors import InvalidParameterError
from .expsums import (
    ExpSum,
    check_cor_turan,
    check_nikolskii,
    check_salem_ratio,
    check_turan,
    riemann_gap,
)
from .geometry import (
    PERIODIC,
    RANDOM,
    ClusterSpec,
    NodeSet,
    generate_config,
)
from .hp import as_mpf, decimal_str

DEFAULT_SUITE_SEED = 20240601
DEFAULT_SUITE_BITS = 192


@dataclass(frozen=True)
class SuiteRecord:
    check: str
    index: int
    params: dict
    lhs: str
    rhs: str
    holds: bool
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "index": self.index,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "seed": self.seed,
        }


@dataclass
class SuiteResult:
    name: str
    seed: int
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.records)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "all_hold": self.all_hold,
            "summary": self.summary,
            "records": [r.to_json_dict() for r in self.records],
        }


def _rng_floats(rng, lo, hi):
    return lo + (hi - lo) * mpf(rng.random())


def random_expsum(rng, ell: int, freq_range=5.0, min_sep=1e-3) -> ExpSum:
    """ell terms, coefficients in the unit square, frequencies separated
    by at least min_sep inside [-freq_range, freq_range]."""
    freqs = []
    while len(freqs) < ell:
        x = mpf(rng.uniform(-freq_range, freq_range))
        if all(abs(x - y) >= min_sep for y in freqs):
            freqs.append(x)
    coeffs = [mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(ell)]
    return ExpSum(tuple(coeffs), tuple(freqs))


def random_clustered_nodes(rng, ell: int, tau, delta):
    """One cluster of ell nodes centered at 0 with gaps in
    [delta, tau*delta/(ell-1)]."""
    if ell == 1:
        return (mpf(0),)
    hi = mpf(tau) * mpf(delta) / (ell - 1)
    xs = [mpf(0)]
    for _ in range(ell - 1):
        xs.append(xs[-1] + _rng_floats(rng, mpf(delta), hi))
    mid = (xs[0] + xs[-1]) / 2
    return tuple(x - mid for x in xs)


@dataclass(frozen=True)
class ClusteredInstance:
    nodes: NodeSet
    cluster: ClusterSpec
    N: int
    multiplicities: tuple


def default_centers(n_clusters: int):
    """Evenly spread centers on the circle, center 0 for a single cluster."""
    if n_clusters == 1:
        return (mpf(0),)
    return tuple(-mp.pi + (2 * j + 1) * mp.pi / n_clusters
                 for j in range(n_clusters))


def random_clustered_config(rng, ell_range=(2, 4), clusters_range=(1, 3),
                            delta_exp_range=(4.0, 8.0), n_range=(60, 300),
                            theta=1, require_distinct_mults=False,
                            layout=RANDOM, n_per_s: int = 10) -> ClusteredInstance:
    """A validated multi-cluster configuration on the circle.

    N is drawn above n_per_s * s (default keeps N*theta >= 10*s, the
    advisory window); centers sit on the default even spread, so theta
    must stay below 2*pi/M minus the cluster extent.
    """
    while True:
        ell = rng.randint(*ell_range)
        n_clusters = rng.randint(*clusters_range)
        mults = [ell] + [rng.randint(1, ell) for _ in range(n_clusters - 1)]
        if require_distinct_mults and len(set(mults)) < 2:
            continue
        break
    s = sum(mults)
    # drawn instances are built at a fixed precision so the same seed
    # yields the same configuration whatever the caller's context is
    with mp.workprec(DEFAULT_SUITE_BITS):
        if ell > 1:
            tau = mpf(ell - 1) + _rng_floats(rng, mpf(0), mpf(ell))
        else:
            tau = mpf(1)
        delta = mpf(10) ** (-_rng_floats(rng, mpf(delta_exp_range[0]),
                                         mpf(delta_exp_range[1])))
        lo = max(n_range[0], n_per_s * s)
        if lo > n_range[1]:
            raise InvalidParameterError(
                f"n_range {n_range} cannot accommodate s={s}")
        N = rng.randint(lo, n_range[1])
        spec = ClusterSpec(delta=delta, theta=as_mpf(theta), s=s, ell=ell,
                           tau=tau)
        centers = default_centers(n_clusters)
        nodes = generate_config(spec, layout, centers,
                                seed=rng.randrange(2 ** 31), domain=PERIODIC)
    return ClusteredInstance(nodes=nodes, cluster=spec, N=N,
                             multiplicities=tuple(mults))


def run_turan_suite(instances: int = 500, seed: int = DEFAULT_SUITE_SEED,
                    ell_max: int = 5, bits: int = DEFAULT_SUITE_BITS) -> SuiteResult:
    rng = random.Random(seed)
    out = SuiteResult("turan", seed)
    worst = None
    with mp.workprec(bits):
        for i in range(instances):
            ell = rng.randint(1, ell_max)
            P = random_expsum(rng, ell)
            b = mpf(rng.uniform(1.0, 4.0))
            w0 = mpf(rng.uniform(0.0, 0.7)) * b
            w1 = w0 + max(mpf(rng.uniform(0.05, 0.3)) * b, mpf("0.01"))
            chk = check_turan(P, (mpf(0), b), (w0, w1))
            margin = chk.rhs / chk.lhs if chk.lhs > 0 else mpf("inf")
            worst = margin if worst is None else min(worst, margin)
            out.records.append(SuiteRecord(
                "turan", i, {"ell": ell, "interval": decimal_str(b, 64)},
                decimal_str(chk.lhs, bits), decimal_str(chk.rhs, bits),
                chk.holds, seed))
        out.summary = {"instances": instances,
                       "min_rhs_over_lhs": decimal_str(worst, bits)}
    return out


def run_nikolskii_suite(instances: int = 500, seed: int = DEFAULT_SUITE_SEED,
                        ell_max: int = 5,
                        bits: int = DEFAULT_SUITE_BITS) -> SuiteResult:
    """p = inf, q = 2 on [0, 1]."""
    rng = random.Random(seed)
    out = SuiteResult("nikolskii", seed)
    worst = None
    with mp.workprec(bits):
        for i in range(instances):
            ell = rng.randint(1, ell_max)
            P = random_expsum(rng, ell, freq_range=20.0)
            chk = check_nikolskii(P, "inf", 2)
            margin = chk.rhs / chk.lhs if chk.lhs > 0 else mpf("inf")
            worst = margin if worst is None else min(worst, margin)
            out.records.append(SuiteRecord(
                "nikolskii", i, {"ell": ell, "p": "inf", "q": 2},
                decimal_str(chk.lhs, bits), decimal_str(chk.rhs, bits),
                chk.holds, seed))
        out.summary = {"instances": instances,
                       "min_rhs_over_lhs": decimal_str(worst, bits)}
    return out


def run_cor_turan_suite(instances: int = 500, seed: int = DEFAULT_SUITE_SEED,
                        ell_max: int = 4,
                        bits: int = DEFAULT_SUITE_BITS) -> SuiteResult:
    rng = random.Random(seed)
    out = SuiteResult("cor-turan", seed)
    with mp.workprec(bits):
        for i in range(instances):
            ell = rng.randint(1, ell_max)
            tau = mpf(max(ell - 1, 1)) + mpf(rng.uniform(0, 1))
            delta = mpf(10) ** (-_rng_floats(rng, mpf(2), mpf(5)))
            nodes = random_clustered_nodes(rng, ell, tau, delta)
            coeffs = [mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
                      for _ in range(ell)]
            P = ExpSum(tuple(coeffs), nodes)
            n_hi = min(300, int(4 * math.pi / float(delta)))
            N = rng.randint(50, max(50, n_hi))
            chk = check_cor_turan(P, N, delta)
            out.records.append(SuiteRecord(
                "cor-turan", i,
                {"ell": ell, "N": N, "delta": decimal_str(delta, 64)},
                decimal_str(chk.lhs, bits), decimal_str(chk.rhs, bits),
                chk.holds, seed))
        out.summary = {"instances": instances}
    return out


def run_salem_suite(instances: int = 500, seed: int = DEFAULT_SUITE_SEED,
                    ell_max: int = 5, delta_list=("1e-2", "1e-4", "1e-6"),
                    bits: int = DEFAULT_SUITE_BITS) -> SuiteResult:
    """Empirical Salem ratios: min over instances, for each separation.

    summary.stable_within states the max relative spread of the minima
    around their mean; the constant is only ever estimated, not asserted.
    """
    out = SuiteResult("salem", seed)
    minima = []
    with mp.workprec(bits):
        for delta_text in delta_list:
            rng = random.Random(seed)
            delta = mpf(delta_text)
            lo = None
            for i in range(instances):
                ell = rng.randint(1, ell_max)
                freqs = []
                while len(freqs) < ell:
                    x = mpf(rng.uniform(-3.1, 3.1))
                    if all(abs(x - y) >= delta for y in freqs):
                        freqs.append(x)
                coeffs = [mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
                          for _ in range(ell)]
                P = ExpSum(tuple(coeffs), tuple(freqs))
                ratio = check_salem_ratio(P, delta)
                lo = ratio if lo is None else min(lo, ratio)
            minima.append(lo)
            out.records.append(SuiteRecord(
                "salem", len(out.records),
                {"delta": delta_text, "instances": instances},
                decimal_str(lo, bits), "0", bool(lo > 0), seed))
        mean = mp.fsum(minima) / len(minima)
        spread = max(abs(x - mean) / mean for x in minima)
        out.summary = {
            "minima": [decimal_str(x, bits) for x in minima],
            "empirical_constant": decimal_str(min(minima), bits),
            "relative_spread": decimal_str(spread, bits),
        }
    return out


def run_riemann_suite(instances: int = 500, seed: int = DEFAULT_SUITE_SEED,
                      ell_max: int = 5, with_sup_shape: bool = False,
                      bits: int = DEFAULT_SUITE_BITS) -> SuiteResult:
    """Discrete-vs-continuous norm relation on clustered sums.

    with_sup_shape additionally estimates ||T||_inf to report the
    gap/shape ratio; that costs a dense grid, so the default leaves it
    off and the dedicated shape suite (smaller, ell <= 3) turns it on.
    """
    rng = random.Random(seed)
    out = SuiteResult("riemann", seed)
    max_ratio = mpf(0)
    with mp.workprec(bits):
        for i in range(instances):
            ell = rng.randint(1, ell_max)
            tau = mpf(max(ell - 1, 1)) + mpf(rng.uniform(0, 1))
            delta = mpf(10) ** (-_rng_floats(rng, mpf(3), mpf(6)))
            nodes = random_clustered_nodes(rng, ell, tau, delta)
            coeffs = [mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
                      for _ in range(ell)]
            P = ExpSum(tuple(coeffs), nodes)
            N = rng.randint(30, 300)
            rep = riemann_gap(P, N, with_sup_shape=with_sup_shape)
            if with_sup_shape and rep.rhs_shape and rep.rhs_shape > 0:
                max_ratio = max(max_ratio, rep.gap / rep.rhs_shape)
            out.records.append(SuiteRecord(
                "riemann", i, {"ell": ell, "N": N},
                decimal_str(rep.discrete_sq, bits),
                decimal_str(mpf(N) / 2 * rep.l1_norm, bits),
                rep.relation_holds, seed))
        out.summary = {"instances": instances}
        if with_sup_shape:
            out.summary["max_gap_over_shape"] = decimal_str(max_ratio, bits)
    return out


ALL_SUITES = {
    "turan": run_turan_suite,
    "nikolskii": run_nikolskii_suite,
    "cor-turan": run_cor_turan_suite,
    "salem": run_salem_suite,
    "riemann": run_riemann_suite,
}


@dataclass(frozen=True)
class LevelCountFit:
    """Fitted c1 window for the per-level spectral counting.

    For each instance and level m, counting singular values in the band
    [c1*shape_m, c1*shape_{m-1}) must find exactly q_m of them; that
    pins c1 into (lo, hi].  A nonempty intersection across all instances
    is the testable content; c1 is the geometric midpoint.
    """

    lo: object
    hi: object
    c1: object
    instances: int

    @property
    def nonempty(self) -> bool:
        return self.lo < self.hi


def fit_level_constant(spectra_and_partitions, bits: int = DEFAULT_SUITE_BITS) -> LevelCountFit:
    """Intersect the admissible c1 intervals over (spectrum, q, N, delta).

    Each item is (sigma: descending tuple, q: tuple, N: int, delta).
    """
    lo_all, hi_all = mpf(0), mpf("inf")
    count = 0
    with mp.workprec(bits):
        c2 = 32 * mp.pi * mp.e
        for sigma, q, N, delta in spectra_and_partitions:
            count += 1
            s = len(sigma)
            ell = len(q)
            cums = [sum(q[:m]) for m in range(1, ell + 1)]
            for m in range(1, ell + 1):
                cum = cums[m - 1]
                shape = mp.sqrt(N) * (N * as_mpf(delta) / c2) ** (m - 1)
                hi_all = min(hi_all, sigma[cum - 1] / shape)
                if cum < s:
                    lo_all = max(lo_all, sigma[cum] / shape)
        c1 = mp.sqrt(lo_all * hi_all) if 0 < lo_all < hi_all else \
            (hi_all / 2 if hi_all < mp.inf else mpf(1))
    return LevelCountFit(lo=lo_all, hi=hi_all, c1=c1, instances=count)


def band_counts(sigma, q, N, delta, c1, bits: int = DEFAULT_SUITE_BITS):
    """Observed counts of singular values per scaling band.

    Band m is [c1*shape_m, c1*shape_{m-1}) with shape_0 = +inf; matching
    the theory means counts == q element-wise.
    """
    ell = len(q)
    with mp.workprec(bits):
        c2 = 32 * mp.pi * mp.e
        thresholds = [as_mpf(c1) * mp.sqrt(N) * (N * as_mpf(delta) / c2) ** (m - 1)
                      for m in range(1, ell + 1)]
        counts = []
        prev = mpf("inf")
        for t in thresholds:
            counts.append(sum(1 for v in sigma if t <= v < prev))
            prev = t
    return counts, thresholds
