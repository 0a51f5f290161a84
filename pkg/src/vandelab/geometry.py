"""Node-set construction and validation for clustered configurations.

A configuration is a set of distinct nodes, on the periodic interval
(-pi, pi] or on the real line, grouped into clusters: within a cluster
consecutive nodes sit at distance between delta and tau*delta, and any
two nodes from different clusters are at least theta apart.  The
validator recovers the cluster partition by single-linkage at threshold
tau*delta and then checks both separation conditions pairwise; because
admissible configurations keep the two distance scales apart
(tau*delta < theta), single linkage finds the unique admissible
partition whenever one exists.

Boundary equalities (d == delta, d == tau*delta, d == theta) are valid.
Since distances are computed in finite precision, comparisons carry a
relative slack of 2^-(p-16) at ambient precision p so that exact-boundary
configurations generated at the same precision validate cleanly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import (
    ConfigValidationError,
    DegenerateInputError,
    InvalidParameterError,
    PrecisionError,
)
from .hp import as_mpf, decimal_str, parse_decimal

PERIODIC = "periodic"
LINE = "line"

EQUISPACED = "equispaced"
RANDOM = "random"


def wrap_distance(x, y):
    """Angular distance |Arg e^(i(x-y))| in [0, pi].

    Symmetric, and invariant under shifting either argument by 2*pi.
    The difference is reduced straight into (-pi, pi] and only then made
    absolute: reducing into [0, 2*pi) first would compute tiny distances
    as a difference of two numbers near 2*pi and lose their relative
    precision entirely.
    """
    d = as_mpf(x) - as_mpf(y)
    two_pi = 2 * mp.pi
    n = mp.floor((d + mp.pi) / two_pi)
    if n != 0:
        d = d - two_pi * n  # in [-pi, pi) up to rounding of 2*pi*n
    return abs(d)


def line_distance(x, y):
    return abs(as_mpf(x) - as_mpf(y))


def _metric(domain: str):
    if domain == PERIODIC:
        return wrap_distance
    if domain == LINE:
        return line_distance
    raise InvalidParameterError(f"unknown domain {domain!r}")


def wrap_to_interval(x):
    """Reduce an angle to the representative in (-pi, pi].

    Inputs sitting within rounding distance of an odd multiple of pi can
    land an ulp outside the half-open interval; the final adjustments
    fold them back.
    """
    x = as_mpf(x)
    two_pi = 2 * mp.pi
    n = mp.floor((x + mp.pi) / two_pi)
    r = x - two_pi * n if n != 0 else x
    if r <= -mp.pi:
        r += two_pi
    elif r > mp.pi:
        r -= two_pi
    return r


@dataclass(frozen=True)
class NodeSet:
    """Ordered distinct nodes with their domain tag."""

    nodes: tuple
    domain: str = PERIODIC

    def __post_init__(self):
        if self.domain not in (PERIODIC, LINE):
            raise InvalidParameterError(f"unknown domain {self.domain!r}")
        nodes = tuple(as_mpf(x) for x in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if self.domain == PERIODIC:
            for x in nodes:
                if not (-mp.pi < x <= mp.pi):
                    raise InvalidParameterError(
                        f"periodic node {decimal_str(x)} outside (-pi, pi]")
        seen = set()
        for x in nodes:
            if x in seen:
                raise DegenerateInputError(f"duplicate node {decimal_str(x)}")
            seen.add(x)

    @property
    def count(self) -> int:
        return len(self.nodes)

    def to_json_dict(self, bits: int | None = None) -> dict:
        return {
            "domain": self.domain,
            "nodes": [decimal_str(x, bits) for x in self.nodes],
        }

    @classmethod
    def from_json_dict(cls, obj: dict, bits: int) -> "NodeSet":
        from .errors import ConfigParseError

        if not isinstance(obj, dict):
            raise ConfigParseError("node set must be a JSON object", key="nodes")
        try:
            domain = obj["domain"]
            raw = obj["nodes"]
        except KeyError as exc:
            raise ConfigParseError(f"node set missing key {exc.args[0]!r}",
                                   key=exc.args[0]) from exc
        return cls(tuple(parse_decimal(v, bits) for v in raw), domain)


@dataclass(frozen=True)
class ClusterSpec:
    """Parameters (delta, theta, s, ell, tau) of a clustered configuration."""

    delta: object
    theta: object
    s: int
    ell: int
    tau: object

    def __post_init__(self):
        object.__setattr__(self, "delta", as_mpf(self.delta))
        object.__setattr__(self, "theta", as_mpf(self.theta))
        object.__setattr__(self, "tau", as_mpf(self.tau))
        if not self.delta > 0:
            raise InvalidParameterError("delta must be > 0")
        if not self.theta > 0:
            raise InvalidParameterError("theta must be > 0")
        if not (1 <= self.ell <= self.s):
            raise InvalidParameterError(
                f"need 1 <= ell <= s, got ell={self.ell}, s={self.s}")
        if self.tau < self.ell - 1:
            raise InvalidParameterError(
                f"need tau >= ell-1, got tau={decimal_str(self.tau)}, ell={self.ell}")

    def to_json_dict(self, bits: int | None = None) -> dict:
        return {
            "delta": decimal_str(self.delta, bits),
            "theta": decimal_str(self.theta, bits),
            "s": self.s,
            "ell": self.ell,
            "tau": decimal_str(self.tau, bits),
        }

    @classmethod
    def from_json_dict(cls, obj: dict, bits: int) -> "ClusterSpec":
        from .errors import ConfigParseError

        if not isinstance(obj, dict):
            raise ConfigParseError("cluster spec must be a JSON object", key="cluster")
        vals = {}
        for key in ("delta", "theta", "s", "ell", "tau"):
            if key not in obj:
                raise ConfigParseError(f"cluster spec missing key {key!r}", key=key)
            vals[key] = obj[key]
        return cls(
            delta=parse_decimal(vals["delta"], bits),
            theta=parse_decimal(vals["theta"], bits),
            s=int(vals["s"]),
            ell=int(vals["ell"]),
            tau=parse_decimal(vals["tau"], bits),
        )


@dataclass(frozen=True)
class PartitionResult:
    """Cluster partition: index sets, their sizes, and the counts q_m.

    clusters are ordered by their smallest member node; q[m-1] is the
    number of clusters of multiplicity at least m, for m = 1..ell.
    """

    clusters: tuple
    multiplicities: tuple
    q: tuple

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)


def count_q(partition: PartitionResult, m: int) -> int:
    """Number of clusters of multiplicity at least m (1 <= m <= ell)."""
    if not (1 <= m <= len(partition.q)):
        raise InvalidParameterError(
            f"m must be in 1..{len(partition.q)}, got {m}")
    return sum(1 for r in partition.multiplicities if r >= m)


def _distance_slack(nodes: NodeSet, delta):
    """Absolute tolerance for the boundary comparisons of the validator.

    Stored nodes differ from their ideal positions by up to a rounding of
    their own magnitude (they were created as center + offset), so the
    comparison slack must be absolute at the node scale, not relative to
    delta.  If that slack is not far below delta the working precision
    cannot resolve the configuration at all.
    """
    scale = max([mpf(1)] + [abs(x) for x in nodes.nodes])
    tol = scale * mpf(2) ** -(mp.prec - 16)
    if tol >= as_mpf(delta) / 4:
        raise PrecisionError(
            f"cannot validate separations of {decimal_str(as_mpf(delta))} at "
            f"{mp.prec} bits with nodes of magnitude {decimal_str(scale)}; "
            f"raise the working precision")
    return tol


def validate_config(nodes: NodeSet, spec: ClusterSpec) -> PartitionResult:
    """Check a node set against a cluster spec and return its partition.

    Raises ConfigValidationError naming the offending pair of node indices
    and the violated condition when the set is not a valid
    (delta, theta, s, ell, tau) configuration for the node set's domain.
    """
    if nodes.count != spec.s:
        raise ConfigValidationError(
            f"node count {nodes.count} differs from spec s={spec.s}")
    if nodes.domain == PERIODIC and spec.tau > mp.pi / spec.delta:
        raise InvalidParameterError(
            "periodic domain requires tau <= pi/delta")
    dist = _metric(nodes.domain)
    s = nodes.count
    tol = _distance_slack(nodes, spec.delta)
    link = spec.tau * spec.delta + tol
    lo_delta = spec.delta - tol
    lo_theta = spec.theta - tol

    d = [[mpf(0)] * s for _ in range(s)]
    for i in range(s):
        for j in range(i + 1, s):
            dij = dist(nodes.nodes[i], nodes.nodes[j])
            if dij == 0:
                raise DegenerateInputError(
                    f"nodes {i} and {j} coincide (distance 0)")
            d[i][j] = d[j][i] = dij

    # single-linkage components at threshold tau*delta
    parent = list(range(s))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(s):
        for j in range(i + 1, s):
            if d[i][j] <= link:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups = {}
    for i in range(s):
        groups.setdefault(find(i), []).append(i)
    clusters = sorted(groups.values(), key=lambda g: nodes.nodes[g[0]])

    for g in clusters:
        if len(g) > spec.ell:
            raise ConfigValidationError(
                f"single-linkage cluster {tuple(g)} has multiplicity "
                f"{len(g)} > ell={spec.ell}; configuration rejected",
                pair=None, condition="multiplicity")
        for a in range(len(g)):
            for b in range(a + 1, len(g)):
                i, j = g[a], g[b]
                if d[i][j] < lo_delta:
                    raise ConfigValidationError(
                        f"nodes {i},{j} at distance {decimal_str(d[i][j])} "
                        f"below delta={decimal_str(spec.delta)}",
                        pair=(i, j), condition="within-cluster minimum")
                # d <= tau*delta holds by the linkage threshold for the
                # linking edges; enforce it for every pair (diameter)
                if d[i][j] > link:
                    raise ConfigValidationError(
                        f"nodes {i},{j} at distance {decimal_str(d[i][j])} "
                        f"exceed cluster diameter tau*delta="
                        f"{decimal_str(spec.tau * spec.delta)}",
                        pair=(i, j), condition="within-cluster diameter")
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            for i in clusters[a]:
                for j in clusters[b]:
                    if d[i][j] < lo_theta:
                        raise ConfigValidationError(
                            f"nodes {i},{j} from different clusters at "
                            f"distance {decimal_str(d[i][j])} below theta="
                            f"{decimal_str(spec.theta)}",
                            pair=(i, j), condition="inter-cluster separation")

    mults = tuple(len(g) for g in clusters)
    q = tuple(sum(1 for r in mults if r >= m) for m in range(1, spec.ell + 1))
    return PartitionResult(
        clusters=tuple(tuple(g) for g in clusters),
        multiplicities=mults,
        q=q,
    )


def assign_multiplicities(s: int, ell: int, n_clusters: int) -> list:
    """Deterministic split of s nodes into n_clusters clusters.

    The first cluster gets exactly ell nodes (so the configuration
    realizes its stated maximal multiplicity); the rest is spread as
    evenly as possible.  Infeasible splits raise.
    """
    if n_clusters < 1:
        raise InvalidParameterError("need at least one cluster center")
    rest = s - ell
    others = n_clusters - 1
    if rest < others or rest > others * ell:
        raise InvalidParameterError(
            f"cannot place s={s} nodes into {n_clusters} clusters with "
            f"max multiplicity ell={ell}")
    mults = [ell]
    if others:
        base, extra = divmod(rest, others)
        for j in range(others):
            mults.append(base + (1 if j < extra else 0))
    if any(not (1 <= r <= ell) for r in mults):
        raise InvalidParameterError(
            f"cannot place s={s} nodes into {n_clusters} clusters with "
            f"max multiplicity ell={ell}")
    return mults


def _cluster_offsets(r: int, spec: ClusterSpec, layout: str, rng) -> list:
    """Node offsets of one cluster relative to its center, min+max = 0."""
    if r == 1:
        return [mpf(0)]
    if layout == EQUISPACED:
        gaps = [spec.delta] * (r - 1)
    elif layout == RANDOM:
        # gaps in [delta, tau*delta/(ell-1)] keep every pairwise distance
        # inside [delta, tau*delta] for any multiplicity r <= ell
        hi = spec.tau * spec.delta / (spec.ell - 1)
        gaps = [spec.delta + (hi - spec.delta) * mpf(rng.random())
                for _ in range(r - 1)]
    else:
        raise InvalidParameterError(f"unknown layout {layout!r}")
    offs = [mpf(0)]
    for g in gaps:
        offs.append(offs[-1] + g)
    mid = (offs[0] + offs[-1]) / 2
    return [o - mid for o in offs]


def generate_config(spec: ClusterSpec, layout: str, cluster_centers,
                    seed: int, domain: str = PERIODIC) -> NodeSet:
    """Build a node set realizing ``spec`` around the given centers.

    Equispaced layout puts each cluster on an arithmetic progression with
    gap exactly delta; random layout draws the gaps reproducibly from
    ``seed``.  The result is validated against ``spec`` before returning.
    """
    centers = [as_mpf(c) for c in cluster_centers]
    if not centers:
        raise InvalidParameterError("need at least one cluster center")
    dist = _metric(domain)
    margin = spec.theta + spec.tau * spec.delta
    slack = mpf(2) ** -(mp.prec - 16)
    for a in range(len(centers)):
        for b in range(a + 1, len(centers)):
            if dist(centers[a], centers[b]) < margin * (1 - slack):
                raise ConfigValidationError(
                    f"cluster centers {a},{b} closer than theta + tau*delta",
                    pair=(a, b), condition="center separation")
    mults = assign_multiplicities(spec.s, spec.ell, len(centers))
    rng = random.Random(seed)
    out = []
    for center, r in zip(centers, mults):
        for off in _cluster_offsets(r, spec, layout, rng):
            x = center + off
            out.append(wrap_to_interval(x) if domain == PERIODIC else x)
    nodes = NodeSet(tuple(out), domain)
    validate_config(nodes, spec)
    return nodes


def center_nodes(nodes: NodeSet) -> NodeSet:
    """Shift so that min + max = 0 (single-cluster normalization).

    For periodic sets this assumes the configuration does not straddle
    the (-pi, pi] boundary, which holds for every cluster this package
    generates.
    """
    lo = min(nodes.nodes)
    hi = max(nodes.nodes)
    shift = (lo + hi) / 2
    moved = [x - shift for x in nodes.nodes]
    if nodes.domain == PERIODIC:
        moved = [wrap_to_interval(x) for x in moved]
    return NodeSet(tuple(moved), nodes.domain)


def scale_to_circle(nodes: NodeSet, N: int) -> NodeSet:
    """Map line nodes x to x/N on the periodic interval.

    If x is a (delta, theta, s, ell, tau) configuration on the line, the
    image is a (delta/N, theta/N, s, ell, tau) configuration on the
    circle once every x/N lands inside (-pi, pi].
    """
    if nodes.domain != LINE:
        raise InvalidParameterError("scale_to_circle expects line-domain nodes")
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    scaled = []
    for x in nodes.nodes:
        xi = x / N
        if not (-mp.pi < xi <= mp.pi):
            raise InvalidParameterError(
                f"scaled node {decimal_str(xi)} outside (-pi, pi]; increase N")
        scaled.append(xi)
    return NodeSet(tuple(scaled), PERIODIC)
