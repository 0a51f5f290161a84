"""Experiment runner: manifests, sweeps, single-instance runs, reports.

A sweep manifest declares a parameter grid; every grid point becomes one
result row.  Rows carry a fixed CSV column set (documented in the README)
and the same content is mirrored to results.json; richer per-row data
(full spectra, skip reasons, level counts) goes to details.json so the
CSV/JSON mirror stays exact.

Reproducibility contract: identical manifest plus seed produces identical
CSV bodies, except the runtime_ms column, which is wall-clock timing.
Row order, number formatting, and the random draws are all deterministic.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from mpmath import mp, mpf

from . import __version__ as TOOL_VERSION
from .bounds import (
    DEFAULT_WINDOW_FLOOR,
    evaluate_all,
    sixteen_pi_e,
    slepian_constant,
)
from .errors import (
    ConfigParseError,
    ConfigValidationError,
    InvalidParameterError,
    VandelabError,
)
from .geometry import (
    EQUISPACED,
    LINE,
    PERIODIC,
    ClusterSpec,
    NodeSet,
    generate_config,
    validate_config,
)
from .hp import DEFAULT_POLICY, decimal_str, parse_decimal
from .matrices import VandermondeSpec, build_prolate
from .spectra import hermitian_eigenvalues, singular_values
from .suites import DEFAULT_SUITE_SEED, band_counts, default_centers
from .svgplot import write_scatter_svg

log = logging.getLogger(__name__)

CSV_COLUMNS = [
    "experiment_id", "kind", "s", "ell", "tau", "N", "delta", "theta",
    "layout", "seed", "precision_bits", "sigma_min", "lambda",
    "log10_lambda", "lower_shape", "upper_explicit", "srf", "window_ok",
    "runtime_ms", "status",
]

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped"
STATUS_FAILED = "failed"

#: desk-scale envelope; larger grids still run but get flagged in the log
DESK_MAX_ELL = 12
DESK_MAX_PRECISION = 16384

_GRID_KEYS = ("ell", "tau", "N", "delta", "s", "theta", "layout", "seed")
_GRID_DEFAULTS = {
    "tau": ["auto"],
    "s": [None],
    "theta": [None],
    "layout": [EQUISPACED],
    "seed": [DEFAULT_SUITE_SEED],
}


@dataclass(frozen=True)
class ExperimentManifest:
    experiment_id: str
    kind: str
    grid: dict
    precision_override: int | None = None
    created_at: str = ""
    tool_version: str = TOOL_VERSION

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ExperimentManifest":
        if not isinstance(obj, dict):
            raise ConfigParseError("manifest must be a JSON object")
        for key in ("experiment_id", "kind", "grid"):
            if key not in obj:
                raise ConfigParseError(f"manifest missing key {key!r}", key=key)
        grid = dict(obj["grid"])
        for key in ("ell", "N", "delta"):
            if not grid.get(key):
                raise ConfigParseError(
                    f"manifest grid must list values for {key!r}", key=key)
        for key, default in _GRID_DEFAULTS.items():
            if not grid.get(key):
                grid[key] = list(default)
        unknown = set(grid) - set(_GRID_KEYS)
        if unknown:
            raise ConfigParseError(
                f"unknown grid keys {sorted(unknown)}", key=sorted(unknown)[0])
        override = obj.get("precision_override")
        return cls(
            experiment_id=str(obj["experiment_id"]),
            kind=str(obj["kind"]),
            grid=grid,
            precision_override=int(override) if override else None,
            created_at=str(obj.get("created_at", "")),
            tool_version=str(obj.get("tool_version", TOOL_VERSION)),
        )

    @classmethod
    def load(cls, path) -> "ExperimentManifest":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"manifest is not valid JSON: {exc}") from exc
        return cls.from_json_dict(obj)

    def to_json_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "kind": self.kind,
            "grid": self.grid,
            "precision_override": self.precision_override,
            "created_at": self.created_at,
            "tool_version": self.tool_version,
        }

    def points(self) -> list:
        """Cartesian product of the grid in fixed key order."""
        lists = [self.grid[k] for k in _GRID_KEYS]
        out = []
        for idx, combo in enumerate(itertools.product(*lists)):
            point = dict(zip(_GRID_KEYS, combo))
            point["index"] = idx
            point["experiment_id"] = self.experiment_id
            point["kind"] = self.kind
            point["precision_override"] = self.precision_override
            out.append(point)
        return out


@dataclass
class SweepSummary:
    ok: int
    skipped: int
    failed: int
    fitted_slope: float | None
    rows: list
    out_dir: str

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "skipped": self.skipped,
            "failed": self.failed,
            "fitted_slope": self.fitted_slope,
            "rows": len(self.rows),
            "out_dir": self.out_dir,
        }


def _blank_row(point: dict) -> dict:
    row = {c: "" for c in CSV_COLUMNS}
    row["experiment_id"] = point["experiment_id"]
    row["kind"] = point["kind"]
    row["ell"] = str(point["ell"])
    row["N"] = str(point["N"])
    row["layout"] = str(point["layout"])
    row["seed"] = str(point["seed"])
    return row


def _resolve_point(point: dict, bits_probe: int = 192):
    """Turn raw grid values into a ClusterSpec plus derived geometry."""
    ell = int(point["ell"])
    N = int(point["N"])
    s = point["s"]
    s = ell if s in (None, "auto") else int(s)
    delta = parse_decimal(point["delta"], bits_probe)
    tau_raw = point["tau"]
    if tau_raw in (None, "auto"):
        tau = mpf(max(ell - 1, 0))
    else:
        tau = parse_decimal(tau_raw, bits_probe)
    n_clusters = max(1, math.ceil(s / ell))
    theta_raw = point["theta"]
    if theta_raw in (None, "auto"):
        theta = mp.pi if n_clusters == 1 else 2 * mp.pi / n_clusters - 1
        if theta <= 0:
            raise InvalidParameterError(
                f"no room for {n_clusters} default cluster centers; "
                "set theta explicitly")
    else:
        theta = parse_decimal(theta_raw, bits_probe)
    spec = ClusterSpec(delta=delta, theta=theta, s=s, ell=ell, tau=tau)
    return spec, N, n_clusters


def compute_sweep_point(point: dict) -> dict:
    """One grid point end to end; returns row + details, never raises."""
    t0 = time.perf_counter()
    row = _blank_row(point)
    details = {"index": point["index"]}
    try:
        spec, N, n_clusters = _resolve_point(point)
        bits = point["precision_override"] or DEFAULT_POLICY.required_bits(
            spec.ell, N, spec.delta)
        with mp.workprec(bits):
            spec, N, n_clusters = _resolve_point(point, bits)
            row["s"] = str(spec.s)
            row["tau"] = decimal_str(spec.tau, bits)
            row["delta"] = decimal_str(spec.delta, bits)
            row["theta"] = decimal_str(spec.theta, bits)
            row["precision_bits"] = str(bits)
            nodes = generate_config(spec, str(point["layout"]),
                                    default_centers(n_clusters),
                                    int(point["seed"]), PERIODIC)
            partition = validate_config(nodes, spec)
            vspec = VandermondeSpec(N, nodes)
            spectrum = singular_values(vspec, spec, bits)
            report = evaluate_all(vspec, spec, bits=bits)
            sigma_min = spectrum.min_value
            scale = mp.sqrt(N) * (N * spec.delta) ** (spec.ell - 1)
            lam = sigma_min / scale
            row["sigma_min"] = decimal_str(sigma_min, bits)
            row["lambda"] = decimal_str(lam, bits)
            row["log10_lambda"] = decimal_str(
                mp.log10(lam) if lam > 0 else mpf("-inf"), bits)
            row["lower_shape"] = decimal_str(report.lower_shape, bits)
            row["upper_explicit"] = decimal_str(report.upper_explicit, bits)
            row["srf"] = decimal_str(report.srf, bits)
            row["window_ok"] = "true" if report.window_ok else "false"
            row["status"] = STATUS_OK
            details.update({
                "multiplicities": list(partition.multiplicities),
                "q": list(partition.q),
                "window_reason": report.window_reason,
                "spectrum": spectrum.to_json_dict(),
                "nodes": nodes.to_json_dict(bits),
            })
    except (InvalidParameterError, ConfigValidationError, ConfigParseError) as exc:
        row["status"] = STATUS_SKIPPED
        details["reason"] = str(exc)
    except VandelabError as exc:
        row["status"] = STATUS_FAILED
        details["reason"] = str(exc)
    except Exception as exc:  # pragma: no cover - defensive
        row["status"] = STATUS_FAILED
        details["reason"] = f"{type(exc).__name__}: {exc}"
    row["runtime_ms"] = str(int((time.perf_counter() - t0) * 1000))
    return {"index": point["index"], "row": row, "details": details}


def _fit_slope(rows) -> float | None:
    """Least-squares slope of log10(lambda) against (ell - 1)."""
    pts = [(int(r["ell"]) - 1, float(mpf(r["log10_lambda"])))
           for r in rows
           if r["status"] == STATUS_OK and int(r["ell"]) > 1 and r["log10_lambda"]]
    if len({x for x, _ in pts}) < 2:
        return None
    n = len(pts)
    sx = sum(x for x, _ in pts)
    sy = sum(y for _, y in pts)
    sxx = sum(x * x for x, _ in pts)
    sxy = sum(x * y for x, y in pts)
    return (n * sxy - sx * sy) / (n * sxx - sx * sx)


def _write_outputs(out_dir: Path, manifest: ExperimentManifest, rows, details):
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    with open(out_dir / "results.json", "w", encoding="utf-8") as fh:
        json.dump({"columns": CSV_COLUMNS, "rows": rows}, fh, indent=2)
    with open(out_dir / "details.json", "w", encoding="utf-8") as fh:
        json.dump({"manifest": manifest.to_json_dict(), "details": details},
                  fh, indent=2)


def _write_figure(out_dir: Path, manifest: ExperimentManifest, rows):
    pts = [(float(r["ell"]), float(mpf(r["log10_lambda"])))
           for r in rows if r["status"] == STATUS_OK and r["log10_lambda"]]
    with mp.workprec(64):
        lower_slope = -float(mp.log10(sixteen_pi_e(64)))
    taus = [float(mpf(r["tau"])) for r in rows
            if r["status"] == STATUS_OK and r["tau"]]
    tau_max = max(taus) if taus else 1.0
    upper_slope = math.log10(tau_max) if tau_max > 0 else 0.0
    lines = [
        (lower_slope, -lower_slope, "lower bracket"),
        (upper_slope, -upper_slope, "upper bracket"),
    ]
    write_scatter_svg(
        out_dir / "figure.svg", pts, lines,
        title=f"{manifest.experiment_id}: cluster size vs log10 of "
              f"normalized minimal singular value",
        xlabel="cluster size", ylabel="log10 lambda")


def run_sweep(manifest: ExperimentManifest, out_dir, workers: int = 1) -> SweepSummary:
    """Execute every grid point, write CSV/JSON/SVG, return counts.

    Per-point failures are recorded in their rows and never abort the
    sweep.  With workers > 1, points run in separate processes; output
    order is independent of scheduling.
    """
    out_dir = Path(out_dir)
    points = manifest.points()
    if any(int(p["ell"]) > DESK_MAX_ELL for p in points) or \
            (manifest.precision_override or 0) > DESK_MAX_PRECISION:
        log.warning("grid exceeds the desk-scale envelope (ell <= %d, "
                    "precision <= %d); expect a long run",
                    DESK_MAX_ELL, DESK_MAX_PRECISION)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(compute_sweep_point, points))
    else:
        outcomes = [compute_sweep_point(p) for p in points]
    outcomes.sort(key=lambda o: o["index"])
    rows = [o["row"] for o in outcomes]
    details = [o["details"] for o in outcomes]
    _write_outputs(out_dir, manifest, rows, details)
    _write_figure(out_dir, manifest, rows)
    slope = _fit_slope(rows)
    counts = {s: sum(1 for r in rows if r["status"] == s)
              for s in (STATUS_OK, STATUS_SKIPPED, STATUS_FAILED)}
    summary = SweepSummary(ok=counts[STATUS_OK], skipped=counts[STATUS_SKIPPED],
                           failed=counts[STATUS_FAILED], fitted_slope=slope,
                           rows=rows, out_dir=str(out_dir))
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary.to_json_dict(), fh, indent=2)
    return summary


# ---------------------------------------------------------------- configs


def load_config(path, bits_probe: int = 192) -> dict:
    """Read a single-instance config file (nodes + cluster + N)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"config is not valid JSON: {exc}") from exc
    if "nodes" not in obj:
        raise ConfigParseError("config missing key 'nodes'", key="nodes")
    if "cluster" not in obj:
        raise ConfigParseError("config missing key 'cluster'", key="cluster")
    bits = int(obj.get("precision_bits") or 0) or None
    cluster = ClusterSpec.from_json_dict(obj["cluster"], bits or bits_probe)
    nodes = NodeSet.from_json_dict(obj["nodes"], bits or bits_probe)
    n_val = obj.get("N")
    return {
        "nodes": nodes,
        "cluster": cluster,
        "N": int(n_val) if n_val is not None else None,
        "precision_bits": bits,
    }


def write_config(path, nodes: NodeSet, cluster: ClusterSpec,
                 N: int | None = None, bits: int | None = None):
    obj = {
        "nodes": nodes.to_json_dict(bits),
        "cluster": cluster.to_json_dict(bits),
    }
    if N is not None:
        obj["N"] = N
    if bits is not None:
        obj["precision_bits"] = bits
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)


def _ratio_if_equispaced(nodes: NodeSet, partition, cluster: ClusterSpec,
                         lam_min, bits: int):
    """Slepian comparison ratio, defined for a single equispaced cluster."""
    if partition.cluster_count != 1 or cluster.s != cluster.ell:
        return None
    xs = sorted(nodes.nodes)
    gaps = [xs[i + 1] - xs[i] for i in range(len(xs) - 1)]
    if gaps:
        slack = mpf(2) ** -(bits - 16)
        g0 = gaps[0]
        if any(abs(g - g0) > slack * abs(g0) for g in gaps):
            return None
    ceq = slepian_constant(cluster.s, bits)
    return lam_min / (ceq * cluster.delta ** (2 * cluster.s - 2))


def run_spectrum(config_path, user_c1=1, out_dir=None,
                 bits_override: int | None = None) -> dict:
    """Full singular spectrum, bound report, and per-level counts."""
    t0 = time.perf_counter()
    cfg = load_config(config_path)
    nodes, cluster = cfg["nodes"], cfg["cluster"]
    if cfg["N"] is None:
        raise ConfigParseError("config missing key 'N'", key="N")
    N = cfg["N"]
    bits = bits_override or cfg["precision_bits"] or \
        DEFAULT_POLICY.required_bits(cluster.ell, N, cluster.delta)
    with mp.workprec(bits):
        partition = validate_config(nodes, cluster)
        vspec = VandermondeSpec(N, nodes)
        spectrum = singular_values(vspec, cluster, bits)
        report = evaluate_all(vspec, cluster, user_c1=user_c1, bits=bits)
        counts, thresholds = band_counts(
            spectrum.values, partition.q, N, cluster.delta, mpf(user_c1), bits)
        cumulative = [sum(1 for v in spectrum.values if v >= t)
                      for t in thresholds]
        lam = spectrum.min_value / (mp.sqrt(N) * (N * cluster.delta)
                                    ** (cluster.ell - 1))
        result = {
            "kind": "spectrum",
            "N": N,
            "precision_bits": bits,
            "cluster": cluster.to_json_dict(bits),
            "nodes": nodes.to_json_dict(bits),
            "multiplicities": list(partition.multiplicities),
            "q": list(partition.q),
            "spectrum": spectrum.to_json_dict(),
            "bounds": report.to_json_dict(),
            "sigma_min": decimal_str(spectrum.min_value, bits),
            "lambda": decimal_str(lam, bits),
            "level_thresholds": [decimal_str(t, bits) for t in thresholds],
            "level_counts": counts,
            "level_counts_match_q": counts == list(partition.q),
            "cumulative_counts": cumulative,
            "user_c1": decimal_str(mpf(user_c1), bits),
            "runtime_ms": int((time.perf_counter() - t0) * 1000),
        }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "spectrum.json", "w", encoding="utf-8") as fh:
            json.dump(result, fh, indent=2)
    return result


def run_prolate(config_path, user_c1=1, out_dir=None,
                bits_override: int | None = None) -> dict:
    """Eigenvalues of the generalized prolate matrix plus comparisons."""
    t0 = time.perf_counter()
    cfg = load_config(config_path)
    nodes, cluster = cfg["nodes"], cfg["cluster"]
    if nodes.domain != LINE:
        raise ConfigParseError("prolate runs need line-domain nodes",
                               key="nodes")
    bits = bits_override or cfg["precision_bits"] or \
        DEFAULT_POLICY.required_bits(cluster.s, 1, cluster.delta)
    with mp.workprec(bits):
        partition = validate_config(nodes, cluster)
        G = build_prolate(nodes, bits)
        spectrum = hermitian_eigenvalues(G)
        lam_min = spectrum.min_value
        ratio = _ratio_if_equispaced(nodes, partition, cluster, lam_min, bits)
        base = cluster.delta / sixteen_pi_e(bits)
        thresholds = [mpf(user_c1) * base ** (2 * (m - 1))
                      for m in range(1, cluster.ell + 1)]
        counts = []
        prev = mpf("inf")
        for t in thresholds:
            counts.append(sum(1 for v in spectrum.values if t <= v < prev))
            prev = t
        result = {
            "kind": "prolate",
            "precision_bits": bits,
            "cluster": cluster.to_json_dict(bits),
            "nodes": nodes.to_json_dict(bits),
            "multiplicities": list(partition.multiplicities),
            "q": list(partition.q),
            "spectrum": spectrum.to_json_dict(),
            "lambda_min": decimal_str(lam_min, bits),
            "lower_shape": decimal_str(base ** (2 * (cluster.ell - 1)), bits),
            "slepian_ratio": decimal_str(ratio, bits) if ratio is not None else None,
            "level_thresholds": [decimal_str(t, bits) for t in thresholds],
            "level_counts": counts,
            "level_counts_match_q": counts == list(partition.q),
            "user_c1": decimal_str(mpf(user_c1), bits),
            "runtime_ms": int((time.perf_counter() - t0) * 1000),
        }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "prolate.json", "w", encoding="utf-8") as fh:
            json.dump(result, fh, indent=2)
    return result


def run_bounds(config_path, user_c1=1, window_floor=DEFAULT_WINDOW_FLOOR,
               out_dir=None, bits_override: int | None = None) -> dict:
    cfg = load_config(config_path)
    nodes, cluster = cfg["nodes"], cfg["cluster"]
    if cfg["N"] is None:
        raise ConfigParseError("config missing key 'N'", key="N")
    bits = bits_override or cfg["precision_bits"] or \
        DEFAULT_POLICY.required_bits(cluster.ell, cfg["N"], cluster.delta)
    with mp.workprec(bits):
        report = evaluate_all(VandermondeSpec(cfg["N"], nodes), cluster,
                              user_c1=user_c1, window_floor=window_floor,
                              bits=bits)
        result = {
            "kind": "bounds",
            "N": cfg["N"],
            "precision_bits": bits,
            "cluster": cluster.to_json_dict(bits),
            "bounds": report.to_json_dict(),
        }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "bounds.json", "w", encoding="utf-8") as fh:
            json.dump(result, fh, indent=2)
    return result


def run_limit_check(config_path, N_list, out_dir=None,
                    bits_override: int | None = None) -> dict:
    from .spectra import prolate_limit_check

    cfg = load_config(config_path)
    nodes = cfg["nodes"]
    if nodes.domain != LINE:
        raise ConfigParseError("limit check needs line-domain nodes",
                               key="nodes")
    gaps = prolate_limit_check(nodes, list(N_list), bits_override)
    bits = bits_override or DEFAULT_POLICY.floor_bits
    G = build_prolate(nodes, bits)
    lam_min = hermitian_eigenvalues(G).min_value
    result = {
        "kind": "limit-check",
        "nodes": nodes.to_json_dict(bits),
        "lambda_min": decimal_str(lam_min, bits),
        "gaps": [{"N": n, "gap": decimal_str(g, bits)} for n, g in gaps],
    }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "limit_check.json", "w", encoding="utf-8") as fh:
            json.dump(result, fh, indent=2)
    return result
