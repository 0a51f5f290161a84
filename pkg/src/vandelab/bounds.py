"""Evaluation of the explicit bound formulas and the window checks.

The two scaling constants 32*pi*e and 16*pi*e are always computed from
mp.pi and mp.e at working precision, never from decimal literals.

Absolute constants that the theory leaves non-explicit (the lower-bound
multiplier c1, the ell-dependent window constants, the prolate
multiplier) are exposed as caller-supplied parameters with default 1 and
are reported, never asserted: experiments measure them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from .errors import InvalidParameterError
from .geometry import ClusterSpec, validate_config
from .hp import as_mpf, decimal_str
from .matrices import VandermondeSpec

#: stand-in for the non-explicit window constant: the window check asks
#: N*theta >= s * DEFAULT_WINDOW_FLOOR.  Advisory only.
DEFAULT_WINDOW_FLOOR = 10


def thirtytwo_pi_e(bits: int | None = None):
    with mp.workprec(bits if bits is not None else mp.prec):
        return 32 * mp.pi * mp.e


def sixteen_pi_e(bits: int | None = None):
    with mp.workprec(bits if bits is not None else mp.prec):
        return 16 * mp.pi * mp.e


def _check_common(N: int, delta, ell: int):
    if N < 1:
        raise InvalidParameterError(f"N must be >= 1, got {N}")
    if ell < 1:
        raise InvalidParameterError(f"ell must be >= 1, got {ell}")
    if not as_mpf(delta) > 0:
        raise InvalidParameterError("delta must be > 0")


def lower_bound_shape(N: int, delta, ell: int, bits: int | None = None):
    """sqrt(N) * (N*delta / (32*pi*e))^(ell-1), the lower-bound shape."""
    _check_common(N, delta, ell)
    with mp.workprec(bits if bits is not None else mp.prec):
        return mp.sqrt(N) * (N * as_mpf(delta) / (32 * mp.pi * mp.e)) ** (ell - 1)


def upper_bound_explicit(N: int, delta, ell: int, tau, bits: int | None = None):
    """(1/2) * sqrt(N*ell*e) * (tau*N*delta)^(ell-1), fully explicit."""
    _check_common(N, delta, ell)
    if as_mpf(tau) < ell - 1:
        raise InvalidParameterError("need tau >= ell-1")
    with mp.workprec(bits if bits is not None else mp.prec):
        return mp.sqrt(N * ell * mp.e) / 2 * (as_mpf(tau) * N * as_mpf(delta)) ** (ell - 1)


def slepian_constant(s: int, bits: int | None = None):
    """The equispaced-cluster constant 2^(2s-2) / ((2s-1) * C(2s-2, s-1)^3).

    Evaluated as an exact rational, then rounded once to working precision.
    """
    if s < 1:
        raise InvalidParameterError(f"s must be >= 1, got {s}")
    frac = Fraction(2 ** (2 * s - 2), (2 * s - 1) * math.comb(2 * s - 2, s - 1) ** 3)
    with mp.workprec(bits if bits is not None else mp.prec):
        return mpf(frac.numerator) / mpf(frac.denominator)


def srf(N: int, delta, bits: int | None = None):
    """Super-resolution factor (N*delta)^-1."""
    if N < 1:
        raise InvalidParameterError(f"N must be >= 1, got {N}")
    if not as_mpf(delta) > 0:
        raise InvalidParameterError("delta must be > 0")
    with mp.workprec(bits if bits is not None else mp.prec):
        return 1 / (N * as_mpf(delta))


@dataclass(frozen=True)
class BoundReport:
    """Every explicit bound formula evaluated for one configuration."""

    lower_shape: object
    upper_explicit: object
    slepian_asymptotic: object
    srf: object
    window_ok: bool
    window_reason: str
    user_c1: object
    window_floor: object
    precision_bits: int

    def to_json_dict(self) -> dict:
        bits = self.precision_bits
        return {
            "lower_shape": decimal_str(self.lower_shape, bits),
            "upper_explicit": decimal_str(self.upper_explicit, bits),
            "slepian_asymptotic": decimal_str(self.slepian_asymptotic, bits),
            "srf": decimal_str(self.srf, bits),
            "window_ok": self.window_ok,
            "window_reason": self.window_reason,
            "user_c1": decimal_str(self.user_c1, bits),
            "window_floor": decimal_str(self.window_floor, bits),
        }


def evaluate_all(spec: VandermondeSpec, cluster: ClusterSpec,
                 user_c1=1, window_floor=DEFAULT_WINDOW_FLOOR,
                 bits: int | None = None) -> BoundReport:
    """Populate a BoundReport for a validated configuration.

    window_ok combines the checkable parts of the admissible N-window:
    N*tau*delta <= 2*pi (the single-cluster upper condition) and
    N*theta >= s*window_floor, where window_floor stands in for the
    non-explicit ell-dependent constant.  The report also records the
    raw products so callers can judge window membership themselves.
    """
    validate_config(spec.nodes, cluster)
    p = bits if bits is not None else mp.prec
    with mp.workprec(p):
        lower = lower_bound_shape(spec.N, cluster.delta, cluster.ell)
        upper = upper_bound_explicit(spec.N, cluster.delta, cluster.ell, cluster.tau)
        slep = slepian_constant(cluster.s) * cluster.delta ** (2 * cluster.s - 2)
        srf_val = srf(spec.N, cluster.delta)
        wf = as_mpf(window_floor)
        ntd = spec.N * cluster.tau * cluster.delta
        nth = spec.N * cluster.theta
        reasons = []
        if ntd > 2 * mp.pi:
            reasons.append(
                f"N*tau*delta = {decimal_str(ntd, 64)} exceeds 2*pi")
        if nth < cluster.s * wf:
            reasons.append(
                f"N*theta = {decimal_str(nth, 64)} below s*window_floor = "
                f"{decimal_str(cluster.s * wf, 64)}")
        ok = not reasons
        reason = "in window" if ok else "; ".join(reasons)
        return BoundReport(
            lower_shape=lower,
            upper_explicit=upper,
            slepian_asymptotic=slep,
            srf=srf_val,
            window_ok=ok,
            window_reason=reason,
            user_c1=as_mpf(user_c1),
            window_floor=wf,
            precision_bits=p,
        )
