"""Exponential sums: evaluation, exact norms, and inequality checks.

A sum is P(t) = sum_j c_j e^(i t x_j) with distinct real frequencies.
L2 norms over an interval use the paper-normalized measure
(1/mu(I) inside the integral) and are integrated in closed form: the
quantities checked here span hundreds of orders of magnitude, so
quadrature error would swamp them.  Quadrature survives only as an
independent cross-check and for L^q exponents without a closed form.

Sup norms are certified from a uniform grid: a derivative bound B for
the [0,1]-rescaled sum (the Bernstein factor) turns the grid maximum
into the two-sided enclosure grid_max <= sup <= grid_max / (1 - h*B/2).
Inequality verdicts always use the conservative side of each enclosure,
so a reported violation is a real violation and never a grid artifact.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .errors import (
    DegenerateInputError,
    InvalidParameterError,
    PrecisionError,
    ResourceLimitError,
)
from .geometry import wrap_distance
from .hp import as_mpc, as_mpf, decimal_str

DEFAULT_MAX_SUP_SAMPLES = 2_000_000
MIN_SUP_SAMPLES = 64


@dataclass(frozen=True)
class ExpSum:
    """Coefficients and pairwise-distinct frequencies of one sum."""

    coeffs: tuple
    freqs: tuple

    def __post_init__(self):
        coeffs = tuple(as_mpc(c) for c in self.coeffs)
        freqs = tuple(as_mpf(x) for x in self.freqs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "freqs", freqs)
        if len(coeffs) != len(freqs):
            raise InvalidParameterError(
                f"{len(coeffs)} coefficients vs {len(freqs)} frequencies")
        if len(set(freqs)) != len(freqs):
            raise DegenerateInputError("frequencies must be pairwise distinct")

    @property
    def degree(self) -> int:
        return sum(1 for c in self.coeffs if c != 0)

    def coeff_norm_sq(self):
        return mp.fsum(abs(c) ** 2 for c in self.coeffs)


@dataclass(frozen=True)
class IntervalNorm:
    """A computed ||P||_{L^p(a, b)} with the normalized measure."""

    a: object
    b: object
    p: object
    value: object


@dataclass(frozen=True)
class CertifiedSup:
    """Two-sided enclosure of a sup norm from a uniform grid."""

    lower: object
    upper: object
    samples: int
    bernstein_bound: object


@dataclass(frozen=True)
class InequalityCheck:
    """One inequality verdict with both sides as computed."""

    name: str
    lhs: object
    rhs: object
    holds: bool
    params: dict


def evaluate(P: ExpSum, t):
    """P(t) at ambient precision."""
    t = as_mpf(t)
    return mp.fsum((c * mp.expj(t * x) for c, x in zip(P.coeffs, P.freqs)),
                   absolute=False)


def _interval_transform(delta, a, b):
    """integral_a^b e^(i delta t) dt, evaluated without cancellation.

    Equals (e^(i delta b) - e^(i delta a)) / (i delta) for delta != 0 and
    b - a at delta == 0; written as a product of a phase and a sinc so
    small delta*(b-a) costs no relative precision.
    """
    if delta == 0:
        return mpc(b - a)
    half = delta * (b - a) / 2
    return (b - a) * mp.expj(delta * (a + b) / 2) * mp.sin(half) / half


def l2_norm_exact(P: ExpSum, a, b):
    """||P||_{L2(a,b)} with normalized measure, by closed-form integration.

    The quadratic form sum_{j,k} c_j conj(c_k) E(x_j - x_k) is real up to
    rounding; an imaginary residue or a negative real part beyond
    2^-(p-16) of the term mass means the precision is insufficient.
    """
    a, b = as_mpf(a), as_mpf(b)
    if not b > a:
        raise InvalidParameterError("need b > a")
    n = len(P.coeffs)
    acc = mpc(0)
    mass = mpf(0)
    for j in range(n):
        for k in range(n):
            term = P.coeffs[j] * mp.conj(P.coeffs[k]) * \
                _interval_transform(P.freqs[j] - P.freqs[k], a, b)
            acc += term
            mass += abs(term)
    dust = mp.ldexp(mass if mass > 0 else mpf(1), -(mp.prec - 16))
    if abs(acc.imag) > dust:
        raise PrecisionError(
            f"imaginary residue {decimal_str(abs(acc.imag))} of the L2 "
            f"quadratic form exceeds rounding dust; raise precision")
    val = acc.real
    if val < 0:
        if -val > dust:
            raise PrecisionError(
                f"L2 quadratic form came out {decimal_str(val)} < 0 beyond "
                f"rounding dust; raise precision")
        val = mpf(0)
    return mp.sqrt(val / (b - a))


def lq_norm_quadrature(P: ExpSum, a, b, q):
    """||P||_{L^q(a,b)} by adaptive Gauss-Legendre, for exponents without
    a closed form.  Used as an oracle and for Nikolskii with q not in {2, inf}."""
    a, b = as_mpf(a), as_mpf(b)
    if not b > a:
        raise InvalidParameterError("need b > a")
    q = as_mpf(q)
    if not q > 0:
        raise InvalidParameterError("need q > 0")
    integral = mp.quad(lambda t: abs(evaluate(P, t)) ** q, [a, b])
    return (integral / (b - a)) ** (1 / q)


def discrete_norm(P: ExpSum, N: int):
    """The integer-sample norm (sum_{k=0}^{N} |P(k)|^2)^(1/2).

    For a unit coefficient vector this is ||V_N(x) c||_2.
    """
    if N < 0:
        raise InvalidParameterError("N must be >= 0")
    guard = 16 + max(N, 1).bit_length()
    p = mp.prec
    with mp.workprec(p + guard):
        steps = [mp.expj(x) for x in P.freqs]
        zs = list(P.coeffs)
        total = mpf(0)
        for _ in range(N + 1):
            total += abs(mp.fsum(zs, absolute=False)) ** 2
            zs = [z * st for z, st in zip(zs, steps)]
        val = mp.sqrt(total)
    return +val


def _grid_max(P: ExpSum, a, b, samples: int):
    """max |P| over samples+1 uniform points on [a, b]."""
    h = (as_mpf(b) - as_mpf(a)) / samples
    guard = 16 + samples.bit_length()
    p = mp.prec
    with mp.workprec(p + guard):
        steps = [mp.expj(x * h) for x in P.freqs]
        zs = [c * mp.expj(x * as_mpf(a)) for c, x in zip(P.coeffs, P.freqs)]
        best = mpf(0)
        for _ in range(samples + 1):
            v = abs(mp.fsum(zs, absolute=False))
            if v > best:
                best = v
            zs = [z * st for z, st in zip(zs, steps)]
    return +best


def bernstein_factor(P: ExpSum, a, b, bernstein_c=1):
    """Derivative bound for the [0,1]-rescaled sum:
    bernstein_c * sqrt(108*ell^5 + sum of rescaled frequencies squared)."""
    ell = P.degree
    width = as_mpf(b) - as_mpf(a)
    sq = mp.fsum((x * width) ** 2 for c, x in zip(P.coeffs, P.freqs) if c != 0)
    return as_mpf(bernstein_c) * mp.sqrt(108 * mpf(ell) ** 5 + sq)


def linf_norm_certified(P: ExpSum, a, b, bernstein_c=1,
                        max_samples: int = DEFAULT_MAX_SUP_SAMPLES) -> CertifiedSup:
    """Two-sided sup-norm enclosure over [a, b].

    The grid has at least ceil(B) intervals so the inflation factor
    1/(1 - h*B/2) never exceeds 2.  A degree-one sum has constant
    modulus, so its sup is exact.
    """
    a, b = as_mpf(a), as_mpf(b)
    if not b > a:
        raise InvalidParameterError("need b > a")
    if not as_mpf(bernstein_c) > 0:
        raise InvalidParameterError("bernstein_c must be > 0")
    nz = [(c, x) for c, x in zip(P.coeffs, P.freqs) if c != 0]
    if len(nz) == 0:
        return CertifiedSup(mpf(0), mpf(0), 0, mpf(0))
    if len(nz) == 1:
        v = abs(nz[0][0])
        return CertifiedSup(v, v, 0, mpf(0))
    B = bernstein_factor(P, a, b, bernstein_c)
    samples = max(MIN_SUP_SAMPLES, int(mp.ceil(B)) + 1)
    if samples > max_samples:
        raise ResourceLimitError(
            f"certified sup needs {samples} samples, budget is {max_samples}")
    lower = _grid_max(P, a, b, samples)
    h = mpf(1) / samples
    upper = lower / (1 - h * B / 2)
    return CertifiedSup(lower, upper, samples, B)


def check_turan(P: ExpSum, interval, subinterval, bernstein_c=1,
                max_samples: int = DEFAULT_MAX_SUP_SAMPLES) -> InequalityCheck:
    """sup on I against (4e mu(I)/mu(Omega))^(ell-1) times sup on Omega.

    lhs uses the lower sup estimate and rhs the upper one, so holds=False
    certifies a genuine violation.
    """
    a, b = as_mpf(interval[0]), as_mpf(interval[1])
    w0, w1 = as_mpf(subinterval[0]), as_mpf(subinterval[1])
    if not (b > a and w1 > w0):
        raise InvalidParameterError("intervals must have positive length")
    if w0 < a or w1 > b:
        raise InvalidParameterError("Omega must be contained in I")
    ell = P.degree
    lhs = linf_norm_certified(P, a, b, bernstein_c, max_samples).lower
    omega_sup = linf_norm_certified(P, w0, w1, bernstein_c, max_samples).upper
    factor = (4 * mp.e * (b - a) / (w1 - w0)) ** (ell - 1)
    rhs = factor * omega_sup
    return InequalityCheck(
        name="turan", lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs),
        params={"ell": ell, "interval": (a, b), "subinterval": (w0, w1),
                "factor": factor})


def check_nikolskii(P: ExpSum, p_exp, q_exp, bernstein_c=1,
                    max_samples: int = DEFAULT_MAX_SUP_SAMPLES) -> InequalityCheck:
    """||P||_p <= (pi*ell/2)^(2/q - 2/p) ||P||_q on [0, 1].

    Needs 0 < q <= 2 and q <= p <= inf; p == q is the degenerate equality
    with factor 1.  p = inf uses the certified grid maximum (lower side)
    so a False verdict is sound.
    """
    inf_p = p_exp in ("inf", mp.inf)
    qv = as_mpf(q_exp)
    if not (0 < qv <= 2):
        raise InvalidParameterError("need 0 < q <= 2")
    if not inf_p:
        pv = as_mpf(p_exp)
        if not pv >= qv:
            raise InvalidParameterError("need p >= q")
    ell = P.degree
    zero, one = mpf(0), mpf(1)
    if inf_p:
        lhs = linf_norm_certified(P, zero, one, bernstein_c, max_samples).lower
        inv_p = mpf(0)
    else:
        lhs = l2_norm_exact(P, zero, one) if pv == 2 \
            else lq_norm_quadrature(P, zero, one, pv)
        inv_p = 1 / pv
    rhs_norm = l2_norm_exact(P, zero, one) if qv == 2 \
        else lq_norm_quadrature(P, zero, one, qv)
    factor = (mp.pi * ell / 2) ** (2 / qv - 2 * inv_p)
    rhs = factor * rhs_norm
    return InequalityCheck(
        name="nikolskii", lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs),
        params={"ell": ell, "p": "inf" if inf_p else pv, "q": qv,
                "factor": factor})


def _require_separated(P: ExpSum, delta_sep, wrap: bool):
    dist = wrap_distance if wrap else (lambda x, y: abs(mpf(x) - mpf(y)))
    slack = mpf(2) ** -(mp.prec - 16)
    floor = as_mpf(delta_sep) * (1 - slack)
    for j in range(len(P.freqs)):
        for k in range(j + 1, len(P.freqs)):
            if dist(P.freqs[j], P.freqs[k]) < floor:
                raise InvalidParameterError(
                    f"frequencies {j},{k} closer than the required "
                    f"separation {decimal_str(as_mpf(delta_sep))}")


def check_salem_ratio(P: ExpSum, delta_sep):
    """||P||^2_{L2(0, 4pi/delta)} / ||c||^2, the empirical Salem ratio.

    Frequencies must be pairwise separated by at least delta_sep in the
    wrap-around sense.  Suites record the minimum ratio over instances as
    the empirical constant.
    """
    delta_sep = as_mpf(delta_sep)
    if not delta_sep > 0:
        raise InvalidParameterError("delta_sep must be > 0")
    _require_separated(P, delta_sep, wrap=True)
    c2 = P.coeff_norm_sq()
    if c2 == 0:
        raise DegenerateInputError("all coefficients are zero")
    norm = l2_norm_exact(P, mpf(0), 4 * mp.pi / delta_sep)
    return norm ** 2 / c2


@dataclass(frozen=True)
class RiemannGapReport:
    """Integral-vs-Riemann-sum gap of T = |P(N u)|^2 on [0, 1]."""

    gap: object
    rhs_shape: object          # (ell^5 / N) * ||T||_inf estimate, or None
    t_sup_lower: object        # grid-max lower estimate of ||T||_inf, or None
    l1_norm: object            # integral of T = ||P||^2_{L2(0,N)}
    discrete_mean: object      # (1/N) sum_{k=0}^{N} T(k/N)
    discrete_sq: object        # ||P||^2_{2,N}
    relation_applicable: bool  # gap <= l1_norm / 2
    relation_holds: bool       # discrete_sq >= (N/2) * l1_norm


def _squared_modulus_terms(P: ExpSum, scale):
    """Frequencies and coefficients of T(u) = |P(scale*u)|^2 as an ExpSum.

    Difference frequencies that coincide (equispaced nodes) are merged,
    so the term count never exceeds ell^2 - ell + 1.
    """
    terms = {}
    for j, (cj, xj) in enumerate(zip(P.coeffs, P.freqs)):
        if cj == 0:
            continue
        for k, (ck, xk) in enumerate(zip(P.coeffs, P.freqs)):
            if ck == 0:
                continue
            f = scale * (xj - xk)
            terms[f] = terms.get(f, mpc(0)) + cj * mp.conj(ck)
    return ExpSum(tuple(terms.values()), tuple(terms.keys()))


def riemann_gap(P: ExpSum, N: int, with_sup_shape: bool = True,
                bernstein_c=1,
                max_samples: int = DEFAULT_MAX_SUP_SAMPLES) -> RiemannGapReport:
    """Exact gap |int_0^1 T - (1/N) sum_k T(k/N)| and the paper's shape.

    Both the integral and the samples are exact: the integral by
    closed-form term integration, the samples as |P(k)|^2.  rhs_shape is
    (ell^5/N) times a grid-max (lower) estimate of ||T||_inf, so the
    reported gap/rhs_shape ratio over-estimates the true ratio; skip it
    with with_sup_shape=False when only the norm relation matters.
    """
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    ell = P.degree
    T = _squared_modulus_terms(P, mpf(N))
    l1 = mp.fsum((c * _interval_transform(x, mpf(0), mpf(1))).real
                 for c, x in zip(T.coeffs, T.freqs))
    if l1 < 0:
        l1 = mpf(0)
    disc_sq = discrete_norm(P, N) ** 2
    disc_mean = disc_sq / N
    gap = abs(l1 - disc_mean)
    rhs_shape = None
    t_sup_lower = None
    if with_sup_shape:
        B = bernstein_factor(T, mpf(0), mpf(1), bernstein_c)
        samples = min(max(MIN_SUP_SAMPLES, int(mp.ceil(B)) + 1), max_samples)
        t_sup_lower = _grid_max(T, mpf(0), mpf(1), samples)
        rhs_shape = mpf(ell) ** 5 / N * t_sup_lower
    applicable = bool(gap <= l1 / 2)
    holds = bool(disc_sq >= mpf(N) / 2 * l1)
    return RiemannGapReport(
        gap=gap, rhs_shape=rhs_shape, t_sup_lower=t_sup_lower, l1_norm=l1,
        discrete_mean=disc_mean, discrete_sq=disc_sq,
        relation_applicable=applicable, relation_holds=holds)


def check_cor_turan(P: ExpSum, N: int, delta) -> InequalityCheck:
    """||P||_{L2(0,N)} >= (2/(pi*ell)) (N*delta/(16*pi*e))^(ell-1)
    ||P||_{L2(0, 4pi/delta)}, for delta-separated frequencies and
    N <= 4*pi/delta.  Both sides are exact closed-form L2 norms."""
    delta = as_mpf(delta)
    if not delta > 0:
        raise InvalidParameterError("delta must be > 0")
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    if N > 4 * mp.pi / delta:
        raise InvalidParameterError("window violation: need N <= 4*pi/delta")
    _require_separated(P, delta, wrap=True)
    ell = P.degree
    lhs = l2_norm_exact(P, mpf(0), mpf(N))
    big = l2_norm_exact(P, mpf(0), 4 * mp.pi / delta)
    factor = 2 / (mp.pi * ell) * (N * delta / (16 * mp.pi * mp.e)) ** (ell - 1)
    rhs = factor * big
    return InequalityCheck(
        name="cor-turan", lhs=lhs, rhs=rhs, holds=bool(lhs >= rhs),
        params={"ell": ell, "N": N, "delta": delta, "factor": factor})
