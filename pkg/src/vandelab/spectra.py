"""Arbitrary-precision Hermitian eigensolver and derived singular values.

The solver is a cyclic-by-rows Jacobi iteration on the full matrix.
Jacobi is the right tool here for two reasons: it is trivial to run at
any mpmath precision, and on the graded positive definite Gram matrices
this laboratory produces it computes even the smallest eigenvalues to
high *relative* accuracy, which QR-type methods do not guarantee.  The
spectra of interest span hundreds of orders of magnitude, so that
property is load-bearing.

Each rotation eliminates one off-diagonal pair (p, q).  For a Hermitian
pair with a_pq = |a_pq| e^(i phi), the 2x2 block factors as
D B D^H with D = diag(1, e^(-i phi)) and B real symmetric, so the
classical real Jacobi angle applied with the phase folded in zeroes the
entry exactly.  Convergence is declared when the off-diagonal Frobenius
norm falls below 2^-(p-8) times the matrix Frobenius norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import (
    ConvergenceError,
    InvalidParameterError,
    PrecisionError,
)
from .geometry import LINE, ClusterSpec, NodeSet, scale_to_circle, validate_config
from .hp import DEFAULT_POLICY, PrecisionPolicy, decimal_str
from .matrices import HPMatrix, VandermondeSpec, build_gram_closed_form

MAX_EIGEN_DIM = 256


@dataclass(frozen=True)
class SpectrumResult:
    """Sorted spectrum plus solver diagnostics.

    values are non-increasing; kind is "singular" or "eigen".
    offdiag_residual is the final off-diagonal Frobenius norm of the
    Jacobi iteration and sweeps_used the number of full sweeps it took.
    clamped counts eigenvalues of tiny negative rounding dust that were
    clamped to zero before taking square roots.
    """

    values: tuple
    kind: str
    precision_bits: int
    offdiag_residual: object
    sweeps_used: int
    clamped: int = 0

    @property
    def min_value(self):
        return self.values[-1]

    @property
    def max_value(self):
        return self.values[0]

    def to_json_dict(self) -> dict:
        bits = self.precision_bits
        return {
            "kind": self.kind,
            "precision_bits": bits,
            "values": [decimal_str(v, bits) for v in self.values],
            "offdiag_residual": decimal_str(self.offdiag_residual, bits),
            "sweeps_used": self.sweeps_used,
            "clamped": self.clamped,
        }


@dataclass(frozen=True)
class NormalizedMinSV:
    """sigma_min scaled by sqrt(N) * (N*delta)^(ell-1), with its log10."""

    lambda_value: object
    log10_lambda: object
    N: int
    delta: object
    ell: int


def _offdiag_frobenius(a, n):
    return mp.sqrt(mp.fsum(abs(a[i][j]) ** 2
                           for i in range(n) for j in range(n) if i != j))


def hermitian_eigenvalues(A: HPMatrix, max_sweeps: int | None = None) -> SpectrumResult:
    """All eigenvalues of a Hermitian HPMatrix by cyclic Jacobi rotations.

    Values come back sorted non-increasing, ties broken by the original
    diagonal index.  Raises ConvergenceError (carrying the final
    off-diagonal residual) if the sweep budget is exhausted.
    """
    if not A.hermitian:
        raise InvalidParameterError("matrix is not tagged hermitian")
    n = A.rows
    if n > MAX_EIGEN_DIM:
        raise InvalidParameterError(f"dimension {n} exceeds {MAX_EIGEN_DIM}")
    p = A.precision_bits
    if max_sweeps is None:
        max_sweeps = 15 + 2 * max(1, math.ceil(math.log2(n))) if n > 1 else 1

    with mp.workprec(p):
        a = [[A.entries[i][j] for j in range(n)] for i in range(n)]
        norm_f = mp.sqrt(mp.fsum(abs(a[i][j]) ** 2
                                 for i in range(n) for j in range(n)))
        if norm_f == 0 or n == 1:
            vals = sorted((mpf(a[i][i].real if hasattr(a[i][i], "real") else a[i][i])
                           for i in range(n)), reverse=True)
            return SpectrumResult(tuple(vals), "eigen", p, mpf(0), 0)

        threshold = mp.ldexp(norm_f, -(p - 8))
        # rotations on entries this far below the matrix scale only churn
        # rounding noise; skip them
        rotation_floor = mp.ldexp(norm_f, -(p + 4))
        one = mpf(1)
        sweeps = 0
        off = _offdiag_frobenius(a, n)
        while off > threshold and sweeps < max_sweeps:
            sweeps += 1
            for pi in range(n - 1):
                for qi in range(pi + 1, n):
                    apq = a[pi][qi]
                    h = abs(apq)
                    if h <= rotation_floor:
                        continue
                    app = a[pi][pi].real
                    aqq = a[qi][qi].real
                    phase = apq / h
                    phase_c = mp.conj(phase)
                    tau = (aqq - app) / (2 * h)
                    if tau >= 0:
                        t = one / (tau + mp.sqrt(1 + tau * tau))
                    else:
                        t = -one / (-tau + mp.sqrt(1 + tau * tau))
                    c = one / mp.sqrt(1 + t * t)
                    s = t * c
                    s_ph = s * phase
                    s_phc = s * phase_c
                    c_phc = c * phase_c
                    c_ph = c * phase
                    for i in range(n):
                        aip = a[i][pi]
                        aiq = a[i][qi]
                        a[i][pi] = c * aip - s_phc * aiq
                        a[i][qi] = s * aip + c_phc * aiq
                    for i in range(n):
                        api = a[pi][i]
                        aqi = a[qi][i]
                        a[pi][i] = c * api - s_ph * aqi
                        a[qi][i] = s * api + c_ph * aqi
                    # the rotation annihilates (p, q) exactly; write the
                    # exact zeros and strip rounding dust off the pair
                    a[pi][qi] = mpf(0)
                    a[qi][pi] = mpf(0)
                    a[pi][pi] = mpf(a[pi][pi].real)
                    a[qi][qi] = mpf(a[qi][qi].real)
            off = _offdiag_frobenius(a, n)
        if off > threshold:
            raise ConvergenceError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps "
                f"(residual {decimal_str(off, p)})",
                residual=off, sweeps=sweeps)
        diag = [(mpf(a[i][i].real), i) for i in range(n)]
        diag.sort(key=lambda vi: (-vi[0], vi[1]))
        return SpectrumResult(tuple(v for v, _ in diag), "eigen", p, off, sweeps)


def _sqrt_spectrum(eig: SpectrumResult, norm_f) -> SpectrumResult:
    """Singular values from Gram eigenvalues, clamping rounding dust.

    Eigenvalues in (-2^-(p-16) * ||A||_F, 0) are set to zero; anything
    more negative means the working precision was too small for the
    instance and raises PrecisionError.
    """
    p = eig.precision_bits
    with mp.workprec(p):
        dust = mp.ldexp(norm_f, -(p - 16))
        vals = []
        clamped = 0
        for lam in eig.values:
            if lam < 0:
                if -lam < dust:
                    lam = mpf(0)
                    clamped += 1
                else:
                    raise PrecisionError(
                        f"Gram eigenvalue {decimal_str(lam, p)} is negative "
                        f"beyond rounding dust at {p} bits; raise precision")
            vals.append(mp.sqrt(lam))
    return SpectrumResult(tuple(vals), "singular", p,
                          eig.offdiag_residual, eig.sweeps_used, clamped)


def singular_values(spec: VandermondeSpec,
                    cluster: ClusterSpec | None = None,
                    bits: int | None = None,
                    policy: PrecisionPolicy = DEFAULT_POLICY) -> SpectrumResult:
    """Singular values of the Vandermonde matrix via its closed-form Gram.

    Working precision is ``bits`` when given, otherwise sized by the
    policy from the cluster parameters, otherwise the policy floor.
    """
    if bits is None:
        if cluster is not None:
            bits = policy.required_bits(cluster.ell, spec.N, cluster.delta)
        else:
            bits = policy.floor_bits
    gram = build_gram_closed_form(spec, bits)
    eig = hermitian_eigenvalues(gram)
    return _sqrt_spectrum(eig, gram.frobenius_norm())


def normalized_min_sv(spec: VandermondeSpec, cluster: ClusterSpec,
                      bits: int | None = None,
                      policy: PrecisionPolicy = DEFAULT_POLICY) -> NormalizedMinSV:
    """sigma_min / (sqrt(N) (N delta)^(ell-1)) for a validated configuration."""
    validate_config(spec.nodes, cluster)
    result = singular_values(spec, cluster, bits, policy)
    p = result.precision_bits
    with mp.workprec(p):
        scale = mp.sqrt(spec.N) * (spec.N * cluster.delta) ** (cluster.ell - 1)
        lam = result.min_value / scale
        log10lam = mp.log10(lam) if lam > 0 else mpf("-inf")
    return NormalizedMinSV(lam, log10lam, spec.N, cluster.delta, cluster.ell)


def prolate_limit_check(nodes: NodeSet, N_list,
                        bits: int | None = None,
                        policy: PrecisionPolicy = DEFAULT_POLICY) -> list:
    """Gap between sigma^2_min of the shifted matrix and lambda_min(G).

    For each N, sigma_min of the shifted normalized matrix equals
    sigma_min(V_2N(x/N)) / sqrt(2N), so its square is computed from the
    closed-form Gram of V_2N at the scaled nodes.  Returns a list of
    (N, gap) pairs in the order given.
    """
    from .matrices import build_prolate

    if nodes.domain != LINE:
        raise InvalidParameterError("prolate limit check expects line nodes")
    if any(N < 1 for N in N_list):
        raise InvalidParameterError("every N must be >= 1")
    s = nodes.count
    with mp.workprec(policy.floor_bits):
        seps = [abs(a - b) for i, a in enumerate(nodes.nodes)
                for b in nodes.nodes[i + 1:]]
        dmin = min(seps) if seps else mpf(1)
    if bits is None:
        bits = policy.required_bits(s, 2 * max(N_list), dmin / max(N_list))
    G = build_prolate(nodes, bits)
    lam_g = hermitian_eigenvalues(G).min_value
    out = []
    for N in N_list:
        with mp.workprec(bits):
            scaled = scale_to_circle(nodes, N)
        gram = build_gram_closed_form(VandermondeSpec(2 * N, scaled), bits)
        lam = hermitian_eigenvalues(gram).min_value
        with mp.workprec(bits):
            sig2_tilde = lam / (2 * N)
            gap = abs(sig2_tilde - lam_g)
        out.append((N, gap))
    return out
