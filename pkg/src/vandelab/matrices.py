"""Assembly of the Vandermonde, Gram, prolate, and shifted matrices.

Spectral work downstream routes through the s x s Gram matrix with
closed-form Dirichlet-kernel entries rather than the tall (N+1) x s
factor: the node counts here are small (s <= 40) while N reaches a few
hundred, and a closed-form entry carries no accumulated summation error.
The price is that the Gram eigenvalues are the squared singular values,
which the precision policy already budgets for.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .errors import ConfigParseError, DegenerateInputError, InvalidParameterError
from .geometry import LINE, PERIODIC, NodeSet
from .hp import decimal_str, parse_decimal

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HPMatrix:
    """Dense matrix of mpmath scalars with a precision tag.

    ``hermitian`` is set only by constructors that enforce
    entry(j,k) == conj(entry(k,j)) structurally.
    """

    entries: tuple
    rows: int
    cols: int
    precision_bits: int
    hermitian: bool = False

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    def frobenius_norm(self):
        with mp.workprec(self.precision_bits):
            return mp.sqrt(mp.fsum(abs(x) ** 2 for row in self.entries for x in row))

    def to_json_dict(self) -> dict:
        bits = self.precision_bits
        flat = []
        for row in self.entries:
            for x in row:
                z = mpc(x)
                flat.append([decimal_str(z.real, bits), decimal_str(z.imag, bits)])
        return {
            "rows": self.rows,
            "cols": self.cols,
            "precision_bits": bits,
            "hermitian": self.hermitian,
            "entries": flat,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "HPMatrix":
        for key in ("rows", "cols", "precision_bits", "entries"):
            if key not in obj:
                raise ConfigParseError(f"matrix dump missing key {key!r}", key=key)
        rows, cols = int(obj["rows"]), int(obj["cols"])
        bits = int(obj["precision_bits"])
        flat = obj["entries"]
        if len(flat) != rows * cols:
            raise ConfigParseError(
                f"matrix dump has {len(flat)} entries, expected {rows * cols}",
                key="entries")
        with mp.workprec(bits):
            ent = tuple(
                tuple(
                    mpc(parse_decimal(flat[i * cols + j][0], bits),
                        parse_decimal(flat[i * cols + j][1], bits))
                    for j in range(cols))
                for i in range(rows))
        return cls(ent, rows, cols, bits, bool(obj.get("hermitian", False)))


@dataclass(frozen=True)
class VandermondeSpec:
    """Frequency cutoff N plus the periodic node set."""

    N: int
    nodes: NodeSet

    def __post_init__(self):
        if self.nodes.domain != PERIODIC:
            raise InvalidParameterError("Vandermonde nodes must be periodic")
        if self.N < self.nodes.count - 1:
            raise InvalidParameterError(
                f"need N >= s-1, got N={self.N}, s={self.nodes.count}")


def build_vandermonde(spec: VandermondeSpec, bits: int | None = None) -> HPMatrix:
    """The (N+1) x s matrix with entry(k, j) = e^(i k x_j), k = 0..N."""
    p = bits if bits is not None else mp.prec
    N, xs = spec.N, spec.nodes.nodes
    with mp.workprec(p + 16 + max(N, 1).bit_length()):
        bases = [mp.expj(x) for x in xs]
        cols = []
        for z in bases:
            col = [mpc(1)]
            for _ in range(N):
                col.append(col[-1] * z)
            cols.append(col)
        with mp.workprec(p):
            ent = tuple(tuple(+cols[j][k] for j in range(len(xs)))
                        for k in range(N + 1))
    return HPMatrix(ent, N + 1, len(xs), p, hermitian=False)


def _dirichlet_sum(delta, N: int):
    """sum_{k=0}^{N} e^(i k delta) in closed form.

    Algebraically (e^{i(N+1)delta} - 1)/(e^{i delta} - 1); evaluated as
    e^{i N delta / 2} * sin((N+1) delta / 2) / sin(delta / 2), the same
    quantity without the subtractive cancellation at small delta.
    """
    if delta == 0:
        return mpc(N + 1)
    half = delta / 2
    return mp.expj(N * half) * mp.sin((N + 1) * half) / mp.sin(half)


def build_gram_closed_form(spec: VandermondeSpec, bits: int | None = None) -> HPMatrix:
    """The s x s Hermitian Gram matrix V^H V with closed-form entries.

    entry(j, m) = sum_k e^(i k (x_m - x_j)); the diagonal is exactly N+1.
    Entries are computed with guard bits sized to the argument reduction
    of sin at phase ~ N*pi, then rounded to the target precision.
    """
    p = bits if bits is not None else mp.prec
    N, xs = spec.N, spec.nodes.nodes
    s = len(xs)
    guard = 32 + max(N, 1).bit_length()
    rows = [[None] * s for _ in range(s)]
    with mp.workprec(p + guard):
        for j in range(s):
            rows[j][j] = mpf(N + 1)
            for m in range(j + 1, s):
                val = _dirichlet_sum(xs[m] - xs[j], N)
                with mp.workprec(p):
                    val = +val
                rows[j][m] = val
                rows[m][j] = mp.conj(val)
    return HPMatrix(tuple(tuple(r) for r in rows), s, s, p, hermitian=True)


def build_prolate(nodes: NodeSet, bits: int | None = None) -> HPMatrix:
    """The s x s generalized prolate matrix of sinc inner products.

    entry(j, k) = sin(x_j - x_k)/(x_j - x_k) off the diagonal and 1 on it,
    the closed form of (1/2) * integral_{-1}^{1} e^(i w (x_j - x_k)) dw.
    Real symmetric and positive definite for distinct nodes.
    """
    if nodes.domain != LINE:
        raise InvalidParameterError("prolate matrix expects line-domain nodes")
    p = bits if bits is not None else mp.prec
    xs = nodes.nodes
    s = len(xs)
    tiny = mpf(2) ** -(p // 2)
    rows = [[None] * s for _ in range(s)]
    with mp.workprec(p):
        for j in range(s):
            rows[j][j] = mpf(1)
            for k in range(j + 1, s):
                d = xs[j] - xs[k]
                if d == 0:
                    raise DegenerateInputError(f"nodes {j} and {k} coincide")
                if abs(d) < tiny:
                    log.warning(
                        "prolate nodes %d,%d separated by %s < 2^-%d; "
                        "consider raising precision", j, k,
                        decimal_str(abs(d), p), p // 2)
                val = mp.sin(d) / d
                rows[j][k] = val
                rows[k][j] = val
    return HPMatrix(tuple(tuple(r) for r in rows), s, s, p, hermitian=True)


def build_shifted_vandermonde(nodes: NodeSet, N: int, bits: int | None = None) -> HPMatrix:
    """The (2N+1) x s matrix with entries e^(i k x_j / N)/sqrt(2N), k = -N..N.

    Requires every x_j/N to lie in (-pi, pi].
    """
    if nodes.domain != LINE:
        raise InvalidParameterError("shifted Vandermonde expects line-domain nodes")
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    p = bits if bits is not None else mp.prec
    with mp.workprec(p + 16 + (2 * N).bit_length()):
        xis = []
        for x in nodes.nodes:
            xi = x / N
            if not (-mp.pi < xi <= mp.pi):
                raise InvalidParameterError(
                    f"scaled node {decimal_str(xi)} outside (-pi, pi]")
            xis.append(xi)
        scale = 1 / mp.sqrt(2 * N)
        cols = []
        for xi in xis:
            z = mp.expj(xi)
            col = [scale * mp.expj(-N * xi)]
            for _ in range(2 * N):
                col.append(col[-1] * z)
            cols.append(col)
        with mp.workprec(p):
            ent = tuple(tuple(+cols[j][k] for j in range(len(xis)))
                        for k in range(2 * N + 1))
    return HPMatrix(ent, 2 * N + 1, len(nodes.nodes), p, hermitian=False)
