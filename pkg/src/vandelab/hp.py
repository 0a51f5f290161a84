"""Arbitrary-precision scalar layer and the working-precision policy.

All real and complex scalars in this package are mpmath values (``mpf`` /
``mpc``).  mpmath rounds basic arithmetic correctly and elementary
functions faithfully at the ambient binary precision, which satisfies the
scalar contract here; the gmpy backend makes this fast enough for desk
experiments.

Why a precision policy?
-----------------------
The spectra this laboratory computes collapse like
``sigma_min ~ sqrt(N) * (N*delta)^(ell-1)``, and spectral work routes
through the Gram matrix whose smallest eigenvalue is the *square* of that.
So the number of significant bits needed grows linearly in ``ell`` and in
``log2(1/(N*delta))``, with a factor 2 for the squaring.  The policy sizes
the working precision as

    max(floor_bits, ceil(2*(ell-1)*log2(32*pi*e/(N*delta))) + 32*ell + guard_bits)

which keeps the smallest eigenvalue comfortably above the rounding floor
for every instance in the desk grids (ell <= 12, delta >= 1e-25).

Values are plain immutable mpmath numbers and safe to share; this module
keeps no mutable state of its own.  Computations that need a specific
precision run inside ``with mp.workprec(bits):`` blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .errors import InvalidParameterError

DEFAULT_FLOOR_BITS = 192
DEFAULT_GUARD_BITS = 64

#: bits of precision at which the policy formula itself is evaluated;
#: only the integer ceiling matters, 80 bits is far more than enough.
_POLICY_EVAL_BITS = 80

LOG10_2 = 0.30102999566398119521


@dataclass(frozen=True)
class PrecisionPolicy:
    """Sizing rule for working precision.

    floor_bits is never undercut; guard_bits absorb rounding accumulated
    by matrix assembly and the eigensolver sweeps.
    """

    floor_bits: int = DEFAULT_FLOOR_BITS
    guard_bits: int = DEFAULT_GUARD_BITS

    def __post_init__(self):
        if self.floor_bits < 64:
            raise InvalidParameterError("floor_bits must be >= 64")
        if self.guard_bits < 0:
            raise InvalidParameterError("guard_bits must be >= 0")

    def required_bits(self, ell: int, N: int, delta) -> int:
        """Working precision for a spectrum with cluster size ``ell``,
        frequency cutoff ``N`` and minimal separation ``delta``."""
        if ell < 1:
            raise InvalidParameterError(f"ell must be >= 1, got {ell}")
        if N < 1:
            raise InvalidParameterError(f"N must be >= 1, got {N}")
        delta = mpf(delta)
        if not delta > 0:
            raise InvalidParameterError(f"delta must be > 0, got {delta}")
        with mp.workprec(_POLICY_EVAL_BITS):
            growth = mp.log(32 * mp.pi * mp.e / (N * delta), 2)
            expr = int(mp.ceil(2 * (ell - 1) * growth)) + 32 * ell + self.guard_bits
        return max(self.floor_bits, expr)


DEFAULT_POLICY = PrecisionPolicy()


def required_bits(ell: int, N: int, delta, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Module-level shorthand for ``policy.required_bits``."""
    return policy.required_bits(ell, N, delta)


def as_mpf(x):
    """Coerce to mpf without re-rounding a value that already is one.

    ``mpf(x)`` re-rounds at the ambient precision even when x is an mpf,
    which silently destroys high-precision values created under a wider
    workprec.  Every coercion of possibly-high-precision input must go
    through here.
    """
    if isinstance(x, mpf):
        return x
    return mpf(x)


def as_mpc(x):
    """Like :func:`as_mpf` for complex scalars; mpf passes through too,
    since mpmath arithmetic mixes mpf and mpc freely."""
    if isinstance(x, (mpc, mpf)):
        return x
    return mpc(x)


def parse_decimal(text, bits: int):
    """Parse a decimal string into an mpf, correctly rounded at ``bits``.

    The string goes straight to mpmath's decimal reader, never through a
    binary64 float, so e.g. "1e-25" lands on the closest ``bits``-bit
    value of 10^-25.
    """
    if bits < 64:
        raise InvalidParameterError(f"precision must be >= 64 bits, got {bits}")
    if isinstance(text, float):
        # refuse silent binary64 round-trips for strings the caller had
        raise InvalidParameterError("pass decimal values as str or int, not float")
    with mp.workprec(bits):
        try:
            return mpf(text)
        except (ValueError, TypeError) as exc:
            raise InvalidParameterError(f"not a decimal number: {text!r}") from exc


def decimal_digits(bits: int) -> int:
    """Significant decimal digits carried by a ``bits``-bit mantissa."""
    return max(3, int(bits * LOG10_2))


def decimal_str(x, bits: int | None = None) -> str:
    """Serialize an mpf to a decimal string with precision-matched digits.

    Deterministic: the same value and bit count always produce the same
    string, which is what the CSV/JSON reproducibility contract needs.
    """
    p = bits if bits is not None else mp.prec
    with mp.workprec(p):
        return mp.nstr(mpf(x), decimal_digits(p))
