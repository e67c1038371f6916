"""Exponential sums over the quadric x1^2 + x2^2 - x3^2 - x4^2 = 0 mod q,
and linear phase sums, with closed forms at odd primes, a product rule over
coprime factors, and a brute-force enumeration oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CostGuardError
from .exactreal import factorize, is_prime

BRUTE_GUARD = 36


@dataclass(frozen=True)
class ExpSumInput:
    b: tuple[int, int, int, int]
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("modulus must be >= 1")
        if len(self.b) != 4:
            raise ValueError("b must have four components")


@dataclass
class ComplexValue:
    re: float
    im: float
    err: float
    method: str = ""

    def as_integer(self) -> int:
        """Round to the provably real integer value; errors if ambiguous."""
        if abs(self.im) > max(self.err, 1e-6):
            raise ValueError("value is not certifiably real")
        r = round(self.re)
        if abs(self.re - r) > max(self.err, 1e-6):
            raise ValueError("value is not certifiably integral")
        return int(r)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)


def _normalize_b(b, q: int) -> tuple[int, int, int, int]:
    b = tuple(int(v) % q for v in b)
    if len(b) != 4:
        raise ValueError("b must have four components")
    return b


def quad_sum_brute(b, q: int) -> ComplexValue:
    """Literal enumeration of all q^4 points; the definition as an oracle."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q > BRUTE_GUARD:
        raise CostGuardError(f"brute enumeration is capped at q <= {BRUTE_GUARD}")
    b = _normalize_b(b, q)
    x = np.arange(q, dtype=np.int64)
    sq = (x * x) % q
    quad = (
        sq[:, None, None, None]
        + sq[None, :, None, None]
        - sq[None, None, :, None]
        - sq[None, None, None, :]
    ) % q
    mask = quad == 0
    n_terms = int(np.count_nonzero(mask))
    if not any(b):
        return ComplexValue(float(n_terms), 0.0, 0.0, "brute")
    phase = (
        b[0] * x[:, None, None, None]
        + b[1] * x[None, :, None, None]
        + b[2] * x[None, None, :, None]
        + b[3] * x[None, None, None, :]
    ) % q
    z = np.exp(2j * np.pi * phase[mask] / q)
    total = complex(z.sum())
    err = 8 * np.finfo(float).eps * n_terms
    return ComplexValue(total.real, total.imag, err, "brute")


def quad_sum_prime(b, p: int) -> int:
    """Closed form at an odd prime: three cases by divisibility."""
    if p == 2 or not is_prime(p):
        raise ValueError("quad_sum_prime needs an odd prime")
    b = _normalize_b(b, p)
    if not any(b):
        return p ** 3 + p * p - p
    if (b[0] * b[0] + b[1] * b[1] - b[2] * b[2] - b[3] * b[3]) % p == 0:
        return p * p - p
    return -p


def quad_sum(b, q: int) -> ComplexValue:
    """Product over coprime prime-power factors; closed form at odd primes,
    brute force for the 2-part and higher prime powers (no closed form is
    available there), with the enumeration guard applied per factor."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q == 1:
        return ComplexValue(1.0, 0.0, 0.0, "product")
    re, im, err = 1.0, 0.0, 0.0
    exact = 1
    exact_only = True
    for p, e in sorted(factorize(q).items()):
        f = p ** e
        if p != 2 and e == 1:
            part = ComplexValue(float(quad_sum_prime(b, p)), 0.0, 0.0, "closed-form")
        else:
            part = quad_sum_brute(b, f)
        if part.err == 0 and part.im == 0 and exact_only:
            exact *= int(round(part.re))
        else:
            exact_only = False
        new_re = re * part.re - im * part.im
        new_im = re * part.im + im * part.re
        mag_old = math.hypot(re, im)
        mag_new = math.hypot(part.re, part.im)
        err = err * mag_new + part.err * mag_old + err * part.err
        re, im = new_re, new_im
    if exact_only:
        return ComplexValue(float(exact), 0.0, 0.0, "product")
    return ComplexValue(re, im, err, "product")


def linear_sum(b: int, n: int, q: int) -> ComplexValue:
    """Geometric sum of phases -b*x/q for x = 1..n, evaluated in closed form.

    Full periods contribute nothing for b != 0 mod q, so n is reduced mod q
    first; the remainder is summed by the stable sine-ratio product.
    """
    if n < 1 or q < 1:
        raise ValueError("need n >= 1 and q >= 1")
    b %= q
    if b == 0:
        return ComplexValue(float(n), 0.0, 0.0, "closed-form")
    n_red = n % q
    if n_red == 0:
        return ComplexValue(0.0, 0.0, 0.0, "closed-form")
    if 2 * b == q:
        # alternating signs: -1 for odd prefix length, 0 for even
        val = -1.0 if n_red % 2 else 0.0
        return ComplexValue(val, 0.0, 0.0, "closed-form")
    theta = -2 * math.pi * b / q
    mag = math.sin(n_red * theta / 2) / math.sin(theta / 2)
    z = cmath.exp(1j * theta * (n_red + 1) / 2) * mag
    err = 16 * np.finfo(float).eps * (abs(mag) + n_red)
    return ComplexValue(z.real, z.imag, err, "closed-form")


def linear_sum_bound(b: int, n: int, q: int) -> float:
    """min(n, 1/(2||b/q||)) + 1, the magnitude envelope used in checks."""
    b %= q
    if b == 0:
        return float(n) + 1
    f = Fraction(b, q)
    norm = min(f, 1 - f)
    return min(float(n), 1 / (2 * float(norm))) + 1
