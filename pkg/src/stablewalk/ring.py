"""Finite commutative coefficient rings: prime fields F_p and residue rings Z_m.

Ring elements are canonical integer residues in ``range(modulus)``.  A
:class:`RingSpec` carries the modular arithmetic plus the regular-element
(non-zero-divisor) predicates used to draw walk colours.  Everything here is
immutable and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

from .errors import (
    InsufficientRegularElements,
    ModulusTooSmall,
    NonPrimeModulus,
    TooLarge,
)

KIND_FIELD = "F"
KIND_RESIDUE = "Z"

MAX_MODULUS = 2**32  # all products must fit double-width machine words

_MR_BASES = (2, 7, 61)  # deterministic Miller-Rabin witnesses below 4,759,123,141


def is_prime(n: int) -> bool:
    """Deterministic primality test for n < 2**32."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (fine for n <= 2**32)."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def euler_phi(n: int) -> int:
    phi = n
    for p in factorize(n):
        phi -= phi // p
    return phi


@dataclass(frozen=True)
class RingSpec:
    """A validated finite commutative ring Z_m or F_p.

    ``kind`` is ``"Z"`` (residue ring) or ``"F"`` (prime field); the same
    letter is used in the textual ring tag ``Z <m>`` / ``F <p>``.
    """

    kind: str
    modulus: int

    # -- arithmetic on canonical residues ------------------------------------

    def canon(self, a: int) -> int:
        return a % self.modulus

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def neg(self, a: int) -> int:
        return -a % self.modulus

    def inv(self, a: int) -> int:
        """Multiplicative inverse of a unit; ValueError if a is not a unit."""
        return pow(a, -1, self.modulus)

    # -- structure -----------------------------------------------------------

    def is_field(self) -> bool:
        return self.kind == KIND_FIELD

    def is_regular(self, a: int) -> bool:
        """True iff a is nonzero and not a zero divisor (gcd(a, m) == 1)."""
        return math.gcd(a % self.modulus, self.modulus) == 1

    def regular_count(self) -> int:
        if self.kind == KIND_FIELD:
            return self.modulus - 1
        return euler_phi(self.modulus)

    def count_regular_check(self) -> bool:
        """True iff the ring has at least 3 regular elements."""
        return self.regular_count() >= 3

    def elements(self) -> range:
        return range(self.modulus)

    # -- seeded sampling -----------------------------------------------------

    def sample(self, rng: Random) -> int:
        return rng.randrange(self.modulus)

    def sample_regular(self, rng: Random) -> int:
        """Uniform draw from the regular elements; needs at least 3 of them."""
        if not self.count_regular_check():
            raise InsufficientRegularElements(
                f"{self.tag()} has only {self.regular_count()} regular elements; need >= 3"
            )
        while True:
            a = rng.randrange(1, self.modulus)
            if self.is_regular(a):
                return a

    def tag(self) -> str:
        return f"{self.kind} {self.modulus}"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"F_{self.modulus}" if self.kind == KIND_FIELD else f"Z_{self.modulus}"


_KIND_ALIASES = {
    "f": KIND_FIELD,
    "prime-field": KIND_FIELD,
    "field": KIND_FIELD,
    "z": KIND_RESIDUE,
    "residue-ring": KIND_RESIDUE,
    "residue": KIND_RESIDUE,
}


def make_ring(kind: str, modulus: int) -> RingSpec:
    """Validate and build a ring spec.

    Residue rings accept any modulus in [2, 2**32]; prime fields additionally
    require the modulus to pass a deterministic primality check.
    """
    k = _KIND_ALIASES.get(kind.lower())
    if k is None:
        raise ValueError(f"unknown ring kind {kind!r}")
    if modulus < 2:
        raise ModulusTooSmall(f"modulus must be >= 2, got {modulus}")
    if modulus > MAX_MODULUS:
        raise TooLarge(f"modulus must be <= 2**32, got {modulus}")
    if k == KIND_FIELD and not is_prime(modulus):
        raise NonPrimeModulus(f"{modulus} is not prime")
    return RingSpec(k, modulus)


def parse_ring(text: str) -> RingSpec:
    """Parse a ring tag like ``Z 256``, ``Z:256`` or ``F 127``."""
    cleaned = text.strip().replace(":", " ")
    parts = cleaned.split()
    if len(parts) != 2:
        raise ValueError(f"malformed ring tag {text!r}; expected 'Z <m>' or 'F <p>'")
    kind, mod_text = parts
    try:
        modulus = int(mod_text, 10)
    except ValueError:
        raise ValueError(f"malformed ring modulus {mod_text!r}") from None
    return make_ring(kind, modulus)
