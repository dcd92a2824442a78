"""Symbolic Diffie-Hellman on cubic walk groups, and the public-rule cipher.

Alice owns a walk ``g``, a conjugating walk ``h`` and an affine bijection
``tau``; the published base is the cubic map of ``h^-1 g h`` conjugated by
``tau``.  Powers of the base telescope, so Alice can raise it by repeating
the walk (linear in the exponent) while Bob must power the published
polynomial map symbolically.  Both collision routes must agree formally; the
shared secret is the collision map evaluated at an agreed public vector.

The public-key rule composes an affine input mix T1 (first-row form, every
row-1 entry nonzero), a point walk on the incidence graph of K^n, and an
affine output mix T2 (identity by default): y = T2(walk(T1(x))).  Every
multiplication inside a point walk is by x_1 plus a constant, so the walk
map is quadratic and cubic in x_1 alone; mixing the input spreads those
powers over all variable pairs and pushes the published map toward the full
cubic monomial budget.  Decryption undoes T2, retraces the walk backwards
with negated colours, then undoes T1.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from random import Random

from . import _kernel
from .errors import CollisionMismatch, StabilityViolation
from .flags import ZWalk, sample_zwalk, zwalk_symbolic
from .graph import (
    LINE,
    POINT,
    Vertex,
    point_walk_symbolic,
    solve_line_through_point,
    solve_point_on_line,
)
from .multipoly import AffineMap, PolyMap
from .ring import RingSpec


@dataclass(frozen=True)
class PrivateSeed:
    """Alice's secret: walks in the flag group of D(dimension-1, K) plus tau."""

    dimension: int
    ring: RingSpec
    g_walk: ZWalk
    h_walk: ZWalk
    tau: AffineMap

    def __post_init__(self):
        if self.dimension < 3:
            raise ValueError("exchange dimension must be >= 3")
        if len(self.g_walk) < 1:
            raise ValueError("the base walk must have length >= 1")
        if self.tau.dim != self.dimension:
            raise ValueError("tau must act on K^dimension")


def make_private_seed(
    dimension: int,
    ring: RingSpec,
    rng: Random,
    g_length: int = 2,
    h_length: int = 1,
    tau_mixing: int | None = 2,
) -> PrivateSeed:
    """Sample a seeded secret; ``tau_mixing`` bounds the first-row density."""
    g_walk = sample_zwalk(ring, g_length, rng)
    h_walk = sample_zwalk(ring, h_length, rng) if h_length else ZWalk(())
    tau = AffineMap.sample_first_row(ring, dimension, rng, nonzero=tau_mixing)
    return PrivateSeed(dimension, ring, g_walk, h_walk, tau)


def base_walk(secret: PrivateSeed) -> ZWalk:
    """The conjugated walk h^-1 g h (applied left to right)."""
    if len(secret.h_walk) == 0:
        return secret.g_walk
    return secret.h_walk.inverse() + secret.g_walk + secret.h_walk


def conjugate_by(tau: AffineMap, inner: PolyMap) -> PolyMap:
    """tau o inner o tau^-1 as maps: x -> tau(inner(tau^-1 x))."""
    return tau.to_map().compose(inner.compose(tau.invert().to_map()))


def make_base(secret: PrivateSeed) -> PolyMap:
    """The published cubic base tau^-1 h^-1 g h tau (group order, left to right)."""
    walk_map = zwalk_symbolic(secret.dimension - 1, secret.ring, base_walk(secret))
    return conjugate_by(secret.tau, walk_map)


def alice_power(secret: PrivateSeed, k: int) -> PolyMap:
    """base^k via the walk repeated k times, conjugated once; linear in k."""
    if k < 1:
        raise ValueError("exponent must be >= 1")
    walk_map = zwalk_symbolic(
        secret.dimension - 1, secret.ring, base_walk(secret).repeat(k)
    )
    return conjugate_by(secret.tau, walk_map)


def bob_power(base: PolyMap, k: int) -> PolyMap:
    """base^k by square-and-multiply over the published map.

    Every intermediate is collected and must stay cubic; an excursion above
    degree 3 raises StabilityViolation rather than being ignored.
    """
    if k < 1:
        raise ValueError("exponent must be >= 1")

    def checked(pm: PolyMap) -> PolyMap:
        if pm.degree() > 3:
            raise StabilityViolation(
                f"power intermediate reached degree {pm.degree()} > 3"
            )
        return pm

    checked(base)
    result: PolyMap | None = None
    square = base
    while True:
        if k & 1:
            result = square if result is None else checked(result.compose(square))
        k >>= 1
        if not k:
            return result
        square = checked(square.compose(square))


@dataclass(frozen=True)
class Transcript:
    """Everything both parties can see, plus the agreed shared secret."""

    base: PolyMap
    alice_public: PolyMap
    bob_public: PolyMap
    collision: PolyMap
    public_vector: tuple[int, ...]
    shared: tuple[int, ...]

    def serialize(self, secret: PrivateSeed | None = None) -> str:
        ring = self.base.ring
        digest = hashlib.sha256(
            ",".join(str(c) for c in self.shared).encode()
        ).hexdigest()
        parts = [
            "STABLEDH v1",
            f"ring {ring.tag()}",
            f"dim {self.base.dim}",
            "v " + ",".join(str(c) for c in self.public_vector),
            f"shared-digest sha256:{digest}",
            "",
            "base:",
            self.base.serialize(),
            "alice-public:",
            self.alice_public.serialize(),
            "bob-public:",
            self.bob_public.serialize(),
        ]
        if secret is not None:
            parts += [
                "secret-g: " + secret.g_walk.to_text(),
                "secret-h: " + (secret.h_walk.to_text() if len(secret.h_walk) else "-"),
                "secret-tau-row: "
                + ",".join(str(c) for c in secret.tau.matrix[0]),
            ]
        return "\n".join(parts)


def run_exchange(
    secret: PrivateSeed, n_a: int, n_b: int, v: tuple[int, ...] | list[int]
) -> Transcript:
    """One full exchange; raises CollisionMismatch if the routes disagree."""
    if n_a < 1 or n_b < 1:
        raise ValueError("exponents must be >= 1")
    if len(v) != secret.dimension:
        raise ValueError(f"public vector needs {secret.dimension} entries")
    base = make_base(secret)
    alice_pub = alice_power(secret, n_a)
    bob_pub = bob_power(base, n_b)
    alice_collision = alice_power(secret, n_a * n_b)
    bob_collision = bob_power(alice_pub, n_b)
    if alice_collision != bob_collision:
        raise CollisionMismatch(
            "alice and bob computed formally different collision maps"
        )
    vec = tuple(secret.ring.canon(c) for c in v)
    shared = alice_collision.eval(vec)
    if bob_collision.eval(vec) != shared:
        raise CollisionMismatch("shared vectors disagree")  # pragma: no cover
    return Transcript(base, alice_pub, bob_pub, alice_collision, vec, shared)


# -- public-rule encryption ---------------------------------------------------------


@dataclass(frozen=True)
class PrivateRule:
    """Decryption data: the point-walk colours between the two affine mixes."""

    ring: RingSpec
    dimension: int
    colours: tuple[int, ...]
    t1: AffineMap
    t2: AffineMap

    def serialize(self) -> str:
        lines = [
            "STABLEKEY v1",
            f"ring {self.ring.tag()}",
            f"dim {self.dimension}",
            "colours " + ",".join(str(c) for c in self.colours),
            "t1-row " + ",".join(str(c) for c in self.t1.matrix[0]),
            "t1-shift " + ",".join(str(c) for c in self.t1.shift),
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "PrivateRule":
        from .ring import parse_ring

        lines = text.splitlines()
        if not lines or lines[0] != "STABLEKEY v1":
            raise ValueError("expected STABLEKEY v1 header")
        ring = parse_ring(lines[1].removeprefix("ring "))
        dim = int(lines[2].removeprefix("dim "))
        colours = tuple(
            int(c) for c in lines[3].removeprefix("colours ").split(",")
        )
        row = [int(c) for c in lines[4].removeprefix("t1-row ").split(",")]
        shift = [int(c) for c in lines[5].removeprefix("t1-shift ").split(",")]
        t1 = AffineMap.first_row(ring, row[1:], shift)
        return cls(ring, dim, colours, t1, AffineMap.identity(ring, dim))


@dataclass(frozen=True)
class PublicRule:
    public: PolyMap
    private: PrivateRule


def make_public_rule(
    dimension: int,
    ring: RingSpec,
    colours: tuple[int, ...] | list[int] | None = None,
    rng: Random | None = None,
    walk_length: int | None = None,
    t1: AffineMap | None = None,
    t2: AffineMap | None = None,
    engine: str = "auto",
) -> PublicRule:
    """Public map x -> T2(walk(T1(x))) over K^dimension.

    Defaults follow the cheap-affine choice: T1 in first-row form with every
    row-1 entry nonzero as the input mix, T2 the identity, both shifts zero.
    Either explicit walk colours or (rng, walk_length) must be supplied;
    colours are regular.
    """
    if colours is None:
        if rng is None or walk_length is None:
            raise ValueError("need explicit colours or rng plus walk_length")
        colours = tuple(ring.sample_regular(rng) for _ in range(walk_length))
    colours = tuple(ring.canon(c) for c in colours)
    if len(colours) < 1:
        raise ValueError("the walk must have at least one step")
    if t1 is None:
        if rng is None:
            raise ValueError("need rng to sample T1")
        t1 = AffineMap.sample_first_row(ring, dimension, rng, nonzero=None)
    if t2 is None:
        t2 = AffineMap.identity(ring, dimension)
    walk_map = point_walk_symbolic(dimension, ring, colours, engine=engine)
    public = t2.to_map().compose(walk_map.compose(t1.to_map()))
    return PublicRule(public, PrivateRule(ring, dimension, colours, t1, t2))


def encrypt(public: PolyMap, x: tuple[int, ...] | list[int]) -> tuple[int, ...]:
    return public.eval(tuple(x))


def decrypt(private: PrivateRule, y: tuple[int, ...] | list[int]) -> tuple[int, ...]:
    """Undo the output mix, retrace the walk backwards, undo the input mix."""
    ring = private.ring
    coords = private.t2.invert().apply(tuple(y))
    side = POINT if len(private.colours) % 2 == 0 else LINE
    vertex = Vertex(side, coords)
    for colour in reversed(private.colours):
        first = ring.sub(vertex.coords[0], colour)
        if vertex.is_point():
            vertex = solve_line_through_point(ring, vertex, first)
        else:
            vertex = solve_point_on_line(ring, vertex, first)
    return private.t1.invert().apply(vertex.coords)
