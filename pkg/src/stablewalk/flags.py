"""The double directed flag graph over D(n, K) and its cubic walk group.

A flag couples an incident point/line pair.  Two tagged copies exist:

    F1  stored as (p_1, ..., p_n, l_1)   -- the line is implied by the point
    F2  stored as (l_1, ..., l_n, p_1)   -- the point is implied by the line

so either copy is a vector in K^{n+1}.  A step from F1 moves the point along
the shared line by the step colour; a step from F2 pivots the line around the
shared point.  The distance-two operator ``apply_z(f, a, b)`` does a point
move by ``a`` then a line move by ``b`` and generates, with regular colours, a
family of degree-3 transformation groups of K^{n+1}.

Inverting a composite of flag moves reverses the step order: the inverse walk
of pairs ((a_1,b_1), ..., (a_s,b_s)) is ((0,-b_s), (-a_s,-b_{s-1}), ...,
(-a_1, 0)); slotwise negation alone leaves a constant shear behind (see the
regression tests).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from random import Random

import numpy as np

from . import _kernel
from .errors import (
    InsufficientRegularElements,
    NotRegularColour,
    TooLarge,
)
from .graph import (
    LINE,
    POINT,
    Vertex,
    rhs_table,
    solve_line_through_point,
    solve_point_on_line,
)
from .multipoly import Poly, PolyMap
from .ring import RingSpec

F1 = "F1"
F2 = "F2"

ORACLE_FLAG_LIMIT = 10**6

# below this per-coordinate term count the symbolic walker stays on dicts
_ARRAY_ENGINE_DIM = 12


@dataclass(frozen=True)
class Flag:
    """A tagged flag of D(n, K), stored as a vector in K^{n+1}."""

    side: str
    data: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.data) - 1

    def point(self, ring: RingSpec) -> Vertex:
        if self.side == F1:
            return Vertex(POINT, self.data[:-1])
        line = Vertex(LINE, self.data[:-1])
        return solve_point_on_line(ring, line, self.data[-1])

    def line(self, ring: RingSpec) -> Vertex:
        if self.side == F2:
            return Vertex(LINE, self.data[:-1])
        point = Vertex(POINT, self.data[:-1])
        return solve_line_through_point(ring, point, self.data[-1])

    def to_text(self) -> str:
        return f"{self.side} " + ",".join(str(c) for c in self.data)

    @classmethod
    def from_text(cls, text: str) -> "Flag":
        side, _, rest = text.strip().partition(" ")
        if side not in (F1, F2):
            raise ValueError(f"flag side must be F1 or F2, got {side!r}")
        return cls(side, tuple(int(c) for c in rest.split(",")))


def zero_flag(n: int, side: str = F1) -> Flag:
    return Flag(side, (0,) * (n + 1))


def _check_colour(ring: RingSpec, colour: int, restricted: bool) -> None:
    c = colour % ring.modulus
    if restricted and c != 0 and not ring.is_regular(c):
        raise NotRegularColour(f"colour {c} is not regular in {ring.tag()}")


def flag_step(ring: RingSpec, flag: Flag, colour: int, restricted: bool = True) -> Flag:
    """One directed arc: F1 moves the point by colour, F2 moves the line."""
    _check_colour(ring, colour, restricted)
    if flag.side == F1:
        line = flag.line(ring)
        return Flag(F2, line.coords + (ring.add(flag.data[0], colour),))
    point = flag.point(ring)
    return Flag(F1, point.coords + (ring.add(flag.data[0], colour),))


def apply_z(
    ring: RingSpec, flag: Flag, alpha: int, beta: int, restricted: bool = True
) -> Flag:
    """Distance-two move on F1: point by alpha, then line by beta."""
    if flag.side != F1:
        raise ValueError("apply_z acts on F1 flags")
    return flag_step(ring, flag_step(ring, flag, alpha, restricted), beta, restricted)


@dataclass(frozen=True)
class ZWalk:
    """A sequence of distance-two moves; colours should be regular."""

    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def colours(self) -> tuple[int, ...]:
        return tuple(c for pair in self.pairs for c in pair)

    def inverse(self) -> "ZWalk":
        """Reversed pairs with negated colours, shifted one slot in role."""
        if not self.pairs:
            return self
        alphas = [a for a, _ in self.pairs]
        betas = [b for _, b in self.pairs]
        pairs = [(0, -betas[-1])]
        for i in range(len(self.pairs) - 1, 0, -1):
            pairs.append((-alphas[i], -betas[i - 1]))
        pairs.append((-alphas[0], 0))
        return ZWalk(tuple(pairs))

    def repeat(self, k: int) -> "ZWalk":
        return ZWalk(self.pairs * k)

    def __add__(self, other: "ZWalk") -> "ZWalk":
        return ZWalk(self.pairs + other.pairs)

    def to_text(self) -> str:
        return ",".join(f"{a}:{b}" for a, b in self.pairs)

    @classmethod
    def from_text(cls, text: str) -> "ZWalk":
        pairs = []
        for chunk in text.strip().split(","):
            a, _, b = chunk.partition(":")
            pairs.append((int(a), int(b)))
        return cls(tuple(pairs))


def sample_zwalk(ring: RingSpec, length: int, rng: Random) -> ZWalk:
    return ZWalk(
        tuple(
            (ring.sample_regular(rng), ring.sample_regular(rng))
            for _ in range(length)
        )
    )


def zwalk_apply(ring: RingSpec, flag: Flag, walk: ZWalk, restricted: bool = True) -> Flag:
    for colour in walk.colours():
        flag = flag_step(ring, flag, colour, restricted)
    return flag


# -- symbolic walks ---------------------------------------------------------------


def _require_regular_ring(ring: RingSpec) -> None:
    if not ring.count_regular_check():
        raise InsufficientRegularElements(
            f"{ring.tag()} needs at least 3 regular elements"
        )


def flag_walk_symbolic(
    n: int,
    ring: RingSpec,
    colours: tuple[int, ...] | list[int],
    restricted: bool = True,
    trace: list | None = None,
    engine: str = "auto",
) -> PolyMap:
    """Run a flag walk on the symbolic F1 flag (x_1, ..., x_{n+1}).

    Any positive number of steps is allowed; odd walks end in the F2 storage
    convention but remain bijections of K^{n+1}.  Passing ``trace`` collects
    every intermediate state as (side, coords) for degree inspection.  The
    dict and array engines produce identical maps; "auto" picks by dimension.
    """
    _require_regular_ring(ring)
    for c in colours:
        _check_colour(ring, c, restricted)
    if engine == "auto":
        engine = "array" if n + 1 >= _ARRAY_ENGINE_DIM else "dict"
    if engine == "array":
        return _flag_walk_arrays(n, ring, colours, trace)
    return _flag_walk_dicts(n, ring, colours, trace)


def _flag_walk_dicts(n, ring, colours, trace) -> PolyMap:
    dim = n + 1
    state = [Poly.variable(ring, dim, i + 1) for i in range(n)]
    scalar = Poly.variable(ring, dim, dim)  # first coordinate of the partner
    side = F1
    table = rhs_table(n)
    if trace is not None:
        trace.append((side, state + [scalar]))
    for colour in colours:
        partner = [scalar] + [Poly.zero(ring, dim)] * (n - 1)
        if side == F1:
            # materialize the line through the current point, bump p_1
            for m, (a, b) in enumerate(table, start=2):
                partner[m - 1] = state[m - 1] + partner[a - 1] * state[b - 1]
            new_scalar = state[0] + Poly.const(ring, dim, colour)
            side = F2
        else:
            for m, (a, b) in enumerate(table, start=2):
                partner[m - 1] = state[m - 1] - state[a - 1] * partner[b - 1]
            new_scalar = state[0] + Poly.const(ring, dim, colour)
            side = F1
        state, scalar = partner, new_scalar
        if trace is not None:
            trace.append((side, state + [scalar]))
    return PolyMap(ring, state + [scalar])


def _flag_walk_arrays(n, ring, colours, trace) -> PolyMap:
    dim = n + 1
    m = ring.modulus

    def var_block(i):
        exps = np.zeros((1, dim), dtype=np.uint8)
        exps[0, i] = 1
        return np.ones(1, dtype=np.uint64), exps

    state = [var_block(i) for i in range(n)]
    scalar = var_block(n)
    scalar_var, scalar_const = n, 0  # partner first coordinate is x_{n+1}+const
    state_var, state_const = 0, 0  # own first coordinate is x_1+const
    side = F1
    table = rhs_table(n)

    def snapshot():
        coords = [Poly._from_block(ring, dim, b) for b in state] + [
            Poly._from_block(ring, dim, scalar)
        ]
        trace.append((side, coords))

    if trace is not None:
        snapshot()
    for colour in colours:
        partner: list = [scalar] + [None] * (n - 1)
        if side == F1:
            for idx, (a, b) in enumerate(table):
                mth = idx + 1  # 0-based coordinate index of the relation target
                if a == 1:
                    prod_c, prod_e = _kernel.linmul_block(
                        state[b - 1], scalar_var, scalar_const, m
                    )
                else:
                    prod_c, prod_e = _kernel.linmul_block(
                        partner[a - 1], state_var, state_const, m
                    )
                base_c, base_e = state[mth]
                partner[mth] = _kernel.collapse(
                    np.concatenate([base_c, prod_c]),
                    np.concatenate([base_e, prod_e]),
                    m,
                )
            side = F2
        else:
            for idx, (a, b) in enumerate(table):
                mth = idx + 1
                if b == 1:
                    prod_c, prod_e = _kernel.linmul_block(
                        state[a - 1], scalar_var, scalar_const, m
                    )
                else:
                    prod_c, prod_e = _kernel.linmul_block(
                        partner[b - 1], state_var, state_const, m
                    )
                base_c, base_e = state[mth]
                neg_c, neg_e = _kernel.neg_block((prod_c, prod_e), m)
                partner[mth] = _kernel.collapse(
                    np.concatenate([base_c, neg_c]),
                    np.concatenate([base_e, neg_e]),
                    m,
                )
            side = F1
        new_scalar_var, new_scalar_const = state_var, (state_const + colour) % m
        state_var, state_const = scalar_var, scalar_const
        scalar_var, scalar_const = new_scalar_var, new_scalar_const
        state = partner
        sc_c = np.array(
            [1, scalar_const] if scalar_const else [1], dtype=np.uint64
        )
        sc_e = np.zeros((2 if scalar_const else 1, dim), dtype=np.uint8)
        sc_e[0, scalar_var] = 1
        scalar = (sc_c, sc_e)
        if trace is not None:
            snapshot()
    coords = [Poly._from_block(ring, dim, b) for b in state]
    coords.append(Poly._from_block(ring, dim, scalar))
    return PolyMap(ring, coords)


def zwalk_symbolic(
    n: int, ring: RingSpec, walk: ZWalk, restricted: bool = True
) -> PolyMap:
    """The walk's group element as a transformation of K^{n+1}; degree <= 3."""
    return flag_walk_symbolic(n, ring, walk.colours(), restricted)


# -- degree classification --------------------------------------------------------


def expected_degree_bound(index: int, side: str) -> int:
    """Degree bound for storage coordinate ``index`` (1-based) of a walk state.

    On point states the (i,i)' and (i,i+1) classes stay quadratic and the
    (i,i) / (i+1,i) classes cubic; on line states the classes swap.  The first
    coordinate and the trailing partner coordinate are affine; index 2 is
    shared by both diagonal classes and stays quadratic.
    """
    if index == 1:
        return 1
    if index == 2:
        return 2
    if index == 3:
        cls = "ur"
    elif index == 4:
        cls = "ll"
    else:
        cls = {1: "d", 2: "dp", 3: "ur", 0: "ll"}[index % 4]
    if side == F1:
        return 2 if cls in ("dp", "ur") else 3
    return 2 if cls in ("d", "ll") else 3


# -- power stability ---------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    degrees: tuple[int, ...]
    ok: bool


def stable_power_check(g: PolyMap, kmax: int) -> StabilityReport:
    """Degrees of g^2..g^kmax via iterated composition; passes iff all <= 3."""
    degrees = [g.degree()]
    cache = _kernel.ProductCache([p._block() for p in g.coords], g.ring.modulus)
    acc = g
    for _ in range(2, kmax + 1):
        acc = acc._compose_cached(cache)
        degrees.append(acc.degree())
    return StabilityReport(tuple(degrees), all(d <= 3 for d in degrees))


# -- order probes -------------------------------------------------------------------


@dataclass(frozen=True)
class OrderProbe:
    lower_bound: int
    exact: int | None
    orbit_lengths: tuple[int | None, ...]


def order_probe(
    g: PolyMap,
    sample_vectors: list[tuple[int, ...]],
    max_iter: int,
    exact_limit: int = 10**6,
) -> OrderProbe:
    """Orbit lengths of sample vectors under g; first return gives the length.

    The exact order (lcm of all cycle lengths) is computed only when the whole
    domain is small enough to enumerate.
    """
    orbits: list[int | None] = []
    for v in sample_vectors:
        start = tuple(c % g.ring.modulus for c in v)
        current = start
        length = None
        for step in range(1, max_iter + 1):
            current = g.eval(current)
            if current == start:
                length = step
                break
        orbits.append(length)
    lower = max((o for o in orbits if o is not None), default=1)
    if any(o is None for o in orbits):
        lower = max(lower, max_iter + 1)
    exact = None
    domain = g.ring.modulus**g.dim
    if domain <= exact_limit:
        exact = 1
        seen = [False] * domain
        radix = g.ring.modulus
        for raw in range(domain):
            if seen[raw]:
                continue
            vec = _decode(raw, radix, g.dim)
            cycle = 0
            cur_raw = raw
            while not seen[cur_raw]:
                seen[cur_raw] = True
                cycle += 1
                vec = g.eval(vec)
                cur_raw = _encode(vec, radix)
            exact = math.lcm(exact, cycle)
    return OrderProbe(lower, exact, tuple(orbits))


def _decode(raw: int, radix: int, dim: int) -> tuple[int, ...]:
    coords = []
    for _ in range(dim):
        raw, c = divmod(raw, radix)
        coords.append(c)
    return tuple(coords)


def _encode(vec, radix: int) -> int:
    acc = 0
    for c in reversed(vec):
        acc = acc * radix + c
    return acc


# -- directed cycle oracle -----------------------------------------------------------


def dd_cycle_oracle(n: int, ring: RingSpec, restricted: bool = True) -> int:
    """Exhaustive minimal directed cycle length of the flag graph.

    Restricted mode only follows arcs with regular colours; unrestricted mode
    follows every nonzero colour.
    """
    per_side = ring.modulus ** (n + 1)
    if 2 * per_side > 2 * ORACLE_FLAG_LIMIT:
        raise TooLarge(f"{2 * per_side} flags exceed the oracle guard")
    colours = [
        c
        for c in range(1, ring.modulus)
        if (not restricted) or ring.is_regular(c)
    ]
    radix = ring.modulus

    def flag_of(fid: int) -> Flag:
        side = F1 if fid < per_side else F2
        return Flag(side, _decode(fid % per_side, radix, n + 1))

    def flag_id(flag: Flag) -> int:
        return _encode(flag.data, radix) + (0 if flag.side == F1 else per_side)

    total = 2 * per_side
    successors: list[list[int]] = []
    for fid in range(total):
        flag = flag_of(fid)
        successors.append(
            [flag_id(flag_step(ring, flag, c, restricted=False)) for c in colours]
        )
    best = 0
    for start in range(total):
        dist = {start: 0}
        queue = deque([start])
        found = None
        while queue:
            u = queue.popleft()
            if best and dist[u] + 1 >= best:
                break
            for w in successors[u]:
                if w == start:
                    found = dist[u] + 1
                    queue.clear()
                    break
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if found is not None and (not best or found < best):
            best = found
    return best


# -- reference recurrences ------------------------------------------------------------
#
# Closed forms for the first two steps of a flag walk started from the F2
# storage (l_1, ..., l_n, p_1), kept as an independent cross-check of the
# table-driven forward pass.  The quadratic update of the (1,1) slot in the
# second step is l_11 + a1*p_1 (the product of the step colour and p_1).


def reference_first_point(ring: RingSpec, l: list[int], p1: int) -> list[int]:
    """Point on [l] with first coordinate p1, via the explicit display forms."""
    n = len(l)
    p = [0] * n
    p[0] = p1 % ring.modulus
    if n >= 2:
        p[1] = l[1] - l[0] * p1
    if n >= 3:
        p[2] = l[2] - l[1] * p1
    if n >= 4:
        p[3] = l[3] - l[0] * (l[1] - l[0] * p1)
    i = 2
    while 4 * i - 3 <= n:
        di, dpi, uri, lli = 4 * i - 3, 4 * i - 2, 4 * i - 1, 4 * i
        prev_ur = 3 if i == 2 else 4 * (i - 1) - 1
        prev_ll = 4 if i == 2 else 4 * (i - 1)
        prev_d = 2 if i == 2 else 4 * (i - 1) - 3
        p[di - 1] = l[di - 1] - l[0] * (l[prev_ur - 1] - p1 * l[prev_d - 1])
        if dpi <= n:
            p[dpi - 1] = l[dpi - 1] - p1 * l[prev_ll - 1]
        if uri <= n:
            p[uri - 1] = l[uri - 1] - p1 * l[di - 1]
        if lli <= n:
            p[lli - 1] = l[lli - 1] - l[0] * (l[dpi - 1] - p1 * l[prev_ll - 1])
        i += 1
    return [c % ring.modulus for c in p]


def reference_second_line(
    ring: RingSpec, l: list[int], p_first: list[int], alpha1: int
) -> list[int]:
    """Line through the first point with l_1 bumped by alpha1 (display forms)."""
    n = len(l)
    p1 = p_first[0]
    out = [0] * n
    out[0] = (l[0] + alpha1) % ring.modulus
    if n >= 2:
        out[1] = l[1] + alpha1 * p1
    if n >= 3:
        out[2] = l[2] + alpha1 * p1 * p1
    if n >= 4:
        out[3] = l[3] + alpha1 * p_first[1]
    i = 2
    while 4 * i - 3 <= n:
        di, dpi, uri, lli = 4 * i - 3, 4 * i - 2, 4 * i - 1, 4 * i
        prev_ur = 3 if i == 2 else 4 * (i - 1) - 1
        prev_dp = 2 if i == 2 else 4 * (i - 1) - 2
        out[di - 1] = l[di - 1] + alpha1 * p_first[prev_ur - 1]
        if dpi <= n:
            out[dpi - 1] = l[dpi - 1] + alpha1 * p1 * p_first[prev_dp - 1]
        if uri <= n:
            out[uri - 1] = l[uri - 1] + alpha1 * p1 * p_first[prev_ur - 1]
        if lli <= n:
            out[lli - 1] = l[lli - 1] + alpha1 * p_first[dpi - 1]
        i += 1
    return [c % ring.modulus for c in out]
