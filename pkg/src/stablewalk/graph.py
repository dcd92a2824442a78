"""The bipartite incidence system D(n, K) and its walk group.

Vertices are points ``(p)`` and lines ``[l]`` in K^n.  Coordinates follow the
classical double-subscript scheme, flattened into 1-based indices:

    index 1          <-> subscript 1        (p_1 / l_1)
    index 2          <-> (1,1)
    index 3          <-> (1,2)
    index 4          <-> (2,1)
    index 4i-3..4i   <-> (i,i), (i,i)', (i,i+1), (i+1,i)   for i >= 2

Incidence imposes, for every coordinate index m in 2..n, one relation

    l[m] - p[m] = l[A(m)] * p[B(m)]

where A(m), B(m) are lower indices given by :func:`rhs_table`; relations whose
left side would name a coordinate beyond n are dropped.  Each relation is
linear in its highest coordinate, so a single forward pass recovers the unique
incident partner from a first coordinate (the "rainbow" property: exactly one
neighbour per colour).

Colour convention: an arc's colour is the first coordinate of its head minus
the first coordinate of its tail, so a step by colour c always adds c to the
first coordinate, whichever side it starts from.  This makes
``apply_x(.., a, b)`` followed by ``apply_x(.., -b, -a)`` the identity exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from random import Random

from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    InsufficientRegularElements,
    NotAField,
    TooLarge,
)
from .multipoly import Poly, PolyMap
from .ring import RingSpec, make_ring

POINT = "P"
LINE = "L"

ORACLE_VERTEX_LIMIT = 10**6


@lru_cache(maxsize=None)
def rhs_table(n: int) -> tuple[tuple[int, int], ...]:
    """(A(m), B(m)) for m = 2..n: the product l[A]*p[B] in relation m."""
    rows = []
    for m in range(2, n + 1):
        if m == 2:
            rows.append((1, 1))
        elif m == 3:
            rows.append((2, 1))
        elif m == 4:
            rows.append((1, 2))
        else:
            r = m % 4
            if r == 1:  # (i,i):    l1 * p_{i-1,i}
                i = (m + 3) // 4
                rows.append((1, 3 if i == 2 else 4 * i - 5))
            elif r == 2:  # (i,i)':  l_{i,i-1} * p1
                i = (m + 2) // 4
                rows.append((4 if i == 2 else 4 * i - 4, 1))
            elif r == 3:  # (i,i+1): l_{i,i} * p1
                i = (m + 1) // 4
                rows.append((4 * i - 3, 1))
            else:  # (i+1,i):        l1 * p'_{i,i}
                i = m // 4
                rows.append((1, 4 * i - 2))
    return tuple(rows)


@dataclass(frozen=True)
class Vertex:
    """A point or line of D(n, K), coords as canonical residues."""

    side: str
    coords: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.coords)

    def is_point(self) -> bool:
        return self.side == POINT

    def to_text(self) -> str:
        return f"{self.side} " + ",".join(str(c) for c in self.coords)

    @classmethod
    def from_text(cls, text: str) -> "Vertex":
        side, _, rest = text.strip().partition(" ")
        if side not in (POINT, LINE):
            raise ValueError(f"vertex side must be P or L, got {side!r}")
        return cls(side, tuple(int(c) for c in rest.split(",")))


def zero_vertex(side: str, n: int) -> Vertex:
    return Vertex(side, (0,) * n)


def incidence_check(ring: RingSpec, point: Vertex, line: Vertex) -> bool:
    """All n-1 incidence relations between a point and a line."""
    if point.n != line.n:
        raise DimensionMismatch(f"point has n={point.n}, line n={line.n}")
    if not (point.is_point() and line.side == LINE):
        raise ValueError("incidence_check wants (point, line)")
    p, l = point.coords, line.coords
    for m, (a, b) in enumerate(rhs_table(point.n), start=2):
        if (l[m - 1] - p[m - 1] - l[a - 1] * p[b - 1]) % ring.modulus:
            return False
    return True


def solve_point_on_line(ring: RingSpec, line: Vertex, p1: int) -> Vertex:
    """The unique point on the line with the given first coordinate."""
    l = line.coords
    p = [p1 % ring.modulus] + [0] * (line.n - 1)
    for m, (a, b) in enumerate(rhs_table(line.n), start=2):
        p[m - 1] = (l[m - 1] - l[a - 1] * p[b - 1]) % ring.modulus
    return Vertex(POINT, tuple(p))


def solve_line_through_point(ring: RingSpec, point: Vertex, l1: int) -> Vertex:
    """The unique line through the point with the given first coordinate."""
    p = point.coords
    l = [l1 % ring.modulus] + [0] * (point.n - 1)
    for m, (a, b) in enumerate(rhs_table(point.n), start=2):
        l[m - 1] = (p[m - 1] + l[a - 1] * p[b - 1]) % ring.modulus
    return Vertex(LINE, tuple(l))


def apply_x(ring: RingSpec, v: Vertex, alpha: int, beta: int) -> Vertex:
    """Move a point along the edge of colour alpha, a line along colour beta."""
    if v.is_point():
        return solve_line_through_point(ring, v, v.coords[0] + alpha)
    return solve_point_on_line(ring, v, v.coords[0] + beta)


def apply_n(ring: RingSpec, v: Vertex, colour: int) -> Vertex:
    return apply_x(ring, v, colour, colour)


@dataclass(frozen=True)
class Walk:
    """A colour sequence; even length moves points back to points."""

    colours: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.colours)

    @property
    def steps(self) -> int:
        """Point-to-point length s for a 2s-colour walk."""
        return len(self.colours) // 2

    def is_irreducible(self) -> bool:
        """Consecutive colours differ (the classical literal condition)."""
        return all(a != b for a, b in zip(self.colours, self.colours[1:]))

    def non_backtracking(self, ring: RingSpec) -> bool:
        """No step undoes the previous one (operational condition: b != -a)."""
        return all(
            (a + b) % ring.modulus != 0
            for a, b in zip(self.colours, self.colours[1:])
        )

    def inverse(self) -> "Walk":
        return Walk(tuple(-c for c in reversed(self.colours)))

    def to_text(self) -> str:
        return ",".join(str(c) for c in self.colours)

    @classmethod
    def from_text(cls, text: str) -> "Walk":
        return cls(tuple(int(c) for c in text.strip().split(",")))


def sample_walk(ring: RingSpec, steps: int, rng: Random) -> Walk:
    """A seeded walk of 2*steps colours, irreducible and non-backtracking."""
    colours: list[int] = []
    for _ in range(2 * steps):
        while True:
            c = ring.sample(rng)
            if not colours:
                break
            prev = colours[-1]
            if c != prev and (c + prev) % ring.modulus != 0:
                break
        colours.append(c)
    return Walk(tuple(colours))


def walk_apply(ring: RingSpec, v: Vertex, walk: Walk) -> Vertex:
    if not v.is_point():
        raise ValueError("walks are applied to points")
    for colour in walk.colours:
        v = apply_n(ring, v, colour)
    return v


def point_walk_symbolic(
    n: int,
    ring: RingSpec,
    colours: tuple[int, ...] | list[int],
    engine: str = "auto",
) -> PolyMap:
    """Walk the symbolic point (x_1, ..., x_n); any length, degree <= 3.

    Odd walks end on line coordinates but are still bijections of K^n.  The
    dict and array engines give identical maps; "auto" picks by dimension.
    """
    if not ring.count_regular_check():
        raise InsufficientRegularElements(
            f"{ring.tag()} needs at least 3 regular elements"
        )
    if engine == "auto":
        engine = "array" if n >= 12 else "dict"
    if engine == "array":
        return _point_walk_arrays(n, ring, colours)
    coords: list[Poly] = [Poly.variable(ring, n, i + 1) for i in range(n)]
    side = POINT
    table = rhs_table(n)
    for colour in colours:
        first = coords[0] + Poly.const(ring, n, colour)
        new = [first] + [Poly.zero(ring, n)] * (n - 1)
        if side == POINT:
            # materialize the line through the symbolic point
            for m, (a, b) in enumerate(table, start=2):
                new[m - 1] = coords[m - 1] + new[a - 1] * coords[b - 1]
            side = LINE
        else:
            for m, (a, b) in enumerate(table, start=2):
                new[m - 1] = coords[m - 1] - coords[a - 1] * new[b - 1]
            side = POINT
        coords = new
    return PolyMap(ring, coords)


def _point_walk_arrays(n, ring, colours) -> PolyMap:
    from . import _kernel
    import numpy as np

    m = ring.modulus
    state = []
    for i in range(n):
        exps = np.zeros((1, n), dtype=np.uint8)
        exps[0, i] = 1
        state.append((np.ones(1, dtype=np.uint64), exps))
    side = POINT
    cur_const = 0  # first coordinate of the current vertex is x_1 + cur_const
    table = rhs_table(n)
    for colour in colours:
        next_const = (cur_const + colour) % m
        first_c = np.array([1, next_const] if next_const else [1], dtype=np.uint64)
        first_e = np.zeros((2 if next_const else 1, n), dtype=np.uint8)
        first_e[0, 0] = 1
        new: list = [(first_c, first_e)] + [None] * (n - 1)
        if side == POINT:
            # line coords: l[m] = p[m] + l[A]*p[B]; l_1 is x_1+next, p_1 x_1+cur
            for idx, (a, b) in enumerate(table):
                if a == 1:
                    prod = _kernel.linmul_block(state[b - 1], 0, next_const, m)
                else:
                    prod = _kernel.linmul_block(new[a - 1], 0, cur_const, m)
                base_c, base_e = state[idx + 1]
                new[idx + 1] = _kernel.collapse(
                    np.concatenate([base_c, prod[0]]),
                    np.concatenate([base_e, prod[1]]),
                    m,
                )
            side = LINE
        else:
            # point coords: p[m] = l[m] - l[A]*p[B]; l_1 is x_1+cur, p_1 x_1+next
            for idx, (a, b) in enumerate(table):
                if a == 1:
                    prod = _kernel.linmul_block(new[b - 1], 0, cur_const, m)
                else:
                    prod = _kernel.linmul_block(state[a - 1], 0, next_const, m)
                neg = _kernel.neg_block(prod, m)
                base_c, base_e = state[idx + 1]
                new[idx + 1] = _kernel.collapse(
                    np.concatenate([base_c, neg[0]]),
                    np.concatenate([base_e, neg[1]]),
                    m,
                )
            side = POINT
        state = new
        cur_const = next_const
    return PolyMap(ring, [Poly._from_block(ring, n, b) for b in state])


def walk_symbolic(n: int, ring: RingSpec, walk: Walk) -> PolyMap:
    """The walk's group element as a transformation of K^n (degree <= 3)."""
    if len(walk.colours) % 2:
        raise ValueError("group elements come from even-length walks")
    return point_walk_symbolic(n, ring, walk.colours)


# -- component invariants ------------------------------------------------------


def invariant_length(n: int) -> int:
    """t such that the invariant vector is (a_2, ..., a_t)."""
    return (n + 2) // 4


def _coord_value(ring: RingSpec, v: Vertex, kind: str, i: int) -> int:
    """Resolve u_{..} with the boundary conventions; unknown subscripts are 0.

    Kinds: 'd' = (i,i), 'dp' = (i,i)', 'ur' = (i,i+1), 'll' = (i+1,i).
    The i = 0 cases of 'ur'/'ll' are side dependent: u_{0,1} is p_1 on points
    and 0 on lines, u_{1,0} is l_1 on lines and 0 on points.
    """
    n = v.n
    if i < 0:
        return 0
    if kind == "d":
        if i == 0:
            return ring.modulus - 1  # u_{00} = -1
        idx = 2 if i == 1 else 4 * i - 3
    elif kind == "dp":
        if i == 0:
            return 1
        idx = 2 if i == 1 else 4 * i - 2
    elif kind == "ur":
        if i == 0:
            return v.coords[0] if v.is_point() else 0
        idx = 3 if i == 1 else 4 * i - 1
    elif kind == "ll":
        if i == 0:
            return v.coords[0] if not v.is_point() else 0
        idx = 4 if i == 1 else 4 * i
    else:  # pragma: no cover
        raise ValueError(kind)
    if idx > n:
        return 0
    return v.coords[idx - 1]


def invariant_vector(ring: RingSpec, v: Vertex) -> tuple[int, ...]:
    """(a_2, ..., a_t): constant on connected components."""
    n = v.n
    if n < 6:
        raise DimensionTooSmall(f"invariants need n >= 6, got {n}")
    t = invariant_length(n)
    out = []
    for r in range(2, t + 1):
        acc = 0
        for i in range(r + 1):
            acc += _coord_value(ring, v, "d", i) * _coord_value(ring, v, "dp", r - i)
            acc -= _coord_value(ring, v, "ur", i) * _coord_value(ring, v, "ll", r - i - 1)
        out.append(acc % ring.modulus)
    return tuple(out)


def free_coordinate_indices(n: int) -> tuple[int, ...]:
    """Indices a component vertex can take freely; the (i,i)' slots are solved."""
    t = invariant_length(n)
    solved = {4 * i - 2 for i in range(2, t + 1)}
    return tuple(i for i in range(1, n + 1) if i not in solved)


def parametrize_component_vertex(
    ring: RingSpec, anchor: Vertex, free: dict[int, int]
) -> Vertex:
    """Fill the (i,i)' coordinates so the result shares the anchor's invariant.

    ``free`` assigns every index from :func:`free_coordinate_indices`; each
    a_r(x) = a_r(anchor) equation is linear in x'_{r,r} with unit coefficient,
    so the solved coordinates are unique.
    """
    if not ring.is_field():
        raise NotAField(f"component parametrization needs a field, got {ring.tag()}")
    n = anchor.n
    if n < 6:
        raise DimensionTooSmall(f"needs n >= 6, got {n}")
    free_idx = free_coordinate_indices(n)
    if set(free.keys()) != set(free_idx):
        raise ValueError(f"free assignment must cover exactly indices {free_idx}")
    coords = [0] * n
    for idx, value in free.items():
        coords[idx - 1] = ring.canon(value)
    target = invariant_vector(ring, anchor)
    t = invariant_length(n)
    for r in range(2, t + 1):
        # a_r(x) = -x'_{rr} + rest; with the slot zeroed, a_r evaluates to rest
        partial = invariant_vector(ring, Vertex(anchor.side, tuple(coords)))[r - 2]
        coords[4 * r - 3] = ring.sub(partial, target[r - 2])
    return Vertex(anchor.side, tuple(coords))


# -- exhaustive graph oracles ----------------------------------------------------


class IncidenceGraph:
    """Materialized D(k, ring): integer vertex ids and adjacency lists.

    Ids 0..m^k-1 are points, m^k..2m^k-1 lines, coordinates in mixed radix
    (first coordinate least significant).
    """

    def __init__(self, k: int, ring: RingSpec):
        if k == 1:
            k = 2  # D(1, q) is defined to be D(2, q)
        count = 2 * ring.modulus**k
        if count > 2 * ORACLE_VERTEX_LIMIT:
            raise TooLarge(f"graph with {count} vertices exceeds the oracle guard")
        self.k = k
        self.ring = ring
        self.side_count = ring.modulus**k
        self.adjacency = self._build()

    def vertex_id(self, v: Vertex) -> int:
        acc = 0
        for c in reversed(v.coords):
            acc = acc * self.ring.modulus + c
        return acc + (0 if v.is_point() else self.side_count)

    def vertex_of(self, vid: int) -> Vertex:
        side = POINT if vid < self.side_count else LINE
        raw = vid % self.side_count
        coords = []
        for _ in range(self.k):
            raw, c = divmod(raw, self.ring.modulus)
            coords.append(c)
        return Vertex(side, tuple(coords))

    def _build(self) -> list[list[int]]:
        ring, k = self.ring, self.k
        adjacency: list[list[int]] = [[] for _ in range(2 * self.side_count)]
        for pid in range(self.side_count):
            point = self.vertex_of(pid)
            for l1 in ring.elements():
                line = solve_line_through_point(ring, point, l1)
                lid = self.vertex_id(line)
                adjacency[pid].append(lid)
                adjacency[lid].append(pid)
        return adjacency

    def girth(self) -> int:
        """Shortest cycle length by BFS from every vertex."""
        best = 0
        adjacency = self.adjacency
        n_vertices = len(adjacency)
        for start in range(n_vertices):
            dist = {start: 0}
            parent = {start: -1}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                if best and dist[u] * 2 >= best:
                    break
                for w in adjacency[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        queue.append(w)
                    elif parent[u] != w:
                        cycle = dist[u] + dist[w] + 1
                        if not best or cycle < best:
                            best = cycle
        return best

    def components(self) -> list[list[int]]:
        seen = [False] * len(self.adjacency)
        out = []
        for start in range(len(self.adjacency)):
            if seen[start]:
                continue
            comp = []
            queue = deque([start])
            seen[start] = True
            while queue:
                u = queue.popleft()
                comp.append(u)
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
            out.append(comp)
        return out

    def is_bipartite_by_sides(self) -> bool:
        for pid in range(self.side_count):
            if any(w < self.side_count for w in self.adjacency[pid]):
                return False
        return all(
            all(w < self.side_count for w in self.adjacency[lid])
            for lid in range(self.side_count, 2 * self.side_count)
        )


@dataclass(frozen=True)
class GraphFacts:
    vertex_count: int
    is_bipartite: bool
    regular_degree: int | None
    girth: int


def girth_and_regularity_oracle(k: int, q: int) -> GraphFacts:
    """Materialize D(k, q) for prime q and report exact order/degree/girth."""
    ring = make_ring("F", q)
    return graph_facts(k, ring)


def graph_facts(k: int, ring: RingSpec) -> GraphFacts:
    graph = IncidenceGraph(k, ring)
    degrees = {len(set(nbrs)) for nbrs in graph.adjacency}
    regular = degrees.pop() if len(degrees) == 1 else None
    return GraphFacts(
        vertex_count=len(graph.adjacency),
        is_bipartite=graph.is_bipartite_by_sides(),
        regular_degree=regular,
        girth=graph.girth(),
    )


@dataclass(frozen=True)
class ComponentReport:
    component_count: int
    fiber_count: int
    components_match_fibers: bool
    split_fiber_count: int
    component_sizes: tuple[int, ...]


def component_oracle(k: int, ring: RingSpec) -> ComponentReport:
    """BFS components versus invariant-vector fibers.

    For k < 6 the invariant vector is empty and all vertices share one fiber.
    """
    graph = IncidenceGraph(k, ring)
    components = graph.components()
    fiber_of: dict[int, tuple[int, ...]] = {}
    for vid in range(len(graph.adjacency)):
        v = graph.vertex_of(vid)
        fiber_of[vid] = invariant_vector(ring, v) if graph.k >= 6 else ()
    comp_fiber: dict[tuple[int, ...], int] = {}
    match = True
    for comp in components:
        fibers = {fiber_of[vid] for vid in comp}
        if len(fibers) != 1:
            match = False
            continue
        fiber = fibers.pop()
        comp_fiber[fiber] = comp_fiber.get(fiber, 0) + 1
    fiber_values = set(fiber_of.values())
    split = sum(1 for fiber, cnt in comp_fiber.items() if cnt > 1)
    return ComponentReport(
        component_count=len(components),
        fiber_count=len(fiber_values),
        components_match_fibers=match and all(c == 1 for c in comp_fiber.values()),
        split_fiber_count=split,
        component_sizes=tuple(sorted(len(c) for c in components)),
    )
