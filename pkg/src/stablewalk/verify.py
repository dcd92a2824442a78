"""The acceptance checks, runnable as a suite (CLI) or one by one (pytest).

Each check returns a :class:`CheckResult`; ``expected_defect`` marks the one
check that encodes a documented impossibility (the slotwise-negation inverse
of the distance-two flag operator, which differs from the identity by a
constant shear; the operative inverse contract is verified separately).  A
suite run counts an expected-defect check as consistent when it fails and as
a genuine failure when it unexpectedly passes.

Seeds are fixed so two runs of the same scale produce identical outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from random import Random

from . import bench as bench_mod
from .flags import (
    F1,
    Flag,
    ZWalk,
    apply_z,
    dd_cycle_oracle,
    order_probe,
    sample_zwalk,
    stable_power_check,
    zwalk_symbolic,
)
from .graph import (
    IncidenceGraph,
    Vertex,
    apply_x,
    component_oracle,
    girth_and_regularity_oracle,
    invariant_vector,
    sample_walk,
    solve_line_through_point,
    walk_symbolic,
)
from .keyex import (
    conjugate_by,
    decrypt,
    encrypt,
    make_private_seed,
    make_public_rule,
    run_exchange,
)
from .multipoly import AffineMap, PolyMap, monomial_density
from .ring import RingSpec, make_ring


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    expected_defect: bool = False

    @property
    def consistent(self) -> bool:
        """True when the outcome matches expectations for a healthy build."""
        return self.passed != self.expected_defect

    def status_line(self) -> str:
        if self.expected_defect:
            mark = "KNOWN-DEFECT" if not self.passed else "UNEXPECTED-PASS"
        else:
            mark = "PASS" if self.passed else "FAIL"
        return f"{mark:<15} {self.name}: {self.detail}"


def check_graph_facts(scale: str = "full") -> CheckResult:
    """Order 2q^k, bipartiteness and q-regularity on the small grid."""
    grid = [(2, 3), (3, 3), (2, 5)] if scale == "smoke" else [(2, 3), (3, 3), (2, 5), (3, 5)]
    problems = []
    for k, q in grid:
        facts = girth_and_regularity_oracle(k, q)
        if facts.vertex_count != 2 * q**k:
            problems.append(f"D({k},{q}) order {facts.vertex_count} != {2 * q**k}")
        if not facts.is_bipartite:
            problems.append(f"D({k},{q}) not bipartite")
        if facts.regular_degree != q:
            problems.append(f"D({k},{q}) degree {facts.regular_degree} != {q}")
    return CheckResult(
        "graph-facts", not problems, "; ".join(problems) or f"{len(grid)} graphs exact"
    )


def check_girth(scale: str = "full") -> CheckResult:
    """Girth lower bounds: k+4 for even k, k+5 for odd k."""
    grid = [(2, 3), (3, 3)] if scale == "smoke" else [(2, 3), (3, 3), (2, 5), (3, 5)]
    problems = []
    girths = []
    for k, q in grid:
        bound = k + 5 if k % 2 else k + 4
        g = girth_and_regularity_oracle(k, q).girth
        girths.append(f"D({k},{q})={g}")
        if g < bound:
            problems.append(f"D({k},{q}) girth {g} < {bound}")
    return CheckResult("girth-bounds", not problems, "; ".join(problems or girths))


def check_components(scale: str = "full") -> CheckResult:
    """Components coincide with invariant fibers over F_3; fibers split over Z_4."""
    problems = []
    ks = [6] if scale == "smoke" else [6, 7]
    for k in ks:
        rep = component_oracle(k, make_ring("F", 3))
        if not rep.components_match_fibers:
            problems.append(f"D({k},3): components != fibers")
    rep4 = component_oracle(6, make_ring("Z", 4))
    if rep4.split_fiber_count < 1:
        problems.append("D(6,Z_4): no fiber split")
    detail = "; ".join(problems) or (
        f"F_3 fibers exact; D(6,Z_4) split fibers: {rep4.split_fiber_count}"
    )
    return CheckResult("component-classification", not problems, detail)


def check_edge_invariance(scale: str = "full") -> CheckResult:
    """a(point) == a(line) on every edge; plus random edges of D(10, F_127)."""
    violations = 0
    edges = 0
    ks = [6] if scale == "smoke" else [6, 7]
    ring3 = make_ring("F", 3)
    for k in ks:
        graph = IncidenceGraph(k, ring3)
        for pid in range(graph.side_count):
            point = graph.vertex_of(pid)
            ap = invariant_vector(ring3, point)
            for lid in graph.adjacency[pid]:
                edges += 1
                if invariant_vector(ring3, graph.vertex_of(lid)) != ap:
                    violations += 1
    ring127 = make_ring("F", 127)
    rng = Random(0xEDE)
    samples = 1000 if scale == "smoke" else 10_000
    for _ in range(samples):
        point = Vertex("P", tuple(rng.randrange(127) for _ in range(10)))
        line = solve_line_through_point(ring127, point, rng.randrange(127))
        edges += 1
        if invariant_vector(ring127, point) != invariant_vector(ring127, line):
            violations += 1
    return CheckResult(
        "edge-invariance", violations == 0, f"{violations} violations over {edges} edges"
    )


def check_step_inverse(scale: str = "full") -> CheckResult:
    """apply_x(.., a, b) then apply_x(.., -b, -a) is the identity."""
    cases = [("F", 3, 6), ("Z", 256, 8), ("F", 127, 10)]
    per_graph = 100 if scale == "smoke" else 1000
    rng = Random(0x51EB)
    violations = 0
    for kind, modulus, n in cases:
        ring = make_ring(kind, modulus)
        for _ in range(per_graph):
            side = "P" if rng.random() < 0.5 else "L"
            v = Vertex(side, tuple(rng.randrange(modulus) for _ in range(n)))
            a, b = rng.randrange(modulus), rng.randrange(modulus)
            if apply_x(ring, apply_x(ring, v, a, b), -b, -a) != v:
                violations += 1
    return CheckResult(
        "step-inverse",
        violations == 0,
        f"{violations} violations over {len(cases) * per_graph} vertices",
    )


def _z_literal_cases(scale: str):
    rings = [make_ring("F", 127), make_ring("Z", 256)]
    ns = [6, 10]
    count = 10 if scale == "smoke" else 50
    rng = Random(0x2BAD)
    for ring in rings:
        for n in ns:
            for _ in range(count // (len(rings) * len(ns)) or 1):
                a = ring.sample_regular(rng)
                b = ring.sample_regular(rng)
                yield ring, n, a, b


def check_z_inverse_literal(scale: str = "full") -> CheckResult:
    """Slotwise negation composed with the distance-two operator.

    This is not an inverse: the composite is a constant shear by a*b in the
    second coordinate (plus higher corrections), for every consistent reading
    of the two-step move.  Kept as an expected-defect check; the operative
    inverse is covered by check_z_inverse_operative.
    """
    failures = 0
    total = 0
    for ring, n, a, b in _z_literal_cases(scale):
        total += 1
        forward = zwalk_symbolic(n, ring, ZWalk(((a, b),)))
        backward = zwalk_symbolic(n, ring, ZWalk(((-a % ring.modulus, -b % ring.modulus),)))
        if backward.compose(forward) != PolyMap.identity(ring, n + 1):
            failures += 1
    return CheckResult(
        "z-inverse-slotwise",
        failures == 0,
        f"{failures}/{total} composites differ from the identity (shear by a*b)",
        expected_defect=True,
    )


def check_z_inverse_operative(scale: str = "full") -> CheckResult:
    """Walk inverses (reversed pairs, negated, role-shifted) compose to identity."""
    failures = 0
    total = 0
    rng = Random(0x600D)
    lengths = [1, 2, 3]
    for ring, n, _, _ in _z_literal_cases(scale):
        total += 1
        walk = sample_zwalk(ring, lengths[total % len(lengths)], rng)
        forward = zwalk_symbolic(n, ring, walk)
        backward = zwalk_symbolic(n, ring, walk.inverse())
        if backward.compose(forward) != PolyMap.identity(ring, n + 1):
            failures += 1
    return CheckResult(
        "z-inverse-operative", failures == 0, f"{failures}/{total} walk inverses failed"
    )


def check_stability(scale: str = "full") -> CheckResult:
    """Degrees of walk maps and their powers stay <= 3, conjugated included.

    Walk lengths are allocated inversely to dimension so the corpus covers
    lengths 1..16 while power chains stay desk sized.
    """
    rings = [make_ring("Z", 256), make_ring("Z", 65536), make_ring("F", 127)]
    if scale == "smoke":
        layout = [(8, (1, 6), 4), (16, (1, 3), 2)]
        kmax = 4
    else:
        layout = [(8, (1, 16), 12), (16, (1, 6), 12), (32, (1, 3), 10)]
        kmax = 8
    rng = Random(0x57AB)
    violations = []
    z_count = 0
    d_count = 0
    for n, (lo, hi), per_ring in layout:
        for ring in rings:
            for i in range(per_ring):
                length = lo + (i % (hi - lo + 1))
                zwalk = sample_zwalk(ring, length, rng)
                g = zwalk_symbolic(n, ring, zwalk)
                z_count += 1
                rep = stable_power_check(g, kmax)
                if not rep.ok or g.degree() > 3:
                    violations.append(f"zwalk n={n} {ring.tag()} degrees={rep.degrees}")
                dwalk = sample_walk(ring, length, rng)
                d = walk_symbolic(n, ring, dwalk)
                d_count += 1
                rep = stable_power_check(d, kmax)
                if not rep.ok or d.degree() > 3:
                    violations.append(f"dwalk n={n} {ring.tag()} degrees={rep.degrees}")
                if i == 0:
                    tau = AffineMap.sample_first_row(ring, n + 1, rng, nonzero=None)
                    conj = conjugate_by(tau, g)
                    rep = stable_power_check(conj, kmax)
                    if not rep.ok:
                        violations.append(
                            f"conjugated zwalk n={n} {ring.tag()} degrees={rep.degrees}"
                        )
    detail = "; ".join(violations) or (
        f"{z_count} pair walks + {d_count} point walks, powers to {kmax}, all cubic"
    )
    return CheckResult("stable-degree", not violations, detail)


def check_protocol(scale: str = "full") -> CheckResult:
    """Full exchanges: both collision routes formally equal, shared vectors match."""
    rng = Random(0xD1F)
    runs = []
    count_by_dim = {8: 4, 16: 2} if scale == "smoke" else {8: 12, 16: 8}
    rings = [make_ring("Z", 65536), make_ring("F", 127)]
    failures = 0
    total = 0
    for dim, count in count_by_dim.items():
        for i in range(count):
            ring = rings[i % 2]
            secret = make_private_seed(
                dim, ring, rng, g_length=1 + i % 2, h_length=i % 2, tau_mixing=2
            )
            n_b = 2 + (i % 4)
            cap = 4096 // n_b
            n_a = 2 + rng.randrange(min(cap - 2, 200 if dim == 8 else 60))
            v = [ring.sample(rng) for _ in range(dim)]
            total += 1
            try:
                transcript = run_exchange(secret, n_a, n_b, v)
            except Exception as exc:  # CollisionMismatch or StabilityViolation
                failures += 1
                runs.append(f"dim={dim} {ring.tag()} n_a={n_a} n_b={n_b}: {exc}")
                continue
            if transcript.collision.eval(transcript.public_vector) != transcript.shared:
                failures += 1
    detail = "; ".join(runs) or f"{total} exchanges, all collisions formally equal"
    return CheckResult("protocol-correctness", failures == 0, detail)


def check_order_bounds(scale: str = "full") -> CheckResult:
    """Orbit lower bounds against floor((n+5)/2k); minimal flag cycles too."""
    ring = make_ring("F", 127)
    rng = Random(0x0DD)
    problems = []
    grid = [(11, 2), (15, 2)] if scale == "smoke" else [(11, 2), (11, 4), (15, 2), (15, 4)]
    for n, k in grid:
        walk = sample_zwalk(ring, k, rng)
        g = zwalk_symbolic(n, ring, walk)
        vectors = [tuple(rng.randrange(127) for _ in range(n + 1)) for _ in range(3)]
        bound = (n + 5) // (2 * k)
        probe = order_probe(g, vectors, max_iter=2000)
        if probe.lower_bound < bound:
            problems.append(f"n={n} k={k}: {probe.lower_bound} < {bound}")
    ring3 = make_ring("F", 3)
    for n in (2, 3):
        bound = (n + 5) // 2
        cycle = dd_cycle_oracle(n, ring3)
        if cycle < bound:
            problems.append(f"flag graph n={n}: min cycle {cycle} < {bound}")
    return CheckResult(
        "order-bounds", not problems, "; ".join(problems) or "all bounds honoured"
    )


def check_complexity_shape(scale: str = "full") -> CheckResult:
    """Encryption timing slope in n within [3, 5]; keygen grid monotone."""
    rng = Random(0xBE)
    ring = make_ring("Z", 256)
    if scale == "smoke":
        n_list = [20, 40]
        grid_n, grid_p = [10, 20], [10, 20]
    else:
        n_list = [20, 40, 60, 80, 100]
        grid_n, grid_p = [10, 20, 30, 40], [10, 20, 30]
    problems = []
    rows, report = bench_mod.bench_encrypt(n_list, [ring], rng)
    slope = report["slopes"].get(ring.tag())
    if len(n_list) >= 3 and not (3.0 <= slope <= 5.0):
        problems.append(f"encrypt slope {slope:.2f} outside [3, 5]")
    keygen_rows = bench_mod.bench_keygen(grid_n, grid_p, ring, rng)
    mono = bench_mod.keygen_monotonicity(keygen_rows)
    if not mono["n_strictly_increasing"]:
        problems.append("keygen not strictly increasing in n")
    if not mono["p_non_decreasing"]:
        problems.append("keygen decreasing in p")
    density = report["density"]
    detail = "; ".join(problems) or (
        f"slope={slope:.2f}; density: {density.aggregate_squarefree_cubic} squarefree"
        f" cubics, ratio {density.aggregate_ratio:.3f} of full"
    )
    return CheckResult("complexity-shape", not problems, detail)


def check_round_trips(scale: str = "full") -> CheckResult:
    """Serialization byte-exactness and encrypt/decrypt identity."""
    rng = Random(0x707)
    problems = []
    map_count = 20 if scale == "smoke" else 100
    rings = [make_ring("Z", 256), make_ring("F", 127), make_ring("Z", 65536)]
    for i in range(map_count):
        ring = rings[i % len(rings)]
        n = 4 + i % 5
        walk = sample_zwalk(ring, 1 + i % 3, rng)
        pm = zwalk_symbolic(n, ring, walk)
        text = pm.serialize()
        back = PolyMap.deserialize(text)
        if back != pm or back.serialize() != text:
            problems.append(f"map {i}: round trip not byte-exact")
            break
    ring = make_ring("Z", 256)
    rule = make_public_rule(10, ring, rng=rng, walk_length=10)
    plain_count = 100 if scale == "smoke" else 1000
    for _ in range(plain_count):
        x = tuple(rng.randrange(256) for _ in range(10))
        if decrypt(rule.private, encrypt(rule.public, x)) != x:
            problems.append(f"encrypt/decrypt failed at {x}")
            break
    detail = "; ".join(problems) or (
        f"{map_count} maps byte-exact; {plain_count} plaintext round trips"
    )
    return CheckResult("round-trips", not problems, detail)


ALL_CHECKS = [
    check_graph_facts,
    check_girth,
    check_components,
    check_edge_invariance,
    check_step_inverse,
    check_z_inverse_literal,
    check_z_inverse_operative,
    check_stability,
    check_protocol,
    check_order_bounds,
    check_complexity_shape,
    check_round_trips,
]


def run_suite(scale: str = "smoke") -> list[CheckResult]:
    return [check(scale) for check in ALL_CHECKS]
