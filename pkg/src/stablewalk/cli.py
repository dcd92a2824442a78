"""Command-line surface.

Exit codes: 0 success, 1 verification failure, 2 usage error.  Every command
that draws randomness requires --seed, and identical seeds and flags produce
byte-identical output apart from measured timings.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from random import Random

from . import bench as bench_mod
from . import verify as verify_mod
from .errors import InsufficientRegularElements, StableWalkError
from .flags import ZWalk, zwalk_symbolic
from .graph import Vertex, Walk, graph_facts, point_walk_symbolic, walk_apply
from .keyex import (
    PrivateRule,
    decrypt,
    encrypt,
    make_private_seed,
    make_public_rule,
    run_exchange,
)
from .multipoly import PolyMap, monomial_density
from .ring import parse_ring

USAGE_ERROR = 2


def _ring_arg(text: str):
    try:
        return parse_ring(text)
    except (ValueError, StableWalkError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _int_list(text: str) -> list[int]:
    return [int(c) for c in text.split(",")]


def _vector(text: str) -> tuple[int, ...]:
    return tuple(int(c) for c in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablewalk",
        description="cubic walk groups over finite rings: graphs, key exchange, benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ring-info", help="describe a ring and its regular elements")
    p.add_argument("--ring", type=_ring_arg, required=True, help="Z:<m> or F:<p>")

    p = sub.add_parser("graph", help="graph oracles")
    graph_sub = p.add_subparsers(dest="graph_command", required=True)
    g = graph_sub.add_parser("verify", help="order, degree, bipartiteness, girth")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--q", type=int, required=True)

    p = sub.add_parser("walk", help="run or symbolize walks")
    walk_sub = p.add_subparsers(dest="walk_command", required=True)
    w = walk_sub.add_parser("run", help="apply a colour walk to a vertex")
    w.add_argument("--ring", type=_ring_arg, required=True)
    w.add_argument("--start", required=True, help="vertex, e.g. 'P 0,0,0'")
    w.add_argument("--colours", required=True, help="comma-separated colours")
    w = walk_sub.add_parser("symbolic", help="the walk as a polynomial map")
    w.add_argument("--ring", type=_ring_arg, required=True)
    w.add_argument("--n", type=int, required=True, help="graph dimension")
    group = w.add_mutually_exclusive_group(required=True)
    group.add_argument("--colours", help="point-walk colours (map of K^n)")
    group.add_argument("--pairs", help="flag-walk pairs a:b,... (map of K^{n+1})")
    w.add_argument("--out", type=Path, help="write the map here instead of stdout")

    p = sub.add_parser("keygen", help="generate a public rule and its private key")
    p.add_argument("--ring", type=_ring_arg, required=True)
    p.add_argument("--n", type=int, required=True, help="map dimension")
    p.add_argument("--length", type=int, required=True, help="walk length (password length)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--public-out", type=Path, required=True)
    p.add_argument("--private-out", type=Path, required=True)

    p = sub.add_parser("dh-demo", help="run a full key exchange in process")
    p.add_argument("--ring", type=_ring_arg, required=True)
    p.add_argument("--n", type=int, required=True, help="map dimension")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--export-secret", action="store_true", help="append the secret walks")

    p = sub.add_parser("encrypt", help="evaluate a public rule")
    p.add_argument("--public", type=Path, required=True)
    p.add_argument("--vector", type=_vector, required=True)

    p = sub.add_parser("decrypt", help="invert a ciphertext with the private key")
    p.add_argument("--private", type=Path, required=True)
    p.add_argument("--vector", type=_vector, required=True)

    p = sub.add_parser("bench", help="timing harness")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)
    b = bench_sub.add_parser("keygen", help="public-rule generation over an (n, p) grid")
    b.add_argument("--ring", type=_ring_arg, required=True)
    b.add_argument("--n-list", type=_int_list, required=True)
    b.add_argument("--p-list", type=_int_list, required=True)
    b.add_argument("--seed", type=int, required=True)
    b = bench_sub.add_parser("encrypt", help="map evaluation over an n grid")
    b.add_argument("--rings", type=str, required=True, help="semicolon-separated tags")
    b.add_argument("--n-list", type=_int_list, required=True)
    b.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("verify-suite", help="run the acceptance oracles")
    p.add_argument("--scale", choices=("smoke", "full"), default="smoke")
    return parser


def _cmd_ring_info(args) -> int:
    ring = args.ring
    print(f"ring: {ring.tag()}")
    print(f"kind: {'prime field' if ring.is_field() else 'residue ring'}")
    print(f"regular elements: {ring.regular_count()}")
    print(f"supports walk groups (>= 3 regular): {ring.count_regular_check()}")
    return 0


def _cmd_graph_verify(args) -> int:
    try:
        ring = parse_ring(f"F {args.q}")
    except (ValueError, StableWalkError):
        ring = parse_ring(f"Z {args.q}")
    facts = graph_facts(args.k, ring)
    k = max(args.k, 2)
    bound = k + 5 if k % 2 else k + 4
    print(f"vertices: {facts.vertex_count}")
    print(f"bipartite: {facts.is_bipartite}")
    print(f"regular degree: {facts.regular_degree}")
    print(f"girth: {facts.girth} (bound {bound})")
    ok = (
        facts.vertex_count == 2 * ring.modulus**k
        and facts.is_bipartite
        and facts.regular_degree == ring.modulus
        and (not ring.is_field() or facts.girth >= bound)
    )
    print("verdict:", "ok" if ok else "FAILED")
    return 0 if ok else 1


def _cmd_walk_run(args) -> int:
    start = Vertex.from_text(args.start)
    walk = Walk.from_text(args.colours)
    print(walk_apply(args.ring, start, walk).to_text())
    return 0


def _cmd_walk_symbolic(args) -> int:
    if args.pairs:
        pm = zwalk_symbolic(args.n, args.ring, ZWalk.from_text(args.pairs))
    else:
        pm = point_walk_symbolic(args.n, args.ring, _int_list(args.colours))
    text = pm.serialize()
    if args.out:
        args.out.write_text(text)
        print(f"wrote map: dim={pm.dim} degree={pm.degree()} terms={pm.term_count()}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_keygen(args) -> int:
    rng = Random(args.seed)
    rule = make_public_rule(args.n, args.ring, rng=rng, walk_length=args.length)
    args.public_out.write_text(rule.public.serialize())
    args.private_out.write_text(rule.private.serialize())
    dens = monomial_density(rule.public)
    print(f"public rule: dim={args.n} degree={rule.public.degree()} terms={rule.public.term_count()}")
    print(
        f"monomial density: {dens.aggregate_squarefree_cubic} squarefree cubics,"
        f" ratio {dens.aggregate_ratio:.4f} of the full C(n,3) budget"
    )
    return 0


def _cmd_dh_demo(args) -> int:
    ring = args.ring
    if not ring.count_regular_check():
        print(
            f"error: {ring.tag()} needs at least 3 regular elements for the walk groups",
            file=sys.stderr,
        )
        return USAGE_ERROR
    if args.na < 1 or args.nb < 1:
        print("error: exponents must be >= 1", file=sys.stderr)
        return USAGE_ERROR
    rng = Random(args.seed)
    secret = make_private_seed(args.n, ring, rng, g_length=2, h_length=1, tau_mixing=2)
    v = tuple(ring.sample(rng) for _ in range(args.n))
    transcript = run_exchange(secret, args.na, args.nb, v)
    sys.stdout.write(transcript.serialize(secret if args.export_secret else None))
    print()
    print(f"collision degree: {transcript.collision.degree()}")
    print("shared:", ",".join(str(c) for c in transcript.shared))
    return 0


def _cmd_encrypt(args) -> int:
    pm = PolyMap.deserialize(args.public.read_text())
    y = encrypt(pm, args.vector)
    print(",".join(str(c) for c in y))
    return 0


def _cmd_decrypt(args) -> int:
    private = PrivateRule.deserialize(args.private.read_text())
    x = decrypt(private, args.vector)
    print(",".join(str(c) for c in x))
    return 0


def _cmd_bench_keygen(args) -> int:
    rows = bench_mod.bench_keygen(args.n_list, args.p_list, args.ring, Random(args.seed))
    print(bench_mod.format_keygen_table(rows))
    mono = bench_mod.keygen_monotonicity(rows)
    print(f"monotone in n (strict): {mono['n_strictly_increasing']}")
    print(f"monotone in p: {mono['p_non_decreasing']}")
    for row in rows:
        print(row.machine_line())
    return 0


def _cmd_bench_encrypt(args) -> int:
    rings = [parse_ring(tag) for tag in args.rings.split(";")]
    rows, report = bench_mod.bench_encrypt(args.n_list, rings, Random(args.seed))
    print(bench_mod.format_encrypt_table(rows))
    ok = True
    for tag, slope in report["slopes"].items():
        line = f"log-log slope vs n [{tag}]: {slope:.2f}"
        if len(args.n_list) >= 3 and not 3.0 <= slope <= 5.0:
            line += "  (outside [3, 5])"
            ok = False
        print(line)
    density = report["density"]
    if density is not None:
        print(
            f"monomial density (largest map): {density.aggregate_squarefree_cubic}"
            f" squarefree cubics, ratio {density.aggregate_ratio:.4f}"
        )
    for row in rows:
        print(row.machine_line())
    return 0 if ok else 1


def _cmd_verify_suite(args) -> int:
    results = verify_mod.run_suite(args.scale)
    for result in results:
        print(result.status_line())
    bad = [r for r in results if not r.consistent]
    print(f"{len(results) - len(bad)}/{len(results)} checks consistent")
    return 0 if not bad else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else USAGE_ERROR
    handlers = {
        "ring-info": _cmd_ring_info,
        "graph": _cmd_graph_verify,
        "keygen": _cmd_keygen,
        "dh-demo": _cmd_dh_demo,
        "encrypt": _cmd_encrypt,
        "decrypt": _cmd_decrypt,
        "verify-suite": _cmd_verify_suite,
    }
    try:
        if args.command == "walk":
            handler = _cmd_walk_run if args.walk_command == "run" else _cmd_walk_symbolic
        elif args.command == "bench":
            handler = (
                _cmd_bench_keygen
                if args.bench_command == "keygen"
                else _cmd_bench_encrypt
            )
        else:
            handler = handlers[args.command]
        return handler(args)
    except InsufficientRegularElements as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except StableWalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
