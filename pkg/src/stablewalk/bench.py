"""Deterministic timing harness for key generation and encryption.

Timings use a monotonic clock, discard one warmup run and keep the median of
five.  Rows are keyed by (operation, n, p, ring); the human table mirrors the
n-by-p / n-by-ring layouts, and every row is also emitted as a machine line
``op,n,p,ring,micros``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from random import Random

from .keyex import make_public_rule
from .multipoly import monomial_density
from .ring import RingSpec

REPEATS = 5


@dataclass(frozen=True)
class BenchRow:
    operation: str
    n: int
    p: int
    ring_tag: str
    micros: float

    def machine_line(self) -> str:
        return f"{self.operation},{self.n},{self.p},{self.ring_tag.replace(' ', ':')},{self.micros:.1f}"


def _median_micros(fn) -> float:
    fn()  # warmup, discarded
    samples = []
    for _ in range(REPEATS):
        start = time.perf_counter_ns()
        fn()
        samples.append((time.perf_counter_ns() - start) / 1000.0)
    samples.sort()
    return samples[len(samples) // 2]


def bench_keygen(
    n_list: list[int], p_list: list[int], ring: RingSpec, rng: Random
) -> list[BenchRow]:
    """Time public-rule generation over the (n, p) grid."""
    rows = []
    for n in n_list:
        for p in p_list:
            colours = tuple(ring.sample_regular(rng) for _ in range(p))
            t1_seed = rng.randrange(2**31)

            def build(n=n, colours=colours, seed=t1_seed):
                make_public_rule(n, ring, colours=colours, rng=Random(seed))

            rows.append(BenchRow("keygen", n, p, ring.tag(), _median_micros(build)))
    return rows


def encrypt_walk_length(n: int) -> int:
    """Walk length used for the encryption-timing maps; long enough that the
    map densifies toward the full cubic monomial budget."""
    return max(10, n)


def bench_encrypt(
    n_list: list[int], rings: list[RingSpec], rng: Random
) -> tuple[list[BenchRow], dict]:
    """Time map evaluation per (n, ring); also reports the log-log slope in n
    and a monomial-density census of the largest generated map."""
    rows = []
    density_report = None
    for ring in rings:
        for n in n_list:
            p = encrypt_walk_length(n)
            colours = tuple(ring.sample_regular(rng) for _ in range(p))
            rule = make_public_rule(n, ring, colours=colours, rng=rng)
            public = rule.public
            plaintext = tuple(ring.sample(rng) for _ in range(n))
            public.eval(plaintext)  # build the eval program outside the timing

            def run(public=public, plaintext=plaintext):
                public.eval(plaintext)

            rows.append(BenchRow("encrypt", n, p, ring.tag(), _median_micros(run)))
            if density_report is None or n == max(n_list):
                density_report = monomial_density(public)
    slopes = {}
    for ring in rings:
        points = [
            (row.n, row.micros)
            for row in rows
            if row.ring_tag == ring.tag() and row.operation == "encrypt"
        ]
        if len(points) >= 2:
            slopes[ring.tag()] = fit_loglog_slope(points)
    return rows, {"slopes": slopes, "density": density_report}


def fit_loglog_slope(points: list[tuple[int, float]]) -> float:
    """Least-squares slope of log(micros) against log(n)."""
    xs = [math.log(n) for n, _ in points]
    ys = [math.log(max(us, 1e-9)) for _, us in points]
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    num = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    den = sum((x - mean_x) ** 2 for x in xs)
    return num / den


def keygen_monotonicity(rows: list[BenchRow]) -> dict:
    """Strict growth in n at fixed p, non-decreasing growth in p at fixed n."""
    by_key = {(r.n, r.p): r.micros for r in rows if r.operation == "keygen"}
    ns = sorted({r.n for r in rows})
    ps = sorted({r.p for r in rows})
    n_ok = all(
        by_key[(lo, p)] < by_key[(hi, p)]
        for p in ps
        for lo, hi in zip(ns, ns[1:])
        if (lo, p) in by_key and (hi, p) in by_key
    )
    p_ok = all(
        by_key[(n, lo)] <= by_key[(n, hi)]
        for n in ns
        for lo, hi in zip(ps, ps[1:])
        if (n, lo) in by_key and (n, hi) in by_key
    )
    return {"n_strictly_increasing": n_ok, "p_non_decreasing": p_ok}


def format_keygen_table(rows: list[BenchRow]) -> str:
    ns = sorted({r.n for r in rows})
    ps = sorted({r.p for r in rows})
    by_key = {(r.n, r.p): r.micros for r in rows}
    header = "      " + "".join(f"{'p=' + str(p):>12}" for p in ps)
    lines = [header]
    for n in ns:
        cells = "".join(f"{by_key[(n, p)] / 1000.0:>12.1f}" for p in ps)
        lines.append(f"n={n:<4}" + cells)
    return "\n".join(lines) + "\n(milliseconds, median of 5)"


def format_encrypt_table(rows: list[BenchRow]) -> str:
    ns = sorted({r.n for r in rows})
    tags = sorted({r.ring_tag for r in rows})
    by_key = {(r.n, r.ring_tag): r.micros for r in rows}
    header = "      " + "".join(f"{tag.replace(' ', '_'):>14}" for tag in tags)
    lines = [header]
    for n in ns:
        cells = "".join(f"{by_key[(n, tag)] / 1000.0:>14.3f}" for tag in tags)
        lines.append(f"n={n:<4}" + cells)
    return "\n".join(lines) + "\n(milliseconds, median of 5)"
