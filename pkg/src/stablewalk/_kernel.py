"""numpy kernels for sparse multivariate terms.

A term block is a pair ``(coeffs, exps)``: ``coeffs`` is a uint64 vector of
canonical residues and ``exps`` a (T, d) uint8 matrix of exponent rows.  All
arithmetic is exact: moduli are capped at 2**32, so coefficient products and
the grouped sums used during collection stay below 2**64.

Per-variable exponents must stay below 16 while a block is un-collapsed (the
4-bit packing used for grouping); composition of two cubic maps peaks at
exponent 9 per variable, well inside the lane.
"""

from __future__ import annotations

import numpy as np

_LANE_VARS = 16  # 4 bits per variable, 16 variables per uint64 lane


def empty_block(d: int) -> tuple[np.ndarray, np.ndarray]:
    return np.zeros(0, dtype=np.uint64), np.zeros((0, d), dtype=np.uint8)


def const_block(value: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    if value == 0:
        return empty_block(d)
    return (
        np.array([value], dtype=np.uint64),
        np.zeros((1, d), dtype=np.uint8),
    )


def _pack_keys(exps: np.ndarray) -> list[np.ndarray]:
    """Pack exponent rows into uint64 lanes (4 bits per variable)."""
    d = exps.shape[1]
    lanes = []
    for start in range(0, d, _LANE_VARS):
        chunk = exps[:, start : start + _LANE_VARS].astype(np.uint64)
        lane = np.zeros(exps.shape[0], dtype=np.uint64)
        for t in range(chunk.shape[1]):
            lane = (lane << np.uint64(4)) | chunk[:, t]
        lanes.append(lane)
    return lanes


def collapse(
    coeffs: np.ndarray, exps: np.ndarray, modulus: int
) -> tuple[np.ndarray, np.ndarray]:
    """Group equal monomials, sum coefficients mod m, drop zero terms."""
    if coeffs.shape[0] == 0:
        return coeffs, exps
    keys = _pack_keys(exps)
    order = np.lexsort(keys[::-1])
    coeffs = coeffs[order]
    exps = exps[order]
    keys = [k[order] for k in keys]
    new_group = np.zeros(coeffs.shape[0], dtype=bool)
    new_group[0] = True
    for k in keys:
        new_group[1:] |= k[1:] != k[:-1]
    starts = np.flatnonzero(new_group)
    sums = np.add.reduceat(coeffs, starts) % np.uint64(modulus)
    keep = sums != 0
    return sums[keep], exps[starts][keep]


def scale_block(
    coeffs: np.ndarray, exps: np.ndarray, c: int, modulus: int
) -> tuple[np.ndarray, np.ndarray]:
    c %= modulus
    if c == 0 or coeffs.shape[0] == 0:
        return empty_block(exps.shape[1])
    return coeffs * np.uint64(c) % np.uint64(modulus), exps


def mul_blocks(
    a: tuple[np.ndarray, np.ndarray],
    b: tuple[np.ndarray, np.ndarray],
    modulus: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Full sparse product of two term blocks, collapsed."""
    ca, ea = a
    cb, eb = b
    d = ea.shape[1]
    if ca.shape[0] == 0 or cb.shape[0] == 0:
        return empty_block(d)
    coeffs = (ca[:, None] * cb[None, :] % np.uint64(modulus)).reshape(-1)
    exps = (ea[:, None, :] + eb[None, :, :]).reshape(-1, d)
    return collapse(coeffs, exps, modulus)


def add_blocks(
    blocks: list[tuple[np.ndarray, np.ndarray]], modulus: int
) -> tuple[np.ndarray, np.ndarray]:
    blocks = [b for b in blocks if b[0].shape[0]]
    if not blocks:
        raise ValueError("add_blocks needs the dimension via at least one block")
    coeffs = np.concatenate([b[0] for b in blocks])
    exps = np.concatenate([b[1] for b in blocks])
    return collapse(coeffs, exps, modulus)


def linmul_block(
    block: tuple[np.ndarray, np.ndarray],
    var: int,
    const: int,
    modulus: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Multiply a block by the monic linear form (x_var + const), uncollapsed."""
    coeffs, exps = block
    d = exps.shape[1]
    if coeffs.shape[0] == 0:
        return empty_block(d)
    shifted = exps.copy()
    shifted[:, var] += 1
    parts_c = [coeffs]
    parts_e = [shifted]
    c = const % modulus
    if c:
        parts_c.append(coeffs * np.uint64(c) % np.uint64(modulus))
        parts_e.append(exps)
    return np.concatenate(parts_c), np.concatenate(parts_e)


def neg_block(
    block: tuple[np.ndarray, np.ndarray], modulus: int
) -> tuple[np.ndarray, np.ndarray]:
    coeffs, exps = block
    return (np.uint64(modulus) - coeffs) % np.uint64(modulus), exps


# -- composition -------------------------------------------------------------


class ProductCache:
    """Memoized products of inner-map coordinates, keyed by outer monomial.

    Shared across output coordinates (and across successive compositions with
    the same inner map), which is what makes iterated powering affordable.
    """

    def __init__(self, inner: list[tuple[np.ndarray, np.ndarray]], modulus: int):
        self.inner = inner
        self.modulus = modulus
        d = inner[0][1].shape[1]
        self._cache: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]] = {
            (0,) * d: const_block(1, d)
        }

    def product(self, mono: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        hit = self._cache.get(mono)
        if hit is not None:
            return hit
        var = next(i for i, e in enumerate(mono) if e)
        rest = list(mono)
        rest[var] -= 1
        sub = self.product(tuple(rest))
        result = mul_blocks(sub, self.inner[var], self.modulus)
        self._cache[mono] = result
        return result


def compose_blocks(
    outer: list[tuple[np.ndarray, np.ndarray]],
    cache: ProductCache,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Substitute the cache's inner coordinates into each outer coordinate."""
    modulus = cache.modulus
    out = []
    for coeffs, exps in outer:
        d = exps.shape[1]
        parts_c: list[np.ndarray] = []
        parts_e: list[np.ndarray] = []
        for row in range(coeffs.shape[0]):
            pc, pe = cache.product(tuple(int(e) for e in exps[row]))
            if pc.shape[0] == 0:
                continue
            parts_c.append(pc * coeffs[row] % np.uint64(modulus))
            parts_e.append(pe)
        if not parts_c:
            out.append(empty_block(d))
            continue
        out.append(
            collapse(np.concatenate(parts_c), np.concatenate(parts_e), modulus)
        )
    return out


# -- evaluation --------------------------------------------------------------


def eval_program(exps: np.ndarray, max_degree: int = 3) -> np.ndarray:
    """Index form of a degree<=3 block: (T, 3) of 1-based variable indices.

    Index 0 stands for "no factor"; repeated variables appear repeatedly.
    """
    T, _ = exps.shape
    prog = np.zeros((T, max_degree), dtype=np.int64)
    rows, cols = np.nonzero(exps)
    reps = exps[rows, cols].astype(np.int64)
    rows = np.repeat(rows, reps)
    cols = np.repeat(cols, reps)
    if rows.shape[0]:
        first = np.searchsorted(rows, np.arange(T))
        slot = np.arange(rows.shape[0]) - first[rows]
        prog[rows, slot] = cols + 1
    return prog


def eval_with_program(
    coeffs: np.ndarray,
    prog: np.ndarray,
    values: np.ndarray,
    modulus: int,
) -> int:
    """Evaluate a degree<=3 block at a point (values: canonical residues)."""
    ext = np.concatenate([np.ones(1, dtype=np.uint64), values.astype(np.uint64)])
    acc = coeffs.copy()
    m = np.uint64(modulus)
    for j in range(prog.shape[1]):
        acc = acc * ext[prog[:, j]] % m
    return int(acc.sum() % m)


def eval_general(
    coeffs: np.ndarray,
    exps: np.ndarray,
    values: np.ndarray,
    modulus: int,
) -> int:
    """Evaluate a block of any degree via per-variable power tables."""
    m = np.uint64(modulus)
    acc = coeffs.copy()
    for var in range(exps.shape[1]):
        e = exps[:, var]
        top = int(e.max()) if e.shape[0] else 0
        if top == 0:
            continue
        table = np.ones(top + 1, dtype=np.uint64)
        v = int(values[var]) % modulus
        for k in range(1, top + 1):
            table[k] = table[k - 1] * np.uint64(v) % m
        acc = acc * table[e] % m
    return int(acc.sum() % m)
