"""Sparse multivariate polynomials over a finite ring and polynomial maps.

Semantics are formal, not functional: no reduction by x**q = x ever happens,
so two maps are equal only when their collected canonical forms agree
coordinatewise.  Coefficients vanishing mod m are dropped at collection time.

Canonical term order is graded-lexicographic, grade first, then the exponent
sequence compared with x1 most significant; serialization lists terms in
descending canonical order.

Serialization format ``STABLEMAP v1`` (text, line oriented, byte exact)::

    STABLEMAP v1
    ring Z 256
    dim 3
    coord 1: 2*x1^2*x2 + 4*x3 + 1
    coord 2: 0
    coord 3: 1*x3

Zero exponents are omitted, exponent 1 is written without ``^``, a constant
term is a bare coefficient and an empty polynomial is ``0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

import numpy as np

from . import _kernel
from .errors import DegreeOverflow, DimensionMismatch, MapParseError, SingularMatrix
from .ring import RingSpec, parse_ring

MAX_EXPONENT = 255

Monomial = tuple[int, ...]

# dict-based arithmetic below this total term count; numpy kernels above
_KERNEL_THRESHOLD = 64


def _mono_key(mono: Monomial) -> tuple[int, Monomial]:
    return (sum(mono), mono)


class Poly:
    """A sparse polynomial: nonzero canonical coefficients keyed by exponents."""

    __slots__ = ("ring", "dim", "terms")

    def __init__(self, ring: RingSpec, dim: int, terms: dict[Monomial, int] | None = None):
        self.ring = ring
        self.dim = dim
        cleaned: dict[Monomial, int] = {}
        for mono, coeff in (terms or {}).items():
            c = coeff % ring.modulus
            if c == 0:
                continue
            if len(mono) != dim:
                raise DimensionMismatch(f"monomial {mono} does not have {dim} exponents")
            if any(e < 0 or e > MAX_EXPONENT for e in mono):
                raise DegreeOverflow(f"exponent out of range in {mono}")
            cleaned[mono] = c
        self.terms = cleaned

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, ring: RingSpec, dim: int) -> "Poly":
        return cls(ring, dim)

    @classmethod
    def const(cls, ring: RingSpec, dim: int, value: int) -> "Poly":
        return cls(ring, dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, ring: RingSpec, dim: int, index: int) -> "Poly":
        """The polynomial x_index, 1-based."""
        mono = tuple(1 if i == index - 1 else 0 for i in range(dim))
        return cls(ring, dim, {mono: 1})

    # -- queries ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Max total degree of stored terms; 0 for constants and zero."""
        if not self.terms:
            return 0
        return max(sum(m) for m in self.terms)

    def canonical_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in descending graded-lex order (x1 most significant)."""
        return sorted(self.terms.items(), key=lambda kv: _mono_key(kv[0]), reverse=True)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.dim, 0)

    # -- arithmetic -------------------------------------------------------------

    def _check_compatible(self, other: "Poly") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimension {self.dim} vs {other.dim}")
        if self.ring != other.ring:
            raise DimensionMismatch(f"ring {self.ring.tag()} vs {other.ring.tag()}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check_compatible(other)
        terms = dict(self.terms)
        m = self.ring.modulus
        for mono, c in other.terms.items():
            s = (terms.get(mono, 0) + c) % m
            if s:
                terms[mono] = s
            else:
                terms.pop(mono, None)
        out = Poly.__new__(Poly)
        out.ring, out.dim, out.terms = self.ring, self.dim, terms
        return out

    def __neg__(self) -> "Poly":
        m = self.ring.modulus
        out = Poly.__new__(Poly)
        out.ring, out.dim = self.ring, self.dim
        out.terms = {mono: m - c for mono, c in self.terms.items()}
        return out

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check_compatible(other)
        m = self.ring.modulus
        if len(self.terms) * len(other.terms) > _KERNEL_THRESHOLD**2:
            block = _kernel.mul_blocks(self._block(), other._block(), m)
            return Poly._from_block(self.ring, self.dim, block)
        acc: dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = tuple(ea + eb for ea, eb in zip(ma, mb))
                s = (acc.get(mono, 0) + ca * cb) % m
                if s:
                    acc[mono] = s
                else:
                    acc.pop(mono, None)
        out = Poly.__new__(Poly)
        out.ring, out.dim, out.terms = self.ring, self.dim, acc
        return out

    def scale(self, c: int) -> "Poly":
        m = self.ring.modulus
        c %= m
        out = Poly.__new__(Poly)
        out.ring, out.dim = self.ring, self.dim
        out.terms = {}
        if c:
            for mono, coeff in self.terms.items():
                s = coeff * c % m
                if s:
                    out.terms[mono] = s
        return out

    def eval(self, values: list[int] | tuple[int, ...]) -> int:
        if len(values) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} values, got {len(values)}")
        ring = self.ring
        total = 0
        for mono, coeff in self.terms.items():
            v = coeff
            for idx, e in enumerate(mono):
                if e:
                    v = v * pow(values[idx] % ring.modulus, e, ring.modulus)
            total += v
        return total % ring.modulus

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Poly)
            and self.ring == other.ring
            and self.dim == other.dim
            and self.terms == other.terms
        )

    __hash__ = None  # mutable dict inside; identity hashing would mislead

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Poly({format_poly(self)})"

    # -- kernel bridge -----------------------------------------------------------

    def _block(self) -> tuple[np.ndarray, np.ndarray]:
        items = self.canonical_terms()
        coeffs = np.array([c for _, c in items], dtype=np.uint64)
        if items:
            exps = np.array([m for m, _ in items], dtype=np.uint8)
        else:
            exps = np.zeros((0, self.dim), dtype=np.uint8)
        return coeffs, exps

    @classmethod
    def _from_block(
        cls, ring: RingSpec, dim: int, block: tuple[np.ndarray, np.ndarray]
    ) -> "Poly":
        coeffs, exps = block
        out = cls.__new__(cls)
        out.ring, out.dim = ring, dim
        out.terms = {
            tuple(int(e) for e in exps[i]): int(coeffs[i]) for i in range(coeffs.shape[0])
        }
        return out


def format_poly(p: Poly) -> str:
    """Canonical single-line text form of a polynomial."""
    items = p.canonical_terms()
    if not items:
        return "0"
    chunks = []
    for mono, coeff in items:
        if not any(mono):
            chunks.append(str(coeff))
            continue
        factors = [str(coeff)]
        for idx, e in enumerate(mono):
            if e == 0:
                continue
            factors.append(f"x{idx + 1}" if e == 1 else f"x{idx + 1}^{e}")
        chunks.append("*".join(factors))
    return " + ".join(chunks)


def parse_poly(ring: RingSpec, dim: int, text: str, line_no: int | None = None) -> Poly:
    text = text.strip()
    if text == "0":
        return Poly.zero(ring, dim)
    terms: dict[Monomial, int] = {}
    for chunk in text.split(" + "):
        factors = chunk.split("*")
        try:
            coeff = int(factors[0], 10)
        except ValueError:
            raise MapParseError(f"bad coefficient {factors[0]!r}", line_no) from None
        exps = [0] * dim
        for factor in factors[1:]:
            if not factor.startswith("x"):
                raise MapParseError(f"bad factor {factor!r}", line_no)
            body = factor[1:]
            if "^" in body:
                var_text, exp_text = body.split("^", 1)
            else:
                var_text, exp_text = body, "1"
            try:
                var = int(var_text, 10)
                exp = int(exp_text, 10)
            except ValueError:
                raise MapParseError(f"bad factor {factor!r}", line_no) from None
            if not 1 <= var <= dim:
                raise MapParseError(f"variable x{var} out of range", line_no)
            exps[var - 1] += exp
        mono = tuple(exps)
        terms[mono] = (terms.get(mono, 0) + coeff) % ring.modulus
    return Poly(ring, dim, terms)


class PolyMap:
    """An n-tuple of polynomials representing a transformation of K^n."""

    __slots__ = ("ring", "dim", "coords", "_eval_cache")

    def __init__(self, ring: RingSpec, coords: list[Poly] | tuple[Poly, ...]):
        coords = tuple(coords)
        if not coords:
            raise DimensionMismatch("a map needs at least one coordinate")
        dim = coords[0].dim
        for p in coords:
            if p.dim != dim or p.ring != ring:
                raise DimensionMismatch("coordinate polynomials disagree on dim/ring")
        if len(coords) != dim:
            raise DimensionMismatch(
                f"{len(coords)} coordinates for dimension {dim}; maps are K^d -> K^d"
            )
        self.ring = ring
        self.dim = dim
        self.coords = coords
        self._eval_cache = None

    @classmethod
    def identity(cls, ring: RingSpec, dim: int) -> "PolyMap":
        return cls(ring, [Poly.variable(ring, dim, i + 1) for i in range(dim)])

    def is_identity(self) -> bool:
        return self == PolyMap.identity(self.ring, self.dim)

    def degree(self) -> int:
        return max(p.degree() for p in self.coords)

    def term_count(self) -> int:
        return sum(len(p.terms) for p in self.coords)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PolyMap)
            and self.ring == other.ring
            and self.dim == other.dim
            and all(a == b for a, b in zip(self.coords, other.coords))
        )

    __hash__ = None

    def __repr__(self) -> str:  # pragma: no cover
        return f"PolyMap(dim={self.dim}, ring={self.ring.tag()}, terms={self.term_count()})"

    # -- evaluation ---------------------------------------------------------------

    def eval(self, values: list[int] | tuple[int, ...]) -> tuple[int, ...]:
        if len(values) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} values, got {len(values)}")
        if self.term_count() >= _KERNEL_THRESHOLD and self.degree() <= 3:
            return self._eval_kernel(values)
        return tuple(p.eval(values) for p in self.coords)

    def _eval_kernel(self, values) -> tuple[int, ...]:
        if self._eval_cache is None:
            cache = []
            for p in self.coords:
                coeffs, exps = p._block()
                cache.append((coeffs, _kernel.eval_program(exps)))
            self._eval_cache = cache
        vec = np.array([v % self.ring.modulus for v in values], dtype=np.uint64)
        return tuple(
            _kernel.eval_with_program(coeffs, prog, vec, self.ring.modulus)
            for coeffs, prog in self._eval_cache
        )

    def eval_opcount(self) -> int:
        """Multiplications plus additions one evaluation performs (dict path)."""
        ops = 0
        for p in self.coords:
            for mono in p.terms:
                ops += sum(mono)  # multiplies for the monomial and coefficient
            ops += max(len(p.terms) - 1, 0)  # additions
        return ops

    # -- composition ----------------------------------------------------------------

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """The map self(inner(x)): inner applied first, fully collected."""
        if self.dim != inner.dim or self.ring != inner.ring:
            raise DimensionMismatch("composition needs matching dimension and ring")
        if self.degree() * inner.degree() > MAX_EXPONENT:
            raise DegreeOverflow(
                f"degree product {self.degree()}*{inner.degree()} exceeds {MAX_EXPONENT}"
            )
        cache = _kernel.ProductCache([p._block() for p in inner.coords], self.ring.modulus)
        return self._compose_cached(cache)

    def _compose_cached(self, cache: "_kernel.ProductCache") -> "PolyMap":
        blocks = _kernel.compose_blocks([p._block() for p in self.coords], cache)
        coords = [Poly._from_block(self.ring, self.dim, b) for b in blocks]
        return PolyMap(self.ring, coords)

    def power(self, k: int) -> "PolyMap":
        """self composed with itself k times, by square and multiply."""
        if k < 1:
            raise ValueError("power needs k >= 1")
        result: PolyMap | None = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result.compose(base)
            k >>= 1
            if not k:
                return result
            base = base.compose(base)

    # -- serialization ------------------------------------------------------------------

    def serialize(self) -> str:
        lines = ["STABLEMAP v1", f"ring {self.ring.tag()}", f"dim {self.dim}"]
        for i, p in enumerate(self.coords, start=1):
            lines.append(f"coord {i}: {format_poly(p)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "PolyMap":
        lines = text.splitlines()
        if not lines or lines[0].strip() != "STABLEMAP v1":
            raise MapParseError("expected header 'STABLEMAP v1'", 1)
        if len(lines) < 3:
            raise MapParseError("truncated map: missing ring/dim lines", len(lines))
        if not lines[1].startswith("ring "):
            raise MapParseError("expected 'ring <K> <m>'", 2)
        try:
            ring = parse_ring(lines[1][5:])
        except ValueError as exc:
            raise MapParseError(str(exc), 2) from None
        if not lines[2].startswith("dim "):
            raise MapParseError("expected 'dim <d>'", 3)
        try:
            dim = int(lines[2][4:].strip(), 10)
        except ValueError:
            raise MapParseError(f"bad dimension {lines[2][4:]!r}", 3) from None
        if dim < 1:
            raise MapParseError("dimension must be >= 1", 3)
        coords = []
        for i in range(dim):
            line_no = 4 + i
            if line_no - 1 >= len(lines):
                raise MapParseError(f"missing 'coord {i + 1}' line", line_no)
            line = lines[line_no - 1]
            prefix = f"coord {i + 1}:"
            if not line.startswith(prefix):
                raise MapParseError(f"expected {prefix!r}", line_no)
            coords.append(parse_poly(ring, dim, line[len(prefix):], line_no))
        return cls(ring, coords)


@dataclass(frozen=True)
class DensityStats:
    """Monomial census of a map: how close it is to a full cubic map."""

    dim: int
    squarefree_cubic: tuple[int, ...]
    total_terms: tuple[int, ...]
    cubic_slots: int

    @property
    def aggregate_squarefree_cubic(self) -> int:
        return sum(self.squarefree_cubic)

    @property
    def aggregate_terms(self) -> int:
        return sum(self.total_terms)

    @property
    def ratios(self) -> tuple[float, ...]:
        if self.cubic_slots == 0:
            return tuple(0.0 for _ in self.squarefree_cubic)
        return tuple(c / self.cubic_slots for c in self.squarefree_cubic)

    @property
    def aggregate_ratio(self) -> float:
        if self.cubic_slots == 0:
            return 0.0
        return self.aggregate_squarefree_cubic / (self.cubic_slots * self.dim)


def monomial_density(pm: PolyMap) -> DensityStats:
    """Count degree-3 squarefree terms per coordinate against C(d, 3)."""
    d = pm.dim
    slots = d * (d - 1) * (d - 2) // 6
    squarefree = []
    totals = []
    for p in pm.coords:
        count = sum(
            1 for mono in p.terms if sum(mono) == 3 and all(e <= 1 for e in mono)
        )
        squarefree.append(count)
        totals.append(len(p.terms))
    return DensityStats(d, tuple(squarefree), tuple(totals), slots)


# -- affine maps -------------------------------------------------------------------


FORM_DENSE = "dense"
FORM_FIRST_ROW = "first-row"


class AffineMap:
    """x -> A x + b with A invertible over K (determinant a regular element).

    The first-row form has all diagonal entries 1 and off-diagonal entries only
    in row 1, so its determinant is 1 and inversion is a sign flip.
    """

    __slots__ = ("ring", "dim", "matrix", "shift", "form")

    def __init__(self, ring: RingSpec, matrix, shift, form: str = FORM_DENSE):
        self.ring = ring
        self.matrix = tuple(tuple(ring.canon(v) for v in row) for row in matrix)
        self.shift = tuple(ring.canon(v) for v in shift)
        self.dim = len(self.shift)
        if len(self.matrix) != self.dim or any(len(r) != self.dim for r in self.matrix):
            raise DimensionMismatch("matrix/shift dimensions disagree")
        self.form = form
        if form == FORM_FIRST_ROW:
            self._check_first_row()

    def _check_first_row(self) -> None:
        for i, row in enumerate(self.matrix):
            for j, v in enumerate(row):
                if i == j:
                    if v != 1:
                        raise SingularMatrix("first-row form needs a unit diagonal")
                elif i != 0 and v != 0:
                    raise SingularMatrix("first-row form allows off-diagonals in row 1 only")

    @classmethod
    def identity(cls, ring: RingSpec, dim: int) -> "AffineMap":
        rows = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
        return cls(ring, rows, [0] * dim, FORM_FIRST_ROW)

    @classmethod
    def first_row(cls, ring: RingSpec, row_tail: list[int], shift=None) -> "AffineMap":
        """Build the first-row form from the off-diagonal entries of row 1."""
        dim = len(row_tail) + 1
        rows = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
        for j, v in enumerate(row_tail, start=1):
            rows[0][j] = ring.canon(v)
        return cls(ring, rows, shift or [0] * dim, FORM_FIRST_ROW)

    @classmethod
    def sample_first_row(
        cls, ring: RingSpec, dim: int, rng: Random, nonzero: int | None = None
    ) -> "AffineMap":
        """Seeded first-row matrix; ``nonzero`` limits how many entries mix in.

        The fully dense variant (nonzero=None) draws every row-1 entry from the
        nonzero elements.
        """
        tail = [0] * (dim - 1)
        positions = list(range(dim - 1))
        if nonzero is not None:
            positions = sorted(rng.sample(positions, min(nonzero, dim - 1)))
        for j in positions:
            tail[j] = rng.randrange(1, ring.modulus)
        return cls.first_row(ring, tail)

    def apply(self, values) -> tuple[int, ...]:
        if len(values) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} values")
        ring = self.ring
        out = []
        for i in range(self.dim):
            acc = self.shift[i]
            for j, a in enumerate(self.matrix[i]):
                if a:
                    acc += a * (values[j] % ring.modulus)
            out.append(acc % ring.modulus)
        return tuple(out)

    def to_map(self) -> PolyMap:
        coords = []
        for i in range(self.dim):
            terms: dict[Monomial, int] = {}
            for j, a in enumerate(self.matrix[i]):
                if a:
                    mono = tuple(1 if t == j else 0 for t in range(self.dim))
                    terms[mono] = a
            if self.shift[i]:
                terms[(0,) * self.dim] = self.shift[i]
            coords.append(Poly(self.ring, self.dim, terms))
        return PolyMap(self.ring, coords)

    def determinant(self) -> int:
        if self.form == FORM_FIRST_ROW:
            return 1
        return self.ring.canon(_int_det([list(r) for r in self.matrix]))

    def invert(self) -> "AffineMap":
        """The affine inverse y -> A^-1 (y - b); SingularMatrix if det not regular."""
        ring = self.ring
        if self.form == FORM_FIRST_ROW:
            inv_rows = [list(r) for r in AffineMap.identity(ring, self.dim).matrix]
            for j in range(1, self.dim):
                inv_rows[0][j] = ring.neg(self.matrix[0][j])
            inv_matrix = inv_rows
        else:
            det = _int_det([list(r) for r in self.matrix])
            det_mod = ring.canon(det)
            if not ring.is_regular(det_mod):
                raise SingularMatrix(
                    f"determinant {det_mod} is not regular in {ring.tag()}"
                )
            det_inv = ring.inv(det_mod)
            adj = _int_adjugate([list(r) for r in self.matrix])
            inv_matrix = [
                [ring.canon(adj[i][j] * det_inv) for j in range(self.dim)]
                for i in range(self.dim)
            ]
        shift = [0] * self.dim
        for i in range(self.dim):
            acc = 0
            for j in range(self.dim):
                acc += inv_matrix[i][j] * self.shift[j]
            shift[i] = ring.neg(acc)
        return AffineMap(ring, inv_matrix, shift, self.form)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AffineMap)
            and self.ring == other.ring
            and self.matrix == other.matrix
            and self.shift == other.shift
        )

    __hash__ = None


def _int_det(rows: list[list[int]]) -> int:
    """Exact integer determinant (fraction-free Gaussian elimination)."""
    n = len(rows)
    rows = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for r in range(k + 1, n):
                if rows[r][k] != 0:
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = rows[k][k]
    return sign * rows[n - 1][n - 1]


def _int_adjugate(rows: list[list[int]]) -> list[list[int]]:
    n = len(rows)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * _int_det(minor)
    return adj
