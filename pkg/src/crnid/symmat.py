"""Matrices of polynomials: Jacobians, Lyapunov residuals, minors and exact rank."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

from .poly import (
    Polynomial,
    PolyRing,
    content_normalize,
    evaluate,
    format_polynomial,
    partial_derivative,
)


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class PolyMatrix:
    """Dense row-major grid of polynomials sharing one ring."""

    ring: PolyRing
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if rows and len({len(r) for r in rows}) != 1:
            raise DimensionError("matrix rows have different lengths")
        for r in rows:
            for e in r:
                if e.ring.catalog != self.ring.catalog:
                    raise DimensionError("matrix entries live on different catalogs")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, ring: PolyRing, rows: Sequence[Sequence]) -> "PolyMatrix":
        def conv(e):
            if isinstance(e, Polynomial):
                return e.with_order(ring.order)
            if isinstance(e, str):
                return ring.parse(e)
            return ring.constant(e)

        return cls(ring, tuple(tuple(conv(e) for e in r) for r in rows))

    @classmethod
    def zeros(cls, ring: PolyRing, rows: int, cols: int) -> "PolyMatrix":
        z = ring.zero()
        return cls(ring, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, tuple(zip(*self.entries)) if self.entries else ())

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(self.ring, tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def vstack(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.rows and other.rows and self.cols != other.cols:
            raise DimensionError("column counts differ")
        return PolyMatrix(self.ring, self.entries + other.entries)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return PolyMatrix(self.ring, tuple(tuple(a + b for a, b in zip(r, s))
                                           for r, s in zip(self.entries, other.entries)))

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise DimensionError("inner dimensions differ")
        z = self.ring.zero()
        out = []
        for r in self.entries:
            row = []
            for j in range(other.cols):
                acc = z
                for a, k in zip(r, range(other.rows)):
                    b = other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return PolyMatrix(self.ring, tuple(out))

    def matvec(self, v: Sequence[Polynomial]) -> list[Polynomial]:
        if len(v) != self.cols:
            raise DimensionError("vector length does not match column count")
        out = []
        for r in self.entries:
            acc = self.ring.zero()
            for a, b in zip(r, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def scale_columns(self, factors: Sequence[Polynomial]) -> "PolyMatrix":
        if len(factors) != self.cols:
            raise DimensionError("one factor per column required")
        return PolyMatrix(self.ring, tuple(tuple(e * f if e else e for e, f in zip(r, factors))
                                           for r in self.entries))

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.ring, tuple(tuple(fn(e) for e in r) for r in self.entries))

    def with_ring(self, ring: PolyRing) -> "PolyMatrix":
        return PolyMatrix(ring, tuple(tuple(e.embed(ring) for e in r) for r in self.entries))

    def is_symmetric(self) -> bool:
        n = self.rows
        return n == self.cols and all(self.entries[i][j] == self.entries[j][i]
                                      for i in range(n) for j in range(i + 1, n))

    def evaluate(self, point: Mapping[str, object]) -> list[list]:
        return [[evaluate(e, point) for e in r] for r in self.entries]

    def to_strings(self) -> list[list[str]]:
        return [[format_polynomial(e) for e in r] for r in self.entries]

    def to_json(self) -> str:
        return json.dumps(self.to_strings())

    def format_text(self, row_labels: Sequence[str] | None = None) -> str:
        cells = self.to_strings()
        if not cells:
            return "[]"
        widths = [max(len(cells[i][j]) for i in range(self.rows)) for j in range(self.cols)]
        lab_w = max((len(s) for s in row_labels), default=0) if row_labels else 0
        lines = []
        for i, r in enumerate(cells):
            body = "  ".join(c.rjust(w) for c, w in zip(r, widths))
            prefix = (row_labels[i].ljust(lab_w) + " | ") if row_labels else ""
            lines.append(f"{prefix}[ {body} ]")
        return "\n".join(lines)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and all(a == b for r, s in zip(self.entries, other.entries)
                                                 for a, b in zip(r, s))

    def __hash__(self):
        return hash(self.shape)


def covariance_name(a: int, b: int, n: int) -> str:
    """Catalog name of the (a, b) covariance entry, 1-based, symmetric."""
    a, b = min(a, b), max(a, b)
    return f"p{a}{b}" if n < 10 else f"p{a}_{b}"


def covariance_names(n: int) -> list[str]:
    return [covariance_name(a, b, n) for a in range(1, n + 1) for b in range(a, n + 1)]


def symmetric_matrix(ring: PolyRing, n: int) -> PolyMatrix:
    """The symbolic covariance P with p_ab shared between (a, b) and (b, a)."""
    return PolyMatrix(ring, tuple(tuple(ring.var(covariance_name(a, b, n)) for b in range(1, n + 1))
                                  for a in range(1, n + 1)))


def jacobian(f: Sequence[Polynomial], vars: Sequence[str]) -> PolyMatrix:
    if not f:
        raise DimensionError("empty function vector")
    if len(f) != len(vars):
        raise DimensionError(f"{len(f)} functions but {len(vars)} variables")
    ring = f[0].ring
    return PolyMatrix(ring, tuple(tuple(partial_derivative(fi, v) for v in vars) for fi in f))


def lyapunov_residual(J: PolyMatrix, P: PolyMatrix, Q: PolyMatrix) -> list[Polynomial]:
    """Upper triangle (row-major) of J P + P J^T + Q."""
    n = J.rows
    if J.shape != (n, n) or P.shape != (n, n) or Q.shape != (n, n):
        raise DimensionError("J, P and Q must all be n x n")
    if not Q.is_symmetric():
        raise ValueError("Q is not symmetric")
    JP = J @ P
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(JP[i, j] + JP[j, i] + Q[i, j])
    return out


# ---------------------------------------------------------------------------
# determinants and minors
# ---------------------------------------------------------------------------

class _MinorDP:
    """Laplace expansion along the last column, memoized on (row mask, column prefix)."""

    def __init__(self, M: PolyMatrix):
        self.M = M
        self.memo: dict = {}
        self.zero = M.ring.zero()

    def det(self, rows: tuple, cols: tuple) -> Polynomial:
        key = (rows, cols)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        E = self.M.entries
        if len(cols) == 1:
            val = E[rows[0]][cols[0]]
        else:
            c = cols[-1]
            sub_cols = cols[:-1]
            k = len(cols) - 1
            acc = self.zero
            for pos, i in enumerate(rows):
                a = E[i][c]
                if not a:
                    continue
                sub = self.det(rows[:pos] + rows[pos + 1:], sub_cols)
                if not sub:
                    continue
                term = a * sub
                acc = acc - term if (pos + k) % 2 else acc + term
            val = acc
        self.memo[key] = val
        return val


def determinant(M: PolyMatrix) -> Polynomial:
    if M.rows != M.cols:
        raise DimensionError("determinant of a non-square matrix")
    if M.rows == 0:
        return M.ring.one()
    return _MinorDP(M).det(tuple(range(M.rows)), tuple(range(M.cols)))


def all_minors(M: PolyMatrix, s: int) -> list[Polynomial]:
    """Every s x s minor, zeros included, ordered lexicographically by (rows, cols)."""
    if not 1 <= s <= min(M.rows, M.cols):
        raise DimensionError(f"minor size {s} out of range for a {M.rows}x{M.cols} matrix")
    dp = _MinorDP(M)
    row_sets = list(combinations(range(M.rows), s))
    col_sets = list(combinations(range(M.cols), s))
    return [dp.det(r, c) for r in row_sets for c in col_sets]


def canonical_key(p: Polynomial) -> frozenset:
    return frozenset(content_normalize(p).terms.items())


def dedupe(polys: Sequence[Polynomial]) -> list[Polynomial]:
    """Drop zeros and duplicates up to a nonzero rational factor, keeping first occurrences.

    Each kept polynomial is sign-normalized to a positive leading coefficient.
    """
    seen = set()
    out = []
    for p in polys:
        if not p:
            continue
        key = canonical_key(p)
        if key in seen:
            continue
        seen.add(key)
        lc = p.terms[max(p.terms)]
        out.append(-p if lc < 0 else p)
    return out


def minors(M: PolyMatrix, s: int) -> list[Polynomial]:
    """Nonzero s x s minors, deduplicated up to scale."""
    return dedupe(all_minors(M, s))


def count_minors(rows: int, cols: int, s: int) -> int:

    return comb(rows, s) * comb(cols, s)


# ---------------------------------------------------------------------------
# exact numeric rank
# ---------------------------------------------------------------------------

def _integer_rows(rows: list[list]) -> list[list[int]]:
    from math import lcm

    out = []
    for r in rows:
        fr = [Fraction(v) for v in r]
        d = 1
        for v in fr:
            d = lcm(d, v.denominator)
        out.append([int(v * d) for v in fr])
    return out


def bareiss_rank(rows: list[list]) -> int:
    """Exact rank of a rational matrix by fraction-free elimination with full pivoting."""
    A = _integer_rows(rows)
    if not A or not A[0]:
        return 0
    m, n = len(A), len(A[0])
    prev = 1
    rank = 0
    for k in range(min(m, n)):
        piv = None
        for i in range(k, m):
            for j in range(k, n):
                if A[i][j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i, j = piv
        A[k], A[i] = A[i], A[k]
        if j != k:
            for r in A:
                r[k], r[j] = r[j], r[k]
        akk = A[k][k]
        for i in range(k + 1, m):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
        rank += 1
    return rank


def rank_at_point(M: PolyMatrix, point: Mapping[str, object]) -> int:
    return bareiss_rank(M.evaluate(point))


def nullspace(rows: list[list]) -> list[list[Fraction]]:
    """Exact basis of the right kernel of a rational matrix (one vector per free column)."""
    A = [[Fraction(v) for v in r] for r in rows]
    m = len(A)
    n = len(A[0]) if A else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    basis = []
    for fc in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -A[i][fc]
        basis.append(v)
    return basis


def null_vector(rows: list[list]) -> list[Fraction] | None:
    """A nonzero exact kernel vector, or None if the matrix has full column rank."""
    basis = nullspace(rows)
    return basis[0] if basis else None
