"""Exact rational sparse linear algebra.

Every scalar in this package is a ``fractions.Fraction``; there is no floating
point anywhere.  Subspaces are canonicalised to reduced row echelon form so
that equality of subspaces is equality of representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

Q = Fraction

QZERO = Q(0)
QONE = Q(1)


class ShapeError(ValueError):
    """Operands with incompatible dimensions."""


class NotNilpotentError(ValueError):
    """Matrix powers failed to vanish within the dimension bound."""


class NotInvariantError(ValueError):
    """A subspace claimed invariant is moved by the operator."""

    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True, eq=True)
class SparseMat:
    """Immutable sparse matrix over Fraction, keyed by (row, col)."""

    nrows: int
    ncols: int
    entries: dict = field(default_factory=dict)

    @staticmethod
    def from_entries(nrows: int, ncols: int, items: Iterable[tuple[int, int, Fraction]]) -> "SparseMat":
        d = {}
        for r, c, v in items:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise ShapeError(f"entry ({r},{c}) outside {nrows}x{ncols}")
            v = Q(v)
            if v:
                d[(r, c)] = v
        return SparseMat(nrows, ncols, d)

    @staticmethod
    def from_dense(rows: Iterable[Iterable]) -> "SparseMat":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        d = {}
        for i, row in enumerate(rows):
            if len(row) != nc:
                raise ShapeError("ragged rows")
            for j, v in enumerate(row):
                v = Q(v)
                if v:
                    d[(i, j)] = v
        return SparseMat(nr, nc, d)

    @staticmethod
    def identity(n: int) -> "SparseMat":
        return SparseMat(n, n, {(i, i): QONE for i in range(n)})

    @staticmethod
    def zero(nrows: int, ncols: int) -> "SparseMat":
        return SparseMat(nrows, ncols, {})

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return not self.entries

    def nnz(self) -> int:
        return len(self.entries)

    def get(self, r: int, c: int) -> Fraction:
        return self.entries.get((r, c), QZERO)

    def rows(self) -> dict:
        """Entries regrouped as {row: {col: value}}."""
        out: dict = {}
        for (r, c), v in self.entries.items():
            out.setdefault(r, {})[c] = v
        return out

    def cols(self) -> dict:
        out: dict = {}
        for (r, c), v in self.entries.items():
            out.setdefault(c, {})[r] = v
        return out

    def transpose(self) -> "SparseMat":
        return SparseMat(self.ncols, self.nrows, {(c, r): v for (r, c), v in self.entries.items()})

    def add(self, other: "SparseMat") -> "SparseMat":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeError("add: shape mismatch")
        d = dict(self.entries)
        for k, v in other.entries.items():
            w = d.get(k, QZERO) + v
            if w:
                d[k] = w
            else:
                d.pop(k, None)
        return SparseMat(self.nrows, self.ncols, d)

    def scale(self, a) -> "SparseMat":
        a = Q(a)
        if not a:
            return SparseMat.zero(self.nrows, self.ncols)
        return SparseMat(self.nrows, self.ncols, {k: a * v for k, v in self.entries.items()})

    def neg(self) -> "SparseMat":
        return SparseMat(self.nrows, self.ncols, {k: -v for k, v in self.entries.items()})

    def mul(self, other: "SparseMat") -> "SparseMat":
        if self.ncols != other.nrows:
            raise ShapeError("mul: inner dimension mismatch")
        orows = other.rows()
        acc: dict = {}
        for (r, k), v in self.entries.items():
            row = orows.get(k)
            if row is None:
                continue
            for c, w in row.items():
                key = (r, c)
                s = acc.get(key)
                acc[key] = v * w if s is None else s + v * w
        return SparseMat(self.nrows, other.ncols, {k: v for k, v in acc.items() if v})

    def apply(self, vec: tuple) -> tuple:
        """Matrix times column vector."""
        if len(vec) != self.ncols:
            raise ShapeError("apply: length mismatch")
        out = [QZERO] * self.nrows
        for (r, c), v in self.entries.items():
            x = vec[c]
            if x:
                out[r] = out[r] + v * x
        return tuple(out)

    def to_dense(self) -> list:
        out = [[QZERO] * self.ncols for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMat)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.entries == other.entries
        )


def rref(vectors: Iterable[Iterable], ncols: int) -> tuple:
    """Reduced row echelon form of the span of the given vectors.

    Returns a tuple of tuples (nonzero rows only); the result depends only on
    the row span, which makes it a canonical representative.
    """
    rows = [list(map(Q, v)) for v in vectors]
    for row in rows:
        if len(row) != ncols:
            raise ShapeError("rref: ragged input")
    pivots: list[int] = []
    out: list[list[Fraction]] = []
    for row in rows:
        for r, p in zip(out, pivots):
            f = row[p]
            if f:
                for j in range(p, ncols):
                    if r[j]:
                        row[j] -= f * r[j]
        lead = next((j for j, x in enumerate(row) if x), None)
        if lead is None:
            continue
        inv = QONE / row[lead]
        row = [x * inv for x in row]
        out.append(row)
        pivots.append(lead)
    order = sorted(range(len(out)), key=lambda t: pivots[t])
    out = [out[t] for t in order]
    pivots = sorted(pivots)
    # back-eliminate above pivots
    for t in range(len(out) - 1, -1, -1):
        p = pivots[t]
        for s in range(t):
            f = out[s][p]
            if f:
                for j in range(p, ncols):
                    if out[t][j]:
                        out[s][j] -= f * out[t][j]
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True, eq=True)
class Subspace:
    """Subspace of Q^n given by a reduced-row-echelon basis."""

    ambient_dim: int
    basis: tuple = ()

    @staticmethod
    def from_vectors(ambient_dim: int, vectors: Iterable[Iterable]) -> "Subspace":
        return Subspace(ambient_dim, rref(vectors, ambient_dim))

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, ())

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        eye = tuple(tuple(QONE if i == j else QZERO for j in range(ambient_dim)) for i in range(ambient_dim))
        return Subspace(ambient_dim, eye)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> list:
        return [next(j for j, x in enumerate(row) if x) for row in self.basis]

    def coords_of(self, vec: tuple):
        """Coefficients of vec in the echelon basis, or None if not contained."""
        vec = list(map(Q, vec))
        if len(vec) != self.ambient_dim:
            raise ShapeError("coords_of: length mismatch")
        coeffs = []
        for row, p in zip(self.basis, self.pivots()):
            f = vec[p]
            coeffs.append(f)
            if f:
                for j in range(p, self.ambient_dim):
                    if row[j]:
                        vec[j] -= f * row[j]
        if any(vec):
            return None
        return tuple(coeffs)

    def contains(self, vec: tuple) -> bool:
        return self.coords_of(vec) is not None

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ShapeError("sum: ambient mismatch")
        return Subspace.from_vectors(self.ambient_dim, list(self.basis) + list(other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus intersection of two subspaces of the same ambient space."""
        if self.ambient_dim != other.ambient_dim:
            raise ShapeError("intersect: ambient mismatch")
        n = self.ambient_dim
        stacked = [list(row) + list(row) for row in self.basis]
        stacked += [list(row) + [QZERO] * n for row in other.basis]
        reduced = rref(stacked, 2 * n)
        inter = [row[n:] for row in reduced if not any(row[:n])]
        return Subspace.from_vectors(n, inter)


def kernel(m: SparseMat) -> Subspace:
    """Solution space of m x = 0, echelonised.

    Elimination pivots are chosen Markowitz-style on the sparsity product
    (rows-1)*(cols-1), ties broken by lowest (row, col); the output is then
    canonicalised, so the result is independent of the pivot path.
    """
    rows = {r: dict(cols) for r, cols in m.rows().items()}
    colrows: dict = {}
    for r, cols in rows.items():
        for c in cols:
            colrows.setdefault(c, set()).add(r)
    pivots: list[tuple[int, int]] = []
    active = set(rows.keys())
    while True:
        best = None
        for r in active:
            row = rows[r]
            if not row:
                continue
            rw = len(row) - 1
            for c, _v in row.items():
                score = (rw * (len(colrows[c]) - 1), r, c)
                if best is None or score < best:
                    best = score
        if best is None:
            break
        _, pr, pc = best
        pivots.append((pr, pc))
        active.discard(pr)
        prow = rows[pr]
        pval = prow[pc]
        for r in list(colrows[pc]):
            if r == pr or r not in active:
                continue
            row = rows[r]
            f = row.get(pc)
            if not f:
                continue
            f = f / pval
            for c, v in prow.items():
                w = row.get(c, QZERO) - f * v
                if w:
                    if c not in row:
                        colrows.setdefault(c, set()).add(r)
                    row[c] = w
                else:
                    if c in row:
                        del row[c]
                        colrows[c].discard(r)
    pivot_cols = sorted(c for _r, c in pivots)
    pivot_of = {c: r for r, c in pivots}
    # normalise pivot rows and back-eliminate so each pivot column is clean
    for c in sorted(pivot_cols, reverse=True):
        r = pivot_of[c]
        prow = rows[r]
        inv = QONE / prow[c]
        for cc in list(prow):
            prow[cc] *= inv
        for c2 in pivot_cols:
            if c2 <= c:
                continue
            r2 = pivot_of[c2]
            f = prow.get(c2)
            if f:
                for cc, v in rows[r2].items():
                    w = prow.get(cc, QZERO) - f * v
                    if w:
                        prow[cc] = w
                    else:
                        prow.pop(cc, None)
    free_cols = [c for c in range(m.ncols) if c not in pivot_of]
    basis = []
    for fc in free_cols:
        vec = [QZERO] * m.ncols
        vec[fc] = QONE
        for c in pivot_cols:
            v = rows[pivot_of[c]].get(fc)
            if v:
                vec[c] = -v
        basis.append(vec)
    return Subspace.from_vectors(m.ncols, basis)


def rank(m: SparseMat) -> int:
    return m.ncols - kernel(m).dim


def exp_nilpotent(m: SparseMat) -> SparseMat:
    """Exact exponential sum_{j>=0} m^j / j! of a nilpotent matrix."""
    if not m.is_square():
        raise ShapeError("exp_nilpotent: matrix not square")
    n = m.nrows
    result = SparseMat.identity(n)
    term = SparseMat.identity(n)
    for j in range(1, n + 1):
        term = term.mul(m).scale(Q(1, j))
        if term.is_zero():
            return result
        result = result.add(term)
    raise NotNilpotentError(f"matrix power did not vanish after {n} steps")


def restrict_operator(m: SparseMat, s: Subspace) -> SparseMat:
    """Matrix of m in the echelon basis of an m-invariant subspace s."""
    if not m.is_square() or m.nrows != s.ambient_dim:
        raise ShapeError("restrict_operator: dimension mismatch")
    cols = []
    for idx, row in enumerate(s.basis):
        image = m.apply(tuple(row))
        coords = s.coords_of(image)
        if coords is None:
            raise NotInvariantError(idx, f"operator moves basis vector {idx} out of the subspace")
        cols.append(coords)
    d = s.dim
    return SparseMat.from_entries(d, d, ((r, c, cols[c][r]) for c in range(d) for r in range(d)))
