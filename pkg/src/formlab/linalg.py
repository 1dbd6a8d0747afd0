"""Exact linear algebra over Gaussian rationals.

Vectors are tuples of :class:`Scalar`; matrices are lists of rows.  A
:class:`Subspace` keeps its basis in reduced row echelon form, so equality of
subspaces is equality of their basis tuples.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .scalar import ONE, ZERO, Scalar

__all__ = [
    "rref",
    "rank",
    "Subspace",
    "kernel",
    "image",
    "solve",
    "DimensionMismatch",
]

Vector = tuple


class DimensionMismatch(ValueError):
    pass


def rref(rows: Sequence[Sequence[Scalar]], ncols: int) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form; the pivot is the first nonzero entry found."""
    work = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(work):
            break
        pivot = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        row = work[r]
        inv = row[c].inverse()
        if inv != ONE:
            row = [x * inv if x else x for x in row]
            work[r] = row
        for i in range(len(work)):
            if i != r:
                f = work[i][c]
                if f:
                    other = work[i]
                    work[i] = [a - f * b if b else a for a, b in zip(other, row)]
        pivots.append(c)
        r += 1
    return work[:r], pivots


def rank(rows, ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def _check(v, n):
    if len(v) != n:
        raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {n}")


class Subspace:
    """Subspace of ``C^n`` with a canonical (RREF) basis."""

    __slots__ = ("n", "basis", "pivots")

    def __init__(self, n: int, vectors: Sequence[Sequence[Scalar]] = ()):
        for v in vectors:
            _check(v, n)
        rows, piv = rref(vectors, n)
        self.n = n
        self.basis = tuple(tuple(r) for r in rows)
        self.pivots = tuple(piv)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [_unit(n, i) for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim})"

    def contains(self, v: Sequence[Scalar]) -> bool:
        _check(v, self.n)
        return not any(self.reduce(v))

    def reduce(self, v: Sequence[Scalar]) -> list[Scalar]:
        """Remainder of ``v`` after eliminating the pivot columns."""
        out = list(v)
        for row, c in zip(self.basis, self.pivots):
            f = out[c]
            if f:
                out = [a - f * b if b else a for a, b in zip(out, row)]
        return out

    def coordinates(self, v: Sequence[Scalar]) -> list[Scalar]:
        """Coefficients of ``v`` on the basis; ``ValueError`` when outside."""
        if not self.contains(v):
            raise ValueError("vector not in subspace")
        return [v[c] for c in self.pivots]

    def __add__(self, other: "Subspace") -> "Subspace":
        self._compatible(other)
        return Subspace(self.n, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._compatible(other)
        if not self.dim or not other.dim:
            return Subspace(self.n)
        # c with c_U . U = c_W . W  <=>  [c_U, c_W] in left kernel of [U; -W]
        stacked = list(self.basis) + [tuple(-x for x in r) for r in other.basis]
        cols = [[stacked[i][j] for i in range(len(stacked))] for j in range(self.n)]
        ker = kernel(cols, len(stacked))
        vecs = []
        k = self.dim
        for c in ker.basis:
            vecs.append(_combine(c[:k], self.basis, self.n))
        return Subspace(self.n, vecs)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def quotient_basis(self, sub: "Subspace") -> list[Vector]:
        """Vectors of ``self`` completing a basis of ``sub`` (assumed inside ``self``)."""
        self._compatible(sub)
        acc = Subspace(self.n, sub.basis)
        out = []
        for v in self.basis:
            if not acc.contains(v):
                out.append(v)
                acc = Subspace(self.n, acc.basis + (v,))
        return out

    def complement(self, weights: Sequence[Fraction]) -> "Subspace":
        """Orthogonal complement for ``<x, y> = sum x_i conj(y_i) w_i``."""
        rows = [[b.conjugate() * w for b, w in zip(v, weights)] for v in self.basis]
        return kernel(rows, self.n)

    def project(self, v: Sequence[Scalar], weights: Sequence[Fraction]) -> Vector:
        """Orthogonal projection of ``v`` onto this subspace."""
        _check(v, self.n)
        k = self.dim
        if not k:
            return tuple(ZERO for _ in range(self.n))
        gram = [[_herm(self.basis[i], self.basis[j], weights) for i in range(k)] for j in range(k)]
        rhs = [_herm(v, self.basis[j], weights) for j in range(k)]
        coeffs = solve(gram, rhs)
        return _combine(coeffs, self.basis, self.n)

    def _compatible(self, other):
        if self.n != other.n:
            raise DimensionMismatch(f"ambient dimensions differ: {self.n} vs {other.n}")


def _unit(n, i):
    return tuple(ONE if j == i else ZERO for j in range(n))


def _herm(x, y, weights) -> Scalar:
    total = ZERO
    for a, b, w in zip(x, y, weights):
        if a and b:
            total = total + a * b.conjugate() * w
    return total


def _combine(coeffs, vectors, n) -> Vector:
    out = [ZERO] * n
    for c, v in zip(coeffs, vectors):
        if c:
            out = [a + c * b if b else a for a, b in zip(out, v)]
    return tuple(out)


def kernel(matrix: Sequence[Sequence[Scalar]], ncols: int) -> Subspace:
    """Null space of ``x -> matrix . x``."""
    for r in matrix:
        _check(r, ncols)
    rows, pivots = rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    vecs = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, c in zip(rows, pivots):
            if row[f]:
                v[c] = -row[f]
        vecs.append(tuple(v))
    return Subspace(ncols, vecs)


def image(matrix: Sequence[Sequence[Scalar]], nrows: int) -> Subspace:
    """Column space of ``matrix`` (``nrows`` target coordinates)."""
    if len(matrix) != nrows:
        raise DimensionMismatch(f"matrix has {len(matrix)} rows, expected {nrows}")
    ncols = len(matrix[0]) if matrix else 0
    cols = [tuple(matrix[i][j] for i in range(nrows)) for j in range(ncols)]
    return Subspace(nrows, cols)


def solve(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> list[Scalar]:
    """One solution of ``matrix . x = rhs`` (free variables set to zero).

    Raises ``ValueError`` when the system is inconsistent.
    """
    nrows = len(matrix)
    if len(rhs) != nrows:
        raise DimensionMismatch("right-hand side length does not match matrix")
    ncols = len(matrix[0]) if nrows else 0
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    rows, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        raise ValueError("inconsistent linear system")
    x = [ZERO] * ncols
    for row, c in zip(rows, pivots):
        x[c] = row[ncols]
    return x
