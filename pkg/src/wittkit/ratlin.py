"""Exact rational linear algebra on dense numpy object arrays of Fractions.

Every matrix handled here is a 2-d ``numpy.ndarray`` with ``dtype=object``
whose entries are :class:`fractions.Fraction`.  Subspaces are stored by a
basis in reduced column-echelon form, so two equal subspaces always carry
identical bases and can be compared structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

builtin_sum = sum


class DimensionError(ValueError):
    """Raised when matrix or subspace dimensions are incompatible."""


# construction helpers

def to_frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        raise TypeError("floating point entries are not accepted")
    return Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)


def mat(rows, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Build an exact matrix from nested sequences (or an existing array)."""
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        out = np.empty(rows.shape, dtype=object)
        for idx, x in np.ndenumerate(rows):
            out[idx] = to_frac(x)
        return out
    rows = [list(r) for r in rows]
    if shape is None:
        ncols = len(rows[0]) if rows else 0
        shape = (len(rows), ncols)
    out = np.empty(shape, dtype=object)
    if shape[0] * shape[1] == 0:
        return out
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise DimensionError(f"ragged entry grid for shape {shape}")
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = to_frac(x)
    return out


def zeros(r: int, c: int) -> np.ndarray:
    out = np.empty((r, c), dtype=object)
    out.fill(Fraction(0))
    return out


def eye(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def col(v: Iterable) -> np.ndarray:
    v = list(v)
    return mat([[x] for x in v], shape=(len(v), 1))


def diag(entries: Sequence) -> np.ndarray:
    out = zeros(len(entries), len(entries))
    for i, x in enumerate(entries):
        out[i, i] = to_frac(x)
    return out


def mul(*ms: np.ndarray) -> np.ndarray:
    """Exact matrix product; well behaved for empty inner dimensions."""
    out = ms[0]
    for m in ms[1:]:
        if out.shape[1] != m.shape[0]:
            raise DimensionError(f"cannot multiply {out.shape} by {m.shape}")
        if out.shape[1] == 0:
            out = zeros(out.shape[0], m.shape[1])
        else:
            out = out @ m
    return out


def hstack(ms: Sequence[np.ndarray], rows: int | None = None) -> np.ndarray:
    if not ms:
        return zeros(rows or 0, 0)
    return np.concatenate(list(ms), axis=1) if len(ms) > 1 else ms[0].copy()


def vstack(ms: Sequence[np.ndarray], cols: int | None = None) -> np.ndarray:
    if not ms:
        return zeros(0, cols or 0)
    return np.concatenate(list(ms), axis=0) if len(ms) > 1 else ms[0].copy()


def block_diag(*ms: np.ndarray) -> np.ndarray:
    r = builtin_sum(m.shape[0] for m in ms)
    c = builtin_sum(m.shape[1] for m in ms)
    out = zeros(r, c)
    i = j = 0
    for m in ms:
        out[i:i + m.shape[0], j:j + m.shape[1]] = m
        i += m.shape[0]
        j += m.shape[1]
    return out


def is_zero(m: np.ndarray) -> bool:
    return all(x == 0 for x in m.flat)


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def is_nilpotent(m: np.ndarray) -> bool:
    n = m.shape[0]
    p = eye(n)
    for _ in range(n):
        p = mul(p, m)
    return is_zero(p)


def nilpotency_index(m: np.ndarray) -> int:
    """Smallest k with m^k = 0 (0 for the empty matrix)."""
    n = m.shape[0]
    if n == 0:
        return 0
    p = eye(n)
    for k in range(1, n + 1):
        p = mul(p, m)
        if is_zero(p):
            return k
    raise ValueError("matrix is not nilpotent")


def power(m: np.ndarray, k: int) -> np.ndarray:
    p = eye(m.shape[0])
    for _ in range(k):
        p = mul(p, m)
    return p


# row reduction

def rref(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row-echelon form R and an invertible T with T @ m == R."""
    r, c = m.shape
    R = mat(m)
    T = eye(r)
    row = 0
    for j in range(c):
        if row == r:
            break
        piv = next((i for i in range(row, r) if R[i, j] != 0), None)
        if piv is None:
            continue
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
            T[[row, piv]] = T[[piv, row]]
        p = R[row, j]
        if p != 1:
            R[row] = R[row] / p
            T[row] = T[row] / p
        for i in range(r):
            if i != row and R[i, j] != 0:
                f = R[i, j]
                R[i] = R[i] - f * R[row]
                T[i] = T[i] - f * T[row]
        row += 1
    return R, T


def pivots(R: np.ndarray) -> list[int]:
    """Pivot columns of a matrix already in reduced row-echelon form."""
    out = []
    for i in range(R.shape[0]):
        j = next((j for j in range(R.shape[1]) if R[i, j] != 0), None)
        if j is None:
            break
        out.append(j)
    return out


def rank(m: np.ndarray) -> int:
    return len(pivots(rref(m)[0]))


def inverse(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise DimensionError("inverse of a non-square matrix")
    R, T = rref(m)
    if not equal(R, eye(n)):
        raise ValueError("matrix is singular")
    return T


def solve(m: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution x of m @ x == b (b may have several columns), or None."""
    if m.shape[0] != b.shape[0]:
        raise DimensionError(f"solve: {m.shape} against rhs {b.shape}")
    R, T = rref(m)
    rhs = mul(T, b)
    piv = pivots(R)
    if not is_zero(rhs[len(piv):]):
        return None
    x = zeros(m.shape[1], b.shape[1])
    for i, j in enumerate(piv):
        x[j] = rhs[i]
    return x


# subspaces


def _canonical(basis: np.ndarray) -> np.ndarray:
    n = basis.shape[0]
    R, _ = rref(basis.T)
    k = len(pivots(R))
    out = R[:k].T.copy() if k else zeros(n, 0)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of Q^ambient_dim given by canonical basis columns."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        if self.basis.shape[0] != self.ambient_dim:
            raise DimensionError(
                f"basis has {self.basis.shape[0]} rows, ambient is {self.ambient_dim}")
        object.__setattr__(self, "basis", _canonical(self.basis))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def pivot_rows(self) -> list[int]:
        return pivots(self.basis.T)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and equal(self.basis, other.basis)

    def __hash__(self) -> int:
        return hash((self.ambient_dim, tuple(self.basis.flat)))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def coords(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of the columns of v in this basis (they must lie inside)."""
        c = v[self.pivot_rows, :]
        if not equal(mul(self.basis, c), v):
            raise ValueError("vector does not lie in the subspace")
        return mat(c)

    def contains(self, v: np.ndarray) -> bool:
        return equal(mul(self.basis, v[self.pivot_rows, :]), v)

    def issubspace(self, other: Subspace) -> bool:
        _check_ambient(self, other)
        return other.contains(self.basis)


def span(vectors: np.ndarray) -> Subspace:
    return Subspace(vectors.shape[0], vectors)


def full(n: int) -> Subspace:
    return Subspace(n, eye(n))


def zero(n: int) -> Subspace:
    return Subspace(n, zeros(n, 0))


def _check_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def kernel(m: np.ndarray) -> Subspace:
    R, _ = rref(m)
    piv = pivots(R)
    n = m.shape[1]
    free = [j for j in range(n) if j not in piv]
    basis = zeros(n, len(free))
    for k, f in enumerate(free):
        basis[f, k] = Fraction(1)
        for i, p in enumerate(piv):
            basis[p, k] = -R[i, f]
    return Subspace(n, basis)


def image(m: np.ndarray) -> Subspace:
    return Subspace(m.shape[0], m)


def quotient_map(ambient_dim: int, s: Subspace) -> np.ndarray:
    """Surjection Q^n -> Q^(n - dim s) with kernel exactly s.

    Coordinates are the non-pivot rows of the canonical basis of s, so
    ``section(ambient_dim, s)`` (unit vectors at those rows) splits it.
    """
    if s.ambient_dim != ambient_dim:
        raise DimensionError(f"subspace lives in {s.ambient_dim}, not {ambient_dim}")
    piv = s.pivot_rows
    rest = [i for i in range(ambient_dim) if i not in piv]
    q = zeros(len(rest), ambient_dim)
    for r, i in enumerate(rest):
        q[r, i] = Fraction(1)
        for k, p in enumerate(piv):
            q[r, p] = -s.basis[i, k]
    return q


def section(ambient_dim: int, s: Subspace) -> np.ndarray:
    """Right inverse of quotient_map(ambient_dim, s)."""
    piv = s.pivot_rows
    rest = [i for i in range(ambient_dim) if i not in piv]
    out = zeros(ambient_dim, len(rest))
    for r, i in enumerate(rest):
        out[i, r] = Fraction(1)
    return out


def preimage(m: np.ndarray, s: Subspace) -> Subspace:
    if m.shape[0] != s.ambient_dim:
        raise DimensionError(f"map has target {m.shape[0]}, subspace ambient {s.ambient_dim}")
    return kernel(mul(quotient_map(s.ambient_dim, s), m))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    n = a.ambient_dim
    return kernel(vstack([quotient_map(n, a), quotient_map(n, b)], cols=n))


def sum(a: Subspace, b: Subspace) -> Subspace:  # noqa: A001 - mirrors the subspace operation name
    _check_ambient(a, b)
    return Subspace(a.ambient_dim, hstack([a.basis, b.basis]))


def apply(m: np.ndarray, s: Subspace) -> Subspace:
    """Image of a subspace under a linear map."""
    if m.shape[1] != s.ambient_dim:
        raise DimensionError(f"map has source {m.shape[1]}, subspace ambient {s.ambient_dim}")
    return image(mul(m, s.basis))


# serialization

def rat_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_from_str(s) -> Fraction:
    if isinstance(s, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise TypeError(f"expected a rational string, got {type(s).__name__}")
    return Fraction(s.strip())


def mat_to_json(m: np.ndarray) -> list[list[str]]:
    return [[rat_to_str(x) for x in row] for row in m]


def mat_from_json(rows, shape: tuple[int, int] | None = None) -> np.ndarray:
    rows = [[rat_from_str(x) for x in r] for r in rows]
    return mat(rows, shape=shape)
