"""GF(2) linear algebra on int bitsets."""

from __future__ import annotations

from typing import Iterator, List, Sequence


def echelon(rows: Sequence[int]) -> List[int]:
    """Row-echelon form (reduced, lowest bit = column 0), zero rows dropped."""
    basis: List[int] = []
    for row in rows:
        for b in basis:
            low = b & -b
            if row & low:
                row ^= b
        if row:
            basis.append(row)
            # keep reduced: clear this pivot from earlier rows
            low = row & -row
            for k in range(len(basis) - 1):
                if basis[k] & low:
                    basis[k] ^= row
    basis.sort(key=lambda r: r & -r)
    return basis


def rank(rows: Sequence[int]) -> int:
    return len(echelon(rows))


def reduce_vector(vec: int, basis: Sequence[int]) -> int:
    """Reduce vec against an echelonized basis; 0 iff vec is in the span."""
    for b in basis:
        if vec & (b & -b):
            vec ^= b
    return vec


def in_span(vec: int, basis: Sequence[int]) -> bool:
    return reduce_vector(vec, basis) == 0


def kernel_basis(rows: Sequence[int], ncols: int) -> List[int]:
    """Basis of {x : popcount(row & x) even for all rows}."""
    work = list(rows)
    pivots: List[int] = []  # column index per pivot row
    reduced: List[int] = []
    for col in range(ncols):
        pivot = None
        for idx, row in enumerate(work):
            if (row >> col) & 1:
                pivot = idx
                break
        if pivot is None:
            continue
        prow = work.pop(pivot)
        work = [r ^ prow if (r >> col) & 1 else r for r in work]
        reduced = [r ^ prow if (r >> col) & 1 else r for r in reduced]
        reduced.append(prow)
        pivots.append(col)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for prow, pcol in zip(reduced, pivots):
            if (prow >> free) & 1:
                vec |= 1 << pcol
        basis.append(vec)
    return basis


def parity(mask: int) -> int:
    return bin(mask).count("1") & 1


def dot(a: int, b: int) -> int:
    return parity(a & b)


class Subspace:
    """A subspace of F2^ncols with membership test and enumeration."""

    def __init__(self, ncols: int, vectors: Sequence[int] = ()):
        self.ncols = ncols
        self.basis = echelon(vectors)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, vec: int) -> bool:
        return in_span(vec, self.basis)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def intersect_hyperplane(self, row: int) -> "Subspace":
        """Subspace of vectors x in this space with <x, row> = 0."""
        coeffs = [dot(b, row) << j for j, b in enumerate(self.basis)]
        combo_rows = [sum(coeffs)] if coeffs else []
        vectors = []
        for combo in kernel_basis(combo_rows, len(self.basis)):
            vec = 0
            for j, b in enumerate(self.basis):
                if (combo >> j) & 1:
                    vec ^= b
            vectors.append(vec)
        return Subspace(self.ncols, vectors)

    def elements(self) -> Iterator[int]:
        if self.dim > 24:
            raise ValueError("subspace too large to enumerate")
        for mask in range(1 << self.dim):
            vec = 0
            m = mask
            i = 0
            while m:
                if m & 1:
                    vec ^= self.basis[i]
                m >>= 1
                i += 1
            yield vec

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ncols == other.ncols and self.basis == other.basis

    def __hash__(self):
        return hash((self.ncols, tuple(self.basis)))

    def __repr__(self):
        return f"Subspace(ncols={self.ncols}, dim={self.dim})"
