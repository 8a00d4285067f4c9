"""GF(2) linear algebra on int bitsets.

A vector of length ``n`` is a Python int whose bit ``i`` holds coordinate ``i``.
"""

from __future__ import annotations

from typing import Iterable, List


def reduce_basis(vectors: Iterable[int]) -> List[int]:
    """Return a basis of the span of ``vectors`` in reduced echelon form.

    Each basis vector has a distinct leading (highest) bit that is cleared in
    every other basis vector.
    """
    basis: List[int] = []
    for v in vectors:
        for b in basis:
            if v ^ b < v:
                v ^= b
        if v:
            top = v.bit_length() - 1
            basis = [b ^ v if (b >> top) & 1 else b for b in basis]
            basis.append(v)
    basis.sort(reverse=True)
    return basis


def rank(vectors: Iterable[int]) -> int:
    basis: List[int] = []
    for v in vectors:
        for b in basis:
            if v ^ b < v:
                v ^= b
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def in_span(vector: int, basis: List[int]) -> bool:
    """Membership test against a basis produced by :func:`reduce_basis`."""
    for b in basis:
        if vector ^ b < vector:
            vector ^= b
    return vector == 0


def nullspace(rows: Iterable[int], ncols: int) -> List[int]:
    """Basis of ``{x : popcount(row & x) is even for every row}``."""
    basis = reduce_basis(rows)
    pivots = {b.bit_length() - 1: b for b in basis}
    out = []
    for free in range(ncols):
        if free in pivots:
            continue
        x = 1 << free
        for p, b in pivots.items():
            if (b >> free) & 1:
                x |= 1 << p
        out.append(x)
    return out


def orthogonal_complement(vectors: Iterable[int], ncols: int) -> List[int]:
    return nullspace(vectors, ncols)


def transpose(vectors: List[int], nbits: int) -> List[int]:
    """Swap the roles of list index and bit index."""
    out = []
    for bit in range(nbits):
        col = 0
        for i, v in enumerate(vectors):
            if (v >> bit) & 1:
                col |= 1 << i
        out.append(col)
    return out


def bits(v: int) -> List[int]:
    """Indices of the set bits of ``v``, ascending."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def popcount(v: int) -> int:
    return bin(v).count("1")


__all__ = [
    "reduce_basis",
    "rank",
    "in_span",
    "nullspace",
    "orthogonal_complement",
    "transpose",
    "bits",
    "popcount",
]
