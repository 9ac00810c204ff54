"""Brute-force reference decoders used as independent test oracles.

The replay oracle mirrors the online acceptance rule (keep a symbol only if
it has at most two unknowns when it arrives, discard otherwise, never
revisit) but decodes by full GF(2) elimination over the accepted equations
instead of graph peeling, so agreement is meaningful.
"""

from __future__ import annotations


def rref_determined(equations: list[tuple[int, int]]) -> dict[int, int]:
    """Variables pinned by a GF(2) system of (index-mask, rhs) equations.

    Returns {variable: value} for every variable whose unit vector lies in
    the row space; rhs values are arbitrary-width integers XOR-combined
    alongside the masks.
    """
    basis: dict[int, tuple[int, int]] = {}   # pivot bit -> (mask, rhs)
    for mask, rhs in equations:
        while mask:
            pivot = mask & -mask
            if pivot in basis:
                bm, br = basis[pivot]
                mask ^= bm
                rhs ^= br
            else:
                basis[pivot] = (mask, rhs)
                break
    # Full mutual elimination (tiny systems, so fixpoint iteration is fine).
    changed = True
    while changed:
        changed = False
        for p in list(basis):
            pm, pr = basis[p]
            for q in list(basis):
                if q != p:
                    qm, qr = basis[q]
                    if qm & p:
                        basis[q] = (qm ^ pm, qr ^ pr)
                        changed = True
    out = {}
    for p, (mask, rhs) in basis.items():
        if mask == p:   # single-variable row: pinned
            out[p.bit_length() - 1] = rhs
    return out


class ReplayPeeler:
    """Online replay of symbol arrivals with elimination-based decoding."""

    def __init__(self, k: int):
        self.k = k
        self.accepted: list[tuple[int, int]] = []
        self.known: dict[int, int] = {}

    def offer(self, indices: tuple[int, ...], value: int) -> None:
        unknowns = [i for i in indices if i not in self.known]
        if not 1 <= len(unknowns) <= 2:
            return   # duplicates and 3+ unknowns are discarded for good
        mask = 0
        for i in indices:
            mask |= 1 << i
        self.accepted.append((mask, value))
        self.known = rref_determined(self.accepted)
