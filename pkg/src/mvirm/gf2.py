"""GF(2) linear algebra helpers over int bitsets."""

from __future__ import annotations

from typing import List, Optional, Tuple

__all__ = ["gf2_rank", "gf2_solve", "gf2_solve_multi", "gf2_in_span"]


def gf2_rank(rows: List[int], n_cols: int) -> int:
    """Rank of a bit-matrix over GF(2) via Gaussian elimination."""
    work = rows[:]
    rank = 0
    for col in range(n_cols):
        pivot = None
        for r in range(rank, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(len(work)):
            if r != rank and ((work[r] >> col) & 1):
                work[r] ^= work[rank]
        rank += 1
        if rank == len(work):
            break
    return rank


def gf2_solve(columns: List[int], target: int, n_rows: int) -> Optional[int]:
    """Solve sum of selected columns == target over GF(2).

    Returns a selection bitmask (bit j set selects columns[j]), or None when
    the system has no solution. When multiple solutions exist an arbitrary
    one is returned.
    """
    sols = gf2_solve_multi(columns, [target], n_rows)
    return sols[0] if sols is not None else None


def gf2_solve_multi(
    columns: List[int], targets: List[int], n_rows: int
) -> Optional[List[int]]:
    """Solve the same column system for several targets at once.

    Returns one selection mask per target, or None if any target is
    unsolvable.
    """
    n = len(columns)
    # Augment each matrix row with an identity tag tracking the combination.
    rows: List[Tuple[int, int]] = []
    for j, col in enumerate(columns):
        rows.append((col, 1 << j))
    rank = 0
    pivots: List[Tuple[int, int, int]] = []  # (bit position, row value, tag)
    for bit in range(n_rows):
        pivot = None
        for r in range(rank, n):
            if (rows[r][0] >> bit) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv, pt = rows[rank]
        for r in range(n):
            if r != rank and ((rows[r][0] >> bit) & 1):
                rows[r] = (rows[r][0] ^ pv, rows[r][1] ^ pt)
        pivots.append((bit, pv, pt))
        rank += 1
    out: List[int] = []
    for target in targets:
        residue = target
        sel = 0
        for bit, pv, pt in pivots:
            if (residue >> bit) & 1:
                residue ^= pv
                sel ^= pt
        if residue:
            return None
        out.append(sel)
    return out


def gf2_in_span(vec: int, rows: List[int], n_cols: int) -> bool:
    """Whether vec lies in the GF(2) row span of rows."""
    return gf2_rank(rows + [vec], n_cols) == gf2_rank(rows, n_cols)
