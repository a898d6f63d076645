"""Cell bases for the homology of the stable layers L(k)_n.

The degree-d homology of L(k)_n has one cell [J] for each CU sequence J
of length k with excess >= n and total degree d.  The truncated spectra
L(k)_n^m keep the cells with excess <= m.  The maps induced by the EHP
fiber sequences act cell by cell: the lower map appends the bottom
weight, the suspension kills the cells of minimal excess.
"""

from __future__ import annotations

from typing import FrozenSet, Optional, Set, Tuple

from tsseq.cu import CUSeq, cu_concat, cu_is_valid, excess_at_least

Cell = Tuple[int, ...]


def basis(k: int, n: int, d: int, m: Optional[int] = None) -> FrozenSet[Cell]:
    """All CU sequences of length k, excess in [n, m], total degree d."""
    if k < 0 or n < 1:
        raise ValueError("need k >= 0 and n >= 1")
    if m is not None and m < n:
        raise ValueError("truncation bound must be >= lower excess bound")
    if k == 0:
        # the empty cell has infinite excess, so any finite cap drops it
        return frozenset([()]) if d == 0 and m is None else frozenset()

    out: Set[Cell] = set()

    def extend(suffix: Cell, remaining: int, lo: int) -> None:
        # suffix holds the rightmost entries; lo bounds the next entry left
        slots = k - len(suffix)
        if slots == 0:
            if remaining == 0:
                out.add(suffix)
            return
        if slots == 1:
            if remaining >= lo:
                out.add((remaining,) + suffix)
            return
        for j in range(lo, remaining + 1):
            extend((j,) + suffix, remaining - j, 2 * j + 1)

    last_hi = d if m is None else min(d, m)
    for last in range(n, last_hi + 1):
        extend((last,), d - last, 2 * last + 1)
    return frozenset(out)


def p_star(J: CUSeq, n: int) -> Cell:
    """[J] -> [J, n]; needs excess(J) >= 2n + 1."""
    if not excess_at_least(J, 2 * n + 1):
        raise ValueError(f"p_star needs excess >= {2 * n + 1}, got {J}")
    return cu_concat(tuple(J), (n,))


def e_star(J: CUSeq, n: int) -> Optional[Cell]:
    """Suspension on cells: None (zero) when excess equals n, else the cell."""
    J = tuple(J)
    if not cu_is_valid(J) or not excess_at_least(J, n):
        raise ValueError(f"{J} is not a cell of the weight-{n} layer")
    if J and J[-1] == n:
        return None
    return J


def steenrod_on_cell(r: int, J: CUSeq, n: int) -> FrozenSet[Cell]:
    """Support of the degree-r dual Steenrod operation on the cell [J]."""
    from tsseq.dyer_lashof import nishida_action

    J = tuple(J)
    if not cu_is_valid(J) or not excess_at_least(J, n):
        raise ValueError(f"{J} is not a cell of the weight-{n} layer")
    return nishida_action(r, [J], n)
