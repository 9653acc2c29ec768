"""Exact rank of integer/rational matrices by fraction-free elimination."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence


def _as_int_row(row: Sequence) -> list[int]:
    fr = [Fraction(x) for x in row]
    den = 1
    for x in fr:
        den = lcm(den, x.denominator)
    return [int(x * den) for x in fr]


def rational_rank(rows: Iterable[Sequence]) -> int:
    """Rank over the rationals.

    Entries may be ints, Fractions or decimal strings.  Rows are scaled to
    integers and reduced with integer row operations, dividing out the gcd
    after each step to keep entries small.
    """
    m = [_as_int_row(r) for r in rows]
    m = [r for r in m if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank]
        a = p[col]
        for i in range(rank + 1, len(m)):
            b = m[i][col]
            if b == 0:
                continue
            r = [a * x - b * y for x, y in zip(m[i], p)]
            g = 0
            for x in r:
                g = gcd(g, x)
            m[i] = [x // g for x in r] if g > 1 else r
        rank += 1
        if rank == len(m):
            break
    return rank
