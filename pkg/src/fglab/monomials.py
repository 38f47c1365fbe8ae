"""Graded monomial ordering and the index tables used by the multiplication kernels.

Monomials in d variables are ordered by total degree, then lexicographically
descending inside a degree ((2,0) before (1,1) before (0,2)).  Because the
order inside a degree does not depend on the cap, the monomials of degree
<= t always form a prefix of those of degree <= T for T >= t, so truncating a
dense coefficient vector is a slice.
"""
from __future__ import annotations

from array import array
from functools import lru_cache
from math import comb
from typing import NamedTuple


def count(d: int, t: int) -> int:
    """Number of monomials of total degree <= t in d variables."""
    if t < 0:
        return 0
    return comb(t + d, d)


def _of_degree(d: int, k: int):
    if d == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _of_degree(d - 1, k - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomials(d: int, t: int) -> tuple:
    out = []
    for k in range(t + 1):
        out.extend(_of_degree(d, k))
    return tuple(out)


@lru_cache(maxsize=None)
def index_map(d: int, t: int) -> dict:
    return {e: i for i, e in enumerate(monomials(d, t))}


@lru_cache(maxsize=None)
def degrees(d: int, t: int) -> tuple:
    return tuple(sum(e) for e in monomials(d, t))


def degree_start(d: int, k: int) -> int:
    """Index of the first monomial of total degree k."""
    return count(d, k - 1)


class MulTable(NamedTuple):
    n: int
    lim: list      # lim[i]: number of j with deg(i) + deg(j) <= t
    off: list      # offset of row i in ktab
    ktab: list     # ktab[off[i] + j] = index of monomial e_i + e_j
    lim_arr: array
    off_arr: array
    ktab_arr: array


@lru_cache(maxsize=64)
def mul_table(d: int, t: int) -> MulTable:
    mons = monomials(d, t)
    idx = index_map(d, t)
    degs = degrees(d, t)
    lim, off, ktab = [], [], []
    for ei, di in zip(mons, degs):
        L = count(d, t - di)
        lim.append(L)
        off.append(len(ktab))
        for ej in mons[:L]:
            ktab.append(idx[tuple(x + y for x, y in zip(ei, ej))])
    return MulTable(len(mons), lim, off, ktab,
                    array("q", lim), array("q", off), array("q", ktab))
