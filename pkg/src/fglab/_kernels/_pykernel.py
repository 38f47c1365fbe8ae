"""Reference kernels in pure Python. Always available; used when the compiled
extension is missing or FGLAB_KERNEL=python."""
from __future__ import annotations

from ..monomials import mul_table


def mul_trunc(a, b, d, t, modulus):
    """Truncated product of dense graded coefficient vectors of length count(d, t).

    ``modulus=None`` means exact integer arithmetic.
    """
    tab = mul_table(d, t)
    n = tab.n
    if sum(1 for x in a if x) > sum(1 for x in b if x):
        a, b = b, a
    out = [0] * n
    lim, off, kt = tab.lim, tab.off, tab.ktab
    for i in range(n):
        ai = a[i]
        if not ai:
            continue
        o = off[i]
        for k, bj in zip(kt[o:o + lim[i]], b):
            if bj:
                out[k] += ai * bj
    if modulus is not None:
        out = [x % modulus for x in out]
    return out
