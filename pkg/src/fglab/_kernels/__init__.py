"""Kernel selection.

The compiled extension is used when it imports; ``FGLAB_KERNEL=python`` forces
the pure-Python fallback and ``FGLAB_KERNEL=compiled`` makes a missing
extension an error.
"""
from __future__ import annotations

import os

from ..monomials import mul_table
from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

_choice = os.environ.get("FGLAB_KERNEL", "auto")
if _choice == "compiled" and _ckernel is None:
    raise ImportError("FGLAB_KERNEL=compiled but fglab._kernels._ckernel is not built")

BACKEND = "compiled" if (_ckernel is not None and _choice != "python") else "python"


def available_backends() -> list:
    return ["python"] + (["compiled"] if _ckernel is not None else [])


def set_backend(name: str) -> None:
    global BACKEND
    if name not in available_backends():
        raise ValueError(f"kernel backend {name!r} not available")
    BACKEND = name


def mul_trunc(a, b, d, t, modulus, backend=None):
    """Product of two dense graded vectors truncated at total degree t.

    ``a`` and ``b`` have length ``count(d, t)``; with a modulus they must be
    reduced into ``[0, modulus)``.
    """
    if (backend or BACKEND) == "compiled" and modulus is not None:
        tab = mul_table(d, t)
        a = list(a)
        b = list(b)
        if modulus < _ckernel.WORD_LIMIT:
            return _ckernel.mul_word(a, b, tab.n, tab.lim_arr, tab.off_arr, tab.ktab_arr, modulus)
        r = _ckernel.primes_needed(modulus, tab.n)
        if r > 0:
            return _ckernel.mul_rns(a, b, tab.n, tab.lim_arr, tab.off_arr, tab.ktab_arr, modulus, r)
    return _pykernel.mul_trunc(a, b, d, t, modulus)
