import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from fglab import _kernels  # noqa: E402

settings.register_profile("fglab", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("fglab")


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    """Run a test once per available multiplication kernel."""
    old = _kernels.BACKEND
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(old)


def to_dict_series(s):
    """TruncatedSeries -> {exponent: Fraction} (exact values of the stored digits)."""
    return {e: c.to_fraction() for e, c in s.terms()}


def residues(s, n):
    """Coefficient residues mod p^n of a series with integral coefficients."""
    p = s.p
    n = s.cfg.N if n is None else n
    return {e: c.to_int() % p**n for e, c in s.terms() if c.to_int() % p**n}


def dict_residues(dct, p, n):
    from oracles import padic_residue
    out = {}
    for e, c in dct.items():
        r = padic_residue(c, p, n)
        if r:
            out[e] = r
    return out
