"""Independent reference computations used by the tests.

Nothing here imports fglab's arithmetic: series are plain dicts
``{exponent tuple: Fraction}`` or sympy expressions, and every answer is
obtained by brute force or by solving for undetermined coefficients.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import sympy


def ext_euclid_inverse(a: int, m: int) -> int:
    """Modular inverse by the extended Euclidean algorithm."""
    r0, r1, s0, s1 = m, a % m, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise ValueError("not invertible")
    return s0 % m


def sqrt_mod_search(c: int, m: int) -> list:
    return [x for x in range(m) if (x * x - c) % m == 0]


def padic_residue(x: Fraction, p: int, n: int) -> int:
    """x mod p^n for a rational with denominator prime to p."""
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, p**n) % p**n


# -- dict series -----------------------------------------------------------------


def dmul(a: dict, b: dict, deg: int) -> dict:
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(e) <= deg:
                out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def dadd(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def dcompose(outer: dict, inners: list, deg: int) -> dict:
    """Naive substitution: sum over outer terms of products of inner powers."""
    d_in = len(next(iter(inners[0]))) if inners[0] else 1
    one = {(0,) * d_in: 1}
    out = {}
    cache = {}
    for e, c in outer.items():
        term = {(0,) * d_in: c}
        for i, k in enumerate(e):
            key = (i, k)
            if key not in cache:
                pw = one
                for _ in range(k):
                    pw = dmul(pw, inners[i], deg)
                cache[key] = pw
            term = dmul(term, cache[key], deg)
        out = dadd(out, term)
    return out


def binomial_series(a, deg: int) -> dict:
    """(1+X)^a - 1 for rational a, from the generalized binomial coefficients."""
    out = {}
    c = Fraction(1)
    for k in range(1, deg + 1):
        c = c * (Fraction(a) - k + 1) / k
        if c:
            out[(k,)] = c
    return out


# -- undetermined coefficients ------------------------------------------------------
#
# Unknown coefficients are sympy symbols carried through the truncated dict
# arithmetic above; each degree yields linear equations solved by sympy.


def _rat(c):
    c = Fraction(c)
    return sympy.Rational(c.numerator, c.denominator)


def _frac(v):
    return Fraction(int(v.p), int(v.q))


def oracle_comp_inverse(h: dict, deg: int) -> dict:
    """g with h(g(X)) = X through degree deg, solving for g_k one degree at a time."""
    hs = {e: _rat(c) for e, c in h.items()}
    g = {}
    for m in range(1, deg + 1):
        s = sympy.Symbol(f"g{m}")
        comp = dcompose(hs, [{**g, (m,): s}], m)
        eq = sympy.expand(comp.get((m,), 0) - (1 if m == 1 else 0))
        g[(m,)] = sympy.solve(eq, s)[0]
    return {e: _frac(v) for e, v in g.items() if v != 0}


def oracle_lt_low_degree(f: dict, deg: int = 3) -> dict:
    """Coefficients of degree 2..deg of the law F with f(F) = F(f(X), f(Y)).

    All unknowns of degree <= deg are solved at once as a linear system.
    """
    fs = {e: _rat(c) for e, c in f.items()}
    mons = [(i, m - i) for m in range(2, deg + 1) for i in range(m, -1, -1)]
    cs = sympy.symbols(f"c0:{len(mons)}")
    F = {(1, 0): 1, (0, 1): 1}
    F.update(zip(mons, cs))
    fX = {(k, 0): c for (k,), c in fs.items()}
    fY = {(0, k): c for (k,), c in fs.items()}
    lhs = dcompose(fs, [F], deg)
    rhs = dcompose(F, [fX, fY], deg)
    eqs = [sympy.expand(lhs.get(e, 0) - rhs.get(e, 0)) for e in mons]
    sol = sympy.solve(eqs, cs, dict=True)[0]
    return {e: _frac(sol[c]) for c, e in zip(cs, mons) if sol[c] != 0}


def oracle_mult_endo(a, deg: int) -> dict:
    """[a] on X + Y + XY from h(X+Y+XY) = h(X) + h(Y) + h(X) h(Y), degree by degree."""
    law = {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    h = {(1,): _rat(a)}
    for m in range(2, deg + 1):
        s = sympy.Symbol(f"h{m}")
        hm = {**h, (m,): s}
        hX = {(k, 0): c for (k,), c in hm.items()}
        hY = {(0, k): c for (k,), c in hm.items()}
        lhs = dcompose(hm, [law], m)
        rhs = dadd(dadd(hX, hY), dmul(hX, hY, m))
        eqs = [sympy.expand(lhs.get((i, m - i), 0) - rhs.get((i, m - i), 0))
               for i in range(m + 1)]
        eqs = [e for e in eqs if e != 0]
        h[(m,)] = sympy.solve(eqs, s, dict=True)[0][s]
    return {e: _frac(v) for e, v in h.items() if v != 0}


def random_poly_dict(rng, d: int, deg: int, lo: int = -20, hi: int = 20, const=True) -> dict:
    out = {}
    for m in range(0 if const else 1, deg + 1):
        for e in itertools.product(range(m + 1), repeat=d):
            if sum(e) == m and rng.random() < 0.6:
                c = rng.randint(lo, hi)
                if c:
                    out[e] = c
    return out


def vp(x, p: int):
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v
