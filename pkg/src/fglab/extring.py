"""Quotient rings (Z/p^N)[T]/(g(T)) and their elements.

For an Eisenstein (or cyclotomic ``Phi_{p^k}(1+T)``) modulus of degree e the
class of T is a uniformizer, and valuations are normalized so that
``v(T) = 1`` and ``v(p) = e``.  Element precision is measured in the same
units: an element with ``prec = g`` is known modulo ``T^g``.  Since
``v(sum a_i T^i) = min_i (e v_p(a_i) + i)``, being known modulo ``T^g`` means
coefficient ``a_i`` is known modulo ``p^ceil((g - i) / e)``, which is the
canonical reduction used here.

Generic (non-Eisenstein) moduli get uniform p-adic coefficient precision and
no valuation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    NewtonHypothesisFailed,
    NonUnit,
    PrecisionExhausted,
    UnsupportedRing,
)
from .padic import AtLeast, PAdicNum, PrimeConfig, vp_int


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True, eq=False)
class ExtRing:
    cfg: PrimeConfig
    modulus: tuple          # exact integer coefficients of g, low degree first, monic
    kind: str = "generic"   # "cyclotomic" | "eisenstein" | "generic"
    level: int | None = None

    def __post_init__(self):
        g = tuple(int(c) for c in self.modulus)
        object.__setattr__(self, "modulus", g)
        if len(g) < 2 or g[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 1")
        if self.kind in ("cyclotomic", "eisenstein"):
            p = self.cfg.p
            if any(c % p for c in g[:-1]):
                raise ValueError("Eisenstein modulus needs all lower coefficients divisible by p")
            if g[0] == 0 or vp_int(g[0], p) != 1:
                raise ValueError("Eisenstein modulus needs constant term of valuation exactly 1")
        elif self.kind != "generic":
            raise ValueError(f"unknown ring kind {self.kind!r}")

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    @property
    def ram_index(self) -> int | None:
        return self.degree if self.kind != "generic" else None

    @property
    def eisenstein(self) -> bool:
        return self.kind != "generic"

    @property
    def unit(self) -> int:
        """Precision units per p-digit."""
        return self.degree if self.eisenstein else 1

    @property
    def cap(self) -> int:
        return self.unit * self.cfg.N

    def describe(self) -> dict:
        d = {"kind": self.kind, "modulus": list(self.modulus)}
        if self.level is not None:
            d["level"] = self.level
        return d

    # -- element constructors --------------------------------------------------
    def element(self, coeffs, prec: int | None = None, shift: int = 0) -> "ExtElem":
        return ExtElem(self, coeffs, self.cap if prec is None else prec, shift)

    def __call__(self, value) -> "ExtElem":
        if isinstance(value, ExtElem):
            return value
        if isinstance(value, PAdicNum):
            return self.from_padic(value)
        return self.element([int(value)])

    def from_padic(self, c: PAdicNum) -> "ExtElem":
        prec = self.cap if c.prec is None else min(self.cap, self.unit * c.prec)
        return ExtElem(self, [c.mantissa], prec, c.shift)

    @property
    def gen(self) -> "ExtElem":
        if self.degree == 1:
            return self.element([-self.modulus[0]])
        return self.element([0, 1])

    def zero(self) -> "ExtElem":
        return self.element([0])

    def one(self) -> "ExtElem":
        return self.element([1])


def cyclotomic_poly_shifted(p: int, k: int) -> list:
    """Coefficients of Phi_{p^k}(1 + T) = sum_{j<p} (1+T)^{j p^{k-1}}."""
    step = p ** (k - 1)
    deg = (p - 1) * step
    out = [0] * (deg + 1)
    for j in range(p):
        e = j * step
        for i in range(e + 1):
            out[i] += math.comb(e, i)
    return out


def cyclotomic_ring(cfg: PrimeConfig, k: int) -> ExtRing:
    """(Z/p^N)[T]/(Phi_{p^k}(1+T)); T is zeta_{p^k} - 1, e = phi(p^k)."""
    if k < 1:
        raise ValueError("level k must be >= 1")
    return ExtRing(cfg, tuple(cyclotomic_poly_shifted(cfg.p, k)), "cyclotomic", k)


def eisenstein_ring(cfg: PrimeConfig, coeffs) -> ExtRing:
    return ExtRing(cfg, tuple(coeffs), "eisenstein")


def base_ring(cfg: PrimeConfig) -> ExtRing:
    # Degree-1 Eisenstein modulus T - p: the quotient is Z/p^N itself and the
    # valuation formula reduces to v_p.
    return ExtRing(cfg, (-cfg.p, 1), "eisenstein")


def _poly_mod(a: list, g: tuple) -> list:
    """Remainder of an integer polynomial modulo a monic integer polynomial."""
    e = len(g) - 1
    a = list(a)
    for top in range(len(a) - 1, e - 1, -1):
        c = a[top]
        if c:
            base = top - e
            for i in range(e):
                a[base + i] -= c * g[i]
        a[top] = 0
    a = a[:e]
    return a + [0] * (e - len(a))


class ExtElem:
    """``p**shift * sum(coeffs[i] T^i)`` known modulo ``T^prec`` (see module doc)."""

    __slots__ = ("ring", "coeffs", "prec", "shift")

    def __init__(self, ring: ExtRing, coeffs, prec: int, shift: int = 0):
        p = ring.cfg.p
        e = ring.degree
        c = [int(x) for x in coeffs]
        if len(c) > e:
            c = _poly_mod(c, ring.modulus)
        c = c + [0] * (e - len(c))
        prec = min(int(prec), ring.cap)
        s = int(shift)
        if s > 0:
            c = [x * p**s for x in c]
            s = 0
        c = [x % p ** k if k > 0 else 0 for x, k in zip(c, _coef_exps(ring, prec, s))]
        while s < 0 and any(c) and all(x % p == 0 for x in c):
            c = [x // p for x in c]
            s += 1
        if not any(c):
            s = 0
        self.ring = ring
        self.coeffs = tuple(c)
        self.prec = prec
        self.shift = s

    # -- queries ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def val(self):
        """Valuation in ring units (v(T) = 1, v(p) = e), or AtLeast(prec) if zero."""
        if not self.ring.eisenstein:
            raise UnsupportedRing("valuation is only defined on Eisenstein/cyclotomic rings")
        return self._val()

    def _val(self):
        ring = self.ring
        if self.is_zero():
            return AtLeast(self.prec)
        e = ring.unit
        p = ring.cfg.p
        if ring.eisenstein:
            return e * self.shift + min(e * vp_int(a, p) + i for i, a in enumerate(self.coeffs) if a)
        return self.shift + min(vp_int(a, p) for a in self.coeffs if a)

    def _vlow(self):
        """Lower bound for the valuation usable on any ring kind."""
        if self.ring.eisenstein:
            return self._val()
        return self.shift if not self.is_zero() else self.prec

    def equal_at(self, other, n: int | None = None) -> bool:
        diff = self - self.ring(other)
        if n is None:
            return diff.is_zero()
        return diff._vlow() >= n

    def __eq__(self, other):
        if not isinstance(other, (ExtElem, int, PAdicNum)):
            return NotImplemented
        return self.equal_at(other)

    __hash__ = None

    def reduce(self, n: int) -> "ExtElem":
        return ExtElem(self.ring, self.coeffs, min(n, self.prec), self.shift)

    # -- arithmetic ----------------------------------------------------------------
    def _lift(self, other) -> "ExtElem":
        if isinstance(other, ExtElem):
            if other.ring is not self.ring:
                raise ValueError("elements of different rings")
            return other
        return self.ring(other)

    def __add__(self, other):
        other = self._lift(other)
        p = self.ring.cfg.p
        s = min(self.shift, other.shift)
        c = [a * p ** (self.shift - s) + b * p ** (other.shift - s)
             for a, b in zip(self.coeffs, other.coeffs)]
        return ExtElem(self.ring, c, min(self.prec, other.prec), s)

    __radd__ = __add__

    def __neg__(self):
        return ExtElem(self.ring, [-a for a in self.coeffs], self.prec, self.shift)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        ring = self.ring
        prec = min(self.prec + other._vlow(), other.prec + self._vlow(), ring.cap)
        e = ring.degree
        prod = [0] * (2 * e - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return ExtElem(ring, _poly_mod(prod, ring.modulus), prec, self.shift + other.shift)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers: use inverse()")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def div_by_T(self) -> "ExtElem":
        """Exact division by the uniformizer T (may introduce a p-denominator)."""
        ring = self._need_eisenstein()
        p = ring.cfg.p
        g = ring.modulus
        e = ring.degree
        a = list(self.coeffs)
        s = self.shift
        w = g[0] // p
        k = max(_ceil_div(self.prec, e) - s + 2, 2)
        winv = pow(w, -1, p**k)
        tail = a[1:] + [0]
        # a0 / T = -(a0 / g0) (g1 + g2 T + ... + T^(e-1))
        if a[0] % p == 0:
            q = -(a[0] // p) * winv
            out = [t + q * gi for t, gi in zip(tail, g[1:])]
        else:
            q = -a[0] * winv
            out = [p * t + q * gi for t, gi in zip(tail, g[1:])]
            s -= 1
        return ExtElem(ring, out, self.prec - 1, s)

    def inverse(self) -> "ExtElem":
        ring = self._need_eisenstein()
        if self._val() != 0:
            raise NonUnit(f"element of valuation {self._val()} is not a unit")
        p = ring.cfg.p
        e = ring.degree
        k = _ceil_div(self.prec, e) + 1
        w = ExtElem(ring, [pow(self.coeffs[0], -1, p**k)], self.prec)
        for _ in range(self.prec.bit_length() + 2):
            err = ring.one() - self * w
            if err.is_zero():
                break
            w = w + w * err
        return w.reduce(self.prec)

    def divide_exact(self, other) -> "ExtElem":
        other = self._lift(other)
        if other.is_zero():
            raise PrecisionExhausted("divisor vanishes at the available precision")
        w = other.val()
        u = other
        for _ in range(w):
            u = u.div_by_T()
        out = self * u.inverse()
        for _ in range(w):
            out = out.div_by_T()
        if out.prec <= 0:
            raise PrecisionExhausted("division exhausted precision")
        return out

    __truediv__ = divide_exact

    def _need_eisenstein(self) -> ExtRing:
        if not self.ring.eisenstein:
            raise UnsupportedRing("operation needs an Eisenstein/cyclotomic ring")
        return self.ring

    def to_dict(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs], "shift": self.shift, "prec": self.prec}

    def __repr__(self):
        terms = " + ".join(f"{c}*T^{i}" for i, c in enumerate(self.coeffs) if c) or "0"
        sc = f"{self.ring.cfg.p}^{self.shift}*" if self.shift else ""
        return f"ExtElem({sc}({terms}) + O(T^{self.prec}))"


def _coef_exps(ring: ExtRing, prec: int, shift: int) -> list:
    e = ring.degree
    if ring.eisenstein:
        return [_ceil_div(prec - i, e) - shift for i in range(e)]
    return [prec - shift] * e


def val_ext(z: ExtElem):
    return z.val()


def eval_poly(coeffs, z: ExtElem) -> ExtElem:
    """Exact evaluation of a polynomial with integer or PAdicNum coefficients (Horner)."""
    ring = z.ring
    acc = ring.zero()
    for c in reversed(list(coeffs)):
        acc = acc * z + ring(c)
    return acc


def hensel_lift(f, seed: ExtElem, target_prec: int) -> ExtElem:
    """Newton refinement of a root of ``f`` from ``seed``.

    ``f`` is a list of polynomial coefficients (low degree first) or a
    one-variable TruncatedSeries.  Requires ``v(f(seed)) > 2 v(f'(seed))``.
    The result satisfies ``v(f(z)) >= target_prec`` and is returned at the
    precision to which the root itself is determined.
    """
    ring = seed.ring
    if not ring.eisenstein:
        raise UnsupportedRing("hensel_lift needs valuations")
    fn, dfn = _evaluators(f)
    z = seed
    fz, dfz = fn(z), dfn(z)
    if dfz.is_zero():
        raise NewtonHypothesisFailed("f'(seed) vanishes at the available precision")
    vd = dfz.val()
    if not fz.val() > 2 * vd:
        raise NewtonHypothesisFailed(f"v(f(seed))={fz.val()} is not > 2 v(f'(seed))={2 * vd}")
    if target_prec - vd > ring.cap:
        raise PrecisionExhausted(f"target {target_prec} beyond ring cap {ring.cap}")
    for _ in range(target_prec.bit_length() + 4):
        if fz.val() >= target_prec:
            break
        z = z - fz.divide_exact(dfz)
        fz, dfz = fn(z), dfn(z)
    else:
        raise PrecisionExhausted("Newton iteration did not reach the target precision")
    return z.reduce(target_prec - vd)


def _evaluators(f):
    if isinstance(f, (list, tuple)):
        coeffs = list(f)
        dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]
        return (lambda z: eval_poly(coeffs, z)), (lambda z: eval_poly(dcoeffs, z))
    from .series import derivative, eval_at
    df = derivative(f, 0)
    return (lambda z: eval_at(f, z)[0]), (lambda z: eval_at(df, z)[0])
