"""Truncated power series in d variables over Z_p.

A :class:`TruncatedSeries` stores a dense coefficient vector in the graded
monomial order of :mod:`fglab.monomials`, for all monomials of total degree
``<= deg``.  Values are ``p**shift * mantissa``; the common ``shift`` is
``<= 0`` and only negative when a coefficient needs a p-power denominator.
``prec`` is the absolute p-adic precision shared by every coefficient
(``None`` for exact integer data).

``tail`` bounds the coefficients *beyond* ``deg``, which matters when a
truncation is evaluated at a point:

``"zero"``      the series is a polynomial (exact input data)
``"integral"``  unknown coefficients in Z_p
``"log"``       the degree-k coefficient has valuation >= -v_p(k)
``"unknown"``   no bound (evaluation refuses)
"""
from __future__ import annotations

import math
from fractions import Fraction

from . import _kernels
from .errors import (
    DenominatorCapExceeded,
    DivergentEvaluation,
    InfiniteHeightAtCap,
    InnerConstantTermNonzero,
    NonUnitDerivative,
    PrecisionExhausted,
)
from .extring import ExtElem
from .monomials import count, degree_start, degrees, index_map, monomials
from .padic import AtLeast, PAdicNum, PrimeConfig, log_floor, vp_int

_TAILS = ("zero", "integral", "log", "unknown")


def _worse_tail(a: str, b: str) -> str:
    return a if _TAILS.index(a) >= _TAILS.index(b) else b


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TruncatedSeries:
    __slots__ = ("cfg", "d", "deg", "coeffs", "shift", "prec", "tail", "budget")

    def __init__(self, cfg: PrimeConfig, d: int, coeffs, deg: int | None = None,
                 prec: int | None = None, shift: int = 0, tail: str | None = None,
                 budget=None):
        p = cfg.p
        deg = cfg.M if deg is None else deg
        if deg < 0:
            raise ValueError("deg must be >= 0")
        n = count(d, deg)
        c = [int(x) for x in coeffs[:n]]
        if len(c) < n:
            c.extend([0] * (n - len(c)))
        s = int(shift)
        if s > 0:
            c = [x * p**s for x in c]
            s = 0
        if prec is not None:
            if prec <= 0:
                raise PrecisionExhausted(f"precision {prec} leaves no p-adic digits")
            k = prec - s
            c = [x % p**k for x in c] if k > 0 else [0] * n
        while s < 0 and all(x % p == 0 for x in c) and any(c):
            c = [x // p for x in c]
            s += 1
        if not any(c):
            s = 0
        if s < -cfg.D:
            raise DenominatorCapExceeded(f"series needs denominator p^{-s}, cap is p^{cfg.D}")
        if tail is None:
            tail = "zero" if prec is None else "integral"
        if tail not in _TAILS:
            raise ValueError(f"unknown tail kind {tail!r}")
        self.cfg = cfg
        self.d = d
        self.deg = deg
        self.coeffs = tuple(c)
        self.shift = s
        self.prec = prec
        self.tail = tail
        self.budget = budget

    # -- constructors -----------------------------------------------------------
    @classmethod
    def from_terms(cls, cfg: PrimeConfig, d: int, terms: dict, deg: int | None = None,
                   prec: int | None = None, tail: str | None = None) -> "TruncatedSeries":
        """Build from ``{exponent tuple (or int when d == 1): value}``.

        Values may be ints, Fractions with p-power denominators, or PAdicNums;
        finite-precision PAdicNums lower ``prec`` accordingly.
        """
        deg = cfg.M if deg is None else deg
        idx = index_map(d, deg)
        vals = {}
        for e, v in terms.items():
            e = (e,) if isinstance(e, int) else tuple(e)
            if len(e) != d:
                raise ValueError(f"exponent {e} has wrong length for d={d}")
            if sum(e) > deg:
                raise ValueError(f"exponent {e} exceeds degree cap {deg}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent {e}")
            if isinstance(v, PAdicNum):
                if v.prec is not None:
                    prec = v.prec if prec is None else min(prec, v.prec)
                v = v.to_fraction()
            vals[idx[e]] = Fraction(v)
        p = cfg.p
        s = 0
        for v in vals.values():
            if v.denominator != 1:
                k = vp_int(v.denominator, p)
                if v.denominator != p**k:
                    raise ValueError(f"denominator {v.denominator} is not a power of {p}")
                s = min(s, -k)
        c = [0] * count(d, deg)
        for i, v in vals.items():
            w = v * Fraction(p) ** (-s)
            c[i] = w.numerator
        return cls(cfg, d, c, deg, prec, s, tail)

    @classmethod
    def from_poly(cls, cfg: PrimeConfig, coeffs, deg: int | None = None,
                  prec: int | None = None) -> "TruncatedSeries":
        """One-variable series from a coefficient list (low degree first)."""
        deg = cfg.M if deg is None else deg
        terms = {}
        tail = None
        for k, v in enumerate(coeffs):
            if v:
                if k > deg:
                    tail = "integral"
                    continue
                terms[k] = v
        s = cls.from_terms(cfg, 1, terms, deg, prec)
        if tail is not None:
            s = s.with_tail(_worse_tail(s.tail, tail))
        return s

    @classmethod
    def variable(cls, cfg: PrimeConfig, d: int = 1, i: int = 0, deg: int | None = None):
        e = [0] * d
        e[i] = 1
        return cls.from_terms(cfg, d, {tuple(e): 1}, deg)

    @classmethod
    def constant(cls, cfg: PrimeConfig, d: int, value=1, deg: int | None = None):
        return cls.from_terms(cfg, d, {(0,) * d: value}, deg)

    def with_tail(self, tail: str) -> "TruncatedSeries":
        return TruncatedSeries(self.cfg, self.d, self.coeffs, self.deg, self.prec,
                               self.shift, tail)

    # -- queries ---------------------------------------------------------------
    @property
    def p(self) -> int:
        return self.cfg.p

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    def __len__(self):
        return len(self.coeffs)

    def _key(self, e) -> int:
        if isinstance(e, int):
            if self.d != 1:
                raise KeyError("integer index only for one-variable series")
            return e
        return index_map(self.d, self.deg)[tuple(e)]

    def __getitem__(self, e) -> PAdicNum:
        k = self._key(e)
        if k >= len(self.coeffs):
            raise KeyError(f"{e} beyond degree {self.deg}")
        return PAdicNum(self.cfg, self.coeffs[k], self.shift, self.prec)

    def terms(self):
        """Nonzero (exponent, PAdicNum) pairs in graded order."""
        for e, c in zip(monomials(self.d, self.deg), self.coeffs):
            if c:
                yield e, PAdicNum(self.cfg, c, self.shift, self.prec)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def poly_degree(self) -> int:
        """Largest total degree carrying a nonzero stored coefficient (-1 for zero)."""
        degs = degrees(self.d, self.deg)
        top = -1
        for k, c in enumerate(self.coeffs):
            if c:
                top = degs[k]
        return top

    def valuation(self):
        """Minimum coefficient valuation (AtLeast(prec) when all vanish at precision)."""
        p = self.p
        vs = [vp_int(c, p) for c in self.coeffs if c]
        if not vs:
            return math.inf if self.prec is None else AtLeast(self.prec)
        v = self.shift + min(vs)
        return v if self.prec is None else min(v, self.prec)

    def constant_term(self) -> PAdicNum:
        return self[(0,) * self.d]

    # -- structural -------------------------------------------------------------
    def truncate(self, deg: int) -> "TruncatedSeries":
        if deg >= self.deg:
            return self
        n = count(self.d, deg)
        tail = self.tail
        if any(self.coeffs[n:]):
            tail = _worse_tail(tail, "integral" if self.shift >= 0 else "unknown")
        return TruncatedSeries(self.cfg, self.d, self.coeffs[:n], deg, self.prec, self.shift, tail)

    def reduce(self, prec: int) -> "TruncatedSeries":
        """Forget digits beyond p^prec (exact data becomes finite)."""
        if self.prec is not None and self.prec <= prec:
            return self
        return TruncatedSeries(self.cfg, self.d, self.coeffs, self.deg, prec, self.shift,
                               self.tail)

    def with_cfg(self, cfg: PrimeConfig) -> "TruncatedSeries":
        return TruncatedSeries(cfg, self.d, self.coeffs, self.deg, self.prec, self.shift, self.tail)

    def homogeneous_part(self, m: int) -> "TruncatedSeries":
        lo, hi = count(self.d, m - 1), count(self.d, m)
        c = [0] * len(self.coeffs)
        c[lo:hi] = self.coeffs[lo:hi]
        return TruncatedSeries(self.cfg, self.d, c, self.deg, self.prec, self.shift, "zero"
                               if self.prec is None else self.tail)

    # -- comparison ---------------------------------------------------------------
    def first_difference(self, other: "TruncatedSeries", prec: int | None = None):
        """Smallest exponent (graded order) where the two series differ at the
        common precision and degree, or None."""
        diff = _sub_raw(self, other, prec)
        for e, c in zip(monomials(diff.d, diff.deg), diff.coeffs):
            if c:
                return e
        return None

    def equal_at(self, other: "TruncatedSeries", prec: int | None = None) -> bool:
        return self.first_difference(other, prec) is None

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.d == other.d and self.equal_at(other)

    __hash__ = None

    # -- arithmetic -----------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(self.cfg, self.d, other, self.deg)
        return _add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.cfg, self.d, [-c for c in self.coeffs], self.deg, self.prec,
                               self.shift, self.tail)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(self.cfg, self.d, other, self.deg)
        return _add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return _mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = TruncatedSeries.constant(self.cfg, self.d, 1, self.deg)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __call__(self, *inners):
        return compose(self, list(inners))

    def __repr__(self):
        return f"TruncatedSeries({self.to_str()})"

    def to_str(self, names=None) -> str:
        names = names or (["X"] if self.d == 1 else [f"X{i + 1}" for i in range(self.d)])
        parts = []
        for e, c in self.terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            val = c.to_fraction()
            if self.prec is not None and val.denominator == 1:
                val = c.mantissa * self.p ** max(c.shift, 0)
            parts.append(f"{val}" + (f"*{mono}" if mono else ""))
        body = " + ".join(parts) or "0"
        extra = [f"deg<={self.deg}"]
        if self.prec is not None:
            extra.append(f"O({self.p}^{self.prec})")
        return f"{body} [{', '.join(extra)}]"


# ----------------------------------------------------------------------------
# ring operations


def _check_compatible(a: TruncatedSeries, b: TruncatedSeries):
    if a.cfg.p != b.cfg.p or a.d != b.d:
        raise ValueError("series over different primes or variable counts")


def _align(a: TruncatedSeries, b: TruncatedSeries, deg: int):
    n = count(a.d, deg)
    s = min(a.shift, b.shift)
    p = a.p
    fa, fb = p ** (a.shift - s), p ** (b.shift - s)
    A = [x * fa for x in a.coeffs[:n]]
    B = [x * fb for x in b.coeffs[:n]]
    return A, B, s


def _add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_compatible(a, b)
    deg = min(a.deg, b.deg)
    a, b = a.truncate(deg), b.truncate(deg)
    A, B, s = _align(a, b, deg)
    return TruncatedSeries(a.cfg, a.d, [x + y for x, y in zip(A, B)], deg,
                           _min_prec(a.prec, b.prec), s, _worse_tail(a.tail, b.tail))


def _sub_raw(a: TruncatedSeries, b: TruncatedSeries, prec=None) -> TruncatedSeries:
    _check_compatible(a, b)
    deg = min(a.deg, b.deg)
    A, B, s = _align(a, b, deg)
    pr = _min_prec(a.prec, b.prec)
    if prec is not None:
        pr = _min_prec(pr, prec)
    return TruncatedSeries(a.cfg, a.d, [x - y for x, y in zip(A, B)], deg, pr, s, "unknown")


def _product_prec(a: TruncatedSeries, b: TruncatedSeries):
    cands = []
    if a.prec is not None:
        vb = b.valuation()
        if vb != math.inf:
            cands.append(a.prec + int(vb))
    if b.prec is not None:
        va = a.valuation()
        if va != math.inf:
            cands.append(b.prec + int(va))
    if not cands:
        return None
    return min(cands)


def _mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_compatible(a, b)
    deg = min(a.deg, b.deg)
    n = count(a.d, deg)
    prec = _product_prec(a, b)
    s = a.shift + b.shift
    if prec is None and (a.prec is not None or b.prec is not None):
        # one factor is an exact zero
        return TruncatedSeries(a.cfg, a.d, [], deg, None)
    A, B = a.coeffs[:n], b.coeffs[:n]
    if prec is None:
        out = _kernels.mul_trunc(A, B, a.d, deg, None)
    elif prec - s <= 0:
        out = []
    else:
        mod = a.p ** (prec - s)
        out = _kernels.mul_trunc([x % mod for x in A], [x % mod for x in B], a.d, deg, mod)
    if a.tail == "zero" and b.tail == "zero" and a.poly_degree() + b.poly_degree() <= deg:
        tail = "zero"
    elif a.tail in ("zero", "integral") and b.tail in ("zero", "integral") and s >= 0:
        tail = "integral"
    else:
        tail = "unknown"
    return TruncatedSeries(a.cfg, a.d, out, deg, prec, s, tail)


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return _add(a, b)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return _mul(a, b)


def scale(s: TruncatedSeries, c) -> TruncatedSeries:
    """Multiply by a scalar (int, Fraction or PAdicNum)."""
    if not isinstance(c, PAdicNum):
        c = PAdicNum.exact(s.cfg, c)
    cands = []
    vc = c.val()
    if s.prec is not None and vc != math.inf:
        cands.append(s.prec + int(vc))
    vs = s.valuation()
    if c.prec is not None and vs != math.inf:
        cands.append(c.prec + int(vs))
    prec = min(cands) if cands else None
    if prec is None and (s.prec is not None or c.prec is not None):
        return TruncatedSeries(s.cfg, s.d, [], s.deg, None)
    tail = s.tail
    if tail == "integral" and c.shift < 0:
        tail = "unknown"
    return TruncatedSeries(s.cfg, s.d, [x * c.mantissa for x in s.coeffs], s.deg, prec,
                           s.shift + c.shift, tail)


# ----------------------------------------------------------------------------
# composition


def _lincomb(terms, n):
    out = [0] * n
    for c, vec in terms:
        if c:
            for k, x in enumerate(vec):
                if x:
                    out[k] += c * x
    return out


def _dense_mul(a, b, d, t, mod):
    if mod is not None:
        a = [x % mod for x in a]
        b = [x % mod for x in b]
    return _kernels.mul_trunc(a, b, d, t, mod)


def compose_dense(C, d_out: int, t_out: int, inners, d_in: int, t: int, mod):
    """Dense composition outer(inner_1, ..., inner_{d_out}) truncated at degree t.

    ``C`` is the outer vector (graded, through degree t_out); each inner is a
    dense vector in d_in variables through degree t with zero constant term.
    Arithmetic is modulo ``mod`` (None for exact).
    """
    n = count(d_in, t)
    red = (lambda v: [x % mod for x in v]) if mod is not None else (lambda v: v)
    t_eff = min(t, t_out)
    mons = monomials(d_out, t_eff)
    if d_out == 1:
        groups = {e[0]: {(): c} for e, c in zip(mons, C) if c}
    else:
        groups = {}
        for e, c in zip(mons, C):
            if c:
                groups.setdefault(e[0], {})[e[1:]] = c
    if not groups:
        return [0] * n
    # products of powers of inners 1..d_out-1, keyed by exponent tuple
    rest_needed = sorted({r for g in groups.values() for r in g}, key=lambda r: (sum(r), r))
    prods = {(0,) * (d_out - 1): [1] + [0] * (n - 1)}
    for r in rest_needed:
        _power_product(r, prods, inners[1:], d_in, t, mod)
    R = {}
    for a, g in groups.items():
        R[a] = red(_lincomb([(c, prods[r]) for r, c in g.items()], n))
    top = max(R)
    acc = R[top]
    x0 = inners[0]
    for a in range(top - 1, -1, -1):
        acc = _dense_mul(acc, x0, d_in, t, mod)
        if a in R:
            acc = [u + v for u, v in zip(acc, R[a])]
            if mod is not None:
                acc = [u % mod for u in acc]
    return acc


def _power_product(r, prods, inners, d_in, t, mod):
    if r in prods:
        return prods[r]
    j = max(i for i, k in enumerate(r) if k)
    smaller = list(r)
    smaller[j] -= 1
    smaller = tuple(smaller)
    base = _power_product(smaller, prods, inners, d_in, t, mod)
    prods[r] = _dense_mul(base, inners[j], d_in, t, mod)
    return prods[r]


def compose(outer: TruncatedSeries, inners) -> TruncatedSeries:
    """outer(inner_1, ..., inner_d), each inner integral with zero constant term."""
    inners = list(inners)
    if len(inners) != outer.d:
        raise ValueError(f"outer has {outer.d} variables, got {len(inners)} inner series")
    d_in = inners[0].d
    for s in inners:
        if s.d != d_in or s.cfg.p != outer.cfg.p:
            raise ValueError("inner series must share prime and variable count")
        if s.coeffs[0] != 0:
            raise InnerConstantTermNonzero("inner series must have zero constant term")
        if s.shift < 0:
            raise ValueError("inner series must be integral")
    deg = min([outer.deg] + [s.deg for s in inners])
    in_prec = None
    for s in inners:
        in_prec = _min_prec(in_prec, s.prec)
    cands = []
    if outer.prec is not None:
        cands.append(outer.prec)
    v_out = outer.valuation()
    if in_prec is not None and v_out != math.inf:
        cands.append(in_prec + int(v_out))
    if in_prec is not None and v_out == math.inf and outer.prec is None:
        return TruncatedSeries(outer.cfg, d_in, [], deg, None)
    prec = min(cands) if cands else None
    s = outer.shift
    if prec is not None and prec - s <= 0:
        raise PrecisionExhausted("composition leaves no precision")
    mod = None if prec is None else outer.p ** (prec - s)
    n = count(d_in, deg)
    inner_vecs = [list(x.coeffs[:n]) for x in inners]
    C = list(outer.coeffs[:count(outer.d, deg)])
    if mod is not None:
        inner_vecs = [[c % mod for c in v] for v in inner_vecs]
        C = [c % mod for c in C]
    out = compose_dense(C, outer.d, deg, inner_vecs, d_in, deg, mod)
    if outer.tail == "zero" and all(x.tail == "zero" for x in inners) and \
            outer.poly_degree() * max(x.poly_degree() for x in inners) <= deg:
        tail = "zero"
    elif outer.tail in ("zero", "integral") and outer.shift >= 0 and \
            all(x.tail in ("zero", "integral") for x in inners):
        tail = "integral"
    else:
        tail = "unknown"
    return TruncatedSeries(outer.cfg, d_in, out, deg, prec, s, tail)


def embed(s: TruncatedSeries, d: int, i: int) -> TruncatedSeries:
    """A one-variable series as a series in variable ``i`` of ``d`` variables."""
    if s.d != 1:
        raise ValueError("embed expects a one-variable series")
    idx = index_map(d, s.deg)
    c = [0] * count(d, s.deg)
    for k, x in enumerate(s.coeffs):
        if x:
            e = [0] * d
            e[i] = k
            c[idx[tuple(e)]] = x
    return TruncatedSeries(s.cfg, d, c, s.deg, s.prec, s.shift, s.tail)


def restrict(s: TruncatedSeries, i: int) -> TruncatedSeries:
    """h(0, ..., X, ..., 0) with X in slot i."""
    idx = index_map(s.d, s.deg)
    c = []
    for k in range(s.deg + 1):
        e = [0] * s.d
        e[i] = k
        c.append(s.coeffs[idx[tuple(e)]])
    return TruncatedSeries(s.cfg, 1, c, s.deg, s.prec, s.shift, s.tail)


def identity(cfg: PrimeConfig, deg: int | None = None) -> TruncatedSeries:
    return TruncatedSeries.variable(cfg, 1, 0, deg)


def iterate(h: TruncatedSeries, k: int) -> TruncatedSeries:
    """k-fold composition h o ... o h (k = 0 gives X).

    Exact input is first reduced to the target precision N, so repeated
    composition does not blow up integer sizes.
    """
    if h.d != 1:
        raise ValueError("iterate expects a one-variable series")
    if h.coeffs[0] != 0:
        raise InnerConstantTermNonzero("iterate needs h(0) = 0")
    out = identity(h.cfg, h.deg)
    if k == 0:
        return out
    base = h.reduce(h.cfg.N) if h.prec is None else h
    out = base
    for _ in range(k - 1):
        out = compose(base, [out])
    return out


# ----------------------------------------------------------------------------
# calculus and one-variable algorithms


def derivative(h: TruncatedSeries, i: int = 0) -> TruncatedSeries:
    """Formal partial derivative with respect to variable ``i`` (0-based)."""
    if not 0 <= i < h.d:
        raise IndexError(f"variable index {i} out of range for d={h.d}")
    deg = max(h.deg - 1, 0)
    idx = index_map(h.d, h.deg)
    c = [0] * count(h.d, deg)
    for e, x in zip(monomials(h.d, h.deg), h.coeffs):
        if x and e[i]:
            f = list(e)
            f[i] -= 1
            c[idx[tuple(f)]] = e[i] * x
    tail = {"zero": "zero", "integral": "integral", "log": "integral"}.get(h.tail, "unknown")
    return TruncatedSeries(h.cfg, h.d, c, deg, h.prec, h.shift, tail)


def linear_part(h: TruncatedSeries) -> list:
    out = []
    for i in range(h.d):
        e = [0] * h.d
        e[i] = 1
        out.append(h[tuple(e)])
    return out


def _work_prec(h: TruncatedSeries) -> int:
    return h.cfg.N if h.prec is None else h.prec


def reciprocal(h: TruncatedSeries) -> TruncatedSeries:
    """1/h for a one-variable integral series with unit constant term."""
    if h.d != 1:
        raise ValueError("reciprocal expects a one-variable series")
    c0 = h.constant_term()
    if not c0.is_unit():
        raise NonUnitDerivative(f"constant term {c0} is not a unit")
    prec = _work_prec(h)
    mod = h.p**prec
    a = [x % mod for x in h.coeffs]
    b = _reciprocal_dense(a, h.deg, mod)
    return TruncatedSeries(h.cfg, 1, b, h.deg, prec, 0, "integral")


def _reciprocal_dense(a, t, mod):
    b0 = pow(a[0], -1, mod)
    b = [b0] + [0] * t
    for k in range(1, t + 1):
        acc = 0
        for j in range(1, k + 1):
            if a[j]:
                acc += a[j] * b[k - j]
        b[k] = (-b0 * acc) % mod
    return b


def comp_inverse(h: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of h with h(0) = 0 and h'(0) a unit."""
    if h.d != 1:
        raise ValueError("comp_inverse expects a one-variable series")
    if h.coeffs[0] != 0:
        raise InnerConstantTermNonzero("comp_inverse needs h(0) = 0")
    lam = h[1]
    if not lam.is_unit():
        raise NonUnitDerivative(f"h'(0) = {lam} is not a unit")
    prec = _work_prec(h)
    mod = h.p**prec
    H = [x % mod for x in h.coeffs]
    t = h.deg
    lam_inv = pow(H[1], -1, mod)
    g = [0, lam_inv] + [0] * (t - 1)
    for m in range(2, t + 1):
        hg = compose_dense(H[:m + 1], 1, m, [g[:m + 1]], 1, m, mod)
        g[m] = (-lam_inv * hg[m]) % mod
    return TruncatedSeries(h.cfg, 1, g, t, prec, 0, "integral")


def weierstrass_prep(h: TruncatedSeries):
    """Factor h = unit * distinguished.

    Returns ``(unit, distinguished, wdeg)``: ``distinguished`` is a monic
    polynomial of degree ``wdeg`` whose lower coefficients are divisible by p,
    ``unit`` has unit constant term and is known through degree
    ``h.deg - wdeg``.
    """
    if h.d != 1:
        raise ValueError("weierstrass_prep expects a one-variable series")
    if h.shift < 0:
        raise ValueError("weierstrass_prep needs an integral series")
    p = h.p
    n = next((k for k, c in enumerate(h.coeffs) if c % p), None)
    if n is None:
        raise InfiniteHeightAtCap(f"series vanishes mod p through degree {h.deg}")
    prec = _work_prec(h)
    mod = p**prec
    H = [x % mod for x in h.coeffs]
    t = h.deg - n
    low = H[:n] + [0] * (h.deg + 1 - n)
    high_inv = _reciprocal_dense(H[n:], t, mod)
    V = list(high_inv)
    for _ in range(prec + 2):
        lv = _dense_mul(low, V + [0] * n, 1, h.deg, mod)
        rhs = [(-x) % mod for x in lv[n:]]
        rhs[0] = (rhs[0] + 1) % mod
        V_new = _dense_mul(high_inv, rhs, 1, t, mod)
        if V_new == V:
            break
        V = V_new
    else:
        raise PrecisionExhausted("Weierstrass iteration did not converge")
    lv = _dense_mul(low, V + [0] * n, 1, h.deg, mod)
    dist = lv[:n] + [1]
    unit = _reciprocal_dense(V, t, mod)
    unit_s = TruncatedSeries(h.cfg, 1, unit, t, prec, 0, "integral")
    dist_s = TruncatedSeries(h.cfg, 1, dist, h.deg, prec, 0, "zero")
    return unit_s, dist_s, n


def weierstrass_degree(h: TruncatedSeries) -> int | None:
    """Index of the first unit coefficient, or None when h = 0 mod p through deg."""
    if h.shift < 0:
        return None
    return next((k for k, c in enumerate(h.coeffs) if c % h.p), None)


# ----------------------------------------------------------------------------
# evaluation at points of extension rings


def _tail_val(tail: str, k: int, p: int):
    if tail == "zero":
        return math.inf
    if tail == "integral":
        return 0
    if tail == "log":
        return -vp_int(k, p)
    raise DivergentEvaluation("series tail has no valuation bound; cannot evaluate truncation")


def tail_bound(h: TruncatedSeries, vz: int, e: int) -> float:
    """Lower bound, in ring units, for the valuation of the omitted terms sum_{k>deg} c_k z^k."""
    if h.tail == "zero":
        return math.inf
    p = h.p
    best = math.inf
    k = h.deg + 1
    while True:
        b = k * vz + e * _tail_val(h.tail, k, p)
        best = min(best, b)
        if k * vz - e * log_floor(k, p) > best or h.tail == "integral":
            break
        k += 1
    return best


def eval_at(h: TruncatedSeries, z: ExtElem):
    """Evaluate a one-variable series at a point of an Eisenstein/cyclotomic ring.

    Returns ``(value, g)`` where value is h(z) modulo T^g; g accounts for the
    coefficient precision, the precision of z, and the omitted tail.
    """
    if h.d != 1:
        raise ValueError("eval_at expects a one-variable series")
    ring = z.ring
    vz = z.val()
    if h.tail != "zero" and vz <= 0:
        raise DivergentEvaluation(f"point of valuation {vz} is outside the open unit disc")
    acc = ring.zero()
    pw = ring.one()
    for k, c in enumerate(h.coeffs):
        if k:
            pw = pw * z
        if c:
            acc = acc + pw * ring.from_padic(PAdicNum(h.cfg, c, h.shift, h.prec))
    g = min(acc.prec, tail_bound(h, int(vz), ring.degree))
    g = int(g)
    return acc.reduce(g), g
