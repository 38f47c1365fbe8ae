"""Formal group laws, their endomorphisms, and the commuting-series solver.

Both Lubin–Tate construction and the rigidity solver reduce to one
degree-by-degree recursion.  Given one-variable series ``g`` (outer) and
``f`` (inner) with linear coefficients ``mu`` and ``lam``, and a linear form
``L`` in d variables, find phi with ``phi = L + O(deg 2)`` and

    g(phi(X)) = phi(f(X_1), ..., f(X_d)).

If phi is right through degree t-1, adding a degree-t correction r changes
the two sides by ``mu * r`` and ``lam**t * r`` respectively, so

    r = (phi o (f,...,f) - g o phi)_t / (mu - lam**t).

Each division is checked for exact divisibility and costs ``v_p(mu -
lam**t)`` digits of precision; these losses are recorded in a
:class:`PrecisionBudget`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    AxiomCheckFailed,
    InfiniteHeightAtCap,
    InnerConstantTermNonzero,
    IntegralityFailure,
    NonUnitDerivative,
    NotCommuting,
    NotStable,
    PrecisionExhausted,
    ReconstructionMismatch,
)
from .monomials import count, monomials
from .padic import PAdicNum, PrimeConfig, log_floor
from .series import (
    TruncatedSeries,
    comp_inverse,
    compose,
    compose_dense,
    derivative,
    embed,
    reciprocal,
    restrict,
    weierstrass_degree,
)


# ----------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class Verdict:
    """Outcome of an identity check; falsy when the identity fails."""

    ok: bool
    name: str
    exponent: tuple | None = None
    detail: str = ""
    prec: int | None = None

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "exponent": list(self.exponent) if self.exponent is not None else None,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class PrecisionBudget:
    """Precision accounting for one recursive solve.

    ``losses`` lists ``(degree, digits lost)`` as they happened; for the
    commutant solver ``declared_loss`` is computed beforehand from the
    linear coefficient alone, and the two must agree.
    """

    op: str
    start_prec: int
    losses: tuple
    declared_loss: int | None
    output_prec: int

    @property
    def tracked_loss(self) -> int:
        return sum(v for _, v in self.losses)

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "start_prec": self.start_prec,
            "declared_loss": self.declared_loss,
            "tracked_loss": self.tracked_loss,
            "output_prec": self.output_prec,
        }


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    ROOT_OF_UNITY_AT_PRECISION = "root_of_unity_at_precision"


# ----------------------------------------------------------------------------
# the recursion


def _as_padic(cfg: PrimeConfig, a, prec: int | None = None) -> PAdicNum:
    """Scalars: PAdicNum, int, or Fraction (p-adic units in the denominator are
    inverted modulo p^prec, default N; p-powers become a shift)."""
    if isinstance(a, PAdicNum):
        return a
    if isinstance(a, Fraction):
        p = cfg.p
        den = a.denominator
        k = 0
        while den % p == 0:
            den //= p
            k += 1
        if den == 1:
            return PAdicNum.exact(cfg, a)
        prec = prec or cfg.N
        return PAdicNum(cfg, a.numerator * pow(den, -1, p**prec), -k, prec)
    return PAdicNum.exact(cfg, a)


def _linear_form(cfg, L, prec: int | None = None) -> list:
    if isinstance(L, (int, Fraction, PAdicNum)):
        L = [L]
    out = [_as_padic(cfg, a, prec) for a in L]
    for a in out:
        if a.shift < 0:
            raise IntegralityFailure(f"linear coefficient {a} is not integral", degree=1)
    return out


def _divisor(mu: PAdicNum, lam: PAdicNum, t: int) -> PAdicNum:
    return mu - lam**t


def _recursion(outer: TruncatedSeries, inner: TruncatedSeries, L: list, deg: int,
               prec: int):
    """Run the recursion modulo p^prec. Returns (dense coeffs, final prec, losses)."""
    cfg = outer.cfg
    p = cfg.p
    d = len(L)
    for s in (outer, inner):
        if s.d != 1:
            raise ValueError("outer and inner series must have one variable")
        if s.shift < 0:
            raise IntegralityFailure("outer and inner series must be integral")
        if s.coeffs[0] % p ** max(prec, 1):
            raise InnerConstantTermNonzero("series must vanish at 0")
    mu, lam = outer[1], inner[1]
    P = prec
    for a in L:
        if a.prec is not None:
            P = min(P, a.prec)
    if P <= 0:
        raise PrecisionExhausted("no precision to start the recursion")
    n = count(d, deg)
    mons = monomials(d, deg)
    O = list(outer.coeffs[:deg + 1])
    emb = [list(embed(inner.truncate(deg), d, i).coeffs) for i in range(d)]
    phi = [0] * n
    for i, a in enumerate(L):
        phi[1 + i] = a.to_int()
    mod = p**P
    phi = [c % mod for c in phi]
    losses = []
    for t in range(2, deg + 1):
        den = _divisor(mu, lam, t)
        if den.is_zero():
            raise PrecisionExhausted(f"divisor mu - lam^{t} vanishes at the available precision")
        v = int(den.val())
        if v >= P:
            raise PrecisionExhausted(f"degree {t} step needs {v} digits, only {P} left")
        mod = p**P
        nt = count(d, t)
        phi_t = [c % mod for c in phi[:nt]]
        A = compose_dense([c % mod for c in O[:t + 1]], 1, t, [phi_t], d, t, mod)
        B = compose_dense(phi_t, d, t, [[c % mod for c in e[:nt]] for e in emb], d, t, mod)
        P_new = P - v
        mod_new = p**P_new
        pv = p**v
        winv = pow(den.mantissa, -1, mod_new)
        for k in range(count(d, t - 1), nt):
            x = (B[k] - A[k]) % mod
            if x % pv:
                raise IntegralityFailure(
                    f"degree {t} correction at exponent {mons[k]} is not divisible by {p}^{v}",
                    degree=t, exponent=mons[k])
            phi[k] = (x // pv) * winv % mod_new
        phi = [c % mod_new for c in phi]
        P = P_new
        losses.append((t, v))
    return phi, P, tuple(losses)


def lt_solve(f: TruncatedSeries, g: TruncatedSeries, L, guard: int = 2) -> TruncatedSeries:
    """Unique phi = L + O(deg 2) with g o phi = phi o (f, ..., f).

    f and g must share the linear coefficient pi with v_p(pi) >= 1 and have
    finite Weierstrass degree.  Exact inputs are processed at
    ``N + M * v_p(pi) + guard`` digits so the result is good to N digits.
    """
    cfg = f.cfg
    deg = min(f.deg, g.deg)
    pi = f[1]
    if not pi.equal_at(g[1]):
        raise ValueError("f and g must have the same linear coefficient")
    if pi.is_zero() or pi.shift < 1:
        raise ValueError(f"linear coefficient {pi} must have positive valuation")
    for s in (f, g):
        if weierstrass_degree(s) is None:
            raise InfiniteHeightAtCap("series is zero mod p through the degree cap")
    vpi = int(pi.val())
    if f.prec is None and g.prec is None:
        start = cfg.N + deg * vpi + guard
    else:
        start = min(x for x in (f.prec, g.prec) if x is not None)
    L = _linear_form(cfg, L, start)
    coeffs, P, losses = _recursion(g, f, L, deg, start)
    out_prec = min(cfg.N, P)
    budget = PrecisionBudget("lt_solve", start, losses, None, out_prec)
    return TruncatedSeries(cfg, len(L), coeffs, deg, out_prec, 0, "integral", budget)


def is_stable(u) -> Stability:
    """Is u'(0) neither 0 nor a root of unity (tested modulo p^N)?"""
    u = _series(u)
    lam = u[1]
    if lam.is_zero():
        return Stability.UNSTABLE
    if not lam.is_unit():
        return Stability.STABLE
    cfg = u.cfg
    test = lam**2 if cfg.p == 2 else lam ** (cfg.p - 1)
    prec = cfg.N if lam.prec is None else min(cfg.N, lam.prec)
    if (test - 1).reduce(prec).is_zero():
        return Stability.ROOT_OF_UNITY_AT_PRECISION
    return Stability.STABLE


def declared_commutant_loss(lam: PAdicNum, deg: int) -> int:
    """Sum over t = 2..deg of v_p(lam - lam^t)."""
    total = 0
    for t in range(2, deg + 1):
        den = _divisor(lam, lam, t)
        if den.is_zero():
            raise PrecisionExhausted(f"lam - lam^{t} vanishes at the available precision")
        total += int(den.val())
    return total


def solve_commutant(u, L, start_prec: int | None = None) -> TruncatedSeries:
    """Unique h = L + O(deg 2) with h o (u, ..., u) = u o h, for stable u.

    Works from N digits (or ``start_prec``) and returns the result at
    ``start - sum_t v_p(lam - lam^t)`` digits; the budget records both the
    declared and the tracked loss.
    """
    u = _series(u)
    verdict = is_stable(u)
    if verdict is not Stability.STABLE:
        raise NotStable(f"u'(0) = {u[1]} is {verdict.value}; the commutant is not unique")
    cfg = u.cfg
    deg = u.deg
    start = cfg.N if u.prec is None else min(cfg.N, u.prec)
    if start_prec is not None:
        start = start_prec
    L = _linear_form(cfg, L, start)
    declared = declared_commutant_loss(u[1], deg)
    if declared >= start:
        raise PrecisionExhausted(
            f"solver would lose {declared} digits from {start}; lower the degree cap or raise N")
    coeffs, P, losses = _recursion(u, u, L, deg, start)
    budget = PrecisionBudget("solve_commutant", start, losses, declared, P)
    return TruncatedSeries(cfg, len(L), coeffs, deg, P, 0, "integral", budget)


# ----------------------------------------------------------------------------
# groups and endomorphisms


def _series(x) -> TruncatedSeries:
    return x.series if isinstance(x, Endomorphism) else x


def _xy(cfg: PrimeConfig, deg: int):
    return (TruncatedSeries.variable(cfg, 2, 0, deg), TruncatedSeries.variable(cfg, 2, 1, deg))


@dataclass(eq=False)
class FormalGroup:
    """A one-dimensional commutative formal group law ``law(X, Y)``.

    ``provenance`` is one of ``"multiplicative"``, ``"additive"``,
    ``"lubin_tate"`` or ``"user_supplied"``.  Lubin–Tate groups keep their
    series ``f``; every group carries a stable endomorphism used to build
    ``[a]`` for non-integer a.
    """

    law: TruncatedSeries
    provenance: str
    f: TruncatedSeries | None = None
    stable_endo: TruncatedSeries | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def cfg(self) -> PrimeConfig:
        return self.law.cfg

    @property
    def deg(self) -> int:
        return self.law.deg

    @property
    def pi(self) -> PAdicNum | None:
        return self.f[1] if self.f is not None else None

    def __call__(self, a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
        """a (+) b for series in the same variables."""
        return compose(self.law, [a, b])

    def add_series(self, a, b):
        return self(a, b)

    def height(self):
        """log_p of the Weierstrass degree of [p], or ``"infinite-at-cap"``."""
        if "height" not in self._cache:
            ps = mul_by(self, self.cfg.p, check=False).series
            w = weierstrass_degree(ps)
            if w is None:
                h = "infinite-at-cap"
            else:
                h = log_floor(w, self.cfg.p)
                if self.cfg.p**h != w:
                    h = None
            self._cache["height"] = h
        return self._cache["height"]

    def mul_by(self, a, check: bool = True) -> "Endomorphism":
        return mul_by(self, a, check)

    def describe(self) -> dict:
        out = {"provenance": self.provenance, "name": self.name}
        if self.f is not None:
            out["pi"] = str(self.pi.to_fraction())
        return out

    @classmethod
    def from_law(cls, law: TruncatedSeries, validate: str = "full",
                 stable_endo: TruncatedSeries | None = None, name: str = "") -> "FormalGroup":
        """Wrap a user-supplied law; ``validate`` is "full", "basic" or "none"."""
        if law.d != 2:
            raise ValueError("a group law has two variables")
        G = cls(law, "user_supplied", name=name or "user")
        _validate(G, validate)
        if stable_endo is None:
            stable_endo = _mul_int(G, 1 + law.cfg.p)
        G.stable_endo = stable_endo
        return G


@dataclass(eq=False)
class Endomorphism:
    group: FormalGroup
    series: TruncatedSeries

    @property
    def a(self) -> PAdicNum:
        return self.series[1]

    @property
    def stability(self) -> Stability:
        return is_stable(self.series)

    @property
    def stable(self) -> bool:
        return self.stability is Stability.STABLE

    @classmethod
    def make(cls, group: FormalGroup, series: TruncatedSeries, check: bool = True):
        if check:
            v = check_endomorphism(group, series)
            if not v:
                raise AxiomCheckFailed(f"not an endomorphism: {v.detail}")
        return cls(group, series)


def check_axioms(F: FormalGroup | TruncatedSeries, deg: int | None = None,
                 associativity: bool = True) -> Verdict:
    """Group-law axioms at the law's precision (optionally truncated to ``deg``)."""
    law = F.law if isinstance(F, FormalGroup) else F
    if deg is not None:
        law = law.truncate(deg)
    cfg = law.cfg
    X, Y = _xy(cfg, law.deg)
    lin = law.truncate(1)
    e = lin.first_difference((X + Y).truncate(1))
    if e is not None:
        return Verdict(False, "axioms", e, "linear part is not X + Y", law.prec)
    X1 = TruncatedSeries.variable(cfg, 1, 0, law.deg)
    for i, side in enumerate(("law(X, 0) = X", "law(0, Y) = Y")):
        e = restrict(law, i).first_difference(X1)
        if e is not None:
            return Verdict(False, "axioms", e, f"identity fails: {side}", law.prec)
    e = compose(law, [Y, X]).first_difference(law)
    if e is not None:
        return Verdict(False, "axioms", e, "commutativity fails", law.prec)
    if associativity:
        V = [TruncatedSeries.variable(cfg, 3, i, law.deg) for i in range(3)]
        lhs = compose(law, [compose(law, [V[0], V[1]]), V[2]])
        rhs = compose(law, [V[0], compose(law, [V[1], V[2]])])
        e = lhs.first_difference(rhs)
        if e is not None:
            return Verdict(False, "axioms", e, "associativity fails", law.prec)
    return Verdict(True, "axioms", None, "identity, commutativity"
                   + (", associativity" if associativity else ""), law.prec)


def _validate(G: FormalGroup, mode: str):
    if mode == "none":
        return
    v = check_axioms(G, associativity=(mode == "full"))
    if not v:
        raise AxiomCheckFailed(f"{v.detail} at exponent {v.exponent}")


def multiplicative_group(cfg: PrimeConfig, deg: int | None = None) -> FormalGroup:
    """X + Y + XY, exact."""
    X, Y = _xy(cfg, deg if deg is not None else cfg.M)
    G = FormalGroup(X + Y + X * Y, "multiplicative", name="multiplicative")
    G.stable_endo = _binomial(cfg, 1 + cfg.p, G.deg)
    return G


def additive_group(cfg: PrimeConfig, deg: int | None = None) -> FormalGroup:
    X, Y = _xy(cfg, deg if deg is not None else cfg.M)
    G = FormalGroup(X + Y, "additive", name="additive")
    G.stable_endo = TruncatedSeries.from_terms(cfg, 1, {1: 1 + cfg.p}, G.deg)
    return G


def formal_group_from(f: TruncatedSeries, validate: str = "basic") -> FormalGroup:
    """The Lubin–Tate group admitting f as the endomorphism [f'(0)]."""
    law = lt_solve(f, f, [1, 1])
    G = FormalGroup(law, "lubin_tate", f=f, name="lubin_tate")
    _validate(G, validate)
    G.stable_endo = f
    return G


def _binomial(cfg: PrimeConfig, a: int, deg: int) -> TruncatedSeries:
    """(1 + X)^a - 1 for an integer a (negative allowed), exact."""
    c = [0] * (deg + 1)
    b = 1
    for k in range(1, deg + 1):
        b = b * (a - k + 1) // k
        c[k] = b
    return TruncatedSeries(cfg, 1, c, deg, None, 0, "zero" if 0 <= a <= deg else "integral")


def _mul_int(G: FormalGroup, a: int) -> TruncatedSeries:
    """[a] for a >= 0 by double-and-add with the law."""
    cfg = G.cfg
    out = TruncatedSeries(cfg, 1, [], G.deg, None)
    base = TruncatedSeries.variable(cfg, 1, 0, G.deg)
    while a:
        if a & 1:
            out = G(out, base)
        a >>= 1
        if a:
            base = G(base, base)
    return out


def mul_by(F: FormalGroup, a, check: bool = True) -> Endomorphism:
    """The endomorphism [a] with [a]'(0) = a."""
    cfg = F.cfg
    ap = _as_padic(cfg, a)
    exact_int = ap.prec is None and ap.shift >= 0
    key = ("mul_by", ap.mantissa, ap.shift, ap.prec)
    if key in F._cache:
        return F._cache[key]
    if F.provenance == "multiplicative" and exact_int:
        s = _binomial(cfg, ap.to_int(), F.deg)
    elif F.provenance == "additive":
        s = TruncatedSeries.from_terms(cfg, 1, {1: ap}, F.deg)
    elif F.provenance == "lubin_tate":
        s = lt_solve(F.f, F.f, [a])
    elif F.provenance == "multiplicative":
        q = _binomial(cfg, cfg.p, F.deg)
        s = lt_solve(q, q, [a])
    elif exact_int and ap.to_int() >= 0:
        s = _mul_int(F, ap.to_int())
    else:
        s = solve_commutant(F.stable_endo, [a])
    endo = Endomorphism.make(F, s, check)
    F._cache[key] = endo
    return endo


# ----------------------------------------------------------------------------
# checks


def check_homomorphism(F: FormalGroup, G: FormalGroup, h) -> Verdict:
    """Does h(F(X, Y)) = G(h(X), h(Y)) at the available precision?"""
    h = _series(h)
    lhs = compose(h, [F.law])
    hx, hy = embed(h, 2, 0), embed(h, 2, 1)
    rhs = compose(G.law, [hx, hy])
    e = lhs.first_difference(rhs)
    prec = _pmin(lhs.prec, rhs.prec)
    if e is None:
        return Verdict(True, "homomorphism", None, "h o F = G o (h, h)", prec)
    return Verdict(False, "homomorphism", e,
                   f"h o F and G o (h, h) differ at exponent {e}: {lhs[e]} vs {rhs[e]}", prec)


def check_endomorphism(F: FormalGroup, h) -> Verdict:
    v = check_homomorphism(F, F, h)
    return Verdict(v.ok, "endomorphism", v.exponent, v.detail, v.prec)


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def commutator_difference(h: TruncatedSeries, u) -> tuple | None:
    """First exponent where h o (u, ..., u) and u o h differ, or None."""
    u = _series(u)
    us = [embed(u, h.d, i) for i in range(h.d)]
    return compose(h, us).first_difference(compose(u, [h]))


def decompose_commuting(h: TruncatedSeries, u: Endomorphism) -> list:
    """Write h commuting with u as [a_1](X_1) (+) ... (+) [a_d](X_d)."""
    F = u.group
    e = commutator_difference(h, u)
    if e is not None:
        raise NotCommuting(f"h o u and u o h differ at exponent {e}", exponent=e)
    if h.coeffs[0] % h.p ** (h.prec or h.cfg.N):
        raise InnerConstantTermNonzero("h must vanish at 0")
    endos = []
    for i in range(h.d):
        a = restrict(h, i)[1]
        endos.append(mul_by(F, a, check=False))
    rebuilt = rebuild_sum(F, [x.series for x in endos], h.d)
    e = rebuilt.first_difference(h)
    if e is not None:
        raise ReconstructionMismatch(f"rebuilt sum differs from h at exponent {e}")
    return endos


def rebuild_sum(F: FormalGroup, parts: list, d: int) -> TruncatedSeries:
    """parts[0](X_1) (+) ... (+) parts[d-1](X_d)."""
    acc = embed(parts[0], d, 0)
    for i in range(1, d):
        acc = compose(F.law, [acc, embed(parts[i], d, i)])
    return acc


def conjugate_group(F: FormalGroup, h) -> TruncatedSeries:
    """K(X, Y) = h(F(h^{-1}(X), h^{-1}(Y)))."""
    h = _series(h)
    if not h[1].is_unit():
        raise NonUnitDerivative(f"h'(0) = {h[1]} is not a unit")
    g = comp_inverse(h)
    inner = compose(F.law, [embed(g, 2, 0), embed(g, 2, 1)])
    return compose(h, [inner])


def formal_log(F: FormalGroup) -> TruncatedSeries:
    """Log_F with Log_F' = 1 / (dF/dY)(X, 0), Log_F(0) = 0.

    The degree-k coefficient may carry p^{v_p(k)} in its denominator; the
    result's precision is the input's minus the largest such exponent.
    """
    cfg = F.cfg
    p = cfg.p
    w = restrict(derivative(F.law, 1), 0)
    inv = reciprocal(w)
    P = inv.prec
    deg = F.deg
    dmax = max((_vp(k, p) for k in range(1, deg + 1) if inv.coeffs[k - 1]), default=0)
    prec = P - dmax
    if prec <= 0:
        raise PrecisionExhausted("logarithm denominators exhaust the precision")
    mod = p**P
    c = [0] * (deg + 1)
    for k in range(1, deg + 1):
        x = inv.coeffs[k - 1]
        if x:
            v = _vp(k, p)
            unit = k // p**v
            c[k] = x * pow(unit, -1, mod) * p ** (dmax - v)
    return TruncatedSeries(cfg, 1, c, deg, prec, -dmax, "log")


def _vp(k: int, p: int) -> int:
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v
