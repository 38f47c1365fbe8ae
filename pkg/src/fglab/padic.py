"""Fixed-precision p-adic scalars.

Precision is *absolute*: a :class:`PAdicNum` with ``prec = n`` is known modulo
``p**n``.  ``prec=None`` marks an exact value (an integer or a rational with a
p-power denominator coming from exact input data).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ConfigError,
    DenominatorCapExceeded,
    NonUnit,
    PrecisionExhausted,
)

DEFAULT_MAX_DEGREE = 64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, math.isqrt(n) + 1):
        if n % q == 0:
            return False
    return True


def vp_int(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def max_degree_cap() -> int:
    raw = os.environ.get("FGLAB_MAX_DEGREE")
    if raw is None:
        return DEFAULT_MAX_DEGREE
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"FGLAB_MAX_DEGREE must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class PrimeConfig:
    """The finite model: prime ``p``, target precision ``N`` (p-digits),
    denominator cap ``D`` (largest p-power allowed in a denominator) and total
    degree cap ``M`` for truncated series.

    ``D=None`` picks the smallest cap that lets a formal logarithm be
    truncated at degree ``M``, i.e. ``floor(log_p M)``.
    """

    p: int
    N: int
    M: int = 16
    D: int | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ConfigError(f"p={self.p} is not prime")
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if self.M < 1:
            raise ConfigError("M must be >= 1")
        cap = max_degree_cap()
        if self.M > cap:
            raise ConfigError(f"degree cap M={self.M} exceeds safety cap {cap} (FGLAB_MAX_DEGREE)")
        if self.D is None:
            object.__setattr__(self, "D", log_floor(self.M, self.p))
        elif self.D < 0:
            raise ConfigError("D must be >= 0")

    def with_(self, **kw) -> "PrimeConfig":
        fields = {"p": self.p, "N": self.N, "M": self.M, "D": self.D}
        fields.update(kw)
        return PrimeConfig(**fields)

    def as_dict(self) -> dict:
        return {"p": self.p, "N": self.N, "D": self.D, "M": self.M}


def log_floor(m: int, p: int) -> int:
    """floor(log_p m) for m >= 1, computed exactly."""
    k, q = 0, p
    while q <= m:
        k += 1
        q *= p
    return k


class AtLeast(int):
    """A valuation known only as a lower bound (the value vanished at precision)."""

    def __repr__(self):
        return f"AtLeast({int(self)})"

    def __str__(self):
        return f">={int(self)}"


_DEFAULT = object()


class PAdicNum:
    """``p**shift * mantissa`` known modulo ``p**prec``.

    Canonical form: a nonzero value has ``shift`` equal to its valuation and a
    unit mantissa reduced into ``[0, p**(prec - shift))``; zero is stored as
    mantissa 0, shift 0.
    """

    __slots__ = ("cfg", "mantissa", "shift", "prec")

    def __init__(self, cfg: PrimeConfig, mantissa: int, shift: int = 0, prec=_DEFAULT):
        if prec is _DEFAULT:
            prec = cfg.N
        p = cfg.p
        if prec is not None and prec <= 0:
            raise PrecisionExhausted(f"precision {prec} leaves no p-adic digits")
        m, s = int(mantissa), int(shift)
        if m != 0:
            v = vp_int(m, p)
            m //= p**v
            s += v
            if prec is not None:
                if s >= prec:
                    m, s = 0, 0
                else:
                    m %= p ** (prec - s)
        if m == 0:
            s = 0
        elif s < -cfg.D:
            raise DenominatorCapExceeded(f"denominator p^{-s} exceeds cap p^{cfg.D}")
        self.cfg = cfg
        self.mantissa = m
        self.shift = s
        self.prec = prec

    @classmethod
    def exact(cls, cfg: PrimeConfig, value) -> "PAdicNum":
        """Exact integer, or Fraction whose denominator is a power of p."""
        if isinstance(value, Fraction):
            den = value.denominator
            k = vp_int(den, cfg.p) if den != 1 else 0
            if den != cfg.p**k:
                raise ValueError(f"denominator {den} is not a power of {cfg.p}")
            return cls(cfg, value.numerator, -k, None)
        return cls(cfg, int(value), 0, None)

    # -- basic queries --------------------------------------------------------
    @property
    def p(self) -> int:
        return self.cfg.p

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def val(self):
        if self.mantissa != 0:
            return self.shift
        if self.prec is None:
            return math.inf
        return AtLeast(self.prec)

    def is_unit(self) -> bool:
        return self.mantissa != 0 and self.shift == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa) * Fraction(self.p) ** self.shift

    def to_int(self) -> int:
        """Integer representative; canonical residue in [0, p^prec) for finite values."""
        if self.shift < 0:
            raise ValueError(f"{self!r} is not integral")
        return self.mantissa * self.p**self.shift

    def reduce(self, n: int) -> "PAdicNum":
        prec = n if self.prec is None else min(n, self.prec)
        return PAdicNum(self.cfg, self.mantissa, self.shift, prec)

    # -- arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "PAdicNum":
        if isinstance(other, PAdicNum):
            if other.cfg.p != self.cfg.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PAdicNum.exact(self.cfg, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        s = min(self.shift, other.shift)
        p = self.p
        m = self.mantissa * p ** (self.shift - s) + other.mantissa * p ** (other.shift - s)
        return PAdicNum(self.cfg, m, s, _min_prec(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return PAdicNum(self.cfg, -self.mantissa, self.shift, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = _min_prec(_add_prec(self.prec, other.val()), _add_prec(other.prec, self.val()))
        return PAdicNum(self.cfg, self.mantissa * other.mantissa, self.shift + other.shift, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = PAdicNum(self.cfg, 1, 0, None)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "PAdicNum":
        if not self.is_unit():
            raise NonUnit(f"{self} is not a unit (valuation {self.val()})")
        prec = self.cfg.N if self.prec is None else self.prec
        if self.prec is None and self.mantissa in (1, -1):
            return self
        return PAdicNum(self.cfg, pow(self.mantissa, -1, self.p**prec), 0, prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return divide_exact(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return divide_exact(other, self)

    # -- comparison -----------------------------------------------------------
    def equal_at(self, other, n: int | None = None) -> bool:
        """Values agree modulo p^n (default: the smaller stated precision)."""
        other = self._coerce(other)
        diff = self - other
        if n is None:
            return diff.is_zero()
        if diff.is_zero():
            return diff.prec is None or diff.prec >= n
        return diff.shift >= n

    def __eq__(self, other):
        if not isinstance(other, (PAdicNum, int, Fraction)):
            return NotImplemented
        return self.equal_at(other)

    __hash__ = None

    def __repr__(self):
        prec = "exact" if self.prec is None else self.prec
        return f"PAdicNum(p={self.p}, mantissa={self.mantissa}, shift={self.shift}, prec={prec})"

    def __str__(self):
        if self.mantissa == 0:
            return "0" if self.prec is None else f"O({self.p}^{self.prec})"
        head = str(self.mantissa) if self.shift == 0 else f"{self.mantissa}*{self.p}^{self.shift}"
        return head if self.prec is None else f"{head} + O({self.p}^{self.prec})"


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_prec(prec, v):
    """prec + v where prec=None means infinite; v may be math.inf."""
    if prec is None or v == math.inf:
        return None
    return prec + int(v)


# Functional spellings of the module's operations.

def add(a: PAdicNum, b: PAdicNum) -> PAdicNum:
    return a + b


def neg(a: PAdicNum) -> PAdicNum:
    return -a


def mul(a: PAdicNum, b: PAdicNum) -> PAdicNum:
    return a * b


def inv(a: PAdicNum) -> PAdicNum:
    return a.inverse()


def val_p(a: PAdicNum):
    return a.val()


def divide_exact(a: PAdicNum, b: PAdicNum) -> PAdicNum:
    """a / b. The result may carry a denominator down to ``p**-D``.

    Precision: ``min(prec(a) - v(b), prec(b) + v(a) - 2 v(b))``.
    """
    vb = b.val()
    if b.mantissa == 0:
        raise PrecisionExhausted("divisor vanishes at the available precision")
    va = a.val()
    p = a.p
    if a.prec is None and b.prec is None:
        if b.mantissa in (1, -1):
            return PAdicNum(a.cfg, a.mantissa * b.mantissa, a.shift - b.shift, None)
        prec = a.cfg.N
    else:
        cands = []
        if a.prec is not None:
            cands.append(a.prec - vb)
        if b.prec is not None and va != math.inf:
            cands.append(b.prec + int(va) - 2 * vb)
        elif b.prec is not None:
            # a is an exact zero
            return PAdicNum(a.cfg, 0, 0, None)
        prec = min(cands)
    if prec <= 0:
        raise PrecisionExhausted(f"division by p^{vb} leaves precision {prec}")
    if a.mantissa == 0:
        return PAdicNum(a.cfg, 0, 0, prec)
    s = a.shift - b.shift
    k = max(prec - s, 1)
    m = a.mantissa * pow(b.mantissa, -1, p**k)
    return PAdicNum(a.cfg, m, s, prec)
