"""Torsion points, orbits, and the shared-torsion and rigidity witnesses.

A point is declared torsion when some iterate of [p] vanishes *at the
guaranteed evaluation precision*; certificates carry that precision so a
caller can insist on a margin.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    ConfigError,
    IdentityCheckFailed,
    NotCommuting,
    NotStable,
    PrecisionExhausted,
)
from .extring import ExtElem, cyclotomic_ring
from .formal_groups import (
    Endomorphism,
    FormalGroup,
    Stability,
    Verdict,
    check_endomorphism,
    commutator_difference,
    decompose_commuting,
    formal_group_from,
    is_stable,
    mul_by,
    multiplicative_group,
)
from .padic import PAdicNum, PrimeConfig
from .serialize import doc_to_series, series_to_doc
from .series import TruncatedSeries, eval_at, identity, iterate  # noqa: F401  (re-exported)


# ----------------------------------------------------------------------------
# reports


def padic_dict(x: PAdicNum) -> dict:
    return {"mantissa": str(x.mantissa), "shift": x.shift, "prec": x.prec}


def ext_dict(z: ExtElem) -> dict:
    return {"coeffs": [str(c) for c in z.coeffs], "shift": z.shift, "prec": z.prec}


@dataclass
class Report:
    """Machine-readable outcome shared by the library witnesses and the CLI."""

    command: str
    cfg: dict
    verdicts: list = field(default_factory=list)
    precisions: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v["ok"] for v in self.verdicts)

    def verdict(self, name: str, ok: bool, detail: str = "", exponent=None):
        self.verdicts.append({"name": name, "ok": bool(ok), "detail": detail,
                              "exponent": list(exponent) if exponent is not None else None})

    def add_verdict(self, v: Verdict):
        self.verdicts.append(v.to_dict())

    def precision(self, name: str, value):
        self.precisions.append({"name": name, "value": value})

    def to_dict(self) -> dict:
        return {"command": self.command, "cfg": self.cfg, "verdicts": self.verdicts,
                "precisions": self.precisions, "data": self.data}


# ----------------------------------------------------------------------------
# orbits


def iterate_at(h: TruncatedSeries, z: ExtElem, k: int) -> ExtElem:
    """h applied k times to z; the returned element's ``prec`` is the guarantee."""
    for _ in range(k):
        z, g = eval_at(h, z)
        if g <= 0:
            raise PrecisionExhausted("orbit lost all precision")
    return z


@dataclass(frozen=True)
class TorsionCertificate:
    point: ExtElem
    group: FormalGroup
    level: int
    guaranteed_val_prec: int
    orbit_vals: tuple = ()

    def __bool__(self):
        return True

    def to_dict(self) -> dict:
        return {"point": ext_dict(self.point), "level": self.level,
                "guaranteed_val_prec": self.guaranteed_val_prec,
                "orbit_vals": [int(v) for v in self.orbit_vals]}


@dataclass(frozen=True)
class NotTorsionAtCap:
    """No iterate up to ``max_level`` vanished at the available precision.

    This is not a proof that the point has infinite order.
    """

    point: ExtElem
    max_level: int
    last_val: int
    last_prec: int

    def __bool__(self):
        return False

    def to_dict(self) -> dict:
        return {"point": ext_dict(self.point), "max_level": self.max_level,
                "last_val": int(self.last_val), "last_prec": self.last_prec}


def is_torsion(F: FormalGroup, z: ExtElem, max_level: int = 4):
    """Smallest k <= max_level with [p]^k(z) = 0 at the guaranteed precision."""
    if z.is_zero():
        return TorsionCertificate(z, F, 0, z.prec, ())
    ps = mul_by(F, F.cfg.p, check=False).series
    w = z
    vals = [w.val()]
    for k in range(1, max_level + 1):
        w, g = eval_at(ps, w)
        if g <= 0:
            break
        if w.is_zero():
            return TorsionCertificate(z, F, k, g, tuple(vals))
        vals.append(w.val())
    return NotTorsionAtCap(z, max_level, vals[-1], w.prec)


# ----------------------------------------------------------------------------
# the shared-torsion construction


def shared_torsion_series(cfg: PrimeConfig, n: int, variant: str = "integral"):
    """(f, q) for the shared-torsion construction.

    ``q = (1+X)^p - 1``.  The ``"literal"`` variant is
    ``f = u*q`` with ``u = 1 + ((1+X)^{p^n} - 1)/X``; it is congruent to
    ``X^p + X^{p^n+p-1}`` mod p, so it is not an endomorphism of any formal
    group and the Lubin–Tate solve fails at degree ``p^n + p - 1``.  The
    ``"integral"`` variant is ``f = q + p((1+X)^{p^n} - 1)``: same linear
    coefficient ``p(1+p^n)``, congruent to ``X^p`` mod p, and it still sends
    ``zeta_{p^k} - 1`` to ``zeta_{p^{k-1}} - 1`` for ``k <= n``.
    """
    p = cfg.p
    X = identity(cfg)
    q = (1 + X) ** p - 1
    big = (1 + X) ** (p**n) - 1
    if variant == "literal":
        u_coeffs = [big.coeffs[k + 1] for k in range(cfg.M)]
        u_coeffs[0] += 1
        u = TruncatedSeries(cfg, 1, u_coeffs, cfg.M)
        f = u * q
    elif variant == "integral":
        f = q + p * big
    else:
        raise ConfigError(f"unknown variant {variant!r}")
    return f, q


def shared_torsion_demo(cfg: PrimeConfig, n: int, variant: str = "integral") -> Report:
    """Build f, check its linear coefficient, construct F_f, and certify that
    ``zeta_{p^k} - 1`` (k = 1..n) are torsion for both F_f and the
    multiplicative group while the two laws differ."""
    p = cfg.p
    if n < 1:
        raise ConfigError("n must be >= 1")
    need = p**n + (p - 1 if variant == "literal" else 0)
    if cfg.M < need:
        raise ConfigError(f"degree cap M={cfg.M} is below deg f = {need}")
    rep = Report("shared-torsion", cfg.as_dict())
    f, q = shared_torsion_series(cfg, n, variant)
    rep.data["n"] = n
    rep.data["variant"] = variant
    rep.data["f"] = [str(c) for c in f.coeffs[:f.poly_degree() + 1]]
    pi = p * (1 + p**n)
    ok = f[1].equal_at(pi)
    rep.verdict("f'(0) = p(1+p^n)", ok, f"f'(0) = {f[1]}, expected {pi}")
    if not ok:
        raise IdentityCheckFailed(f"f'(0) = {f[1]} != {pi}", "f'(0) = p(1+p^n)")
    rings = []
    for k in range(1, n + 1):
        R = cyclotomic_ring(cfg, k)
        T = R.gen
        target = (1 + T) ** p - 1
        fT, gf = eval_at(f, T)
        qT, gq = eval_at(q, T)
        name = f"f(zeta_{p}^{k} - 1) = zeta_{p}^{k - 1} - 1"
        ok = gf >= R.cap and gq >= R.cap and fT.equal_at(target) and qT.equal_at(target)
        rep.verdict(name, ok, f"exact at full precision in the level-{k} cyclotomic ring")
        rep.precision(f"chain_prec_k{k}", min(gf, gq))
        if not ok:
            raise IdentityCheckFailed(f"chain identity fails at level {k}", name)
        rings.append(R)
    F = formal_group_from(f)
    G = multiplicative_group(cfg)
    rep.precision("law_prec", F.law.prec)
    points = [{"k": 0, "point": "0", "level_F": 0, "level_G": 0}]
    for k, R in enumerate(rings, 1):
        T = R.gen
        cF = is_torsion(F, T, k + 1)
        cG = is_torsion(G, T, k + 1)
        okF = bool(cF) and cF.level == k
        okG = bool(cG) and cG.level == k
        rep.verdict(f"zeta_{p}^{k} - 1 torsion for F_f", okF,
                    f"level {getattr(cF, 'level', None)}")
        rep.verdict(f"zeta_{p}^{k} - 1 torsion for G_m", okG,
                    f"level {getattr(cG, 'level', None)}")
        if not (okF and okG):
            raise IdentityCheckFailed(f"torsion certificate fails at level {k}",
                                      f"zeta_{p}^{k} - 1 in Tors")
        rep.precision(f"torsion_prec_F_k{k}", cF.guaranteed_val_prec)
        rep.precision(f"torsion_prec_G_k{k}", cG.guaranteed_val_prec)
        points.append({"k": k, "point": f"zeta_{p}^{k} - 1", "ring": R.describe(),
                       "level_F": cF.level, "level_G": cG.level})
    e = F.law.first_difference(G.law)
    rep.verdict("F_f differs from the multiplicative law", e is not None,
                f"first difference at exponent {e}", e)
    if e is None:
        raise IdentityCheckFailed("laws agree at precision", "F_f != G_m")
    rep.data["law_difference"] = {"exponent": list(e), "F": padic_dict(F.law[e]),
                                  "G": padic_dict(G.law[e])}
    rep.data["points"] = points
    rep.data["nonzero_shared"] = n
    rep.data["height_F"] = F.height()
    return rep


# ----------------------------------------------------------------------------
# rigidity witnesses


def rigidity_witness(F: FormalGroup, u: Endomorphism, h: TruncatedSeries, sample,
                     max_level: int = 4) -> Report:
    """u o h = h o u, hence h = [a] is an endomorphism; h maps the sample into Tors(F)."""
    rep = Report("rigidity", F.cfg.as_dict())
    if is_stable(u) is not Stability.STABLE:
        raise NotStable("u must be stable")
    e = commutator_difference(h, u)
    if e is not None:
        raise NotCommuting(f"u o h and h o u differ at exponent {e}", exponent=e)
    rep.verdict("u o h = h o u", True)
    endo = decompose_commuting(h, u)[0]
    rep.data["a"] = padic_dict(endo.a)
    v = check_endomorphism(F, h)
    rep.add_verdict(v)
    pts = []
    for z in sample:
        if isinstance(z, TorsionCertificate):
            z = z.point
        cz = is_torsion(F, z, max_level)
        hz, g = eval_at(h, z)
        chz = is_torsion(F, hz, max_level)
        rep.verdict("h(z) torsion", bool(cz) and bool(chz))
        pts.append({"z": cz.to_dict(), "h(z)": chz.to_dict(), "eval_prec": g})
    rep.data["sample"] = pts
    return rep


def theorem_A_witness(F: FormalGroup, G: FormalGroup, u: Endomorphism) -> Report:
    """If a stable endomorphism u of F is also one of G, then F = G at precision."""
    rep = Report("theorem-a", F.cfg.as_dict())
    if is_stable(u) is not Stability.STABLE:
        raise NotStable("u must be stable")
    vF = check_endomorphism(F, u.series)
    if not vF:
        rep.verdict("u endomorphism of F", False, vF.detail, vF.exponent)
        return rep
    vG = check_endomorphism(G, u.series)
    rep.verdict("u endomorphism of G", vG.ok, vG.detail, vG.exponent)
    e = F.law.first_difference(G.law)
    if vG.ok:
        rep.verdict("F = G at precision", e is None,
                    "equal at precision" if e is None else f"differ at exponent {e}", e)
    else:
        rep.data["obstruction"] = {"exponent": list(vG.exponent) if vG.exponent else None}
        rep.data["laws_equal"] = e is None
        if e is not None:
            rep.data["law_difference"] = {"exponent": list(e), "F": padic_dict(F.law[e]),
                                          "G": padic_dict(G.law[e])}
    rep.precision("F_prec", F.law.prec)
    rep.precision("G_prec", G.law.prec)
    return rep


def reduce_report(report: dict, N: int) -> dict:
    """Normalize a report for comparison across precisions: drop precision
    fields and reduce every p-adic value modulo p^N."""
    p = report["cfg"]["p"]

    def walk(x):
        if isinstance(x, dict):
            if "schema_version" in x and "terms" in x:
                s = doc_to_series(x)
                if s.prec is None or s.prec > N:
                    s = s.reduce(N)
                doc = series_to_doc(s)
                doc.pop("prec_floor")
                doc["cfg"] = {k: v for k, v in doc["cfg"].items() if k != "N"}
                return doc
            if set(x) == {"mantissa", "shift", "prec"}:
                m, s = int(x["mantissa"]), x["shift"]
                v = PAdicNum(PrimeConfig(p, N, 1, max(-s, 0)), m, s, N)
                return {"mantissa": str(v.mantissa), "shift": v.shift}
            return {k: walk(v) for k, v in x.items()
                    if k not in ("prec", "precisions", "guaranteed_val_prec", "eval_prec",
                                 "last_prec")}
        if isinstance(x, list):
            return [walk(v) for v in x]
        return x

    out = walk(report)
    out["cfg"] = {k: v for k, v in report["cfg"].items() if k != "N"}
    return out

