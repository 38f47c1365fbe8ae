"""``fglab`` command line.

Every subcommand prints one report ``{command, cfg, verdicts, precisions,
data}`` and exits 0 when all verdicts hold, 1 when a verdict is false and 2
on errors (bad usage, schema problems, failed constructions).

Series arguments (``--f``, ``--h``, ``--u`` ...) accept a comma-separated
coefficient list, low degree first (``0,6,3`` is 6X + 3X^2), or ``@path`` to
a series document.  When an option is omitted the series of the same name
is taken from the ``--seed-file`` bundle, a JSON object mapping names
(``f``, ``g``, ``h``, ``u``, ``F``, ``G``) to series documents.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .dynamics import (
    Report,
    is_torsion,
    padic_dict,
    rigidity_witness,
    shared_torsion_demo,
    shared_torsion_series,
    theorem_A_witness,
)
from .errors import FglabError, NotCommuting, ReconstructionMismatch, SchemaError
from .extring import cyclotomic_ring
from .formal_groups import (
    Endomorphism,
    FormalGroup,
    additive_group,
    check_axioms,
    check_endomorphism,
    check_homomorphism,
    decompose_commuting,
    formal_group_from,
    formal_log,
    mul_by,
    multiplicative_group,
    rebuild_sum,
    solve_commutant,
)
from .padic import PrimeConfig
from .serialize import doc_to_series, parse_series, series_to_doc
from .series import TruncatedSeries, compose, embed, weierstrass_prep

GROUPS = ("mult", "add", "lt", "shared", "law")


# ----------------------------------------------------------------------------
# argument helpers


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    c.add_argument("--p", type=int, help="prime (default 2)")
    c.add_argument("--prec", type=int, help="target precision N in p-digits (default 24)")
    c.add_argument("--dencap", type=int, help="denominator cap D (default floor(log_p M))")
    c.add_argument("--degcap", type=int, help="total degree cap M (default 16)")
    c.add_argument("--format", choices=("json", "text"), help="output format (default json)")
    c.add_argument("--seed-file", help="JSON bundle of named series documents")
    return c


_DEFAULTS = {"p": 2, "prec": 24, "dencap": None, "degcap": 16, "format": "json",
             "seed_file": None}


def _add_group(sp, flag="--group", default="mult"):
    sp.add_argument(flag, choices=GROUPS, default=default,
                    help="mult, add, lt (from f), shared (integral shared-torsion f) or law")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="fglab", parents=[common],
                                 description="Formal groups over Z_p at fixed precision.")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    sp = cmd("lt-group", "build the Lubin-Tate group of f")
    sp.add_argument("--f")
    sp.add_argument("--n", type=int, default=1, help="level for --group shared")
    sp.add_argument("--from", dest="source", choices=("lt", "shared"), default="lt")
    sp.add_argument("--assoc-deg", type=int, default=None,
                    help="check associativity through this degree")

    sp = cmd("mul-by", "the endomorphism [a]")
    _add_group(sp)
    sp.add_argument("--a", required=True, help="integer or fraction with p-power denominator")
    _group_inputs(sp)

    sp = cmd("solve-commutant", "unique series with given linear part commuting with u")
    sp.add_argument("--u")
    sp.add_argument("--L", default="1", help="comma-separated linear coefficients")

    sp = cmd("check-endo", "is h an endomorphism of the group?")
    _add_group(sp)
    sp.add_argument("--h")
    _group_inputs(sp)

    sp = cmd("check-hom", "is h a homomorphism from the first group to the second?")
    _add_group(sp)
    _add_group(sp, "--group2")
    sp.add_argument("--h")
    _group_inputs(sp)
    sp.add_argument("--f2")
    sp.add_argument("--n2", type=int, default=1)

    sp = cmd("decompose", "write h commuting with u as a sum of [a_i](X_i)")
    _add_group(sp)
    sp.add_argument("--h")
    sp.add_argument("--from-scalars", help="build h from [a_1](X_1) + ... instead")
    sp.add_argument("--u-scalar", default=None, help="u = [a] (default 1 + p)")
    _group_inputs(sp)

    sp = cmd("log", "formal logarithm")
    _add_group(sp)
    _group_inputs(sp)

    sp = cmd("shared-torsion", "shared torsion of a Lubin-Tate group and G_m")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--variant", choices=("integral", "literal"), default="integral")

    sp = cmd("is-torsion", "certify a torsion point")
    _add_group(sp)
    sp.add_argument("--level", type=int, default=1, help="cyclotomic ring level k")
    sp.add_argument("--point", default=None,
                    help="coefficients in T (default: T = zeta_{p^k} - 1)")
    sp.add_argument("--max-level", type=int, default=4)
    _group_inputs(sp)

    sp = cmd("theorem-a", "a shared stable endomorphism forces equal laws")
    _add_group(sp)
    _add_group(sp, "--group2")
    sp.add_argument("--u", default=None, help="u series (default [u-scalar] of the first group)")
    sp.add_argument("--u-scalar", default=None)
    _group_inputs(sp)
    sp.add_argument("--f2")
    sp.add_argument("--n2", type=int, default=1)

    sp = cmd("rigidity", "h commuting with a stable u is an endomorphism")
    _add_group(sp)
    sp.add_argument("--h")
    sp.add_argument("--u-scalar", default=None)
    sp.add_argument("--sample-levels", type=int, default=1,
                    help="sample zeta_{p^k} - 1 for k = 1..K")
    _group_inputs(sp)

    sp = cmd("prep", "Weierstrass preparation of h")
    sp.add_argument("--h")
    return ap


def _group_inputs(sp):
    sp.add_argument("--f", help="Lubin-Tate series for --group lt")
    sp.add_argument("--n", type=int, default=1, help="level for --group shared")


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.cfg = PrimeConfig(args.p, args.prec, args.degcap, args.dencap)
        self.bundle = {}
        if args.seed_file:
            try:
                with open(args.seed_file) as fh:
                    self.bundle = json.load(fh)
            except OSError as exc:
                raise SchemaError(f"cannot read seed file: {exc}") from None
            except json.JSONDecodeError as exc:
                raise SchemaError(f"seed file line {exc.lineno}: {exc.msg}") from None
            if not isinstance(self.bundle, dict):
                raise SchemaError("seed file must be a JSON object of named documents")

    def series(self, key: str, value=None, required: bool = True):
        if value is None:
            value = getattr(self.args, key, None)
        if value is None:
            if key in self.bundle:
                return doc_to_series(self.bundle[key], self.cfg)
            if required:
                raise SchemaError(f"series '{key}' not given (use --{key} or the seed file)")
            return None
        if value.startswith("@"):
            try:
                with open(value[1:]) as fh:
                    return parse_series(fh.read(), self.cfg)
            except OSError as exc:
                raise SchemaError(f"cannot read {value[1:]}: {exc}") from None
        try:
            coeffs = [int(x) for x in value.split(",") if x.strip()]
        except ValueError:
            raise SchemaError(f"--{key}: expected comma-separated integers, got {value!r}") \
                from None
        return TruncatedSeries.from_poly(self.cfg, coeffs)

    def group(self, which: str, f_key="f", n=1, law_key="F") -> FormalGroup:
        cfg = self.cfg
        if which == "mult":
            return multiplicative_group(cfg)
        if which == "add":
            return additive_group(cfg)
        if which == "lt":
            return formal_group_from(self.series(f_key))
        if which == "shared":
            return formal_group_from(shared_torsion_series(cfg, n)[0])
        return FormalGroup.from_law(self.series(law_key))


def _scalar(text):
    try:
        v = Fraction(text)
    except ValueError:
        raise SchemaError(f"not a number: {text!r}") from None
    return v.numerator if v.denominator == 1 else v


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise SchemaError(f"expected comma-separated integers, got {text!r}") from None


# ----------------------------------------------------------------------------
# subcommands


def _lt_group(ctx, rep):
    a = ctx.args
    if a.source == "shared":
        f = shared_torsion_series(ctx.cfg, a.n)[0]
    else:
        f = ctx.series("f")
    F = formal_group_from(f)
    rep.data["f"] = series_to_doc(f)
    rep.data["law"] = series_to_doc(F.law)
    rep.data["height"] = F.height()
    rep.precision("law_prec", F.law.prec)
    rep.add_verdict(check_axioms(F, associativity=False))
    if a.assoc_deg is not None:
        rep.add_verdict(check_axioms(F, deg=a.assoc_deg))


def _mul_by(ctx, rep):
    F = ctx.group(ctx.args.group, n=ctx.args.n)
    e = mul_by(F, _scalar(ctx.args.a), check=False)
    rep.data["series"] = series_to_doc(e.series)
    rep.precision("series_prec", e.series.prec)
    rep.add_verdict(check_endomorphism(F, e.series))


def _solve_commutant(ctx, rep):
    u = ctx.series("u")
    L = _ints(ctx.args.L)
    h = solve_commutant(u, L)
    rep.data["series"] = series_to_doc(h)
    rep.data["budget"] = h.budget.to_dict()
    rep.precision("output_prec", h.prec)
    rep.precision("declared_loss", h.budget.declared_loss)
    rep.precision("tracked_loss", h.budget.tracked_loss)
    rep.verdict("declared loss matches tracked loss",
                h.budget.declared_loss == h.budget.tracked_loss)


def _check_endo(ctx, rep):
    F = ctx.group(ctx.args.group, n=ctx.args.n)
    rep.add_verdict(check_endomorphism(F, ctx.series("h")))


def _check_hom(ctx, rep):
    a = ctx.args
    F = ctx.group(a.group, n=a.n)
    G = ctx.group(a.group2, f_key="f2", n=a.n2, law_key="G")
    rep.add_verdict(check_homomorphism(F, G, ctx.series("h")))


def _decompose(ctx, rep):
    a = ctx.args
    F = ctx.group(a.group, n=a.n)
    us = _scalar(a.u_scalar) if a.u_scalar else 1 + ctx.cfg.p
    u = mul_by(F, us, check=False)
    if a.from_scalars:
        parts = [mul_by(F, x, check=False).series for x in _ints(a.from_scalars)]
        h = rebuild_sum(F, parts, len(parts))
    else:
        h = ctx.series("h")
    try:
        endos = decompose_commuting(h, u)
    except (NotCommuting, ReconstructionMismatch) as exc:
        rep.verdict("decomposition", False, str(exc), getattr(exc, "exponent", None))
        return
    rep.data["a"] = [padic_dict(x.a) for x in endos]
    rep.verdict("decomposition", True, "h = [a_1](X_1) + ... + [a_d](X_d) at precision")


def _log(ctx, rep):
    F = ctx.group(ctx.args.group, n=ctx.args.n)
    lg = formal_log(F)
    rep.data["log"] = series_to_doc(lg)
    rep.precision("log_prec", lg.prec)
    lhs = compose(lg, [F.law])
    rhs = embed(lg, 2, 0) + embed(lg, 2, 1)
    e = lhs.first_difference(rhs)
    rep.verdict("Log(F(X,Y)) = Log(X) + Log(Y)", e is None,
                "" if e is None else f"differ at exponent {e}", e)


def _shared(ctx, rep):
    r = shared_torsion_demo(ctx.cfg, ctx.args.n, ctx.args.variant)
    rep.verdicts, rep.precisions, rep.data = r.verdicts, r.precisions, r.data


def _is_torsion(ctx, rep):
    a = ctx.args
    F = ctx.group(a.group, n=a.n)
    R = cyclotomic_ring(ctx.cfg, a.level)
    z = R.gen if a.point is None else R.element(_ints(a.point))
    c = is_torsion(F, z, a.max_level)
    rep.data["certificate"] = c.to_dict()
    if c:
        rep.precision("guaranteed_val_prec", c.guaranteed_val_prec)
    rep.verdict("torsion", bool(c), f"level {c.level}" if c else "not torsion at cap")


def _theorem_a(ctx, rep):
    a = ctx.args
    F = ctx.group(a.group, n=a.n)
    G = ctx.group(a.group2, f_key="f2", n=a.n2, law_key="G")
    if a.u is not None:
        u = Endomorphism(F, ctx.series("u", a.u))
    else:
        us = _scalar(a.u_scalar) if a.u_scalar else 1 + ctx.cfg.p
        u = mul_by(F, us, check=False)
    r = theorem_A_witness(F, G, u)
    rep.verdicts, rep.precisions, rep.data = r.verdicts, r.precisions, r.data


def _rigidity(ctx, rep):
    a = ctx.args
    F = ctx.group(a.group, n=a.n)
    us = _scalar(a.u_scalar) if a.u_scalar else 1 + ctx.cfg.p
    u = mul_by(F, us, check=False)
    sample = [cyclotomic_ring(ctx.cfg, k).gen for k in range(1, a.sample_levels + 1)]
    try:
        r = rigidity_witness(F, u, ctx.series("h"), sample)
    except NotCommuting as exc:
        rep.verdict("u o h = h o u", False, str(exc), exc.exponent)
        return
    rep.verdicts, rep.precisions, rep.data = r.verdicts, r.precisions, r.data


def _prep(ctx, rep):
    h = ctx.series("h")
    unit, dist, n = weierstrass_prep(h)
    rep.data["wdeg"] = n
    rep.data["unit"] = series_to_doc(unit)
    rep.data["distinguished"] = series_to_doc(dist)
    rep.precision("prec", unit.prec)
    e = (unit * dist).first_difference(h.truncate(unit.deg))
    rep.verdict("h = unit * distinguished", e is None, "" if e is None else f"at {e}", e)


_COMMANDS = {
    "lt-group": _lt_group, "mul-by": _mul_by, "solve-commutant": _solve_commutant,
    "check-endo": _check_endo, "check-hom": _check_hom, "decompose": _decompose,
    "log": _log, "shared-torsion": _shared, "is-torsion": _is_torsion,
    "theorem-a": _theorem_a, "rigidity": _rigidity, "prep": _prep,
}


# ----------------------------------------------------------------------------
# entry points


def format_report(d: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(d, indent=2) + "\n"
    lines = [f"command: {d['command']}",
             "cfg: " + " ".join(f"{k}={v}" for k, v in d["cfg"].items())]
    for v in d["verdicts"]:
        mark = "ok  " if v["ok"] else "FAIL"
        lines.append(f"[{mark}] {v['name']}" + (f": {v['detail']}" if v.get("detail") else ""))
    for pr in d["precisions"]:
        lines.append(f"precision {pr['name']} = {pr['value']}")
    if "error" in d:
        lines.append(f"error: {d['error']['type']}: {d['error']['message']}")
    return "\n".join(lines) + "\n"


def run(argv=None, out=None) -> int:
    """Run one command; returns the exit code (0 verified, 1 verdict false, 2 error)."""
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    for k, v in _DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    rep = None
    try:
        ctx = _Ctx(args)
        rep = Report(args.command, ctx.cfg.as_dict())
        _COMMANDS[args.command](ctx, rep)
    except (FglabError, ValueError) as exc:
        cfg = rep.cfg if rep is not None else {}
        d = Report(args.command, cfg).to_dict()
        d["error"] = {"type": type(exc).__name__, "message": str(exc)}
        out.write(format_report(d, args.format))
        print(f"fglab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    out.write(format_report(rep.to_dict(), args.format))
    return 0 if rep.ok else 1


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
