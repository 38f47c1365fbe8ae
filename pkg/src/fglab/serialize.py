"""Canonical JSON documents for truncated series.

A document looks like::

    {
      "schema_version": 1,
      "cfg": {"p": 2, "N": 24, "D": 4, "M": 16},
      "vars": 1,
      "terms": [{"exponents": [1], "mantissa": "3", "shift": 1}, ...],
      "prec_floor": 24
    }

Each term stores the value ``p**shift * mantissa`` in the canonical p-adic
form (shift is the valuation, mantissa a unit reduced modulo
``p**(prec_floor - shift)``).  Terms are sorted lexicographically by
exponent and zero terms are omitted.  ``prec_floor`` is null for exact data.
Optional keys ``deg`` (when the degree bound differs from M) and ``tail``
(when it differs from the default) are emitted only when needed.
"""
from __future__ import annotations

import json

from .errors import FglabError, SchemaError
from .monomials import count, index_map
from .padic import PrimeConfig
from .series import TruncatedSeries

SCHEMA_VERSION = 1


def series_to_doc(s: TruncatedSeries) -> dict:
    terms = sorted(
        ({"exponents": list(e), "mantissa": str(c.mantissa), "shift": c.shift}
         for e, c in s.terms()),
        key=lambda t: t["exponents"])
    doc = {
        "schema_version": SCHEMA_VERSION,
        "cfg": s.cfg.as_dict(),
        "vars": s.d,
        "terms": terms,
        "prec_floor": s.prec,
    }
    if s.deg != s.cfg.M:
        doc["deg"] = s.deg
    if s.tail != _default_tail(s.prec):
        doc["tail"] = s.tail
    return doc


def _default_tail(prec):
    return "zero" if prec is None else "integral"


def emit_series(s: TruncatedSeries) -> str:
    return json.dumps(series_to_doc(s), indent=2) + "\n"


def _field(doc, key, kind, where):
    if key not in doc:
        raise SchemaError(f"{where}: missing field '{key}'")
    val = doc[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise SchemaError(f"{where}.{key}: expected integer, got {val!r}")
    if kind is not int and not isinstance(val, kind):
        raise SchemaError(f"{where}.{key}: expected {kind.__name__}, got {type(val).__name__}")
    return val


def doc_to_series(doc, cfg: PrimeConfig | None = None) -> TruncatedSeries:
    """Validate a parsed document.  ``cfg``, when given, must agree on p; its
    N, D and M are used in place of the document's."""
    if not isinstance(doc, dict):
        raise SchemaError("document: expected a JSON object")
    ver = _field(doc, "schema_version", int, "document")
    if ver != SCHEMA_VERSION:
        raise SchemaError(f"document.schema_version: unsupported version {ver}")
    c = _field(doc, "cfg", dict, "document")
    try:
        dcfg = PrimeConfig(_field(c, "p", int, "cfg"), _field(c, "N", int, "cfg"),
                           _field(c, "M", int, "cfg"), c.get("D"))
    except FglabError as exc:
        raise SchemaError(f"cfg: {exc}") from None
    if cfg is not None and cfg.p != dcfg.p:
        raise SchemaError(f"cfg.p: document has p={dcfg.p}, expected {cfg.p}")
    cfg = cfg or dcfg
    d = _field(doc, "vars", int, "document")
    if d < 1:
        raise SchemaError("document.vars: must be >= 1")
    deg = doc.get("deg", cfg.M)
    if not isinstance(deg, int) or deg < 0:
        raise SchemaError("document.deg: expected a non-negative integer")
    prec = doc.get("prec_floor")
    if "prec_floor" not in doc:
        raise SchemaError("document: missing field 'prec_floor'")
    if prec is not None and (not isinstance(prec, int) or prec < 1):
        raise SchemaError("document.prec_floor: expected a positive integer or null")
    tail = doc.get("tail", _default_tail(prec))
    terms = _field(doc, "terms", list, "document")
    vals = {}
    for i, t in enumerate(terms):
        where = f"terms[{i}]"
        if not isinstance(t, dict):
            raise SchemaError(f"{where}: expected an object")
        e = _field(t, "exponents", list, where)
        if len(e) != d or not all(isinstance(x, int) and x >= 0 for x in e):
            raise SchemaError(f"{where}.exponents: expected {d} non-negative integers")
        if sum(e) > deg:
            raise SchemaError(f"{where}.exponents: total degree {sum(e)} exceeds cap {deg}")
        m = _field(t, "mantissa", str, where)
        try:
            m = int(m)
        except ValueError:
            raise SchemaError(f"{where}.mantissa: not a decimal integer: {m!r}") from None
        sh = _field(t, "shift", int, where)
        if tuple(e) in vals:
            raise SchemaError(f"{where}.exponents: duplicate exponent {e}")
        vals[tuple(e)] = (m, sh)
    if not vals:
        return TruncatedSeries(cfg, d, [], deg, prec, 0, tail)
    s0 = min(sh for _, sh in vals.values())
    idx = index_map(d, deg)
    c = [0] * count(d, deg)
    p = cfg.p
    for e, (m, sh) in vals.items():
        c[idx[e]] = m * p ** (sh - s0)
    try:
        return TruncatedSeries(cfg, d, c, deg, prec, s0, tail)
    except (FglabError, ValueError) as exc:
        raise SchemaError(f"document: {exc}") from None


def parse_series(text: str, cfg: PrimeConfig | None = None) -> TruncatedSeries:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return doc_to_series(doc, cfg)
