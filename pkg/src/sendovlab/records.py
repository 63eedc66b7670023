"""Plain-text zero records and the JSON report writer.

A zero record is a header ``n m`` (or ``n=<n> m=<m>``) followed by one
``re im mult`` row per distinct zero. Records are separated by newlines or
``;`` and ``#`` starts a comment. ``roots_of_unity:<n>`` stands for the
``n``-th roots of unity. Floats are written with ``repr``, so
``parse_zeros(serialize_zeros(c)) == c`` holds exactly.
"""

from __future__ import annotations

import json
import math
import re

import numpy as np

from .cpoly import TAU_SEP, ZeroConfig, roots_of_unity
from .errors import ContractError, ParseError

_MACRO = re.compile(r"^\s*roots_of_unity\s*:\s*(\S+)\s*$")
_TOKEN = re.compile(r"\S+")


def _records(text: str):
    """Yield ``(line, column, [(column, token), ...])`` for every non-empty record."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        start = 0
        for chunk in line.split(";"):
            tokens = [(start + m.start() + 1, m.group()) for m in _TOKEN.finditer(chunk)]
            if tokens:
                yield lineno, tokens[0][0], tokens
            start += len(chunk) + 1


def _int(token: str, line: int, col: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", line, col) from None


def _float(token: str, line: int, col: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line, col) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite coordinate {token!r}", line, col)
    return value


def _header(tokens, line):
    if all("=" in tok for _, tok in tokens):
        fields = {}
        for col, tok in tokens:
            key, _, val = tok.partition("=")
            if key not in ("n", "m") or key in fields:
                raise ParseError(f"unexpected header field {tok!r}", line, col)
            fields[key] = _int(val, line, col, key)
        if set(fields) != {"n", "m"}:
            raise ParseError("header needs both n and m", line, tokens[0][0])
        return fields["n"], fields["m"]
    (c1, t1), (c2, t2) = tokens
    return _int(t1, line, c1, "n"), _int(t2, line, c2, "m")


def parse_zeros(text: str, tau_sep: float = TAU_SEP) -> ZeroConfig:
    """Parse a zero record (see the module docstring) into a :class:`ZeroConfig`."""
    macro = _MACRO.match(text)
    if macro:
        n = _int(macro.group(1), 1, macro.start(1) + 1, "n")
        if n < 1:
            raise ParseError("roots_of_unity needs n >= 1", 1, macro.start(1) + 1)
        return roots_of_unity(n)
    header = None
    rows = []
    for idx, (line, col, tokens) in enumerate(_records(text)):
        if idx == 0 and (len(tokens) == 2 or all("=" in t for _, t in tokens)):
            header = (_header(tokens, line), line, col)
            continue
        if len(tokens) != 3:
            raise ParseError(f"expected 're im mult', got {len(tokens)} fields", line, col)
        (cr, tr), (ci, ti), (cm, tm) = tokens
        mult = _int(tm, line, cm, "multiplicity")
        if mult < 1:
            raise ParseError(f"multiplicity must be positive, got {mult}", line, cm)
        rows.append((complex(_float(tr, line, cr), _float(ti, line, ci)), mult, line, col))
    if not rows:
        raise ParseError("no zeros given", 1, 1)
    seen = {}
    for z, _, line, col in rows:
        if z in seen:
            raise ParseError(f"duplicate location {z} (first given on line {seen[z]})", line, col)
        seen[z] = line
    if header is not None:
        (n, m), line, col = header
        total = sum(r[1] for r in rows)
        if m != len(rows):
            raise ParseError(f"header says m = {m} but {len(rows)} zeros were given", line, col)
        if n != total:
            raise ParseError(f"header says n = {n} but the multiplicities sum to {total}", line, col)
    try:
        return ZeroConfig(tuple(r[0] for r in rows), tuple(r[1] for r in rows), tau_sep=tau_sep)
    except ContractError as exc:
        raise ParseError(str(exc)) from exc


def serialize_zeros(config: ZeroConfig) -> str:
    lines = [f"{config.n} {config.m}"]
    for z, mu in config.pairs():
        lines.append(f"{z.real!r} {z.imag!r} {mu}")
    return "\n".join(lines) + "\n"


def parse_complex_list(text: str) -> tuple:
    """Comma-separated Python complex literals, e.g. ``"0.9+0j, -0.5-0.8j"``."""
    out = []
    for col, tok in ((m.start() + 1, m.group().strip()) for m in re.finditer(r"[^,]+", text)):
        try:
            z = complex(tok.replace(" ", ""))
        except ValueError:
            raise ParseError(f"not a complex number: {tok!r}", 1, col) from None
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ParseError(f"non-finite value {tok!r}", 1, col)
        out.append(z)
    return tuple(out)


# --------------------------------------------------------------------------
# report writer


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".16e")


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, ZeroConfig):
        return json.dumps(serialize_zeros(obj))
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray, complex)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[" + pad + ("," + pad).join(parts) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits.

    Complex numbers become ``[re, im]`` pairs and zero configurations become
    their text record; the output is read back by :func:`json.loads`.
    """
    return _encode(obj, indent, 0) + "\n"
