"""Text descriptors for models and mode lists.

    gaussian:k=3
    cylinder:m=2,k=1
    poly:d=1,idx=0,c=1 ; exp:j=1,parity=even,c=0.5
"""

from __future__ import annotations

from .geometry import RigidShrinker
from .harmonics import ExponentialMode, HarmonicCombination, PolynomialMode


class DescriptorError(ValueError):
    def __init__(self, message: str, text: str, column: int, line: int = 1):
        self.message, self.text, self.column, self.line = message, text, column, line
        super().__init__(f"{line}:{column}: {message}\n  {text}\n  {' ' * (column - 1)}^")


def _fields(text: str):
    """Split 'head:k=v,k=v' into (head, {key: (value, column)}). Columns are 1-based."""
    head, sep, rest = text.partition(":")
    if not sep:
        raise DescriptorError("expected '<kind>:<key>=<value>,...'", text, len(text) + 1)
    out = {}
    pos = len(head) + 1
    for chunk in rest.split(","):
        col = pos + 1
        key, eq, value = chunk.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not key or not value:
            raise DescriptorError(f"malformed field {chunk!r}", text, col)
        if key in out:
            raise DescriptorError(f"duplicate field {key!r}", text, col)
        out[key] = (value, col + len(chunk) - len(chunk.lstrip()) + len(key) + 1)
        pos += len(chunk) + 1
    return head.strip(), out


def _int(fields, key, text, default=None) -> int:
    if key not in fields:
        if default is None:
            raise DescriptorError(f"missing field {key!r}", text, len(text) + 1)
        return default
    value, col = fields.pop(key)
    try:
        return int(value)
    except ValueError:
        raise DescriptorError(f"{key} must be an integer, got {value!r}", text, col) from None


def _float(fields, key, text, default=None) -> float:
    if key not in fields:
        return default
    value, col = fields.pop(key)
    try:
        return float(value)
    except ValueError:
        raise DescriptorError(f"{key} must be a number, got {value!r}", text, col) from None


def _no_extra(fields, text):
    for key, (_, col) in fields.items():
        raise DescriptorError(f"unknown field {key!r}", text, col - len(key) - 1)


def parse_model(text: str) -> RigidShrinker:
    text = text.strip()
    kind, fields = _fields(text)
    try:
        if kind == "gaussian":
            k = _int(fields, "k", text)
            _no_extra(fields, text)
            return RigidShrinker.gaussian(k)
        if kind == "cylinder":
            m = _int(fields, "m", text)
            k = _int(fields, "k", text)
            _no_extra(fields, text)
            return RigidShrinker.cylinder(m, k)
    except DescriptorError:
        raise
    except ValueError as exc:
        raise DescriptorError(str(exc), text, len(kind) + 2) from None
    raise DescriptorError(f"unknown model family {kind!r} (expected gaussian or cylinder)", text, 1)


def parse_mode(text: str):
    """Parse one mode descriptor into (coefficient, mode)."""
    kind, fields = _fields(text)
    if kind == "poly":
        d = _int(fields, "d", text)
        idx = _int(fields, "idx", text, default=0)
        c = _float(fields, "c", text, default=1.0)
        _no_extra(fields, text)
        try:
            return c, PolynomialMode(d, idx)
        except ValueError as exc:
            raise DescriptorError(str(exc), text, 1) from None
    if kind == "exp":
        j = _int(fields, "j", text)
        parity = fields.pop("parity", ("even", 0))[0]
        c = _float(fields, "c", text, default=1.0)
        _no_extra(fields, text)
        try:
            return c, ExponentialMode(j, parity)
        except ValueError as exc:
            raise DescriptorError(str(exc), text, 1) from None
    raise DescriptorError(f"unknown mode kind {kind!r} (expected poly or exp)", text, 1)


def parse_modes(items) -> HarmonicCombination:
    """Accepts a string or a list of strings; ';' also separates modes."""
    if isinstance(items, str):
        items = [items]
    terms = []
    for item in items:
        offset = 0
        for part in item.split(";"):
            stripped = part.strip()
            if stripped:
                lead = len(part) - len(part.lstrip())
                try:
                    terms.append(parse_mode(stripped))
                except DescriptorError as exc:
                    raise DescriptorError(exc.message, item, exc.column + offset + lead) from None
            offset += len(part) + 1
    try:
        return HarmonicCombination(tuple(terms))
    except ValueError as exc:
        raise DescriptorError(str(exc), " ; ".join(items), 1) from None


def combination_to_json(u: HarmonicCombination) -> list:
    out = []
    for c, mode in u.terms:
        if isinstance(mode, PolynomialMode):
            out.append({"kind": "poly", "d": mode.degree, "idx": mode.index, "c": c})
        else:
            out.append({"kind": "exp", "j": mode.eigen_index, "parity": mode.parity, "c": c})
    return out


def combination_from_json(data) -> HarmonicCombination:
    terms = []
    for row in data:
        if row["kind"] == "poly":
            terms.append((row["c"], PolynomialMode(row["d"], row.get("idx", 0))))
        else:
            terms.append((row["c"], ExponentialMode(row["j"], row.get("parity", "even"))))
    return HarmonicCombination(tuple(terms))
