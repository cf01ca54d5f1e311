"""Report records shared by every check, plus deterministic JSON emission."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

SCHEMA_VERSION = 1

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass
class IdentityEntry:
    """One verified identity or inequality.

    The verdict is derived: pass iff residual <= tol, unless the entry was
    explicitly skipped (then ``reason`` says why).
    """

    id: str
    params: dict
    residual: float
    tol: float
    engine: str = "closed-form"
    seed: Optional[int] = None
    reason: Optional[str] = None
    skipped: bool = False
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.skipped:
            return SKIPPED
        return PASS if self.residual <= self.tol else FAIL

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @classmethod
    def skip(cls, id: str, params: dict, reason: str, **kw) -> "IdentityEntry":
        return cls(id=id, params=params, residual=math.nan, tol=math.nan, reason=reason, skipped=True, **kw)

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "params": self.params,
            "residual": self.residual,
            "tol": self.tol,
            "verdict": self.verdict,
            "engine": self.engine,
            "seed": self.seed,
        }
        if self.reason is not None:
            out["reason"] = self.reason
        if self.details:
            out["details"] = self.details
        return _sanitize(out)


def _sanitize(obj):
    """JSON has no inf/nan; encode them as strings so output stays strict."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if hasattr(obj, "tolist") and getattr(obj, "ndim", 0) > 0:
        return _sanitize(obj.tolist())
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _sanitize(obj.item())
    return obj


def _sort_key(entry: IdentityEntry):
    return (entry.id, json.dumps(_sanitize(entry.params), sort_keys=True))


@dataclass
class IdentityReport:
    entries: list = field(default_factory=list)
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def add(self, entry: IdentityEntry) -> IdentityEntry:
        self.entries.append(entry)
        return entry

    def extend(self, entries) -> None:
        self.entries.extend(entries)

    @property
    def failures(self) -> list:
        return [e for e in self.entries if e.verdict == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failures

    def sorted_entries(self) -> list:
        return sorted(self.entries, key=_sort_key)

    def to_json(self) -> dict:
        return _sanitize({
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            **self.meta,
            # entries without a seed of their own inherit the run seed
            "entries": [{**e.to_json(), "seed": self.seed if e.seed is None else e.seed}
                        for e in self.sorted_entries()],
        })

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def summary_lines(self) -> list:
        lines = [f"{'verdict':8s} {'residual':>12s} {'tol':>10s}  id  params"]
        for e in self.sorted_entries():
            res = "-" if e.skipped else f"{e.residual:.3e}"
            tol = "-" if e.skipped else f"{e.tol:.1e}"
            params = ",".join(f"{k}={v}" for k, v in sorted(e.params.items()))
            lines.append(f"{e.verdict:8s} {res:>12s} {tol:>10s}  {e.id}  {params}")
        counts = {v: sum(1 for e in self.entries if e.verdict == v) for v in (PASS, FAIL, SKIPPED)}
        lines.append(f"{counts[PASS]} passed, {counts[FAIL]} failed, {counts[SKIPPED]} skipped")
        return lines
