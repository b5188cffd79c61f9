"""JSON reports: one per (document, command, seed), byte-stable."""

from __future__ import annotations

import hashlib
import json
import math

from ..spectralbase import (
    AcceptExact,
    AcceptNumeric,
    LikelyMember,
    MemberExact,
    NonMember,
    Reject,
)

SCHEMA = 1
FLOAT_DIGITS = 10


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def _canon(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(f"{obj:.{FLOAT_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_canon(report), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def point_json(x) -> list[str]:
    return [c.to_text() for c in x]


def verdict_json(v) -> dict:
    """Serialize a membership verdict with its witness or certificate."""
    if isinstance(v, AcceptExact):
        return {"verdict": v.verdict, "cycle": v.cycle.to_json(), "exact": True}
    if isinstance(v, AcceptNumeric):
        return {"verdict": v.verdict, "cycle": v.cycle.to_json(), "exact": False, "residual": v.residual}
    if isinstance(v, Reject):
        return {"verdict": v.verdict, "exact": v.exact, "certificate": v.certificate}
    if isinstance(v, MemberExact):
        return {
            "verdict": v.verdict,
            "reason": v.reason,
            "form": v.form.to_json() if v.form is not None else None,
            "samples": [{"point": point_json(x), **verdict_json(w)} for x, w in v.samples],
        }
    if isinstance(v, LikelyMember):
        return {
            "verdict": v.verdict,
            "samples": [{"point": point_json(x), **verdict_json(w)} for x, w in v.samples],
        }
    if isinstance(v, NonMember):
        return {"verdict": v.verdict, "point": point_json(v.point), "exact": v.exact, "certificate": v.certificate}
    raise TypeError(f"not a verdict: {v!r}")


def summarize(results: list[dict]) -> str:
    verdicts = {r.get("verdict") for r in results}
    if len(verdicts) == 1:
        return verdicts.pop()
    return "Mixed"


def build(command: str, input_digest: str, seed: int, results: list[dict], settings: dict) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "input_digest": input_digest,
        "seed": seed,
        "settings": settings,
        "verdict": summarize(results) if results else "Empty",
        "results": results,
    }


def error_report(command: str, kind: str, message: str, detail: dict | None = None,
                 input_digest: str | None = None) -> dict:
    err = {"kind": kind, "message": message}
    if detail:
        err.update(detail)
    return {"schema": SCHEMA, "command": command, "input_digest": input_digest, "error": err}
