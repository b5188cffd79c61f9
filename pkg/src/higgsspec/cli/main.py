"""Command-line driver: ``higgsspec COMMAND [FILE] [options]``.

Exit codes: 0 when a verdict was produced (negative verdicts included),
1 for input errors, 2 for internal failures.  Reports are JSON on stdout
or in ``--out``.
"""

from __future__ import annotations

import argparse
import sys
import time
import traceback
from pathlib import Path
from typing import Callable

from ..bnr import Ramified, assembled_fibre, pushforward_fibre, verify_surjectivity
from ..config import Config, random_int_vector
from ..generators import random_functionals
from ..higgsfield import (
    HiggsLocalModel,
    NeedsNumeric,
    NonIntegrable,
    TriangularizationFailed,
    check_integrability,
    hitchin_sigma,
    hitchin_traces,
    is_nilpotent,
    triangularize_at,
)
from ..spectralbase import (
    AcceptNumeric,
    SamplerExhausted,
    SpectralDatum,
    common_zero_locus,
    embed_cycle,
    embed_lower_rank,
    membership_at_point,
    membership_global,
    split_exact,
)
from ..spectralcover import (
    DegenerateDirection,
    MembershipRejected,
    decompose,
    defining_equations,
    discriminant_direction,
    fibre,
)
from . import report
from .dsl import DSLError, Document, parse, parse_vector, print_document
from .selftest import run_selftest

HIGGS_COMMANDS = ("integrability", "hitchin", "nilpotency", "triangularize")
SPECTRAL_COMMANDS = (
    "membership", "split", "embed", "decompose", "equations", "fibre",
    "discriminant", "pushforward-check", "surjectivity",
)
FREE_COMMANDS = ("lemma32", "selftest")
COMMANDS = HIGGS_COMMANDS + SPECTRAL_COMMANDS + FREE_COMMANDS


class InputError(Exception):
    def __init__(self, message: str, detail: dict | None = None):
        self.detail = detail
        super().__init__(message)


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="higgsspec", description="Spectral data of local Higgs fields.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", nargs="?", help="input document (.sb); '-' reads stdin")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--degree-bound", type=int)
    p.add_argument("--mode", choices=("exact", "numeric", "auto"), default="auto")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--point", help="comma-separated coordinates, e.g. 1,2/3,1+i")
    p.add_argument("--direction", help="u-direction for the discriminant, e.g. 1,2")
    p.add_argument("--rank", type=int, help="target rank for embed")
    p.add_argument("--component", type=int, help="1-based component index for pushforward-check")
    p.add_argument("--functionals", help="lemma32 input, rows separated by ';'")
    p.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte stability)")
    return p


def make_config(args, doc: Document | None) -> Config:
    base = dict(doc.settings.items()) if doc is not None else {}
    for key in ("seed", "tol", "samples", "height", "degree_bound"):
        v = getattr(args, key)
        if v is not None:
            base[key] = v
    for key in ("tol", "samples", "height"):
        if key in base and not base[key] > 0:
            raise InputError(f"--{key} must be positive")
    if base.get("degree_bound") is not None and base["degree_bound"] < 0:
        raise InputError("--degree-bound must be non-negative")
    return Config(mode=args.mode, **base)


def _settings_json(cfg: Config) -> dict:
    return {
        "tol": cfg.tol,
        "samples": cfg.samples,
        "height": cfg.height,
        "degree_bound": cfg.degree_bound,
        "mode": cfg.mode,
    }


def _vector(text: str, n: int, what: str) -> tuple:
    try:
        v = parse_vector(text)
    except DSLError as e:
        raise InputError(f"bad {what}: {e}", {"diagnostic": e.to_json()})
    if len(v) != n:
        raise InputError(f"{what} needs {n} coordinates, got {len(v)}")
    return v


def _point(args, n: int, cfg: Config, salt: str) -> tuple:
    if args.point is not None:
        return _vector(args.point, n, "--point")
    return random_int_vector(cfg.rng("cli-point", salt), n, cfg.height)


# -- higgs commands ----------------------------------------------------------


def _integrability(phi: HiggsLocalModel, args, cfg) -> dict:
    v = check_integrability(phi)
    if v is None:
        return {"verdict": "Integrable"}
    return {"verdict": "NonIntegrable", "violation": v.to_json()}


def _guard_integrable(fn):
    def wrapped(phi, args, cfg):
        try:
            return fn(phi, args, cfg)
        except NonIntegrable as exc:
            return {"verdict": "NonIntegrable", "violation": exc.violation.to_json()}
    return wrapped


@_guard_integrable
def _hitchin(phi: HiggsLocalModel, args, cfg) -> dict:
    traces = hitchin_traces(phi)
    sigma = hitchin_sigma(phi)
    return {"verdict": "Computed", "traces": [t.to_text() for t in traces], "sigma": sigma.to_text()}


@_guard_integrable
def _nilpotency(phi: HiggsLocalModel, args, cfg) -> dict:
    nil = is_nilpotent(phi)
    return {"verdict": "Nilpotent" if nil else "NotNilpotent", "sigma": hitchin_sigma(phi).to_text()}


@_guard_integrable
def _triangularize(phi: HiggsLocalModel, args, cfg) -> dict:
    if args.point is not None:
        points = [_vector(args.point, phi.n, "--point")]
    else:
        rng = cfg.rng("cli-triangularize")
        points = [random_int_vector(rng, phi.n, cfg.height) for _ in range(cfg.samples)]
    out = []
    verdict = "Triangularized"
    for k, x in enumerate(points):
        try:
            res = triangularize_at(phi, x, mode=cfg.mode, tol=cfg.tol, seed=cfg.seed + k, retries=cfg.retries)
        except NeedsNumeric as exc:
            out.append({"point": report.point_json(x), "verdict": "NeedsNumeric", "message": str(exc)})
            verdict = "NeedsNumeric"
            continue
        except TriangularizationFailed as exc:
            out.append({"point": report.point_json(x), "verdict": "TriangularizationFailed",
                        "residual": exc.residual, "tol": exc.tol})
            verdict = "TriangularizationFailed"
            continue
        out.append({"verdict": "Triangularized", **res.to_json()})
    return {"verdict": verdict, "points": out}


# -- spectral commands -------------------------------------------------------


def _membership(s: SpectralDatum, args, cfg) -> dict:
    if args.point is not None:
        x = _vector(args.point, s.n, "--point")
        v = membership_at_point(s, x, cfg)
        out = {"point": report.point_json(x), **report.verdict_json(v)}
        if cfg.mode == "exact" and isinstance(v, AcceptNumeric):
            out["verdict"] = "NeedsNumeric"
        return out
    try:
        return report.verdict_json(membership_global(s, cfg))
    except SamplerExhausted as exc:
        return {"verdict": "Inconclusive", "message": str(exc)}


def _split(s: SpectralDatum, args, cfg) -> dict:
    f = split_exact(s, config=cfg)
    if f is None:
        return {"verdict": "NotSplit", "degree_bound": cfg.degree_bound if cfg.degree_bound is not None
                else s.z_degree()}
    return {"verdict": "Split", "form": f.to_json()}


def _embed(s: SpectralDatum, args, cfg) -> dict:
    r = args.rank if args.rank is not None else s.r + 1
    if r < s.r:
        raise InputError(f"--rank {r} is below the datum rank {s.r}")
    t = embed_lower_rank(s, r)
    out = {"verdict": "Embedded", "rank": r, "datum": t.to_text()}
    x = _point(args, s.n, cfg, "embed")
    v = membership_at_point(s, x, cfg)
    w = membership_at_point(t, x, cfg)
    out["point"] = report.point_json(x)
    out["source"] = report.verdict_json(v)
    out["embedded"] = report.verdict_json(w)
    if hasattr(v, "cycle") and hasattr(w, "cycle") and v.cycle.exact and w.cycle.exact:
        out["cycle_matches"] = embed_cycle(v.cycle, r) == w.cycle
    return out


def _decompose(s: SpectralDatum, args, cfg) -> dict:
    dec = decompose(s, cfg.degree_bound, cfg)
    return {"verdict": "Decomposed", "count": len(dec.components), **dec.to_json()}


def _equations(s: SpectralDatum, args, cfg) -> dict:
    return {"verdict": "Computed", **defining_equations(s).to_json()}


def _fibre(s: SpectralDatum, args, cfg) -> dict:
    x = _point(args, s.n, cfg, "fibre")
    try:
        cyc = fibre(s, x, cfg)
    except MembershipRejected as exc:
        return {"point": report.point_json(x), **report.verdict_json(exc.verdict)}
    return {"verdict": "Fibre", "point": report.point_json(x), "exact": cyc.exact, "cycle": cyc.to_json()}


def _discriminant(s: SpectralDatum, args, cfg) -> dict:
    direction = _vector(args.direction, s.n, "--direction") if args.direction is not None else None
    try:
        d = discriminant_direction(s, direction, cfg)
    except DegenerateDirection as exc:
        return {"verdict": "DegenerateDirection", "message": str(exc)}
    return {"verdict": "Computed", **d.to_json()}


def _pushforward(s: SpectralDatum, args, cfg) -> dict:
    dec = decompose(s, cfg.degree_bound, cfg)
    x = _point(args, s.n, cfg, "pushforward")
    try:
        if args.component is not None:
            k = args.component
            if not 1 <= k <= len(dec.components):
                raise InputError(f"--component {k} out of range 1..{len(dec.components)}")
            fb = pushforward_fibre(s, k - 1, x, cfg, dec)
            return {"verdict": "Verified", **fb.to_json()}
        fibres, res = assembled_fibre(s, x, cfg, dec)
    except MembershipRejected as exc:
        return {"point": report.point_json(x), **report.verdict_json(exc.verdict)}
    except Ramified as exc:
        return {"verdict": "Ramified", "point": report.point_json(x), "component": exc.component + 1,
                "discriminant": exc.discriminant.to_json(), "value": exc.value.to_text()}
    ok = res <= cfg.tol
    return {
        "verdict": "Verified" if ok else "Mismatch",
        "point": report.point_json(x),
        "assembled_residual": res,
        "fibres": [fb.to_json() for fb in fibres],
    }


def _surjectivity(s: SpectralDatum, args, cfg) -> dict:
    rep = verify_surjectivity(s, cfg)
    return {"verdict": "Verified" if rep.ok else "Failed", **rep.to_json()}


HANDLERS: dict[str, Callable] = {
    "integrability": _integrability,
    "hitchin": _hitchin,
    "nilpotency": _nilpotency,
    "triangularize": _triangularize,
    "membership": _membership,
    "split": _split,
    "embed": _embed,
    "decompose": _decompose,
    "equations": _equations,
    "fibre": _fibre,
    "discriminant": _discriminant,
    "pushforward-check": _pushforward,
    "surjectivity": _surjectivity,
}


def _lemma32(args, cfg) -> tuple[str, list[dict]]:
    if args.functionals is not None:
        try:
            L = parse_vector(args.functionals, rows=True)
        except DSLError as e:
            raise InputError(f"bad --functionals: {e}", {"diagnostic": e.to_json()})
        if len({len(row) for row in L}) != 1:
            raise InputError("--functionals rows have different lengths")
        instances = [L]
    else:
        rng = cfg.rng("cli-lemma32")
        instances = []
        for _ in range(cfg.samples):
            dim = rng.randint(1, 5)
            instances.append(random_functionals(rng, dim, rng.randint(1, 5)))
    samples = args.samples if args.samples is not None else 50
    results = []
    for L in instances:
        rep = common_zero_locus(L, len(L[0]), samples=samples, config=cfg)
        results.append({"verdict": "Holds" if rep.ok else "Falsified", **rep.to_json()})
    text = ";".join(",".join(c.to_text() for c in row) for L in instances for row in L)
    return report.digest(text), results


def _load(path: str | None, command: str) -> tuple[Document | None, str]:
    if path is None:
        if command in FREE_COMMANDS:
            return None, report.digest("")
        raise InputError(f"command {command!r} needs an input document")
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}")
    try:
        doc = parse(text)
    except DSLError as e:
        raise InputError(str(e), {"diagnostic": e.to_json()})
    return doc, report.digest(print_document(doc))


def execute(args) -> dict:
    command = args.command
    doc, dig = _load(args.file, command)
    cfg = make_config(args, doc)
    if command == "selftest":
        out = run_selftest(cfg)
        results = [{"verdict": out["verdict"], "checks": out["checks"]}]
    elif command == "lemma32":
        dig2, results = _lemma32(args, cfg)
        if doc is None:
            dig = dig2
    else:
        handler = HANDLERS[command]
        if command in HIGGS_COMMANDS:
            blocks = [(f"higgs[{k}]", b) for k, b in enumerate(doc.higgs, start=1)]
            need = "higgs"
        else:
            blocks = [(f"spectral[{k}]", b) for k, b in enumerate(doc.spectral, start=1)]
            need = "spectral"
        if not blocks:
            raise InputError(f"command {command!r} needs at least one {need} block")
        results = [{"block": name, **handler(b, args, cfg)} for name, b in blocks]
    return report.build(command, dig, cfg.seed, results, _settings_json(cfg))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_text(text, encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    command = "unknown"
    out = None
    try:
        args = parser.parse_args(argv)
        command, out = args.command, args.out
        start = time.perf_counter()
        rep = execute(args)
        if args.timing:
            rep["timing_seconds"] = time.perf_counter() - start
        _emit(report.dumps(rep), out)
        return 0
    except InputError as exc:
        print(f"higgsspec: {exc}", file=sys.stderr)
        try:
            _emit(report.dumps(report.error_report(command, "input", str(exc), exc.detail)), out)
        except OSError:
            pass
        return 1
    except Exception as exc:  # contract: anything unforeseen is exit code 2
        print(f"higgsspec: internal failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        traceback.print_exc(file=sys.stderr)
        try:
            _emit(report.dumps(report.error_report(command, "internal", f"{type(exc).__name__}: {exc}")), out)
        except OSError:
            pass
        return 2


if __name__ == "__main__":
    sys.exit(main())
