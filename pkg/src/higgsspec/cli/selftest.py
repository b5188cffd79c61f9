"""Bundled invariant suite behind the ``selftest`` command."""

from __future__ import annotations

import random
from importlib import resources
from typing import Callable

from ..bnr import companion_higgs_curve, diagonal_higgs_from_split
from ..config import Config, random_int_vector
from ..generators import (
    chart,
    random_commuting_family,
    random_curve_datum,
    random_functionals,
    random_multivalued_form,
    random_nilpotent_family,
    random_split_product,
)
from ..higgsfield import hitchin_sigma, hitchin_traces, is_nilpotent, triangularize_at
from ..polyalg import newton_convert, sym_dim
from ..spectralbase import AcceptExact, SpectralDatum, common_zero_locus, membership_at_point, split_exact
from ..spectralcover import decompose, defining_equations
from .dsl import parse, print_document


def _newton(rng: random.Random, cfg: Config) -> bool:
    phi = random_commuting_family(rng, rng.randint(1, 3), rng.randint(1, 4))
    return SpectralDatum(tuple(newton_convert(hitchin_traces(phi), "power_to_elementary"))) == hitchin_sigma(phi)


def _split_membership(rng: random.Random, cfg: Config) -> bool:
    n = rng.randint(1, 3)
    f = random_multivalued_form(rng, n, rng.randint(1, 4))
    s = f.datum()
    for _ in range(3):
        x = random_int_vector(rng, n, 10)
        v = membership_at_point(s, x, cfg)
        if not isinstance(v, AcceptExact) or v.cycle != f.at(x):
            return False
    return split_exact(s, config=cfg) == f


def _decompose(rng: random.Random, cfg: Config) -> bool:
    mults = tuple(rng.randint(1, 3) for _ in range(rng.randint(1, 3)))
    f = random_split_product(rng, rng.randint(1, 3), mults)
    s = f.datum()
    dec = decompose(s, config=cfg)
    return (dec.product() == s.char_poly()
            and sorted(c.multiplicity for c in dec.components) == sorted(mults)
            and sum(c.multiplicity * c.degree for c in dec.components) == s.r)


def _curve(rng: random.Random, cfg: Config) -> bool:
    s = random_curve_datum(rng, rng.randint(1, 5))
    return hitchin_sigma(companion_higgs_curve(s)) == s


def _diagonal(rng: random.Random, cfg: Config) -> bool:
    f = random_multivalued_form(rng, rng.randint(1, 3), rng.randint(1, 4))
    return hitchin_sigma(diagonal_higgs_from_split(f)) == f.datum()


def _triangularize(rng: random.Random, cfg: Config) -> bool:
    n = rng.randint(1, 3)
    phi = random_commuting_family(rng, n, rng.randint(1, 4))
    for k in range(3):
        res = triangularize_at(phi, random_int_vector(rng, n, 10), tol=cfg.tol, seed=cfg.seed + k)
        if not res.exact and res.sigma_residual > cfg.tol:
            return False
    return True


def _nilpotent(rng: random.Random, cfg: Config) -> bool:
    phi = random_nilpotent_family(rng, rng.randint(1, 3), rng.randint(1, 4))
    if not is_nilpotent(phi):
        return False
    s = SpectralDatum.zero(phi.env, phi.r)
    v = membership_at_point(s, random_int_vector(rng, phi.n, 10), cfg)
    return isinstance(v, AcceptExact) and len(v.cycle.entries) == 1 and v.cycle.entries[0][1] == phi.r


def _lemma(rng: random.Random, cfg: Config) -> bool:
    dim = rng.randint(1, 5)
    L = random_functionals(rng, dim, rng.randint(1, 5))
    return common_zero_locus(L, dim, samples=10, config=cfg).ok


def _equations(rng: random.Random, cfg: Config) -> bool:
    n, r = rng.randint(1, 4), rng.randint(1, 5)
    return defining_equations(SpectralDatum.zero(chart(n), r)).count == sym_dim(n, r)


def _corpus_round_trip(rng: random.Random, cfg: Config) -> bool:
    for path in sorted(resources.files("higgsspec.corpus").iterdir(), key=lambda p: p.name):
        if not path.name.endswith(".sb"):
            continue
        doc = parse(path.read_text(encoding="utf-8"))
        text = print_document(doc)
        if parse(text) != doc or print_document(parse(text)) != text:
            return False
    return True


CHECKS: list[tuple[str, Callable, int]] = [
    ("newton_identities", _newton, 10),
    ("split_membership", _split_membership, 8),
    ("decomposition_identity", _decompose, 8),
    ("curve_round_trip", _curve, 10),
    ("diagonal_round_trip", _diagonal, 10),
    ("triangularization", _triangularize, 5),
    ("nilpotency", _nilpotent, 5),
    ("zero_locus", _lemma, 20),
    ("equation_count", _equations, 10),
    ("corpus_round_trip", _corpus_round_trip, 1),
]


def run_selftest(cfg: Config) -> dict:
    checks = []
    ok = True
    for name, fn, count in CHECKS:
        rng = cfg.rng("selftest", name)
        passed = 0
        failures = []
        for k in range(count):
            try:
                good = fn(rng, cfg)
            except Exception as exc:  # a crash counts as a failed instance
                good = False
                failures.append({"instance": k, "error": f"{type(exc).__name__}: {exc}"})
            else:
                if not good:
                    failures.append({"instance": k})
            passed += bool(good)
        ok = ok and passed == count
        checks.append({"name": name, "passed": passed, "total": count, "failures": failures})
    return {"verdict": "Pass" if ok else "Fail", "checks": checks}
