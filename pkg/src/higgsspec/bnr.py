"""Higgs fields realizing a given spectral datum.

Two cases are global and exact: curves (companion matrices) and data that
split into u-linear sheets (diagonal fields).  Otherwise the field is built
fibre by fibre over unramified points, where multiplication by lam is
diagonal in the basis of points of the fibre.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import Config, random_int_vector
from .higgsfield import HiggsLocalModel, hitchin_sigma
from .polyalg import MultiPoly, Scalar, as_scalar
from .spectralbase import (
    MultiValuedForm,
    Reject,
    SpectralDatum,
    _expand_numeric,
    _relative_residual,
    covector_of,
    membership_at_point,
    split_exact,
)
from .spectralcover import (
    CoverDecomposition,
    DirectionalDiscriminant,
    MembershipRejected,
    decompose,
    discriminant_of_poly,
)

__all__ = [
    "PushforwardFibre",
    "Ramified",
    "SurjectivityReport",
    "companion_higgs_curve",
    "diagonal_higgs_from_split",
    "pushforward_fibre",
    "assembled_fibre",
    "verify_surjectivity",
]


class Ramified(ValueError):
    def __init__(self, component: int, disc: DirectionalDiscriminant, point: tuple):
        self.component = component
        self.discriminant = disc
        self.point = point
        value = disc.poly.value(dict(zip(disc.poly.env.zvars, point)))
        self.value = value
        super().__init__(
            f"component {component} is ramified at {[c.to_text() for c in point]}: "
            f"discriminant {disc.poly.to_text()} evaluates to {value.to_text()}"
        )


def _strip_u(p: MultiPoly) -> MultiPoly:
    env = p.env
    ui = set(env.u_idx)
    terms: dict = {}
    for e, c in p.terms.items():
        k = tuple(0 if i in ui else a for i, a in enumerate(e))
        terms[k] = terms.get(k, Scalar(0)) + c
    return MultiPoly(env, {k: c for k, c in terms.items() if not c.is_zero()})


def companion_higgs_curve(s: SpectralDatum) -> HiggsLocalModel:
    """Multiplication by lam on span(1, lam, ..., lam^(r-1))."""
    if s.n != 1:
        raise ValueError(f"companion construction needs a curve chart, got n={s.n}")
    env, r = s.env, s.r
    A = [[MultiPoly.zero(env) for _ in range(r)] for _ in range(r)]
    for j in range(1, r):
        A[j][j - 1] = MultiPoly.const(env, 1)
    for j in range(r):
        i = r - j
        coeff = _strip_u(s[i].body)
        A[j][r - 1] = coeff if (i + 1) % 2 == 0 else -coeff
    phi = HiggsLocalModel(env, (A,))
    if hitchin_sigma(phi) != s:
        raise AssertionError("companion field does not reproduce the datum")
    return phi


def diagonal_higgs_from_split(f: MultiValuedForm) -> HiggsLocalModel:
    env = f.env
    sheets: list[tuple[MultiPoly, ...]] = []
    for form, m in f.linear_forms():
        sheets.extend([covector_of(form)] * m)
    r = len(sheets)
    mats = []
    for j in range(len(env.zvars)):
        A = [[MultiPoly.zero(env) for _ in range(r)] for _ in range(r)]
        for k, cov in enumerate(sheets):
            A[k][k] = cov[j]
        mats.append(A)
    return HiggsLocalModel(env, tuple(mats))


@dataclass(frozen=True)
class PushforwardFibre:
    point: tuple
    component: int
    rank: int
    matrices: tuple  # n diagonal rank x rank matrices, Scalar or complex
    exact: bool
    residual: float

    def to_json(self) -> dict:
        def cell(c):
            if isinstance(c, Scalar):
                return c.to_text()
            return [round(c.real, 15), round(c.imag, 15)]
        return {
            "point": [c.to_text() for c in self.point],
            "component": self.component,
            "rank": self.rank,
            "exact": self.exact,
            "residual": self.residual,
            "matrices": [[[cell(c) for c in row] for row in B] for B in self.matrices],
        }


def _diag(vals: Sequence, zero) -> tuple[tuple, ...]:
    k = len(vals)
    return tuple(tuple(vals[a] if a == b else zero for b in range(k)) for a in range(k))


def _commute(mats: Sequence, exact: bool, tol: float) -> bool:
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            if exact:
                A, B = mats[a], mats[b]
                k = len(A)
                for i in range(k):
                    for j in range(k):
                        ab = sum((A[i][t] * B[t][j] for t in range(k)), Scalar(0))
                        ba = sum((B[i][t] * A[t][j] for t in range(k)), Scalar(0))
                        if ab != ba:
                            return False
            else:
                A = np.array(mats[a], dtype=complex)
                B = np.array(mats[b], dtype=complex)
                scale = max(1.0, float(np.abs(A).max(initial=0)) * float(np.abs(B).max(initial=0)))
                if np.abs(A @ B - B @ A).max(initial=0) > tol * scale:
                    return False
    return True


def _fibre_check(P: MultiPoly, x: tuple, cycle, exact: bool) -> float:
    """Residual between P at x and prod(lam - w.u) over the cycle."""
    env = P.env
    Px = P.evaluate(dict(zip(env.zvars, x)))
    if exact:
        lam = MultiPoly.var(env, env.lam)
        acc = MultiPoly.const(env, 1)
        for vec, m in cycle.entries:
            lin = lam
            for j, name in enumerate(env.uvars):
                lin = lin - MultiPoly.var(env, name).scale(vec[j])
            acc = acc * lin ** m
        if acc != Px:
            raise AssertionError("fibre does not reproduce the characteristic polynomial")
        return 0.0
    return _relative_residual(Px, _expand_numeric(env, [(list(v), m) for v, m in cycle.entries]))


def pushforward_fibre(s: SpectralDatum, k: int, x: Sequence, config: Config | None = None,
                      decomposition: CoverDecomposition | None = None) -> PushforwardFibre:
    """Fibre of multiplication by lam on component ``k`` (0-based) over ``x``."""
    cfg = config or Config()
    x = tuple(as_scalar(c) for c in x)
    dec = decomposition or decompose(s, config=cfg)
    comp = dec.components[k]
    P = comp.poly
    disc = discriminant_of_poly(P, None, cfg)
    if disc.ramified_at(x):
        raise Ramified(k, disc, x)
    v = membership_at_point(SpectralDatum.from_char_poly(P), x, cfg)
    if isinstance(v, Reject):
        raise MembershipRejected(v)
    cycle = v.cycle
    exact = cycle.exact
    pts = cycle.flatten()
    if len(pts) != comp.degree:
        raise AssertionError("fibre cardinality differs from the component degree")
    zero = Scalar(0) if exact else 0j
    mats = tuple(_diag([p[j] for p in pts], zero) for j in range(s.n))
    if not _commute(mats, exact, cfg.tol):
        raise AssertionError("fibre endomorphisms do not commute")
    res = _fibre_check(P, x, cycle, exact)
    if res > cfg.tol:
        raise AssertionError(f"fibre residual {res:.3e} exceeds tolerance")
    return PushforwardFibre(x, k, comp.degree, mats, exact, res)


def assembled_fibre(s: SpectralDatum, x: Sequence, config: Config | None = None,
                    decomposition: CoverDecomposition | None = None) -> tuple[list[PushforwardFibre], float]:
    """Every component fibre over ``x``, repeated by multiplicity, checked
    against the full characteristic polynomial at ``x``."""
    cfg = config or Config()
    x = tuple(as_scalar(c) for c in x)
    dec = decomposition or decompose(s, config=cfg)
    fibres = []
    sheets: list[tuple[list, int]] = []
    exact = True
    for k, comp in enumerate(dec.components):
        fb = pushforward_fibre(s, k, x, cfg, dec)
        fibres.append(fb)
        exact = exact and fb.exact
        for i in range(fb.rank):
            sheets.append(([B[i][i] for B in fb.matrices], comp.multiplicity))
    env = s.env
    Px = s.char_poly().evaluate(dict(zip(env.zvars, x)))
    if exact:
        lam = MultiPoly.var(env, env.lam)
        acc = MultiPoly.const(env, 1)
        for vec, m in sheets:
            lin = lam
            for j, name in enumerate(env.uvars):
                lin = lin - MultiPoly.var(env, name).scale(vec[j])
            acc = acc * lin ** m
        res = 0.0 if acc == Px else float("inf")
    else:
        res = _relative_residual(Px, _expand_numeric(env, [([complex(c) for c in v], m) for v, m in sheets]))
    return fibres, res


@dataclass(frozen=True)
class SurjectivityReport:
    tier: str  # exact-global | exact-curve | fibre-wise
    ok: bool
    field: HiggsLocalModel | None = None
    points: tuple = ()
    skipped: tuple = ()
    residual: float = 0.0
    rejection: dict | None = None  # certificate when some fibre is not a cycle of covectors

    def to_json(self) -> dict:
        d: dict = {"tier": self.tier, "ok": self.ok}
        if self.field is not None:
            d["field"] = self.field.to_json()
        if self.tier == "fibre-wise":
            d["points"] = [[c.to_text() for c in p] for p in self.points]
            d["skipped_ramified"] = [[c.to_text() for c in p] for p in self.skipped]
            d["residual"] = self.residual
            if self.rejection is not None:
                d["rejection"] = self.rejection
        return d


def verify_surjectivity(s: SpectralDatum, config: Config | None = None) -> SurjectivityReport:
    cfg = config or Config()
    f = split_exact(s, config=cfg)
    if f is not None:
        phi = diagonal_higgs_from_split(f)
        return SurjectivityReport("exact-global", hitchin_sigma(phi) == s, phi)
    if s.n == 1:
        phi = companion_higgs_curve(s)
        return SurjectivityReport("exact-curve", True, phi)
    dec = decompose(s, config=cfg)
    rng = cfg.rng("surjectivity")
    good, skipped = [], []
    worst = 0.0
    ok = True
    attempts = 0
    while len(good) < cfg.samples and attempts < 4 * cfg.samples:
        attempts += 1
        x = random_int_vector(rng, s.n, cfg.height)
        try:
            _, res = assembled_fibre(s, x, cfg, dec)
        except Ramified:
            skipped.append(x)
            continue
        except MembershipRejected as exc:
            cert = dict(exc.verdict.certificate)
            cert["exact"] = exc.verdict.exact
            return SurjectivityReport("fibre-wise", False, None, tuple(good), tuple(skipped), worst, cert)
        good.append(x)
        worst = max(worst, res)
        if res > cfg.tol:
            ok = False
    ok = ok and len(good) == cfg.samples
    return SurjectivityReport("fibre-wise", ok, None, tuple(good), tuple(skipped), worst)
