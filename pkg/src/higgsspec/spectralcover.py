"""The spectral cover of a datum on the chart: equations, fibres, ramification
along a direction, and the decomposition into components with multiplicities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .config import Config, random_int_vector
from .polyalg import (
    Env,
    MultiPoly,
    as_scalar,
    discriminant,
    sym_dim,
    u_monomials,
)
from .spectralbase import (
    Reject,
    SpectralDatum,
    ZeroCycle,
    cover_layers,
    covector_of,
    membership_at_point,
)

__all__ = [
    "SpectralCover",
    "CoverComponent",
    "CoverDecomposition",
    "DirectionalDiscriminant",
    "MembershipRejected",
    "DegenerateDirection",
    "defining_equations",
    "fibre",
    "discriminant_direction",
    "decompose",
    "multiplicity_constancy_check",
]


class MembershipRejected(ValueError):
    def __init__(self, verdict: Reject):
        self.verdict = verdict
        super().__init__(f"datum rejected at point: {verdict.certificate.get('kind')}")


class DegenerateDirection(ValueError):
    pass


@dataclass(frozen=True)
class SpectralCover:
    datum: SpectralDatum
    env: Env  # chart env extended by the xi-block
    monomials: tuple  # u-exponent per equation
    equations: tuple  # MultiPoly in (z, xi)

    @property
    def count(self) -> int:
        return len(self.equations)

    def to_json(self) -> dict:
        names = self.env.uvars
        out = []
        for ue, eq in zip(self.monomials, self.equations):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, ue) if k) or "1"
            out.append({"monomial": mono, "equation": eq.to_text()})
        return {"count": self.count, "equations": out}


def defining_equations(s: SpectralDatum) -> SpectralCover:
    """Coefficients of the u-monomials of degree r in
    ``xi^r - s_1 xi^(r-1) + ... + (-1)^r s_r`` with ``xi = sum_j xi_j u_j``."""
    env = s.env
    xenv = env.with_xi()
    xi_u = MultiPoly.zero(xenv)
    for xn, un in zip(xenv.xivars, xenv.uvars):
        xi_u = xi_u + MultiPoly.var(xenv, xn) * MultiPoly.var(xenv, un)
    P = s.char_poly().to_env(xenv).substitute({xenv.lam: xi_u})
    n, r = s.n, s.r
    uoff = xenv.u_idx.start
    buckets: dict[tuple, dict] = {}
    for e, c in P.terms.items():
        ue = e[uoff:uoff + n]
        stripped = e[:uoff] + (0,) * n + e[uoff + n:]
        buckets.setdefault(ue, {})[stripped] = c
    monos = tuple(u_monomials(n, r))
    eqs = tuple(MultiPoly(xenv, buckets.get(ue, {})) for ue in monos)
    extra = set(buckets) - set(monos)
    if extra:
        raise AssertionError("characteristic polynomial is not u-homogeneous of degree r")
    if len(eqs) != sym_dim(n, r):
        raise AssertionError("equation count does not match sym_dim")
    return SpectralCover(s, xenv, monos, eqs)


def _check_on_cover(cover: SpectralCover, x: tuple, cycle: ZeroCycle, tol: float) -> float:
    xenv = cover.env
    zassign = dict(zip(xenv.zvars, x))
    worst = 0.0
    for eq in cover.equations:
        ex = eq.evaluate(zassign)
        for vec, _ in cycle.entries:
            if cycle.exact:
                val = ex.value(dict(zip(xenv.xivars, vec)))
                if not val.is_zero():
                    raise AssertionError(f"fibre point violates {eq.to_text()}")
            else:
                acc = 0j
                scale = 0.0
                for e, c in ex.terms.items():
                    term = complex(c)
                    for j, i in enumerate(xenv.xi_idx):
                        if e[i]:
                            term *= vec[j] ** e[i]
                    acc += term
                    scale = max(scale, abs(term))
                rel = abs(acc) / max(scale, 1.0)
                worst = max(worst, rel)
    if worst > tol:
        raise AssertionError(f"fibre point residual {worst:.3e} exceeds tolerance")
    return worst


def fibre(s: SpectralDatum, x: Sequence, config: Config | None = None) -> ZeroCycle:
    """Witness cycle over ``x``, re-validated against the cover's equations."""
    cfg = config or Config()
    x = tuple(as_scalar(c) for c in x)
    v = membership_at_point(s, x, cfg)
    if isinstance(v, Reject):
        raise MembershipRejected(v)
    _check_on_cover(defining_equations(s), x, v.cycle, cfg.tol)
    return v.cycle


@dataclass(frozen=True)
class DirectionalDiscriminant:
    poly: MultiPoly  # in the z-block
    direction: tuple

    def ramified_at(self, x: Sequence) -> bool:
        return self.poly.value(dict(zip(self.poly.env.zvars, x))).is_zero()

    def to_json(self) -> dict:
        return {"discriminant": self.poly.to_text(), "direction": [c.to_text() for c in self.direction]}


def _reduced(dec: "CoverDecomposition") -> MultiPoly:
    red = MultiPoly.const(dec.datum.env, 1)
    for c in dec.components:
        red = red * c.poly
    return red


def discriminant_direction(s: SpectralDatum, direction: Sequence | None = None,
                           config: Config | None = None) -> DirectionalDiscriminant:
    """Lambda-discriminant of the square-free part specialized at a u-direction.

    The given direction (default all ones) is tried first; if the
    specialization stops being square-free, fresh random directions are
    drawn (``config.retries``).
    """
    cfg = config or Config()
    return discriminant_of_poly(_reduced(decompose(s, config=cfg)), direction, cfg)


def discriminant_of_poly(red: MultiPoly, direction: Sequence | None, cfg: Config) -> DirectionalDiscriminant:
    env = red.env
    n = len(env.uvars)
    rng = cfg.rng("discriminant", red.to_text())
    tried = []
    candidates = []
    if direction is not None:
        candidates.append(tuple(as_scalar(c) for c in direction))
    else:
        candidates.append(tuple(as_scalar(1) for _ in range(n)))
    for _ in range(cfg.retries):
        candidates.append(random_int_vector(rng, n, cfg.height, nonzero=True))
    for u0 in candidates:
        spec = red.evaluate(dict(zip(env.uvars, u0)))
        disc = discriminant(spec, env.lam_idx)
        if not disc.is_zero():
            return DirectionalDiscriminant(disc, u0)
        tried.append([c.to_text() for c in u0])
    raise DegenerateDirection(f"every direction degenerate: {tried}")


@dataclass(frozen=True)
class CoverComponent:
    poly: MultiPoly  # monic in lam
    degree: int
    multiplicity: int
    split: bool
    covector: tuple | None = None  # z-coefficients when split

    def to_json(self) -> dict:
        d = {
            "poly": self.poly.to_text(),
            "degree": self.degree,
            "multiplicity": self.multiplicity,
            "split": self.split,
        }
        if self.covector is not None:
            d["covector"] = [c.to_text() for c in self.covector]
        return d


@dataclass(frozen=True)
class CoverDecomposition:
    datum: SpectralDatum
    components: tuple[CoverComponent, ...]

    @property
    def residual(self) -> bool:
        """True when some component was left unsplit."""
        return any(not c.split for c in self.components)

    def product(self) -> MultiPoly:
        env = self.datum.env
        acc = MultiPoly.const(env, 1)
        for c in self.components:
            acc = acc * c.poly ** c.multiplicity
        return acc

    def to_json(self) -> dict:
        return {
            "components": [c.to_json() for c in self.components],
            "multiplicities": [c.multiplicity for c in self.components],
            "residual": self.residual,
        }


def decompose(s: SpectralDatum, D: int | None = None, config: Config | None = None) -> CoverDecomposition:
    """u-linear components with their multiplicities; whatever does not
    split is kept whole, one component per square-free layer."""
    cfg = config or Config()
    if D is None:
        D = cfg.degree_bound if cfg.degree_bound is not None else s.z_degree()
    P = s.char_poly()
    env = s.env
    lam = MultiPoly.var(env, env.lam)
    factors, rest = cover_layers(P, D, cfg)
    comps = [CoverComponent(lam - rho, 1, m, True, covector_of(rho)) for rho, m in factors]
    comps.extend(CoverComponent(F, F.degree_in(env.lam_idx), m, False) for F, m in rest)
    comps.sort(key=lambda c: (-c.multiplicity, not c.split, c.degree, c.poly.to_text()))
    out = CoverDecomposition(s, tuple(comps))
    if out.product() != P:
        raise AssertionError("decomposition does not reassemble the characteristic polynomial")
    if sum(c.multiplicity * c.degree for c in comps) != s.r:
        raise AssertionError("degree bookkeeping failed")
    return out


@dataclass(frozen=True)
class ConstancyReport:
    component: int
    multiplicity: int
    checked: tuple
    skipped: tuple
    deviations: tuple

    @property
    def ok(self) -> bool:
        return not self.deviations

    def to_json(self) -> dict:
        fmt = lambda pts: [[c.to_text() for c in p] for p in pts]  # noqa: E731
        return {
            "component": self.component,
            "multiplicity": self.multiplicity,
            "checked": fmt(self.checked),
            "skipped_on_discriminant": fmt(self.skipped),
            "deviations": [{"point": [c.to_text() for c in p], "observed": k} for p, k in self.deviations],
            "ok": self.ok,
        }


def multiplicity_constancy_check(s: SpectralDatum, k: int, points: Sequence[Sequence],
                                 config: Config | None = None,
                                 decomposition: CoverDecomposition | None = None) -> ConstancyReport:
    """At each point, the root of split component ``k`` (0-based) should be a
    root of the full characteristic polynomial of multiplicity m(k)."""
    cfg = config or Config()
    dec = decomposition or decompose(s, config=cfg)
    comp = dec.components[k]
    if not comp.split:
        raise ValueError(f"component {k} is not split")
    env = s.env
    disc = discriminant_of_poly(_reduced(dec), None, cfg)
    P = s.char_poly()
    checked, skipped, dev = [], [], []
    for x in points:
        x = tuple(as_scalar(c) for c in x)
        if disc.ramified_at(x):
            skipped.append(x)
            continue
        assign = dict(zip(env.zvars, x))
        Q = P.evaluate(assign)
        factor = comp.poly.evaluate(assign)
        mult = 0
        while True:
            q, r = Q.divmod(factor)
            if not r.is_zero():
                break
            Q = q
            mult += 1
        checked.append(x)
        if mult != comp.multiplicity:
            dev.append((x, mult))
    return ConstancyReport(k, comp.multiplicity, tuple(checked), tuple(skipped), tuple(dev))
