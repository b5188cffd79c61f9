"""Spectral data, pointwise Chow membership with witnesses, exact splitting,
rank embedding, and the common-zero-locus check for a family of covectors.

Conventions: the characteristic polynomial of a datum ``s = (s_1..s_r)`` is
``lam^r - s_1 lam^(r-1) + ... + (-1)^r s_r`` and a witness cycle
``[w_1..w_r]`` satisfies ``s_i(x) = e_i(w_1..w_r)`` (plain elementary
symmetric functions, no sign twist).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from .config import Config, random_int_vector
from .polyalg import (
    Env,
    MultiPoly,
    Scalar,
    SymTensor,
    as_scalar,
    discriminant,
    elementary_symmetric,
    squarefree_decomposition,
)
from .polyalg.linalg import nullspace
from .polyalg.roots import exact_roots, upoly_derivative, upoly_gcd, upoly_squarefree

__all__ = [
    "SpectralDatum",
    "ZeroCycle",
    "MultiValuedForm",
    "AcceptExact",
    "AcceptNumeric",
    "Reject",
    "MemberExact",
    "LikelyMember",
    "NonMember",
    "SamplerExhausted",
    "membership_at_point",
    "membership_global",
    "split_exact",
    "linear_roots",
    "linear_factors",
    "cover_layers",
    "embed_lower_rank",
    "common_zero_locus",
    "fibre_layers",
]


class SamplerExhausted(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralDatum:
    """``components[i]`` is s_{i+1}, a SymTensor of degree i+1."""

    components: tuple[SymTensor, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a spectral datum needs rank >= 1")
        env = comps[0].env
        for k, s in enumerate(comps):
            if s.degree != k + 1:
                raise ValueError(f"s[{k + 1}] has degree {s.degree}")
            if s.env != env:
                raise ValueError("components live over different environments")

    @classmethod
    def from_polys(cls, env: Env, polys: Sequence) -> "SpectralDatum":
        out = []
        for k, p in enumerate(polys):
            if not isinstance(p, MultiPoly):
                p = MultiPoly.const(env, p)
            out.append(SymTensor(k + 1, p))
        return cls(tuple(out))

    @classmethod
    def zero(cls, env: Env, r: int) -> "SpectralDatum":
        return cls(tuple(SymTensor.zero(env, k) for k in range(1, r + 1)))

    @property
    def env(self) -> Env:
        return self.components[0].env

    @property
    def r(self) -> int:
        return len(self.components)

    @property
    def n(self) -> int:
        return len(self.env.uvars)

    def __getitem__(self, i: int) -> SymTensor:
        """1-based access: ``s[1]`` is the trace-like component."""
        return self.components[i - 1]

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.components)

    def char_poly(self) -> MultiPoly:
        env = self.env
        lam = MultiPoly.var(env, env.lam)
        r = self.r
        acc = lam ** r
        for i, s in enumerate(self.components, start=1):
            term = s.body * lam ** (r - i)
            acc = acc - term if i % 2 else acc + term
        return acc

    @classmethod
    def from_char_poly(cls, P: MultiPoly) -> "SpectralDatum":
        env = P.env
        coeffs = P.coeff_list(env.lam_idx)
        r = len(coeffs) - 1
        if r < 1 or coeffs[r] != 1:
            raise ValueError("characteristic polynomial must be monic of degree >= 1")
        polys = []
        for i in range(1, r + 1):
            c = coeffs[r - i]
            polys.append(c if i % 2 == 0 else -c)
        return cls.from_polys(env, polys)

    def at(self, point: Sequence) -> "SpectralDatum":
        return SpectralDatum(tuple(s.at(point) for s in self.components))

    def z_degree(self) -> int:
        zi = self.env.z_idx
        degs = [d for s in self.components for d in s.body.block_degrees(zi)]
        return max(degs) if degs else 0

    def to_text(self) -> list[str]:
        return [s.to_text() for s in self.components]


def _vec_key(v):
    return tuple((c.real, c.imag) if isinstance(c, Scalar) else (c.real, c.imag) for c in v)


@dataclass(frozen=True)
class ZeroCycle:
    """Multiset of covectors with multiplicities.

    Exact cycles hold Scalar tuples, numeric ones complex tuples.  Entries
    are kept sorted so equal cycles compare equal.
    """

    entries: tuple[tuple[tuple, int], ...]
    exact: bool = True

    def __post_init__(self):
        merged: dict = {}
        order = []
        for vec, m in self.entries:
            vec = tuple(vec)
            if m < 1:
                raise ValueError("multiplicities must be positive")
            if self.exact:
                vec = tuple(as_scalar(c) for c in vec)
                if vec in merged:
                    merged[vec] += m
                    continue
            merged.setdefault(vec, 0)
            merged[vec] += m
            order.append(vec)
        ents = tuple(sorted(merged.items(), key=lambda t: _vec_key(t[0])))
        object.__setattr__(self, "entries", ents)

    @property
    def r(self) -> int:
        return sum(m for _, m in self.entries)

    def flatten(self) -> list[tuple]:
        out = []
        for v, m in self.entries:
            out.extend([v] * m)
        return out

    def as_dict(self) -> dict:
        return dict(self.entries)

    def sigma(self, env: Env) -> list[MultiPoly]:
        """Elementary symmetric functions of the covectors as u-forms (exact only)."""
        if not self.exact:
            raise ValueError("sigma() needs an exact cycle")
        forms = [_linear_form(env, v) for v in self.flatten()]
        return elementary_symmetric(forms, env)[1:]

    def to_json(self) -> list:
        out = []
        for v, m in self.entries:
            if self.exact:
                out.append({"covector": [c.to_text() for c in v], "multiplicity": m})
            else:
                out.append({"covector": [_ctext(c) for c in v], "multiplicity": m})
        return out


def _ctext(c: complex) -> list[float]:
    return [float(f"{c.real:.15g}"), float(f"{c.imag:.15g}")]


def _linear_form(env: Env, coeffs: Sequence) -> MultiPoly:
    acc = MultiPoly.zero(env)
    for name, c in zip(env.uvars, coeffs):
        if isinstance(c, MultiPoly):
            acc = acc + c * MultiPoly.var(env, name)
        else:
            acc = acc + MultiPoly.var(env, name).scale(c)
    return acc


@dataclass(frozen=True)
class MultiValuedForm:
    """Globally split multivalued 1-form: distinct linear covector fields
    with polynomial z-coefficients, each with a multiplicity."""

    components: tuple[tuple[tuple[MultiPoly, ...], int], ...]
    env: Env = field(compare=False)

    def __post_init__(self):
        merged: dict = {}
        for vec, m in self.components:
            vec = tuple(vec)
            merged[vec] = merged.get(vec, 0) + m
        comps = tuple(sorted(merged.items(), key=lambda t: _linear_form(self.env, t[0]).to_text()))
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_linear_forms(cls, env: Env, forms: Sequence[tuple[MultiPoly, int]]) -> "MultiValuedForm":
        comps = []
        for form, m in forms:
            comps.append((covector_of(form), m))
        return cls(tuple(comps), env)

    @property
    def r(self) -> int:
        return sum(m for _, m in self.components)

    def linear_forms(self) -> list[tuple[MultiPoly, int]]:
        return [(_linear_form(self.env, vec), m) for vec, m in self.components]

    def char_poly(self) -> MultiPoly:
        env = self.env
        lam = MultiPoly.var(env, env.lam)
        acc = MultiPoly.const(env, 1)
        for form, m in self.linear_forms():
            acc = acc * (lam - form) ** m
        return acc

    def datum(self) -> SpectralDatum:
        forms = []
        for form, m in self.linear_forms():
            forms.extend([form] * m)
        e = elementary_symmetric(forms, self.env)
        return SpectralDatum.from_polys(self.env, e[1:])

    def at(self, point: Sequence) -> ZeroCycle:
        assign = dict(zip(self.env.zvars, point))
        entries = []
        for vec, m in self.components:
            entries.append((tuple(c.value(assign) for c in vec), m))
        return ZeroCycle(tuple(entries), exact=True)

    def to_json(self) -> list:
        return [
            {"covector": [c.to_text() for c in vec], "multiplicity": m}
            for vec, m in self.components
        ]


def covector_of(form: MultiPoly) -> tuple[MultiPoly, ...]:
    """z-coefficients of a u-linear form."""
    env = form.env
    out = []
    for ui in env.u_idx:
        acc = {}
        for e, c in form.terms.items():
            if e[ui] == 1:
                acc[e[:ui] + (0,) + e[ui + 1:]] = c
        out.append(MultiPoly(env, acc))
    return tuple(out)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AcceptExact:
    cycle: ZeroCycle
    verdict = "AcceptExact"


@dataclass(frozen=True)
class AcceptNumeric:
    cycle: ZeroCycle
    residual: float
    verdict = "AcceptNumeric"


@dataclass(frozen=True)
class Reject:
    """``exact`` marks a proof; otherwise the rejection is tolerance-relative."""

    certificate: dict
    exact: bool
    verdict = "Reject"


@dataclass(frozen=True)
class MemberExact:
    form: MultiValuedForm | None
    reason: str
    samples: tuple = ()
    verdict = "MemberExact"


@dataclass(frozen=True)
class LikelyMember:
    samples: tuple
    verdict = "LikelyMember"


@dataclass(frozen=True)
class NonMember:
    point: tuple
    certificate: dict
    exact: bool
    verdict = "NonMember"


# ---------------------------------------------------------------------------
# pointwise membership
# ---------------------------------------------------------------------------


def _univariate_at(F: MultiPoly, u0: Sequence[Scalar]) -> list[Scalar]:
    """Coefficients in lam of F(lam, u0) for F free of z."""
    env = F.env
    li = env.lam_idx
    d = F.degree_in(li)
    out = [Scalar(0)] * (d + 1)
    uidx = list(env.u_idx)
    for e, c in F.terms.items():
        v = c
        for j, i in enumerate(uidx):
            if e[i]:
                v = v * u0[j] ** e[i]
        out[e[li]] = out[e[li]] + v
    return out


def _is_squarefree(f: list) -> bool:
    return len(upoly_gcd(f, upoly_derivative(f))) <= 1


def fibre_layers(Q: MultiPoly, rng) -> list[tuple[MultiPoly, int]]:
    """Square-free layers of a z-free characteristic polynomial.

    A square-free specialization at one random direction certifies that Q
    itself is square-free, which skips the gcd chain in the generic case.
    """
    env = Q.env
    n = len(env.uvars)
    u0 = random_int_vector(rng, n, 64, nonzero=True)
    if Q.degree_in(env.lam_idx) <= 1 or _is_squarefree(_univariate_at(Q, u0)):
        return [(Q, 1)]
    return squarefree_decomposition(Q)


def _mp(c) -> mpmath.mpc:
    if isinstance(c, Scalar):
        return mpmath.mpc(mpmath.mpf(c.real.numerator) / c.real.denominator,
                          mpmath.mpf(c.imag.numerator) / c.imag.denominator)
    return mpmath.mpc(c)


def _eval_at(p: MultiPoly, values: dict[int, object], exact: bool):
    """Evaluate p with every present variable assigned by index."""
    acc = Scalar(0) if exact else mpmath.mpc(0)
    for e, c in p.terms.items():
        v = c if exact else _mp(c)
        for i, k in enumerate(e):
            if k:
                v = v * values[i] ** k
        acc = acc + v
    return acc


def _expand_numeric(env: Env, forms: list[tuple[list[complex], int]]) -> dict:
    """Coefficients of prod (lam - w.u)^m with complex arithmetic."""
    li = env.lam_idx
    uidx = list(env.u_idx)
    base = [0] * env.nvars
    acc = {tuple(base): 1 + 0j}
    for vec, m in forms:
        lin = {}
        e = list(base)
        e[li] = 1
        lin[tuple(e)] = 1 + 0j
        for j, i in enumerate(uidx):
            if vec[j] != 0:
                e = list(base)
                e[i] = 1
                lin[tuple(e)] = -complex(vec[j])
        for _ in range(m):
            new: dict = {}
            for e1, c1 in acc.items():
                for e2, c2 in lin.items():
                    ee = tuple(a + b for a, b in zip(e1, e2))
                    new[ee] = new.get(ee, 0) + c1 * c2
            acc = new
    return acc


def _relative_residual(F: MultiPoly, expanded: dict) -> float:
    scale = max([abs(complex(c)) for c in F.terms.values()] + [1e-300])
    keys = set(F.terms) | set(expanded)
    worst = 0.0
    for e in keys:
        a = complex(F.terms[e]) if e in F.terms else 0j
        b = expanded.get(e, 0j)
        worst = max(worst, abs(a - b))
    return worst / scale


def _structural_obstruction(F: MultiPoly, cfg: Config, rng) -> dict | None:
    """Look for a line in u-space along which the lam-discriminant of F has a
    root of odd multiplicity.  A u-linear splitting makes that discriminant
    a constant times a product of squares of affine functions, so such a
    line proves F does not split."""
    env = F.env
    n = len(env.uvars)
    tenv = Env(("t",), (), (), env.lam)
    t = MultiPoly.var(tenv, "t")
    lam_t = MultiPoly.var(tenv, env.lam)
    for _ in range(max(2, cfg.retries // 2)):
        base = random_int_vector(rng, n, cfg.height, nonzero=True)
        direc = random_int_vector(rng, n, cfg.height, nonzero=True)
        mapping = {name: t.scale(direc[j]) + base[j] for j, name in enumerate(env.uvars)}
        mapping[env.lam] = lam_t
        G = F.substitute(mapping, tenv)
        D = discriminant(G, env.lam)
        if D.is_zero() or D.is_constant():
            continue
        coeffs = [c.constant_value() for c in D.coeff_list(0)]
        for factor, mult in upoly_squarefree(coeffs):
            if mult % 2 == 1:
                fpoly = MultiPoly.from_coeff_list(
                    tenv, 0, [MultiPoly.const(tenv, c) for c in factor]
                )
                return {
                    "kind": "structural",
                    "line_base": [c.to_text() for c in base],
                    "line_direction": [c.to_text() for c in direc],
                    "discriminant": D.to_text(),
                    "odd_factor": fpoly.to_text(),
                    "odd_multiplicity": mult,
                }
    return None


def _split_layer(F: MultiPoly, cfg: Config, rng):
    """Split one square-free, z-free, (lam,u)-homogeneous factor into u-linear
    factors.  Returns ("exact", [vec]), ("numeric", [vec], residual) or
    ("reject", certificate, exact_flag)."""
    env = F.env
    li = env.lam_idx
    n = len(env.uvars)
    d = F.degree_in(li)
    lam = MultiPoly.var(env, env.lam)
    if d == 1:
        rho = lam - F
        return "exact", [tuple(c.constant_value() for c in covector_of(rho))]
    dF_lam = F.diff(li)
    dF_u = [F.diff(i) for i in env.u_idx]
    uidx = list(env.u_idx)
    best = math.inf
    structural_done = False
    attempts = 0
    for _ in range(cfg.retries):
        u0 = random_int_vector(rng, n, cfg.height, nonzero=True)
        f = _univariate_at(F, u0)
        if not _is_squarefree(f):
            continue
        attempts += 1
        roots, _rest = exact_roots(f, cfg.rat_tol)
        if len(roots) == d:
            vecs = []
            for rho in roots:
                vals = {li: rho}
                vals.update({i: u0[j] for j, i in enumerate(uidx)})
                den = _eval_at(dF_lam, vals, True)
                vecs.append(tuple(-_eval_at(g, vals, True) / den for g in dF_u))
            prod = MultiPoly.const(env, 1)
            for v in vecs:
                prod = prod * (lam - _linear_form(env, v))
            if prod == F:
                return "exact", vecs
            return "reject", {
                "kind": "rational-reexpansion",
                "direction": [c.to_text() for c in u0],
                "roots": [c.to_text() for c in roots],
                "factor": F.to_text(),
            }, True
        with mpmath.workdps(60):
            mroots = mpmath.polyroots([_mp(c) for c in reversed(f)], maxsteps=200, extraprec=200)
            vecs_c = []
            for rho in mroots:
                vals = {li: rho}
                vals.update({i: _mp(u0[j]) for j, i in enumerate(uidx)})
                den = _eval_at(dF_lam, vals, False)
                vecs_c.append([complex(-_eval_at(g, vals, False) / den) for g in dF_u])
        res = _relative_residual(F, _expand_numeric(env, [(v, 1) for v in vecs_c]))
        if res <= cfg.tol:
            return "numeric", [tuple(v) for v in vecs_c], res
        best = min(best, res)
        if not structural_done:
            structural_done = True
            cert = _structural_obstruction(F, cfg, rng)
            if cert is not None:
                cert["factor"] = F.to_text()
                return "reject", cert, True
    return "reject", {
        "kind": "residual-floor",
        "best_residual": best if math.isfinite(best) else None,
        "tol": cfg.tol,
        "attempts": attempts,
        "factor": F.to_text(),
    }, False


def _point_key(point) -> tuple:
    return tuple(as_scalar(c).to_text() for c in point)


def membership_at_point(s: SpectralDatum, x: Sequence, config: Config | None = None):
    """Decide whether ``s(x)`` is the sigma-image of r covectors.

    Returns :class:`AcceptExact`, :class:`AcceptNumeric` or :class:`Reject`.
    Every accept is re-expanded against ``s(x)`` before it is returned.
    """
    cfg = config or Config()
    x = tuple(as_scalar(c) for c in x)
    if len(x) != s.n:
        raise ValueError(f"point has {len(x)} coordinates, chart has {s.n}")
    rng = cfg.rng("membership", _point_key(x))
    env = s.env
    Q = s.char_poly().evaluate(dict(zip(env.zvars, x)))
    layers = fibre_layers(Q, rng)
    exact_entries = []
    numeric_entries = []
    all_exact = True
    for F, m in layers:
        out = _split_layer(F, cfg, rng)
        if out[0] == "reject":
            cert = dict(out[1])
            cert["point"] = list(_point_key(x))
            cert["layer_multiplicity"] = m
            return Reject(cert, out[2])
        if out[0] == "exact":
            for v in out[1]:
                exact_entries.append((v, m))
                numeric_entries.append(([complex(c) for c in v], m))
        else:
            all_exact = False
            for v in out[1]:
                numeric_entries.append((list(v), m))
    if all_exact:
        cycle = ZeroCycle(tuple(exact_entries), exact=True)
        lam = MultiPoly.var(env, env.lam)
        check = MultiPoly.const(env, 1)
        for v, m in cycle.entries:
            check = check * (lam - _linear_form(env, v)) ** m
        if check != Q:
            raise AssertionError("exact witness failed re-expansion")
        return AcceptExact(cycle)
    residual = _relative_residual(Q, _expand_numeric(env, numeric_entries))
    cycle = ZeroCycle(tuple((tuple(v), m) for v, m in numeric_entries), exact=False)
    if residual > cfg.tol:
        return Reject({
            "kind": "residual-floor",
            "best_residual": residual,
            "tol": cfg.tol,
            "point": list(_point_key(x)),
        }, False)
    return AcceptNumeric(cycle, residual)


# ---------------------------------------------------------------------------
# exact splitting over the function field (Hensel lifting)
# ---------------------------------------------------------------------------


def _translate_truncated(F: MultiPoly, shift: dict[int, Scalar], N: int, keep: int) -> MultiPoly:
    """F(x + a) truncated to total degree <= N in the shifted variables.

    Variable ``keep`` (lam) is not shifted and does not count toward degree.
    """
    env = F.env
    acc: dict = {}
    for e, c in F.terms.items():
        parts = [((), c, 0)]
        for i, k in enumerate(e):
            if i == keep or i not in shift or k == 0:
                parts = [(pe + (k,), pc, pd) for pe, pc, pd in parts]
                continue
            a = shift[i]
            new = []
            for pe, pc, pd in parts:
                for j in range(0, min(k, N - pd) + 1):
                    coef = pc * math.comb(k, j)
                    if k - j:
                        if a.is_zero():
                            continue
                        coef = coef * a ** (k - j)
                    new.append((pe + (j,), coef, pd + j))
            parts = new
        for pe, pc, _ in parts:
            old = acc.get(pe)
            v = pc if old is None else old + pc
            if v.is_zero():
                acc.pop(pe, None)
            else:
                acc[pe] = v
    return MultiPoly(env, acc)


def _truncate(p: MultiPoly, N: int, keep: int) -> MultiPoly:
    return MultiPoly(p.env, {e: c for e, c in p.terms.items() if sum(e) - e[keep] <= N})


def _homogeneous_part(p: MultiPoly, deg: int, keep: int) -> MultiPoly:
    return MultiPoly(p.env, {e: c for e, c in p.terms.items() if sum(e) - e[keep] == deg})


def _lift_root(G: MultiPoly, rho0: Scalar, N: int) -> MultiPoly:
    """Power-series root of G(lam, y) through (rho0, 0), to total degree N."""
    env = G.env
    li = env.lam_idx
    coeffs = G.coeff_list(li)
    g1 = Scalar(0)
    for k in range(1, len(coeffs)):
        c0 = coeffs[k].terms.get((0,) * env.nvars)
        if c0 is not None:
            g1 = g1 + c0 * k * rho0 ** (k - 1)
    inv = g1.inverse()
    rho = MultiPoly.const(env, rho0)
    for deg in range(1, N + 1):
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = _truncate(acc * rho, deg, li) + _truncate(c, deg, li)
        rho = rho - _homogeneous_part(acc, deg, li).scale(inv)
    return rho


def _horner_lam(F: MultiPoly, rho: MultiPoly) -> MultiPoly:
    coeffs = F.coeff_list(F.env.lam_idx)
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * rho + c
    return acc


def _deflate(P: MultiPoly, rho: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Synthetic division of P by (lam - rho): quotient and remainder."""
    env = P.env
    li = env.lam_idx
    coeffs = P.coeff_list(li)
    lam = MultiPoly.var(env, env.lam)
    b = coeffs[-1]
    out = [b]
    for c in reversed(coeffs[1:-1]):
        b = c + rho * b
        out.append(b)
    rem = coeffs[0] + rho * b if len(coeffs) > 1 else coeffs[0]
    q = MultiPoly.zero(env)
    for c in out:
        q = q * lam + c
    return q, rem


def _base_point(P: MultiPoly, cfg: Config, rng):
    """Random (z0, u0) maximizing the number of distinct roots of P there;
    two draws guard against an accidental collision of roots."""
    env = P.env
    best = None
    for _ in range(2):
        z0 = random_int_vector(rng, len(env.zvars), cfg.height)
        u0 = random_int_vector(rng, len(env.uvars), cfg.height, nonzero=True)
        f = _univariate_at(P.evaluate(dict(zip(env.zvars, z0))), u0)
        layers = upoly_squarefree(f)
        distinct = sum(len(g) - 1 for g, _ in layers)
        if best is None or distinct > best[0]:
            best = (distinct, z0, u0, layers)
    return best[1:]


def linear_factors(P: MultiPoly, D: int, config: Config | None = None):
    """Factors ``(lam - rho)^m`` of P (monic in lam) with rho a u-linear form
    whose z-coefficients have degree <= D and lie in Q(i).

    Returns ``(factors, quotient)`` where ``factors`` lists ``(rho, m)`` with
    exact multiplicities and ``P == prod (lam - rho)^m * quotient``.

    A root of multiplicity m at a random base point is a simple root of the
    (m-1)-th lam-derivative; it is Hensel-lifted there and kept only if the
    lift divides P exactly.
    """
    cfg = config or Config()
    env = P.env
    li = env.lam_idx
    if P.degree_in(li) == 0:
        return [], P
    rng = cfg.rng("lift", P.to_text())
    z0, u0, layers = _base_point(P, cfg, rng)
    zidx, uidx = list(env.z_idx), list(env.u_idx)
    shift = {i: z0[j] for j, i in enumerate(zidx)}
    shift.update({i: u0[j] for j, i in enumerate(uidx)})
    back = {env.names[i]: MultiPoly.var(env, env.names[i]) - a for i, a in shift.items()}
    candidates = []
    for g, m in layers:
        roots, _ = exact_roots(g, cfg.rat_tol)
        if not roots:
            continue
        G = P
        for _ in range(m - 1):
            G = G.diff(li)
        Gt = _translate_truncated(G, shift, D + 1, li)
        for rho0 in roots:
            rho = _lift_root(Gt, rho0, D + 1).substitute(back)
            if _is_linear_form(rho, D):
                candidates.append(rho)
    factors = []
    Q = P
    for rho in candidates:
        m = 0
        while Q.degree_in(li) > 0:
            q, rem = _deflate(Q, rho)
            if not rem.is_zero():
                break
            Q, m = q, m + 1
        if m:
            factors.append((rho, m))
    return factors, Q


def linear_roots(F: MultiPoly, D: int, config: Config | None = None) -> list[MultiPoly]:
    """Distinct u-linear roots of F (see :func:`linear_factors`)."""
    return [rho for rho, _ in linear_factors(F, D, config)[0]]


def cover_layers(P: MultiPoly, D: int, config: Config | None = None):
    """u-linear factors with multiplicities, plus the square-free layers of
    what is left over."""
    factors, Q = linear_factors(P, D, config)
    rest = squarefree_decomposition(Q) if Q.degree_in(Q.env.lam_idx) > 0 else []
    return factors, rest


def _is_linear_form(rho: MultiPoly, D: int) -> bool:
    env = rho.env
    ui, zi = list(env.u_idx), list(env.z_idx)
    for e in rho.terms:
        if sum(e[i] for i in ui) != 1:
            return False
        if sum(e[i] for i in zi) > D:
            return False
        if env.xivars and any(e[i] for i in env.xi_idx):
            return False
        if e[env.lam_idx]:
            return False
    return True


def split_exact(s: SpectralDatum, D: int | None = None, config: Config | None = None) -> MultiValuedForm | None:
    """Factor the characteristic polynomial into u-linear factors with
    polynomial coefficients of z-degree <= D, or return None.

    A returned form has been checked by exact re-expansion.
    """
    cfg = config or Config()
    if D is None:
        D = cfg.degree_bound if cfg.degree_bound is not None else s.z_degree()
    P = s.char_poly()
    comps, Q = linear_factors(P, D, cfg)
    if Q.degree_in(P.env.lam_idx) > 0:
        return None
    form = MultiValuedForm.from_linear_forms(s.env, comps)
    if form.char_poly() != P:
        return None
    return form


# ---------------------------------------------------------------------------
# global membership
# ---------------------------------------------------------------------------


def _reduced_disc(s: SpectralDatum, cfg: Config, rng) -> MultiPoly:
    """Discriminant in lam of the square-free part, along a random direction."""
    env = s.env
    D = cfg.degree_bound if cfg.degree_bound is not None else s.z_degree()
    factors, rest = cover_layers(s.char_poly(), D, cfg)
    lam = MultiPoly.var(env, env.lam)
    red = MultiPoly.const(env, 1)
    for rho, _ in factors:
        red = red * (lam - rho)
    for F, _ in rest:
        red = red * F
    for _ in range(cfg.retries):
        u0 = random_int_vector(rng, s.n, cfg.height, nonzero=True)
        spec = red.evaluate(dict(zip(env.uvars, u0)))
        disc = discriminant(spec, env.lam_idx)
        if not disc.is_zero():
            return disc
    raise SamplerExhausted("every direction made the reduced cover look ramified")


def membership_global(s: SpectralDatum, config: Config | None = None):
    """MemberExact (a proof), NonMember (a point that rejects) or LikelyMember."""
    cfg = config or Config()
    D = cfg.degree_bound if cfg.degree_bound is not None else s.z_degree()
    form = split_exact(s, D, cfg)
    if form is not None:
        return MemberExact(form, "split")
    rng = cfg.rng("global")
    env = s.env
    disc = _reduced_disc(s, cfg, rng)
    samples = []
    for k in range(cfg.samples):
        for _ in range(cfg.retries * 4):
            x = random_int_vector(rng, s.n, cfg.height)
            if not disc.value(dict(zip(env.zvars, x))).is_zero():
                break
        else:
            raise SamplerExhausted(f"no unramified point found for sample {k}")
        v = membership_at_point(s, x, cfg.with_(seed=cfg.seed * 1000003 + k))
        if isinstance(v, Reject) and s.n > 1:
            return NonMember(tuple(x), v.certificate, v.exact)
        samples.append((tuple(x), v))
    if s.n == 1:
        return MemberExact(None, "curve", tuple(samples))
    return LikelyMember(tuple(samples))


# ---------------------------------------------------------------------------
# rank embedding
# ---------------------------------------------------------------------------


def embed_lower_rank(s: SpectralDatum, r: int) -> SpectralDatum:
    """(s_1..s_r') -> (s_1..s_r', 0..0) in rank r."""
    if r < s.r:
        raise ValueError(f"cannot embed rank {s.r} into smaller rank {r}")
    extra = tuple(SymTensor.zero(s.env, k) for k in range(s.r + 1, r + 1))
    return SpectralDatum(s.components + extra)


def embed_cycle(cycle: ZeroCycle, r: int) -> ZeroCycle:
    """Append the zero covector with multiplicity r - r'."""
    if r < cycle.r:
        raise ValueError("target rank below cycle length")
    if r == cycle.r:
        return cycle
    n = len(cycle.entries[0][0]) if cycle.entries else 0
    zero = tuple(Scalar(0) for _ in range(n)) if cycle.exact else tuple(0j for _ in range(n))
    return ZeroCycle(cycle.entries + ((zero, r - cycle.r),), cycle.exact)


# ---------------------------------------------------------------------------
# common zero locus of covectors vs. their elementary symmetric functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroLocusReport:
    dim: int
    functionals: tuple
    kernel: tuple
    polynomials: tuple
    forward_ok: bool
    reverse_samples: int
    reverse_falsified: tuple

    @property
    def ok(self) -> bool:
        return self.forward_ok and not self.reverse_falsified

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "functionals": [[c.to_text() for c in L] for L in self.functionals],
            "kernel_basis": [[c.to_text() for c in v] for v in self.kernel],
            "polynomials": [p.to_text() for p in self.polynomials],
            "forward_inclusion": self.forward_ok,
            "reverse_samples": self.reverse_samples,
            "reverse_falsifications": [[c.to_text() for c in v] for v in self.reverse_falsified],
            "ok": self.ok,
        }


def common_zero_locus(L: Sequence[Sequence], dim: int | None = None, *, samples: int = 50,
                      config: Config | None = None) -> ZeroLocusReport:
    """Kernel of the stacked covectors and a check that it is also the common
    zero set of their elementary symmetric polynomials.

    Forward inclusion (kernel inside the zero set) is checked exactly on the
    kernel basis; the reverse inclusion is sampled at random integer vectors
    outside the kernel.
    """
    cfg = config or Config()
    L = [tuple(as_scalar(c) for c in row) for row in L]
    if dim is None:
        if not L:
            raise ValueError("dimension needed when there are no functionals")
        dim = len(L[0])
    if any(len(row) != dim for row in L):
        raise ValueError("functionals have inconsistent length")
    env = Env(tuple(f"v{j}" for j in range(1, dim + 1)), (), (), None)
    vs = [MultiPoly.var(env, name) for name in env.zvars]
    forms = []
    for row in L:
        acc = MultiPoly.zero(env)
        for c, v in zip(row, vs):
            acc = acc + v.scale(c)
        forms.append(acc)
    P = elementary_symmetric(forms, env)[1:] if forms else []
    kernel = nullspace([list(row) for row in L], dim) if L else nullspace([], dim)
    forward = all(
        p.value(dict(zip(env.zvars, v))).is_zero() for v in kernel for p in P
    )
    rng = cfg.rng("lemma", tuple(tuple(c.to_text() for c in row) for row in L))
    falsified = []
    tested = 0
    # an all-zero family has the whole space as kernel: nothing to sample
    while tested < samples and len(kernel) < dim:
        v = random_int_vector(rng, dim, cfg.height)
        vals = [sum((a * b for a, b in zip(row, v)), Scalar(0)) for row in L]
        if all(x.is_zero() for x in vals):
            continue
        tested += 1
        assign = dict(zip(env.zvars, v))
        if all(p.value(assign).is_zero() for p in P):
            falsified.append(v)
    return ZeroLocusReport(dim, tuple(L), tuple(tuple(v) for v in kernel), tuple(P),
                           forward, tested, tuple(falsified))
