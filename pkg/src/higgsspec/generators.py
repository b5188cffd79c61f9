"""Seeded random instances for self-tests and property checks."""

from __future__ import annotations

import random

from .higgsfield import HiggsLocalModel
from .polyalg import Env, MultiPoly, Scalar
from .spectralbase import MultiValuedForm, SpectralDatum

__all__ = [
    "chart",
    "random_z_poly",
    "random_multivalued_form",
    "random_split_product",
    "random_commuting_family",
    "random_nilpotent_family",
    "random_curve_datum",
    "random_quadratic_datum",
    "random_functionals",
]


def chart(n: int) -> Env:
    return Env.chart(tuple(f"z{i + 1}" for i in range(n)))


def random_z_poly(rng: random.Random, env: Env, deg: int, height: int = 3, terms: int = 3) -> MultiPoly:
    acc = MultiPoly.zero(env)
    nz = len(env.zvars)
    for _ in range(terms):
        e = [0] * env.nvars
        budget = rng.randint(0, deg)
        for _ in range(budget):
            e[env.z_idx[rng.randrange(nz)]] += 1
        acc = acc + MultiPoly.monomial(env, tuple(e), Scalar(rng.randint(-height, height)))
    return acc


def _random_covector(rng: random.Random, env: Env, deg: int, height: int) -> tuple[MultiPoly, ...]:
    return tuple(random_z_poly(rng, env, deg, height, terms=rng.randint(1, 2)) for _ in env.uvars)


def random_multivalued_form(rng: random.Random, n: int, r: int, *, deg: int = 1, height: int = 3,
                            multiplicities: bool = True) -> MultiValuedForm:
    """Distinct covector fields whose multiplicities add up to r."""
    env = chart(n)
    parts = []
    left = r
    while left:
        m = rng.randint(1, left) if multiplicities else 1
        parts.append(m)
        left -= m
    seen: set = set()
    comps = []
    for m in parts:
        while True:
            vec = _random_covector(rng, env, deg, height)
            if vec not in seen:
                seen.add(vec)
                break
        comps.append((vec, m))
    return MultiValuedForm(tuple(comps), env)


def random_split_product(rng: random.Random, n: int, mults: tuple[int, ...], *, deg: int = 1,
                         height: int = 3) -> MultiValuedForm:
    env = chart(n)
    seen: set = set()
    comps = []
    for m in mults:
        while True:
            vec = _random_covector(rng, env, deg, height)
            if vec not in seen and any(not c.is_zero() for c in vec):
                seen.add(vec)
                break
        comps.append((vec, m))
    return MultiValuedForm(tuple(comps), env)


def _matpow_list(M: list[list[int]], k: int) -> list[list[list[int]]]:
    r = len(M)
    out = [[[int(i == j) for j in range(r)] for i in range(r)]]
    for _ in range(k):
        P = out[-1]
        out.append([[sum(P[i][t] * M[t][j] for t in range(r)) for j in range(r)] for i in range(r)])
    return out


def _polynomial_in(env: Env, powers: list, coeffs: list[MultiPoly]) -> list[list[MultiPoly]]:
    r = len(powers[0])
    A = [[MultiPoly.zero(env) for _ in range(r)] for _ in range(r)]
    for Pk, c in zip(powers, coeffs):
        if c.is_zero():
            continue
        for i in range(r):
            for j in range(r):
                if Pk[i][j]:
                    A[i][j] = A[i][j] + c.scale(Pk[i][j])
    return A


def random_commuting_family(rng: random.Random, n: int, r: int, *, deg: int = 1,
                            height: int = 3) -> HiggsLocalModel:
    """A_i = p_i(M) for one random integer matrix M; integrable by construction."""
    env = chart(n)
    M = [[rng.randint(-height, height) for _ in range(r)] for _ in range(r)]
    powers = _matpow_list(M, r - 1)
    mats = []
    for _ in range(n):
        coeffs = [random_z_poly(rng, env, deg, height, terms=rng.randint(1, 2)) for _ in range(r)]
        mats.append(_polynomial_in(env, powers, coeffs))
    return HiggsLocalModel(env, tuple(mats))


def random_nilpotent_family(rng: random.Random, n: int, r: int, *, deg: int = 1,
                            height: int = 3) -> HiggsLocalModel:
    """A_i = p_i(N) with N strictly upper triangular and p_i(0) = 0."""
    env = chart(n)
    N = [[rng.randint(-height, height) if j > i else 0 for j in range(r)] for i in range(r)]
    powers = _matpow_list(N, r - 1)
    mats = []
    for _ in range(n):
        coeffs = [MultiPoly.zero(env)] + [random_z_poly(rng, env, deg, height, terms=2) for _ in range(r - 1)]
        mats.append(_polynomial_in(env, powers, coeffs))
    return HiggsLocalModel(env, tuple(mats))


def random_curve_datum(rng: random.Random, r: int, *, deg: int = 3, height: int = 5) -> SpectralDatum:
    env = chart(1)
    u = MultiPoly.var(env, "u1")
    return SpectralDatum.from_polys(
        env, [random_z_poly(rng, env, deg, height, terms=3) * u ** i for i in range(1, r + 1)]
    )


def random_quadratic_datum(rng: random.Random, height: int = 6) -> SpectralDatum:
    """(0, q) on a 2-dimensional chart with q a constant quadratic form in u.

    Roughly a quarter of the draws are of the form -l^2 and therefore split.
    """
    env = chart(2)
    u1, u2 = MultiPoly.var(env, "u1"), MultiPoly.var(env, "u2")
    if rng.random() < 0.25:
        a, b = rng.randint(-height, height), rng.randint(-height, height)
        q = -((u1.scale(a) + u2.scale(b)) ** 2)
    else:
        a, b, c = (rng.randint(-height, height) for _ in range(3))
        q = (u1 ** 2).scale(a) + (u1 * u2).scale(b) + (u2 ** 2).scale(c)
    return SpectralDatum.from_polys(env, [MultiPoly.zero(env), q])


def random_functionals(rng: random.Random, dim: int, k: int, height: int = 4) -> list[list[Scalar]]:
    """k functionals on a dim-dimensional space; some are made dependent."""
    L: list[list[Scalar]] = []
    for _ in range(k):
        if L and rng.random() < 0.3:
            a, b = rng.choice(L), rng.choice(L)
            ca, cb = rng.randint(-2, 2), rng.randint(-2, 2)
            L.append([x * ca + y * cb for x, y in zip(a, b)])
        else:
            L.append([Scalar(rng.randint(-height, height)) for _ in range(dim)])
    return L
