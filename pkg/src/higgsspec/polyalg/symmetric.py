"""Symmetric tensors on a chart, their monomial basis, and Newton's identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterator, Sequence

from .poly import MultiPoly
from .scalar import Scalar

__all__ = [
    "SymTensor",
    "DegreeMismatch",
    "sym_dim",
    "u_monomials",
    "elementary_symmetric",
    "power_sums",
    "newton_convert",
]


class DegreeMismatch(ValueError):
    pass


def sym_dim(n: int, d: int) -> int:
    """Dimension of Sym^d of an n-dimensional space: C(n+d-1, n-1)."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    return math.comb(n + d - 1, n - 1)


def u_monomials(n: int, d: int) -> Iterator[tuple[int, ...]]:
    """Exponent vectors of degree-d monomials in n variables, lex-descending."""
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for j in combo:
            e[j] += 1
        yield tuple(e)


@dataclass(frozen=True, eq=True)
class SymTensor:
    """A degree-d symmetric differential: ``body`` is homogeneous of degree
    ``degree`` in the u-block and free of lambda and xi."""

    degree: int
    body: MultiPoly

    def __post_init__(self):
        env = self.body.env
        if self.degree < 0:
            raise DegreeMismatch("negative degree")
        degs = self.body.block_degrees(env.u_idx)
        if degs and degs != {self.degree}:
            raise DegreeMismatch(
                f"{self.body.to_text()} is not u-homogeneous of degree {self.degree}"
            )
        extra = [i for i in self.body.variables() if i not in env.z_idx and i not in env.u_idx]
        if extra:
            raise DegreeMismatch(f"{self.body.to_text()} involves non-chart variables")

    @property
    def env(self):
        return self.body.env

    @classmethod
    def zero(cls, env, degree: int) -> "SymTensor":
        return cls(degree, MultiPoly.zero(env))

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def at(self, point: Sequence) -> "SymTensor":
        """Specialize the z-block at a point."""
        env = self.env
        return SymTensor(self.degree, self.body.evaluate(dict(zip(env.zvars, point))))

    def coords(self, point: Sequence) -> list[Scalar]:
        """Coordinates at a z-point in the u-monomial basis of degree d."""
        env = self.env
        n = len(env.uvars)
        p = self.at(point).body
        off = env.u_idx.start
        out = []
        for ue in u_monomials(n, self.degree):
            e = [0] * env.nvars
            e[off:off + n] = ue
            out.append(p.terms.get(tuple(e), Scalar(0)))
        return out

    def to_text(self) -> str:
        return self.body.to_text()


def elementary_symmetric(items: Sequence[MultiPoly], env=None) -> list[MultiPoly]:
    """[e_0, e_1, ..., e_m] of the given polynomials (e_0 = 1)."""
    if env is None:
        env = items[0].env
    e = [MultiPoly.const(env, 1)]
    for x in items:
        e = [e[0]] + [e[k] + e[k - 1] * x for k in range(1, len(e))] + [e[-1] * x]
    return e


def power_sums(items: Sequence[MultiPoly], r: int, env=None) -> list[MultiPoly]:
    if env is None:
        env = items[0].env
    out = []
    for k in range(1, r + 1):
        acc = MultiPoly.zero(env)
        for x in items:
            acc = acc + x ** k
        out.append(acc)
    return out


def newton_convert(values: Sequence[SymTensor], direction: str) -> list[SymTensor]:
    """Convert power sums <-> elementary symmetric functions.

    ``values[k]`` must have degree ``k + 1``.  ``direction`` is
    ``"power_to_elementary"`` or ``"elementary_to_power"``.
    """
    for k, v in enumerate(values):
        if v.degree != k + 1:
            raise DegreeMismatch(f"entry {k} has degree {v.degree}, expected {k + 1}")
    if not values:
        return []
    env = values[0].env
    one = MultiPoly.const(env, 1)
    r = len(values)
    if direction == "power_to_elementary":
        p = [v.body for v in values]
        e = [one]
        for k in range(1, r + 1):
            acc = MultiPoly.zero(env)
            for i in range(1, k + 1):
                term = e[k - i] * p[i - 1]
                acc = acc + term if i % 2 else acc - term
            e.append(acc.scale(Scalar(1) / k))
        return [SymTensor(k, e[k]) for k in range(1, r + 1)]
    if direction == "elementary_to_power":
        e = [one] + [v.body for v in values]
        p: list[MultiPoly] = []
        for k in range(1, r + 1):
            acc = e[k].scale(k) if k % 2 else e[k].scale(-k)
            for i in range(1, k):
                term = e[i] * p[k - i - 1]
                acc = acc + term if i % 2 else acc - term
            p.append(acc)
        return [SymTensor(k, p[k - 1]) for k in range(1, r + 1)]
    raise ValueError(f"unknown direction {direction!r}")
