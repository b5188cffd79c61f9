from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .polyalg import Scalar


@dataclass(frozen=True)
class Config:
    """Tolerances, sampling and seeding shared by the numeric/sampling paths.

    ``tol`` is relative to the largest coefficient magnitude involved.
    Sample points and directions are integer vectors drawn uniformly from
    ``[-height, height]``.
    """

    tol: float = 1e-9
    rat_tol: float = 1e-12
    retries: int = 8
    samples: int = 20
    height: int = 64
    seed: int = 0
    degree_bound: int | None = None
    mode: str = "auto"

    def rng(self, *salt) -> random.Random:
        return random.Random(repr((self.seed,) + salt))

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)


def random_int_vector(rng: random.Random, n: int, height: int, *, nonzero: bool = False) -> tuple[Scalar, ...]:
    while True:
        v = tuple(Scalar(rng.randint(-height, height)) for _ in range(n))
        if not nonzero or any(not x.is_zero() for x in v):
            return v
