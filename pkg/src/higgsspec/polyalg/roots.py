"""Roots of univariate polynomials over the Gaussian rationals.

Polynomials here are coefficient lists, lowest degree first.  Exact roots
are found by rationalizing numerical approximations and confirming each
candidate by exact evaluation; nothing is returned as exact unless it
evaluates to zero exactly.
"""

from __future__ import annotations

import mpmath
import numpy as np

from .scalar import ONE, ZERO, Scalar, rationalize

__all__ = [
    "upoly_eval",
    "upoly_divmod",
    "upoly_derivative",
    "upoly_gcd",
    "upoly_trim",
    "upoly_squarefree",
    "numeric_roots",
    "exact_roots",
]


def upoly_trim(p: list) -> list:
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def upoly_eval(p: list, x):
    acc = ZERO if isinstance(x, Scalar) else 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def upoly_divmod(a: list, b: list) -> tuple[list, list]:
    a = upoly_trim(a)
    b = upoly_trim(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if len(a) < len(b):
        return [], a
    inv = b[-1].inverse()
    rem = list(a)
    q = [ZERO] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = rem[k + len(b) - 1] * inv
        q[k] = c
        if not c.is_zero():
            for j, bc in enumerate(b):
                rem[k + j] = rem[k + j] - c * bc
    return q, upoly_trim(rem[: len(b) - 1])


def upoly_derivative(p: list) -> list:
    return upoly_trim([c * k for k, c in enumerate(p)][1:])


def upoly_gcd(a: list, b: list) -> list:
    a, b = upoly_trim(a), upoly_trim(b)
    while b:
        a, b = b, upoly_divmod(a, b)[1]
    if not a:
        return a
    inv = a[-1].inverse()
    return [c * inv for c in a]


def upoly_squarefree(p: list) -> list[tuple[list, int]]:
    """Yun's algorithm over the Gaussian rationals; factors monic."""
    p = upoly_trim(p)
    if len(p) <= 1:
        return []
    inv = p[-1].inverse()
    p = [c * inv for c in p]
    dp = upoly_derivative(p)
    c = upoly_gcd(p, dp)
    w = upoly_divmod(p, c)[0]
    y = upoly_divmod(dp, c)[0]
    z = _sub(y, upoly_derivative(w))
    out = []
    k = 1
    while len(w) > 1:
        g = upoly_gcd(w, z) if upoly_trim(z) else w
        if len(g) > 1:
            out.append((g, k))
        w = upoly_divmod(w, g)[0]
        y = upoly_divmod(z, g)[0]
        z = _sub(y, upoly_derivative(w))
        k += 1
    return out


def _sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = list(a) + [ZERO] * (n - len(a))
    b = list(b) + [ZERO] * (n - len(b))
    return upoly_trim([x - y for x, y in zip(a, b)])


def numeric_roots(p: list, *, precise: bool = False) -> list[complex]:
    """All complex roots (with multiplicity) of a nonconstant polynomial."""
    p = upoly_trim(p)
    if len(p) <= 1:
        return []
    if not precise:
        coeffs = [complex(c) for c in reversed(p)]
        return [complex(z) for z in np.roots(coeffs)]
    with mpmath.workdps(60):
        coeffs = [mpmath.mpc(mpmath.mpf(c.real.numerator) / c.real.denominator,
                             mpmath.mpf(c.imag.numerator) / c.imag.denominator)
                  for c in reversed(p)]
        try:
            roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)
        except mpmath.libmp.NoConvergence:
            return numeric_roots(p)
        return [complex(z) for z in roots]


def _candidates(z: complex, tol: float):
    seen = set()
    for k in range(0, 13, 2):
        cand = rationalize(z, rat_tol=tol, max_den=10 ** k)
        if cand is not None and cand not in seen:
            seen.add(cand)
            yield cand


def exact_roots(p: list, rat_tol: float = 1e-12) -> tuple[list[Scalar], list]:
    """Gaussian-rational roots of ``p`` with multiplicity.

    Returns ``(roots, cofactor)`` with ``p == lc * prod(t - root) * cofactor``
    (cofactor monic up to that scaling).  Candidates come from rationalizing
    numerical roots over a ladder of denominator bounds; each is accepted
    only if it is an exact root.
    """
    rest = upoly_trim(p)
    found: list[Scalar] = []
    for precise, tol in ((False, 1e-6), (True, rat_tol)):
        if len(rest) <= 1:
            break
        for z in numeric_roots(rest, precise=precise):
            for cand in _candidates(z, tol):
                hit = False
                while len(rest) > 1 and upoly_eval(rest, cand).is_zero():
                    found.append(cand)
                    rest = upoly_divmod(rest, [-cand, ONE])[0]
                    hit = True
                if hit:
                    break
    return found, rest
