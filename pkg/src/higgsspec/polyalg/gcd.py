"""GCD, square-free decomposition and resultants.

Everything here treats a :class:`MultiPoly` as univariate in one main
variable with coefficients in the polynomial ring of the others.  Remainder
sequences are the fraction-free subresultant kind; contents are removed with
a recursive multivariate gcd only when no input is monic in the main
variable (monic inputs let the final gcd be read off by one exact division).
"""

from __future__ import annotations

from .poly import MultiPoly

__all__ = [
    "lc",
    "prem",
    "poly_gcd",
    "content",
    "primitive_part",
    "gcd_in_var",
    "gcd_in_lambda",
    "squarefree_decomposition",
    "squarefree_in_var",
    "resultant",
    "discriminant",
    "NotMonic",
]


class NotMonic(ValueError):
    pass


def _idx(p: MultiPoly, var) -> int:
    return var if isinstance(var, int) else p.env.index(var)


def lc(p: MultiPoly, var) -> MultiPoly:
    """Leading coefficient in ``var`` (zero for the zero polynomial)."""
    i = _idx(p, var)
    if p.is_zero():
        return p
    c = p.coeffs_in(i)
    return c[max(c)]


def _is_monic_const(p: MultiPoly, i: int) -> bool:
    return lc(p, i).is_constant()


def prem(a: MultiPoly, b: MultiPoly, var) -> MultiPoly:
    """Pseudo-remainder ``lc(b)^(da-db+1) * a mod b`` in ``var``."""
    i = _idx(a, var)
    db = b.degree_in(i)
    if db < 0:
        raise ZeroDivisionError("pseudo-remainder by zero")
    bl = b.coeff_list(i)
    lb = bl[db]
    r = a
    da = r.degree_in(i)
    e = da - db + 1
    x = MultiPoly.var(a.env, a.env.names[i])
    while not r.is_zero() and (da := r.degree_in(i)) >= db:
        lr = lc(r, i)
        r = r * lb - b * lr * (x ** (da - db))
        e -= 1
    if e > 0:
        r = r * (lb ** e)
    return r


def _subresultant_last(a: MultiPoly, b: MultiPoly, i: int) -> MultiPoly:
    """Last nonzero element of the subresultant remainder sequence of a, b."""
    if a.degree_in(i) < b.degree_in(i):
        a, b = b, a
    one = MultiPoly.const(a.env, 1)
    g = one
    h = one
    while True:
        da, db = a.degree_in(i), b.degree_in(i)
        delta = da - db
        r = prem(a, b, i)
        if r.is_zero():
            return b
        if r.degree_in(i) == 0:
            return r
        a = b
        b = r.exact_div(g * h ** delta)
        g = lc(a, i)
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = (g ** delta).exact_div(h ** (delta - 1))


def _normalize(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    return p.scale(p.leading()[1].inverse())


def content(p: MultiPoly, var) -> MultiPoly:
    """Gcd of the coefficients of ``p`` in ``var`` (normalized)."""
    i = _idx(p, var)
    coeffs = [c for c in p.coeffs_in(i).values() if not c.is_zero()]
    if not coeffs:
        return p
    coeffs.sort(key=len)
    g = _normalize(coeffs[0])
    for c in coeffs[1:]:
        if g.is_constant():
            break
        g = poly_gcd(g, c)
    return g if not g.is_constant() else MultiPoly.const(p.env, 1)


def primitive_part(p: MultiPoly, var) -> MultiPoly:
    if p.is_zero():
        return p
    c = content(p, var)
    return p if c.is_constant() else p.exact_div(c)


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Full multivariate gcd, normalized to leading graded-lex coefficient 1."""
    if a.is_zero():
        return _normalize(b)
    if b.is_zero():
        return _normalize(a)
    env = a.env
    if a.is_constant() or b.is_constant():
        return MultiPoly.const(env, 1)
    va, vb = a.variables(), b.variables()
    i = min(va | vb)
    if i not in va:
        return poly_gcd(a, content(b, i))
    if i not in vb:
        return poly_gcd(content(a, i), b)
    ca, cb = content(a, i), content(b, i)
    d = poly_gcd(ca, cb)
    A = a if ca.is_constant() else a.exact_div(ca)
    B = b if cb.is_constant() else b.exact_div(cb)
    g = _subresultant_last(A, B, i)
    if g.degree_in(i) <= 0:
        return _normalize(d)
    g = primitive_part(g, i)
    return _normalize(d * g)


def gcd_in_var(P: MultiPoly, Q: MultiPoly, var) -> MultiPoly:
    """Gcd of P and Q as univariate polynomials in ``var`` over the fraction
    field of the remaining variables.

    The result is primitive (content 1).  It is monic in ``var`` whenever
    that is possible with polynomial coefficients, in particular whenever P
    or Q is monic; otherwise the leading coefficient in ``var`` is scaled to
    have graded-lex leading coefficient 1.
    """
    if P.is_zero() and Q.is_zero():
        raise ValueError("gcd of two zero polynomials is undefined")
    i = _idx(P, var)
    env = P.env
    one = MultiPoly.const(env, 1)
    if Q.is_zero() or P.is_zero():
        g = primitive_part(P if Q.is_zero() else Q, i)
        return _monicize(g, i)
    if P.degree_in(i) == 0 or Q.degree_in(i) == 0:
        return one
    if _is_monic_const(P, i) or _is_monic_const(Q, i):
        g = _subresultant_last(P, Q, i)
        if g.degree_in(i) <= 0:
            return one
        return g.exact_div(lc(g, i))
    g = poly_gcd(primitive_part(P, i), primitive_part(Q, i))
    if g.degree_in(i) <= 0:
        return one
    return _monicize(primitive_part(g, i), i)


def _monicize(g: MultiPoly, i: int) -> MultiPoly:
    l = lc(g, i)
    if l.is_constant():
        return g.scale(l.constant_value().inverse())
    return g.scale(l.leading()[1].inverse())


def gcd_in_lambda(P: MultiPoly, Q: MultiPoly) -> MultiPoly:
    return gcd_in_var(P, Q, P.env.lam_idx)


def squarefree_in_var(P: MultiPoly, var) -> list[tuple[MultiPoly, int]]:
    """Yun's square-free decomposition of a polynomial monic in ``var``."""
    i = _idx(P, var)
    if P.degree_in(i) < 1:
        raise ValueError("square-free decomposition needs positive degree")
    if not _is_monic_const(P, i):
        raise NotMonic(f"{P.to_text()} is not monic in {P.env.names[i]}")
    lead = lc(P, i).constant_value()
    if not lead.is_one():
        raise NotMonic(f"{P.to_text()} has leading coefficient {lead.to_text()}")
    dP = P.diff(i)
    c = gcd_in_var(P, dP, i)
    w = P.exact_div(c)
    y = dP.exact_div(c)
    z = y - w.diff(i)
    out = []
    k = 1
    while w.degree_in(i) > 0:
        g = gcd_in_var(w, z, i)
        if g.degree_in(i) > 0:
            out.append((g, k))
        w = w.exact_div(g)
        y = z.exact_div(g)
        z = y - w.diff(i)
        k += 1
    return out


def squarefree_decomposition(P: MultiPoly) -> list[tuple[MultiPoly, int]]:
    """Square-free layers of a polynomial monic in lambda.

    Returns ``[(factor, multiplicity), ...]`` with pairwise coprime,
    square-free, monic factors whose product with multiplicities is ``P``.
    """
    return squarefree_in_var(P, P.env.lam_idx)


def _det_bareiss(m: list[list[MultiPoly]]) -> MultiPoly:
    n = len(m)
    if n == 0:
        raise ValueError("empty matrix")
    env = m[0][0].env
    a = [row[:] for row in m]
    sign = 1
    prev = MultiPoly.const(env, 1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for r in range(k + 1, n):
                if not a[r][k].is_zero():
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return MultiPoly.zero(env)
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                a[r][c] = (a[r][c] * a[k][k] - a[r][k] * a[k][c]).exact_div(prev)
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def resultant(P: MultiPoly, Q: MultiPoly, var) -> MultiPoly:
    """Sylvester resultant in ``var`` (fraction-free determinant)."""
    i = _idx(P, var)
    p = P.coeff_list(i)
    q = Q.coeff_list(i)
    m, n = len(p) - 1, len(q) - 1
    env = P.env
    if m < 0 or n < 0:
        return MultiPoly.zero(env)
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    z = MultiPoly.zero(env)
    size = m + n
    rows = []
    for k in range(n):
        row = [z] * size
        for j, c in enumerate(reversed(p)):
            row[k + j] = c
        rows.append(row)
    for k in range(m):
        row = [z] * size
        for j, c in enumerate(reversed(q)):
            row[k + j] = c
        rows.append(row)
    return _det_bareiss(rows)


def discriminant(P: MultiPoly, var) -> MultiPoly:
    """Discriminant in ``var``; polynomials of degree <= 1 get 1."""
    i = _idx(P, var)
    d = P.degree_in(i)
    env = P.env
    if d <= 1:
        return MultiPoly.const(env, 1)
    r = resultant(P, P.diff(i), i)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return r.exact_div(lc(P, i)).scale(sign)
