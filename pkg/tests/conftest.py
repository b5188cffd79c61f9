from __future__ import annotations

from fractions import Fraction

import sympy as sp

from higgsspec.generators import chart
from higgsspec.polyalg import Env, MultiPoly, Scalar
from higgsspec.spectralbase import SpectralDatum


def poly(env: Env, text: str) -> MultiPoly:
    """Build a polynomial from Python syntax over the names of ``env``."""
    ns = {name: MultiPoly.var(env, name) for name in env.names}
    ns["I"] = Scalar(0, 1)
    ns["Q"] = lambda a, b: Scalar(Fraction(a, b))
    value = eval(text, {"__builtins__": {}}, ns)
    if not isinstance(value, MultiPoly):
        value = MultiPoly.const(env, value)
    return value


def datum(env: Env, *texts: str) -> SpectralDatum:
    return SpectralDatum.from_polys(env, [poly(env, t) for t in texts])


def sym(p: MultiPoly) -> sp.Expr:
    """Independent sympy image of a MultiPoly."""
    syms = sp.symbols(p.env.names)
    acc = sp.Integer(0)
    for e, c in p.terms.items():
        coeff = sp.Rational(c.real.numerator, c.real.denominator) + sp.I * sp.Rational(
            c.imag.numerator, c.imag.denominator
        )
        mono = sp.Integer(1)
        for s, k in zip(syms, e):
            mono *= s ** k
        acc += coeff * mono
    return sp.expand(acc)


def from_sym(env: Env, expr) -> MultiPoly:
    syms = sp.symbols(env.names)
    P = sp.Poly(sp.expand(expr), *syms)
    terms = {}
    for e, c in P.terms():
        re, im = sp.Rational(sp.re(c)), sp.Rational(sp.im(c))
        terms[tuple(e)] = Scalar(Fraction(re.p, re.q), Fraction(im.p, im.q))
    return MultiPoly(env, terms)


__all__ = ["chart", "poly", "datum", "sym", "from_sym"]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
