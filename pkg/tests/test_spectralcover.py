from __future__ import annotations

import random
from math import comb

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chart, datum, from_sym, poly, sym
from higgsspec.config import Config, random_int_vector
from higgsspec.generators import random_multivalued_form, random_split_product
from higgsspec.polyalg import MultiPoly, Scalar
from higgsspec.spectralbase import MultiValuedForm, SpectralDatum, ZeroCycle, split_exact
from higgsspec.spectralcover import (
    MembershipRejected,
    decompose,
    defining_equations,
    discriminant_direction,
    fibre,
    multiplicity_constancy_check,
)

E1, E2 = chart(1), chart(2)
S = Scalar


def cycle(*entries) -> ZeroCycle:
    return ZeroCycle(tuple((tuple(S(c) for c in v), m) for v, m in entries))


# -- defining equations --------------------------------------------------


def test_equations_standard_example():
    cover = defining_equations(datum(E2, "u1+u2", "u1*u2"))
    xenv = cover.env
    assert cover.count == 3
    expected = ["xi1**2-xi1", "2*xi1*xi2-xi1-xi2+1", "xi2**2-xi2"]
    assert list(cover.equations) == [poly(xenv, t) for t in expected]
    sols = sp.solve([sym(e) for e in cover.equations], sp.symbols("xi1 xi2"), dict=True)
    assert sorted((d[sp.Symbol("xi1")], d[sp.Symbol("xi2")]) for d in sols) == [(0, 1), (1, 0)]


def test_equations_curve():
    cover = defining_equations(datum(E1, "3*z1*u1", "z1**2*u1**2"))
    assert cover.equations == (poly(cover.env, "xi1**2-3*z1*xi1+z1**2"),)
    assert defining_equations(SpectralDatum.zero(chart(3), 3)).count == 10


@pytest.mark.parametrize("n", range(1, 5))
def test_equation_count(n):
    for r in range(1, 6):
        assert defining_equations(SpectralDatum.zero(chart(n), r)).count == comb(n + r - 1, n - 1)


@pytest.mark.parametrize("seed", range(5))
def test_equations_match_symbolic_expansion(seed):
    rng = random.Random(seed)
    f = random_multivalued_form(rng, 2, 3, deg=1)
    s = f.datum()
    cover = defining_equations(s)
    xenv = cover.env
    u = sp.symbols(xenv.uvars)
    lam = sp.Symbol("lam")
    xi_u = sum(sp.Symbol(x) * ui for x, ui in zip(xenv.xivars, u))
    expanded = sp.expand(sym(s.char_poly()).subs(lam, xi_u))
    P = sp.Poly(expanded, *u)
    for mono, eq in zip(cover.monomials, cover.equations):
        assert eq == from_sym(xenv, P.coeff_monomial(tuple(mono)))


# -- fibres --------------------------------------------------------------


def test_fibre_examples():
    assert fibre(datum(E2, "u1+u2", "u1*u2"), (7, 8)) == cycle(((1, 0), 1), ((0, 1), 1))
    assert fibre(SpectralDatum.zero(E2, 3), (1, 1)) == cycle(((0, 0), 3))
    f = MultiValuedForm.from_linear_forms(E2, [(poly(E2, "z1*u1"), 1), (poly(E2, "u2"), 1)])
    assert fibre(f.datum(), (2, 5)) == cycle(((2, 0), 1), ((0, 1), 1))


def test_fibre_propagates_rejection():
    with pytest.raises(MembershipRejected):
        fibre(datum(E2, "0", "u1**2+u2**2"), (1, 1))


def test_numeric_fibre_satisfies_equations():
    s = datum(E2, "0", "-z1*u1**2")
    cyc = fibre(s, (3, 1))
    assert not cyc.exact and cyc.r == 2
    vals = sorted(complex(v[0]).real for v, _ in cyc.entries)
    assert vals == pytest.approx([-(3 ** 0.5), 3 ** 0.5])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_split_fibre_is_specialized_form(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    f = random_multivalued_form(rng, n, rng.randint(1, 4))
    x = random_int_vector(rng, n, 30)
    cyc = fibre(f.datum(), x)
    assert cyc == f.at(x) and cyc.r == f.r


# -- discriminant --------------------------------------------------------


def test_discriminant_examples():
    d = discriminant_direction(datum(E2, "u1+u2", "u1*u2"), (1, 2))
    assert d.poly == MultiPoly.const(E2, 1)
    d = discriminant_direction(datum(E2, "2*u1", "u1**2"), (1, 2))
    assert d.poly == MultiPoly.const(E2, 1)
    d = discriminant_direction(datum(E1, "0", "-z1*u1**2"))
    assert d.poly == poly(E1, "4*z1")
    assert d.ramified_at((0,)) and not d.ramified_at((1,))


def test_discriminant_is_symbolic_discriminant_at_direction():
    s = datum(E2, "z2*u1", "z1*u1*u2")
    d = discriminant_direction(s, (2, -1))
    lam = sp.Symbol("lam")
    P = sym(s.char_poly()).subs({sp.Symbol("u1"): 2, sp.Symbol("u2"): -1})
    oracle = sp.discriminant(P, lam)
    assert sp.cancel(sym(d.poly) / oracle).free_symbols == set()


# -- decomposition -------------------------------------------------------


def test_decompose_examples():
    lam, u1, u2 = (poly(E2, t) for t in ("lam", "u1", "u2"))
    s = SpectralDatum.from_char_poly((lam - u1) ** 2 * (lam - u2))
    dec = decompose(s)
    assert [(c.poly, c.degree, c.multiplicity) for c in dec.components] == [(lam - u1, 1, 2), (lam - u2, 1, 1)]
    assert not dec.residual

    s = datum(E1, "0", "-z1*u1**2")
    dec = decompose(s)
    assert len(dec.components) == 1
    c = dec.components[0]
    assert (c.poly, c.degree, c.multiplicity, c.split) == (poly(E1, "lam**2-z1*u1**2"), 2, 1, False)
    assert dec.residual and split_exact(s) is None

    dec = decompose(SpectralDatum.zero(E2, 4))
    assert [(c.poly, c.degree, c.multiplicity) for c in dec.components] == [(poly(E2, "lam"), 1, 4)]


def test_decompose_mixed_layers():
    lam = poly(E2, "lam")
    P = (lam - poly(E2, "z1*u2")) ** 2 * (lam ** 2 - poly(E2, "z2*u1**2"))
    dec = decompose(SpectralDatum.from_char_poly(P))
    assert dec.product() == P
    assert [(c.degree, c.multiplicity, c.split) for c in dec.components] == [(1, 2, True), (2, 1, False)]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_decompose_identity(seed):
    rng = random.Random(seed)
    mults = tuple(rng.randint(1, 3) for _ in range(rng.randint(1, 3)))
    f = random_split_product(rng, rng.randint(1, 3), mults)
    s = f.datum()
    dec = decompose(s)
    assert dec.product() == s.char_poly()
    assert sum(c.multiplicity * c.degree for c in dec.components) == s.r
    assert sorted(c.multiplicity for c in dec.components) == sorted(mults)
    assert not dec.residual


# -- multiplicity constancy ----------------------------------------------


def test_constancy_double_component():
    lam, u1, u2 = (poly(E2, t) for t in ("lam", "u1", "u2"))
    s = SpectralDatum.from_char_poly((lam - u1) ** 2 * (lam - u2))
    rng = random.Random(1)
    pts = [random_int_vector(rng, 2, 64) for _ in range(10)]
    rep = multiplicity_constancy_check(s, 0, pts)
    assert rep.ok and rep.multiplicity == 2 and len(rep.checked) == 10


def test_constancy_generic_split():
    rng = random.Random(4)
    f = random_multivalued_form(rng, 2, 3, multiplicities=False)
    s = f.datum()
    pts = [random_int_vector(rng, 2, 64) for _ in range(10)]
    dec = decompose(s)
    for k in range(len(dec.components)):
        rep = multiplicity_constancy_check(s, k, pts, decomposition=dec)
        assert rep.ok and rep.multiplicity == 1


def test_constancy_recovers_three_two():
    rng = random.Random(9)
    f = random_split_product(rng, 2, (3, 2))
    s = f.datum()
    pts = [random_int_vector(rng, 2, 64) for _ in range(20)]
    dec = decompose(s)
    seen = sorted(multiplicity_constancy_check(s, k, pts, decomposition=dec).multiplicity
                  for k in range(2))
    assert seen == [2, 3]
    for k in range(2):
        rep = multiplicity_constancy_check(s, k, pts, decomposition=dec)
        assert rep.ok and len(rep.checked) + len(rep.skipped) == 20


def test_constancy_skips_discriminant_points():
    lam = poly(E1, "lam")
    s = SpectralDatum.from_char_poly((lam - poly(E1, "z1*u1")) ** 2 * (lam - poly(E1, "u1")))
    rep = multiplicity_constancy_check(s, 0, [(1,), (2,)])
    assert rep.skipped == ((S(1),),) and rep.checked == ((S(2),),) and rep.ok


def test_constancy_refuses_unsplit_component():
    with pytest.raises(ValueError):
        multiplicity_constancy_check(datum(E1, "0", "-z1*u1**2"), 0, [(1,)], Config())
