from __future__ import annotations

import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chart, datum, poly
from higgsspec.config import Config, random_int_vector
from higgsspec.generators import random_functionals, random_multivalued_form, random_quadratic_datum
from higgsspec.polyalg import MultiPoly, Scalar, elementary_symmetric
from higgsspec.spectralbase import (
    AcceptExact,
    AcceptNumeric,
    LikelyMember,
    MemberExact,
    MultiValuedForm,
    NonMember,
    Reject,
    SpectralDatum,
    ZeroCycle,
    common_zero_locus,
    embed_cycle,
    embed_lower_rank,
    membership_at_point,
    membership_global,
    split_exact,
)

E1, E2 = chart(1), chart(2)
S = Scalar


def cycle(*entries) -> ZeroCycle:
    return ZeroCycle(tuple((tuple(S(c) for c in v), m) for v, m in entries))


def reexpand(env, cyc: ZeroCycle, x) -> list[MultiPoly]:
    """sigma of the witness, computed independently of the library's check."""
    forms = []
    for vec, m in cyc.entries:
        form = MultiPoly.zero(env)
        for name, c in zip(env.uvars, vec):
            form = form + MultiPoly.var(env, name).scale(c)
        forms.extend([form] * m)
    return elementary_symmetric(forms, env)[1:]


def quadratic_oracle(s: SpectralDatum) -> bool:
    """Brute-force: do covectors w1, w2 with w1+w2 = s1 and w1*w2 = s2 exist?

    Eliminates w2 = s1 - w1, leaving polynomial equations in the two
    coordinates (a, b) of w1; solvable over C iff the Groebner basis is not 1.
    """
    a, b = sp.symbols("a b")
    u1, u2 = sp.symbols("u1 u2")
    s1 = sp.Poly(sp.sympify(s[1].body.to_text().replace("^", "**")), u1, u2)
    s2 = sp.sympify(s[2].body.to_text().replace("^", "**"))
    c = s1.coeff_monomial(u1) - a
    d = s1.coeff_monomial(u2) - b
    eq = sp.Poly(sp.expand((a * u1 + b * u2) * (c * u1 + d * u2) - s2), u1, u2)
    G = sp.groebner([e for e in eq.coeffs() if e != 0] or [0], a, b)
    return list(G.exprs) != [1]


# -- pointwise membership ------------------------------------------------


def test_standard_split_accepted_everywhere():
    s = datum(E2, "u1+u2", "u1*u2")
    for x in [(0, 0), (3, -5), (S(1, 2), 7)]:
        v = membership_at_point(s, x)
        assert isinstance(v, AcceptExact)
        assert v.cycle == cycle(((1, 0), 1), ((0, 1), 1))


@pytest.mark.parametrize("r", [1, 2, 4])
def test_zero_datum_gives_zero_cycle(r):
    v = membership_at_point(SpectralDatum.zero(E2, r), (4, 1))
    assert isinstance(v, AcceptExact)
    assert v.cycle == cycle(((0, 0), r))


def test_sum_of_squares_rejected():
    s = datum(E2, "0", "u1**2+u2**2")
    assert not quadratic_oracle(s)
    v = membership_at_point(s, (1, 2))
    assert isinstance(v, Reject) and v.exact


@pytest.mark.parametrize("seed", range(15))
def test_quadratic_verdicts_match_oracle(seed):
    s = random_quadratic_datum(random.Random(seed))
    v = membership_at_point(s, (2, 3))
    assert isinstance(v, (AcceptExact, AcceptNumeric)) == quadratic_oracle(s)


def test_witness_reexpands_exactly():
    rng = random.Random(5)
    for _ in range(10):
        f = random_multivalued_form(rng, 2, 3, deg=2, height=10)
        s = f.datum()
        x = random_int_vector(rng, 2, 20)
        v = membership_at_point(s, x)
        assert isinstance(v, AcceptExact)
        at = dict(zip(s.env.zvars, x))
        assert reexpand(s.env, v.cycle, x) == [c.body.evaluate(at) for c in s.components]
        assert v.cycle == f.at(x)


def test_irrational_witness_is_numeric():
    # sheets +-sqrt(2) u1 have no rational witness
    v = membership_at_point(datum(E2, "0", "-2*u1**2"), (0, 0))
    assert isinstance(v, AcceptNumeric)
    vals = sorted(complex(vec[0]).real for vec, _ in v.cycle.entries)
    assert vals == pytest.approx([-(2 ** 0.5), 2 ** 0.5])
    assert v.residual <= 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_completeness_on_split_data(seed):
    rng = random.Random(seed)
    n, r = rng.randint(1, 3), rng.randint(1, 4)
    f = random_multivalued_form(rng, n, r, deg=rng.randint(1, 2), height=10)
    s = f.datum()
    for _ in range(5):
        x = random_int_vector(rng, n, 64)
        v = membership_at_point(s, x)
        assert isinstance(v, AcceptExact) and v.cycle == f.at(x)
    assert split_exact(s) == f


def test_rejection_stable_under_resampling():
    s = datum(E2, "0", "u1**2+z1*u2**2+1*u1*u2")
    rng = random.Random(11)
    verdicts = [membership_at_point(s, random_int_vector(rng, 2, 64, nonzero=True)) for _ in range(10)]
    # z1 = 1/4 is the only place where the quadratic becomes a square
    assert all(isinstance(v, Reject) for v in verdicts)


# -- split_exact ---------------------------------------------------------


def test_split_exact_examples():
    f = MultiValuedForm.from_linear_forms(E2, [(poly(E2, "z1*u1"), 2), (poly(E2, "u2"), 1)])
    got = split_exact(f.datum())
    assert got is not None
    assert sorted((form.to_text(), m) for form, m in got.linear_forms()) == [("u2", 1), ("z1*u1", 2)]
    assert split_exact(datum(E2, "0", "u1*u2")) is None
    got = split_exact(datum(E2, "2*u1", "u1**2"))
    assert [(form.to_text(), m) for form, m in got.linear_forms()] == [("u1", 2)]


def test_split_exact_respects_degree_bound():
    f = MultiValuedForm.from_linear_forms(E1, [(poly(E1, "z1**2*u1"), 1), (poly(E1, "-u1"), 1)])
    assert split_exact(f.datum(), D=2) == f
    assert split_exact(f.datum(), D=1) is None


def test_split_exact_gaussian_coefficients():
    f = MultiValuedForm.from_linear_forms(E2, [(poly(E2, "I*z2*u1+u2"), 1), (poly(E2, "u1-I*u2"), 1)])
    assert split_exact(f.datum()) == f


# -- global membership ---------------------------------------------------


def test_global_split_is_member_exact():
    rng = random.Random(2)
    f = random_multivalued_form(rng, 2, 3)
    v = membership_global(f.datum())
    assert isinstance(v, MemberExact) and v.form == f


def test_global_sum_of_squares_is_non_member():
    v = membership_global(datum(E2, "0", "u1**2+u2**2"))
    assert isinstance(v, NonMember) and v.exact
    assert v.certificate["kind"] == "structural"


@pytest.mark.parametrize("texts", [("z1*u1", "u1**2"), ("0", "-z1*u1**2"), ("u1", "z1*u1**2", "3*u1**3")])
def test_global_curve_always_member(texts):
    v = membership_global(datum(E1, *texts))
    assert isinstance(v, MemberExact)


def test_global_genuinely_two_sheeted_is_likely_member():
    v = membership_global(datum(E2, "0", "-z1*u1**2"), Config(samples=5))
    assert isinstance(v, LikelyMember)
    assert len(v.samples) == 5
    assert all(isinstance(w, (AcceptExact, AcceptNumeric)) for _, w in v.samples)


# -- rank embedding ------------------------------------------------------


def test_embed_examples():
    s = datum(E2, "u1")
    big = embed_lower_rank(s, 3)
    assert big == datum(E2, "u1", "0", "0")
    v = membership_at_point(big, (5, 5))
    assert isinstance(v, AcceptExact) and v.cycle == cycle(((1, 0), 1), ((0, 0), 2))
    assert embed_lower_rank(s, 1) == s
    with pytest.raises(ValueError):
        embed_lower_rank(datum(E2, "u1", "u1*u2"), 1)


@pytest.mark.parametrize("seed", range(50))
def test_embedding_preserves_membership(seed):
    rng = random.Random(seed)
    n, r = rng.randint(1, 3), rng.randint(1, 3)
    f = random_multivalued_form(rng, n, r)
    s = f.datum()
    R = r + rng.randint(0, 2)
    x = random_int_vector(rng, n, 30)
    small, big = membership_at_point(s, x), membership_at_point(embed_lower_rank(s, R), x)
    assert isinstance(small, AcceptExact) and isinstance(big, AcceptExact)
    assert big.cycle == embed_cycle(small.cycle, R)


# -- common zero locus ---------------------------------------------------


def test_zero_locus_examples():
    rep = common_zero_locus([[1, 0, 0], [0, 1, 0]])
    assert rep.kernel == ((S(0), S(0), S(1)),)
    assert [p.to_text() for p in rep.polynomials] == ["v1+v2", "v1*v2"]
    assert rep.ok
    env = rep.polynomials[0].env
    probe = dict(zip(env.zvars, (1, -1, 0)))
    assert rep.polynomials[0].value(probe) == 0 and rep.polynomials[1].value(probe) == -1
    rep = common_zero_locus([[1], [1]])
    assert rep.kernel == () and [p.to_text() for p in rep.polynomials] == ["2*v1", "v1^2"]
    rep = common_zero_locus([], 3)
    assert len(rep.kernel) == 3 and rep.polynomials == () and rep.ok


def test_zero_locus_all_zero_functionals():
    rep = common_zero_locus([[0, 0], [0, 0]])
    assert len(rep.kernel) == 2 and rep.reverse_samples == 0 and rep.ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_zero_locus_property(seed):
    rng = random.Random(seed)
    dim = rng.randint(1, 5)
    L = random_functionals(rng, dim, rng.randint(1, 5))
    rep = common_zero_locus(L, dim, samples=20)
    assert rep.forward_ok and not rep.reverse_falsified
    rank = sp.Matrix([[sp.Rational(str(c.real)) for c in row] for row in L]).rank()
    assert len(rep.kernel) == dim - rank
