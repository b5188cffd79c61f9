from __future__ import annotations

import random
from importlib import resources

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import chart, datum
from higgsspec.cli.dsl import DSLError, Document, Settings, parse, parse_vector, print_document
from higgsspec.generators import random_commuting_family, random_multivalued_form
from higgsspec.polyalg import Scalar
from higgsspec.spectralbase import SpectralDatum

E2 = chart(2)
HEADER = "chart { dim=2; vars=z1,z2 }\n"


def corpus() -> list[tuple[str, str]]:
    out = []
    for p in sorted(resources.files("higgsspec.corpus").iterdir(), key=lambda p: p.name):
        if p.name.endswith(".sb"):
            out.append((p.name, p.read_text(encoding="utf-8")))
    return out


def diag(text: str) -> DSLError:
    with pytest.raises(DSLError) as info:
        parse(text)
    return info.value


# -- accepted input --------------------------------------------------------


def test_standard_document():
    doc = parse("chart { dim=2; vars=z1,z2 } spectral rank=2 { s[1]=u1+u2; s[2]=u1*u2; }")
    assert doc.n == 2 and doc.higgs == ()
    assert doc.spectral == (datum(E2, "u1+u2", "u1*u2"),)


def test_literals_and_precedence():
    doc = parse(HEADER + "spectral rank=1 { s[1] = (2-3i)*u1 + 3/2*z1^2*u2 - -u2 + i*u1; }")
    assert doc.spectral[0] == datum(E2, "(2-2*I)*u1 + Q(3, 2)*z1**2*u2 + u2")
    doc = parse(HEADER + "spectral rank=2 { s[1]=0; s[2]=-u1^2/4 + 2^3*u2^2; }")
    assert doc.spectral[0] == datum(E2, "0", "-u1**2/4 + 8*u2**2")


def test_comments_whitespace_and_settings():
    text = "# header\nchart {dim=1;vars=t}\n\n  spectral rank=1 { s[1] = t*u1 ; } # trailing\n" \
           "settings { tol=1e-8; seed=3; samples=4; height=9; degree_bound=2; }"
    doc = parse(text)
    assert doc.env.zvars == ("t",)
    assert doc.settings == Settings(tol=1e-8, seed=3, samples=4, height=9, degree_bound=2)


def test_higgs_block():
    doc = parse(HEADER + "higgs rank=2 { A[1]=[[1,1],[0,2]]; A[2]=[[z2,3*z2],[0,4*z2]]; }")
    (phi,) = doc.higgs
    assert phi.r == 2 and phi.n == 2
    assert phi.matrices[1][0][1].to_text() == "3*z2"


# -- diagnostics ---------------------------------------------------------


def test_degree_error():
    e = diag(HEADER + "spectral rank=2 { s[1]=u1+u2; s[2] = u1; }")
    assert e.kind == "degree" and e.line == 2


def test_arity_errors():
    assert diag(HEADER + "higgs rank=1 { A[1]=[[1]]; A[2]=[[1]]; A[3]=[[1]]; }").kind == "arity"
    assert diag(HEADER + "higgs rank=1 { A[1]=[[1]]; }").kind == "arity"
    assert diag(HEADER + "spectral rank=2 { s[1]=u1; }").kind == "arity"
    assert diag(HEADER + "higgs rank=2 { A[1]=[[1]]; A[2]=[[1]]; }").kind == "arity"


def test_reserved_names():
    for name in ("u1", "lam", "xi", "i", "rank"):
        assert diag(f"chart {{ dim=1; vars={name} }}").kind == "reserved"
    assert diag(HEADER + "spectral rank=1 { s[1]=u3; }").kind in ("reserved", "name")


def test_lexical_and_syntax_positions():
    e = diag("chart { dim=1; vars=z1 }\nspectral rank=1 { s[1]=$; }")
    assert (e.kind, e.line, e.col) == ("lexical", 2, 24)
    e = diag("chart { dim=1; vars=z1 } spectral rank=1 { s[1]=u1 }")
    assert e.kind == "syntax" and "';'" in e.expected
    e = diag("spectral rank=1 { s[1]=u1; }")
    assert e.kind == "syntax" and e.line == 1 and e.col == 1
    assert diag(HEADER + "spectral rank=1 { s[1]=u1/z1; }").kind == "syntax"
    assert diag(HEADER + "spectral rank=1 { s[1]=u1/0; }").kind == "syntax"
    assert diag(HEADER + "spectral rank=1 { s[1]=w*u1; }").kind == "name"


def test_duplicate_and_misplaced_blocks():
    assert diag("chart { dim=2; vars=z1,z1 }").kind == "name"
    assert diag("chart { dim=2; vars=z1 }").kind == "arity"
    e = diag(HEADER + "settings { seed=1; } settings { seed=2; }")
    assert e.kind == "syntax"
    assert diag(HEADER + "settings { colour=1; }").kind in ("name", "syntax")


def test_resource_limits():
    assert diag(HEADER + "spectral rank=1 { s[1]=u1*z1^1000; }").kind == "syntax"
    assert diag(HEADER + "spectral rank=1 { s[1]=u1*(z1^60)^60; }").kind == "degree"
    deep = "(" * 500 + "u1" + ")" * 500
    assert diag(HEADER + f"spectral rank=1 {{ s[1]={deep}; }}").kind == "syntax"
    assert diag(HEADER + "spectral rank=1 { s[1]=" + "9" * 5000 + "*u1; }").kind == "lexical"


def test_diagnostic_json():
    e = diag(HEADER + "spectral rank=2 { s[1]=u1; s[2]=u1; }")
    d = e.to_json()
    assert set(d) == {"kind", "line", "column", "message", "expected"}
    assert str(e).startswith(f"{e.line}:{e.col}: degree error")


def test_parse_vector():
    assert parse_vector("1,2/3,1+i") == (Scalar(1), Scalar(2, 0) / 3, Scalar(1, 1))
    assert parse_vector("1,0;0,-1", rows=True) == [(Scalar(1), Scalar(0)), (Scalar(0), Scalar(-1))]
    for bad in ("", "1,,2", "x", "1;2"):
        with pytest.raises(DSLError):
            parse_vector(bad)


# -- round trips ---------------------------------------------------------


@pytest.mark.parametrize("name,text", corpus(), ids=[n for n, _ in corpus()])
def test_corpus_round_trip(name, text):
    doc = parse(text)
    printed = print_document(doc)
    again = parse(printed)
    assert again == doc
    assert print_document(again) == printed


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_generated_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    f = random_multivalued_form(rng, n, rng.randint(1, 3), deg=2)
    s = f.datum()
    comps = tuple(
        c.__class__(c.degree, c.body.scale(Scalar(rng.randint(-3, 3), rng.randint(-2, 2)) / rng.randint(1, 5)))
        for c in s.components
    )
    phi = random_commuting_family(rng, n, rng.randint(1, 3))
    doc = Document(s.env, (phi,), (s, SpectralDatum(comps)), Settings(seed=rng.randint(0, 99), tol=1e-7))
    text = print_document(doc)
    assert parse(text) == doc
    assert print_document(parse(text)) == text


_TOKENS = ["chart", "higgs", "spectral", "settings", "rank", "dim", "vars", "{", "}", "[", "]", "(", ")",
           "=", ";", ",", "+", "-", "*", "/", "^", "s", "A", "u1", "u2", "z1", "z2", "i", "3i", "1/2",
           "0", "2", "64", "1e-3", "lam", "#c\n", "\n", " ", "@", "xi1", "99999999999"]


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.sampled_from(_TOKENS), max_size=60))
def test_fuzz_token_soup_only_diagnoses(tokens):
    text = " ".join(tokens)
    try:
        parse(text)
    except DSLError:
        pass


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=200))
def test_fuzz_arbitrary_text_only_diagnoses(text):
    try:
        parse(text)
    except DSLError:
        pass


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_fuzz_mutated_corpus_only_diagnoses(data):
    name, text = data.draw(st.sampled_from(corpus()))
    pos = data.draw(st.integers(0, len(text)))
    cut = data.draw(st.integers(0, 5))
    insert = data.draw(st.sampled_from(_TOKENS + ["", "^99", "/0", "[[", "u9"]))
    mutated = text[:pos] + insert + text[pos + cut:]
    try:
        doc = parse(mutated)
    except DSLError:
        return
    assert parse(print_document(doc)) == doc
