"""Parser and canonical printer for ``.sb`` documents.

A document declares a chart and then any number of ``higgs``, ``spectral``
and ``settings`` blocks::

    chart { dim=2; vars=z1,z2 }
    higgs rank=2 { A[1]=[[z1,0],[0,1]]; A[2]=[[0,0],[0,z2]]; }
    spectral rank=2 { s[1]=u1+u2; s[2]=u1*u2; }
    settings { tol=1e-9; seed=3; }

Polynomial expressions use ``+ - * / ^`` and parentheses.  Literals are
integers, ``i`` and Gaussian literals such as ``3i``; rationals are written
as quotients (``3/2``).  Division is only allowed by nonzero constants.
``u1..un`` stand for the differentials of the chart coordinates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from typing import Iterator

from ..higgsfield import HiggsLocalModel
from ..polyalg import Env, MultiPoly, Scalar
from ..spectralbase import SpectralDatum

__all__ = ["DSLError", "Document", "Settings", "parse", "parse_vector", "print_document", "tokenize"]

KEYWORDS = {"chart", "higgs", "spectral", "settings", "rank", "dim", "vars"}
MAX_EXPONENT = 64
MAX_DEPTH = 100
MAX_DEGREE = 256


class DSLError(ValueError):
    """Input error with a 1-based line:column position.

    ``kind`` is one of lexical, syntax, arity, degree, reserved, name.
    """

    def __init__(self, kind: str, line: int, col: int, message: str, expected: tuple = ()):
        self.kind = kind
        self.line = line
        self.col = col
        self.message = message
        self.expected = tuple(sorted(set(expected)))
        text = f"{line}:{col}: {kind} error: {message}"
        if self.expected:
            text += "; expected one of: " + " ".join(self.expected)
        super().__init__(text)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "line": self.line,
            "column": self.col,
            "message": self.message,
            "expected": list(self.expected),
        }


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, float, imag, punct, eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<float>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<imag>\d+i(?![A-Za-z0-9_]))
  | (?P<int>\d+(?![A-Za-z_]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}\[\]()=;,+\-*/^])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLError("lexical", line, col, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        s = m.group()
        if kind in ("int", "imag", "float") and len(s) > 1000:
            raise DSLError("lexical", line, col, "numeric literal too long")
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


@dataclass(frozen=True)
class Settings:
    tol: float | None = None
    seed: int | None = None
    samples: int | None = None
    height: int | None = None
    degree_bound: int | None = None

    def items(self) -> Iterator[tuple[str, object]]:
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                yield f.name, v


_SETTING_TYPES = {"tol": float, "seed": int, "samples": int, "height": int, "degree_bound": int}


@dataclass(frozen=True)
class Document:
    env: Env
    higgs: tuple[HiggsLocalModel, ...] = ()
    spectral: tuple[SpectralDatum, ...] = ()
    settings: Settings = field(default_factory=Settings)

    @property
    def n(self) -> int:
        return len(self.env.zvars)


def _is_reserved(name: str) -> bool:
    return bool(name == "i" or name == "lam" or re.fullmatch(r"u\d+|xi\d*", name)) or name in KEYWORDS


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.k = 0
        self.env: Env | None = None
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.k]

    def fail(self, kind: str, msg: str, expected: tuple = (), tok: Token | None = None):
        t = tok or self.tok
        raise DSLError(kind, t.line, t.col, msg, expected)

    def expect(self, text: str) -> Token:
        t = self.tok
        if t.kind in ("punct", "ident") and t.text == text:
            self.k += 1
            return t
        self.fail("syntax", f"unexpected {self._describe(t)}", (repr(text),))

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.tok
        if t.kind == kind:
            self.k += 1
            return t
        self.fail("syntax", f"unexpected {self._describe(t)}", (what,))

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "ident") and self.tok.text == text

    def int_value(self, what: str) -> int:
        return int(self.expect_kind("int", what).text)

    # -- document ---------------------------------------------------------

    def document(self) -> Document:
        if not self.at("chart"):
            self.fail("syntax", f"document must start with a chart block, found {self._describe(self.tok)}",
                      ("'chart'",))
        env = self.chart()
        higgs, spectral = [], []
        settings = None
        while self.tok.kind != "eof":
            if self.at("higgs"):
                higgs.append(self.higgs())
            elif self.at("spectral"):
                spectral.append(self.spectral())
            elif self.at("settings"):
                t = self.tok
                if settings is not None:
                    self.fail("syntax", "duplicate settings block", tok=t)
                settings = self.settings()
            elif self.at("chart"):
                self.fail("syntax", "only one chart block is allowed")
            else:
                self.fail("syntax", f"unexpected {self._describe(self.tok)}",
                          ("'higgs'", "'spectral'", "'settings'", "end of input"))
        return Document(env, tuple(higgs), tuple(spectral), settings or Settings())

    def chart(self) -> Env:
        self.expect("chart")
        self.expect("{")
        self.expect("dim")
        self.expect("=")
        dt = self.tok
        dim = self.int_value("integer")
        if dim < 1:
            self.fail("arity", "chart dimension must be at least 1", tok=dt)
        self.expect(";")
        self.expect("vars")
        self.expect("=")
        names = []
        while True:
            t = self.expect_kind("ident", "identifier")
            if _is_reserved(t.text):
                self.fail("reserved", f"{t.text!r} is reserved and cannot name a coordinate", tok=t)
            if t.text in names:
                self.fail("name", f"duplicate coordinate {t.text!r}", tok=t)
            names.append(t.text)
            if not self.at(","):
                break
            self.k += 1
        if self.at(";"):
            self.k += 1
        close = self.tok
        self.expect("}")
        if len(names) != dim:
            self.fail("arity", f"dim={dim} but {len(names)} coordinate names given", tok=close)
        self.env = Env.chart(tuple(names))
        return self.env

    def _indexed(self, letter: str, limit: int, seen: set) -> int:
        self.expect(letter)
        self.expect("[")
        it = self.tok
        idx = self.int_value("integer")
        self.expect("]")
        if not 1 <= idx <= limit:
            self.fail("arity", f"{letter}[{idx}] out of range 1..{limit}", tok=it)
        if idx in seen:
            self.fail("arity", f"{letter}[{idx}] given twice", tok=it)
        seen.add(idx)
        self.expect("=")
        return idx

    def _rank(self) -> int:
        self.expect("rank")
        self.expect("=")
        rt = self.tok
        r = self.int_value("integer")
        if r < 1:
            self.fail("arity", "rank must be at least 1", tok=rt)
        return r

    def higgs(self) -> HiggsLocalModel:
        start = self.expect("higgs")
        r = self._rank()
        self.expect("{")
        n = len(self.env.zvars)
        mats: dict[int, list] = {}
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("syntax", "unterminated higgs block", ("'A'", "'}'"))
            idx = self._indexed("A", n, set(mats))
            mt = self.tok
            mats[idx] = self.matrix(r, mt)
            self.expect(";")
        close = self.expect("}")
        if len(mats) != n:
            missing = [k for k in range(1, n + 1) if k not in mats]
            self.fail("arity", f"higgs block starting at {start.line}:{start.col} lacks "
                      + ", ".join(f"A[{k}]" for k in missing), tok=close)
        return HiggsLocalModel(self.env, tuple(mats[k] for k in range(1, n + 1)))

    def matrix(self, r: int, at: Token) -> list:
        self.expect("[")
        rows = []
        while True:
            rt = self.tok
            self.expect("[")
            row = []
            while True:
                et = self.tok
                p = self.expr()
                bad = [self.env.names[i] for i in p.variables() if i not in self.env.z_idx]
                if bad:
                    self.fail("reserved", f"{bad[0]!r} may not appear in a coefficient matrix", tok=et)
                row.append(p)
                if not self.at(","):
                    break
                self.k += 1
            self.expect("]")
            if len(row) != r:
                self.fail("arity", f"row has {len(row)} entries, rank is {r}", tok=rt)
            rows.append(tuple(row))
            if not self.at(","):
                break
            self.k += 1
        self.expect("]")
        if len(rows) != r:
            self.fail("arity", f"matrix has {len(rows)} rows, rank is {r}", tok=at)
        return rows

    def spectral(self) -> SpectralDatum:
        start = self.expect("spectral")
        r = self._rank()
        self.expect("{")
        comps: dict[int, MultiPoly] = {}
        env = self.env
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("syntax", "unterminated spectral block", ("'s'", "'}'"))
            idx = self._indexed("s", r, set(comps))
            et = self.tok
            p = self.expr()
            for e in p.terms:
                if sum(e[j] for j in env.u_idx) != idx:
                    self.fail("degree", f"s[{idx}] must be u-homogeneous of degree {idx}", tok=et)
            comps[idx] = p
            self.expect(";")
        close = self.expect("}")
        if len(comps) != r:
            missing = [k for k in range(1, r + 1) if k not in comps]
            self.fail("arity", f"spectral block starting at {start.line}:{start.col} lacks "
                      + ", ".join(f"s[{k}]" for k in missing), tok=close)
        return SpectralDatum.from_polys(env, [comps[k] for k in range(1, r + 1)])

    def settings(self) -> Settings:
        self.expect("settings")
        self.expect("{")
        vals: dict = {}
        while not self.at("}"):
            kt = self.tok
            if kt.kind != "ident" or kt.text not in _SETTING_TYPES:
                self.fail("syntax", f"unknown setting {self._describe(kt)}",
                          tuple(repr(k) for k in _SETTING_TYPES) + ("'}'",))
            self.k += 1
            if kt.text in vals:
                self.fail("syntax", f"setting {kt.text!r} given twice", tok=kt)
            self.expect("=")
            vt = self.tok
            typ = _SETTING_TYPES[kt.text]
            neg = False
            if self.at("-"):
                neg = True
                self.k += 1
                vt = self.tok
            if typ is float and vt.kind in ("float", "int"):
                v = float(vt.text)
            elif typ is int and vt.kind == "int":
                v = int(vt.text)
            else:
                self.fail("syntax", f"bad value for {kt.text}", ("number",), tok=vt)
            self.k += 1
            v = -v if neg else v
            if kt.text in ("tol", "samples", "height") and not v > 0:
                self.fail("syntax", f"{kt.text} must be positive", tok=vt)
            if kt.text == "degree_bound" and v < 0:
                self.fail("syntax", "degree_bound must be non-negative", tok=vt)
            vals[kt.text] = v
            self.expect(";")
        self.expect("}")
        return Settings(**vals)

    # -- expressions ------------------------------------------------------

    def expr(self) -> MultiPoly:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail("syntax", "expression nested too deeply")
        acc = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.k += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        self.depth -= 1
        return acc

    def term(self) -> MultiPoly:
        acc = self.unary()
        while self.at("*") or self.at("/"):
            op = self.tok
            self.k += 1
            rhs = self.unary()
            if op.text == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    self.fail("syntax", "division is only allowed by a nonzero constant", tok=op)
                acc = acc.scale(rhs.constant_value().inverse())
        return acc

    def unary(self) -> MultiPoly:
        if self.at("-") or self.at("+"):
            neg = self.tok.text == "-"
            self.depth += 1
            if self.depth > MAX_DEPTH:
                self.fail("syntax", "expression nested too deeply")
            self.k += 1
            v = self.unary()
            self.depth -= 1
            return -v if neg else v
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.at("^"):
            self.k += 1
            et = self.tok
            e = self.int_value("integer exponent")
            if e > MAX_EXPONENT:
                self.fail("syntax", f"exponent above {MAX_EXPONENT}", tok=et)
            if base.total_degree() * e > MAX_DEGREE:
                self.fail("degree", f"total degree above {MAX_DEGREE}", tok=et)
            return base ** e
        return base

    def atom(self) -> MultiPoly:
        t = self.tok
        env = self.env
        if t.kind == "int":
            self.k += 1
            return MultiPoly.const(env, int(t.text))
        if t.kind == "imag":
            self.k += 1
            return MultiPoly.const(env, Scalar(0, int(t.text[:-1])))
        if t.kind == "float":
            self.fail("syntax", "floating-point literals are not allowed in expressions; write a quotient",
                      ("integer", "identifier", "'('"))
        if t.kind == "ident":
            self.k += 1
            if t.text == "i":
                return MultiPoly.const(env, Scalar(0, 1))
            if t.text in env.zvars or t.text in env.uvars:
                return MultiPoly.var(env, t.text)
            if _is_reserved(t.text):
                self.fail("reserved", f"{t.text!r} is reserved here", tok=t)
            self.fail("name", f"undeclared variable {t.text!r}", tuple(env.zvars) + tuple(env.uvars), tok=t)
        if self.at("("):
            self.k += 1
            v = self.expr()
            self.expect(")")
            return v
        self.fail("syntax", f"unexpected {self._describe(t)}", ("integer", "identifier", "'('", "'-'"))


def parse(text: str) -> Document:
    return _Parser(text).document()


def _poly_text(p: MultiPoly) -> str:
    return p.to_text()


def print_document(doc: Document) -> str:
    env = doc.env
    lines = [f"chart {{ dim={doc.n}; vars={','.join(env.zvars)} }}"]
    for phi in doc.higgs:
        lines.append(f"higgs rank={phi.r} {{")
        for k, A in enumerate(phi.matrices, start=1):
            rows = ",".join("[" + ",".join(_poly_text(x) for x in row) + "]" for row in A)
            lines.append(f"  A[{k}]=[{rows}];")
        lines.append("}")
    for s in doc.spectral:
        lines.append(f"spectral rank={s.r} {{")
        for k, comp in enumerate(s.components, start=1):
            lines.append(f"  s[{k}]={_poly_text(comp.body)};")
        lines.append("}")
    items = list(doc.settings.items())
    if items:
        body = " ".join(f"{k}={v!r};" for k, v in items)
        lines.append(f"settings {{ {body} }}")
    return "\n".join(lines) + "\n"


def parse_vector(text: str, *, rows: bool = False):
    """Comma-separated constant expressions, e.g. ``1,2/3,1+i``.

    With ``rows`` the text is a ``;``-separated list of such vectors.
    """
    p = _Parser(text)
    p.env = Env((), ())
    out: list[list[Scalar]] = [[]]
    if p.tok.kind == "eof":
        p.fail("syntax", "empty vector", ("integer", "'('", "'-'"))
    while True:
        t = p.tok
        v = p.expr()
        if not v.is_constant() and not v.is_zero():
            p.fail("syntax", "expected a constant", tok=t)
        out[-1].append(v.constant_value() if not v.is_zero() else Scalar(0))
        if p.at(","):
            p.k += 1
        elif rows and p.at(";"):
            p.k += 1
            out.append([])
        elif p.tok.kind == "eof":
            break
        else:
            p.fail("syntax", f"unexpected {p._describe(p.tok)}", ("','", "end of input") + (("';'",) if rows else ()))
    if rows:
        return [tuple(r) for r in out]
    return tuple(out[0])
