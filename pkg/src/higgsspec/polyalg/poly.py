"""Sparse distributed multivariate polynomials over the Gaussian rationals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .scalar import ONE, ZERO, Scalar, as_scalar

__all__ = [
    "Env",
    "MultiPoly",
    "EnvironmentMismatch",
    "InexactDivision",
    "UnknownVariable",
    "grlex_key",
]


class EnvironmentMismatch(ValueError):
    pass


class UnknownVariable(KeyError):
    pass


class InexactDivision(ArithmeticError):
    """Raised by exact division; ``remainder`` carries the nonzero remainder."""

    def __init__(self, remainder: "MultiPoly", quotient: "MultiPoly"):
        self.remainder = remainder
        self.quotient = quotient
        super().__init__(f"inexact division, remainder {remainder.to_text()}")


@dataclass(frozen=True)
class Env:
    """Ordered variable environment.

    Variables are laid out as ``zvars + uvars + xivars + (lam,)``.  The
    z-block holds chart coordinates, the u-block the symbols standing for
    ``dz_1..dz_n``, the optional xi-block fibre coordinates of the cotangent
    space and ``lam`` the Liouville-form symbol.
    """

    zvars: tuple[str, ...]
    uvars: tuple[str, ...] = ()
    xivars: tuple[str, ...] = ()
    lam: str | None = "lam"

    def __post_init__(self):
        names = self.names
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")

    @classmethod
    def chart(cls, zvars: Iterable[str], *, xi: bool = False) -> "Env":
        zvars = tuple(zvars)
        n = len(zvars)
        uvars = tuple(f"u{j}" for j in range(1, n + 1))
        xivars = tuple(f"xi{j}" for j in range(1, n + 1)) if xi else ()
        return cls(zvars, uvars, xivars, "lam")

    @property
    def names(self) -> tuple[str, ...]:
        return self.zvars + self.uvars + self.xivars + ((self.lam,) if self.lam else ())

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def n(self) -> int:
        return len(self.zvars)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(name) from None

    @property
    def z_idx(self) -> range:
        return range(0, len(self.zvars))

    @property
    def u_idx(self) -> range:
        o = len(self.zvars)
        return range(o, o + len(self.uvars))

    @property
    def xi_idx(self) -> range:
        o = len(self.zvars) + len(self.uvars)
        return range(o, o + len(self.xivars))

    @property
    def lam_idx(self) -> int:
        if self.lam is None:
            raise UnknownVariable("lam")
        return self.nvars - 1

    def with_xi(self) -> "Env":
        n = len(self.uvars)
        return Env(self.zvars, self.uvars, tuple(f"xi{j}" for j in range(1, n + 1)), self.lam)


def grlex_key(exp: tuple[int, ...]):
    return (sum(exp), exp)


def _add_into(acc: dict, exp, c: Scalar) -> None:
    old = acc.get(exp)
    if old is None:
        acc[exp] = c
    else:
        new = old + c
        if new.is_zero():
            del acc[exp]
        else:
            acc[exp] = new


class MultiPoly:
    """Immutable polynomial: a map from exponent tuples to nonzero Scalars.

    The term map is canonical (zero coefficients never stored), so equality
    is dict equality.  Printing uses descending graded-lex order.
    """

    __slots__ = ("env", "terms", "_hash")

    def __init__(self, env: Env, terms: Mapping[tuple, Scalar] | None = None):
        self.env = env
        clean = {}
        if terms:
            nv = env.nvars
            for e, c in terms.items():
                if len(e) != nv:
                    raise ValueError("exponent length does not match environment")
                c = as_scalar(c)
                if not c.is_zero():
                    clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, env: Env, terms: dict) -> "MultiPoly":
        p = object.__new__(cls)
        p.env = env
        p.terms = terms
        p._hash = None
        return p

    # ---- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, env: Env) -> "MultiPoly":
        return cls._raw(env, {})

    @classmethod
    def const(cls, env: Env, c) -> "MultiPoly":
        c = as_scalar(c)
        if c.is_zero():
            return cls._raw(env, {})
        return cls._raw(env, {(0,) * env.nvars: c})

    @classmethod
    def var(cls, env: Env, name: str, power: int = 1) -> "MultiPoly":
        i = env.index(name)
        e = [0] * env.nvars
        e[i] = power
        return cls._raw(env, {tuple(e): ONE})

    @classmethod
    def monomial(cls, env: Env, exp, c=ONE) -> "MultiPoly":
        return cls(env, {tuple(exp): c})

    # ---- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Scalar:
        """Value of a constant polynomial; raises if not constant."""
        if not self.terms:
            return ZERO
        if not self.is_constant():
            raise ValueError(f"{self.to_text()} is not constant")
        return next(iter(self.terms.values()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # ---- equality --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.env == other.env and self.terms == other.terms
        if isinstance(other, (int, Scalar)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.env, frozenset(self.terms.items())))
        return self._hash

    # ---- arithmetic ------------------------------------------------------
    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.env != self.env:
                raise EnvironmentMismatch(f"{self.env.names} vs {other.env.names}")
            return other
        return MultiPoly.const(self.env, other)

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        if not o.terms:
            return self
        acc = dict(self.terms)
        for e, c in o.terms.items():
            _add_into(acc, e, c)
        return MultiPoly._raw(self.env, acc)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.env, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        acc = dict(self.terms)
        for e, c in o.terms.items():
            _add_into(acc, e, -c)
        return MultiPoly._raw(self.env, acc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)) or not isinstance(other, MultiPoly):
            try:
                c = as_scalar(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        o = self._lift(other)
        if not self.terms or not o.terms:
            return MultiPoly._raw(self.env, {})
        acc: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                _add_into(acc, e, c1 * c2)
        return MultiPoly._raw(self.env, acc)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "MultiPoly":
        c = as_scalar(c)
        if c.is_zero():
            return MultiPoly._raw(self.env, {})
        if c.is_one():
            return self
        return MultiPoly._raw(self.env, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        result = MultiPoly.const(self.env, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            return self.exact_div(other)
        return self.scale(as_scalar(other).inverse())

    # ---- division --------------------------------------------------------
    def leading(self) -> tuple[tuple, Scalar]:
        """Graded-lex leading (exponent, coefficient)."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def divmod(self, b: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by a single divisor in graded-lex order."""
        b = self._lift(b)
        if b.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        be, bc = b.leading()
        binv = bc.inverse()
        rem = dict(self.terms)
        quo: dict = {}
        out: dict = {}
        btail = [(e, c) for e, c in b.terms.items() if e != be]
        while rem:
            e = max(rem, key=grlex_key)
            c = rem.pop(e)
            if all(x >= y for x, y in zip(e, be)):
                qe = tuple(x - y for x, y in zip(e, be))
                qc = c * binv
                quo[qe] = qc
                for te, tc in btail:
                    ne = tuple(x + y for x, y in zip(qe, te))
                    _add_into(rem, ne, -(qc * tc))
            else:
                out[e] = c
        return MultiPoly._raw(self.env, quo), MultiPoly._raw(self.env, out)

    def exact_div(self, b: "MultiPoly") -> "MultiPoly":
        q, r = self.divmod(b)
        if r.terms:
            raise InexactDivision(r, q)
        return q

    def divides(self, a: "MultiPoly") -> bool:
        return a.divmod(self)[1].is_zero()

    # ---- structure -------------------------------------------------------
    def degree_in(self, name_or_idx) -> int:
        i = name_or_idx if isinstance(name_or_idx, int) else self.env.index(name_or_idx)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def block_degrees(self, idx: Iterable[int]) -> set[int]:
        idx = list(idx)
        return {sum(e[i] for i in idx) for e in self.terms}

    def variables(self) -> set[int]:
        out = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    out.add(i)
        return out

    def coeffs_in(self, name_or_idx) -> dict[int, "MultiPoly"]:
        """Coefficients as a polynomial in one variable (that variable zeroed)."""
        i = name_or_idx if isinstance(name_or_idx, int) else self.env.index(name_or_idx)
        buckets: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            e2 = e[:i] + (0,) + e[i + 1:]
            buckets.setdefault(k, {})[e2] = c
        return {k: MultiPoly._raw(self.env, t) for k, t in buckets.items()}

    def coeff_list(self, name_or_idx) -> list["MultiPoly"]:
        """Dense coefficient list, lowest power first."""
        d = self.coeffs_in(name_or_idx)
        deg = max(d) if d else -1
        z = MultiPoly.zero(self.env)
        return [d.get(k, z) for k in range(deg + 1)]

    @classmethod
    def from_coeff_list(cls, env: Env, idx: int, coeffs: list["MultiPoly"]) -> "MultiPoly":
        acc: dict = {}
        for k, c in enumerate(coeffs):
            for e, v in c.terms.items():
                e2 = e[:idx] + (e[idx] + k,) + e[idx + 1:]
                _add_into(acc, e2, v)
        return cls._raw(env, acc)

    def diff(self, name_or_idx) -> "MultiPoly":
        i = name_or_idx if isinstance(name_or_idx, int) else self.env.index(name_or_idx)
        acc: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                _add_into(acc, e2, c * k)
        return MultiPoly._raw(self.env, acc)

    # ---- substitution ----------------------------------------------------
    def evaluate(self, assignment: Mapping[str, object]) -> "MultiPoly":
        """Substitute Scalars for some variables; the rest stay symbolic."""
        idx = {}
        for name, v in assignment.items():
            idx[self.env.index(name)] = as_scalar(v)
        if not idx:
            return self
        powers: dict[tuple[int, int], Scalar] = {}
        acc: dict = {}
        for e, c in self.terms.items():
            coef = c
            e2 = list(e)
            for i, v in idx.items():
                k = e[i]
                if k:
                    key = (i, k)
                    pv = powers.get(key)
                    if pv is None:
                        pv = powers[key] = v ** k
                    coef = coef * pv
                    e2[i] = 0
            if not coef.is_zero():
                _add_into(acc, tuple(e2), coef)
        return MultiPoly._raw(self.env, acc)

    def value(self, assignment: Mapping[str, object] | None = None) -> Scalar:
        """Full evaluation to a Scalar (every present variable must be assigned)."""
        p = self.evaluate(assignment or {})
        return p.constant_value()

    def substitute(self, mapping: Mapping[str, "MultiPoly"], env: Env | None = None) -> "MultiPoly":
        """Replace variables by polynomials over ``env`` (default: same env).

        Variables not in ``mapping`` are carried over by name into ``env``.
        """
        env = env or self.env
        sub: dict[int, MultiPoly] = {}
        for name in self.env.names:
            if name in mapping:
                sub[self.env.index(name)] = mapping[name]
            elif name in env.names:
                sub[self.env.index(name)] = MultiPoly.var(env, name)
        cache: dict[tuple[int, int], MultiPoly] = {}
        result = MultiPoly.zero(env)
        one = MultiPoly.const(env, 1)
        for e, c in self.terms.items():
            term = one.scale(c)
            for i, k in enumerate(e):
                if not k:
                    continue
                if i not in sub:
                    raise UnknownVariable(self.env.names[i])
                key = (i, k)
                pk = cache.get(key)
                if pk is None:
                    pk = cache[key] = sub[i] ** k
                term = term * pk
            result = result + term
        return result

    def to_env(self, env: Env) -> "MultiPoly":
        """Re-express over another environment, mapping variables by name."""
        if env == self.env:
            return self
        pos = []
        for i, name in enumerate(self.env.names):
            pos.append(env.names.index(name) if name in env.names else None)
        acc = {}
        for e, c in self.terms.items():
            e2 = [0] * env.nvars
            for i, k in enumerate(e):
                if k:
                    if pos[i] is None:
                        raise UnknownVariable(self.env.names[i])
                    e2[pos[i]] = k
            acc[tuple(e2)] = c
        return MultiPoly._raw(env, acc)

    # ---- text ------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        names = self.env.names
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            ct = c.to_text()
            if not mono:
                t = ct
            elif c.is_one():
                t = mono
            elif c == -1:
                t = "-" + mono
            else:
                if not c.is_real() and not c.real == 0:
                    ct = f"({ct})"
                t = f"{ct}*{mono}"
            parts.append(t)
        out = parts[0]
        for t in parts[1:]:
            out += t if t.startswith("-") else "+" + t
        return out

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MultiPoly({self.to_text()!r})"
