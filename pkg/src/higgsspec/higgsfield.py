"""Local Higgs fields ``phi = sum_i A_i dz_i`` on a chart.

The matrices ``A_i`` have polynomial entries in the chart coordinates.  The
symbol ``u_i`` stands for ``dz_i``, so ``phi`` is handled as the matrix
``sum_i A_i u_i`` of u-linear polynomials.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .polyalg import (
    Env,
    MultiPoly,
    Scalar,
    SymTensor,
    as_scalar,
    elementary_symmetric,
    newton_convert,
    u_monomials,
)
from .polyalg.linalg import charpoly, identity, inverse, matmul, nullspace, rref, trace
from .polyalg.roots import exact_roots
from .spectralbase import SpectralDatum

__all__ = [
    "HiggsLocalModel",
    "Violation",
    "NonIntegrable",
    "NeedsNumeric",
    "TriangularizationFailed",
    "TriangularizationResult",
    "check_integrability",
    "hitchin_traces",
    "hitchin_sigma",
    "is_nilpotent",
    "triangularize_at",
]


class NonIntegrable(ValueError):
    def __init__(self, violation: "Violation"):
        self.violation = violation
        super().__init__(f"phi ^ phi != 0: {violation}")


class NeedsNumeric(ArithmeticError):
    pass


class TriangularizationFailed(ArithmeticError):
    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(f"residual {residual:.3e} above tolerance {tol:.1e}")


@dataclass(frozen=True)
class HiggsLocalModel:
    env: Env
    matrices: tuple  # n matrices, each a tuple of r row-tuples of MultiPoly

    def __post_init__(self):
        mats = tuple(tuple(tuple(_as_poly(self.env, x) for x in row) for row in A) for A in self.matrices)
        object.__setattr__(self, "matrices", mats)
        n = len(self.env.zvars)
        if len(mats) != n:
            raise ValueError(f"expected {n} coefficient matrices, got {len(mats)}")
        r = len(mats[0])
        allowed = set(self.env.z_idx)
        for A in mats:
            if len(A) != r or any(len(row) != r for row in A):
                raise ValueError("coefficient matrices must all be r x r")
            for row in A:
                for x in row:
                    if not x.variables() <= allowed:
                        raise ValueError(f"entry {x.to_text()} is not a function of the chart coordinates")

    @property
    def r(self) -> int:
        return len(self.matrices[0])

    @property
    def n(self) -> int:
        return len(self.matrices)

    def phi(self) -> list[list[MultiPoly]]:
        env = self.env
        r = self.r
        out = [[MultiPoly.zero(env) for _ in range(r)] for _ in range(r)]
        for A, name in zip(self.matrices, env.uvars):
            u = MultiPoly.var(env, name)
            for i in range(r):
                for j in range(r):
                    if not A[i][j].is_zero():
                        out[i][j] = out[i][j] + A[i][j] * u
        return out

    def at(self, point: Sequence) -> list[list[list[Scalar]]]:
        assign = dict(zip(self.env.zvars, point))
        return [[[x.value(assign) for x in row] for row in A] for A in self.matrices]

    def conjugate(self, g: Sequence[Sequence]) -> "HiggsLocalModel":
        """g^-1 A_i g for a constant invertible Scalar matrix g."""
        g = [[as_scalar(x) for x in row] for row in g]
        gi = inverse(g)
        env = self.env
        G = [[MultiPoly.const(env, x) for x in row] for row in g]
        Gi = [[MultiPoly.const(env, x) for x in row] for row in gi]
        return HiggsLocalModel(env, tuple(matmul(matmul(Gi, [list(r) for r in A]), G) for A in self.matrices))

    def to_json(self) -> list:
        return [[[x.to_text() for x in row] for row in A] for A in self.matrices]


def _as_poly(env: Env, x) -> MultiPoly:
    if isinstance(x, MultiPoly):
        return x
    return MultiPoly.const(env, x)


@dataclass(frozen=True)
class Violation:
    i: int
    j: int
    row: int
    col: int
    entry: MultiPoly

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "position": [self.row, self.col], "entry": self.entry.to_text()}


def check_integrability(phi: HiggsLocalModel) -> Violation | None:
    """None when all [A_i, A_j] vanish identically, else the first offending
    pair (1-based) and a nonzero commutator entry."""
    mats = [[list(row) for row in A] for A in phi.matrices]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            ab = matmul(mats[i], mats[j])
            ba = matmul(mats[j], mats[i])
            for p in range(phi.r):
                for q in range(phi.r):
                    c = ab[p][q] - ba[p][q]
                    if not c.is_zero():
                        return Violation(i + 1, j + 1, p + 1, q + 1, c)
    return None


def _require_integrable(phi: HiggsLocalModel) -> None:
    v = check_integrability(phi)
    if v is not None:
        raise NonIntegrable(v)


def hitchin_traces(phi: HiggsLocalModel) -> list[SymTensor]:
    """[Tr(phi), Tr(phi^2), ..., Tr(phi^r)] as SymTensors of degrees 1..r."""
    _require_integrable(phi)
    P = phi.phi()
    power = P
    out = [SymTensor(1, trace(P))]
    for k in range(2, phi.r + 1):
        power = matmul(power, P)
        out.append(SymTensor(k, trace(power)))
    return out


def hitchin_sigma(phi: HiggsLocalModel) -> SpectralDatum:
    """Elementary-symmetric coordinates of the characteristic polynomial."""
    return SpectralDatum(tuple(newton_convert(hitchin_traces(phi), "power_to_elementary")))


def is_nilpotent(phi: HiggsLocalModel) -> bool:
    return hitchin_sigma(phi).is_zero()


# ---------------------------------------------------------------------------
# simultaneous triangularization at a point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriangularizationResult:
    point: tuple
    basis: tuple  # r x r, Scalar (exact) or complex (numeric)
    diagonals: tuple  # r covectors of length n
    exact: bool
    residual: float = 0.0
    sigma_residual: float = 0.0

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "numeric"

    def to_json(self) -> dict:
        if self.exact:
            fmt = lambda c: c.to_text()  # noqa: E731
        else:
            fmt = lambda c: [float(f"{c.real:.15g}"), float(f"{c.imag:.15g}")]  # noqa: E731
        return {
            "point": [c.to_text() for c in self.point],
            "mode": self.mode,
            "basis": [[fmt(c) for c in row] for row in self.basis],
            "diagonals": [[fmt(c) for c in v] for v in self.diagonals],
            "residual": self.residual,
            "sigma_residual": self.sigma_residual,
        }


def _solve_columns(E: list[list[Scalar]], Y: list[list[Scalar]]) -> list[list[Scalar]]:
    """B with E B = Y for E of full column rank (Y in the column span)."""
    k = len(E[0])
    aug = [list(er) + list(yr) for er, yr in zip(E, Y)]
    m, piv = rref(aug)
    if piv[:k] != list(range(k)):
        raise ArithmeticError("basis is not of full column rank")
    return [row[k:] for row in m[:k]]


def _common_eigvec_exact(mats: list) -> tuple[list[Scalar], list[Scalar]]:
    r = len(mats[0])
    E = identity(r)
    for A in mats:
        k = len(E[0])
        B = _solve_columns(E, matmul(A, E))
        roots, _ = exact_roots(charpoly(B))
        if not roots:
            raise NeedsNumeric("eigenvalue outside the Gaussian rationals")
        mu = roots[0]
        shifted = [[B[i][j] - (mu if i == j else 0) for j in range(k)] for i in range(k)]
        N = nullspace(shifted)
        E = matmul(E, [list(col) for col in zip(*N)])
    v = [row[0] for row in E]
    eig = []
    for A in mats:
        Av = [sum((A[i][j] * v[j] for j in range(r)), Scalar(0)) for i in range(r)]
        p = next(i for i in range(r) if not v[i].is_zero())
        eig.append(Av[p] / v[p])
    return v, eig


def _flag_exact(mats: list) -> tuple[list[list[Scalar]], list[list[Scalar]]]:
    """U with U^-1 A U upper triangular for all A, plus the diagonal covectors."""
    r = len(mats[0])
    if r == 1:
        return [[Scalar(1)]], [[A[0][0] for A in mats]]
    v, eig = _common_eigvec_exact(mats)
    cols = [v]
    for j in range(r):
        e = [Scalar(1) if i == j else Scalar(0) for i in range(r)]
        trial = cols + [e]
        _, piv = rref([list(row) for row in zip(*trial)])
        if len(piv) == len(trial):
            cols = trial
        if len(cols) == r:
            break
    U = [list(row) for row in zip(*cols)]
    Ui = inverse(U)
    conj = [matmul(matmul(Ui, A), U) for A in mats]
    sub = [[row[1:] for row in C[1:]] for C in conj]
    U2, diag2 = _flag_exact(sub)
    block = [[Scalar(1)] + [Scalar(0)] * (r - 1)] + [[Scalar(0)] + row for row in U2]
    return matmul(U, block), [eig] + diag2


def _below_residual(mats_c: list[np.ndarray], U: np.ndarray) -> float:
    scale = max([np.abs(A).max() for A in mats_c] + [1e-300])
    Ui = np.linalg.inv(U)
    worst = 0.0
    for A in mats_c:
        T = Ui @ A @ U
        low = np.tril(T, -1)
        worst = max(worst, float(np.abs(low).max()) if low.size else 0.0)
    return worst / scale


def _flag_numeric_deflation(mats_c: list[np.ndarray], tol: float) -> np.ndarray:
    """Unitary flag by repeated common-eigenvector deflation."""
    r = mats_c[0].shape[0]
    if r == 1:
        return np.eye(1, dtype=complex)
    scale = max([np.abs(A).max() for A in mats_c] + [1.0])
    E = np.eye(r, dtype=complex)
    for A in mats_c:
        B = E.conj().T @ A @ E
        w = np.linalg.eigvals(B)
        mu = w[0]
        Mshift = B - mu * np.eye(B.shape[0])
        _, sv, vh = np.linalg.svd(Mshift)
        thresh = max(1e-7 * scale, 1e-12)
        null = vh[np.sum(sv > thresh):].conj().T
        if null.shape[1] == 0:
            null = vh[-1:].conj().T
        E = E @ null
        E, _ = np.linalg.qr(E)
    v = E[:, 0]
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(r, dtype=complex)]))
    Q = Q[:, :r]
    conj = [Q.conj().T @ A @ Q for A in mats_c]
    sub = [C[1:, 1:] for C in conj]
    U2 = _flag_numeric_deflation(sub, tol)
    block = np.eye(r, dtype=complex)
    block[1:, 1:] = U2
    return Q @ block


def _sigma_at(phi: HiggsLocalModel, x: tuple) -> list[list[Scalar]]:
    # specializing first keeps the trace powers free of z
    s = hitchin_sigma(HiggsLocalModel(phi.env, tuple(phi.at(x))))
    return [comp.coords(x) for comp in s.components]


def _diag_sigma(env_n: int, diagonals, r: int, exact: bool):
    """Coordinates of e_k(diagonal covectors) in the u-monomial basis."""
    env = Env(tuple(f"_z{j}" for j in range(env_n)), tuple(f"u{j}" for j in range(1, env_n + 1)), (), None)
    if exact:
        forms = []
        for v in diagonals:
            acc = MultiPoly.zero(env)
            for name, c in zip(env.uvars, v):
                acc = acc + MultiPoly.var(env, name).scale(c)
            forms.append(acc)
        e = elementary_symmetric(forms, env)[1:]
        out = []
        for k, p in enumerate(e, start=1):
            row = []
            for ue in u_monomials(env_n, k):
                row.append(p.terms.get((0,) * env_n + ue, Scalar(0)))
            out.append(row)
        return out
    # numeric: expand with complex dicts
    e: list[dict] = [{(0,) * env_n: 1 + 0j}]
    for v in diagonals:
        lin = {}
        for j, c in enumerate(v):
            ue = [0] * env_n
            ue[j] = 1
            lin[tuple(ue)] = complex(c)
        new = [dict(e[0])]
        for k in range(1, len(e) + 1):
            acc = dict(e[k]) if k < len(e) else {}
            for e1, c1 in e[k - 1].items():
                for e2, c2 in lin.items():
                    ee = tuple(a + b for a, b in zip(e1, e2))
                    acc[ee] = acc.get(ee, 0) + c1 * c2
            new.append(acc)
        e = new
    return [[e[k].get(ue, 0j) for ue in u_monomials(env_n, k)] for k in range(1, r + 1)]


def triangularize_at(phi: HiggsLocalModel, x: Sequence, mode: str = "auto", tol: float = 1e-9,
                     seed: int = 0, retries: int = 8) -> TriangularizationResult:
    """Simultaneously upper-triangularize the A_i(x).

    ``mode`` is ``"exact"``, ``"numeric"`` or ``"auto"`` (exact when the
    eigenvalues of a random combination are Gaussian rationals).  The
    diagonal covectors are checked against the Hitchin sigma at ``x``.
    """
    if mode not in ("exact", "numeric", "auto"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "exact" and not tol > 0:
        raise ValueError("numeric mode needs tol > 0")
    _require_integrable(phi)
    x = tuple(as_scalar(c) for c in x)
    mats = phi.at(x)
    r, n = phi.r, phi.n
    rng = random.Random(repr(("triangularize", seed, tuple(c.to_text() for c in x))))
    sigma_x = _sigma_at(phi, x)
    if mode in ("exact", "auto") and all(A[i][j].is_zero() for A in mats for i in range(r) for j in range(i)):
        diags = [tuple(A[k][k] for A in mats) for k in range(r)]
        if _diag_sigma(n, diags, r, True) != sigma_x:
            raise AssertionError("diagonal covectors do not reproduce sigma")
        return TriangularizationResult(x, tuple(tuple(row) for row in identity(r)), tuple(diags), True)
    if mode in ("exact", "auto"):
        try:
            c = [rng.randint(-64, 64) for _ in range(n)]
            M = [[sum((A[i][j] * c[k] for k, A in enumerate(mats)), Scalar(0)) for j in range(r)]
                 for i in range(r)]
            roots, _ = exact_roots(charpoly(M))
            if len(roots) != r:
                raise NeedsNumeric("generic combination has eigenvalues outside Q(i)")
            U, diag = _flag_exact(mats)
            Ui = inverse(U)
            for A in mats:
                T = matmul(matmul(Ui, A), U)
                if any(not T[i][j].is_zero() for i in range(r) for j in range(i)):
                    raise AssertionError("exact flag is not triangularizing")
            diags = [tuple(diag[k][i] for i in range(n)) for k in range(r)]
            if _diag_sigma(n, diags, r, True) != sigma_x:
                raise AssertionError("diagonal covectors do not reproduce sigma")
            return TriangularizationResult(x, tuple(tuple(row) for row in U), tuple(diags), True)
        except NeedsNumeric:
            if mode == "exact":
                raise
    mats_c = [np.array([[complex(v) for v in row] for row in A], dtype=complex) for A in mats]
    best = np.inf
    U = None
    for _ in range(retries):
        c = [rng.randint(-64, 64) for _ in range(n)]
        M = sum(ck * A for ck, A in zip(c, mats_c))
        _, Z = scipy.linalg.schur(M, output="complex")
        res = _below_residual(mats_c, Z)
        if res < best:
            best, U = res, Z
        if res <= tol:
            break
    if best > tol:
        Z = _flag_numeric_deflation(mats_c, tol)
        res = _below_residual(mats_c, Z)
        if res < best:
            best, U = res, Z
    if best > tol:
        raise TriangularizationFailed(float(best), tol)
    Ui = np.linalg.inv(U)
    tri = [Ui @ A @ U for A in mats_c]
    diags = [tuple(complex(T[k, k]) for T in tri) for k in range(r)]
    got = _diag_sigma(n, diags, r, False)
    scale = max([abs(complex(v)) for row in sigma_x for v in row] + [1.0])
    sres = max(abs(complex(a) - b) for ra, rb in zip(sigma_x, got) for a, b in zip(ra, rb)) / scale
    return TriangularizationResult(
        x, tuple(tuple(complex(v) for v in row) for row in U), tuple(diags), False, float(best), float(sres)
    )
