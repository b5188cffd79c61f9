"""Exact scalars, sparse polynomials, gcds and symmetric-function bookkeeping."""

from .gcd import (
    NotMonic,
    content,
    discriminant,
    gcd_in_lambda,
    gcd_in_var,
    lc,
    poly_gcd,
    prem,
    primitive_part,
    resultant,
    squarefree_decomposition,
    squarefree_in_var,
)
from .poly import Env, EnvironmentMismatch, InexactDivision, MultiPoly, UnknownVariable, grlex_key
from .scalar import I, ONE, ZERO, Scalar, as_scalar, rationalize
from .symmetric import (
    DegreeMismatch,
    SymTensor,
    elementary_symmetric,
    newton_convert,
    power_sums,
    sym_dim,
    u_monomials,
)


def arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """``op`` is one of add, sub, mul, exact_div."""
    if a.env != b.env:
        raise EnvironmentMismatch(f"{a.env.names} vs {b.env.names}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "exact_div":
        return a.exact_div(b)
    raise ValueError(f"unknown op {op!r}")


def evaluate(p: MultiPoly, assignment) -> MultiPoly:
    return p.evaluate(assignment)


__all__ = [
    "Scalar", "ZERO", "ONE", "I", "as_scalar", "rationalize",
    "Env", "MultiPoly", "EnvironmentMismatch", "InexactDivision", "UnknownVariable", "grlex_key",
    "arith", "evaluate",
    "lc", "prem", "poly_gcd", "content", "primitive_part", "gcd_in_var", "gcd_in_lambda",
    "squarefree_decomposition", "squarefree_in_var", "resultant", "discriminant", "NotMonic",
    "SymTensor", "DegreeMismatch", "sym_dim", "u_monomials", "elementary_symmetric",
    "power_sums", "newton_convert",
]
