"""Exact matrices over the rationals, stored as nested tuples.

Small helper layer: the moment model only ever needs products, sums, and
traces of n-by-n matrices with Fraction entries, and the matrices must be
hashable so they can key memo tables.  numpy cannot hold exact rationals and
sympy matrices are heavier than needed, hence this module.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ConfigError, WordSyntaxError

Matrix = "tuple[tuple[Fraction, ...], ...]"


def matrix(rows: Iterable[Iterable]) -> tuple[tuple[Fraction, ...], ...]:
    """Build a square matrix, coercing entries to Fraction."""
    out = tuple(tuple(Fraction(x) for x in row) for row in rows)
    n = len(out)
    if n == 0 or any(len(row) != n for row in out):
        raise ConfigError(f"expected a square matrix, got rows of sizes "
                          f"{[len(r) for r in out]}")
    return out


def dim(m) -> int:
    return len(m)


def identity(n: int):
    return tuple(tuple(Fraction(1 if r == c else 0) for c in range(n))
                 for r in range(n))


def matrix_unit(n: int, i: int, j: int):
    """The (i, j) matrix unit of size n; indices are 1-based."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise ConfigError(f"matrix unit indices ({i},{j}) out of range for n={n}")
    return tuple(tuple(Fraction(1 if (r, c) == (i - 1, j - 1) else 0)
                       for c in range(n)) for r in range(n))


def cyclic_permutation(n: int):
    """Permutation matrix of the n-cycle, sends basis vector e_k to e_{k+1}."""
    return tuple(tuple(Fraction(1 if r == (c + 1) % n else 0) for c in range(n))
                 for r in range(n))


def mat_mul(a, b):
    n = len(a)
    if len(b) != n:
        raise ConfigError(f"size mismatch: {len(a)} vs {len(b)}")
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
                 for row in a)


def mat_add(a, b):
    if len(a) != len(b):
        raise ConfigError(f"size mismatch: {len(a)} vs {len(b)}")
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a):
    c = Fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)


def trace(m) -> Fraction:
    return sum((m[i][i] for i in range(len(m))), Fraction(0))


def normalized_trace(m) -> Fraction:
    """Trace divided by the size, so the identity has trace 1."""
    return trace(m) / len(m)


def product_trace(mats: Sequence) -> Fraction:
    """Normalized trace of an ordered product of matrices."""
    acc = mats[0]
    for m in mats[1:]:
        acc = mat_mul(acc, m)
    return normalized_trace(acc)


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' or a plain integer literal."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise WordSyntaxError(f"cannot parse rational {text!r}") from exc
