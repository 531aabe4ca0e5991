"""Exact moment model: one free Poisson generator Z coupled to M_n.

The generator Z carries free cumulants n**(q-1), the free Poisson family with
rate 1/n and jump n.  Traces of mixed words in Z and n-by-n rational matrices
factorize over non-crossing partitions of the Z positions: each partition pi
contributes its cumulant weight n**(|D| - |pi|) times the product of
normalized traces of the matrix letters grouped by the complement partition
of the matrix positions.  ``pi_term`` exposes one summand of that formula
together with its loop bookkeeping; ``tau_word`` sums them.

``centering_moment`` evaluates the same trace through the free product
centering algorithm of :mod:`ncfree.freeprob` and shares no code with the
factorization; keeping both routes in agreement is acceptance-critical.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import ncpart, ratmat
from ._caches import register_table
from .errors import ArityError, ConfigError, GroundMismatchError
from .freeprob import (
    FreeProduct,
    FreePoissonOracle,
    MatrixTraceOracle,
    TracialLetter,
    free_poisson_cumulant,
    mixed_cumulant,
)
from .ncpart import NonCrossingPartition


@dataclass(frozen=True)
class ModelParams:
    """Model size: the matrix algebra is n-by-n, n >= 2."""
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n!r}")

    @property
    def delta_sq(self) -> Fraction:
        """Square of the scale parameter; equals n."""
        return Fraction(self.n)


@dataclass(frozen=True)
class ModelLetter:
    """One letter of a model word: the generator Z or an n-by-n matrix."""
    kind: str
    matrix: tuple | None = None

    def __post_init__(self):
        if self.kind == "Z":
            if self.matrix is not None:
                raise ConfigError("the generator letter carries no matrix")
        elif self.kind == "matrix":
            if self.matrix is None:
                raise ConfigError("matrix letter without a matrix")
        else:
            raise ConfigError(f"unknown letter kind {self.kind!r}")

    @property
    def is_z(self) -> bool:
        return self.kind == "Z"


Z = ModelLetter("Z")


def matrix_letter(rows) -> ModelLetter:
    """Wrap a square rational matrix as a word letter."""
    return ModelLetter("matrix", ratmat.matrix(rows))


def _split_word(word: Sequence[ModelLetter], params: ModelParams
                ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    # 1-based generator and matrix positions; validates matrix sizes
    D = []
    E = []
    for i, letter in enumerate(word, start=1):
        if not isinstance(letter, ModelLetter):
            raise ConfigError(f"expected ModelLetter, got {letter!r}")
        if letter.is_z:
            D.append(i)
        else:
            if len(letter.matrix) != params.n:
                raise ConfigError(
                    f"matrix letter of size {len(letter.matrix)} in an n={params.n} model")
            E.append(i)
    return tuple(D), tuple(E)


# ---------------------------------------------------------------------------
# dimensions and the generator's moment family


def dim_box(k: int, params: ModelParams) -> int:
    """Dimension of the k-th graded box of the model: n**(k-1)."""
    if k < 1:
        raise ArityError(f"grading index must be >= 1, got {k}")
    return params.n ** (k - 1)


def z_cumulant(q: int, params: ModelParams) -> Fraction:
    """q-th free cumulant of the generator: n**(q-1)."""
    if q < 1:
        raise ArityError(f"cumulant order must be >= 1, got {q}")
    return Fraction(params.n ** (q - 1))


def z_moment(m: int, params: ModelParams, *,
             cap: int = ncpart.DEFAULT_ENUMERATION_CAP) -> Fraction:
    """m-th moment of the generator, summed over NC(m) by enumeration."""
    if m < 0:
        raise ArityError(f"moment order must be >= 0, got {m}")
    if m == 0:
        return Fraction(1)
    n = params.n
    total = 0
    for blocks, _ in ncpart.iter_partitions_with_mobius(m, cap=cap):
        total += n ** (m - len(blocks))
    return Fraction(total)


# ---------------------------------------------------------------------------
# word traces by partition factorization

_TRACE_MEMO: dict = register_table({})
_TAU_MEMO: dict = register_table({})


def _block_trace(word: Sequence[ModelLetter], positions: Sequence[int]) -> Fraction:
    """Normalized trace of the matrix letters at the given 1-based positions."""
    mats = tuple(word[j - 1].matrix for j in positions)
    hit = _TRACE_MEMO.get(mats)
    if hit is None:
        hit = ratmat.product_trace(mats)
        _TRACE_MEMO[mats] = hit
    return hit


def _cumulant_weight(n: int, d_size: int, block_count: int) -> int:
    # weight of one generator partition: n**(|D| - |pi|)
    return n ** (d_size - block_count)


def tau_word(word: Sequence[ModelLetter], params: ModelParams, *,
             cap: int = ncpart.DEFAULT_ENUMERATION_CAP) -> Fraction:
    """Exact trace of a word in the generator and matrix letters.

    Sums, over non-crossing partitions pi of the generator positions, the
    cumulant weight n**(|D| - |pi|) times the product of normalized traces of
    the matrix letters grouped by the complement partition of the matrix
    positions.  Adjacent matrix letters are not merged beforehand; the
    grouping handles them.  The empty word has trace 1.
    """
    word = tuple(word)
    D, E = _split_word(word, params)
    ncpart._check_cap(len(D), cap)
    key = (word, params.n)
    hit = _TAU_MEMO.get(key)
    if hit is not None:
        return hit
    n = params.n
    if not D:
        value = _block_trace(word, E) if E else Fraction(1)
    else:
        total = Fraction(0)
        for blocks in ncpart._iter_partitions(len(D)):
            pi_blocks = ncpart._relabel(blocks, D)
            term = Fraction(_cumulant_weight(n, len(D), len(pi_blocks)))
            for V in ncpart._rest_complement(pi_blocks, E):
                term *= _block_trace(word, V)
            total += term
        value = total
    _TAU_MEMO[key] = value
    return value


@dataclass(frozen=True)
class PiTermBreakdown:
    """One summand of the word-trace factorization, with loop bookkeeping.

    ``value`` is cumulant_factor times the product of the block traces.  The
    loop count obeys the power identity
    n**-1 * n**(loop_count/2) * n**len(pi_tilde) == n**(|D| - |pi|),
    checked on construction.
    """
    n: int
    pi: NonCrossingPartition
    pi_tilde: NonCrossingPartition
    cumulant_factor: int
    block_traces: tuple
    loop_count: int
    value: Fraction

    def __post_init__(self):
        if self.loop_count < 0 or self.loop_count % 2:
            raise ConfigError(f"loop count must be even and >= 0, got {self.loop_count}")
        d_size = len(self.pi.ground)
        lhs = -1 + self.loop_count // 2 + len(self.pi_tilde)
        rhs = d_size - len(self.pi)
        if lhs != rhs:
            raise ConfigError(
                f"loop bookkeeping identity failed: {lhs} != {rhs}")
        prod = Fraction(self.cumulant_factor)
        for _, t in self.block_traces:
            prod *= t
        if prod != self.value:
            raise ConfigError("breakdown value does not match its factors")


def floating_loops(D: Iterable[int], E: Iterable[int],
                   pi: NonCrossingPartition) -> int:
    """Closed internal loops of one summand: 2 * (|D| - |pi| - |pi_tilde| + 1)."""
    d = ncpart.as_ground(D)
    comp = ncpart.pi_tilde(d, E, pi)
    return 2 * (len(d) - len(pi) - len(comp) + 1)


def pi_term(word: Sequence[ModelLetter], pi: NonCrossingPartition,
            params: ModelParams) -> PiTermBreakdown:
    """Breakdown of the summand attached to one generator partition.

    ``pi`` must be a non-crossing partition of the word's generator
    positions; words without a generator letter are rejected.
    """
    word = tuple(word)
    D, E = _split_word(word, params)
    if not D:
        raise ArityError("pi_term needs at least one generator letter")
    if pi.ground != D:
        raise GroundMismatchError(
            f"partition ground {pi.ground} is not the generator set {D}")
    comp = ncpart.pi_tilde(D, E, pi)
    factor = _cumulant_weight(params.n, len(D), len(pi))
    traces = tuple((V, _block_trace(word, V)) for V in comp.blocks)
    value = Fraction(factor)
    for _, t in traces:
        value *= t
    loops = 2 * (len(D) - len(pi) - len(comp) + 1)
    return PiTermBreakdown(
        n=params.n, pi=pi, pi_tilde=comp, cumulant_factor=factor,
        block_traces=traces, loop_count=loops, value=value)


# ---------------------------------------------------------------------------
# split cumulants of the coupled family


def _matrix_cumulant(word: Sequence[ModelLetter],
                     positions: Sequence[int]) -> Fraction:
    mats = tuple(word[j - 1] for j in positions)
    return Fraction(mixed_cumulant(mats, _block_trace_letters))


def _block_trace_letters(letters: tuple) -> Fraction:
    mats = tuple(l.matrix for l in letters)
    hit = _TRACE_MEMO.get(mats)
    if hit is None:
        hit = ratmat.product_trace(mats)
        _TRACE_MEMO[mats] = hit
    return hit


def tilde_kappa(word: Sequence[ModelLetter], sigma: NonCrossingPartition,
                params: ModelParams) -> Fraction:
    """Cumulant of the coupled family at one partition of all positions.

    Nonzero only when every block of sigma stays inside the generator
    positions or inside the matrix positions.  Pure generator blocks
    contribute n**(size-1); pure matrix blocks contribute the free cumulant
    of their matrix letters under the normalized trace.  Summing over all of
    NC(q) recovers ``tau_word``.
    """
    word = tuple(word)
    D, E = _split_word(word, params)
    q = len(word)
    if sigma.ground != tuple(range(1, q + 1)):
        raise GroundMismatchError(
            f"partition ground {sigma.ground} is not 1..{q}")
    dset = set(D)
    eset = set(E)
    value = Fraction(1)
    for block in sigma.blocks:
        if all(x in dset for x in block):
            value *= params.n ** (len(block) - 1)
        elif all(x in eset for x in block):
            value *= _matrix_cumulant(word, block)
        else:
            return Fraction(0)
    return value


# ---------------------------------------------------------------------------
# independent route through the free product centering algorithm

_FREE_PRODUCTS: dict = register_table({})

_Z_ALGEBRA = 0
_MATRIX_ALGEBRA = 1


def _free_product(n: int, cap: int) -> FreeProduct:
    key = (n, cap)
    fp = _FREE_PRODUCTS.get(key)
    if fp is None:
        fp = FreeProduct(
            {_Z_ALGEBRA: FreePoissonOracle(Fraction(1, n), n),
             _MATRIX_ALGEBRA: MatrixTraceOracle(n)},
            cap=cap)
        _FREE_PRODUCTS[key] = fp
    return fp


def as_free_product_word(word: Sequence[ModelLetter]) -> tuple[TracialLetter, ...]:
    """Translate model letters into free product letters."""
    out = []
    for letter in word:
        if letter.is_z:
            out.append(TracialLetter(_Z_ALGEBRA, 1))
        else:
            out.append(TracialLetter(_MATRIX_ALGEBRA, letter.matrix))
    return tuple(out)


def centering_moment(word: Sequence[ModelLetter], params: ModelParams, *,
                     cap: int = 10) -> Fraction:
    """The word trace computed by the centering algorithm, not factorization.

    Independent route used to cross-check :func:`tau_word`; the generator is
    realized as a free Poisson element with rate 1/n and jump n, free from
    the matrix algebra.
    """
    _split_word(word, params)
    return _free_product(params.n, cap).moment(as_free_product_word(word))


def z_cumulant_reference(q: int, params: ModelParams) -> Fraction:
    """The generator cumulant via the free Poisson family; equals z_cumulant."""
    return free_poisson_cumulant(Fraction(1, params.n), params.n, q)
