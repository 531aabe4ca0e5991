"""Monte Carlo cross-checks with random matrices.

The generator is realized as a Wishart matrix A = (jump/N) X X^T with X an
N-by-M standard Gaussian block, M = floor(rate * N); its spectrum tends to
the free Poisson law, an atom at zero of mass 1 - rate plus a
Marchenko-Pastur bulk.  Exact matrix letters b are realized as U (b kron I)
U^T with a single Haar orthogonal U per trial, shared across all letters of
the trial, so the pair (A, letters) becomes asymptotically free.

Traces of mixed words are evaluated in the rotated frame: conjugating the
whole word by U^T shows tr w(A, U C U^T) = tr w(U^T A U, C) exactly, so the
embedded letters keep their kron structure and a word costs O(n N^2) once
the rotated Wishart (and, when needed, its square) is formed.  Per-trial
randomness comes from independent streams seeded by (seed, trial), which
makes every estimate reproducible and safely parallelizable.

This is the only module in the package that touches floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from . import ratmat
from .errors import ConfigError
from .model import ModelLetter, ModelParams

__all__ = [
    "SimulationConfig", "MomentEstimate", "FreePairSampler",
    "sample_free_poisson", "sample_free_pair", "estimate_word",
    "atom_mass_estimate", "mp_support", "mp_density", "mp_continuous_mass",
    "outside_support_fraction",
]


@dataclass(frozen=True)
class SimulationConfig:
    """Monte Carlo parameters for the n-by-n model at matrix size N."""
    n: int
    N: int
    trials: int = 20
    seed: int = 0
    epsilon_atom: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n!r}")
        if not isinstance(self.N, int) or self.N < 100:
            raise ConfigError(f"N must be an integer >= 100, got {self.N!r}")
        if self.N % self.n:
            raise ConfigError(f"N={self.N} must be divisible by n={self.n}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")

    @property
    def rate(self) -> Fraction:
        return Fraction(1, self.n)

    @property
    def jump(self) -> int:
        return self.n

    @property
    def gaussian_columns(self) -> int:
        # floor(rate * N)
        return self.N // self.n

    @property
    def atom_threshold(self) -> float:
        if self.epsilon_atom is not None:
            return self.epsilon_atom
        return 1e-6 * self.n

    def params(self) -> ModelParams:
        return ModelParams(self.n)


@dataclass(frozen=True)
class MomentEstimate:
    """A word trace estimate; std_error_ok is False when trials == 1."""
    value: float
    std_error: float
    trials: int
    std_error_ok: bool


def _rng(config: SimulationConfig, trial: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, trial])


def _haar_orthogonal(rng: np.random.Generator, N: int) -> np.ndarray:
    # QR of a Ginibre block with the sign of R's diagonal fixed
    g = rng.standard_normal((N, N))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def _parallel(fn, count: int, threads: int) -> list:
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


# ---------------------------------------------------------------------------
# spectra of the generator alone


def sample_free_poisson(config: SimulationConfig, *, threads: int = 1) -> np.ndarray:
    """Eigenvalue samples of the Wishart generator, shape (trials, N).

    Rows are ascending.  The N - M structural zero eigenvalues are exact:
    the spectrum is computed from the singular values of X, which also
    supplies the zero block without rounding noise.
    """
    N = config.N
    M = config.gaussian_columns
    scale = config.jump / N

    def one(trial: int) -> np.ndarray:
        X = _rng(config, trial).standard_normal((N, M))
        sv = np.linalg.svd(X, compute_uv=False)
        return np.concatenate([np.zeros(N - M), scale * sv[::-1] ** 2])

    return np.stack(_parallel(one, config.trials, threads))


def atom_mass_estimate(eigenvalues: np.ndarray, config: SimulationConfig) -> float:
    """Fraction of eigenvalues below the atom threshold."""
    return float(np.mean(eigenvalues < config.atom_threshold))


def mp_support(rate, jump) -> tuple[float, float]:
    """Support of the continuous part: jump * (1 -+ sqrt(rate))**2."""
    rate = float(rate)
    jump = float(jump)
    s = math.sqrt(rate)
    return jump * (1 - s) ** 2, jump * (1 + s) ** 2


def mp_density(x: float, rate, jump) -> float:
    """Density of the Marchenko-Pastur bulk of the free Poisson law."""
    a, b = mp_support(rate, jump)
    if x <= a or x >= b:
        return 0.0
    return math.sqrt((b - x) * (x - a)) / (2 * math.pi * float(jump) * x)


def mp_continuous_mass(rate, jump) -> float:
    """Numerically integrated bulk mass; the atom then carries 1 minus this."""
    a, b = mp_support(rate, jump)
    mass, _ = integrate.quad(mp_density, a, b, args=(rate, jump), limit=200)
    return mass


def outside_support_fraction(eigenvalues: np.ndarray, config: SimulationConfig,
                             slack: float = 0.3) -> float:
    """Fraction of nonzero-part eigenvalues outside the widened bulk support."""
    a, b = mp_support(config.rate, config.jump)
    nz = eigenvalues[eigenvalues >= config.atom_threshold]
    if nz.size == 0:
        return 0.0
    return float(np.mean((nz < a - slack) | (nz > b + slack)))


# ---------------------------------------------------------------------------
# mixed words against Haar-rotated exact letters


def _as_float_matrix(m) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m])


def _word_plan(word: Sequence[ModelLetter], n: int):
    """Precompile a word into either an exact value or rotated-frame tokens.

    Matrix-only words evaluate exactly.  Words containing the generator are
    cyclically rotated (the trace is invariant) to start at the longest
    generator run, then compiled into alternating run lengths and collapsed
    small matrices; the first token is always a generator run, so every small
    matrix can be absorbed into the full factor on its left.
    """
    word = tuple(word)
    for letter in word:
        if not isinstance(letter, ModelLetter):
            raise ConfigError(f"expected ModelLetter, got {letter!r}")
        if not letter.is_z and len(letter.matrix) != n:
            raise ConfigError(
                f"matrix letter of size {len(letter.matrix)} in an n={n} simulation")
    if not any(l.is_z for l in word):
        if not word:
            return ("exact", 1.0)
        return ("exact", float(ratmat.product_trace(tuple(l.matrix for l in word))))
    q = len(word)

    def run_starting(i: int) -> int:
        k = 0
        while k < q and word[(i + k) % q].is_z:
            k += 1
        return k

    best = max((i for i in range(q) if word[i].is_z and not word[i - 1].is_z),
               key=run_starting, default=None)
    if best is None:
        # every letter is the generator
        rotated = word
    else:
        rotated = word[best:] + word[:best]
    tokens = []
    i = 0
    while i < q:
        if rotated[i].is_z:
            k = 0
            while i + k < q and rotated[i + k].is_z:
                k += 1
            tokens.append(("z", k))
            i += k
        else:
            mats = []
            while i < q and not rotated[i].is_z:
                mats.append(rotated[i].matrix)
                i += 1
            acc = mats[0]
            for m in mats[1:]:
                acc = ratmat.mat_mul(acc, m)
            tokens.append(("m", _as_float_matrix(acc)))
    return ("mixed", tuple(tokens))


def _absorb_small(full: np.ndarray, small: np.ndarray, n: int) -> np.ndarray:
    # full @ (small kron I), using the block structure: O(n^2 N^2)
    N = full.shape[0]
    b = N // n
    f4 = full.reshape(N, n, b)
    return np.einsum("xtj,tc->xcj", f4, small, optimize=True).reshape(N, N)


def _plan_key(plan):
    # hashable fingerprint; cyclic rotations of a word share it, so a batch
    # evaluates each necklace once per trial
    kind, data = plan
    if kind == "exact":
        return (kind, data)
    return (kind, tuple(
        (t, payload if t == "z" else payload.tobytes()) for t, payload in data))


def _plan_needs_square(plan) -> bool:
    kind, data = plan
    return kind == "mixed" and any(t == "z" and k >= 2 for t, k in data)


def _eval_plan(plan, At: np.ndarray, At2: Optional[np.ndarray], n: int) -> float:
    kind, data = plan
    if kind == "exact":
        return data
    fulls: list[np.ndarray] = []
    for t, payload in data:
        if t == "z":
            fulls.extend([At] * payload)
        else:
            fulls[-1] = _absorb_small(fulls[-1], payload, n)
    # collapse literal (At, At) pairs into the cached square
    reduced: list[np.ndarray] = []
    i = 0
    while i < len(fulls):
        if i + 1 < len(fulls) and fulls[i] is At and fulls[i + 1] is At:
            reduced.append(At2)
            i += 2
        else:
            reduced.append(fulls[i])
            i += 1
    while len(reduced) > 2:
        reduced[0] = reduced[0] @ reduced[1]
        del reduced[1]
    N = At.shape[0]
    if len(reduced) == 1:
        return float(np.trace(reduced[0])) / N
    return float(np.einsum("ij,ji->", reduced[0], reduced[1], optimize=True)) / N


class FreePairSampler:
    """Joint sampler for the Wishart generator and rotated matrix letters.

    Build once per configuration and batch words through
    :meth:`estimate_words`; each trial's heavy pieces (the rotated Wishart
    and optionally its square) are formed once and shared by all words.
    """

    def __init__(self, config: SimulationConfig):
        self.config = config

    def _trial_values(self, trial: int, plans, need_square: bool) -> np.ndarray:
        cfg = self.config
        N = cfg.N
        rng = _rng(cfg, trial)
        X = rng.standard_normal((N, cfg.gaussian_columns))
        U = _haar_orthogonal(rng, N)
        any_mixed = any(kind == "mixed" for kind, _ in plans)
        At = At2 = None
        if any_mixed:
            A = (cfg.jump / N) * (X @ X.T)
            At = U.T @ (A @ U)
            if need_square:
                At2 = At @ At
        return np.array([_eval_plan(p, At, At2, cfg.n) for p in plans])

    def estimate_words(self, words: Sequence[Sequence[ModelLetter]], *,
                       trials: Optional[int] = None,
                       threads: int = 1) -> list[MomentEstimate]:
        cfg = self.config
        T = cfg.trials if trials is None else trials
        if T < 1:
            raise ConfigError(f"trials must be >= 1, got {T}")
        plans = [_word_plan(w, cfg.n) for w in words]
        unique: dict = {}
        slots = []
        for p in plans:
            key = _plan_key(p)
            if key not in unique:
                unique[key] = (len(unique), p)
            slots.append(unique[key][0])
        todo = [p for _, p in unique.values()]
        need_square = any(_plan_needs_square(p) for p in todo)
        rows = _parallel(lambda t: self._trial_values(t, todo, need_square),
                         T, threads)
        values = np.stack(rows)[:, slots]  # (trials, words)
        out = []
        for j in range(values.shape[1]):
            col = values[:, j]
            if T > 1:
                se = float(np.std(col, ddof=1) / math.sqrt(T))
                out.append(MomentEstimate(float(col.mean()), se, T, True))
            else:
                out.append(MomentEstimate(float(col.mean()), 0.0, T, False))
        return out

    def estimate(self, word: Sequence[ModelLetter], *,
                 trials: Optional[int] = None, threads: int = 1) -> MomentEstimate:
        return self.estimate_words([word], trials=trials, threads=threads)[0]


def sample_free_pair(config: SimulationConfig) -> FreePairSampler:
    """Context for estimating mixed word traces; see :class:`FreePairSampler`."""
    return FreePairSampler(config)


def estimate_word(context: FreePairSampler, word: Sequence[ModelLetter], *,
                  trials: Optional[int] = None, threads: int = 1) -> MomentEstimate:
    """Estimate the trace of one word; convenience over the batch method."""
    return context.estimate(word, trials=trials, threads=threads)
