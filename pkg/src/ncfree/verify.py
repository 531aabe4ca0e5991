"""Self-contained acceptance checks, shared by the CLI and the test suite.

Each check returns a :class:`CheckResult` and never raises on a mere value
mismatch; mismatches land in the result detail so a failing run still reports
every criterion.  ``quick`` trims ranges to seconds for smoke runs; the full
depth is what the acceptance tests execute.  All checks except the Monte
Carlo one are exact rational computations.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from . import factors, freeprob, model, ncpart, ratmat, rmt
from .model import ModelParams, Z, matrix_letter

VERIFY_SEED = 20260824

__all__ = [
    "CheckResult", "run_all", "EXACT_CHECKS", "RMT_CHECK",
    "check_catalan_narayana", "check_moment_cumulant_transforms",
    "check_complement_dual_route", "check_generator_free_poisson",
    "check_word_trace_dual_route", "check_mixed_cumulants_vanish",
    "check_loop_bookkeeping", "check_factor_parameters", "check_monte_carlo",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _finish(name: str, problems: list, summary: str, t0: float) -> CheckResult:
    elapsed = time.perf_counter() - t0
    if problems:
        head = "; ".join(problems[:3])
        more = f" (+{len(problems) - 3} more)" if len(problems) > 3 else ""
        return CheckResult(name, False, f"{head}{more} [{elapsed:.1f}s]")
    return CheckResult(name, True, f"{summary} [{elapsed:.1f}s]")


def _memoized(fn: Callable) -> Callable:
    memo: dict = {}

    def wrap(word):
        word = tuple(word)
        v = memo.get(word)
        if v is None:
            v = fn(word)
            memo[word] = v
        return v

    return wrap


class _RandomFunctional:
    """Deterministic random rational value per distinct letter tuple."""

    def __init__(self, rng: random.Random):
        self._rng = rng
        self._memo: dict = {}

    def __call__(self, word) -> Fraction:
        word = tuple(word)
        v = self._memo.get(word)
        if v is None:
            v = Fraction(self._rng.randint(-60, 60), self._rng.randint(1, 24))
            self._memo[word] = v
        return v


def _letters_n2() -> list[model.ModelLetter]:
    return [Z,
            matrix_letter(ratmat.matrix_unit(2, 1, 1)),
            matrix_letter(ratmat.matrix_unit(2, 1, 2)),
            matrix_letter(ratmat.matrix_unit(2, 2, 1)),
            matrix_letter(ratmat.matrix_unit(2, 2, 2)),
            matrix_letter(ratmat.cyclic_permutation(2))]


def _letters_n3() -> list[model.ModelLetter]:
    return [Z,
            matrix_letter(ratmat.matrix_unit(3, 1, 1)),
            matrix_letter(ratmat.matrix_unit(3, 1, 2)),
            matrix_letter(ratmat.matrix_unit(3, 2, 1)),
            matrix_letter(ratmat.matrix_unit(3, 3, 3)),
            matrix_letter(ratmat.cyclic_permutation(3))]


# ---------------------------------------------------------------------------
# 1. enumeration counts


def check_catalan_narayana(quick: bool = False) -> CheckResult:
    """Counts match Catalan, block-size buckets match Narayana, all valid."""
    t0 = time.perf_counter()
    hi = 7 if quick else 10
    problems: list[str] = []
    total = 0
    for q in range(1, hi + 1):
        parts = ncpart.enumerate_nc(range(1, q + 1))
        total += len(parts)
        catalan = math.comb(2 * q, q) // (q + 1)
        if len(parts) != catalan:
            problems.append(f"q={q}: {len(parts)} partitions, expected {catalan}")
            continue
        if len(set(parts)) != len(parts):
            problems.append(f"q={q}: duplicate partitions in the enumeration")
        buckets = Counter(p.block_count for p in parts)
        for k in range(1, q + 1):
            narayana = math.comb(q, k - 1) * math.comb(q - 1, k - 1) // k
            if buckets.get(k, 0) != narayana:
                problems.append(
                    f"q={q}: {buckets.get(k, 0)} partitions with {k} blocks, "
                    f"expected {narayana}")
        bad = [p for p in parts if not ncpart.is_noncrossing(p.blocks)]
        if bad:
            problems.append(f"q={q}: invalid partition {bad[0]}")
    return _finish("catalan-narayana", problems,
                   f"q<={hi}: {total} partitions, counts+buckets+validity", t0)


# ---------------------------------------------------------------------------
# 2. moment/cumulant transforms


def check_moment_cumulant_transforms(quick: bool = False) -> CheckResult:
    """Round trips on random rational functionals plus the four
    interval-restricted transform identities."""
    t0 = time.perf_counter()
    rng = random.Random(VERIFY_SEED + 2)
    functionals = 12 if quick else 100
    max_q = 5 if quick else 8
    forms_q = 4 if quick else 6
    forms_functionals = 2 if quick else 3
    base = tuple("abcdefgh")
    problems: list[str] = []
    roundtrips = 0
    for trial in range(functionals):
        letters_full = base if trial % 2 else ("a",) * 8
        given = _RandomFunctional(rng)
        if trial % 4 < 2:
            # treat the randoms as moments, derive cumulants, map back
            derived = _memoized(lambda w: ncpart.moments_to_cumulants(given, w))
            back = ncpart.cumulants_to_moments
        else:
            derived = _memoized(lambda w: ncpart.cumulants_to_moments(given, w))
            back = ncpart.moments_to_cumulants
        for q in range(1, max_q + 1):
            letters = letters_full[:q]
            roundtrips += 1
            if back(derived, letters) != given(letters):
                problems.append(f"round trip failed at trial {trial}, q={q}")
                break
    forms = 0
    for trial in range(forms_functionals):
        phi = _RandomFunctional(rng)
        kappa = _memoized(lambda w: ncpart.moments_to_cumulants(phi, w))
        for q in range(1, forms_q + 1):
            letters = base[:q]
            for tau in ncpart.enumerate_nc(range(1, q + 1)):
                forms += 1
                if not ncpart.partitioned_forms_check(phi, kappa, tau, letters):
                    problems.append(f"restricted identity failed at q={q}, tau={tau}")
    return _finish("moment-cumulant-transforms", problems,
                   f"{functionals} functionals, {roundtrips} round trips, "
                   f"{forms} restricted identities", t0)


# ---------------------------------------------------------------------------
# 3. complement on the unmarked positions, two routes


_FROZEN_SPLIT_Q = 18
_FROZEN_SPLIT_D = (2, 5, 8, 11, 13, 14, 17)
_FROZEN_SPLIT_PI = ((2, 8, 11), (5,), (13, 14, 17))
_FROZEN_SPLIT_COMP = ((1, 12, 18), (3, 4, 6, 7), (9, 10), (15, 16))


def _all_splits(q: int):
    universe = range(1, q + 1)
    for mask in range(1, 2 ** q):
        D = tuple(i for i in universe if mask >> (i - 1) & 1)
        E = tuple(i for i in universe if not mask >> (i - 1) & 1)
        yield D, E


def check_complement_dual_route(quick: bool = False) -> CheckResult:
    """Direct complement construction against the exhaustive-search oracle."""
    t0 = time.perf_counter()
    hi = 5 if quick else 8
    samples = 300 if quick else 10_000
    sample_q = 9 if quick else 12
    problems: list[str] = []
    checked = 0
    for q in range(1, hi + 1):
        for D, E in _all_splits(q):
            for blocks in ncpart._iter_partitions(len(D)):
                pi = ncpart.NonCrossingPartition._raw(D, ncpart._relabel(blocks, D))
                checked += 1
                direct = ncpart.pi_tilde(D, E, pi)
                brute = ncpart.pi_tilde_bruteforce(D, E, pi)
                if direct != brute:
                    problems.append(
                        f"routes disagree at q={q}, D={D}, pi={pi}: "
                        f"{direct} vs {brute}")
    rng = random.Random(VERIFY_SEED + 3)
    for _ in range(samples):
        q = rng.randint(1, sample_q)
        D = tuple(i for i in range(1, q + 1) if rng.random() < 0.5)
        E = tuple(i for i in range(1, q + 1) if i not in D)
        if not D:
            continue
        blocks = rng.choice(ncpart._cached_partitions(len(D)))
        pi = ncpart.NonCrossingPartition._raw(D, ncpart._relabel(blocks, D))
        checked += 1
        if ncpart.pi_tilde(D, E, pi) != ncpart.pi_tilde_bruteforce(D, E, pi):
            problems.append(f"routes disagree at sampled q={q}, D={D}, pi={pi}")
    D = _FROZEN_SPLIT_D
    E = tuple(i for i in range(1, _FROZEN_SPLIT_Q + 1) if i not in D)
    pi = ncpart.NonCrossingPartition(D, _FROZEN_SPLIT_PI)
    comp = ncpart.pi_tilde(D, E, pi)
    if comp.blocks != _FROZEN_SPLIT_COMP:
        problems.append(f"frozen q=18 instance gave {comp}")
    if ncpart.pi_tilde_bruteforce(D, E, pi).blocks != _FROZEN_SPLIT_COMP:
        problems.append("frozen q=18 instance: oracle route disagrees")
    return _finish("complement-dual-route", problems,
                   f"{checked} instances (exhaustive q<={hi}, sampled q<={sample_q}), "
                   f"frozen q=18 instance", t0)


# ---------------------------------------------------------------------------
# 4. generator moment family


def check_generator_free_poisson(quick: bool = False) -> CheckResult:
    """Generator cumulants and moments against the free Poisson family."""
    t0 = time.perf_counter()
    sizes = (2, 3) if quick else (2, 3, 5)
    max_order = 6 if quick else 8
    max_cumulant = 8 if quick else 12
    problems: list[str] = []
    for n in sizes:
        params = ModelParams(n)
        rate = Fraction(1, n)
        for q in range(1, max_cumulant + 1):
            k = model.z_cumulant(q, params)
            if k != n ** (q - 1):
                problems.append(f"n={n}: cumulant {q} is {k}, expected n**(q-1)")
            if k != freeprob.free_poisson_cumulant(rate, n, q):
                problems.append(f"n={n}: cumulant {q} disagrees with the free "
                                f"Poisson family")
        # moments m = 1..4 of the generator, then the general family
        frozen = (1, n + 1, n * n + 3 * n + 1, n ** 3 + 6 * n * n + 6 * n + 1)
        if model.z_moment(0, params) != 1:
            problems.append(f"n={n}: empty moment is not 1")
        for m in range(1, max_order + 1):
            mom = model.z_moment(m, params)
            if mom != freeprob.free_poisson_moment(rate, n, m):
                problems.append(f"n={n}: moment {m} disagrees with the free "
                                f"Poisson family")
            if m <= len(frozen) and mom != frozen[m - 1]:
                problems.append(f"n={n}: moment {m} is {mom}, "
                                f"expected {frozen[m - 1]}")
        phi = _memoized(lambda w: model.z_moment(len(w), params))
        for q in range(1, max_order + 1):
            got = ncpart.moments_to_cumulants(phi, ("z",) * q)
            if got != n ** (q - 1):
                problems.append(f"n={n}: transform route gives cumulant {got} "
                                f"at q={q}")
    return _finish("generator-free-poisson", problems,
                   f"n in {sizes}: cumulants q<={max_cumulant}, "
                   f"moments m<={max_order}, transform route", t0)


# ---------------------------------------------------------------------------
# 5. word traces, factorization vs centering


def check_word_trace_dual_route(quick: bool = False) -> CheckResult:
    """tau_word against the free product centering algorithm."""
    t0 = time.perf_counter()
    max_len = 4 if quick else 6
    sampled = 100 if quick else 1000
    problems: list[str] = []
    p2 = ModelParams(2)
    letters2 = _letters_n2()
    words = 0
    for q in range(1, max_len + 1):
        for word in itertools.product(letters2, repeat=q):
            words += 1
            if model.tau_word(word, p2) != model.centering_moment(word, p2):
                problems.append(f"routes disagree at n=2 on {_word_label(word)}")
                if len(problems) > 5:
                    return _finish("word-trace-dual-route", problems, "", t0)
    p3 = ModelParams(3)
    letters3 = _letters_n3()
    rng = random.Random(VERIFY_SEED + 5)
    for _ in range(sampled):
        q = rng.randint(1, max_len)
        word = tuple(rng.choice(letters3) for _ in range(q))
        words += 1
        if model.tau_word(word, p3) != model.centering_moment(word, p3):
            problems.append(f"routes disagree at n=3 on {_word_label(word)}")
    return _finish("word-trace-dual-route", problems,
                   f"{words} words (all length<={max_len} at n=2, "
                   f"{sampled} sampled at n=3)", t0)


def _word_label(word) -> str:
    return "".join("Z" if l.is_z else "b" for l in word)


# ---------------------------------------------------------------------------
# 6. mixed cumulants vanish


def check_mixed_cumulants_vanish(quick: bool = False) -> CheckResult:
    """Every cumulant tuple mixing the generator with matrix letters is zero."""
    t0 = time.perf_counter()
    problems: list[str] = []
    runs = [(2, _letters_n2()[1:5], 4 if quick else 6),
            (3, [matrix_letter(ratmat.matrix_unit(3, 1, 1)),
                 matrix_letter(ratmat.matrix_unit(3, 1, 2)),
                 matrix_letter(ratmat.matrix_unit(3, 2, 3)),
                 matrix_letter(ratmat.matrix_unit(3, 3, 1))],
             3 if quick else 6)]
    checked = 0
    for n, mats, max_q in runs:
        params = ModelParams(n)
        source = _memoized(lambda w: model.tau_word(w, params))
        report = freeprob.freeness_check([[Z], mats], max_q, source)
        checked += report.tuples_checked
        m = len(mats)
        expected = sum((m + 1) ** q - 1 - m ** q for q in range(2, max_q + 1))
        if report.tuples_checked != expected:
            problems.append(f"n={n}: swept {report.tuples_checked} tuples, "
                            f"expected {expected}")
        if report.truncated:
            problems.append(f"n={n}: sweep truncated below max_q={max_q}")
        if not report.certified:
            word, value = report.violations[0]
            problems.append(f"n={n}: nonzero mixed cumulant {value} on "
                            f"{_word_label(word)}")
    return _finish("mixed-cumulants-vanish", problems,
                   f"{checked} mixed tuples, n in (2, 3)", t0)


# ---------------------------------------------------------------------------
# 7. loop bookkeeping


def check_loop_bookkeeping(quick: bool = False) -> CheckResult:
    """Loop counts are even, nonnegative, and power-balanced; the frozen
    instance carries exactly two loops; summands add up to tau_word."""
    t0 = time.perf_counter()
    hi = 7 if quick else 10
    problems: list[str] = []
    checked = 0
    for q in range(1, hi + 1):
        for D, E in _all_splits(q):
            for blocks in ncpart._iter_partitions(len(D)):
                pi = ncpart.NonCrossingPartition._raw(D, ncpart._relabel(blocks, D))
                comp = ncpart.pi_tilde(D, E, pi)
                loops = model.floating_loops(D, E, pi)
                checked += 1
                if loops < 0 or loops % 2:
                    problems.append(f"bad loop count {loops} at q={q}, D={D}, pi={pi}")
                elif loops // 2 + len(comp) - 1 != len(D) - len(pi):
                    problems.append(f"power identity fails at q={q}, D={D}, pi={pi}")
    D = _FROZEN_SPLIT_D
    E = tuple(i for i in range(1, _FROZEN_SPLIT_Q + 1) if i not in D)
    pi = ncpart.NonCrossingPartition(D, _FROZEN_SPLIT_PI)
    if model.floating_loops(D, E, pi) != 2:
        problems.append(
            f"frozen q=18 instance has {model.floating_loops(D, E, pi)} loops, "
            f"expected 2")
    p2 = ModelParams(2)
    e11 = matrix_letter(ratmat.matrix_unit(2, 1, 1))
    word18 = tuple(Z if i in D else e11 for i in range(1, 19))
    breakdown = model.pi_term(word18, pi, p2)
    if breakdown.loop_count != 2 or breakdown.pi_tilde.blocks != _FROZEN_SPLIT_COMP:
        problems.append("frozen q=18 breakdown disagrees")
    rng = random.Random(VERIFY_SEED + 7)
    letters2 = _letters_n2()
    sum_words = 15 if quick else 40
    for _ in range(sum_words):
        q = rng.randint(1, 8)
        word = [rng.choice(letters2) for _ in range(q)]
        word[rng.randrange(q)] = Z
        word = tuple(word)
        D2, _ = model._split_word(word, p2)
        total = sum((model.pi_term(word, pi2, p2).value
                     for pi2 in ncpart.enumerate_nc(D2)), Fraction(0))
        if total != model.tau_word(word, p2):
            problems.append(f"summands do not add to tau on {_word_label(word)}")
    return _finish("loop-bookkeeping", problems,
                   f"{checked} split instances q<={hi}, frozen instance, "
                   f"{sum_words} summand totals", t0)


# ---------------------------------------------------------------------------
# 8. factor parameter arithmetic


def check_factor_parameters(quick: bool = False) -> CheckResult:
    """Closed-form parameter, pipeline agreement, and branch continuity."""
    t0 = time.perf_counter()
    hi = 100 if quick else 1000
    problems: list[str] = []
    prev = None
    for n in range(2, hi + 1):
        got = factors.m3_parameter(ModelParams(n))
        want = 1 + Fraction(2 * (n - 1), n * n)
        if got != want:
            problems.append(f"n={n}: parameter {got}, expected {want}")
            break
        if got <= 1:
            problems.append(f"n={n}: parameter {got} not above 1")
        if prev is not None and got >= prev:
            problems.append(f"n={n}: parameter did not decrease")
        prev = got
    if factors.m3_parameter(ModelParams(2)) != Fraction(3, 2):
        problems.append("n=2 parameter is not 3/2")
    if factors.m3_parameter(ModelParams(3)) != Fraction(13, 9):
        problems.append("n=3 parameter is not 13/9")
    if prev is not None and prev - 1 >= Fraction(2, hi):
        problems.append(f"n={hi} parameter {prev} too far from the limit 1")
    for d in range(2, 7):
        threshold = Fraction(1, d * d)
        for r in (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(7)):
            at = factors.dykema_free_product(r, threshold, d)
            below = factors.dykema_free_product(r, threshold / 2, d)
            if len(at.summands) != 1:
                problems.append(f"d={d}, r={r}: threshold case not a single factor")
                continue
            if len(below.summands) != 2 or below.summands[0].parameter != d:
                problems.append(f"d={d}, r={r}: sub-threshold shape wrong")
                continue
            if at.summands[0].parameter != below.summands[1].parameter:
                problems.append(f"d={d}, r={r}: branches disagree at the boundary")
    return _finish("factor-parameters", problems,
                   f"n<={hi} closed form+pipeline+monotone, branch boundary "
                   f"d<=6", t0)


# ---------------------------------------------------------------------------
# 9. Monte Carlo


def check_monte_carlo(quick: bool = False, threads: int = 1) -> CheckResult:
    """Wishart spectra and mixed word estimates against the exact engine."""
    t0 = time.perf_counter()
    if quick:
        config = rmt.SimulationConfig(n=2, N=300, trials=8, seed=VERIFY_SEED)
        max_len = 3
    else:
        config = rmt.SimulationConfig(n=2, N=2000, trials=50, seed=VERIFY_SEED)
        max_len = 4
    params = ModelParams(config.n)
    problems: list[str] = []

    eigs = rmt.sample_free_poisson(config, threads=threads)
    atom = rmt.atom_mass_estimate(eigs, config)
    target = 1 - 1 / config.n
    if abs(atom - target) > 0.02 * target:
        problems.append(f"atom mass {atom:.4f} not within 2% of {target}")
    quad_atom = 1 - rmt.mp_continuous_mass(config.rate, config.jump)
    if abs(quad_atom - target) > 1e-6:
        problems.append(f"integrated atom mass {quad_atom} is off")
    trial_means = eigs.mean(axis=1)
    mean = float(trial_means.mean())
    mean_se = float(trial_means.std(ddof=1)) / math.sqrt(config.trials)
    if abs(mean - 1.0) > max(3 * mean_se, 1e-12):
        problems.append(f"mean eigenvalue {mean:.5f} not within 3 SE of 1")
    spill = rmt.outside_support_fraction(eigs, config)
    if spill > 0.01:
        problems.append(f"{spill:.3%} of bulk eigenvalues outside the support")

    e11 = matrix_letter(ratmat.matrix_unit(2, 1, 1))
    x = matrix_letter(ratmat.mat_add(ratmat.matrix_unit(2, 1, 2),
                                     ratmat.matrix_unit(2, 2, 1)))
    alphabet = [Z, e11, x]
    words = [w for q in range(1, max_len + 1)
             for w in itertools.product(alphabet, repeat=q)]
    sampler = rmt.sample_free_pair(config)
    estimates = sampler.estimate_words(words, threads=threads)
    worst = 0.0
    zz_line = ""
    for word, est in zip(words, estimates):
        exact = float(model.tau_word(word, params))
        err = abs(est.value - exact)
        if any(l.is_z for l in word):
            if est.std_error > 0:
                worst = max(worst, err / est.std_error)
            if err > max(4 * est.std_error, 1e-9):
                problems.append(
                    f"{_word_label(word)}: {est.value:.6f} vs {exact:.6f} "
                    f"(se {est.std_error:.2g})")
        elif err > 1e-9 or est.std_error != 0.0:
            problems.append(f"matrix word {_word_label(word)} not exact: "
                            f"{est.value} vs {exact}")
        if word == (Z, Z):
            zz_line = f"tau(ZZ)={est.value:.5f}+-{est.std_error:.2g}"

    rerun = rmt.SimulationConfig(n=config.n, N=config.N, trials=2,
                                 seed=config.seed)
    again = rmt.sample_free_poisson(rerun)
    if not (again == eigs[:2]).all():
        problems.append("eigenvalue samples are not bit-reproducible")
    small = words[: len(alphabet) * 2]
    first = rmt.FreePairSampler(rerun).estimate_words(small)
    second = rmt.FreePairSampler(rerun).estimate_words(small, threads=2)
    if first != second:
        problems.append("estimates differ between runs or thread counts")

    return _finish(
        "monte-carlo", problems,
        f"N={config.N}, trials={config.trials}: atom={atom:.4f}, {zz_line}, "
        f"{len(words)} words, worst z-score {worst:.2f}", t0)


# ---------------------------------------------------------------------------
# runner


EXACT_CHECKS = (
    check_catalan_narayana,
    check_moment_cumulant_transforms,
    check_complement_dual_route,
    check_generator_free_poisson,
    check_word_trace_dual_route,
    check_mixed_cumulants_vanish,
    check_loop_bookkeeping,
    check_factor_parameters,
)

RMT_CHECK = check_monte_carlo


def run_all(quick: bool = False, include_rmt: bool = False, threads: int = 1,
            log: Optional[Callable[[str], None]] = None) -> list[CheckResult]:
    """Run the acceptance checks in order and return their results."""
    results = []
    for fn in EXACT_CHECKS:
        result = fn(quick=quick)
        results.append(result)
        if log is not None:
            log(f"{'ok  ' if result.ok else 'FAIL'} {result.name}: {result.detail}")
    if include_rmt:
        result = RMT_CHECK(quick=quick, threads=threads)
        results.append(result)
        if log is not None:
            log(f"{'ok  ' if result.ok else 'FAIL'} {result.name}: {result.detail}")
    return results
