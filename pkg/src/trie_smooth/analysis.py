"""Analytic side: dichotomy value, growth constant, bound formulas, entropy.

Notation follows :class:`~trie_smooth.pfa.StarLikePfa`: ``rho[a]`` deletion,
``read[a, q]`` entering ``q`` on ``a``, ``loop``/``ret`` the write tables,
``eta[q]`` the return probability of ``q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .errors import HypothesisError, NumericError
from .pfa import StarLikePfa

BOUNDARY_TOL = 1e-12
ROOT_TOL = 1e-10


class Verdict(str, Enum):
    LOGARITHMIC = "Logarithmic"
    UNBOUNDED = "Unbounded"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class DichotomyVerdict:
    delta: float
    verdict: Verdict
    witness: Optional[Tuple[int, int]]
    note: str = ""

    @property
    def is_logarithmic(self) -> bool:
        return self.verdict is Verdict.LOGARITHMIC


@dataclass(frozen=True)
class GammaResult:
    gamma: float
    pole: float
    per_factor_roots: List[Tuple[int, float]]
    factor_of_min: int


def delta_table(pfa: StarLikePfa) -> np.ndarray:
    """``table[a, b] = rho[a] + sum_q read[a, q] * (loop[q, b] + ret[q, b])``."""
    return pfa.rho[:, None] + pfa.read @ pfa.emit


def delta(pfa: StarLikePfa) -> Tuple[float, Tuple[int, int]]:
    """Maximum of :func:`delta_table` with its lexicographically first maximiser."""
    table = delta_table(pfa)
    a, b = np.unravel_index(int(np.argmax(table)), table.shape)
    return float(table[a, b]), (int(a), int(b))


def check_dichotomy(pfa: StarLikePfa) -> DichotomyVerdict:
    value, witness = delta(pfa)
    certain = np.flatnonzero(pfa.rho >= 1.0 - BOUNDARY_TOL)
    if certain.size:
        a = int(certain[0])
        return DichotomyVerdict(value, Verdict.DEGENERATE, (a, a),
                                f"symbol {pfa.alphabet.symbols[a]!r} is deleted with probability 1")
    if value < 1.0 - BOUNDARY_TOL:
        return DichotomyVerdict(value, Verdict.LOGARITHMIC, witness)
    note = "boundary" if value < 1.0 else ""
    return DichotomyVerdict(value, Verdict.UNBOUNDED, witness, note)


def _require_logarithmic(pfa: StarLikePfa) -> float:
    verdict = check_dichotomy(pfa)
    if not verdict.is_logarithmic:
        raise HypothesisError(
            f"growth constant needs a logarithmic automaton; verdict is {verdict.verdict.value} "
            f"(delta = {verdict.delta!r})"
        )
    return verdict.delta


def _factor_terms(pfa: StarLikePfa, a: int, dlt: float):
    """Merge output states entered on ``a`` by their loop mass ``1 - eta``.

    Returns ``(constant, [(c, weight)])`` so that the factor denominator is
    ``constant - sum weight * z / (1 - c z)``.
    """
    merged = {}
    for q in np.flatnonzero(pfa.read[a] > 0):
        c = 1.0 - float(pfa.eta[q])
        c = 0.0 if c < 1e-15 else c
        merged[c] = merged.get(c, 0.0) + dlt * float(pfa.read[a, q]) * float(pfa.eta[q])
    return 1.0 - dlt * float(pfa.rho[a]), sorted(merged.items())


def factor_denominator(pfa: StarLikePfa, a: int) -> np.ndarray:
    """Cleared polynomial of the factor for symbol ``a``, ascending coefficients in ``z``.

    ``D(z) = (1 - delta rho_a) prod_j (1 - c_j z) - sum_j w_j z prod_{k != j} (1 - c_k z)``
    over the distinct loop masses ``c_j > 0``; states that never loop
    contribute a linear term only.
    """
    dlt = _require_logarithmic(pfa)
    return _cleared(*_factor_terms(pfa, a, dlt))


def _cleared(constant, terms) -> np.ndarray:
    P = np.polynomial.polynomial
    looping = [(c, w) for c, w in terms if c > 0]
    linear = sum(w for c, w in terms if c == 0)
    full = np.array([1.0])
    for c, _ in looping:
        full = P.polymul(full, [1.0, -c])
    poly = P.polysub(constant * full, P.polymul([0.0, linear], full))
    for j, (c_j, w_j) in enumerate(looping):
        rest = np.array([1.0])
        for k, (c_k, _) in enumerate(looping):
            if k != j:
                rest = P.polymul(rest, [1.0, -c_k])
        poly = P.polysub(poly, P.polymul([0.0, w_j], rest))
    return np.trim_zeros(np.asarray(poly, dtype=float), "b")


def _rational(constant, terms, z: float) -> float:
    return constant - sum(w * z / (1.0 - c * z) for c, w in terms)


def _factor_root(constant, terms, poly) -> float:
    """Smallest positive zero of ``constant - sum w z / (1 - c z)``.

    On ``[0, 1/c_max)`` the function is strictly decreasing, positive at 0
    and tends to minus infinity (or is linear), so the zero is unique
    there; by the triangle inequality no complex zero has smaller modulus.
    Companion-matrix roots supply the candidate, bisection pins it down.
    """
    total = sum(w for _, w in terms)
    c_max = max((c for c, _ in terms), default=0.0)
    hi = constant / total  # zero of the linear minorant
    if c_max > 0:
        hi = min(hi, 1.0 / c_max)
    lo = 0.0
    if not (_rational(constant, terms, lo) > 0):
        raise NumericError("factor is not positive at the origin", (lo, hi))

    candidates = np.roots(poly[::-1]) if len(poly) > 1 else np.array([])
    poles = [1.0 / c for c, _ in terms if c > 0]
    genuine = [
        z for z in candidates
        if all(abs(z - p) > 1e-9 * max(1.0, p) for p in poles)
    ]
    real = sorted(z.real for z in genuine if abs(z.imag) <= 1e-8 * max(1.0, abs(z)) and 0 < z.real <= hi * (1 + 1e-9))
    if real:
        z0 = real[0]
        step = max(1e-9, 1e-6 * z0)
        a_, b_ = max(lo, z0 - step), min(hi, z0 + step)
        if _rational(constant, terms, a_) > 0 and (b_ >= hi or _rational(constant, terms, b_) <= 0):
            lo, hi = a_, b_

    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _rational(constant, terms, mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= ROOT_TOL * 1e-3:
            break
    if hi - lo > ROOT_TOL:
        raise NumericError(f"bisection did not reach {ROOT_TOL}", (lo, hi))
    root = 0.5 * (lo + hi)
    if genuine:
        smallest = min(abs(z) for z in genuine)
        if smallest < root * (1 - 1e-6):
            raise NumericError(
                f"companion matrix reports a zero of modulus {smallest!r} below the real zero {root!r}", (lo, hi)
            )
    return root


def gamma(pfa: StarLikePfa) -> GammaResult:
    """Reciprocal of the pole of minimum modulus of the product of per-symbol factors."""
    dlt = _require_logarithmic(pfa)
    roots = []
    for a in range(pfa.r):
        constant, terms = _factor_terms(pfa, a, dlt)
        roots.append((a, float(_factor_root(constant, terms, _cleared(constant, terms)))))
    a_min, z_min = min(roots, key=lambda item: (item[1], item[0]))
    return GammaResult(1.0 / z_min, z_min, roots, a_min)


def upper_bound_height(gamma_value: float, n: int, epsilon: float) -> int:
    """``2 * ceil((1 + eps) * log_{1/gamma} n)``; the asymptotic main term only."""
    if not 0 < gamma_value < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma_value!r}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    x = (1.0 + epsilon) * math.log(n) / math.log(1.0 / gamma_value)
    # values within 1e-12 of an integer count as that integer (ceil(11.000000000000002) = 11)
    return 2 * math.ceil(x - 1e-12)


def output_vector(pfa: StarLikePfa, a: int) -> np.ndarray:
    """Per-symbol write distribution of the state entered on ``a``."""
    if not pfa.is_read_semi_deterministic:
        raise HypothesisError("output vectors need a read-semi-deterministic automaton")
    q = pfa.reachable_state(a)
    if q is None:
        raise HypothesisError(f"symbol {pfa.alphabet.symbols[a]!r} never reaches an output state")
    return pfa.emit[q].copy()


def lower_bound_P(pfa: StarLikePfa) -> float:
    if not pfa.is_read_semi_deterministic:
        raise HypothesisError("the lower bound needs a read-semi-deterministic automaton")
    best = 0.0
    for a in range(pfa.r):
        if pfa.reachable_state(a) is None:
            continue
        vec = output_vector(pfa, a)
        best = max(best, float(np.dot(vec, vec)))
    return best


def lower_bound_height(P: float, n: int, epsilon: float) -> Optional[float]:
    """``2 (1 - eps) log_{1/P} n``, or None when ``P = 1`` makes it vacuous."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not 0 < P <= 1:
        raise ValueError(f"P must lie in (0, 1], got {P!r}")
    if P >= 1.0 - BOUNDARY_TOL:
        return None
    return 2.0 * (1.0 - epsilon) * math.log(n) / math.log(1.0 / P)


@dataclass(frozen=True)
class Entropy:
    h: float
    degenerate: bool = False


def renyi_entropy_memoryless(probs) -> Entropy:
    """Second-order Renyi entropy ``-ln(sum p_i^2) / 2`` of a memoryless source."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"not a probability vector: {p.tolist()}")
    if np.count_nonzero(p) < 2:
        return Entropy(0.0, degenerate=True)
    return Entropy(-math.log(float(np.dot(p, p))) / 2.0)


def tail_bound(n: int, k: int, coincidence_tail) -> float:
    """``k + n^2 * sum_{i > k} c_i`` for a finite list of coincidence probabilities.

    ``coincidence_tail[j]`` is the probability that two perturbations agree
    on ``k + 1 + j`` symbols; the caller chooses how far to truncate.
    """
    return k + n * n * math.fsum(coincidence_tail)


@dataclass
class AnalysisReport:
    delta: float
    verdict: str
    witness: Optional[Tuple[str, str]]
    gamma: Optional[float] = None
    pole: Optional[float] = None
    P: Optional[float] = None
    entropy: Optional[float] = None
    bounds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness else None,
            "gamma": self.gamma,
            "pole": self.pole,
            "P": self.P,
            "entropy": self.entropy,
            "bounds": self.bounds,
        }


def analyze(pfa: StarLikePfa, n: Optional[int] = None, epsilon: Optional[float] = None) -> AnalysisReport:
    """Everything the analytic side knows about ``pfa``; bounds only if ``n`` and ``epsilon`` are given."""
    verdict = check_dichotomy(pfa)
    syms = pfa.alphabet.symbols
    witness = (syms[verdict.witness[0]], syms[verdict.witness[1]]) if verdict.witness else None
    report = AnalysisReport(verdict.delta, verdict.verdict.value, witness)
    if verdict.is_logarithmic:
        g = gamma(pfa)
        report.gamma, report.pole = g.gamma, g.pole
    if pfa.is_read_semi_deterministic and verdict.verdict is not Verdict.DEGENERATE:
        report.P = lower_bound_P(pfa)
        report.entropy = math.log(1.0 / report.P) / 2.0
    if n is not None and epsilon is not None:
        upper = upper_bound_height(report.gamma, n, epsilon) if report.gamma is not None else None
        lower = lower_bound_height(report.P, n, epsilon) if report.P is not None else None
        report.bounds = {"n": n, "epsilon": epsilon, "upper": upper, "lower": lower}
    return report
