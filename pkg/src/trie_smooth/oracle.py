"""Exact prefix and coincidence probabilities, with truncation made explicit.

For a prefix ``alpha`` of length ``m`` the dynamic program tracks
``f[i, j]``: the probability that after consuming ``t[1..i]`` the automaton
is back at its input state having written exactly ``alpha[1..j]``. The
event "alpha is a prefix of the output" is credited to the input symbol
during whose computation the ``m``-th symbol is written, so nothing is
counted twice. Mass still waiting at ``i = L`` is reported as residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .alphabet import StringSpec
from .errors import EnumerationSizeError
from .perturbation import SampleBudget, input_matrix, make_rng, simulate_batch
from .pfa import StarLikePfa

ENUMERATION_CAP = 2_000_000


@dataclass(frozen=True)
class ProbabilityInterval:
    """The true value lies in ``[lower, lower + residual]``."""

    lower: float
    residual: float

    @property
    def upper(self) -> float:
        return self.lower + self.residual

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= x <= self.upper + slack


def symbol_output_exact(pfa: StarLikePfa, a: int, beta: Sequence[int]) -> float:
    """Probability that the computation on the single symbol ``a`` writes exactly ``beta``."""
    if len(beta) == 0:
        return float(pfa.rho[a])
    head, last = list(beta[:-1]), beta[-1]
    per_state = pfa.read[a] * np.prod(pfa.loop[:, head], axis=1) * pfa.ret[:, last]
    return float(per_state.sum())


def symbol_prefix_exact(pfa: StarLikePfa, a: int, beta: Sequence[int]) -> float:
    """Probability that the single-symbol output on ``a`` starts with ``beta`` (nonempty)."""
    if len(beta) == 0:
        raise ValueError("beta must be nonempty")
    head, last = list(beta[:-1]), beta[-1]
    per_state = pfa.read[a] * np.prod(pfa.loop[:, head], axis=1) * pfa.emit[:, last]
    return float(per_state.sum())


def default_truncation(pfa: StarLikePfa, m: int) -> int:
    keep = float(np.min(1.0 - pfa.rho))
    return m * math.ceil(4.0 / keep) + 16


def _symbol_tables(pfa: StarLikePfa, a: int, alpha: Sequence[int]):
    """Transition matrix ``T[j, k]`` (write exactly ``alpha[j:k]``) and completion vector.

    ``c[j]`` is the probability that the symbol's output starts with ``alpha[j:]``.
    """
    m = len(alpha)
    idx = np.asarray(alpha)
    loop = pfa.loop[:, idx]  # (v, m)
    ret = pfa.ret[:, idx]
    emit = pfa.emit[:, idx]
    r = pfa.read[a]
    T = np.zeros((m, m))
    c = np.zeros(m)
    for j in range(m):
        T[j, j] = pfa.rho[a]
        # before[:, k] = prod of loop over alpha[j:j+k]
        before = np.concatenate((np.ones((loop.shape[0], 1)), np.cumprod(loop[:, j:], axis=1)[:, :-1]), axis=1)
        exact = r @ (before * ret[:, j:])  # exact[k]: write alpha[j:j+k+1] and return
        T[j, j + 1:] = exact[: m - j - 1]
        c[j] = r @ (before[:, -1] * emit[:, -1])
    return T, c


def prefix_probability(
    pfa: StarLikePfa, t: StringSpec, alpha: Sequence[int], truncation: Optional[int] = None
) -> ProbabilityInterval:
    """Probability that ``alpha`` is a prefix of the perturbation of ``t``.

    Only the first ``truncation`` input symbols are expanded; whatever mass
    has not decided by then is the residual.
    """
    m = len(alpha)
    if m == 0:
        return ProbabilityInterval(1.0, 0.0)
    L = default_truncation(pfa, m) if truncation is None else truncation
    if L < m:
        raise ValueError(f"truncation {L} is shorter than the prefix length {m}")
    inputs = t.window(L)
    tables = {a: _symbol_tables(pfa, a, alpha) for a in set(inputs)}
    f = np.zeros(m)
    f[0] = 1.0
    lower = []
    for i in range(L):
        if i >= len(inputs):
            # a finite input ends: unfinished mass can never complete
            return ProbabilityInterval(math.fsum(lower), 0.0)
        T, c = tables[inputs[i]]
        lower.append(float(f @ c))
        f = f @ T
    return ProbabilityInterval(math.fsum(lower), float(f.sum()))


def coincidence_probability(
    pfa: StarLikePfa,
    t: StringSpec,
    m: int,
    truncation: Optional[int] = None,
    cap: int = ENUMERATION_CAP,
) -> ProbabilityInterval:
    """Probability that two independent perturbations of ``t`` share their first ``m`` symbols."""
    if m == 0:
        return ProbabilityInterval(1.0, 0.0)
    count = pfa.r ** m
    if count > cap:
        raise EnumerationSizeError(
            f"{pfa.r}^{m} = {count} prefixes exceed the enumeration cap {cap}; use mc_coincidence instead"
        )
    L = default_truncation(pfa, m) if truncation is None else truncation
    lows, extra = [], []
    for alpha in product(range(pfa.r), repeat=m):
        iv = prefix_probability(pfa, t, alpha, L)
        lows.append(iv.lower * iv.lower)
        extra.append(iv.upper * iv.upper - iv.lower * iv.lower)
    return ProbabilityInterval(math.fsum(lows), math.fsum(extra))


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    trials: int
    exhausted: int
    warning: Optional[str] = None


def mc_coincidence(
    pfa: StarLikePfa,
    t: StringSpec,
    m: int,
    trials: int,
    seed: int,
    budget: Optional[SampleBudget] = None,
) -> McEstimate:
    """Fraction of independent output pairs agreeing on ``m`` symbols, with binomial standard error."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if m == 0:
        return McEstimate(1.0, 0.0, trials, 0)
    budget = budget or SampleBudget(m)
    limit = budget.input_limit(pfa)
    window = t.window(limit)
    if len(window) < limit and not t.is_infinite:
        limit = len(window)
    rng = make_rng(seed)
    inputs = np.broadcast_to(input_matrix([t], limit), (2 * trials, limit))
    out, lengths, _ = simulate_batch(pfa, inputs, m, rng)
    full = lengths == m
    exhausted = int(np.count_nonzero(~full))
    agree = full[:trials] & full[trials:] & np.all(out[:trials] == out[trials:], axis=1)
    est = float(np.count_nonzero(agree)) / trials
    se = math.sqrt(est * (1.0 - est) / trials)
    warning = None
    if exhausted > 0.01 * 2 * trials:
        warning = f"{exhausted} of {2 * trials} samples ran out of input before {m} symbols"
    return McEstimate(est, se, trials, exhausted, warning)

