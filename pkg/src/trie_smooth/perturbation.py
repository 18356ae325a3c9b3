"""Sampling perturbed output prefixes of star-like PFAs.

Randomness contract
-------------------
Every stream is a numpy ``PCG64`` generator seeded from a
``SeedSequence``. The stream for key path ``(k1, k2, ...)`` under a master
seed is ``SeedSequence(master, spawn_key=(k1, k2, ...))``; this is the
``split`` function used throughout (string ``i`` of a set gets ``(i,)``,
trial ``j`` of an experiment gets ``(j,)``).

The scalar sampler consumes one uniform per event: one chooses the read
transition at the input state, one chooses the (symbol, target) write
event at an output state. The batch sampler draws per input symbol
instead (see :func:`simulate_batch`); the two are equal in law, not draw
for draw.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .alphabet import StringSpec
from .errors import InputUnderrunError
from .pfa import StarLikePfa


def split(master_seed: int, *keys: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))


def make_rng(master_seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(split(master_seed, *keys)))


@dataclass(frozen=True)
class SampleBudget:
    """``m`` output symbols wanted; at most ``max_input_len`` inputs read."""

    m: int
    max_input_len: Optional[int] = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"target output length must be positive, got {self.m}")
        if self.max_input_len is not None and self.max_input_len < 1:
            raise ValueError(f"max_input_len must be positive, got {self.max_input_len}")

    def input_limit(self, pfa: StarLikePfa) -> int:
        if self.max_input_len is not None:
            return self.max_input_len
        keep = float(np.min(1.0 - pfa.rho))
        if keep <= 0:
            return 64 * self.m
        return max(64, math.ceil(8 * self.m / keep))


@dataclass(frozen=True)
class PerturbedPrefix:
    output: Tuple[int, ...]
    consumed_inputs: int
    exhausted: bool


def _cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    positive = np.flatnonzero(probs > 0)
    if len(positive):
        cdf[positive[-1]:] = np.inf
    return cdf


class _Tables:
    """Cumulative distributions for the read and write choices."""

    def __init__(self, pfa: StarLikePfa):
        self.r = pfa.r
        self.v = len(pfa.output_states)
        # read choice 0 = delete, k = enter output state k-1
        self.read_cdf = np.stack([_cdf(np.concatenate(([pfa.rho[a]], pfa.read[a]))) for a in range(pfa.r)])
        # write event e < r: loop writing e; e >= r: return writing e - r
        self.write_cdf = np.stack([_cdf(np.concatenate((pfa.loop[q], pfa.ret[q]))) for q in range(self.v)])
        self.eta = pfa.eta
        with np.errstate(invalid="ignore", divide="ignore"):
            self.loop_cdf = np.stack([_cdf(pfa.loop[q] / pfa.loop[q].sum()) for q in range(self.v)])
            self.ret_cdf = np.stack([_cdf(pfa.ret[q] / self.eta[q]) for q in range(self.v)])
        self.read_lists = [row.tolist() for row in self.read_cdf]
        self.write_lists = [row.tolist() for row in self.write_cdf]


def _input_window(t: StringSpec, limit: int) -> Tuple[int, ...]:
    return t.window(limit)


def _run_scalar(tables: _Tables, inputs: Sequence[int], limit: int, m: int, rng: np.random.Generator):
    read_lists, write_lists, r = tables.read_lists, tables.write_lists, tables.r
    buf = rng.random(64)
    k = 0
    out: List[int] = []
    consumed = 0
    while True:
        if consumed >= limit:
            return PerturbedPrefix(tuple(out), consumed, True)
        if consumed >= len(inputs):
            raise InputUnderrunError(
                f"finite input of length {len(inputs)} ran out after {len(out)} of {m} output symbols"
            )
        if k == 64:
            buf, k = rng.random(64), 0
        choice = bisect_right(read_lists[inputs[consumed]], buf[k])
        k += 1
        consumed += 1
        if choice == 0:
            continue
        cdf = write_lists[choice - 1]
        while True:
            if k == 64:
                buf, k = rng.random(64), 0
            event = bisect_right(cdf, buf[k])
            k += 1
            out.append(event % r)
            if len(out) == m:
                return PerturbedPrefix(tuple(out), consumed, False)
            if event >= r:
                break


def perturb_prefix(pfa: StarLikePfa, t: StringSpec, budget: SampleBudget, seed: int) -> PerturbedPrefix:
    """Sample the first ``budget.m`` symbols of the perturbation of ``t``.

    The computation stops as soon as ``m`` symbols are written, possibly in
    the middle of an output state's loop, or once ``max_input_len`` inputs
    have been read (``exhausted``).
    """
    limit = budget.input_limit(pfa)
    return _run_scalar(_Tables(pfa), _input_window(t, limit), limit, budget.m, make_rng(seed))


def sample_perturbed_set(
    pfa: StarLikePfa, strings: Sequence[StringSpec], budget: SampleBudget, master_seed: int
) -> List[PerturbedPrefix]:
    """Perturb each string independently; string ``i`` uses stream ``split(master_seed, i)``."""
    tables = _Tables(pfa)
    limit = budget.input_limit(pfa)
    return [
        _run_scalar(tables, _input_window(t, limit), limit, budget.m, make_rng(master_seed, i))
        for i, t in enumerate(strings)
    ]


class BatchRun:
    """Vectorised sampler over the rows of an input matrix that can be extended.

    ``inputs`` has shape ``(B, L)`` with -1 marking the end of a finite
    input. The sampler works a chunk of input symbols at a time: per symbol
    it draws the read choice, the number of writes (geometric in the return
    probability of the entered state), then the written symbols, the last
    from the return law and the others from the loop law. This is the same
    output law as stepping event by event.

    Writes drawn but not yet emitted when a row reaches its target stay
    pending, so ``extend(m2)`` after ``extend(m1)`` yields outputs with the
    same law as a single ``extend(m2)``.
    """

    def __init__(self, pfa: StarLikePfa, inputs: np.ndarray, rng: np.random.Generator,
                 tables: Optional[_Tables] = None):
        self.tables = tables or _Tables(pfa)
        self.inputs = np.asarray(inputs)
        self.rng = rng
        n_rows, self.limit = self.inputs.shape
        self.keep = max(float(np.min(1.0 - pfa.rho)), 1e-3)
        self.out = np.full((n_rows, 0), -1, dtype=np.int16)
        self.outlen = np.zeros(n_rows, dtype=np.int64)
        self.pos = np.zeros(n_rows, dtype=np.int64)
        self.pend_state = np.zeros(n_rows, dtype=np.int64)
        self.pend_count = np.zeros(n_rows, dtype=np.int64)

    def _write(self, rows, state, counts, take, start):
        """Emit ``take`` of ``counts`` writes for each (row, state) group, from ``start``."""
        rng, tables = self.rng, self.tables
        seg = np.repeat(np.arange(len(rows)), take)
        offsets = np.arange(int(take.sum())) - np.repeat(np.cumsum(take) - take, take)
        last = offsets == counts[seg] - 1
        q = state[seg]
        cdf = np.where(last[:, None], tables.ret_cdf[q], tables.loop_cdf[q])
        symbols = (rng.random(seg.size)[:, None] >= cdf).sum(axis=1)
        self.out[rows[seg], start[seg] + offsets] = symbols

    def extend(self, m: int):
        """Advance every row to ``m`` output symbols (or exhaustion); returns ``(out, lengths, consumed)``."""
        if m > self.out.shape[1]:
            grown = np.full((self.out.shape[0], m), -1, dtype=np.int16)
            grown[:, : self.out.shape[1]] = self.out
            self.out = grown
        tables, rng, limit = self.tables, self.rng, self.limit

        rows = np.flatnonzero((self.pend_count > 0) & (self.outlen < m))
        if rows.size:
            counts = self.pend_count[rows]
            take = np.minimum(counts, m - self.outlen[rows])
            # pending writes are the tail of a group, so the last of them is the return
            self._write(rows, self.pend_state[rows], counts, take, self.outlen[rows])
            self.outlen[rows] += take
            self.pend_count[rows] -= take

        rows = np.flatnonzero((self.outlen < m) & (self.pos < limit) & (self.pend_count == 0))
        while rows.size:
            pos, outlen = self.pos[rows], self.outlen[rows]
            need = int(m - outlen.min())
            width = int(min(limit - pos.min(), max(16, math.ceil(1.25 * need / self.keep))))
            cols = pos[:, None] + np.arange(width)
            in_range = cols < limit
            sym = self.inputs[rows[:, None], np.minimum(cols, limit - 1)]
            valid = in_range & (sym >= 0)
            sym = np.where(valid, sym, 0)

            u = rng.random(sym.shape)
            choice = (u[..., None] >= tables.read_cdf[sym]).sum(axis=-1)
            state = choice - 1
            entered = valid & (choice > 0)
            counts = np.zeros(sym.shape, dtype=np.int64)
            counts[entered] = rng.geometric(tables.eta[state[entered]])

            start = outlen[:, None] + np.cumsum(counts, axis=1) - counts
            take = np.clip(m - start, 0, counts)
            reached = (start + counts) >= m
            done = reached.any(axis=1)
            first = np.where(done, reached.argmax(axis=1), width - 1)

            r_idx, c_idx = np.nonzero(take)
            self._write(rows[r_idx], state[r_idx, c_idx], counts[r_idx, c_idx], take[r_idx, c_idx],
                        start[r_idx, c_idx])

            at = np.arange(len(rows))
            self.outlen[rows] = np.minimum(start[:, -1] + counts[:, -1], m)
            self.pos[rows] = np.where(done, pos + first + 1, pos + width)
            self.pend_state[rows] = np.where(done, state[at, first], 0)
            self.pend_count[rows] = np.where(done, counts[at, first] - take[at, first], 0)
            stuck = ~done & ~valid[:, -1] & in_range[:, -1]
            if np.any(stuck):
                raise InputUnderrunError("finite input ran out before the sampling budget was met")
            rows = rows[~done & (self.pos[rows] < limit)]
        return self.out[:, :m], np.minimum(self.outlen, m), self.pos.copy()


def simulate_batch(
    pfa: StarLikePfa, inputs: np.ndarray, m: int, rng: np.random.Generator, tables: Optional[_Tables] = None
):
    """One-shot :class:`BatchRun`: ``(outputs, lengths, consumed)`` for target length ``m``.

    ``outputs`` has shape ``(B, m)`` padded with -1; a row is exhausted iff
    ``consumed == L`` and ``length < m``.
    """
    return BatchRun(pfa, inputs, rng, tables).extend(m)


def input_matrix(strings: Sequence[StringSpec], limit: int) -> np.ndarray:
    mat = np.full((len(strings), limit), -1, dtype=np.int64)
    for i, s in enumerate(strings):
        w = s.window(limit)
        mat[i, : len(w)] = w
    return mat


def perturb_many(
    pfa: StarLikePfa, strings: Sequence[StringSpec], budget: SampleBudget, rng: np.random.Generator
) -> List[PerturbedPrefix]:
    """Perturb all ``strings`` independently with draws from one shared stream."""
    limit = budget.input_limit(pfa)
    out, lengths, consumed = simulate_batch(pfa, input_matrix(strings, limit), budget.m, rng)
    return [
        PerturbedPrefix(tuple(row[:n].tolist()), int(c), bool(n < budget.m))
        for row, n, c in zip(out, lengths, consumed)
    ]
