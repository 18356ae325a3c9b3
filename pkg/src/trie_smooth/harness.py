"""Monte Carlo smoothed-height experiments and CSV output.

The worst case over all input sets cannot be searched, so every
experiment is conditional on a named adversarial family; results are
labelled accordingly.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from .alphabet import Alphabet, StringSpec, lcp
from .analysis import analyze
from .errors import StarLikeError
from .perturbation import BatchRun, SampleBudget, _Tables, input_matrix, make_rng
from .pfa import Pfa, classify, load_pfa, pfa_from_json, to_star_like, validate
from .trie import SATURATED, Trie

DEFAULT_SEED = 1729
THREADS_ENV = "TRIE_SMOOTH_THREADS"
SATURATION_WARN = 0.05
# outputs are first sampled this deep; deeper only if some pair agrees that far
FIRST_STAGE = 64
LABEL = "family-conditional smoothed height"

CSV_COLUMNS = (
    "n", "mean_height", "max_height", "stddev", "saturated",
    "gamma", "upper_bound", "P", "lower_bound", "delta", "verdict",
)


@dataclass(frozen=True)
class AdversarialFamily:
    """``common_prefix``: ``block^repetitions . binary(i) . block^inf``;
    ``periodic``/``explicit``: a fixed list of string specs."""

    kind: str = "common_prefix"
    block: str = "1"
    repetitions: Optional[int] = None
    tail_width: Optional[int] = None
    strings: Sequence[dict] = ()

    def __post_init__(self):
        if self.kind not in ("common_prefix", "periodic", "explicit"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "common_prefix" and not self.block:
            raise ValueError("common_prefix needs a nonempty block")

    @classmethod
    def from_json(cls, obj: dict, base: Optional[Path] = None) -> "AdversarialFamily":
        obj = dict(obj)
        kind = obj.pop("kind", "common_prefix")
        if kind == "explicit" and "file" in obj:
            path = Path(obj.pop("file"))
            if base is not None and not path.is_absolute():
                path = base / path
            obj["strings"] = json.loads(path.read_text())
        return cls(kind=kind, **obj)


def default_repetitions(block: str, depth_cap: int, upper: Optional[int]) -> int:
    window = max(depth_cap, 8 * upper) if upper else depth_cap
    return math.ceil(window / len(block))


def generate_family(family: AdversarialFamily, n: int, alphabet: Alphabet, repetitions: Optional[int] = None):
    """The first ``n`` strings of ``family`` (deterministic)."""
    if family.kind == "common_prefix":
        width = family.tail_width or max(1, math.ceil(math.log2(n)))
        if n > 2 ** width:
            raise ValueError(f"tail width {width} yields only {2 ** width} distinct strings, {n} requested")
        block = alphabet.encode(family.block)
        reps = family.repetitions if family.repetitions is not None else repetitions
        if reps is None:
            raise ValueError("common_prefix family needs a repetition count")
        head = block * reps
        zero, one = 0, 1
        out = []
        for i in range(n):
            tail = tuple(one if (i >> (width - 1 - k)) & 1 else zero for k in range(width))
            out.append(StringSpec(alphabet, head + tail, block))
        return out

    if len(family.strings) < n:
        raise ValueError(f"family has {len(family.strings)} strings, {n} requested")
    out = [StringSpec.from_json(obj, alphabet) for obj in family.strings[:n]]
    for i in range(n):
        for j in range(i):
            s, t = out[i], out[j]
            cap = 2 * (_span(s) + _span(t)) + 1
            if lcp(s, t, cap).capped:
                raise ValueError(f"family strings {j} and {i} are equal")
    return out


def _span(s: StringSpec) -> int:
    return len(s.prefix) + len(s.period or ())


@dataclass
class ExperimentConfig:
    pfa: Pfa
    family: AdversarialFamily = field(default_factory=AdversarialFamily)
    n: int = 2
    trials: int = 1
    epsilon: float = 0.1
    depth_cap: Optional[int] = None
    m: Optional[int] = None
    max_input_len: Optional[int] = None
    seed: int = DEFAULT_SEED
    output: Optional[str] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if self.depth_cap is not None and self.depth_cap < 1:
            raise ValueError(f"depth_cap must be positive, got {self.depth_cap}")

    def cap_for(self, n: int) -> int:
        if self.depth_cap is not None:
            return self.depth_cap
        return math.ceil(16 * math.log2(n)) + 64

    @classmethod
    def from_json(cls, obj: dict, base: Optional[Path] = None) -> "ExperimentConfig":
        obj = dict(obj)
        spec = obj.pop("pfa")
        if isinstance(spec, str):
            path = Path(spec)
            if base is not None and not path.is_absolute():
                path = base / path
            pfa = load_pfa(path)
        else:
            pfa = pfa_from_json(spec)
            problems = validate(pfa)
            if problems:
                raise ValueError("; ".join(str(p) for p in problems))
        family = AdversarialFamily.from_json(obj.pop("family", {}), base)
        budget = obj.pop("budget", {}) or {}
        return cls(pfa=pfa, family=family, m=budget.get("m"), max_input_len=budget.get("L"), **obj)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_json(json.loads(path.read_text()), path.parent)


@dataclass
class HeightStats:
    n: int
    heights: List[Optional[int]]
    saturated: int
    mean: Optional[float]
    max: Optional[int]
    min: Optional[int]
    stddev: Optional[float]
    delta: float
    verdict: str
    gamma: Optional[float] = None
    upper_bound: Optional[int] = None
    P: Optional[float] = None
    lower_bound: Optional[float] = None
    label: str = LABEL

    @property
    def trials(self) -> int:
        return len(self.heights)

    @property
    def unreliable(self) -> bool:
        return self.saturated > SATURATION_WARN * self.trials

    def row(self) -> dict:
        return {
            "n": self.n, "mean_height": self.mean, "max_height": self.max, "stddev": self.stddev,
            "saturated": self.saturated, "gamma": self.gamma, "upper_bound": self.upper_bound,
            "P": self.P, "lower_bound": self.lower_bound, "delta": self.delta, "verdict": self.verdict,
        }


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        return max(1, int(raw))
    return 1


def _saturating_height(arity, out, lengths, cap) -> Optional[int]:
    trie = Trie(arity, cap)
    rows = out[:, :cap].tolist()
    for row, k in zip(rows, lengths.tolist()):
        trie.insert(row if k >= len(row) else row[:k])
        if trie.saturated:
            return None
    h = trie.height
    return None if h == SATURATED else h


def _trial_height(star, tables, inputs, m, cap, seed, trial) -> Optional[int]:
    run = BatchRun(star, inputs, make_rng(seed, trial), tables)
    first = min(m, cap, FIRST_STAGE)
    out, lengths, _ = run.extend(first)
    h = _saturating_height(star.r, out, lengths, first)
    if h is not None or first == min(m, cap):
        return h
    out, lengths, _ = run.extend(m)
    return _saturating_height(star.r, out, lengths, cap)


def run_height_experiment(cfg: ExperimentConfig, n: Optional[int] = None, threads: Optional[int] = None) -> HeightStats:
    """Perturb the family ``cfg.trials`` times and record the trie height of each trial.

    Trial ``j`` draws from stream ``split(cfg.seed, j)``; results are
    reduced in trial order, so the thread count never changes the output.
    """
    n = cfg.n if n is None else n
    flags = classify(cfg.pfa)
    if not (flags.is_star_like and flags.is_canonical):
        raise StarLikeError("experiment", "the perturbation must be star-like and in canonical form")
    star = to_star_like(cfg.pfa)
    cap = cfg.cap_for(n)
    report = analyze(star, n, cfg.epsilon)
    upper = report.bounds.get("upper")
    strings = generate_family(cfg.family, n, star.alphabet, default_repetitions(cfg.family.block, cap, upper))
    budget = SampleBudget(cfg.m or cap, cfg.max_input_len)
    inputs = input_matrix(strings, budget.input_limit(star))
    tables = _Tables(star)

    def one(trial):
        return _trial_height(star, tables, inputs, budget.m, cap, cfg.seed, trial)

    workers = threads or thread_count()
    if workers > 1 and cfg.trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            heights = list(pool.map(one, range(cfg.trials)))
    else:
        heights = [one(j) for j in range(cfg.trials)]

    ok = [h for h in heights if h is not None]
    # outside the logarithmic regime the bounds do not apply; only the verdict is stamped
    bounded = report.verdict == "Logarithmic"
    return HeightStats(
        n=n,
        heights=heights,
        saturated=len(heights) - len(ok),
        mean=statistics.fmean(ok) if ok else None,
        max=max(ok) if ok else None,
        min=min(ok) if ok else None,
        stddev=statistics.pstdev(ok) if ok else None,
        delta=report.delta,
        verdict=report.verdict,
        gamma=report.gamma if bounded else None,
        upper_bound=upper if bounded else None,
        P=report.P if bounded else None,
        lower_bound=report.bounds.get("lower") if bounded else None,
    )


def sweep_n(cfg: ExperimentConfig, n_values: Sequence[int], threads: Optional[int] = None) -> List[HeightStats]:
    return [run_height_experiment(cfg, n, threads) for n in n_values]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def format_csv(rows: Sequence[HeightStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for stats in rows:
        row = stats.row()
        writer.writerow([_cell(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows: Sequence[HeightStats], path: Union[str, Path]) -> None:
    Path(path).write_text(format_csv(rows))
