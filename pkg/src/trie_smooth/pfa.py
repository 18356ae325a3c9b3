"""Mealy-type probabilistic finite automata and the star-like normal form.

A :class:`Pfa` keeps dense transition tensors. Targets are indexed with the
input states first and the output states after them::

    read[q, a, p]   q in R, a in alphabet, p in R + W
    write[q, b, p]  q in W, b in alphabet, p in R + W

Write rows are normalised per output state over all (symbol, target)
pairs, which is what "write b and move to p with probability
write[q, b, p]" requires.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .alphabet import Alphabet
from .errors import PfaFormatError, StarLikeError

TOL = 1e-12


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pfa:
    alphabet: Alphabet
    input_states: Tuple[str, ...]
    output_states: Tuple[str, ...]
    read: np.ndarray
    write: np.ndarray
    initial: np.ndarray
    # file positions of table entries, for error messages only
    positions: Dict[Tuple[str, str, str, str], str] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "input_states", tuple(self.input_states))
        object.__setattr__(self, "output_states", tuple(self.output_states))
        names = self.input_states + self.output_states
        if not self.input_states or not self.output_states:
            raise PfaFormatError("a PFA needs at least one input and one output state")
        if len(set(names)) != len(names):
            raise PfaFormatError(f"state names must be unique, got {names!r}")
        nr, nw, r = len(self.input_states), len(self.output_states), self.alphabet.size
        read, write, initial = _frozen(self.read), _frozen(self.write), _frozen(self.initial)
        if read.shape != (nr, r, nr + nw):
            raise PfaFormatError(f"read table has shape {read.shape}, expected {(nr, r, nr + nw)}")
        if write.shape != (nw, r, nr + nw):
            raise PfaFormatError(f"write table has shape {write.shape}, expected {(nw, r, nr + nw)}")
        if initial.shape != (nr + nw,):
            raise PfaFormatError(f"initial vector has shape {initial.shape}, expected {(nr + nw,)}")
        object.__setattr__(self, "read", read)
        object.__setattr__(self, "write", write)
        object.__setattr__(self, "initial", initial)

    @property
    def states(self) -> Tuple[str, ...]:
        return self.input_states + self.output_states

    @classmethod
    def from_tables(
        cls,
        alphabet: Alphabet,
        input_states: Sequence[str],
        output_states: Sequence[str],
        read: Mapping[Tuple[str, str, str], float],
        write: Mapping[Tuple[str, str, str], float],
        initial: Mapping[str, float],
        positions: Optional[dict] = None,
    ) -> "Pfa":
        """Build from sparse ``{(from, symbol, to): p}`` tables; absent entries are 0."""
        input_states, output_states = tuple(input_states), tuple(output_states)
        states = input_states + output_states
        index = {name: i for i, name in enumerate(states)}
        nr, nw, r = len(input_states), len(output_states), alphabet.size

        def lookup(name, allowed, what):
            if name not in index:
                raise PfaFormatError(f"unknown state {name!r} in {what}")
            i = index[name]
            if allowed == "R" and i >= nr:
                raise PfaFormatError(f"{what}: {name!r} is not an input state")
            if allowed == "W" and i < nr:
                raise PfaFormatError(f"{what}: {name!r} is not an output state")
            return i

        rd = np.zeros((nr, r, nr + nw))
        for (q, a, p), prob in read.items():
            rd[lookup(q, "R", "read table"), alphabet.index(a), lookup(p, None, "read table")] = prob
        wr = np.zeros((nw, r, nr + nw))
        for (q, b, p), prob in write.items():
            wr[lookup(q, "W", "write table") - nr, alphabet.index(b), lookup(p, None, "write table")] = prob
        init = np.zeros(nr + nw)
        for q, prob in initial.items():
            init[lookup(q, None, "initial distribution")] = prob
        return cls(alphabet, input_states, output_states, rd, wr, init, positions or {})


@dataclass(frozen=True)
class Violation:
    kind: str
    location: str
    message: str
    position: Optional[str] = None

    def __str__(self):
        where = f" [{self.position}]" if self.position else ""
        return f"{self.kind} at {self.location}{where}: {self.message}"


def validate(pfa: Pfa, tol: float = TOL) -> List[Violation]:
    """Every stochasticity violation of ``pfa``; an empty list means valid."""
    out: List[Violation] = []
    syms, states = pfa.alphabet.symbols, pfa.states
    pos = pfa.positions

    for table, kind, rows in (("read", "read", pfa.input_states), ("write", "write", pfa.output_states)):
        arr = getattr(pfa, table)
        bad = np.argwhere((arr < 0) | (arr > 1))
        for qi, ai, pi in bad:
            key = (table, rows[qi], syms[ai], states[pi])
            out.append(Violation(
                "probability-range", f"{table}({rows[qi]}, {syms[ai]}, {states[pi]})",
                f"value {float(arr[qi, ai, pi])!r} outside [0, 1]", pos.get(key),
            ))
        if kind == "read":
            sums = arr.sum(axis=2)
            for qi, ai in np.argwhere(np.abs(sums - 1.0) > tol):
                out.append(Violation(
                    "read-row", f"(state {rows[qi]}, symbol {syms[ai]})",
                    f"outgoing probability sums to {float(sums[qi, ai])!r}, expected 1",
                    _row_positions(pos, table, rows[qi], syms[ai]),
                ))
        else:
            sums = arr.sum(axis=(1, 2))
            for qi in np.flatnonzero(np.abs(sums - 1.0) > tol):
                out.append(Violation(
                    "write-row", f"(state {rows[qi]})",
                    f"write probabilities sum to {float(sums[qi])!r}, expected 1",
                    _row_positions(pos, table, rows[qi]),
                ))

    for qi in np.flatnonzero((pfa.initial < 0) | (pfa.initial > 1)):
        out.append(Violation(
            "probability-range", f"initial({states[qi]})",
            f"value {float(pfa.initial[qi])!r} outside [0, 1]", pos.get(("initial", states[qi])),
        ))
    total = pfa.initial.sum()
    if abs(total - 1.0) > tol:
        out.append(Violation("initial", "initial distribution", f"sums to {float(total)!r}, expected 1"))
    return out


def _row_positions(pos, table, state, symbol=None) -> Optional[str]:
    """File positions of the entries making up one row, e.g. ``read[0], read[2]``."""
    hits = [
        where for key, where in pos.items()
        if key[0] == table and key[1] == state and (symbol is None or key[2] == symbol)
    ]
    return ", ".join(hits) if hits else None


def _star_like_problems(pfa: Pfa, tol: float = TOL) -> List[Tuple[str, str]]:
    problems = []
    if len(pfa.input_states) != 1:
        problems.append(("star-like clause (1)", f"needs exactly one input state, found {len(pfa.input_states)}"))
        return problems
    nr, nw = 1, len(pfa.output_states)
    cross = pfa.write[:, :, nr:].copy()
    for q in range(nw):
        cross[q, :, q] = 0.0
    for qi, bi, pi in np.argwhere(cross > 0):
        problems.append((
            "star-like clause (2)",
            f"output state {pfa.output_states[qi]!r} writes {pfa.alphabet.symbols[bi]!r} "
            f"and moves to output state {pfa.output_states[pi]!r}",
        ))
    loops = np.array([pfa.write[q, :, nr + q].sum() for q in range(nw)])
    for qi in np.flatnonzero(loops >= 1.0 - tol):
        problems.append((
            "star-like clause (3)",
            f"output state {pfa.output_states[qi]!r} loops with probability {loops[qi]!r}",
        ))
    return problems


@dataclass(frozen=True)
class Classification:
    is_star_like: bool
    is_canonical: bool
    is_read_semi_deterministic: bool
    is_read_deterministic: bool
    has_certain_deletion: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def classify(pfa: Pfa, tol: float = TOL) -> Classification:
    star = not _star_like_problems(pfa, tol)
    if not star:
        return Classification(False, False, False, False, False)
    canonical = abs(pfa.initial[0] - 1.0) <= tol
    rho = pfa.read[0, :, 0]
    reach = pfa.read[0, :, 1:] > 0
    semi = bool(np.all(reach.sum(axis=1) <= 1))
    det = semi and bool(np.all(rho == 0))
    certain = bool(np.any(rho >= 1.0 - tol))
    return Classification(True, bool(canonical), semi, det, certain)


@dataclass(frozen=True, eq=False)
class StarLikePfa:
    """Derived quantities of a canonical star-like PFA.

    ``rho[a]`` deletion probability, ``read[a, q]`` probability of entering
    output state ``q`` on ``a``, ``loop[q, b]`` and ``ret[q, b]`` the
    probability that ``q`` writes ``b`` and stays, respectively returns.
    """

    alphabet: Alphabet
    input_state: str
    output_states: Tuple[str, ...]
    rho: np.ndarray
    read: np.ndarray
    loop: np.ndarray
    ret: np.ndarray

    def __post_init__(self):
        for name in ("rho", "read", "loop", "ret"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def r(self) -> int:
        return self.alphabet.size

    @property
    def eta(self) -> np.ndarray:
        return self.ret.sum(axis=1)

    @property
    def emit(self) -> np.ndarray:
        """``loop + ret``: probability that an output state writes ``b`` next."""
        return self.loop + self.ret

    def reachable_state(self, a: int) -> Optional[int]:
        """The unique output state reachable on ``a``, or None if ``a`` is always deleted."""
        hits = np.flatnonzero(self.read[a] > 0)
        if len(hits) > 1:
            raise StarLikeError(
                "read-semi-determinism",
                f"symbol {self.alphabet.symbols[a]!r} reaches {len(hits)} output states",
            )
        return int(hits[0]) if len(hits) else None

    @property
    def is_read_semi_deterministic(self) -> bool:
        return bool(np.all((self.read > 0).sum(axis=1) <= 1))

    @property
    def is_read_deterministic(self) -> bool:
        return self.is_read_semi_deterministic and bool(np.all(self.rho == 0))


def to_star_like(pfa: Pfa, tol: float = TOL) -> StarLikePfa:
    problems = _star_like_problems(pfa, tol)
    if problems:
        clause, message = problems[0]
        raise StarLikeError(clause, message)
    if abs(pfa.initial[0] - 1.0) > tol:
        raise StarLikeError(
            "canonical form", f"initial probability of {pfa.input_states[0]!r} is {pfa.initial[0]!r}, expected 1"
        )
    nw = len(pfa.output_states)
    rho = pfa.read[0, :, 0]
    read = pfa.read[0, :, 1:]
    loop = np.stack([pfa.write[q, :, 1 + q] for q in range(nw)])
    ret = pfa.write[:, :, 0]
    row = rho + read.sum(axis=1)
    if np.any(np.abs(row - 1.0) > tol):
        raise StarLikeError("read rows", f"deletion plus read probabilities sum to {row.tolist()}")
    total = loop.sum(axis=1) + ret.sum(axis=1)
    if np.any(np.abs(total - 1.0) > tol):
        raise StarLikeError("write rows", f"loop plus return probabilities sum to {total.tolist()}")
    return StarLikePfa(pfa.alphabet, pfa.input_states[0], pfa.output_states, rho, read, loop, ret)


# -- edit perturbations of binary strings -------------------------------------

def _check_open_unit(**params):
    for name, value in params.items():
        if not 0.0 < value < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {value!r}")


def _binary(alphabet):
    alphabet = alphabet or Alphabet.binary()
    if alphabet.size != 2:
        raise ValueError("edit perturbations are defined for binary alphabets only")
    return alphabet


def _edit_pfa(alphabet, components):
    """Assemble a star-like PFA from per-symbol ``(state, weight, writes)`` parts."""
    outputs, read, write = [], {}, {}
    for state, a, weight, writes in components:
        if weight <= 0:
            continue
        outputs.append(state)
        read[("s", a, state)] = read.get(("s", a, state), 0.0) + weight
        for (b, target), prob in writes.items():
            if prob > 0:
                tgt = "s" if target == "s" else state
                write[(state, b, tgt)] = write.get((state, b, tgt), 0.0) + prob
    return outputs, read, write


def _sub_parts(alphabet, p, prefix="q", weight=1.0):
    a0, a1 = alphabet.symbols
    parts = []
    for a, other in ((a0, a1), (a1, a0)):
        parts.append((f"{prefix}{a}", a, weight, {(other, "s"): p, (a, "s"): 1.0 - p}))
    return parts


def _ins_parts(alphabet, p, q, prefix="q", weight=1.0):
    a0, a1 = alphabet.symbols
    parts = []
    for a in (a0, a1):
        writes = {(a0, "loop"): p * q, (a1, "loop"): p * (1.0 - q), (a, "s"): 1.0 - p}
        parts.append((f"{prefix}{a}", a, weight, writes))
    return parts


def _del_parts(alphabet, prefix="q", weight=1.0):
    return [(f"{prefix}{a}", a, weight, {(a, "s"): 1.0}) for a in alphabet.symbols]


def _assemble(alphabet, parts, delete_prob):
    outputs, read, write = _edit_pfa(alphabet, parts)
    for a in alphabet.symbols:
        if delete_prob > 0:
            read[("s", a, "s")] = delete_prob
    return Pfa.from_tables(alphabet, ["s"], outputs, read, write, {"s": 1.0})


def make_sub(p: float, alphabet: Optional[Alphabet] = None) -> Pfa:
    """Flip each symbol independently with probability ``p``."""
    _check_open_unit(p=p)
    alphabet = _binary(alphabet)
    return _assemble(alphabet, _sub_parts(alphabet, p), 0.0)


def make_ins(p: float, q: float, alphabet: Optional[Alphabet] = None) -> Pfa:
    """Insert a Geometric(p) number of random symbols (0 w.p. ``q``) before each symbol."""
    _check_open_unit(p=p, q=q)
    alphabet = _binary(alphabet)
    return _assemble(alphabet, _ins_parts(alphabet, p, q), 0.0)


def make_del(p: float, alphabet: Optional[Alphabet] = None) -> Pfa:
    """Delete each symbol independently with probability ``p``."""
    _check_open_unit(p=p)
    alphabet = _binary(alphabet)
    return _assemble(alphabet, _del_parts(alphabet, weight=1.0 - p), p)


def make_convex(
    v: Sequence[float],
    p_s: float,
    p_i: float,
    q_i: float,
    p_d: float,
    alphabet: Optional[Alphabet] = None,
) -> Pfa:
    """Per input symbol, substitute/insert/delete with weights ``v = (v_S, v_I, v_D)``.

    Components with zero weight contribute no output states, so a degenerate
    weight vector yields the same tables as the pure constructor.
    """
    v_s, v_i, v_d = (float(x) for x in v)
    if min(v_s, v_i, v_d) < 0 or abs(v_s + v_i + v_d - 1.0) > TOL:
        raise ValueError(f"weights must lie on the probability simplex, got {tuple(v)!r}")
    _check_open_unit(p_s=p_s, p_i=p_i, q_i=q_i, p_d=p_d)
    alphabet = _binary(alphabet)
    parts = (
        _sub_parts(alphabet, p_s, "sub", v_s)
        + _ins_parts(alphabet, p_i, q_i, "ins", v_i)
        + _del_parts(alphabet, "del", v_d * (1.0 - p_d))
    )
    return _assemble(alphabet, parts, v_d * p_d)


# -- JSON ---------------------------------------------------------------------

def pfa_to_json(pfa: Pfa) -> dict:
    states, syms = pfa.states, pfa.alphabet.symbols
    read = [
        {"from": pfa.input_states[q], "symbol": syms[a], "to": states[p], "p": float(pfa.read[q, a, p])}
        for q, a, p in np.argwhere(pfa.read != 0)
    ]
    write = [
        {"from": pfa.output_states[q], "symbol": syms[b], "to": states[p], "p": float(pfa.write[q, b, p])}
        for q, b, p in np.argwhere(pfa.write != 0)
    ]
    return {
        "alphabet": list(syms),
        "input_states": list(pfa.input_states),
        "output_states": list(pfa.output_states),
        "initial": {states[i]: float(x) for i, x in enumerate(pfa.initial) if x != 0},
        "read": read,
        "write": write,
    }


def pfa_from_json(obj: dict) -> Pfa:
    """Parse the JSON object form; stochasticity is *not* checked here."""
    try:
        alphabet = Alphabet(tuple(obj["alphabet"]))
        input_states = list(obj["input_states"])
        output_states = list(obj["output_states"])
        initial = {str(k): float(v) for k, v in obj["initial"].items()}
    except (KeyError, TypeError, AttributeError) as exc:
        raise PfaFormatError(f"malformed PFA document: {exc!r}") from None

    positions = {}
    for q, prob in initial.items():
        positions[("initial", q)] = f"initial.{q}"

    def entries(section):
        table = {}
        for i, entry in enumerate(obj.get(section, [])):
            where = f"{section}[{i}]"
            try:
                key = (str(entry["from"]), str(entry["symbol"]), str(entry["to"]))
                prob = float(entry["p"])
            except (KeyError, TypeError, ValueError) as exc:
                raise PfaFormatError(f"{where}: malformed transition ({exc!r})") from None
            if key in table:
                raise PfaFormatError(f"{where}: duplicate transition {key!r} (first at {positions[(section,) + key]})")
            table[key] = prob
            positions[(section,) + key] = where
        return table

    read, write = entries("read"), entries("write")
    return Pfa.from_tables(alphabet, input_states, output_states, read, write, initial, positions)


def load_pfa(path, check: bool = True) -> Pfa:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise PfaFormatError(f"{path}: invalid JSON ({exc})") from None
    pfa = pfa_from_json(obj)
    if check:
        problems = validate(pfa)
        if problems:
            raise PfaFormatError(f"{path}: " + "; ".join(str(v) for v in problems))
    return pfa


def dump_pfa(pfa: Pfa, path) -> None:
    Path(path).write_text(json.dumps(pfa_to_json(pfa), indent=2) + "\n")
