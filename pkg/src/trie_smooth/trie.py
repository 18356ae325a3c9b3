"""r-ary tries with exact height measurement.

Strings are inserted lazily: a leaf holds a string index and is only pushed
down when another string arrives on the same branch, so each string is
stored up to its minimal distinguishing prefix. Depth is bounded by
``depth_cap``; two strings that agree on the first ``depth_cap`` symbols
mark the trie as saturated instead of raising.
"""
from __future__ import annotations

from itertools import combinations
from typing import List, Sequence, Union

from .alphabet import StringSpec, lcp

SATURATED = "saturated"

_END = -1  # branch label for "the finite string ends here"

Height = Union[int, str]


class _Node:
    __slots__ = ("depth", "children")

    def __init__(self, depth: int):
        self.depth = depth
        self.children = {}


class Trie:
    def __init__(self, arity: int, depth_cap: int):
        if depth_cap < 1:
            raise ValueError(f"depth_cap must be positive, got {depth_cap}")
        self.arity = arity
        self.depth_cap = depth_cap
        self.root = _Node(0)
        self.saturated = False
        self.size = 0
        self._windows: List[Sequence[int]] = []
        self._max_shared_depth = 0

    def insert(self, word: Sequence[int]) -> None:
        """Insert a symbol sequence (already truncated to at most ``depth_cap``)."""
        cap = self.depth_cap
        idx = len(self._windows)
        self._windows.append(word)
        self.size += 1
        node = self.root
        d = 0
        while True:
            if d >= cap:
                # ran through the whole budget without a mismatch
                self.saturated = True
                bucket = node.children.get(_END)
                if isinstance(bucket, list):
                    bucket.append(idx)
                else:
                    node.children[_END] = [idx] if bucket is None else [bucket, idx]
                return
            sym = word[d] if d < len(word) else _END
            child = node.children.get(sym)
            if child is None:
                node.children[sym] = idx
                return
            if isinstance(child, _Node):
                node = child
                d += 1
                continue
            if sym == _END:
                # two equal finite strings
                self.saturated = True
                if isinstance(child, list):
                    child.append(idx)
                else:
                    node.children[sym] = [child, idx]
                return
            self._split(node, sym, child, idx, d)
            return

    def _split(self, node: _Node, sym: int, other: int, idx: int, d: int) -> None:
        a, b = self._windows[idx], self._windows[other]
        cap = self.depth_cap
        while True:
            child = _Node(d + 1)
            node.children[sym] = child
            node = child
            d += 1
            if d > self._max_shared_depth:
                self._max_shared_depth = d
            if d >= cap:
                self.saturated = True
                node.children[_END] = [other, idx]
                return
            sa = a[d] if d < len(a) else _END
            sb = b[d] if d < len(b) else _END
            if sa != sb:
                node.children[sa] = idx
                node.children[sb] = other
                return
            if sa == _END:
                self.saturated = True
                node.children[_END] = [other, idx]
                return
            sym = sa

    @property
    def height(self) -> Height:
        if self.saturated:
            return SATURATED
        return self._max_shared_depth

    def node_count(self) -> int:
        count, stack = 0, [self.root]
        while stack:
            node = stack.pop()
            count += 1
            stack.extend(c for c in node.children.values() if isinstance(c, _Node))
        return count


def build_trie(strings: Sequence[StringSpec], depth_cap: int) -> Trie:
    """Build a trie over ``strings``; duplicates are allowed and saturate it."""
    if not strings:
        raise ValueError("cannot build a trie over an empty list of strings")
    alphabet = strings[0].alphabet
    trie = Trie(alphabet.size, depth_cap)
    for s in strings:
        if s.alphabet != alphabet:
            raise ValueError("all strings of a trie must share one alphabet")
        trie.insert(s.window(depth_cap))
    return trie


def height(trie: Trie) -> Height:
    """Maximum lcp over distinct pairs, or ``SATURATED``."""
    return trie.height


def height_by_pairwise_lcp(strings: Sequence[StringSpec], cap: int) -> Height:
    """Brute-force height: the maximum pairwise lcp, computed pair by pair."""
    best = 0
    for s, t in combinations(strings, 2):
        res = lcp(s, t, cap)
        if res.capped:
            return SATURATED
        best = max(best, res.length)
    return best
