"""The sets S_h = {floor(h(n))} and two independent membership tests.

Only positive elements are stored.  Every consumer downstream (difference
sets, cosine polynomials) is symmetric under n -> -n, so the +- in the
two-sided definition never needs to be materialised.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .growth import GrowthFunction, compare_to_int

# |h(n) - k| below this triggers an exact comparison
FLOOR_GUARD = 1e-6
# enumeration index capacity
MAX_INDEX = 2**40


@dataclass(frozen=True, eq=False)
class IntegerSet:
    elements: np.ndarray
    upper_bound: int
    source: str = "explicit"

    def __post_init__(self):
        arr = np.asarray(self.elements, dtype=np.int64)
        if arr.size and (np.any(np.diff(arr) <= 0) or arr[0] < 1
                         or arr[-1] > self.upper_bound):
            raise ValueError("elements must be strictly increasing within [1, N]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "elements", arr)

    @classmethod
    def from_iterable(cls, items, upper_bound: int | None = None,
                      source: str = "explicit") -> "IntegerSet":
        arr = np.unique(np.asarray(list(items), dtype=np.int64))
        if upper_bound is None:
            upper_bound = int(arr[-1]) if arr.size else 0
        return cls(arr, int(upper_bound), source)

    def __len__(self):
        return int(self.elements.size)

    def __iter__(self):
        return iter(int(x) for x in self.elements)

    def __contains__(self, n) -> bool:
        i = np.searchsorted(self.elements, n)
        return bool(i < self.elements.size and self.elements[i] == n)

    def __eq__(self, other):
        if not isinstance(other, IntegerSet):
            return NotImplemented
        return np.array_equal(self.elements, other.elements)

    def __repr__(self):
        head = ", ".join(str(x) for x in self.elements[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"IntegerSet([{head}{more}], N={self.upper_bound}, size={len(self)})"

    def restrict(self, N: int) -> "IntegerSet":
        keep = self.elements[self.elements <= N]
        return IntegerSet(keep, int(N), self.source)

    def indicator(self, N: int | None = None) -> np.ndarray:
        """Boolean array ``ind`` of length N+1 with ind[n] = (n in S)."""
        N = self.upper_bound if N is None else int(N)
        ind = np.zeros(N + 1, dtype=bool)
        ind[self.elements[self.elements <= N]] = True
        return ind

    def tolist(self) -> list[int]:
        return [int(x) for x in self.elements]

    # newline-delimited integers after a one-line JSON header
    def dump(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    def dumps(self) -> str:
        header = json.loads(self.source) if self.source.startswith("{") else {
            "function": self.source, "method": "explicit"}
        header["N"] = self.upper_bound
        lines = [json.dumps(header, sort_keys=True)]
        lines += [str(int(x)) for x in self.elements]
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, path) -> "IntegerSet":
        text = Path(path).read_text().splitlines()
        header = json.loads(text[0])
        elems = [int(line) for line in text[1:] if line.strip()]
        return cls(np.asarray(elems, dtype=np.int64), int(header["N"]),
                   json.dumps(header, sort_keys=True))


def guarded_floor(f: GrowthFunction, n) -> np.ndarray:
    """floor(h(n)) for integer n, exact near integer values of h."""
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    h = f.value(n.astype(float))
    k = np.rint(h)
    out = np.floor(h).astype(np.int64)
    for i in np.flatnonzero(np.abs(h - k) < FLOOR_GUARD):
        kk = int(k[i])
        out[i] = kk if compare_to_int(f, int(n[i]), kk) >= 0 else kk - 1
    return out


def guarded_ceil_inverse(f: GrowthFunction, n) -> np.ndarray:
    """ceil(eta(n)) for integer n >= h(base), exact near integer eta."""
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    eta = f.inverse(n.astype(float))
    m = np.rint(eta)
    out = np.ceil(eta).astype(np.int64)
    for i in np.flatnonzero(np.abs(eta - m) < FLOOR_GUARD):
        mm = int(m[i])
        # eta(n) <= m  iff  n <= h(m)
        out[i] = mm if compare_to_int(f, mm, int(n[i])) >= 0 else mm + 1
    return out


def _index_range(f: GrowthFunction, N: int) -> tuple[int, int]:
    start = max(1, math.floor(f.edge) + 1)
    h_base = float(f.value(f.base))
    if N + 1 < h_base:
        stop = f.base - 1
    else:
        stop = int(math.floor(float(f.inverse(float(N + 1))))) + 1
    if stop > MAX_INDEX:
        raise OverflowError(f"eta({N}) exceeds the index capacity {MAX_INDEX}")
    return start, max(stop, start - 1)


def generate(f: GrowthFunction, N: int) -> IntegerSet:
    """S_h intersected with [1, N] by direct guarded enumeration."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    start, stop = _index_range(f, N)
    n = np.arange(start, stop + 1, dtype=np.int64)
    vals = guarded_floor(f, n) if n.size else np.zeros(0, dtype=np.int64)
    vals = np.unique(vals[(vals >= 1) & (vals <= N)])
    source = json.dumps({"function": f.describe(), "c": f.c, "method": "enumeration",
                         "threshold": f.threshold}, sort_keys=True)
    return IntegerSet(vals, N, source)


def identity_start(f: GrowthFunction) -> int | None:
    """First n from which the floor identity is trusted, or None."""
    if f.threshold is not None:
        return max(1, math.ceil(float(f.value(f.threshold))))
    if f.kind == "pure":
        # h' >= c > 1 on [1, oo), which is all the identity needs
        return 1
    return None


def indicator_by_identity(f: GrowthFunction, lo: int, hi: int) -> np.ndarray:
    """1_S(n) = ceil(eta(n+1)) - ceil(eta(n)) for n in [lo, hi].

    Equivalent to floor(-eta(n)) - floor(-eta(n+1)).  Raises
    ``AssertionError`` if any difference leaves {0, 1}.
    """
    n = np.arange(int(lo), int(hi) + 2, dtype=np.int64)
    ce = guarded_ceil_inverse(f, n)
    diff = np.diff(ce)
    bad = np.flatnonzero((diff < 0) | (diff > 1))
    if bad.size:
        i = bad[0]
        raise AssertionError(
            f"floor identity produced {diff[i]} at n={n[i]} for {f.describe()}")
    return diff.astype(bool)


def member_by_identity(f: GrowthFunction, n: int) -> bool:
    n = int(n)
    start = identity_start(f)
    if start is None or n < start:
        return n in generate(f, n)
    return bool(indicator_by_identity(f, n, n)[0])


def count_upto(f: GrowthFunction, N: int) -> int:
    return len(generate(f, N))
