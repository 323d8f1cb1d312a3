"""Largest A in [N] whose positive differences avoid a set S.

Sets are Python integers used as bitsets (bit v <-> element v).  The exact
solver is a depth-first branch and bound over candidates in increasing
order, so the first optimum it meets is the lexicographically smallest.
Two bounds prune the search: the number of remaining candidates, and the
exact optimum for shorter intervals, since a translate of an admissible
set is admissible.  Those optima are computed for every prefix length on
the way up to N.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .sequence import IntegerSet

DEFAULT_EXACT_CEILING = 200
DEFAULT_NODE_BUDGET = 50_000_000


class BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class ExtremalResult:
    N: int
    set_id: str
    best_size: int
    witness_set: tuple[int, ...]
    status: str  # exact | lower-bound
    nodes_explored: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness_set"] = list(self.witness_set)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _elements(S, N: int) -> list[int]:
    if isinstance(S, IntegerSet):
        S = S.tolist()
    return sorted({int(s) for s in S if 1 <= int(s) <= N})


def _set_id(S, N: int) -> str:
    if isinstance(S, IntegerSet) and S.source.startswith("{"):
        return f"{json.loads(S.source).get('function', 'S')} cap [{N}]"
    elems = _elements(S, N)
    return "{" + ",".join(map(str, elems)) + "}"


def bits_to_list(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def is_admissible(A, S) -> bool:
    """No difference a - a' (a > a') lies in S."""
    s = set(int(x) for x in S)
    A = sorted(A)
    return all((b - a) not in s for i, a in enumerate(A) for b in A[i + 1:])


class _Search:
    def __init__(self, elems: list[int], N: int, budget: int):
        self.N = N
        smask = 0
        for s in elems:
            smask |= 1 << s
        full = (1 << (N + 1)) - 2  # bits 1..N
        self.forward = [((smask << v) & full) for v in range(N + 1)]
        self.above = [full & ~((1 << (v + 1)) - 1) for v in range(N + 1)]
        self.table = [0] * (N + 1)  # upper bounds for prefix lengths
        self.nodes = 0
        self.budget = budget

    def _bound(self, cand: int) -> int:
        if not cand:
            return 0
        low = (cand & -cand).bit_length() - 1
        span = self.N - low + 1
        return min(cand.bit_count(), self.table[span])

    def run(self, n: int, floor_size: int) -> tuple[int, int]:
        """Best set in [n] containing 1 with size > floor_size, lexicographically first."""
        self.n = n
        self.best, self.best_mask = floor_size, 0
        mask_n = (1 << (n + 1)) - 2
        self._saved_N = self.N
        # bounds are stated for sets ending at N; shift the frame to n
        self.N = n
        try:
            self._dfs(1 << 1, 1, mask_n & self.above[1] & ~self.forward[1])
        finally:
            self.N = self._saved_N
        return self.best, self.best_mask

    def _dfs(self, chosen: int, size: int, cand: int):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExhausted
        if size > self.best:
            self.best, self.best_mask = size, chosen
        while cand:
            if size + self._bound(cand) <= self.best:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            self._dfs(chosen | low, size + 1, cand & ~self.forward[v])


def solve_exact(S, N: int, node_budget: int = DEFAULT_NODE_BUDGET,
                exact_ceiling: int = DEFAULT_EXACT_CEILING) -> ExtremalResult:
    """Exact delta_S(N) * N with the lexicographically smallest optimal set.

    Optimal sets may be translated to contain 1, and the lexicographically
    smallest one always does, so the search fixes 1 in A.  Prefix optima
    for lengths 1..N are computed first and feed the interval bound.
    """
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    if N > exact_ceiling:
        raise ValueError(f"N = {N} exceeds the exact ceiling {exact_ceiling}")
    elems = _elements(S, N)
    search = _Search(elems, N, node_budget)
    exact = True
    best_mask = 1 << 1
    for n in range(1, N + 1):
        prev = search.table[n - 1]
        try:
            size, mask = search.run(n, prev - 1 if n == N else prev)
        except BudgetExhausted:
            exact = False
            size, mask = search.best, search.best_mask
            if n < N:
                search.table[n] = prev + 1
                # keep going with the weaker bound is pointless once the budget is gone
                for k in range(n + 1, N + 1):
                    search.table[k] = search.table[k - 1] + 1
            break
        if n < N:
            search.table[n] = max(size, prev)
        else:
            best_mask = mask
    if not exact:
        g = solve_greedy(elems, N)
        found = bits_to_list(search.best_mask) if search.n == N and search.best_mask else []
        witness = tuple(found) if len(found) > g.best_size else g.witness_set
        return ExtremalResult(N, _set_id(S, N), len(witness), witness, "lower-bound",
                              search.nodes)
    witness = tuple(bits_to_list(best_mask))
    return ExtremalResult(N, _set_id(S, N), len(witness), witness, "exact", search.nodes)


def solve_greedy(S, N: int) -> ExtremalResult:
    """Scan 1..N and keep every element whose differences avoid S."""
    N = int(N)
    elems = np.asarray(_elements(S, N), dtype=np.int64)
    forbidden = np.zeros(N + 1, dtype=bool)
    chosen = []
    for n in range(1, N + 1):
        if not forbidden[n]:
            chosen.append(n)
            nxt = n + elems
            forbidden[nxt[nxt <= N]] = True
    return ExtremalResult(N, _set_id(S, N), len(chosen), tuple(chosen), "lower-bound", N)


def exhaustive(S, N: int) -> tuple[int, tuple[int, ...]]:
    """Brute force over all 2^N subsets (N <= 24): size and lexicographically
    smallest optimal set."""
    N = int(N)
    if N > 24:
        raise ValueError("exhaustive enumeration is limited to N <= 24")
    masks = np.arange(1 << N, dtype=np.uint32)  # bit i <-> element i + 1
    ok = np.ones(masks.size, dtype=bool)
    for s in _elements(S, N):
        if s < N:
            ok &= (masks & (masks >> np.uint32(s))) == 0
    valid = masks[ok]
    sizes = np.bitwise_count(valid)
    best = int(sizes.max())
    top = valid[sizes == best]
    # lexicographically smallest sorted list = largest bit-reversed mask
    rev = np.zeros(top.size, dtype=np.uint32)
    for i in range(N):
        rev |= ((top >> np.uint32(i)) & np.uint32(1)) << np.uint32(N - 1 - i)
    m = int(top[np.argmax(rev)])
    return best, tuple(i + 1 for i in range(N) if m >> i & 1)


def enumerate_max(S, N: int) -> tuple[int, tuple[int, ...]]:
    """Independent search path: visit every admissible set with no bounding.

    Feasible when S is dense enough that admissible sets are few.
    """
    N = int(N)
    s = set(_elements(S, N))
    best: list = [0, ()]

    def rec(A: list[int], start: int):
        if len(A) > best[0]:
            best[0], best[1] = len(A), tuple(A)
        for v in range(start, N + 1):
            if all((v - a) not in s for a in A):
                A.append(v)
                rec(A, v + 1)
                A.pop()

    rec([], 1)
    return best[0], best[1]
