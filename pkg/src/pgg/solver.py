"""Exact PNE existence by backtracking search, and CNF export.

The search keeps, for every vertex, the weighted degree already committed
by neighbours assigned 1 and the residual weight of unassigned neighbours.
The final active degree of any completion lies in
``[committed, committed + residual]``; a value ``b`` stays feasible for a
vertex only if its pattern produces ``b`` somewhere in that interval.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .game import MAX_BRUTE_FORCE, GameInstance, Profile, enumerate_pne, is_pne

__all__ = [
    "Status",
    "SolveResult",
    "DEFAULT_BUDGET",
    "decide_pne",
    "solve",
    "SearchState",
    "CnfFormula",
    "export_cnf",
    "format_dimacs",
]

DEFAULT_BUDGET = 10**7


class Status(enum.Enum):
    EXISTS = "exists"
    NOT_EXISTS = "not_exists"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class SolveResult:
    status: Status
    profile: Optional[Profile] = None
    nodes: int = 0
    method: str = "backtrack"

    @property
    def exists(self) -> Optional[bool]:
        if self.status is Status.BUDGET_EXCEEDED:
            return None
        return self.status is Status.EXISTS

    def to_json(self) -> dict:
        out = {"exists": self.exists, "status": self.status.value,
               "nodes": self.nodes, "method": self.method}
        if self.profile is not None:
            out["profile"] = "".join(map(str, self.profile))
        return out


class _Conflict(Exception):
    def __init__(self, levels: int):
        self.levels = levels  # bitmask of decision levels responsible


class SearchState:
    """Partial assignment with committed/residual degree bookkeeping.

    ``value[v]`` is 0, 1 or -1 (unassigned).  Every assignment carries a
    bitmask of the decision levels it depends on, so that conflicts can be
    traced back to the decisions that caused them.  Changes are recorded on
    a trail and can be rolled back to any earlier mark.
    """

    def __init__(self, g: GameInstance):
        self.g = g
        n = g.n
        self.value = [-1] * (n + 1)
        self.reason = [0] * (n + 1)
        self.committed = [0] * (n + 1)
        self.residual = [0] * (n + 1)
        self.nbrs = [()] + [g.neighbors(v) for v in range(1, n + 1)]
        for v in range(1, n + 1):
            self.residual[v] = sum(w for _, w in self.nbrs[v])
        # prefix counts of ones in each pattern up to the weighted degree
        self.ones = [None]
        for v in range(1, n + 1):
            table = g.pattern(v).table(self.residual[v] + 1)
            acc = [0]
            for b in table:
                acc.append(acc[-1] + b)
            self.ones.append(acc)
        self.trail: List[int] = []

    def _fits(self, v: int, b: int, lo: int, hi: int) -> bool:
        """Does the pattern of ``v`` output ``b`` somewhere in ``[lo, hi]``?"""
        if lo > hi:
            return False
        ones = self.ones[v][hi + 1] - self.ones[v][lo]
        return ones > 0 if b else ones < hi - lo + 1

    def feasible(self, v: int, b: int) -> bool:
        lo = self.committed[v]
        return self._fits(v, b, lo, lo + self.residual[v])

    def _blame(self, v: int, skip: int = 0) -> int:
        """Reasons of the assigned vertices among ``v`` and its neighbours."""
        mask = self.reason[v] if self.value[v] >= 0 else 0
        for u, _ in self.nbrs[v]:
            if u != skip and self.value[u] >= 0:
                mask |= self.reason[u]
        return mask

    def assign(self, v: int, b: int, reason: int = 0) -> None:
        self.value[v] = b
        self.reason[v] = reason
        self.trail.append(v)
        for u, w in self.nbrs[v]:
            self.residual[u] -= w
            if b:
                self.committed[u] += w

    def undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            v = self.trail.pop()
            b = self.value[v]
            self.value[v] = -1
            for u, w in self.nbrs[v]:
                self.residual[u] += w
                if b:
                    self.committed[u] -= w

    def propagate(self, queue: List[int]) -> None:
        """Interval propagation from the dirty vertices in ``queue``.

        An assigned vertex whose value its pattern can no longer produce is
        a conflict.  An unassigned vertex with one feasible value gets it.
        An assigned vertex also forces an unassigned neighbour when only one
        of the neighbour's values keeps its own value feasible.  Raises
        ``_Conflict`` with the responsible decision levels.
        """
        dirty = set(queue)
        while queue:
            c = queue.pop()
            dirty.discard(c)
            b = self.value[c]
            forced = []
            if b >= 0:
                lo = self.committed[c]
                hi = lo + self.residual[c]
                if not self._fits(c, b, lo, hi):
                    raise _Conflict(self._blame(c))
                for u, w in self.nbrs[c]:
                    if self.value[u] >= 0:
                        continue
                    can1 = self._fits(c, b, lo + w, hi)
                    can0 = self._fits(c, b, lo, hi - w)
                    if can1 != can0:
                        forced.append((u, 1 if can1 else 0, self._blame(c, skip=u)))
            else:
                f0, f1 = self.feasible(c, 0), self.feasible(c, 1)
                if not (f0 or f1):
                    raise _Conflict(self._blame(c))
                if f0 != f1:
                    forced.append((c, 1 if f1 else 0, self._blame(c)))
            for u, val, why in forced:
                if self.value[u] >= 0:
                    if self.value[u] != val:
                        raise _Conflict(why | self.reason[u])
                    continue
                self.assign(u, val, why)
                for x in (u,) + tuple(x for x, _ in self.nbrs[u]):
                    if x not in dirty:
                        dirty.add(x)
                        queue.append(x)


def decide_pne(
    g: GameInstance,
    budget: int = DEFAULT_BUDGET,
    fixed: Optional[Dict[int, int]] = None,
) -> SolveResult:
    """Find a PNE, prove none exists, or give up after ``budget`` nodes.

    Depth-first search over vertices in order of decreasing weighted degree,
    trying first the value the pattern suggests at the committed degree.
    Exhausted subtrees jump back to the deepest decision involved in their
    conflicts.  ``fixed`` pins vertices to given bits; the answer is then
    about PNE extending that partial profile.
    """
    n = g.n
    st = SearchState(g)
    order = sorted(range(1, n + 1), key=lambda v: (-g.weighted_degree(v), v))
    try:
        for v, b in sorted((fixed or {}).items()):
            if st.value[v] == -1:
                st.assign(v, int(b))
            elif st.value[v] != b:
                raise _Conflict(0)
        st.propagate(list(range(1, n + 1)))
    except _Conflict:
        return SolveResult(Status.NOT_EXISTS, None, 1)

    def next_pos(start):
        for i in range(start, n):
            if st.value[order[i]] == -1:
                return i
        return n

    # one frame per decision level: [trail mark, order position, values left, conflict mask]
    frames: List[list] = []
    nodes = 0
    pos = next_pos(0)
    while True:
        if pos == n:
            return _finish(g, st, max(nodes, 1))
        v = order[pos]
        first = g.pattern(v).eval(st.committed[v])
        frames.append([len(st.trail), pos, [first, 1 - first], 0])
        while frames:
            frame = frames[-1]
            level = len(frames)
            bit = 1 << level
            if not frame[2]:
                conf = frame[3] & ~bit
                frames.pop()
                if not conf:
                    return SolveResult(Status.NOT_EXISTS, None, nodes)
                target = conf.bit_length() - 1
                del frames[target:]
                frames[-1][3] |= conf
                continue
            b = frame[2].pop(0)
            st.undo_to(frame[0])
            nodes += 1
            if nodes > budget:
                return SolveResult(Status.BUDGET_EXCEEDED, None, nodes)
            u = order[frame[1]]
            try:
                st.assign(u, b, bit)
                st.propagate([u] + [x for x, _ in st.nbrs[u]])
            except _Conflict as exc:
                frame[3] |= exc.levels
                continue
            pos = next_pos(frame[1] + 1)
            break
        else:
            return SolveResult(Status.NOT_EXISTS, None, nodes)


def _finish(g, st, nodes):
    profile = tuple(st.value[1:])
    assert is_pne(g, profile).is_pne, "solver produced a non-equilibrium"
    return SolveResult(Status.EXISTS, profile, nodes)


def solve(g: GameInstance, method: str = "auto", budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Dispatch to brute force or backtracking (``auto`` prefers brute force for n <= 20)."""
    if method == "auto":
        method = "brute" if g.n <= 20 else "backtrack"
    if method == "brute":
        found = enumerate_pne(g, max_count=1)
        if found:
            return SolveResult(Status.EXISTS, found[0], 1 << g.n, "brute")
        return SolveResult(Status.NOT_EXISTS, None, 1 << g.n, "brute")
    if method == "backtrack":
        return decide_pne(g, budget)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# CNF export

@dataclass
class CnfFormula:
    """Variables ``1..n`` are the vertices; higher ones are counter bits."""

    num_vars: int
    clauses: List[List[int]] = field(default_factory=list)
    vertex_vars: Dict[int, int] = field(default_factory=dict)


def _seq_counter(inputs: List[int], width: int, fresh, clauses) -> List[int]:
    """Sequential counter with both implication directions.

    Returns ``r`` where ``r[j]`` is true iff at least ``j + 1`` of ``inputs``
    are true, for ``j < width``.
    """
    if not inputs or width == 0:
        return []
    prev = [inputs[0]] + [fresh() for _ in range(width - 1)]
    for j in range(1, width):
        clauses.append([-prev[j]])
    for x in inputs[1:]:
        cur = [fresh() for _ in range(width)]
        clauses.append([-x, cur[0]])
        for j in range(width):
            clauses.append([-prev[j], cur[j]])
            clauses.append([prev[j], x, -cur[j]])
            if j + 1 < width:
                clauses.append([-prev[j], -x, cur[j + 1]])
                clauses.append([prev[j], -cur[j + 1]])
        prev = cur
    return prev


def export_cnf(g: GameInstance) -> CnfFormula:
    """CNF whose models, projected to vertex variables, are exactly the PNE.

    Each vertex's weighted active degree is counted in unary (an edge of
    weight ``w`` feeds its neighbour's variable ``w`` times) and, for every
    degree ``d``, ``deg = d`` forces the vertex to equal its pattern at ``d``.
    """
    f = CnfFormula(g.n, [], {v: v for v in range(1, g.n + 1)})

    def fresh():
        f.num_vars += 1
        return f.num_vars

    for v in range(1, g.n + 1):
        inputs = [u for u, w in g.neighbors(v) for _ in range(w)]
        top = len(inputs)
        geq = _seq_counter(inputs, top, fresh, f.clauses)
        pat = g.pattern(v)
        for d in range(top + 1):
            clause = []
            if d >= 1:
                clause.append(-geq[d - 1])
            if d < top:
                clause.append(geq[d])
            clause.append(v if pat.eval(d) else -v)
            f.clauses.append(clause)
    return f


def format_dimacs(f: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append("c vertex -> variable")
    for v, x in sorted(f.vertex_vars.items()):
        lines.append(f"c v {v} {x}")
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    lines += [" ".join(map(str, cl)) + " 0" for cl in f.clauses]
    return "\n".join(lines) + "\n"
