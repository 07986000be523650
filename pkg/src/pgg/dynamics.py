"""Better-response dynamics and the exact potential for decreasing patterns.

For patterns ``1^k 0*`` the game has the exact potential

    Phi(s) = sum_{uv in E} w_uv s_u s_v + sum_v (k_v - 1/2) s_v

which is half-integral; everything here works with ``2 * Phi`` so all
arithmetic is exact and every improving flip lowers it by at least one.

Random schedules draw from numpy's PCG64 bit generator seeded with the
schedule seed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotDecreasingError
from .game import GameInstance, Profile
from .pattern import leading_ones

__all__ = [
    "ScheduleKind",
    "Schedule",
    "DynamicsTrace",
    "leading_ones_vector",
    "potential",
    "literal_potential",
    "potential_range",
    "step_bound",
    "run_dynamics",
]


class ScheduleKind(enum.Enum):
    ROUND_ROBIN = "roundrobin"
    UNIFORM_RANDOM = "random"
    FIRST_VIOLATOR = "first"


@dataclass(frozen=True)
class Schedule:
    kind: ScheduleKind = ScheduleKind.ROUND_ROBIN
    seed: int = 0

    @classmethod
    def parse(cls, name: str, seed: int = 0) -> "Schedule":
        return cls(ScheduleKind(name), seed)


@dataclass
class DynamicsTrace:
    initial: Profile
    final: Profile
    steps: List[Tuple[int, int]] = field(default_factory=list)
    potentials: Optional[List[int]] = None
    converged: bool = False

    def replay(self) -> Profile:
        s = list(self.initial)
        for v, b in self.steps:
            s[v - 1] = b
        return tuple(s)

    def to_json(self) -> dict:
        out = {
            "converged": self.converged,
            "steps": len(self.steps),
            "initial_profile": "".join(map(str, self.initial)),
            "final_profile": "".join(map(str, self.final)),
        }
        if self.potentials is not None:
            out["potential_series"] = self.potentials
        return out


def leading_ones_vector(g: GameInstance) -> List[int]:
    """``k_v`` for every vertex (index 0 unused); raises unless all decreasing."""
    ks = [0]
    for v in range(1, g.n + 1):
        k = leading_ones(g.pattern(v))
        if k is None:
            raise NotDecreasingError(f"vertex {v} has non-decreasing pattern {g.pattern(v)}")
        ks.append(k)
    return ks


def _all_decreasing(g: GameInstance) -> bool:
    return all(leading_ones(p) is not None for p in g.patterns)


def potential(g: GameInstance, s: Sequence[int]) -> int:
    """Doubled Rosenthal potential ``2 * Phi(s)`` as an exact integer.

    An inactive vertex occupies its own good (delay ``k_v - 1/2``) and an
    edge good with both endpoints active costs ``w`` once, so
    ``2 Phi = 2 sum_E w s_u s_v + sum_V (2 k_v - 1)(1 - s_v)``.  Every
    improving flip lowers it by ``|2 x_v - (2 k_v - 1)| >= 1``.
    """
    ks = leading_ones_vector(g)
    total = 2 * sum(w for u, v, w in g.edges if s[u - 1] and s[v - 1])
    total += sum(2 * ks[v] - 1 for v in range(1, g.n + 1) if not s[v - 1])
    return total


def literal_potential(g: GameInstance, s: Sequence[int]) -> int:
    """``2 sum_E w s_u s_v + sum_V (2 k_v - 1) s_v``.

    This closed form charges active rather than inactive vertices for their
    own good.  It is not a potential: switching on a vertex with few active
    neighbours is an improvement that raises it.  Kept for comparison.
    """
    ks = leading_ones_vector(g)
    total = 2 * sum(w for u, v, w in g.edges if s[u - 1] and s[v - 1])
    total += sum(2 * ks[v] - 1 for v in range(1, g.n + 1) if s[v - 1])
    return total


def _clamped_k(g: GameInstance) -> List[int]:
    # responses never look past the weighted degree, so larger k are equivalent
    ks = leading_ones_vector(g)
    return [0] + [min(ks[v], g.weighted_degree(v) + 1) for v in range(1, g.n + 1)]


def potential_range(g: GameInstance) -> int:
    """Upper end of the clamped doubled potential; its lower end is 0."""
    ks = _clamped_k(g)
    return 2 * g.total_weight + sum(2 * k - 1 for k in ks[1:])


def step_bound(g: GameInstance) -> int:
    """``2 (W + k_max n)`` with each ``k_v`` clamped to ``wdeg(v) + 1``."""
    ks = _clamped_k(g)
    kmax = max(ks[1:], default=0)
    return 2 * (g.total_weight + kmax * g.n)


def run_dynamics(
    g: GameInstance,
    s0: Sequence[int],
    schedule: Schedule = Schedule(),
    max_steps: int = 10**6,
) -> DynamicsTrace:
    """Flip non-best-responding vertices until a PNE or ``max_steps`` flips.

    Only flips count as steps.  ``ROUND_ROBIN`` scans cyclically starting
    after the last flipped vertex, ``FIRST_VIOLATOR`` takes the smallest
    violating id and ``UNIFORM_RANDOM`` draws uniformly among violators.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    if len(s0) != g.n:
        raise ValueError("profile length does not match the game")
    n = g.n
    s = [0] + [int(b) for b in s0]
    deg = [0] * (n + 1)
    for u, v, w in g.edges:
        if s[u]:
            deg[v] += w
        if s[v]:
            deg[u] += w
    pats = (None,) + g.patterns

    def violates(v):
        return pats[v].eval(deg[v]) != s[v]

    bad = {v for v in range(1, n + 1) if violates(v)}
    track = _all_decreasing(g)
    phi = potential(g, s[1:]) if track else None
    trace = DynamicsTrace(tuple(s[1:]), tuple(s[1:]), [], [phi] if track else None)
    rng = np.random.Generator(np.random.PCG64(schedule.seed))
    cursor = 0  # last flipped vertex; round robin resumes after it

    while bad and len(trace.steps) < max_steps:
        if schedule.kind is ScheduleKind.FIRST_VIOLATOR:
            v = min(bad)
        elif schedule.kind is ScheduleKind.UNIFORM_RANDOM:
            ordered = sorted(bad)
            v = ordered[int(rng.integers(len(ordered)))]
        else:
            v = next(
                (cursor + i - 1) % n + 1 for i in range(1, n + 1) if (cursor + i - 1) % n + 1 in bad
            )
        b = 1 - s[v]
        s[v] = b
        cursor = v
        for u, w in g.neighbors(v):
            deg[u] += w if b else -w
        if track:
            # exact change of the doubled potential for this flip
            delta = 2 * deg[v] - (2 * leading_ones(pats[v]) - 1)
            phi += delta if b else -delta
            trace.potentials.append(phi)
        trace.steps.append((v, b))
        for u in (v,) + tuple(x for x, _ in g.neighbors(v)):
            if violates(u):
                bad.add(u)
            else:
                bad.discard(u)

    trace.final = tuple(s[1:])
    trace.converged = not bad
    return trace
