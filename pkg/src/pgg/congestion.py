"""Congestion-game view of decreasing-pattern games and threshold games.

Every vertex ``v`` and every edge ``e`` becomes a good.  Vertex goods cost
``k_v - 1/2`` regardless of load; edge goods cost ``w_e (x - 1)`` at load
``x``.  Player ``v`` picks either ``{v}`` (inactive) or all incident edge
goods (active).  All costs and utilities are doubled to stay integral.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import FormatError
from .game import GameInstance, PneReport, Profile, enumerate_pne, best_response
from .dynamics import leading_ones_vector
from .pattern import decreasing

__all__ = [
    "ConstantHalf",
    "Affine",
    "Good",
    "CongestionGame",
    "build_congestion_game",
    "pgg_utility",
    "IsomorphismReport",
    "verify_isomorphism",
    "congestion_pne",
    "ThresholdGame",
    "Side",
    "KRule",
    "ThresholdMapping",
    "threshold_to_pgg",
    "threshold_pne_check",
    "parse_threshold",
    "format_threshold",
]


@dataclass(frozen=True)
class ConstantHalf:
    """Constant delay ``doubled / 2`` with ``doubled`` odd and positive."""

    doubled: int

    def __post_init__(self):
        if self.doubled < 1 or self.doubled % 2 == 0:
            raise ValueError("ConstantHalf needs an odd positive doubled value")

    def doubled_delay(self, load: int) -> int:
        return self.doubled


@dataclass(frozen=True)
class Affine:
    """Delay ``slope * (load - 1)``."""

    slope: int

    def doubled_delay(self, load: int) -> int:
        return 2 * self.slope * (load - 1)


@dataclass(frozen=True)
class Good:
    kind: str  # "vertex" or "edge"
    key: Union[int, Tuple[int, int]]
    delay: Union[ConstantHalf, Affine]


@dataclass(frozen=True)
class CongestionGame:
    goods: Tuple[Good, ...]
    # strategies[v - 1] == (inactive strategy, active strategy)
    strategies: Tuple[Tuple[FrozenSet[int], FrozenSet[int]], ...]

    @property
    def n(self) -> int:
        return len(self.strategies)

    def embed(self, s: Sequence[int]) -> Tuple[FrozenSet[int], ...]:
        """The strategy bijection: bit ``b`` of player ``v`` to ``strategies[v-1][b]``."""
        return tuple(self.strategies[v][b] for v, b in enumerate(s))

    def loads(self, choice: Sequence[FrozenSet[int]]) -> List[int]:
        x = [0] * len(self.goods)
        for strat in choice:
            for gi in strat:
                x[gi] += 1
        return x

    def doubled_cost(self, choice: Sequence[FrozenSet[int]], player: int) -> int:
        """Twice the cost paid by ``player`` (1-based) under ``choice``."""
        x = self.loads(choice)
        return sum(self.goods[gi].delay.doubled_delay(x[gi]) for gi in choice[player - 1])

    def doubled_rosenthal(self, choice: Sequence[FrozenSet[int]]) -> int:
        x = self.loads(choice)
        return sum(
            sum(good.delay.doubled_delay(l) for l in range(1, x[gi] + 1))
            for gi, good in enumerate(self.goods)
        )


def build_congestion_game(g: GameInstance) -> CongestionGame:
    ks = leading_ones_vector(g)
    goods = [Good("vertex", v, ConstantHalf(2 * ks[v] - 1)) for v in range(1, g.n + 1)]
    incident: List[List[int]] = [[] for _ in range(g.n + 1)]
    for u, v, w in g.edges:
        incident[u].append(len(goods))
        incident[v].append(len(goods))
        goods.append(Good("edge", (u, v), Affine(w)))
    strategies = tuple(
        (frozenset({v - 1}), frozenset(incident[v])) for v in range(1, g.n + 1)
    )
    return CongestionGame(tuple(goods), strategies)


def pgg_utility(g: GameInstance, s: Sequence[int], v: int) -> int:
    """Twice the utility of ``v``: ``-(2 k_v - 1)`` if inactive, else ``-2 x_v``."""
    ks = leading_ones_vector(g)
    if s[v - 1]:
        return -2 * best_response(g, s, v).degree
    return -(2 * ks[v] - 1)


def congestion_pne(cg: CongestionGame) -> List[Profile]:
    """Brute-force PNE of the two-strategy congestion game, as bit profiles."""
    out = []
    n = cg.n
    for code in range(1 << n):
        s = tuple((code >> (n - 1 - i)) & 1 for i in range(n))
        choice = list(cg.embed(s))
        stable = True
        for v in range(1, n + 1):
            here = cg.doubled_cost(choice, v)
            alt = list(choice)
            alt[v - 1] = cg.strategies[v - 1][1 - s[v - 1]]
            if cg.doubled_cost(alt, v) < here:
                stable = False
                break
        if stable:
            out.append(s)
    return out


@dataclass
class IsomorphismReport:
    ok: bool
    profiles_checked: int
    exhaustive: bool
    pne_sets_compared: bool
    counterexample: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "profiles_checked": self.profiles_checked,
            "exhaustive": self.exhaustive,
            "pne_sets_compared": self.pne_sets_compared,
            "counterexample": self.counterexample,
        }


def verify_isomorphism(
    g: GameInstance,
    sample_count: int = 1000,
    seed: int = 0,
    exhaustive_n: int = 6,
    pne_n: int = 12,
) -> IsomorphismReport:
    """Compare doubled utilities of the game and its congestion image.

    Profiles are exhaustive when ``g.n <= exhaustive_n`` and otherwise
    ``sample_count`` seeded draws.  For each profile and player this checks
    ``2u_v(s) == -2cost_v(phi(s))`` and that the pattern's response is strictly
    preferred.  PNE sets are compared by enumeration when ``g.n <= pne_n``.
    """
    cg = build_congestion_game(g)
    n = g.n
    if n <= exhaustive_n:
        profiles = (tuple((c >> (n - 1 - i)) & 1 for i in range(n)) for c in range(1 << n))
        exhaustive = True
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        profiles = (tuple(int(b) for b in rng.integers(0, 2, n)) for _ in range(sample_count))
        exhaustive = False
    checked = 0
    for s in profiles:
        checked += 1
        choice = cg.embed(s)
        for v in range(1, n + 1):
            u = pgg_utility(g, s, v)
            c = cg.doubled_cost(choice, v)
            if u != -c:
                return IsomorphismReport(False, checked, exhaustive, False, {
                    "profile": "".join(map(str, s)), "vertex": v,
                    "doubled_utility": u, "doubled_cost": c,
                })
            br = best_response(g, s, v).value
            with_br = list(s)
            with_br[v - 1] = br
            other = list(s)
            other[v - 1] = 1 - br
            if not pgg_utility(g, with_br, v) > pgg_utility(g, other, v):
                return IsomorphismReport(False, checked, exhaustive, False, {
                    "profile": "".join(map(str, s)), "vertex": v,
                    "reason": "best response not strictly preferred",
                })
    compared = n <= pne_n
    if compared:
        a, b = enumerate_pne(g), congestion_pne(cg)
        if a != b:
            return IsomorphismReport(False, checked, exhaustive, True, {
                "pgg_pne": ["".join(map(str, p)) for p in a],
                "congestion_pne": ["".join(map(str, p)) for p in b],
            })
    return IsomorphismReport(True, checked, exhaustive, compared)


# ---------------------------------------------------------------------------
# threshold games

class Side(str, enum.Enum):
    IN = "in"
    OUT = "out"


class KRule(enum.Enum):
    FLOOR_PLUS_ONE = "floor-plus-one"
    FLOOR = "floor"


@dataclass(frozen=True)
class ThresholdGame:
    """Players choose ``out`` (cost ``theta_i``) or ``in`` (cost
    ``sum_j a_ij`` over other ``in`` players)."""

    n: int
    thetas: Tuple[Fraction, ...]
    costs: Dict[Tuple[int, int], int] = field(hash=False)

    def __post_init__(self):
        if len(self.thetas) != self.n:
            raise ValueError("one threshold per player required")
        thetas = tuple(Fraction(t) for t in self.thetas)
        if any(t <= 0 for t in thetas):
            raise ValueError("thresholds must be positive")
        costs = {}
        for (i, j), a in self.costs.items():
            if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"invalid pair ({i}, {j})")
            if int(a) != a or a < 1:
                raise ValueError(f"pair cost a_{i}{j} must be a positive integer")
            costs[(min(i, j), max(i, j))] = int(a)
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                if (i, j) not in costs:
                    raise ValueError(f"missing pair cost a_{i}{j}")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "costs", costs)

    def a(self, i: int, j: int) -> int:
        return self.costs[(min(i, j), max(i, j))]

    def cost(self, profile: Sequence[Side], i: int, side: Side) -> Fraction:
        """Cost to player ``i`` of playing ``side`` against the others in ``profile``."""
        if side is Side.OUT:
            return self.thetas[i - 1]
        return Fraction(sum(
            self.a(i, j) for j in range(1, self.n + 1) if j != i and profile[j - 1] is Side.IN
        ))


@dataclass(frozen=True)
class ThresholdMapping:
    """Bit 1 of the game vertex ``i`` is ``in`` for threshold player ``i``."""

    n: int

    def to_threshold(self, s: Sequence[int]) -> Tuple[Side, ...]:
        return tuple(Side.IN if b else Side.OUT for b in s)

    def to_profile(self, sides: Sequence[Side]) -> Profile:
        return tuple(1 if Side(x) is Side.IN else 0 for x in sides)


def threshold_to_pgg(
    t: ThresholdGame, k_rule: KRule = KRule.FLOOR_PLUS_ONE
) -> Tuple[GameInstance, ThresholdMapping]:
    """Complete weighted graph with ``w_ij = a_ij`` and ``1^k 0*`` patterns.

    ``FLOOR_PLUS_ONE`` uses ``k_i = floor(theta_i) + 1`` so that a vertex is
    active exactly when its weighted active degree is at most
    ``floor(theta_i)``; ``FLOOR`` uses ``k_i = floor(theta_i)``.
    """
    edges = [(i, j, t.a(i, j)) for i in range(1, t.n + 1) for j in range(i + 1, t.n + 1)]
    k_of = (lambda th: th.numerator // th.denominator + 1) if k_rule is KRule.FLOOR_PLUS_ONE \
        else (lambda th: th.numerator // th.denominator)
    pats = [decreasing(k_of(th)) for th in t.thetas]
    return GameInstance.build(t.n, edges, pats), ThresholdMapping(t.n)


def threshold_pne_check(t: ThresholdGame, profile: Sequence[Side]) -> PneReport:
    """Exact comparison of both strategies per player; ties are stable."""
    profile = tuple(Side(x) for x in profile)
    bad = []
    for i in range(1, t.n + 1):
        here = t.cost(profile, i, profile[i - 1])
        other = Side.IN if profile[i - 1] is Side.OUT else Side.OUT
        if t.cost(profile, i, other) < here:
            bad.append(i)
    return PneReport(not bad, tuple(bad))


def parse_threshold(text: str) -> ThresholdGame:
    """``threshold <n>`` then ``theta <i> <p>/<q>`` and ``a <i> <j> <int>`` lines."""
    n = None
    thetas: Dict[int, Fraction] = {}
    costs: Dict[Tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "threshold" and len(tok) == 2 and n is None:
                n = int(tok[1])
            elif n is None:
                raise FormatError("file must start with 'threshold <n>'", lineno)
            elif tok[0] == "theta" and len(tok) == 3:
                i = int(tok[1])
                if not 1 <= i <= n or i in thetas:
                    raise FormatError(f"bad or repeated player {i}", lineno)
                thetas[i] = Fraction(tok[2])
            elif tok[0] == "a" and len(tok) == 4:
                i, j = int(tok[1]), int(tok[2])
                key = (min(i, j), max(i, j))
                if i == j or not (1 <= i <= n and 1 <= j <= n) or key in costs:
                    raise FormatError(f"bad or repeated pair {i} {j}", lineno)
                costs[key] = int(tok[3])
            else:
                raise FormatError(f"unrecognized line {line!r}", lineno)
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(str(exc), lineno) from exc
    if n is None:
        raise FormatError("missing 'threshold <n>' header")
    missing = [i for i in range(1, n + 1) if i not in thetas]
    if missing:
        raise FormatError(f"missing theta for players {missing}")
    try:
        return ThresholdGame(n, tuple(thetas[i] for i in range(1, n + 1)), costs)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def format_threshold(t: ThresholdGame) -> str:
    lines = [f"threshold {t.n}"]
    lines += [f"theta {i} {th.numerator}/{th.denominator}" for i, th in enumerate(t.thetas, 1)]
    lines += [f"a {i} {j} {a}" for (i, j), a in sorted(t.costs.items())]
    return "\n".join(lines) + "\n"
