"""Binary public goods games on undirected graphs.

Vertices are numbered ``1..n``.  A strategy profile is a tuple of ``n`` bits
where ``profile[v - 1]`` is the action of vertex ``v``.  Edges may carry a
positive integer weight; an edge of weight ``w`` counts as ``w`` active
neighbours when its other endpoint is active.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import CapacityError, FormatError, PatternSyntaxError
from .pattern import Pattern, parse_pattern

__all__ = [
    "GameInstance",
    "Profile",
    "BestResponse",
    "PneReport",
    "MAX_BRUTE_FORCE",
    "active_degree",
    "best_response",
    "is_pne",
    "enumerate_pne",
    "parse_game",
    "format_game",
    "read_game",
    "write_game",
]

Profile = Tuple[int, ...]
PatternLike = Union[Pattern, str]

MAX_BRUTE_FORCE = 30
_CHUNK = 1 << 20


def _as_pattern(p: PatternLike) -> Pattern:
    return p if isinstance(p, Pattern) else parse_pattern(p)


@dataclass(frozen=True)
class GameInstance:
    """An immutable (optionally edge-weighted) public goods game.

    ``edges`` holds sorted ``(u, v, w)`` triples with ``u < v``.  Use
    :meth:`build` for a forgiving constructor.
    """

    n: int
    edges: Tuple[Tuple[int, int, int], ...]
    patterns: Tuple[Pattern, ...]
    _adj: Tuple[Tuple[Tuple[int, int], ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        if len(self.patterns) != self.n:
            raise ValueError(f"expected {self.n} patterns, got {len(self.patterns)}")
        seen = set()
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(self.n + 1)]
        for u, v, w in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge {{{u}, {v}}} out of range 1..{self.n}")
            if not isinstance(w, (int, np.integer)) or w < 1:
                raise ValueError(f"edge {{{u}, {v}}} has invalid weight {w!r}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {{{u}, {v}}}")
            seen.add(key)
            adj[u].append((v, int(w)))
            adj[v].append((u, int(w)))
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def build(
        cls,
        n: int,
        edges: Iterable[Sequence[int]] = (),
        patterns: Union[PatternLike, Sequence[PatternLike]] = "10*",
    ) -> "GameInstance":
        """Accept ``(u, v)`` or ``(u, v, w)`` edges and one or ``n`` patterns."""
        triples = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = int(e[2]) if len(e) > 2 else 1
            if u > v:
                u, v = v, u
            triples.append((u, v, w))
        if isinstance(patterns, (Pattern, str)):
            pats = (_as_pattern(patterns),) * n
        else:
            pats = tuple(_as_pattern(p) for p in patterns)
        return cls(n, tuple(sorted(triples)), pats)

    # -- graph queries -------------------------------------------------------

    def neighbors(self, v: int) -> Tuple[Tuple[int, int], ...]:
        """``(neighbour, weight)`` pairs of vertex ``v``."""
        return self._adj[v]

    def weight(self, u: int, v: int) -> int:
        for x, w in self._adj[u]:
            if x == v:
                return w
        return 0

    def weighted_degree(self, v: int) -> int:
        return sum(w for _, w in self._adj[v])

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    @property
    def is_weighted(self) -> bool:
        return any(w != 1 for _, _, w in self.edges)

    def pattern(self, v: int) -> Pattern:
        return self.patterns[v - 1]

    def with_patterns(self, patterns) -> "GameInstance":
        if isinstance(patterns, (Pattern, str)):
            patterns = [patterns] * self.n
        return GameInstance(self.n, self.edges, tuple(_as_pattern(p) for p in patterns))

    def relabel(self, perm: Sequence[int]) -> "GameInstance":
        """Game with vertex ``v`` renamed ``perm[v - 1]``."""
        edges = []
        for u, v, w in self.edges:
            a, b = perm[u - 1], perm[v - 1]
            edges.append((min(a, b), max(a, b), w))
        pats = [None] * self.n
        for v in range(1, self.n + 1):
            pats[perm[v - 1] - 1] = self.patterns[v - 1]
        return GameInstance(self.n, tuple(sorted(edges)), tuple(pats))


class BestResponse(NamedTuple):
    value: int
    degree: int


@dataclass(frozen=True)
class PneReport:
    is_pne: bool
    violators: Tuple[int, ...]

    def __bool__(self):
        return self.is_pne


def _check_profile(g: GameInstance, s: Sequence[int]) -> None:
    if len(s) != g.n:
        raise ValueError(f"profile has length {len(s)}, game has {g.n} vertices")


def active_degree(g: GameInstance, s: Sequence[int], v: int) -> int:
    return sum(w for u, w in g.neighbors(v) if s[u - 1])


def best_response(g: GameInstance, s: Sequence[int], v: int) -> BestResponse:
    """Response of ``v`` to the others in ``s`` and the active degree behind it."""
    if not 1 <= v <= g.n:
        raise ValueError(f"vertex {v} out of range 1..{g.n}")
    _check_profile(g, s)
    d = active_degree(g, s, v)
    return BestResponse(g.pattern(v).eval(d), d)


def is_pne(g: GameInstance, s: Sequence[int]) -> PneReport:
    _check_profile(g, s)
    bad = tuple(
        v for v in range(1, g.n + 1) if s[v - 1] != g.pattern(v).eval(active_degree(g, s, v))
    )
    return PneReport(not bad, bad)


# ---------------------------------------------------------------------------
# exhaustive enumeration

def response_tables(g: GameInstance) -> List[np.ndarray]:
    """Per-vertex lookup table of responses for every reachable degree (index 0 unused)."""
    tables = [np.zeros(1, dtype=np.int8)]
    for v in range(1, g.n + 1):
        tables.append(np.array(g.pattern(v).table(g.weighted_degree(v) + 1), dtype=np.int8))
    return tables


def stable_codes(
    g: GameInstance,
    free: Sequence[int],
    fixed: Optional[dict] = None,
    check: Optional[Iterable[int]] = None,
    chunk: int = _CHUNK,
) -> Iterator[np.ndarray]:
    """Yield, chunk by chunk, codes of assignments to ``free`` vertices under
    which every vertex in ``check`` best-responds.

    Code bit ``len(free) - 1 - i`` is the action of ``free[i]``, so ascending
    codes are lexicographic in the listed order.  Vertices neither free nor
    fixed count as inactive.  ``check`` defaults to all vertices.
    """
    fixed = dict(fixed or {})
    m = len(free)
    if m > MAX_BRUTE_FORCE:
        raise CapacityError(f"{m} free vertices exceed the brute-force cap of {MAX_BRUTE_FORCE}")
    shift = {v: m - 1 - i for i, v in enumerate(free)}
    tables = response_tables(g)
    check = list(range(1, g.n + 1)) if check is None else list(check)
    # vertices with a free neighbour or that are free themselves get tested
    # per chunk; the rest are decided once up front
    static_ok = True
    dynamic = []
    for v in check:
        if v in shift or any(u in shift for u, _ in g.neighbors(v)):
            dynamic.append(v)
            continue
        d = sum(w for u, w in g.neighbors(v) if fixed.get(u, 0))
        if tables[v][d] != fixed.get(v, 0):
            static_ok = False
    if not static_ok:
        return
    # most-constrained first prunes the candidate set fastest
    dynamic.sort(key=lambda v: -sum(1 for u, _ in g.neighbors(v) if u in shift))
    total = 1 << m
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        for v in dynamic:
            if codes.size == 0:
                break
            deg = np.zeros(codes.shape, dtype=np.int64)
            base = 0
            for u, w in g.neighbors(v):
                if u in shift:
                    deg += w * ((codes >> shift[u]) & 1)
                elif fixed.get(u, 0):
                    base += w
            resp = tables[v][deg + base]
            own = (codes >> shift[v]) & 1 if v in shift else fixed.get(v, 0)
            codes = codes[resp == own]
        if codes.size:
            yield codes


def decode(codes: np.ndarray, m: int) -> np.ndarray:
    """Bit matrix (rows = codes, column ``i`` = ``i``-th free vertex)."""
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def enumerate_pne(g: GameInstance, max_count: Optional[int] = None) -> List[Profile]:
    """All PNE in lexicographic order (vertex 1 most significant)."""
    if g.n > MAX_BRUTE_FORCE:
        raise CapacityError(f"n = {g.n} exceeds the brute-force cap of {MAX_BRUTE_FORCE}")
    out: List[Profile] = []
    free = list(range(1, g.n + 1))
    for codes in stable_codes(g, free):
        for row in decode(codes, g.n):
            out.append(tuple(int(b) for b in row))
            if max_count is not None and len(out) >= max_count:
                return out
    return out


# ---------------------------------------------------------------------------
# text format

def parse_game(text: str) -> GameInstance:
    """Parse the line-oriented game format (``pgg``/``patterns``/``pattern``/``edge``)."""
    n = None
    default = None
    overrides = {}
    edges = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key = tok[0]
        if n is None and key != "pgg":
            raise FormatError("file must start with 'pgg <n>'", lineno)
        try:
            if key == "pgg":
                if n is not None or len(tok) != 2:
                    raise FormatError("malformed or repeated 'pgg' header", lineno)
                n = _int(tok[1], lineno)
                if n < 0:
                    raise FormatError("negative vertex count", lineno)
            elif key == "patterns":
                if len(tok) != 2 or default is not None:
                    raise FormatError("expected a single 'patterns <pattern>' line", lineno)
                default = parse_pattern(tok[1])
            elif key == "pattern":
                if len(tok) != 3:
                    raise FormatError("expected 'pattern <v> <pattern>'", lineno)
                v = _vertex(tok[1], n, lineno)
                if v in overrides:
                    raise FormatError(f"duplicate pattern for vertex {v}", lineno)
                overrides[v] = parse_pattern(tok[2])
            elif key == "edge":
                if len(tok) not in (3, 4):
                    raise FormatError("expected 'edge <u> <v> [<weight>]'", lineno)
                u, v = _vertex(tok[1], n, lineno), _vertex(tok[2], n, lineno)
                w = _int(tok[3], lineno) if len(tok) == 4 else 1
                if u == v:
                    raise FormatError(f"self-loop at vertex {u}", lineno)
                if w < 1:
                    raise FormatError(f"weight must be positive, got {w}", lineno)
                e = (min(u, v), max(u, v))
                if e in edges:
                    raise FormatError(f"duplicate edge {u} {v}", lineno)
                edges[e] = w
            else:
                raise FormatError(f"unknown keyword {key!r}", lineno)
        except PatternSyntaxError as exc:
            raise FormatError(str(exc), lineno) from exc
    if n is None:
        raise FormatError("missing 'pgg <n>' header")
    pats = []
    for v in range(1, n + 1):
        p = overrides.get(v, default)
        if p is None:
            raise FormatError(f"vertex {v} has no pattern and no 'patterns' default")
        pats.append(p)
    triples = tuple(sorted((u, v, w) for (u, v), w in edges.items()))
    return GameInstance(n, triples, tuple(pats))


def _int(tok, lineno):
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", lineno) from None


def _vertex(tok, n, lineno):
    v = _int(tok, lineno)
    if not 1 <= v <= n:
        raise FormatError(f"vertex {v} out of range 1..{n}", lineno)
    return v


def format_game(g: GameInstance, header: Sequence[str] = ()) -> str:
    """Canonical text: most common pattern as default, overrides, sorted edges."""
    lines = [f"# {c}" for c in header]
    lines.append(f"pgg {g.n}")
    if g.n:
        counts = Counter(g.patterns)
        default = max(counts, key=lambda p: (counts[p], -g.patterns.index(p)))
        lines.append(f"patterns {default}")
        for v, p in enumerate(g.patterns, 1):
            if p != default:
                lines.append(f"pattern {v} {p}")
    for u, v, w in g.edges:
        lines.append(f"edge {u} {v}" if w == 1 else f"edge {u} {v} {w}")
    return "\n".join(lines) + "\n"


def read_game(path) -> GameInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())


def write_game(g: GameInstance, path, header: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_game(g, header))
