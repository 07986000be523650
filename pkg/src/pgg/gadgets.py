"""Gadgets for picky-pattern games and a checker for their contracts.

Every gadget has *operand* vertices (shared with the host graph),
*membrane* vertices (gadget neighbours of operands) and *internal*
vertices.  Only operands may touch the outside.  Local vertex ids run
``1..size`` with operands first.

Contracts are checked against an arbitrary host: non-operand vertices
must best-respond, operands are set freely (``environment="free"``).
The clause gadget is instead checked as a closed graph where operands
must best-respond too (``environment="closed"``), since in the reduction
all other gadgets on its operands are safe and contribute nothing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CapacityError
from .game import MAX_BRUTE_FORCE, GameInstance, decode, stable_codes
from .pattern import Pattern, picky

__all__ = [
    "Kind",
    "Role",
    "Gadget",
    "SubGadget",
    "build_gadget",
    "GadgetContract",
    "default_contract",
    "witness_completion",
    "Composer",
    "Placement",
    "attach_gadget",
    "ContractReport",
    "verify_contract",
]


class Kind(enum.Enum):
    NEAR_OR = "near-or"
    TRUE = "true"
    FALSE = "false"
    EQUIV = "equiv"
    CLAUSE = "clause"


class Role(enum.Enum):
    OPERAND = "operand"
    MEMBRANE = "membrane"
    INTERNAL = "internal"


@dataclass(frozen=True)
class SubGadget:
    """A nested gadget: its local ids in the parent, in the child's own order."""

    gadget: "Gadget"
    vertex_ids: Tuple[int, ...]

    @property
    def operand_ids(self) -> Tuple[int, ...]:
        return self.vertex_ids[: self.gadget.arity]


@dataclass(frozen=True)
class Gadget:
    kind: Kind
    k: int
    arity: int
    labels: Tuple[str, ...]
    edges: Tuple[Tuple[int, int], ...]
    subgadgets: Tuple[SubGadget, ...] = ()
    roles: Tuple[Role, ...] = field(init=False)

    def __post_init__(self):
        ops = set(range(1, self.arity + 1))
        membrane = set()
        for u, v in self.edges:
            if u in ops and v not in ops:
                membrane.add(v)
            if v in ops and u not in ops:
                membrane.add(u)
        roles = tuple(
            Role.OPERAND if v in ops else Role.MEMBRANE if v in membrane else Role.INTERNAL
            for v in range(1, self.size + 1)
        )
        object.__setattr__(self, "roles", roles)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def operands(self) -> Tuple[int, ...]:
        return tuple(range(1, self.arity + 1))

    @property
    def membrane(self) -> Tuple[int, ...]:
        return tuple(v for v in range(1, self.size + 1) if self.roles[v - 1] is Role.MEMBRANE)

    @property
    def non_operands(self) -> Tuple[int, ...]:
        return tuple(range(self.arity + 1, self.size + 1))

    def vertex(self, label: str) -> int:
        return self.labels.index(label) + 1

    @property
    def pattern(self) -> Pattern:
        return picky(self.k)

    def as_game(self) -> GameInstance:
        """The gadget alone as a homogeneous picky-pattern game."""
        return GameInstance.build(self.size, self.edges, self.pattern)


class _Builder:
    def __init__(self):
        self.labels: List[str] = []
        self.edges: List[Tuple[int, int]] = []
        self.subs: List[SubGadget] = []

    def add(self, label: str) -> int:
        self.labels.append(label)
        return len(self.labels)

    def edge(self, u: int, v: int) -> None:
        self.edges.append((min(u, v), max(u, v)))

    def embed(self, child: Gadget, operands: Sequence[int], prefix: str) -> SubGadget:
        ids = list(operands)
        for lab in child.labels[child.arity:]:
            ids.append(self.add(f"{prefix}.{lab}"))
        for u, v in child.edges:
            self.edge(ids[u - 1], ids[v - 1])
        sub = SubGadget(child, tuple(ids))
        self.subs.append(sub)
        return sub

    def done(self, kind, k, arity) -> Gadget:
        return Gadget(kind, k, arity, tuple(self.labels), tuple(sorted(set(self.edges))),
                      tuple(self.subs))


def _near_or(k: int, arity: int, kind: Kind = Kind.NEAR_OR) -> Gadget:
    b = _Builder()
    xs = [b.add(f"x{i}") for i in range(1, arity + 1)]
    w = b.add("w")
    y, z = b.add("y"), b.add("z")
    if k == 1:
        # the 3-sun: triangle w, y, z and y', q, z' below
        y_, q, z_ = b.add("y'"), b.add("q"), b.add("z'")
        for e in [(w, y), (y, y_), (y_, q), (q, y), (y, z), (z, q), (q, z_), (z_, z), (z, w)]:
            b.edge(*e)
    else:
        ys = [b.add(f"y{i}") for i in range(1, k + 1)]
        zs = [b.add(f"z{i}") for i in range(1, k + 1)]
        for e in [(w, y), (y, z), (z, w)]:
            b.edge(*e)
        for v in ys:
            b.edge(y, v)
        for v in zs:
            b.edge(z, v)
    for x in xs:
        b.edge(x, w)
    return b.done(kind, k, arity)


def _false(k: int) -> Gadget:
    b = _Builder()
    x = b.add("x")
    ys = [b.add(f"y{i}") for i in range(1, k + 1)]
    b.embed(_near_or(k, k + 1), [x] + ys, "or")
    for i, y in enumerate(ys, 1):
        b.embed(_near_or(k, 1, Kind.TRUE), [y], f"true{i}")
    return b.done(Kind.FALSE, k, 1)


def _equiv(k: int) -> Gadget:
    b = _Builder()
    x1, x2 = b.add("x1"), b.add("x2")
    y = b.add("y")
    zs = [b.add(f"z{i}") for i in range(1, k + 1)]
    for v in [x1, x2] + zs:
        b.edge(y, v)
    b.embed(_false(k), [y], "false")
    for i, z in enumerate(zs, 1):
        b.embed(_near_or(k, 1, Kind.TRUE), [z], f"true{i}")
    return b.done(Kind.EQUIV, k, 2)


def _clause(k: int) -> Gadget:
    b = _Builder()
    t = [b.add(f"t{i}") for i in (1, 2, 3)]
    if k >= 2:
        b.edge(t[0], t[1])
        b.edge(t[1], t[2])
        b.edge(t[0], t[2])
        return b.done(Kind.CLAUSE, k, 3)
    # three parallel length-2 paths per operand pair
    for name, (a, c) in (("x", (0, 1)), ("y", (1, 2)), ("z", (0, 2))):
        for i in (1, 2, 3):
            m = b.add(f"{name}{i}")
            b.edge(t[a], m)
            b.edge(m, t[c])
    b.embed(_near_or(k, 3), t, "or")
    return b.done(Kind.CLAUSE, k, 3)


def build_gadget(kind, k: int, arity: Optional[int] = None) -> Gadget:
    kind = Kind(kind)
    if k < 1:
        raise ValueError("gadgets need k >= 1")
    if kind is Kind.NEAR_OR:
        if arity is None or arity < 1:
            raise ValueError("NEAR-OR needs an arity >= 1")
        return _near_or(k, arity)
    if arity is not None and arity != {Kind.TRUE: 1, Kind.FALSE: 1, Kind.EQUIV: 2,
                                       Kind.CLAUSE: 3}[kind]:
        raise ValueError(f"{kind.value} gadget has fixed arity")
    if kind is Kind.TRUE:
        return _near_or(k, 1, Kind.TRUE)
    if kind is Kind.FALSE:
        return _false(k)
    if kind is Kind.EQUIV:
        return _equiv(k)
    return _clause(k)


# ---------------------------------------------------------------------------
# contracts

@dataclass(frozen=True)
class GadgetContract:
    """Which operand vectors may occur in an equilibrium.

    Give either ``allowed_sums`` (operand-count based) or ``allowed_vectors``.
    """

    allowed_sums: Optional[FrozenSet[int]] = None
    allowed_vectors: Optional[FrozenSet[Tuple[int, ...]]] = None
    safe: bool = True
    environment: str = "free"
    witness_policy: str = "proof"

    def allows(self, vec: Tuple[int, ...]) -> bool:
        if self.allowed_vectors is not None:
            return vec in self.allowed_vectors
        return sum(vec) in self.allowed_sums


def default_contract(g: Gadget) -> GadgetContract:
    k, l = g.k, g.arity
    if g.kind is Kind.NEAR_OR:
        return GadgetContract(allowed_sums=frozenset(set(range(l + 1)) - {0, k + 1}))
    if g.kind is Kind.TRUE:
        return GadgetContract(allowed_vectors=frozenset({(1,)}))
    if g.kind is Kind.FALSE:
        return GadgetContract(allowed_vectors=frozenset({(0,)}))
    if g.kind is Kind.EQUIV:
        return GadgetContract(allowed_vectors=frozenset({(0, 0), (1, 1)}))
    return GadgetContract(
        allowed_vectors=frozenset({(1, 0, 0), (0, 1, 0), (0, 0, 1)}),
        safe=False,
        environment="closed",
    )


def witness_completion(g: Gadget, operands: Sequence[int]) -> Dict[int, int]:
    """Non-operand profile from the permissiveness proofs, by local id.

    Only meaningful for allowed operand vectors; the caller verifies it.
    """
    out = {v: 0 for v in g.non_operands}
    lab = g.labels
    if g.kind in (Kind.NEAR_OR, Kind.TRUE):
        if g.k == 1:
            out[g.vertex("q")] = 1
        else:
            for v in g.non_operands:
                if lab[v - 1][0] in "yz" and len(lab[v - 1]) > 1:
                    out[v] = 1
        return out
    if g.kind is Kind.CLAUSE and g.k >= 2:
        return out
    local = {v: b for v, b in zip(g.operands, operands)}
    if g.kind is Kind.FALSE:
        for i in range(1, g.k + 1):
            local[g.vertex(f"y{i}")] = 1
    elif g.kind is Kind.EQUIV:
        local[g.vertex("y")] = 0
        for i in range(1, g.k + 1):
            local[g.vertex(f"z{i}")] = 1
    elif g.kind is Kind.CLAUSE:
        # the path between the two inactive operands lights up
        active = {(1, 0, 0): "y", (0, 1, 0): "z", (0, 0, 1): "x"}.get(tuple(operands))
        for v in g.non_operands:
            name = lab[v - 1]
            if active and "." not in name and name[0] == active:
                local[v] = 1
    for sub in g.subgadgets:
        inner = witness_completion(sub.gadget, [local.get(v, 0) for v in sub.operand_ids])
        for cv, b in inner.items():
            local[sub.vertex_ids[cv - 1]] = b
    for v in g.non_operands:
        out[v] = local.get(v, 0)
    return out


# ---------------------------------------------------------------------------
# composition

@dataclass(frozen=True)
class Placement:
    gadget: Gadget
    vertex_ids: Tuple[int, ...]  # host id of every local vertex

    @property
    def operand_ids(self) -> Tuple[int, ...]:
        return self.vertex_ids[: self.gadget.arity]

    def roles(self) -> Dict[int, Role]:
        return {h: r for h, r in zip(self.vertex_ids, self.gadget.roles)}


class Composer:
    """Mutable graph under construction; gadgets are glued onto host vertices."""

    def __init__(self, n: int = 0, edges=(), patterns=()):
        self.n = n
        self.edges: Dict[Tuple[int, int], int] = {}
        for e in edges:
            u, v = min(e[0], e[1]), max(e[0], e[1])
            self.edges[(u, v)] = e[2] if len(e) > 2 else 1
        self.patterns: List[Pattern] = list(patterns)
        self.placements: List[Placement] = []

    @classmethod
    def from_game(cls, g: GameInstance) -> "Composer":
        return cls(g.n, g.edges, g.patterns)

    def add_vertices(self, count: int, pattern: Pattern) -> List[int]:
        ids = list(range(self.n + 1, self.n + count + 1))
        self.n += count
        self.patterns += [pattern] * count
        return ids

    def attach(self, gadget: Gadget, operand_map: Sequence[int]) -> Placement:
        ops = list(operand_map)
        if len(ops) != gadget.arity or len(set(ops)) != len(ops):
            raise ValueError("operand map must be injective and cover every operand")
        for h in ops:
            if not 1 <= h <= self.n:
                raise ValueError(f"host vertex {h} does not exist")
            if self.patterns[h - 1] != gadget.pattern:
                raise ValueError(
                    f"host vertex {h} has pattern {self.patterns[h - 1]}, gadget needs "
                    f"{gadget.pattern}"
                )
        ids = ops + self.add_vertices(gadget.size - gadget.arity, gadget.pattern)
        for u, v in gadget.edges:
            a, b = ids[u - 1], ids[v - 1]
            key = (min(a, b), max(a, b))
            if key in self.edges:
                raise ValueError(f"edge {key} already present in host")
            self.edges[key] = 1
        p = Placement(gadget, tuple(ids))
        self.placements.append(p)
        return p

    def game(self) -> GameInstance:
        return GameInstance(
            self.n,
            tuple(sorted((u, v, w) for (u, v), w in self.edges.items())),
            tuple(self.patterns),
        )


def attach_gadget(host: GameInstance, gadget: Gadget, operand_map: Sequence[int]):
    """Glue ``gadget`` onto ``host``; returns ``(game, placement)``."""
    c = Composer.from_game(host)
    p = c.attach(gadget, operand_map)
    return c.game(), p


# ---------------------------------------------------------------------------
# verification

@dataclass
class ContractReport:
    kind: str
    k: int
    arity: int
    mode: str
    passed: bool
    restrictive: bool
    permissive: bool
    safe: Optional[bool]
    realized: List[Tuple[int, ...]]
    witnesses_ok: Optional[bool] = None
    states: int = 0
    failures: List[str] = field(default_factory=list)
    sub_reports: List["ContractReport"] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind, "k": self.k, "arity": self.arity, "mode": self.mode,
            "passed": self.passed, "restrictive": self.restrictive,
            "permissive": self.permissive, "safe": self.safe,
            "realized": ["".join(map(str, v)) for v in self.realized],
            "witnesses_ok": self.witnesses_ok, "states": self.states,
            "failures": self.failures,
            "sub_reports": [r.to_json() for r in self.sub_reports],
        }


_ABSTRACTABLE = (Kind.TRUE, Kind.FALSE)


def _reduced(g: Gadget, compositional: bool):
    """Vertices kept, and forced values, after abstracting TRUE/FALSE sub-gadgets."""
    drop = set()
    forced: Dict[int, int] = {}
    subs = []
    if compositional:
        for sub in g.subgadgets:
            if sub.gadget.kind in _ABSTRACTABLE:
                drop.update(sub.vertex_ids[sub.gadget.arity:])
                forced[sub.operand_ids[0]] = 1 if sub.gadget.kind is Kind.TRUE else 0
                subs.append(sub.gadget)
    keep = [v for v in range(1, g.size + 1) if v not in drop]
    return keep, forced, subs


def verify_contract(
    g: Gadget,
    contract: Optional[GadgetContract] = None,
    mode: str = "exact",
) -> ContractReport:
    """Check restrictiveness, permissiveness and safety by enumeration.

    ``exact`` enumerates every operand vector and every completion of the
    whole gadget.  ``compositional`` first replaces TRUE/FALSE sub-gadgets
    by their verified contracts (operand pinned to 1 resp. 0, no
    contribution from their membranes) and verifies those recursively.
    """
    contract = contract or default_contract(g)
    compositional = mode == "compositional"
    if mode not in ("exact", "compositional"):
        raise ValueError(f"unknown mode {mode!r}")
    keep, forced, subs = _reduced(g, compositional)
    if not compositional and g.size > MAX_BRUTE_FORCE:
        raise CapacityError(
            f"{g.kind.value} gadget with k={g.k} has {g.size} vertices; exact mode caps at "
            f"{MAX_BRUTE_FORCE}"
        )
    sub_reports = []
    seen_sub = set()
    for sg in subs:
        key = (sg.kind, sg.k, sg.arity)
        if key in seen_sub:
            continue
        seen_sub.add(key)
        sub_mode = "exact" if sg.size <= 16 else "compositional"
        sub_reports.append(verify_contract(sg, default_contract(sg), sub_mode))

    # local graph on the kept vertices
    index = {v: i + 1 for i, v in enumerate(keep)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    game = GameInstance.build(len(keep), edges, g.pattern)
    ops = [index[v] for v in g.operands]
    membrane = [index[v] for v in g.membrane if v in index]
    pinned = {index[v]: b for v, b in forced.items()}
    free = [index[v] for v in keep if v not in forced and index[v] not in ops]
    if contract.environment == "closed":
        check = list(range(1, game.n + 1))
    else:
        check = [i for i in range(1, game.n + 1) if i not in ops]

    realized, permissive_vec, unsafe = [], [], False
    states = 0
    for vec in product((0, 1), repeat=g.arity):
        fixed = dict(pinned)
        fixed.update(zip(ops, vec))
        any_completion = zero_membrane = False
        free_membrane = [free.index(m) for m in membrane if m in free]
        pinned_membrane_active = any(fixed.get(m, 0) for m in membrane)
        states += 1 << len(free)
        for codes in stable_codes(game, free, fixed, check):
            any_completion = True
            if pinned_membrane_active:
                unsafe = True
                continue
            if free_membrane:
                bits = decode(codes, len(free))[:, free_membrane]
                quiet = ~bits.any(axis=1)
                zero_membrane |= bool(quiet.any())
                unsafe |= bool((~quiet).any())
            else:
                zero_membrane = True
        if any_completion:
            realized.append(vec)
        if zero_membrane:
            permissive_vec.append(vec)

    failures = []
    allowed = [v for v in product((0, 1), repeat=g.arity) if contract.allows(v)]
    restrictive = all(contract.allows(v) for v in realized)
    if not restrictive:
        failures.append(f"forbidden operand vectors realized: {[v for v in realized if not contract.allows(v)]}")
    if contract.safe:
        permissive = all(v in permissive_vec for v in allowed)
    else:
        permissive = all(v in realized for v in allowed)
    if not permissive:
        failures.append("some allowed operand vector has no (membrane-quiet) completion")
    safe = (not unsafe) if contract.safe else None
    if contract.safe and unsafe:
        failures.append("a membrane vertex is active in some completion")

    witnesses_ok = None
    if contract.witness_policy == "proof":
        witnesses_ok = all(_witness_holds(g, contract, v) for v in allowed)
        if not witnesses_ok:
            failures.append("a proof witness completion is not an equilibrium")

    for r in sub_reports:
        if not r.passed:
            failures.append(f"sub-gadget {r.kind} (k={r.k}) failed")
    passed = not failures
    return ContractReport(
        g.kind.value, g.k, g.arity, mode, passed, restrictive, permissive, safe,
        realized, witnesses_ok, states, failures, sub_reports,
    )


def _witness_holds(g: Gadget, contract: GadgetContract, vec) -> bool:
    full = dict(zip(g.operands, vec))
    full.update(witness_completion(g, vec))
    s = [full[v] for v in range(1, g.size + 1)]
    game = g.as_game()
    check = range(1, g.size + 1) if contract.environment == "closed" else g.non_operands
    pat = g.pattern
    for v in check:
        d = sum(s[u - 1] for u, _ in game.neighbors(v))
        if pat.eval(d) != s[v - 1]:
            return False
    if contract.safe and any(s[m - 1] for m in g.membrane):
        return False
    return True
