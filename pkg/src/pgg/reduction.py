"""POSITIVE-1IN3-SAT to picky-pattern public goods games.

Each clause becomes a CLAUSE gadget whose three operands ``t[i][j]`` stand for
the clause's literals.  Occurrences of the same variable are tied together by
EQUIV gadgets and every ``⊥`` literal gets a FALSE gadget.  The resulting game
(pattern ``1 0^k 1 0*`` everywhere) has a PNE iff the formula has an
assignment making exactly one literal per clause true.

File format::

    p 1in3 <m> <l>
    <a> <b> <c>        # l clause lines; 0 is ⊥, 1..m are variables
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import FormatError, ReductionError
from .gadgets import Composer, Kind, build_gadget, witness_completion
from .game import GameInstance, Profile, is_pne
from .pattern import picky
from .solver import Status, decide_pne

__all__ = [
    "OneInThreeInstance",
    "parse_1in3",
    "format_1in3",
    "satisfies",
    "satisfying_assignments",
    "GadgetRecord",
    "ReductionCertificate",
    "compile_reduction",
    "assignment_to_profile",
    "profile_to_assignment",
]

BOTTOM = 0


@dataclass(frozen=True)
class OneInThreeInstance:
    m: int
    clauses: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(x) for x in c) for c in self.clauses)
        for c in clauses:
            if len(c) != 3:
                raise ValueError("every clause has exactly three literals")
            for x in c:
                if not 0 <= x <= self.m:
                    raise ValueError(f"literal {x} out of range 0..{self.m}")
        object.__setattr__(self, "clauses", clauses)

    @property
    def used_variables(self) -> Tuple[int, ...]:
        return tuple(sorted({x for c in self.clauses for x in c if x != BOTTOM}))

    @property
    def unused_variables(self) -> Tuple[int, ...]:
        used = set(self.used_variables)
        return tuple(v for v in range(1, self.m + 1) if v not in used)


def parse_1in3(text: str) -> OneInThreeInstance:
    header = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("c "):
            continue
        tok = line.split()
        if header is None:
            if len(tok) != 4 or tok[:2] != ["p", "1in3"]:
                raise FormatError("expected header 'p 1in3 <m> <l>'", lineno)
            try:
                header = (int(tok[2]), int(tok[3]))
            except ValueError:
                raise FormatError("header counts must be integers", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise FormatError("header counts must be nonnegative", lineno)
            continue
        if len(tok) != 3:
            raise FormatError("a clause has exactly three literals", lineno)
        try:
            lits = tuple(int(x) for x in tok)
        except ValueError:
            raise FormatError("literals must be integers", lineno) from None
        for x in lits:
            if not 0 <= x <= header[0]:
                raise FormatError(f"literal {x} out of range 0..{header[0]}", lineno)
        clauses.append(lits)
    if header is None:
        raise FormatError("missing 'p 1in3' header")
    if len(clauses) != header[1]:
        raise FormatError(f"header announces {header[1]} clauses, found {len(clauses)}")
    inst = OneInThreeInstance(header[0], tuple(clauses))
    if inst.unused_variables:
        warnings.warn(f"variables {list(inst.unused_variables)} occur in no clause", stacklevel=2)
    return inst


def format_1in3(inst: OneInThreeInstance) -> str:
    lines = [f"p 1in3 {inst.m} {len(inst.clauses)}"]
    lines += [" ".join(map(str, c)) for c in inst.clauses]
    return "\n".join(lines) + "\n"


Assignment = Union[Mapping[int, int], Sequence[int]]


def _as_dict(inst: OneInThreeInstance, sigma: Assignment) -> Dict[int, int]:
    if isinstance(sigma, Mapping):
        return {int(k): int(v) for k, v in sigma.items()}
    if len(sigma) != inst.m:
        raise ReductionError(f"assignment has {len(sigma)} values, instance has {inst.m} variables")
    return {i: int(b) for i, b in enumerate(sigma, 1)}


def satisfies(inst: OneInThreeInstance, sigma: Assignment) -> bool:
    """Exactly one true literal in every clause (``⊥`` is false)."""
    val = _as_dict(inst, sigma)
    try:
        return all(sum(val[x] if x else 0 for x in c) == 1 for c in inst.clauses)
    except KeyError as exc:
        raise ReductionError(f"assignment misses variable {exc.args[0]}") from None


def satisfying_assignments(inst: OneInThreeInstance) -> List[Tuple[int, ...]]:
    """Brute force over all ``2^m`` assignments."""
    return [sigma for sigma in product((0, 1), repeat=inst.m) if satisfies(inst, sigma)]


# ---------------------------------------------------------------------------
# compilation

@dataclass(frozen=True)
class GadgetRecord:
    kind: str
    operands: Tuple[int, ...]
    vertices: Tuple[int, ...]  # host ids in the gadget's local order


@dataclass
class ReductionCertificate:
    k: int
    t: List[Tuple[int, int, int]]  # t[i][j] = host vertex of literal j of clause i
    gadgets: List[GadgetRecord] = field(default_factory=list)
    equiv_chain: bool = False

    def rebuild(self) -> GameInstance:
        """Reconstruct the compiled game from the inventory alone."""
        c = Composer()
        pat = picky(self.k)
        for rec in self.gadgets:
            g = build_gadget(rec.kind, self.k)
            if rec.kind == Kind.CLAUSE.value:
                c.add_vertices(g.arity, pat)
            p = c.attach(g, rec.operands)
            if p.vertex_ids != tuple(rec.vertices):
                raise ReductionError("inventory does not match construction order")
        return c.game()

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "equiv_chain": self.equiv_chain,
            "t": [list(x) for x in self.t],
            "gadgets": [
                {"kind": r.kind, "operands": list(r.operands),
                 "first": r.vertices[len(r.operands)] if len(r.vertices) > len(r.operands) else None,
                 "size": len(r.vertices)}
                for r in self.gadgets
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ReductionCertificate":
        recs = []
        for r in data["gadgets"]:
            ops = tuple(r["operands"])
            first = r["first"]
            rest = () if first is None else tuple(range(first, first + r["size"] - len(ops)))
            recs.append(GadgetRecord(r["kind"], ops, ops + rest))
        return cls(data["k"], [tuple(x) for x in data["t"]], recs, data.get("equiv_chain", False))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def compile_reduction(
    inst: OneInThreeInstance, k: int, equiv_chain: bool = False
) -> Tuple[GameInstance, ReductionCertificate]:
    """Build the picky-pattern game for ``inst``.

    Order: one CLAUSE gadget per clause (contiguous id blocks), then EQUIV
    gadgets over unordered pairs of occurrences of the same variable in
    lexicographic order, then one FALSE gadget per ``⊥`` occurrence.  With
    ``equiv_chain`` only consecutive occurrences are linked.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    pat = picky(k)
    comp = Composer()
    clause_g = build_gadget(Kind.CLAUSE, k)
    cert = ReductionCertificate(k, [], [], equiv_chain)
    for _ in inst.clauses:
        ops = comp.add_vertices(3, pat)
        p = comp.attach(clause_g, ops)
        cert.t.append(tuple(ops))
        cert.gadgets.append(GadgetRecord(Kind.CLAUSE.value, tuple(ops), p.vertex_ids))

    occurrences: Dict[int, List[Tuple[int, int]]] = {}
    for i, c in enumerate(inst.clauses):
        for j, x in enumerate(c):
            if x != BOTTOM:
                occurrences.setdefault(x, []).append((i, j))
    pairs = []
    for occ in occurrences.values():
        if equiv_chain:
            pairs += list(zip(occ, occ[1:]))
        else:
            pairs += list(combinations(occ, 2))
    equiv_g = build_gadget(Kind.EQUIV, k)
    for (i, j), (i2, j2) in sorted(pairs):
        ops = (cert.t[i][j], cert.t[i2][j2])
        p = comp.attach(equiv_g, ops)
        cert.gadgets.append(GadgetRecord(Kind.EQUIV.value, ops, p.vertex_ids))

    false_g = build_gadget(Kind.FALSE, k)
    for i, c in enumerate(inst.clauses):
        for j, x in enumerate(c):
            if x == BOTTOM:
                p = comp.attach(false_g, (cert.t[i][j],))
                cert.gadgets.append(GadgetRecord(Kind.FALSE.value, (cert.t[i][j],), p.vertex_ids))
    return comp.game(), cert


# ---------------------------------------------------------------------------
# certificates

def assignment_to_profile(
    inst: OneInThreeInstance,
    cert: ReductionCertificate,
    sigma: Assignment,
    game: Optional[GameInstance] = None,
) -> Profile:
    """Extend a satisfying assignment to a PNE of the compiled game.

    Literal vertices take their truth values; every gadget is filled with
    the completion used in its permissiveness proof.  If that ever fails
    the solver completes the profile with the literal vertices pinned.
    """
    if not satisfies(inst, sigma):
        raise ReductionError("assignment does not make exactly one literal true per clause")
    val = _as_dict(inst, sigma)
    game = game or cert.rebuild()
    s = [0] * game.n
    for i, c in enumerate(inst.clauses):
        for j, x in enumerate(c):
            s[cert.t[i][j] - 1] = val[x] if x != BOTTOM else 0
    for rec in cert.gadgets:
        g = build_gadget(rec.kind, cert.k)
        ops = [s[h - 1] for h in rec.operands]
        for local, b in witness_completion(g, ops).items():
            s[rec.vertices[local - 1] - 1] = b
    profile = tuple(s)
    if is_pne(game, profile).is_pne:
        return profile
    pins = {h: s[h - 1] for row in cert.t for h in row}
    res = decide_pne(game, fixed=pins)
    if res.status is not Status.EXISTS:
        raise ReductionError("could not extend the assignment to an equilibrium")
    return res.profile


def profile_to_assignment(
    inst: OneInThreeInstance,
    cert: ReductionCertificate,
    s: Sequence[int],
    game: Optional[GameInstance] = None,
) -> Dict[int, int]:
    """Read the assignment off the literal vertices of a PNE."""
    game = game or cert.rebuild()
    if not is_pne(game, s).is_pne:
        raise ReductionError("profile is not a PNE of the compiled game")
    sigma: Dict[int, int] = {}
    for i, c in enumerate(inst.clauses):
        for j, x in enumerate(c):
            if x == BOTTOM:
                continue
            b = int(s[cert.t[i][j] - 1])
            if sigma.setdefault(x, b) != b:
                raise ReductionError(f"occurrences of variable {x} disagree")
    full = {v: sigma.get(v, 0) for v in range(1, inst.m + 1)}
    if not satisfies(inst, full):
        raise ReductionError("extracted assignment does not satisfy the instance")
    return sigma
