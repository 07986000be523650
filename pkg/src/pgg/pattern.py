"""Best-response patterns.

A pattern is an infinite 0/1 sequence ``T`` where ``T[l]`` is a player's
response to ``l`` active neighbours.  Only eventually-zero and
eventually-periodic sequences are representable.  The textual form is::

    bits? ( "0*" | "(" bits ")*" )

so ``"10*"`` is one followed by zeros, ``"(10)*"`` the alternating sequence and
``"10010*"`` the picky pattern for ``k = 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from .errors import PatternSyntaxError

__all__ = [
    "Pattern",
    "PatternClass",
    "parse_pattern",
    "decreasing",
    "picky",
    "classify",
    "leading_ones",
    "VERDICT_ALWAYS",
    "VERDICT_POLY",
    "VERDICT_NPC",
]

Bits = Tuple[int, ...]


def _primitive_root(word: Bits) -> Bits:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


@dataclass(frozen=True)
class Pattern:
    """Canonical eventually-periodic bit sequence ``prefix . tail``.

    ``period is None`` means the tail is all zeros.  Construction always
    canonicalizes, so equal sequences compare equal.
    """

    prefix: Bits = ()
    period: Optional[Bits] = None

    def __post_init__(self):
        prefix = tuple(int(b) for b in self.prefix)
        period = None if self.period is None else tuple(int(b) for b in self.period)
        if any(b not in (0, 1) for b in prefix + (period or ())):
            raise ValueError("pattern bits must be 0 or 1")
        if period is not None:
            if not period:
                raise ValueError("periodic word must be nonempty")
            if not any(period):
                period = None
        if period is None:
            while prefix and prefix[-1] == 0:
                prefix = prefix[:-1]
        else:
            period = _primitive_root(period)
            # roll the period backwards over matching prefix bits
            while prefix and prefix[-1] == period[-1]:
                prefix = prefix[:-1]
                period = period[-1:] + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    def __getitem__(self, index: int) -> int:
        return self.eval(index)

    def eval(self, index: int) -> int:
        if index < 0:
            raise IndexError("pattern index must be nonnegative")
        if index < len(self.prefix):
            return self.prefix[index]
        if self.period is None:
            return 0
        return self.period[(index - len(self.prefix)) % len(self.period)]

    def table(self, length: int) -> Bits:
        """The first ``length`` responses."""
        return tuple(self.eval(i) for i in range(length))

    @property
    def is_zero_tail(self) -> bool:
        return self.period is None

    def __str__(self) -> str:
        head = "".join(map(str, self.prefix))
        if self.period is None:
            return head + "0*"
        return head + "(" + "".join(map(str, self.period)) + ")*"

    def __repr__(self) -> str:
        return f"Pattern({str(self)!r})"


def parse_pattern(text: str) -> Pattern:
    """Parse the textual pattern syntax; all-zero periods collapse to ``0*``."""
    src = text.strip()
    if not src:
        raise PatternSyntaxError(text, 0, "empty pattern")
    # find where the repeated part begins
    if src.endswith(")*"):
        open_at = src.rfind("(")
        if open_at < 0:
            raise PatternSyntaxError(text, len(src) - 2, "unmatched ')'")
        head, word = src[:open_at], src[open_at + 1 : -2]
        if not word:
            raise PatternSyntaxError(text, open_at + 1, "empty periodic word")
        _check_bits(text, word, open_at + 1)
        _check_bits(text, head, 0)
        return Pattern(tuple(map(int, head)), tuple(map(int, word)))
    if src.endswith("0*"):
        head = src[:-2]
        _check_bits(text, head, 0)
        return Pattern(tuple(map(int, head)), None)
    if src.endswith("*"):
        raise PatternSyntaxError(text, len(src) - 1, "'*' must follow '0' or ')'")
    bad = next((i for i, c in enumerate(src) if c not in "01"), None)
    if bad is not None:
        raise PatternSyntaxError(text, bad, f"unexpected {src[bad]!r}")
    raise PatternSyntaxError(text, len(src), "missing '0*' or '(...)*' tail")


def _check_bits(text, chunk, offset):
    for i, c in enumerate(chunk):
        if c not in "01":
            raise PatternSyntaxError(text, offset + i, f"unexpected {c!r}")


def decreasing(k: int) -> Pattern:
    """``1^k 0*``."""
    return Pattern((1,) * k)


def picky(k: int) -> Pattern:
    """``1 0^k 1 0*``: act alone or alongside exactly ``k + 1`` neighbours."""
    if k < 1:
        raise ValueError("picky pattern needs k >= 1")
    return Pattern((1,) + (0,) * k + (1,))


def leading_ones(p: Pattern) -> Optional[int]:
    """``k`` if ``p`` is ``1^k 0*`` with ``k >= 1``, else ``None``."""
    if p.period is None and p.prefix and all(p.prefix):
        return len(p.prefix)
    return None


# ---------------------------------------------------------------------------
# complexity classes for homogeneous games

VERDICT_ALWAYS = "PNE always exists, O(1)"
VERDICT_POLY = "polynomial"
VERDICT_NPC = "NP-complete"
UNCLASSIFIED = "unclassified"


class PatternClass(NamedTuple):
    name: str
    verdict: str


def _is_picky_prefix(bits):
    # 1 0^k 1 with k >= 1
    return (
        len(bits) >= 3
        and bits[0] == 1
        and bits[-1] == 1
        and all(b == 0 for b in bits[1:-1])
    )


def _is_truncated_alternating(bits):
    # (10)^j 1 with j >= 1
    if len(bits) < 3 or len(bits) % 2 == 0:
        return False
    return all(b == (1 - i % 2) for i, b in enumerate(bits))


def _zero_then_one_after(p: Pattern, start: int) -> bool:
    """Is there an index ``i >= start`` with ``T[i] = 0`` and some later 1?"""
    if p.period is None:
        last_one = len(p.prefix) - 1
        return any(p.prefix[i] == 0 for i in range(start, last_one))
    horizon = max(start, len(p.prefix)) + len(p.period)
    return any(p.eval(i) == 0 for i in range(start, horizon))


def classify(p: Pattern) -> frozenset:
    """All rows of the known-complexity table that ``p`` belongs to.

    Classes overlap (``1010*`` is both ``10^+10^*`` and ``(10)^+10^*``).  A
    pattern in none of them yields ``{("unclassified", "unclassified")}``.
    """
    found = set()
    bits = p.prefix
    if leading_ones(p) is not None:
        found.add(PatternClass("1^+0^+", VERDICT_ALWAYS))
    if p.prefix == () and p.period == (1, 0):
        found.add(PatternClass("(10)^*", VERDICT_POLY))
    if p.period is None:
        if _is_picky_prefix(bits):
            found.add(PatternClass("10^+10^*", VERDICT_NPC))
        if _is_truncated_alternating(bits):
            found.add(PatternClass("(10)^+10^*", VERDICT_NPC))
        # 1 0^k 1 1 ... then eventually zero
        j = 1
        while j < len(bits) and bits[j] == 0:
            j += 1
        if (
            len(bits) >= 4
            and bits[0] == 1
            and j >= 2
            and j + 1 < len(bits)
            and bits[j] == 1
            and bits[j + 1] == 1
        ):
            found.add(PatternClass("10^+11.^*0^+", VERDICT_NPC))
    if p.eval(0) == 1 and p.eval(1) == 1 and _zero_then_one_after(p, 2):
        found.add(PatternClass("11.^*0.^*10^*", VERDICT_NPC))
    if not found:
        found.add(PatternClass(UNCLASSIFIED, UNCLASSIFIED))
    return frozenset(found)
