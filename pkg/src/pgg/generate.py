"""Seeded random instances (numpy PCG64 streams)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .game import GameInstance
from .pattern import Pattern, parse_pattern

__all__ = ["Gnp", "CompleteWeighted", "generate_instance", "rng_for"]


@dataclass(frozen=True)
class Gnp:
    n: int
    p: Fraction = Fraction(1, 2)


@dataclass(frozen=True)
class CompleteWeighted:
    n: int
    wmax: int = 1


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generate_instance(
    model: Union[Gnp, CompleteWeighted],
    patterns: Union[str, Pattern, Sequence[Union[str, Pattern]]] = "10*",
    seed: int = 0,
) -> GameInstance:
    """Random graph from ``model``; one pattern is homogeneous, a list is
    sampled per vertex."""
    if model.n < 1:
        raise ValueError("n must be at least 1")
    rng = rng_for(seed)
    edges = []
    if isinstance(model, Gnp):
        p = Fraction(model.p)
        if not 0 <= p <= 1:
            raise ValueError("edge probability must lie in [0, 1]")
        for u in range(1, model.n + 1):
            for v in range(u + 1, model.n + 1):
                # exact rational coin: draw below the denominator
                if int(rng.integers(p.denominator)) < p.numerator:
                    edges.append((u, v))
    elif isinstance(model, CompleteWeighted):
        if model.wmax < 1:
            raise ValueError("wmax must be at least 1")
        for u in range(1, model.n + 1):
            for v in range(u + 1, model.n + 1):
                edges.append((u, v, int(rng.integers(1, model.wmax + 1))))
    else:
        raise TypeError(f"unknown model {model!r}")
    if isinstance(patterns, (str, Pattern)):
        pats = [patterns] * model.n
    else:
        choices = [p if isinstance(p, Pattern) else parse_pattern(p) for p in patterns]
        if not choices:
            raise ValueError("need at least one pattern")
        pats = [choices[int(i)] for i in rng.integers(len(choices), size=model.n)]
    return GameInstance.build(model.n, edges, pats)
