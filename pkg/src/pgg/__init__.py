"""Public goods games on graphs with arbitrary best-response patterns."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError, FormatError, NotDecreasingError, PatternSyntaxError, PGGError, ReductionError,
)
from .pattern import *  # noqa: E402,F401,F403
from .game import *  # noqa: E402,F401,F403
from .dynamics import *  # noqa: E402,F401,F403
from .congestion import *  # noqa: E402,F401,F403
from .solver import *  # noqa: E402,F401,F403
from .gadgets import *  # noqa: E402,F401,F403
from .reduction import *  # noqa: E402,F401,F403
from .generate import *  # noqa: E402,F401,F403
