"""Structured sets, operators and the set-level interpolation constructions."""

from .core import *  # noqa: F401,F403
from .encode import *  # noqa: F401,F403
from .interpolate import *  # noqa: F401,F403
from .operators import *  # noqa: F401,F403
