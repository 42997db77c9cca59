"""Singular-shock profiles of the Keyfitz-Kranzer system (C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
