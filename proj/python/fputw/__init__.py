"""Traveling waves in monatomic and diatomic FPUT lattices."""

from ._fputw import *  # noqa: F401,F403
from ._fputw import __version__  # noqa: F401
