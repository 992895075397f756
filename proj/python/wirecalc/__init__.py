"""Compositional open dynamical systems and steady-state matrices."""

from ._wirecalc import *  # noqa: F401,F403
from ._wirecalc import __doc__  # noqa: F401
