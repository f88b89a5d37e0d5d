"""Regret lower bounds and DEL simulation for structured ergodic MDPs."""

from ._delmdp import *  # noqa: F401,F403
from ._delmdp import __doc__  # noqa: F401
