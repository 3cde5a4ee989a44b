"""Optimal control toolkit for compartmental epidemic models."""

from epicon._core import *  # noqa: F401,F403
from epicon._core import __all__  # noqa: F401
