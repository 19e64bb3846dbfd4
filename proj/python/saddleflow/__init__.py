"""Saddle-point dynamics: flows, certificates and LP solvers."""

from ._saddleflow import *  # noqa: F401,F403
from ._saddleflow import __doc__  # noqa: F401

__version__ = "0.1.0"
