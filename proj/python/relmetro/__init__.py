"""Gaussian-state metrology for an oscillating BEC cavity accelerometer."""

from ._relmetro import *  # noqa: F401,F403
from . import _relmetro

__all__ = [name for name in dir(_relmetro) if not name.startswith("_")]
