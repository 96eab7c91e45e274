"""Radar-camera alignment and fusion kernel toolkit."""

from rfk._core import *  # noqa: F401,F403
from rfk._core import __version__  # noqa: F401
