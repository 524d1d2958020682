"""Python bindings for the nemytskii-lab C++ core."""

from ._core import *  # noqa: F401,F403
