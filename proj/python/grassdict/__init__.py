"""Grassmannian distances, multivariate dictionary learning and clustering."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
