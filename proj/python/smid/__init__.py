"""Set-membership identification of LTV errors-in-variables systems."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
