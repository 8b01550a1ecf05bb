"""Unitary orbits of pinching operators: norms, orbit geometry and the quotient Finsler metric."""

from ._pinchlab import *  # noqa: F401,F403
from ._pinchlab import __doc__  # noqa: F401
