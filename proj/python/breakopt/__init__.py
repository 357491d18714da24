"""Production planning for a breakable, stock-stressed item.

Thin python surface over the C++ core: model construction, the closed-form
solutions, the stationarity boundary-value solver and the
direct-transcription optimizer.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
