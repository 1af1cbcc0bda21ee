"""Wind-load shape optimization toolkit.

Thin wrapper over the C++ core: mean-profile and scenario models, spectral
turbulence synthesis, the strip-surrogate load model, risk measures, and the
adaptive-sampling optimizer plumbing.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc if _core_doc else __doc__
