"""Correlation-inequality toolbox for spin-1/2 systems.

Exact-rational Taylor tables of the spectral kernels, Duhamel two-point
functions and their truncated-series bounds on exactly diagonalized models,
and the square-root-interpolation variational bound for the transverse-field
Sherrington-Kirkpatrick free energy.
"""

from duhamel._core import *  # noqa: F401,F403
from duhamel._core import __doc__ as _core_doc  # noqa: F401
