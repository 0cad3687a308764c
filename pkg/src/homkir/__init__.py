"""Exact symbolic engine for homotopy Kirillov structures."""

from ._kernels import BACKEND
from .algebra import (Chart, ChartMismatch, Grading, GradingError, Inhomogeneous, Poly,
                      Variable, embed, grading_of, partial, restrict_to_base, substitute, to_text)

__version__ = "0.1.0"
