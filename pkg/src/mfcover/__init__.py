"""Matrix factorizations over hypersurfaces and their branched covers."""

from .series import Field, Ring, TruncatedSeries, SeriesMatrix
from .mf import MatrixFactorization, ModulePresentation, BranchedCoverSpec

__all__ = ["Field", "Ring", "TruncatedSeries", "SeriesMatrix", "MatrixFactorization",
           "ModulePresentation", "BranchedCoverSpec"]
__version__ = "0.1.0"
