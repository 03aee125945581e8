"""Public-key encryption from random MinRank instances over F2."""

from .f2mat import BitMatrix, MatrixTuple
from .minrank import Params
from .rng import Rng

__version__ = "0.1.0"

__all__ = ["BitMatrix", "MatrixTuple", "Params", "Rng", "__version__"]
