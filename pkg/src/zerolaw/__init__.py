"""Zero-one-law experiments for random graphs with distance-decaying edge
probabilities: sampling, exact first-moment formulas, first-order model
checking, catalog-driven closure and Monte Carlo estimation across n."""

__version__ = "0.1.0"

from .errors import AdditionTheoremViolation, UnsupportedSize
from .kernels import BACKEND
from .structures import PairType, PartialEmbedding, Structure, Vocabulary

__all__ = [
    "__version__", "AdditionTheoremViolation", "UnsupportedSize", "BACKEND", "PairType",
    "PartialEmbedding", "Structure", "Vocabulary",
]
