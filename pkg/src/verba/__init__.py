"""Verbal uncertainty toolkit.

Fuzzy meanings for probability words, calibration of those meanings against
individual usage, and propagation of verbally stated uncertainty through
evidence revision and structured arguments.
"""

__version__ = "0.1.0"

from .fuzzy import UnitFuzzyNumber, crisp
from .lexicon import Lexicon, LinguisticLabel, default_lexicon, nearest_label

__all__ = [
    "UnitFuzzyNumber",
    "crisp",
    "Lexicon",
    "LinguisticLabel",
    "default_lexicon",
    "nearest_label",
    "__version__",
]
