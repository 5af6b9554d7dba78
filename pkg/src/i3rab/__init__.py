"""Treebank toolkit for the I3rab dependency annotation scheme.

Subpackages: conllx (format I/O), schema (vocabularies and validation),
convert (PADT-style to I3rab conversion), parser (transition-based
dependency parser), evaluate (scores and corpus statistics), render
(tree drawings), cli (command line).
"""

from .errors import I3rabError

__version__ = "0.1.0"

__all__ = ["I3rabError", "__version__"]
