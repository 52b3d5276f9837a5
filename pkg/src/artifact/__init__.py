"""Normal approximation bounds for sums and random sums, with exact lattice oracles."""

from . import bounds_clt, bounds_rs, cf, lattice, special, tables
from .errors import ArtifactError, DomainError, NumericError, StructuralError, TableLookupError

__version__ = "0.1.0"
