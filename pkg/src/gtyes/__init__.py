"""Group testing with a constrained number of positive responses."""

from gtyes.model import (
    Design,
    DefectiveSet,
    DomainError,
    ResponseVector,
    Transcript,
    respond,
    yes_count,
)

__version__ = "0.1.0"

__all__ = [
    "Design",
    "DefectiveSet",
    "DomainError",
    "ResponseVector",
    "Transcript",
    "respond",
    "yes_count",
]
