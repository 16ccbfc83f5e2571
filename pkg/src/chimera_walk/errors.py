"""Exception types shared across the package."""


class ChimeraWalkError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(ChimeraWalkError):
    """Graph dimensions are out of range (M, N, L must be positive)."""


class InvalidVariantError(ChimeraWalkError):
    """Operation applied to a graph variant it does not support."""


class InvalidSymmetryError(ChimeraWalkError):
    """Requested symmetry operator is not valid for the given graph."""


class UnsupportedVariantError(ChimeraWalkError):
    """No closed-form spectrum / symmetry set for this variant combination."""


class SamplingError(ChimeraWalkError):
    """Constrained vertex sampling failed within the retry budget."""


class VertexRangeError(ChimeraWalkError, IndexError):
    """Vertex coordinate or linear index out of range."""


class DegeneracyNotLiftedError(ChimeraWalkError):
    """Joint diagonalization left a degenerate block unresolved."""

    def __init__(self, energy: float, size: int):
        self.energy = energy
        self.size = size
        super().__init__(
            f"degenerate block at energy {energy:.12g} of size {size} "
            "was not reduced to one-dimensional joint eigenspaces"
        )


class ConfigError(ChimeraWalkError):
    """Invalid experiment configuration; carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
