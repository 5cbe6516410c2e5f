"""Exception types shared across the package."""


class OrdisoError(Exception):
    """Base class for all package-specific errors."""


class NonFullRank(OrdisoError):
    """Input rows are linearly dependent where an echelon shape is required."""


class CompositeModulus(OrdisoError):
    """Modulus of a residue computation is not a prime power."""


class NotSublattice(OrdisoError):
    """A generator of the would-be sublattice fails membership in the ambient lattice."""


class UnequalSpan(OrdisoError):
    """Two lattices do not span the same rational subspace."""


class DimensionMismatch(OrdisoError):
    """Ambient dimensions disagree."""


class InvalidGroupTable(OrdisoError):
    """Multiplication table is not a group law."""


class SplitFailure(OrdisoError):
    """Las Vegas splitting exhausted its retry budget."""


class UnsupportedComponent(OrdisoError):
    """A simple component falls outside the supported kinds.

    Carries the detected kind description in args[0].
    """

    def __init__(self, detected: str):
        super().__init__(detected)
        self.detected = detected


class NotSuborder(OrdisoError):
    """Claimed suborder is not contained in the larger order."""


class RankMismatch(OrdisoError):
    """Module rank differs from the requested free rank."""


class BadEpsilon(OrdisoError):
    """Error bound outside (0, 1)."""


class QuotientTooLarge(OrdisoError):
    """A finite unit-group quotient exceeds the configured bound."""

    def __init__(self, size_hint: int, bound: int):
        super().__init__(f"unit quotient needs more than {bound} elements (hit {size_hint})")
        self.size_hint = size_hint
        self.bound = bound


class NotAnIso(OrdisoError):
    """A map claimed to be an isomorphism fails bijectivity."""


class NotPrincipalPair(OrdisoError):
    """Principal ideal solver found no generator; with class number one this signals a bug."""


class AlgebraStructureError(OrdisoError):
    """Internal structure verification failed (bug guard)."""
