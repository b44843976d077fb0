"""Exception hierarchy.

Three families, mapped to CLI exit codes:

* :class:`InputError` -- the input violates an axiom or a bound (exit 1).
* :class:`NumericalError` -- a floating point stage failed to converge or
  to round cleanly (exit 2).
* :class:`InvariantFailure` -- a proven identity failed on validated input.
  This always means a bug (exit 2).
"""

from __future__ import annotations


class FusionError(Exception):
    """Base class for every error raised by this package."""


class InputError(FusionError, ValueError):
    pass


class NumericalError(FusionError, ArithmeticError):
    pass


class InvariantFailure(FusionError, AssertionError):
    pass


# -- witness-carrying axiom violations ---------------------------------------

class AxiomViolation(InputError):
    """An axiom failed; ``witness`` holds the offending index tuple."""

    axiom = "axiom"

    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(f"{message} (witness {witness})" if witness else message)
        self.witness = tuple(witness)
        # filled by validators that collect every failure before raising
        self.violations: list[AxiomViolation] = [self]


class RingFormatError(InputError):
    pass


class UnitAxiomViolation(AxiomViolation):
    axiom = "unit"


class DualityViolation(AxiomViolation):
    axiom = "duality"


class AssociativityViolation(AxiomViolation):
    axiom = "associativity"


class ReciprocityViolation(AxiomViolation):
    axiom = "reciprocity"


class NotTransitive(AxiomViolation):
    axiom = "transitivity"


class ActionAxiomViolation(AxiomViolation):
    axiom = "action"


class Decomposable(InputError):
    def __init__(self, components: list[list[int]]):
        super().__init__(f"module decomposes into {len(components)} components: {components}")
        self.components = components


class NormalizationFailure(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class RankBoundExceeded(InputError):
    pass


# -- groups -------------------------------------------------------------------

class NotClosed(AxiomViolation):
    axiom = "closure"


class GroupAssociativityViolation(NotClosed):
    axiom = "associativity"


class TooLarge(InputError):
    pass


class OrderBoundExceeded(InputError):
    pass


# -- cohomology ---------------------------------------------------------------

class NotACocycle(InputError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(f"{message} (witness {witness})" if witness else message)
        self.witness = tuple(witness)


class CoefficientOverflow(InputError):
    pass


class DegreeUnsupported(InputError):
    pass


# -- constructions ------------------------------------------------------------

class NotExact(InputError):
    pass


class StabilizerTooLarge(InputError):
    pass


# -- numerics -----------------------------------------------------------------

class ConvergenceFailure(NumericalError):
    def __init__(self, iterations: int):
        super().__init__(f"power iteration did not converge in {iterations} iterations")
        self.iterations = iterations


class ResidualTooLarge(NumericalError):
    def __init__(self, residual: float):
        super().__init__(f"multiplicativity residual {residual:.3e} exceeds tolerance")
        self.residual = residual


class CharacterConvergenceFailure(NumericalError):
    pass


class RoundingResidualTooLarge(NumericalError):
    pass


class ValidationFailed(NumericalError):
    pass


# -- proven identities --------------------------------------------------------

class IdentityViolation(InvariantFailure):
    pass


class IdentityFailure(InvariantFailure):
    pass
