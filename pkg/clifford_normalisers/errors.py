from __future__ import annotations


class NormaliserToolkitError(Exception):
    exit_code = 2


class InputError(NormaliserToolkitError):
    exit_code = 2


class BudgetExceeded(NormaliserToolkitError):
    exit_code = 3


class ClassificationMismatch(NormaliserToolkitError):
    exit_code = 1

    def __init__(self, message: str, table=None):
        super().__init__(message)
        self.table = table


# cyclotomic
class CycloParseError(InputError):
    pass


class CycloZeroDivision(ZeroDivisionError, InputError):
    pass


class ConductorCapExceeded(BudgetExceeded):
    pass


# matrices and groups
class DimensionMismatch(InputError):
    pass


class SingularGenerator(InputError):
    pass


class NotAMember(InputError):
    pass


class NonScalarCentre(InputError):
    pass


class NotIrreducible(InputError):
    pass


class ToleranceNotMet(InputError):
    pass


class ClosureBudgetExceeded(BudgetExceeded):
    pass


# normalisers
class NotSquareOfSquare(InputError):
    pass


class NotANormaliser(InputError):
    pass


class SchurBoundViolation(InputError):
    pass


class SearchBudgetExceeded(BudgetExceeded):
    pass


# catalogue
class CatalogError(InputError):
    pass


class UnrecognizedBaseGroup(InputError):
    pass


# files and circuits
class GroupFileError(InputError):
    pass


class CircuitError(InputError):
    pass


class AdaptiveGateRejected(CircuitError):
    pass


class ObservableError(InputError):
    pass


class NoDilationGate(InputError):
    pass
