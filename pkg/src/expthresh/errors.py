"""Exception hierarchy shared by every module."""


class ExpThreshError(Exception):
    """Base class; ``code`` is the machine-readable name used in CLI error objects."""

    code = "Error"

    def to_json(self):
        return {"error": self.code, "message": str(self)}


class BudgetExceeded(ExpThreshError):
    code = "BudgetExceeded"


class MaterializationTooLarge(ExpThreshError):
    code = "MaterializationTooLarge"


class WidthCapExceeded(ExpThreshError):
    code = "WidthCapExceeded"


class IndeterminateAtPrecision(ExpThreshError):
    code = "IndeterminateAtPrecision"


class WitnessSearchInconclusive(ExpThreshError):
    code = "WitnessSearchInconclusive"


class NoRoot(ExpThreshError):
    code = "NoRoot"


class PreconditionViolated(ExpThreshError):
    code = "PreconditionViolated"


class EmptyFamily(ExpThreshError):
    code = "EmptyFamily"


class DegenerateThreshold(EmptyFamily):
    code = "DegenerateThreshold"


class RetriesExhausted(ExpThreshError):
    code = "RetriesExhausted"

    def __init__(self, message, failures=0):
        super().__init__(message)
        self.failures = failures

    def to_json(self):
        out = super().to_json()
        out["failures"] = self.failures
        return out


class InnerCertificateInvalid(ExpThreshError):
    code = "InnerCertificateInvalid"


class DegeneratePivotLimit(ExpThreshError):
    code = "DegeneratePivotLimit"


class SmallJrBranch(ExpThreshError):
    code = "SmallJrBranch"


class ParseError(ExpThreshError):
    code = "ParseError"
