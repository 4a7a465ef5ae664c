"""Exception hierarchy shared by all kcmreach modules."""

from __future__ import annotations


class KCMError(Exception):
    """Base class for every error raised by kcmreach."""


class FamilyError(KCMError):
    """An update family failed validation.

    ``rule_index`` points at the offending rule when there is one.
    """

    def __init__(self, message: str, rule_index: int | None = None):
        if rule_index is not None:
            message = f"rule {rule_index}: {message}"
        super().__init__(message)
        self.rule_index = rule_index


class EmptyRule(FamilyError):
    pass


class RuleContainsOrigin(FamilyError):
    pass


class NoRules(FamilyError):
    pass


class DimensionMismatch(FamilyError):
    pass


class NotLinearlyIndependent(KCMError):
    pass


class EmptyBox(KCMError):
    pass


class SiteOutsideDomain(KCMError):
    pass


class InvalidBudget(KCMError):
    pass


class NotUnrooted(KCMError):
    pass


class NoContiguousDomain(KCMError):
    pass


class ResourceCapExceeded(KCMError):
    """A search hit its state or depth cap before reaching a verdict."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
