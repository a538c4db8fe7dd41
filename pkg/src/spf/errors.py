"""Shared exception types."""


class BudgetExceeded(Exception):
    """A computation's size estimate exceeds the configured budget."""

    def __init__(self, estimate, budget):
        super().__init__(f"size estimate {estimate} exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


class HypothesisNotMet(Exception):
    """A theorem's hypothesis failed; the requested check does not apply."""


class VerificationMismatch(Exception):
    """Two independently computed sides disagree."""

    def __init__(self, report):
        super().__init__(str(report))
        self.report = report
