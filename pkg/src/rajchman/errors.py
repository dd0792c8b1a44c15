"""Exception taxonomy shared across the package."""


class RajchmanError(Exception):
    """Base class for all package errors."""


class DomainError(RajchmanError, ValueError):
    """Abscissa below an expression's validity cutoff, or phase unresolvable."""


class ParseError(RajchmanError, ValueError):
    """Malformed expression or gauge text."""


class DegenerateInputError(RajchmanError, ValueError):
    """Input degenerate for the requested operation (e.g. identically-zero f on a grid)."""


class InvalidGaugeError(RajchmanError, ValueError):
    """Gauge evaluator violates the dimension-function requirements on the sampled grid."""


class CapExceededError(RajchmanError, RuntimeError):
    """A desk-scale cap (resolution, frequency window, schedule) was hit.

    Carries a machine-readable ``report`` dict so callers can surface what blew up.
    """

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = dict(report or {})


class TargetRejectedError(RajchmanError, ValueError):
    """Decay target refused by the admissibility gate (classifier verdict not 'in')."""


class CertificateError(RajchmanError, ValueError):
    """A gap certificate could not be produced (criterion inapplicable or input missing)."""


class BumpHypothesisError(RajchmanError, ValueError):
    """A bump sample violates one of the named autoconvolution hypotheses."""

    def __init__(self, hypothesis: str, message: str):
        super().__init__(f"hypothesis {hypothesis} violated: {message}")
        self.hypothesis = hypothesis
