"""Exception types.

Invalid inputs raise :class:`ValueError` (or a subclass).  The remaining
classes signal that a construction could not be certified; they carry the
diagnostic data needed to understand why.
"""


class RefusalError(RuntimeError):
    """Base class for outcomes where no certificate can be issued."""


class CertificateRefused(RefusalError):
    """The supplied certificates do not meet a required inequality."""

    def __init__(self, inequality, detail=""):
        self.inequality = inequality
        self.detail = detail
        msg = f"refused: {inequality}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ExtractionExhausted(RefusalError):
    """The prefix is too short to refine through the whole scale schedule."""

    def __init__(self, deepest_stage, stage_sizes):
        self.deepest_stage = deepest_stage
        self.stage_sizes = list(stage_sizes)
        super().__init__(
            f"refinement exhausted after stage {deepest_stage}; "
            f"stage sizes {self.stage_sizes}"
        )


class BudgetExhausted(RefusalError):
    def __init__(self, message, partial_bound):
        self.partial_bound = partial_bound
        super().__init__(f"{message} (partial bound {partial_bound:.6g})")


class GridExhausted(RefusalError):
    def __init__(self, best_level, best_residual):
        self.best_level = best_level
        self.best_residual = best_residual
        super().__init__(
            f"no level on the grid brings the residual below epsilon; "
            f"best residual {best_residual:.6g} at level {best_level:.6g}"
        )


class NoWitnessFound(RefusalError):
    """The prefix looks tight at the given parameters.

    This is absence of evidence, not a proof of tightness.
    """


class PreconditionViolation(ValueError):
    def __init__(self, message, member=None, atom=None):
        self.member = member
        self.atom = atom
        super().__init__(message)


class ChainViolation(AssertionError):
    """An inequality that must hold by construction failed numerically."""
