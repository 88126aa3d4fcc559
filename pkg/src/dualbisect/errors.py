"""Exception hierarchy shared across the toolkit.

Every error carries a stable ``kind`` identifier that the CLI emits in
machine-readable error reports.
"""


class SolverError(Exception):
    kind = "SolverError"

    def to_json(self):
        return {"error": self.kind, "message": str(self)}


class OracleFailure(SolverError):
    """The minimization oracle could not produce a minimizer."""

    kind = "OracleFailure"


class LocalInfeasible(OracleFailure):
    """A single agent's constraint set is empty."""

    kind = "LocalInfeasible"


class NotStrictlyFeasible(SolverError):
    """Warm-start point does not satisfy the coupling constraint strictly."""

    kind = "NotStrictlyFeasible"


class NonPositiveLambdaRef(SolverError):
    """Warm-start multiplier came out non-positive: the scalar constraint is
    redundant and the problem is solvable without dualization."""

    kind = "NonPositiveLambdaRef"


class InfeasibleSuspected(SolverError):
    """Doubling phase exhausted its cap with the probe still violating."""

    kind = "InfeasibleSuspected"


class NumericalBreakdown(SolverError):
    """LP kernel hit its pivot limit or a singular basis."""

    kind = "NumericalBreakdown"


class NodeLimitExceeded(SolverError):
    kind = "NodeLimitExceeded"


class EnumerationTooLarge(SolverError):
    kind = "EnumerationTooLarge"


class NoFeasibleIterate(SolverError):
    """No stored subgradient iterate satisfies the coupling constraint."""

    kind = "NoFeasibleIterate"


class DidNotConverge(SolverError):
    kind = "DidNotConverge"


class DegenerateDual(SolverError):
    """Relative-gap metric undefined because the dual value is ~0."""

    kind = "DegenerateDual"


class NonRedundancyUnattainable(SolverError):
    """Instance generator could not produce a binding coupling constraint."""

    kind = "NonRedundancyUnattainable"
