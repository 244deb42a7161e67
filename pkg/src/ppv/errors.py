"""Exception types raised across the engine.

Every error carries enough context (node ids, offending values) to be
reported back to a session participant without a stack trace.
"""

from __future__ import annotations


class PPVError(Exception):
    """Base class for all engine errors."""


# --- registry / ballot assembly ---------------------------------------------

class InvalidRegistry(PPVError):
    """Node universe violates a structural rule (duplicate id, no policy,
    membership cycle, dangling member reference)."""


class BallotError(PPVError):
    """Base class for ballot-level problems."""


class ZeroMassBallot(BallotError):
    def __init__(self, source: str, detail: str = "no strictly positive allocation"):
        self.source = source
        super().__init__(f"ballot from {source!r}: {detail}")


class SelfAllocation(BallotError):
    def __init__(self, source: str):
        self.source = source
        super().__init__(f"ballot from {source!r} allocates to itself")


class MissingBallot(BallotError):
    def __init__(self, voter: str):
        self.voter = voter
        super().__init__(f"voter {voter!r} has no ballot")


class DuplicateBallot(BallotError):
    def __init__(self, source: str):
        self.source = source
        super().__init__(f"more than one ballot from {source!r}")


class UnknownTarget(BallotError):
    def __init__(self, source: str, target: str):
        self.source = source
        self.target = target
        super().__init__(f"ballot from {source!r} targets unknown node {target!r}")


class PolicySourceForbidden(BallotError):
    def __init__(self, source: str):
        self.source = source
        super().__init__(f"policy node {source!r} cannot cast a ballot")


class UnknownSource(BallotError):
    def __init__(self, source: str, detail: str = "not a registered voter or intermediary"):
        self.source = source
        super().__init__(f"ballot source {source!r}: {detail}")


class EmptyAfterReduction(BallotError):
    def __init__(self, voter: str):
        self.voter = voter
        super().__init__(
            f"ballot from {voter!r} allocated only to intermediaries; "
            "nothing remains after reduction"
        )


# --- solver ------------------------------------------------------------------

class SolverError(PPVError):
    """Base class for limit/influence computation failures."""


class NoConvergence(SolverError):
    def __init__(self, residual: float, squarings: int, stranded: tuple = ()):
        self.residual = residual
        self.squarings = squarings
        self.stranded = tuple(stranded)
        message = (
            f"power squaring did not converge after {squarings} squarings "
            f"(residual {residual:.3e}); a closed delegation class is likely"
        )
        if self.stranded:
            message += f"; nodes with no path to any policy: {list(self.stranded)}"
        super().__init__(message)


class SingularTransientBlock(SolverError):
    def __init__(self, detail: str = "transient block is singular (closed delegation class)"):
        super().__init__(detail)


class PolicyNodeRejected(SolverError):
    def __init__(self, node: str):
        self.node = node
        super().__init__(f"node {node!r} is a policy; operation needs a voter or intermediary")


class NotTransient(SolverError):
    def __init__(self, node: str):
        self.node = node
        super().__init__(f"node {node!r} is not a transient node of this matrix")


# --- utility / simulation ----------------------------------------------------

class DomainError(PPVError):
    """Argument outside the mathematical domain of a utility operation."""


class DimensionMismatch(DomainError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"vector length mismatch: expected {expected}, got {got}")


class AllZeroWeights(DomainError):
    def __init__(self, detail: str = "weight update produced an all-zero column"):
        super().__init__(detail)


class ZeroDenominator(DomainError):
    def __init__(self, detail: str = "redistribution denominator is zero or not finite"):
        super().__init__(detail)


class NonFiniteUtility(PPVError):
    def __init__(self, period: int, voter: str):
        self.period = period
        self.voter = voter
        super().__init__(f"non-finite utility for voter {voter!r} in period {period}")


# --- session service -----------------------------------------------------------

class SessionError(PPVError):
    """Base class for session workflow errors."""


class UnknownSession(SessionError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"no session {session_id!r}")


class NotComputed(SessionError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"session {session_id!r} has no computed snapshot yet")
