"""Fractional vote delegation engine.

Ballots spread each voter's single vote over peers, group/category
intermediaries, and policies. Assembled into a column-stochastic matrix
with absorbing policy columns, the delegation converges to a per-policy
vote distribution; the same machinery yields per-node influence scores, a
whole-vote (liquid democracy) comparison, and a multi-period delegation
dynamic driven by a CES utility.
"""

from .ballots import Ballot, reduce_to_ld
from .errors import (
    AllZeroWeights,
    BallotError,
    DimensionMismatch,
    DomainError,
    DuplicateBallot,
    EmptyAfterReduction,
    InvalidRegistry,
    MissingBallot,
    NoConvergence,
    NonFiniteUtility,
    NotComputed,
    NotTransient,
    PolicyNodeRejected,
    PolicySourceForbidden,
    PPVError,
    SelfAllocation,
    SessionError,
    SingularTransientBlock,
    SolverError,
    UnknownSession,
    UnknownSource,
    UnknownTarget,
    ZeroDenominator,
    ZeroMassBallot,
)
from .matrix import (
    EqualSplit,
    ValidationReport,
    Violation,
    VotingMatrix,
    Weighted,
    build_matrix,
    validate,
)
from .registry import BlockIndex, Node, NodeKind, NodeRegistry, make_registry
from .session import ComputeOptions, EventRecord, Session, SessionStore, replay_events
from .solver import (
    InfluenceReport,
    LdComparison,
    LimitMatrix,
    PolicyComparison,
    TallyResult,
    compare_with_ld,
    influence_report,
    limit_by_fundamental,
    limit_by_squaring,
    net_proxy_vote,
    net_proxy_vote_rank_one,
    rank_one_reduce,
    tally,
)
from .utility import (
    DelegationState,
    FeedbackParams,
    GParams,
    SimulationConfig,
    SimulationResult,
    VoterProfile,
    ces_gradient,
    ces_value,
    redistribute,
    run_simulation,
    similarity,
    update_weights,
    utility_with_influence,
)

__version__ = "0.1.0"

__all__ = [
    "Ballot",
    "BlockIndex",
    "ComputeOptions",
    "DelegationState",
    "EqualSplit",
    "EventRecord",
    "FeedbackParams",
    "GParams",
    "InfluenceReport",
    "LdComparison",
    "LimitMatrix",
    "Node",
    "NodeKind",
    "NodeRegistry",
    "PolicyComparison",
    "Session",
    "SessionStore",
    "SimulationConfig",
    "SimulationResult",
    "TallyResult",
    "ValidationReport",
    "Violation",
    "VoterProfile",
    "VotingMatrix",
    "Weighted",
    "build_matrix",
    "ces_gradient",
    "ces_value",
    "compare_with_ld",
    "influence_report",
    "limit_by_fundamental",
    "limit_by_squaring",
    "make_registry",
    "net_proxy_vote",
    "net_proxy_vote_rank_one",
    "rank_one_reduce",
    "redistribute",
    "reduce_to_ld",
    "replay_events",
    "run_simulation",
    "similarity",
    "tally",
    "update_weights",
    "utility_with_influence",
    "validate",
    # errors
    "PPVError",
    "AllZeroWeights",
    "BallotError",
    "DimensionMismatch",
    "DomainError",
    "DuplicateBallot",
    "EmptyAfterReduction",
    "InvalidRegistry",
    "MissingBallot",
    "NoConvergence",
    "NonFiniteUtility",
    "NotComputed",
    "NotTransient",
    "PolicyNodeRejected",
    "PolicySourceForbidden",
    "SelfAllocation",
    "SessionError",
    "SingularTransientBlock",
    "SolverError",
    "UnknownSession",
    "UnknownSource",
    "UnknownTarget",
    "ZeroDenominator",
    "ZeroMassBallot",
]
