"""Finite-horizon certification procedures.

certify_contractivity checks the game-tree hypothesis that every
A-sequence eventually admits a B-response making some product norm drop
strictly below 1. pointwise_probe plays a heuristic vector game between a
myopic adversarial A and a lookahead-minimizing B; its verdicts are
evidence only and never feed certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BudgetExceeded, ShapeError, ZeroVector
from .linalg import NormKind
from .minimax import DEFAULT_NODE_BUDGET, min_final_norm
from .system import AlternatingSystem

# strictness margin: a product only counts as contracting below 1 - this
STRICT_TOL = 1e-12


class ContractivityResult(Enum):
    CERTIFIED_YES = "certified-yes"
    NO_WITHIN_HORIZON = "no-within-horizon"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ContractivityVerdict:
    """Outcome of the contractivity game-tree check.

    CERTIFIED_YES carries the deepest prefix length that was needed;
    NO_WITHIN_HORIZON carries an A-path of the full horizon on which every
    prefix's B-minimum norm stayed at or above 1.
    """

    result: ContractivityResult
    k: int | None
    witness: tuple[int, ...] | None
    horizon: int
    nodes: int


class _Unresolved(Exception):
    def __init__(self, witness: tuple[int, ...]):
        self.witness = witness


def certify_contractivity(
    sys: AlternatingSystem,
    horizon: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ContractivityVerdict:
    """Decide whether every A-path of the horizon reaches a contracting prefix.

    An A-prefix is resolved when the minimum over all B-responses of its
    final product norm is strictly below 1; otherwise all one-step
    extensions must resolve before the horizon runs out. The first
    unresolved full-length path (in index order) becomes the witness.
    Budget exhaustion yields INCONCLUSIVE.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    na = len(sys.a_set)
    nb = len(sys.b_set)
    nodes = 0

    def resolve(prefix: tuple[int, ...]) -> int:
        nonlocal nodes
        cost = nb ** len(prefix)
        if nodes + cost > node_budget:
            raise BudgetExceeded(
                f"exploring prefix of length {len(prefix)} would exceed budget"
            )
        nodes += cost
        if min_final_norm(sys, prefix, node_budget) < 1.0 - STRICT_TOL:
            return len(prefix)
        if len(prefix) == horizon:
            raise _Unresolved(prefix)
        return max(resolve(prefix + (a,)) for a in range(na))

    try:
        k = max(resolve((a,)) for a in range(na))
    except _Unresolved as exc:
        return ContractivityVerdict(
            result=ContractivityResult.NO_WITHIN_HORIZON,
            k=None,
            witness=exc.witness,
            horizon=horizon,
            nodes=nodes,
        )
    except BudgetExceeded:
        return ContractivityVerdict(
            result=ContractivityResult.INCONCLUSIVE,
            k=None,
            witness=None,
            horizon=horizon,
            nodes=nodes,
        )
    return ContractivityVerdict(
        result=ContractivityResult.CERTIFIED_YES,
        k=k,
        witness=None,
        horizon=horizon,
        nodes=nodes,
    )


class ProbeOutcome(Enum):
    STAYED_BELOW_CAP = "stayed-below-cap"
    EXCEEDED_CAP = "exceeded-cap"


@dataclass(frozen=True)
class ProbeResult:
    """Heuristic pointwise game outcome; norms include the start vector."""

    outcome: ProbeOutcome
    a_indices: tuple[int, ...]
    b_indices: tuple[int, ...]
    norms: tuple[float, ...]
    exceeded_at: int | None


def _vec_norm(v: np.ndarray, norm: NormKind) -> float:
    if norm is NormKind.MAX_ROW:
        return float(np.abs(v).max())
    return float(np.linalg.norm(v))


def pointwise_probe(
    sys: AlternatingSystem,
    x,
    horizon: int,
    cap: float,
    lookahead: int = 7,
) -> ProbeResult:
    """Greedy adversarial-A / lookahead-B probe of pointwise boundedness.

    Each step the A-index maximizing the post-response one-step growth is
    chosen, then the B-index minimizing the worst-case running peak of the
    next `lookahead` steps (future A adversarial inside the rollout). The
    default depth 7 covers a full rotate-then-squeeze block of the sector
    strategy. Verdicts are heuristic: a smarter B might survive where this
    one exceeds the cap.
    """
    v = np.array(x, dtype=float)
    if v.shape != (sys.product_dim,):
        raise ShapeError(
            f"expected a {sys.product_dim}-vector for this system, got shape {v.shape}"
        )
    if not np.any(v):
        raise ZeroVector("probe needs a nonzero start vector")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if lookahead < 1:
        raise ValueError("lookahead must be >= 1")

    na = len(sys.a_set)
    nb = len(sys.b_set)
    factors = [[sys.step_factor(i, j) for j in range(nb)] for i in range(na)]
    norm = sys.norm
    limit = cap * _vec_norm(v, norm)

    def peak(w: np.ndarray, depth: int) -> float:
        # worst-case (over A) minimal (over B) running peak of ||.|| from w
        here = _vec_norm(w, norm)
        if depth == 0:
            return here
        worst = 0.0
        for i in range(na):
            best = math.inf
            for j in range(nb):
                best = min(best, peak(factors[i][j] @ w, depth - 1))
            worst = max(worst, best)
        return max(here, worst)

    a_used: list[int] = []
    b_used: list[int] = []
    norms = [_vec_norm(v, norm)]
    exceeded_at = None
    for step in range(1, horizon + 1):
        a_star = max(
            range(na),
            key=lambda i: min(_vec_norm(factors[i][j] @ v, norm) for j in range(nb)),
        )
        b_star = min(
            range(nb),
            key=lambda j: peak(factors[a_star][j] @ v, lookahead - 1),
        )
        v = factors[a_star][b_star] @ v
        a_used.append(a_star)
        b_used.append(b_star)
        norms.append(_vec_norm(v, norm))
        if norms[-1] > limit:
            exceeded_at = step
            break
    outcome = (
        ProbeOutcome.EXCEEDED_CAP if exceeded_at is not None else ProbeOutcome.STAYED_BELOW_CAP
    )
    return ProbeResult(
        outcome=outcome,
        a_indices=tuple(a_used),
        b_indices=tuple(b_used),
        norms=tuple(norms),
        exceeded_at=exceeded_at,
    )
