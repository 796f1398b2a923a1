"""Game values for alternating matrix products.

For fixed index sequences the payoff is nu_n: the running maximum of
prefix product norms. mu_n is the open-loop game value: the A-side commits
to its whole index tuple first, then the B-side responds with the tuple
minimizing nu_n. Both quantifiers range over finite alphabets, so maxima
and minima are attained; witnesses are made deterministic by breaking ties
toward lexicographically smallest index sequences.

Two engines are provided. best_response / mu_n use depth-first search over
B choices with sound pruning (the running maximum never decreases along a
path, so a branch whose running maximum already matches the incumbent
cannot improve on it). brute_force_mu enumerates every sequence with no
pruning and is kept as an independent oracle; both walk products with the
same per-step matrix arithmetic so agreement is exact, ties included.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, IndexOutOfRange, LengthMismatch
from .linalg import determinant, op_norm, stack_op_norms
from .system import AlternatingSystem

DEFAULT_NODE_BUDGET = 10_000_000

# relative gap under which the tail of a mu table counts as flat
FLAT_TAIL_REL_TOL = 1e-6


@dataclass(frozen=True)
class ProductTrace:
    """Prefix norms of one realized alternating product."""

    a_indices: tuple[int, ...]
    b_indices: tuple[int, ...]
    prefix_norms: tuple[float, ...]
    nu: float


@dataclass(frozen=True)
class BestResponse:
    """Minimizing B-sequence for a committed A-sequence.

    certified is False when the node budget ran out and the value is only
    the best incumbent seen, not a proven minimum.
    """

    b_indices: tuple[int, ...]
    value: float
    nodes: int
    certified: bool


@dataclass(frozen=True)
class MuRecord:
    n: int
    mu: float
    witness_a: tuple[int, ...]
    best_b: tuple[int, ...]
    node_count: int
    certified: bool


@dataclass(frozen=True)
class GrowthVerdict:
    """Horizon-limited growth classification, evidence rather than proof.

    kind is "bounded-up-to-horizon" (flat tail; bound carries the largest
    mu seen) or "growing" (rate carries the least-squares slope of log mu
    over the last half of the table).
    """

    kind: str
    bound: float | None = None
    rate: float | None = None


@dataclass(frozen=True)
class MuTable:
    records: tuple[MuRecord, ...]
    verdict: GrowthVerdict
    truncated_at: int | None = None


def _check_indices(sys: AlternatingSystem, a_indices, b_indices=None):
    a_idx = tuple(int(i) for i in a_indices)
    if not a_idx:
        raise LengthMismatch("index sequences must be nonempty")
    for i in a_idx:
        if not 0 <= i < len(sys.a_set):
            raise IndexOutOfRange(f"A-index {i} out of range")
    if b_indices is None:
        return a_idx
    b_idx = tuple(int(i) for i in b_indices)
    if len(b_idx) != len(a_idx):
        raise LengthMismatch(f"got {len(a_idx)} A-indices but {len(b_idx)} B-indices")
    for i in b_idx:
        if not 0 <= i < len(sys.b_set):
            raise IndexOutOfRange(f"B-index {i} out of range")
    return a_idx, b_idx


def eval_trace(sys: AlternatingSystem, a_indices, b_indices) -> ProductTrace:
    """Evaluate the prefix norms of the product selected by the index pair."""
    a_idx, b_idx = _check_indices(sys, a_indices, b_indices)
    product = np.eye(sys.product_dim)
    norms = []
    for ai, bi in zip(a_idx, b_idx):
        product = sys.step_factor(ai, bi) @ product
        norms.append(op_norm(product, sys.norm))
    return ProductTrace(
        a_indices=a_idx,
        b_indices=b_idx,
        prefix_norms=tuple(norms),
        nu=max(norms),
    )


def best_response(
    sys: AlternatingSystem,
    a_indices,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> BestResponse:
    """Minimize nu_n over all B-sequences against a committed A-sequence.

    Depth-first search in B-index order with pruning at running-max >=
    incumbent; the first minimizer found is therefore the lexicographically
    smallest one. On budget exhaustion the incumbent is returned with
    certified=False (falling back to the all-zeros response if no leaf was
    reached at all).
    """
    a_idx = _check_indices(sys, a_indices)
    n = len(a_idx)
    nb = len(sys.b_set)
    norm = sys.norm

    best_value = math.inf
    best_seq: tuple[int, ...] | None = None
    nodes = 0
    exhausted = False
    path = [0] * n

    def visit(k: int, product: np.ndarray, running: float) -> None:
        nonlocal best_value, best_seq, nodes, exhausted
        for j in range(nb):
            if nodes >= node_budget:
                exhausted = True
                return
            nodes += 1
            nxt = sys.step_factor(a_idx[k], j) @ product
            r = max(running, op_norm(nxt, norm))
            if r >= best_value:
                continue  # no completion of this branch can beat the incumbent
            path[k] = j
            if k + 1 == n:
                best_value = r
                best_seq = tuple(path)
            else:
                visit(k + 1, nxt, r)
            if exhausted:
                return

    visit(0, np.eye(sys.product_dim), 0.0)

    if best_seq is None:
        # budget ran out before any full path: evaluate one response outright
        fallback = (0,) * n
        best_seq = fallback
        best_value = eval_trace(sys, a_idx, fallback).nu
        exhausted = True
    return BestResponse(
        b_indices=best_seq,
        value=best_value,
        nodes=nodes,
        certified=not exhausted,
    )


def mu_n(
    sys: AlternatingSystem,
    n: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> MuRecord:
    """The horizon-n game value: max over A-tuples of the best-response value.

    The outer enumeration is exhaustive in lexicographic order (the
    maximizer is open-loop: the full A-tuple is fixed before B responds).
    Raises BudgetExceeded when the A-enumeration alone would exceed the
    budget; budget exhaustion inside an inner search only clears the
    certified flag.
    """
    if n < 1:
        raise LengthMismatch("horizon must be >= 1")
    na = len(sys.a_set)
    if na**n > node_budget:
        raise BudgetExceeded(f"|A|^n = {na}^{n} exceeds node budget {node_budget}")

    best_mu = -math.inf
    witness_a: tuple[int, ...] | None = None
    best_b: tuple[int, ...] | None = None
    total_nodes = 0
    certified = True
    for a_seq in itertools.product(range(na), repeat=n):
        resp = best_response(sys, a_seq, node_budget)
        total_nodes += resp.nodes
        certified = certified and resp.certified
        if resp.value > best_mu:
            best_mu = resp.value
            witness_a = a_seq
            best_b = resp.b_indices
    assert witness_a is not None and best_b is not None
    return MuRecord(
        n=n,
        mu=best_mu,
        witness_a=witness_a,
        best_b=best_b,
        node_count=total_nodes,
        certified=certified,
    )


def brute_force_mu(
    sys: AlternatingSystem,
    n: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> MuRecord:
    """Oracle for mu_n: full enumeration of both sides, no pruning.

    Same tie-breaking as mu_n. Raises BudgetExceeded unless
    |A|^n * |B|^n fits in the budget.
    """
    if n < 1:
        raise LengthMismatch("horizon must be >= 1")
    na = len(sys.a_set)
    nb = len(sys.b_set)
    if na**n * nb**n > node_budget:
        raise BudgetExceeded(
            f"|A|^n * |B|^n = {na ** n * nb ** n} exceeds node budget {node_budget}"
        )
    norm = sys.norm

    best_mu = -math.inf
    witness_a: tuple[int, ...] | None = None
    best_b: tuple[int, ...] | None = None
    total_nodes = 0

    for a_seq in itertools.product(range(na), repeat=n):
        inner_best = math.inf
        inner_seq: tuple[int, ...] | None = None
        path = [0] * n
        nodes = 0

        def walk(k: int, product: np.ndarray, running: float) -> None:
            nonlocal inner_best, inner_seq, nodes
            for j in range(nb):
                nodes += 1
                nxt = sys.step_factor(a_seq[k], j) @ product
                r = max(running, op_norm(nxt, norm))
                path[k] = j
                if k + 1 == n:
                    if r < inner_best:
                        inner_best = r
                        inner_seq = tuple(path)
                else:
                    walk(k + 1, nxt, r)

        walk(0, np.eye(sys.product_dim), 0.0)
        total_nodes += nodes
        if inner_best > best_mu:
            best_mu = inner_best
            witness_a = a_seq
            best_b = inner_seq
    assert witness_a is not None and best_b is not None
    return MuRecord(
        n=n,
        mu=best_mu,
        witness_a=witness_a,
        best_b=best_b,
        node_count=total_nodes,
        certified=True,
    )


def _classify(records: list[MuRecord]) -> GrowthVerdict:
    values = [r.mu for r in records]
    tail = values[-3:]  # degrades to "all rows" for tables shorter than 3
    if max(tail) - min(tail) <= FLAT_TAIL_REL_TOL * max(tail):
        return GrowthVerdict(kind="bounded-up-to-horizon", bound=max(values))
    half = values[-max(2, math.ceil(len(values) / 2)) :]
    xs = np.arange(len(values) - len(half) + 1, len(values) + 1, dtype=float)
    ys = np.log(np.maximum(half, 1e-300))
    rate = float(np.polyfit(xs, ys, 1)[0])
    return GrowthVerdict(kind="growing", rate=rate)


def mu_table(
    sys: AlternatingSystem,
    n_max: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> MuTable:
    """mu_n for n = 1..n_max plus a growth verdict over the computed rows.

    Rows stop early when a horizon no longer fits the budget; truncated_at
    records the first such n and the verdict is computed on the rows that
    did complete.
    """
    if n_max < 1:
        raise LengthMismatch("n_max must be >= 1")
    records: list[MuRecord] = []
    truncated_at = None
    for n in range(1, n_max + 1):
        try:
            records.append(mu_n(sys, n, node_budget))
        except BudgetExceeded:
            truncated_at = n
            break
    if not records:
        raise BudgetExceeded(f"horizon 1 already exceeds node budget {node_budget}")
    return MuTable(
        records=tuple(records),
        verdict=_classify(records),
        truncated_at=truncated_at,
    )


def mu_table_rows(table: MuTable) -> list[dict]:
    """Rows of a mu table as plain dicts (the JSON shape of the table)."""
    return [
        {
            "n": r.n,
            "mu": r.mu,
            "witness_a": list(r.witness_a),
            "best_b": list(r.best_b),
            "nodes": r.node_count,
            "certified": r.certified,
        }
        for r in table.records
    ]


def mu_table_to_csv(table: MuTable) -> str:
    """CSV rendering with columns n, mu, witness_a, best_b, nodes, certified."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "mu", "witness_a", "best_b", "nodes", "certified"])
    for r in table.records:
        writer.writerow(
            [
                r.n,
                repr(r.mu),
                " ".join(map(str, r.witness_a)),
                " ".join(map(str, r.best_b)),
                r.node_count,
                r.certified,
            ]
        )
    return buf.getvalue()


# ---- exhaustive enumeration utilities ------------------------------------


def b_product_stack(
    sys: AlternatingSystem,
    a_indices,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> np.ndarray:
    """Final products for every B-sequence against a fixed A-sequence.

    Returns an array of shape (|B|^n, d, d) whose flat index reads the
    B-sequence as base-|B| digits, most significant first (so stack order
    is lexicographic). Raises BudgetExceeded when |B|^n exceeds the budget.
    """
    a_idx = _check_indices(sys, a_indices)
    nb = len(sys.b_set)
    if nb ** len(a_idx) > node_budget:
        raise BudgetExceeded(
            f"|B|^n = {nb ** len(a_idx)} exceeds node budget {node_budget}"
        )
    stack = np.eye(sys.product_dim)[None]
    for ai in a_idx:
        factors = [sys.step_factor(ai, j) for j in range(nb)]
        stack = np.stack([f @ stack for f in factors], axis=1).reshape(
            -1, sys.product_dim, sys.product_dim
        )
    return stack


def min_final_norm(
    sys: AlternatingSystem,
    a_indices,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """min over all B-sequences of the final product norm (not the running max)."""
    stack = b_product_stack(sys, a_indices, node_budget)
    return float(stack_op_norms(stack, sys.norm).min())


def min_running_max(
    sys: AlternatingSystem,
    a_indices,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """min over all B-sequences of the running prefix-norm maximum.

    Vectorized full enumeration; agrees with best_response up to float
    reassociation and is used where values are compared against explicit
    tolerances rather than tie-broken.
    """
    a_idx = _check_indices(sys, a_indices)
    nb = len(sys.b_set)
    if nb ** len(a_idx) > node_budget:
        raise BudgetExceeded(
            f"|B|^n = {nb ** len(a_idx)} exceeds node budget {node_budget}"
        )
    dim = sys.product_dim
    stack = np.eye(dim)[None]
    running = np.zeros(1)
    for ai in a_idx:
        factors = [sys.step_factor(ai, j) for j in range(nb)]
        stack = np.stack([f @ stack for f in factors], axis=1).reshape(-1, dim, dim)
        running = np.maximum(
            np.repeat(running, nb), stack_op_norms(stack, sys.norm)
        )
    return float(running.min())


def det_growth_floor(sys: AlternatingSystem, n: int) -> float:
    """Determinant-based lower bound on mu_n for square step factors.

    Any product of n step factors has |det| at least
    (max_A min_B |det(step)|)^n, and every operator norm dominates the
    spectral radius, which dominates |det|^(1/d). Hence
    mu_n >= (max_A min_B |det|)^(n/d).
    """
    best = max(
        min(abs(determinant(sys.step_factor(i, j))) for j in range(len(sys.b_set)))
        for i in range(len(sys.a_set))
    )
    return best ** (n / sys.product_dim)
