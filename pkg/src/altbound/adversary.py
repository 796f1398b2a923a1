"""Constructive adversaries: A-sequences no B-response can keep bounded.

When the mu_n values of a system keep growing, blocks of maximizing
A-indices can be concatenated so that against every B-response the running
prefix-norm maximum exceeds 1, 2, 3, ... at successive block boundaries.
Two regimes are supported:

* invertible mode: every step factor is invertible, and eta_m bounds the
  inverse norm of the whole product built so far, uniformly over B
  choices. A block reaching threshold kappa_m = m * eta_{m-1} then pushes
  the full product past m via ||PQ|| >= ||P|| / ||Q^{-1}||.
* nonnegative mode: alphabets are entrywise nonnegative with no zero
  rows, the norm is MAX_ROW, and omega_m lower-bounds every coordinate of
  (product so far) @ e uniformly over B choices. A block reaching
  kappa_m = m / omega_{m-1} pushes the product past m because for
  nonnegative matrices the norm equals the largest coordinate of the
  image of e.

Certificates carry the block data plus brute-force-verified lower bounds;
build_adversary refuses to emit a certificate it could not verify.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BudgetExceeded, HypothesisViolated, NotFoundWithinCap, Singular
from .linalg import NormKind, ones_vector, singularity_tolerance, stack_op_norms
from .minimax import (
    DEFAULT_NODE_BUDGET,
    b_product_stack,
    min_running_max,
    mu_n,
)
from .system import AlternatingSystem, check_hypotheses

# slack for verified block-boundary bounds
BOUND_TOL = 1e-9


class AdversaryMode(Enum):
    INVERTIBLE = "invertible"
    NONNEGATIVE = "nonnegative"


@dataclass(frozen=True)
class AdversaryBlock:
    """One block of the construction: its length, indices, threshold and
    the constant (eta or omega) computed on the full prefix ending here."""

    length: int
    a_block: tuple[int, ...]
    kappa: float
    bound_const: float


@dataclass(frozen=True)
class AdversaryCertificate:
    mode: AdversaryMode
    blocks: tuple[AdversaryBlock, ...]
    total_len: int
    verified_lower_bounds: tuple[float, ...]

    def full_sequence(self) -> tuple[int, ...]:
        out: tuple[int, ...] = ()
        for block in self.blocks:
            out += block.a_block
        return out

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "total_len": self.total_len,
            "blocks": [
                {
                    "length": b.length,
                    "a_block": list(b.a_block),
                    "kappa": b.kappa,
                    "bound_const": b.bound_const,
                }
                for b in self.blocks
            ],
            "verified_lower_bounds": list(self.verified_lower_bounds),
        }


def eta_bound(
    sys: AlternatingSystem,
    a_prefix,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """max over all B-sequences of the inverse norm of the prefix product.

    Exhaustive over |B|^len responses. Raises Singular if any realized
    product is singular within tolerance (the invertibility hypothesis
    failed numerically).
    """
    stack = b_product_stack(sys, a_prefix, node_budget)
    dets = np.abs(np.linalg.det(stack))
    tols = np.array([singularity_tolerance(p) for p in stack])
    if (dets <= tols).any():
        worst = float(dets.min())
        raise Singular(f"a realized prefix product is singular (|det| = {worst:.3e})")
    inverses = np.linalg.inv(stack)
    return float(stack_op_norms(inverses, sys.norm).max())


def omega_bound(
    sys: AlternatingSystem,
    a_prefix,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """min over all B-sequences of the smallest coordinate of (product @ e).

    Requires the nonnegative / nonzero-rows hypothesis class; the result
    is then strictly positive.
    """
    report = check_hypotheses(sys)
    if not (report.nonnegative and report.nonzero_rows):
        raise HypothesisViolated(
            "omega bound needs nonnegative alphabets with no zero rows"
        )
    stack = b_product_stack(sys, a_prefix, node_budget)
    images = stack @ ones_vector(sys.product_dim)
    return float(images.min())


def find_block(
    sys: AlternatingSystem,
    kappa: float,
    n_cap: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[int, tuple[int, ...]]:
    """Smallest horizon n <= n_cap with mu_n >= kappa, plus its A-witness.

    Ascending search keeps blocks (and later verification cost) small.
    """
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    last = None
    for n in range(1, n_cap + 1):
        record = mu_n(sys, n, node_budget)
        last = record.mu
        if record.mu >= kappa:
            return n, record.witness_a
    raise NotFoundWithinCap(
        f"mu_n stayed below kappa={kappa:.6g} up to n={n_cap} (mu_{n_cap} = {last:.6g})"
    )


def _resolve_mode(sys: AlternatingSystem, mode: AdversaryMode | None) -> AdversaryMode:
    report = check_hypotheses(sys)
    nonneg_ok = report.nonnegative and report.nonzero_rows
    if mode is None:
        # invertible machinery is preferred when both classes hold
        if report.invertible:
            return AdversaryMode.INVERTIBLE
        if nonneg_ok:
            mode = AdversaryMode.NONNEGATIVE
        else:
            raise HypothesisViolated(
                "system is neither invertible nor nonnegative-with-nonzero-rows"
            )
    if mode is AdversaryMode.INVERTIBLE and not report.invertible:
        raise HypothesisViolated(
            f"invertible mode not applicable: {report.invertible_reason or 'degenerate products'}"
        )
    if mode is AdversaryMode.NONNEGATIVE:
        if not nonneg_ok:
            raise HypothesisViolated(
                "nonnegative mode needs nonnegative alphabets with no zero rows"
            )
        if sys.norm is not NormKind.MAX_ROW:
            raise HypothesisViolated(
                "nonnegative mode is certified only for the MAX_ROW norm"
            )
    return mode


def build_adversary(
    sys: AlternatingSystem,
    m_target: int,
    n_cap: int = 8,
    mode: AdversaryMode | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> AdversaryCertificate:
    """Assemble and verify an adversarial certificate up to level m_target.

    kappa_1 = 1; for m >= 2 the threshold is the minimal admissible choice,
    m * eta_{m-1} (invertible) or m / omega_{m-1} (nonnegative). After each
    block the constant is recomputed on the full prefix. The returned
    certificate always carries brute-force-verified lower bounds.
    """
    if m_target < 1:
        raise ValueError("m_target must be >= 1")
    mode = _resolve_mode(sys, mode)

    blocks: list[AdversaryBlock] = []
    prefix: tuple[int, ...] = ()
    kappa = 1.0
    prev_const: float | None = None
    for m in range(1, m_target + 1):
        if m >= 2:
            assert prev_const is not None
            kappa = m * prev_const if mode is AdversaryMode.INVERTIBLE else m / prev_const
        length, a_block = find_block(sys, kappa, n_cap, node_budget)
        prefix += a_block
        if mode is AdversaryMode.INVERTIBLE:
            const = eta_bound(sys, prefix, node_budget)
        else:
            const = omega_bound(sys, prefix, node_budget)
        if const <= 0.0:
            raise HypothesisViolated(f"degenerate bound constant {const} at block {m}")
        blocks.append(
            AdversaryBlock(length=length, a_block=a_block, kappa=kappa, bound_const=const)
        )
        prev_const = const

    verified = []
    boundary = 0
    for m, block in enumerate(blocks, start=1):
        boundary += block.length
        value = min_running_max(sys, prefix[:boundary], node_budget)
        if value < m - BOUND_TOL:
            raise RuntimeError(
                f"internal: constructed certificate fails at block {m} "
                f"(bound {value:.6g} < {m})"
            )
        verified.append(value)

    return AdversaryCertificate(
        mode=mode,
        blocks=tuple(blocks),
        total_len=len(prefix),
        verified_lower_bounds=tuple(verified),
    )


def verify_certificate(
    sys: AlternatingSystem,
    cert: AdversaryCertificate,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> bool:
    """Re-check a certificate by exhaustive enumeration.

    True iff for every m the minimum over all B-sequences of the running
    prefix-norm maximum reaches at least m (within tolerance) at the m-th
    block boundary.
    """
    full = cert.full_sequence()
    boundary = 0
    for m, block in enumerate(cert.blocks, start=1):
        boundary += block.length
        if boundary > len(full):
            return False
        value = min_running_max(sys, full[:boundary], node_budget)
        if value < m - BOUND_TOL:
            return False
    return True
