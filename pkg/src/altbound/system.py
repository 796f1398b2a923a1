"""Alternating-product systems: a pair of finite matrix alphabets.

A system holds alphabets A (shape N x M each) and B (shape M x N each)
together with the operator norm and the product orientation. Right
orientation means products of the form A_n B_n ... A_1 B_1; left means
B_n A_n ... B_1 A_1. Systems are immutable after construction and all
operations here are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyAlphabet, ParseError, ShapeError
from .linalg import (
    Matrix,
    NormKind,
    apply_to_ones,
    as_matrix,
    determinant,
    op_norm,
)

# |det(AB)| at or below this counts as degenerate for the invertibility class
INVERTIBILITY_DET_TOL = 1e-12


class Orientation(Enum):
    RIGHT = "right"  # A_n B_n ... A_1 B_1
    LEFT = "left"  # B_n A_n ... B_1 A_1


def _dedup(mats: Iterable[Matrix]) -> tuple[Matrix, ...]:
    # drop exact duplicates, preserving first-occurrence order
    seen: set[bytes] = set()
    out = []
    for m in mats:
        key = m.tobytes() + str(m.shape).encode()
        if key not in seen:
            seen.add(key)
            out.append(m)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class AlternatingSystem:
    """Two finite matrix alphabets plus norm and orientation conventions."""

    n_dim: int
    m_dim: int
    a_set: tuple[Matrix, ...]
    b_set: tuple[Matrix, ...]
    norm: NormKind = NormKind.MAX_ROW
    orientation: Orientation = Orientation.RIGHT

    def __post_init__(self):
        a_set = _dedup(as_matrix(m) for m in self.a_set)
        b_set = _dedup(as_matrix(m) for m in self.b_set)
        if not a_set or not b_set:
            raise EmptyAlphabet("both alphabets must be nonempty")
        for m in a_set:
            if m.shape != (self.n_dim, self.m_dim):
                raise ShapeError(
                    f"A-matrix has shape {m.shape}, expected {(self.n_dim, self.m_dim)}"
                )
        for m in b_set:
            if m.shape != (self.m_dim, self.n_dim):
                raise ShapeError(
                    f"B-matrix has shape {m.shape}, expected {(self.m_dim, self.n_dim)}"
                )
        object.__setattr__(self, "a_set", a_set)
        object.__setattr__(self, "b_set", b_set)

    @property
    def product_dim(self) -> int:
        """Dimension of the alternating products (N for right, M for left)."""
        return self.n_dim if self.orientation is Orientation.RIGHT else self.m_dim

    def step_factor(self, a_index: int, b_index: int) -> Matrix:
        """The square factor one step contributes: AB (right) or BA (left)."""
        a = self.a_set[a_index]
        b = self.b_set[b_index]
        return a @ b if self.orientation is Orientation.RIGHT else b @ a

    def pair_products(self) -> list[Matrix]:
        """All step factors, A-major then B-major order."""
        return [
            self.step_factor(i, j)
            for i in range(len(self.a_set))
            for j in range(len(self.b_set))
        ]


@dataclass(frozen=True)
class HypothesisReport:
    """Which hypothesis classes the alphabets satisfy, with their constants.

    gamma_inv is the smallest |det| over the step factors; gamma is the
    smallest plain row sum over both alphabets and gamma_products the same
    minimum over the step factors. norm_bound_a / norm_bound_b are the
    largest operator norms within each alphabet.
    """

    invertible: bool
    gamma_inv: float
    invertible_reason: str | None
    nonnegative: bool
    nonzero_rows: bool
    gamma: float
    gamma_products: float
    norm_bound_a: float
    norm_bound_b: float


def check_hypotheses(sys: AlternatingSystem) -> HypothesisReport:
    """Exhaustively classify the system against both hypothesis classes."""
    products = sys.pair_products()
    dets = [abs(determinant(f)) for f in products]
    gamma_inv = min(dets)

    reason = None
    if sys.orientation is Orientation.RIGHT and sys.n_dim > sys.m_dim:
        invertible = False
        reason = (
            f"rank bound: N={sys.n_dim} > M={sys.m_dim} forces singular AB products; "
            "consider the left variant"
        )
    elif sys.orientation is Orientation.LEFT and sys.m_dim > sys.n_dim:
        invertible = False
        reason = (
            f"rank bound: M={sys.m_dim} > N={sys.n_dim} forces singular BA products; "
            "consider the right variant"
        )
    else:
        invertible = gamma_inv > INVERTIBILITY_DET_TOL
        if not invertible:
            reason = f"some step product has |det| = {gamma_inv:.3e} <= {INVERTIBILITY_DET_TOL}"

    alphabet = list(sys.a_set) + list(sys.b_set)
    nonnegative = all((m >= 0.0).all() for m in alphabet)
    gamma = min(float(apply_to_ones(m).min()) for m in alphabet)
    gamma_products = min(float(apply_to_ones(f).min()) for f in products)
    nonzero_rows = gamma > 0.0

    return HypothesisReport(
        invertible=invertible,
        gamma_inv=gamma_inv,
        invertible_reason=reason,
        nonnegative=nonnegative,
        nonzero_rows=nonzero_rows,
        gamma=gamma,
        gamma_products=gamma_products,
        norm_bound_a=max(op_norm(m, sys.norm) for m in sys.a_set),
        norm_bound_b=max(op_norm(m, sys.norm) for m in sys.b_set),
    )


def to_left_variant(sys: AlternatingSystem) -> AlternatingSystem:
    """Flip the product orientation, keeping the alphabets. An involution."""
    flipped = (
        Orientation.LEFT if sys.orientation is Orientation.RIGHT else Orientation.RIGHT
    )
    return replace(sys, orientation=flipped)


@dataclass(frozen=True)
class LeftRightBound:
    """Numerical record of the left-product bound through the shifted right product.

    For fixed index sequences, the left product B_n A_n ... B_1 A_1 factors
    as B_n (shifted right product) A_1, so its norm is at most
    norm_bound_b * shifted_norm * norm_bound_a.
    """

    left_norm: float
    shifted_norm: float
    norm_bound_a: float
    norm_bound_b: float
    bound: float
    holds: bool


def left_right_bound_check(
    sys: AlternatingSystem,
    a_indices: Iterable[int],
    b_indices: Iterable[int],
    tolerance: float = 1e-9,
) -> LeftRightBound:
    """Check the chain relating a left product to its shifted right product.

    The shifted right product pairs A_{i+1} with B_i and has length n-1
    (taken as the identity when n == 1).
    """
    a_idx = tuple(a_indices)
    b_idx = tuple(b_indices)
    if len(a_idx) != len(b_idx) or not a_idx:
        raise ShapeError("index sequences must be nonempty and of equal length")
    left = np.eye(sys.m_dim)
    for ai, bi in zip(a_idx, b_idx):
        left = (sys.b_set[bi] @ sys.a_set[ai]) @ left
    shifted = np.eye(sys.n_dim)
    for ai, bi in zip(a_idx[1:], b_idx[:-1]):
        shifted = (sys.a_set[ai] @ sys.b_set[bi]) @ shifted
    left_norm = op_norm(left, sys.norm)
    shifted_norm = op_norm(shifted, sys.norm)
    a_bound = max(op_norm(m, sys.norm) for m in sys.a_set)
    b_bound = max(op_norm(m, sys.norm) for m in sys.b_set)
    bound = b_bound * shifted_norm * a_bound
    return LeftRightBound(
        left_norm=left_norm,
        shifted_norm=shifted_norm,
        norm_bound_a=a_bound,
        norm_bound_b=b_bound,
        bound=bound,
        holds=left_norm <= bound + tolerance,
    )


# ---- JSON document format ----------------------------------------------
#
# {"N": int, "M": int, "A": [[[...]]], "B": [[[...]]],
#  "norm": "maxrow"|"euclidean", "orientation": "right"|"left"}
# norm and orientation are optional and default to maxrow / right.


def load_system(document: str | bytes | Mapping) -> AlternatingSystem:
    """Build a validated system from a JSON document (text or mapping)."""
    if isinstance(document, Mapping):
        doc = document
    else:
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        if not isinstance(doc, Mapping):
            raise ParseError("top-level JSON value must be an object")

    try:
        n_dim = int(doc["N"])
        m_dim = int(doc["M"])
        a_raw = doc["A"]
        b_raw = doc["B"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"document needs integer N, M and arrays A, B: {exc}") from exc
    if n_dim <= 0 or m_dim <= 0:
        raise ParseError("N and M must be positive")
    if not isinstance(a_raw, list) or not isinstance(b_raw, list):
        raise ParseError("A and B must be arrays of matrices")

    norm_tag = doc.get("norm", NormKind.MAX_ROW.value)
    orient_tag = doc.get("orientation", Orientation.RIGHT.value)
    try:
        norm = NormKind(norm_tag)
    except ValueError:
        raise ParseError(f"unknown norm {norm_tag!r}") from None
    try:
        orientation = Orientation(orient_tag)
    except ValueError:
        raise ParseError(f"unknown orientation {orient_tag!r}") from None

    return AlternatingSystem(
        n_dim=n_dim,
        m_dim=m_dim,
        a_set=tuple(as_matrix(m) for m in a_raw),
        b_set=tuple(as_matrix(m) for m in b_raw),
        norm=norm,
        orientation=orientation,
    )


def system_to_dict(sys: AlternatingSystem) -> dict:
    return {
        "N": sys.n_dim,
        "M": sys.m_dim,
        "A": [m.tolist() for m in sys.a_set],
        "B": [m.tolist() for m in sys.b_set],
        "norm": sys.norm.value,
        "orientation": sys.orientation.value,
    }


def save_system(sys: AlternatingSystem) -> str:
    """Serialize to the JSON document format.

    Floats are emitted with shortest round-trip representation, so
    load(save(sys)) reproduces every entry bit-exactly.
    """
    return json.dumps(system_to_dict(sys), sort_keys=True, indent=2) + "\n"
