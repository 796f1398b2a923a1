"""The Stanford pair and the pointwise-bounded-but-unbounded construction.

The pair consists of the hyperbolic squeeze diag(1/2, 2) and the rotation
by -30 degrees, optionally scaled by alpha >= 1. Every product of the pair
has determinant alpha^(2n), so its Euclidean norm is at least alpha^n; yet
any single vector can be driven to zero: rotate until the vector lies in
one of two 30-degree sectors around the x axis (S about angle 0, its
mirror about angle pi), then apply the squeeze, which contracts vectors
from those sectors. One such block shrinks the Euclidean norm by at least
the certified factor

    q = alpha^7 * sqrt(1/4 + 4 tan^2(half_angle)),

a worst case of six rotations followed by one squeeze applied at the
sector edge. The closed form over-estimates the true sector maximum, so it
stays a valid certificate; make_stanford refuses alphas with q >= 1.

Pairing the squeeze/rotation dynamics with B-matrices A^{-1} H turns any
finite determinant-one A-alphabet into a system whose alternating products
all grow like alpha^n in norm while every fixed vector can still be
stabilized, because each step collapses to A (A^{-1} H) = H on the vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaTooLarge,
    BudgetExceeded,
    DeterminantNotOne,
    GammaIsOne,
    MaxStepsExceeded,
    ShapeError,
    ZeroVector,
)
from .linalg import (
    Matrix,
    NormKind,
    as_matrix,
    determinant,
    inverse,
    op_norm,
    stack_op_norms,
)
from .minimax import DEFAULT_NODE_BUDGET, ProductTrace
from .system import AlternatingSystem, Orientation

DET_ONE_TOL = 1e-9


@dataclass(frozen=True)
class SectorConfig:
    """Two sectors of gap 2*half_angle, symmetric about the abscissa axis."""

    half_angle: float = math.pi / 12

    def __post_init__(self):
        if not 0.0 < self.half_angle < math.pi / 4:
            raise ValueError("half_angle must lie strictly between 0 and pi/4")

    def contains(self, v: np.ndarray) -> bool:
        """Whether the direction of v lies in S or its mirror sector.

        Angles are reduced to [0, 2pi); boundary directions count as
        inside, which keeps the contraction bound valid at equality.
        """
        angle = math.atan2(v[1], v[0]) % (2.0 * math.pi)
        return (
            angle <= self.half_angle
            or angle >= 2.0 * math.pi - self.half_angle
            or abs(angle - math.pi) <= self.half_angle
        )


@dataclass(frozen=True)
class StanfordParams:
    """Scale alpha and the certified per-block Euclidean contraction q < 1."""

    alpha: float
    q: float


_DEFAULT_SECTOR = SectorConfig()


def squeeze_matrix() -> Matrix:
    return as_matrix([[0.5, 0.0], [0.0, 2.0]])


def rotation_matrix(angle: float) -> Matrix:
    c, s = math.cos(angle), math.sin(angle)
    return as_matrix([[c, -s], [s, c]])


def contraction_factor(alpha: float, sector: SectorConfig = _DEFAULT_SECTOR) -> float:
    """The certified per-block factor alpha^7 * sqrt(1/4 + 4 tan^2 half)."""
    return alpha**7 * math.sqrt(0.25 + 4.0 * math.tan(sector.half_angle) ** 2)


def make_stanford(
    alpha: float = 1.0, sector: SectorConfig = _DEFAULT_SECTOR
) -> tuple[tuple[Matrix, Matrix], StanfordParams]:
    """The scaled pair (alpha * squeeze, alpha * rotation by -30 degrees).

    Raises AlphaTooLarge when the certified contraction factor reaches 1
    (for the default sector that happens near alpha = 1.045).
    """
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    q = contraction_factor(alpha, sector)
    if q >= 1.0:
        raise AlphaTooLarge(
            f"certified block factor q = {q:.4f} >= 1 at alpha = {alpha}"
        )
    pair = (
        as_matrix(alpha * squeeze_matrix()),
        as_matrix(alpha * rotation_matrix(-math.pi / 6)),
    )
    return pair, StanfordParams(alpha=alpha, q=q)


@dataclass(frozen=True)
class StabilizeTrace:
    """Applied pair indices (0 = squeeze, 1 = rotation) and the vector path.

    vectors has shape (steps + 1, 2) and starts with the initial vector.
    """

    indices: tuple[int, ...]
    vectors: np.ndarray

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)


def stabilize_pointwise(
    params: StanfordParams,
    x,
    target: float,
    max_steps: int = 1000,
    sector: SectorConfig = _DEFAULT_SECTOR,
) -> StabilizeTrace:
    """Drive x below the target Euclidean norm with the scaled pair.

    Each iteration applies the rotation until the vector's direction falls
    into a sector (at most six times; the sectors recur every half turn and
    each rotation moves the angle by 30 degrees), then applies the squeeze.
    Every completed block multiplies the norm by at most params.q < 1, so
    MaxStepsExceeded signals a bug rather than a reachable outcome for sane
    step limits.
    """
    v = np.array(x, dtype=float)
    if v.shape != (2,):
        raise ShapeError(f"expected a 2-vector, got shape {v.shape}")
    if not np.any(v):
        raise ZeroVector("cannot stabilize the zero vector")
    pair, _ = make_stanford(params.alpha, sector)
    indices: list[int] = []
    vectors = [v.copy()]
    while float(np.linalg.norm(v)) > target:
        if len(indices) >= max_steps:
            raise MaxStepsExceeded(
                f"norm {np.linalg.norm(v):.3e} still above target after {max_steps} steps"
            )
        choice = 0 if sector.contains(v) else 1
        v = pair[choice] @ v
        indices.append(choice)
        vectors.append(v.copy())
    return StabilizeTrace(indices=tuple(indices), vectors=np.array(vectors))


def check_products_lower_bound(
    pair: tuple[Matrix, Matrix],
    n: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """min Euclidean norm over all 2^n products of pair elements."""
    if n < 1:
        raise ValueError("n must be >= 1")
    mats = [as_matrix(m) for m in pair]
    dim = mats[0].shape[0]
    if any(m.shape != (dim, dim) for m in mats):
        raise ShapeError("pair members must be square matrices of equal size")
    if 2**n > node_budget:
        raise BudgetExceeded(f"2^{n} products exceed node budget {node_budget}")
    stack = np.eye(dim)[None]
    for _ in range(n):
        stack = np.stack([m @ stack for m in mats], axis=1).reshape(-1, dim, dim)
    return float(stack_op_norms(stack, NormKind.EUCLIDEAN).min())


def build_counterexample(a_set, alpha: float = 1.02) -> AlternatingSystem:
    """System that is pointwise stabilizable yet has norm-divergent products.

    Every A must be 2x2 with determinant 1; the B-alphabet collects
    A^{-1} H over all A and both scaled pair members H (duplicates
    removed), so each B has determinant alpha^2 and each step factor AB
    equals one of the pair members. The system uses the Euclidean norm.
    """
    mats = [as_matrix(m) for m in a_set]
    for m in mats:
        if m.shape != (2, 2):
            raise ShapeError(f"A-matrices must be 2x2, got {m.shape}")
        if abs(determinant(m) - 1.0) > DET_ONE_TOL:
            raise DeterminantNotOne(f"det = {determinant(m)!r}, expected 1")
    pair, _ = make_stanford(alpha)
    b_set = [inverse(a) @ h for a in mats for h in pair]
    return AlternatingSystem(
        n_dim=2,
        m_dim=2,
        a_set=tuple(mats),
        b_set=tuple(b_set),
        norm=NormKind.EUCLIDEAN,
        orientation=Orientation.RIGHT,
    )


@dataclass(frozen=True)
class PointwiseRun:
    """A counterexample run: the alternating trace, which pair member each
    step realized, and the path of the driven vector."""

    trace: ProductTrace
    h_indices: tuple[int, ...]
    vectors: np.ndarray

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)


def _recover_alpha(sys: AlternatingSystem) -> float:
    d = abs(determinant(sys.step_factor(0, 0)))
    if d <= 0.0:
        raise ShapeError("system has a singular step factor; not a counterexample system")
    return math.sqrt(d)


def counterexample_pointwise_run(
    sys_ce: AlternatingSystem,
    a_index_sequence,
    x,
    target: float,
    max_steps: int = 1000,
    sector: SectorConfig = _DEFAULT_SECTOR,
) -> PointwiseRun:
    """Drive ||product @ x|| below the target on a counterexample system.

    The given A-schedule is cycled as long as needed. At each step the
    sector strategy picks a pair member H for the vector dynamics and the
    B-response is the alphabet element equal to A^{-1} H, so the realized
    alternating product collapses to the product of chosen pair members.
    The trace records the matrix-norm growth of the full product alongside
    the vector's decay.
    """
    a_seq = tuple(int(i) for i in a_index_sequence)
    if not a_seq:
        raise ShapeError("a_index_sequence must be nonempty")
    for i in a_seq:
        if not 0 <= i < len(sys_ce.a_set):
            raise ShapeError(f"A-index {i} out of range")
    v = np.array(x, dtype=float)
    if v.shape != (2,):
        raise ShapeError(f"expected a 2-vector, got shape {v.shape}")
    if not np.any(v):
        raise ZeroVector("cannot stabilize the zero vector")

    alpha = _recover_alpha(sys_ce)
    pair, _ = make_stanford(alpha)

    # map (a_index, pair index) -> B-alphabet index; entries are recomputed
    # with the same arithmetic build_counterexample used, so matches are exact
    lookup: dict[tuple[int, int], int] = {}
    for ai, a in enumerate(sys_ce.a_set):
        for hi, h in enumerate(pair):
            candidate = inverse(a) @ h
            for bi, b in enumerate(sys_ce.b_set):
                if np.array_equal(candidate, b) or np.allclose(
                    candidate, b, rtol=0.0, atol=1e-12
                ):
                    lookup[(ai, hi)] = bi
                    break
            else:
                raise ShapeError(
                    "B-alphabet misses an A^{-1} H member; "
                    "system was not produced by build_counterexample"
                )

    a_used: list[int] = []
    b_used: list[int] = []
    h_used: list[int] = []
    prefix_norms: list[float] = []
    vectors = [v.copy()]
    product = np.eye(2)
    step = 0
    while float(np.linalg.norm(v)) > target:
        if step >= max_steps:
            raise MaxStepsExceeded(
                f"vector norm {np.linalg.norm(v):.3e} above target after {max_steps} steps"
            )
        hi = 0 if sector.contains(v) else 1
        ai = a_seq[step % len(a_seq)]
        bi = lookup[(ai, hi)]
        product = sys_ce.step_factor(ai, bi) @ product
        v = pair[hi] @ v
        a_used.append(ai)
        b_used.append(bi)
        h_used.append(hi)
        prefix_norms.append(op_norm(product, sys_ce.norm))
        vectors.append(v.copy())
        step += 1

    trace = ProductTrace(
        a_indices=tuple(a_used),
        b_indices=tuple(b_used),
        prefix_norms=tuple(prefix_norms),
        nu=max(prefix_norms) if prefix_norms else 0.0,
    )
    return PointwiseRun(trace=trace, h_indices=tuple(h_used), vectors=np.array(vectors))


def make_incommensurable(
    alpha_angle: float, beta_angle: float, gamma: float
) -> tuple[Matrix, Matrix]:
    """A rotation and a gamma-skewed rotation, both with determinant one.

    With rotation angles incommensurable with pi this pair keeps every
    product norm at least 1 while still admitting pointwise stabilization;
    both behaviors are only probed empirically here.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if gamma == 1.0:
        raise GammaIsOne("gamma = 1 degenerates the skew to a plain rotation")
    first = rotation_matrix(alpha_angle)
    cb, sb = math.cos(beta_angle), math.sin(beta_angle)
    second = as_matrix([[cb, -gamma * sb], [sb / gamma, cb]])
    return first, second


def greedy_divergence_probe(pair: tuple[Matrix, Matrix], x, steps: int) -> np.ndarray:
    """Heuristic: norms along the greedily norm-maximizing pair sequence.

    At each step the member maximizing the next vector norm is applied.
    This is a search probe, not a certificate; divergence of the returned
    norms is evidence only.
    """
    v = np.array(x, dtype=float)
    if not np.any(v):
        raise ZeroVector("probe needs a nonzero start vector")
    mats = [as_matrix(m) for m in pair]
    norms = [float(np.linalg.norm(v))]
    for _ in range(steps):
        v = max((m @ v for m in mats), key=lambda w: float(np.linalg.norm(w)))
        norms.append(float(np.linalg.norm(v)))
    return np.array(norms)
