"""Optimal K-duals of a fixed Parseval K-frame.

The one-erasure optimization over all K-duals of a fixed F is controlled by
the per-index weights of the canonical dual:

* operator norm:   ``w_i = ||f_i|| ||K^+ f_i||``
* spectral radius: ``w_i = <K^+ f_i, f_i>``

The argmax ("top") index set and its span, versus the complementary span,
decide whether the canonical dual is optimal, uniquely optimal, or sits in
an uncountable family of optimal duals:

* If the top and rest spans intersect trivially, the admissible-perturbation
  constraint restricts to the top set alone and a zero-trace argument shows
  no competing dual can lower the top weights, so the canonical dual is
  optimal.
* Given optimality, the optimal set is the canonical dual plus every
  admissible perturbation that preserves the top weights.  For the operator
  norm that means perturbations vanishing on the top indices; for the
  spectral radius only the diagonal inner products on top must be preserved.
  The certificate reports UniqueOptimal when that space is zero and an
  uncountable family (with an explicit direction and safety radius) when it
  is not.
* If the top vectors are independent yet participate in a frame dependence
  with all-nonzero top coefficients, a descent direction exists and the
  canonical dual is not optimal; the certificate carries the witness.

Separately, the linearly-connected decomposition machinery computes the
exact minimum of the spectral-radius measure for decomposable frames: the
index set splits into blocks spanning mutually orthogonal subspaces H_j,
and when each H_j is K-invariant the minimum equals the largest block ratio
``delta_j = trace(K restricted to H_j) / |block j|``, attained by an
explicitly constructed dual (:func:`construct_spectrally_optimal_dual`).
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetExceededError,
    DependentInputError,
    HypothesesNotMetError,
    NoConnectedPairAvailableError,
    NotKInvariantError,
    NotPSDError,
    NotParsevalError,
    NotTwoUniformError,
    NumericalError,
)
from .frames import (
    DEFAULT_TOL,
    RANK_TOL,
    DualSystem,
    Frame,
    OperatorSpec,
    build_dual_system,
    build_operator,
    dual_parameterization,
    is_parseval_k_frame,
)
from .erasures import Measure, uniformity

# Absolute tolerance for membership in argmax sets and finished-diagonal sets.
WEIGHT_TOL = 1e-8

# is_linearly_connected_pair enumerates subsets; refuse above this many vectors.
SUBSET_SEARCH_CAP = 16


# ---------------------------------------------------------------------------
# weight partitions and span tests


@dataclass(frozen=True, eq=False)
class WeightPartition:
    """Canonical-dual weights split into the argmax set and the rest."""

    measure_kind: Measure
    weights: np.ndarray
    top_value: float
    top: tuple[int, ...]
    rest: tuple[int, ...]
    span_top: np.ndarray  # n x k orthonormal
    span_rest: np.ndarray


def _orthonormal_span(columns: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    if columns.shape[1] == 0:
        return np.zeros((columns.shape[0], 0))
    u, s, _ = np.linalg.svd(columns, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((columns.shape[0], 0))
    rank = int(np.count_nonzero(s > tol * s[0]))
    return u[:, :rank]


def weight_partition(
    frame: Frame, op: OperatorSpec, kind: Measure, tol: float = WEIGHT_TOL
) -> WeightPartition:
    """Per-index canonical-dual weights with argmax set and span bases."""
    if not is_parseval_k_frame(frame, op):
        raise NotParsevalError("weight partition requires a Parseval K-frame")
    if kind is Measure.SPECTRAL and not op.psd_flag:
        raise NotPSDError("spectral weights require a PSD operator")
    syn = frame.synthesis
    dual_syn = op.pinv @ syn
    if kind is Measure.OP_NORM:
        weights = np.linalg.norm(syn, axis=0) * np.linalg.norm(dual_syn, axis=0)
    else:
        weights = np.einsum("ij,ij->j", dual_syn, syn)
    top_value = float(np.max(weights))
    top = tuple(int(i) for i in np.flatnonzero(weights >= top_value - tol))
    rest = tuple(i for i in range(frame.n_vectors) if i not in top)
    return WeightPartition(
        measure_kind=kind,
        weights=weights,
        top_value=top_value,
        top=top,
        rest=rest,
        span_top=_orthonormal_span(syn[:, list(top)]),
        span_rest=_orthonormal_span(syn[:, list(rest)]),
    )


def spans_intersect_trivially(
    part: WeightPartition, tol: float = RANK_TOL
) -> bool:
    """True iff span(top vectors) and span(rest vectors) meet only in 0."""
    k1 = part.span_top.shape[1]
    k2 = part.span_rest.shape[1]
    if k1 == 0 or k2 == 0:
        return True
    stacked = np.hstack([part.span_top, part.span_rest])
    s = np.linalg.svd(stacked, compute_uv=False)
    rank = int(np.count_nonzero(s > tol * s[0]))
    return rank == k1 + k2


# ---------------------------------------------------------------------------
# linear-connectivity machinery


def solve_equal_inner_products(vectors, alpha: float, tol: float = DEFAULT_TOL):
    """Minimum-norm h with ``<f_i, h> = alpha`` for an independent family."""
    rows = np.asarray([np.asarray(v, dtype=float) for v in vectors])
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("need a nonempty family of vectors")
    s = np.linalg.svd(rows, compute_uv=False)
    if s.size == 0 or s[-1] <= RANK_TOL * s[0]:
        raise DependentInputError("input vectors are linearly dependent")
    target = np.full(rows.shape[0], float(alpha))
    h, *_ = np.linalg.lstsq(rows, target, rcond=None)
    residual = np.max(np.abs(rows @ h - target))
    if residual > tol * max(1.0, abs(alpha)):
        raise NumericalError(f"inner-product solve residual {residual:.2e}")
    return h


@dataclass(frozen=True, eq=False)
class ConnectionWitness:
    """Representation ``f_i = c f_j + sum_k coeff_k f_support[k]``."""

    c: float
    support: tuple[int, ...]
    coefficients: np.ndarray


def is_linearly_connected_pair(
    frame: Frame,
    i: int,
    j: int,
    tol: float = DEFAULT_TOL,
    max_n: int = SUBSET_SEARCH_CAP,
) -> tuple[bool, ConnectionWitness | None]:
    """Decide whether f_i can be written over f_j plus an independent subset.

    Searches subsets S of the remaining indices in increasing size, requiring
    {f_j} union {f_l : l in S} independent, an exact representation of f_i,
    and every coefficient bounded away from zero.  First success (smallest
    subset, then lexicographic) wins.
    """
    N = frame.n_vectors
    if i == j:
        raise ValueError("indices must differ")
    if not (0 <= i < N and 0 <= j < N):
        raise IndexError(f"indices ({i}, {j}) out of range for N={N}")
    if N > max_n:
        raise BudgetExceededError(
            f"subset search disabled for N={N} > cap {max_n}"
        )
    syn = frame.synthesis
    f_i = syn[:, i]
    others = [k for k in range(N) if k not in (i, j)]
    max_size = min(len(others), frame.dim - 1)
    for size in range(0, max_size + 1):
        for subset in itertools.combinations(others, size):
            cols = syn[:, [j, *subset]]
            s = np.linalg.svd(cols, compute_uv=False)
            if s[-1] <= RANK_TOL * s[0]:
                continue
            coeffs, *_ = np.linalg.lstsq(cols, f_i, rcond=None)
            residual = np.linalg.norm(cols @ coeffs - f_i)
            if residual > tol * max(1.0, np.linalg.norm(f_i)):
                continue
            if np.min(np.abs(coeffs)) <= tol:
                continue
            return True, ConnectionWitness(
                c=float(coeffs[0]),
                support=subset,
                coefficients=coeffs[1:].copy(),
            )
    return False, None


@dataclass(frozen=True, eq=False)
class ConnectedDecomposition:
    """Partition into blocks spanning mutually orthogonal subspaces."""

    blocks: tuple[tuple[int, ...], ...]
    bases: tuple[np.ndarray, ...]  # orthonormal basis of each H_j
    k_invariant: tuple[bool, ...]
    deltas: tuple[float, ...]  # trace(K restricted to H_j) / |block j|
    connectivity_verified: tuple[bool | None, ...]  # None = search skipped


def connected_decomposition(
    frame: Frame, op: OperatorSpec, tol: float = DEFAULT_TOL
) -> ConnectedDecomposition:
    """Orthogonality-closure blocks with per-block invariance and ratios.

    Blocks are connected components of the graph joining indices with
    non-orthogonal vectors.  Pairwise linear connectivity inside each block
    is verified when the subset-search budget allows; failures are reported
    as diagnostics rather than errors.
    """
    syn = frame.synthesis
    N = frame.n_vectors
    gram = syn.T @ syn
    norms = np.linalg.norm(syn, axis=0)
    parent = list(range(N))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for a in range(N - 1):
        for b in range(a + 1, N):
            scale = max(1.0, norms[a] * norms[b])
            if abs(gram[a, b]) > tol * scale:
                union(a, b)

    groups: dict[int, list[int]] = {}
    for idx in range(N):
        groups.setdefault(find(idx), []).append(idx)
    blocks = tuple(tuple(groups[r]) for r in sorted(groups))

    K = op.matrix
    k_scale = max(1.0, float(np.linalg.norm(K)))
    bases = []
    invariant = []
    deltas = []
    verified = []
    for block in blocks:
        Q = _orthonormal_span(syn[:, list(block)])
        bases.append(Q)
        P = Q @ Q.T
        invariant.append(
            bool(np.linalg.norm(K @ P - P @ K @ P) <= tol * k_scale)
        )
        deltas.append(float(np.trace(Q.T @ K @ Q)) / len(block))
        if N > SUBSET_SEARCH_CAP:
            verified.append(None)
            continue
        ok = True
        for a, b in itertools.combinations(block, 2):
            conn_ab, _ = is_linearly_connected_pair(frame, a, b, tol)
            conn_ba, _ = is_linearly_connected_pair(frame, b, a, tol)
            if not (conn_ab and conn_ba):
                ok = False
                break
        verified.append(ok)
    return ConnectedDecomposition(
        blocks=blocks,
        bases=tuple(bases),
        k_invariant=tuple(invariant),
        deltas=tuple(deltas),
        connectivity_verified=tuple(verified),
    )


def min_r1_fixed_frame(
    frame: Frame, op: OperatorSpec, tol: float = DEFAULT_TOL
) -> float:
    """Minimum one-erasure spectral radius over all K-duals of F.

    Equals ``max_j delta_j`` over the decomposition blocks when every block
    subspace is K-invariant.  Otherwise the closed form does not apply and a
    numerical minimization result is returned with a warning.
    """
    if not op.psd_flag:
        raise NotPSDError("the spectral-radius minimum requires a PSD operator")
    decomp = connected_decomposition(frame, op, tol)
    if all(decomp.k_invariant):
        return float(max(decomp.deltas))
    warnings.warn(
        "block subspaces are not K-invariant; falling back to numerical search",
        RuntimeWarning,
        stacklevel=2,
    )
    if not is_parseval_k_frame(frame, op):
        raise NotKInvariantError(
            "closed form inapplicable and frame is not Parseval; cannot search"
        )
    from .search import SearchConfig, minimize_measure

    result = minimize_measure(
        frame, op, Measure.SPECTRAL, SearchConfig(max_iters=800, restarts=3, seed=0)
    )
    return result.value


# ---------------------------------------------------------------------------
# iterative dual improvement


def _diag_inner(frame: Frame, dual: Frame) -> np.ndarray:
    return np.einsum("ij,ij->j", dual.synthesis, frame.synthesis)


def improve_dual_step(
    frame: Frame,
    dual: Frame,
    op: OperatorSpec,
    tol: float = WEIGHT_TOL,
) -> Frame:
    """One correction step driving another diagonal to trace(K)/N.

    Picks a linearly connected pair (i1, i2) among the unfinished indices and
    adds the admissible correction that sets ``<g_i2, f_i2>`` to the target
    while leaving every finished diagonal untouched.  Returns the dual
    unchanged when all diagonals are already on target.
    """
    N = frame.n_vectors
    target = op.trace / N
    diag = _diag_inner(frame, dual)
    done = np.abs(diag - target) <= tol
    pending = [int(i) for i in np.flatnonzero(~done)]
    if not pending:
        return dual
    if len(pending) == 1:
        raise NumericalError(
            "exactly one off-target diagonal contradicts the trace identity"
        )
    syn = frame.synthesis
    for i1, i2 in itertools.permutations(pending, 2):
        connected, witness = is_linearly_connected_pair(frame, i1, i2, tol)
        if not connected:
            continue
        support = list(witness.support)
        gap = target - diag[i2]
        rows = [syn[:, i2], *(syn[:, l] for l in support)]
        rhs = np.zeros(len(rows))
        rhs[0] = gap / witness.c
        A = np.asarray(rows)
        v, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        correction = np.zeros_like(dual.synthesis)
        correction[:, i1] = -v
        correction[:, i2] = witness.c * v
        for l, coef in zip(support, witness.coefficients):
            correction[:, l] = coef * v
        return Frame(dual.synthesis + correction)
    raise NoConnectedPairAvailableError(
        f"no linearly connected pair among unfinished indices {pending}"
    )


def construct_spectrally_optimal_dual(
    frame: Frame, op: OperatorSpec, tol: float = WEIGHT_TOL
) -> Frame:
    """K-dual achieving ``<g_i, f_i> = delta_j`` on every block.

    Works block by block in the block's own coordinates: the initial dual
    ``g_i = K_j^T S_j^{-1} f_i`` (K_j, S_j the restricted operator and frame
    operator) is corrected by :func:`improve_dual_step` until all diagonals
    hit the block ratio; the block duals embed back and concatenate.  Every
    block subspace must be K-invariant.
    """
    decomp = connected_decomposition(frame, op, tol)
    if not all(decomp.k_invariant):
        bad = [j for j, ok in enumerate(decomp.k_invariant) if not ok]
        raise NotKInvariantError(f"blocks {bad} are not K-invariant")
    n, N = frame.synthesis.shape
    out = np.zeros((n, N))
    for block, Q in zip(decomp.blocks, decomp.bases):
        idx = list(block)
        if Q.shape[1] == 0:
            continue
        f_red = Q.T @ frame.synthesis[:, idx]
        K_red = Q.T @ op.matrix @ Q
        S_red = f_red @ f_red.T
        try:
            g_red = K_red.T @ np.linalg.solve(S_red, f_red)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"block frame operator is singular on block {block}"
            ) from exc
        op_red = build_operator(K_red, op.tol)
        frame_red = Frame(f_red)
        dual_red = Frame(g_red)
        for _ in range(len(idx)):
            diag = _diag_inner(frame_red, dual_red)
            if np.max(np.abs(diag - op_red.trace / len(idx))) <= tol:
                break
            dual_red = improve_dual_step(frame_red, dual_red, op_red, tol)
        else:
            diag = _diag_inner(frame_red, dual_red)
            if np.max(np.abs(diag - op_red.trace / len(idx))) > tol:
                raise NumericalError(
                    f"diagonal equalization did not finish on block {block}"
                )
        out[:, idx] = Q @ dual_red.synthesis
    return Frame(out)


# ---------------------------------------------------------------------------
# optimal-family directions and certificates


@dataclass(frozen=True, eq=False)
class PerturbationFamily:
    """Directions along which the canonical dual stays optimal.

    ``basis`` stacks an orthonormal basis of the full direction space
    (each element an n x N admissible perturbation); ``direction`` is its
    first element and ``radius`` the largest symmetric interval of step
    sizes keeping every rest weight strictly below the top value (infinite
    when nothing constrains it).
    """

    exists: bool
    direction: np.ndarray | None
    radius: float
    basis: np.ndarray


def _null_space(rows: np.ndarray, dof: int, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as rows) of the null space of a constraint matrix."""
    if rows.size == 0:
        return np.eye(dof)
    _, s, vt = np.linalg.svd(rows)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > max(tol * smax, tol)))
    return vt[rank:]


def _family_coefficient_space(
    frame: Frame, param, part: WeightPartition, kind: Measure
) -> np.ndarray:
    """Coefficient directions preserving the top weights, as rows."""
    dof = param.dof
    if dof == 0:
        return np.zeros((0, 0))
    top = list(part.top)
    if kind is Measure.OP_NORM:
        # u_i = 0 for every top index.
        rows = param.basis[:, :, top].reshape(dof, -1).T
    else:
        # <u_i, f_i> = 0 for every top index.
        f_top = frame.synthesis[:, top]
        rows = np.einsum("kat,at->tk", param.basis[:, :, top], f_top)
    return _null_space(np.atleast_2d(rows), dof)


def _family_radius(
    frame: Frame,
    base_dual: Frame,
    direction: np.ndarray,
    part: WeightPartition,
    kind: Measure,
) -> float:
    """Largest delta with all rest weights < top value for |t| < delta."""
    L = part.top_value
    radius = float("inf")
    for i in part.rest:
        f = frame.synthesis[:, i]
        v = base_dual.synthesis[:, i]
        u = direction[:, i]
        if kind is Measure.OP_NORM:
            fn = float(np.linalg.norm(f))
            if fn == 0.0:
                continue
            a = float(u @ u)
            b = float(v @ u)
            d = float(v @ v) - (L / fn) ** 2
            if a == 0.0:
                if b == 0.0:
                    continue
                radius = min(radius, -d / (2.0 * abs(b)))
                continue
            disc = math.sqrt(max(b * b - a * d, 0.0))
            t_plus = (-b + disc) / a
            t_minus = (-b - disc) / a
            radius = min(radius, min(abs(t_plus), abs(t_minus)))
        else:
            s = float(u @ f)
            if s == 0.0:
                continue
            a0 = float(v @ f)
            radius = min(radius, (part.top_value - abs(a0)) / abs(s))
    return radius


def perturbation_family(
    frame: Frame,
    op: OperatorSpec,
    kind: Measure,
    tol: float = WEIGHT_TOL,
) -> PerturbationFamily:
    """Optimality-preserving perturbation directions of the canonical dual.

    Operator norm: admissible perturbations supported off the top set (the
    top vectors are untouched, so their weights stay pinned at the maximum).
    Spectral radius: admissible perturbations whose top diagonal inner
    products vanish (the top diagonals stay pinned).  Either way rest
    weights stay strictly below the top value for steps inside ``radius``,
    so the measure is constant on the whole interval.
    """
    part = weight_partition(frame, op, kind, tol)
    param = dual_parameterization(frame, op)
    coeff_rows = _family_coefficient_space(frame, param, part, kind)
    if coeff_rows.shape[0] == 0:
        return PerturbationFamily(
            exists=False,
            direction=None,
            radius=0.0,
            basis=np.zeros((0, frame.dim, frame.n_vectors)),
        )
    basis = np.tensordot(coeff_rows, param.basis, axes=1)
    direction = basis[0]
    radius = _family_radius(frame, param.base, direction, part, kind)
    return PerturbationFamily(
        exists=True, direction=direction, radius=radius, basis=basis
    )


class Verdict(enum.Enum):
    OPTIMAL_SUFFICIENT = "optimal_sufficient"
    OPTIMAL_UNCOUNTABLE_FAMILY = "optimal_uncountable_family"
    UNIQUE_OPTIMAL = "unique_optimal"
    NOT_OPTIMAL = "not_optimal"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True, eq=False)
class OptimalityCertificate:
    verdict: Verdict
    evidence: dict


def _independent(columns: np.ndarray, tol: float = RANK_TOL) -> bool:
    if columns.shape[1] == 0:
        return True
    s = np.linalg.svd(columns, compute_uv=False)
    return s[-1] > tol * s[0] and columns.shape[1] <= columns.shape[0]


def _dependence_with_nonzero_top(
    frame: Frame, top: tuple[int, ...], tol: float
) -> np.ndarray | None:
    """A frame dependence whose coefficients are nonzero on every top index."""
    _, s, vt = np.linalg.svd(frame.synthesis)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > RANK_TOL * smax))
    null_rows = vt[rank:]
    if null_rows.shape[0] == 0:
        return None
    cols = null_rows[:, list(top)]
    if np.any(np.linalg.norm(cols, axis=0) <= tol):
        return None
    rng = np.random.default_rng(0)
    z = np.ones(null_rows.shape[0])
    for _ in range(32):
        w = z @ null_rows
        if np.min(np.abs(w[list(top)])) > 1e-6 * np.linalg.norm(w):
            return w
        z = rng.standard_normal(null_rows.shape[0])
    return None


def _measure_value(frame: Frame, dual_syn: np.ndarray, kind: Measure) -> float:
    if kind is Measure.OP_NORM:
        w = np.linalg.norm(frame.synthesis, axis=0) * np.linalg.norm(
            dual_syn, axis=0
        )
        return float(np.max(w))
    return float(np.max(np.abs(np.einsum("ij,ij->j", dual_syn, frame.synthesis))))


def _not_optimal_witness(
    frame: Frame,
    op: OperatorSpec,
    part: WeightPartition,
    base_dual: Frame,
    kind: Measure,
    tol: float,
) -> dict | None:
    """Descent witness: dependence coefficients, direction h, step, new value."""
    top = part.top
    if not _independent(frame.synthesis[:, list(top)]):
        return None
    w = _dependence_with_nonzero_top(frame, top, tol)
    if w is None:
        return None
    if kind is Measure.OP_NORM:
        scaled = [w[i] * (op.pinv @ frame.vector(i)) for i in top]
    else:
        scaled = [w[i] * frame.vector(i) for i in top]
    try:
        h = solve_equal_inner_products(scaled, -1.0)
    except DependentInputError:
        return None
    direction = np.outer(h, w)  # u_i = w_i h
    canonical_value = part.top_value
    scale = max(1.0, float(np.linalg.norm(base_dual.synthesis)))
    best_t, best_val = 0.0, canonical_value
    for t in np.geomspace(1e-8, 1.0, 80) * scale:
        val = _measure_value(frame, base_dual.synthesis + t * direction, kind)
        if val < best_val:
            best_t, best_val = float(t), val
    if best_val >= canonical_value - 1e-12:
        return None
    return {
        "dependence": w,
        "direction_vector": h,
        "step": best_t,
        "improved_value": best_val,
        "canonical_value": canonical_value,
    }


def canonical_certificate(
    frame: Frame,
    op: OperatorSpec,
    kind: Measure,
    tol: float = WEIGHT_TOL,
) -> OptimalityCertificate:
    """Decide optimality status of the canonical K-dual under one measure.

    Cascade (first hypothesis that verifies wins):

    1. no admissible perturbations at all -> UniqueOptimal;
    2. trivially intersecting spans and zero weight-preserving space
       (operator norm: rest vectors independent; spectral: no admissible
       direction keeps the top diagonals) -> UniqueOptimal;
    3. trivially intersecting spans and a nonzero weight-preserving space
       -> OptimalUncountableFamily, with direction and radius;
    4. trivially intersecting spans alone -> OptimalSufficient;
    5. independent top vectors inside an all-nonzero-top dependence
       -> NotOptimal, with an explicit descent witness;
    6. otherwise Undetermined, with numerical search evidence attached.
    """
    if not is_parseval_k_frame(frame, op):
        raise NotParsevalError("certificate requires a Parseval K-frame")
    if not op.psd_flag:
        raise NotPSDError("certificate requires a PSD operator")
    part = weight_partition(frame, op, kind, tol)
    param = dual_parameterization(frame, op)

    if param.dof == 0:
        return OptimalityCertificate(
            Verdict.UNIQUE_OPTIMAL,
            {"hypothesis": "no_admissible_perturbations", "dof": 0},
        )

    if spans_intersect_trivially(part):
        family = perturbation_family(frame, op, kind, tol)
        if not family.exists:
            reason = (
                "rest_vectors_independent"
                if kind is Measure.OP_NORM
                else "no_diagonal_preserving_direction"
            )
            return OptimalityCertificate(
                Verdict.UNIQUE_OPTIMAL,
                {
                    "hypothesis": "trivial_span_intersection",
                    "uniqueness_reason": reason,
                },
            )
        return OptimalityCertificate(
            Verdict.OPTIMAL_UNCOUNTABLE_FAMILY,
            {
                "hypothesis": "trivial_span_intersection",
                "direction": family.direction,
                "radius": family.radius,
                "family_dim": int(family.basis.shape[0]),
            },
        )

    witness = _not_optimal_witness(frame, op, part, param.base, kind, tol)
    if witness is not None:
        return OptimalityCertificate(Verdict.NOT_OPTIMAL, witness)

    from .search import SearchConfig, minimize_measure

    result = minimize_measure(
        frame, op, kind, SearchConfig(max_iters=600, restarts=3, seed=0)
    )
    return OptimalityCertificate(
        Verdict.UNDETERMINED,
        {
            "search_value": result.value,
            "canonical_value": part.top_value,
            "gap": part.top_value - result.value,
        },
    )


# ---------------------------------------------------------------------------
# special-case two-erasure closed forms


def r2_special_closed_form(ds: DualSystem, tol: float = WEIGHT_TOL) -> float:
    """Two-erasure spectral radius for nonnegative diagonal and constant
    off-diagonal products.

    With ``c`` the common product and ``Delta`` the argmax set of the
    diagonal:

    * c > 0, |Delta| = 1: mixes the top diagonal with the runner-up;
    * c > 0, |Delta| > 1: ``r1 + sqrt(c)``;
    * c = 0: ``r1``;
    * c < 0, |Delta| > 1: ``sqrt(r1^2 - c)``.

    Raises HypothesesNotMetError when the pattern does not match (caller
    falls back to the general closed form).
    """
    N = ds.n_vectors
    if N < 2:
        raise ValueError("two-erasure measure needs at least 2 vectors")
    diag = ds.diag
    if np.min(diag) < -tol:
        raise HypothesesNotMetError("diagonal inner products must be nonnegative")
    alpha = ds.cross_gram
    prods = np.array(
        [alpha[i, j] * alpha[j, i] for i in range(N - 1) for j in range(i + 1, N)]
    )
    c = float(np.mean(prods))
    if np.max(np.abs(prods - c)) > tol:
        raise HypothesesNotMetError("off-diagonal products are not constant")
    r1_val = float(np.max(diag))
    delta_size = int(np.count_nonzero(diag >= r1_val - tol))
    if c > tol:
        if delta_size == 1:
            second = float(np.max(diag[diag < r1_val - tol]))
            return 0.5 * (
                r1_val + second + math.sqrt((r1_val - second) ** 2 + 4.0 * c)
            )
        return r1_val + math.sqrt(c)
    if c >= -tol:
        return r1_val
    if delta_size <= 1:
        raise HypothesesNotMetError(
            "negative constant product needs at least two argmax diagonals"
        )
    return math.sqrt(r1_val * r1_val - c)


def two_uniform_spectral_optimality(
    frame: Frame,
    dual: Frame,
    op: OperatorSpec,
    tol: float = WEIGHT_TOL,
) -> tuple[bool, float]:
    """Two-erasure optimality of a 2-uniform K-dual, with its value.

    A 2-uniform dual is spectrally optimal for two erasures and attains
    ``max |trace(K)/N +/- sqrt(c)|`` under the principal square root, where
    the common product satisfies ``c = (trace(K^2) - trace(K)^2/N)/(N(N-1))``
    (the minus branch only matters for negative-trace operators).  Raises
    NotTwoUniformError when the dual is not 2-uniform.
    """
    ds = build_dual_system(frame, dual, op)
    c1, c2 = uniformity(ds, tol)
    if c1 is None or c2 is None:
        raise NotTwoUniformError("dual system is not 2-uniform")
    N = ds.n_vectors
    if N < 2:
        raise ValueError("two-erasure measure needs at least 2 vectors")
    c = (op.trace_sq - op.trace**2 / N) / (N * (N - 1))
    if abs(c - c2) > max(tol, 1e-6):
        raise NumericalError(
            f"observed product constant {c2} violates the trace identity value {c}"
        )
    root = np.sqrt(complex(c))
    value = max(abs(op.trace / N + root), abs(op.trace / N - root))
    return True, float(value)
