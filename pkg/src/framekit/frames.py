"""Frame/operator object model over real, finite-dimensional spaces.

A frame is an ordered sequence of N vectors in R^n stored column-wise in its
synthesis matrix.  The operator K that gates reconstruction is wrapped in an
:class:`OperatorSpec` carrying its cached pseudoinverse, PSD square root and
traces.  A dual system bundles a frame F with a K-dual G and the N x N cross
Gram matrix ``alpha[i, j] = <g_i, f_j>``; every closed-form error measure is a
function of ``alpha``.

Duality is the synthesis-level identity ``F G^T = K`` (equivalently
``K f = sum_i <f, g_i> f_i`` for all f).  For a Parseval K-frame, i.e.
``F F^T = K K^T``, the pseudoinverse image ``{K^+ f_i}`` is the canonical
K-dual and the full K-dual set is the affine space ``K^+ F + U`` where each
row of U lies in the null space of the synthesis matrix; that affine space is
exposed through :func:`dual_parameterization`.

All objects are immutable after construction (arrays are marked read-only),
so values can be shared freely across threads; every operation here is a pure
function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    NotDualError,
    NotKFrameError,
    NotParsevalError,
)

# Absolute tolerance for O(1)-scale equality decisions (duality residuals,
# uniformity of Gram entries, membership in argmax sets).
DEFAULT_TOL = 1e-8

# Relative tolerance for rank / PSD decisions: singular values below
# RANK_TOL * sigma_max count as zero.
RANK_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Frame:
    """Ordered sequence of N vectors in R^n; column i of ``synthesis`` is f_i."""

    synthesis: np.ndarray  # n x N

    def __post_init__(self):
        object.__setattr__(self, "synthesis", _readonly(self.synthesis))

    @property
    def dim(self) -> int:
        return self.synthesis.shape[0]

    @property
    def n_vectors(self) -> int:
        return self.synthesis.shape[1]

    @property
    def vectors(self) -> np.ndarray:
        """N x n view; row i is f_i (bit-identical to synthesis column i)."""
        return self.synthesis.T

    def vector(self, i: int) -> np.ndarray:
        return self.synthesis[:, i]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.synthesis, axis=0)


def build_frame(vectors) -> Frame:
    """Assemble a Frame from a sequence of equal-length real vectors.

    Raises ValueError on an empty sequence, ragged lengths, or non-finite
    entries.
    """
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    if not vecs:
        raise ValueError("frame needs at least one vector")
    dim = vecs[0].shape
    if len(dim) != 1 or dim[0] < 1:
        raise ValueError("frame vectors must be 1-d and nonempty")
    for i, v in enumerate(vecs):
        if v.shape != dim:
            raise ValueError(
                f"vector {i} has length {v.shape}, expected {dim}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError(f"vector {i} has a non-finite entry")
    return Frame(np.column_stack(vecs))


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Square operator K with cached adjoint, pseudoinverse, PSD root, traces.

    ``sqrt`` is populated only when K is PSD within ``tol``; ``rank`` counts
    singular values above ``tol * sigma_max``.
    """

    matrix: np.ndarray
    adjoint: np.ndarray
    pinv: np.ndarray
    sqrt: np.ndarray | None
    trace: float
    trace_sq: float
    psd_flag: bool
    rank: int
    tol: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", _readonly(self.matrix))
        object.__setattr__(self, "adjoint", _readonly(self.adjoint))
        object.__setattr__(self, "pinv", _readonly(self.pinv))
        if self.sqrt is not None:
            object.__setattr__(self, "sqrt", _readonly(self.sqrt))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_operator(matrix, tol: float = RANK_TOL) -> OperatorSpec:
    """Build an OperatorSpec from a square real matrix.

    The pseudoinverse comes from an SVD with singular values below
    ``tol * sigma_max`` zeroed out.  PSD status is decided on the symmetric
    part with eigenvalue floor ``-tol * ||K||``; the square root is the
    symmetric eigendecomposition root with tiny negatives clamped to zero.
    """
    K = np.asarray(matrix, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"operator must be square, got shape {K.shape}")
    if not np.all(np.isfinite(K)):
        raise ValueError("operator has a non-finite entry")

    u, s, vt = np.linalg.svd(K)
    smax = s[0] if s.size else 0.0
    cutoff = tol * smax
    keep = s > cutoff
    rank = int(np.count_nonzero(keep))
    s_inv = np.zeros_like(s)
    np.divide(1.0, s, out=s_inv, where=keep)
    pinv = (vt.T * s_inv) @ u.T

    scale = np.linalg.norm(K)
    sym_gap = np.linalg.norm(K - K.T)
    psd = False
    sqrt = None
    if sym_gap <= tol * max(1.0, scale):
        sym = 0.5 * (K + K.T)
        w, q = np.linalg.eigh(sym)
        if w.size == 0 or w[0] >= -tol * max(1.0, scale):
            psd = True
            sqrt = (q * np.sqrt(np.clip(w, 0.0, None))) @ q.T

    return OperatorSpec(
        matrix=K,
        adjoint=K.T.copy(),
        pinv=pinv,
        sqrt=sqrt,
        trace=float(np.trace(K)),
        trace_sq=float(np.trace(K @ K)),
        psd_flag=psd,
        rank=rank,
        tol=tol,
    )


def frame_operator(frame: Frame) -> np.ndarray:
    """S = sum_i f_i f_i^T, the symmetric PSD frame operator."""
    syn = frame.synthesis
    return syn @ syn.T


def k_frame_bounds(
    frame: Frame, op: OperatorSpec, tol: float = RANK_TOL
) -> tuple[float, float]:
    """Optimal frame bounds (A, B) of F measured against ``K*``.

    B is the largest eigenvalue of the frame operator.  A is the smallest
    generalized eigenvalue of the pencil (S, K K^T) restricted to range(K),
    i.e. the best constant with ``A ||K^T f||^2 <= sum |<f, f_i>|^2``.
    Raises NotKFrameError when A <= tol.  A rank-zero K yields A = inf
    (the lower inequality is vacuous).
    """
    if frame.dim != op.dim:
        raise ValueError(
            f"frame dim {frame.dim} does not match operator dim {op.dim}"
        )
    S = frame_operator(frame)
    evals = np.linalg.eigvalsh(S)
    B = float(evals[-1]) if evals.size else 0.0
    if op.rank == 0:
        return float("inf"), B

    # Orthonormal basis of range(K) from the SVD kept columns.
    u, s, _ = np.linalg.svd(op.matrix)
    Q = u[:, : op.rank]
    S_r = Q.T @ S @ Q
    KKt = op.matrix @ op.adjoint
    KKt_r = Q.T @ KKt @ Q
    try:
        gen = scipy.linalg.eigh(S_r, KKt_r, eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - degenerate pencil
        raise NotKFrameError(f"generalized eigenproblem failed: {exc}") from exc
    A = float(gen[0])
    if A <= tol:
        raise NotKFrameError(
            f"lower K-frame bound {A:.3e} is not positive within tol"
        )
    return A, B


def is_parseval_k_frame(
    frame: Frame, op: OperatorSpec, tol: float = DEFAULT_TOL
) -> bool:
    """True iff the frame operator equals ``K K^T`` within scale-free tol."""
    if frame.dim != op.dim:
        return False
    S = frame_operator(frame)
    KKt = op.matrix @ op.adjoint
    scale = max(1.0, float(np.linalg.norm(op.matrix)) ** 2)
    return float(np.linalg.norm(S - KKt)) <= tol * scale


def canonical_k_dual(frame: Frame, op: OperatorSpec) -> Frame:
    """Canonical K-dual ``{K^+ f_i}`` of a Parseval K-frame."""
    if not is_parseval_k_frame(frame, op):
        raise NotParsevalError("canonical K-dual requires a Parseval K-frame")
    return Frame(op.pinv @ frame.synthesis)


class DualKind(enum.Enum):
    NOT_DUAL = "not_dual"
    K_DUAL_ONLY = "k_dual_only"
    K_DUAL_PAIR = "k_dual_pair"


def verify_k_dual(
    frame: Frame, dual: Frame, op: OperatorSpec, tol: float = DEFAULT_TOL
) -> DualKind:
    """Classify (F, G) by the duality residuals.

    K_DUAL_ONLY needs ``F G^T = K``; K_DUAL_PAIR additionally needs the
    reversed relation ``G F^T = K^T``.  Residuals are Frobenius norms
    relative to ``max(1, ||K||)``.  Over the reals the two residuals are
    transposes of each other, so a verified dual always has pair status.
    """
    if frame.dim != dual.dim or frame.n_vectors != dual.n_vectors:
        raise ValueError("frame and dual shapes disagree")
    if frame.dim != op.dim:
        raise ValueError("frame and operator dims disagree")
    scale = max(1.0, float(np.linalg.norm(op.matrix)))
    forward = np.linalg.norm(frame.synthesis @ dual.synthesis.T - op.matrix)
    if forward > tol * scale:
        return DualKind.NOT_DUAL
    backward = np.linalg.norm(dual.synthesis @ frame.synthesis.T - op.adjoint)
    if backward > tol * scale:
        return DualKind.K_DUAL_ONLY
    return DualKind.K_DUAL_PAIR


@dataclass(frozen=True, eq=False)
class DualSystem:
    """A frame with a verified K-dual and the cached cross Gram matrix."""

    frame: Frame
    dual: Frame
    op: OperatorSpec
    cross_gram: np.ndarray  # alpha[i, j] = <g_i, f_j>
    kind: DualKind

    def __post_init__(self):
        object.__setattr__(self, "cross_gram", _readonly(self.cross_gram))

    @property
    def n_vectors(self) -> int:
        return self.frame.n_vectors

    @property
    def diag(self) -> np.ndarray:
        """Diagonal inner products ``<g_i, f_i>``."""
        return np.diag(self.cross_gram)


def build_dual_system(
    frame: Frame, dual: Frame, op: OperatorSpec, tol: float = DEFAULT_TOL
) -> DualSystem:
    """Validate duality and cache the cross Gram matrix.

    Raises NotDualError if G fails the duality relation.
    """
    kind = verify_k_dual(frame, dual, op, tol)
    if kind is DualKind.NOT_DUAL:
        raise NotDualError("sequence is not a K-dual of the frame")
    alpha = dual.synthesis.T @ frame.synthesis
    return DualSystem(frame=frame, dual=dual, op=op, cross_gram=alpha, kind=kind)


@dataclass(frozen=True, eq=False)
class DualParameterization:
    """Affine chart of all K-duals: ``G(c) = base + sum_k c_k basis[k]``.

    ``basis`` is Frobenius-orthonormal; each element U satisfies
    ``F U^T = 0`` exactly to rounding, so every coefficient vector yields a
    valid K-dual.  ``dof = n * (N - rank F)``.
    """

    base: Frame
    basis: np.ndarray  # dof x n x N
    dof: int

    def __post_init__(self):
        object.__setattr__(self, "basis", _readonly(self.basis))


def dual_parameterization(
    frame: Frame, op: OperatorSpec, tol: float = RANK_TOL
) -> DualParameterization:
    """Orthonormal parameterization of the K-dual affine space of F.

    The perturbation space is spanned by ``e_a w_k^T`` over the n standard
    directions e_a and an orthonormal basis {w_k} of null(F) in coefficient
    space; these matrices are already mutually orthonormal entrywise.
    """
    if not is_parseval_k_frame(frame, op):
        raise NotParsevalError("dual parameterization requires a Parseval K-frame")
    base = canonical_k_dual(frame, op)
    n, N = frame.synthesis.shape
    _, s, vt = np.linalg.svd(frame.synthesis)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > tol * smax))
    null_basis = vt[rank:]  # (N - rank) x N, orthonormal rows
    dof = n * (N - rank)
    basis = np.zeros((dof, n, N))
    k = 0
    for w in null_basis:
        for a in range(n):
            basis[k, a, :] = w
            k += 1
    return DualParameterization(base=base, basis=basis, dof=dof)


def reconstruct_dual(param: DualParameterization, coefficients) -> Frame:
    """K-dual frame at the given coefficient vector."""
    c = np.asarray(coefficients, dtype=float)
    if c.shape != (param.dof,):
        raise ValueError(f"expected {param.dof} coefficients, got {c.shape}")
    syn = param.base.synthesis.copy()
    if param.dof:
        syn = syn + np.tensordot(c, param.basis, axes=1)
    return Frame(syn)
