"""Erasure error operators and worst-case error measures.

Losing the coefficients indexed by a pattern L turns reconstruction error
into the rank-|L| operator ``E_L = sum_{i in L} f_i g_i^T`` acting on the
signal space.  Worst-case measures over all patterns of size m:

* ``o1``: operator norm, single erasure; equals ``max_i ||f_i|| ||g_i||``.
* ``r1``: spectral radius, single erasure; equals ``max_i |<g_i, f_i>|``.
* ``r2_closed_form``: spectral radius over pairs, from the quadratic
  eigenvalues of the 2 x 2 compression of the cross Gram matrix.
* ``rm_bruteforce``: exhaustive maximum for any m.

Operator-norm convention on multi-index patterns: the measure is evaluated
on the n x n operator ``E_L`` above.  The N x N coefficient-space operator
has the same nonzero spectrum (so every spectral-radius measure agrees) but
a different operator norm for |L| >= 2; the n x n choice is used throughout.

1-uniformity (constant diagonal of the cross Gram, forced to trace(K)/N) and
2-uniformity (additionally constant off-diagonal products) are detected by
:func:`uniformity`.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotOneUniformError, BudgetExceededError, NumericalError
from .frames import DualSystem

UNIFORMITY_TOL = 1e-8

# Cap on the number of patterns rm_bruteforce will enumerate.
DEFAULT_PATTERN_BUDGET = 10**6


class Measure(enum.Enum):
    """Error measure for the one-erasure optimization problems."""

    OP_NORM = "opnorm"
    SPECTRAL = "spectral"


@dataclass(frozen=True)
class ErasurePattern:
    """Nonempty set of erased indices, stored sorted and 0-based."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if not idx:
            raise ValueError("erasure pattern must be nonempty")
        if len(idx) != len(self.indices):
            raise ValueError("erasure pattern has repeated indices")
        object.__setattr__(self, "indices", idx)

    @property
    def size(self) -> int:
        return len(self.indices)

    def validate(self, n_vectors: int) -> None:
        if self.indices[0] < 0 or self.indices[-1] >= n_vectors:
            raise IndexError(
                f"pattern {self.indices} out of range for N={n_vectors}"
            )


def error_operator(ds: DualSystem, pattern: ErasurePattern) -> np.ndarray:
    """n x n matrix of ``f -> sum_{i in L} <f, g_i> f_i``."""
    pattern.validate(ds.n_vectors)
    idx = list(pattern.indices)
    F = ds.frame.synthesis[:, idx]
    G = ds.dual.synthesis[:, idx]
    return F @ G.T


def op_norm_error(ds: DualSystem, pattern: ErasurePattern) -> float:
    """Largest singular value of the error operator."""
    return float(np.linalg.norm(error_operator(ds, pattern), 2))


def spectral_radius_error(ds: DualSystem, pattern: ErasurePattern) -> float:
    """Spectral radius of the error operator via a dense eigensolve."""
    E = error_operator(ds, pattern)
    try:
        eig = np.linalg.eigvals(E)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solve failed: {exc}") from exc
    return float(np.max(np.abs(eig))) if eig.size else 0.0


def _singleton_norms(ds: DualSystem) -> np.ndarray:
    return ds.frame.norms() * ds.dual.norms()


def o1(ds: DualSystem) -> float:
    """Worst-case one-erasure operator norm, ``max_i ||f_i|| ||g_i||``."""
    return float(np.max(_singleton_norms(ds)))


def o1_argmax(ds: DualSystem) -> int:
    return int(np.argmax(_singleton_norms(ds)))


def r1(ds: DualSystem) -> float:
    """Worst-case one-erasure spectral radius, ``max_i |<g_i, f_i>|``."""
    return float(np.max(np.abs(ds.diag)))


def r1_argmax(ds: DualSystem) -> int:
    return int(np.argmax(np.abs(ds.diag)))


def _pair_radius(a_ii: float, a_jj: float, prod: float) -> float:
    """Spectral radius of a two-erasure error operator from Gram data.

    The nonzero eigenvalues are ``(a_ii + a_jj +/- sqrt(disc)) / 2`` with
    ``disc = (a_ii - a_jj)^2 + 4 prod``; the square root is the principal
    complex branch and both signs are evaluated.
    """
    s = a_ii + a_jj
    disc = (a_ii - a_jj) ** 2 + 4.0 * prod
    root = np.sqrt(complex(disc))
    return max(abs((s + root) / 2.0), abs((s - root) / 2.0))


def r2_closed_form(ds: DualSystem) -> float:
    """Worst-case two-erasure spectral radius from the cross Gram matrix."""
    value, _ = r2_closed_form_argmax(ds)
    return value


def r2_closed_form_argmax(ds: DualSystem) -> tuple[float, tuple[int, int]]:
    """As :func:`r2_closed_form`, also returning the lexic. first argmax pair."""
    N = ds.n_vectors
    if N < 2:
        raise ValueError("two-erasure measure needs at least 2 vectors")
    alpha = ds.cross_gram
    best = -1.0
    best_pair = (0, 1)
    for i in range(N - 1):
        for j in range(i + 1, N):
            val = _pair_radius(alpha[i, i], alpha[j, j], alpha[i, j] * alpha[j, i])
            if val > best:
                best = val
                best_pair = (i, j)
    return best, best_pair


def rm_bruteforce(
    ds: DualSystem,
    m: int,
    use_op_norm: bool = False,
    max_patterns: int = DEFAULT_PATTERN_BUDGET,
) -> tuple[float, ErasurePattern]:
    """Exhaustive worst case over all C(N, m) patterns of size m.

    Ties break to the lexicographically smallest pattern (enumeration order),
    making the result deterministic.  Raises BudgetExceededError when the
    pattern count exceeds ``max_patterns``.
    """
    N = ds.n_vectors
    if not 1 <= m <= N:
        raise ValueError(f"m={m} outside 1..{N}")
    n_patterns = math.comb(N, m)
    if n_patterns > max_patterns:
        raise BudgetExceededError(
            f"C({N},{m}) = {n_patterns} patterns exceeds cap {max_patterns}"
        )
    measure = op_norm_error if use_op_norm else spectral_radius_error
    best = -1.0
    best_pattern = None
    for combo in itertools.combinations(range(N), m):
        pattern = ErasurePattern(combo)
        val = measure(ds, pattern)
        if val > best:
            best = val
            best_pattern = pattern
    return best, best_pattern


def uniformity(
    ds: DualSystem, tol: float = UNIFORMITY_TOL
) -> tuple[float | None, float | None]:
    """Detect constant diagonal (c) and constant off-diagonal products (c').

    c is present iff all ``<g_i, f_i>`` agree within tol; it then must equal
    trace(K)/N (a trace identity of any dual system, asserted here).  c' is
    present iff c is and all products ``alpha_ij alpha_ji`` (i != j) agree
    within tol.
    """
    alpha = ds.cross_gram
    diag = np.diag(alpha)
    c = None
    c_prime = None
    center = float(np.mean(diag))
    if np.max(np.abs(diag - center)) <= tol:
        c = center
        expected = ds.op.trace / ds.n_vectors
        if abs(c - expected) > max(tol, 1e-9 * max(1.0, abs(expected))):
            raise NumericalError(
                f"uniform diagonal {c} deviates from trace(K)/N = {expected}"
            )
        N = ds.n_vectors
        if N >= 2:
            prods = np.array(
                [
                    alpha[i, j] * alpha[j, i]
                    for i in range(N - 1)
                    for j in range(i + 1, N)
                ]
            )
            p_center = float(np.mean(prods))
            if np.max(np.abs(prods - p_center)) <= tol:
                c_prime = p_center
    return c, c_prime


def r2_simplified_uniform(ds: DualSystem, tol: float = UNIFORMITY_TOL) -> float:
    """Two-erasure spectral radius of a 1-uniform system.

    With constant diagonal c = trace(K)/N the pairwise eigenvalues collapse
    to ``c +/- sqrt(alpha_ij alpha_ji)``; the measure maximizes the modulus
    over pairs with both square-root signs evaluated (for c >= 0 this is the
    usual ``max |c + sqrt(alpha_ij alpha_ji)|``, and the minus branch only
    matters for negative-trace systems).
    """
    c, _ = uniformity(ds, tol)
    if c is None:
        raise NotOneUniformError("diagonal inner products are not constant")
    N = ds.n_vectors
    if N < 2:
        raise ValueError("two-erasure measure needs at least 2 vectors")
    alpha = ds.cross_gram
    cc = ds.op.trace / N
    best = 0.0
    for i in range(N - 1):
        for j in range(i + 1, N):
            root = np.sqrt(complex(alpha[i, j] * alpha[j, i]))
            best = max(best, abs(cc + root), abs(cc - root))
    return float(best)


@dataclass(frozen=True, eq=False)
class ErasureReport:
    """Headline error measures of a dual system (indices 0-based)."""

    o1: float
    r1: float
    r2: float | None
    argmax_o1: int
    argmax_r1: int
    argmax_r2: tuple[int, int] | None
    uniform1: float | None
    uniform2: float | None
    rm: dict[int, float] = field(default_factory=dict)


def build_report(
    ds: DualSystem, tol: float = UNIFORMITY_TOL, ms: tuple[int, ...] = ()
) -> ErasureReport:
    """Assemble the standard report; extra ``rm`` orders are brute-forced."""
    c, c_prime = uniformity(ds, tol)
    if ds.n_vectors >= 2:
        r2_val, r2_pair = r2_closed_form_argmax(ds)
    else:
        r2_val, r2_pair = None, None
    rm = {int(m): rm_bruteforce(ds, int(m))[0] for m in ms}
    return ErasureReport(
        o1=o1(ds),
        r1=r1(ds),
        r2=r2_val,
        argmax_o1=o1_argmax(ds),
        argmax_r1=r1_argmax(ds),
        argmax_r2=r2_pair,
        uniform1=c,
        uniform2=c_prime,
        rm=rm,
    )


def report_to_dict(report: ErasureReport) -> dict:
    """JSON-ready dict; erasure indices are 1-based on the wire."""
    return {
        "o1": report.o1,
        "r1": report.r1,
        "r2": report.r2,
        "c": report.uniform1,
        "c_prime": report.uniform2,
        "argmax_o1": report.argmax_o1 + 1,
        "argmax_r1": report.argmax_r1 + 1,
        "argmax_r2": None
        if report.argmax_r2 is None
        else [report.argmax_r2[0] + 1, report.argmax_r2[1] + 1],
        "rm": {str(m): v for m, v in sorted(report.rm.items())},
    }
