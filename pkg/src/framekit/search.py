"""Numerical minimization over the K-dual affine space.

This is the independent oracle validating every closed form: it never looks
at block decompositions, uniformity, or bound formulas.  Both one-erasure
objectives are pointwise maxima of convex functions of the perturbation
coefficients (a norm of an affine map for the operator norm, the absolute
value of an affine functional for the spectral radius), so a subgradient
scheme with diminishing steps converges to the global infimum.  Each restart
runs the subgradient loop (restart 0 starts at the canonical dual) and an
optional exact polish tightens the best point: an epigraph LP for the
spectral objective and an SLSQP epigraph solve for the operator norm.  The
polished point is only accepted when the exact re-evaluated objective
strictly improves, so reported values are always true measure values of
verified duals.

``minimize_r2_within_uniform`` restricts the chart to duals with constant
diagonal trace(K)/N (an affine constraint) and minimizes the two-erasure
spectral radius by direct search; that objective is not convex, hence the
restarts actually matter there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import DofTooLargeError, InfeasibleError
from .frames import (
    DualKind,
    Frame,
    OperatorSpec,
    dual_parameterization,
    reconstruct_dual,
    verify_k_dual,
)
from .erasures import Measure


@dataclass(frozen=True)
class SearchConfig:
    max_iters: int = 5000
    step_init: float = 0.1
    tol_value: float = 1e-8
    restarts: int = 8
    seed: int = 20240
    grid_points_per_dof: int = 11
    dof_cap_for_grid: int = 4
    polish: bool = True

    def __post_init__(self):
        if (
            self.max_iters <= 0
            or self.step_init <= 0
            or self.tol_value <= 0
            or self.restarts <= 0
            or self.grid_points_per_dof <= 0
            or self.dof_cap_for_grid < 0
        ):
            raise ValueError("search configuration fields must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True, eq=False)
class MinimizeResult:
    frame: Frame
    value: float
    trace: tuple[float, ...]
    restart_index: int = 0
    comparison: dict | None = None


class _Objective:
    """Vectorized one-erasure objectives over the coefficient chart."""

    def __init__(self, frame: Frame, param, kind: Measure):
        self.kind = kind
        self.fsyn = frame.synthesis
        self.fnorms = np.linalg.norm(self.fsyn, axis=0)
        self.base = param.base.synthesis
        self.basis = param.basis  # dof x n x N
        self.dof = param.dof
        # Diagonal coefficients: diag(c) = a0 + D^T c.
        self.a0 = np.einsum("ij,ij->j", self.base, self.fsyn)
        self.D = np.einsum("kij,ij->kj", self.basis, self.fsyn) if self.dof else (
            np.zeros((0, frame.n_vectors))
        )

    def dual_syn(self, c: np.ndarray) -> np.ndarray:
        if self.dof == 0:
            return self.base
        return self.base + np.tensordot(c, self.basis, axes=1)

    def value(self, c: np.ndarray) -> float:
        if self.kind is Measure.SPECTRAL:
            return float(np.max(np.abs(self.a0 + c @ self.D)))
        G = self.dual_syn(c)
        return float(np.max(self.fnorms * np.linalg.norm(G, axis=0)))

    def value_and_subgrad(self, c: np.ndarray) -> tuple[float, np.ndarray]:
        if self.kind is Measure.SPECTRAL:
            diag = self.a0 + c @ self.D
            mags = np.abs(diag)
            val = float(np.max(mags))
            ties = np.flatnonzero(mags >= val - 1e-14)
            sub = np.zeros(self.dof)
            for i in ties:
                sub += np.sign(diag[i]) * self.D[:, i]
            return val, sub / len(ties)
        G = self.dual_syn(c)
        gnorms = np.linalg.norm(G, axis=0)
        w = self.fnorms * gnorms
        val = float(np.max(w))
        ties = np.flatnonzero(w >= val - 1e-14)
        sub = np.zeros(self.dof)
        for i in ties:
            if gnorms[i] > 0:
                sub += self.fnorms[i] * (self.basis[:, :, i] @ (G[:, i] / gnorms[i]))
        return val, sub / len(ties)


def _subgradient_run(
    obj: _Objective,
    start: np.ndarray,
    cfg: SearchConfig,
    target: float | None,
) -> tuple[np.ndarray, float, list[float]]:
    c = start.copy()
    best_c = c.copy()
    best = obj.value(c)
    trace = [best]
    stall_ref = best
    stall_count = 0
    for it in range(1, cfg.max_iters + 1):
        val, sub = obj.value_and_subgrad(c)
        if val < best:
            best = val
            best_c = c.copy()
        norm_sq = float(sub @ sub)
        if norm_sq == 0.0:
            trace.append(best)
            break
        if target is not None and val > target:
            step = (val - target) / norm_sq
        else:
            step = cfg.step_init / math.sqrt(it)
        c = c - step * sub
        trace.append(best)
        if stall_ref - best < cfg.tol_value:
            stall_count += 1
            if stall_count >= 50:
                break
        else:
            stall_ref = best
            stall_count = 0
    return best_c, best, trace


def _polish_spectral(obj: _Objective, c0: np.ndarray) -> np.ndarray | None:
    """Exact epigraph LP: min t with -t <= a0 + D^T c <= t."""
    dof, N = obj.dof, obj.a0.shape[0]
    cost = np.zeros(dof + 1)
    cost[-1] = 1.0
    A = np.zeros((2 * N, dof + 1))
    A[:N, :dof] = obj.D.T
    A[:N, -1] = -1.0
    A[N:, :dof] = -obj.D.T
    A[N:, -1] = -1.0
    b = np.concatenate([-obj.a0, obj.a0])
    res = scipy.optimize.linprog(
        cost, A_ub=A, b_ub=b, bounds=[(None, None)] * dof + [(0, None)],
        method="highs",
    )
    if not res.success:
        return None
    return res.x[:dof]


def _polish_op_norm(obj: _Objective, c0: np.ndarray) -> np.ndarray | None:
    """Epigraph NLP with squared-norm constraints, warm-started at c0."""
    t0 = obj.value(c0)
    x0 = np.concatenate([c0, [t0 + 1e-9]])
    fn2 = obj.fnorms**2
    base, basis = obj.base, obj.basis

    def cons_f(x):
        c, t = x[:-1], x[-1]
        G = obj.dual_syn(c)
        return t * t - fn2 * np.einsum("ij,ij->j", G, G)

    def cons_jac(x):
        c, t = x[:-1], x[-1]
        G = obj.dual_syn(c)
        jac = np.zeros((G.shape[1], x.size))
        if obj.dof:
            jac[:, :-1] = -2.0 * (fn2[None, :] * np.einsum(
                "kij,ij->kj", basis, G
            )).T
        jac[:, -1] = 2.0 * t
        return jac

    res = scipy.optimize.minimize(
        lambda x: x[-1],
        x0,
        jac=lambda x: np.eye(x0.size)[-1],
        constraints=[{"type": "ineq", "fun": cons_f, "jac": cons_jac}],
        bounds=[(None, None)] * obj.dof + [(0.0, None)],
        method="SLSQP",
        options={"maxiter": 200, "ftol": 1e-12},
    )
    if not res.success:
        return None
    return res.x[:-1]


def minimize_measure(
    frame: Frame,
    op: OperatorSpec,
    kind: Measure,
    cfg: SearchConfig = SearchConfig(),
    target: float | None = None,
) -> MinimizeResult:
    """Minimize a one-erasure measure over all K-duals of F.

    Restart 0 starts at the canonical dual; further restarts draw random
    coefficients from a seeded generator, so results are deterministic for a
    fixed (input, seed).  ``target`` enables Polyak steps toward a known
    optimal value; the reported value is always an exact objective value at
    a verified dual.
    """
    param = dual_parameterization(frame, op)
    obj = _Objective(frame, param, kind)
    if param.dof == 0:
        value = obj.value(np.zeros(0))
        return MinimizeResult(param.base, value, (value,))

    scale = max(1.0, float(np.linalg.norm(param.base.synthesis)))
    best_c, best_val, best_trace, best_idx = None, np.inf, None, -1
    for idx in range(cfg.restarts):
        if idx == 0:
            start = np.zeros(param.dof)
        else:
            rng = np.random.default_rng([cfg.seed, idx])
            start = rng.standard_normal(param.dof) * scale
        c, val, trace = _subgradient_run(obj, start, cfg, target)
        if val < best_val:
            best_c, best_val, best_trace, best_idx = c, val, trace, idx

    if cfg.polish:
        polish = (
            _polish_spectral if kind is Measure.SPECTRAL else _polish_op_norm
        )
        c_new = polish(obj, best_c)
        if c_new is not None:
            val_new = obj.value(c_new)
            if val_new < best_val - 1e-12:
                best_c, best_val = c_new, val_new
                best_trace = list(best_trace) + [val_new]

    dual = reconstruct_dual(param, best_c)
    assert verify_k_dual(frame, dual, op) is not DualKind.NOT_DUAL
    return MinimizeResult(dual, best_val, tuple(best_trace), best_idx)


def _pairwise_r2(alpha: np.ndarray) -> float:
    N = alpha.shape[0]
    iu, ju = np.triu_indices(N, k=1)
    s = alpha[iu, iu] + alpha[ju, ju]
    disc = (alpha[iu, iu] - alpha[ju, ju]) ** 2 + 4.0 * alpha[iu, ju] * alpha[ju, iu]
    root = np.sqrt(disc.astype(complex))
    return float(
        np.max(np.maximum(np.abs((s + root) / 2.0), np.abs((s - root) / 2.0)))
    )


def minimize_r2_within_uniform(
    frame: Frame,
    op: OperatorSpec,
    cfg: SearchConfig = SearchConfig(),
) -> MinimizeResult:
    """Best two-erasure spectral radius among duals with constant diagonal.

    The constant-diagonal constraint (every ``<g_i, f_i>`` = trace(K)/N) is
    affine in the chart; infeasibility raises InfeasibleError.  On the
    feasible slice the objective is minimized by seeded multi-start direct
    search (Nelder-Mead).  The result carries a comparison against the pair
    bound when K is PSD.
    """
    N = frame.n_vectors
    if N < 2:
        raise ValueError("two-erasure search needs at least 2 vectors")
    param = dual_parameterization(frame, op)
    obj = _Objective(frame, param, Measure.SPECTRAL)
    target = op.trace / N
    rhs = np.full(N, target) - obj.a0
    if param.dof == 0:
        if np.max(np.abs(rhs)) > 1e-8 * max(1.0, abs(target)):
            raise InfeasibleError("no 1-uniform dual exists for this frame")
        c0 = np.zeros(0)
        Z = np.zeros((0, 0))
    else:
        c0, *_ = np.linalg.lstsq(obj.D.T, rhs, rcond=None)
        if np.max(np.abs(obj.D.T @ c0 - rhs)) > 1e-8 * max(1.0, abs(target)):
            raise InfeasibleError("no 1-uniform dual exists for this frame")
        _, s, vt = np.linalg.svd(obj.D.T, full_matrices=True)
        rank = int(np.count_nonzero(s > 1e-12 * (s[0] if s.size else 1.0)))
        Z = vt[rank:]  # rows span the feasible directions

    fsyn = frame.synthesis

    def r2_of(z: np.ndarray) -> float:
        c = c0 if Z.shape[0] == 0 else c0 + z @ Z
        alpha = obj.dual_syn(c).T @ fsyn
        return _pairwise_r2(alpha)

    q = Z.shape[0]
    if q == 0:
        best_z = np.zeros(0)
        best_val = r2_of(best_z)
        trace = [best_val]
    else:
        scale = max(1.0, float(np.linalg.norm(param.base.synthesis)))
        best_z, best_val = None, np.inf
        trace = []
        for idx in range(cfg.restarts):
            if idx == 0:
                z0 = np.zeros(q)
            else:
                rng = np.random.default_rng([cfg.seed, 7919 + idx])
                z0 = rng.standard_normal(q) * scale
            res = scipy.optimize.minimize(
                r2_of,
                z0,
                method="Nelder-Mead",
                options={
                    "maxiter": 400 * (q + 1),
                    "xatol": 1e-10,
                    "fatol": 1e-12,
                },
            )
            val = r2_of(res.x)
            trace.append(val)
            if val < best_val:
                best_z, best_val = res.x, val

    c_best = c0 if q == 0 else c0 + best_z @ Z
    dual = reconstruct_dual(param, c_best)
    comparison = None
    if op.psd_flag and N >= 2:
        from .pairs import pair_bounds

        bounds = pair_bounds(op, N)
        comparison = {
            "pair_r2_min": bounds.r2_min,
            "gap_to_pair_bound": best_val - bounds.r2_min,
        }
    return MinimizeResult(dual, best_val, tuple(trace), 0, comparison)


@dataclass(frozen=True)
class GridOracleResult:
    value: float
    coefficients: tuple[float, ...]
    num_minimizers: int  # grid points within 1e-9 of the minimum


def brute_force_grid_oracle(
    frame: Frame,
    op: OperatorSpec,
    kind: Measure,
    cfg: SearchConfig = SearchConfig(),
) -> GridOracleResult:
    """Exhaustive minimum over a coefficient grid (validation only).

    Enumerates ``grid_points_per_dof`` points per axis on [-1, 1] scaled by
    the Frobenius norm of the canonical dual; refuses when dof exceeds the
    configured cap.  Ties resolve to the lexicographically first grid point.
    """
    param = dual_parameterization(frame, op)
    obj = _Objective(frame, param, kind)
    if param.dof > cfg.dof_cap_for_grid:
        raise DofTooLargeError(
            f"dof {param.dof} exceeds grid cap {cfg.dof_cap_for_grid}"
        )
    if param.dof == 0:
        return GridOracleResult(obj.value(np.zeros(0)), (), 1)

    scale = max(float(np.linalg.norm(param.base.synthesis)), 1e-12)
    axis = np.linspace(-1.0, 1.0, cfg.grid_points_per_dof) * scale
    grids = np.meshgrid(*([axis] * param.dof), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)  # P x dof

    values = np.empty(points.shape[0])
    chunk = 1 << 16
    for lo in range(0, points.shape[0], chunk):
        pts = points[lo : lo + chunk]
        G = obj.base[None, :, :] + np.tensordot(pts, obj.basis, axes=1)
        if kind is Measure.SPECTRAL:
            diag = np.einsum("pij,ij->pj", G, frame.synthesis)
            values[lo : lo + chunk] = np.max(np.abs(diag), axis=1)
        else:
            norms = np.linalg.norm(G, axis=1)
            values[lo : lo + chunk] = np.max(obj.fnorms[None, :] * norms, axis=1)

    arg = int(np.argmin(values))
    vmin = float(values[arg])
    n_min = int(np.count_nonzero(values <= vmin + 1e-9))
    return GridOracleResult(vmin, tuple(points[arg]), n_min)
