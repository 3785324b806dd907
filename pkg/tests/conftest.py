import numpy as np
import pytest

import framekit as fk
from framekit import fixtures


@pytest.fixture
def ex1():
    return fixtures.example_1()


@pytest.fixture
def ex2():
    return fixtures.example_2()


@pytest.fixture
def mb():
    return fixtures.mercedes()


def random_psd(rng, n, rank=None):
    """Random well-conditioned PSD matrix, optionally rank-deficient.

    Nonzero eigenvalues live in [0.2, 1.5] so absolute tolerances on trace
    identities and duality residuals are meaningful.
    """
    r = rank if rank is not None else n
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    lam = np.zeros(n)
    lam[:r] = rng.uniform(0.2, 1.5, size=r)
    K = (q * lam) @ q.T
    return 0.5 * (K + K.T)


def random_orthonormal_rows(rng, n, N):
    """n x N matrix V with V V^T = I (requires n <= N)."""
    q, _ = np.linalg.qr(rng.normal(size=(N, n)))
    return q[:, :n].T


def random_parseval_frame(rng, op, N):
    """Parseval K-frame for a PSD operator: K V with orthonormal rows V."""
    V = random_orthonormal_rows(rng, op.dim, N)
    return fk.Frame(op.matrix @ V)


def random_system(rng, n_max=5, N_max=8, coeff_scale=0.7):
    """Random dual system: Parseval K-frame plus a random K-dual."""
    n = int(rng.integers(2, n_max + 1))
    N = int(rng.integers(n, N_max + 1))
    rank = n if rng.random() < 0.7 else int(rng.integers(1, n))
    op = fk.build_operator(random_psd(rng, n, rank))
    frame = random_parseval_frame(rng, op, N)
    param = fk.dual_parameterization(frame, op)
    coeffs = rng.normal(size=param.dof) * coeff_scale
    dual = fk.reconstruct_dual(param, coeffs)
    return fk.build_dual_system(frame, dual, op)


def random_block_frame(rng, specs=None):
    """Parseval K-frame split into orthogonal linearly connected blocks.

    Each block draws ``size`` generic vectors in its own ``dim``-dimensional
    coordinate slot (size 1, or size > dim so pairs stay linearly connected)
    and takes the block operator to be the PSD square root of the block frame
    operator, making the whole frame Parseval for the block-diagonal K.
    """
    if specs is None:
        n_blocks = int(rng.integers(2, 4))
        specs = []
        for _ in range(n_blocks):
            if rng.random() < 0.3:
                specs.append((1, 1))
            else:
                dim = int(rng.integers(1, 3))
                specs.append((dim, dim + int(rng.integers(1, 3))))
    n = sum(d for d, _ in specs)
    N = sum(s for _, s in specs)
    syn = np.zeros((n, N))
    K = np.zeros((n, n))
    row = col = 0
    deltas = []
    for dim, size in specs:
        while True:
            sub = rng.normal(size=(dim, size))
            gram = sub.T @ sub
            norms = np.linalg.norm(sub, axis=0)
            min_cos = np.min(
                np.abs(gram[np.triu_indices(size, k=1)])
                / np.outer(norms, norms)[np.triu_indices(size, k=1)]
            ) if size > 1 else 1.0
            if min_cos > 1e-2 and np.min(norms) > 1e-2:
                break
        S = sub @ sub.T
        w, q = np.linalg.eigh(S)
        K_block = (q * np.sqrt(np.clip(w, 0.0, None))) @ q.T
        syn[row : row + dim, col : col + size] = sub
        K[row : row + dim, row : row + dim] = K_block
        deltas.append(float(np.trace(K_block)) / size)
        row += dim
        col += size
    return fk.Frame(syn), fk.build_operator(K), deltas
