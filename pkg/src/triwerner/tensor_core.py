"""Dense complex linear algebra used throughout the package.

Everything here works on plain ``numpy`` arrays. Matrices stay dense: the
largest operator handled is ``d**3 x d**3`` with ``d <= 6``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .config import Tolerances, resolve

SeedLike = int | np.random.Generator | None


def as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, ``(a ⊗ b)[i*n + k, j*m + l] = a[i, j] * b[k, l]``."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(*factors: np.ndarray) -> np.ndarray:
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def partial_transpose(m: np.ndarray, dims: Sequence[int], sys: int) -> np.ndarray:
    """Transpose tensor factor ``sys`` (0-based) of an operator on ``⊗ dims``."""
    m = np.asarray(m)
    dims = tuple(int(x) for x in dims)
    n = int(np.prod(dims))
    if m.shape != (n, n):
        raise ValueError(f"matrix of shape {m.shape} does not act on dims {dims}")
    if not 0 <= sys < len(dims):
        raise ValueError(f"subsystem {sys} out of range for {len(dims)} factors")
    k = len(dims)
    t = m.reshape(dims + dims)
    axes = list(range(2 * k))
    axes[sys], axes[sys + k] = axes[sys + k], axes[sys]
    return t.transpose(axes).reshape(n, n)


def partial_transpose_first(m: np.ndarray, d_first: int, d_rest: int) -> np.ndarray:
    """Partial transpose on the first factor of ``C^d_first ⊗ C^d_rest``.

    Entry ``((i, k), (j, l))`` of the result is entry ``((j, k), (i, l))`` of
    ``m``, so ``(A ⊗ B)^T1 = A.T ⊗ B``.
    """
    return partial_transpose(m, (d_first, d_rest), 0)


def is_hermitian(m: np.ndarray, atol: float) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= atol


def eigvals_hermitian(m: np.ndarray, tol: Tolerances | None = None) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    The input is symmetrized as ``(M + M^†)/2`` after checking that it is
    Hermitian to within the structural tolerance.
    """
    tol = resolve(tol)
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m, tol.structural):
        dev = np.max(np.abs(m - m.conj().T))
        raise ValueError(f"matrix is not Hermitian (max |M - M^†| = {dev:.3g})")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def haar_random_unitaries(n: int, d: int, seed: SeedLike = None) -> np.ndarray:
    """Stack of ``n`` Haar-distributed ``d x d`` unitaries, shape ``(n, d, d)``.

    QR of a complex Ginibre matrix, with the phases of ``diag(R)`` moved into
    ``Q`` so that the distribution is exactly Haar.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    rng = as_rng(seed)
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def haar_random_unitary(d: int, seed: SeedLike = None) -> np.ndarray:
    if d < 2:
        raise ValueError("Haar sampling needs d >= 2")
    return haar_random_unitaries(1, d, seed)[0]


def random_pure_states(n: int, d: int, seed: SeedLike = None) -> np.ndarray:
    """``n`` unitarily invariant random unit vectors in ``C^d``, shape ``(n, d)``."""
    if d < 1:
        raise ValueError("dimension must be positive")
    rng = as_rng(seed)
    v = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_pure_state(d: int, seed: SeedLike = None) -> np.ndarray:
    return random_pure_states(1, d, seed)[0]


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())
