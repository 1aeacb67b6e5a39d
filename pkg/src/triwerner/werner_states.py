"""Coordinates of U⊗U⊗U-invariant states and the twirl onto them."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .config import Tolerances, resolve
from .permutation_algebra import (
    ALL_PERMS,
    PermLike,
    as_perm,
    conjugation_action,
    permute_sites,
    r_operator,
    r_operator_trace,
    r_coords_from_perm_traces,
)
from .tensor_core import SeedLike, as_rng, haar_random_unitaries, is_hermitian


class InvalidStateError(ValueError):
    """Raised when coordinates or a matrix do not describe a density operator."""


@dataclass(frozen=True)
class WernerPoint:
    r_plus: float
    r_minus: float
    r1: float
    r2: float
    r3: float

    @property
    def r0(self) -> float:
        return 1.0 - self.r_plus - self.r_minus

    @property
    def bloch(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3])

    def as_array(self) -> np.ndarray:
        return np.array([self.r_plus, self.r_minus, self.r1, self.r2, self.r3])

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "WernerPoint":
        vals = [float(v) for v in values]
        if len(vals) != 5:
            raise ValueError(f"expected 5 coordinates, got {len(vals)}")
        return cls(*vals)

    def to_dict(self) -> dict[str, float]:
        return {"r_plus": self.r_plus, "r_minus": self.r_minus, "r1": self.r1, "r2": self.r2, "r3": self.r3}

    def to_json(self) -> str:
        body = ", ".join(f'"{k}": {format(v, ".17g")}' for k, v in self.to_dict().items())
        return "{" + body + "}"

    @classmethod
    def from_json(cls, text: str) -> "WernerPoint":
        obj = json.loads(text)
        return cls(*(float(obj[k]) for k in ("r_plus", "r_minus", "r1", "r2", "r3")))

    def __iter__(self):
        return iter(self.as_array())


def _point(p) -> WernerPoint:
    return p if isinstance(p, WernerPoint) else WernerPoint.from_array(p)


def validity_margin(p: WernerPoint, d: int = 3) -> float:
    """Smallest slack of the state conditions; non-negative iff valid."""
    p = _point(p)
    r0 = p.r0
    margins = [p.r_plus, p.r_minus, r0, r0 * r0 - float(p.bloch @ p.bloch)]
    if d == 2:
        margins.append(-abs(p.r_minus))
    return min(margins)


def is_valid_state(p: WernerPoint, d: int = 3, tol: Tolerances | None = None) -> bool:
    if d < 2:
        raise ValueError("d must be at least 2")
    return validity_margin(p, d) >= -resolve(tol).criterion


def _r_basis_matrices(d: int) -> dict[str, np.ndarray]:
    return {k: r_operator(k, d) for k in ("+", "-", "0", "1", "2", "3")}


def point_to_density_matrix(p: WernerPoint, d: int = 3, tol: Tolerances | None = None) -> np.ndarray:
    """The unique invariant density matrix with coordinates ``p``."""
    p = _point(p)
    if not is_valid_state(p, d, tol):
        raise InvalidStateError(f"{p} is not a state for d={d}")
    R = _r_basis_matrices(d)
    rho = p.r_plus / r_operator_trace("+", d) * R["+"]
    if d > 2:
        rho = rho + p.r_minus / r_operator_trace("-", d) * R["-"]
    rho = rho + (p.r0 * R["0"] + p.r1 * R["1"] + p.r2 * R["2"] + p.r3 * R["3"]) / r_operator_trace("0", d)
    return rho


def points_to_density_matrices(points: np.ndarray, d: int) -> np.ndarray:
    """Vectorised reconstruction for an ``(n, 5)`` array; no validity check."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    R = _r_basis_matrices(d)
    t0 = r_operator_trace("0", d)
    r0 = 1.0 - points[:, 0] - points[:, 1]
    coeffs = [points[:, 0] / r_operator_trace("+", d), r0 / t0]
    mats = [R["+"], R["0"]]
    if d > 2:
        coeffs.append(points[:, 1] / r_operator_trace("-", d))
        mats.append(R["-"])
    for j, k in zip((2, 3, 4), ("1", "2", "3")):
        coeffs.append(points[:, j] / t0)
        mats.append(R[k])
    return np.einsum("nk,kij->nij", np.column_stack(coeffs).astype(complex), np.stack(mats))


def density_matrix_to_point(
    rho: np.ndarray, d: int = 3, tol: Tolerances | None = None, check: bool = True
) -> WernerPoint:
    """``r_k = tr(ρ R_k)`` for ``k = +, -, 1, 2, 3``."""
    tol = resolve(tol)
    rho = np.asarray(rho)
    if rho.shape != (d**3, d**3):
        raise ValueError(f"expected a {d**3}x{d**3} matrix, got {rho.shape}")
    if check:
        if not is_hermitian(rho, 1e3 * tol.structural):
            raise InvalidStateError("matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > tol.spectral:
            raise InvalidStateError(f"trace is {np.trace(rho).real:.6g}, not 1")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -tol.spectral:
            raise InvalidStateError("matrix is not positive semidefinite")
    # tr(ρ R) = sum_ij ρ_ij R_ji
    vals = [float(np.sum(rho * r_operator(k, d).T).real) for k in ("+", "-", "1", "2", "3")]
    return WernerPoint(*vals)


def pure_state_point(psi: np.ndarray, d: int) -> WernerPoint:
    """Twirled coordinates of ``|ψ><ψ|`` without forming the d^3 x d^3 matrix."""
    return WernerPoint.from_array(pure_states_points(np.asarray(psi)[None, :], d)[0])


def pure_states_points(psis: np.ndarray, d: int) -> np.ndarray:
    """``(n, d^3)`` normalized vectors -> ``(n, 5)`` coordinates."""
    psis = np.asarray(psis, dtype=complex)
    n = psis.shape[0]
    t = psis.reshape(n, d, d, d).transpose(1, 2, 3, 0)
    traces = {}
    for p in ALL_PERMS:
        moved = permute_sites(t, p)
        traces[p] = np.einsum("abcn,abcn->n", t.conj(), moved)
    out = r_coords_from_perm_traces(traces)
    if d == 2:
        out[:, 1] = 0.0  # R- vanishes; keep roundoff from showing up as r- < 0
    return out


def twirl_exact(rho: np.ndarray, d: int = 3, tol: Tolerances | None = None) -> np.ndarray:
    return point_to_density_matrix(density_matrix_to_point(rho, d, tol), d, tol)


def twirl_monte_carlo(
    rho: np.ndarray, d: int, n_samples: int, seed: SeedLike = None, chunk: int = 2048
) -> np.ndarray:
    """Average of ``(U⊗U⊗U) ρ (U⊗U⊗U)^†`` over Haar samples."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = as_rng(seed)
    rho = np.asarray(rho, dtype=complex)
    D = d**3
    acc = np.zeros((D, D), dtype=complex)
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        us = haar_random_unitaries(m, d, rng)
        k = np.einsum("nai,nbj,nck->nabcijk", us, us, us).reshape(m, D, D)
        acc += (k @ rho @ np.conj(k.transpose(0, 2, 1))).sum(axis=0)
        done += m
    return acc / n_samples


def relabel_point(p: WernerPoint, s: PermLike) -> WernerPoint:
    """Coordinates of ``V_s ρ V_s^†``: the state with its sites moved by ``s``."""
    p = _point(p)
    r = conjugation_action(as_perm(s)) @ p.bloch
    return WernerPoint(p.r_plus, p.r_minus, float(r[0]), float(r[1]), float(r[2]))


def relabel_partition(part: int, s: PermLike) -> int:
    """Lone site (1-based) after moving sites by ``s``."""
    return as_perm(s)[part - 1] + 1


def permutation_average(p: WernerPoint) -> WernerPoint:
    p = _point(p)
    return WernerPoint(p.r_plus, p.r_minus, 0.0, 0.0, 0.0)


def sample_valid_points(n: int, d: int = 3, seed: SeedLike = None) -> np.ndarray:
    """``(n, 5)`` points drawn uniformly in the (r+, r-, r0) simplex with a
    uniform Bloch vector in the ball of radius ``r0``; ``r- = 0`` for d = 2."""
    rng = as_rng(seed)
    if d == 2:
        r_plus = rng.random(n)
        r_minus = np.zeros(n)
    else:
        w = rng.dirichlet(np.ones(3), size=n)
        r_plus, r_minus = w[:, 0], w[:, 1]
    r0 = 1.0 - r_plus - r_minus
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    rad = r0 * rng.random(n) ** (1 / 3)
    return np.column_stack([r_plus, r_minus, v * rad[:, None]])
