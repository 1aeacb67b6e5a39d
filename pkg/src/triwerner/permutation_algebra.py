"""Permutation operators on ``H ⊗ H ⊗ H`` and the R-basis built from them.

Permutations of the three sites are tuples of images with 0-based sites, so
``(1, 2, 0)`` is the cycle (123): site 1 -> 2 -> 3 -> 1. Composition follows
``compose(p, q)(k) = p(q(k))``, which makes ``V_p V_q = V_{compose(p, q)}``.

The permutation operator moves the vector at site ``k`` to site ``p(k)``::

    V_p φ1 ⊗ φ2 ⊗ φ3 = φ_{p^-1(1)} ⊗ φ_{p^-1(2)} ⊗ φ_{p^-1(3)}

With this orientation, a pure product state with overlaps
``a = <φ1|φ2>``, ``b = <φ2|φ3>``, ``c = <φ3|φ1>`` has
``tr(ρ V_(321)) = abc`` and ``tr(ρ V_(123)) = conj(abc)``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Mapping, Union

import numpy as np

Perm = tuple[int, int, int]

E: Perm = (0, 1, 2)
P12: Perm = (1, 0, 2)
P23: Perm = (0, 2, 1)
P31: Perm = (2, 1, 0)
P123: Perm = (1, 2, 0)
P321: Perm = (2, 0, 1)

PERM_NAMES: dict[str, Perm] = {
    "e": E,
    "(12)": P12,
    "(23)": P23,
    "(31)": P31,
    "(123)": P123,
    "(321)": P321,
}
NAME_OF: dict[Perm, str] = {v: k for k, v in PERM_NAMES.items()}
ALL_PERMS: tuple[Perm, ...] = tuple(PERM_NAMES.values())
# aliases accepted by as_perm
_ALIASES = {"(13)": P31, "(132)": P321, "(231)": P123, "(312)": P123, "(213)": P321, "id": E}

PermLike = Union[Perm, str]

R_LABELS: tuple[str, ...] = ("+", "-", "0", "1", "2", "3")

_S3 = 1.0 / np.sqrt(3.0)
# R_k = sum_p R_COEFFS[k][p] V_p
R_COEFFS: dict[str, dict[Perm, complex]] = {
    "+": {E: 1 / 6, P12: 1 / 6, P23: 1 / 6, P31: 1 / 6, P123: 1 / 6, P321: 1 / 6},
    "-": {E: 1 / 6, P12: -1 / 6, P23: -1 / 6, P31: -1 / 6, P123: 1 / 6, P321: 1 / 6},
    "0": {E: 2 / 3, P123: -1 / 3, P321: -1 / 3},
    "1": {P23: 2 / 3, P31: -1 / 3, P12: -1 / 3},
    "2": {P12: _S3, P31: -_S3},
    "3": {P123: 1j * _S3, P321: -1j * _S3},
}


def as_perm(p: PermLike) -> Perm:
    if isinstance(p, str):
        key = p.replace(" ", "")
        if key in PERM_NAMES:
            return PERM_NAMES[key]
        if key in _ALIASES:
            return _ALIASES[key]
        raise ValueError(f"unknown permutation name {p!r}")
    t = tuple(int(x) for x in p)
    if sorted(t) != [0, 1, 2]:
        raise ValueError(f"{p!r} is not a permutation of (0, 1, 2)")
    return t  # type: ignore[return-value]


def compose(p: PermLike, q: PermLike) -> Perm:
    """``p ∘ q``: apply ``q`` first, then ``p``."""
    p, q = as_perm(p), as_perm(q)
    return (p[q[0]], p[q[1]], p[q[2]])


def inverse(p: PermLike) -> Perm:
    p = as_perm(p)
    inv = [0, 0, 0]
    for k, img in enumerate(p):
        inv[img] = k
    return tuple(inv)  # type: ignore[return-value]


def n_cycles(p: PermLike) -> int:
    p = as_perm(p)
    seen, count = set(), 0
    for start in range(3):
        if start in seen:
            continue
        count += 1
        k = start
        while k not in seen:
            seen.add(k)
            k = p[k]
    return count


def permute_sites(tensor: np.ndarray, p: PermLike) -> np.ndarray:
    """Apply ``V_p`` to the leading three axes of ``tensor``."""
    inv = inverse(p)
    rest = tuple(range(3, tensor.ndim))
    return np.transpose(tensor, inv + rest)


@lru_cache(maxsize=None)
def _perm_operator_cached(p: Perm, d: int) -> np.ndarray:
    n = d**3
    basis = np.eye(n).reshape(d, d, d, n)
    out = permute_sites(basis, p).reshape(n, n)
    out.setflags(write=False)
    return out


def perm_operator(p: PermLike, d: int) -> np.ndarray:
    """The ``d^3 x d^3`` permutation matrix ``V_p`` (read-only, cached)."""
    if d < 2:
        raise ValueError("perm_operator needs d >= 2")
    return _perm_operator_cached(as_perm(p), int(d))


def expansion_to_matrix(mu: Mapping[PermLike, complex], d: int) -> np.ndarray:
    """``sum_p mu[p] V_p`` as a dense matrix."""
    out = np.zeros((d**3, d**3), dtype=complex)
    for p, coeff in mu.items():
        if coeff != 0:
            out += coeff * perm_operator(p, d)
    return out


def is_hermitian_expansion(mu: Mapping[PermLike, complex], atol: float = 1e-12) -> bool:
    full = {as_perm(p): complex(c) for p, c in mu.items()}
    return all(abs(full.get(inverse(p), 0) - np.conj(full.get(p, 0))) <= atol for p in ALL_PERMS)


@lru_cache(maxsize=None)
def _r_operator_cached(k: str, d: int) -> np.ndarray:
    out = expansion_to_matrix(R_COEFFS[k], d)
    if k != "3":
        out = out.real.astype(complex)
    out.setflags(write=False)
    return out


def r_operator(k: str, d: int) -> np.ndarray:
    """R-basis operator ``R_k`` for ``k`` in ``+ - 0 1 2 3``."""
    if k not in R_COEFFS:
        raise ValueError(f"unknown R-basis label {k!r}")
    if d < 2:
        raise ValueError("r_operator needs d >= 2")
    return _r_operator_cached(k, int(d))


def r_operator_trace(k: str, d: int) -> float:
    """Closed-form traces of the projections; zero for the Pauli-like labels."""
    if k == "+":
        return d * (d + 1) * (d + 2) / 6
    if k == "-":
        return d * (d - 1) * (d - 2) / 6
    if k == "0":
        return 2 * d * (d * d - 1) / 3
    if k in ("1", "2", "3"):
        return 0.0
    raise ValueError(f"unknown R-basis label {k!r}")


def r_coords_from_perm_traces(t: Mapping[Perm, complex | np.ndarray]) -> np.ndarray:
    """Combine ``tr(ρ V_p)`` values into ``(r+, r-, r1, r2, r3)``.

    Values may be scalars or equal-length arrays; the coordinate axis is last.
    """
    cols = [sum(c * np.asarray(t[p]) for p, c in R_COEFFS[k].items()).real for k in ("+", "-", "1", "2", "3")]
    return np.stack(cols, axis=-1)


def product_state_r_coords(a, b, c):
    """Twirled coordinates of a pure product state from its Gram overlaps.

    ``a = <φ1|φ2>``, ``b = <φ2|φ3>``, ``c = <φ3|φ1>``. Only ``|a|^2, |b|^2,
    |c|^2`` and the triple product ``abc`` matter. Scalars give a tuple of
    floats; arrays give an ``(..., 5)`` array.
    """
    a, b, c = (np.asarray(v, dtype=complex) for v in (a, b, c))
    a2, b2, c2 = np.abs(a) ** 2, np.abs(b) ** 2, np.abs(c) ** 2
    abc = a * b * c
    r_plus = (1 + a2 + b2 + c2 + 2 * abc.real) / 6
    r_minus = (1 - a2 - b2 - c2 + 2 * abc.real) / 6
    r1 = (2 * b2 - c2 - a2) / 3
    r2 = (a2 - c2) / np.sqrt(3.0)
    r3 = 2 / np.sqrt(3.0) * abc.imag
    out = np.stack([r_plus, r_minus, r1, r2, r3], axis=-1)
    return tuple(float(v) for v in out) if out.ndim == 1 else out


def _coeff_vector(mu: Mapping[Perm, complex]) -> np.ndarray:
    return np.array([mu.get(p, 0) for p in ALL_PERMS], dtype=complex)


@lru_cache(maxsize=None)
def conjugation_action(p: PermLike) -> np.ndarray:
    """3x3 real matrix ``M`` with ``r(V_p ρ V_p^†)[1:4] = M @ r(ρ)[1:4]``.

    Worked out inside the group algebra of S3, so it holds for every ``d``:
    ``V_p^† R_i V_p`` is re-expanded in the basis ``R_1, R_2, R_3``.
    """
    p = as_perm(p)
    pinv = inverse(p)
    basis = np.column_stack([_coeff_vector(R_COEFFS[k]) for k in R_LABELS])
    m = np.zeros((3, 3))
    for row, k in enumerate(("1", "2", "3")):
        # coefficient of V_tau in V_p^† R_k V_p is R_k's coefficient of p tau p^-1
        conj = {tau: R_COEFFS[k].get(compose(compose(p, tau), pinv), 0) for tau in ALL_PERMS}
        sol = np.linalg.solve(basis, _coeff_vector(conj))
        if np.max(np.abs(sol[:3])) > 1e-12 or np.max(np.abs(sol.imag)) > 1e-12:
            raise AssertionError("conjugation left the R1..R3 span")
        m[row] = sol[3:].real
    m.setflags(write=False)
    return m


def all_permutations() -> tuple[Perm, ...]:
    return tuple(tuple(q) for q in permutations(range(3)))  # type: ignore[misc]
