"""Brute-force checks that do not rely on the closed-form criteria.

* :func:`ppt_oracle` builds the density matrix, partially transposes it and
  looks at the spectrum.
* The inner oracles certify membership by writing the target as a convex
  combination of twirled product (or biproduct) states. A positive answer is
  a proof; a negative one is inconclusive.

The convex-combination search is a small phase-one simplex written here so
that the oracle shares no code with what it checks. When the random
generators are not enough, the Farkas vector of the infeasible LP gives a
direction in which to look for a better product state (column generation).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .config import Tolerances, resolve
from .permutation_algebra import product_state_r_coords, r_operator, r_operator_trace
from .tensor_core import SeedLike, as_rng, kron_all, partial_transpose, random_pure_states
from .werner_states import (
    InvalidStateError,
    WernerPoint,
    is_valid_state,
    point_to_density_matrix,
    points_to_density_matrices,
    pure_states_points,
)

log = logging.getLogger(__name__)

_COORD_LABELS = ("+", "-", "1", "2", "3")


# --- PPT by eigenvalues -----------------------------------------------------


def ppt_min_eigenvalue(p: WernerPoint, d: int, part: int = 1, tol: Tolerances | None = None) -> float:
    """Smallest eigenvalue of the partial transpose on site ``part``."""
    if not is_valid_state(p, d, tol):
        raise InvalidStateError(f"{p} is not a state for d={d}")
    rho = point_to_density_matrix(p, d, tol)
    pt = partial_transpose(rho, (d, d, d), part - 1)
    return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])


def ppt_oracle(p: WernerPoint, d: int, part: int = 1, tol: Tolerances | None = None) -> bool:
    return ppt_min_eigenvalue(p, d, part, tol) >= -resolve(tol).spectral


def ppt_min_eigenvalues(points: np.ndarray, d: int, part: int = 1, chunk: int = 1024) -> np.ndarray:
    """Batched :func:`ppt_min_eigenvalue` for an ``(n, 5)`` array (no validity check)."""
    points = np.atleast_2d(points)
    D = d**3
    out = np.empty(len(points))
    axes = [0, 1, 2, 3, 4, 5, 6]
    axes[part], axes[part + 3] = axes[part + 3], axes[part]
    for start in range(0, len(points), chunk):
        rhos = points_to_density_matrices(points[start : start + chunk], d)
        m = len(rhos)
        pt = rhos.reshape((m,) + (d,) * 6).transpose(axes).reshape(m, D, D)
        out[start : start + m] = np.linalg.eigvalsh(0.5 * (pt + np.conj(pt.transpose(0, 2, 1))))[:, 0]
    return out


# --- product states and decompositions -------------------------------------


@dataclass
class ProductState:
    """Pure product vector.

    ``factors`` holds three single-site vectors (fully product) or a
    single-site vector and a two-site vector (biproduct); in the latter case
    ``lone_site`` says which site the first factor sits on.
    """

    factors: tuple[np.ndarray, ...]
    lone_site: int = 1

    @property
    def is_biproduct(self) -> bool:
        return len(self.factors) == 2

    @property
    def d(self) -> int:
        return len(self.factors[0])

    def vector(self) -> np.ndarray:
        d = self.d
        if not self.is_biproduct:
            return kron_all(*self.factors)
        t = np.multiply.outer(self.factors[0], self.factors[1].reshape(d, d))
        return np.moveaxis(t, 0, self.lone_site - 1).reshape(-1)

    def point(self) -> WernerPoint:
        return WernerPoint.from_array(pure_states_points(self.vector()[None, :], self.d)[0])

    def to_dict(self) -> dict:
        return {
            "kind": "biproduct" if self.is_biproduct else "product",
            "lone_site": self.lone_site,
            "factors": [_interleave(f) for f in self.factors],
        }


def _interleave(v: np.ndarray) -> list[float]:
    v = np.asarray(v, dtype=complex)
    return np.column_stack([v.real, v.imag]).ravel().tolist()


@dataclass
class SeparableDecomposition:
    weights: np.ndarray
    atoms: list[ProductState] = field(default_factory=list)

    def point(self) -> WernerPoint:
        pts = np.array([a.point().as_array() for a in self.atoms])
        return WernerPoint.from_array(self.weights @ pts)

    def to_json(self) -> str:
        return json.dumps({"weights": [float(w) for w in self.weights], "atoms": [a.to_dict() for a in self.atoms]})


# --- phase-one simplex ------------------------------------------------------


@dataclass
class _LPResult:
    feasible: bool
    weights: np.ndarray
    residual: float
    farkas: np.ndarray  # y with y @ [g; 1] <= 0 on generators and > 0 on the target


def _phase_one(
    a: np.ndarray, b: np.ndarray, eps: float = 1e-12, pivot_tol: float = 1e-9, max_iter: int = 10000
) -> tuple[np.ndarray, float, np.ndarray]:
    """Minimise ``sum(art)`` subject to ``a x + art = b``, ``x, art >= 0``.

    Returns ``(x, objective, y)`` where ``y`` are the duals of the equality rows.
    """
    # rows that vanish identically (r- at d = 2) only leave a degenerate
    # artificial in the basis; solve without them and give them zero dual
    live = (np.abs(a).max(axis=1) > eps) | (np.abs(b) > eps)
    if not live.all():
        x, obj, y_live = _phase_one(a[live], b[live], eps, pivot_tol, max_iter)
        y = np.zeros(len(b))
        y[live] = y_live
        return x, obj + float(np.abs(b[~live]).sum()), y
    m, n = a.shape
    sign = np.where(b < 0, -1.0, 1.0)
    a = a * sign[:, None]
    b = b * sign
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -a.sum(axis=0)
    tab[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    bland = False
    stall, best = 0, np.inf
    blocked = np.zeros(n + m, dtype=bool)
    for _ in range(max_iter):
        cost = np.where(blocked, 0.0, tab[m, :-1])
        if bland:
            cand = np.flatnonzero(cost < -eps)
            if cand.size == 0:
                break
            j = int(cand[0])
        else:
            j = int(np.argmin(cost))
            if cost[j] >= -eps:
                break
        col = tab[:m, j]
        pos = col > pivot_tol
        if not pos.any():
            blocked[j] = True  # no safe pivot in this column right now
            continue
        ratios = np.full(m, np.inf)
        ratios[pos] = np.maximum(tab[:m, -1][pos], 0.0) / col[pos]
        rmin = ratios.min()
        ties = np.flatnonzero(ratios <= rmin + 1e-12)
        if bland:
            i = int(min(ties, key=lambda r: basis[r]))
        else:
            i = int(ties[np.argmax(col[ties])])
        tab[i] /= tab[i, j]
        for r in range(m + 1):
            if r != i and tab[r, j] != 0:
                tab[r] -= tab[r, j] * tab[i]
        basis[i] = j
        blocked[:] = False
        obj = -tab[m, -1]
        if obj < best - 1e-15:
            best, stall = obj, 0
        else:
            stall += 1
            if stall > 50:
                bland = True
    x = np.zeros(n + m)
    for r, var in enumerate(basis):
        x[var] = tab[r, -1]
    y = (1.0 - tab[m, n : n + m]) * sign
    return x[:n], max(-tab[m, -1], 0.0), y


def _solve_hull(target: np.ndarray, generators: np.ndarray, tol: float) -> _LPResult:
    g = np.atleast_2d(np.asarray(generators, dtype=float))
    a = np.vstack([g.T, np.ones(len(g))])
    b = np.append(np.asarray(target, dtype=float), 1.0)
    x, obj, y = _phase_one(a, b)
    w = np.clip(x, 0, None)
    if w.sum() > 0:
        w = w / w.sum()
    residual = float(np.linalg.norm(g.T @ w - b[:-1])) if w.sum() > 0 else np.inf
    return _LPResult(obj <= tol and residual <= tol, w, residual, y)


def hull_decomposition(target, generators, tol: Tolerances | None = None) -> np.ndarray | None:
    """Convex weights ``w`` with ``w @ generators == target``, or ``None``."""
    res = _solve_hull(_as_coords(target), _as_matrix(generators), resolve(tol).hull)
    return res.weights if res.feasible else None


def hull_membership(target, generators, tol: Tolerances | None = None) -> bool:
    if len(generators) == 0:
        raise ValueError("need at least one generator")
    return hull_decomposition(target, generators, tol) is not None


def _as_coords(p) -> np.ndarray:
    return p.as_array() if isinstance(p, WernerPoint) else np.asarray(p, dtype=float)


def _as_matrix(gens) -> np.ndarray:
    if len(gens) and isinstance(gens[0], WernerPoint):
        return np.array([g.as_array() for g in gens])
    return np.atleast_2d(np.asarray(gens, dtype=float))


# --- samplers ---------------------------------------------------------------


def random_product_triples(n: int, d: int, seed: SeedLike = None) -> np.ndarray:
    """``(n, 3, d)`` Haar-random single-site vectors."""
    return random_pure_states(3 * n, d, seed).reshape(n, 3, d)


def triple_r_coords(triples: np.ndarray) -> np.ndarray:
    """Twirled coordinates of ``(n, 3, d)`` product triples via their Gram overlaps."""
    triples = np.asarray(triples)
    a = np.einsum("ni,ni->n", triples[:, 0].conj(), triples[:, 1])
    b = np.einsum("ni,ni->n", triples[:, 1].conj(), triples[:, 2])
    c = np.einsum("ni,ni->n", triples[:, 2].conj(), triples[:, 0])
    out = np.asarray(product_state_r_coords(a, b, c)).reshape(-1, 5)
    if triples.shape[-1] == 2:
        out[:, 1] = 0.0  # the Gram determinant of three qubit vectors vanishes
    return out


def sample_trisep_inner(n: int, d: int = 3, seed: SeedLike = None) -> list[WernerPoint]:
    """Twirls of ``n`` random pure product states."""
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    return [WernerPoint.from_array(x) for x in triple_r_coords(random_product_triples(n, d, seed))]


def random_biproducts(n: int, d: int, seed: SeedLike = None, lone_site: int = 1) -> list[ProductState]:
    rng = as_rng(seed)
    phi1 = random_pure_states(n, d, rng)
    phi23 = random_pure_states(n, d * d, rng)
    return [ProductState((phi1[i], phi23[i]), lone_site) for i in range(n)]


def biproduct_points(states: list[ProductState]) -> np.ndarray:
    if not states:
        return np.zeros((0, 5))
    d = states[0].d
    return pure_states_points(np.array([s.vector() for s in states]), d)


def sample_bisep_inner(n: int, d: int = 3, seed: SeedLike = None, part: int = 1) -> list[WernerPoint]:
    """Twirls of ``n`` random pure biproduct states ``φ_part ⊗ φ_rest``."""
    return [WernerPoint.from_array(x) for x in biproduct_points(random_biproducts(n, d, seed, part))]


# --- column generation ------------------------------------------------------


def _direction_operator(y: np.ndarray, d: int) -> np.ndarray:
    return sum(y[i] * r_operator(k, d) for i, k in enumerate(_COORD_LABELS))


def _best_biproduct(y: np.ndarray, d: int, part: int) -> ProductState:
    """Biproduct maximising ``y . r``; exact, since the lone vector can be
    rotated to ``e_0`` without changing the twirled coordinates."""
    h = _direction_operator(y, d).reshape((d,) * 6)
    idx = [slice(None)] * 6
    idx[part - 1] = 0
    idx[part - 1 + 3] = 0
    block = h[tuple(idx)].reshape(d * d, d * d)
    _, vecs = np.linalg.eigh(0.5 * (block + block.conj().T))
    e0 = np.zeros(d, dtype=complex)
    e0[0] = 1
    return ProductState((e0, vecs[:, -1]), part)


def _best_product(y: np.ndarray, d: int, rng: np.random.Generator, restarts: int = 6, sweeps: int = 2000) -> ProductState:
    """Product state approximately maximising ``y . r`` by alternating eigen-steps."""
    h = _direction_operator(y, d).reshape((d,) * 6)
    best, best_val = None, -np.inf
    for _ in range(restarts):
        phis = list(random_pure_states(3, d, rng))
        val = prev = -np.inf
        for _ in range(sweeps):
            for site in range(3):
                # reduce <Ψ|H|Ψ> to a d x d form in the vector at `site`
                spec, ops = "abcABC", []
                for k in range(3):
                    if k != site:
                        spec += f",{'abc'[k]},{'ABC'[k]}"
                        ops += [phis[k].conj(), phis[k]]
                m = np.einsum(f"{spec}->{'abc'[site]}{'ABC'[site]}", h, *ops)
                w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
                phis[site] = v[:, -1]
                val = w[-1]
            if val - prev <= 1e-15 * max(1.0, abs(val)):
                break
            prev = val
        if val > best_val:
            best, best_val = phis, val
    return ProductState(tuple(best))


def _overlap_direction(target: np.ndarray, d: int) -> np.ndarray:
    """``y`` with ``y . (r, 1) = tr(rho_target rho_r)``.

    The product state maximising the Hilbert-Schmidt overlap with the target is
    the natural first guess; when the target is itself a twirled pure state it
    is the target's own atom, which random sampling never hits exactly.
    """
    tp, tm, t1, t2, t3 = target
    t0 = 1.0 - tp - tm
    n_plus, n_zero = r_operator_trace("+", d), r_operator_trace("0", d)
    n_minus = r_operator_trace("-", d) if d > 2 else np.inf
    return np.array(
        [tp / n_plus - t0 / n_zero, tm / n_minus - t0 / n_zero, t1 / n_zero, t2 / n_zero, t3 / n_zero, t0 / n_zero]
    )


def _certify(
    target: np.ndarray,
    atoms: list[ProductState],
    points: np.ndarray,
    pricing,
    tol: Tolerances,
    max_rounds: int,
    d: int,
) -> SeparableDecomposition | None:
    pts = np.array(points, dtype=float)
    if max_rounds > 0:
        seed_atom = pricing(_overlap_direction(target, d)[:5])
        atoms = atoms + [seed_atom]
        pts = np.vstack([pts, seed_atom.point().as_array()])
    for _ in range(max_rounds + 1):
        res = _solve_hull(target, pts, tol.hull)
        if res.feasible:
            keep = res.weights > 0
            return SeparableDecomposition(res.weights[keep], [a for a, k in zip(atoms, keep) if k])
        if max_rounds == 0:
            break
        y = res.farkas
        new = pricing(y[:5])
        new_pt = new.point().as_array()
        gain = float(y[:5] @ new_pt + y[5])
        if gain <= 1e-13:
            log.debug("pricing found no improving product state (gain %.3g)", gain)
            break
        atoms.append(new)
        pts = np.vstack([pts, new_pt])
        max_rounds -= 1
    return None


def trisep_certificate(
    target, n: int = 2000, d: int = 3, seed: SeedLike = None, refine_rounds: int = 300, tol: Tolerances | None = None
) -> SeparableDecomposition | None:
    """Decomposition of ``target`` into twirled product states, if one is found."""
    tol = resolve(tol)
    rng = as_rng(seed)
    triples = random_product_triples(n, d, rng)
    atoms = [ProductState(tuple(t)) for t in triples]
    return _certify(
        _as_coords(target), atoms, triple_r_coords(triples), lambda y: _best_product(y, d, rng), tol, refine_rounds, d
    )


def trisep_inner_oracle(target, n: int = 2000, d: int = 3, seed: SeedLike = None, refine_rounds: int = 300, tol: Tolerances | None = None) -> bool:
    return trisep_certificate(target, n, d, seed, refine_rounds, tol) is not None


def bisep_certificate(
    target,
    n: int = 2000,
    d: int = 3,
    seed: SeedLike = None,
    part: int = 1,
    refine_rounds: int = 300,
    tol: Tolerances | None = None,
) -> SeparableDecomposition | None:
    """Decomposition of ``target`` into twirled ``part|rest`` biproducts, if found."""
    tol = resolve(tol)
    atoms = random_biproducts(n, d, seed, part)
    return _certify(
        _as_coords(target), atoms, biproduct_points(atoms), lambda y: _best_biproduct(y, d, part), tol, refine_rounds, d
    )


def bisep_inner_oracle(
    target,
    n: int = 2000,
    d: int = 3,
    seed: SeedLike = None,
    part: int = 1,
    refine_rounds: int = 300,
    tol: Tolerances | None = None,
) -> bool:
    return bisep_certificate(target, n, d, seed, part, refine_rounds, tol) is not None


# --- gallery ----------------------------------------------------------------


@dataclass(frozen=True)
class GalleryEntry:
    point: WernerPoint
    min_dim: int
    vector: tuple[tuple[complex, str], ...] | None = None
    product: tuple[tuple[float, ...], ...] | None = None

    def state_vector(self, d: int | None = None) -> np.ndarray | None:
        """The generating vector embedded in ``(C^d)^⊗3``; basis labels start at 1."""
        d = self.min_dim if d is None else d
        if d < self.min_dim:
            raise ValueError(f"needs d >= {self.min_dim}")
        if self.product is not None:
            vecs = []
            for f in self.product:
                v = np.zeros(d, dtype=complex)
                v[: len(f)] = f
                vecs.append(v)
            return kron_all(*vecs)
        if self.vector is None:
            return None
        out = np.zeros(d**3, dtype=complex)
        for amp, label in self.vector:
            i, j, k = (int(ch) - 1 for ch in label)
            out[(i * d + j) * d + k] += amp
        return out / np.linalg.norm(out)


_R3 = np.sqrt(3.0)


def gallery() -> dict[str, GalleryEntry]:
    """Named reference points with the pure states that twirl onto them."""
    c120, s120 = np.cos(2 * np.pi / 3), np.sin(2 * np.pi / 3)
    return {
        "A": GalleryEntry(WernerPoint(1 / 6, 1 / 6, 0, 0, 0), 3, ((1, "123"),)),
        "B": GalleryEntry(WernerPoint(1, 0, 0, 0, 0), 2, ((1, "111"),)),
        "C": GalleryEntry(
            WernerPoint(1 / 4, 0, 0, 0, 0), 2, product=((1.0, 0.0), (c120, s120), (c120, -s120))
        ),
        "D": GalleryEntry(WernerPoint(1 / 3, 0, 2 / 3, 0, 0), 2, ((1, "122"),)),
        "E": GalleryEntry(WernerPoint(0, 0, -1, 0, 0), 2, ((1, "112"), (-1, "121"))),
        "F": GalleryEntry(WernerPoint(0, 1 / 3, -2 / 3, 0, 0), 3, ((1, "123"), (-1, "132"))),
        "G": GalleryEntry(WernerPoint(1 / 5, 0, 0, 0, 0), 2, ((1, "112"), (-1, "121"), (-_R3, "122"))),
    }
