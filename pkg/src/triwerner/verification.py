"""Self-checks run by ``triwerner verify``.

Each suite returns a list of :class:`Check` records; nothing here raises on a
failed check, the caller decides what to do with the summary.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import oracles
from .config import Tolerances, resolve
from .permutation_algebra import (
    ALL_PERMS,
    R_LABELS,
    compose,
    conjugation_action,
    n_cycles,
    perm_operator,
    r_operator,
)
from .separability import (
    PARTITIONS,
    biseparable_margin,
    classify_many,
    ppt_margin,
    ppt_slacks,
    to_first_partition,
    triseparable_margin,
)
from .tensor_core import SeedLike, as_rng
from .werner_states import (
    WernerPoint,
    density_matrix_to_point,
    point_to_density_matrix,
    pure_states_points,
    relabel_partition,
    sample_valid_points,
    twirl_monte_carlo,
)

SUITES = ("algebra", "twirl", "criteria", "oracles", "hyperplanes")


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _check(name: str, value: float, threshold: float, detail: str = "", at_least: bool = False) -> Check:
    ok = value >= threshold if at_least else value <= threshold
    return Check(name, bool(ok), float(value), float(threshold), detail)


def algebra_suite(d: int, tol: Tolerances | None = None, **_) -> list[Check]:
    tol = resolve(tol)
    R = {k: r_operator(k, d) for k in R_LABELS}
    eye = np.eye(d**3)
    dev = lambda m: float(np.max(np.abs(m)))  # noqa: E731
    checks = [
        _check("projections sum to identity", dev(R["+"] + R["-"] + R["0"] - eye), tol.structural),
        _check(
            "projections idempotent and orthogonal",
            max(
                max(dev(R[k] @ R[k] - R[k]) for k in "+-0"),
                dev(R["+"] @ R["-"]),
                dev(R["+"] @ R["0"]),
                dev(R["-"] @ R["0"]),
            ),
            tol.structural,
        ),
        _check("R_i^2 = R_0", max(dev(R[k] @ R[k] - R["0"]) for k in "123"), tol.structural),
        _check(
            "R1 R2 = i R3 and cyclic",
            max(dev(R["1"] @ R["2"] - 1j * R["3"]), dev(R["2"] @ R["3"] - 1j * R["1"]), dev(R["3"] @ R["1"] - 1j * R["2"])),
            tol.structural,
        ),
        _check(
            "R_i annihilate R_+ and R_-",
            max(dev(R[i] @ R[k]) for i in "123" for k in "+-"),
            tol.structural,
        ),
    ]
    if d == 2:
        checks.append(_check("R_- vanishes for qubits", dev(R["-"]), tol.structural))
    checks.append(
        _check(
            "group law V_p V_q = V_pq",
            max(dev(perm_operator(p, d) @ perm_operator(q, d) - perm_operator(compose(p, q), d)) for p in ALL_PERMS for q in ALL_PERMS),
            tol.structural,
        )
    )
    checks.append(
        _check(
            "trace of V_p is d^cycles",
            max(abs(np.trace(perm_operator(p, d)) - d ** n_cycles(p)) for p in ALL_PERMS),
            tol.structural,
        )
    )
    worst = 0.0
    for p in ALL_PERMS:
        v = perm_operator(p, d)
        for row, k in enumerate("123"):
            lhs = v.conj().T @ R[k] @ v
            rhs = sum(conjugation_action(p)[row, j] * R[kk] for j, kk in enumerate("123"))
            worst = max(worst, dev(lhs - rhs))
    checks.append(_check("relabeling table matches conjugation", worst, 1e3 * tol.structural))
    return checks


def twirl_suite(d: int, seed: SeedLike = 0, samples: int = 200, tol: Tolerances | None = None, **_) -> list[Check]:
    tol = resolve(tol)
    rng = as_rng(seed)
    pts = sample_valid_points(samples, d, rng)
    worst = 0.0
    for x in pts:
        p = WernerPoint.from_array(x)
        back = density_matrix_to_point(point_to_density_matrix(p, d), d)
        worst = max(worst, float(np.max(np.abs(back.as_array() - x))))
    checks = [_check("coordinates round-trip through the matrix", worst, 1e3 * tol.structural)]
    mc_worst, exact_worst = 0.0, 0.0
    for name, entry in oracles.gallery().items():
        if entry.min_dim > d:
            continue
        vec = entry.state_vector(d)
        rho = np.outer(vec, vec.conj())
        exact = density_matrix_to_point(rho, d)
        exact_worst = max(exact_worst, float(np.max(np.abs(exact.as_array() - entry.point.as_array()))))
        mc = twirl_monte_carlo(rho, d, 2000, rng)
        mc_worst = max(mc_worst, float(np.linalg.norm(mc - point_to_density_matrix(exact, d), 2)))
    checks.append(_check("gallery vectors twirl onto their coordinates", exact_worst, tol.structural * 10))
    checks.append(_check("Monte-Carlo twirl of gallery vectors (2000 samples)", mc_worst, 5e-2))
    return checks


def criteria_suite(d: int, seed: SeedLike = 0, samples: int = 20000, tol: Tolerances | None = None, **_) -> list[Check]:
    tol = resolve(tol)
    rng = as_rng(seed)
    pts = sample_valid_points(samples, d, rng)
    f = classify_many(pts, d, tol)
    chain = 0
    for k in PARTITIONS:
        chain += int(np.sum(f["trisep"] & ~f[f"bisep{k}"]) + np.sum(f[f"bisep{k}"] & ~f[f"ppt{k}"]))
    checks = [_check("inclusion chain T ⊂ B_k ⊂ P_k", chain, 0)]

    covariance = 0
    for s in ALL_PERMS:
        moved = pts.copy()
        moved[:, 2:] = pts[:, 2:] @ conjugation_action(s).T
        for k in PARTITIONS:
            a = biseparable_margin(pts, k) >= -tol.criterion
            b = biseparable_margin(moved, relabel_partition(k, s)) >= -tol.criterion
            band = np.abs(biseparable_margin(pts, k)) < tol.band
            covariance += int(np.sum((a != b) & ~band))
    checks.append(_check("biseparability covariant under relabeling", covariance, 0))

    x = to_first_partition(pts, 1)
    rp, rm, r1, r2, r3 = x.T
    window = (1 + r1 - rm - 2 * rp >= 0) & (1 + r1 - rm - 2 * rp <= 1 - 3 * rm)
    q_b = (r1 + 2 * rm - 2 * rp) ** 2 - (1 - 3 * rm - 3 * rp) ** 2 - 3 * (r2**2 + r3**2)
    s1, s2 = ppt_slacks(x)
    q_c = s1 * s2 / 3 - r2**2 - r3**2
    mismatch = window & ((q_b >= 0) != (q_c >= 0)) & (np.abs(q_c) > tol.band)
    checks.append(_check("branch-(b) quadric equals the PPT quadric", int(mismatch.sum()), 0))

    if d >= 3:
        strict = f["ppt1"] & ~f["bisep1"] & (pts[:, 1] > 0) & (np.hypot(pts[:, 3], pts[:, 4]) > 0)
        checks.append(_check("P_1 \\ B_1 witness found", int(strict.sum()), 1, at_least=True))
    bt = f["bisep1"] & f["bisep2"] & f["bisep3"] & ~f["trisep"]
    checks.append(_check("B_1 ∩ B_2 ∩ B_3 \\ T witness found", int(bt.sum()), 1, at_least=True))

    other = 4 if d == 3 else 3
    g = classify_many(pts, other, tol)
    h = classify_many(pts, d, tol)
    diff = sum(int(np.sum(g[key] != h[key])) for key in h)
    checks.append(_check(f"classification identical for d={d} and d={other}", diff, 0))
    return checks


def oracles_suite(d: int, seed: SeedLike = 0, samples: int = 2000, tol: Tolerances | None = None, **_) -> list[Check]:
    tol = resolve(tol)
    rng = as_rng(seed)
    pts = sample_valid_points(samples, d, rng)
    disagree = 0
    for k in PARTITIONS:
        eig = oracles.ppt_min_eigenvalues(pts, d, k)
        margin = ppt_margin(pts, k)
        mismatch = ((eig >= -tol.spectral) != (margin >= -tol.criterion)) & (np.abs(margin) > tol.band)
        disagree += int(mismatch.sum())
    checks = [_check("PPT criterion agrees with partial-transpose spectrum", disagree, 0)]

    triples = oracles.random_product_triples(samples, d, rng)
    prod = oracles.triple_r_coords(triples)
    checks.append(_check("twirled product states are triseparable", int(np.sum(triseparable_margin(prod) < -tol.criterion)), 0))
    bis = oracles.biproduct_points(oracles.random_biproducts(samples, d, rng))
    checks.append(_check("twirled biproducts are biseparable", int(np.sum(biseparable_margin(bis, 1) < -tol.criterion)), 0))

    direct = pure_states_points(np.einsum("ni,nj,nk->nijk", triples[:, 0], triples[:, 1], triples[:, 2]).reshape(samples, -1), d)
    checks.append(_check("Gram-overlap coordinates match direct traces", float(np.max(np.abs(direct - prod))), 1e3 * tol.structural))

    # extreme points are certified in their native dimension; at larger d the
    # exact atom is a measure-zero target, so there we certify a point pulled
    # slightly toward the interior instead
    missed = []
    centre = np.array([0.27, 0.1, 0.0, 0.0, 0.0])
    for name, entry in oracles.gallery().items():
        if entry.min_dim > d:
            continue
        targets = [(entry.point.as_array(), entry.min_dim)]
        if d >= 3:
            targets.append((entry.point.as_array() + 1e-3 * (centre - entry.point.as_array()), d))
        for target, dim in targets:
            if name in "ABCD" and oracles.trisep_certificate(target, 500, dim, rng) is None:
                missed.append(f"{name}/T/d={dim}")
            if oracles.bisep_certificate(target, 500, dim, rng) is None:
                missed.append(f"{name}/B1/d={dim}")
    checks.append(_check("gallery points certified by decompositions", len(missed), 0, ",".join(missed)))
    return checks


def hyperplanes_suite(d: int, seed: SeedLike = 0, samples: int = 10000, tol: Tolerances | None = None, **_) -> list[Check]:
    tol = resolve(tol)
    rng = as_rng(seed)
    out = []
    for name, pts in hyperplane_samples(samples, rng).items():
        bm, pm = biseparable_margin(pts, 1), ppt_margin(pts, 1)
        mismatch = ((bm >= -tol.criterion) != (pm >= -tol.criterion)) & (np.abs(bm) > tol.band) & (np.abs(pm) > tol.band)
        out.append(_check(f"B_1 = P_1 on {name}", int(mismatch.sum()), 0))
    return out


def hyperplane_samples(n: int, seed: SeedLike = 0) -> dict[str, np.ndarray]:
    """Valid points on ``r- = 0`` and on ``r2 = r3 = 0``."""
    rng = as_rng(seed)
    qubit = sample_valid_points(n, 2, rng)
    sym = sample_valid_points(n, 3, rng)
    sym[:, 3:] = 0.0
    return {"r- = 0": qubit, "r2 = r3 = 0": sym}


_RUNNERS = {
    "algebra": algebra_suite,
    "twirl": twirl_suite,
    "criteria": criteria_suite,
    "oracles": oracles_suite,
    "hyperplanes": hyperplanes_suite,
}


def run_suite(name: str, d: int = 3, seed: SeedLike = 0, samples: int | None = None, tol: Tolerances | None = None) -> dict:
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in _RUNNERS:
            raise ValueError(f"unknown suite {n!r}")
    report = {"suite": name, "d": d, "seed": seed, "suites": {}}
    for n in names:
        kwargs = {"d": d, "seed": seed, "tol": tol}
        if samples is not None:
            kwargs["samples"] = samples
        report["suites"][n] = [c.to_dict() for c in _RUNNERS[n](**kwargs)]
    report["passed"] = all(c["passed"] for cs in report["suites"].values() for c in cs)
    return report

