"""Closed-form membership tests for the triseparable, biseparable and PPT sets.

All margin functions accept a :class:`WernerPoint` or an array whose last axis
holds ``(r+, r-, r1, r2, r3)`` and return the smallest slack of the defining
inequalities. A point is inside a set iff its margin is ``>= -tol``; boundary
points count as inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import Tolerances, resolve
from .permutation_algebra import P12, P31, conjugation_action
from .werner_states import WernerPoint, validity_margin

PARTITIONS = (1, 2, 3)
_SQRT3 = math.sqrt(3.0)
# moves the lone site of each partition to site 1
_TO_FIRST = {2: P12, 3: P31}


def _coords(p) -> np.ndarray:
    if isinstance(p, WernerPoint):
        return p.as_array()
    return np.asarray(p, dtype=float)


def _split(x: np.ndarray):
    return x[..., 0], x[..., 1], x[..., 2], x[..., 3], x[..., 4]


def to_first_partition(x: np.ndarray, part: int) -> np.ndarray:
    """Relabel coordinates so that partition ``part|rest`` becomes ``1|23``."""
    if part not in PARTITIONS:
        raise ValueError(f"partition must be one of {PARTITIONS}, got {part!r}")
    x = _coords(x)
    if part == 1:
        return x
    out = np.array(x, dtype=float, copy=True)
    out[..., 2:5] = x[..., 2:5] @ conjugation_action(_TO_FIRST[part]).T
    return out


def ppt_slacks(p) -> tuple[np.ndarray | float, np.ndarray | float]:
    """``(s1, s2)`` for partition 1|23."""
    rp, rm, r1, _, _ = _split(_coords(p))
    return 1 - r1 - 5 * rm - rp, -1 - r1 + rm + 5 * rp


# --- triseparability -------------------------------------------------------


def triseparable_margin(p) -> np.ndarray | float:
    """Slack of the triseparability conditions.

    Write ``h = r+ - r-``. The cubic condition reads::

        (3 r3^2 + (1 - 3r+ - 3r-)^2)(1 - 6r-) <= (r1 + h)((r1 - 2h)^2 - 3 r2^2)

    For a twirled product state with Gram overlaps ``a, b, c`` the three
    linear factors on the right are ``|b|^2``, ``2|c|^2`` and ``2|a|^2``, the
    bracket on the left is ``4|abc|^2`` and ``1 - 6r-`` is one minus the Gram
    determinant. The inequality only describes the set inside the triangle
    where those factors are non-negative (``r1 + h >= 0``,
    ``2h - r1 >= sqrt(3)|r2|``); beyond its vertices the cubic turns positive
    again. ``3 r3^2 <= 4 h^2`` follows from the rest when ``r- < 1/6`` and
    collapses the face ``r- = 1/6`` to the single point ``(1/6, 1/6, 0, 0, 0)``.
    """
    rp, rm, r1, r2, r3 = _split(_coords(p))
    h = rp - rm
    lhs = (3 * r3**2 + (1 - 3 * rp - 3 * rm) ** 2) * (1 - 6 * rm)
    rhs = (r1 + rp - rm) * ((r1 - 2 * rp + 2 * rm) ** 2 - 3 * r2**2)
    parts = [
        rm,
        1 / 6 - rm,
        rp - (1 - 2 * rm) / 4,
        1 - 5 * rm - rp,
        rhs - lhs,
        r1 + h,
        2 * h - r1 - _SQRT3 * np.abs(r2),
        4 * h**2 - 3 * r3**2,
    ]
    return _min(parts)


def is_triseparable(p, tol: Tolerances | None = None) -> bool:
    return bool(triseparable_margin(p) >= -resolve(tol).criterion)


# --- biseparability --------------------------------------------------------


def _bisep_branches(x: np.ndarray):
    rp, rm, r1, r2, r3 = _split(x)
    w = 1 + r1 - rm - 2 * rp
    perp = 3 * (r2**2 + r3**2)
    branch_a = _min([
        w - (3 * rm - 1),
        -w,
        (2 + r1 - 4 * rm - 2 * rp) ** 2 - (1 + 2 * r1 + rm - rp) ** 2 - perp,
    ])
    branch_b = _min([
        w,
        (1 - 3 * rm) - w,
        (r1 + 2 * rm - 2 * rp) ** 2 - (1 - 3 * rm - 3 * rp) ** 2 - perp,
    ])
    return branch_a, branch_b


def biseparable_margin(p, part: int = 1) -> np.ndarray | float:
    x = to_first_partition(_coords(p), part)
    rm = x[..., 1]
    branch_a, branch_b = _bisep_branches(x)
    return _min([rm, 1 / 3 - rm, np.maximum(branch_a, branch_b)])


def is_biseparable(p, part: int = 1, tol: Tolerances | None = None) -> bool:
    return bool(biseparable_margin(p, part) >= -resolve(tol).criterion)


def biseparable_branch(p, part: int = 1, tol: Tolerances | None = None) -> str | None:
    """``"a"``, ``"b"`` or ``None`` depending on which alternative admits ``p``."""
    t = resolve(tol).criterion
    x = to_first_partition(_coords(p), part)
    rm = x[..., 1]
    if min(rm, 1 / 3 - rm) < -t:
        return None
    branch_a, branch_b = _bisep_branches(x)
    if branch_a >= -t:
        return "a"
    if branch_b >= -t:
        return "b"
    return None


# --- positive partial transpose -------------------------------------------


def ppt_margin(p, part: int = 1) -> np.ndarray | float:
    x = to_first_partition(_coords(p), part)
    s1, s2 = ppt_slacks(x)
    return _min([s1, s2, s1 * s2 / 3 - x[..., 3] ** 2 - x[..., 4] ** 2])


def is_ppt(p, part: int = 1, tol: Tolerances | None = None) -> bool:
    return bool(ppt_margin(p, part) >= -resolve(tol).criterion)


# --- classification --------------------------------------------------------


class InclusionChainError(AssertionError):
    pass


@dataclass
class RegionLabel:
    valid: bool
    triseparable: bool
    biseparable: dict[int, bool] = field(default_factory=dict)
    ppt: dict[int, bool] = field(default_factory=dict)

    def category(self, part: int = 1) -> str:
        """Coarsest set containing the point, viewed through partition ``part``."""
        if not self.valid:
            return "invalid"
        if self.triseparable:
            return "triseparable"
        if self.biseparable[part]:
            return "biseparable"
        if self.ppt[part]:
            return "ppt-only"
        return "werner-entangled"

    def check_chain(self) -> None:
        for k in PARTITIONS:
            if self.triseparable and not self.biseparable[k]:
                raise InclusionChainError(f"triseparable but not biseparable for {k}|rest")
            if self.biseparable[k] and not self.ppt[k]:
                raise InclusionChainError(f"biseparable but not PPT for {k}|rest")
            if self.ppt[k] and not self.valid:
                raise InclusionChainError("PPT flag set on an invalid point")

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "triseparable": self.triseparable,
            "biseparable": {f"{k}|rest": v for k, v in self.biseparable.items()},
            "ppt": {f"{k}|rest": v for k, v in self.ppt.items()},
        }


CATEGORIES = ("invalid", "werner-entangled", "ppt-only", "biseparable", "triseparable")


def classify(p, d: int = 3, tol: Tolerances | None = None) -> RegionLabel:
    tol = resolve(tol)
    x = _coords(p)
    valid = bool(validity_margin(WernerPoint.from_array(x), d) >= -tol.criterion)
    if not valid:
        label = RegionLabel(False, False, {k: False for k in PARTITIONS}, {k: False for k in PARTITIONS})
    else:
        label = RegionLabel(
            valid=True,
            triseparable=is_triseparable(x, tol),
            biseparable={k: is_biseparable(x, k, tol) for k in PARTITIONS},
            ppt={k: is_ppt(x, k, tol) for k in PARTITIONS},
        )
    label.check_chain()
    return label


def classify_many(points: np.ndarray, d: int = 3, tol: Tolerances | None = None) -> dict[str, np.ndarray]:
    """Vectorised flags for an ``(n, 5)`` array: keys ``valid``, ``trisep``,
    ``bisep1..3`` and ``ppt1..3``, all gated by validity."""
    t = resolve(tol).criterion
    x = np.atleast_2d(np.asarray(points, dtype=float))
    rp, rm, r1, r2, r3 = _split(x)
    r0 = 1 - rp - rm
    valid = _min([rp, rm, r0, r0**2 - r1**2 - r2**2 - r3**2]) >= -t
    if d == 2:
        valid &= np.abs(rm) <= t
    out = {"valid": valid, "trisep": valid & (triseparable_margin(x) >= -t)}
    for k in PARTITIONS:
        out[f"bisep{k}"] = valid & (biseparable_margin(x, k) >= -t)
        out[f"ppt{k}"] = valid & (ppt_margin(x, k) >= -t)
    return out


# --- projection of the biseparable set onto the permutation-invariant plane --


def _sublevel(a: float, b: float, c: float) -> list[tuple[float, float]]:
    """Intervals where ``a r^2 + b r + c <= 0``."""
    inf = math.inf
    if abs(a) < 1e-15:
        if abs(b) < 1e-15:
            return [(-inf, inf)] if c <= 0 else []
        root = -c / b
        return [(-inf, root)] if b > 0 else [(root, inf)]
    disc = b * b - 4 * a * c
    if disc < 0:
        return [] if a > 0 else [(-inf, inf)]
    s = math.sqrt(disc)
    lo, hi = sorted(((-b - s) / (2 * a), (-b + s) / (2 * a)))
    if a > 0:
        return [(lo, hi)]
    return [(-inf, lo), (hi, inf)]


def _diff_of_squares(alpha, beta, gamma, delta):
    """Coefficients of ``(alpha r + beta)^2 - (gamma r + delta)^2``."""
    return alpha**2 - gamma**2, 2 * (alpha * beta - gamma * delta), beta**2 - delta**2


def biseparable_projection_witness(
    r_plus: float, r_minus: float, part: int = 1, tol: Tolerances | None = None
) -> WernerPoint | None:
    """A biseparable point over ``(r+, r-)``, or ``None`` if there is none.

    Only ``r2^2 + r3^2`` enters the biseparability inequalities and always on
    the restrictive side, so ``r2 = r3 = 0`` is optimal and the search over the
    Bloch ball reduces to an exact interval computation in ``r1``. Relabeling
    maps the ball onto itself, so the answer is the same for every partition.
    """
    if part not in PARTITIONS:
        raise ValueError(f"partition must be one of {PARTITIONS}")
    t = resolve(tol).criterion
    rp, rm = float(r_plus), float(r_minus)
    r0 = 1 - rp - rm
    if min(rp, rm, r0) < -t or rm > 1 / 3 + t:
        return None
    ball = (-max(r0, 0.0) - t, max(r0, 0.0) + t)
    # window on w = 1 + r1 - r- - 2r+ rewritten for r1
    windows = {
        "a": (3 * rm - 1 - (1 - rm - 2 * rp) - t, -(1 - rm - 2 * rp) + t),
        "b": (-(1 - rm - 2 * rp) - t, (1 - 3 * rm) - (1 - rm - 2 * rp) + t),
    }
    quads = {
        "a": _diff_of_squares(2.0, 1 + rm - rp, 1.0, 2 - 4 * rm - 2 * rp),
        "b": _diff_of_squares(0.0, 1 - 3 * rm - 3 * rp, 1.0, 2 * rm - 2 * rp),
    }
    for key in ("b", "a"):
        lo = max(ball[0], windows[key][0])
        hi = min(ball[1], windows[key][1])
        if lo > hi:
            continue
        qa, qb, qc = quads[key]
        for ilo, ihi in _sublevel(qa, qb, qc - t):
            a, b = max(lo, ilo), min(hi, ihi)
            if a <= b:
                r1 = 0.0 if a <= 0.0 <= b else (a if abs(a) < abs(b) else b)
                r1 = min(max(r1, -r0), r0) if r0 >= 0 else 0.0
                candidate = WernerPoint(rp, rm, r1, 0.0, 0.0)
                if biseparable_margin(candidate, 1) >= -t:
                    return candidate
                return WernerPoint(rp, rm, (a + b) / 2, 0.0, 0.0)
    return None


def biseparable_projection_test(r_plus: float, r_minus: float, part: int = 1, tol: Tolerances | None = None) -> bool:
    return biseparable_projection_witness(r_plus, r_minus, part, tol) is not None


# --- region maps ------------------------------------------------------------


def region_map_figure1(resolution: int, tol: Tolerances | None = None) -> list[dict]:
    """Grid over the triangle ``r+, r- >= 0, r+ + r- <= 1``.

    Rows are ordered by ``r+`` then ``r-``. Flags: ``trisep`` and ``bisep_wp``
    for the permutation-invariant point itself, ``bisep_projection`` when some
    Bloch vector over the cell makes the state biseparable.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    n = resolution - 1
    rows = []
    for i in range(resolution):
        for j in range(resolution - i):
            p = WernerPoint(i / n, j / n, 0.0, 0.0, 0.0)
            rows.append(
                {
                    "r_plus": p.r_plus,
                    "r_minus": p.r_minus,
                    "trisep": is_triseparable(p, tol),
                    "bisep_wp": is_biseparable(p, 1, tol),
                    "bisep_projection": biseparable_projection_test(p.r_plus, p.r_minus, 1, tol),
                }
            )
    return rows


def region_map_figure2(
    r_plus: float, r_minus: float, resolution: int, d: int = 3, part: int = 1, tol: Tolerances | None = None
) -> list[dict]:
    """Labels on a ``resolution^3`` grid over ``[-r0, r0]^3`` (row-major in r1, r2, r3)."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    r0 = 1 - r_plus - r_minus
    if min(r_plus, r_minus, r0) < 0:
        raise ValueError(f"({r_plus}, {r_minus}) is outside the triangle")
    axis = np.linspace(-r0, r0, resolution)
    g1, g2, g3 = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.column_stack(
        [np.full(g1.size, r_plus), np.full(g1.size, r_minus), g1.ravel(), g2.ravel(), g3.ravel()]
    )
    flags = classify_many(pts, d, tol)
    labels = np.full(len(pts), "werner-entangled", dtype=object)
    labels[flags[f"ppt{part}"]] = "ppt-only"
    labels[flags[f"bisep{part}"]] = "biseparable"
    labels[flags["trisep"]] = "triseparable"
    labels[~flags["valid"]] = "invalid"
    return [
        {"r1": float(x[2]), "r2": float(x[3]), "r3": float(x[4]), "label": str(lab)}
        for x, lab in zip(pts, labels)
    ]


def _min(parts):
    out = parts[0]
    for q in parts[1:]:
        out = np.minimum(out, q)
    return out
