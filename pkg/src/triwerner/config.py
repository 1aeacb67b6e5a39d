"""Numerical tolerances shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance record.

    Attributes:
        structural: exact algebraic identities, Hermiticity, unit norms.
        spectral: eigenvalue positivity and trace checks.
        criterion: slack for the closed-form membership inequalities.
        hull: residual below which a convex combination counts as found.
        band: margin below which criterion/oracle disagreement is tolerated.
        mc_sigma: number of standard errors allowed in Monte-Carlo checks.
    """

    structural: float = 1e-12
    spectral: float = 1e-9
    criterion: float = 1e-10
    hull: float = 1e-8
    band: float = 1e-8
    mc_sigma: float = 5.0

    def with_overrides(self, **kwargs: float) -> "Tolerances":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_TOL = Tolerances()


def resolve(tol: Tolerances | None) -> Tolerances:
    return DEFAULT_TOL if tol is None else tol
