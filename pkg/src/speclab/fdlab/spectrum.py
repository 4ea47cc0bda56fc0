"""Finite-difference spectra for the four eigenvalue problems.

The membrane problems discretize the Laplacian directly.  The clamped
plate solves the bilaplacian and reports square roots of the computed
eigenvalues, matching the convention used by the analytic backends.
Buckling solves the pencil (bilaplacian, Dirichlet Laplacian).
"""

from __future__ import annotations

import numpy as np

from ..spectra import MEMBRANE_KINDS, ProblemKind, Spectrum
from .grid import GridDomain
from .operators import assemble_bilaplacian_clamped, assemble_laplacian
from .solver import DEFAULT_TOL, solve_gevp

#: Fraction of the grid's degrees of freedom a discrete eigenvalue may
#: use up before it stops tracking the continuum problem at all.
TRUST_FRACTION = 4


def _neumann_snap(values: np.ndarray, scale: float) -> np.ndarray:
    # The flux-form operator annihilates constants exactly; the solver
    # reports that null value as roundoff of either sign.
    out = values.copy()
    tiny = 1e-9 * max(scale, 1.0)
    out[np.abs(out) <= tiny] = 0.0
    return out


def fd_spectrum(
    domain: GridDomain,
    kind: ProblemKind,
    count: int = 6,
    tol: float = DEFAULT_TOL,
) -> Spectrum:
    """Lowest ``count`` eigenvalues of ``kind`` on a grid domain."""
    kind = ProblemKind(kind)
    n = domain.n_unknowns
    if count > n:
        raise ValueError(
            f"requested {count} eigenvalues but the grid has {n} unknowns"
        )

    if kind in MEMBRANE_KINDS:
        op = assemble_laplacian(domain, kind)
        if kind is ProblemKind.NEUMANN:
            # The operator is singular; shift below zero so the
            # factorization in the iterative path stays definite.
            sigma = -0.01 * 4.0 / domain.h**2
        else:
            sigma = 0.0
        solution = solve_gevp(op, count=count, tol=tol, sigma=sigma)
        values = solution.values
        if kind is ProblemKind.NEUMANN:
            values = _neumann_snap(values, scale=4.0 / domain.h**2)
    elif kind is ProblemKind.CLAMPED:
        op = assemble_bilaplacian_clamped(domain)
        solution = solve_gevp(op, count=count, tol=tol)
        values = np.sqrt(np.maximum(solution.values, 0.0))
    elif kind is ProblemKind.BUCKLING:
        bilap = assemble_bilaplacian_clamped(domain)
        lap = assemble_laplacian(domain, ProblemKind.DIRICHLET)
        solution = solve_gevp(bilap, m=lap, count=count, tol=tol)
        values = solution.values
    else:  # pragma: no cover - ProblemKind is exhaustive
        raise ValueError(f"unsupported problem kind {kind!r}")

    return Spectrum(
        kind=kind,
        domain=domain.descriptor,
        values=values,
        source=f"fd(h={domain.h:g})",
        trusted_count=min(count, max(1, n // TRUST_FRACTION)),
    )
