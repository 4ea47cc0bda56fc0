"""Closed-form spectra of the four problems on an interval (0, L).

Neumann and Dirichlet values are elementary.  The clamped rod values are
the squared roots of cos(z) cosh(z) = 1 rescaled by L, recorded on the
square-root convention (the fourth-order eigenvalue is the square of the
stored value).  The buckling problem u'''' = -Lambda u'' with clamped
ends splits into two families: symmetric modes 1 - cos(2 k pi x / L)
with Lambda = (2 k pi / L)^2, and antisymmetric modes whose frequencies
y = sqrt(Lambda) L / 2 solve tan y = y.  The two families interleave,
and the second buckling value undercuts the third Dirichlet value, which
is the one-dimensional counterexample this module exists to expose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import RootBracket, find_root
from .spectra import ProblemKind, Spectrum


@dataclass(frozen=True)
class BucklingBranch:
    """One labeled buckling value: branch 1 is cosine, branch 2 is tan y = y."""

    branch: int
    index: int
    value: float


@lru_cache(maxsize=None)
def tan_root(k: int) -> float:
    """k-th positive root of tan y = y, located in (k pi, k pi + pi / 2).

    Solved as sin y - y cos y = 0, which is bounded on the bracket.
    """
    if k < 1:
        raise ValueError(f"root index must be >= 1, got {k!r}")
    lo = k * math.pi + 1e-12
    hi = k * math.pi + math.pi / 2 - 1e-12
    return find_root(
        lambda y: math.sin(y) - y * math.cos(y),
        RootBracket(lo, hi),
        tol=1e-12,
        fprime=lambda y: y * math.sin(y),
    )


@lru_cache(maxsize=None)
def clamped_beam_root(k: int) -> float:
    """k-th root z_k of cos(z) cosh(z) = 1, near (2k + 1) pi / 2.

    Solved as cos z - sech z = 0 to keep the function bounded.
    """
    if k < 1:
        raise ValueError(f"root index must be >= 1, got {k!r}")
    center = (2 * k + 1) * math.pi / 2
    return find_root(
        lambda z: math.cos(z) - 1.0 / math.cosh(z),
        RootBracket(center - 0.4, center + 0.4),
        tol=1e-12,
        fprime=lambda z: -math.sin(z) + math.tanh(z) / math.cosh(z),
    )


def _check_length(length: float) -> float:
    length = float(length)
    if not (math.isfinite(length) and length > 0):
        raise ValueError(f"interval length must be positive, got {length!r}")
    return length


def _check_count(count: int) -> int:
    if count != int(count) or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    return int(count)


def buckling_branches(length: float, count: int) -> list[BucklingBranch]:
    """Smallest ``count`` buckling values with their branch labels, sorted.

    Branch 1 contributes (2 k pi / L)^2 and branch 2 contributes
    (2 y_k / L)^2 with tan(y_k) = y_k; since k pi < y_k < k pi + pi / 2
    the branches alternate strictly.
    """
    length = _check_length(length)
    count = _check_count(count)
    per_branch = count // 2 + 1
    labeled = [
        BucklingBranch(1, k, (2 * k * math.pi / length) ** 2)
        for k in range(1, per_branch + 1)
    ] + [
        BucklingBranch(2, k, (2 * tan_root(k) / length) ** 2)
        for k in range(1, per_branch + 1)
    ]
    labeled.sort(key=lambda b: b.value)
    return labeled[:count]


def interval_spectrum(length: float, kind: ProblemKind, count: int) -> Spectrum:
    """Smallest ``count`` eigenvalues of the given problem on (0, L).

    Clamped values are reported as kappa^2 where kappa^4 solves the rod
    equation, so they are directly comparable with the membrane values.
    """
    length = _check_length(length)
    count = _check_count(count)
    kind = ProblemKind(kind)
    k = np.arange(1, count + 1, dtype=float)
    if kind is ProblemKind.DIRICHLET:
        values = (k * math.pi / length) ** 2
    elif kind is ProblemKind.NEUMANN:
        values = ((k - 1) * math.pi / length) ** 2
    elif kind is ProblemKind.CLAMPED:
        values = np.array(
            [(clamped_beam_root(int(j)) / length) ** 2 for j in k]
        )
    else:
        values = np.array([b.value for b in buckling_branches(length, count)])
    return Spectrum(
        kind=kind,
        domain=f"interval(L={length:g})",
        values=values,
        source="analytic",
        trusted_count=count,
    )


def payne_check_1d(length: float, count: int):
    """Compare lambda_{k+1} against Lambda_k on (0, L) for k <= count.

    Returns the generic scan report; on any interval the k = 2 row fails
    because (2 y_1 / L)^2 < (3 pi / L)^2.
    """
    from .analytics import payne_scan

    dirichlet = interval_spectrum(length, ProblemKind.DIRICHLET, count + 1)
    buckling = interval_spectrum(length, ProblemKind.BUCKLING, count)
    return payne_scan(dirichlet, buckling, count)
