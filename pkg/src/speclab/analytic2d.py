"""Reference spectra on rectangles and disks, plus lattice counting.

Rectangles get the classical separated membrane eigenvalues and exact
lattice-point counts against the leading Weyl term.  Disks get all four
problems through Bessel characteristic equations.  The rectangle
buckling "product" family is handled with care: the four labeled
families of tensor-product trial functions are counted exactly as
described, but ``buckling_product_residual`` demonstrates that those
products do not satisfy the two-dimensional buckling equation (the
cross-derivative term survives), so the family counts are a labeled
reproduction and finite differences remain the trusted source for
rectangle buckling values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .interval1d import tan_root
from .specfun import (
    RootBracket,
    bessel_i,
    bessel_j,
    bessel_j_prime_zero,
    bessel_j_zero,
    find_root,
)
from .spectra import ProblemKind, Spectrum


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def _check_count(count: int) -> int:
    if count != int(count) or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    return int(count)


# ---------------------------------------------------------------------------
# rectangle membrane


def rect_spectrum(a: float, b: float, kind: ProblemKind, count: int) -> Spectrum:
    """Smallest ``count`` membrane eigenvalues pi^2 (l^2/a^2 + m^2/b^2).

    Dirichlet indices run from 1, Neumann from 0 (the constant mode).
    """
    a = _check_positive("side a", a)
    b = _check_positive("side b", b)
    count = _check_count(count)
    kind = ProblemKind(kind)
    if kind not in (ProblemKind.NEUMANN, ProblemKind.DIRICHLET):
        raise ValueError(f"rectangle closed form covers membrane kinds only, got {kind.value}")
    start = 0 if kind is ProblemKind.NEUMANN else 1
    # Grow the enumeration window until it certainly holds `count` values.
    bound = 4.0 * math.pi**2 * (count + 4) / (a * b) + math.pi**2 * (1 / a**2 + 1 / b**2)
    while True:
        values = []
        l = start
        while math.pi**2 * l**2 / a**2 <= bound:
            m = start
            while True:
                v = math.pi**2 * (l**2 / a**2 + m**2 / b**2)
                if v > bound:
                    break
                values.append(v)
                m += 1
            l += 1
        if len(values) >= count:
            values.sort()
            return Spectrum(
                kind=kind,
                domain=f"rect({a:g}x{b:g})",
                values=np.array(values[:count]),
                source="analytic",
                trusted_count=count,
            )
        bound *= 2.0


@dataclass(frozen=True)
class LatticeCount:
    """Exact eigenvalue count at tau next to the leading Weyl term."""

    tau: float
    count: int
    weyl_term: float
    remainder: float


def rect_lattice_count(a: float, b: float, kind: ProblemKind, tau: float) -> LatticeCount:
    """Count rectangle membrane eigenvalues <= tau by direct enumeration.

    The Weyl term is tau * a * b / (4 pi); the remainder is count minus
    that term and carries the boundary contribution.
    """
    a = _check_positive("side a", a)
    b = _check_positive("side b", b)
    tau = float(tau)
    if not (math.isfinite(tau) and tau >= 0):
        raise ValueError(f"tau must be finite and >= 0, got {tau!r}")
    kind = ProblemKind(kind)
    if kind not in (ProblemKind.NEUMANN, ProblemKind.DIRICHLET):
        raise ValueError(f"lattice count covers membrane kinds only, got {kind.value}")
    start = 0 if kind is ProblemKind.NEUMANN else 1
    count = 0
    l = start
    while math.pi**2 * l**2 / a**2 <= tau:
        m = start
        while math.pi**2 * (l**2 / a**2 + m**2 / b**2) <= tau:
            count += 1
            m += 1
        l += 1
    weyl = tau * a * b / (4.0 * math.pi)
    return LatticeCount(tau=tau, count=count, weyl_term=weyl, remainder=count - weyl)


# ---------------------------------------------------------------------------
# rectangle buckling product families


@dataclass(frozen=True)
class FamilyCounts:
    """Counts of the four tensor-product buckling families below tau."""

    tau: float
    n1: int
    n2: int
    n3: int
    n4: int

    @property
    def total(self) -> int:
        return self.n1 + self.n2 + self.n3 + self.n4


def _branch1_value(length: float, k: int) -> float:
    return (2.0 * k * math.pi / length) ** 2


def _branch2_value(length: float, k: int) -> float:
    return (2.0 * tan_root(k) / length) ** 2


def buckling_family_counts(a: float, b: float, tau: float) -> FamilyCounts:
    """Exact counts of the four product families with combined value <= tau.

    Family 1 pairs cosine branch values in both directions, families 2
    and 3 mix one cosine branch with one tan y = y branch, family 4
    pairs two tan y = y branches.  These reproduce a claimed counting
    argument; see ``buckling_product_residual`` for why the underlying
    product functions are not actual buckling eigenfunctions.
    """
    a = _check_positive("side a", a)
    b = _check_positive("side b", b)
    tau = float(tau)
    if not (math.isfinite(tau) and tau >= 0):
        raise ValueError(f"tau must be finite and >= 0, got {tau!r}")

    def values(length: float, branch: int) -> list[float]:
        out = []
        k = 1
        while True:
            v = _branch1_value(length, k) if branch == 1 else _branch2_value(length, k)
            if v > tau:
                break
            out.append(v)
            k += 1
        return out

    a1, a2 = values(a, 1), values(a, 2)
    b1, b2 = values(b, 1), values(b, 2)

    def pair_count(xs: list[float], ys: list[float]) -> int:
        return sum(1 for x in xs for y in ys if x + y <= tau)

    return FamilyCounts(
        tau=tau,
        n1=pair_count(a1, b1),
        n2=pair_count(a1, b2),
        n3=pair_count(a2, b1),
        n4=pair_count(a2, b2),
    )


@dataclass(frozen=True)
class ProductResidual:
    """Max-norm residual of a product trial function in the buckling PDE."""

    eigenvalue_guess: float
    residual_max: float
    value_max: float

    @property
    def normalized(self) -> float:
        return self.residual_max / self.value_max


def buckling_product_residual(
    a: float, b: float, l: int, m: int, grid: int = 201
) -> ProductResidual:
    """Residual of u = (1 - cos(2 l pi x / a)) (1 - cos(2 m pi y / b)).

    The candidate eigenvalue is Lambda = alpha^2 + beta^2 with
    alpha = 2 l pi / a, beta = 2 m pi / b.  All derivatives are closed
    form; the grid only samples the interior for the max norms.  A
    genuine eigenfunction would give a residual at roundoff scale; this
    one leaves alpha^2 beta^2 (cos(alpha x) + cos(beta y)) behind.
    """
    a = _check_positive("side a", a)
    b = _check_positive("side b", b)
    if l < 1 or m < 1 or l != int(l) or m != int(m):
        raise ValueError(f"mode indices must be positive integers, got ({l!r}, {m!r})")
    if grid < 8:
        raise ValueError(f"grid must have at least 8 points per side, got {grid!r}")
    alpha = 2.0 * l * math.pi / a
    beta = 2.0 * m * math.pi / b
    lam = alpha**2 + beta**2
    x = np.linspace(0.0, a, grid)[1:-1]
    y = np.linspace(0.0, b, grid)[1:-1]
    cx = np.cos(alpha * x)[:, None]
    cy = np.cos(beta * y)[None, :]
    u = (1.0 - cx) * (1.0 - cy)
    # u_xx = alpha^2 cx (1 - cy), u_yy = beta^2 cy (1 - cx)
    lap = alpha**2 * cx * (1.0 - cy) + beta**2 * cy * (1.0 - cx)
    # bilaplacian assembled from u_xxxx, u_yyyy and the mixed term u_xxyy
    u_xxxx = -(alpha**4) * cx * (1.0 - cy)
    u_yyyy = -(beta**4) * cy * (1.0 - cx)
    u_xxyy = (alpha**2) * (beta**2) * cx * cy
    residual = (u_xxxx + u_yyyy + 2.0 * u_xxyy) + lam * lap
    return ProductResidual(
        eigenvalue_guess=lam,
        residual_max=float(np.max(np.abs(residual))),
        value_max=float(np.max(np.abs(u))),
    )


# ---------------------------------------------------------------------------
# disk


def _disk_clamped_root(m: int, l: int) -> float:
    """l-th root of J_m(x) I_{m+1}(x) + I_m(x) J_{m+1}(x) = 0.

    Bracketed between consecutive zeros of J_m: at j_m^l the function
    equals I_m J_{m+1}, whose sign alternates with l.
    """

    def f(x: float) -> float:
        return bessel_j(m, x) * bessel_i(m + 1, x) + bessel_i(m, x) * bessel_j(m + 1, x)

    lo = bessel_j_zero(m, l)
    hi = bessel_j_zero(m, l + 1)
    return find_root(f, RootBracket(lo, hi))


def disk_spectrum(radius: float, kind: ProblemKind, count: int) -> Spectrum:
    """Smallest ``count`` eigenvalues of the given problem on a disk.

    Dirichlet values are (j_m^l / R)^2 and Neumann values come from the
    zeros of J_m' plus the zero constant mode.  Clamped values are the
    squared roots of the J/I cross determinant, on the square-root
    convention.  Buckling values are (j_{m+1}^l / R)^2; the modes pair a
    Bessel radial part with a harmonic r^m correction, and the first of
    them coincides with the second Dirichlet value.  Angular orders
    m >= 1 carry multiplicity two.
    """
    radius = _check_positive("radius", radius)
    count = _check_count(count)
    kind = ProblemKind(kind)

    def order_value(m: int, l: int) -> float:
        if kind is ProblemKind.DIRICHLET:
            return (bessel_j_zero(m, l) / radius) ** 2
        if kind is ProblemKind.NEUMANN:
            return (bessel_j_prime_zero(m, l) / radius) ** 2
        if kind is ProblemKind.CLAMPED:
            return (_disk_clamped_root(m, l) / radius) ** 2
        return (bessel_j_zero(m + 1, l) / radius) ** 2

    values: list[float] = [0.0] if kind is ProblemKind.NEUMANN else []

    def kth_cutoff() -> float:
        if len(values) < count:
            return math.inf
        return sorted(values)[count - 1]

    m = 0
    while True:
        if order_value(m, 1) > kth_cutoff():
            break
        mult = 1 if m == 0 else 2
        l = 1
        while True:
            v = order_value(m, l)
            if v > kth_cutoff():
                break
            values.extend([v] * mult)
            l += 1
        m += 1
    values.sort()
    return Spectrum(
        kind=kind,
        domain=f"disk(R={radius:g})",
        values=np.array(values[:count]),
        source="analytic",
        trusted_count=count,
    )
