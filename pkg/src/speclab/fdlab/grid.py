"""Node masks for finite-difference domains.

A domain is a uniform lattice of spacing h; the mask marks the nodes
that lie strictly inside the continuous region (node-center inclusion).
Everything outside the mask is wall: second-order operators read it as
zero boundary data and the clamped fourth-order operator additionally
mirrors across it.  Masks can be built from a few stock shapes or read
from a small text format, one line ``h <value>`` followed by rows of
``#`` (inside) and ``.`` (outside).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_REL_TOL = 1e-9


class DegenerateDomainError(ValueError):
    """Raised when a mask resolves to fewer than nine unknowns."""


@dataclass
class GridDomain:
    """Interior-node mask of one domain at one resolution.

    ``mask[j, i]`` marks the node at ``(origin[0] + i h, origin[1] + j h)``;
    row index moves along y.
    """

    h: float
    mask: np.ndarray
    origin: tuple[float, float]
    descriptor: str = field(default="mask")

    def __post_init__(self) -> None:
        self.h = float(self.h)
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"grid spacing must be positive, got {self.h!r}")
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.ndim != 2:
            raise ValueError("mask must be a 2-d boolean array")
        _validate_mask(self.mask)

    @property
    def n_unknowns(self) -> int:
        return int(self.mask.sum())

    def node_coordinates(self) -> np.ndarray:
        """(n, 2) array of the x, y coordinates of every interior node."""
        jj, ii = np.nonzero(self.mask)
        return np.column_stack(
            (self.origin[0] + ii * self.h, self.origin[1] + jj * self.h)
        )


def _validate_mask(mask: np.ndarray) -> None:
    n = int(mask.sum())
    if n < 9:
        raise DegenerateDomainError(
            f"domain resolves to {n} unknowns at this spacing; at least 9 are required"
        )
    # single 4-connected component, checked by flood fill from the first node
    seen = np.zeros_like(mask)
    seeds = np.argwhere(mask)
    stack = [tuple(seeds[0])]
    seen[stack[0]] = True
    while stack:
        j, i = stack.pop()
        for dj, di in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            jj, ii = j + dj, i + di
            if 0 <= jj < mask.shape[0] and 0 <= ii < mask.shape[1]:
                if mask[jj, ii] and not seen[jj, ii]:
                    seen[jj, ii] = True
                    stack.append((jj, ii))
    if int(seen.sum()) != n:
        raise ValueError("mask must form a single 4-connected component")


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def rectangle_domain(
    a: float, b: float, h: float, corner: tuple[float, float] = (0.0, 0.0)
) -> GridDomain:
    """Interior nodes of the rectangle [cx, cx + a] x [cy, cy + b]."""
    a = _positive("side a", a)
    b = _positive("side b", b)
    h = _positive("spacing h", h)
    cx, cy = float(corner[0]), float(corner[1])
    nx = int(math.floor((a - _REL_TOL * a) / h))
    ny = int(math.floor((b - _REL_TOL * b) / h))
    if nx < 1 or ny < 1:
        raise DegenerateDomainError(f"rectangle {a:g}x{b:g} has no interior nodes at h={h:g}")
    mask = np.ones((ny, nx), dtype=bool)
    return GridDomain(
        h=h,
        mask=mask,
        origin=(cx + h, cy + h),
        descriptor=f"rectangle({a:g},{b:g})",
    )


def interval_domain(length: float, h: float) -> GridDomain:
    """Single-row mask standing in for the interval (0, L).

    The operator assemblers recognise one-row masks and switch to their
    one-dimensional stencils, so this is the grid-side twin of the
    closed-form interval spectra.
    """
    length = _positive("length", length)
    h = _positive("spacing h", h)
    n = int(math.floor((length - _REL_TOL * length) / h))
    if n < 9:
        raise DegenerateDomainError(f"interval needs at least 9 nodes, got {n} at h={h:g}")
    return GridDomain(
        h=h,
        mask=np.ones((1, n), dtype=bool),
        origin=(h, 0.0),
        descriptor=f"interval({length:g})",
    )


def disk_domain(radius: float, h: float, center: tuple[float, float] = (0.0, 0.0)) -> GridDomain:
    """Interior nodes of a disk, nodes with |x - c| strictly below R."""
    radius = _positive("radius", radius)
    h = _positive("spacing h", h)
    n = int(math.ceil(radius / h))
    idx = np.arange(-n, n + 1)
    xx = idx[None, :] * h
    yy = idx[:, None] * h
    mask = xx**2 + yy**2 < radius**2 * (1.0 - _REL_TOL)
    cols = np.any(mask, axis=0)
    rows = np.any(mask, axis=1)
    if not cols.any():
        raise DegenerateDomainError(f"disk R={radius:g} has no interior nodes at h={h:g}")
    i0, i1 = np.nonzero(cols)[0][[0, -1]]
    j0, j1 = np.nonzero(rows)[0][[0, -1]]
    mask = mask[j0 : j1 + 1, i0 : i1 + 1]
    return GridDomain(
        h=h,
        mask=mask,
        origin=(center[0] + idx[i0] * h, center[1] + idx[j0] * h),
        descriptor=f"disk(R={radius:g})",
    )


def lshape_domain(
    a: float, b: float, h: float, notch: float = 0.5, corner: tuple[float, float] = (0.0, 0.0)
) -> GridDomain:
    """Rectangle [0, a] x [0, b] with the closed top-right notch removed.

    The notch is the block [a (1 - notch), a] x [b (1 - notch), b]; its
    two inner edges belong to the boundary, so nodes on them are wall.
    """
    a = _positive("side a", a)
    b = _positive("side b", b)
    h = _positive("spacing h", h)
    notch = float(notch)
    if not 0.0 < notch < 1.0:
        raise ValueError(f"notch fraction must lie in (0, 1), got {notch!r}")
    base = rectangle_domain(a, b, h, corner=corner)
    mask = base.mask.copy()
    ny, nx = mask.shape
    x_cut = a * (1.0 - notch)
    y_cut = b * (1.0 - notch)
    for j in range(ny):
        y = (j + 1) * h
        for i in range(nx):
            x = (i + 1) * h
            if x >= x_cut - _REL_TOL * a and y >= y_cut - _REL_TOL * b:
                mask[j, i] = False
    return GridDomain(
        h=h,
        mask=mask,
        origin=base.origin,
        descriptor=f"lshape({a:g},{b:g},notch={notch:g})",
    )


def build_grid_domain(shape: str, h: float | None = None) -> GridDomain:
    """Build a domain from a shape descriptor string.

    Accepted forms: ``rectangle(a,b)``, ``disk(R)``, ``lshape(a,b,notch)``
    and a path to a mask file (for which ``h`` comes from the file).
    """
    shape = shape.strip()
    match = re.fullmatch(r"(\w+)\(([^)]*)\)", shape)
    if match is None:
        path = Path(shape)
        if path.suffix or path.exists():
            return read_mask_file(path)
        raise ValueError(f"unrecognised shape descriptor {shape!r}")
    name, arg_text = match.group(1), match.group(2)
    try:
        args = [float(p) for p in arg_text.split(",") if p.strip()]
    except ValueError as exc:
        raise ValueError(f"bad shape arguments in {shape!r}") from exc
    if h is None:
        raise ValueError(f"shape {shape!r} requires an explicit spacing h")
    if name == "rectangle" and len(args) == 2:
        return rectangle_domain(args[0], args[1], h)
    if name == "disk" and len(args) == 1:
        return disk_domain(args[0], h)
    if name == "lshape" and len(args) in (2, 3):
        notch = args[2] if len(args) == 3 else 0.5
        return lshape_domain(args[0], args[1], h, notch=notch)
    if name == "interval" and len(args) == 1:
        return interval_domain(args[0], h)
    raise ValueError(f"unrecognised shape descriptor {shape!r}")


def read_mask_file(path: str | Path) -> GridDomain:
    """Read a domain from the ``h ...`` / ``#``-row text format."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].lower().startswith("h"):
        raise ValueError(f"{path}: first line must be 'h <spacing>'")
    parts = lines[0].split()
    if len(parts) != 2:
        raise ValueError(f"{path}: first line must be 'h <spacing>'")
    try:
        h = float(parts[1])
    except ValueError as exc:
        raise ValueError(f"{path}: bad spacing {parts[1]!r}") from exc
    rows = [line for line in lines[1:] if line.strip()]
    if not rows:
        raise ValueError(f"{path}: no mask rows")
    width = max(len(r) for r in rows)
    mask = np.zeros((len(rows), width), dtype=bool)
    for j, row in enumerate(rows):
        for i, ch in enumerate(row):
            if ch == "#":
                mask[j, i] = True
            elif ch not in ".":
                raise ValueError(f"{path}: row {j + 2} has invalid character {ch!r}")
    return GridDomain(h=h, mask=mask, origin=(0.0, 0.0), descriptor=f"mask({path.name})")


def write_mask_file(domain: GridDomain, path: str | Path) -> None:
    """Write a domain in the text format understood by read_mask_file."""
    path = Path(path)
    lines = [f"h {domain.h:.12g}"]
    for row in domain.mask:
        lines.append("".join("#" if v else "." for v in row))
    path.write_text("\n".join(lines) + "\n")
