"""Sparse symmetric operators on grid domains.

The membrane Laplacian uses the 5-point stencil: Dirichlet walls read
exterior values as zero, the Neumann form drops absent fluxes so every
diagonal counts only present neighbours and constants are annihilated
exactly.  The clamped plate operator is the 13-point bilaplacian with
wall value zero plus mirror ghosts for the normal derivative: when the
two-step neighbour and the node between both fall outside, the ghost
value equals the centre value, which folds one unit back onto the
diagonal and keeps the matrix symmetric.

One-row (or one-column) masks are handled as genuine one-dimensional
problems with the corresponding rod stencils, so the same assemblers
double as the interval oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..spectra import ProblemKind
from .grid import GridDomain

_AXES_2D = ((0, 1), (0, -1), (1, 0), (-1, 0))
_DIAGS_2D = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class SparseSymOperator:
    """Symmetric sparse operator with matvec and dense export."""

    matrix: sp.csr_matrix

    def __post_init__(self) -> None:
        gap = abs(self.matrix - self.matrix.T)
        scale = max(1.0, abs(self.matrix).max())
        if gap.nnz and gap.max() > 1e-12 * scale:
            raise ValueError("operator is not symmetric")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


def _index_map(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    index = -np.ones(mask.shape, dtype=np.int64)
    nodes = np.argwhere(mask)
    index[mask] = np.arange(len(nodes))
    return index, nodes


def _is_one_dimensional(mask: np.ndarray) -> bool:
    return 1 in mask.shape


def _line_length(mask: np.ndarray) -> int:
    # connectivity validation at build time already guarantees the row is
    # one contiguous run, so only the node count matters here
    return int(mask.sum())


def assemble_laplacian(domain: GridDomain, bc: ProblemKind) -> SparseSymOperator:
    """Negative Laplacian on the mask with Dirichlet or Neumann walls."""
    bc = ProblemKind(bc)
    if bc not in (ProblemKind.DIRICHLET, ProblemKind.NEUMANN):
        raise ValueError(f"laplacian boundary condition must be membrane kind, got {bc.value}")
    h2 = domain.h**2
    mask = domain.mask
    if _is_one_dimensional(mask):
        n = _line_length(mask)
        off = -np.ones(n - 1)
        diag = np.full(n, 2.0)
        if bc is ProblemKind.NEUMANN:
            diag[0] = diag[-1] = 1.0
        matrix = sp.diags([off, diag, off], (-1, 0, 1), format="csr") / h2
        return SparseSymOperator(matrix.tocsr())

    index, nodes = _index_map(mask)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    ny, nx = mask.shape
    for q, (j, i) in enumerate(nodes):
        present = 0
        for dj, di in _AXES_2D:
            jj, ii = j + dj, i + di
            if 0 <= jj < ny and 0 <= ii < nx and mask[jj, ii]:
                present += 1
                rows.append(q)
                cols.append(index[jj, ii])
                vals.append(-1.0)
        diag = 4.0 if bc is ProblemKind.DIRICHLET else float(present)
        rows.append(q)
        cols.append(q)
        vals.append(diag)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(nodes), len(nodes))) / h2
    return SparseSymOperator(matrix)


def assemble_bilaplacian_clamped(domain: GridDomain) -> SparseSymOperator:
    """Bilaplacian with clamped walls (zero value and normal derivative)."""
    h4 = domain.h**4
    mask = domain.mask
    if _is_one_dimensional(mask):
        n = _line_length(mask)
        diag = np.full(n, 6.0)
        diag[0] = diag[-1] = 7.0  # mirror ghost u(-h) = u(h) across each end
        matrix = sp.diags(
            [np.ones(n - 2), -4 * np.ones(n - 1), diag, -4 * np.ones(n - 1), np.ones(n - 2)],
            (-2, -1, 0, 1, 2),
            format="csr",
        ) / h4
        return SparseSymOperator(matrix.tocsr())

    index, nodes = _index_map(mask)
    ny, nx = mask.shape

    def inside(j: int, i: int) -> bool:
        return 0 <= j < ny and 0 <= i < nx and mask[j, i]

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for q, (j, i) in enumerate(nodes):
        diag = 20.0
        for dj, di in _AXES_2D:
            j1, i1 = j + dj, i + di
            j2, i2 = j + 2 * dj, i + 2 * di
            near = inside(j1, i1)
            if near:
                rows.append(q)
                cols.append(index[j1, i1])
                vals.append(-8.0)
            if inside(j2, i2):
                rows.append(q)
                cols.append(index[j2, i2])
                vals.append(1.0)
            elif not near:
                # wall next to the node: the two-step ghost mirrors back here
                diag += 1.0
            # near in, far out: the far node is wall with value zero
        for dj, di in _DIAGS_2D:
            if inside(j + dj, i + di):
                rows.append(q)
                cols.append(index[j + dj, i + di])
                vals.append(2.0)
        rows.append(q)
        cols.append(q)
        vals.append(diag)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(nodes), len(nodes))) / h4
    return SparseSymOperator(matrix)
