"""Periodic primal/dual tensor-product grids and degree-of-freedom arrays.

The primal grid has nodes x_m = m*h along each axis; the dual grid is
staggered by half a cell, x_{m+1/2} = (m + 1/2)*h.  Degrees of freedom are
geometric: point values (0-forms), edge integrals (1-forms), face fluxes
(2-forms) and cell integrals (3-forms).  On a periodic grid every form
degree has one DoF per cell and axis component, so scalar DoFs are stored
as arrays of shape (M1, M2, M3) and vector DoFs as (3, M1, M2, M3).

Index conventions (component alpha, entry (i, j, k)):

    primal 1-form x: edge [x_i, x_{i+1}] at (y_j, z_k)
    primal 2-form x: face x = x_i, y in [y_j, y_{j+1}], z in [z_k, z_{k+1}]
    dual   0-form:   point (x_{i+1/2}, y_{j+1/2}, z_{k+1/2})
    dual   1-form x: edge [x_{i-1/2}, x_{i+1/2}] at (y_{j+1/2}, z_{k+1/2})
    dual   2-form x: face x = x_{i+1/2}, y in [y_{j-1/2}, y_{j+1/2}], ...
    dual   3-form:   cell centered at the primal node (x_i, y_j, z_k)

With this staggering the entries of a primal k-form and a dual (3-k)-form
are index matched, which makes the duality product a plain dot product.

The documented flat layout (used by CSV output and the dense test oracles)
is x-fastest row-major, i.e. ``data.ravel(order="F")``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PRIMAL = "primal"
DUAL = "dual"

_SCALAR_DEGREES = (0, 3)
_VECTOR_DEGREES = (1, 2)


def min_cells_for_order(order: int) -> int:
    """Smallest admissible cell count per axis for Hodge operators of the
    given (even) order 2(p+1): the widest stencil has 2p+3 entries."""
    p = order // 2 - 1
    return max(4, 2 * p + 3)


@dataclass(frozen=True)
class GridSpec:
    """Periodic tensor-product grid on [0, L1) x [0, L2) x [0, L3)."""

    lengths: tuple[float, float, float]
    cells: tuple[int, int, int]
    spacings: tuple[float, float, float] = field(init=False)

    def __post_init__(self):
        h = tuple(L / M for L, M in zip(self.lengths, self.cells))
        object.__setattr__(self, "spacings", h)

    @property
    def n_scalar(self) -> int:
        M1, M2, M3 = self.cells
        return M1 * M2 * M3

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def nodes(self, axis: int, grid: str = PRIMAL) -> np.ndarray:
        """1D node coordinates along an axis (primal: m*h, dual: (m+1/2)*h)."""
        h = self.spacings[axis]
        m = np.arange(self.cells[axis], dtype=float)
        if grid == PRIMAL:
            return m * h
        if grid == DUAL:
            return (m + 0.5) * h
        raise ValueError(f"unknown grid {grid!r}")

    def require_order(self, order: int) -> None:
        need = min_cells_for_order(order)
        for axis, M in enumerate(self.cells):
            if M < need:
                raise ValueError(
                    f"axis {axis}: {M} cells insufficient for order-{order} "
                    f"operators (need at least {need})"
                )


def build_grid(lengths, cells, operator_order: int = 2) -> GridSpec:
    """Build a periodic grid spec, validating against the stencil support
    required by operators of the given order."""
    lengths = tuple(float(L) for L in lengths)
    cells = tuple(int(M) for M in cells)
    if len(lengths) != 3 or len(cells) != 3:
        raise ValueError("lengths and cells must be 3-vectors")
    if any(L <= 0 for L in lengths):
        raise ValueError(f"domain lengths must be positive, got {lengths}")
    if any(M < 4 for M in cells):
        raise ValueError(f"need at least 4 cells per axis, got {cells}")
    spec = GridSpec(lengths, cells)
    spec.require_order(operator_order)
    return spec


@dataclass
class DofField:
    """Geometric degrees of freedom of one form degree on one grid.

    ``data`` has shape (M1, M2, M3) for degrees 0 and 3 and
    (3, M1, M2, M3) for degrees 1 and 2.
    """

    degree: int
    grid: str
    data: np.ndarray

    def __post_init__(self):
        if self.degree not in (0, 1, 2, 3):
            raise ValueError(f"invalid form degree {self.degree}")
        if self.grid not in (PRIMAL, DUAL):
            raise ValueError(f"invalid grid {self.grid!r}")
        self.data = np.asarray(self.data, dtype=float)
        expect_ndim = 3 if self.degree in _SCALAR_DEGREES else 4
        if self.data.ndim != expect_ndim:
            raise ValueError(
                f"degree-{self.degree} field needs {expect_ndim}-dim data, "
                f"got shape {self.data.shape}"
            )
        if self.degree in _VECTOR_DEGREES and self.data.shape[0] != 3:
            raise ValueError("vector DoF data must have leading axis of size 3")

    @property
    def is_vector(self) -> bool:
        return self.degree in _VECTOR_DEGREES

    @property
    def shape3(self) -> tuple[int, int, int]:
        return self.data.shape[-3:]

    def copy(self) -> "DofField":
        return DofField(self.degree, self.grid, self.data.copy())

    def check_finite(self) -> None:
        if not np.all(np.isfinite(self.data)):
            raise FloatingPointError(
                f"non-finite entries in degree-{self.degree} {self.grid} field"
            )

    def flat(self) -> np.ndarray:
        """Flatten to the documented x-fastest layout.  Vector fields are
        stacked component-wise: (x block, y block, z block)."""
        if self.is_vector:
            return np.concatenate([c.ravel(order="F") for c in self.data])
        return self.data.ravel(order="F")


def zeros_field(spec: GridSpec, degree: int, grid: str) -> DofField:
    if degree in _SCALAR_DEGREES:
        data = np.zeros(spec.cells)
    else:
        data = np.zeros((3, *spec.cells))
    return DofField(degree, grid, data)


def flat_index(i: int, j: int, k: int, cells) -> int:
    """x-fastest flat index with periodic wrapping."""
    M1, M2, M3 = cells
    return (i % M1) + M1 * ((j % M2) + M2 * (k % M3))


def unflatten_index(n: int, cells) -> tuple[int, int, int]:
    M1, M2, M3 = cells
    if not 0 <= n < M1 * M2 * M3:
        raise ValueError(f"flat index {n} out of range")
    return n % M1, (n // M1) % M2, n // (M1 * M2)


def duality_product(a: DofField, b: DofField) -> float:
    """Duality pairing of a primal k-form with a dual (3-k)-form: the
    index-matched dot product, summed over components for vector DoFs."""
    if {a.grid, b.grid} != {PRIMAL, DUAL}:
        raise ValueError(f"need one primal and one dual field, got {a.grid}/{b.grid}")
    if a.degree + b.degree != 3:
        raise ValueError(
            f"degrees must be complementary (k and 3-k), got {a.degree}/{b.degree}"
        )
    if a.data.shape[-3:] != b.data.shape[-3:]:
        raise ValueError("grid shapes do not match")
    return float(np.vdot(a.data, b.data))
