"""Gauss-Hermite tensor quadrature against Gaussian envelopes.

The integrals in this package all have the shape integral f(z) dz where f
decays like exp(-(z - c)^T Q (z - c)) for a known SPD form Q. Substituting
z = c + L^{-T} t with Q = L L^T turns the weight into exp(-|t|^2), which is
the physicists' Gauss-Hermite weight. The e^{+t_i^2} factors are folded into
the per-axis weights (w_i e^{t_i^2} is O(node spacing), so no overflow), and
whenever f is polynomial-times-envelope the rule is exact once the per-axis
order exceeds half the polynomial degree.

Summation is deterministic: fixed chunking over the leading axis, numpy
pairwise sums inside a chunk, math.fsum across chunk partials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegenerateCovarianceError, InvalidArgumentError, SizeLimitError

__all__ = [
    "GaussianEnvelope",
    "GridSpec",
    "QuadratureSpec",
    "SCHEMES",
    "gauss_hermite_integral",
    "hermgauss_cached",
    "uniform_grid_integral",
]

SCHEMES = ("gauss_hermite_tensor", "adaptive_radial", "uniform_grid")

# Cap on tensor-product node counts (64 GH points per axis in 4 dims is
# 16.8M nodes, ~0.5 GB of transient blocks at the default chunking).
MAX_TENSOR_NODES = 40_000_000
BLOCK_NODES = 262_144


@dataclass(frozen=True)
class GaussianEnvelope:
    """Decay profile |f(z)| <~ exp(-(z - center)^T form (z - center))."""

    form: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        form = np.asarray(self.form, dtype=float)
        center = np.asarray(self.center, dtype=float).ravel()
        if form.shape != (center.size, center.size):
            raise InvalidArgumentError(
                f"envelope form {form.shape} does not match center {center.shape}"
            )
        object.__setattr__(self, "form", form)
        object.__setattr__(self, "center", center)

    def scaled(self, factor: float) -> "GaussianEnvelope":
        return GaussianEnvelope(self.form * factor, self.center)

    def combine(self, other: "GaussianEnvelope") -> "GaussianEnvelope":
        """Envelope of a product of two Gaussian-decaying factors.

        Completing the square keeps polynomial-times-envelope integrands
        exactly polynomial after the weight split, even with offset centers.
        """
        form = self.form + other.form
        rhs = self.form @ self.center + other.form @ other.center
        return GaussianEnvelope(form, np.linalg.solve(form, rhs))


@dataclass(frozen=True)
class GridSpec:
    """Rectangular phase-space grid: [-L, L] per axis, midpoint cells."""

    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if not (self.half_width > 0.0):
            raise InvalidArgumentError(
                f"half_width must be positive, got {self.half_width}"
            )
        if not isinstance(self.points_per_axis, (int, np.integer)) or self.points_per_axis < 16:
            raise InvalidArgumentError(
                f"points_per_axis must be an int >= 16, got {self.points_per_axis}"
            )


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate: scheme, per-axis order, and envelope tweaks.

    envelope_scale widens (scale > 1) the Gaussian weight relative to the
    field's declared envelope; half_width is only used by uniform_grid.
    """

    scheme: str = "gauss_hermite_tensor"
    order: int = 40
    envelope_scale: float = 1.0
    half_width: float | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidArgumentError(
                f"unknown quadrature scheme {self.scheme!r}; expected one of {SCHEMES}"
            )
        if not isinstance(self.order, (int, np.integer)) or self.order < 1:
            raise InvalidArgumentError(f"quadrature order must be >= 1, got {self.order}")
        if not (self.envelope_scale > 0.0):
            raise InvalidArgumentError(
                f"envelope_scale must be positive, got {self.envelope_scale}"
            )
        if self.half_width is not None and not (self.half_width > 0.0):
            raise InvalidArgumentError(
                f"half_width must be positive, got {self.half_width}"
            )


@lru_cache(maxsize=64)
def hermgauss_cached(order: int):
    """Physicists' Gauss-Hermite nodes plus weights premultiplied by e^{t^2}."""
    t, w = np.polynomial.hermite.hermgauss(order)
    return t, w * np.exp(t * t)


def _axis_blocks(nodes_1d, order: int, dims: int):
    """Yield (t_block, wtilde_block) covering the tensor grid in fixed chunks."""
    t, wt = nodes_1d
    total = order**dims
    if total > MAX_TENSOR_NODES:
        raise SizeLimitError(
            f"tensor rule with {total} nodes exceeds cap {MAX_TENSOR_NODES}"
        )
    # Lead axes are looped one index at a time; trailing axes are meshed.
    tail_dims = dims
    tail = 1
    while tail_dims > 0 and tail * order <= BLOCK_NODES:
        tail *= order
        tail_dims -= 1
    lead_dims = tail_dims
    grids = np.meshgrid(*([t] * (dims - lead_dims)), indexing="ij")
    tail_t = np.stack([g.ravel() for g in grids], axis=1) if grids else np.zeros((1, 0))
    tail_w = np.ones(tail_t.shape[0])
    for g in np.meshgrid(*([wt] * (dims - lead_dims)), indexing="ij"):
        tail_w = tail_w * g.ravel()
    lead_iter = np.ndindex(*([order] * lead_dims)) if lead_dims else iter([()])
    for lead in lead_iter:
        block_t = np.empty((tail_t.shape[0], dims))
        for j, idx in enumerate(lead):
            block_t[:, j] = t[idx]
        block_t[:, lead_dims:] = tail_t
        block_w = tail_w
        for idx in lead:
            block_w = block_w * wt[idx]
        yield block_t, block_w


def gauss_hermite_integral(
    f,
    envelope: GaussianEnvelope,
    order: int,
    *,
    envelope_scale: float = 1.0,
) -> float:
    """integral f(z) dz for f decaying like the given Gaussian envelope.

    f maps an (n, dims) array of points to n values. Exact when
    f(z) e^{(z-c)^T Q (z-c)} is a polynomial of per-axis degree < 2 * order.
    """
    form = envelope.form / (envelope_scale * envelope_scale)
    dims = envelope.center.size
    try:
        chol = np.linalg.cholesky(form)
    except np.linalg.LinAlgError as exc:
        # either genuinely indefinite or so squeezed that double precision
        # cannot factor it; both are covariance-degeneracy conditions
        raise DegenerateCovarianceError(
            f"envelope form is numerically singular or indefinite: {exc}"
        ) from exc
    jac = 1.0 / float(np.prod(np.diag(chol)))
    nodes = hermgauss_cached(order)
    partials = []
    for t_block, w_block in _axis_blocks(nodes, order, dims):
        # z = center + L^{-T} t
        z = envelope.center + solve_triangular(chol, t_block.T, lower=True, trans="T").T
        partials.append(float(np.sum(w_block * np.asarray(f(z), dtype=float))))
    return jac * math.fsum(partials)


def uniform_grid_integral(
    f,
    dims: int,
    half_width: float,
    points_per_axis: int,
) -> float:
    """Midpoint rule on [-L, L]^dims with points_per_axis cells per axis."""
    if not (half_width > 0.0):
        raise InvalidArgumentError(f"half_width must be positive, got {half_width}")
    if points_per_axis < 2:
        raise InvalidArgumentError("need at least 2 points per axis")
    total = points_per_axis**dims
    if total > MAX_TENSOR_NODES:
        raise SizeLimitError(
            f"uniform grid with {total} nodes exceeds cap {MAX_TENSOR_NODES}"
        )
    h = 2.0 * half_width / points_per_axis
    axis = -half_width + h * (np.arange(points_per_axis) + 0.5)
    tail_dims = dims
    tail = 1
    while tail_dims > 0 and tail * points_per_axis <= BLOCK_NODES:
        tail *= points_per_axis
        tail_dims -= 1
    lead_dims = tail_dims
    grids = np.meshgrid(*([axis] * (dims - lead_dims)), indexing="ij")
    tail_z = (
        np.stack([g.ravel() for g in grids], axis=1) if grids else np.zeros((1, 0))
    )
    partials = []
    lead_iter = np.ndindex(*([points_per_axis] * lead_dims)) if lead_dims else iter([()])
    for lead in lead_iter:
        block = np.empty((tail_z.shape[0], dims))
        for j, idx in enumerate(lead):
            block[:, j] = axis[idx]
        block[:, lead_dims:] = tail_z
        partials.append(float(np.sum(np.asarray(f(block), dtype=float))))
    return h**dims * math.fsum(partials)
