"""Multi-copy measurement operators in truncated Fock space.

The second and third moments of a Wigner function are expectation values
of joint observables on two or three copies of the state. This module
builds those observables explicitly: the mode SWAP operator (permutation,
exponential, and quadrature forms), displaced parity, the integrated
parity products O_m with Tr[rho^(x)m O_m] = w_m, and the cyclic register
permutation behind the three-copy protocol.

Truncation caveat applies throughout: annihilation operators truncated at
a finite Fock level violate the commutation relation in the top levels,
so operator identities hold exactly only on the subspace that the
operations cannot map out of the cutoff. Tests exclude the boundary
levels; that exclusion is physics, not slack.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from functools import lru_cache

from .errors import (
    InvalidArgumentError,
    SizeLimitError,
    TruncationWarning,
    UnsupportedOperationError,
)
from .states import FockState, annihilation_matrix
from .wigner import fock_kernel_values

__all__ = [
    "TruncatedOperator",
    "swap_operator",
    "swap_operator_exponential",
    "swap_quadrature_form",
    "displaced_parity",
    "multicopy_observable",
    "multicopy_expectation",
    "forward_backward_protocol",
]

DEFAULT_ALPHA_ORDER = 40
DEFAULT_MAX_SIDE = 4096
# Rows/columns touching the top Fock levels see O(1) truncation artifacts;
# identity checks restrict to indices whose per-mode occupation stays this
# many levels below the cutoff.
SAFE_BOUNDARY_LEVELS = 2

_KRON_BATCH_FLOATS = 8_000_000


@dataclass(frozen=True)
class TruncatedOperator:
    """A dense operator on `modes` registers, each truncated at `cutoff`."""

    modes: int
    cutoff: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix)
        side = (self.cutoff + 1) ** self.modes
        if mat.ndim != 2 or mat.shape != (side, side):
            raise InvalidArgumentError(
                f"operator on {self.modes} mode(s) at cutoff {self.cutoff} "
                f"needs shape {(side, side)}, got {mat.shape}"
            )
        object.__setattr__(self, "matrix", mat)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        """Per-register dimension cutoff+1."""
        return self.cutoff + 1

    def safe_slice(self, levels: int = SAFE_BOUNDARY_LEVELS) -> np.ndarray:
        """Restriction to basis states with every register below cutoff+1-levels."""
        d = self.dim
        keep_1d = np.arange(d) <= self.cutoff - levels
        keep = keep_1d.copy()
        for _ in range(self.modes - 1):
            keep = np.kron(keep, keep_1d)
        idx = np.nonzero(keep)[0]
        return self.matrix[np.ix_(idx, idx)]

    def dump(self, path) -> None:
        """Write side, cutoff and the nonzero entries as row,col,re,im CSV."""
        with open(path, "w", newline="\n") as fh:
            fh.write(f"# side={self.side}\n")
            fh.write(f"# cutoff={self.cutoff}\n")
            fh.write("row,col,re,im\n")
            rows, cols = np.nonzero(self.matrix)
            for r, c in zip(rows.tolist(), cols.tolist()):
                v = complex(self.matrix[r, c])
                fh.write(f"{r},{c},{v.real!r},{v.imag!r}\n")


def _pair_annihilation(cutoff: int):
    a = annihilation_matrix(cutoff + 1)
    eye = np.eye(cutoff + 1)
    return np.kron(a, eye), np.kron(eye, a)


def _unitary_from_hermitian(h: np.ndarray, phase: float) -> np.ndarray:
    """exp(i*phase*h) for Hermitian h, via eigendecomposition."""
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * phase * vals)) @ vecs.conj().T


def swap_operator(cutoff: int) -> TruncatedOperator:
    """Two-mode SWAP as the exact permutation |m,n> -> |n,m>."""
    if cutoff < 1:
        raise InvalidArgumentError("swap_operator needs cutoff >= 1")
    d = cutoff + 1
    mat = np.zeros((d * d, d * d))
    for m in range(d):
        for n in range(d):
            mat[n * d + m, m * d + n] = 1.0
    return TruncatedOperator(modes=2, cutoff=cutoff, matrix=mat)


def swap_operator_exponential(cutoff: int) -> TruncatedOperator:
    """SWAP as exp[i*pi*b'b] with b = (a1 - a2)/sqrt(2).

    Agrees with the permutation form exactly on total-photon sectors that
    fit inside the cutoff; the boundary sectors are distorted because the
    truncated b'b is not the true number operator there.
    """
    if cutoff < 1:
        raise InvalidArgumentError("swap_operator_exponential needs cutoff >= 1")
    a1, a2 = _pair_annihilation(cutoff)
    b = (a1 - a2) / math.sqrt(2.0)
    mat = _unitary_from_hermitian(b.conj().T @ b, math.pi)
    return TruncatedOperator(modes=2, cutoff=cutoff, matrix=mat)


def swap_quadrature_form(cutoff: int) -> TruncatedOperator:
    """SWAP as exp[(i*pi/4)((x1-x2)^2 + (p1-p2)^2 - 2)].

    The exponent equals pi*b'b up to truncation, but the quadrature
    squares reach one level further than b'b does, so the safe subspace
    loses an extra level relative to swap_operator_exponential.
    """
    if cutoff < 1:
        raise InvalidArgumentError("swap_quadrature_form needs cutoff >= 1")
    a1, a2 = _pair_annihilation(cutoff)
    x_rel = (a1 + a1.conj().T - a2 - a2.conj().T) / math.sqrt(2.0)
    p_rel = -1j * (a1 - a1.conj().T - a2 + a2.conj().T) / math.sqrt(2.0)
    h = x_rel @ x_rel + p_rel @ p_rel - 2.0 * np.eye(a1.shape[0])
    mat = _unitary_from_hermitian(h, math.pi / 4.0)
    return TruncatedOperator(modes=2, cutoff=cutoff, matrix=mat)


def displaced_parity(alpha: complex, cutoff: int) -> TruncatedOperator:
    """D(alpha) Pi D(alpha)' on a single truncated mode.

    Tr[rho * Pi(alpha)] / pi is the Wigner function at the phase-space
    point (sqrt(2) Re alpha, sqrt(2) Im alpha). Displacements comparable
    to the cutoff scale push weight past the truncation and degrade this;
    a warning marks that regime.
    """
    if cutoff < 1:
        raise InvalidArgumentError("displaced_parity needs cutoff >= 1")
    alpha = complex(alpha)
    if abs(alpha) > 0.5 * math.sqrt(cutoff):
        warnings.warn(
            f"|alpha|={abs(alpha):.3f} is large for cutoff {cutoff}; "
            "displaced parity is only reliable for |alpha| <~ sqrt(cutoff)/2",
            TruncationWarning,
            stacklevel=2,
        )
    d = cutoff + 1
    a = annihilation_matrix(d)
    h = -1j * (alpha * a.conj().T - np.conj(alpha) * a)
    disp = _unitary_from_hermitian(h, 1.0)
    parity = np.where(np.arange(d) % 2 == 0, 1.0, -1.0)
    mat = (disp * parity) @ disp.conj().T
    return TruncatedOperator(modes=1, cutoff=cutoff, matrix=mat)


@lru_cache(maxsize=16)
def _plain_hermgauss(order: int):
    """Raw Gauss-Hermite rule; the weight e^{-t^2} stays with the rule.

    The O_m integrand is a pure polynomial after the shared Gaussian of the
    parity kernels is folded into the substitution, so the standard rule
    applies directly (unlike quadrature.hermgauss_cached, whose weights
    expect the integrand to carry its own decay).
    """
    return np.polynomial.hermite.hermgauss(order)


def _parity_kernel_batch(x: np.ndarray, p: np.ndarray, dim: int) -> np.ndarray:
    """Matrix elements of Pi(alpha) *without* the e^{-2|alpha|^2} factor.

    <m|D(a) Pi D(a)'|n> = pi * W_{|n><m|}(x, p) at x = sqrt(2) Re a,
    p = sqrt(2) Im a. fock_kernel_values[m, n] holds W_{|m><n|}, so the
    parity elements are its conjugate; stripping the shared Gaussian
    leaves the polynomial part, which is what tensor Gauss-Hermite
    integration wants.
    """
    return np.conj(fock_kernel_values(x, p, dim, include_envelope=False))


def _kron_power_accumulate(kernels, weights, m, side):
    """sum_p weights[p] * kron^m(kernels[p]), organized as matrix products.

    Work in the vectorized index (row, col) per copy: the weighted sum of
    outer powers is a tall GEMM, and a single axis transpose at the end
    regroups (r1,c1,...,rm,cm) into kron's (r1..rm, c1..cm) layout.
    """
    d2 = kernels.shape[1] * kernels.shape[2]
    flat = kernels.reshape(-1, d2)
    batch = max(1, _KRON_BATCH_FLOATS // (d2 ** (m - 1)))
    gram = np.zeros((d2 ** (m - 1), d2), dtype=complex)
    for start in range(0, flat.shape[0], batch):
        fb = flat[start : start + batch]
        wb = weights[start : start + batch]
        if m == 2:
            lead = fb
        else:
            lead = (fb[:, :, None] * fb[:, None, :]).reshape(fb.shape[0], d2 * d2)
        gram += (wb[:, None] * lead).T @ fb
    d = kernels.shape[1]
    tensor = gram.reshape((d, d) * m)
    order = list(range(0, 2 * m, 2)) + list(range(1, 2 * m, 2))
    return np.transpose(tensor, order).reshape(side, side)


def multicopy_observable(
    m: int,
    cutoff: int,
    alpha_quadrature_order: int | None = None,
    max_side: int = DEFAULT_MAX_SIDE,
) -> TruncatedOperator:
    """The m-copy observable O_m with Tr[rho^(x)m O_m] = w_m.

    O_m = (2/pi^m) * integral of Pi(alpha)^(x)m over the alpha plane.
    Matrix elements of Pi(alpha) are polynomials times e^{-2|alpha|^2};
    the m-fold product carries e^{-2m|alpha|^2}, so rescaling
    alpha = (t_re + i t_im)/sqrt(2m) turns the integral into a tensor
    Gauss-Hermite sum that is *exact* once the order exceeds
    m*cutoff + 1. The constant makes the vacuum come out at
    w_m = 1/(m*pi^{m-1}); every other state is then an independent
    check, and for m=2 the whole matrix collapses to SWAP/(2pi).
    """
    if m not in (2, 3):
        raise UnsupportedOperationError("multicopy_observable supports m in {2, 3}")
    if cutoff < 1:
        raise InvalidArgumentError("multicopy_observable needs cutoff >= 1")
    d = cutoff + 1
    side = d**m
    if side > max_side:
        raise SizeLimitError(
            f"m={m} copies at cutoff {cutoff} give side {side} > limit {max_side}"
        )
    exact_order = m * cutoff + 3
    order = alpha_quadrature_order
    if order is None:
        order = max(DEFAULT_ALPHA_ORDER, exact_order)
    elif order < exact_order:
        warnings.warn(
            f"alpha order {order} is below the exactness threshold {exact_order} "
            f"for m={m}, cutoff {cutoff}",
            TruncationWarning,
            stacklevel=2,
        )
    nodes, weights = _plain_hermgauss(order)
    # alpha = (t_i + i t_j)/sqrt(2m); the kernel wants x = sqrt(2) Re alpha.
    axis = nodes / math.sqrt(m)
    xg, pg = np.meshgrid(axis, axis, indexing="ij")
    kernels = _parity_kernel_batch(xg.ravel(), pg.ravel(), d)
    w2d = np.outer(weights, weights).ravel()
    total = _kron_power_accumulate(kernels, w2d, m, side)
    # d^2 alpha = dt_re dt_im / (2m); prefactor 2/pi^m.
    total *= 2.0 / (math.pi**m) / (2.0 * m)
    total = 0.5 * (total + total.conj().T)
    return TruncatedOperator(modes=m, cutoff=cutoff, matrix=total)


def _as_density_matrix(rho) -> np.ndarray:
    if isinstance(rho, FockState):
        return rho.matrix
    mat = np.asarray(rho, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidArgumentError("density matrix must be square")
    return mat


def multicopy_expectation(operator: TruncatedOperator, rhos) -> complex:
    """Tr[(rho_1 x ... x rho_n) O] without materializing the tensor product."""
    mats = [_as_density_matrix(r) for r in rhos]
    if len(mats) != operator.modes:
        raise InvalidArgumentError(
            f"operator couples {operator.modes} registers, got {len(mats)} states"
        )
    d = operator.dim
    for mat in mats:
        if mat.shape[0] != d:
            raise InvalidArgumentError(
                f"state dimension {mat.shape[0]} does not match register dimension {d}"
            )
    n = len(mats)
    tensor = operator.matrix.reshape((d,) * (2 * n))
    # Tr[(A x B) O] contracts O[row, col] with A[col_1, row_1] B[col_2, row_2].
    letters = "abcdefghijkl"
    rows = letters[:n]
    cols = letters[n : 2 * n]
    subs = [rows + cols] + [cols[i] + rows[i] for i in range(n)]
    return complex(np.einsum(",".join(subs) + "->", tensor, *mats, optimize=True))


def _register_permutations(dim_per_mode: int, copies: int):
    """Adjacent-swap and cyclic permutation arrays on (A,B) register pairs.

    Index layout is copy-major: copy i contributes axes (a_i, b_i). Each
    permutation is an int array P with P[r] = image of basis state r.
    """
    axes = (dim_per_mode,) * (2 * copies)
    grid = np.arange(dim_per_mode ** (2 * copies)).reshape(axes)

    def swap_register(reg: int, i: int, j: int) -> np.ndarray:
        return np.swapaxes(grid, 2 * i + reg, 2 * j + reg).ravel()

    def cyclic() -> np.ndarray:
        # copy i receives the contents of copy i+1 (wrapping), which is what
        # the forward chain of adjacent swaps composes into
        order = []
        for i in range(copies):
            src = (i - 1) % copies
            order.extend([2 * src, 2 * src + 1])
        return np.transpose(grid, axes=order).ravel()

    return swap_register, cyclic


def forward_backward_protocol(
    state: FockState, m: int = 3, max_side: int = DEFAULT_MAX_SIDE
) -> float:
    """Tr[rho^(x)m P_cyc] for a two-mode state, i.e. Tr[rho^m].

    Builds the cyclic permutation of m copies the way the measurement
    runs it: a forward chain of adjacent SWAPs on the first register of
    each copy and the matching chain on the second register, then checks
    that the composed permutation is exactly the m-cycle before taking
    the trace. Pure states give 1; the value is a purity diagnostic to
    report next to w_m, not a Wigner moment.
    """
    if not isinstance(state, FockState) or state.modes != 2:
        raise InvalidArgumentError("forward_backward_protocol needs a two-mode FockState")
    if m < 2:
        raise InvalidArgumentError("forward_backward_protocol needs m >= 2")
    dm = state.dim
    side = (dm * dm) ** m
    if side > max_side:
        raise SizeLimitError(
            f"{m} copies of a two-mode state at cutoff {dm - 1} give side "
            f"{side} > limit {max_side}"
        )
    swap_register, cyclic = _register_permutations(dm, m)

    composed = np.arange(side)
    for reg in (0, 1):
        for i in range(m - 1):
            composed = swap_register(reg, i, i + 1)[composed]
    target = cyclic()
    if not np.array_equal(composed, target):
        raise RuntimeError("adjacent-swap chain failed to compose into the cycle")

    # Tr[rho^(x)m P] = sum_r (rho^(x)m)[r, P(r)]; with P the cycle this
    # contracts copy i's column index into copy i+1's row index.
    rho = state.matrix
    letters = "abcdefghijkl"[:m]
    subs = [letters[i] + letters[(i - 1) % m] for i in range(m)]
    value = complex(np.einsum(",".join(subs) + "->", *([rho] * m), optimize=True))
    if abs(value.imag) > 1e-10:
        raise RuntimeError(f"cyclic trace came out non-real: {value}")
    return float(value.real)
