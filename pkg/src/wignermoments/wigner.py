"""Wigner function evaluators, marginals, and Weyl symbols.

Every evaluator is wrapped in a WignerField carrying its Gaussian decay
envelope and (when known) the polynomial degree of W * exp(+envelope), which
is what makes the Gauss-Hermite moment path exact. The catalog closed forms
were derived from the kets in the x = (a + a^dag)/sqrt(2) convention with
transform normalization 1/(2 pi)^k, so the vacuum is W = (1/pi) e^{-x^2-p^2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import eval_laguerre

from .errors import (
    DegenerateCovarianceError,
    InvalidArgumentError,
    UnsupportedOperationError,
)
from .quadrature import (
    GaussianEnvelope,
    GridSpec,
    gauss_hermite_integral,
    hermgauss_cached,
)
from .states import (
    Fock,
    FockCustom,
    FockState,
    GaussianCustom,
    GaussianState,
    MixedFock01,
    Noon,
    Spssv,
    StateSpec,
    Tmsv,
    spec_label,
    state_from_spec,
)

__all__ = [
    "WignerField",
    "dilate",
    "expectation_phase_space",
    "fock_kernel_values",
    "marginal_x",
    "marginal_p",
    "weyl_symbol",
    "wigner_analytic",
    "wigner_fock_synthesis",
    "wigner_gaussian",
    "wigner_grid",
]

REAL_TOL = 1e-10

# Chunk size for point batches in the Fock-synthesis evaluators; two-mode
# synthesis materializes (chunk, dim, dim) kernel blocks.
SYNTH_BLOCK_FLOATS = 8_000_000


@dataclass(frozen=True)
class WignerField:
    """A Wigner function with its decay envelope.

    evaluate maps an (n, 2 * modes) array of phase-space points (ordered
    x_1..x_k, p_1..p_k) to n real values. polynomial_degree is the total
    degree of W * exp(+(z - c)^T Q (z - c)) when that product is polynomial,
    else None.
    """

    modes: int
    evaluate: callable
    envelope: GaussianEnvelope
    polynomial_degree: int | None
    label: str = ""

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        if single:
            points = points[None, :]
        if points.ndim != 2 or points.shape[1] != 2 * self.modes:
            raise InvalidArgumentError(
                f"points must have shape (n, {2 * self.modes}), got {points.shape}"
            )
        values = self.evaluate(points)
        return float(values[0]) if single else values


def _require_real(values, what: str) -> np.ndarray:
    imag = np.max(np.abs(values.imag)) if np.iscomplexobj(values) else 0.0
    if imag > REAL_TOL:
        raise InvalidArgumentError(f"{what} produced imaginary residue {imag:.2e}")
    return np.ascontiguousarray(values.real) if np.iscomplexobj(values) else values


# ---------------------------------------------------------------------------
# catalog closed forms


def _fock_field(n: int) -> WignerField:
    def evaluate(z):
        u = z[:, 0] ** 2 + z[:, 1] ** 2
        return ((-1.0) ** n / math.pi) * np.exp(-u) * eval_laguerre(n, 2.0 * u)

    return WignerField(
        modes=1,
        evaluate=evaluate,
        envelope=GaussianEnvelope(np.eye(2), np.zeros(2)),
        polynomial_degree=2 * n,
        label=f"fock(n={n})",
    )


def _noon_field(N: int, phi: float) -> WignerField:
    # rho = (|N0> + e^{i phi}|0N>)(h.c.)/2 expanded into kernel products:
    # diagonal parts are Fock x vacuum Wigner products, the cross term is
    # (2^N / pi^2 N!) e^{-u1-u2} Re[e^{-i phi} (x1-ip1)^N (x2+ip2)^N].
    cross_scale = 2.0**N / (math.pi**2 * math.gamma(N + 1))

    def evaluate(z):
        x1, x2, p1, p2 = z[:, 0], z[:, 1], z[:, 2], z[:, 3]
        u1 = x1 * x1 + p1 * p1
        u2 = x2 * x2 + p2 * p2
        gauss = np.exp(-u1 - u2)
        sign = (-1.0) ** N
        diag = (sign / (2.0 * math.pi**2)) * (
            eval_laguerre(N, 2.0 * u1) + eval_laguerre(N, 2.0 * u2)
        )
        cross_phase = (x1 - 1j * p1) ** N * (x2 + 1j * p2) ** N
        cross = cross_scale * (np.exp(-1j * phi) * cross_phase).real
        return gauss * (diag + cross)

    return WignerField(
        modes=2,
        evaluate=evaluate,
        envelope=GaussianEnvelope(np.eye(4), np.zeros(4)),
        polynomial_degree=2 * N,
        label=f"noon(N={N},phi={float(phi)!r})",
    )


def _squeezed_pair_envelope(r: float) -> GaussianEnvelope:
    # quadratic form of exp[2s(x1 x2 - p1 p2) - c(u1 + u2)] in
    # (x1, x2, p1, p2); eigenvalues c -+ s = e^{-+2r} > 0.
    c = math.cosh(2.0 * r)
    s = math.sinh(2.0 * r)
    form = np.zeros((4, 4))
    form[0, 0] = form[1, 1] = form[2, 2] = form[3, 3] = c
    form[0, 1] = form[1, 0] = -s
    form[2, 3] = form[3, 2] = s
    return GaussianEnvelope(form, np.zeros(4))


def _tmsv_field(r: float) -> WignerField:
    c = math.cosh(2.0 * r)
    s = math.sinh(2.0 * r)

    def evaluate(z):
        x1, x2, p1, p2 = z[:, 0], z[:, 1], z[:, 2], z[:, 3]
        expo = 2.0 * s * (x1 * x2 - p1 * p2) - c * (
            x1 * x1 + p1 * p1 + x2 * x2 + p2 * p2
        )
        return np.exp(expo) / math.pi**2

    return WignerField(
        modes=2,
        evaluate=evaluate,
        envelope=_squeezed_pair_envelope(r),
        polynomial_degree=0,
        label=f"tmsv(r={float(r)!r})",
    )


def _spssv_field(r: float, parity: int) -> WignerField:
    c = math.cosh(2.0 * r)
    s = math.sinh(2.0 * r)
    # parity 1: difference-quadrature polynomial; parity 0: sum-quadrature.
    comb = -1.0 if parity == 1 else 1.0
    poly_sign = s if parity == 1 else -s

    def evaluate(z):
        x1, x2, p1, p2 = z[:, 0], z[:, 1], z[:, 2], z[:, 3]
        u = x1 + comb * x2
        v = p1 + comb * p2
        expo = 2.0 * s * (x1 * x2 - p1 * p2) - c * (
            x1 * x1 + p1 * p1 + x2 * x2 + p2 * p2
        )
        poly = c * (u * u + v * v) + poly_sign * (u * u - v * v) - 1.0
        return np.exp(expo) * poly / math.pi**2

    return WignerField(
        modes=2,
        evaluate=evaluate,
        envelope=_squeezed_pair_envelope(r),
        polynomial_degree=2,
        label=f"spssv(r={float(r)!r},parity={parity})",
    )


def _mixed01_field(lam: float) -> WignerField:
    a = 2.0 * lam - 1.0
    b = 2.0 * (1.0 - lam)

    def evaluate(z):
        u = z[:, 0] ** 2 + z[:, 1] ** 2
        return np.exp(-u) * (a + b * u) / math.pi

    return WignerField(
        modes=1,
        evaluate=evaluate,
        envelope=GaussianEnvelope(np.eye(2), np.zeros(2)),
        polynomial_degree=2,
        label=f"mixed01(lam={float(lam)!r})",
    )


def wigner_analytic(spec: StateSpec) -> WignerField:
    """Closed-form Wigner function for a state spec.

    Custom specs are routed to the Gaussian/synthesis evaluators so the
    function is total over StateSpec.
    """
    if isinstance(spec, Fock):
        return _fock_field(spec.n)
    if isinstance(spec, Noon):
        return _noon_field(spec.N, spec.phi)
    if isinstance(spec, Tmsv):
        return _tmsv_field(spec.r)
    if isinstance(spec, Spssv):
        return _spssv_field(spec.r, spec.parity)
    if isinstance(spec, MixedFock01):
        return _mixed01_field(spec.lam)
    if isinstance(spec, GaussianCustom):
        return wigner_gaussian(state_from_spec(spec))
    if isinstance(spec, FockCustom):
        return wigner_fock_synthesis(state_from_spec(spec), label=spec_label(spec))
    raise InvalidArgumentError(f"unknown state spec {spec!r}")


def wigner_gaussian(state: GaussianState) -> WignerField:
    """W = exp(-(z-mu)^T sigma^{-1} (z-mu)/2) / ((2 pi)^k sqrt(det sigma))."""
    inv_cov = np.linalg.inv(state.covariance)
    norm = 1.0 / (
        (2.0 * math.pi) ** state.modes * math.sqrt(np.linalg.det(state.covariance))
    )
    mean = state.mean

    def evaluate(z):
        v = z - mean
        return norm * np.exp(-0.5 * np.einsum("ni,ij,nj->n", v, inv_cov, v))

    return WignerField(
        modes=state.modes,
        evaluate=evaluate,
        envelope=GaussianEnvelope(inv_cov / 2.0, mean.copy()),
        polynomial_degree=0,
        label=f"gaussian(k={state.modes})",
    )


# ---------------------------------------------------------------------------
# Fock-basis synthesis


def fock_kernel_values(x, p, dim: int, include_envelope: bool = True) -> np.ndarray:
    """Cross-Wigner kernel matrices K[m, n](x, p) for m, n < dim.

    K[m, n] is the Wigner transform of |n><m| (so that sum rho[m, n] K[m, n]
    is the Wigner function of rho). For m >= n, with u = x^2 + p^2:

        K[m, n] = ((-1)^n / pi) sqrt(2^{m-n} n! / m!) (x - ip)^{m-n}
                  e^{-u} L_n^{(m-n)}(2u)

    and K[n, m] = conj(K[m, n]). With include_envelope=False the factor
    e^{-u} / pi is dropped (used where the Gaussian is folded into a
    quadrature weight). Returns shape (len(x), dim, dim), complex.
    """
    x = np.asarray(x, dtype=float).ravel()
    p = np.asarray(p, dtype=float).ravel()
    u = x * x + p * p
    two_u = 2.0 * u
    xi = x - 1j * p
    out = np.empty((x.size, dim, dim), dtype=complex)
    for off in range(dim):
        xipow = xi**off if off else np.ones_like(xi)
        coupling = math.sqrt(2.0**off / math.gamma(off + 1))  # B(0, off)
        lag_prev = np.zeros(0)
        lag = np.ones(x.size)
        for n in range(dim - off):
            if n == 1:
                lag_prev, lag = lag, (1.0 + off) - two_u
            elif n > 1:
                lag_prev, lag = lag, (
                    (2.0 * n - 1.0 + off - two_u) * lag - (n - 1.0 + off) * lag_prev
                ) / n
            if n > 0:
                coupling *= math.sqrt(n / (n + off))
            sign = -1.0 if n % 2 else 1.0
            vals = (sign * coupling) * xipow * lag
            out[:, n + off, n] = vals
            if off:
                out[:, n, n + off] = np.conj(vals)
    if include_envelope:
        out *= (np.exp(-u) / math.pi)[:, None, None]
    return out


def _synth_values_one_mode(rho: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Streaming sum rho[m, n] K[m, n] without materializing kernels."""
    x = z[:, 0]
    p = z[:, 1]
    u = x * x + p * p
    two_u = 2.0 * u
    xi = x - 1j * p
    dim = rho.shape[0]
    acc = np.zeros(x.size)
    xipow = np.ones(x.size, dtype=complex)
    for off in range(dim):
        if off:
            xipow = xipow * xi
        coupling = math.sqrt(2.0**off / math.gamma(off + 1))
        lag_prev = np.zeros(0)
        lag = np.ones(x.size)
        for n in range(dim - off):
            if n == 1:
                lag_prev, lag = lag, (1.0 + off) - two_u
            elif n > 1:
                lag_prev, lag = lag, (
                    (2.0 * n - 1.0 + off - two_u) * lag - (n - 1.0 + off) * lag_prev
                ) / n
            if n > 0:
                coupling *= math.sqrt(n / (n + off))
            coeff = rho[n + off, n]
            if coeff == 0.0:
                continue
            sign = -1.0 if n % 2 else 1.0
            if off == 0:
                acc += (sign * coupling * coeff.real) * lag
            else:
                # rho[m,n] K[m,n] + rho[n,m] K[n,m] = 2 Re(rho[m,n] xi^off) * real part
                acc += (2.0 * sign * coupling) * (coeff * xipow).real * lag
    return acc * np.exp(-u) / math.pi


def _synth_values_two_mode(rho4: np.ndarray, z: np.ndarray) -> np.ndarray:
    dim = rho4.shape[0]
    d2 = dim * dim
    n = z.shape[0]
    # pair mode-1 row/col indices and mode-2 row/col indices:
    # W = sum rho4[m,a,n,b] K1[(m,n)] K2[(a,b)]
    rho_mat = np.ascontiguousarray(rho4.transpose(0, 2, 1, 3).reshape(d2, d2))
    pair1, idx1 = np.unique(z[:, [0, 2]], axis=0, return_inverse=True)
    if pair1.shape[0] * 4 <= n:
        # tensor-product quadrature grid: each mode sees only O(sqrt(n))
        # distinct points, so contract rho into the mode-1 kernels once and
        # finish each mode-1 group with a small matrix-vector product
        pair2, idx2 = np.unique(z[:, [1, 3]], axis=0, return_inverse=True)
        k1 = fock_kernel_values(pair1[:, 0], pair1[:, 1], dim).reshape(-1, d2)
        k2 = fock_kernel_values(pair2[:, 0], pair2[:, 1], dim).reshape(-1, d2)
        t1 = k1 @ rho_mat
        out = np.empty(n, dtype=complex)
        order = np.argsort(idx1, kind="stable")
        groups = np.split(order, np.flatnonzero(np.diff(idx1[order])) + 1)
        for rows in groups:
            out[rows] = k2[idx2[rows]] @ t1[idx1[rows[0]]]
        return _require_real(out, "two-mode synthesis")
    block = max(1, SYNTH_BLOCK_FLOATS // (2 * d2))
    out = np.empty(n)
    for start in range(0, n, block):
        sl = slice(start, min(start + block, n))
        k1 = fock_kernel_values(z[sl, 0], z[sl, 2], dim).reshape(-1, d2)
        k2 = fock_kernel_values(z[sl, 1], z[sl, 3], dim).reshape(-1, d2)
        vals = np.einsum("pi,ij,pj->p", k1, rho_mat, k2, optimize=True)
        out[sl] = _require_real(vals, "two-mode synthesis")
    return out


def wigner_fock_synthesis(state: FockState, label: str | None = None) -> WignerField:
    """Wigner function synthesized from a truncated density matrix."""
    if state.modes == 1:
        rho = state.matrix

        def evaluate(z):
            return _synth_values_one_mode(rho, z)

    else:
        d = state.dim
        rho4 = state.matrix.reshape(d, d, d, d)

        def evaluate(z):
            return _synth_values_two_mode(rho4, z)

    k = state.modes
    return WignerField(
        modes=k,
        evaluate=evaluate,
        envelope=GaussianEnvelope(np.eye(2 * k), np.zeros(2 * k)),
        polynomial_degree=2 * state.cutoff * k,
        label=label or f"fock_synthesis(k={k},cutoff={state.cutoff})",
    )


# ---------------------------------------------------------------------------
# derived quantities


def dilate(field: WignerField, c: float) -> WignerField:
    """Dilation W'(z) = c^{2k} W(c z); moments scale as c^{2k(m-1)} w_m."""
    if not (c > 0.0) or not math.isfinite(c):
        raise InvalidArgumentError(f"dilation factor must be positive, got {c}")
    k = field.modes
    scale = float(c) ** (2 * k)

    def evaluate(z):
        return scale * field.evaluate(c * z)

    return WignerField(
        modes=k,
        evaluate=evaluate,
        envelope=GaussianEnvelope(
            field.envelope.form * c * c, field.envelope.center / c
        ),
        polynomial_degree=field.polynomial_degree,
        label=f"dilate({field.label},c={float(c)!r})",
    )


def _marginal(field: WignerField, axis: int, values, order: int | None) -> np.ndarray:
    dims = 2 * field.modes
    rest = [i for i in range(dims) if i != axis]
    form = field.envelope.form
    center = field.envelope.center
    q_rr = form[np.ix_(rest, rest)]
    q_rf = form[rest, axis]
    if order is None:
        deg = field.polynomial_degree if field.polynomial_degree is not None else 60
        order = max(8, deg // 2 + 4)
    values = np.atleast_1d(np.asarray(values, dtype=float))
    # The reduced form q_rr is the same for every section; only the envelope
    # center slides with the fixed coordinate (completing the square in that
    # coordinate). One factorization serves all sections, so the sections
    # can be evaluated in a few large batches instead of point by point.
    try:
        chol = np.linalg.cholesky(q_rr)
    except np.linalg.LinAlgError as exc:
        raise DegenerateCovarianceError(
            f"marginal envelope is numerically singular or indefinite: {exc}"
        ) from exc
    jac = 1.0 / float(np.prod(np.diag(chol)))
    t, wt = hermgauss_cached(order)
    grids = np.meshgrid(*([t] * len(rest)), indexing="ij")
    tmesh = np.stack([g.ravel() for g in grids], axis=1)
    wmesh = np.ones(tmesh.shape[0])
    for g in np.meshgrid(*([wt] * len(rest)), indexing="ij"):
        wmesh = wmesh * g.ravel()
    offsets = solve_triangular(chol, tmesh.T, lower=True, trans="T").T
    slope = -np.linalg.solve(q_rr, q_rf)
    out = np.empty(values.size)
    batch = max(1, 500_000 // tmesh.shape[0])
    for start in range(0, values.size, batch):
        vals = values[start : start + batch]
        centers = center[rest][None, :] + slope[None, :] * (
            vals - center[axis]
        )[:, None]
        z = np.empty((vals.size, tmesh.shape[0], dims))
        z[:, :, rest] = centers[:, None, :] + offsets[None, :, :]
        z[:, :, axis] = vals[:, None]
        sections = field.evaluate(z.reshape(-1, dims)).reshape(vals.size, -1)
        out[start : start + vals.size] = jac * (sections @ wmesh)
    return out


def marginal_x(field: WignerField, mode: int, x, order: int | None = None):
    """Position marginal of one mode: all other coordinates integrated out."""
    if not (0 <= mode < field.modes):
        raise InvalidArgumentError(f"mode {mode} out of range for k={field.modes}")
    res = _marginal(field, mode, x, order)
    return float(res[0]) if np.isscalar(x) or np.asarray(x).ndim == 0 else res


def marginal_p(field: WignerField, mode: int, p, order: int | None = None):
    """Momentum marginal of one mode."""
    if not (0 <= mode < field.modes):
        raise InvalidArgumentError(f"mode {mode} out of range for k={field.modes}")
    res = _marginal(field, field.modes + mode, p, order)
    return float(res[0]) if np.isscalar(p) or np.asarray(p).ndim == 0 else res


# ---------------------------------------------------------------------------
# Weyl symbols


@lru_cache(maxsize=64)
def _plain_hermgauss(order: int):
    return np.polynomial.hermite.hermgauss(order)


def weyl_symbol(A, x, p, order: int | None = None):
    """Weyl symbol of a truncated operator at phase-space points.

    A~(x, p) = integral <x + y/2| A |x - y/2> e^{-i p y} dy, evaluated by a
    contour-shifted Gauss-Hermite rule that is exact for any matrix A:

        A~ = 2 e^{-x^2-p^2} sum_j w_j sum_{mn} A[m, n]
             h_m(x + t_j - ip) h_n(x - t_j + ip)

    with h_m the normalized Hermite polynomials (Fock wavefunctions without
    their Gaussian). Note the symbol is that of the truncated operator:
    projector-like A (identity, truncated quadratures) oscillate instead of
    converging pointwise, while sum rules against Wigner functions are exact.
    Returns a complex array (real for Hermitian A up to roundoff).
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"operator must be a square matrix, got {A.shape}")
    d = A.shape[0]
    if order is None:
        order = d + 6
    t, w = _plain_hermgauss(order)
    x = np.asarray(x, dtype=float).ravel()
    p = np.asarray(p, dtype=float).ravel()
    zp = x[:, None] + t[None, :] - 1j * p[:, None]
    zm = 2.0 * x[:, None] - zp
    hp = np.empty((d, x.size, order), dtype=complex)
    hm = np.empty((d, x.size, order), dtype=complex)
    hp[0] = hm[0] = math.pi**-0.25
    if d > 1:
        hp[1] = math.sqrt(2.0) * zp * hp[0]
        hm[1] = math.sqrt(2.0) * zm * hm[0]
    for m in range(2, d):
        hp[m] = zp * math.sqrt(2.0 / m) * hp[m - 1] - math.sqrt((m - 1) / m) * hp[m - 2]
        hm[m] = zm * math.sqrt(2.0 / m) * hm[m - 1] - math.sqrt((m - 1) / m) * hm[m - 2]
    g = np.einsum("mn,mpj,npj->pj", A, hp, hm, optimize=True)
    return 2.0 * np.exp(-(x * x + p * p)) * (g @ w)


def _symbol_factor_real(A, x, p, order=None) -> np.ndarray:
    vals = weyl_symbol(A, x, p, order)
    return _require_real(vals, "weyl symbol of Hermitian operator")


def expectation_phase_space(field: WignerField, A, order: int | None = None) -> float:
    """Tr[rho A] as the phase-space average integral W(z) A~(z) dz.

    A is a single Hermitian matrix for k = 1, or a sequence of per-mode
    Hermitian factors for k = 2 (the field's envelope must then be diagonal,
    which holds for synthesis-based fields). Exact for polynomial-degree
    fields and truncated operators.
    """
    if field.modes == 1:
        A = np.asarray(A, dtype=complex)
        if np.max(np.abs(A - A.conj().T)) > 1e-10:
            raise InvalidArgumentError("expectation requires a Hermitian operator")
        d = A.shape[0]
        env = field.envelope.combine(GaussianEnvelope(np.eye(2), np.zeros(2)))
        if order is None:
            deg_w = field.polynomial_degree if field.polynomial_degree is not None else 60
            order = max(8, (deg_w + 2 * (d - 1)) // 2 + 3)

        def integrand(z):
            return field.evaluate(z) * _symbol_factor_real(A, z[:, 0], z[:, 1])

        return gauss_hermite_integral(integrand, env, order)

    if field.modes == 2:
        try:
            a1, a2 = A
        except (TypeError, ValueError):
            raise InvalidArgumentError(
                "two-mode expectation takes a pair of per-mode operators"
            )
        a1 = np.asarray(a1, dtype=complex)
        a2 = np.asarray(a2, dtype=complex)
        for a in (a1, a2):
            if np.max(np.abs(a - a.conj().T)) > 1e-10:
                raise InvalidArgumentError("expectation requires Hermitian operators")
        env = field.envelope.combine(GaussianEnvelope(np.eye(4), np.zeros(4)))
        off_diag = env.form - np.diag(np.diag(env.form))
        if np.max(np.abs(off_diag)) > 1e-12:
            raise UnsupportedOperationError(
                "two-mode expectation needs a diagonal envelope; "
                "use a Fock-synthesis field"
            )
        if order is None:
            deg_w = field.polynomial_degree if field.polynomial_degree is not None else 60
            deg_a = 2 * (a1.shape[0] - 1) + 2 * (a2.shape[0] - 1)
            order = max(8, (deg_w + deg_a) // 2 + 3)
        return _expectation_two_mode_diagonal(field, a1, a2, env, order)

    raise UnsupportedOperationError("expectation supports 1 or 2 modes")


def _expectation_two_mode_diagonal(field, a1, a2, env, order: int) -> float:
    from .quadrature import hermgauss_cached

    t, wt = hermgauss_cached(order)
    q = np.diag(env.form)
    axes = [env.center[i] + t / math.sqrt(q[i]) for i in range(4)]
    jac = 1.0 / math.sqrt(float(np.prod(q)))
    # per-mode symbols on their own (x, p) subgrids; coords are (x1,x2,p1,p2)
    g1 = np.meshgrid(axes[0], axes[2], indexing="ij")
    g2 = np.meshgrid(axes[1], axes[3], indexing="ij")
    s1 = _symbol_factor_real(a1, g1[0].ravel(), g1[1].ravel()).reshape(order, order)
    s2 = _symbol_factor_real(a2, g2[0].ravel(), g2[1].ravel()).reshape(order, order)
    partials = []
    tail = np.meshgrid(axes[1], axes[2], axes[3], indexing="ij")
    z_tail = np.stack([g.ravel() for g in tail], axis=1)
    for i0 in range(order):
        z = np.empty((z_tail.shape[0], 4))
        z[:, 0] = axes[0][i0]
        z[:, 1:] = z_tail
        wvals = field.evaluate(z).reshape(order, order, order)
        # indices (b, c, d) = (x2, p1, p2); s1 row i0 rides on the p1 weight
        block = np.einsum(
            "bcd,b,c,d,bd->", wvals, wt, wt * s1[i0], wt, s2, optimize=True
        )
        partials.append(wt[i0] * float(block))
    return jac * math.fsum(partials)


# ---------------------------------------------------------------------------
# grid export


def wigner_grid(field: WignerField, grid: GridSpec):
    """Evaluate a single-mode field on a square grid for plotting/export.

    Returns (xs, ps, values) with values[i, j] = W(xs[i], ps[j]).
    """
    if field.modes != 1:
        raise UnsupportedOperationError("grid export supports single-mode fields")
    n = grid.points_per_axis
    xs = np.linspace(-grid.half_width, grid.half_width, n)
    ps = xs.copy()
    gx, gp = np.meshgrid(xs, ps, indexing="ij")
    values = field(np.stack([gx.ravel(), gp.ravel()], axis=1)).reshape(n, n)
    return xs, ps, values
