"""Wigner-function moments w_m = integral W^m and the negativity criterion.

Any state with a nonnegative Wigner function satisfies w_2^2 <= w_3, so
delta = w_2^2 - w_3 > 0 certifies negativity. The converse direction does
not hold (some negative-W states still have delta <= 0), hence the verdicts
are NegativityCertified / Inconclusive, never "positive".

The default integration path folds the field's Gaussian envelope (times m)
into the Gauss-Hermite weight, which is exact for every catalog state; a
uniform grid and a single-mode adaptive radial rule are available as
cross-checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.integrate import quad as scipy_quad

from .errors import InvalidArgumentError, UnsupportedOperationError
from .quadrature import (
    GaussianEnvelope,
    QuadratureSpec,
    gauss_hermite_integral,
    uniform_grid_integral,
)
from .states import (
    Fock,
    FockCustom,
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
from .wigner import WignerField, wigner_analytic, wigner_fock_synthesis, wigner_gaussian

__all__ = [
    "CERTIFIED",
    "INCONCLUSIVE",
    "MomentReport",
    "analyze",
    "field_for",
    "criterion",
    "holder_chain_check",
    "moment",
    "moment_gaussian_closed_form",
    "read_report",
    "sweep",
    "sweep_rows",
    "write_sweep_csv",
]

CERTIFIED = "NegativityCertified"
INCONCLUSIVE = "Inconclusive"
MARGIN_FLOOR = 1e-9

DEFAULT_HALF_WIDTH = {1: 7.0, 2: 6.0}
FALLBACK_DEGREE = 60  # order heuristic when a field has unbounded degree


def exactness_order(field: WignerField, m: int) -> int:
    """Per-axis Gauss-Hermite order that integrates W^m exactly."""
    deg = field.polynomial_degree
    if deg is None:
        deg = FALLBACK_DEGREE
    return max(8, (m * deg) // 2 + 2)


def moment(field: WignerField, m: int, quad: QuadratureSpec | None = None) -> float:
    """w_m = integral of W^m over phase space."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidArgumentError(f"moment order must be a positive int, got {m}")
    if quad is None:
        quad = QuadratureSpec(order=exactness_order(field, m))
    if quad.scheme == "gauss_hermite_tensor":
        env = GaussianEnvelope(field.envelope.form * m, field.envelope.center)
        return gauss_hermite_integral(
            lambda z: field.evaluate(z) ** m,
            env,
            quad.order,
            envelope_scale=quad.envelope_scale,
        )
    if quad.scheme == "uniform_grid":
        half = quad.half_width or DEFAULT_HALF_WIDTH.get(field.modes)
        if half is None:
            raise InvalidArgumentError(f"no default half_width for k={field.modes}")
        return uniform_grid_integral(
            lambda z: field.evaluate(z) ** m, 2 * field.modes, half, quad.order
        )
    if quad.scheme == "adaptive_radial":
        return _adaptive_radial_moment(field, m, quad)
    raise InvalidArgumentError(f"unknown scheme {quad.scheme!r}")


def _adaptive_radial_moment(field: WignerField, m: int, quad: QuadratureSpec) -> float:
    """Radius-adaptive rule for single-mode fields (angles by trapezoid)."""
    if field.modes != 1:
        raise UnsupportedOperationError("adaptive_radial supports single-mode fields")
    n_theta = max(16, quad.order)
    theta = np.linspace(0.0, 2.0 * math.pi, n_theta, endpoint=False)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    lam_min = float(np.linalg.eigvalsh(field.envelope.form)[0])
    r_max = quad.half_width or (
        float(np.max(np.abs(field.envelope.center))) + math.sqrt(60.0 / (m * lam_min))
    )

    def ring(r):
        pts = np.stack([r * cos_t, r * sin_t], axis=1)
        return r * float(np.mean(field.evaluate(pts) ** m)) * 2.0 * math.pi

    val, _ = scipy_quad(ring, 0.0, r_max, epsabs=1e-13, epsrel=1e-11, limit=200)
    return val


def moment_gaussian_closed_form(state: GaussianState, m: int) -> float:
    """w_m = ((2 pi)^k sqrt(det sigma))^{1-m} / m^k for Gaussian states.

    Always gives w_2^2 < w_3 (4^{-k} < 3^{-k}); Gaussian states are never
    certified, as they must not be.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidArgumentError(f"moment order must be a positive int, got {m}")
    k = state.modes
    det = float(np.linalg.det(state.covariance))
    norm = (2.0 * math.pi) ** k * math.sqrt(det)
    return norm ** (1 - m) / float(m) ** k


def criterion(w2: float, w3: float, margin: float = MARGIN_FLOOR) -> str:
    """Negativity verdict: certified only when w2^2 - w3 > margin (strict)."""
    if not (margin >= 0.0):
        raise InvalidArgumentError(f"margin must be >= 0, got {margin}")
    return CERTIFIED if w2 * w2 - w3 > margin else INCONCLUSIVE


# ---------------------------------------------------------------------------
# reports


@dataclass
class MomentReport:
    """Everything the detector concluded about one state."""

    state: str
    modes: int
    cutoff: int | None
    quadrature: QuadratureSpec
    moments: dict
    delta: float
    verdict: str
    est_error: float
    exactness_warning: bool = dataclass_field(default=False, compare=False)

    def to_json(self) -> str:
        payload = {
            "state": self.state,
            "k": self.modes,
            "cutoff": self.cutoff,
            "quadrature": {
                "scheme": self.quadrature.scheme,
                "order": self.quadrature.order,
            },
            "w": {str(m): self.moments[m] for m in sorted(self.moments)},
            "delta": self.delta,
            "verdict": self.verdict,
            "est_error": self.est_error,
        }
        return json.dumps(payload, indent=2)


REPORT_KEYS = {"state", "k", "cutoff", "quadrature", "w", "delta", "verdict", "est_error"}


def read_report(text: str) -> MomentReport:
    """Parse a report written by MomentReport.to_json; rejects unknown keys."""
    data = json.loads(text)
    unknown = set(data) - REPORT_KEYS
    if unknown:
        raise InvalidArgumentError(f"unknown report keys: {sorted(unknown)}")
    missing = REPORT_KEYS - set(data)
    if missing:
        raise InvalidArgumentError(f"missing report keys: {sorted(missing)}")
    qdata = data["quadrature"]
    if set(qdata) != {"scheme", "order"}:
        raise InvalidArgumentError(f"malformed quadrature block: {sorted(qdata)}")
    return MomentReport(
        state=data["state"],
        modes=int(data["k"]),
        cutoff=None if data["cutoff"] is None else int(data["cutoff"]),
        quadrature=QuadratureSpec(scheme=qdata["scheme"], order=int(qdata["order"])),
        moments={int(m): float(v) for m, v in data["w"].items()},
        delta=float(data["delta"]),
        verdict=str(data["verdict"]),
        est_error=float(data["est_error"]),
    )


def field_for(spec: StateSpec, cutoff: int | None):
    """Best evaluator path for a spec plus the Fock cutoff actually used.

    Catalog states default to their closed forms (cutoff None in the
    report); an explicit cutoff forces the truncated synthesis path instead.
    """
    if isinstance(spec, GaussianCustom):
        if cutoff is not None:
            raise InvalidArgumentError("Gaussian states take no cutoff")
        return wigner_gaussian(state_from_spec(spec)), None
    if isinstance(spec, FockCustom):
        state = state_from_spec(spec)
        return wigner_fock_synthesis(state, label=spec_label(spec)), state.cutoff
    if isinstance(spec, (Fock, Noon, Tmsv, Spssv, MixedFock01)):
        if cutoff is None:
            return wigner_analytic(spec), None
        state = state_from_spec(spec, cutoff)
        return (
            wigner_fock_synthesis(state, label=spec_label(spec)),
            state.cutoff,
        )
    raise InvalidArgumentError(f"unknown state spec {spec!r}")


def analyze(
    spec: StateSpec,
    max_m: int = 3,
    quad: QuadratureSpec | None = None,
    cutoff: int | None = None,
) -> MomentReport:
    """Compute w_1..w_max_m, the criterion verdict, and an error estimate.

    est_error is the largest |w_m(order) - w_m(2 order)| over m >= 2; the
    certification margin is max(1e-9, 3 est_error), so a verdict is only
    Certified when delta clears the quadrature error budget.
    """
    if max_m < 3:
        raise InvalidArgumentError("max_m must be >= 3 (criterion needs w2, w3)")
    field, used_cutoff = field_for(spec, cutoff)
    if quad is None:
        quad = QuadratureSpec(order=exactness_order(field, max_m))
    warn = False
    if quad.scheme == "gauss_hermite_tensor":
        warn = quad.order < exactness_order(field, max_m)
    moments = {m: moment(field, m, quad) for m in range(1, max_m + 1)}
    doubled = QuadratureSpec(
        scheme=quad.scheme,
        order=2 * quad.order,
        envelope_scale=quad.envelope_scale,
        half_width=quad.half_width,
    )
    est_error = max(
        abs(moments[m] - moment(field, m, doubled)) for m in range(2, max_m + 1)
    )
    delta = moments[2] ** 2 - moments[3]
    verdict = criterion(moments[2], moments[3], max(MARGIN_FLOOR, 3.0 * est_error))
    return MomentReport(
        state=field.label or spec_label(spec),
        modes=field.modes,
        cutoff=used_cutoff,
        quadrature=quad,
        moments=moments,
        delta=delta,
        verdict=verdict,
        est_error=est_error,
        exactness_warning=warn,
    )


# ---------------------------------------------------------------------------
# sweeps


SWEEP_FAMILIES = ("fock", "noon", "mixed01", "tmsv", "spssv")


def _sweep_spec(family: str, value):
    if family == "fock":
        return Fock(int(value))
    if family == "noon":
        return Noon(int(value))
    if family == "mixed01":
        return MixedFock01(float(value))
    if family == "tmsv":
        return Tmsv(float(value))
    if family == "spssv":
        return Spssv(float(value))
    raise InvalidArgumentError(
        f"unknown sweep family {family!r}; expected one of {SWEEP_FAMILIES}"
    )


def sweep(family: str, values, quad: QuadratureSpec | None = None):
    """Analyze a one-parameter family; returns [(param, MomentReport)]."""
    return [(value, analyze(_sweep_spec(family, value), quad=quad)) for value in values]


def sweep_rows(results) -> list[str]:
    """CSV rows (param,w2,w3,delta,verdict) for a sweep result."""
    lines = ["param,w2,w3,delta,verdict"]
    for value, report in results:
        lines.append(
            f"{_fmt(value)},{_fmt(report.moments[2])},{_fmt(report.moments[3])},"
            f"{_fmt(report.delta)},{report.verdict}"
        )
    return lines


def write_sweep_csv(results, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(sweep_rows(results)) + "\n")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


# ---------------------------------------------------------------------------
# Hoelder-chain diagnostics


def holder_chain_check(
    field: WignerField,
    quad: QuadratureSpec | None = None,
    method: str = "auto",
) -> dict:
    """Norm inequalities behind the criterion, computed on |W|.

    Returns the norms ||W||_1, ||W||_{3/2}, ||W||_2, ||W||_3 plus booleans
    for ||W||_2^2 <= ||W||_3 ||W||_{3/2} (Hoelder with exponents 3 and 3/2)
    and ||W||_{3/2} <= ||W||_2^{2/3} ||W||_1^{1/3} (interpolation). Both hold
    for every state because the integrands use |W|; only ||W||_1 = 1
    distinguishes nonnegative Wigner functions.

    |W|^p has kinks where W crosses zero, so these integrals converge
    instead of being exact. The Gauss-Hermite default reaches ~1e-3, enough
    for the inequalities (their slack is a few percent); method="radial"
    (single mode) runs an adaptive radial rule that resolves the kink
    circles to ~1e-9 when a precise norm value is wanted.
    """
    if method not in ("auto", "gauss_hermite", "radial"):
        raise InvalidArgumentError(f"unknown holder method {method!r}")
    ps = (1.0, 1.5, 2.0, 3.0)
    if method == "radial":
        if field.modes != 1:
            raise UnsupportedOperationError("radial norms support single-mode fields")
        norms = {p: _holder_norm_radial(field, p) for p in ps}
    else:
        if quad is None:
            smooth = field.polynomial_degree == 0
            order = 12 if smooth else (96 if field.modes == 1 else 24)
            quad = QuadratureSpec(order=order)
        norms = {}
        for p in ps:
            env = GaussianEnvelope(field.envelope.form * p, field.envelope.center)
            val = gauss_hermite_integral(
                lambda z, _p=p: np.abs(field.evaluate(z)) ** _p,
                env,
                quad.order,
                envelope_scale=quad.envelope_scale,
            )
            norms[p] = val ** (1.0 / p)
    slack = 1e-9
    return {
        "norm_1": norms[1.0],
        "norm_3_2": norms[1.5],
        "norm_2": norms[2.0],
        "norm_3": norms[3.0],
        "holder_ok": norms[2.0] ** 2 <= norms[3.0] * norms[1.5] * (1.0 + 1e-8) + slack,
        "interpolation_ok": norms[1.5]
        <= norms[2.0] ** (2.0 / 3.0) * norms[1.0] ** (1.0 / 3.0) * (1.0 + 1e-8) + slack,
    }


def _holder_norm_radial(field: WignerField, p: float, n_theta: int = 256) -> float:
    theta = np.linspace(0.0, 2.0 * math.pi, n_theta, endpoint=False)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    lam_min = float(np.linalg.eigvalsh(field.envelope.form)[0])
    r_max = float(np.max(np.abs(field.envelope.center))) + math.sqrt(
        60.0 / (p * lam_min)
    )

    def ring(r):
        pts = np.stack([r * cos_t, r * sin_t], axis=1)
        return r * float(np.mean(np.abs(field.evaluate(pts)) ** p)) * 2.0 * math.pi

    val, _ = scipy_quad(ring, 0.0, r_max, epsabs=1e-13, epsrel=1e-11, limit=300)
    return val ** (1.0 / p)
