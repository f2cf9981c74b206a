"""Moment-based detection of Wigner negativity for bosonic states.

The integrals w_m of the m-th power of a Wigner function obey
w_2^2 <= w_3 whenever W is pointwise nonnegative, so measuring
w_2^2 - w_3 > 0 certifies Wigner negativity without tomography. The
package computes these moments exactly for a catalog of states (Fock,
NOON, two-mode squeezed vacuum, squeezed single-photon pairs, 0/1
mixtures, arbitrary Gaussians and truncated density matrices), checks
the criterion with explicit error margins, and realizes the moments as
multi-copy expectation values of SWAP/permutation-type observables.

Submodules are imported lazily so that process-level knobs (thread-count
environment variables read by `wignermoments.cli`) can take effect before
numpy initializes its thread pools.
"""

from importlib import import_module

__version__ = "0.1.0"

_SUBMODULES = (
    "cli",
    "errors",
    "moments",
    "multicopy",
    "oracle",
    "quadrature",
    "soundness",
    "states",
    "wigner",
)

__all__ = list(_SUBMODULES) + ["__version__"]


def __getattr__(name):
    if name in _SUBMODULES:
        return import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
