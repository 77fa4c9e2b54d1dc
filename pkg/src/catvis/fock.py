"""Truncated Fock-space representations of coherent and cat states.

Single-mode states are complex amplitude vectors over photon number,
``amplitudes[n] = <n|psi>`` for ``n = 0 .. cutoff-1``.  Sub-normalized
vectors are legitimate states here: post-selected branches carry norm < 1
and nothing in this package renormalizes behind the caller's back.

Coherent amplitudes use the multiplicative recurrence
``a[n] = a[n-1] * alpha / sqrt(n)``, so no factorial is ever formed and the
generation stays stable far past n = 170 where n! overflows a float.

The exact label algebra ``<alpha|beta> = exp(-|alpha|^2/2 - |beta|^2/2 +
conj(alpha) * beta)`` lives alongside the truncated vectors.  The two tracks
are independent implementations; the test suite holds them together.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_TAIL_TOL",
    "CoherentLabel",
    "TruncationWarning",
    "ModeState",
    "CatSpec",
    "default_cutoff",
    "vacuum_fock",
    "coherent_fock",
    "coherent_overlap",
    "cat_norm_constant",
    "cat_fock",
]

# A coherent state enters the analytic track purely through its complex label.
CoherentLabel = complex

#: Largest photon-number tail mass tolerated by the physical-state builders.
DEFAULT_TAIL_TOL = 1e-12

_NORM_SLACK = 1e-12


class TruncationWarning(UserWarning):
    """Photon-number truncation is discarding more amplitude than tolerated."""


def default_cutoff(alpha: CoherentLabel) -> int:
    """Cutoff that keeps the Poisson tail of ``|alpha>`` below ~1e-12.

    Mean photon number plus eight standard deviations plus headroom:
    ``ceil(|alpha|^2 + 8 |alpha| + 10)``.
    """
    a = abs(alpha)
    return math.ceil(a * a + 8.0 * a + 10.0)


@dataclass(frozen=True)
class ModeState:
    """One bosonic mode as a truncated photon-number amplitude vector.

    Instances are immutable (the array is marked read-only) so they can be
    shared freely across threads; every operation returns a new state.
    Squared norm must land in [0, 1 + 1e-12]; values below 1 are meaningful
    (post-selected branches), values above are a bug in the caller.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex, copy=True)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-D vector")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("amplitudes must be finite")
        n2 = float(np.vdot(amps, amps).real)
        if n2 > 1.0 + _NORM_SLACK:
            raise ValueError(
                f"squared norm {n2:.6g} exceeds 1; states are at most unit norm"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size

    @property
    def squared_norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def norm(self) -> float:
        return math.sqrt(self.squared_norm)

    def inner(self, other: "ModeState") -> complex:
        """``<self|other>`` on a common cutoff."""
        if other.cutoff != self.cutoff:
            raise ValueError("states must share a cutoff")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def top_band_mass(self, fraction: float = 0.1) -> float:
        """Amplitude mass sitting in the top ``fraction`` of the index range."""
        band = max(1, math.ceil(self.cutoff * fraction))
        tail = self.amplitudes[self.cutoff - band :]
        return float(np.vdot(tail, tail).real)


def vacuum_fock(cutoff: int) -> ModeState:
    """The vacuum state |0> on ``cutoff`` levels."""
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    amps = np.zeros(cutoff, dtype=complex)
    amps[0] = 1.0
    return ModeState(amps)


def _require_tail(state: ModeState, tol: float, alpha: CoherentLabel) -> None:
    mass = state.top_band_mass()
    if mass >= tol:
        # when the default sizing itself fails (very large |alpha|), the
        # suggestion must still exceed what was tried
        suggest = max(default_cutoff(alpha), int(1.15 * state.cutoff) + 5)
        raise ValueError(
            f"cutoff {state.cutoff} leaves tail mass {mass:.3e} >= {tol:.1e} "
            f"for |alpha| = {abs(alpha):.3g}; retry with cutoff >= {suggest}"
        )


def coherent_fock(
    alpha: CoherentLabel,
    cutoff: int | None = None,
    tail_tol: float | None = None,
) -> ModeState:
    """Truncated coherent state ``exp(-|alpha|^2/2) sum alpha^n/sqrt(n!) |n>``.

    Parameters
    ----------
    alpha:
        Complex coherent label.
    cutoff:
        Number of Fock levels.  Defaults to ``default_cutoff(alpha)``.
    tail_tol:
        When given, reject the cutoff if the squared amplitude mass in the
        top 10% of the index range reaches this value.
    """
    if cutoff is None:
        cutoff = default_cutoff(alpha)
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    alpha = complex(alpha)
    amps = np.zeros(cutoff, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    state = ModeState(amps)
    if tail_tol is not None:
        _require_tail(state, tail_tol, alpha)
    return state


def coherent_overlap(alpha, beta):
    """Exact coherent overlap ``<alpha|beta>``.

    ``exp(-|alpha|^2/2 - |beta|^2/2 + conj(alpha) * beta)``; accepts scalars
    or numpy arrays (broadcasting), which is what makes the phase-space grid
    sums cheap.  Note ``|<alpha|beta>|^2 = exp(-|alpha - beta|^2)``.
    """
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    out = np.exp(
        -0.5 * (np.abs(alpha) ** 2 + np.abs(beta) ** 2) + np.conjugate(alpha) * beta
    )
    if out.ndim == 0:
        return complex(out)
    return out


def cat_norm_constant(alpha0: CoherentLabel, phi: float) -> float:
    """Normalization of ``c (|e^{i phi} alpha0> + |e^{-i phi} alpha0>)``.

    ``c = [2 + 2 Re <e^{i phi} alpha0|e^{-i phi} alpha0>]^(-1/2)``; tends to
    1/2 for indistinguishable components and to 1/sqrt(2) for orthogonal ones.
    """
    alpha0 = complex(alpha0)
    plus = cmath.exp(1j * phi) * alpha0
    minus = cmath.exp(-1j * phi) * alpha0
    bracket = 2.0 + 2.0 * complex(coherent_overlap(plus, minus)).real
    return bracket ** -0.5


@dataclass(frozen=True)
class CatSpec:
    """Two-component cat: ``norm_const (|e^{i phi} alpha0> + |e^{-i phi} alpha0>)``.

    ``norm_const`` is computed on construction unless supplied explicitly.
    """

    alpha0: complex
    phi: float
    norm_const: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        object.__setattr__(self, "phi", float(self.phi))
        if self.norm_const is None:
            object.__setattr__(
                self, "norm_const", cat_norm_constant(self.alpha0, self.phi)
            )
        else:
            object.__setattr__(self, "norm_const", float(self.norm_const))
        if not self.norm_const > 0.0:
            raise ValueError("norm_const must be positive")

    @property
    def component_plus(self) -> complex:
        return cmath.exp(1j * self.phi) * self.alpha0

    @property
    def component_minus(self) -> complex:
        return cmath.exp(-1j * self.phi) * self.alpha0


def cat_fock(
    spec: CatSpec,
    cutoff: int | None = None,
    tail_tol: float | None = None,
) -> ModeState:
    """Truncated cat state from its spec.

    The two coherent components are generated on a common cutoff (default:
    ``default_cutoff(spec.alpha0)``) and summed with the stored norm constant.
    No renormalization happens here, so the truncated norm sits slightly
    below 1 by exactly the discarded tail mass.
    """
    if cutoff is None:
        cutoff = default_cutoff(spec.alpha0)
    plus = coherent_fock(spec.component_plus, cutoff, tail_tol)
    minus = coherent_fock(spec.component_minus, cutoff, tail_tol)
    return ModeState(spec.norm_const * (plus.amplitudes + minus.amplitudes))
