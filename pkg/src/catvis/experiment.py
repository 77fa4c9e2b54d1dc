"""End-to-end interferometer pipelines and their cross-checks.

One parameter set drives four independent readings of the same fringe
visibility:

* closed form, ``exp(-2 r^2 sin^2(phi) |alpha0|^2)``;
* the overlap of the two reflected-port environments, a one-line oracle;
* phase-space quadrature of the post-selected Q function;
* brute-force truncated Fock propagation through the splitter.

plus the fringe-scan route that recovers it the way a measurement would,
by fitting detection rate against the readout phase theta.
"""

import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .fock import (
    DEFAULT_TAIL_TOL,
    cat_norm_constant,
    coherent_fock,
    coherent_overlap,
    default_cutoff,
    vacuum_fock,
)
from .heisenberg import contrast_report
from .operators import (
    BeamSplitter,
    TwoModeState,
    bs_fock_apply,
    interference_reduced_a,
    phase_shift_fock_a,
)
from .phase_space import (
    QGrid,
    integrate_q_term,
    post_selected_terms,
    visibility_analytic,
)

__all__ = [
    "Tolerances",
    "ExperimentParams",
    "OverlapWarning",
    "TruncationError",
    "FringeScan",
    "FringeFit",
    "fringe_scan",
    "fit_fringe",
    "extract_visibility",
    "environment_overlap_oracle",
    "q_integral_visibility",
    "fock_brute_force_visibility",
    "sweep",
]


class OverlapWarning(UserWarning):
    """The two cat components overlap appreciably; branches are not disjoint."""


class TruncationError(RuntimeError):
    """A truncated Fock computation lost more probability than allowed."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical guard rails for one experiment run.

    tail: admissible coherent-state mass in the top cutoff band.
    leakage: admissible probability lost pushing a state through the splitter.
    component_overlap: |<+|->| above which branch-disjointness warnings fire.
    boundary_ratio: admissible edge-to-peak ratio of a quadrature grid.
    """

    tail: float = DEFAULT_TAIL_TOL
    leakage: float = 1e-8
    component_overlap: float = 1e-3
    boundary_ratio: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("tail", "leakage", "component_overlap", "boundary_ratio"):
            val = float(getattr(self, name))
            if not val > 0.0:
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class ExperimentParams:
    """Everything one run of the interferometer needs.

    alpha0 may carry a phase; closed-form results depend on it only through
    |alpha0|.  ``theta`` is the readout phase of the final projection (the
    fringe variable); routes that scan theta ignore the stored value.
    Cutoffs and grid are optional overrides for the Fock and phase-space
    routes; ``None`` means size-to-fit defaults.
    """

    alpha0: complex
    phi: float
    r: float
    theta: float = 0.0
    cutoff_a: int | None = None
    cutoff_b: int | None = None
    grid: QGrid | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "r", float(self.r))
        if not (np.isfinite(self.phi) and np.isfinite(self.theta)):
            raise ValueError("phi and theta must be finite")
        if not np.isfinite(self.alpha0):
            raise ValueError("alpha0 must be finite")
        BeamSplitter(self.r)  # validates the reflectivity range
        for name in ("cutoff_a", "cutoff_b"):
            val = getattr(self, name)
            if val is not None:
                val = int(val)
                if val < 1:
                    raise ValueError(f"{name} must be a positive integer")
                object.__setattr__(self, name, val)

    @property
    def beam_splitter(self) -> BeamSplitter:
        return BeamSplitter(self.r)

    @property
    def t(self) -> float:
        return self.beam_splitter.t

    @property
    def norm_const(self) -> float:
        return cat_norm_constant(self.alpha0, self.phi)

    @property
    def component_plus(self) -> complex:
        return complex(np.exp(1j * self.phi) * self.alpha0)

    @property
    def component_minus(self) -> complex:
        return complex(np.exp(-1j * self.phi) * self.alpha0)

    @property
    def resolved_cutoff_a(self) -> int:
        if self.cutoff_a is not None:
            return self.cutoff_a
        return default_cutoff(abs(self.alpha0))

    @property
    def resolved_cutoff_b(self) -> int:
        if self.cutoff_b is not None:
            return self.cutoff_b
        return default_cutoff(self.r * abs(self.alpha0))


def _warn_if_components_overlap(params: ExperimentParams) -> None:
    ov = abs(coherent_overlap(params.component_plus, params.component_minus))
    if ov >= params.tolerances.component_overlap:
        warnings.warn(
            f"cat components overlap at |<+|->| = {ov:.3e}; the interfering "
            "branches are not mutually orthogonal, so visibility readings "
            "mix component distinguishability with environment overlap",
            OverlapWarning,
            stacklevel=3,
        )


def environment_overlap_oracle(params: ExperimentParams) -> complex:
    """Overlap of the two reflected-port coherent states, exactly.

    The transmitted-port labels of the two branches coincide after the
    readout rotation, so the interference contrast is carried entirely by
    the reflected port: visibility is the magnitude of this overlap and the
    fringe offset phase is its argument, ``r^2 |alpha0|^2 sin(2 phi)``.
    Independent of every truncation and grid choice.
    """
    ir = 1j * params.r
    return complex(
        coherent_overlap(ir * params.component_minus, ir * params.component_plus)
    )


def _term_integrals(params: ExperimentParams) -> dict:
    """Grid integrals of the four post-selected terms at theta = 0."""
    base = replace(params, theta=0.0)
    out = {}
    for term in post_selected_terms(base):
        grid = params.grid if params.grid is not None else QGrid.for_term(term)
        out[term.phase_tag] = integrate_q_term(term, grid, params)
    return out


def q_integral_visibility(params: ExperimentParams) -> float:
    """Visibility from phase-space quadrature of the post-selected terms.

    The fringe in theta has max/min rates ``(sum of diagonal integrals)/4
    times (1 +/- nu)``, so nu is twice the off-diagonal integral's magnitude
    over the diagonal total.  Numerical content: four factorized 2-D
    midpoint quadratures.
    """
    _warn_if_components_overlap(params)
    vals = _term_integrals(params)
    diag = vals[("+", "+")].real + vals[("-", "-")].real
    if diag <= 0.0:
        raise ValueError("diagonal Q integrals are not positive; bad grid")
    return float(2.0 * abs(vals[("+", "-")]) / diag)


@dataclass(frozen=True)
class FringeScan:
    """Detection rates against readout phase, ready for fitting.

    Rates are clamped at zero when quadrature noise leaves them within
    1e-9 of it on the scale of the scan; anything more negative raises.
    """

    thetas: np.ndarray
    rates: np.ndarray

    def __post_init__(self) -> None:
        thetas = np.asarray(self.thetas, dtype=float)
        rates = np.array(self.rates, dtype=float)
        if thetas.ndim != 1 or thetas.shape != rates.shape or thetas.size == 0:
            raise ValueError("thetas and rates must be matching 1-D arrays")
        if not (np.all(np.isfinite(thetas)) and np.all(np.isfinite(rates))):
            raise ValueError("scan values must be finite")
        floor = -1e-9 * max(1.0, float(rates.max(initial=0.0)))
        if float(rates.min()) < floor:
            raise ValueError(
                f"detection rate reached {float(rates.min()):.3e}; "
                "the term set or grid is inconsistent"
            )
        np.clip(rates, 0.0, None, out=rates)
        thetas = thetas.copy()
        thetas.setflags(write=False)
        rates.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "rates", rates)

    def __len__(self) -> int:
        return int(self.thetas.size)


@dataclass(frozen=True)
class FringeFit:
    """Least-squares record of one fringe: rate = offset + amplitude cos(theta - phase)."""

    offset: float
    amplitude: float
    phase: float
    visibility: float
    residual_rms: float
    raw_visibility: float
    period: float


def fringe_scan(params: ExperimentParams, n_theta: int = 16) -> FringeScan:
    """Detection rate at ``n_theta`` readout phases covering one full fringe.

    The theta dependence enters only through the post-selection weights, as
    pure phases on the four term integrals, so the grid work is done once at
    theta = 0 and the scan assembly is exact in theta.  Rates carry the 1/4
    from the two projector halves applied to ket and bra.
    """
    if n_theta < 8:
        raise ValueError("n_theta must be at least 8 to resolve the fringe")
    _warn_if_components_overlap(params)
    base = replace(params, theta=0.0)
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    total = np.zeros(n_theta, dtype=complex)
    for term in post_selected_terms(base):
        grid = params.grid if params.grid is not None else QGrid.for_term(term)
        val = integrate_q_term(term, grid, params)
        sk, sb = term.phase_tag
        winding = (1 if sk == "-" else 0) - (1 if sb == "-" else 0)
        total += val * np.exp(1j * winding * thetas)
    scale = float(np.max(np.abs(total)))
    if scale > 0.0 and float(np.max(np.abs(total.imag))) > 1e-9 * scale:
        raise ValueError("fringe rates came out complex; term set is inconsistent")
    return FringeScan(thetas=thetas, rates=0.25 * total.real)


def fit_fringe(scan: FringeScan) -> FringeFit:
    """Fit offset + amplitude cos(theta - phase) and report the visibility.

    Linear least squares on the basis (1, cos, sin); requires at least four
    points spanning at least 7/8 of the fringe period 2 pi.  ``period`` is
    the dominant discrete-frequency period of the rates (diagnostic only,
    NaN for nonuniform scans); ``raw_visibility`` is the plain
    (max - min)/(max + min) of the sampled rates.
    """
    thetas, rates = scan.thetas, scan.rates
    if thetas.size < 4:
        raise ValueError("need at least 4 scan points to fit a fringe")
    span = float(thetas.max() - thetas.min())
    if span < 0.875 * 2.0 * np.pi:
        raise ValueError("scan must span at least 7/8 of the fringe period")
    design = np.column_stack([np.ones_like(thetas), np.cos(thetas), np.sin(thetas)])
    coef, *_ = np.linalg.lstsq(design, rates, rcond=None)
    a, p, q = (float(c) for c in coef)
    if a <= 0.0:
        raise ValueError("fitted fringe offset is not positive; cannot form visibility")
    amplitude = float(np.hypot(p, q))
    phase = float(np.arctan2(q, p))
    resid = rates - design @ coef
    residual_rms = float(np.sqrt(np.mean(resid * resid)))
    peak, trough = float(rates.max()), float(rates.min())
    raw = (peak - trough) / (peak + trough) if peak + trough > 0.0 else float("nan")
    return FringeFit(
        offset=a,
        amplitude=amplitude,
        phase=phase,
        visibility=amplitude / a,
        residual_rms=residual_rms,
        raw_visibility=raw,
        period=_dominant_period(thetas, rates),
    )


def _dominant_period(thetas: np.ndarray, rates: np.ndarray) -> float:
    steps = np.diff(thetas)
    if steps.size == 0 or float(np.max(np.abs(steps - steps[0]))) > 1e-9:
        return float("nan")
    spectrum = np.abs(np.fft.rfft(rates - rates.mean()))
    if spectrum.size < 2 or not spectrum[1:].any():
        return float("nan")
    k = int(np.argmax(spectrum[1:])) + 1
    window = float(steps[0]) * thetas.size
    return window / k


def extract_visibility(scan: FringeScan) -> float:
    """Fringe visibility from a scan, as a bare number."""
    return fit_fringe(scan).visibility


def fock_brute_force_visibility(params: ExperimentParams) -> float:
    """Visibility by truncated Fock propagation, no coherent-label shortcuts.

    Each cat component crosses the splitter as an explicit two-mode array,
    picks up its readout rotation, and the interference contrast is the
    traced cross term between the two branches over their norms.  Raises
    :class:`TruncationError` when the splitter step loses more probability
    than ``tolerances.leakage``, with a cutoff suggestion.
    """
    _warn_if_components_overlap(params)
    na, nb = params.resolved_cutoff_a, params.resolved_cutoff_b
    tol = params.tolerances
    bs = params.beam_splitter
    branches = {}
    for sign, label, readout in (
        ("+", params.component_plus, -params.phi),
        ("-", params.component_minus, +params.phi),
    ):
        mode_a = coherent_fock(label, cutoff=na, tail_tol=tol.tail)
        two = TwoModeState.from_product(mode_a, vacuum_fock(nb))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # leakage is re-judged just below
            out = bs_fock_apply(bs, two)
        leak = abs(out.squared_norm - two.squared_norm)
        if leak > tol.leakage:
            raise TruncationError(
                f"splitter propagation leaked {leak:.3e} probability at "
                f"cutoffs ({na}, {nb}); retry with cutoff_a >= "
                f"{int(1.5 * na) + 5} and cutoff_b >= {int(1.5 * nb) + 5}"
            )
        branches[sign] = phase_shift_fock_a(out, readout)
    cross = interference_reduced_a(branches["+"], branches["-"])
    overlap = complex(np.trace(cross))
    denom = branches["+"].norm * branches["-"].norm
    if denom <= 0.0:
        raise ValueError("branch states have zero norm")
    return float(abs(overlap) / denom)


_SWEEP_KEYS = (
    "R",
    "abs_alpha0",
    "phi",
    "nu_analytic",
    "nu_oracle",
    "nu_brute",
    "nu_fringe",
    "T",
    "mean_ratio",
    "var_out",
    "error",
)


def sweep(
    r_values: Sequence[float],
    abs_alpha0_values: Sequence[float],
    phi_values: Sequence[float],
    include_brute: bool = False,
    include_fringe: bool = False,
    n_theta: int = 16,
) -> list[dict]:
    """Visibility and moment table over a parameter grid, one dict per row.

    Loop order: r outermost, then |alpha0|, then phi.  The closed form and
    overlap oracle always run; the heavier Fock and fringe routes only when
    asked.  A row that fails numerically keeps its parameters and carries
    the message in ``error`` instead of aborting the sweep.
    """
    rows = []
    for r in r_values:
        for a0 in abs_alpha0_values:
            for phi in phi_values:
                row = dict.fromkeys(_SWEEP_KEYS)
                row["R"], row["abs_alpha0"], row["phi"] = float(r), float(a0), float(phi)
                try:
                    params = ExperimentParams(alpha0=a0, phi=phi, r=r)
                    row["nu_analytic"] = visibility_analytic(params)
                    row["nu_oracle"] = abs(environment_overlap_oracle(params))
                    report = contrast_report(params)
                    row["T"] = report.t
                    row["mean_ratio"] = report.mean_ratio
                    row["var_out"] = report.var_out
                    if include_brute:
                        row["nu_brute"] = fock_brute_force_visibility(params)
                    if include_fringe:
                        row["nu_fringe"] = extract_visibility(
                            fringe_scan(params, n_theta=n_theta)
                        )
                except (ValueError, TruncationError) as exc:
                    row["error"] = str(exc)
                rows.append(row)
    return rows
