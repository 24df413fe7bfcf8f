"""Split Bregman solver for box/nonnegative constrained least squares against
partial Fourier or filtered measurements.

Per iteration (lam > 0, P the constraint projection, b0 the data):

    d   <- P(u - v)
    u   <- (lam A^T M A + I)^{-1} (lam A^T M b + d + v)
    v   <- v + d - u
    b   <- b + b0 - A u

With A = W * F (W diagonal: a 0/1 selector, filter gains, or both) the inner
inverse is diagonal in the frequency domain: F^{-1} (n^h lam M |W|^2 + I)^{-1} F,
so every step costs three FFTs.  Stopping tests ||A u - b0||^2 against the
original data, plus a stall detector for noisy (infeasible) problems.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .fourier import (
    FilterSpectrum,
    FrequencyMask,
    MeasurementSet,
    fft_forward_raw,
    fft_inverse_raw,
    meas_norm_sq,
)
from .grids import GridGeometry, RealSignal, threshold_binary

__all__ = [
    "SolverConfig",
    "SolveReport",
    "BregmanState",
    "FrequencyModel",
    "project_box",
    "project_nonneg",
    "bregman_iterate",
    "reconstruct",
    "reconstruct_filtered",
]


@dataclass
class SolverConfig:
    lam: float = 10.0
    tol: float | None = None  # None: 1e-10 * max(1, ||b0||^2)
    max_iters: int = 10000
    constraint: str = "box"  # "box" | "nonneg"
    preconditioner: FilterSpectrum | None = None
    record_trace: bool = False
    # Optional stall detector for noisy (infeasible) data: stop once the best
    # residual has not improved by stall_rtol (relative) within stall_window
    # iterations.  Off by default: exact problems have long transient
    # plateaus that must not abort the run.
    stall_window: int | None = None
    stall_rtol: float = 1e-9

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.tol is not None and self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.constraint not in ("box", "nonneg"):
            raise ValueError(f"unknown constraint {self.constraint!r}")
        if self.preconditioner is not None:
            m = self.preconditioner.gains
            if np.any(m.imag != 0) or np.any(m.real < 0):
                raise ValueError("preconditioner gains must be real nonnegative")


@dataclass
class SolveReport:
    iterations: int
    residual: float
    seconds: float
    converged: bool
    trace: list[float] | None = None


@dataclass
class BregmanState:
    """Mutable iterate bundle; single-owner, mutated in place.

    ``d`` is the box/nonneg-projected iterate: the feasible point the solver
    ultimately outputs, and the one whose data misfit drives the stopping
    test (the unconstrained u fits the data almost exactly by construction,
    its misfit being damped by 1/(lam n^h + 1), so it says nothing about
    convergence).  ``fv`` caches the spectrum of v between iterations.
    """

    u: np.ndarray
    v: np.ndarray
    b_acc: np.ndarray  # frequency-domain accumulator, starts at b0
    d: np.ndarray | None = None
    fv: np.ndarray | None = None
    iteration: int = 0
    residual: float = np.inf


@dataclass(frozen=True)
class FrequencyModel:
    """Measurement operator A = W * F with optional diagonal preconditioner."""

    geometry: GridGeometry
    weights: np.ndarray  # complex diagonal W, natural order
    precond: np.ndarray | None = None  # real nonnegative M

    def forward(self, u: np.ndarray) -> np.ndarray:
        return self.weights * fft_forward_raw(u, self.geometry)


def project_box(d: RealSignal) -> RealSignal:
    """Componentwise clamp to [0, 1]."""
    return RealSignal(d.geometry, np.clip(d.values, 0.0, 1.0))


def project_nonneg(d: RealSignal) -> RealSignal:
    """Componentwise max(d, 0)."""
    return RealSignal(d.geometry, np.maximum(d.values, 0.0))


def _projector(constraint: str):
    if constraint == "box":
        return lambda x: np.clip(x, 0.0, 1.0)
    return lambda x: np.maximum(x, 0.0)


def _plan(model: FrequencyModel, config: SolverConfig):
    nh = model.geometry.cell_count
    m = np.ones(model.geometry.shape) if model.precond is None else model.precond.real
    diag = nh * config.lam * m * np.abs(model.weights) ** 2 + 1.0
    adj_gain = config.lam * nh * m * np.conj(model.weights)
    return diag, adj_gain


def bregman_iterate(
    state: BregmanState,
    b0: np.ndarray,
    model: FrequencyModel,
    config: SolverConfig,
    plan=None,
) -> BregmanState:
    """One pass of the four update lines; returns the (mutated) state.

    The reported residual is ||A d - b0||^2 for this iteration's projected
    iterate d (exactly zero once d reaches a data-consistent feasible point).
    """
    g = model.geometry
    diag, adj_gain = plan if plan is not None else _plan(model, config)
    project = _projector(config.constraint)
    d = project(state.u - state.v)
    fd = fft_forward_raw(d, g)
    if state.fv is None:
        state.fv = fft_forward_raw(state.v, g)
    state.residual = meas_norm_sq(model.weights * fd - b0)
    fu = (adj_gain * state.b_acc + fd + state.fv) / diag
    state.u = fft_inverse_raw(fu, g).real
    state.fv = state.fv + fd - fu
    state.v = fft_inverse_raw(state.fv, g).real
    state.b_acc = state.b_acc + b0 - model.weights * fu
    state.d = d
    state.iteration += 1
    return state


def _solve(b0: np.ndarray, model: FrequencyModel, config: SolverConfig):
    g = model.geometry
    start = time.perf_counter()
    tol = config.tol
    if tol is None:
        tol = 1e-10 * max(1.0, meas_norm_sq(b0))
    u0 = fft_inverse_raw(b0, g).real  # initial guess F^{-1} b
    state = BregmanState(u=u0, v=np.zeros(g.shape), b_acc=b0.copy())
    trace = [] if config.record_trace else None
    plan = _plan(model, config)
    # The initial guess satisfies A u = b exactly for mask problems, so the
    # residual test only means anything after the first constrained update:
    # always run at least one iteration.
    best = np.inf
    best_iter = 0
    converged = False
    while state.iteration < config.max_iters:
        bregman_iterate(state, b0, model, config, plan=plan)
        if trace is not None:
            trace.append(state.residual)
        if state.residual <= tol:
            converged = True
            break
        if config.stall_window is not None:
            if not np.isfinite(best) or state.residual < best - config.stall_rtol * max(1.0, best):
                best = state.residual
                best_iter = state.iteration
            elif state.iteration - best_iter >= config.stall_window:
                break  # residual floor reached; report converged=False
    # The feasible output is the projected iterate whose residual was tested.
    raw = RealSignal(g, state.d)
    report = SolveReport(
        iterations=state.iteration,
        residual=state.residual,
        seconds=time.perf_counter() - start,
        converged=bool(converged),
        trace=trace,
    )
    return threshold_binary(raw), raw, report


def reconstruct(meas: MeasurementSet, config: SolverConfig | None = None):
    """Recover a binary signal from masked Fourier measurements.

    Returns (thresholded binary signal, raw constrained iterate, report).
    Non-convergence is flagged in the report, never raised.
    """
    config = config or SolverConfig()
    model = FrequencyModel(
        geometry=meas.geometry,
        weights=meas.mask.selector.astype(complex),
        precond=None if config.preconditioner is None else config.preconditioner.gains,
    )
    return _solve(meas.values.astype(complex), model, config)


def reconstruct_filtered(
    blurred: RealSignal,
    filt: FilterSpectrum,
    config: SolverConfig | None = None,
    mask: FrequencyMask | None = None,
):
    """Recover a binary signal from a low-pass filtered (blurred) signal.

    The blurred input is taken to the frequency domain, so the data is
    b = K F u0 (+ noise spectrum); with ``mask`` given only the selected
    coefficients of the blurred signal are used (b = S F blurred, A = S K F).
    """
    config = config or SolverConfig()
    g = blurred.geometry
    if filt.geometry != g:
        raise ValueError("signal and filter geometries differ")
    b_hat = fft_forward_raw(blurred.values, g)
    weights = filt.gains
    if mask is not None:
        if mask.geometry != g:
            raise ValueError("mask geometry differs")
        b_hat = np.where(mask.selector, b_hat, 0.0)
        weights = np.where(mask.selector, weights, 0.0)
    model = FrequencyModel(
        geometry=g,
        weights=weights,
        precond=None if config.preconditioner is None else config.preconditioner.gains,
    )
    return _solve(b_hat, model, config)
