"""Compensator-length optimization and fiber-birefringence calibration.

The compensated phase is exactly linear in the two (signed) compensator
lengths, so its spectrum-weighted variance over a wavelength grid is an
exact quadratic form in them. The optimizer exploits that: the cheap
closed-form objective is scanned globally over both orientation branches
(signed lengths, 0.5 mm steps), then polished with Nelder-Mead down to
micrometre resolution. The reported residual is recomputed from the full
phase map at the returned design, so it cannot drift from the objective.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .materials import CompensatorMaterial, FiberSpec, SellmeierModel
from .phase import CompensatorSpec, bandwidth_grid, compensated_phase, total_phase
from .phasematch import PhaseMatchError, solve_signal_idler
from .states import GaussianSpectrum

__all__ = [
    "OptimizationError",
    "CalibrationError",
    "weighted_phase_std",
    "optimize_compensators",
    "calibrate_birefringence",
]


class OptimizationError(RuntimeError):
    """Optimizer failed to converge; carries the best design found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CalibrationError(RuntimeError):
    pass


def _grid_and_weights(pump: GaussianSpectrum, signal: GaussianSpectrum,
                      points: int, span_sigmas: float):
    s_ax = bandwidth_grid(signal.center_nm, signal.fwhm_nm, points, span_sigmas)
    p_ax = bandwidth_grid(pump.center_nm, pump.fwhm_nm, points, span_sigmas)
    S, P = np.meshgrid(s_ax, p_ax, indexing="ij")
    w = signal.density(S) * pump.density(P)
    return S, P, w / w.sum()


def weighted_phase_std(fiber: FiberSpec, comps, pump: GaussianSpectrum,
                       signal: GaussianSpectrum, points: int = 101,
                       span_sigmas: float = 3.0) -> float:
    """Spectrum-weighted standard deviation of the phase, in degrees."""
    S, P, w = _grid_and_weights(pump, signal, points, span_sigmas)
    grid = compensated_phase(fiber, comps or (), S, P)
    mean = np.sum(w * grid)
    var = np.sum(w * (grid - mean) ** 2)
    return float(np.degrees(np.sqrt(var)))


def optimize_compensators(fiber: FiberSpec, material: CompensatorMaterial,
                          pump: GaussianSpectrum, signal: GaussianSpectrum,
                          max_length_mm: float = 100.0,
                          coarse_step_mm: float = 0.5,
                          points: int = 101,
                          span_sigmas: float = 3.0) -> tuple:
    """Flatten the phase map with one crystal per output arm.

    Minimizes the spectrum-weighted phase variance over the +/- 3 sigma
    grid, searching both orientation signs per arm. Returns
    ``(signal_comp, idler_comp, weighted_std_deg)`` with non-negative
    lengths and the orientation carried by each CompensatorSpec.
    """
    S, P, w = _grid_and_weights(pump, signal, points, span_sigmas)
    base = total_phase(fiber, S, P)
    per_mm_s = compensated_phase(
        fiber, [CompensatorSpec(1.0, material, +1, "signal")], S, P) - base
    per_mm_i = compensated_phase(
        fiber, [CompensatorSpec(1.0, material, +1, "idler")], S, P) - base

    def centered(f):
        return f - np.sum(w * f)

    b0, xs, yi = centered(base), centered(per_mm_s), centered(per_mm_i)
    v00 = np.sum(w * b0 * b0)
    c0x, c0y = np.sum(w * b0 * xs), np.sum(w * b0 * yi)
    vxx, vyy, cxy = np.sum(w * xs * xs), np.sum(w * yi * yi), np.sum(w * xs * yi)

    def variance(a, b):
        # exact: the map is linear in the signed lengths a, b (mm)
        return v00 + 2 * a * c0x + 2 * b * c0y + a * a * vxx + b * b * vyy + 2 * a * b * cxy

    axis = np.arange(-max_length_mm, max_length_mm + coarse_step_mm / 2, coarse_step_mm)
    A, Bm = np.meshgrid(axis, axis, indexing="ij")
    coarse = variance(A, Bm)
    i0, j0 = np.unravel_index(np.argmin(coarse), coarse.shape)
    start = np.array([axis[i0], axis[j0]])

    result = minimize(lambda v: variance(v[0], v[1]), start, method="Nelder-Mead",
                      options={"xatol": 1e-3, "fatol": 1e-18, "maxiter": 4000})
    a, b = result.x
    if not result.success:
        raise OptimizationError(
            f"compensator optimization did not converge: {result.message}",
            best=(float(a), float(b), float(result.fun)),
        )

    signal_comp = CompensatorSpec(abs(float(a)), material,
                                  +1 if a >= 0 else -1, "signal")
    idler_comp = CompensatorSpec(abs(float(b)), material,
                                 +1 if b >= 0 else -1, "idler")
    residual = weighted_phase_std(fiber, (signal_comp, idler_comp),
                                  pump, signal, points, span_sigmas)
    return signal_comp, idler_comp, residual


def calibrate_birefringence(core_model: SellmeierModel, lambda_p_nm: float,
                            lambda_s_target_nm: float,
                            b_range=(1e-5, 1e-3), tol_nm: float = 0.01,
                            length_m: float = 0.13) -> float:
    """Find the fiber birefringence that phase-matches a target signal.

    One-dimensional bisection of B over ``b_range`` until the solved
    signal wavelength is within ``tol_nm`` of the target. The signal
    wavelength decreases monotonically as B grows (larger birefringence
    pushes the pair further from the pump), so a sign change of
    (solved - target) over the range is required.
    """

    def solved_minus_target(b):
        fiber = FiberSpec(length_m, b, 0.0, core_model)
        try:
            return solve_signal_idler(fiber, lambda_p_nm).lambda_s_nm - lambda_s_target_nm
        except PhaseMatchError:
            # splitting vanishes as B -> 0: treat as "signal above target"
            return float("inf")

    lo, hi = b_range
    g_lo, g_hi = solved_minus_target(lo), solved_minus_target(hi)
    if not (g_lo > 0 > g_hi):
        raise CalibrationError(
            f"target {lambda_s_target_nm:g} nm not bracketed by B in "
            f"[{lo:g}, {hi:g}]; widen the range"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = solved_minus_target(mid)
        if abs(g_mid) < tol_nm:
            return mid
        if g_mid > 0:
            lo = mid
        else:
            hi = mid
    raise CalibrationError("birefringence bisection failed to converge")
