"""Birefringence-assisted vector phase matching in PM fiber.

The pump propagates on the slow axis, the signal/idler pair on the fast
axis. With a degenerate pump, momentum conservation reads

    dk = 2*pi * [ 2*(n(lp) + B)/lp - n(ls)/ls - n(li)/li ] + 2*gamma*P,

with all wavelengths in metres and the idler fixed by energy
conservation, li = ls*lp / (2*ls - lp). The birefringence term 4*pi*B/lp
is what opens a non-degenerate solution: without it normal dispersion
keeps dk negative everywhere below the pump.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .materials import FiberSpec, WavelengthRangeError, index

__all__ = [
    "PhaseMatchError",
    "BandwidthError",
    "PhaseMatchPoint",
    "idler_wavelength",
    "phase_mismatch",
    "solve_signal_idler",
    "tuning_curve",
    "output_bandwidths",
]

#: |dk| below which a wavelength pair counts as phase matched, rad/m.
MISMATCH_TOL = 1e-6

#: Points in the coarse bracketing scan of the signal window.
SCAN_POINTS = 2000

_ENERGY_RTOL = 1e-12


class PhaseMatchError(RuntimeError):
    """No phase-matched solution, or a degenerate-denominator request."""


class BandwidthError(RuntimeError):
    """The phase-matching profile has no usable half-maximum crossing."""


@dataclass(frozen=True)
class PhaseMatchPoint:
    """One solved operating point (wavelengths in nm, mismatch in rad/m)."""

    lambda_p_nm: float
    lambda_s_nm: float
    lambda_i_nm: float
    residual_mismatch: float

    def __post_init__(self):
        lhs = 2.0 / self.lambda_p_nm
        rhs = 1.0 / self.lambda_s_nm + 1.0 / self.lambda_i_nm
        if abs(lhs - rhs) > _ENERGY_RTOL * abs(lhs):
            raise ValueError("energy conservation violated beyond 1e-12 relative")
        if not self.lambda_s_nm < self.lambda_p_nm < self.lambda_i_nm:
            raise ValueError(
                f"expected signal < pump < idler, got "
                f"{self.lambda_s_nm} / {self.lambda_p_nm} / {self.lambda_i_nm}"
            )


def idler_wavelength(lambda_s_nm, lambda_p_nm):
    """Idler wavelength from energy conservation, ls*lp/(2*ls - lp)."""
    ls = np.asarray(lambda_s_nm, dtype=float)
    lp = np.asarray(lambda_p_nm, dtype=float)
    if np.any(ls <= 0) or np.any(lp <= 0):
        raise ValueError("wavelengths must be positive")
    denom = 2.0 * ls - lp
    if np.any(denom == 0.0):
        raise PhaseMatchError("degenerate denominator: 2*lambda_s == lambda_p")
    out = ls * lp / denom
    return out if out.ndim else float(out)


def phase_mismatch(fiber: FiberSpec, lambda_p_nm, lambda_s_nm, peak_power_w=0.0):
    """Vector phase mismatch dk in rad/m at the given signal wavelength(s)."""
    ls = np.asarray(lambda_s_nm, dtype=float)
    li = idler_wavelength(ls, lambda_p_nm)
    n_p = index(fiber.core_model, lambda_p_nm)
    n_s = index(fiber.core_model, ls)
    n_i = index(fiber.core_model, li)
    m = 1e-9
    dk = 2.0 * np.pi * (
        2.0 * (n_p + fiber.birefringence) / (lambda_p_nm * m)
        - n_s / (ls * m)
        - n_i / (li * m)
    )
    dk = dk + 2.0 * fiber.gamma * peak_power_w
    return dk if np.ndim(dk) else float(dk)


def _scan_window(fiber: FiberSpec, lambda_p_nm: float, window) -> tuple:
    lo_model, hi_model = fiber.core_model.valid_range_nm
    if window is None:
        window = (400.0, lambda_p_nm - 0.25)
    lo, hi = window
    lo = max(lo, lo_model)
    # keep the idler inside the model's validity range: li <= hi_model
    lo_idler = lambda_p_nm * hi_model / (2.0 * hi_model - lambda_p_nm)
    lo = max(lo, lo_idler * (1.0 + 1e-9))
    hi = min(hi, lambda_p_nm - 0.25)
    if not lo < hi:
        raise PhaseMatchError(
            f"empty search window for pump {lambda_p_nm:g} nm after validity clipping"
        )
    return lo, hi


def _bisect_root(f, a, b, fa) -> tuple:
    """Bisection refined until |f| < MISMATCH_TOL; returns (x, f(x))."""
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if abs(fm) < MISMATCH_TOL:
            return mid, fm
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    raise PhaseMatchError("bisection failed to reach the mismatch tolerance")


def solve_signal_idler(fiber: FiberSpec, lambda_p_nm, peak_power_w=0.0,
                       window=None, scan_points=SCAN_POINTS) -> PhaseMatchPoint:
    """Solve dk = 0 for the signal wavelength below the pump.

    A coarse scan over the (validity-clipped) signal window brackets the
    sign change, which bisection then refines to |dk| < 1e-6 rad/m. When
    several brackets exist the root closest to the pump is returned, the
    branch continuously connected to degeneracy.

    Raises
    ------
    PhaseMatchError
        If no sign change exists in the window (e.g. B = 0, where only
        the degenerate solution at the pump remains).
    """
    lambda_p_nm = float(lambda_p_nm)
    lo, hi = _scan_window(fiber, lambda_p_nm, window)
    grid = np.linspace(lo, hi, int(scan_points))
    vals = phase_mismatch(fiber, lambda_p_nm, grid, peak_power_w)
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    exact = np.nonzero(vals == 0.0)[0]

    f = lambda ls: phase_mismatch(fiber, lambda_p_nm, ls, peak_power_w)
    candidates = [(float(grid[i]), 0.0) for i in exact]
    for i in flips:
        candidates.append(_bisect_root(f, grid[i], grid[i + 1], vals[i]))
    if not candidates:
        raise PhaseMatchError(
            f"no phase-matched solution in window ({lo:g}, {hi:g}) nm "
            f"for pump {lambda_p_nm:g} nm"
        )
    ls, dk = max(candidates, key=lambda c: c[0])
    return PhaseMatchPoint(
        lambda_p_nm=lambda_p_nm,
        lambda_s_nm=float(ls),
        lambda_i_nm=float(idler_wavelength(ls, lambda_p_nm)),
        residual_mismatch=float(dk),
    )


def tuning_curve(fiber: FiberSpec, lambda_p_range, steps: int,
                 peak_power_w=0.0) -> tuple:
    """Solve across a pump range.

    Returns ``(points, skipped)``: the solved PhaseMatchPoints and the
    pump wavelengths for which no solution exists in the window.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    lo, hi = lambda_p_range
    points, skipped = [], []
    for lp in np.linspace(float(lo), float(hi), int(steps)):
        try:
            points.append(solve_signal_idler(fiber, lp, peak_power_w))
        except (PhaseMatchError, WavelengthRangeError):
            skipped.append(float(lp))
    return points, skipped


def _half_max_crossing(profile, x0, direction, scale_nm):
    """Walk from the root until sinc^2 drops below 1/2, then bisect."""
    step = 0.05 * scale_nm
    x_prev, x = x0, x0 + direction * step
    for _ in range(4000):
        if profile(x) < 0.5:
            break
        x_prev, x = x, x + direction * step
    else:
        raise BandwidthError("profile too flat: no half-maximum crossing found")
    a, b = (x_prev, x) if x_prev < x else (x, x_prev)
    for _ in range(80):
        mid = 0.5 * (a + b)
        if (profile(mid) - 0.5) * (profile(a) - 0.5) <= 0:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


def output_bandwidths(fiber: FiberSpec, point: PhaseMatchPoint, pump_fwhm_nm,
                      peak_power_w=0.0) -> tuple:
    """FWHM estimates (signal_nm, idler_nm) at a solved operating point.

    The intrinsic width comes from the sinc^2(dk L / 2) phase-matching
    profile scanned in the signal wavelength; the pump bandwidth adds in
    quadrature after propagation through the local slope d(ls)/d(lp) of
    the solution curve. The idler width follows from the
    energy-conservation Jacobian |d(li)/d(ls)| = (li/ls)^2.
    """
    if abs(point.residual_mismatch) > 10 * MISMATCH_TOL:
        raise ValueError("point is not phase matched")
    lp, ls0 = point.lambda_p_nm, point.lambda_s_nm
    half_L = 0.5 * fiber.length_m

    def profile(ls):
        x = phase_mismatch(fiber, lp, ls, peak_power_w) * half_L
        return float(np.sinc(x / np.pi) ** 2)

    scale = 1.0  # nm; generous for sub-nm sinc widths
    right = _half_max_crossing(profile, ls0, +1.0, scale)
    left = _half_max_crossing(profile, ls0, -1.0, scale)
    fwhm_pm = right - left

    h = 0.05
    slope = (
        solve_signal_idler(fiber, lp + h, peak_power_w).lambda_s_nm
        - solve_signal_idler(fiber, lp - h, peak_power_w).lambda_s_nm
    ) / (2.0 * h)
    signal_fwhm = float(np.hypot(fwhm_pm, slope * pump_fwhm_nm))
    jacobian = (point.lambda_i_nm / ls0) ** 2
    return signal_fwhm, float(signal_fwhm * jacobian)
