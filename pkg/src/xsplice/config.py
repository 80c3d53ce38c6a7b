"""Run configuration: INI files with flat key-value sections.

The built-in defaults describe the reference source (13 cm segments,
771 nm pump, quartz compensators, fitted count-rate coefficients); any
key can be overridden by a config file. ``configs/paper.ini`` in the
repository root is the canonical example and mirrors these defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .counts import NoiseParams
from .materials import CompensatorMaterial, FiberSpec, load_materials
from .phase import CompensatorSpec
from .states import GaussianSpectrum

__all__ = ["ConfigError", "SourceConfig", "load_config", "DEFAULTS"]


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "fiber": {
        "length_m": "0.13",
        # calibrated so a 771 nm pump phase-matches a 670 nm signal
        "birefringence": "3.1999848764298507e-04",
        "gamma_per_w_m": "0.01",
        "core": "fused_silica",
    },
    "compensators": {
        "material": "quartz",
        "signal_length_mm": "67.3",
        "signal_orientation": "+1",
        "idler_length_mm": "47.6",
        "idler_orientation": "-1",
    },
    "spectra": {
        "pump_center_nm": "771.0",
        "pump_fwhm_nm": "0.3",
        "signal_center_nm": "670.0",
        "signal_fwhm_nm": "0.23",
    },
    "noise": {
        # fitted to CAR(50 mW) = 110, CAR(10 mW) = 260 and a 45000/s
        # pair rate at 33 mW, with the efficiencies and darks held fixed
        "pair_rate_coeff": "41.32231404958677",
        "raman_signal": "39.97877194480514",
        "raman_idler": "1603.6698254753746",
        "dark_signal": "1200.0",
        "dark_idler": "1200.0",
        "eta_signal": "0.24",
        "eta_idler": "0.16",
        "rep_rate_hz": "76e6",
        "window_s": "1e-9",
        "spm_coeff": "0.2",
        # power-independent depolarization calibrated to the measured
        # 0.922 Bell fidelity at 30 mW (see calibrate_baseline_noise)
        "baseline_noise": "0.09040324370750284",
    },
}


@dataclass(frozen=True)
class SourceConfig:
    fiber: FiberSpec
    material: CompensatorMaterial
    compensators: tuple
    pump: GaussianSpectrum
    signal: GaussianSpectrum
    noise: NoiseParams
    baseline_noise: float


def _orientation(raw: str) -> int:
    try:
        val = int(raw)
    except ValueError as exc:
        raise ConfigError(f"orientation must be +1 or -1, got {raw!r}") from exc
    if val not in (+1, -1):
        raise ConfigError(f"orientation must be +1 or -1, got {val}")
    return val


def load_config(path: str | None = None, materials_path: str | None = None) -> SourceConfig:
    """Build all run objects from defaults plus an optional INI file."""
    parser = configparser.ConfigParser()
    parser.read_dict(DEFAULTS)
    if path is not None:
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file not found: {path}")

    try:
        db = load_materials(materials_path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load material database: {exc}") from exc

    try:
        core_name = parser.get("fiber", "core")
        if core_name not in db:
            raise ConfigError(f"unknown core material {core_name!r}")
        fiber = FiberSpec(
            length_m=parser.getfloat("fiber", "length_m"),
            birefringence=parser.getfloat("fiber", "birefringence"),
            gamma=parser.getfloat("fiber", "gamma_per_w_m"),
            core_model=db[core_name],
        )
        mat_name = parser.get("compensators", "material")
        o_key, e_key = f"{mat_name}_o", f"{mat_name}_e"
        if o_key not in db or e_key not in db:
            raise ConfigError(f"material database lacks {o_key!r}/{e_key!r}")
        material = CompensatorMaterial(ordinary=db[o_key], extraordinary=db[e_key],
                                       name=mat_name)
        comps = (
            CompensatorSpec(parser.getfloat("compensators", "signal_length_mm"),
                            material,
                            _orientation(parser.get("compensators", "signal_orientation")),
                            "signal"),
            CompensatorSpec(parser.getfloat("compensators", "idler_length_mm"),
                            material,
                            _orientation(parser.get("compensators", "idler_orientation")),
                            "idler"),
        )
        pump = GaussianSpectrum(parser.getfloat("spectra", "pump_center_nm"),
                                parser.getfloat("spectra", "pump_fwhm_nm"))
        signal = GaussianSpectrum(parser.getfloat("spectra", "signal_center_nm"),
                                  parser.getfloat("spectra", "signal_fwhm_nm"))
        noise = NoiseParams(
            pair_rate_coeff=parser.getfloat("noise", "pair_rate_coeff"),
            raman_s=parser.getfloat("noise", "raman_signal"),
            raman_i=parser.getfloat("noise", "raman_idler"),
            dark_s=parser.getfloat("noise", "dark_signal"),
            dark_i=parser.getfloat("noise", "dark_idler"),
            eta_s=parser.getfloat("noise", "eta_signal"),
            eta_i=parser.getfloat("noise", "eta_idler"),
            rep_rate_hz=parser.getfloat("noise", "rep_rate_hz"),
            window_s=parser.getfloat("noise", "window_s"),
            spm_coeff=parser.getfloat("noise", "spm_coeff"),
        )
        baseline = parser.getfloat("noise", "baseline_noise")
        if not 0.0 <= baseline < 1.0:
            raise ConfigError(f"baseline_noise must be in [0, 1), got {baseline}")
    except (configparser.Error, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid configuration: {exc}") from exc

    return SourceConfig(fiber=fiber, material=material, compensators=comps,
                        pump=pump, signal=signal, noise=noise,
                        baseline_noise=baseline)
