"""Pseudo-spectral paracontrolled solver on the 2-torus.

Thin re-export of the compiled module; fields are (n, n) float64 arrays.
"""

from pcf._core import (
    Enhancement,
    GammaConfig,
    GammaResult,
    GridSpec,
    Localization,
    MinimizeResult,
    ThresholdCert,
    Triple,
    apply_H,
    apply_L,
    apply_L_inverse,
    choose_thresholds,
    dealias,
    energy,
    enhance,
    gamma_inverse,
    gamma_map,
    holder_norm,
    minimize,
    mollify,
    read_field,
    renorm_constant,
    sample_white_noise,
    sobolev_norm,
    wick_product,
    write_field,
    zero_enhancement,
)

__all__ = [
    "Enhancement",
    "GammaConfig",
    "GammaResult",
    "GridSpec",
    "Localization",
    "MinimizeResult",
    "ThresholdCert",
    "Triple",
    "apply_H",
    "apply_L",
    "apply_L_inverse",
    "choose_thresholds",
    "dealias",
    "energy",
    "enhance",
    "gamma_inverse",
    "gamma_map",
    "holder_norm",
    "minimize",
    "mollify",
    "read_field",
    "renorm_constant",
    "sample_white_noise",
    "sobolev_norm",
    "wick_product",
    "write_field",
    "zero_enhancement",
]
