"""Espaces homogènes G/K : données de racines, points fixes, volumes CS et verdicts de scindage."""

from superloc.homspace.fixed_points import (
    FixedPoints,
    WeylRatio,
    fixed_isotropic,
    fixed_isotropic_bruteforce,
    fixed_periplectic,
    periplectic_formula,
    weyl_ratio_flag,
)
from superloc.homspace.rootdata import RootData, gl_root_data, osp_root_data
from superloc.homspace.volumes import (
    ChainReport,
    Flag,
    HomSpaceSpec,
    Isotropic,
    Periplectic,
    Verdict,
    VolumeResult,
    splitting_chain_report,
    splitting_verdict,
    volume,
)
from superloc.homspace.weyl import WeylElement, closure, reflection

__all__ = [
    "ChainReport",
    "FixedPoints",
    "Flag",
    "HomSpaceSpec",
    "Isotropic",
    "Periplectic",
    "RootData",
    "Verdict",
    "VolumeResult",
    "WeylElement",
    "WeylRatio",
    "closure",
    "fixed_isotropic",
    "fixed_isotropic_bruteforce",
    "fixed_periplectic",
    "gl_root_data",
    "osp_root_data",
    "periplectic_formula",
    "reflection",
    "splitting_chain_report",
    "splitting_verdict",
    "volume",
    "weyl_ratio_flag",
]
