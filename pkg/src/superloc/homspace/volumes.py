"""Volumes CS des espaces homogènes G/K, verdicts de scindage et chaînes de sous-groupes.

Chaque point fixe contribue (2π/𝐢)^m, m étant le nombre de blocs (1|1) de V dans
𝔭 = V ⊕ V*. Le volume vaut donc count·(2π/𝐢)^m.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence, Union

from superloc.config import ConfigError, RunConfig
from superloc.exact import ExactValue
from superloc.homspace.fixed_points import fixed_isotropic, fixed_periplectic, weyl_ratio_flag
from superloc.homspace.rootdata import RootData
from superloc.qrep import two_pi_over_i_power

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    SPLITTING = "Splitting"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Isotropic:
    """SOSp(2n|2n) / GL(n|n)."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError("Isotropic : n doit être >= 1")

    @property
    def label(self) -> str:
        return f"Isotropic({self.n})"


@dataclass(frozen=True)
class Periplectic:
    """P(r+s) / P(r) × P(s)."""

    r: int
    s: int

    def __post_init__(self) -> None:
        if self.r < 1 or self.s < 1:
            raise ConfigError("Periplectic : r et s doivent être >= 1")

    @property
    def label(self) -> str:
        return f"Periplectic({self.r},{self.s})"


@dataclass(frozen=True)
class Flag:
    """G/K pour une superalgèbre de Kac-Moody et des racines isotropes orthogonales α_1..α_d."""

    root_data: RootData

    @property
    def label(self) -> str:
        return f"Flag({self.root_data.name or 'rank ' + str(self.root_data.rank)}, d={self.root_data.defect})"


HomSpaceSpec = Union[Isotropic, Periplectic, Flag]


@dataclass(frozen=True)
class VolumeResult:
    family: str
    count: int
    exponent_m: int
    alt_exponent: int | None = None

    @property
    def nonzero(self) -> bool:
        return self.count > 0

    @property
    def verdict(self) -> Verdict:
        return splitting_verdict(self)

    @property
    def value(self) -> ExactValue:
        return two_pi_over_i_power(self.exponent_m) * self.count

    @property
    def value_text(self) -> str:
        if not self.count:
            return "0"
        return f"{self.count}*(2*pi/i)^{self.exponent_m}"

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "family": self.family,
            "count": self.count,
            "exponent_m": self.exponent_m,
            "value": self.value_text,
            "nonzero": self.nonzero,
            "verdict": self.verdict.value,
            "exact": self.value.to_dict(),
        }
        if self.alt_exponent is not None:
            d["alt_exponent"] = self.alt_exponent
        return d


def splitting_verdict(v: VolumeResult) -> Verdict:
    """Un volume non nul certifie le scindage ; un volume nul ne conclut pas."""
    return Verdict.SPLITTING if v.nonzero else Verdict.INCONCLUSIVE


def point_space() -> VolumeResult:
    """K = G : un point, volume 1."""
    return VolumeResult("Point", 1, 0)


def block_exponent(spec: HomSpaceSpec) -> int:
    if isinstance(spec, Isotropic):
        return spec.n * spec.n
    if isinstance(spec, Periplectic):
        return spec.r * spec.s
    return len(spec.root_data.positive_even_outside_k())


def volume(spec: HomSpaceSpec, config: RunConfig | None = None) -> VolumeResult:
    config = config or RunConfig()
    m = block_exponent(spec)
    if isinstance(spec, Isotropic):
        result = VolumeResult(spec.label, fixed_isotropic(spec.n).count, m, alt_exponent=2 * spec.n * spec.n)
    elif isinstance(spec, Periplectic):
        result = VolumeResult(spec.label, fixed_periplectic(spec.r, spec.s, config).count, m)
    elif isinstance(spec, Flag):
        ratio = weyl_ratio_flag(spec.root_data, config)
        result = VolumeResult(spec.label, ratio.ratio, m, alt_exponent=2 * m)
    else:
        raise ConfigError(f"famille inconnue: {spec!r}")
    logger.info("volume %s = %s (%s)", result.family, result.value_text, result.verdict.value)
    return result


# -- chaînes -------------------------------------------------------------------


@dataclass
class ChainStep:
    subgroup: str
    group: str
    holds: bool
    evidence: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"subgroup": self.subgroup, "group": self.group, "holds": self.holds, "evidence": self.evidence}


@dataclass
class ChainReport:
    family: str
    chain: list[str]
    steps: list[ChainStep] = field(default_factory=list)

    @property
    def broken(self) -> bool:
        return not all(step.holds for step in self.steps)

    @property
    def conclusion(self) -> str:
        if self.broken:
            return "ChainBroken"
        return f"{self.chain[0]} is splitting in {self.chain[-1]}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "chain": self.chain,
            "steps": [s.to_dict() for s in self.steps],
            "broken": self.broken,
            "conclusion": self.conclusion,
        }


def _product_label(parts: Sequence[int]) -> str:
    return "×".join(f"P({p})" for p in parts)


def periplectic_chain(n: int, parts: Sequence[int] | None = None, config: RunConfig | None = None) -> ChainReport:
    """P(p_1)×…×P(p_k) ⊂ P(n) par pelage : P(p)×P(reste) ⊂ P(total) à chaque étape."""
    if n < 2:
        raise ConfigError("chaîne périplectique : n doit être >= 2")
    parts = list(parts) if parts else [2] * (n // 2) + ([1] if n % 2 else [])
    if sum(parts) != n or any(p < 1 for p in parts):
        raise ConfigError(f"parts {parts} ne forment pas une partition de {n}")
    report = ChainReport("periplectic", [_product_label(parts)])
    peeled: list[int] = []
    total = n
    levels = []
    for p in parts[:-1]:
        rest = total - p
        v = volume(Periplectic(p, rest), config)
        levels.append(_product_label(peeled + [total]))
        report.steps.append(ChainStep(
            subgroup=_product_label(peeled + [p, rest]),
            group=_product_label(peeled + [total]),
            holds=v.nonzero,
            evidence=v.to_dict(),
        ))
        peeled.append(p)
        total = rest
    report.chain.extend(reversed(levels))
    report.steps.reverse()
    return report


def defect_chain(data: RootData, config: RunConfig | None = None) -> ChainReport:
    """D ⊂ K ⊂ G : K ⊂ G par le volume du drapeau, D ⊂ K si le centralisateur est de défaut nul."""
    name = data.name or "G"
    report = ChainReport("flag", ["D", "K", name])
    extra = data.extra_isotropic_k_roots()
    report.steps.append(ChainStep(
        subgroup="D",
        group="K",
        holds=not extra,
        evidence={
            "centralizer_defect_zero": not extra,
            "extra_isotropic_roots": [list(v) for v in extra],
        },
    ))
    v = volume(Flag(data), config)
    report.steps.append(ChainStep(subgroup="K", group=name, holds=v.nonzero, evidence=v.to_dict()))
    return report


def splitting_chain_report(family: str, params: dict[str, Any], config: RunConfig | None = None) -> ChainReport:
    """Chaîne de sous-groupes avec le volume de chaque étape ; une étape nulle casse la chaîne."""
    if family == "periplectic":
        report = periplectic_chain(int(params["n"]), params.get("parts"), config)
    elif family == "flag":
        report = defect_chain(params["root_data"], config)
    else:
        raise ConfigError(f"chaîne inconnue: {family!r} (periplectic ou flag)")
    logger.info("chaîne %s : %s", family, report.conclusion)
    return report
