"""Configuration et hiérarchie d'erreurs de superloc."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping


class SuperlocError(Exception):
    """Exception de base."""


class ConfigError(SuperlocError, ValueError):
    """Erreur de validation de la configuration ou d'un enregistrement d'entrée."""


class DimensionError(SuperlocError, ValueError):
    """Nombre de blocs ou rang de tore incompatibles."""


class ExactArithmeticError(SuperlocError, ArithmeticError):
    """Opération exacte mal posée (puissances de pi incompatibles, division par zéro)."""


class DivergenceError(SuperlocError):
    """Intégrale divergente (enveloppe gaussienne non strictement positive)."""


class NondegeneracyError(SuperlocError):
    """Q n'agit pas de façon inversible (lambda nul, bloc singulier, caractère nul)."""


class CSStructureError(SuperlocError):
    """Structure CS incohérente (caractères non appariés, Q non impair, Q² hors du tore)."""


class EquivarianceError(SuperlocError):
    """La forme donnée n'est pas Q-équivariante."""


class QuadratureError(SuperlocError):
    """Quadrature non convergée."""

    def __init__(self, message: str, diagnostics: Mapping[str, Any] | None = None) -> None:
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class EnumerationLimitError(SuperlocError):
    """Borne d'énumération dépassée."""


class ModelError(SuperlocError):
    """Données de racines incohérentes (rapport de Weyl non entier, réflexion non signée)."""


DEFAULT_MAX_ENUM = 9
DEFAULT_MAX_GROUP_ORDER = 10**6
DEFAULT_LOG_PATH = Path.home() / ".superloc.log"

ENV_MAX_ENUM = "SUPERLOC_MAX_ENUM"
ENV_MAX_GROUP = "SUPERLOC_MAX_GROUP"
ENV_LOG = "SUPERLOC_LOG"


def _positive_int(value: Any, name: str) -> int:
    try:
        out = int(str(value).strip())
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: entier attendu, reçu {value!r}") from e
    if out < 1:
        raise ConfigError(f"{name} doit être >= 1")
    return out


@dataclass
class RunConfig:
    """Bornes d'énumération et réglages d'exécution."""

    max_enum: int = DEFAULT_MAX_ENUM
    max_group_order: int = DEFAULT_MAX_GROUP_ORDER
    workers: int = 1
    log_path: Path = field(default_factory=lambda: DEFAULT_LOG_PATH)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> RunConfig:
        return cls(
            max_enum=_positive_int(d.get("max_enum", DEFAULT_MAX_ENUM), "max_enum"),
            max_group_order=_positive_int(
                d.get("max_group_order", DEFAULT_MAX_GROUP_ORDER), "max_group_order"
            ),
            workers=_positive_int(d.get("workers", 1), "workers"),
            log_path=Path(d.get("log_path") or DEFAULT_LOG_PATH),
        )

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None, **overrides: Any) -> RunConfig:
        """Lit SUPERLOC_MAX_ENUM, SUPERLOC_MAX_GROUP et SUPERLOC_LOG, puis applique les surcharges."""
        env = os.environ if env is None else env
        d: dict[str, Any] = {}
        if env.get(ENV_MAX_ENUM, "").strip():
            d["max_enum"] = env[ENV_MAX_ENUM]
        if env.get(ENV_MAX_GROUP, "").strip():
            d["max_group_order"] = env[ENV_MAX_GROUP]
        if env.get(ENV_LOG, "").strip():
            d["log_path"] = env[ENV_LOG]
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(d)
