"""Conventions figées.

KAPPA est la constante de mesure par bloc (z, z̄, θ, θ̄) de l'intégrale de Berezin :
  ∫ f·{dz dz̄ | dθ dθ̄} = KAPPA · ∫_C [coefficient de θθ̄ dans f] dx dy.
Elle a été calibrée une fois sur le témoin ω = e^{-u}{dz dz̄ | dθ dθ̄} d'un bloc
(2,2) contre Loc_W(ω|₀) = 2π/λ, puis figée ici. `superloc calibrate` la recalcule
et échoue si la valeur diverge.

LOC_SIGN est le signe global de la fonctionnelle de localisation dans la base
canonique (θ∧θ̄⋯)/(z∧z̄⋯), fixé en même temps que KAPPA.
"""

from __future__ import annotations

from superloc import __version__
from superloc.exact import cq, gaussian_to_pair

TOOL_VERSION = __version__

KAPPA = cq(0, 2)
LOC_SIGN = 1

# Ordre canonique des générateurs impairs : θ_1, θ̄_1, θ_2, θ̄_2, …
# L'extraction de Berezin de ce monôme exact a le poids +1.
ODD_ORDER = "theta_1,thetabar_1,...,theta_m,thetabar_m"


def convention() -> dict[str, object]:
    """Bloc 'convention' joint à tous les rapports."""
    return {
        "kappa": gaussian_to_pair(KAPPA),
        "sign": LOC_SIGN,
        "odd_order": ODD_ORDER,
    }
