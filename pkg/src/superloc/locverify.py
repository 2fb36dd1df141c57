"""Vérification exacte de la localisation sur les modèles linéaires W*.

Le champ Q d'un bloc, dans les coordonnées (z, z̄ | θ, θ̄) :
  Q = c(θ∂_z + θ̄∂_z̄) + (𝐢λ/c)(z∂_θ - z̄∂_θ̄)
où c est l'échelle impaire de la représentation (1 par défaut) et λ la valeur
effective du bloc (signe changé pour un bloc retourné). Q² est alors la dérivation
torique Σ 𝐢λ(z∂_z - z̄∂_z̄ + θ∂_θ - θ̄∂_θ̄).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from superloc.config import DimensionError, DivergenceError, EquivarianceError
from superloc.exact import I_UNIT, ONE, ExactValue, Gaussian, as_gaussian, cq, rational
from superloc.qrep import BerFiber, CSRep, loc_pairing
from superloc.superalg import (
    Coord,
    Derivation,
    SuperFunction,
    apply_derivation,
    berezin_integral,
    eval_origin,
    multiply,
    odd_bit,
)

logger = logging.getLogger(__name__)

# valeurs de λ et d'enveloppe des formes aléatoires
LAMBDA_POOL = ("1+2i", "1-2i", "-1+2i", "-1-2i", "3i", "-3i", "2", "5i")
ENVELOPE_POOL = ("1/2", "1", "2")


@dataclass(frozen=True)
class LinearModel:
    rep: CSRep
    q_field: Derivation

    @property
    def blocks(self) -> int:
        return self.rep.blocks

    @property
    def lambdas(self) -> tuple[Gaussian, ...]:
        """λ effectifs : -λ pour un bloc retourné."""
        return tuple(-lam if s.flipped else lam for s, lam in zip(self.rep.summands, self.rep.lambdas))


def _block_q_terms(block: int, lam: Gaussian, scale: Gaussian) -> list[tuple[Any, tuple[Coord, int], tuple[Coord, int]]]:
    odd_coeff = I_UNIT * lam / scale
    return [
        (scale, (Coord.THETA, block), (Coord.Z, block)),
        (scale, (Coord.THETABAR, block), (Coord.ZBAR, block)),
        (odd_coeff, (Coord.Z, block), (Coord.THETA, block)),
        (-odd_coeff, (Coord.ZBAR, block), (Coord.THETABAR, block)),
    ]


def build_model(rep: CSRep) -> LinearModel:
    """Modèle linéaire X = W* muni du champ Q assemblé bloc par bloc."""
    terms: list = []
    effective = [-lam if s.flipped else lam for s, lam in zip(rep.summands, rep.lambdas)]
    for i, lam in enumerate(effective):
        terms.extend(_block_q_terms(i, lam, rep.odd_scale))
    return LinearModel(rep, Derivation.combination(terms))


def torus_derivation(model: LinearModel) -> Derivation:
    """Σ_i 𝐢λ_i(z_i∂_{z_i} - z̄_i∂_{z̄_i} + θ_i∂_{θ_i} - θ̄_i∂_{θ̄_i})."""
    terms: list = []
    for i, lam in enumerate(model.lambdas):
        w = I_UNIT * lam
        terms.extend([
            (w, (Coord.Z, i), (Coord.Z, i)),
            (-w, (Coord.ZBAR, i), (Coord.ZBAR, i)),
            (w, (Coord.THETA, i), (Coord.THETA, i)),
            (-w, (Coord.THETABAR, i), (Coord.THETABAR, i)),
        ])
    return Derivation.combination(terms)


def check_q_squared(model: LinearModel) -> list[str]:
    """Générateurs x où Q(Q(x)) diffère de la dérivation torique ; liste vide si Q² est cohérent."""
    torus = torus_derivation(model)
    failures: list[str] = []
    for i in range(model.blocks):
        for kind in Coord:
            x = SuperFunction.generator(model.blocks, kind, i)
            twice = apply_derivation(model.q_field, apply_derivation(model.q_field, x))
            if twice != apply_derivation(torus, x):
                failures.append(f"{kind.value}_{i + 1}")
    if failures:
        logger.warning("Q² incohérent sur %s", ", ".join(failures))
    return failures


def apply_q(model: LinearModel, f: SuperFunction) -> SuperFunction:
    if f.blocks != model.blocks:
        raise DimensionError(f"fonction à {f.blocks} blocs pour un modèle à {model.blocks} blocs")
    return apply_derivation(model.q_field, f)


def is_equivariant(model: LinearModel, f: SuperFunction) -> bool:
    return apply_q(model, f).is_zero()


def invariant_u(model: LinearModel, i: int) -> SuperFunction:
    """u_i = z_i z̄_i - c²θ_iθ̄_i/(𝐢λ_i), Q-fermé, sans enveloppe."""
    m = model.blocks
    if not 0 <= i < m:
        raise DimensionError(f"bloc {i} absent (m={m})")
    lam = model.lambdas[i]
    c = model.rep.odd_scale
    even = [0] * (2 * m)
    even[2 * i] = even[2 * i + 1] = 1
    odd = (1 << odd_bit(Coord.THETA, i)) | (1 << odd_bit(Coord.THETABAR, i))
    return SuperFunction(m, {
        (tuple(even), 0): ONE,
        ((0,) * (2 * m), odd): -(c * c) / (I_UNIT * lam),
    })


def _exp_minus_su(model: LinearModel, i: int, s: Any) -> SuperFunction:
    """e^{-s u_i} = e^{-s z z̄}(1 + s c²θθ̄/(𝐢λ)) par nilpotence de θθ̄."""
    m = model.blocks
    lam = model.lambdas[i]
    c = model.rep.odd_scale
    odd = (1 << odd_bit(Coord.THETA, i)) | (1 << odd_bit(Coord.THETABAR, i))
    envelope = [0] * m
    envelope[i] = s
    return SuperFunction(m, {
        ((0,) * (2 * m), 0): ONE,
        ((0,) * (2 * m), odd): cq(s) * c * c / (I_UNIT * lam),
    }, envelope)


def _polynomial_in(u: SuperFunction, coeffs: Sequence[Any]) -> SuperFunction:
    total = SuperFunction.zero(u.blocks)
    power = SuperFunction.constant(u.blocks)
    for k, a in enumerate(coeffs):
        if k:
            power = multiply(power, u)
        total = total + power.scale(as_gaussian(a))
    return total


def make_equivariant_form(
    model: LinearModel,
    profile: Sequence[Sequence[Any]] | None = None,
    envelope: Sequence[Any] | None = None,
) -> SuperFunction:
    """f = ∏_i P_i(u_i) e^{-s_i u_i} ; profile[i] liste les coefficients de P_i par degré croissant."""
    m = model.blocks
    profile = [[1]] * m if profile is None else [list(p) for p in profile]
    envelope = [1] * m if envelope is None else list(envelope)
    if len(profile) != m or len(envelope) != m:
        raise DimensionError(f"profil et enveloppe doivent compter {m} entrées")
    s_values = [rational(s) for s in envelope]
    for i, s in enumerate(s_values):
        if s <= 0:
            raise DivergenceError(f"s_{i + 1} = {s} doit être > 0")
    f = SuperFunction.constant(m)
    for i in range(m):
        u = invariant_u(model, i)
        factor = multiply(_polynomial_in(u, profile[i] or [0]), _exp_minus_su(model, i, s_values[i]))
        f = multiply(f, factor)
    return f


@dataclass
class VerificationReport:
    lhs: ExactValue
    rhs: ExactValue
    residual: ExactValue
    equal: bool
    mode: str = "exact"
    eps_trace: list[dict[str, Any]] | None = field(default=None)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "residual": self.residual.to_dict(),
            "equal": self.equal,
            "mode": self.mode,
        }
        if self.eps_trace is not None:
            d["eps_trace"] = self.eps_trace
        return d


def verify_localization(model: LinearModel, f: SuperFunction) -> VerificationReport:
    """∫f contre Loc_W(f|₀) ; le seul point fixe du modèle linéaire est l'origine."""
    if not is_equivariant(model, f):
        raise EquivarianceError("la forme n'est pas Q-équivariante : Q(f) ≠ 0")
    lhs = berezin_integral(f)
    rhs = loc_pairing(model.rep, BerFiber(eval_origin(f)))
    residual = lhs - rhs
    return VerificationReport(lhs, rhs, residual, residual.is_zero)


def verify_total_derivative(model: LinearModel, g: SuperFunction) -> ExactValue:
    """∫Q(g), nul pour toute g intégrable."""
    return berezin_integral(apply_q(model, g))


# -- suites aléatoires -----------------------------------------------------------


def random_rep(rng: np.random.Generator, blocks: int) -> CSRep:
    lambdas = [LAMBDA_POOL[k] for k in rng.integers(0, len(LAMBDA_POOL), size=blocks)]
    return CSRep.from_lambdas(lambdas)


def random_profile(rng: np.random.Generator, blocks: int, max_degree: int = 4) -> list[list[int]]:
    out = []
    for _ in range(blocks):
        degree = int(rng.integers(0, max_degree + 1))
        coeffs = [int(c) for c in rng.integers(-3, 4, size=degree + 1)]
        if not any(coeffs):
            coeffs[0] = 1
        out.append(coeffs)
    return out


def random_envelope(rng: np.random.Generator, blocks: int) -> list[str]:
    return [ENVELOPE_POOL[k] for k in rng.integers(0, len(ENVELOPE_POOL), size=blocks)]


def random_integrable(rng: np.random.Generator, blocks: int, terms: int = 4, max_power: int = 3) -> SuperFunction:
    """Somme de monômes aléatoires fois une gaussienne d'enveloppe aléatoire."""
    items = []
    for _ in range(terms):
        even = [int(e) for e in rng.integers(0, max_power + 1, size=2 * blocks)]
        odd = int(rng.integers(0, 1 << (2 * blocks)))
        re_part, im_part = (int(x) for x in rng.integers(-5, 6, size=2))
        items.append((cq(re_part, im_part), even, odd))
    return SuperFunction(blocks, items, random_envelope(rng, blocks))


@dataclass
class SuiteReport:
    seed: int
    count: int
    failures: int = 0
    rows: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict[str, Any]:
        return {"seed": self.seed, "count": self.count, "failures": self.failures, "rows": self.rows}


def verify_random_suite(
    seed: int,
    count: int,
    max_blocks: int = 3,
    max_degree: int = 4,
    rep: CSRep | None = None,
) -> SuiteReport:
    """Formes équivariantes et fonctions intégrables aléatoires, reproductibles à seed fixée.

    Avec rep, toutes les formes vivent sur cette représentation ; sinon λ et m sont tirés.
    """
    rng = np.random.default_rng(seed)
    report = SuiteReport(seed, count)
    fixed_model = build_model(rep) if rep is not None else None
    for k in range(count):
        if fixed_model is not None:
            model = fixed_model
            blocks = model.blocks
        else:
            blocks = int(rng.integers(1, max_blocks + 1))
            model = build_model(random_rep(rng, blocks))
        profile = random_profile(rng, blocks, max_degree)
        envelope = random_envelope(rng, blocks)
        f = make_equivariant_form(model, profile, envelope)
        loc = verify_localization(model, f)
        total = verify_total_derivative(model, random_integrable(rng, blocks))
        q2_failures = check_q_squared(model)
        ok = loc.equal and total.is_zero and not q2_failures
        if not ok:
            report.failures += 1
            logger.warning("échec de la forme %d (seed=%d)", k, seed)
        report.rows.append({
            "index": k,
            "blocks": blocks,
            "lambdas": ";".join(str(ExactValue(x)) for x in model.lambdas),
            "profile": ";".join(",".join(str(c) for c in p) for p in profile),
            "envelope": ";".join(envelope),
            "lhs": str(loc.lhs),
            "rhs": str(loc.rhs),
            "residual": str(loc.residual),
            "total_derivative": str(total),
            "ok": ok,
        })
    logger.info("suite aléatoire seed=%d : %d formes, %d échecs", seed, count, report.failures)
    return report


def calibrate_kappa(lam: Any = 1) -> ExactValue:
    """Recalcule κ sur le témoin e^{-u} d'un bloc : ∫ (à κ = 1) contre Loc_W = 2π/λ."""
    model = build_model(CSRep.from_lambdas([lam]))
    f = make_equivariant_form(model)
    raw = berezin_integral(f, kappa=ONE)
    kappa = loc_pairing(model.rep, BerFiber(eval_origin(f))) / raw
    logger.info("calibration : κ = %s (λ = %s)", kappa, lam)
    return kappa
