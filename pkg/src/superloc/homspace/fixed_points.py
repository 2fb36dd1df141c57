"""Énumération des points fixes de Q par classes de Weyl.

Un point fixe est représenté par une classe wW_K ; aucune géométrie n'est construite.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Sequence

from superloc.config import ConfigError, EnumerationLimitError, ModelError, RunConfig
from superloc.homspace.rootdata import RootData
from superloc.homspace.weyl import Vector, WeylElement, closure, reflection

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixedPoints:
    count: int
    representatives: tuple


# -- SOSp(2n|2n) / GL(n|n) -------------------------------------------------------


def _isotropic_alphas(n: int) -> list[Vector]:
    """α_i = ε_i - δ_i dans la base (ε_1..ε_n, δ_1..δ_n)."""
    out = []
    for i in range(n):
        v = [0] * (2 * n)
        v[i], v[n + i] = 1, -1
        out.append(tuple(v))
    return out


def _signed(signs_eps: Sequence[int], signs_delta: Sequence[int]) -> WeylElement:
    n = len(signs_eps)
    return WeylElement(tuple(range(2 * n)), tuple(signs_eps) + tuple(signs_delta))


def _even_sign_vectors(n: int):
    """s^ε ∈ {±1}^n avec un nombre pair de -1."""
    return (signs for signs in itertools.product((1, -1), repeat=n) if signs.count(-1) % 2 == 0)


def _fixes_line(w: WeylElement, alpha: Vector) -> bool:
    image = w.act(alpha)
    return image == alpha or image == tuple(-x for x in alpha)


def fixed_isotropic(n: int) -> FixedPoints:
    """Éléments (s^ε, s^δ) de B avec w(α_i) = ±α_i ; 2^{n-1} éléments.

    Pour chaque s^ε, le test sur α_i ne porte que sur (s^ε_i, s^δ_i) : on filtre
    les valeurs de s^δ_i coordonnée par coordonnée.
    """
    if n < 1:
        raise ConfigError("n doit être >= 1")
    alphas = _isotropic_alphas(n)
    reps = []
    for signs_eps in _even_sign_vectors(n):
        choices = []
        for i, se in enumerate(signs_eps):
            kept = []
            for sd in (1, -1):
                local = [1] * (2 * n)
                local[i], local[n + i] = se, sd
                if _fixes_line(WeylElement(tuple(range(2 * n)), tuple(local)), alphas[i]):
                    kept.append(sd)
            choices.append(kept)
        for signs_delta in itertools.product(*choices):
            reps.append(_signed(signs_eps, signs_delta))
    logger.debug("points fixes isotropes n=%d : %d", n, len(reps))
    return FixedPoints(len(reps), tuple(reps))


def fixed_isotropic_bruteforce(n: int) -> int:
    """Parcourt B ≅ Z_2^{2n-1} entier et compte les w avec w(α_i) = ±α_i pour tout i."""
    if n < 1:
        raise ConfigError("n doit être >= 1")
    alphas = _isotropic_alphas(n)
    count = 0
    for signs_eps in _even_sign_vectors(n):
        for signs_delta in itertools.product((1, -1), repeat=n):
            w = _signed(signs_eps, signs_delta)
            if all(_fixes_line(w, alpha) for alpha in alphas):
                count += 1
    return count


# -- P(n) / P(r) × P(s) --------------------------------------------------------------


def periplectic_formula(r: int, s: int) -> int:
    """C(l, r/2) pour r pair, C(l, s/2) pour r impair et s pair, 0 si r et s sont impairs."""
    n = r + s
    l = n // 2
    if r % 2 == 0:
        return comb(l, r // 2)
    if s % 2 == 0:
        return comb(l, s // 2)
    return 0


def _periplectic_branch(r: int, n: int, first: int) -> set[frozenset[int]]:
    """Classes atteintes par les w avec w^{-1}(1) = first ; w^{-1} est construit valeur par valeur.

    Pour chaque j impair <= 2l, w^{-1}(j) et w^{-1}(j+1) sont tous deux <= r ou tous deux > r.
    La classe wW_K est déterminée par A = w({1..r}) = {j : w^{-1}(j) <= r}.
    """
    l = n // 2
    found: set[frozenset[int]] = set()
    inverse = [first]
    used = {first}

    def walk() -> None:
        j = len(inverse)
        if j == n:
            found.add(frozenset(k + 1 for k, v in enumerate(inverse) if v <= r))
            return
        for v in range(1, n + 1):
            if v in used:
                continue
            # position j (0-indexée) impaire : v complète la paire {j-1, j}
            if j % 2 == 1 and j < 2 * l and (inverse[j - 1] <= r) != (v <= r):
                continue
            inverse.append(v)
            used.add(v)
            walk()
            inverse.pop()
            used.discard(v)

    walk()
    return found


def fixed_periplectic(r: int, s: int, config: RunConfig | None = None) -> FixedPoints:
    """Classes wW_K de S_n, W_K = S_r × S_s, vérifiant la condition d'appariement."""
    config = config or RunConfig()
    if r < 1 or s < 1:
        raise ConfigError("r et s doivent être >= 1")
    n = r + s
    if n > config.max_enum:
        raise EnumerationLimitError(f"n = {n} dépasse la borne d'énumération {config.max_enum}")
    firsts = list(range(1, n + 1))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_periplectic_branch, [r] * n, [n] * n, firsts))
    else:
        parts = [_periplectic_branch(r, n, f) for f in firsts]
    cosets: set[frozenset[int]] = set().union(*parts)
    reps = tuple(sorted(tuple(sorted(a)) for a in cosets))
    logger.debug("points fixes périplectiques (%d, %d) : %d classes", r, s, len(reps))
    return FixedPoints(len(reps), reps)


# -- drapeaux ----------------------------------------------------------------------


@dataclass(frozen=True)
class WeylRatio:
    order_w: int
    order_wd: int
    order_wc: int

    @property
    def ratio(self) -> int:
        return self.order_wd // self.order_wc


def _preserves_alphas(w: WeylElement, alphas: set[Vector]) -> bool:
    return all(w.act(a) in alphas for a in alphas)


def weyl_ratio_flag(data: RootData, config: RunConfig | None = None) -> WeylRatio:
    """|W_d| / |W_c| : W_d stabilise {±α_i}, W_c est engendré par les s_β, β ⟂ tous les α_i."""
    config = config or RunConfig()
    group = closure(data.weyl_generators, data.rank, config.max_group_order)
    alphas = set(data.isotropic_roots) | {tuple(-x for x in a) for a in data.isotropic_roots}
    order_wd = sum(1 for w in group if _preserves_alphas(w, alphas))
    c_generators = []
    for beta in data.centralizer_reflection_roots():
        s_beta = reflection(beta, data.gram)
        if any(s_beta.act(a) != a for a in data.isotropic_roots):
            continue
        c_generators.append(s_beta)
    order_wc = len(closure(c_generators, data.rank, config.max_group_order))
    if order_wd % order_wc:
        raise ModelError(
            f"|W_d| = {order_wd} n'est pas divisible par |W_c| = {order_wc} : 𝔨 ou 𝔠 incohérents"
        )
    logger.debug("%s : |W| = %d, |W_d| = %d, |W_c| = %d", data.name, len(group), order_wd, order_wc)
    return WeylRatio(len(group), order_wd, order_wc)
