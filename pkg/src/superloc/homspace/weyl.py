"""Éléments de Weyl comme permutations signées de la base des poids."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from superloc.config import ConfigError, EnumerationLimitError, ModelError

logger = logging.getLogger(__name__)

Vector = tuple[int, ...]


@dataclass(frozen=True)
class WeylElement:
    """w(e_k) = signs[k] · e_{perm[k]}."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        perm = tuple(int(p) for p in self.perm)
        signs = tuple(int(s) for s in self.signs)
        if len(perm) != len(signs):
            raise ConfigError("perm et signs de longueurs différentes")
        if sorted(perm) != list(range(len(perm))):
            raise ConfigError(f"{list(perm)} n'est pas une permutation")
        if any(s not in (1, -1) for s in signs):
            raise ConfigError("les signes doivent valoir ±1")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def identity(cls, rank: int) -> WeylElement:
        return cls(tuple(range(rank)), (1,) * rank)

    @classmethod
    def transposition(cls, rank: int, i: int, j: int) -> WeylElement:
        perm = list(range(rank))
        perm[i], perm[j] = perm[j], perm[i]
        return cls(tuple(perm), (1,) * rank)

    @classmethod
    def sign_change(cls, rank: int, indices: Iterable[int]) -> WeylElement:
        flipped = set(indices)
        return cls(tuple(range(rank)), tuple(-1 if k in flipped else 1 for k in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.perm)

    def act(self, v: Sequence[int]) -> Vector:
        if len(v) != self.rank:
            raise ConfigError(f"vecteur de rang {len(v)} pour un élément de rang {self.rank}")
        out = [0] * self.rank
        for k, x in enumerate(v):
            out[self.perm[k]] += self.signs[k] * x
        return tuple(out)

    def compose(self, other: WeylElement) -> WeylElement:
        """self ∘ other."""
        perm = tuple(self.perm[p] for p in other.perm)
        signs = tuple(other.signs[k] * self.signs[other.perm[k]] for k in range(self.rank))
        return WeylElement(perm, signs)

    __mul__ = compose

    def inverse(self) -> WeylElement:
        perm = [0] * self.rank
        signs = [1] * self.rank
        for k, (p, s) in enumerate(zip(self.perm, self.signs)):
            perm[p] = k
            signs[p] = s
        return WeylElement(tuple(perm), tuple(signs))

    def is_identity(self) -> bool:
        return self == WeylElement.identity(self.rank)

    def to_dict(self) -> dict[str, list[int]]:
        return {"perm": list(self.perm), "signs": list(self.signs)}

    @classmethod
    def from_dict(cls, d: dict) -> WeylElement:
        try:
            return cls(tuple(d["perm"]), tuple(d.get("signs", [1] * len(d["perm"]))))
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"élément de Weyl invalide: {d!r}") from e


def pairing(gram: Sequence[Sequence[int]], x: Sequence[int], y: Sequence[int]) -> int:
    """(x, y) pour la forme de Gram entière."""
    return sum(x[i] * gram[i][j] * y[j] for i in range(len(x)) for j in range(len(y)) if gram[i][j])


def reflection(beta: Sequence[int], gram: Sequence[Sequence[int]]) -> WeylElement:
    """s_β(x) = x - 2(x, β)/(β, β) β ; doit être une permutation signée de la base."""
    rank = len(beta)
    norm = pairing(gram, beta, beta)
    if norm == 0:
        raise ModelError(f"réflexion selon la racine isotrope {list(beta)}")
    perm = [0] * rank
    signs = [1] * rank
    for k in range(rank):
        e = [0] * rank
        e[k] = 1
        coeff = Fraction(2 * pairing(gram, e, beta), norm)
        image = [Fraction(x) - coeff * b for x, b in zip(e, beta)]
        support = [i for i, x in enumerate(image) if x]
        if len(support) != 1 or abs(image[support[0]]) != 1:
            raise ModelError(f"la réflexion selon {list(beta)} n'est pas une permutation signée")
        perm[k] = support[0]
        signs[k] = int(image[support[0]])
    return WeylElement(tuple(perm), tuple(signs))


def closure(generators: Sequence[WeylElement], rank: int, bound: int) -> list[WeylElement]:
    """Sous-groupe engendré, par parcours en largeur ; ordre de découverte déterministe."""
    identity = WeylElement.identity(rank)
    for g in generators:
        if g.rank != rank:
            raise ConfigError(f"générateur de rang {g.rank} pour un réseau de rang {rank}")
    seen = {identity}
    order = [identity]
    queue = deque([identity])
    while queue:
        w = queue.popleft()
        for g in generators:
            h = g.compose(w)
            if h in seen:
                continue
            if len(seen) >= bound:
                raise EnumerationLimitError(f"groupe engendré d'ordre > {bound}")
            seen.add(h)
            order.append(h)
            queue.append(h)
    logger.debug("clôture de %d générateurs : ordre %d", len(generators), len(order))
    return order
