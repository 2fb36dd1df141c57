"""Données de racines des superalgèbres de Kac-Moody (racines entières, forme de Gram entière)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from superloc.config import ConfigError, ModelError, SuperlocError
from superloc.homspace.weyl import Vector, WeylElement, pairing, reflection

logger = logging.getLogger(__name__)


def is_positive(v: Sequence[int]) -> bool:
    """Positivité lexicographique : première coordonnée non nulle > 0."""
    for x in v:
        if x:
            return x > 0
    return False


def _neg(v: Sequence[int]) -> Vector:
    return tuple(-x for x in v)


def _vectors(rows: Any, rank: int, name: str) -> tuple[Vector, ...]:
    try:
        out = tuple(tuple(int(x) for x in row) for row in rows)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: liste de vecteurs entiers attendue") from e
    for v in out:
        if len(v) != rank:
            raise ConfigError(f"{name}: vecteur {list(v)} de rang {len(v)} au lieu de {rank}")
    return out


@dataclass(frozen=True)
class RootData:
    rank: int
    even_roots: tuple[Vector, ...]
    odd_roots: tuple[Vector, ...]
    gram: tuple[tuple[int, ...], ...]
    weyl_generators: tuple[WeylElement, ...]
    isotropic_roots: tuple[Vector, ...] = ()
    k_roots: tuple[Vector, ...] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ConfigError("weights_basis_rank doit être >= 1")
        if len(self.gram) != self.rank or any(len(r) != self.rank for r in self.gram):
            raise ConfigError(f"matrice de Gram de taille incorrecte pour le rang {self.rank}")
        for i in range(self.rank):
            for j in range(self.rank):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ConfigError("matrice de Gram non symétrique")
        odd = set(self.odd_roots)
        for i, a in enumerate(self.isotropic_roots):
            if a not in odd:
                raise ModelError(f"α_{i + 1} = {list(a)} n'est pas une racine impaire")
            if self.pair(a, a):
                raise ModelError(f"α_{i + 1} = {list(a)} n'est pas isotrope")
            for j, b in enumerate(self.isotropic_roots[:i]):
                if self.pair(a, b):
                    raise ModelError(f"α_{j + 1} et α_{i + 1} ne sont pas orthogonales")

    @property
    def defect(self) -> int:
        return len(self.isotropic_roots)

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        return pairing(self.gram, x, y)

    def orthogonal_to_isotropic(self, v: Sequence[int]) -> bool:
        return all(self.pair(v, a) == 0 for a in self.isotropic_roots)

    def k_root_set(self) -> frozenset[Vector]:
        """Racines de 𝔨 : celles fournies, sinon les racines orthogonales à tous les α_i."""
        if self.k_roots is not None:
            return frozenset(self.k_roots)
        return frozenset(
            v for v in self.even_roots + self.odd_roots if self.orthogonal_to_isotropic(v)
        )

    def positive_even_outside_k(self) -> list[Vector]:
        k = self.k_root_set()
        return [v for v in self.even_roots if is_positive(v) and v not in k]

    def centralizer_reflection_roots(self) -> list[Vector]:
        """Racines paires β orthogonales à tous les α_i (s_β fixe alors chaque α_i)."""
        return [b for b in self.even_roots if is_positive(b) and self.orthogonal_to_isotropic(b)]

    def extra_isotropic_k_roots(self) -> list[Vector]:
        """Racines isotropes de 𝔨 autres que ±α_i."""
        alphas = set(self.isotropic_roots) | {_neg(a) for a in self.isotropic_roots}
        return [
            v for v in sorted(self.k_root_set())
            if v in set(self.odd_roots) and not self.pair(v, v) and v not in alphas
        ]

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "weights_basis_rank": self.rank,
            "even_roots": [list(v) for v in self.even_roots],
            "odd_roots": [list(v) for v in self.odd_roots],
            "gram": [list(r) for r in self.gram],
            "weyl_generators": [g.to_dict() for g in self.weyl_generators],
            "isotropic_roots": [list(v) for v in self.isotropic_roots],
        }
        if self.k_roots is not None:
            d["k_roots"] = [list(v) for v in self.k_roots]
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> RootData:
        """Lit un fichier de racines ; un générateur est {perm, signs} ou {reflection: β}."""
        try:
            rank = int(d["weights_basis_rank"])
            gram = _vectors(d["gram"], rank, "gram")
            generators = []
            for g in d.get("weyl_generators", []):
                if "reflection" in g:
                    generators.append(reflection(tuple(int(x) for x in g["reflection"]), gram))
                else:
                    generators.append(WeylElement.from_dict(g))
            return cls(
                rank=rank,
                even_roots=_vectors(d.get("even_roots", []), rank, "even_roots"),
                odd_roots=_vectors(d.get("odd_roots", []), rank, "odd_roots"),
                gram=gram,
                weyl_generators=tuple(generators),
                isotropic_roots=_vectors(d.get("isotropic_roots", []), rank, "isotropic_roots"),
                k_roots=_vectors(d["k_roots"], rank, "k_roots") if d.get("k_roots") is not None else None,
                name=str(d.get("name", "")),
            )
        except SuperlocError:
            raise
        except KeyError as e:
            raise ConfigError(f"champ manquant dans les données de racines: {e}") from e
        except (TypeError, ValueError) as e:
            raise ConfigError(f"données de racines invalides: {e}") from e


def _unit(rank: int, i: int, c: int = 1) -> list[int]:
    v = [0] * rank
    v[i] = c
    return v


def _add(*vs: Sequence[int]) -> Vector:
    return tuple(sum(xs) for xs in zip(*vs))


def gl_root_data(m: int, n: int, d: int | None = None) -> RootData:
    """gl(m|n) : base ε_1..ε_m, δ_1..δ_n, forme diag(1, …, -1, …), α_i = ε_i - δ_i pour i ≤ d."""
    if m < 1 or n < 1:
        raise ConfigError("gl(m|n) exige m, n >= 1")
    d = min(m, n) if d is None else d
    if not 0 <= d <= min(m, n):
        raise ConfigError(f"défaut d = {d} hors de [0, {min(m, n)}]")
    rank = m + n
    eps = [_unit(rank, i) for i in range(m)]
    delta = [_unit(rank, m + j) for j in range(n)]
    even = [_add(eps[i], _neg(eps[j])) for i in range(m) for j in range(m) if i != j]
    even += [_add(delta[i], _neg(delta[j])) for i in range(n) for j in range(n) if i != j]
    odd = []
    for i in range(m):
        for j in range(n):
            a = _add(eps[i], _neg(delta[j]))
            odd += [a, _neg(a)]
    gram = tuple(tuple((1 if i < m else -1) if i == j else 0 for j in range(rank)) for i in range(rank))
    generators = [WeylElement.transposition(rank, i, i + 1) for i in range(m - 1)]
    generators += [WeylElement.transposition(rank, m + j, m + j + 1) for j in range(n - 1)]
    return RootData(
        rank=rank,
        even_roots=tuple(even),
        odd_roots=tuple(odd),
        gram=gram,
        weyl_generators=tuple(generators),
        isotropic_roots=tuple(_add(eps[i], _neg(delta[i])) for i in range(d)),
        name=f"gl({m}|{n})",
    )


def osp_root_data(m: int, n: int, d: int | None = None) -> RootData:
    """osp(2m|2n) : racines paires ±ε_i±ε_j, ±δ_i±δ_j, ±2δ_i ; impaires ±ε_i±δ_j ; W = W(D_m) × W(C_n)."""
    if m < 1 or n < 1:
        raise ConfigError("osp(2m|2n) exige m, n >= 1")
    d = min(m, n) if d is None else d
    if not 0 <= d <= min(m, n):
        raise ConfigError(f"défaut d = {d} hors de [0, {min(m, n)}]")
    rank = m + n
    gram = tuple(tuple((1 if i < m else -1) if i == j else 0 for j in range(rank)) for i in range(rank))
    even: list[Vector] = []
    for base, count in ((0, m), (m, n)):
        for i in range(count):
            for j in range(i + 1, count):
                for si in (1, -1):
                    for sj in (1, -1):
                        even.append(_add(_unit(rank, base + i, si), _unit(rank, base + j, sj)))
    for j in range(n):
        even += [tuple(_unit(rank, m + j, 2)), tuple(_unit(rank, m + j, -2))]
    odd = [
        _add(_unit(rank, i, si), _unit(rank, m + j, sj))
        for i in range(m) for j in range(n) for si in (1, -1) for sj in (1, -1)
    ]
    simple = [_add(_unit(rank, i), _unit(rank, i + 1, -1)) for i in range(m - 1)]
    if m >= 2:
        simple.append(_add(_unit(rank, m - 2), _unit(rank, m - 1)))
    simple += [_add(_unit(rank, m + j), _unit(rank, m + j + 1, -1)) for j in range(n - 1)]
    simple.append(tuple(_unit(rank, m + n - 1, 2)))
    generators = tuple(reflection(b, gram) for b in simple)
    return RootData(
        rank=rank,
        even_roots=tuple(even),
        odd_roots=tuple(odd),
        gram=gram,
        weyl_generators=generators,
        isotropic_roots=tuple(_add(_unit(rank, i), _unit(rank, m + i, -1)) for i in range(d)),
        name=f"osp({2 * m}|{2 * n})",
    )
