"""Caractères, représentations CS de Q-groupes, pfaffien et fonctionnelle de localisation Loc_W."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from superloc import constants
from superloc.config import ConfigError, CSStructureError, DimensionError, NondegeneracyError, SuperlocError
from superloc.exact import (
    I_UNIT,
    ONE,
    ZERO,
    ExactValue,
    Gaussian,
    as_gaussian,
    cq,
    gaussian_pow,
    gaussian_to_pair,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Character:
    """Caractère du tore T, en coordonnées du réseau des caractères."""

    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_positive(self) -> bool:
        """Partition Λ_+ : première coordonnée non nulle positive."""
        for c in self.coords:
            if c:
                return c > 0
        return False

    def __neg__(self) -> Character:
        return Character(tuple(-c for c in self.coords))


@dataclass(frozen=True)
class QGroupSpec:
    """Tore de rang t et coordonnées de Q² dans t_C."""

    torus_rank: int
    q_square: tuple[Gaussian, ...]

    def __post_init__(self) -> None:
        if self.torus_rank < 1:
            raise ConfigError("torus_rank doit être >= 1")
        q = tuple(as_gaussian(x) for x in self.q_square)
        if len(q) != self.torus_rank:
            raise DimensionError(f"q_square de longueur {len(q)} pour un tore de rang {self.torus_rank}")
        object.__setattr__(self, "q_square", q)


def lambda_of(chi: Character, q: QGroupSpec) -> Gaussian:
    """χ(Q²) = Σ_k χ_k (Q²)_k."""
    if chi.rank != q.torus_rank:
        raise DimensionError(f"caractère de rang {chi.rank} pour un tore de rang {q.torus_rank}")
    total = ZERO
    for c, x in zip(chi.coords, q.q_square):
        total = total + x * c
    return total


@dataclass(frozen=True)
class Summand:
    chi: Character
    flipped: bool = False


@dataclass(frozen=True)
class CSRep:
    """Représentation CS orientée non dégénérée, somme ordonnée de blocs W_χ.

    odd_scale est le facteur c des vecteurs impairs canoniques après Q -> cQ
    (θ' = cθ) ; il vaut 1 pour une représentation construite directement.
    """

    qgroup: QGroupSpec
    summands: tuple[Summand, ...] = ()
    odd_scale: Gaussian = field(default=ONE)

    def __post_init__(self) -> None:
        object.__setattr__(self, "summands", tuple(self.summands))
        object.__setattr__(self, "odd_scale", as_gaussian(self.odd_scale))
        if not self.odd_scale:
            raise NondegeneracyError("odd_scale nul")
        for i, s in enumerate(self.summands):
            if s.chi.rank != self.qgroup.torus_rank:
                raise DimensionError(
                    f"bloc {i + 1}: caractère de rang {s.chi.rank}, tore de rang {self.qgroup.torus_rank}"
                )
            if not lambda_of(s.chi, self.qgroup):
                raise NondegeneracyError(f"bloc {i + 1}: χ(Q²) = 0 pour χ = {list(s.chi.coords)}")

    @property
    def blocks(self) -> int:
        return len(self.summands)

    @property
    def dimension(self) -> tuple[int, int]:
        return (2 * self.blocks, 2 * self.blocks)

    @property
    def lambdas(self) -> tuple[Gaussian, ...]:
        return tuple(lambda_of(s.chi, self.qgroup) for s in self.summands)

    @classmethod
    def from_lambdas(cls, lambdas: Iterable[Any], flips: Iterable[bool] | None = None) -> CSRep:
        """Blocs de caractères distincts e_1, …, e_m avec Q² = (λ_1, …, λ_m)."""
        lams = [as_gaussian(x) for x in lambdas]
        m = len(lams)
        if m == 0:
            raise ConfigError("au moins un λ requis")
        flags = list(flips) if flips is not None else [False] * m
        if len(flags) != m:
            raise DimensionError("autant de drapeaux que de λ")
        summands = tuple(
            Summand(Character(tuple(1 if k == i else 0 for k in range(m))), bool(f))
            for i, f in enumerate(flags)
        )
        return cls(QGroupSpec(m, tuple(lams)), summands)

    @classmethod
    def empty(cls, qgroup: QGroupSpec) -> CSRep:
        return cls(qgroup, ())

    def with_flips(self, flips: Sequence[bool]) -> CSRep:
        if len(flips) != self.blocks:
            raise DimensionError("autant de drapeaux que de blocs")
        return CSRep(
            self.qgroup,
            tuple(Summand(s.chi, bool(f)) for s, f in zip(self.summands, flips)),
            self.odd_scale,
        )

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "torus_rank": self.qgroup.torus_rank,
            "q_square": [gaussian_to_pair(x) for x in self.qgroup.q_square],
            "summands": [{"chi": list(s.chi.coords), "flipped": s.flipped} for s in self.summands],
        }
        if self.odd_scale != ONE:
            d["odd_scale"] = gaussian_to_pair(self.odd_scale)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> CSRep:
        try:
            rank = int(d["torus_rank"])
            q = tuple(as_gaussian(x) for x in d["q_square"])
            summands = tuple(
                Summand(Character(tuple(s["chi"])), bool(s.get("flipped", False)))
                for s in d.get("summands", [])
            )
        except SuperlocError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"enregistrement CSRep invalide: {e}") from e
        odd_scale = as_gaussian(d["odd_scale"]) if "odd_scale" in d else ONE
        return cls(QGroupSpec(rank, q), summands, odd_scale)


@dataclass(frozen=True)
class BerFiber:
    """Coordonnée de ω|₀ dans la base (z_1∧z̄_1∧⋯)/(θ_1∧θ̄_1∧⋯) de la représentation."""

    coeff: ExactValue


def pfaffian(rep: CSRep) -> Gaussian:
    """Pf(W) = ∏_i (-1)^{flipped_i} λ_i."""
    out = ONE
    for s, lam in zip(rep.summands, rep.lambdas):
        if not lam:
            raise NondegeneracyError("λ nul")
        out = out * (-lam if s.flipped else lam)
    return out


def loc_scalar(rep: CSRep) -> ExactValue:
    """Scalaire L tel que Loc_W(ω|₀) = L · coeff, soit (2π)^m / Pf(W) dans la base canonique."""
    m = rep.blocks
    coeff = gaussian_pow(cq(2), m) / pfaffian(rep) * gaussian_pow(rep.odd_scale, 2 * m)
    return ExactValue(coeff * constants.LOC_SIGN, m)


def loc_pairing(rep: CSRep, fiber: BerFiber) -> ExactValue:
    return loc_scalar(rep) * fiber.coeff


def canonical_volume_coefficient(rep: CSRep) -> ExactValue:
    """Coordonnée de la forme volume canonique de V ⊕ V* dans la fibre de base canonique.

    θ̄_j = 𝐢λ_j θ_j^∨ donne la coordonnée ∏_j λ_j/𝐢 (au signe d'orientation près),
    de sorte que Loc_W ω = (2π/𝐢)^m.
    """
    m = rep.blocks
    coeff = pfaffian(rep) / gaussian_pow(I_UNIT, m) / gaussian_pow(rep.odd_scale, 2 * m)
    return ExactValue(coeff * constants.LOC_SIGN, 0)


def two_pi_over_i_power(m: int) -> ExactValue:
    """(2π/𝐢)^m."""
    return ExactValue(gaussian_pow(cq(2) / I_UNIT, m), m)


def direct_sum(a: CSRep, b: CSRep) -> CSRep:
    """W' ⊕ W'' ; Loc est multiplicatif."""
    if a.qgroup != b.qgroup:
        raise CSStructureError("somme directe de représentations de Q-groupes différents")
    if a.odd_scale != b.odd_scale:
        raise CSStructureError("somme directe de bases impaires d'échelles différentes")
    return CSRep(a.qgroup, a.summands + b.summands, a.odd_scale)


def rescale(rep: CSRep, c: Any) -> CSRep:
    """Remplace Q par cQ : Q² -> c²Q², vecteurs impairs canoniques multipliés par c."""
    c = as_gaussian(c)
    if not c:
        raise NondegeneracyError("Q -> cQ avec c = 0")
    c2 = c * c
    q = QGroupSpec(rep.qgroup.torus_rank, tuple(x * c2 for x in rep.qgroup.q_square))
    return CSRep(q, rep.summands, rep.odd_scale * c)


# -- base réelle ---------------------------------------------------------------


def _block_diagonal(blocks: Sequence[Sequence[Sequence[Gaussian]]]) -> DomainMatrix:
    n = sum(len(b) for b in blocks)
    rows = [[ZERO] * n for _ in range(n)]
    offset = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                rows[offset + i][offset + j] = x
        offset += len(b)
    return DomainMatrix(rows, (n, n), QQ_I)


def _entries(dm: DomainMatrix) -> list[list[Gaussian]]:
    n_rows, n_cols = dm.shape
    return [[dm[i, j].element for j in range(n_cols)] for i in range(n_rows)]


def real_q_squared_matrix(rep: CSRep) -> DomainMatrix:
    """Matrice de Q² sur W_{0,R} dans la base réelle (x_i, y_i), x = (z+z̄)/2, y = (z-z̄)/2i.

    Obtenue par changement de base depuis diag(𝐢λ, -𝐢λ) ; un bloc retourné échange x et y.
    """
    diag_blocks = []
    change_blocks = []
    for s, lam in zip(rep.summands, rep.lambdas):
        diag_blocks.append([[I_UNIT * lam, ZERO], [ZERO, -(I_UNIT * lam)]])
        # colonnes : x = (z + z̄)/2, y = (z - z̄)/(2i) exprimés en (z, z̄)
        half = cq(1, 0) / cq(2)
        x_col = [half, half]
        y_col = [half / I_UNIT, -(half / I_UNIT)]
        cols = [y_col, x_col] if s.flipped else [x_col, y_col]
        change_blocks.append([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
    if not diag_blocks:
        return DomainMatrix([], (0, 0), QQ_I)
    d = _block_diagonal(diag_blocks)
    p = _block_diagonal(change_blocks)
    return p.inv() * d * p


def skew_pfaffian(rows: Sequence[Sequence[Gaussian]]) -> Gaussian:
    """Pfaffien exact d'une matrice antisymétrique, par développement sur la première ligne."""
    n = len(rows)
    if n == 0:
        return ONE
    if n % 2:
        return ZERO
    total = ZERO
    rest = list(range(1, n))
    for idx, j in enumerate(rest):
        a = rows[0][j]
        if not a:
            continue
        keep = rest[:idx] + rest[idx + 1:]
        minor = [[rows[r][c] for c in keep] for r in keep]
        term = a * skew_pfaffian(minor)
        total = total + (term if idx % 2 == 0 else -term)
    return total


def pfaffian_of_real_block(rep: CSRep) -> Gaussian:
    """Pfaffien ordinaire de Q²|_{W_{0,R}} ; coïncide avec Pf(W) lorsque λ est réel."""
    return skew_pfaffian(_entries(real_q_squared_matrix(rep)))


def real_basis_loc(rep: CSRep) -> ExactValue:
    """Loc_W recalculé depuis la matrice réelle de Q² : 2^m c^{2m} / Pf_R(Q²) · π^m.

    Les repères (x, y) et (θ_x, θ_y) viennent de la même matrice de passage ; ses
    déterminants se simplifient dans le symbole θ_x∧θ_y/(x∧y).
    """
    m = rep.blocks
    pf = pfaffian_of_real_block(rep)
    if not pf:
        raise NondegeneracyError("Pfaffien réel nul")
    coeff = gaussian_pow(cq(2), m) / pf * gaussian_pow(rep.odd_scale, 2 * m)
    return ExactValue(coeff * constants.LOC_SIGN, m)


# -- décomposition ---------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalBasis:
    """Vecteurs z_i, z̄_i, θ_i = Qz_i, θ̄_i = Qz̄_i dans l'espace complet (pairs puis impairs)."""

    z: tuple[tuple[Gaussian, ...], ...]
    zbar: tuple[tuple[Gaussian, ...], ...]
    theta: tuple[tuple[Gaussian, ...], ...]
    thetabar: tuple[tuple[Gaussian, ...], ...]


@dataclass(frozen=True)
class Decomposition:
    rep: CSRep
    basis: CanonicalBasis
    q_matrix: tuple[tuple[Gaussian, ...], ...]

    def apply_q(self, vector: Sequence[Gaussian]) -> tuple[Gaussian, ...]:
        return _mat_vec(self.q_matrix, vector)


def _mat_vec(rows: Sequence[Sequence[Gaussian]], vector: Sequence[Gaussian]) -> tuple[Gaussian, ...]:
    dm = DomainMatrix([list(r) for r in rows], (len(rows), len(vector)), QQ_I)
    col = DomainMatrix([[as_gaussian(x)] for x in vector], (len(vector), 1), QQ_I)
    out = dm * col
    return tuple(out[i, 0].element for i in range(len(rows)))


def canonical_q_matrix(lambdas: Sequence[Any]) -> list[list[Gaussian]]:
    """Q en forme canonique sur la base (z_1, z̄_1, …, | θ_1, θ̄_1, …).

    Qz = θ, Qz̄ = θ̄, Qθ = 𝐢λz, Qθ̄ = -𝐢λz̄.
    """
    lams = [as_gaussian(x) for x in lambdas]
    n = 2 * len(lams)
    rows = [[ZERO] * (2 * n) for _ in range(2 * n)]
    for i, lam in enumerate(lams):
        z, zb = 2 * i, 2 * i + 1
        th, thb = n + 2 * i, n + 2 * i + 1
        rows[th][z] = ONE
        rows[thb][zb] = ONE
        rows[z][th] = I_UNIT * lam
        rows[zb][thb] = -(I_UNIT * lam)
    return rows


def _solve_q_square(chars: Sequence[Character], lams: Sequence[Gaussian], rank: int) -> tuple[Gaussian, ...]:
    rows = [[cq(c) for c in chi.coords] + [lam] for chi, lam in zip(chars, lams)]
    aug = DomainMatrix(rows, (len(rows), rank + 1), QQ_I)
    reduced, pivots = aug.rref()
    if rank in pivots:
        raise CSStructureError("Q² n'est pas un élément du tore : λ n'est pas linéaire en χ")
    solution = [ZERO] * rank
    for r, p in enumerate(pivots):
        solution[p] = reduced[r, rank].element
    return tuple(solution)


def decompose(weights: Sequence[Sequence[int]], q_matrix: Sequence[Sequence[Any]]) -> Decomposition:
    """Réduit une représentation (poids des vecteurs pairs, matrice de Q) à sa forme canonique ⊕ W_χ.

    La base complète est (e_1, …, e_n | f_1, …, f_n) ; Q doit être impair.
    """
    chars = [Character(tuple(w)) for w in weights]
    n = len(chars)
    if n == 0:
        raise ConfigError("aucun vecteur pair")
    rank = chars[0].rank
    if rank < 1 or any(c.rank != rank for c in chars):
        raise DimensionError("poids de rangs différents")
    rows = [[as_gaussian(x) for x in row] for row in q_matrix]
    if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
        raise DimensionError(f"matrice de Q de taille {len(rows)} pour {n} vecteurs pairs et {n} impairs")
    for i in range(2 * n):
        for j in range(2 * n):
            same_parity = (i < n) == (j < n)
            if same_parity and rows[i][j]:
                raise CSStructureError("Q doit échanger parties paire et impaire")
    if any(c.is_zero() for c in chars):
        raise NondegeneracyError("caractère nul : Q² s'annule sur ce poids")

    c_block = DomainMatrix([[rows[n + i][j] for j in range(n)] for i in range(n)], (n, n), QQ_I)
    b_block = DomainMatrix([[rows[i][n + j] for j in range(n)] for i in range(n)], (n, n), QQ_I)
    if not c_block.det() or not b_block.det():
        raise NondegeneracyError("bloc de Q singulier")

    pairs: list[tuple[int, int]] = []
    seen: set[Character] = set()
    for chi in chars:
        if chi in seen or -chi in seen:
            continue
        seen.add(chi)
        pos = chi if chi.is_positive() else -chi
        plus = [k for k, c in enumerate(chars) if c == pos]
        minus = [k for k, c in enumerate(chars) if c == -pos]
        if len(plus) != len(minus):
            raise CSStructureError(
                f"caractère {list(pos.coords)} de multiplicité {len(plus)}, conjugué de multiplicité {len(minus)}"
            )
        pairs.extend(zip(plus, minus))

    q2 = _entries(b_block * c_block)
    for i in range(n):
        for j in range(n):
            if i != j and q2[i][j]:
                raise CSStructureError("Q² n'agit pas par des scalaires sur les vecteurs de poids")
    lam = [q2[k][k] / I_UNIT for k in range(n)]
    for p, q in pairs:
        if lam[q] != -lam[p]:
            raise CSStructureError("Q² n'est pas compatible avec la conjugaison z -> z̄")

    positives = [chars[p] for p, _ in pairs]
    q_square = _solve_q_square(positives, [lam[p] for p, _ in pairs], rank)
    qgroup = QGroupSpec(rank, q_square)
    for k, chi in enumerate(chars):
        if lambda_of(chi, qgroup) != lam[k]:
            raise CSStructureError("Q² n'est pas un élément du tore")

    def unit(k: int) -> tuple[Gaussian, ...]:
        return tuple(ONE if idx == k else ZERO for idx in range(2 * n))

    def q_column(k: int) -> tuple[Gaussian, ...]:
        return tuple(rows[i][k] for i in range(2 * n))

    basis = CanonicalBasis(
        z=tuple(unit(p) for p, _ in pairs),
        zbar=tuple(unit(q) for _, q in pairs),
        theta=tuple(q_column(p) for p, _ in pairs),
        thetabar=tuple(q_column(q) for _, q in pairs),
    )
    rep = CSRep(qgroup, tuple(Summand(chi) for chi in positives))
    logger.debug("décomposition: %d blocs, λ = %s", rep.blocks, [str(x) for x in rep.lambdas])
    return Decomposition(rep, basis, tuple(tuple(r) for r in rows))
