"""Algèbre exacte des superfonctions gaussiennes-polynomiales sur le modèle linéaire R^{2m|2m}.

Une superfonction est une somme finie de termes c · z^a z̄^b · θ^mask, multipliée par
une enveloppe globale ∏ exp(-s_i z_i z̄_i). Les générateurs impairs sont rangés dans
l'ordre canonique θ_1, θ̄_1, θ_2, θ̄_2, … (bit 2i = θ_i, bit 2i+1 = θ̄_i, blocs indexés
à partir de 0) ; le signe de toute réordonnance est porté par le coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Iterator, Mapping, NewType, Sequence

from sympy.polys.domains import QQ

from superloc import constants
from superloc.config import DimensionError, DivergenceError
from superloc.exact import (
    ONE,
    ZERO,
    ExactValue,
    Gaussian,
    as_gaussian,
    cq,
    format_rational,
    gaussian_pow,
    rational,
)

# exposants (a_1, b_1, …, a_m, b_m) des puissances de z_i et z̄_i
EvenMonomial = NewType("EvenMonomial", tuple)
# masque de 2m bits des générateurs impairs présents
OddMonomial = NewType("OddMonomial", int)

TermKey = tuple  # (EvenMonomial, OddMonomial)


class Coord(Enum):
    Z = "z"
    ZBAR = "zbar"
    THETA = "theta"
    THETABAR = "thetabar"

    @property
    def is_odd(self) -> bool:
        return self in (Coord.THETA, Coord.THETABAR)


def odd_bit(kind: Coord, block: int) -> int:
    return 2 * block + (1 if kind is Coord.THETABAR else 0)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def odd_product_sign(left: int, right: int) -> int:
    """Signe de θ^left · θ^right remis dans l'ordre canonique ; 0 si un générateur se répète."""
    if left & right:
        return 0
    swaps = 0
    rest = right
    while rest:
        low = rest & -rest
        swaps += _popcount(left & ~((low << 1) - 1))
        rest ^= low
    return -1 if swaps & 1 else 1


def odd_mask_parity(mask: int) -> int:
    return _popcount(mask) & 1


class SuperFunction:
    """Superfonction immuable : blocs, enveloppe (s_i) et termes normalisés."""

    __slots__ = ("_blocks", "_envelope", "_terms")

    def __init__(
        self,
        blocks: int,
        terms: Mapping[TermKey, Gaussian] | Iterable[tuple[Gaussian, Sequence[int], int]] = (),
        envelope: Sequence[Any] | None = None,
    ) -> None:
        if blocks < 0:
            raise DimensionError("nombre de blocs négatif")
        env = tuple(rational(s) for s in envelope) if envelope is not None else (QQ(0),) * blocks
        if len(env) != blocks:
            raise DimensionError(f"enveloppe de longueur {len(env)} pour {blocks} blocs")
        if any(s < 0 for s in env):
            raise DivergenceError("enveloppe négative")
        items = terms.items() if isinstance(terms, Mapping) else ((
            (tuple(even), int(odd)), c) for c, even, odd in terms)
        normalized: dict[TermKey, Gaussian] = {}
        for (even, odd), c in items:
            even = tuple(int(e) for e in even)
            if len(even) != 2 * blocks:
                raise DimensionError(f"monôme pair de longueur {len(even)} pour {blocks} blocs")
            if any(e < 0 for e in even):
                raise DimensionError("exposant négatif")
            if odd < 0 or odd >> (2 * blocks):
                raise DimensionError(f"masque impair {odd:b} hors des {2 * blocks} générateurs")
            key = (even, odd)
            normalized[key] = normalized.get(key, ZERO) + as_gaussian(c)
        self._blocks = blocks
        self._envelope = env
        self._terms = {k: c for k, c in normalized.items() if c}

    # -- constructeurs -----------------------------------------------------

    @classmethod
    def _raw(cls, blocks: int, terms: dict[TermKey, Gaussian], envelope: tuple) -> SuperFunction:
        obj = cls.__new__(cls)
        obj._blocks = blocks
        obj._envelope = envelope
        obj._terms = {k: c for k, c in terms.items() if c}
        return obj

    @classmethod
    def zero(cls, blocks: int, envelope: Sequence[Any] | None = None) -> SuperFunction:
        return cls(blocks, {}, envelope)

    @classmethod
    def constant(cls, blocks: int, value: Any = 1, envelope: Sequence[Any] | None = None) -> SuperFunction:
        return cls(blocks, {((0,) * (2 * blocks), 0): as_gaussian(value)}, envelope)

    @classmethod
    def gaussian(cls, blocks: int, s: Sequence[Any]) -> SuperFunction:
        """e^{-Σ s_i z_i z̄_i}."""
        return cls.constant(blocks, 1, s)

    @classmethod
    def generator(cls, blocks: int, kind: Coord, block: int) -> SuperFunction:
        if not 0 <= block < blocks:
            raise DimensionError(f"bloc {block} absent (m={blocks})")
        even = [0] * (2 * blocks)
        odd = 0
        if kind is Coord.Z:
            even[2 * block] = 1
        elif kind is Coord.ZBAR:
            even[2 * block + 1] = 1
        else:
            odd = 1 << odd_bit(kind, block)
        return cls(blocks, {(tuple(even), odd): ONE})

    # -- accès ---------------------------------------------------------------

    @property
    def blocks(self) -> int:
        return self._blocks

    @property
    def envelope(self) -> tuple:
        return self._envelope

    @property
    def terms(self) -> dict[TermKey, Gaussian]:
        return dict(self._terms)

    def iter_terms(self) -> Iterator[tuple[Gaussian, EvenMonomial, OddMonomial]]:
        for (even, odd), c in self._terms.items():
            yield c, EvenMonomial(even), OddMonomial(odd)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, even: Sequence[int], odd: int) -> Gaussian:
        return self._terms.get((tuple(even), odd), ZERO)

    def parity(self) -> int | None:
        """Parité 0/1 si la fonction est homogène (zéro : 0), None sinon."""
        parities = {odd_mask_parity(odd) for (_, odd) in self._terms}
        if not parities:
            return 0
        if len(parities) > 1:
            return None
        return parities.pop()

    def odd_component(self, mask: int) -> SuperFunction:
        """Partie paire réduite multipliant θ^mask (même enveloppe)."""
        return SuperFunction._raw(
            self._blocks,
            {(even, 0): c for (even, odd), c in self._terms.items() if odd == mask},
            self._envelope,
        )

    # -- arithmétique --------------------------------------------------------

    def _check_compatible(self, other: SuperFunction) -> None:
        if self._blocks != other._blocks:
            raise DimensionError(f"nombres de blocs différents: {self._blocks} et {other._blocks}")

    def __add__(self, other: SuperFunction) -> SuperFunction:
        self._check_compatible(other)
        if self._envelope != other._envelope:
            raise DimensionError("somme de superfonctions d'enveloppes différentes")
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ZERO) + c
        return SuperFunction._raw(self._blocks, out, self._envelope)

    def __neg__(self) -> SuperFunction:
        return self.scale(cq(-1))

    def __sub__(self, other: SuperFunction) -> SuperFunction:
        return self + (-other)

    def __mul__(self, other: Any) -> SuperFunction:
        if isinstance(other, SuperFunction):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other: Any) -> SuperFunction:
        return self.scale(other)

    def scale(self, c: Any) -> SuperFunction:
        c = as_gaussian(c)
        return SuperFunction._raw(self._blocks, {k: v * c for k, v in self._terms.items()}, self._envelope)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuperFunction):
            return NotImplemented
        return (
            self._blocks == other._blocks
            and self._envelope == other._envelope
            and self._terms == other._terms
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SuperFunction(m={self._blocks}, envelope={[format_rational(s) for s in self._envelope]}, {format_function(self)})"


def multiply(f: SuperFunction, g: SuperFunction) -> SuperFunction:
    """Produit bilinéaire ; les enveloppes s'additionnent."""
    f._check_compatible(g)
    envelope = tuple(a + b for a, b in zip(f.envelope, g.envelope))
    out: dict[TermKey, Gaussian] = {}
    for (ef, of), cf in f._terms.items():
        for (eg, og), cg in g._terms.items():
            sign = odd_product_sign(of, og)
            if not sign:
                continue
            key = (tuple(a + b for a, b in zip(ef, eg)), of | og)
            c = cf * cg
            out[key] = out.get(key, ZERO) + (c if sign > 0 else -c)
    return SuperFunction._raw(f.blocks, out, envelope)


@dataclass(frozen=True)
class PartialDerivative:
    """∂_{z_i}, ∂_{z̄_i}, ∂_{θ_i} ou ∂_{θ̄_i} (dérivée gauche pour les impairs)."""

    kind: Coord
    block: int

    @property
    def parity(self) -> int:
        return 1 if self.kind.is_odd else 0

    def apply(self, f: SuperFunction) -> SuperFunction:
        if not 0 <= self.block < f.blocks:
            raise DimensionError(f"bloc {self.block} absent (m={f.blocks})")
        out: dict[TermKey, Gaussian] = {}
        if self.kind.is_odd:
            bit = 1 << odd_bit(self.kind, self.block)
            for (even, odd), c in f._terms.items():
                if not odd & bit:
                    continue
                sign = -1 if _popcount(odd & (bit - 1)) & 1 else 1
                key = (even, odd ^ bit)
                out[key] = out.get(key, ZERO) + (c if sign > 0 else -c)
            return SuperFunction._raw(f.blocks, out, f.envelope)
        # ∂_z (z^a z̄^b e^{-s z z̄}) = a z^{a-1} z̄^b e^{..} - s z^a z̄^{b+1} e^{..}
        pos = 2 * self.block + (0 if self.kind is Coord.Z else 1)
        other = 2 * self.block + (1 if self.kind is Coord.Z else 0)
        s = f.envelope[self.block]
        for (even, odd), c in f._terms.items():
            power = even[pos]
            if power:
                lowered = list(even)
                lowered[pos] -= 1
                key = (tuple(lowered), odd)
                out[key] = out.get(key, ZERO) + c * power
            if s:
                raised = list(even)
                raised[other] += 1
                key = (tuple(raised), odd)
                out[key] = out.get(key, ZERO) - c * cq(s)
        return SuperFunction._raw(f.blocks, out, f.envelope)


@dataclass(frozen=True)
class Derivation:
    """Champ de vecteurs Σ c_k · x_k · ∂_k ; x_k est un générateur (Coord, bloc) ou None (= 1).

    Tous les termes doivent avoir la même parité.
    """

    terms: tuple[tuple[Gaussian, tuple[Coord, int] | None, PartialDerivative], ...]

    def __post_init__(self) -> None:
        parities = {self._term_parity(t) for t in self.terms}
        if len(parities) > 1:
            raise DimensionError("champ de vecteurs non homogène")

    @staticmethod
    def _term_parity(term: tuple) -> int:
        _, coord, partial = term
        coord_parity = 1 if coord is not None and coord[0].is_odd else 0
        return (coord_parity + partial.parity) & 1

    @classmethod
    def partial(cls, kind: Coord, block: int) -> Derivation:
        return cls(((ONE, None, PartialDerivative(kind, block)),))

    @classmethod
    def combination(
        cls, terms: Iterable[tuple[Any, tuple[Coord, int] | None, tuple[Coord, int]]]
    ) -> Derivation:
        return cls(tuple(
            (as_gaussian(c), coord, PartialDerivative(*partial)) for c, coord, partial in terms
        ))

    @property
    def parity(self) -> int:
        if not self.terms:
            return 0
        return self._term_parity(self.terms[0])

    def __add__(self, other: Derivation) -> Derivation:
        return Derivation(self.terms + other.terms)


def _left_multiply_generator(f: SuperFunction, coord: tuple[Coord, int]) -> SuperFunction:
    kind, block = coord
    if not 0 <= block < f.blocks:
        raise DimensionError(f"bloc {block} absent (m={f.blocks})")
    out: dict[TermKey, Gaussian] = {}
    if kind.is_odd:
        bit = 1 << odd_bit(kind, block)
        for (even, odd), c in f._terms.items():
            if odd & bit:
                continue
            sign = -1 if _popcount(odd & (bit - 1)) & 1 else 1
            key = (even, odd | bit)
            out[key] = out.get(key, ZERO) + (c if sign > 0 else -c)
    else:
        pos = 2 * block + (0 if kind is Coord.Z else 1)
        for (even, odd), c in f._terms.items():
            raised = list(even)
            raised[pos] += 1
            key = (tuple(raised), odd)
            out[key] = out.get(key, ZERO) + c
    return SuperFunction._raw(f.blocks, out, f.envelope)


def apply_derivation(D: Derivation, f: SuperFunction) -> SuperFunction:
    """D(f) ; règle de Leibniz graduée, ∂_z agit aussi sur l'enveloppe."""
    out: dict[TermKey, Gaussian] = {}
    for c, coord, partial in D.terms:
        g = partial.apply(f)
        if coord is not None:
            g = _left_multiply_generator(g, coord)
        for k, v in g._terms.items():
            out[k] = out.get(k, ZERO) + v * c
    return SuperFunction._raw(f.blocks, out, f.envelope)


def gaussian_moment(a: int, b: int, s: Any) -> ExactValue:
    """∫_C z^a z̄^b e^{-s z z̄} dx dy = δ_{ab} · π a!/s^{a+1}."""
    s = rational(s)
    if s <= 0:
        raise DivergenceError(f"moment gaussien divergent pour s = {s}")
    if a < 0 or b < 0:
        raise DimensionError("exposants négatifs")
    if a != b:
        return ExactValue.zero()
    return ExactValue(cq(QQ(math.factorial(a)) / s ** (a + 1)), 1)


def top_mask(blocks: int) -> int:
    return (1 << (2 * blocks)) - 1


def berezin_integral(f: SuperFunction, kappa: Gaussian | None = None) -> ExactValue:
    """∫ f·{dz dz̄ | dθ dθ̄} : coefficient de θ_1θ̄_1⋯θ_mθ̄_m, moments gaussiens, κ par bloc."""
    kappa = constants.KAPPA if kappa is None else as_gaussian(kappa)
    for i, s in enumerate(f.envelope):
        if s <= 0:
            raise DivergenceError(f"enveloppe non positive au bloc {i + 1}: s = {s}")
    m = f.blocks
    top = top_mask(m)
    total = ZERO
    for (even, odd), c in f._terms.items():
        if odd != top:
            continue
        weight = QQ(1)
        for i in range(m):
            a, b = even[2 * i], even[2 * i + 1]
            if a != b:
                weight = QQ(0)
                break
            weight *= QQ(math.factorial(a)) / f.envelope[i] ** (a + 1)
        if weight:
            total = total + c * cq(weight)
    return ExactValue(total * gaussian_pow(kappa, m), m)


def eval_origin(f: SuperFunction) -> ExactValue:
    """Valeur en 0 de la partie paire réduite (enveloppe = 1 en 0)."""
    return ExactValue(f.coefficient((0,) * (2 * f.blocks), 0), 0)


def _format_term(c: Gaussian, even: tuple, odd: int, blocks: int) -> str:
    parts: list[str] = []
    for i in range(blocks):
        for name, power in (("z", even[2 * i]), ("zb", even[2 * i + 1])):
            if power == 1:
                parts.append(f"{name}{i + 1}")
            elif power:
                parts.append(f"{name}{i + 1}^{power}")
    for i in range(blocks):
        if odd >> (2 * i) & 1:
            parts.append(f"th{i + 1}")
        if odd >> (2 * i + 1) & 1:
            parts.append(f"thb{i + 1}")
    coeff = str(ExactValue(c))
    return f"({coeff})" + ("*" + "*".join(parts) if parts else "")


def format_function(f: SuperFunction) -> str:
    if f.is_zero():
        return "0"
    keys = sorted(f._terms, key=lambda k: (bin(k[1]).count("1"), k[1], k[0]))
    body = " + ".join(_format_term(f._terms[k], k[0], k[1], f.blocks) for k in keys)
    if any(f.envelope):
        body += " ; exp(-" + " - ".join(f"{format_rational(s)}*z{i + 1}*zb{i + 1}" for i, s in enumerate(f.envelope) if s) + ")"
    return body
