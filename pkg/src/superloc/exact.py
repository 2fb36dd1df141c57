"""Scalaires exacts : rationnels de Gauss (QQ_I de sympy) fois une puissance entière de pi."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

import sympy
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.polyerrors import CoercionFailed

from superloc.config import ConfigError, ExactArithmeticError

Gaussian = Any  # élément de QQ_I
RationalLike = Union[int, Fraction, str, Any]

_IMAG_NUMBER = re.compile(r"(\d+(?:\.\d+)?(?:/\d+)?)\s*\*?\s*[ij]\b")
_IMAG_UNIT = re.compile(r"(?<![A-Za-z_])[ij](?![A-Za-z_])")


def rational(x: RationalLike) -> Any:
    """Convertit en élément de QQ (int, Fraction, '3/4', sympy.Rational)."""
    if isinstance(x, QQ.dtype):
        return x
    if isinstance(x, bool):
        raise ConfigError(f"rationnel attendu, reçu {x!r}")
    if isinstance(x, int):
        return QQ(x)
    if isinstance(x, Fraction):
        return QQ(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            f = Fraction(x.strip())
        except ValueError as e:
            raise ConfigError(f"rationnel invalide: {x!r}") from e
        return QQ(f.numerator, f.denominator)
    if isinstance(x, sympy.Basic) and x.is_Rational:
        return QQ.from_sympy(x)
    raise ConfigError(f"rationnel attendu, reçu {x!r}")


def cq(re_part: RationalLike = 0, im_part: RationalLike = 0) -> Gaussian:
    """Rationnel de Gauss re + i·im."""
    return QQ_I(rational(re_part), rational(im_part))


ZERO = cq(0)
ONE = cq(1)
I_UNIT = cq(0, 1)


def as_gaussian(x: Any) -> Gaussian:
    if isinstance(x, QQ_I.dtype):
        return x
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return cq(x[0], x[1])
    if isinstance(x, str):
        return parse_complex(x)
    if isinstance(x, sympy.Basic):
        try:
            return QQ_I.from_sympy(sympy.expand(sympy.nsimplify(x, rational=True)))
        except CoercionFailed as e:
            raise ConfigError(f"{x} n'est pas un rationnel de Gauss") from e
    return cq(x)


def parse_complex(text: str) -> Gaussian:
    """Lit un littéral complexe exact : '3i', '-1+2i', '1/2-3/4i', '2', '5*I'."""
    src = str(text).strip().replace("𝐢", "i")
    if not src:
        raise ConfigError("littéral complexe vide")
    expr_text = _IMAG_NUMBER.sub(r"(\1)*I", src)
    expr_text = _IMAG_UNIT.sub("I", expr_text)
    try:
        expr = sympy.sympify(expr_text, rational=True)
        return QQ_I.from_sympy(sympy.expand(expr))
    except (sympy.SympifyError, CoercionFailed, TypeError, SyntaxError) as e:
        raise ConfigError(f"littéral complexe invalide: {text!r}") from e


def gaussian_pow(a: Gaussian, k: int) -> Gaussian:
    if k < 0:
        if not a:
            raise ExactArithmeticError("puissance négative de zéro")
        return ONE / gaussian_pow(a, -k)
    out = ONE
    for _ in range(k):
        out = out * a
    return out


def format_rational(q: Any) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def gaussian_to_pair(a: Gaussian) -> list[str]:
    return [format_rational(a.x), format_rational(a.y)]


def gaussian_to_complex(a: Gaussian) -> complex:
    return complex(float(a.x), float(a.y))


@dataclass(frozen=True)
class ExactValue:
    """Valeur exacte coeff·pi^pi_power, coeff rationnel de Gauss.

    Zéro est normalisé avec pi_power = 0.
    """

    coeff: Gaussian
    pi_power: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.coeff, QQ_I.dtype):
            object.__setattr__(self, "coeff", as_gaussian(self.coeff))
        if not self.coeff and self.pi_power != 0:
            object.__setattr__(self, "pi_power", 0)

    @classmethod
    def zero(cls) -> ExactValue:
        return cls(ZERO, 0)

    @classmethod
    def one(cls) -> ExactValue:
        return cls(ONE, 0)

    @property
    def is_zero(self) -> bool:
        return not self.coeff

    def __bool__(self) -> bool:
        return bool(self.coeff)

    def __neg__(self) -> ExactValue:
        return ExactValue(-self.coeff, self.pi_power)

    def __add__(self, other: ExactValue) -> ExactValue:
        other = _lift(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.pi_power != other.pi_power:
            raise ExactArithmeticError(
                f"somme de puissances de pi différentes: {self.pi_power} et {other.pi_power}"
            )
        return ExactValue(self.coeff + other.coeff, self.pi_power)

    __radd__ = __add__

    def __sub__(self, other: ExactValue) -> ExactValue:
        return self + (-_lift(other))

    def __rsub__(self, other: ExactValue) -> ExactValue:
        return _lift(other) - self

    def __mul__(self, other: Any) -> ExactValue:
        other = _lift(other)
        return ExactValue(self.coeff * other.coeff, self.pi_power + other.pi_power)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> ExactValue:
        other = _lift(other)
        if other.is_zero:
            raise ExactArithmeticError("division exacte par zéro")
        return ExactValue(self.coeff / other.coeff, self.pi_power - other.pi_power)

    def __pow__(self, k: int) -> ExactValue:
        return ExactValue(gaussian_pow(self.coeff, k), self.pi_power * k)

    def to_sympy(self) -> sympy.Expr:
        return QQ_I.to_sympy(self.coeff) * sympy.pi**self.pi_power

    def to_complex(self) -> complex:
        return gaussian_to_complex(self.coeff) * math.pi**self.pi_power

    def to_dict(self) -> dict[str, Any]:
        re_part, im_part = gaussian_to_pair(self.coeff)
        return {"re": re_part, "im": im_part, "pi_power": self.pi_power, "text": str(self)}

    def __str__(self) -> str:
        return str(self.to_sympy())


def _lift(x: Any) -> ExactValue:
    if isinstance(x, ExactValue):
        return x
    return ExactValue(as_gaussian(x), 0)


PI = ExactValue(ONE, 1)
