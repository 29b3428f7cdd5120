"""Reference closed forms of the first-server advantage.

Four rational functions are available as independent checks on the chain
pipeline: the full two-variable side-out advantages for games to 11 and 15,
and the diagonal (``p_A = p_B = x``) restrictions of the modified-rally and
hybrid advantages for games to 21.

The large polynomials live in ``data/*.txt``, one monomial per line
(``i j coefficient`` for ``x^i y^j``, or ``i coefficient`` for ``x^i``).
Each closed form is ``sign * monomial * prod(numerator factors) /
prod(denominator factors)`` where every factor is a polynomial raised to a
power.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Optional

from .exceptions import DomainError, EvaluationError
from .rational import as_fraction

__all__ = [
    "FormId",
    "Polynomial",
    "ClosedForm",
    "closed_form",
    "evaluate_closed_form",
    "coefficient_symmetry_check",
    "load_polynomial",
    "data_checksum",
]


class FormId(enum.Enum):
    F11_FULL = "F11_FULL"
    F15_FULL = "F15_FULL"
    F21STAR_DIAG = "F21STAR_DIAG"
    F21CIRC_DIAG = "F21CIRC_DIAG"

    @classmethod
    def parse(cls, value) -> "FormId":
        if isinstance(value, FormId):
            return value
        try:
            return cls(str(value).upper().replace("-", "_"))
        except ValueError:
            raise DomainError(f"unknown closed form {value!r}") from None


@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial in one or two variables.

    ``terms`` maps exponent tuples (length ``nvars``) to coefficients.
    """

    nvars: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_dict(cls, nvars: int, terms: dict) -> "Polynomial":
        return cls(nvars, tuple(sorted((tuple(k), int(v)) for k, v in terms.items() if v)))

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.terms)

    def coefficient_sum(self) -> int:
        return sum(c for _, c in self.terms)

    @property
    def degree(self) -> int:
        return max(sum(e) for e, _ in self.terms)

    def __call__(self, x: Fraction, y: Optional[Fraction] = None) -> Fraction:
        if self.nvars == 1:
            return _horner(self._univariate(), x)
        # Horner in x over coefficients that are themselves Horner in y.
        by_x: dict[int, dict[int, int]] = {}
        for (i, j), c in self.terms:
            by_x.setdefault(i, {})[j] = c
        top = max(by_x)
        coeffs = [_horner(_dense(by_x.get(i, {})), y) for i in range(top + 1)]
        return _horner(coeffs, x)

    def _univariate(self) -> list[int]:
        return _dense({e[0]: c for e, c in self.terms})


def _dense(sparse: dict[int, int]) -> list[int]:
    if not sparse:
        return [0]
    out = [0] * (max(sparse) + 1)
    for power, c in sparse.items():
        out[power] = c
    return out


def _horner(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _parse_lines(text: str, nvars: int) -> dict[tuple[int, ...], int]:
    terms: dict[tuple[int, ...], int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != nvars + 1:
            raise ValueError(f"line {lineno}: expected {nvars + 1} fields, got {line!r}")
        key = tuple(int(p) for p in parts[:nvars])
        if key in terms:
            raise ValueError(f"line {lineno}: duplicate monomial {key}")
        terms[key] = int(parts[-1])
    return terms


def _data_text(name: str) -> str:
    return resources.files(__package__).joinpath("data").joinpath(f"{name}.txt").read_text()


def load_polynomial(name: str, nvars: int) -> Polynomial:
    return Polynomial.from_dict(nvars, _parse_lines(_data_text(name), nvars))


def data_checksum(name: str) -> str:
    """SHA-256 of a coefficient file's bytes."""
    return hashlib.sha256(_data_text(name).encode()).hexdigest()


def _poly(nvars: int, terms: dict) -> Polynomial:
    return Polynomial.from_dict(nvars, terms)


# 2 - x - y + xy, shared by both side-out forms
_TWO_MINUS = _poly(2, {(0, 0): 2, (1, 0): -1, (0, 1): -1, (1, 1): 1})


@dataclass(frozen=True)
class ClosedForm:
    id: FormId
    nvars: int
    sign: int
    monomial: tuple[int, ...]
    numerator: tuple[tuple[Polynomial, int], ...]
    denominator: tuple[tuple[Polynomial, int], ...]

    @property
    def diagonal_only(self) -> bool:
        return self.nvars == 1

    def evaluate(self, x, y=None) -> Fraction:
        return evaluate_closed_form(self, x, y)


@lru_cache(maxsize=None)
def closed_form(form) -> ClosedForm:
    form = FormId.parse(form)
    if form is FormId.F11_FULL:
        return ClosedForm(
            form, 2, -1, (11, 11),
            ((load_polynomial("f11_numerator", 2), 1),),
            ((_TWO_MINUS, 19), (load_polynomial("f11_denominator", 2), 1)),
        )
    if form is FormId.F15_FULL:
        return ClosedForm(
            form, 2, -1, (15, 15),
            ((load_polynomial("f15_numerator", 2), 1),),
            ((_TWO_MINUS, 27), (load_polynomial("f15_denominator", 2), 1)),
        )
    if form is FormId.F21STAR_DIAG:
        return ClosedForm(
            form, 1, -1, (0,),
            ((_poly(1, {(0,): 1, (1,): -2}), 1), (load_polynomial("f21star_diag_numerator", 1), 1)),
            ((_poly(1, {(0,): 2, (1,): -1}), 1), (_poly(1, {(0,): 4, (1,): -3}), 1)),
        )
    return ClosedForm(
        form, 1, 1, (0,),
        ((load_polynomial("f21circ_diag_numerator", 1), 1),),
        (
            (_poly(1, {(0,): 2, (1,): -1}), 1),
            (_poly(1, {(0,): 2, (1,): -2, (2,): 1}), 1),
            (load_polynomial("f21circ_diag_denominator_factor", 1), 1),
        ),
    )


def evaluate_closed_form(form, x, y=None) -> Fraction:
    """Exact value of a closed form at ``(x, y)`` (or at ``x`` for diagonal forms)."""
    if not isinstance(form, ClosedForm):
        form = closed_form(form)
    x = as_fraction(x)
    if form.diagonal_only:
        if y is not None:
            raise DomainError(f"{form.id.value} is a diagonal form and takes x only")
        point = (x,)
    else:
        if y is None:
            raise DomainError(f"{form.id.value} needs both x and y")
        point = (x, as_fraction(y))
    den = Fraction(1)
    for poly, power in form.denominator:
        den *= poly(*point) ** power
    if den == 0:
        raise EvaluationError(f"denominator of {form.id.value} vanishes at {point}")
    num = Fraction(form.sign)
    for coord, power in zip(point, form.monomial):
        num *= coord**power
    for poly, power in form.numerator:
        num *= poly(*point) ** power
    return num / den


def coefficient_symmetry_check(form) -> bool:
    """True iff every two-variable table is unchanged by ``x^i y^j <-> x^j y^i``."""
    if isinstance(form, Polynomial):
        polys = [form]
    else:
        if not isinstance(form, ClosedForm):
            form = closed_form(form)
        if form.diagonal_only:
            raise DomainError(f"{form.id.value} is a one-variable form")
        if form.monomial[0] != form.monomial[1]:
            return False
        polys = [p for p, _ in form.numerator + form.denominator]
    for poly in polys:
        if poly.nvars != 2:
            raise DomainError("symmetry check needs a two-variable polynomial")
        table = poly.as_dict()
        if any(table.get((j, i), 0) != c for (i, j), c in table.items()):
            return False
    return True
