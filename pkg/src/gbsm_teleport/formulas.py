"""Closed-form success probabilities, table rows and trig kernels.

Kernels (functions of the resource angle ``chi``)::

    X(n) = cos^n sin^n
    Y(n) = cos^n + sin^n
    Z(n) = |a|^2 cos^n + |b|^2 sin^n

A primed kernel (``Z'``) is the same kernel at ``pi/2 - chi``, i.e. with
cos and sin exchanged.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import DomainError, LookupFixtureError
from .states import InfoState, check_chi


def kernel_X(n: int, chi: float) -> float:
    return (math.cos(chi) * math.sin(chi)) ** n


def kernel_Y(n: int, chi: float) -> float:
    return math.cos(chi) ** n + math.sin(chi) ** n


def kernel_Z(n: int, chi: float, info: InfoState) -> float:
    return info.pa * math.cos(chi) ** n + info.pb * math.sin(chi) ** n


def normalization_constants(chi: float, info: InfoState) -> tuple[float, float]:
    """``N1 = Z(4, chi)^-1/2`` and ``N2 = Z(4, pi/2 - chi)^-1/2``."""
    return (
        kernel_Z(4, chi, info) ** -0.5,
        kernel_Z(4, math.pi / 2 - chi, info) ** -0.5,
    )


def concurrence(chi: float) -> float:
    check_chi(chi)
    return math.sin(2 * chi)


def chi_from_concurrence(C: float) -> float:
    if not (0.0 <= C <= 1.0):
        raise DomainError(f"concurrence must lie in [0, 1], got {C!r}")
    return math.asin(C) / 2


class Variant(enum.Enum):
    """Treatment of the last denominator of the third-repeat formula."""

    AS_PRINTED = "printed"
    CORRECTED_NESTING = "corrected"


def _increments(C: float, variant: Variant) -> list[float]:
    D1 = 4 - 3 * C ** 2
    D2 = 4 * D1 ** 2 - 3 * C ** 6
    if variant is Variant.CORRECTED_NESTING:
        # inner bracket (D1^2 - C^6) of the typeset form replaced by D2;
        # follows from Y^54 = Y^18 (Y^36 - 3 X^36)
        D3 = 4 * D1 ** 2 * D2 ** 2 - 3 * C ** 18
    else:
        # typeset form; equals -3 at C = 1
        D3 = 4 * D1 ** 2 * (D1 ** 2 - C ** 6) ** 2 - 3 * C ** 18
    return [
        C ** 2 / 2,
        C ** 4 / 8 + C ** 6 / (8 * D1),
        (C ** 6 + C ** 8 / D1 + C ** 12 / D1 ** 3 + C ** 18 / (D1 ** 3 * D2)) / 32,
        (
            C ** 8
            + C ** 10 / D1
            + C ** 14 / D1 ** 3
            + C ** 18 / D1 ** 5
            + C ** 20 / (D1 ** 3 * D2)
            + C ** 24 / (D1 ** 5 * D2)
            + C ** 36 / (D1 ** 5 * D2 ** 3)
            + C ** 54 / (D1 ** 5 * D2 ** 3 * D3)
        )
        / 128,
    ]


def closed_form_success(m: int, C: float, variant: Variant = Variant.CORRECTED_NESTING) -> float:
    """Cumulative success probability through repeat ``m`` (0..3)."""
    if m not in (0, 1, 2, 3):
        raise DomainError(f"closed forms exist for m in 0..3, got {m!r}")
    if not (0.0 <= C <= 1.0):
        raise DomainError(f"concurrence must lie in [0, 1], got {C!r}")
    return sum(_increments(C, Variant(variant))[: m + 1])


def maf_sqt(C: float) -> float:
    """Maximal average fidelity of standard teleportation over the resource."""
    if not (0.0 <= C <= 1.0):
        raise DomainError(f"concurrence must lie in [0, 1], got {C!r}")
    return (2 + C) / 3


# --- printed table rows -------------------------------------------------------


@dataclass(frozen=True)
class PrintedState:
    """``a*ca(chi)|ka> + b*cb(chi)|kb>`` as printed (up to normalization)."""

    ka: int
    ca: Callable[[float], float]
    kb: int
    cb: Callable[[float], float]

    def vector(self, chi: float, info: InfoState):
        import numpy as np

        v = np.zeros(2, dtype=complex)
        v[self.ka] += info.a * self.ca(chi)
        v[self.kb] += info.b * self.cb(chi)
        return v


@dataclass(frozen=True)
class TableRow:
    table: int
    label: str  # outcome history digits, e.g. "031"
    probability: Callable[[float, InfoState], float]
    state: PrintedState
    unit_fidelity: bool


def _c(n):
    return lambda chi: math.cos(chi) ** n


def _s(n):
    return lambda chi: math.sin(chi) ** n


def _neg(f):
    return lambda chi: -f(chi)


_one = _c(0)


def _X(n):
    return lambda chi, info: kernel_X(n, chi)


def _Y(n):
    return lambda chi, info: kernel_Y(n, chi)


def _Z(n, primed=False):
    if primed:
        return lambda chi, info: kernel_Z(n, math.pi / 2 - chi, info)
    return lambda chi, info: kernel_Z(n, chi, info)


def _ratio(num, *den):
    def f(chi, info):
        d = 1.0
        for g in den:
            d *= g(chi, info)
        return num(chi, info) / d

    return f


def _row(table, label, prob, ka, ca, kb, cb, unit):
    return TableRow(table, label, prob, PrintedState(ka, ca, kb, cb), unit)


X2, X4, X6, X12, X18 = _X(2), _X(4), _X(6), _X(12), _X(18)
Y6, Y18 = _Y(6), _Y(18)
Z4, Z12, Z36 = _Z(4), _Z(12), _Z(36)
Z4p, Z12p, Z36p = _Z(4, True), _Z(12, True), _Z(36, True)

TABLE_ROWS = [
    # primary attempt, particle 3
    _row(1, "0", Z4, 0, _c(2), 1, _s(2), False),
    _row(1, "1", X2, 0, _one, 1, _neg(_one), True),
    _row(1, "2", X2, 1, _one, 0, _one, True),
    _row(1, "3", Z4p, 1, _s(2), 0, _neg(_c(2)), False),
    # first repeat on (1,3), particle 2
    _row(2, "00", _ratio(Z12, Z4, Y6), 0, _c(1), 1, _s(1), False),
    _row(2, "01", _ratio(X6, Z4, Y6), 0, _one, 1, _neg(_one), True),
    _row(2, "02", _ratio(X4, Z4), 1, _one, 0, _one, True),
    _row(2, "03", X2, 1, _s(1), 0, _neg(_c(1)), False),
    _row(2, "30", X2, 0, _c(1), 1, _s(1), False),
    _row(2, "31", _ratio(X4, Z4p), 0, _one, 1, _neg(_one), True),
    _row(2, "32", _ratio(X6, Z4p, Y6), 1, _one, 0, _one, True),
    _row(2, "33", _ratio(Z12p, Z4p, Y6), 1, _s(1), 0, _neg(_c(1)), False),
    # second repeat on (1,2), particle 3
    _row(3, "000", _ratio(Z36, Z12, Y6, Y18), 0, _c(18), 1, _s(18), False),
    _row(3, "001", _ratio(X18, Z12, Y6, Y18), 0, _one, 1, _neg(_one), True),
    _row(3, "002", _ratio(X12, Z12, Y6, Y6), 1, _one, 0, _one, True),
    _row(3, "003", _ratio(X6, Y6, Y6), 1, _c(6), 0, _neg(_s(6)), False),
    _row(3, "030", _ratio(X6, Z4, Y6), 0, _one, 1, _one, True),
    _row(3, "031", _ratio(Z12, Z4, Y6), 0, _c(6), 1, _neg(_s(6)), False),
    _row(3, "032", X2, 1, _c(2), 0, _s(2), False),
    _row(3, "033", _ratio(X4, Z4), 1, _one, 0, _neg(_one), True),
    _row(3, "300", _ratio(X4, Z4p), 0, _one, 1, _one, True),
    _row(3, "301", X2, 0, _s(2), 1, _neg(_c(2)), False),
    _row(3, "302", _ratio(Z12p, Z4p, Y6), 1, _s(6), 0, _c(6), False),
    # X^6(pi/2 - chi) = X^6(chi)
    _row(3, "303", _ratio(X6, Z4p, Y6), 1, _one, 0, _neg(_one), True),
    _row(3, "330", _ratio(X6, Y6, Y6), 0, _s(6), 1, _c(6), False),
    _row(3, "331", _ratio(X12, Z12p, Y6, Y6), 0, _one, 1, _neg(_one), True),
    _row(3, "332", _ratio(X18, Z12p, Y6, Y18), 1, _one, 0, _one, True),
    _row(3, "333", _ratio(Z36p, Z12p, Y6, Y18), 1, _s(18), 0, _neg(_c(18)), False),
]

_BY_KEY = {(r.table, r.label): r for r in TABLE_ROWS}


def table_row(table: int, label: str) -> TableRow:
    try:
        return _BY_KEY[(table, str(label).lstrip("B"))]
    except KeyError:
        raise LookupFixtureError(f"no row {label!r} in table {table}") from None


def table_row_probability(table: int, label: str, chi: float, info: InfoState) -> float:
    """Printed conditional probability of ``label`` given its history prefix."""
    return table_row(table, label).probability(chi, info)


def table_rows(table: Optional[int] = None) -> list[TableRow]:
    return [r for r in TABLE_ROWS if table is None or r.table == table]
