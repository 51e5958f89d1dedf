"""Generalized Bell bases matched to protocol-reachable families.

For a measured pair, every reachable family factorizes ket-by-ket as

    sum_jk  c_jk * g_jk |jk>_pair |s_jk>_spectator,   c_jk in {a, b}

and the kets split into the sectors ``{00, 11}`` and ``{01, 10}``, each
holding one ``a`` carrier and one ``b`` carrier.  Within a sector the
vector whose weights are swapped relative to ``|g|`` leaves a balanced
residual ``a|s> +- b|s'>`` (success); its orthogonal partner does not.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import states
from .errors import (
    ContractError,
    DegenerateResourceError,
    LookupFixtureError,
    StructureError,
    UndefinedBranchError,
)
from .states import LinearFamilyState, Pauli

#: Residual-balance threshold; looser than ``states.TOL`` to absorb rounding at depth.
CLASSIFY_TOL = 1e-10

# pair-ket indices (2*j + k) of the two sectors, first ket first
SECTORS = ((0, 3), (1, 2))
_PAIR_KETS = ("00", "01", "10", "11")


class Kind(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    correction: Optional[Pauli] = None

    @property
    def success(self) -> bool:
        return self.kind is Kind.SUCCESS

    def __str__(self):
        if self.correction is None:
            return self.kind.value
        return f"{self.kind.value}({self.correction.value})"


FAILURE = Classification(Kind.FAILURE)


def Success(corr: Pauli) -> Classification:
    return Classification(Kind.SUCCESS, corr)


@dataclass(frozen=True)
class PairBasis:
    """Four orthonormal pair vectors (rows of ``vectors``) with labels."""

    pair: tuple[int, int]
    vectors: np.ndarray
    labels: tuple[str, ...]
    classification: tuple[Classification, ...]

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex).reshape(4, 4)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        gram = v.conj() @ v.T
        if np.max(np.abs(gram - np.eye(4))) > states.TOL:
            raise ContractError("basis vectors are not orthonormal")

    def __iter__(self):
        return iter(zip(self.labels, self.vectors, self.classification))

    @property
    def n_success(self) -> int:
        return sum(c.success for c in self.classification)


@dataclass(frozen=True)
class SectorDecomposition:
    """Per pair-ket geometric factor, carrier (``'a'``/``'b'``) and spectator ket."""

    pair: tuple[int, int]
    g: tuple[complex, ...]
    carrier: tuple[Optional[str], ...]
    spectator_ket: tuple[Optional[int], ...]

    def sector(self, idx: int):
        return [(k, self.g[k], self.carrier[k], self.spectator_ket[k]) for k in SECTORS[idx]]


def decompose(family: LinearFamilyState, pair: Sequence[int]) -> SectorDecomposition:
    pair = tuple(pair)
    spectator = states.spectator_of(pair)
    perm = (pair[0] - 1, pair[1] - 1, spectator - 1)
    tA = np.transpose(family.A, perm).reshape(4, 2)
    tB = np.transpose(family.B, perm).reshape(4, 2)
    g, carrier, sket = [], [], []
    for k in range(4):
        vals = np.concatenate([tA[k], tB[k]])
        mags = np.abs(vals)
        top = int(np.argmax(mags))
        if mags[top] == 0.0:
            g.append(0j)
            carrier.append(None)
            sket.append(None)
            continue
        rest = np.delete(mags, top)
        if np.any(rest > 1e-10 * mags[top]):
            raise StructureError(
                f"pair-ket |{_PAIR_KETS[k]}> has more than one carrier/spectator component"
            )
        g.append(complex(vals[top]))
        carrier.append("a" if top < 2 else "b")
        sket.append(top % 2)
    for f, s in SECTORS:
        if carrier[f] is not None and carrier[f] == carrier[s]:
            raise StructureError(
                f"sector {{{_PAIR_KETS[f]},{_PAIR_KETS[s]}}} has two {carrier[f]}-carriers"
            )
    return SectorDecomposition(pair, tuple(g), tuple(carrier), tuple(sket))


def _residual_vectors(sector_terms, alpha: complex, beta: complex):
    """Residual ``(rA, rB)`` from projecting a sector onto ``alpha|f> + beta|s>``."""
    rA = np.zeros(2, dtype=complex)
    rB = np.zeros(2, dtype=complex)
    for coef, (_, gk, ck, sk) in zip((alpha, beta), sector_terms):
        if ck is None:
            continue
        target = rA if ck == "a" else rB
        target[sk] += np.conj(coef) * gk
    return rA, rB


def delivery_correction(rA: np.ndarray, rB: np.ndarray) -> Pauli:
    """Pauli that moves the ``a`` component to ``|0>`` and aligns the sign
    of the ``b`` component with it.

    For a balanced residual this is the exact correction; otherwise it is
    the Pauli maximizing the Haar-averaged fidelity of the delivered state.
    """
    sa = int(np.argmax(np.abs(rA)))
    sb = int(np.argmax(np.abs(rB)))
    if sa == sb:
        raise StructureError("a and b components share one spectator ket")
    flip = sa == 1
    alpha, beta = rA[sa], rB[sb]
    if np.real(alpha * np.conj(beta)) < 0:
        return Pauli.ZX if flip else Pauli.Z
    return Pauli.X if flip else Pauli.I


def _balanced(rA: np.ndarray, rB: np.ndarray, tol: float = CLASSIFY_TOL) -> bool:
    na, nb = np.linalg.norm(rA), np.linalg.norm(rB)
    return abs(na - nb) <= tol * max(na, nb)


def classify_residual(rA: np.ndarray, rB: np.ndarray) -> Classification:
    if max(np.linalg.norm(rA), np.linalg.norm(rB)) == 0.0:
        raise UndefinedBranchError("zero-probability child cannot be classified")
    if not _balanced(rA, rB):
        return FAILURE
    for corr in (Pauli.I, Pauli.Z, Pauli.X, Pauli.ZX):
        x = corr.matrix @ rA
        y = corr.matrix @ rB
        lam = x[0]
        scale = max(abs(lam), 1e-300)
        if (
            abs(x[1]) <= CLASSIFY_TOL * scale
            and abs(y[0]) <= CLASSIFY_TOL * scale
            and abs(y[1] - lam) <= CLASSIFY_TOL * scale
        ):
            return Success(corr)
    # balanced but with a relative phase no Pauli removes
    return FAILURE


def classify(child: LinearFamilyState, spectator: int) -> Classification:
    """Success iff the spectator residual is ``a|s> +- b|s'>`` up to scale.

    Uses only the family's A/B structure, never a numeric info state.
    """
    rA, rB = states.spectator_residual(child, spectator)
    return classify_residual(rA, rB)


def _sector_orientation(sector_terms, tie_tol: float = 1e-12) -> Optional[bool]:
    """True if the ``+`` vector is the success one, None on a magnitude tie."""
    gf = abs(sector_terms[0][1])
    gs = abs(sector_terms[1][1])
    if abs(gs - gf) <= tie_tol * max(gf, gs):
        return None
    return gs > gf


# Orientation used at a tie when no reference family is supplied; matches
# the printed primary basis (B1 and B2 succeed).
_DEFAULT_TIE = (False, True)


def matched_basis(
    family: LinearFamilyState,
    pair: Sequence[int],
    prefix: str = "",
    orient: Optional[LinearFamilyState] = None,
) -> PairBasis:
    """Matched generalized Bell basis for ``family`` measured on ``pair``.

    Within sector ``(f, s)`` the two vectors are

        + : (big |f> + small |s>) / n
        - : (small |f> - big |s>) / n

    with ``big >= small`` the two geometric magnitudes.  The success
    vector is the one weighting ``|f>`` by ``|g_s|``.  When the magnitudes
    tie (maximally entangled resource) the decision is taken from
    ``orient``, a family with the same history at another ``chi``.
    """
    pair = tuple(pair)
    dec = decompose(family, pair)
    ref = decompose(orient, pair) if orient is not None else None
    vectors = np.zeros((4, 4), dtype=complex)
    classes: list[Classification] = [FAILURE] * 4
    for idx, (f, s) in enumerate(SECTORS):
        terms = dec.sector(idx)
        gf, gs = abs(terms[0][1]), abs(terms[1][1])
        if gf == 0.0 or gs == 0.0:
            raise DegenerateResourceError(
                "zero geometric factor in a sector (product resource or amplitude underflow)"
            )
        plus_success = _sector_orientation(terms)
        if plus_success is None and ref is not None:
            plus_success = _sector_orientation(ref.sector(idx))
        if plus_success is None:
            plus_success = _DEFAULT_TIE[idx]
        big, small = max(gf, gs), min(gf, gs)
        n = math.hypot(big, small)
        plus = (big / n, small / n)
        minus = (small / n, -big / n)
        # label order: sector {00,11} -> 0 (+), 1 (-); sector {01,10} -> 2 (+), 3 (-)
        lo, hi = (0, 1) if idx == 0 else (2, 3)
        for out, (alpha, beta), is_plus in ((lo, plus, True), (hi, minus, False)):
            vectors[out, f] = alpha
            vectors[out, s] = beta
            if is_plus == plus_success:
                rA, rB = _residual_vectors(terms, alpha, beta)
                classes[out] = Success(delivery_correction(rA, rB))
    labels = tuple(prefix + str(i) for i in range(4))
    return PairBasis(pair, vectors, labels, tuple(classes))


_BELL = np.array(
    [
        [1, 0, 0, 1],
        [1, 0, 0, -1],
        [0, 1, 1, 0],
        [0, 1, -1, 0],
    ],
    dtype=complex,
) / math.sqrt(2)


def me_bell_basis(
    family: Optional[LinearFamilyState] = None,
    pair: Sequence[int] = (1, 2),
    prefix: str = "",
) -> PairBasis:
    """Standard Bell basis, classified against ``family`` when given.

    Outcomes with a balanced residual are successes; the rest are failures
    carrying the structural (SQT) delivery correction.
    """
    pair = tuple(pair)
    labels = tuple(prefix + str(i) for i in range(4))
    if family is None:
        return PairBasis(pair, _BELL, labels, (FAILURE,) * 4)
    spectator = states.spectator_of(pair)
    classes = []
    for v in _BELL:
        child = states.project_pair(family, pair, v)
        rA, rB = states.spectator_residual(child, spectator)
        c = classify_residual(rA, rB)
        if not c.success:
            c = Classification(Kind.FAILURE, delivery_correction(rA, rB))
        classes.append(c)
    return PairBasis(pair, _BELL, labels, tuple(classes))


FIXTURE_TAGS = ("primary", "after-0", "after-3")


def paper_fixture(tag: str, chi: float) -> PairBasis:
    """The explicitly printed bases: primary on (1,2); first repeat on (1,3)
    after primary outcome 0 or 3."""
    c, s = math.cos(chi), math.sin(chi)
    y6 = math.sqrt(c ** 6 + s ** 6)

    def vec(**amps):
        v = np.zeros(4, dtype=complex)
        for k, val in amps.items():
            v[int(k[1:], 2)] = val
        return v

    plain_even = [vec(k00=c, k11=s), vec(k00=s, k11=-c)]
    plain_odd = [vec(k01=c, k10=s), vec(k01=s, k10=-c)]
    cubed_even = [vec(k00=c ** 3 / y6, k11=s ** 3 / y6), vec(k00=s ** 3 / y6, k11=-c ** 3 / y6)]
    cubed_odd = [vec(k01=c ** 3 / y6, k10=s ** 3 / y6), vec(k01=s ** 3 / y6, k10=-c ** 3 / y6)]
    classes = (FAILURE, Success(Pauli.Z), Success(Pauli.X), FAILURE)
    if tag == "primary":
        return PairBasis((1, 2), np.array(plain_even + plain_odd), ("0", "1", "2", "3"), classes)
    if tag == "after-0":
        return PairBasis((1, 3), np.array(cubed_even + plain_odd), ("00", "01", "02", "03"), classes)
    if tag == "after-3":
        return PairBasis((1, 3), np.array(plain_even + cubed_odd), ("30", "31", "32", "33"), classes)
    raise LookupFixtureError(f"unknown fixture tag {tag!r}; expected one of {FIXTURE_TAGS}")
