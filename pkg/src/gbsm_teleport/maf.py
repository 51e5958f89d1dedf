"""Haar-averaged fidelity of the delivered qubit and the Pauli-mixture identity.

Every terminal leaf delivers ``U (a rA + b rB)`` where ``rA``/``rB`` are
the leaf's residual coefficient vectors and ``U`` its correction.  Leaf
probability times fidelity is ``|<I| U (a rA + b rB)>|^2``, so the average
fidelity is the Haar integral of the sum of these terms over leaves.  With
``a = cos(theta/2)``, ``b = exp(i phi) sin(theta/2)`` the integrand does
not depend on ``phi`` and reduces to a 1-D integral over ``u = cos(theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .basis import Kind
from .engine import AttemptPlan, Strategy, structural_tree
from .errors import ContractError, DegenerateResourceError, GbsmError
from .formulas import chi_from_concurrence
from .states import InfoState, Pauli

DEFAULT_ORDER = 128
CONVERGENCE_TOL = 1e-9
PHI_TOL = 1e-12


class QuadratureError(GbsmError):
    """Gauss-Legendre estimates of two orders disagree."""


MafPlan = AttemptPlan


def leaf_operators(chi: float, plan: MafPlan) -> np.ndarray:
    """Stack of ``U @ [rA rB]`` (shape ``(n_leaves, 2, 2)``) over terminal leaves."""
    if chi == 0.0:
        raise DegenerateResourceError("average fidelity undefined for a product resource")
    st = structural_tree(chi, plan)
    ops = []
    for i in st.leaves:
        node = st.nodes[i]
        U = node.classification.correction.matrix
        ops.append(U @ np.column_stack([node.rA, node.rB]))
    return np.array(ops)


def _weighted_fidelity(ops: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``|<I| M (a, b)>|^2`` per leaf (rows) and per sample (columns)."""
    psi = np.stack([a, b])  # (2, n)
    out = np.einsum("kij,jn->kin", ops, psi)
    ov = np.conj(psi)[None, 0] * out[:, 0] + np.conj(psi)[None, 1] * out[:, 1]
    return np.abs(ov) ** 2


def leaf_terms(chi: float, plan: MafPlan, theta, phi=0.0) -> np.ndarray:
    """Per-leaf probability times fidelity at Bloch angles ``(theta, phi)``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    a = np.cos(theta / 2).astype(complex)
    b = np.exp(1j * phi) * np.sin(theta / 2)
    return _weighted_fidelity(leaf_operators(chi, plan), a, b)


def _gauss_legendre_average(ops: np.ndarray, order: int) -> float:
    u, w = np.polynomial.legendre.leggauss(order)
    a = np.sqrt((1 + u) / 2).astype(complex)
    b = np.sqrt((1 - u) / 2).astype(complex)
    f = _weighted_fidelity(ops, a, b).sum(axis=0)
    # Haar measure on u = cos(theta) is du / 2
    return float(0.5 * np.dot(w, f))


def average_fidelity(chi: float, plan: MafPlan, order: int = DEFAULT_ORDER, check: bool = True) -> float:
    """Haar-averaged fidelity over all terminal leaves of ``plan``.

    Success leaves carry their exact correction; failure leaves at the
    budget carry the Pauli that best recovers the secret on average.
    """
    ops = leaf_operators(chi, plan)
    if check:
        th = np.linspace(0.1, math.pi - 0.1, 5)
        a = np.cos(th / 2).astype(complex)
        gap = np.max(np.abs(
            _weighted_fidelity(ops, a, np.sin(th / 2).astype(complex))
            - _weighted_fidelity(ops, a, np.exp(1.3j) * np.sin(th / 2))
        ))
        if gap > PHI_TOL:
            raise ContractError(f"leaf terms depend on the azimuth (gap {gap:.3g})")
    value = _gauss_legendre_average(ops, order)
    if check:
        ref = _gauss_legendre_average(ops, 2 * order)
        if abs(ref - value) >= CONVERGENCE_TOL:
            raise QuadratureError(f"order {order} vs {2 * order}: |delta| = {abs(ref - value):.3g}")
    return value


@dataclass(frozen=True)
class MafRow:
    concurrence: float
    m: int
    strategy: Strategy
    maf: float


def maf_sweep(grid: Iterable[float], plans: Sequence[MafPlan], order: int = DEFAULT_ORDER) -> list[MafRow]:
    """One row per (concurrence, plan), grid-major."""
    rows = []
    for C in grid:
        if not (0.0 < C <= 1.0):
            raise ValueError(f"concurrence grid must lie in (0, 1], got {C!r}")
        chi = chi_from_concurrence(C)
        for plan in plans:
            rows.append(MafRow(C, plan.max_attempts, plan.strategy, average_fidelity(chi, plan, order)))
    return rows


def dominance_violations(rows: Sequence[MafRow], tol: float = 1e-12) -> list[tuple[float, int]]:
    """``(C, m)`` pairs where the Bell-final strategy falls below continued GBSM."""
    table = {(r.concurrence, r.m, r.strategy): r.maf for r in rows}
    bad = []
    for (C, m, s), v in table.items():
        if s is Strategy.ME_FINAL and (C, m, Strategy.CONTINUE) in table:
            if v < table[(C, m, Strategy.CONTINUE)] - tol:
                bad.append((C, m))
    return bad


_PAULIS = (Pauli.I, Pauli.Z, Pauli.X, Pauli.ZX)


def bob_pauli_mixture(info: InfoState) -> np.ndarray:
    """Equal mixture of the four Pauli images of ``|I><I|``."""
    v = info.vector
    rho_i = np.outer(v, v.conj())
    return sum(P.matrix @ rho_i @ P.matrix.conj().T for P in _PAULIS) / 4


def is_density_matrix(rho: np.ndarray, tol: float = 1e-12) -> bool:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        return False
    herm = np.max(np.abs(rho - rho.conj().T)) <= tol
    unit = abs(np.trace(rho) - 1) <= tol
    psd = np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) >= -tol
    return bool(herm and unit and psd)


def eavesdropper_overlap(info: InfoState) -> float:
    """``Tr[rho_Bob rho_I]`` for the uncorrected qubit an eavesdropper holds."""
    v = info.vector
    return float(np.real(v.conj() @ bob_pauli_mixture(info) @ v))


@dataclass(frozen=True)
class OverlapEstimate:
    mean: float
    standard_error: float
    samples: int


def random_state_overlap(info: InfoState, samples: int = 100_000, seed: int = 2018) -> OverlapEstimate:
    """Monte-Carlo mean of ``|<psi|I>|^2`` over Haar-random pure ``psi``."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(samples, 2)) + 1j * rng.normal(size=(samples, 2))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    f = np.abs(z.conj() @ info.vector) ** 2
    return OverlapEstimate(float(f.mean()), float(f.std(ddof=1) / math.sqrt(samples)), samples)
