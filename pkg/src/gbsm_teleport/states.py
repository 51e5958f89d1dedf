"""Three-qubit states kept linear in the unknown information amplitudes.

A protocol state is stored as a pair of coefficient tensors ``A`` and ``B``
so that the physical (unnormalized) state for an information qubit
``a|0> + b|1>`` is ``a*A + b*B``.  Every measurement basis the protocol
needs can then be computed without knowing ``(a, b)``.

Kets are big-endian ``|q1 q2 q3>``: tensor axis ``k`` holds qubit ``k + 1``
and the flattened index is ``4*q1 + 2*q2 + q3``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractError, DomainError, StructureError, UndefinedBranchError

#: Tolerance for algebraic identities (normalization, orthonormality, ...).
TOL = 1e-12

QUBITS = (1, 2, 3)


@dataclass(frozen=True)
class InfoState:
    """The secret single-qubit state ``a|0> + b|1>``."""

    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > TOL:
            raise ContractError(f"info state not normalized: |a|^2+|b|^2 = {norm!r}")

    @classmethod
    def from_bloch(cls, theta: float, phi: float = 0.0) -> "InfoState":
        """``a = cos(theta/2)``, ``b = exp(i phi) sin(theta/2)``."""
        return cls(math.cos(theta / 2), complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "InfoState":
        """Haar-random pure state."""
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z /= np.linalg.norm(z)
        return cls(complex(z[0]), complex(z[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)

    @property
    def pa(self) -> float:
        """Population ``|a|^2``."""
        return abs(self.a) ** 2

    @property
    def pb(self) -> float:
        return abs(self.b) ** 2


@dataclass(frozen=True)
class ResourceSpec:
    """Resource ``cos(chi)|00> + sin(chi)|11>`` on qubits 2 and 3."""

    chi: float

    def __post_init__(self):
        check_chi(self.chi)

    @property
    def concurrence(self) -> float:
        return math.sin(2 * self.chi)


def check_chi(chi: float) -> float:
    if not (0.0 <= chi <= math.pi / 4 + 1e-15):
        raise DomainError(f"chi must lie in [0, pi/4], got {chi!r}")
    return chi


class Pauli(enum.Enum):
    """Bob's correction set.  ``ZX`` means X is applied first, then Z."""

    I = "I"
    Z = "Z"
    X = "X"
    ZX = "ZX"

    @property
    def matrix(self) -> np.ndarray:
        return _PAULI_MATRICES[self]


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI_MATRICES = {
    Pauli.I: np.eye(2, dtype=complex),
    Pauli.Z: _SZ,
    Pauli.X: _SX,
    Pauli.ZX: _SZ @ _SX,
}
for _m in _PAULI_MATRICES.values():
    _m.setflags(write=False)


class LinearFamilyState:
    """Unnormalized 3-qubit state ``a*A + b*B``.

    ``A`` and ``B`` are read-only complex arrays of shape ``(2, 2, 2)``.
    """

    __slots__ = ("A", "B")

    def __init__(self, A, B):
        A = np.array(A, dtype=complex).reshape(2, 2, 2)
        B = np.array(B, dtype=complex).reshape(2, 2, 2)
        A.setflags(write=False)
        B.setflags(write=False)
        self.A = A
        self.B = B

    def __repr__(self):
        def nz(t):
            return {format(i, "03b"): complex(v) for i, v in enumerate(t.ravel()) if abs(v) > TOL}

        return f"LinearFamilyState(A={nz(self.A)}, B={nz(self.B)})"

    @property
    def weights(self) -> tuple[float, float]:
        """``(||A||^2, ||B||^2)``; with disjoint supports the branch
        probability is ``|a|^2 wA + |b|^2 wB``."""
        return float(np.vdot(self.A, self.A).real), float(np.vdot(self.B, self.B).real)

    def supports_disjoint(self, tol: float = TOL) -> bool:
        return bool(np.all(np.abs(self.A * self.B) <= tol))


def basis_ket(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string, e.g. ``basis_ket("011")``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def initial_family(chi: float) -> LinearFamilyState:
    """``(a|0> + b|1>)_1 (cos chi|00> + sin chi|11>)_23``."""
    check_chi(chi)
    c, s = math.cos(chi), math.sin(chi)
    A = c * basis_ket("000") + s * basis_ket("011")
    B = c * basis_ket("100") + s * basis_ket("111")
    return LinearFamilyState(A, B)


def instantiate(family: LinearFamilyState, info: InfoState) -> np.ndarray:
    return (info.a * family.A + info.b * family.B).ravel()


def branch_probability(family: LinearFamilyState, info: InfoState) -> float:
    psi = instantiate(family, info)
    return float(np.vdot(psi, psi).real)


def _check_pair(pair: Sequence[int]) -> tuple[int, int]:
    i, j = pair
    if i not in QUBITS or j not in QUBITS:
        raise DomainError(f"qubit indices must be in {QUBITS}, got {pair!r}")
    if i == j:
        raise DomainError(f"pair must name two distinct qubits, got {pair!r}")
    return i, j


def spectator_of(pair: Sequence[int]) -> int:
    i, j = _check_pair(pair)
    return 6 - i - j


def _pair_view(t: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    # axes reordered to (pair[0], pair[1], spectator)
    i, j = pair
    return np.moveaxis(t, (i - 1, j - 1), (0, 1))


def _from_pair_view(t: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    i, j = pair
    return np.moveaxis(t, (0, 1), (i - 1, j - 1))


def project_pair(family: LinearFamilyState, pair: Sequence[int], vector) -> LinearFamilyState:
    """Apply ``|v><v|`` on ``pair`` (identity on the spectator).

    ``vector`` is indexed ``2*q_pair[0] + q_pair[1]``.  The child stays on
    the full 3-qubit space so later measurements on other pairs remain
    expressible.
    """
    pair = _check_pair(pair)
    v = np.asarray(vector, dtype=complex).reshape(4)
    if abs(np.vdot(v, v).real - 1.0) > TOL:
        raise ContractError(f"measurement vector not normalized: {np.vdot(v, v).real!r}")
    v2 = v.reshape(2, 2)

    def proj(t):
        tv = _pair_view(t, pair)
        amp = np.einsum("ij,ijs->s", v2.conj(), tv)
        return _from_pair_view(v2[:, :, None] * amp[None, None, :], pair)

    return LinearFamilyState(proj(family.A), proj(family.B))


def apply_correction(family: LinearFamilyState, qubit: int, corr: Pauli) -> LinearFamilyState:
    if qubit not in QUBITS:
        raise DomainError(f"qubit must be in {QUBITS}, got {qubit!r}")
    m = corr.matrix
    ax = qubit - 1

    def act(t):
        return np.moveaxis(np.tensordot(m, t, axes=([1], [ax])), 0, ax)

    return LinearFamilyState(act(family.A), act(family.B))


def spectator_matrix(t: np.ndarray, spectator: int) -> np.ndarray:
    """Reshape a ``(2, 2, 2)`` tensor to ``(4, 2)`` with the spectator last."""
    return np.moveaxis(t, spectator - 1, 2).reshape(4, 2)


def spectator_residual(family: LinearFamilyState, spectator: int) -> tuple[np.ndarray, np.ndarray]:
    """Residual coefficient vectors ``(rA, rB)`` on the spectator qubit.

    Requires the family to be ``|v>_pair (a rA + b rB)_spectator`` for a
    single normalized pair vector ``v``; ``rA`` and ``rB`` share the
    (arbitrary) phase of ``v``.
    """
    MA = spectator_matrix(family.A, spectator)
    MB = spectator_matrix(family.B, spectator)
    M = np.hstack([MA, MB])
    u, s, _ = np.linalg.svd(M)
    if s[0] == 0.0:
        raise UndefinedBranchError("zero-norm family has no residual")
    if s[1] > 1e-9 * s[0]:
        raise StructureError("measured pair is not collapsed onto a single vector")
    v = u[:, 0]
    return v.conj() @ MA, v.conj() @ MB


def fidelity_to_info(family: LinearFamilyState, info: InfoState, spectator: int) -> float:
    """``<I| rho_spec |I> / Tr rho_spec`` for the reduced spectator state."""
    if spectator not in QUBITS:
        raise DomainError(f"spectator must be in {QUBITS}, got {spectator!r}")
    psi = info.a * family.A + info.b * family.B
    M = spectator_matrix(psi, spectator)
    rho = M.T @ M.conj()
    tr = float(np.trace(rho).real)
    if tr == 0.0:
        raise UndefinedBranchError("fidelity undefined on a zero-probability branch")
    i = info.vector
    return float((i.conj() @ rho @ i).real / tr)


def phase_align(v: np.ndarray) -> np.ndarray:
    """Normalize ``v`` and rotate its global phase so the largest-magnitude
    amplitude is real positive."""
    v = np.asarray(v, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if n == 0.0:
        raise UndefinedBranchError("cannot phase-align a zero vector")
    k = int(np.argmax(np.abs(v)))
    return v / n * (abs(v[k]) / v[k])


def equal_up_to_phase(u, v, tol: float = 1e-10) -> bool:
    """Compare two vectors up to normalization and a global phase."""
    u = phase_align(u)
    v = phase_align(v)
    ov = np.vdot(u, v)
    if abs(ov) < tol:
        return False
    # rotate by the overlap phase; argmax ties would make per-vector alignment unstable
    return bool(np.max(np.abs(u * (ov / abs(ov)) - v)) <= tol)
