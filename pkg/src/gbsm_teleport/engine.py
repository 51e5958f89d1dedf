"""Repeated-GBSM protocol: exact outcome trees and seeded trajectories.

The tree of families is independent of the secret amplitudes; every
info-dependent number follows from the per-node weights
``wA = ||A||^2`` and ``wB = ||B||^2`` because A and B never overlap:
``P(node) = |a|^2 wA + |b|^2 wB``.
"""
from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import basis, kernels, states
from .basis import Classification, Kind
from .errors import DegenerateResourceError, DomainError, StructureError
from .states import InfoState, LinearFamilyState

HARD_CAP = 10

# Reference angle for orientation ties at chi = pi/4 (see basis.matched_basis).
PROBE_CHI = math.pi / 8

# Trials per independently seeded Monte-Carlo chunk.
CHUNK = 1 << 16


class Strategy(enum.Enum):
    CONTINUE = "continue"
    ME_FINAL = "me-final"


@dataclass(frozen=True)
class AttemptPlan:
    """Attempt budget ``max_attempts`` (repeats after the primary, which is
    attempt 0) and the terminal strategy."""

    max_attempts: int = 3
    strategy: Strategy = Strategy.CONTINUE
    cap: int = HARD_CAP

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not (0 <= self.max_attempts <= self.cap):
            raise DomainError(f"max_attempts must be in [0, {self.cap}], got {self.max_attempts}")


def pair_for_attempt(k: int) -> tuple[tuple[int, int], int]:
    """Measured pair and spectator for attempt ``k``; qubit 1 is always measured."""
    if k < 0:
        raise DomainError(f"attempt index must be >= 0, got {k}")
    return ((1, 2), 3) if k % 2 == 0 else ((1, 3), 2)


@dataclass
class _Node:
    history: tuple[int, ...]
    family: LinearFamilyState
    probe: Optional[LinearFamilyState]
    classification: Classification
    spectator: int
    wA: float
    wB: float
    rA: np.ndarray
    rB: np.ndarray
    parent: int
    first_child: int = -1

    @property
    def depth(self) -> int:
        return len(self.history)


@dataclass
class StructuralTree:
    """Info-independent outcome tree; node 0 is the root (before any GBSM)."""

    chi: float
    plan: AttemptPlan
    nodes: list

    def arrays(self):
        wA = np.array([n.wA for n in self.nodes])
        wB = np.array([n.wB for n in self.nodes])
        first = np.array([n.first_child for n in self.nodes], dtype=np.int64)
        return wA, wB, first

    def path_probabilities(self, pa: float) -> np.ndarray:
        wA, wB, _ = self.arrays()
        return pa * wA + (1.0 - pa) * wB

    def conditional_probabilities(self, pa: float) -> np.ndarray:
        p = self.path_probabilities(pa)
        parent = np.array([max(n.parent, 0) for n in self.nodes])
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(p[parent] > 0, p / p[parent], 0.0)
        cond[0] = 1.0
        return cond

    @property
    def leaves(self) -> list:
        return [i for i, n in enumerate(self.nodes) if i > 0 and n.first_child < 0]


def _basis_for(node: _Node, k: int, plan: AttemptPlan, prefix: str):
    pair, _ = pair_for_attempt(k)
    if plan.strategy is Strategy.ME_FINAL and k == plan.max_attempts:
        return basis.me_bell_basis(node.family, pair, prefix), None
    b = basis.matched_basis(node.family, pair, prefix, orient=node.probe)
    pb = None
    if node.probe is not None:
        pb = basis.matched_basis(node.probe, pair, prefix)
    return b, pb


@functools.lru_cache(maxsize=256)
def build_tree(chi: float, max_attempts: int, strategy: Strategy = Strategy.CONTINUE) -> StructuralTree:
    """Breadth-first expansion of failure nodes up to ``max_attempts``."""
    plan = AttemptPlan(max_attempts, strategy)
    states.check_chi(chi)
    if chi == 0.0:
        raise DegenerateResourceError("protocol undefined for a product resource (chi = 0)")
    root_family = states.initial_family(chi)
    root = _Node(
        history=(),
        family=root_family,
        probe=states.initial_family(PROBE_CHI),
        classification=basis.FAILURE,
        spectator=1,
        wA=1.0,
        wB=1.0,
        rA=np.array([1, 0], dtype=complex),
        rB=np.array([0, 1], dtype=complex),
        parent=-1,
    )
    nodes = [root]
    try:
        _expand(nodes, plan)
    except StructureError as exc:
        # amplitude ratios grow like cot(chi)^(2*3^(k-1)); below double range
        # the sector carriers can no longer be told apart
        raise DegenerateResourceError(
            f"chi={chi!r} too small to resolve {plan.max_attempts} repeats in double precision ({exc})"
        ) from exc
    return StructuralTree(chi, plan, nodes)


def _expand(nodes: list, plan: AttemptPlan) -> None:
    frontier = [0]
    for k in range(plan.max_attempts + 1):
        pair, spectator = pair_for_attempt(k)
        final = k == plan.max_attempts
        nxt = []
        for idx in frontier:
            node = nodes[idx]
            prefix = "".join(map(str, node.history))
            b, pb = _basis_for(node, k, plan, prefix)
            node.first_child = len(nodes)
            for out, (label, vec, cls) in enumerate(b):
                child = states.project_pair(node.family, pair, vec)
                probe_child = None
                if pb is not None:
                    probe_child = states.project_pair(node.probe, pair, pb.vectors[out])
                if not child.supports_disjoint():
                    raise StructureError(f"A/B supports overlap after history {label}")
                wA, wB = child.weights
                rA, rB = states.spectator_residual(child, spectator)
                if not cls.success:
                    corr = cls.correction or basis.delivery_correction(rA, rB)
                    kind = Kind.TRUNCATED if final else Kind.FAILURE
                    cls = Classification(kind, corr)
                nodes.append(
                    _Node(node.history + (out,), child, probe_child, cls, spectator, wA, wB, rA, rB, idx)
                )
                if cls.kind is Kind.FAILURE:
                    nxt.append(len(nodes) - 1)
        frontier = nxt


def structural_tree(chi: float, plan: AttemptPlan) -> StructuralTree:
    return build_tree(float(chi), plan.max_attempts, plan.strategy)


@dataclass(frozen=True)
class BranchRecord:
    history: tuple[int, ...]
    conditional_probability: float
    path_probability: float
    classification: Classification
    residual: LinearFamilyState
    fidelity_after_correction: float

    @property
    def label(self) -> str:
        return "B" + "".join(map(str, self.history))

    @property
    def attempt(self) -> int:
        return len(self.history) - 1


@dataclass
class OutcomeTree:
    chi: float
    info: InfoState
    plan: AttemptPlan
    root: LinearFamilyState
    records: list  # records[k] holds the outcomes of attempt k
    cumulative_success: np.ndarray = field(repr=False)

    def leaves(self) -> list:
        return [r for level in self.records for r in level if r.classification.kind is not Kind.FAILURE]

    def record(self, history) -> BranchRecord:
        history = tuple(history)
        for r in self.records[len(history) - 1]:
            if r.history == history:
                return r
        raise KeyError(history)

    def success_counts(self) -> list[int]:
        return [sum(r.classification.success for r in level) for level in self.records]


def _corrected_fidelity(node: _Node, info: InfoState) -> float:
    corr = node.classification.correction
    fam = states.apply_correction(node.family, node.spectator, corr) if corr is not None else node.family
    return states.fidelity_to_info(fam, info, node.spectator)


def enumerate_tree(chi: float, info: InfoState, plan: AttemptPlan) -> OutcomeTree:
    st = structural_tree(chi, plan)
    p = st.path_probabilities(info.pa)
    cond = st.conditional_probabilities(info.pa)
    m = plan.max_attempts
    records = [[] for _ in range(m + 1)]
    cum = np.zeros(m + 1)
    for i, node in enumerate(st.nodes[1:], start=1):
        k = node.depth - 1
        fid = _corrected_fidelity(node, info) if p[i] > 0 else float("nan")
        records[k].append(
            BranchRecord(node.history, float(cond[i]), float(p[i]), node.classification, node.family, fid)
        )
        if node.classification.success:
            cum[k] += p[i]
    return OutcomeTree(chi, info, plan, st.nodes[0].family, records, np.cumsum(cum))


def cumulative_success(tree: OutcomeTree, k: int) -> float:
    if not (0 <= k < len(tree.cumulative_success)):
        raise DomainError(f"attempt index {k} outside 0..{len(tree.cumulative_success) - 1}")
    return float(tree.cumulative_success[k])


@dataclass(frozen=True)
class RunResult:
    history: tuple[int, ...]
    success: bool
    attempts_used: int
    classification: Classification
    residual: np.ndarray  # normalized spectator state before correction

    @property
    def label(self) -> str:
        return "B" + "".join(map(str, self.history))


def _pick(u: float, probs) -> int:
    acc = 0.0
    for c, q in enumerate(probs[:-1]):
        acc += q
        if u < acc:
            return c
    return len(probs) - 1


def sample_run(chi: float, info: InfoState, plan: AttemptPlan, rng: np.random.Generator) -> RunResult:
    """One trajectory; each GBSM outcome drawn by inverse CDF in label order."""
    st = structural_tree(chi, plan)
    cond = st.conditional_probabilities(info.pa)
    idx = 0
    while st.nodes[idx].first_child >= 0:
        fc = st.nodes[idx].first_child
        idx = fc + _pick(rng.random(), cond[fc : fc + 4])
    node = st.nodes[idx]
    r = info.a * node.rA + info.b * node.rB
    return RunResult(
        node.history,
        node.classification.success,
        node.depth,
        node.classification,
        r / np.linalg.norm(r),
    )


@dataclass(frozen=True)
class Estimate:
    trials: int
    successes: int
    success_rate: float
    standard_error: float
    per_attempt: np.ndarray  # successes at each attempt index
    truncated: int

    def within(self, exact: float, nsigma: float = 4.0) -> bool:
        return abs(self.success_rate - exact) <= nsigma * self.standard_error


def _chunk_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def monte_carlo(
    chi: float,
    info: InfoState,
    plan: AttemptPlan,
    trials: int,
    seed: int,
    workers: int = 1,
    backend: Optional[str] = None,
) -> Estimate:
    """Empirical success statistics over ``trials`` seeded trajectories.

    Trials are split into chunks of ``CHUNK``; chunk ``j`` draws its
    uniforms from ``SeedSequence(seed).spawn(n_chunks)[j]``, so results do
    not depend on ``workers``.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    st = structural_tree(chi, plan)
    cond = st.conditional_probabilities(info.pa)
    _, _, first = st.arrays()
    depth = np.array([n.depth for n in st.nodes])
    kinds = np.array([n.classification.kind is Kind.SUCCESS for n in st.nodes])
    trunc = np.array([n.classification.kind is Kind.TRUNCATED for n in st.nodes])
    walk = kernels.get_walk(backend)
    steps = plan.max_attempts + 1
    sizes = _chunk_sizes(trials)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(j):
        u = np.random.default_rng(seeds[j]).random((sizes[j], steps))
        return walk(cond, first, u)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            leaves = list(ex.map(run, range(len(sizes))))
    else:
        leaves = [run(j) for j in range(len(sizes))]
    leaf = np.concatenate(leaves)
    succ = kinds[leaf]
    per_attempt = np.bincount(depth[leaf][succ] - 1, minlength=steps)[:steps]
    n_s = int(succ.sum())
    rate = n_s / trials
    return Estimate(
        trials,
        n_s,
        rate,
        math.sqrt(rate * (1 - rate) / trials),
        per_attempt,
        int(trunc[leaf].sum()),
    )
