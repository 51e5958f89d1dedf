"""Cross-checks between closed forms, printed tables, fixtures and the engine."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import basis, engine, formulas, maf, states
from .engine import AttemptPlan, Strategy
from .formulas import Variant
from .states import InfoState

PASS = "PASS"
FAIL = "FAIL"
EXPECTED = "EXPECTED-DISCREPANCY"

# Printed "state of particle 2" entries whose cos/sin exponents disagree with
# the same rows' printed probabilities; the engine residuals satisfy both the
# probability column and the follow-on table.
KNOWN_STATE_TYPOS = frozenset({(2, "00"), (2, "03"), (2, "30"), (2, "33")})


@dataclass
class CheckResult:
    name: str
    status: str
    max_deviation: float
    detail: str = ""

    def line(self) -> str:
        dev = "" if math.isnan(self.max_deviation) else f"  max|dev|={self.max_deviation:.3e}"
        extra = f"  {self.detail}" if self.detail else ""
        return f"[{self.status}] {self.name}{dev}{extra}"


def concurrence_grid(n: int = 50) -> np.ndarray:
    return np.linspace(1.0 / n, 1.0, n)


def check_fixtures(n_chi: int = 50) -> CheckResult:
    worst = 0.0
    histories = {"primary": (), "after-0": (0,), "after-3": (3,)}
    for chi in np.linspace(math.pi / 4 / n_chi, math.pi / 4, n_chi):
        st = engine.build_tree(float(chi), 1, Strategy.CONTINUE)
        for tag, hist in histories.items():
            node = next(n for n in st.nodes if n.history == hist)
            pair, _ = engine.pair_for_attempt(len(hist))
            got = basis.matched_basis(node.family, pair, orient=node.probe)
            want = basis.paper_fixture(tag, float(chi))
            for v, w, c, d in zip(got.vectors, want.vectors, got.classification, want.classification):
                ov = np.vdot(v, w)
                worst = max(worst, float(np.max(np.abs(v * ov / abs(ov) - w))))
                if c != d:
                    return CheckResult("basis fixtures", FAIL, worst, f"classification differs for {tag}")
    return CheckResult("basis fixtures (primary, after-0, after-3)", PASS if worst <= 1e-10 else FAIL, worst)


def _row_node(st, label):
    h = tuple(int(c) for c in label)
    return next(n for n in st.nodes if n.history == h)


def check_tables(samples: int = 20, seed: int = 11) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    prob_dev = 0.0
    bad_prob, bad_state, bad_class = set(), set(), set()
    for _ in range(samples):
        chi = float(rng.uniform(0.05, math.pi / 4))
        info = InfoState.random(rng)
        st = engine.structural_tree(chi, AttemptPlan(2))
        cond = st.conditional_probabilities(info.pa)
        index = {n.history: i for i, n in enumerate(st.nodes)}
        for row in formulas.table_rows():
            i = index[tuple(int(c) for c in row.label)]
            node = st.nodes[i]
            dev = abs(cond[i] - row.probability(chi, info))
            prob_dev = max(prob_dev, dev)
            if dev > 1e-10:
                bad_prob.add((row.table, row.label))
            if not states.equal_up_to_phase(info.a * node.rA + info.b * node.rB, row.state.vector(chi, info)):
                bad_state.add((row.table, row.label))
            if node.classification.success != row.unit_fidelity:
                bad_class.add((row.table, row.label))

    def names(s):
        return ", ".join(f"B{l}" for t, l in sorted(s))

    out = [
        CheckResult(
            "printed rows: conditional probabilities",
            PASS if not bad_prob else FAIL,
            prob_dev,
            f"mismatched rows: {names(bad_prob)}" if bad_prob else "",
        ),
        CheckResult(
            "printed rows: fidelity column (success pattern)",
            PASS if not bad_class else FAIL,
            float("nan"),
            f"mismatched rows: {names(bad_class)}" if bad_class else "",
        ),
    ]
    unexpected = bad_state - KNOWN_STATE_TYPOS
    expected = bad_state & KNOWN_STATE_TYPOS
    if unexpected:
        out.append(CheckResult("printed rows: post-measurement states", FAIL, float("nan"), f"mismatched rows: {names(unexpected)}"))
    else:
        out.append(CheckResult("printed rows: post-measurement states", PASS, float("nan"), "all rows except those listed below"))
    if expected:
        out.append(
            CheckResult(
                "printed first-repeat states (exponent typos)",
                EXPECTED,
                float("nan"),
                f"rows {names(expected)} disagree with their own probability column; engine residuals used",
            )
        )
    return out


def check_equations(n: int = 50, infos: int = 10, seed: int = 3) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst = [0.0] * 4
    for C in concurrence_grid(n):
        chi = formulas.chi_from_concurrence(float(C))
        for _ in range(infos):
            t = engine.enumerate_tree(chi, InfoState.random(rng), AttemptPlan(3))
            for m in range(4):
                worst[m] = max(worst[m], abs(t.cumulative_success[m] - formulas.closed_form_success(m, float(C))))
    tol = [1e-12, 1e-10, 1e-10, 1e-10]
    names = ["primary closed form", "first-repeat closed form", "second-repeat closed form", "third-repeat closed form (corrected nesting)"]
    out = [CheckResult(f"{names[m]} vs enumeration", PASS if worst[m] <= tol[m] else FAIL, worst[m]) for m in range(4)]
    t1 = engine.enumerate_tree(math.pi / 4, InfoState(1, 0), AttemptPlan(3))
    printed = formulas.closed_form_success(3, 1.0, Variant.AS_PRINTED)
    dev = float(t1.cumulative_success[3] - printed)
    out.append(
        CheckResult(
            "third-repeat closed form as printed, at C=1",
            EXPECTED,
            abs(dev),
            f"printed={printed:.6f} enumeration={t1.cumulative_success[3]:.6f}; last bracket evaluates to -3",
        )
    )
    return out


def check_success_counts() -> CheckResult:
    t = engine.enumerate_tree(0.5, InfoState(1, 0), AttemptPlan(3))
    counts = t.success_counts()
    return CheckResult(
        "success leaves per attempt", PASS if counts == [2, 4, 8, 16] else FAIL, float("nan"), f"counts={counts}"
    )


def check_success_exactness(depth: int = 6, samples: int = 20, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for chi in (0.62, 0.7, math.pi / 4):
        plan = AttemptPlan(depth - 1)
        for _ in range(samples):
            t = engine.enumerate_tree(chi, InfoState.random(rng), plan)
            for rec in t.leaves():
                if rec.classification.success:
                    worst = max(worst, abs(1 - rec.fidelity_after_correction))
    return CheckResult(f"success leaves exact to depth {depth}", PASS if worst <= 1e-12 else FAIL, worst)


def check_security(samples: int = 100, seed: int = 5) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        info = InfoState.random(rng)
        worst = max(
            worst,
            float(np.max(np.abs(maf.bob_pauli_mixture(info) - np.eye(2) / 2))),
            abs(maf.eavesdropper_overlap(info) - 0.5),
        )
    return CheckResult("security identity Tr[rho_Bob rho_I] = 1/2", PASS if worst <= 1e-14 else FAIL, worst)


def check_maf_anchor(n: int = 20) -> CheckResult:
    worst = 0.0
    for C in np.linspace(0.05, 1.0, n):
        v = maf.average_fidelity(formulas.chi_from_concurrence(float(C)), AttemptPlan(0, Strategy.ME_FINAL))
        worst = max(worst, abs(v - formulas.maf_sqt(float(C))))
    return CheckResult("MAF(me-final, m=0) = (2+C)/3", PASS if worst <= 1e-8 else FAIL, worst)


def check_maf_claims(n: int = 20) -> CheckResult:
    plans = [AttemptPlan(m, s) for m in range(3) for s in Strategy]
    rows = maf.maf_sweep(np.linspace(0.05, 1.0, n), plans)
    bad = maf.dominance_violations(rows)
    table = {(r.concurrence, r.m, r.strategy): r.maf for r in rows}
    mono = [
        (C, m)
        for (C, m, s), v in table.items()
        if s is Strategy.ME_FINAL and m > 0 and v > table[(C, m - 1, s)] + 1e-12
    ]
    top = max(abs(r.maf - 1) for r in rows if r.concurrence == 1.0)
    ok = not bad and not mono and top <= 1e-10
    return CheckResult(
        "MAF dominance / monotonicity / MAF(C=1)=1",
        PASS if ok else FAIL,
        top,
        f"dominance violations={bad} monotonicity violations={mono}" if not ok else "",
    )


CHECKS: list[Callable[[], object]] = [
    check_fixtures,
    check_tables,
    check_equations,
    check_success_counts,
    check_success_exactness,
    check_security,
    check_maf_anchor,
    check_maf_claims,
]


def run_all() -> list[CheckResult]:
    results = []
    for check in CHECKS:
        r = check()
        results.extend(r if isinstance(r, list) else [r])
    return results
