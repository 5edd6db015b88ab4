"""The one-shot reproduction report: nine numbered checks, pass/fail each.

Each criterion function recomputes its quantities from scratch through the
public package API at the documented tolerances.  ``tolerance_scale``
multiplies every tolerance (0 is the negative control where nothing can
pass); the ``quick`` profile shrinks sweep sizes for smoke testing and is
not the reference configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .freegroup import GroupParams
from .heatvision import (
    iterate_channel,
    purity_bound,
    superoperator_norm_estimate,
)
from .hilbert import DensityMatrix, StateVector, build_basis, unit_state
from .spectral import (
    analytic_norm,
    closed_walk_moment,
    first_letter_bound_chain,
    generator_average,
    matvec_walk_count,
    norm_sweep,
    quadratic_form,
    tightness_quadratic_form,
    tightness_vector,
)
from .steering import (
    TensorStrategy,
    commuting_strategy_result,
    conjugation_identity_check,
    probability_table_commuting,
    probability_table_tensor,
    random_dichotomic,
    random_tensor_strategy,
    seesaw_tensor_optimize,
    CommutingStrategy,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} — {self.details}"

    def to_json_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "details": self.details,
        }


@dataclass
class ReportSettings:
    """Knobs for the report; the defaults are the reference configuration."""

    tolerance_scale: float = 1.0
    seed: int = 7

    norm_s_values: tuple[int, ...] = (2, 3, 4, 5)
    norm_depth_max: int = 14
    norm_gap_allowance: float = 0.03

    moment_k_max: int = 8
    moment_s_max: int = 5
    moment_root_half_length: int = 12

    chain_samples: int = 1000
    chain_depth: int = 8

    tightness_depth_max: int = 12
    tightness_gap_allowance: float = 0.08

    violation_s_values: tuple[int, ...] = (3, 4, 5, 10)

    seesaw_restarts: int = 20
    seesaw_alice_dim: int = 8
    seesaw_bob_depth: int = 5

    conjugation_draws: int = 50
    conjugation_depth: int = 6

    heat_depth: int = 10
    heat_steps: int = 9
    superop_depth_max: int = 4

    table_samples: int = 1000

    @classmethod
    def quick(cls) -> "ReportSettings":
        """Smoke-test profile: same checks, smaller sweeps.

        The convergence windows are widened to what the shallower sweeps
        can reach; the reference tolerances are the field defaults.
        """
        return cls(
            norm_depth_max=8,
            norm_gap_allowance=0.06,
            moment_k_max=5,
            moment_s_max=4,
            chain_samples=60,
            tightness_depth_max=8,
            tightness_gap_allowance=0.11,
            seesaw_restarts=3,
            seesaw_alice_dim=3,
            seesaw_bob_depth=3,
            conjugation_draws=8,
            conjugation_depth=4,
            heat_depth=6,
            heat_steps=5,
            superop_depth_max=3,
            table_samples=60,
        )


def criterion_norm_sweep(settings: ReportSettings) -> CriterionResult:
    """1: depth-14 estimates land within 0.03 of 2*sqrt(s-1)/s, from below."""
    scale = settings.tolerance_scale
    worst_gap = -math.inf
    problems = []
    for s in settings.norm_s_values:
        params = GroupParams(s)
        sweep = norm_sweep(params, settings.norm_depth_max, seed=settings.seed)
        bound = analytic_norm(s)
        estimates = [r.estimated_norm for r in sweep]
        for a, b in zip(estimates, estimates[1:]):
            if b < a:
                problems.append(f"s={s}: sweep not monotone ({a!r} -> {b!r})")
                break
        over = max(e - bound for e in estimates)
        if over > 1e-9 * scale:
            problems.append(f"s={s}: estimate exceeds analytic value by {over:.3g}")
        gap = bound - estimates[-1]
        worst_gap = max(worst_gap, gap)
        allowed = settings.norm_gap_allowance * scale
        if gap > allowed:
            problems.append(f"s={s}: final gap {gap:.6f} exceeds {allowed:.6f}")
    details = (
        f"worst final gap {worst_gap:.6f} "
        f"(allowed {settings.norm_gap_allowance * scale:.6f})"
    )
    if problems:
        details += "; " + "; ".join(problems)
    return CriterionResult(1, "norm sweep converges from below", not problems, details)


def criterion_moment_oracle(settings: ReportSettings) -> CriterionResult:
    """2: walk counts match matvec moments exactly; 24th moment root near norm."""
    scale = settings.tolerance_scale
    problems = []
    checked = 0
    for s in range(2, settings.moment_s_max + 1):
        params = GroupParams(s)
        for k in range(settings.moment_k_max + 1):
            dp = closed_walk_moment(params, k).walk_count
            mv = matvec_walk_count(params, k)
            checked += 1
            if dp != mv:
                problems.append(f"s={s}, k={k}: walk count {dp} != matvec {mv}")
    k12 = settings.moment_root_half_length
    rec = closed_walk_moment(GroupParams(3), k12)
    root = rec.moment ** (1.0 / (2 * k12))
    diff = abs(root - analytic_norm(3))
    if diff > 0.06 * scale:
        problems.append(
            f"s=3, k={k12}: moment root {root:.6f} differs from analytic norm "
            f"by {diff:.6f} > {0.06 * scale:.6f}"
        )
    details = (
        f"{checked} exact count comparisons; moment root at k={k12} "
        f"off by {diff:.6f} (allowed {0.06 * scale:.6f})"
    )
    if problems:
        details += "; " + "; ".join(problems[:4])
    return CriterionResult(2, "walk-count oracle equivalence", not problems, details)


def criterion_bound_chain(settings: ReportSettings) -> CriterionResult:
    """3: the two-step norm bound holds on random vectors orthogonal to |e>."""
    scale = settings.tolerance_scale
    tol = 1e-9 * scale
    params = GroupParams(3)
    basis = build_basis(params, settings.chain_depth)
    omega = generator_average(basis)
    rng = np.random.default_rng(settings.seed)
    keep = basis.prefix_dimension(settings.chain_depth - 1)
    violations = 0
    slack = math.inf
    for _ in range(settings.chain_samples):
        amps = np.zeros(basis.dimension)
        amps[1:keep] = rng.standard_normal(keep - 1)
        amps /= np.linalg.norm(amps)
        v = StateVector(basis, amps, settings.chain_depth - 1)
        chain = first_letter_bound_chain(v, omega=omega)
        if chain.lhs > chain.middle + tol or chain.middle > chain.rhs + tol:
            violations += 1
        slack = min(slack, chain.middle - chain.lhs, chain.rhs - chain.middle)
    details = (
        f"{settings.chain_samples} samples, {violations} violations, "
        f"minimum slack {slack:.3g}"
    )
    return CriterionResult(3, "first-letter bound chain", violations == 0, details)


def criterion_tightness(settings: ReportSettings) -> CriterionResult:
    """4: the even-shell family is unit norm and its quotients climb to the norm."""
    scale = settings.tolerance_scale
    problems = []
    norm_err = 0.0
    for s in (2, 3, 4, 5):
        params = GroupParams(s)
        basis = build_basis(params, 7)
        for n in range(0, 7):
            v = tightness_vector(params, n, basis)
            norm_err = max(norm_err, abs(v.norm() - 1.0))
    if norm_err > 1e-12 * scale:
        problems.append(f"norm deviates from 1 by {norm_err:.3g}")
    params = GroupParams(3)
    quotients = []
    for n in range(2, settings.tightness_depth_max + 1):
        basis = build_basis(params, n + 1)
        v = tightness_vector(params, n, basis)
        q = quadratic_form(generator_average(basis), v)
        closed = tightness_quadratic_form(3, n)
        if abs(q - closed) > 1e-10:
            problems.append(f"n={n}: quotient {q!r} far from closed form {closed!r}")
        quotients.append(q)
    for a, b in zip(quotients, quotients[1:]):
        if b <= a:
            problems.append(f"quotient sequence not increasing ({a!r} -> {b!r})")
            break
    final_gap = analytic_norm(3) - quotients[-1]
    allowed = settings.tightness_gap_allowance * scale
    if final_gap > allowed:
        problems.append(f"final quotient gap {final_gap:.6f} exceeds {allowed:.6f}")
    details = (
        f"max norm error {norm_err:.2g}; final quotient gap {final_gap:.6f} "
        f"(allowed {allowed:.6f})"
    )
    if problems:
        details += "; " + "; ".join(problems)
    return CriterionResult(4, "tightness family", not problems, details)


def criterion_commuting_violation(settings: ReportSettings) -> CriterionResult:
    """5: the commuting strategy reports f = 1 and violates for every s >= 3."""
    scale = settings.tolerance_scale
    problems = []
    worst = 0.0
    for s in settings.violation_s_values:
        res = commuting_strategy_result(GroupParams(s))
        worst = max(worst, abs(res.f_s - 1.0))
        if abs(res.f_s - 1.0) > 1e-12 * scale:
            problems.append(f"s={s}: f = {res.f_s!r}")
        if not res.violates:
            problems.append(f"s={s}: violation not reported")
    res2 = commuting_strategy_result(GroupParams(2))
    if res2.violates:
        problems.append("s=2: spurious violation (bound is 1 there)")
    if abs(res2.f_s - 1.0) > 1e-12 * scale:
        problems.append(f"s=2: f = {res2.f_s!r}")
    details = f"max |f - 1| = {worst:.2g}; s=2 violates={res2.violates}"
    if problems:
        details += "; " + "; ".join(problems)
    return CriterionResult(5, "commuting strategy violates", not problems, details)


def criterion_seesaw_bound(settings: ReportSettings) -> CriterionResult:
    """6: the seesaw never beats the tensor bound and each run is monotone."""
    scale = settings.tolerance_scale
    params = GroupParams(3)
    result = seesaw_tensor_optimize(
        params,
        settings.seesaw_alice_dim,
        settings.seesaw_bob_depth,
        restarts=settings.seesaw_restarts,
        seed=settings.seed,
    )
    problems = []
    excess = result.f_s - result.tensor_bound
    if excess > 1e-6 * scale:
        problems.append(f"f = {result.f_s!r} beats the bound by {excess:.3g}")
    assert result.restart_histories is not None
    for i, hist in enumerate(result.restart_histories):
        for a, b in zip(hist, hist[1:]):
            if b < a - 1e-12 * scale:
                problems.append(f"restart {i}: objective dropped {a!r} -> {b!r}")
                break
    details = (
        f"best f = {result.f_s:.10f} vs bound {result.tensor_bound:.10f} "
        f"({settings.seesaw_restarts} restarts, d_A={settings.seesaw_alice_dim})"
    )
    if problems:
        details += "; " + "; ".join(problems[:4])
    return CriterionResult(6, "seesaw stays under tensor bound", not problems, details)


def criterion_conjugation(settings: ReportSettings) -> CriterionResult:
    """7: stripping Alice by the word unitary is exact on buffered probes."""
    scale = settings.tolerance_scale
    params = GroupParams(3)
    basis = build_basis(params, settings.conjugation_depth)
    rng = np.random.default_rng(settings.seed)
    worst = 0.0
    d_a = 4
    total = d_a * basis.dimension
    for i in range(settings.conjugation_draws):
        obs = [random_dichotomic(rng, d_a) for _ in range(3)]
        state = np.zeros(total)
        state[0] = 1.0
        strat = TensorStrategy(
            alice_dim=d_a, observables=obs, basis=basis, state=state
        )
        worst = max(
            worst,
            conjugation_identity_check(
                strat, basis, probes=2, seed=settings.seed + i
            ),
        )
    tol = 1e-9 * scale
    passed = worst <= tol
    details = f"max deviation {worst:.3g} over {settings.conjugation_draws} draws (allowed {tol:.3g})"
    return CriterionResult(7, "Alice-stripping conjugation identity", passed, details)


def criterion_heat_vision(settings: ReportSettings) -> CriterionResult:
    """8: purity decays under its envelope; superoperator norm climbs to it."""
    scale = settings.tolerance_scale
    params = GroupParams(3)
    basis = build_basis(params, settings.heat_depth)
    rho0 = DensityMatrix.pure(unit_state(basis))
    run = iterate_channel(params, settings.heat_depth, settings.heat_steps, rho0)
    problems = []
    for t, p in enumerate(run.purity_series):
        if p > purity_bound(3, t) + 1e-9 * scale:
            problems.append(f"t={t}: purity {p!r} above bound")
    step1_err = abs(run.purity_series[1] - (0.25 + 1.0 / 12.0))
    if step1_err > 1e-12 * scale:
        problems.append(f"step-1 purity off by {step1_err:.3g}")
    for t in range(1, len(run.purity_series)):
        if not run.purity_series[t] < run.purity_series[t - 1]:
            problems.append(f"t={t}: purity not strictly decreasing")
    target = 0.5 + analytic_norm(3) / 2.0
    sups = [
        superoperator_norm_estimate(params, n, seed=settings.seed)
        for n in range(1, settings.superop_depth_max + 1)
    ]
    for a, b in zip(sups, sups[1:]):
        if b < a:
            problems.append(f"superoperator estimates not nondecreasing ({a!r} -> {b!r})")
    over = max(v - target for v in sups)
    if over > 1e-9 * scale:
        problems.append(f"superoperator estimate above target by {over:.3g}")
    details = (
        f"final purity {run.purity_series[-1]:.6f} vs bound "
        f"{run.bound_series[-1]:.6f}; step-1 error {step1_err:.2g}; "
        f"superoperator estimate reaches {sups[-1]:.6f} of {target:.6f}"
    )
    if problems:
        details += "; " + "; ".join(problems[:4])
    return CriterionResult(8, "heat-vision purity decay", not problems, details)


def criterion_table_sanity(settings: ReportSettings) -> CriterionResult:
    """9: every emitted probability table is a valid no-signaling distribution."""
    scale = settings.tolerance_scale
    tol = 1e-10 * scale
    rng = np.random.default_rng(settings.seed)
    failures = 0
    checked = 0
    cached_bases: dict = {}
    for i in range(settings.table_samples):
        s = int(rng.integers(2, 6))
        d_a = int(rng.integers(1, 4))
        depth = int(rng.integers(2, 4))
        mixed = bool(rng.integers(0, 2))
        key = (s, depth)
        if key not in cached_bases:
            cached_bases[key] = build_basis(GroupParams(s), depth)
        strat = random_tensor_strategy(
            GroupParams(s), d_a, depth, rng, mixed=mixed, basis=cached_bases[key]
        )
        table = probability_table_tensor(strat)
        checked += 1
        try:
            table.validate(tol)
        except ValueError:
            failures += 1
    for s in (2, 3, 4, 5):
        table = probability_table_commuting(
            CommutingStrategy.build(GroupParams(s))
        )
        checked += 1
        try:
            table.validate(tol)
        except ValueError:
            failures += 1
    details = f"{checked} tables validated, {failures} failures"
    return CriterionResult(9, "probability-table sanity", failures == 0, details)


CRITERIA = [
    criterion_norm_sweep,
    criterion_moment_oracle,
    criterion_bound_chain,
    criterion_tightness,
    criterion_commuting_violation,
    criterion_seesaw_bound,
    criterion_conjugation,
    criterion_heat_vision,
    criterion_table_sanity,
]


def run_report(settings: ReportSettings | None = None) -> list[CriterionResult]:
    if settings is None:
        settings = ReportSettings()
    return [fn(settings) for fn in CRITERIA]
