"""Bipartite steering strategies over the truncated word space.

Both parties answer +/-1 to inputs x, y in 1..s; the figure of merit is the
average equal-input correlator f = (1/s) sum_y <A_y B_y>.  Bob always
measures the projectors (1 +/- left-shift)/2.  Two strategy classes are
compared:

* a *commuting* strategy where Alice acts on the same truncated space by
  right shifts — left and right shifts commute, the shared state is the
  identity word, and f = 1 exactly for every s;
* *tensor* strategies where Alice holds a separate d_A-dimensional space —
  no such strategy can beat 2*sqrt(s-1)/s, and an alternating seesaw
  optimizer saturates the compressed-operator value from below.

A strategy is "violating" when its f exceeds the tensor bound, which for
s >= 3 certifies that no tensor-product model reproduces it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError
from .freegroup import DEFAULT_WORD_CAP, GroupParams
from .hilbert import (
    TruncatedBasis,
    build_basis,
    left_regular,
    right_regular,
    unit_state,
)
from .spectral import analytic_norm, extremal_eigenpair

OUTCOMES = (1, -1)

#: A strategy "violates" when f exceeds the tensor bound by more than this.
VIOLATION_TOL = 1e-9

#: Default cap on the total dimension d_A * D handled densely.
DEFAULT_DIM_CAP = 4000


def tensor_bound(s: int) -> float:
    """Largest f any tensor-separated strategy can reach: 2*sqrt(s-1)/s."""
    return analytic_norm(s)


@dataclass(eq=False)
class ProbabilityTable:
    """Joint outcome distribution P(a, b | x, y), outcomes ordered (+1, -1).

    ``values`` has shape (2, 2, s, s) indexed [a, b, x-1, y-1].
    """

    s: int
    values: np.ndarray

    def prob(self, a: int, b: int, x: int, y: int) -> float:
        return float(self.values[OUTCOMES.index(a), OUTCOMES.index(b), x - 1, y - 1])

    def correlator(self, x: int, y: int) -> float:
        """<A_x B_y> = sum_ab a*b*P(a,b|x,y)."""
        v = self.values[:, :, x - 1, y - 1]
        return float(v[0, 0] - v[0, 1] - v[1, 0] + v[1, 1])

    def alice_marginal(self, a: int, x: int, y: int) -> float:
        return float(np.sum(self.values[OUTCOMES.index(a), :, x - 1, y - 1]))

    def bob_marginal(self, b: int, x: int, y: int) -> float:
        return float(np.sum(self.values[:, OUTCOMES.index(b), x - 1, y - 1]))

    def validate(self, tol: float = 1e-10) -> None:
        """Raise ValueError unless nonnegative, normalized, and no-signaling."""
        if self.values.shape != (2, 2, self.s, self.s):
            raise ValueError(
                f"table has shape {self.values.shape}, expected (2, 2, s, s)"
            )
        low = float(np.min(self.values))
        if low < -tol:
            raise ValueError(f"negative probability {low!r}")
        sums = np.sum(self.values, axis=(0, 1))
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > tol:
            raise ValueError(f"setting with total probability off by {worst!r}")
        # Alice's marginal may not depend on y, Bob's may not depend on x.
        alice = np.sum(self.values, axis=1)  # (2, s, s) indexed [a, x, y]
        spread_a = float(np.max(np.abs(alice - alice.mean(axis=2, keepdims=True))))
        bob = np.sum(self.values, axis=0)  # (2, s, s) indexed [b, x, y]
        spread_b = float(np.max(np.abs(bob - bob.mean(axis=1, keepdims=True))))
        if max(spread_a, spread_b) > tol:
            raise ValueError(
                f"signaling marginal: spreads {spread_a!r} (Alice), {spread_b!r} (Bob)"
            )

    def to_nested_list(self) -> list:
        return self.values.tolist()


def steering_functional(table: ProbabilityTable) -> float:
    """Average equal-input correlator (1/s) sum_y <A_y B_y>."""
    return sum(table.correlator(y, y) for y in range(1, table.s + 1)) / table.s


class BobMeasurements:
    """The fixed projective effects (1 + b * left-shift_y)/2 on a basis."""

    def __init__(self, basis: TruncatedBasis):
        self.basis = basis
        self.shifts = [
            left_regular(y, basis).matrix for y in range(1, basis.params.s + 1)
        ]
        self._identity = sp.identity(basis.dimension, format="csr")
        self._effects: dict[tuple[int, int], sp.csr_matrix] = {}

    def effect(self, y: int, b: int) -> sp.csr_matrix:
        key = (y, b)
        if key not in self._effects:
            self._effects[key] = (
                (self._identity + b * self.shifts[y - 1]) * 0.5
            ).tocsr()
        return self._effects[key]


@dataclass(eq=False)
class StrategyResult:
    """Outcome of evaluating or optimizing one strategy.

    ``objective_history`` and ``restart_histories`` are diagnostics from the
    seesaw optimizer; they are not part of the serialized record.
    """

    s: int
    model: str
    f_s: float
    tensor_bound: float
    violates: bool
    depth: int
    table: ProbabilityTable
    d_A: int | None = None
    seed: int | None = None
    stationary: bool = True
    objective_history: list[float] | None = None
    restart_histories: list[list[float]] | None = field(default=None, repr=False)

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "model": self.model,
            "f_s": self.f_s,
            "tensor_bound": self.tensor_bound,
            "violates": self.violates,
            "depth": self.depth,
            "d_A": self.d_A,
            "seed": self.seed,
            "table": self.table.to_nested_list(),
        }


def _result(
    params: GroupParams,
    model: str,
    table: ProbabilityTable,
    depth: int,
    **extra,
) -> StrategyResult:
    f = steering_functional(table)
    bound = tensor_bound(params.s)
    return StrategyResult(
        s=params.s,
        model=model,
        f_s=f,
        tensor_bound=bound,
        violates=f > bound + VIOLATION_TOL,
        depth=depth,
        table=table,
        **extra,
    )


@dataclass(eq=False)
class CommutingStrategy:
    """Alice right-shifts, Bob left-shifts, shared state the identity word."""

    basis: TruncatedBasis
    alice_shifts: list[sp.csr_matrix]
    bob: BobMeasurements

    @classmethod
    def build(cls, params: GroupParams, depth: int = 2) -> "CommutingStrategy":
        if depth < 2:
            raise ValueError(
                "depth must be ≥ 2 so one application per party stays exact"
            )
        basis = build_basis(params, depth)
        alice = [right_regular(x, basis).matrix for x in range(1, params.s + 1)]
        return cls(basis=basis, alice_shifts=alice, bob=BobMeasurements(basis))


def probability_table_commuting(strategy: CommutingStrategy) -> ProbabilityTable:
    """P(a,b|x,y) = <e| (1 + a R_x)/2 (1 + b S_y)/2 |e> evaluated literally."""
    basis = strategy.basis
    s = basis.params.s
    e = unit_state(basis).amplitudes
    values = np.zeros((2, 2, s, s))
    for y in range(1, s + 1):
        for jb, b in enumerate(OUTCOMES):
            w = strategy.bob.effect(y, b) @ e
            for x in range(1, s + 1):
                u = strategy.alice_shifts[x - 1] @ w
                for ja, a in enumerate(OUTCOMES):
                    values[ja, jb, x - 1, y - 1] = 0.5 * (e @ w + a * (e @ u))
    return ProbabilityTable(s=s, values=values)


def commuting_strategy_result(
    params: GroupParams, depth: int = 2
) -> StrategyResult:
    strategy = CommutingStrategy.build(params, depth)
    table = probability_table_commuting(strategy)
    return _result(params, "commuting", table, depth)


@dataclass(eq=False)
class TensorStrategy:
    """Alice observables on her own d_A-dimensional space, Bob on a basis.

    ``state`` is either a unit vector of length d_A * D (pure) or a density
    matrix of shape (d_A * D, d_A * D).
    """

    alice_dim: int
    observables: list[np.ndarray]
    basis: TruncatedBasis
    state: np.ndarray

    def validate(self, tol: float = 1e-10) -> None:
        d = self.alice_dim
        if len(self.observables) != self.basis.params.s:
            raise ValueError("need one Alice observable per input")
        eye = np.eye(d)
        for i, r in enumerate(self.observables):
            if r.shape != (d, d):
                raise ValueError(f"observable {i + 1} has shape {r.shape}")
            if np.max(np.abs(r - r.T)) > tol:
                raise ValueError(f"observable {i + 1} is not symmetric")
            if np.max(np.abs(r @ r - eye)) > tol:
                raise ValueError(f"observable {i + 1} does not square to identity")
        total = d * self.basis.dimension
        if self.state.ndim == 1:
            if self.state.shape != (total,):
                raise ValueError(f"state vector has length {self.state.shape}")
            if abs(np.linalg.norm(self.state) - 1.0) > tol:
                raise ValueError("state vector is not normalized")
        elif self.state.ndim == 2:
            if self.state.shape != (total, total):
                raise ValueError(f"state matrix has shape {self.state.shape}")
            if abs(np.trace(self.state) - 1.0) > tol:
                raise ValueError("state matrix does not have unit trace")
        else:
            raise ValueError("state must be a vector or a square matrix")


def probability_table_tensor(
    strategy: TensorStrategy, *, bob: BobMeasurements | None = None
) -> ProbabilityTable:
    """P(a,b|x,y) = <E^a_x tensor F^b_y> in the strategy's state."""
    basis = strategy.basis
    s = basis.params.s
    d = strategy.alice_dim
    dim = basis.dimension
    if bob is None:
        bob = BobMeasurements(basis)
    elif bob.basis is not basis:
        raise ValueError("basis mismatch between strategy and Bob measurements")
    eye = np.eye(d)
    values = np.zeros((2, 2, s, s))
    if strategy.state.ndim == 1:
        psi = strategy.state.reshape(d, dim)
        for y in range(1, s + 1):
            for jb, b in enumerate(OUTCOMES):
                right = (bob.effect(y, b) @ psi.T).T  # psi (1 tensor F)
                for x in range(1, s + 1):
                    ex = 0.5 * (eye + strategy.observables[x - 1])
                    full = float(np.sum(psi * (ex @ right)))
                    comp = float(np.sum(psi * right)) - full
                    values[0, jb, x - 1, y - 1] = full
                    values[1, jb, x - 1, y - 1] = comp
    else:
        sigma = strategy.state.reshape(d, dim, d, dim)
        for x in range(1, s + 1):
            for ja, a in enumerate(OUTCOMES):
                ex = 0.5 * (eye + a * strategy.observables[x - 1])
                # Partial trace of (E tensor 1) sigma over Alice.
                reduced = np.einsum("ikjl,ji->kl", sigma, ex)
                for y in range(1, s + 1):
                    for jb, b in enumerate(OUTCOMES):
                        f = bob.effect(y, b)
                        values[ja, jb, x - 1, y - 1] = float(
                            f.multiply(reduced).sum()
                        )
    return ProbabilityTable(s=s, values=values)


def lhs_optimal_strategy(
    params: GroupParams,
    depth: int,
    *,
    tol: float = 1e-10,
    seed: int = 0,
    cap: int = DEFAULT_WORD_CAP,
) -> tuple[TensorStrategy, StrategyResult]:
    """Best trivial-Alice tensor strategy at a given Bob depth.

    With d_A = 1 and every Alice answer +1, f reduces to the quadratic form
    of the averaged shift, maximized by its top eigenvector.  The value
    approaches 1 as the depth grows at s = 2 but stalls at the tensor bound
    for s >= 3.
    """
    value, vec = extremal_eigenpair(params, depth, tol=tol, seed=seed, cap=cap)
    strategy = TensorStrategy(
        alice_dim=1,
        observables=[np.eye(1) for _ in range(params.s)],
        basis=vec.basis,
        state=vec.amplitudes.copy(),
    )
    table = probability_table_tensor(strategy)
    result = _result(params, "tensor", table, depth, d_A=1, seed=seed)
    return strategy, result


def random_dichotomic(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random symmetric involution: a random frame with random +/-1 spectrum."""
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    signs = rng.choice([-1.0, 1.0], size=dim)
    return (q * signs) @ q.T


def seesaw_tensor_optimize(
    params: GroupParams,
    alice_dim: int,
    bob_depth: int,
    *,
    restarts: int = 20,
    max_iter: int = 100,
    tol: float = 1e-11,
    seed: int = 0,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> StrategyResult:
    """Alternating optimization of f over tensor strategies.

    Fix the observables and take the extremal eigenvector of
    (1/s) sum_y R_y tensor S_y as the state; fix the state and set each
    R_y to the matrix sign of its contraction with Bob's shift.  Both steps
    can only increase the objective, so each run's history is monotone; the
    best run over all restarts is returned.  Runs that fail to go
    stationary within ``max_iter`` are flagged, not failed.
    """
    if alice_dim < 1:
        raise ValueError("alice_dim must be ≥ 1")
    if bob_depth < 2:
        raise ValueError("bob_depth must be ≥ 2")
    basis = build_basis(params, bob_depth)
    s = params.s
    dim = basis.dimension
    total = alice_dim * dim
    if total > dim_cap:
        raise CapacityError(
            f"seesaw dimension {alice_dim} x {dim} = {total} exceeds cap {dim_cap}"
        )
    shifts = [left_regular(y, basis).matrix.toarray() for y in range(1, s + 1)]
    master = np.random.SeedSequence(seed)
    best: tuple[float, list[np.ndarray], np.ndarray, list[float], bool] | None = None
    histories: list[list[float]] = []
    for child in master.spawn(restarts):
        rng = np.random.default_rng(child)
        obs = [random_dichotomic(rng, alice_dim) for _ in range(s)]
        history: list[float] = []
        psi = None
        stationary = False
        for _ in range(max_iter):
            m = np.zeros((total, total))
            for r, sh in zip(obs, shifts):
                m += np.kron(r, sh)
            m /= s
            vals, vecs = np.linalg.eigh(m)
            i_ext = int(np.argmax(np.abs(vals)))
            lam = float(vals[i_ext])
            if lam < 0.0:
                # Flipping every observable negates the operator without
                # changing the strategy class; the eigenvector carries over.
                obs = [-r for r in obs]
                lam = -lam
            psi = vecs[:, i_ext]
            history.append(lam)
            psi_mat = psi.reshape(alice_dim, dim)
            new_obs = []
            for sh in shifts:
                my = psi_mat @ sh @ psi_mat.T
                my = 0.5 * (my + my.T)
                w, u = np.linalg.eigh(my)
                signs = np.where(w >= 0.0, 1.0, -1.0)
                new_obs.append((u * signs) @ u.T)
            obs = new_obs
            if len(history) >= 3 and abs(history[-1] - history[-3]) < tol:
                stationary = True
                break
        histories.append(history)
        if best is None or history[-1] > best[0]:
            best = (history[-1], obs, psi, history, stationary)
    assert best is not None
    _, obs, psi, history, stationary = best
    # One final state step so the reported state matches the reported
    # observables exactly.  The eigenvector from before the sign flip is
    # kept: flipping every observable negates the operator, turning the
    # extremal negative pair into the extremal positive one.
    m = np.zeros((total, total))
    for r, sh in zip(obs, shifts):
        m += np.kron(r, sh)
    m /= s
    vals, vecs = np.linalg.eigh(m)
    i_ext = int(np.argmax(np.abs(vals)))
    if vals[i_ext] < 0.0:
        obs = [-r for r in obs]
    psi = vecs[:, i_ext]
    strategy = TensorStrategy(
        alice_dim=alice_dim, observables=obs, basis=basis, state=psi
    )
    table = probability_table_tensor(strategy)
    return _result(
        params,
        "tensor",
        table,
        bob_depth,
        d_A=alice_dim,
        seed=seed,
        stationary=stationary,
        objective_history=history,
        restart_histories=histories,
    )


def conjugation_identity_check(
    strategy: TensorStrategy,
    basis: TruncatedBasis,
    *,
    probes: int = 50,
    seed: int = 0,
) -> float:
    """Max deviation of the unitary that strips Alice out of the correlator.

    Conjugating (1/s) sum_y R_y tensor S_y by U = sum_g R_g^{-1} tensor
    |g><g| must equal (1/s) sum_y 1 tensor S_y on vectors supported two
    shells below the cut (one shell for U, one for the shift).  Returns the
    largest 2-norm deviation over random buffered probes; values at machine
    precision certify that Alice's dimension cannot matter.
    """
    if basis.depth < 2:
        raise ValueError("depth must be ≥ 2 to leave room for buffered probes")
    if basis.params.s != len(strategy.observables):
        raise ValueError("strategy and basis disagree on s")
    strategy.validate()
    d = strategy.alice_dim
    s = basis.params.s
    dim = basis.dimension
    shifts = [left_regular(y, basis).matrix for y in range(1, s + 1)]
    # R_g for every basis word by peeling the first letter; the suffix of a
    # reduced word is reduced and shorter, hence already computed.
    word_ops: list[np.ndarray] = [np.eye(d)]
    for w in basis.words[1:]:
        parent = basis._index[w.letters[1:]]
        word_ops.append(strategy.observables[w.letters[0] - 1] @ word_ops[parent])
    word_arr = np.stack(word_ops)  # (dim, d, d)

    def conjugate(mat: np.ndarray, dagger: bool) -> np.ndarray:
        ops = word_arr if dagger else word_arr.transpose(0, 2, 1)
        return np.einsum("gij,jg->ig", ops, mat)

    def averaged(mat: np.ndarray, with_alice: bool) -> np.ndarray:
        acc = np.zeros_like(mat)
        for r, sh in zip(strategy.observables, shifts):
            term = (sh @ mat.T).T
            acc += (r @ term) if with_alice else term
        return acc / s

    rng = np.random.default_rng(seed)
    keep = basis.prefix_dimension(basis.depth - 2)
    worst = 0.0
    for _ in range(probes):
        probe = np.zeros((d, dim))
        probe[:, :keep] = rng.standard_normal((d, keep))
        probe /= np.linalg.norm(probe)
        lhs = conjugate(averaged(conjugate(probe, dagger=True), with_alice=True),
                        dagger=False)
        rhs = averaged(probe, with_alice=False)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def random_tensor_strategy(
    params: GroupParams,
    alice_dim: int,
    bob_depth: int,
    rng: np.random.Generator,
    *,
    mixed: bool = False,
    basis: TruncatedBasis | None = None,
) -> TensorStrategy:
    """A random valid tensor strategy, for table-validity sweeps."""
    if basis is None:
        basis = build_basis(params, bob_depth)
    elif basis.depth != bob_depth or basis.params != params:
        raise ValueError("supplied basis does not match the requested depth")
    obs = [random_dichotomic(rng, alice_dim) for _ in range(params.s)]
    total = alice_dim * basis.dimension
    if mixed:
        a = rng.standard_normal((total, min(total, 4)))
        rho = a @ a.T
        state = rho / np.trace(rho)
    else:
        state = rng.standard_normal(total)
        state /= np.linalg.norm(state)
    return TensorStrategy(
        alice_dim=alice_dim, observables=obs, basis=basis, state=state
    )
