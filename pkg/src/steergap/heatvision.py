"""The random-measurement dephasing channel and its purity decay.

One channel step leaves the state alone with probability 1/2 and otherwise
conjugates by a uniformly random right shift:

    w(rho) = rho/2 + (1/2s) sum_x R_x rho R_x.

Iterating from any state drives the purity down at least geometrically,
with per-step factor (1/2 + norm/2)^2 where norm = 2*sqrt(s-1)/s; at s = 2
the factor is 1 and nothing is certified, which is exactly the boundary
where the tensor/commuting separation closes.

Everything here runs on the truncated word space, so each channel step
consumes one shell of buffer; runs past the buffer raise instead of
silently returning truncation artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BufferExhaustedError, CapacityError, ConvergenceError
from .freegroup import GroupParams, ball_size
from .hilbert import (
    DensityMatrix,
    StateVector,
    TruncatedBasis,
    build_basis,
    require_buffer,
    right_regular,
)
from .spectral import analytic_norm

DEFAULT_SUPEROP_DIM_CAP = 60


def purity_bound(s: int, steps: int, *, fstar: float | None = None) -> float:
    """Purity envelope after ``steps`` applications: ((1 + f)/2)^(2*steps)."""
    if fstar is None:
        fstar = analytic_norm(s)
    return ((1.0 + fstar) / 2.0) ** (2 * steps)


def _right_shifts(basis: TruncatedBasis) -> list:
    return [right_regular(x, basis).matrix for x in range(1, basis.params.s + 1)]


def _apply_once(matrix: np.ndarray, shifts: list, s: int) -> np.ndarray:
    out = 0.5 * matrix
    for sh in shifts:
        half = sh @ matrix
        out += (1.0 / (2.0 * s)) * (sh @ half.T).T
    return out


def channel_apply(rho: DensityMatrix, params: GroupParams) -> DensityMatrix:
    """One exact channel step; costs one shell of truncation buffer."""
    if rho.basis.params != params:
        raise ValueError("state and parameters disagree on s")
    require_buffer(rho.support_depth, rho.basis.depth, 1)
    shifts = _right_shifts(rho.basis)
    out = _apply_once(rho.matrix, shifts, params.s)
    return DensityMatrix(rho.basis, out, rho.support_depth + 1)


@dataclass
class ChannelRun:
    """Purity trajectory of an iterated channel, with its analytic envelope.

    ``purity_series[t]`` is the purity after t steps (index 0 is the input
    state); ``exact_through`` records how many steps the truncation buffer
    covered.
    """

    s: int
    depth: int
    steps: int
    initial_support_depth: int
    fstar: float
    purity_series: list[float]
    bound_series: list[float]
    exact_through: int

    def rows(self):
        """(t, purity, bound, ratio) per step, ready for CSV emission."""
        for t, (p, b) in enumerate(zip(self.purity_series, self.bound_series)):
            yield t, p, b, p / b


def iterate_channel(
    params: GroupParams,
    depth: int,
    steps: int,
    rho0: DensityMatrix,
    fstar: float | None = None,
) -> ChannelRun:
    """Run ``steps`` exact channel applications, tracking purity vs bound.

    Refuses to run past the truncation buffer.  Trace and symmetry are
    checked every step; the purity envelope is checked as an internal
    consistency invariant and a violation means the truncation contract
    broke, so it raises rather than returning bad data.
    """
    if rho0.basis.params != params or rho0.basis.depth != depth:
        raise ValueError("initial state does not live on the requested space")
    k0 = rho0.support_depth
    exact_through = depth - k0
    if steps > exact_through:
        raise BufferExhaustedError(
            f"requested {steps} steps from support depth {k0} at truncation "
            f"depth {depth}; max exact steps: {max(exact_through, 0)}"
        )
    if fstar is None:
        fstar = analytic_norm(params.s)
    shifts = _right_shifts(rho0.basis)
    matrix = rho0.matrix
    purities = [float(np.sum(matrix * matrix))]
    bounds = [1.0]
    for t in range(1, steps + 1):
        matrix = _apply_once(matrix, shifts, params.s)
        trace = float(np.trace(matrix))
        if abs(trace - 1.0) > 1e-10:
            raise RuntimeError(f"trace drifted to {trace!r} at step {t}")
        asym = float(np.max(np.abs(matrix - matrix.T)))
        if asym > 1e-10:
            raise RuntimeError(f"symmetry broke by {asym!r} at step {t}")
        p = float(np.sum(matrix * matrix))
        b = purity_bound(params.s, t, fstar=fstar)
        if p > b + 1e-9:
            raise RuntimeError(
                f"purity {p!r} exceeded its envelope {b!r} at step {t}; "
                "the truncation contract is broken"
            )
        if p > purities[-1] + 1e-12:
            raise RuntimeError(f"purity increased at step {t}")
        purities.append(p)
        bounds.append(b)
    return ChannelRun(
        s=params.s,
        depth=depth,
        steps=steps,
        initial_support_depth=k0,
        fstar=fstar,
        purity_series=purities,
        bound_series=bounds,
        exact_through=exact_through,
    )


def superoperator_norm_estimate(
    params: GroupParams,
    depth: int,
    *,
    tol: float = 1e-8,
    max_iter: int = 50_000,
    seed: int = 0,
    dim_cap: int = DEFAULT_SUPEROP_DIM_CAP,
) -> float:
    """Largest singular value of the truncated channel superoperator.

    Power iteration on matrices under the Frobenius inner product.  The
    superoperator is symmetric and positive semidefinite (each term is a
    symmetric conjugation averaged with the identity), so plain power
    iteration converges and the returned Rayleigh quotient approaches the
    top value from below.  As the depth grows it climbs toward
    (1 + 2*sqrt(s-1)/s)/2.
    """
    dim = ball_size(params, depth)
    if dim > dim_cap:
        raise CapacityError(
            f"superoperator on a {dim}-dimensional space exceeds cap {dim_cap}"
        )
    basis = build_basis(params, depth)
    shifts = _right_shifts(basis)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((dim, dim))
    x /= np.linalg.norm(x)
    residual = np.inf
    for _ in range(max_iter):
        y = _apply_once(x, shifts, params.s)
        rayleigh = float(np.sum(x * y))
        residual = float(np.linalg.norm(y - rayleigh * x))
        nrm = float(np.linalg.norm(y))
        if nrm == 0.0:
            raise ConvergenceError("superoperator iteration collapsed", residual)
        x = y / nrm
        if residual <= tol:
            return rayleigh
    raise ConvergenceError(
        f"superoperator iteration did not reach tolerance {tol:g} in "
        f"{max_iter} iterations (residual {residual:.3g})",
        residual=residual,
    )


def pure_purity_series(
    params: GroupParams,
    depth: int,
    steps: int,
    state: StateVector,
) -> list[float]:
    """Purity trajectory from a pure state without forming density matrices.

    The channel maps a pure input to a word-indexed mixture of shifted
    copies sum_w c_w(t) |R_w psi><R_w psi|, where the weights follow a lazy
    random walk on the ball of reduced words.  Purity is then a weighted sum
    of squared overlaps of the branch vectors.  Exact under the same buffer
    condition as the dense route, but with memory D * ball(steps) instead of
    D^2 — the cross-check that keeps the dense path honest at larger depths.
    """
    if state.basis.params != params or state.basis.depth != depth:
        raise ValueError("state does not live on the requested space")
    require_buffer(state.support_depth, depth, steps)
    s = params.s
    basis = state.basis
    ball = build_basis(params, steps)
    nwords = ball.dimension
    shifts = _right_shifts(basis)
    # Branch vector for word w = l1 l2... is R_{l1} applied to the branch of
    # the suffix; (length, lex) order guarantees the suffix comes earlier.
    vectors = np.zeros((nwords, basis.dimension))
    vectors[0] = state.amplitudes
    for i, w in enumerate(ball.words[1:], start=1):
        parent = ball._index[w.letters[1:]]
        vectors[i] = shifts[w.letters[0] - 1] @ vectors[parent]
    gram = vectors @ vectors.T
    gram2 = gram * gram
    # Left-multiplication neighbors inside the ball, for the weight walk.
    neighbor: list[list[int]] = []
    for w in ball.words:
        lt = w.letters
        nbr = []
        for x in range(1, s + 1):
            image = lt[1:] if lt and lt[0] == x else (x,) + lt
            nbr.append(ball._index.get(image))
        neighbor.append(nbr)
    weights = np.zeros(nwords)
    weights[0] = 1.0
    series = [float(weights @ gram2 @ weights)]
    for t in range(1, steps + 1):
        nxt = 0.5 * weights.copy()
        for i, c in enumerate(weights):
            if c != 0.0:
                for j in neighbor[i]:
                    if j is None:
                        raise RuntimeError(
                            f"weight walked off the ball at step {t}"
                        )
                    nxt[j] += c / (2.0 * s)
        weights = nxt
        series.append(float(weights @ gram2 @ weights))
    return series
