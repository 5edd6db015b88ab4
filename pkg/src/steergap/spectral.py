"""Certification of the norm of the averaged shift operator.

The target value is 2*sqrt(s-1)/s.  Two independent routes pin it down:

* extremal-eigenvalue estimates of the compressed operator on deeper and
  deeper truncations (the compressions increase monotonically toward the
  norm from below), and
* exact integer counts of closed walks on the s-regular tree, whose
  normalized 2k-th moments recover the same norm as a limit of 2k-th roots.

The truncated ball is bipartite (words of even/odd length), so the spectrum
is symmetric about zero and plain power iteration would oscillate between
the +norm and -norm eigenvectors.  Power iteration therefore runs on the
*square* of the operator; the Lanczos route handles the symmetry natively
but needs full reorthogonalization to keep the Krylov basis honest.

Large truncations never need the full word basis: the top eigenvector is
constant on length shells (the operator commutes with the root-fixing tree
automorphisms and is irreducible on nonnegative vectors), and on
shell-constant vectors the operator acts as an (N+1)-point tridiagonal
matrix.  The ``radial`` representation exploits this; ``sparse`` builds the
full compressed matrix; ``auto`` switches on basis size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import CapacityError, ConvergenceError
from .freegroup import DEFAULT_WORD_CAP, GroupParams, ball_size, count_words
from .hilbert import (
    SparseSymmetricOperator,
    StateVector,
    TruncatedBasis,
    build_basis,
    generator_average,
    left_regular,
)

#: Above this ball size, representation="auto" abandons the explicit word
#: basis for the shell-tridiagonal reduction.
RADIAL_THRESHOLD = 200_000

#: Cap on the closed-walk half-length; the integer dynamic program is
#: O(k^2) exact bignum work, the cap only blocks runaway requests.
MAX_WALK_HALF_LENGTH = 64

DEFAULT_KRYLOV = 200
DEFAULT_POWER_ITERATIONS = 50_000


def analytic_norm(s: int) -> float:
    """Norm of the averaged shift on the untruncated space: 2*sqrt(s-1)/s."""
    if s < 2:
        raise ValueError("s must be ≥ 2")
    return 2.0 * math.sqrt(s - 1.0) / s


@dataclass
class NormEstimate:
    s: int
    depth: int
    estimated_norm: float
    analytic_bound: float
    iterations: int
    residual: float
    method: str
    representation: str

    @property
    def gap(self) -> float:
        return self.analytic_bound - self.estimated_norm


def radial_offdiagonal(s: int, depth: int) -> np.ndarray:
    """Off-diagonal of the shell-tridiagonal form of the averaged shift.

    Acting on shell-constant vectors, the operator sends shell k to shells
    k-1 and k+1 with couplings 1/sqrt(s) (root edge) and sqrt(s-1)/s (all
    deeper edges); the diagonal vanishes because the tree has no odd cycles.
    """
    b = np.full(depth, math.sqrt(s - 1.0) / s)
    if depth >= 1:
        b[0] = 1.0 / math.sqrt(s)
    return b


def _tridiagonal_matvec(b: np.ndarray):
    def matvec(x: np.ndarray) -> np.ndarray:
        y = np.zeros_like(x)
        y[:-1] += b * x[1:]
        y[1:] += b * x[:-1]
        return y

    return matvec


def _lanczos_extremal(matvec, dim, rng, tol, krylov):
    """Extremal eigenpair by Lanczos with full reorthogonalization.

    Returns (most_positive_value, its_vector, extremal_abs_value,
    iterations, residual).  For the spectra handled here the most positive
    and largest-magnitude eigenvalues coincide, but both are reported so the
    caller does not have to assume that.
    """
    m = min(krylov, dim)
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)
    basis = np.zeros((m, dim))
    alphas: list[float] = []
    betas: list[float] = []
    basis[0] = q
    check_every = 5
    theta_pos = theta_abs = 0.0
    vec_pos = q
    residual = math.inf
    for j in range(m):
        w = matvec(basis[j])
        alpha = float(basis[j] @ w)
        alphas.append(alpha)
        w -= alpha * basis[j]
        if j > 0:
            w -= betas[-1] * basis[j - 1]
        # Two reorthogonalization passes against the whole Krylov basis;
        # classical Gram-Schmidt alone loses orthogonality long before the
        # Ritz values settle.
        for _ in range(2):
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
        beta = float(np.linalg.norm(w))
        ran_out = j == m - 1
        breakdown = beta < 1e-14
        if (j + 1) % check_every == 0 or ran_out or breakdown:
            vals, vecs = scipy.linalg.eigh_tridiagonal(
                np.array(alphas), np.array(betas)
            )
            i_abs = int(np.argmax(np.abs(vals)))
            theta_abs = float(abs(vals[i_abs]))
            theta_pos = float(vals[-1])
            vec_pos = vecs[:, -1] @ basis[: j + 1]
            residual = beta * float(abs(vecs[-1, i_abs]))
            if breakdown:
                # Krylov space is invariant: the Ritz pairs are exact.
                residual = beta
            if residual <= tol or breakdown:
                return theta_pos, vec_pos, theta_abs, j + 1, residual
        if ran_out:
            break
        betas.append(beta)
        basis[j + 1] = w / beta
    if m == dim:
        # Exhausted the whole space: the tridiagonal problem is exact.
        return theta_pos, vec_pos, theta_abs, m, residual
    raise ConvergenceError(
        f"Lanczos did not reach tolerance {tol:g} within Krylov dimension {m} "
        f"(residual {residual:.3g})",
        residual=residual,
    )


def _power_on_square(matvec, dim, rng, tol, max_iter):
    """Largest |eigenvalue| via power iteration on the squared operator."""
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    estimate = 0.0
    residual = math.inf
    for it in range(1, max_iter + 1):
        w = matvec(matvec(v))
        theta = float(v @ w)
        residual = float(np.linalg.norm(w - theta * v))
        estimate = math.sqrt(max(theta, 0.0))
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            raise ConvergenceError(
                "power iteration collapsed to the null space", residual=residual
            )
        v = w / nrm
        if residual <= tol:
            return estimate, v, it, residual
    raise ConvergenceError(
        f"power iteration did not reach tolerance {tol:g} in {max_iter} "
        f"iterations (residual {residual:.3g})",
        residual=residual,
    )


def _resolve_representation(representation: str, dim: int, threshold: int) -> str:
    if representation == "auto":
        return "sparse" if dim <= threshold else "radial"
    if representation not in ("sparse", "radial"):
        raise ValueError(f"unknown representation {representation!r}")
    return representation


def estimate_norm(
    params: GroupParams,
    depth: int,
    *,
    tol: float = 1e-10,
    max_iter: int | None = None,
    seed: int = 0,
    method: str = "lanczos",
    representation: str = "auto",
    cap: int = DEFAULT_WORD_CAP,
    radial_threshold: int = RADIAL_THRESHOLD,
) -> NormEstimate:
    """Estimate the norm of the averaged shift compressed to depth ``depth``.

    The estimates are Rayleigh/Ritz values, so they approach the true
    compressed eigenvalue from below and never exceed the analytic norm.
    """
    if depth < 1:
        raise ValueError("depth must be ≥ 1")
    dim = ball_size(params, depth)
    rep = _resolve_representation(representation, dim, radial_threshold)
    if rep == "sparse":
        basis = build_basis(params, depth, cap=cap)
        matrix = generator_average(basis).matrix
        matvec = matrix.__matmul__
        work_dim = basis.dimension
    else:
        b = radial_offdiagonal(params.s, depth)
        matvec = _tridiagonal_matvec(b)
        work_dim = depth + 1
    rng = np.random.default_rng(seed)
    if method == "lanczos":
        budget = DEFAULT_KRYLOV if max_iter is None else max_iter
        _, _, value, iterations, residual = _lanczos_extremal(
            matvec, work_dim, rng, tol, budget
        )
    elif method == "power-on-square":
        budget = DEFAULT_POWER_ITERATIONS if max_iter is None else max_iter
        value, _, iterations, residual = _power_on_square(
            matvec, work_dim, rng, tol, budget
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return NormEstimate(
        s=params.s,
        depth=depth,
        estimated_norm=value,
        analytic_bound=analytic_norm(params.s),
        iterations=iterations,
        residual=residual,
        method=method,
        representation=rep,
    )


def norm_sweep(
    params: GroupParams, depth_max: int, *, depth_min: int = 1, **kwargs
) -> list[NormEstimate]:
    """Norm estimates for every depth in [depth_min, depth_max]."""
    if depth_min < 1 or depth_min > depth_max:
        raise ValueError("need 1 ≤ depth_min ≤ depth_max")
    return [estimate_norm(params, n, **kwargs) for n in range(depth_min, depth_max + 1)]


def extremal_eigenpair(
    params: GroupParams,
    depth: int,
    *,
    tol: float = 1e-10,
    seed: int = 0,
    krylov: int = DEFAULT_KRYLOV,
    cap: int = DEFAULT_WORD_CAP,
    basis: TruncatedBasis | None = None,
) -> tuple[float, StateVector]:
    """Most positive eigenvalue of the compressed averaged shift, with vector.

    Always works in the explicit word basis because callers want the
    eigenvector as a state.
    """
    if basis is None:
        basis = build_basis(params, depth, cap=cap)
    elif basis.depth != depth or basis.params != params:
        raise ValueError("supplied basis does not match the requested depth")
    matrix = generator_average(basis).matrix
    rng = np.random.default_rng(seed)
    value, vec, _, _, _ = _lanczos_extremal(
        matrix.__matmul__, basis.dimension, rng, tol, krylov
    )
    vec = vec / np.linalg.norm(vec)
    return value, StateVector(basis, vec, basis.depth)


def quadratic_form(op: SparseSymmetricOperator, v: StateVector) -> float:
    """<v| op |v> without normalizing."""
    if op.basis is not v.basis:
        raise ValueError("basis mismatch between operator and state")
    return float(v.amplitudes @ (op.matrix @ v.amplitudes))


def tightness_vector(params: GroupParams, n: int, basis: TruncatedBasis) -> StateVector:
    """Unit vector spreading weight evenly over shells 0..n.

    Shell k holds total weight 1/(n+1) split equally over its words, which
    makes the norm exactly 1 and pushes the quadratic form of the averaged
    shift within O(1/n) of the analytic norm.  The basis must extend at
    least one shell past n so a single application stays exact.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if basis.depth < n + 1:
        raise ValueError(
            f"basis too shallow: depth {basis.depth} but depth ≥ {n + 1} needed"
        )
    amps = np.zeros(basis.dimension)
    for k in range(n + 1):
        amps[basis.depth_offsets[k] : basis.depth_offsets[k + 1]] = 1.0 / math.sqrt(
            (n + 1) * count_words(params, k)
        )
    return StateVector(basis, amps, n)


def tightness_quadratic_form(s: int, n: int) -> float:
    """Closed form of <v| averaged-shift |v> for the even-spread vector.

    Each adjacent shell pair (k, k+1) contributes 2*b_k/(n+1) where b_k is
    the shell coupling, giving (2/(s(n+1))) * (sqrt(s) + (n-1)sqrt(s-1)).
    """
    if n == 0:
        return 0.0
    return 2.0 * (math.sqrt(s) + (n - 1) * math.sqrt(s - 1.0)) / (s * (n + 1))


@dataclass
class BoundChain:
    """The two-step estimate s*|<v|Av>| <= middle <= 2*sqrt(s-1)."""

    lhs: float
    middle: float
    rhs: float


def first_letter_bound_chain(
    v: StateVector,
    *,
    omega: SparseSymmetricOperator | None = None,
    overlap_tol: float = 1e-12,
) -> BoundChain:
    """Evaluate the norm-bound chain on a unit vector orthogonal to |e>.

    Splitting v by first letter into pieces of weight p_y, the s-scaled
    quadratic form of the averaged shift is at most 2*sum_y
    sqrt(p_y(1-p_y)), which Cauchy-Schwarz caps at 2*sqrt(s-1).  Exact only
    while v keeps the one-shell buffer, so that is enforced.
    """
    basis = v.basis
    s = basis.params.s
    amps = v.amplitudes
    if abs(amps[0]) > overlap_tol:
        raise ValueError(
            f"vector overlaps the identity by {amps[0]!r}; the chain needs <e|v> = 0"
        )
    if abs(np.linalg.norm(amps) - 1.0) > 1e-9:
        raise ValueError("vector must be normalized")
    if v.support_depth > basis.depth - 1:
        raise ValueError(
            "vector support must stay one shell below the truncation depth"
        )
    if omega is None:
        omega = generator_average(basis)
    elif omega.basis is not basis:
        raise ValueError("basis mismatch between operator and state")
    lhs = s * abs(quadratic_form(omega, v))
    first = basis.first_letters()
    weights = np.bincount(first, weights=amps * amps, minlength=s + 1)[1:]
    weights = np.clip(weights, 0.0, 1.0)
    middle = 2.0 * float(np.sum(np.sqrt(weights * (1.0 - weights))))
    rhs = 2.0 * math.sqrt(s - 1.0)
    return BoundChain(lhs=lhs, middle=middle, rhs=rhs)


@dataclass
class MomentRecord:
    """Exact count of closed 2k-walks at the tree root, with its moment."""

    s: int
    half_length: int
    walk_count: int
    moment: float


def closed_walk_moment(
    params: GroupParams, k: int, *, max_half_length: int = MAX_WALK_HALF_LENGTH
) -> MomentRecord:
    """Count closed walks of length 2k from the root of the s-regular tree.

    Integer dynamic program over the distance from the root; wholly
    independent of the operator machinery.  The normalized moment
    walk_count / s^(2k) equals <e| averaged-shift^(2k) |e>.
    """
    if k < 0:
        raise ValueError("half-length must be nonnegative")
    if k > max_half_length:
        raise CapacityError(
            f"walk half-length {k} exceeds cap {max_half_length}"
        )
    s = params.s
    counts = {0: 1}
    for _ in range(2 * k):
        nxt: dict[int, int] = {}
        for dist, c in counts.items():
            if dist > 0:
                nxt[dist - 1] = nxt.get(dist - 1, 0) + c
            out = s if dist == 0 else s - 1
            nxt[dist + 1] = nxt.get(dist + 1, 0) + c * out
        counts = nxt
    walks = counts.get(0, 0)
    moment = float(Fraction(walks, s ** (2 * k)))
    return MomentRecord(s=s, half_length=k, walk_count=walks, moment=moment)


def matvec_walk_count(params: GroupParams, k: int, *, depth: int | None = None) -> int:
    """The same closed-walk count via k applications of the adjacency matrix.

    Uses the compressed shift operators on a depth-k basis, where the count
    is exact.  Float64 matvecs are exact integer arithmetic as long as every
    intermediate stays below 2^52; beyond that the routine falls back to
    pure-Python big integers.
    """
    if k < 0:
        raise ValueError("half-length must be nonnegative")
    if depth is None:
        depth = max(k, 1)
    if depth < k:
        raise ValueError(f"depth {depth} cannot hold walks of half-length {k}")
    basis = build_basis(params, depth)
    if params.s ** (2 * k) < 2**52:
        # Sum of the 0/1 shift matrices: every entry is exactly 1.0, so the
        # float64 matvecs below are exact integer arithmetic.
        adjacency = left_regular(1, basis).matrix
        for y in range(2, params.s + 1):
            adjacency = adjacency + left_regular(y, basis).matrix
        vec = np.zeros(basis.dimension)
        vec[0] = 1.0
        for _ in range(k):
            vec = adjacency @ vec
        return int(round(float(vec @ vec)))
    neighbors: list[list[int]] = []
    for w in basis.words:
        lt = w.letters
        nbr = []
        for y in range(1, params.s + 1):
            image = lt[1:] if lt and lt[0] == y else (y,) + lt
            idx = basis._index.get(image)
            if idx is not None:
                nbr.append(idx)
        neighbors.append(nbr)
    vec_int = [0] * basis.dimension
    vec_int[0] = 1
    for _ in range(k):
        out = [0] * basis.dimension
        for i, c in enumerate(vec_int):
            if c:
                for j in neighbors[i]:
                    out[j] += c
        vec_int = out
    return sum(c * c for c in vec_int)
