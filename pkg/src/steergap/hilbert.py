"""Truncated word-basis Hilbert space and compressed shift operators.

The space is spanned by the reduced words of length <= N in (length, lex)
order, so each length shell occupies a contiguous index block and the
depth-N basis is a prefix of every deeper one.  The compressed generator
operators are 0/1 partial permutation matrices; they act exactly like their
untruncated counterparts on any vector whose support stays at least one
shell below the cut.  That one-shell buffer is the exactness contract every
downstream routine leans on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import BufferExhaustedError
from .freegroup import (
    DEFAULT_WORD_CAP,
    IDENTITY,
    GroupParams,
    InvalidGeneratorError,
    Word,
    count_words,
    enumerate_words,
)


class TruncatedBasis:
    """Reduced words of length <= depth with O(1) index lookup per word."""

    def __init__(self, params: GroupParams, depth: int, *, cap: int = DEFAULT_WORD_CAP):
        self.params = params
        self.depth = depth
        self.words = enumerate_words(params, depth, cap=cap)
        self.dimension = len(self.words)
        self._index = {w.letters: i for i, w in enumerate(self.words)}
        offsets = [0]
        for k in range(depth + 1):
            offsets.append(offsets[-1] + count_words(params, k))
        self.depth_offsets = tuple(offsets)
        self._first_letters: np.ndarray | None = None

    def __repr__(self) -> str:
        return (
            f"TruncatedBasis(s={self.params.s}, depth={self.depth}, "
            f"dimension={self.dimension})"
        )

    def index_of(self, word: Word) -> int:
        try:
            return self._index[word.letters]
        except KeyError:
            raise ValueError(f"word {word} is not in the depth-{self.depth} basis")

    def word_at(self, i: int) -> Word:
        return self.words[i]

    def shell(self, k: int) -> range:
        """Index range of the words of length exactly k."""
        return range(self.depth_offsets[k], self.depth_offsets[k + 1])

    def prefix_dimension(self, k: int) -> int:
        """Dimension of the subspace spanned by words of length <= k."""
        return self.depth_offsets[k + 1]

    def first_letters(self) -> np.ndarray:
        """First letter of each basis word (0 for the identity), cached."""
        if self._first_letters is None:
            self._first_letters = np.array(
                [w.letters[0] if w.letters else 0 for w in self.words], dtype=np.int64
            )
        return self._first_letters

    def support_depth_of(self, amplitudes: np.ndarray, tol: float = 0.0) -> int:
        """Largest shell carrying weight above ``tol`` (0 for the zero vector)."""
        for k in range(self.depth, 0, -1):
            block = amplitudes[self.depth_offsets[k] : self.depth_offsets[k + 1]]
            if np.max(np.abs(block), initial=0.0) > tol:
                return k
        return 0


def build_basis(
    params: GroupParams, depth: int, *, cap: int = DEFAULT_WORD_CAP
) -> TruncatedBasis:
    return TruncatedBasis(params, depth, cap=cap)


@dataclass(eq=False)
class SparseSymmetricOperator:
    """A real symmetric operator on a truncated basis.

    ``exactness_depth`` records through which support depth a single
    application agrees with the untruncated operator.
    """

    basis: TruncatedBasis
    matrix: sp.csr_matrix
    exactness_depth: int


def _shift_matrix(basis: TruncatedBasis, images: list[int | None]) -> sp.csr_matrix:
    rows, cols = [], []
    for col, row in enumerate(images):
        if row is not None:
            rows.append(row)
            cols.append(col)
    mat = sp.csr_matrix(
        (np.ones(len(rows)), (rows, cols)),
        shape=(basis.dimension, basis.dimension),
    )
    mat.sort_indices()
    return mat


def left_regular(y: int, basis: TruncatedBasis) -> SparseSymmetricOperator:
    """Compression of left multiplication by generator y: |h> -> |g_y h>."""
    s = basis.params.s
    if not 1 <= y <= s:
        raise InvalidGeneratorError(f"generator g{y} does not exist for s={s}")
    images: list[int | None] = []
    for w in basis.words:
        lt = w.letters
        if lt and lt[0] == y:
            images.append(basis._index[lt[1:]])
        else:
            image = (y,) + lt
            images.append(basis._index.get(image))  # None once past the cut
    return SparseSymmetricOperator(basis, _shift_matrix(basis, images), basis.depth - 1)


def right_regular(x: int, basis: TruncatedBasis) -> SparseSymmetricOperator:
    """Compression of right multiplication by generator x: |h> -> |h g_x>."""
    s = basis.params.s
    if not 1 <= x <= s:
        raise InvalidGeneratorError(f"generator g{x} does not exist for s={s}")
    images: list[int | None] = []
    for w in basis.words:
        lt = w.letters
        if lt and lt[-1] == x:
            images.append(basis._index[lt[:-1]])
        else:
            images.append(basis._index.get(lt + (x,)))
    return SparseSymmetricOperator(basis, _shift_matrix(basis, images), basis.depth - 1)


def generator_average(basis: TruncatedBasis) -> SparseSymmetricOperator:
    """Average of the s left shifts; its norm is the quantity being certified.

    Equivalently the normalized adjacency operator of the radius-N ball of
    the s-regular tree rooted at the identity.
    """
    s = basis.params.s
    total = left_regular(1, basis).matrix
    for y in range(2, s + 1):
        total = total + left_regular(y, basis).matrix
    mat = (total / s).tocsr()
    mat.sort_indices()
    return SparseSymmetricOperator(basis, mat, basis.depth - 1)


@dataclass(eq=False)
class StateVector:
    """Real amplitudes over a truncated basis plus a support-depth watermark.

    ``support_depth`` is bookkeeping, not measurement: it may overestimate
    the true support but never underestimates it, which is what the
    exactness contract needs.
    """

    basis: TruncatedBasis
    amplitudes: np.ndarray
    support_depth: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes.copy(), self.support_depth)


def unit_state(basis: TruncatedBasis, word: Word = IDENTITY) -> StateVector:
    """The basis vector |word>."""
    amps = np.zeros(basis.dimension)
    amps[basis.index_of(word)] = 1.0
    return StateVector(basis, amps, len(word))


def state_from_amplitudes(
    basis: TruncatedBasis, amplitudes: np.ndarray, *, tol: float = 0.0
) -> StateVector:
    amplitudes = np.asarray(amplitudes, dtype=float)
    if amplitudes.shape != (basis.dimension,):
        raise ValueError(
            f"amplitude vector has shape {amplitudes.shape}, "
            f"expected ({basis.dimension},)"
        )
    return StateVector(basis, amplitudes, basis.support_depth_of(amplitudes, tol))


def apply(op: SparseSymmetricOperator, v: StateVector) -> StateVector:
    """Apply a compressed operator, advancing the support watermark one shell."""
    if op.basis is not v.basis:
        raise ValueError("basis mismatch between operator and state")
    out = op.matrix @ v.amplitudes
    return StateVector(v.basis, out, min(v.basis.depth, v.support_depth + 1))


@dataclass(eq=False)
class DensityMatrix:
    """Real symmetric density operator over a truncated basis."""

    basis: TruncatedBasis
    matrix: np.ndarray
    support_depth: int

    @classmethod
    def pure(cls, state: StateVector) -> "DensityMatrix":
        a = state.amplitudes
        return cls(state.basis, np.outer(a, a), state.support_depth)

    @classmethod
    def uniform_mixture(cls, states: list[StateVector]) -> "DensityMatrix":
        if not states:
            raise ValueError("mixture of zero states")
        basis = states[0].basis
        mat = np.zeros((basis.dimension, basis.dimension))
        depth = 0
        for st in states:
            if st.basis is not basis:
                raise ValueError("basis mismatch inside mixture")
            mat += np.outer(st.amplitudes, st.amplitudes)
            depth = max(depth, st.support_depth)
        return cls(basis, mat / len(states), depth)

    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def purity(self) -> float:
        return float(np.sum(self.matrix * self.matrix))

    def validate(
        self,
        *,
        trace_tol: float = 1e-12,
        symmetry_tol: float = 1e-12,
        eigenvalue_floor: float = -1e-10,
        check_spectrum: bool = True,
    ) -> None:
        """Raise ValueError if the matrix is not a valid (real) state."""
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"trace {self.trace()!r} differs from 1")
        asym = float(np.max(np.abs(self.matrix - self.matrix.T), initial=0.0))
        if asym > symmetry_tol:
            raise ValueError(f"matrix is asymmetric by {asym!r}")
        if check_spectrum:
            lo = float(np.min(np.linalg.eigvalsh(self.matrix)))
            if lo < eigenvalue_floor:
                raise ValueError(f"matrix has eigenvalue {lo!r} below 0")


def require_buffer(state_depth: int, basis_depth: int, steps: int) -> None:
    """Check that ``steps`` shell-advancing applications stay exact."""
    remaining = basis_depth - state_depth
    if steps > remaining:
        raise BufferExhaustedError(
            f"support depth {state_depth} at truncation depth {basis_depth} "
            f"leaves {max(remaining, 0)} exact steps; {steps} requested"
        )


# --- plain-text coordinate serialization (debugging / interchange format) ---


def _format_value(x: float) -> str:
    return f"{x:.17g}"


def save_operator_text(op: SparseSymmetricOperator, path) -> None:
    """Write an operator as a header line "s N D" plus one triple per line."""
    coo = op.matrix.tocoo()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{op.basis.params.s} {op.basis.depth} {op.basis.dimension}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {_format_value(v)}\n")


def load_operator_text(
    path, basis: TruncatedBasis | None = None, exactness_depth: int | None = None
) -> SparseSymmetricOperator:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("malformed operator header; expected 's N D'")
        s, depth, dim = (int(t) for t in header)
        if basis is None:
            basis = build_basis(GroupParams(s), depth)
        if (basis.params.s, basis.depth, basis.dimension) != (s, depth, dim):
            raise ValueError("operator header does not match the supplied basis")
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    mat.sort_indices()
    if exactness_depth is None:
        exactness_depth = depth - 1
    return SparseSymmetricOperator(basis, mat, exactness_depth)


def save_state_text(v: StateVector, path) -> None:
    """Write a state as a header line "s N D" plus one "index value" per line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{v.basis.params.s} {v.basis.depth} {v.basis.dimension}\n")
        for i, a in enumerate(v.amplitudes):
            if a != 0.0:
                fh.write(f"{i} {_format_value(a)}\n")


def load_state_text(path, basis: TruncatedBasis | None = None) -> StateVector:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("malformed state header; expected 's N D'")
        s, depth, dim = (int(t) for t in header)
        if basis is None:
            basis = build_basis(GroupParams(s), depth)
        if (basis.params.s, basis.depth, basis.dimension) != (s, depth, dim):
            raise ValueError("state header does not match the supplied basis")
        amps = np.zeros(dim)
        for line in fh:
            i, a = line.split()
            amps[int(i)] = float(a)
    return state_from_amplitudes(basis, amps)
