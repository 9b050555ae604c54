"""
Exact rational matrices and the linear algebra the rest of the package needs.

Every scalar is a fractions.Fraction; nothing in here ever touches floating point.
Products, kernels, ranks and solves are computed on integer-scaled copies of the
matrices (each matrix caches its row data scaled by the lcm of its denominators),
and elimination is fraction-free in the Bareiss style so intermediate integers
stay bounded by minors of the input.

Conventions:
- Matrix entries are stored row-major.
- Column j of a matrix holds the image of basis vector j.
- kron follows the lexicographic vertex order: the leftmost factor varies slowest.

The KronSumOperator applies sums or products of Kronecker factors to a vector
without ever forming the big matrix, using numpy for the axis-wise contractions.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm, prod
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from scheme_algebra.errors import DomainError, ShapeError, SingularityError

# Set up logger
logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

KRON_SUM = "kron-sum"
KRON_PRODUCT = "kron-product"

# int64 headroom for the matrix-free path; anything larger falls back to Python ints
INT64_SAFE_BOUND = 2 ** 62

Vector = Tuple[Fraction, ...]

RATIONAL_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def to_fraction(value) -> Fraction:
    """Coerce an int, Fraction or 'num/den' string to a Fraction; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, float)):
        raise TypeError(f"Exact arithmetic only: refusing {type(value).__name__} value {value!r}")
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


def parse_rational(text: str) -> Fraction:
    """Parse 'num/den' (or a plain integer) into a Fraction."""
    match = RATIONAL_PATTERN.match(text)
    if not match:
        raise DomainError(f"Not an exact rational: {text!r} (expected num/den)")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise DomainError(f"Zero denominator in {text!r}")
    return Fraction(numerator, denominator)


def format_rational(value: Fraction) -> str:
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vector(values: Iterable) -> Vector:
    return tuple(to_fraction(x) for x in values)


def is_zero_vector(v: Sequence[Fraction]) -> bool:
    return not any(v)


def normalize_leading(v: Sequence[Fraction]) -> Vector:
    """Scale v so its first nonzero coordinate is 1; the zero vector is returned unchanged."""
    lead = next((x for x in v if x), None)
    if lead is None or lead == 1:
        return tuple(v)
    return tuple(x / lead for x in v)


def linear_combination(coefficients: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]]) -> Vector:
    if len(coefficients) != len(vectors):
        raise ShapeError(f"{len(coefficients)} coefficients for {len(vectors)} vectors")
    if not vectors:
        raise ShapeError("Cannot combine an empty list of vectors")
    length = len(vectors[0])
    out = [ZERO] * length
    for c, v in zip(coefficients, vectors):
        if not c:
            continue
        if len(v) != length:
            raise ShapeError("Vectors of different lengths")
        for idx, x in enumerate(v):
            if x:
                out[idx] += c * x
    return tuple(out)


def _integer_vector(v: Sequence[Fraction]) -> Tuple[int, List[int]]:
    values = [to_fraction(x) for x in v]
    den = lcm(*{x.denominator for x in values}) if values else 1
    return den, [x.numerator * (den // x.denominator) for x in values]


def _primitive(row: List[int]) -> List[int]:
    content = gcd(*row)
    if content > 1:
        return [x // content for x in row]
    return row


@dataclass(frozen=True)
class Matrix:
    """Dense matrix of Fractions, stored row-major."""

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError(f"Negative matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"{len(self.entries)} entries do not fill a {self.rows}x{self.cols} matrix"
            )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise ShapeError("Ragged rows")
        return cls(len(rows), n_cols, tuple(to_fraction(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], n_rows: Optional[int] = None) -> "Matrix":
        columns = [vector(c) for c in columns]
        if not columns:
            return cls.zeros(n_rows or 0, 0)
        height = len(columns[0])
        if any(len(c) != height for c in columns):
            raise ShapeError("Columns of different lengths")
        return cls(height, len(columns), tuple(c[i] for i in range(height) for c in columns))

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> "Matrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.diagonal([ONE] * n)

    @classmethod
    def diagonal(cls, values: Sequence) -> "Matrix":
        values = vector(values)
        n = len(values)
        entries = [ZERO] * (n * n)
        for i, x in enumerate(values):
            entries[i * n + i] = x
        return cls(n, n, tuple(entries))

    @classmethod
    def all_ones(cls, rows: int, cols: Optional[int] = None) -> "Matrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (ONE,) * (rows * cols))

    # -- access -----------------------------------------------------------

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"Entry ({i}, {j}) outside a {self.rows}x{self.cols} matrix")
        return self.entries[i * self.cols + j]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> List[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def nonzero_items(self) -> Iterable[Tuple[int, int, Fraction]]:
        for idx, x in enumerate(self.entries):
            if x:
                yield idx // self.cols, idx % self.cols, x

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_diagonal(self) -> bool:
        return self.is_square and all(i == j for i, j, _ in self.nonzero_items())

    def diagonal_entries(self) -> Vector:
        return tuple(self.entries[i * self.cols + i] for i in range(min(self.rows, self.cols)))

    def trace(self) -> Fraction:
        if not self.is_square:
            raise ShapeError(f"Trace of a non-square {self.rows}x{self.cols} matrix")
        return sum(self.diagonal_entries(), ZERO)

    # -- arithmetic -------------------------------------------------------

    @cached_property
    def _integer_rows(self) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
        # (den, rows) with self == rows / den and rows integral
        den = lcm(*{x.denominator for x in self.entries})
        scaled = tuple(
            tuple(x.numerator * (den // x.denominator) for x in self.row(i))
            for i in range(self.rows)
        )
        return den, scaled

    def _check_same_shape(self, other: "Matrix", op: str) -> None:
        if self.shape != other.shape:
            raise ShapeError(f"Cannot {op} {self.rows}x{self.cols} and {other.rows}x{other.cols}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other, "add")
        return Matrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other, "subtract")
        return Matrix(self.rows, self.cols, tuple(x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def scale(self, c) -> "Matrix":
        c = to_fraction(c)
        if not c:
            return Matrix.zeros(self.rows, self.cols)
        return Matrix(self.rows, self.cols, tuple(c * x if x else ZERO for x in self.entries))

    def __rmul__(self, c) -> "Matrix":
        return self.scale(c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def shift(self, c) -> "Matrix":
        """self + c*I."""
        if not self.is_square:
            raise ShapeError("Only square matrices can be shifted by a scalar")
        c = to_fraction(c)
        entries = list(self.entries)
        for i in range(self.rows):
            entries[i * self.cols + i] += c
        return Matrix(self.rows, self.cols, tuple(entries))

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(self.entries[i * self.cols + j]
                                                  for j in range(self.cols)
                                                  for i in range(self.rows)))

    def hadamard(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other, "take the entrywise product of")
        return Matrix(self.rows, self.cols, tuple(x * y if x and y else ZERO
                                                  for x, y in zip(self.entries, other.entries)))

    def apply(self, v: Sequence) -> Vector:
        """Matrix-vector product."""
        if len(v) != self.cols:
            raise ShapeError(f"Vector of length {len(v)} for a {self.rows}x{self.cols} matrix")
        den, rows = self._integer_rows
        vden, ints = _integer_vector(v)
        support = [(k, x) for k, x in enumerate(ints) if x]
        total = den * vden
        return tuple(
            Fraction(s, total) if (s := sum(row[k] * x for k, x in support)) else ZERO
            for row in rows
        )


def hstack(*matrices: Matrix) -> Matrix:
    if not matrices:
        raise ShapeError("Nothing to stack")
    n_rows = matrices[0].rows
    if any(m.rows != n_rows for m in matrices):
        raise ShapeError("Horizontal stacking needs equal row counts")
    cols = sum(m.cols for m in matrices)
    entries = tuple(x for i in range(n_rows) for m in matrices for x in m.row(i))
    return Matrix(n_rows, cols, entries)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Exact product a·b."""
    if a.cols != b.rows:
        raise ShapeError(f"Cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    da, rows_a = a._integer_rows
    db, rows_b = b._integer_rows
    columns_b = [tuple(r[j] for r in rows_b) for j in range(b.cols)]
    den = da * db
    entries = []
    for row in rows_a:
        support = [(k, x) for k, x in enumerate(row) if x]
        for col in columns_b:
            s = sum(x * col[k] for k, x in support)
            entries.append(Fraction(s, den) if s else ZERO)
    return Matrix(a.rows, b.cols, tuple(entries))


def commutator(a: Matrix, b: Matrix) -> Matrix:
    """[a, b] = ab - ba."""
    if not a.is_square or a.shape != b.shape:
        raise ShapeError(f"Commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return mat_mul(a, b) - mat_mul(b, a)


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product with the leftmost factor varying slowest."""
    entries = []
    b_rows = b.to_rows()
    for i in range(a.rows):
        a_row = a.row(i)
        for b_row in b_rows:
            for x in a_row:
                if x:
                    entries.extend(x * y if y else ZERO for y in b_row)
                else:
                    entries.extend((ZERO,) * b.cols)
    return Matrix(a.rows * b.rows, a.cols * b.cols, tuple(entries))


def kron_all(factors: Sequence[Matrix]) -> Matrix:
    if not factors:
        raise ShapeError("Kronecker product of no factors")
    return reduce(kron, factors)


# -- fraction-free elimination -------------------------------------------------

def _bareiss_echelon(rows: List[List[int]], pivot_limit: int) -> Tuple[List[List[int]], List[int]]:
    """Bareiss forward elimination in place.

    Pivots are searched only among the first pivot_limit columns; trailing columns
    (an augmented right-hand side) are carried along. Every division is exact:
    after k pivots each remaining entry is a (k+1)-minor of the input.

    Returns:
        (rows, pivots) where rows[:len(pivots)] is the echelon part.
    """
    n_rows = len(rows)
    previous = 1
    pivots: List[int] = []
    r = 0
    for c in range(pivot_limit):
        if r == n_rows:
            break
        pivot_row = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        top = rows[r]
        lead = top[c]
        for i in range(r + 1, n_rows):
            row = rows[i]
            factor = row[c]
            if factor == 0 and previous == lead:
                continue
            rows[i] = [(lead * x - factor * y) // previous for x, y in zip(row, top)]
        previous = lead
        pivots.append(c)
        r += 1
    return rows, pivots


def _back_substitute(echelon: List[List[int]], pivots: List[int], n: int,
                     fixed: Dict[int, Fraction], rhs: Optional[int] = None) -> List[Fraction]:
    """Solve the echelon system for the pivot unknowns given values of the free ones."""
    x = [ZERO] * n
    for col, value in fixed.items():
        x[col] = value
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        row = echelon[k]
        s = Fraction(row[rhs]) if rhs is not None else ZERO
        for j in range(c + 1, n):
            if row[j] and x[j]:
                s -= row[j] * x[j]
        x[c] = s / row[c] if s else ZERO
    return x


def _echelon_of(m: Matrix, pivot_limit: Optional[int] = None) -> Tuple[List[List[int]], List[int]]:
    _, int_rows = m._integer_rows
    rows = [list(r) for r in int_rows]
    return _bareiss_echelon(rows, m.cols if pivot_limit is None else pivot_limit)


def kernel_basis(m: Matrix) -> List[Vector]:
    """Basis of the null space, one vector per free column, each with leading coordinate 1."""
    echelon, pivots = _echelon_of(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        x = _back_substitute(echelon, pivots, m.cols, {free: ONE})
        basis.append(normalize_leading(x))
    return basis


def rank(m: Matrix) -> int:
    _, pivots = _echelon_of(m)
    return len(pivots)


def solve(m: Matrix, b: Matrix) -> Optional[Matrix]:
    """A matrix X with m·X = b, or None if the system is inconsistent.

    When m has a nontrivial kernel the free unknowns are set to zero.
    """
    if m.rows != b.rows:
        raise ShapeError(f"Right-hand side has {b.rows} rows, matrix has {m.rows}")
    echelon, pivots = _echelon_of(hstack(m, b), pivot_limit=m.cols)
    rank_m = len(pivots)
    for row in echelon[rank_m:]:
        if any(row[m.cols:]):
            return None
    solution_columns = [
        _back_substitute(echelon, pivots, m.cols, {}, rhs=m.cols + t)
        for t in range(b.cols)
    ]
    return Matrix.from_columns(solution_columns, n_rows=m.cols) if b.cols else Matrix.zeros(m.cols, 0)


def inverse(m: Matrix) -> Matrix:
    if not m.is_square:
        raise ShapeError(f"Cannot invert a {m.rows}x{m.cols} matrix")
    if rank(m) < m.rows:
        raise SingularityError(f"Singular {m.rows}x{m.cols} matrix has no inverse")
    return solve(m, Matrix.identity(m.rows))


def is_invertible(m: Matrix) -> bool:
    return m.is_square and rank(m) == m.rows


def reduced_row_echelon(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    echelon, pivots = _echelon_of(m)
    reduced: List[List[Fraction]] = []
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        row = [Fraction(x, echelon[k][c]) if x else ZERO for x in echelon[k]]
        for later_row, later_col in zip(reduced, reversed(pivots[k + 1:])):
            f = row[later_col]
            if f:
                row = [x - f * y for x, y in zip(row, later_row)]
        reduced.append(row)
    reduced.reverse()
    return Matrix(len(reduced), m.cols, tuple(x for r in reduced for x in r)), pivots


def echelon_basis(vectors: Sequence[Sequence[Fraction]]) -> List[Vector]:
    """Canonical basis of span(vectors): the nonzero rows of the reduced echelon form."""
    if not vectors:
        return []
    reduced, _ = reduced_row_echelon(Matrix.from_rows(vectors))
    return reduced.to_rows()


def rank_of_vectors(vectors: Sequence[Sequence[Fraction]]) -> int:
    if not vectors:
        return 0
    span = SpanAccumulator(len(vectors[0]))
    for v in vectors:
        span.add(v)
    return span.rank


class SpanAccumulator:
    """Incrementally grown row space over the rationals.

    Stored rows are primitive integer vectors kept in echelon order, so testing a new
    vector is a single fraction-free reduction pass.
    """

    def __init__(self, length: int):
        self.length = length
        self._rows: List[Tuple[int, List[int]]] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, v: Sequence[Fraction]) -> List[int]:
        if len(v) != self.length:
            raise ShapeError(f"Vector of length {len(v)} for a span in dimension {self.length}")
        _, work = _integer_vector(v)
        for col, row in self._rows:
            f = work[col]
            if f:
                lead = row[col]
                work = _primitive([lead * x - f * y for x, y in zip(work, row)])
        return work

    def contains(self, v: Sequence[Fraction]) -> bool:
        return not any(self._reduce(v))

    def add(self, v: Sequence[Fraction]) -> bool:
        """Add v to the span; returns True iff the rank grew."""
        work = self._reduce(v)
        leading = next((j for j, x in enumerate(work) if x), None)
        if leading is None:
            return False
        self._rows.append((leading, _primitive(work)))
        return True


# -- matrix-free Kronecker operators -----------------------------------------

def _max_abs_row_sum(rows: np.ndarray) -> int:
    if rows.size == 0:
        return 0
    return max(sum(abs(int(x)) for x in row) for row in rows)


@dataclass(frozen=True)
class KronSumOperator:
    """Implicit operator built from small factors, one per tensor position.

    mode KRON_SUM:     sum_k I x ... x M_k x ... x I   (square factors)
    mode KRON_PRODUCT: M_1 x M_2 x ... x M_D
    """

    factor_matrices: Tuple[Matrix, ...]
    mode: str = KRON_SUM

    def __post_init__(self):
        object.__setattr__(self, "factor_matrices", tuple(self.factor_matrices))
        if not self.factor_matrices:
            raise ShapeError("A Kronecker operator needs at least one factor")
        if self.mode not in (KRON_SUM, KRON_PRODUCT):
            raise DomainError(f"Unknown Kronecker mode {self.mode!r}")
        if self.mode == KRON_SUM and not all(m.is_square for m in self.factor_matrices):
            raise ShapeError("Kronecker sums need square factors")

    @property
    def in_dims(self) -> Tuple[int, ...]:
        return tuple(m.cols for m in self.factor_matrices)

    @property
    def out_dims(self) -> Tuple[int, ...]:
        return tuple(m.rows for m in self.factor_matrices)

    @property
    def shape(self) -> Tuple[int, int]:
        return prod(self.out_dims), prod(self.in_dims)

    def materialize(self) -> Matrix:
        """The dense matrix this operator stands for (small instances only)."""
        if self.mode == KRON_PRODUCT:
            return kron_all(self.factor_matrices)
        total = None
        identities = [Matrix.identity(m.rows) for m in self.factor_matrices]
        for k, factor in enumerate(self.factor_matrices):
            term = kron_all(identities[:k] + [factor] + identities[k + 1:])
            total = term if total is None else total + term
        return total

    @cached_property
    def _integer_factors(self) -> Tuple[int, Tuple[np.ndarray, ...]]:
        if self.mode == KRON_SUM:
            den = lcm(*(m._integer_rows[0] for m in self.factor_matrices))
            factors = tuple(
                np.array([[x * (den // m._integer_rows[0]) for x in row] for row in m._integer_rows[1]],
                         dtype=object).reshape(m.rows, m.cols)
                for m in self.factor_matrices
            )
            return den, factors
        den = prod(m._integer_rows[0] for m in self.factor_matrices)
        factors = tuple(
            np.array(m._integer_rows[1], dtype=object).reshape(m.rows, m.cols)
            for m in self.factor_matrices
        )
        return den, factors

    def _output_bound(self, input_bound: int) -> int:
        _, factors = self._integer_factors
        sums = [max(_max_abs_row_sum(f), 1) for f in factors]
        input_bound = max(input_bound, 1)
        if self.mode == KRON_SUM:
            return input_bound * sum(sums)
        return input_bound * prod(sums)

    def apply_integral(self, x: np.ndarray) -> Tuple[int, np.ndarray]:
        """Apply to an integer vector; returns (den, numerators) of the exact result."""
        if x.shape != (self.shape[1],):
            raise ShapeError(f"Vector of length {x.shape} for an operator of shape {self.shape}")
        den, factors = self._integer_factors
        input_bound = int(np.max(np.abs(x))) if x.size else 0
        safe = self._output_bound(input_bound) < INT64_SAFE_BOUND
        dtype = np.int64 if safe else object
        factors = tuple(f.astype(dtype) for f in factors)
        tensor = x.astype(dtype).reshape(self.in_dims)

        def along(matrix: np.ndarray, t: np.ndarray, axis: int) -> np.ndarray:
            return np.moveaxis(np.tensordot(matrix, t, axes=([1], [axis])), 0, axis)

        if self.mode == KRON_SUM:
            result = np.zeros(self.out_dims, dtype=dtype)
            for axis, factor in enumerate(factors):
                result = result + along(factor, tensor, axis)
        else:
            result = tensor
            for axis, factor in enumerate(factors):
                result = along(factor, result, axis)
        return den, result.reshape(-1)


def kron_apply(op: KronSumOperator, v: Sequence) -> Vector:
    """Exact op·v computed factor by factor; the big matrix is never formed."""
    if len(v) != op.shape[1]:
        raise ShapeError(f"Vector of length {len(v)} for an operator of shape {op.shape}")
    vden, ints = _integer_vector(v)
    den, numerators = op.apply_integral(np.array(ints, dtype=object))
    total = den * vden
    return tuple(Fraction(int(n), total) if n else ZERO for n in numerators)


# -- text format ---------------------------------------------------------------

def format_matrix(m: Matrix) -> str:
    """Header 'rows cols', then 'i j value' per nonzero entry in (i, j) order."""
    lines = [f"{m.rows} {m.cols}"]
    lines.extend(f"{i} {j} {format_rational(x)}" for i, j, x in m.nonzero_items())
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> Matrix:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DomainError("Empty matrix text")
    try:
        n_rows, n_cols = (int(x) for x in lines[0].split())
    except ValueError as e:
        raise DomainError(f"Bad matrix header {lines[0]!r}") from e
    entries = [ZERO] * (n_rows * n_cols)
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"Bad matrix entry line {line!r}")
        i, j = int(parts[0]), int(parts[1])
        if not (0 <= i < n_rows and 0 <= j < n_cols):
            raise DomainError(f"Entry ({i}, {j}) outside a {n_rows}x{n_cols} matrix")
        entries[i * n_cols + j] = parse_rational(parts[2])
    return Matrix(n_rows, n_cols, tuple(entries))
