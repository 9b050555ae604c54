"""
The Hamming graph H(D, q) and the matrices of its association scheme.

Vertices are the words of {0, ..., q-1}^D in lexicographic order (leftmost
coordinate slowest), which is the order kron produces. The base vertex is the
all-zeros word; by vertex-transitivity nothing is lost by fixing it.

Each scheme matrix is built two independent ways (directly from distances and by
the tensor recursion over D) and the constructions are compared before anything is
returned. Dense matrices are guarded by a materialization cap; above it only the
matrix-free KronSumOperator path is available.
"""

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import comb
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from scheme_algebra.errors import ConsistencyError, DomainError, ResourceLimitError
from scheme_algebra.exactlin import (
    ONE,
    ZERO,
    KronSumOperator,
    Matrix,
    format_rational,
    kron,
    kron_apply,
    mat_mul,
    rank,
)
from scheme_algebra.reports import CheckReport

# Set up logger
logger = logging.getLogger(__name__)

DEFAULT_MATERIALIZE_CAP = 20000
MATERIALIZE_CAP_ENV = "HAMMING_MATERIALIZE_CAP"

Vertex = Tuple[int, ...]


def get_materialize_cap(cap: Optional[int] = None) -> int:
    """Resolve the cap on q^D for dense matrices: explicit value, then environment, then default."""
    if cap is not None:
        if cap < 1:
            raise DomainError(f"Materialization cap must be positive, got {cap}")
        return cap
    raw = os.environ.get(MATERIALIZE_CAP_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError as e:
            raise DomainError(f"{MATERIALIZE_CAP_ENV}={raw!r} is not an integer") from e
        if value < 1:
            raise DomainError(f"{MATERIALIZE_CAP_ENV} must be positive, got {value}")
        return value
    return DEFAULT_MATERIALIZE_CAP


@dataclass(frozen=True)
class HammingGraph:
    """H(D, q) with the all-zeros word as base vertex."""

    D: int
    q: int

    def __post_init__(self):
        if isinstance(self.D, bool) or not isinstance(self.D, int) or self.D < 1:
            raise DomainError(f"D must be a positive integer, got {self.D!r}")
        if isinstance(self.q, bool) or not isinstance(self.q, int) or self.q < 3:
            raise DomainError(f"q must be an integer >= 3, got {self.q!r}")

    @property
    def base_vertex(self) -> Vertex:
        return (0,) * self.D

    @property
    def n_vertices(self) -> int:
        return self.q ** self.D

    @property
    def omega(self) -> Fraction:
        return 1 - Fraction(2, self.q)

    def vertices(self):
        return product(range(self.q), repeat=self.D)

    def vertex_index(self, x: Sequence[int]) -> int:
        _check_vertex(x, self.D, self.q)
        index = 0
        for c in x:
            index = index * self.q + c
        return index

    def theta(self, i: int) -> int:
        """Eigenvalue of the adjacency matrix on E_i."""
        return self.D * (self.q - 1) - self.q * i

    def theta_star(self, i: int) -> int:
        """Eigenvalue of the dual adjacency matrix on E*_i."""
        return self.D * (self.q - 1) - self.q * i

    def a(self, i: int) -> int:
        return i * (self.q - 2) if 0 <= i <= self.D else 0

    def b(self, i: int) -> int:
        return (self.D - i) * (self.q - 1) if 0 <= i <= self.D else 0

    def c(self, i: int) -> int:
        return i if 0 <= i <= self.D else 0

    # The scheme is self-dual, so the dual parameters coincide with a_i, b_i, c_i.
    a_star = a
    b_star = b
    c_star = c

    def shell_size(self, i: int) -> int:
        return comb(self.D, i) * (self.q - 1) ** i

    def krawtchouk(self, i: int, j: int) -> int:
        """K_i(j) = sum_h (-1)^h (q-1)^(i-h) C(j, h) C(D-j, i-h)."""
        return sum(
            (-1) ** h * (self.q - 1) ** (i - h) * comb(j, h) * comb(self.D - j, i - h)
            for h in range(i + 1)
        )

    def require_materializable(self, cap: Optional[int] = None) -> None:
        limit = get_materialize_cap(cap)
        if self.n_vertices > limit:
            raise ResourceLimitError(
                f"H({self.D},{self.q}) has {self.n_vertices} vertices, above the materialization "
                f"cap {limit}; use the matrix-free path or raise --cap / {MATERIALIZE_CAP_ENV}"
            )

    @cached_property
    def coordinates(self) -> np.ndarray:
        """(q^D, D) integer array of all vertices in lexicographic order."""
        return np.array(list(self.vertices()), dtype=np.int64).reshape(self.n_vertices, self.D)

    @cached_property
    def base_distances(self) -> np.ndarray:
        return np.count_nonzero(self.coordinates, axis=1)

    @cached_property
    def distance_table(self) -> np.ndarray:
        coords = self.coordinates
        return (coords[:, None, :] != coords[None, :, :]).sum(axis=2)


def _check_vertex(x: Sequence[int], D: int, q: Optional[int]) -> None:
    if len(x) != D:
        raise DomainError(f"Vertex {tuple(x)} does not have {D} coordinates")
    for c in x:
        if isinstance(c, bool) or not isinstance(c, (int, np.integer)) or c < 0 or (q is not None and c >= q):
            bound = f"0..{q - 1}" if q is not None else "a non-negative integer"
            raise DomainError(f"Coordinate {c!r} of {tuple(x)} is not in {bound}")


def hamming_distance(x: Sequence[int], y: Sequence[int], q: Optional[int] = None) -> int:
    """Number of coordinates where x and y differ."""
    _check_vertex(x, len(x), q)
    _check_vertex(y, len(x), q)
    return sum(1 for a, b in zip(x, y) if a != b)


def _matrix_from_int_array(values: np.ndarray, den: int = 1) -> Matrix:
    rows, cols = values.shape
    cache = {}

    def frac(v: int) -> Fraction:
        if v not in cache:
            cache[v] = Fraction(v, den) if v else ZERO
        return cache[v]

    return Matrix(rows, cols, tuple(frac(int(v)) for v in values.reshape(-1)))


def _complete_graph(q: int) -> Matrix:
    return Matrix.all_ones(q) - Matrix.identity(q)


def _recursive(base: Matrix, D: int) -> Matrix:
    """M(D) = M(D-1) x I + I(D-1) x M(1) with M(1) = base."""
    q = base.rows
    current = base
    for level in range(2, D + 1):
        current = kron(current, Matrix.identity(q)) + kron(Matrix.identity(q ** (level - 1)), base)
    return current


def _require_equal(first: Matrix, second: Matrix, what: str) -> None:
    if first != second:
        witness = next(
            ((i, j) for i in range(first.rows) for j in range(first.cols) if first[i, j] != second[i, j]),
            None,
        )
        raise ConsistencyError(f"Two constructions of {what} disagree at entry {witness}")


# -- adjacency -------------------------------------------------------------------

def adjacency_direct(g: HammingGraph) -> Matrix:
    return _matrix_from_int_array((g.distance_table == 1).astype(np.int64))


def adjacency_recursive(g: HammingGraph) -> Matrix:
    return _recursive(_complete_graph(g.q), g.D)


def adjacency_operator(g: HammingGraph) -> KronSumOperator:
    """Matrix-free A(D) as the Kronecker sum of D copies of J - I."""
    return KronSumOperator(tuple(_complete_graph(g.q) for _ in range(g.D)))


def dual_adjacency_operator(g: HammingGraph) -> KronSumOperator:
    return KronSumOperator(tuple(_dual_adjacency_base(g.q) for _ in range(g.D)))


def adjacency(g: HammingGraph, cap: Optional[int] = None) -> Matrix:
    """A(D) from distances, cross-checked against the tensor recursion."""
    g.require_materializable(cap)
    direct = adjacency_direct(g)
    _require_equal(direct, adjacency_recursive(g), f"A({g.D}) for q={g.q}")
    logger.debug(f"Adjacency of H({g.D},{g.q}) agrees with the recursion")
    return direct


# -- distance matrices -------------------------------------------------------------

def distance_matrices(g: HammingGraph, cap: Optional[int] = None) -> List[Matrix]:
    """A_0, ..., A_D with (A_i)_xy = 1 iff the distance from x to y is i."""
    g.require_materializable(cap)
    table = g.distance_table
    return [_matrix_from_int_array((table == i).astype(np.int64)) for i in range(g.D + 1)]


# -- dual adjacency ------------------------------------------------------------------

def _dual_adjacency_base(q: int) -> Matrix:
    return Matrix.diagonal([q - 1] + [-1] * (q - 1))


def dual_adjacency_direct(g: HammingGraph) -> Matrix:
    return Matrix.diagonal([g.theta_star(int(d)) for d in g.base_distances])


def dual_adjacency_recursive(g: HammingGraph) -> Matrix:
    return _recursive(_dual_adjacency_base(g.q), g.D)


def dual_adjacency_from_idempotent(g: HammingGraph, e1: Matrix) -> Matrix:
    """A*_yy = |X| (E_1)_{base, y}."""
    size = g.n_vertices
    base = g.vertex_index(g.base_vertex)
    return Matrix.diagonal([size * e1[base, y] for y in range(size)])


def dual_adjacency(g: HammingGraph, cap: Optional[int] = None,
                   idempotent_one: Optional[Matrix] = None) -> Matrix:
    """A*(D) from the distance formula, checked against the recursion and against E_1."""
    g.require_materializable(cap)
    direct = dual_adjacency_direct(g)
    _require_equal(direct, dual_adjacency_recursive(g), f"A*({g.D}) via recursion, q={g.q}")
    if idempotent_one is None:
        idempotent_one = idempotents_direct(g)[1]
    _require_equal(direct, dual_adjacency_from_idempotent(g, idempotent_one),
                   f"A*({g.D}) via E_1, q={g.q}")
    return direct


# -- primitive idempotents -------------------------------------------------------------

def idempotents_recursive(g: HammingGraph) -> List[Matrix]:
    """E_i(D) = E_i(D-1) x E_0 + E_(i-1)(D-1) x E_1 from E_0(1) = J/q, E_1(1) = I - J/q."""
    q = g.q
    e0 = Matrix.all_ones(q).scale(Fraction(1, q))
    e1 = Matrix.identity(q) - e0
    current = [e0, e1]
    for level in range(2, g.D + 1):
        size = q ** (level - 1)
        zero = Matrix.zeros(size)
        nxt = []
        for i in range(level + 1):
            left = current[i] if i < len(current) else zero
            right = current[i - 1] if i >= 1 else zero
            nxt.append(kron(left, e0) + kron(right, e1))
        current = nxt
    return current


def idempotents_direct(g: HammingGraph) -> List[Matrix]:
    """(E_i)_xy = q^-D K_i(distance(x, y)) from the Krawtchouk values."""
    table = g.distance_table
    den = g.n_vertices
    out = []
    for i in range(g.D + 1):
        values = np.array([g.krawtchouk(i, j) for j in range(g.D + 1)], dtype=object)
        out.append(_matrix_from_int_array(values[table], den))
    return out


def idempotents(g: HammingGraph, cap: Optional[int] = None) -> List[Matrix]:
    g.require_materializable(cap)
    direct = idempotents_direct(g)
    for i, recursed in enumerate(idempotents_recursive(g)):
        _require_equal(direct[i], recursed, f"E_{i}({g.D}) for q={g.q}")
    return direct


# -- dual idempotents ------------------------------------------------------------------

def dual_idempotents_direct(g: HammingGraph) -> List[Matrix]:
    distances = g.base_distances
    return [Matrix.diagonal([ONE if d == i else ZERO for d in distances]) for i in range(g.D + 1)]


def dual_idempotents_recursive(g: HammingGraph) -> List[Matrix]:
    q = g.q
    s0 = Matrix.diagonal([1] + [0] * (q - 1))
    s1 = Matrix.identity(q) - s0
    current = [s0, s1]
    for level in range(2, g.D + 1):
        zero = Matrix.zeros(q ** (level - 1))
        nxt = []
        for i in range(level + 1):
            left = current[i] if i < len(current) else zero
            right = current[i - 1] if i >= 1 else zero
            nxt.append(kron(left, s0) + kron(right, s1))
        current = nxt
    return current


def dual_idempotents(g: HammingGraph, cap: Optional[int] = None) -> List[Matrix]:
    g.require_materializable(cap)
    direct = dual_idempotents_direct(g)
    for i, recursed in enumerate(dual_idempotents_recursive(g)):
        _require_equal(direct[i], recursed, f"E*_{i}({g.D}) for q={g.q}")
    return direct


# -- the whole scheme --------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeMatrices:
    graph: HammingGraph
    adjacency: Matrix
    dual_adjacency: Matrix
    distance_matrices: Tuple[Matrix, ...]
    idempotents: Tuple[Matrix, ...]
    dual_idempotents: Tuple[Matrix, ...]


def build_scheme(g: HammingGraph, cap: Optional[int] = None) -> SchemeMatrices:
    """Build and cross-check every scheme matrix of H(D, q)."""
    g.require_materializable(cap)
    logger.info(f"Building scheme matrices of H({g.D},{g.q}) on {g.n_vertices} vertices")
    e = idempotents(g, cap)
    return SchemeMatrices(
        graph=g,
        adjacency=adjacency(g, cap),
        dual_adjacency=dual_adjacency(g, cap, idempotent_one=e[1]),
        distance_matrices=tuple(distance_matrices(g, cap)),
        idempotents=tuple(e),
        dual_idempotents=tuple(dual_idempotents(g, cap)),
    )


# -- intersection numbers ------------------------------------------------------------------

@dataclass
class IntersectionNumbers:
    D: int
    q: int
    a: Tuple[int, ...]
    b: Tuple[int, ...]
    c: Tuple[int, ...]
    report: CheckReport = field(repr=False)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"i": range(self.D + 1), "a": self.a, "b": self.b, "c": self.c})


def intersection_numbers(g: HammingGraph, cap: Optional[int] = None) -> IntersectionNumbers:
    """a_i, b_i, c_i by formula, confirmed by counting over every vertex pair.

    For a pair (x, y) at distance i, c_i, a_i and b_i are the numbers of neighbours
    of y at distance i-1, i and i+1 from x.
    """
    g.require_materializable(cap)
    D = g.D
    table = g.distance_table
    neighbours = (table == 1).astype(np.int64)
    shell_counts = [(table == j).astype(np.int64) @ neighbours for j in range(D + 1)]
    report = CheckReport(name=f"intersection numbers H({D},{g.q})")

    def counted(j: int, mask: np.ndarray) -> np.ndarray:
        if 0 <= j <= D:
            return shell_counts[j][mask]
        return np.zeros(int(mask.sum()), dtype=np.int64)

    for i in range(D + 1):
        mask = table == i
        for name, j, expected in (("c", i - 1, g.c(i)), ("a", i, g.a(i)), ("b", i + 1, g.b(i))):
            values = counted(j, mask)
            ok = bool(np.all(values == expected))
            report.record(ok, f"{name}_{i}", "" if ok else f"expected {expected}, counted {sorted(set(values.tolist()))}")

    return IntersectionNumbers(
        D=D, q=g.q,
        a=tuple(g.a(i) for i in range(D + 1)),
        b=tuple(g.b(i) for i in range(D + 1)),
        c=tuple(g.c(i) for i in range(D + 1)),
        report=report,
    )


# -- verification suites --------------------------------------------------------------------

def _first_difference(left: Matrix, right: Matrix) -> str:
    for idx, (x, y) in enumerate(zip(left.entries, right.entries)):
        if x != y:
            i, j = divmod(idx, left.cols)
            return f"entry ({i},{j}): {format_rational(x)} != {format_rational(y)}"
    return ""


def q_polynomial_check(g: HammingGraph, e: Optional[Sequence[Matrix]] = None) -> CheckReport:
    """E_1 o E_i = q^-D (b*_(i-1) E_(i-1) + a*_i E_i + c*_(i+1) E_(i+1)) for every i.

    Terms whose index falls outside 0..D are taken to be zero.
    """
    if e is None:
        e = idempotents(g)
    D = g.D
    scale = Fraction(1, g.n_vertices)
    report = CheckReport(name=f"Q-polynomial H({D},{g.q})")
    zero = Matrix.zeros(g.n_vertices)
    for i in range(D + 1):
        lhs = e[1].hadamard(e[i])
        rhs = e[i].scale(g.a_star(i))
        if i >= 1:
            rhs = rhs + e[i - 1].scale(g.b_star(i - 1))
        if i + 1 <= D:
            rhs = rhs + e[i + 1].scale(g.c_star(i + 1))
        rhs = rhs.scale(scale) if not rhs.is_zero() else zero
        ok = lhs == rhs
        report.details[f"i={i}"] = ok
        report.record(ok, f"i={i}", "" if ok else _first_difference(lhs, rhs))
    return report


def distance_recurrence_check(g: HammingGraph, distances: Optional[Sequence[Matrix]] = None) -> CheckReport:
    """A A_i = b_(i-1) A_(i-1) + a_i A_i + c_(i+1) A_(i+1), and the A_i sum to J."""
    if distances is None:
        distances = distance_matrices(g)
    D = g.D
    a1 = distances[1]
    report = CheckReport(name=f"distance recurrence H({D},{g.q})")
    for i in range(D + 1):
        lhs = mat_mul(a1, distances[i])
        rhs = distances[i].scale(g.a(i))
        if i >= 1:
            rhs = rhs + distances[i - 1].scale(g.b(i - 1))
        if i + 1 <= D:
            rhs = rhs + distances[i + 1].scale(g.c(i + 1))
        report.record(lhs == rhs, f"i={i}", _first_difference(lhs, rhs))
    total = distances[0]
    for m in distances[1:]:
        total = total + m
    all_ones = Matrix.all_ones(g.n_vertices)
    report.record(total == all_ones, "sum of A_i", _first_difference(total, all_ones))
    return report


def scheme_identity_check(scheme: SchemeMatrices) -> CheckReport:
    """Eigenvalue equations, orthogonality and resolutions of the identity for E_i and E*_i."""
    g = scheme.graph
    n = g.n_vertices
    identity = Matrix.identity(n)
    report = CheckReport(name=f"idempotents H({g.D},{g.q})")

    thetas = [g.theta(i) for i in range(g.D + 1)]
    report.record(len(set(thetas)) == len(thetas), "distinct eigenvalues", str(thetas))

    for label, family, generator, eigen in (
        ("E", scheme.idempotents, scheme.adjacency, g.theta),
        ("E*", scheme.dual_idempotents, scheme.dual_adjacency, g.theta_star),
    ):
        total = Matrix.zeros(n)
        for i, ei in enumerate(family):
            total = total + ei
            shifted = generator.shift(-eigen(i))
            residual = mat_mul(shifted, ei)
            report.record(residual.is_zero(), f"({label}) eigenvalue on {label}_{i}",
                          "" if residual.is_zero() else f"theta={eigen(i)}")
            for j in range(i, len(family)):
                prod_ij = mat_mul(ei, family[j])
                expected = ei if i == j else Matrix.zeros(n)
                report.record(prod_ij == expected, f"{label}_{i} {label}_{j}", _first_difference(prod_ij, expected))
        report.record(total == identity, f"sum of {label}_i", _first_difference(total, identity))
    return report


def idempotent_rank_check(g: HammingGraph, e: Optional[Sequence[Matrix]] = None) -> CheckReport:
    """rank E_i(D) = C(D, i)(q-1)^i."""
    if e is None:
        e = idempotents(g)
    report = CheckReport(name=f"idempotent ranks H({g.D},{g.q})")
    for i, ei in enumerate(e):
        got, expected = rank(ei), g.shell_size(i)
        report.details[f"rank E_{i}"] = got
        report.record(got == expected, f"rank E_{i}", f"{got} != {expected}")
    return report


def verify_adjacency_matvec(D: int, q: int, samples: int = 10, seed: int = 0) -> CheckReport:
    """Apply A(D) matrix-free to random 0/1 vectors and compare with summing over neighbours.

    No q^D x q^D matrix is formed; memory stays proportional to q^D. The first sample
    goes through the exact kron_apply, the rest through the integer kernel.
    """
    g = HammingGraph(D, q)
    operator = adjacency_operator(g)
    rng = np.random.default_rng(seed)
    report = CheckReport(name=f"matrix-free adjacency H({D},{q})")
    shape = (q,) * D
    for sample in range(samples):
        x = rng.integers(0, 2, size=g.n_vertices, dtype=np.int64)
        if sample == 0:
            exact = kron_apply(operator, x.tolist())
            den = 1 if all(v.denominator == 1 for v in exact) else 0
            got = [v.numerator for v in exact]
        else:
            den, got = operator.apply_integral(x)
        tensor = x.reshape(shape)
        expected = np.zeros(shape, dtype=np.int64)
        for axis in range(D):
            for shift in range(1, q):
                expected += np.roll(tensor, shift, axis=axis)
        got = np.asarray(got, dtype=np.int64)
        ok = den == 1 and np.array_equal(got, expected.reshape(-1))
        witness = ""
        if not ok:
            bad = int(np.flatnonzero(got != expected.reshape(-1))[0])
            witness = f"sample {sample}, vertex {bad}"
        report.record(ok, f"sample {sample}", witness)
    report.details["exact samples"] = min(samples, 1)
    logger.info(f"Matrix-free adjacency check on {g.n_vertices} vertices: {report.checked} samples")
    return report
