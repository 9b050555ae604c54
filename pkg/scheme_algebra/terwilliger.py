"""
Decomposition of the standard module V(D) of H(D, q) under the Terwilliger algebra.

Outline:
1) Split each tensor factor V = C^q as V0 + V1 (V0 spanned by differences of
   consecutive nonzero letters, V1 by the base letter and the sum of the others);
   V(D) is then the direct sum of the 2^D blocks V_s(D), s in {0,1}^D.
2) On each block, A -> A(D)/q + (D/q - p/2) and B -> A*(D)/q + (D/q - p/2) define a
   K_omega-module with omega = 1 - 2/q. The triple is computed from A(D), A*(D)
   directly and again as a tensor product of the one-factor modules; both must agree.
3) Pull each block back to U(sl2), extract highest-weight copies, and read off the
   irreducible T(D)-modules: a copy of L_(p-2k) in a block with sum(s) = p is the
   module labelled (p, k).
4) Verify multiplicities, matrix forms in both gauges, invariance, completeness,
   endpoints and diameters against the scheme matrices.

Nothing here forms a q^D x q^D matrix except the scheme matrices used for the
endpoint checks and the word closure, and those respect the materialization cap.
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from itertools import product
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from scheme_algebra.cgengine import isotypic_decompose
from scheme_algebra.errors import ConsistencyError, DomainError, ResourceLimitError
from scheme_algebra.exactlin import (
    KRON_PRODUCT,
    ZERO,
    KronSumOperator,
    Matrix,
    SpanAccumulator,
    Vector,
    inverse,
    kron_apply,
    linear_combination,
    mat_mul,
    solve,
)
from scheme_algebra.hamming import (
    HammingGraph,
    SchemeMatrices,
    adjacency,
    adjacency_operator,
    build_scheme,
    dual_adjacency,
    dual_adjacency_operator,
    get_materialize_cap,
)
from scheme_algebra.krawtchouk import (
    RepTriple,
    intertwiner,
    k_module,
    k_module_twisted,
    relation_check,
    tensor_rep,
    zeta_inverse_apply,
)
from scheme_algebra.reports import CheckReport

# Set up logger
logger = logging.getLogger(__name__)

GAUGE_A_TRIDIAGONAL = "A-tridiagonal"
GAUGE_A_DIAGONAL = "A-diagonal"
GAUGES = (GAUGE_A_TRIDIAGONAL, GAUGE_A_DIAGONAL)

# above this many vertices completeness is argued block by block instead of by one rank
DIRECT_RANK_LIMIT = 256
WORD_CLOSURE_MAX_ROUNDS = 30

Label = Tuple[int, int]


# -- labels and formulas ---------------------------------------------------------------

def _check_pk(D: int, p: int, k: int) -> None:
    if not 0 <= p <= D or not 0 <= k <= p // 2:
        raise DomainError(f"(p, k) = ({p}, {k}) is not a module label for D = {D}")


def _check_dr(D: int, d: int, r: int) -> None:
    if not 0 <= d <= D or not -(-(D - d) // 2) <= r <= D - d:
        raise DomainError(f"(d, r) = ({d}, {r}) is not a module label for D = {D}")


def pk_to_dr(D: int, p: int, k: int) -> Tuple[int, int]:
    _check_pk(D, p, k)
    return p - 2 * k, D + k - p


def dr_to_pk(D: int, d: int, r: int) -> Tuple[int, int]:
    _check_dr(D, d, r)
    return 2 * D - d - 2 * r, D - d - r


def label_classes(D: int) -> List[Label]:
    """All (p, k) labels, ordered by descending d = p - 2k, then ascending r = D + k - p."""
    labels = [(p, k) for p in range(D + 1) for k in range(p // 2 + 1)]
    return sorted(labels, key=lambda pk: (-(pk[0] - 2 * pk[1]), D + pk[1] - pk[0]))


def multiplicity(D: int, p: int, k: int, q: int) -> int:
    """(p-2k+1)/(p-k+1) C(D,p) C(p,k) (q-2)^(D-p)."""
    _check_pk(D, p, k)
    value = Fraction(p - 2 * k + 1, p - k + 1) * comb(D, p) * comb(p, k) * (q - 2) ** (D - p)
    if value.denominator != 1:
        raise ConsistencyError(f"Non-integral multiplicity {value} for D={D}, (p,k)=({p},{k})")
    return value.numerator


def multiplicity_dr(D: int, d: int, r: int, q: int) -> int:
    """(d+1)/(D-r+1) C(D, 2D-d-2r) C(2D-d-2r, D-d-r) (q-2)^(d-D+2r), checked against the (p,k) form."""
    _check_dr(D, d, r)
    p = 2 * D - d - 2 * r
    value = (Fraction(d + 1, D - r + 1) * comb(D, p) * comb(p, D - d - r)
             * Fraction(q - 2) ** (d - D + 2 * r))
    p_, k_ = dr_to_pk(D, d, r)
    if value != multiplicity(D, p_, k_, q):
        raise ConsistencyError(f"(d,r) and (p,k) multiplicity formulas disagree at (d,r)=({d},{r})")
    return value.numerator


def _tridiagonal(diagonal: Sequence[int], lower: Sequence[int], upper: Sequence[int]) -> Matrix:
    size = len(diagonal)
    entries = [ZERO] * (size * size)
    for i in range(size):
        entries[i * size + i] = Fraction(diagonal[i])
        if i + 1 < size:
            entries[(i + 1) * size + i] = Fraction(lower[i])
        if i >= 1:
            entries[(i - 1) * size + i] = Fraction(upper[i])
    return Matrix(size, size, tuple(entries))


def _pk_forms(p: int, k: int, D: int, q: int) -> Tuple[Matrix, Matrix]:
    n = p - 2 * k
    alpha = [(q - 2) * (i + k) + p - D for i in range(n + 1)]
    beta = [i + 1 for i in range(n + 1)]
    gamma = [(q - 1) * (p - i - 2 * k + 1) for i in range(n + 1)]
    theta = [q * (p - i - k) - D for i in range(n + 1)]
    return _tridiagonal(alpha, beta, gamma), Matrix.diagonal(theta)


def _dr_forms(d: int, r: int, D: int, q: int) -> Tuple[Matrix, Matrix]:
    alpha = [(D - d + i - r) * (q - 1) - i - r for i in range(d + 1)]
    beta = [i + 1 for i in range(d + 1)]
    gamma = [(q - 1) * (d - i + 1) for i in range(d + 1)]
    theta = [D * (q - 1) - q * (i + r) for i in range(d + 1)]
    return _tridiagonal(alpha, beta, gamma), Matrix.diagonal(theta)


def module_matrices(p: int, k: int, D: int, q: int, gauge: str = GAUGE_A_TRIDIAGONAL) -> Tuple[Matrix, Matrix]:
    """Matrices of A(D) and A*(D) on the irreducible module labelled (p, k).

    Args:
        p, k: Module label, 0 <= k <= p/2 <= p <= D
        D, q: The Hamming graph
        gauge: GAUGE_A_TRIDIAGONAL (A tridiagonal, A* diagonal) or
            GAUGE_A_DIAGONAL (A diagonal, A* tridiagonal)

    Returns:
        (A matrix, A* matrix); the (d, r) formulas are evaluated too and must agree
    """
    _check_pk(D, p, k)
    if gauge not in GAUGES:
        raise DomainError(f"Unknown gauge {gauge!r}; expected one of {GAUGES}")
    tridiagonal, diagonal = _pk_forms(p, k, D, q)
    d, r = pk_to_dr(D, p, k)
    if (tridiagonal, diagonal) != _dr_forms(d, r, D, q):
        raise ConsistencyError(f"(p,k) and (d,r) matrix formulas disagree at (p,k)=({p},{k})")
    if gauge == GAUGE_A_TRIDIAGONAL:
        return tridiagonal, diagonal
    return diagonal, tridiagonal


# -- split basis and blocks ---------------------------------------------------------------

@dataclass(frozen=True)
class SplitBasis:
    """Basis of one factor C^q: V0 = {e_i - e_(i+1) : 1 <= i <= q-2}, then V1 = {e_0, e_1 + ... + e_(q-1)}."""

    q: int

    @cached_property
    def v0(self) -> Tuple[Tuple[int, ...], ...]:
        q = self.q
        return tuple(tuple(1 if j == i else -1 if j == i + 1 else 0 for j in range(q)) for i in range(1, q - 1))

    @cached_property
    def v1(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        q = self.q
        return (tuple(1 if j == 0 else 0 for j in range(q)), tuple(0 if j == 0 else 1 for j in range(q)))

    @property
    def vectors(self) -> Tuple[Tuple[int, ...], ...]:
        return self.v0 + self.v1

    def indices(self, s_k: int) -> range:
        """Positions of the V_(s_k) vectors inside the split basis."""
        return range(0, self.q - 2) if s_k == 0 else range(self.q - 2, self.q)

    @cached_property
    def matrix(self) -> Matrix:
        return Matrix.from_columns(self.vectors)

    @cached_property
    def inverse_matrix(self) -> Matrix:
        return inverse(self.matrix)


@lru_cache(maxsize=None)
def split_basis(q: int) -> SplitBasis:
    return SplitBasis(q)


def split_coordinates_operator(D: int, q: int) -> KronSumOperator:
    """Maps a vector of V(D) to its coordinates in the tensor split basis."""
    return KronSumOperator(tuple(split_basis(q).inverse_matrix for _ in range(D)), KRON_PRODUCT)


def block_indices(D: int, q: int, s: Sequence[int]) -> List[int]:
    """Split-coordinate positions spanning V_s(D), leftmost factor slowest."""
    split = split_basis(q)
    out = []
    for multi in product(*(split.indices(s_k) for s_k in s)):
        index = 0
        for j in multi:
            index = index * q + j
        out.append(index)
    return out


def _basis_vector(q: int, D: int, index: int) -> Vector:
    split = split_basis(q)
    multi = np.unravel_index(index, (q,) * D)
    factors = [np.array(split.vectors[int(j)], dtype=np.int64) for j in multi]
    values = reduce(np.multiply.outer, factors).reshape(-1)
    return tuple(Fraction(int(x)) if x else ZERO for x in values)


@dataclass(frozen=True)
class BlockRep:
    """One block V_s(D) with the K_omega-module structure r_s(D) in its stored basis.

    basis is empty when the block was built without V(D) coordinates.
    """

    D: int
    q: int
    s: Tuple[int, ...]
    basis: Tuple[Vector, ...]
    triple: RepTriple

    @property
    def p(self) -> int:
        return sum(self.s)

    @property
    def dim(self) -> int:
        return 2 ** self.p * (self.q - 2) ** (self.D - self.p)

    @property
    def has_coordinates(self) -> bool:
        return bool(self.basis)

    @property
    def shift(self) -> Fraction:
        return Fraction(self.D, self.q) - Fraction(self.p, 2)


@lru_cache(maxsize=None)
def factor_representation(q: int, s: int) -> RepTriple:
    """r_0 or r_1: the one-factor module on V0 or V1.

    On V1, in the basis (e_0, sum of e_i), A acts as [[0, q-1], [1, q-2]] and A* as
    diag(q-1, -1); on V0 both act as -1. The restriction of J - I and of the dual
    adjacency to the split basis is recomputed and must reproduce these.
    """
    if q < 3:
        raise DomainError(f"q must be at least 3, got {q}")
    if s not in (0, 1):
        raise DomainError(f"Block index must be 0 or 1, got {s}")
    split = split_basis(q)
    indices = list(split.indices(s))
    size = len(indices)
    if s == 0:
        adjacency_part = Matrix.identity(size).scale(-1)
        dual_part = Matrix.identity(size).scale(-1)
    else:
        adjacency_part = Matrix.from_rows([[0, q - 1], [1, q - 2]])
        dual_part = Matrix.diagonal([q - 1, -1])

    g = HammingGraph(1, q)
    for name, operator, expected in (
        ("A", adjacency(g), adjacency_part),
        ("A*", dual_adjacency(g), dual_part),
    ):
        in_split = mat_mul(split.inverse_matrix, mat_mul(operator, split.matrix))
        restricted = Matrix.from_rows([[in_split[i, j] for j in indices] for i in indices])
        leaks = any(in_split[i, j] for j in indices for i in range(q) if i not in indices)
        if leaks or restricted != expected:
            raise ConsistencyError(f"{name} restricted to V{s} does not match its explicit form (q={q})")

    shift = Fraction(1, q) - Fraction(s, 2)
    A = adjacency_part.scale(Fraction(1, q)).shift(shift)
    B = dual_part.scale(Fraction(1, q)).shift(shift)
    return RepTriple.from_generators(A, B, 1 - Fraction(2, q))


def _tensor_triple(q: int, s: Sequence[int]) -> RepTriple:
    factors = [factor_representation(q, s_k) for s_k in s]
    return reduce(tensor_rep, factors)


def _direct_triple(D: int, q: int, s: Sequence[int], basis: Sequence[Vector]) -> RepTriple:
    """r_s(D) from A(D) and A*(D) applied matrix-free to the block basis."""
    g = HammingGraph(D, q)
    to_split = split_coordinates_operator(D, q)
    indices = block_indices(D, q, s)
    inside = set(indices)
    columns = {"A": [], "A*": []}
    for b in basis:
        for name, operator in (("A", adjacency_operator(g)), ("A*", dual_adjacency_operator(g))):
            coords = kron_apply(to_split, kron_apply(operator, b))
            if any(x for i, x in enumerate(coords) if x and i not in inside):
                raise ConsistencyError(f"{name}({D}) does not preserve V_s(D) for s={tuple(s)}")
            columns[name].append([coords[i] for i in indices])
    shift = Fraction(D, q) - Fraction(sum(s), 2)
    A = Matrix.from_columns(columns["A"]).scale(Fraction(1, q)).shift(shift)
    B = Matrix.from_columns(columns["A*"]).scale(Fraction(1, q)).shift(shift)
    return RepTriple.from_generators(A, B, g.omega)


def _block_triple(D: int, q: int, s: Tuple[int, ...], basis: Sequence[Vector]) -> RepTriple:
    tensor = _tensor_triple(q, s)
    if basis:
        direct = _direct_triple(D, q, s, basis)
        if direct != tensor:
            raise ConsistencyError(f"Direct and tensor constructions of r_s(D) disagree for s={s}")
    report = relation_check(tensor)
    if not report.passed:
        raise ConsistencyError(f"r_s(D) for s={s} is not a K_omega-module: {report.first_failure}")
    return tensor


def rs_representation(block: BlockRep) -> RepTriple:
    """r_s(D) on the block, computed from the tensor construction and, when the block has
    V(D) coordinates, also from A(D) and A*(D) directly; the two must coincide."""
    return _block_triple(block.D, block.q, block.s, block.basis)


def make_block(D: int, q: int, s: Sequence[int], coordinates: bool = True) -> BlockRep:
    s = tuple(int(x) for x in s)
    if len(s) != D or any(x not in (0, 1) for x in s):
        raise DomainError(f"Block index {s} is not a 0/1 tuple of length {D}")
    basis = tuple(_basis_vector(q, D, i) for i in block_indices(D, q, s)) if coordinates else ()
    return BlockRep(D=D, q=q, s=s, basis=basis, triple=_block_triple(D, q, s, basis))


def split_standard_module(D: int, q: int, coordinates: bool = True) -> List[BlockRep]:
    """The 2^D blocks V_s(D), s in lexicographic order."""
    HammingGraph(D, q)
    return [make_block(D, q, s, coordinates) for s in product((0, 1), repeat=D)]


# -- per-block decomposition ---------------------------------------------------------------

@dataclass
class ExtractedCopy:
    """One irreducible T(D)-submodule found inside a block.

    block_basis is the U(sl2)-normalized basis v_0..v_n in block coordinates; basis and
    twisted_basis are the same module in V(D) coordinates in the A-tridiagonal and
    A-diagonal gauges (empty without coordinates). restricted maps each gauge to the
    matrices of (A(D), A*(D)) in that basis.
    """

    p: int
    k: int
    s: Tuple[int, ...]
    block_basis: Tuple[Vector, ...]
    restricted: Dict[str, Tuple[Matrix, Matrix]]
    basis: Tuple[Vector, ...] = ()
    twisted_basis: Tuple[Vector, ...] = ()
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def label(self) -> Label:
        return self.p, self.k

    @property
    def dim(self) -> int:
        return len(self.block_basis)


@dataclass
class BlockDecomposition:
    s: Tuple[int, ...]
    dim: int
    copies: List[ExtractedCopy]
    b_spectrum: Counter
    weight_spectrum: Counter


@lru_cache(maxsize=None)
def _twist_change(n: int, omega: Fraction) -> Matrix:
    """W with W twisted.A = k.A W: multiplying an A-tridiagonal basis on the right by W gives the twisted basis."""
    w = intertwiner(k_module_twisted(n, omega), k_module(n, omega))
    if w is None:
        raise ConsistencyError(f"No intertwiner between the two gauges of L{n} at omega={omega}")
    return w


def _restricted_matrices(A: Matrix, B: Matrix, U: Matrix, scale: Fraction, offset: Fraction
                         ) -> Optional[Tuple[Matrix, Matrix]]:
    """Matrices of scale*A + offset and scale*B + offset on the column span of U, or None if not invariant."""
    out = []
    for operator in (A, B):
        m = solve(U, mat_mul(operator, U))
        if m is None:
            return None
        out.append(m.scale(scale).shift(offset))
    return out[0], out[1]


def _restricted_in_vd(D: int, q: int, columns: Sequence[Vector]) -> Optional[Tuple[Matrix, Matrix]]:
    """Matrices of A(D) and A*(D) on span(columns), computed with the matrix-free operators."""
    g = HammingGraph(D, q)
    U = Matrix.from_columns(columns)
    out = []
    for operator in (adjacency_operator(g), dual_adjacency_operator(g)):
        image = Matrix.from_columns([kron_apply(operator, c) for c in columns])
        m = solve(U, image)
        if m is None:
            return None
        out.append(m)
    return out[0], out[1]


def decompose_block(D: int, q: int, s: Sequence[int], coordinates: bool = True) -> BlockDecomposition:
    """Split one block V_s(D) into irreducible T(D)-modules."""
    block = make_block(D, q, s, coordinates)
    omega = block.triple.omega
    p = block.p
    pieces = isotypic_decompose(zeta_inverse_apply(block.triple))
    # block operators are qA_r - qshift; restricted to a copy they are A(D), A*(D)
    to_scheme = (Fraction(q), -q * block.shift)
    copies: List[ExtractedCopy] = []
    weights = Counter()
    for piece in pieces:
        n = piece.label
        if (p - n) % 2 or not 0 <= (p - n) // 2 <= p // 2:
            raise ConsistencyError(f"Block s={block.s} contains L{n}, impossible for p={p}")
        k = (p - n) // 2
        for i in range(n + 1):
            weights[Fraction(n, 2) - i] += piece.multiplicity
        w = _twist_change(n, omega)
        expected = {gauge: module_matrices(p, k, D, q, gauge) for gauge in GAUGES}
        for chain in piece.basis_vectors:
            U = Matrix.from_columns(chain)
            restricted = {}
            checks = {}
            for gauge, frame in ((GAUGE_A_TRIDIAGONAL, U), (GAUGE_A_DIAGONAL, mat_mul(U, w))):
                found = _restricted_matrices(block.triple.A, block.triple.B, frame, *to_scheme)
                checks[f"block invariant ({gauge})"] = found is not None
                checks[f"block form ({gauge})"] = found == expected[gauge]
                if found is not None:
                    restricted[gauge] = found
            copy = ExtractedCopy(p=p, k=k, s=block.s, block_basis=tuple(chain), restricted=restricted, checks=checks)
            if coordinates:
                copy.basis = tuple(linear_combination(v, block.basis) for v in chain)
                copy.twisted_basis = tuple(mat_mul(Matrix.from_columns(copy.basis), w).columns())
                for gauge, columns in ((GAUGE_A_TRIDIAGONAL, copy.basis), (GAUGE_A_DIAGONAL, copy.twisted_basis)):
                    found = _restricted_in_vd(D, q, columns)
                    checks[f"invariant ({gauge})"] = found is not None
                    checks[f"matrix form ({gauge})"] = found == expected[gauge]
            copies.append(copy)
    b_spectrum = Counter(block.triple.B.diagonal_entries()) if block.triple.B.is_diagonal() else Counter()
    logger.debug(f"Block s={block.s}: dim {block.dim}, {len(copies)} irreducible copies")
    return BlockDecomposition(s=block.s, dim=block.dim, copies=copies, b_spectrum=b_spectrum, weight_spectrum=weights)


def _decompose_block_job(args: Tuple[int, int, Tuple[int, ...], bool]) -> BlockDecomposition:
    return decompose_block(*args)


# -- module invariants -----------------------------------------------------------------

@dataclass(frozen=True)
class ModuleInvariants:
    support: Tuple[int, ...]
    dual_support: Tuple[int, ...]

    @property
    def endpoint(self) -> int:
        return self.support[0]

    @property
    def dual_endpoint(self) -> int:
        return self.dual_support[0]

    @property
    def diameter(self) -> int:
        return len(self.support) - 1

    @property
    def dual_diameter(self) -> int:
        return len(self.dual_support) - 1

    def matches(self, D: int, p: int, k: int) -> bool:
        d, r = pk_to_dr(D, p, k)
        return (self.endpoint == self.dual_endpoint == r
                and self.diameter == self.dual_diameter == d
                and self.support == tuple(range(r, r + d + 1))
                and self.dual_support == self.support)


def module_invariants(basis: Sequence[Vector], scheme: SchemeMatrices) -> ModuleInvariants:
    """Support {i : E*_i W != 0} and dual support {i : E_i W != 0} of W = span(basis)."""
    if not basis:
        raise DomainError("Module invariants of the zero module are undefined")

    def touched(projectors: Sequence[Matrix]) -> Tuple[int, ...]:
        return tuple(i for i, e in enumerate(projectors) if any(any(e.apply(v)) for v in basis))

    return ModuleInvariants(support=touched(scheme.dual_idempotents), dual_support=touched(scheme.idempotents))


# -- the whole decomposition ------------------------------------------------------------

@dataclass(frozen=True)
class ModuleDescriptor:
    p: int
    k: int
    d: int
    r: int
    dimension: int
    multiplicity: int
    support: Tuple[int, ...]

    @classmethod
    def from_pk(cls, D: int, p: int, k: int, multiplicity_value: int) -> "ModuleDescriptor":
        d, r = pk_to_dr(D, p, k)
        return cls(p=p, k=k, d=d, r=r, dimension=d + 1, multiplicity=multiplicity_value,
                   support=tuple(range(r, r + d + 1)))


@dataclass
class DecompositionReport:
    D: int
    q: int
    descriptors: List[ModuleDescriptor]
    pieces: Dict[Label, List[ExtractedCopy]]
    checks: CheckReport
    class_checks: Dict[Label, Dict[str, bool]]
    has_coordinates: bool = True

    @property
    def total_dim(self) -> int:
        return sum(d.multiplicity * d.dimension for d in self.descriptors)

    @property
    def all_passed(self) -> bool:
        return self.checks.passed

    def descriptor(self, p: int, k: int) -> ModuleDescriptor:
        return next(d for d in self.descriptors if (d.p, d.k) == (p, k))


def decompose_standard_module(D: int, q: int, workers: int = 1, cap: Optional[int] = None,
                              coordinates: Optional[bool] = None, invariants: bool = True) -> DecompositionReport:
    """Decompose V(D) into irreducible T(D)-modules and verify every claim about them.

    Args:
        D, q: The Hamming graph
        workers: Process pool width for the per-block work (1 runs inline)
        cap: Materialization cap override
        coordinates: Carry V(D) coordinates for every copy; by default on when q^D is
            within the cap. Without coordinates only the block-level checks run.
        invariants: Compute endpoints and diameters from the scheme matrices

    Returns:
        DecompositionReport with descriptors in descending d, ascending r order
    """
    g = HammingGraph(D, q)
    limit = get_materialize_cap(cap)
    if coordinates is None:
        coordinates = g.n_vertices <= limit
    elif coordinates and g.n_vertices > limit:
        raise ResourceLimitError(
            f"H({D},{q}) has {g.n_vertices} vertices, above the materialization cap {limit}"
        )
    logger.info(f"Decomposing V({D}) for q={q}: {2 ** D} blocks, {g.n_vertices} dimensions")

    jobs = [(D, q, s, coordinates) for s in product((0, 1), repeat=D)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_decompose_block_job, jobs))
    else:
        blocks = []
        for idx, job in enumerate(jobs, 1):
            logger.debug(f"[{idx}/{len(jobs)}] Block s={job[2]}")
            blocks.append(_decompose_block_job(job))

    report = CheckReport(name=f"decomposition H({D},{q})")
    pieces: Dict[Label, List[ExtractedCopy]] = {label: [] for label in label_classes(D)}
    for block in blocks:
        for copy in block.copies:
            pieces[copy.label].append(copy)
        report.record(block.b_spectrum == block.weight_spectrum, f"block shift s={block.s}",
                      "B spectrum differs from the weights of the extracted summands")

    class_checks: Dict[Label, Dict[str, bool]] = {}
    for label, copies in pieces.items():
        p, k = label
        expected = multiplicity(D, p, k, q)
        flags = {"multiplicity": len(copies) == expected}
        report.record(flags["multiplicity"], f"multiplicity of (p,k)={label}", f"{len(copies)} != {expected}")
        for name in sorted({name for c in copies for name in c.checks}):
            flags[name] = all(c.checks.get(name, False) for c in copies)
            report.record(flags[name], f"{name} for (p,k)={label}")
        class_checks[label] = flags

    descriptors = [ModuleDescriptor.from_pk(D, p, k, len(pieces[(p, k)])) for p, k in label_classes(D)]
    total = sum(d.multiplicity * d.dimension for d in descriptors)
    report.record(total == g.n_vertices, "dimension sum", f"{total} != {g.n_vertices}")

    block_dims = sum(b.dim for b in blocks)
    extracted = sum(c.dim for b in blocks for c in b.copies)
    report.record(block_dims == g.n_vertices == extracted, "block completeness",
                  f"blocks {block_dims}, extracted {extracted}, expected {g.n_vertices}")
    if coordinates and g.n_vertices <= DIRECT_RANK_LIMIT:
        span = SpanAccumulator(g.n_vertices)
        for b in blocks:
            for c in b.copies:
                for v in c.basis:
                    span.add(v)
        report.record(span.rank == g.n_vertices, "completeness in V(D)", f"rank {span.rank}")

    if coordinates and invariants:
        scheme = build_scheme(g, cap)
        for label, copies in pieces.items():
            ok = True
            for copy in copies:
                inv = module_invariants(copy.basis, scheme)
                good = inv.matches(D, *label)
                copy.checks["endpoints"] = good
                if not good:
                    logger.debug(f"(p,k)={label}: support {inv.support}, dual support {inv.dual_support}")
                ok = ok and good
            class_checks[label]["endpoints"] = ok
            report.record(ok, f"endpoints and diameters for (p,k)={label}")

    logger.info(f"Decomposition of V({D}), q={q}: {len(descriptors)} classes, "
                f"{'all checks passed' if report.passed else report.first_failure}")
    return DecompositionReport(D=D, q=q, descriptors=descriptors, pieces=pieces, checks=report,
                               class_checks=class_checks, has_coordinates=coordinates)


# -- classification, algebra dimension ------------------------------------------------------

def _k_triple(D: int, q: int, p: int, matrices: Tuple[Matrix, Matrix]) -> RepTriple:
    shift = Fraction(D, q) - Fraction(p, 2)
    A = matrices[0].scale(Fraction(1, q)).shift(shift)
    B = matrices[1].scale(Fraction(1, q)).shift(shift)
    return RepTriple.from_generators(A, B, 1 - Fraction(2, q))


def classify_pairwise(report: DecompositionReport) -> CheckReport:
    """Distinct labels give non-isomorphic modules, equal labels give isomorphic ones.

    Modules are told apart by (dimension, spectrum of A*); copies of one class are
    matched by an exact invertible intertwiner between the first copy in the
    A-tridiagonal gauge and each copy in the A-diagonal gauge.
    """
    D, q = report.D, report.q
    out = CheckReport(name=f"classification H({D},{q})")
    signatures: Dict[Tuple, Label] = {}
    for label, copies in report.pieces.items():
        if not copies:
            out.record(False, f"(p,k)={label}", "no extracted copy")
            continue
        first = copies[0]
        if GAUGE_A_TRIDIAGONAL not in first.restricted:
            out.record(False, f"(p,k)={label}", "first copy is not invariant")
            continue
        a_star = first.restricted[GAUGE_A_TRIDIAGONAL][1]
        signature = (first.dim, tuple(sorted(a_star.diagonal_entries())))
        clash = signatures.get(signature)
        out.record(clash is None, f"(p,k)={label} separated", f"same signature as {clash}")
        signatures[signature] = label

        reference = _k_triple(D, q, label[0], first.restricted[GAUGE_A_TRIDIAGONAL])
        for idx, copy in enumerate(copies):
            if GAUGE_A_DIAGONAL not in copy.restricted:
                out.record(False, f"(p,k)={label} copy {idx}", "not invariant")
                continue
            other = _k_triple(D, q, label[0], copy.restricted[GAUGE_A_DIAGONAL])
            out.record(intertwiner(reference, other) is not None, f"(p,k)={label} copy {idx} isomorphic")
    out.details["classes"] = len(signatures)
    return out


def algebra_dimension(D: int, q: int, cap: Optional[int] = None) -> int:
    """Dimension of the algebra generated by A(D) and A*(D), by word closure.

    Starting from {I, A, A*}, new basis elements are multiplied on the right by both
    generators until the span stops growing.
    """
    g = HammingGraph(D, q)
    try:
        g.require_materializable(cap)
    except ResourceLimitError as e:
        raise ResourceLimitError(
            f"{e}; for the formula-only count use wedderburn_blocks({D}) (verify --suite wedderburn)"
        ) from e
    generators = (adjacency(g, cap), dual_adjacency(g, cap))
    n = g.n_vertices
    span = SpanAccumulator(n * n)
    frontier = [m for m in (Matrix.identity(n),) + generators if span.add(m.entries)]
    for round_number in range(1, WORD_CLOSURE_MAX_ROUNDS + 1):
        grown = []
        for m in frontier:
            for gen in generators:
                word = mat_mul(m, gen)
                if span.add(word.entries):
                    grown.append(word)
        logger.debug(f"Word closure round {round_number}: dimension {span.rank}")
        if not grown:
            logger.info(f"dim T({D}) for q={q} is {span.rank}")
            return span.rank
        frontier = grown
    raise ConsistencyError(f"Word closure did not stabilize within {WORD_CLOSURE_MAX_ROUNDS} rounds")


@dataclass
class WedderburnSummary:
    D: int
    block_sizes: Dict[Label, int]
    blocks_by_diameter: Dict[int, int]
    report: CheckReport

    @property
    def dimension(self) -> int:
        return sum(size * size for size in self.block_sizes.values())


def wedderburn_blocks(D: int) -> WedderburnSummary:
    """Matrix block sizes of T(D): one block of size p-2k+1 per label.

    In (d, r) terms there are floor((D-d)/2) + 1 blocks of size d + 1, and the
    dimension is sum (p-2k+1)^2 = sum_p C(p+3, 3) = C(D+4, 4).
    """
    if D < 1:
        raise DomainError(f"D must be a positive integer, got {D}")
    sizes = {(p, k): p - 2 * k + 1 for p, k in label_classes(D)}
    by_diameter = Counter(size - 1 for size in sizes.values())
    report = CheckReport(name=f"Wedderburn structure D={D}")
    for d in range(D + 1):
        report.record(by_diameter[d] == (D - d) // 2 + 1, f"blocks of size {d + 1}",
                      f"{by_diameter[d]} != {(D - d) // 2 + 1}")
    squares = sum(size * size for size in sizes.values())
    report.record(squares == sum(comb(p + 3, 3) for p in range(D + 1)), "sum over p of C(p+3,3)")
    report.record(squares == comb(D + 4, 4), "C(D+4,4)", f"{squares} != {comb(D + 4, 4)}")
    return WedderburnSummary(D=D, block_sizes=sizes, blocks_by_diameter=dict(by_diameter), report=report)


def algebra_dimension_check(D: int, q: int, cap: Optional[int] = None) -> CheckReport:
    """Word-closure dimension against C(D+4, 4) and the Wedderburn block sizes."""
    report = CheckReport(name=f"dim T({D}) for q={q}")
    found = algebra_dimension(D, q, cap)
    wedderburn = wedderburn_blocks(D)
    report.details["dimension"] = found
    report.details["binomial"] = comb(D + 4, 4)
    report.record(found == comb(D + 4, 4), "C(D+4,4)", f"{found} != {comb(D + 4, 4)}")
    report.record(found == wedderburn.dimension, "sum of squared block sizes", f"{found} != {wedderburn.dimension}")
    report.merge(wedderburn.report)
    return report
