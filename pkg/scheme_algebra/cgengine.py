"""
Clebsch-Gordan decompositions for U(sl2)-modules.

cg_summands and tensor_power_multiplicity give the abstract answers;
isotypic_decompose finds the irreducible pieces of a concrete module by
highest-weight extraction: for each H-eigenvalue n >= 0 the vectors killed by E
seed copies of L_n, and F walks each seed down to the bottom with
v_(i+1) = F v_i / (i+1).
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Sequence, Tuple

from scheme_algebra.errors import ConsistencyError, DomainError
from scheme_algebra.exactlin import (
    Matrix,
    SpanAccumulator,
    Vector,
    echelon_basis,
    kernel_basis,
    mat_mul,
)
from scheme_algebra.krawtchouk import (
    Sl2Triple,
    k_module,
    sl2_relation_check,
    tensor_rep,
    zeta_inverse_apply,
)
from scheme_algebra.reports import CheckReport

# Set up logger
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CgSummandList:
    """Irreducible summands (label n, multiplicity) in descending label order."""

    summands: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        merged: Dict[int, int] = {}
        for label, multiplicity in self.summands:
            if label < 0 or multiplicity < 1:
                raise DomainError(f"Bad summand L{label} with multiplicity {multiplicity}")
            merged[label] = merged.get(label, 0) + multiplicity
        object.__setattr__(self, "summands", tuple(sorted(merged.items(), reverse=True)))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "CgSummandList":
        return cls(tuple((label, count) for label, count in Counter(labels).items()))

    @property
    def dimension(self) -> int:
        return sum(multiplicity * (label + 1) for label, multiplicity in self.summands)

    def multiplicity(self, label: int) -> int:
        return dict(self.summands).get(label, 0)

    def weights(self) -> Counter:
        """H-eigenvalues n, n-2, ..., -n of every summand, with multiplicity."""
        out = Counter()
        for label, multiplicity in self.summands:
            for i in range(label + 1):
                out[label - 2 * i] += multiplicity
        return out

    def __str__(self) -> str:
        if not self.summands:
            return "0"
        return " + ".join(
            f"L{label}" if multiplicity == 1 else f"{multiplicity}*L{label}"
            for label, multiplicity in self.summands
        )


@dataclass(frozen=True)
class IsotypicPiece:
    """All copies of L_label found in a module; each copy is its basis v_0..v_label."""

    label: int
    basis_vectors: Tuple[Tuple[Vector, ...], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.basis_vectors)


def cg_summands(m: int, n: int) -> CgSummandList:
    """L_m x L_n = L_(m+n) + L_(m+n-2) + ... + L_|m-n|."""
    if m < 0 or n < 0:
        raise DomainError(f"Module labels must be non-negative, got ({m}, {n})")
    return CgSummandList(tuple((m + n - 2 * p, 1) for p in range(min(m, n) + 1)))


def tensor_power_multiplicity(p: int, k: int) -> int:
    """Multiplicity of L_(p-2k) in the p-fold tensor power of L_1: (p-2k+1)/(p-k+1) C(p, k)."""
    if p < 1:
        raise DomainError(f"Tensor power must be at least 1, got {p}")
    if not 0 <= k <= p // 2:
        raise DomainError(f"k={k} outside 0..{p // 2} for p={p}")
    value = Fraction(p - 2 * k + 1, p - k + 1) * comb(p, k)
    if value.denominator != 1:
        raise ConsistencyError(f"Non-integral multiplicity {value} for p={p}, k={k}")
    return value.numerator


def tensor_power_summands(p: int) -> CgSummandList:
    return CgSummandList(tuple((p - 2 * k, tensor_power_multiplicity(p, k)) for k in range(p // 2 + 1)))


def k1p_recursion_holds(p: int, k: int) -> bool:
    """Tensoring with one more L_1 feeds L_(p-2k) from L_(p-1-2k) and L_(p+1-2k)."""
    if not 1 <= k <= p // 2:
        raise DomainError(f"k={k} outside 1..{p // 2} for p={p}")
    lhs = (Fraction(p - 2 * k, p - k) * comb(p - 1, k)
           + Fraction(p - 2 * k + 2, p - k + 1) * comb(p - 1, k - 1))
    return lhs == Fraction(p - 2 * k + 1, p - k + 1) * comb(p, k)


def h_eigenspaces(H: Matrix) -> Dict[int, List[Vector]]:
    """Integer eigenvalue -> eigenspace basis; raises DomainError unless H is diagonalizable over Z."""
    n = H.rows
    spaces: Dict[int, List[Vector]] = {}
    if H.is_diagonal():
        for idx, value in enumerate(H.diagonal_entries()):
            if value.denominator != 1:
                raise DomainError(f"H has non-integral eigenvalue {value}")
            unit = [Fraction(0)] * n
            unit[idx] = Fraction(1)
            spaces.setdefault(value.numerator, []).append(tuple(unit))
        return spaces
    total = 0
    for value in range(n - 1, -n, -1):
        basis = kernel_basis(H.shift(-value))
        if basis:
            spaces[value] = basis
            total += len(basis)
    if total != n:
        raise DomainError(f"H is not diagonalizable with integer spectrum ({total} of {n} eigenvectors)")
    return spaces


def isotypic_decompose(t: Sl2Triple, check_relations: bool = True) -> List[IsotypicPiece]:
    """Split a U(sl2)-module into copies of L_n, in descending n.

    Args:
        t: E, F, H acting on the ambient space
        check_relations: verify the sl2 relations before decomposing

    Returns:
        One IsotypicPiece per label present. Within a piece, copies are ordered by
        the leading position of their (reduced echelon) highest-weight vectors.
    """
    if check_relations:
        report = sl2_relation_check(t)
        if not report.passed:
            raise DomainError(f"Input is not a U(sl2)-module: {report.first_failure}")
    spaces = h_eigenspaces(t.H)
    span = SpanAccumulator(t.dim)
    pieces: List[IsotypicPiece] = []
    for weight in sorted((w for w in spaces if w >= 0), reverse=True):
        eigen = Matrix.from_columns(spaces[weight])
        coefficients = kernel_basis(mat_mul(t.E, eigen))
        if not coefficients:
            continue
        seeds = echelon_basis([eigen.apply(c) for c in coefficients])
        copies = []
        for seed in seeds:
            chain = [seed]
            for i in range(weight):
                image = t.F.apply(chain[-1])
                chain.append(tuple(x / (i + 1) for x in image))
            for v in chain:
                if not span.add(v):
                    raise ConsistencyError(f"Copy of L{weight} is not independent of earlier copies")
            copies.append(tuple(chain))
        logger.debug(f"L{weight}: {len(copies)} copies")
        pieces.append(IsotypicPiece(label=weight, basis_vectors=tuple(copies)))
    if span.rank != t.dim:
        raise ConsistencyError(f"Extracted copies span {span.rank} of {t.dim} dimensions")
    return pieces


def summands_of(pieces: Sequence[IsotypicPiece]) -> CgSummandList:
    return CgSummandList(tuple((p.label, p.multiplicity) for p in pieces))


def multiset_character_check(t: Sl2Triple, expected: CgSummandList) -> CheckReport:
    """Compare the H-spectrum, with multiplicity, against the weights of the expected summands."""
    report = CheckReport(name=f"character of {expected}")
    report.record(t.dim == expected.dimension, "dimension", f"{t.dim} != {expected.dimension}")
    try:
        spaces = h_eigenspaces(t.H)
    except DomainError as e:
        report.record(False, "H-spectrum", str(e))
        return report
    spectrum = Counter({value: len(basis) for value, basis in spaces.items()})
    wanted = expected.weights()
    ok = spectrum == wanted
    witness = ""
    if not ok:
        bad = min(set(spectrum) ^ set(wanted) or {w for w in spectrum if spectrum[w] != wanted[w]})
        witness = f"eigenvalue {bad}: {spectrum[bad]} != {wanted[bad]}"
    report.record(ok, "H-spectrum", witness)
    return report


def k_tensor_summands(m: int, n: int, omega) -> CgSummandList:
    """Decompose k_module(m) x k_module(n) for K_omega by pulling back to U(sl2)."""
    r = tensor_rep(k_module(m, omega), k_module(n, omega))
    return summands_of(isotypic_decompose(zeta_inverse_apply(r)))
