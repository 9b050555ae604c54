"""
Finite-dimensional representations of U(sl2) and of the Krawtchouk algebra K_omega.

K_omega is generated by A, B subject to

    A^2 B - 2ABA + BA^2 = B + omega A
    B^2 A - 2BAB + AB^2 = A + omega B

and C = [A, B]. A representation is carried around as a RepTriple (A, B, C, omega);
a U(sl2) representation as an Sl2Triple (E, F, H). Every module here is written in
the basis v_0..v_n with H v_i = (n - 2i) v_i, so matrices are deterministic.

zeta_apply / zeta_inverse_apply move a module between the two algebras; the
inverse needs omega^2 != 1.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from scheme_algebra.errors import DomainError, RelationError, ShapeError, SingularityError
from scheme_algebra.exactlin import (
    ZERO,
    Matrix,
    commutator,
    format_rational,
    is_invertible,
    kernel_basis,
    kron,
    mat_mul,
    to_fraction,
)
from scheme_algebra.reports import CheckReport

# Set up logger
logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction, str]


@dataclass(frozen=True)
class Sl2Triple:
    """Matrices of E, F, H; n is set when the triple is the irreducible module L_n."""

    E: Matrix
    F: Matrix
    H: Matrix
    n: Optional[int] = None

    @property
    def dim(self) -> int:
        return self.H.rows


@dataclass(frozen=True)
class RepTriple:
    """Matrices of A, B, C on a K_omega-module."""

    A: Matrix
    B: Matrix
    C: Matrix
    omega: Fraction

    @property
    def dim(self) -> int:
        return self.A.rows

    @classmethod
    def from_generators(cls, A: Matrix, B: Matrix, omega: Scalar) -> "RepTriple":
        return cls(A, B, commutator(A, B), to_fraction(omega))

    def __neg__(self) -> "RepTriple":
        return RepTriple(-self.A, -self.B, -self.C, self.omega)


def _square_same_size(*matrices: Matrix) -> int:
    size = matrices[0].rows
    for m in matrices:
        if not m.is_square or m.rows != size:
            raise ShapeError(f"Expected square {size}x{size} matrices, got {m.rows}x{m.cols}")
    return size


def _witness(lhs: Matrix, rhs: Matrix) -> str:
    for idx, (x, y) in enumerate(zip(lhs.entries, rhs.entries)):
        if x != y:
            i, j = divmod(idx, lhs.cols)
            return f"entry ({i},{j}): {format_rational(x)} != {format_rational(y)}"
    return ""


def _check(report: CheckReport, label: str, lhs: Matrix, rhs: Matrix) -> bool:
    ok = lhs == rhs
    return report.record(ok, label, "" if ok else _witness(lhs, rhs))


# -- U(sl2) ------------------------------------------------------------------------

def sl2_relation_check(t: Sl2Triple) -> CheckReport:
    """[H,E] = 2E, [H,F] = -2F, [E,F] = H."""
    _square_same_size(t.E, t.F, t.H)
    report = CheckReport(name="sl2 relations")
    _check(report, "[H,E]=2E", commutator(t.H, t.E), t.E.scale(2))
    _check(report, "[H,F]=-2F", commutator(t.H, t.F), t.F.scale(-2))
    _check(report, "[E,F]=H", commutator(t.E, t.F), t.H)
    return report


def u_sl2_module(n: int) -> Sl2Triple:
    """L_n: E v_i = (n-i+1) v_(i-1), F v_i = (i+1) v_(i+1), H v_i = (n-2i) v_i."""
    if n < 0:
        raise DomainError(f"Module label must be non-negative, got {n}")
    size = n + 1
    e = [ZERO] * (size * size)
    f = [ZERO] * (size * size)
    for i in range(size):
        if i >= 1:
            e[(i - 1) * size + i] = Fraction(n - i + 1)
        if i + 1 < size:
            f[(i + 1) * size + i] = Fraction(i + 1)
    triple = Sl2Triple(
        E=Matrix(size, size, tuple(e)),
        F=Matrix(size, size, tuple(f)),
        H=Matrix.diagonal([n - 2 * i for i in range(size)]),
        n=n,
    )
    report = sl2_relation_check(triple)
    if not report.passed:
        raise RelationError(f"L_{n} fails the sl2 relations: {report.first_failure}")
    return triple


def tensor_sl2(t1: Sl2Triple, t2: Sl2Triple) -> Sl2Triple:
    """X -> X x I + I x X on a tensor product of U(sl2)-modules."""
    i1, i2 = Matrix.identity(t1.dim), Matrix.identity(t2.dim)
    return Sl2Triple(
        E=kron(t1.E, i2) + kron(i1, t2.E),
        F=kron(t1.F, i2) + kron(i1, t2.F),
        H=kron(t1.H, i2) + kron(i1, t2.H),
    )


def tensor_power_sl2(t: Sl2Triple, p: int) -> Sl2Triple:
    if p < 1:
        raise DomainError(f"Tensor power must be at least 1, got {p}")
    result = t
    for _ in range(p - 1):
        result = tensor_sl2(result, t)
    return result


# -- K_omega -------------------------------------------------------------------------

def relation_check(r: RepTriple) -> CheckReport:
    """Both defining relations, C = [A,B], and the commutator forms [A,C] = B + wA, [C,B] = A + wB."""
    _square_same_size(r.A, r.B, r.C)
    A, B, C, w = r.A, r.B, r.C, r.omega
    report = CheckReport(name=f"K_omega relations (omega={format_rational(w)}, dim={r.dim})")

    AB, BA = mat_mul(A, B), mat_mul(B, A)
    r1 = mat_mul(A, AB) - mat_mul(AB, A).scale(2) + mat_mul(BA, A)
    r2 = mat_mul(B, BA) - mat_mul(BA, B).scale(2) + mat_mul(AB, B)
    _check(report, "A^2B-2ABA+BA^2=B+wA", r1, B + A.scale(w))
    _check(report, "B^2A-2BAB+AB^2=A+wB", r2, A + B.scale(w))
    _check(report, "C=[A,B]", C, AB - BA)
    _check(report, "[A,C]=B+wA", commutator(A, C), B + A.scale(w))
    _check(report, "[C,B]=A+wB", commutator(C, B), A + B.scale(w))
    return report


def _require_relations(r: RepTriple, what: str) -> None:
    report = relation_check(r)
    if not report.passed:
        raise RelationError(f"{what} fails the K_omega relations: {report.first_failure}")


def _tridiagonal(diagonal, lower, upper) -> Matrix:
    """Column i maps v_i to diagonal[i] v_i + lower[i] v_(i+1) + upper[i] v_(i-1)."""
    size = len(diagonal)
    entries = [ZERO] * (size * size)
    for i in range(size):
        entries[i * size + i] = diagonal[i]
        if i + 1 < size:
            entries[(i + 1) * size + i] = lower[i]
        if i >= 1:
            entries[(i - 1) * size + i] = upper[i]
    return Matrix(size, size, tuple(entries))


def _k_module_parameters(n: int, omega: Fraction):
    alpha = [Fraction(2 * i - n) * omega / 2 for i in range(n + 1)]
    beta = [Fraction(i + 1) * (1 - omega) / 2 for i in range(n + 1)]
    gamma = [Fraction(n - i + 1) * (1 + omega) / 2 for i in range(n + 1)]
    theta = [Fraction(n, 2) - i for i in range(n + 1)]
    return alpha, beta, gamma, theta


def k_module(n: int, omega: Scalar) -> RepTriple:
    """The (n+1)-dimensional K_omega-module with A tridiagonal and B diagonal.

    Args:
        n: Module label, dimension n + 1
        omega: Exact rational parameter

    Returns:
        RepTriple with A = tridiag(beta | alpha | gamma), B = diag(n/2 - i) and
        C = [A, B] (zero diagonal, beta below, -gamma above)
    """
    if n < 0:
        raise DomainError(f"Module label must be non-negative, got {n}")
    omega = to_fraction(omega)
    alpha, beta, gamma, theta = _k_module_parameters(n, omega)
    triple = RepTriple(
        A=_tridiagonal(alpha, beta, gamma),
        B=Matrix.diagonal(theta),
        C=_tridiagonal([ZERO] * (n + 1), beta, [-g for g in gamma]),
        omega=omega,
    )
    _require_relations(triple, f"k_module({n}, {format_rational(omega)})")
    return triple


def k_module_twisted(n: int, omega: Scalar) -> RepTriple:
    """The same module with the roles of A and B exchanged: A diagonal, B tridiagonal."""
    if n < 0:
        raise DomainError(f"Module label must be non-negative, got {n}")
    omega = to_fraction(omega)
    alpha, beta, gamma, theta = _k_module_parameters(n, omega)
    triple = RepTriple(
        A=Matrix.diagonal(theta),
        B=_tridiagonal(alpha, beta, gamma),
        C=_tridiagonal([ZERO] * (n + 1), [-b for b in beta], gamma),
        omega=omega,
    )
    _require_relations(triple, f"k_module_twisted({n}, {format_rational(omega)})")
    return triple


def zeta_apply(t: Sl2Triple, omega: Scalar, verify: bool = True) -> RepTriple:
    """Pull a U(sl2)-module back to K_omega.

    A -> ((1+w)/2)E + ((1-w)/2)F - (w/2)H,  B -> H/2,  C -> -((1+w)/2)E + ((1-w)/2)F
    """
    w = to_fraction(omega)
    plus, minus = (1 + w) / 2, (1 - w) / 2
    triple = RepTriple(
        A=t.E.scale(plus) + t.F.scale(minus) - t.H.scale(w / 2),
        B=t.H.scale(Fraction(1, 2)),
        C=t.F.scale(minus) - t.E.scale(plus),
        omega=w,
    )
    if verify:
        _require_relations(triple, "zeta image")
    return triple


def zeta_inverse_apply(r: RepTriple) -> Sl2Triple:
    """E = (A + wB - C)/(1+w), F = (A + wB + C)/(1-w), H = 2B; needs w^2 != 1."""
    w = r.omega
    if w * w == 1:
        raise SingularityError(f"zeta is not invertible at omega = {format_rational(w)}")
    shifted = r.A + r.B.scale(w)
    return Sl2Triple(
        E=(shifted - r.C).scale(1 / (1 + w)),
        F=(shifted + r.C).scale(1 / (1 - w)),
        H=r.B.scale(2),
    )


def swap_twist(r: RepTriple) -> RepTriple:
    """Twist by the automorphism A <-> B, C -> -C."""
    _require_relations(r, "swap_twist input")
    return RepTriple(A=r.B, B=r.A, C=-r.C, omega=r.omega)


def sign_flip(r: RepTriple) -> RepTriple:
    """K_omega-module (A, B, C) viewed as a K_(-omega)-module (A, -B, -C)."""
    return RepTriple(A=r.A, B=-r.B, C=-r.C, omega=-r.omega)


def tensor_rep(r1: RepTriple, r2: RepTriple) -> RepTriple:
    """Module structure on r1 x r2 through the comultiplication X -> X x 1 + 1 x X."""
    if r1.omega != r2.omega:
        raise DomainError(
            f"Cannot tensor modules with different omega ({format_rational(r1.omega)} "
            f"and {format_rational(r2.omega)})"
        )
    i1, i2 = Matrix.identity(r1.dim), Matrix.identity(r2.dim)
    return RepTriple(
        A=kron(r1.A, i2) + kron(i1, r2.A),
        B=kron(r1.B, i2) + kron(i1, r2.B),
        C=kron(r1.C, i2) + kron(i1, r2.C),
        omega=r1.omega,
    )


def counit_triple(omega: Scalar) -> RepTriple:
    """The trivial one-dimensional module: every generator acts as 0."""
    zero = Matrix.zeros(1)
    return RepTriple(zero, zero, zero, to_fraction(omega))


def one_dimensional_module(mu: Scalar, omega: Scalar) -> RepTriple:
    """A = [mu], B = [-omega mu].

    On one dimension the relations reduce to b = -omega a and a = omega^2 a, so a
    nonzero mu needs omega^2 = 1.
    """
    mu, omega = to_fraction(mu), to_fraction(omega)
    if mu and omega * omega != 1:
        raise DomainError(
            f"No one-dimensional module with A = {format_rational(mu)} at omega = {format_rational(omega)}"
        )
    return RepTriple(Matrix.diagonal([mu]), Matrix.diagonal([-omega * mu]), Matrix.zeros(1), omega)


def trace_identity_holds(r: RepTriple) -> bool:
    """tr B = -omega tr A, forced by the trace of the first relation (tr A = tr B at omega = -1)."""
    return r.B.trace() == -r.omega * r.A.trace()


def intertwiner(r1: RepTriple, r2: RepTriple) -> Optional[Matrix]:
    """An invertible X with X A1 = A2 X and X B1 = B2 X, or None.

    Solves the commutant equations exactly and returns the first kernel basis
    element that is invertible.
    """
    n = r1.dim
    if r2.dim != n:
        raise ShapeError(f"Intertwiner between modules of dimension {n} and {r2.dim}")
    if n == 0:
        return Matrix.zeros(0)
    # unknown X[a, b] sits at position a*n + b
    rows = []
    for left, right in ((r1.A, r2.A), (r1.B, r2.B)):
        for i in range(n):
            for j in range(n):
                row = [ZERO] * (n * n)
                for k in range(n):
                    coeff = left[k, j]
                    if coeff:
                        row[i * n + k] += coeff
                    coeff = right[i, k]
                    if coeff:
                        row[k * n + j] -= coeff
                rows.append(row)
    solutions = kernel_basis(Matrix.from_rows(rows))
    logger.debug(f"Commutant of dimension {len(solutions)} for modules of dimension {n}")
    for solution in solutions:
        candidate = Matrix(n, n, solution)
        if is_invertible(candidate):
            return candidate
    return None


def hopf_generator_checks(r: RepTriple) -> CheckReport:
    """Counit, antipode and coassociativity checked on one module.

    - the counit triple satisfies the relations
    - (-A, -B, -C) satisfies the relations with every product reversed
    - applying the antipode twice gives back (A, B, C)
    - (r x r) x r and r x (r x r) carry identical triples, and 1 x r equals r
    """
    report = CheckReport(name=f"Hopf structure (dim={r.dim})")
    report.merge(relation_check(counit_triple(r.omega)))

    A, B, C, w = -r.A, -r.B, -r.C, r.omega
    BA, AB = mat_mul(B, A), mat_mul(A, B)
    r1_op = mat_mul(BA, A) - mat_mul(A, BA).scale(2) + mat_mul(A, AB)
    r2_op = mat_mul(AB, B) - mat_mul(B, AB).scale(2) + mat_mul(B, BA)
    _check(report, "antipode relation 1 (reversed)", r1_op, B + A.scale(w))
    _check(report, "antipode relation 2 (reversed)", r2_op, A + B.scale(w))
    _check(report, "antipode C (reversed commutator)", C, BA - AB)

    twice = -(-r)
    report.record(twice == r, "antipode squared is the identity")

    left = tensor_rep(tensor_rep(r, r), r)
    right = tensor_rep(r, tensor_rep(r, r))
    report.record(left == right, "coassociativity")
    report.record(tensor_rep(counit_triple(r.omega), r) == r, "counit is a unit for the tensor product")
    return report


def is_irreducible_tridiagonal(m: Matrix) -> bool:
    """Tridiagonal with every sub- and superdiagonal entry nonzero."""
    if not m.is_square:
        return False
    if any(abs(i - j) > 1 for i, j, _ in m.nonzero_items()):
        return False
    return all(m[i + 1, i] and m[i, i + 1] for i in range(m.rows - 1))


def has_distinct_diagonal(m: Matrix) -> bool:
    values = m.diagonal_entries()
    return m.is_diagonal() and len(set(values)) == len(values)


def leonard_pair_check(r: RepTriple) -> CheckReport:
    """A, B act as a Leonard pair: tridiagonal/diagonal here, diagonal/tridiagonal in a second basis.

    The second basis comes from an intertwiner to k_module_twisted of the same dimension.
    """
    report = CheckReport(name=f"Leonard pair (dim={r.dim}, omega={format_rational(r.omega)})")
    if r.omega * r.omega == 1:
        raise DomainError("Leonard pair shape is only asserted for omega^2 != 1")
    report.record(is_irreducible_tridiagonal(r.A), "A irreducible tridiagonal")
    report.record(has_distinct_diagonal(r.B), "B diagonal with distinct entries")

    twisted = k_module_twisted(r.dim - 1, r.omega)
    x = intertwiner(twisted, r)
    if not report.record(x is not None, "isomorphic to the twisted module"):
        return report
    # x twisted.A = r.A x, so in the columns of x the operators act by the twisted matrices
    a_new, b_new = twisted.A, twisted.B
    report.record(mat_mul(r.A, x) == mat_mul(x, a_new), "A in the second basis")
    report.record(mat_mul(r.B, x) == mat_mul(x, b_new), "B in the second basis")
    report.record(has_distinct_diagonal(a_new), "A diagonal with distinct entries in the second basis")
    report.record(is_irreducible_tridiagonal(b_new), "B irreducible tridiagonal in the second basis")
    return report

