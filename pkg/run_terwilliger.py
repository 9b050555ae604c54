#!/usr/bin/env python3
"""
Build, decompose and verify the Terwilliger algebra of the Hamming graph H(D, q).

Commands:
1) matrix     - print a scheme matrix (A, A*, E_i, E*_i or A_i) in matrix text format
2) module     - print the K_omega (or U(sl2)) module matrices for a label n
3) cg         - Clebsch-Gordan summands of L_m x L_n, or of the p-th tensor power of L_1
4) decompose  - decompose the standard module and print the class table
5) verify     - run a verification suite; exit status 1 on the first failed check

All numbers are exact; rationals are read and written as num/den.
Exit status: 0 success, 1 verification failure or error, 2 usage error, 3 resource cap.
"""

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import List, Optional, Sequence

from scheme_algebra.cgengine import (
    cg_summands,
    isotypic_decompose,
    k1p_recursion_holds,
    k_tensor_summands,
    multiset_character_check,
    summands_of,
    tensor_power_multiplicity,
    tensor_power_summands,
)
from scheme_algebra.errors import DomainError, ResourceLimitError, TerwilligerError
from scheme_algebra.exactlin import format_matrix, format_rational, parse_rational
from scheme_algebra.hamming import (
    HammingGraph,
    build_scheme,
    distance_matrices,
    distance_recurrence_check,
    dual_adjacency,
    dual_idempotents,
    idempotent_rank_check,
    idempotents,
    adjacency,
    intersection_numbers,
    q_polynomial_check,
    scheme_identity_check,
    verify_adjacency_matvec,
)
from scheme_algebra.krawtchouk import (
    hopf_generator_checks,
    k_module,
    k_module_twisted,
    leonard_pair_check,
    relation_check,
    tensor_sl2,
    u_sl2_module,
    zeta_apply,
    zeta_inverse_apply,
)
from scheme_algebra.reports import CheckReport
from scheme_algebra.tables import FORMATS, PARAMS, emit_bases, emit_table, sweep_multiplicities, write_table
from scheme_algebra.terwilliger import (
    algebra_dimension_check,
    classify_pairwise,
    decompose_standard_module,
    wedderburn_blocks,
)

# Set up logger
logger = logging.getLogger(__name__)

DEFAULT_D = 2
DEFAULT_Q = 3
DEFAULT_WORKERS = 1
DEFAULT_SAMPLES = 10
DEFAULT_SEED = 0
MAX_RELATION_LABEL = 10
MAX_CG_LABEL = 8
MAX_TENSOR_POWER = 6

MATRIX_CHOICES = ("A", "Astar", "Ei", "Eistar", "Ai")
SUITES = ("relations", "idempotents", "qpoly", "dimension", "decomposition", "classification",
          "kron", "cg", "wedderburn", "all")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


@dataclass
class RunConfig:
    command: str
    D: int = DEFAULT_D
    q: int = DEFAULT_Q
    omega: Optional[Fraction] = None
    fmt: str = "table"
    out: Optional[str] = None
    cap: Optional[int] = None
    workers: int = DEFAULT_WORKERS
    which: str = "A"
    index: int = 0
    n: Optional[int] = None
    m: Optional[int] = None
    power: Optional[int] = None
    twisted: bool = False
    sl2: bool = False
    param: str = "dr"
    emit_bases: Optional[str] = None
    q_sweep: bool = False
    invariants: bool = True
    suite: str = "all"
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED

    @property
    def effective_omega(self) -> Fraction:
        return self.omega if self.omega is not None else 1 - Fraction(2, self.q)


def format_time(seconds: float) -> str:
    """Format time in seconds to human-readable string."""
    if seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        minutes = seconds / 60
        return f"{minutes:.1f}m"
    else:
        hours = seconds / 3600
        return f"{hours:.1f}h"


def emit(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Saved output to {path}")
    else:
        sys.stdout.write(text)


def finish(reports: Sequence[CheckReport]) -> int:
    for report in reports:
        print(report.summary())
    failed = [r for r in reports if not r.passed]
    if failed:
        print(f"FAILED: {failed[0].name}: {failed[0].first_failure}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


# -- commands ---------------------------------------------------------------------

def run_matrix(config: RunConfig) -> int:
    g = HammingGraph(config.D, config.q)
    if config.which in ("Ei", "Eistar", "Ai") and not 0 <= config.index <= g.D:
        raise DomainError(f"Index {config.index} outside 0..{g.D}")
    if config.which == "A":
        m = adjacency(g, config.cap)
    elif config.which == "Astar":
        m = dual_adjacency(g, config.cap)
    elif config.which == "Ei":
        m = idempotents(g, config.cap)[config.index]
    elif config.which == "Eistar":
        m = dual_idempotents(g, config.cap)[config.index]
    else:
        m = distance_matrices(g, config.cap)[config.index]
    emit(format_matrix(m), config.out)
    return EXIT_OK


def run_module(config: RunConfig) -> int:
    if config.sl2:
        t = u_sl2_module(config.n)
        parts = (("E", t.E), ("F", t.F), ("H", t.H))
    else:
        omega = config.effective_omega
        r = k_module_twisted(config.n, omega) if config.twisted else k_module(config.n, omega)
        parts = (("A", r.A), ("B", r.B), ("C", r.C))
    text = "".join(f"# {name}\n{format_matrix(m)}" for name, m in parts)
    emit(text, config.out)
    return EXIT_OK


def run_cg(config: RunConfig) -> int:
    if config.power is not None:
        p = config.power
        summands = tensor_power_summands(p)
        terms = " + ".join(f"{mult}*{label + 1}" for label, mult in summands.summands)
        lines = [str(summands), f"dimension audit: {terms} = {summands.dimension} = 2^{p}"]
        emit("\n".join(lines) + "\n", config.out)
        return EXIT_OK if summands.dimension == 2 ** p else EXIT_FAILURE
    emit(f"{cg_summands(config.m, config.n)}\n", config.out)
    return EXIT_OK


def run_decompose(config: RunConfig) -> int:
    report = decompose_standard_module(config.D, config.q, workers=config.workers, cap=config.cap,
                                       invariants=config.invariants)
    sweep = sweep_multiplicities(config.D, workers=config.workers) if config.q_sweep else None
    if config.fmt == "parquet":
        write_table(report, config.out, "parquet", config.param, sweep)
    else:
        emit(emit_table(report, config.fmt, config.param, sweep), config.out)
    if config.emit_bases:
        emit_bases(report, config.emit_bases)
    if sweep is not None and not sweep.all_passed:
        print(f"FAILED: q-sweep {sweep.first_failure}", file=sys.stderr)
        return EXIT_FAILURE
    if sweep is not None and not sweep.all_fit:
        print("FAILED: q-sweep found multiplicities not of the form c(q-2)^e", file=sys.stderr)
        return EXIT_FAILURE
    if not report.all_passed:
        print(f"FAILED: {report.checks.first_failure}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def relation_suite(config: RunConfig) -> CheckReport:
    if config.omega is not None:
        omegas = [config.omega]
    else:
        omegas = [Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1)]
        omegas += [1 - Fraction(2, q) for q in range(3, 8)]
    report = CheckReport(name="relations")
    for omega in omegas:
        for n in range(MAX_RELATION_LABEL + 1):
            report.merge(relation_check(k_module(n, omega)))
            report.merge(relation_check(k_module_twisted(n, omega)))
            sl2 = u_sl2_module(n)
            image = zeta_apply(sl2, omega)
            report.record(image == k_module(n, omega), f"zeta(L{n}) at omega={format_rational(omega)}")
            if omega * omega != 1:
                back = zeta_inverse_apply(image)
                report.record((back.E, back.F, back.H) == (sl2.E, sl2.F, sl2.H),
                              f"zeta round trip on L{n} at omega={format_rational(omega)}")
                if n >= 1:
                    report.merge(leonard_pair_check(k_module(n, omega)))
        for n in range(3):
            report.merge(hopf_generator_checks(k_module(n, omega)))
    return report


def cg_suite(config: RunConfig) -> CheckReport:
    report = CheckReport(name="Clebsch-Gordan")
    for m in range(MAX_CG_LABEL + 1):
        for n in range(MAX_CG_LABEL + 1):
            expected = cg_summands(m, n)
            t = tensor_sl2(u_sl2_module(m), u_sl2_module(n))
            found = summands_of(isotypic_decompose(t))
            report.record(found == expected, f"L{m} x L{n}", f"{found} != {expected}")
            report.merge(multiset_character_check(t, expected))
    omega = config.effective_omega
    for m in range(3):
        for n in range(3):
            found = k_tensor_summands(m, n, omega)
            report.record(found == cg_summands(m, n), f"K_omega L{m} x L{n}", str(found))
    t = u_sl2_module(1)
    for p in range(1, MAX_TENSOR_POWER + 1):
        found = summands_of(isotypic_decompose(t))
        expected = tensor_power_summands(p)
        report.record(found == expected, f"tensor power {p} of L1", f"{found} != {expected}")
        report.record(expected.dimension == 2 ** p, f"dimension audit p={p}")
        for k in range(1, p // 2 + 1):
            report.record(k1p_recursion_holds(p, k), f"multiplicity recursion p={p}, k={k}")
        t = tensor_sl2(t, u_sl2_module(1))
    return report


def run_verify(config: RunConfig) -> int:
    suites = SUITES[:-1] if config.suite == "all" else (config.suite,)
    reports: List[CheckReport] = []
    g = HammingGraph(config.D, config.q)
    decomposition = None
    for suite in suites:
        start_time = time.time()
        if suite == "relations":
            reports.append(relation_suite(config))
        elif suite == "idempotents":
            scheme = build_scheme(g, config.cap)
            reports.append(scheme_identity_check(scheme))
            reports.append(idempotent_rank_check(g, scheme.idempotents))
            reports.append(distance_recurrence_check(g, scheme.distance_matrices))
            reports.append(intersection_numbers(g, config.cap).report)
        elif suite == "qpoly":
            reports.append(q_polynomial_check(g, idempotents(g, config.cap)))
        elif suite == "dimension":
            report = algebra_dimension_check(g.D, g.q, config.cap)
            found, expected = report.details["dimension"], comb(g.D + 4, 4)
            relation = "=" if found == expected else f"!= {expected} ="
            print(f"dim T({g.D}) for q={g.q}: {found} {relation} C({g.D + 4},4)")
            reports.append(report)
        elif suite in ("decomposition", "classification"):
            if decomposition is None:
                decomposition = decompose_standard_module(g.D, g.q, workers=config.workers, cap=config.cap,
                                                          invariants=config.invariants)
            reports.append(decomposition.checks if suite == "decomposition" else classify_pairwise(decomposition))
        elif suite == "kron":
            reports.append(verify_adjacency_matvec(g.D, g.q, config.samples, config.seed))
        elif suite == "cg":
            reports.append(cg_suite(config))
        elif suite == "wedderburn":
            reports.append(wedderburn_blocks(g.D).report)
        logger.info(f"Suite {suite} finished in {format_time(time.time() - start_time)}")
    return finish(reports)


COMMANDS = {
    "matrix": run_matrix,
    "module": run_module,
    "cg": run_cg,
    "decompose": run_decompose,
    "verify": run_verify,
}


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    start_time = time.time()
    try:
        status = COMMANDS[config.command](config)
    except ResourceLimitError as e:
        logger.error(str(e))
        print(f"FAILED: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except TerwilligerError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"FAILED: {e}", file=sys.stderr)
        return EXIT_FAILURE
    logger.info(f"Command {config.command} finished in {format_time(time.time() - start_time)}")
    return status


# -- argument parsing ---------------------------------------------------------------

def rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    shared.add_argument(
        "--workers",
        type=int,
        default=DEFAULT_WORKERS,
        help=f"Process pool width for per-block work (default: {DEFAULT_WORKERS})",
    )
    shared.add_argument(
        "--cap",
        type=int,
        default=None,
        help="Largest q^D for which dense matrices may be built (default: $HAMMING_MATERIALIZE_CAP or 20000)",
    )
    shared.add_argument("--out", default=None, help="Write output to this path instead of stdout")

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--D", type=int, default=DEFAULT_D, help=f"Dimension D >= 1 (default: {DEFAULT_D})")
    graph.add_argument("--q", type=int, default=DEFAULT_Q, help=f"Alphabet size q >= 3 (default: {DEFAULT_Q})")
    graph.add_argument(
        "--omega",
        type=rational_arg,
        default=None,
        help="Exact rational omega as num/den (default: 1-2/q)",
    )

    parser = argparse.ArgumentParser(
        description="Exact computations in the Terwilliger algebra of the Hamming graph H(D, q)."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_matrix = sub.add_parser("matrix", parents=[shared, graph], help="Print a scheme matrix")
    p_matrix.add_argument("--which", choices=MATRIX_CHOICES, default="A", help="Matrix to print (default: A)")
    p_matrix.add_argument("--i", dest="index", type=int, default=0, help="Index for Ei, Eistar, Ai (default: 0)")

    p_module = sub.add_parser("module", parents=[shared, graph], help="Print module matrices")
    p_module.add_argument("--n", type=int, required=True, help="Module label n (dimension n+1)")
    p_module.add_argument("--twisted", action="store_true", help="A diagonal, B tridiagonal form")
    p_module.add_argument("--sl2", action="store_true", help="Print the U(sl2) module L_n instead")

    p_cg = sub.add_parser("cg", parents=[shared], help="Clebsch-Gordan summands")
    p_cg.add_argument("--m", type=int, default=None, help="First label")
    p_cg.add_argument("--n", type=int, default=None, help="Second label")
    p_cg.add_argument("--power", type=int, default=None, help="Decompose the p-th tensor power of L1")

    p_dec = sub.add_parser("decompose", parents=[shared, graph], help="Decompose the standard module")
    p_dec.add_argument("--param", choices=PARAMS, default="dr", help="Label columns (default: dr)")
    p_dec.add_argument("--format", dest="fmt", choices=FORMATS, default="table", help="Output format (default: table)")
    p_dec.add_argument("--emit-bases", default=None, help="Directory for one basis file per extracted copy")
    p_dec.add_argument("--q-sweep", action="store_true", help="Report multiplicities as c(q-2)^e from q = 3, 4, 5")
    p_dec.add_argument("--no-invariants", dest="invariants", action="store_false",
                       help="Skip the endpoint and diameter checks")

    p_verify = sub.add_parser("verify", parents=[shared, graph], help="Run a verification suite")
    p_verify.add_argument("--suite", choices=SUITES, default="all", help="Suite to run (default: all)")
    p_verify.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                          help=f"Random vectors for the kron suite (default: {DEFAULT_SAMPLES})")
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"Random seed (default: {DEFAULT_SEED})")
    p_verify.add_argument("--no-invariants", dest="invariants", action="store_false",
                          help="Skip the endpoint and diameter checks")
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    values = {key: value for key, value in vars(args).items() if key in RunConfig.__dataclass_fields__}
    config = RunConfig(**values)
    if config.D < 1:
        parser.error(f"--D must be at least 1, got {config.D}")
    if config.q < 3:
        parser.error(f"--q must be at least 3, got {config.q}")
    if config.workers < 1:
        parser.error(f"--workers must be at least 1, got {config.workers}")
    if config.cap is not None and config.cap < 1:
        parser.error(f"--cap must be positive, got {config.cap}")
    if config.command == "decompose" and config.fmt == "parquet" and not config.out:
        parser.error("--format parquet needs --out")
    if config.command == "module" and config.n < 0:
        parser.error(f"--n must be non-negative, got {config.n}")
    if config.command == "cg":
        if config.power is None and (config.m is None or config.n is None):
            parser.error("cg needs --m and --n, or --power")
        if config.power is not None and config.power < 1:
            parser.error(f"--power must be at least 1, got {config.power}")
        if config.power is None and (config.m < 0 or config.n < 0):
            parser.error("--m and --n must be non-negative")
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
