"""
Tabular reports of a decomposition: class tables in text, CSV,
JSON or parquet, and the q-sweep that recovers multiplicities as c(q-2)^e.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from scheme_algebra.errors import DomainError
from scheme_algebra.exactlin import Matrix, format_matrix
from scheme_algebra.reports import CheckReport
from scheme_algebra.terwilliger import DecompositionReport, decompose_standard_module

# Set up logger
logger = logging.getLogger(__name__)

DEFAULT_SWEEP_QS = (3, 4, 5)
FORMATS = ("table", "csv", "json", "parquet")
PARAMS = ("dr", "pk")
MAX_FIT_EXPONENT = 64

DR_COLUMNS = ["D", "d", "r", "support", "multiplicity"]
PK_COLUMNS = ["D", "p", "k", "dimension", "multiplicity"]


@dataclass(frozen=True)
class PowerFit:
    """A multiplicity sequence over q of the shape c (q-2)^e, or the raw values if it has no such shape."""

    values: Tuple[Tuple[int, int], ...]
    coefficient: Optional[int]
    exponent: Optional[int]

    @property
    def fits(self) -> bool:
        return self.coefficient is not None

    def expression(self) -> str:
        if not self.fits:
            return "unfit:" + ",".join(str(m) for _, m in self.values)
        c, e = self.coefficient, self.exponent
        if e == 0:
            return str(c)
        power = "(q-2)" if e == 1 else f"(q-2)^{e}"
        return power if c == 1 else f"{c}{power}"


def fit_power(values: Dict[int, int]) -> PowerFit:
    """Fit c (q-2)^e exactly through every (q, multiplicity) pair.

    c and e are read off the two smallest q, then every other point must agree.
    """
    points = tuple(sorted(values.items()))
    if len(points) < 2:
        raise DomainError("A power fit needs multiplicities at two or more values of q")
    (q0, m0), (q1, m1) = points[0], points[1]
    unfit = PowerFit(points, None, None)
    if m0 <= 0:
        return unfit
    base0, base1 = q0 - 2, q1 - 2
    exponent = next(
        (e for e in range(MAX_FIT_EXPONENT + 1) if m0 * base1 ** e == m1 * base0 ** e), None
    )
    if exponent is None or m0 % base0 ** exponent:
        return unfit
    coefficient = m0 // base0 ** exponent
    for q, m in points:
        if coefficient * (q - 2) ** exponent != m:
            return unfit
    return PowerFit(points, coefficient, exponent)


@dataclass
class MultiplicitySweep:
    """Fitted multiplicities keyed by (d, r), with the check report of the decomposition at each q."""

    fits: Dict[Tuple[int, int], PowerFit]
    checks: Dict[int, CheckReport]

    def __getitem__(self, key: Tuple[int, int]) -> PowerFit:
        return self.fits[key]

    def values(self):
        return self.fits.values()

    @property
    def all_fit(self) -> bool:
        return all(fit.fits for fit in self.fits.values())

    @property
    def all_passed(self) -> bool:
        return all(report.passed for report in self.checks.values())

    @property
    def first_failure(self) -> Optional[str]:
        for q, report in sorted(self.checks.items()):
            if not report.passed:
                return f"q={q}: {report.first_failure}"
        return None


def sweep_multiplicities(D: int, qs: Sequence[int] = DEFAULT_SWEEP_QS, workers: int = 1) -> MultiplicitySweep:
    """(d, r) -> fitted multiplicity, from a block-level decomposition at every q in qs."""
    observed: Dict[Tuple[int, int], Dict[int, int]] = {}
    checks: Dict[int, CheckReport] = {}
    for q in qs:
        logger.info(f"q-sweep: decomposing D={D} at q={q}")
        report = decompose_standard_module(D, q, workers=workers, coordinates=False, invariants=False)
        checks[q] = report.checks
        if not report.all_passed:
            logger.error(f"q-sweep at q={q} failed: {report.checks.first_failure}")
        for desc in report.descriptors:
            observed.setdefault((desc.d, desc.r), {})[q] = desc.multiplicity
    fits = {}
    for key, values in observed.items():
        fits[key] = fit_power(values)
        if not fits[key].fits:
            logger.warning(f"(d,r)={key}: multiplicities {values} are not of the form c(q-2)^e")
    return MultiplicitySweep(fits, checks)


def format_support(support: Sequence[int]) -> str:
    return "{" + ",".join(str(i) for i in support) + "}"


def descriptor_frame(report: DecompositionReport, param: str = "dr",
                     sweep: Optional[MultiplicitySweep] = None) -> pd.DataFrame:
    """One row per module class, in descending d, ascending r order."""
    if param not in PARAMS:
        raise DomainError(f"Unknown parametrization {param!r}; expected one of {PARAMS}")
    ordered = sorted(report.descriptors, key=lambda d: (-d.d, d.r))
    rows = []
    for desc in ordered:
        multiplicity = desc.multiplicity
        if sweep is not None:
            multiplicity = sweep[(desc.d, desc.r)].expression()
        if param == "dr":
            rows.append([report.D, desc.d, desc.r, format_support(desc.support), multiplicity])
        else:
            rows.append([report.D, desc.p, desc.k, desc.dimension, multiplicity])
    return pd.DataFrame(rows, columns=DR_COLUMNS if param == "dr" else PK_COLUMNS)


def report_document(report: DecompositionReport,
                    sweep: Optional[MultiplicitySweep] = None) -> Dict:
    """The JSON report: D, q, classes with their checks, total_dim, all_passed."""
    classes = []
    for desc in sorted(report.descriptors, key=lambda d: (-d.d, d.r)):
        entry = {
            "p": desc.p,
            "k": desc.k,
            "d": desc.d,
            "r": desc.r,
            "dim": desc.dimension,
            "multiplicity": desc.multiplicity,
            "support": list(desc.support),
            "checks": dict(sorted(report.class_checks.get((desc.p, desc.k), {}).items())),
        }
        if sweep is not None:
            fit = sweep[(desc.d, desc.r)]
            entry["multiplicity_expression"] = fit.expression()
            entry["sweep"] = {str(q): m for q, m in fit.values}
        classes.append(entry)
    return {
        "D": report.D,
        "q": report.q,
        "classes": classes,
        "total_dim": report.total_dim,
        "all_passed": report.all_passed,
    }


def emit_table(report: DecompositionReport, fmt: str = "table", param: str = "dr",
               sweep: Optional[MultiplicitySweep] = None) -> str:
    """Render the class table as text, CSV or JSON."""
    if fmt == "json":
        return json.dumps(report_document(report, sweep), indent=2) + "\n"
    frame = descriptor_frame(report, param, sweep)
    if fmt == "csv":
        return frame.to_csv(index=False, lineterminator="\n")
    if fmt == "table":
        if frame.empty:
            return "  ".join(frame.columns) + "\n"
        return frame.to_string(index=False) + "\n"
    raise DomainError(f"Format {fmt!r} cannot be rendered as text; expected table, csv or json")


def write_table(report: DecompositionReport, path: str, fmt: str = "table", param: str = "dr",
                sweep: Optional[MultiplicitySweep] = None) -> None:
    if not path:
        raise DomainError("An output path is required")
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "parquet":
        frame = descriptor_frame(report, param, sweep)
        frame["multiplicity"] = frame["multiplicity"].astype(str)
        frame.to_parquet(output, compression="zstd", index=False)
    else:
        output.write_text(emit_table(report, fmt, param, sweep), encoding="utf-8")
    logger.info(f"Saved class table to {output}")


def emit_bases(report: DecompositionReport, directory: str) -> List[Path]:
    """One matrix-text file per extracted copy; the columns are its basis vectors in V(D)."""
    if not report.has_coordinates:
        raise DomainError("The decomposition was run without V(D) coordinates; no bases to write")
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for (p, k), copies in sorted(report.pieces.items()):
        for idx, copy in enumerate(copies):
            path = out_dir / f"D{report.D}_q{report.q}_p{p}_k{k}_copy{idx}.txt"
            path.write_text(format_matrix(Matrix.from_columns(copy.basis)), encoding="utf-8")
            written.append(path)
    logger.info(f"Wrote {len(written)} basis files to {out_dir}")
    return written
