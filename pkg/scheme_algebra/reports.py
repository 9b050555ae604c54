"""Pass/fail bookkeeping for the verification routines."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

logger = logging.getLogger(__name__)


@dataclass
class CheckReport:
    """Outcome of one verification suite.

    Verification never raises on a mathematical failure; it records the failing
    case here and keeps going so the caller sees the first witness and the count.
    """

    name: str
    checked: int = 0
    failures: List[str] = field(default_factory=list)
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def first_failure(self) -> Optional[str]:
        return self.failures[0] if self.failures else None

    def record(self, ok: bool, label: str, witness: str = "") -> bool:
        self.checked += 1
        if not ok:
            message = f"{label}: {witness}" if witness else label
            if not self.failures:
                logger.error(f"[{self.name}] first failure: {message}")
            else:
                logger.debug(f"[{self.name}] failure: {message}")
            self.failures.append(message)
        return ok

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.checked += other.checked
        self.failures.extend(f"{other.name}/{f}" for f in other.failures)
        return self

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{self.name}: {status} ({self.checked} checks"
        if self.failures:
            line += f", {len(self.failures)} failed; first: {self.first_failure}"
        return line + ")"
