"""
Property-suite command
"""

import logging
from pathlib import Path
import time
from typing import Any, Dict, Optional, Sequence

from ..quantum.properties import DEFAULT_SLACK, run_property_suite
from .base import EXIT_PROPERTY_VIOLATION, EXIT_SUCCESS, BaseCommand
from .files import write_json, write_manifest

logger = logging.getLogger(__name__)


class PropertySuiteCommand(BaseCommand):
    name: str = "props"
    description: str = (
        "Runs the randomized inequality suite (distance measures, fidelity "
        "lemmas, entropic identities) and writes one report per check."
    )

    def _run(self, out: Path, trials: int = 1000, dims: Sequence[int] = (2, 3, 4), seed: int = 42,
             slack: float = DEFAULT_SLACK, checks: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        started = time.perf_counter()
        out = Path(out)
        reports = run_property_suite(trials, dims, seed, slack, checks)
        violations = sum(r.violations for r in reports)

        document = {
            "trials": trials,
            "dims": [int(d) for d in dims],
            "seed": seed,
            "slack": slack,
            "passed": violations == 0,
            "reports": [r.to_dict() for r in reports],
        }
        write_json(out, document)
        manifest = write_manifest(out, self.name, {"trials": trials, "dims": document["dims"], "slack": slack,
                                                   "checks": list(checks) if checks else None},
                                  seed, [out], started)

        if violations:
            failing = [r.name for r in reports if r.violations]
            logger.warning(f"{violations} violations in {', '.join(failing)}")
        return {
            "report": str(out),
            "manifest": str(manifest),
            "violations": violations,
            "checks": len(reports),
            "success": violations == 0,
            "exit_code": EXIT_SUCCESS if violations == 0 else EXIT_PROPERTY_VIOLATION,
        }
