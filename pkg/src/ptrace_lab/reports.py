"""Inequality report records shared by the checker and CLI layers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


def verdict_tolerance(rhs: float) -> float:
    """Default slack tolerance for a bound with right hand side rhs."""
    return 1e-8 * (1.0 + abs(rhs))


@dataclass
class InequalityReport:
    """Outcome of one checked bound lhs <= rhs.

    slack = rhs - lhs; verdict is True when slack >= -tolerance.
    constants carries named scalars of the instance (dimensions, exponents,
    rank, whatever the checker decided is worth keeping).
    """

    name: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    verdict: bool
    constants: dict = field(default_factory=dict)

    @classmethod
    def from_bound(
        cls,
        name: str,
        lhs: float,
        rhs: float,
        tolerance: float | None = None,
        constants: dict | None = None,
    ) -> "InequalityReport":
        lhs = float(lhs)
        rhs = float(rhs)
        tol = verdict_tolerance(rhs) if tolerance is None else float(tolerance)
        slack = rhs - lhs
        return cls(
            name=name,
            lhs=lhs,
            rhs=rhs,
            slack=slack,
            tolerance=tol,
            verdict=bool(slack >= -tol),
            constants=dict(constants or {}),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "constants": self.constants,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
