"""Residual bookkeeping shared by the identity suites."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np


class ConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""


@dataclass(frozen=True)
class IdentityCheck:
    identity_name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d


def residual(a, b) -> float:
    """Frobenius norm of ``a - b``."""
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def worst(checks: Iterable[IdentityCheck]) -> float:
    return max((c.residual for c in checks), default=0.0)


def dump_checks(checks: Iterable[IdentityCheck]) -> str:
    return json.dumps([c.to_dict() for c in checks], indent=2)
