"""Verification reports and their JSON encoding."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class VerdictReport:
    """Outcome of one verification experiment.

    ``passed`` is the conjunction of ``directions``.  ``worst_slack`` follows
    the convention that a negative value means the checked inequality or
    identity was violated by that margin.  A report is ``inconclusive`` when
    the experiment could not decide (e.g. a search found nothing).
    """

    test: str
    directions: dict[str, bool] = field(default_factory=dict)
    worst_slack: float = math.inf
    witness: dict | None = None
    grid_data: list[dict] = field(default_factory=list)
    inconclusive: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.directions.values())

    @property
    def ok(self) -> bool:
        return self.passed or self.inconclusive

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "test": self.test,
            "passed": self.passed,
            "directions": dict(self.directions),
            "worst_slack": self.worst_slack,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        out["grid_data"] = list(self.grid_data)
        if self.inconclusive:
            out["inconclusive"] = True
        if self.notes:
            out["notes"] = list(self.notes)
        return jsonable(out)

    def to_json(self, indent=2) -> str:
        return dumps(self.to_dict(), indent=indent)


def jsonable(obj):
    """Convert numpy values and non-finite floats into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj, indent=2) -> str:
    return json.dumps(jsonable(obj), indent=indent, allow_nan=False) + "\n"
