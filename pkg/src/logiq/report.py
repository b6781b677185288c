"""JSON result reports with stable key order and input content hashes."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

__all__ = ["SolveReport", "content_hash", "REL_TOL", "certificate_holds"]

REL_TOL = 1e-9


def content_hash(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode()
    return hashlib.sha256(text).hexdigest()


def certificate_holds(B: float, alg: float, opt: float) -> bool:
    """``B * alg >= opt`` up to the relative tolerance."""
    return B * alg >= opt - REL_TOL * max(1.0, abs(opt))


@dataclass
class SolveReport:
    kind: str
    solution: list  # 1-based vertex ids: a sorted set or an ordered tuple
    value: float
    certificate: float
    oracle_calls: int
    elapsed_ms: float
    hashes: dict = field(default_factory=dict)
    opt: float | None = None
    opt_solution: list | None = None
    certificate_ok: bool | None = None
    details: dict = field(default_factory=dict)

    def attach_opt(self, opt_value: float, opt_solution: list):
        self.opt = opt_value
        self.opt_solution = opt_solution
        self.certificate_ok = certificate_holds(self.certificate, self.value, opt_value) and (
            self.value <= opt_value + REL_TOL * max(1.0, abs(opt_value))
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        return {k: v for k, v in out.items() if v is not None}

    def dumps(self, compact: bool = False) -> str:
        if compact:
            return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def loads(cls, text: str) -> "SolveReport":
        doc = json.loads(text)
        return cls(**doc)
