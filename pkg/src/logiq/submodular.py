"""Value oracles for nonnegative monotone submodular set functions."""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import CapExceededError, FormatError

__all__ = [
    "SubmodularOracle",
    "CoverageFunction",
    "ModularFunction",
    "ContractedOracle",
    "FunctionOracle",
    "contract",
    "PropertyReport",
    "verify_properties",
    "load_function",
    "dump_function",
    "VERIFY_CAP",
]

VERIFY_CAP = 12
REL_TOL = 1e-9


class SubmodularOracle:
    """Value oracle over the ground set ``0..n-1`` with a thread-safe call counter."""

    def __init__(self, n: int):
        self.n = n
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        return self._calls

    def reset_calls(self):
        with self._lock:
            self._calls = 0

    def _count(self):
        with self._lock:
            self._calls += 1

    def _check(self, U):
        U = frozenset(U)
        for u in U:
            if not isinstance(u, (int, np.integer)) or not 0 <= u < self.n:
                raise ValueError(f"element {u!r} outside the ground set 0..{self.n - 1}")
        return U

    def __call__(self, U: Iterable[int]) -> float:
        U = self._check(U)
        self._count()
        return self._value(U)

    evaluate = __call__

    def _value(self, U: frozenset) -> float:
        raise NotImplementedError

    def content_hash(self) -> str:
        return hashlib.sha256(self.describe().encode()).hexdigest()

    def describe(self) -> str:
        """Canonical text used for hashing."""
        return repr(self)


class CoverageFunction(SubmodularOracle):
    """``f(U)`` = total weight of the items covered by the sets ``S_u``, ``u in U``."""

    def __init__(self, sets: Mapping[int, Iterable] | list, weights: Mapping | None = None, n: int | None = None):
        if not isinstance(sets, Mapping):
            sets = dict(enumerate(sets))
        n = n if n is not None else (max(sets, default=-1) + 1)
        super().__init__(n)
        items = sorted({it for s in sets.values() for it in s} | set(weights or {}), key=str)
        self.items = tuple(items)
        idx = {it: i for i, it in enumerate(items)}
        w = dict(weights or {})
        for it, x in w.items():
            if x < 0:
                raise ValueError(f"item {it!r} has negative weight {x}")
        self.weights = tuple(float(w.get(it, 1.0)) for it in items)
        self.sets = tuple(frozenset(sets.get(u, ())) for u in range(n))
        self._masks = [0] * n
        for u, s in enumerate(self.sets):
            m = 0
            for it in s:
                m |= 1 << idx[it]
            self._masks[u] = m
        self._unit = all(x == 1.0 for x in self.weights)

    def _value(self, U):
        m = 0
        for u in U:
            m |= self._masks[u]
        if self._unit:
            return float(m.bit_count())
        total = 0.0
        i = 0
        while m:
            if m & 1:
                total += self.weights[i]
            m >>= 1
            i += 1
        return total

    def describe(self):
        doc = {
            "type": "coverage",
            "n": self.n,
            "sets": {str(u): sorted(map(str, s)) for u, s in enumerate(self.sets)},
            "weights": {str(it): w for it, w in zip(self.items, self.weights)},
        }
        return json.dumps(doc, sort_keys=True)

    def __repr__(self):
        return f"CoverageFunction(n={self.n}, items={len(self.items)})"


class ModularFunction(SubmodularOracle):
    """``f(U) = sum of w(u)`` for nonnegative weights."""

    def __init__(self, weights: Iterable[float]):
        w = [float(x) for x in weights]
        if any(x < 0 for x in w):
            raise ValueError("modular weights must be nonnegative")
        super().__init__(len(w))
        self.weights = tuple(w)

    def _value(self, U):
        return float(sum(self.weights[u] for u in U))

    def describe(self):
        return json.dumps({"type": "modular", "weights": list(self.weights)})

    def __repr__(self):
        return f"ModularFunction({list(self.weights)})"


class FunctionOracle(SubmodularOracle):
    """Wrap an arbitrary callable; properties are *not* assumed (use verify_properties)."""

    def __init__(self, n: int, fn, name: str = "custom"):
        super().__init__(n)
        self.fn = fn
        self.name = name

    def _value(self, U):
        return float(self.fn(U))

    def describe(self):
        return f"function:{self.name}:{self.n}"

    def __repr__(self):
        return f"FunctionOracle({self.name!r}, n={self.n})"


class ContractedOracle(SubmodularOracle):
    """``f_U0(U) = f(U0 | U) - f(U0)``; counts calls on the base oracle too."""

    def __init__(self, base: SubmodularOracle, pinned: Iterable[int]):
        pinned = base._check(pinned)
        # flatten nested contractions so the pinned set is explicit
        while isinstance(base, ContractedOracle):
            pinned = pinned | base.pinned
            base = base.base
        super().__init__(base.n)
        self.base = base
        self.pinned = pinned
        self._offset = base(pinned)

    def _value(self, U):
        return self.base(self.pinned | U) - self._offset

    def describe(self):
        return f"contract({self.base.describe()},{sorted(self.pinned)})"

    def __repr__(self):
        return f"ContractedOracle({self.base!r}, pinned={sorted(self.pinned)})"


def contract(f: SubmodularOracle, pinned: Iterable[int]) -> ContractedOracle:
    return ContractedOracle(f, pinned)


# --- property verification -------------------------------------------------


@dataclass
class PropertyReport:
    n: int
    nonneg: bool = True
    monotone: bool = True
    submodular: bool = True
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.nonneg and self.monotone and self.submodular

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "nonneg": self.nonneg,
            "monotone": self.monotone,
            "submodular": self.submodular,
            "ok": self.ok,
            "witnesses": self.witnesses,
        }


def _tol(*vals):
    return REL_TOL * max(1.0, *(abs(v) for v in vals))


def _members(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def verify_properties(f: SubmodularOracle, n: int | None = None, pairs: bool = False) -> PropertyReport:
    """Exhaustively check nonnegativity, monotonicity and submodularity.

    Submodularity is checked through the local criterion
    ``f(U+a) + f(U+b) >= f(U+a+b) + f(U)`` over all ``U`` and ``a, b`` outside
    ``U``, which is equivalent to the pair inequality.  With ``pairs=True``
    (``n <= 10``) every pair ``(U, W)`` is also checked directly.
    Witness sets are reported with 1-based element ids.
    """
    n = f.n if n is None else n
    if n > VERIFY_CAP:
        raise CapExceededError(f"property verification capped at n <= {VERIFY_CAP}, got {n}")
    size = 1 << n
    table = np.empty(size, dtype=float)
    for m in range(size):
        table[m] = f(_members(m))
    rep = PropertyReport(n)

    def name(mask):
        return [i + 1 for i in _members(mask)]

    neg = np.nonzero(table < -_tol(0.0))[0]
    if neg.size:
        rep.nonneg = False
        rep.witnesses["nonneg"] = {"U": name(int(neg[0])), "value": float(table[neg[0]])}
    masks = np.arange(size)
    for a in range(n):
        bit = 1 << a
        lo = masks[(masks & bit) == 0]
        drop = table[lo] - table[lo | bit]
        bad = np.nonzero(drop > REL_TOL * np.maximum(1.0, np.abs(table[lo])))[0]
        if bad.size and rep.monotone:
            U = int(lo[bad[0]])
            rep.monotone = False
            rep.witnesses["monotone"] = {"U": name(U), "W": name(U | bit)}
    for a in range(n):
        for b in range(a + 1, n):
            ba, bb = 1 << a, 1 << b
            lo = masks[(masks & (ba | bb)) == 0]
            lhs = table[lo | ba] + table[lo | bb]
            rhs = table[lo | ba | bb] + table[lo]
            bad = np.nonzero(rhs - lhs > REL_TOL * np.maximum(1.0, np.abs(rhs)))[0]
            if bad.size:
                U = int(lo[bad[0]])
                rep.submodular = False
                rep.witnesses["submodular"] = {"U": name(U | ba), "W": name(U | bb)}
                break
        if not rep.submodular:
            break
    if pairs:
        if n > 10:
            raise CapExceededError("pairwise submodularity check capped at n <= 10")
        for U in range(size):
            for W in range(U + 1, size):
                lhs = table[U] + table[W]
                rhs = table[U | W] + table[U & W]
                if rhs - lhs > _tol(lhs, rhs):
                    rep.submodular = False
                    rep.witnesses.setdefault("submodular", {"U": name(U), "W": name(W)})
                    break
            if "submodular" in rep.witnesses:
                break
    return rep


# --- JSON --------------------------------------------------------------------


def load_function(text: str, n: int | None = None) -> SubmodularOracle:
    """Parse an objective function document; vertex keys are 1-based."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno, pos=exc.colno) from None
    if not isinstance(doc, dict) or doc.get("type") not in ("coverage", "modular"):
        raise FormatError("function document needs type 'coverage' or 'modular'")

    def vertex(key):
        try:
            v = int(key) - 1
        except (TypeError, ValueError):
            raise FormatError(f"vertex key {key!r} is not an integer") from None
        if v < 0 or (n is not None and v >= n):
            raise FormatError(f"vertex key {key!r} out of range")
        return v

    if doc["type"] == "modular":
        raw = doc.get("weights")
        if not isinstance(raw, dict):
            raise FormatError("modular function needs a 'weights' object")
        w = {vertex(k): x for k, x in raw.items()}
        size = n if n is not None else max(w, default=-1) + 1
        vals = [w.get(u, 0.0) for u in range(size)]
        if any(not isinstance(x, (int, float)) or x < 0 for x in vals):
            raise FormatError("modular weights must be nonnegative numbers")
        return ModularFunction(vals)
    raw = doc.get("sets")
    if not isinstance(raw, dict):
        raise FormatError("coverage function needs a 'sets' object")
    sets = {}
    for k, items in raw.items():
        if not isinstance(items, list):
            raise FormatError(f"sets[{k!r}] must be a list")
        sets[vertex(k)] = [str(x) for x in items]
    weights = doc.get("weights")
    if weights is not None:
        if not isinstance(weights, dict) or any(not isinstance(x, (int, float)) or x < 0 for x in weights.values()):
            raise FormatError("coverage weights must be nonnegative numbers")
        weights = {str(k): float(x) for k, x in weights.items()}
    size = n if n is not None else max(sets, default=-1) + 1
    return CoverageFunction(sets, weights, n=size)


def dump_function(f: SubmodularOracle) -> str:
    if isinstance(f, ModularFunction):
        doc = {"type": "modular", "weights": {str(u + 1): w for u, w in enumerate(f.weights)}}
    elif isinstance(f, CoverageFunction):
        doc = {
            "type": "coverage",
            "sets": {str(u + 1): sorted(map(str, s)) for u, s in enumerate(f.sets)},
            "weights": {str(it): w for it, w in zip(f.items, f.weights)},
        }
    else:
        raise TypeError(f"cannot serialize {type(f).__name__}")
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
