"""Validated input representations: Gaifman form and Kazana-Segoufin form.

Both are JSON documents.  Variable indices in KS documents are 1-based
(``[i, p, j, q]`` encodes ``rho_p(x_i) ? rho_q(x_j)``); in memory they are
0-based.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..errors import FormatError, ValidationError
from .formula import Formula, parse_formula, syntactic_radius, to_text, vertex_vars

__all__ = [
    "GaifmanBlock",
    "GaifmanDisjunct",
    "GaifmanForm",
    "validate_gaifman",
    "load_gaifman",
    "dump_gaifman",
    "TauConstraint",
    "KsDisjunct",
    "KsNormalForm",
    "EqualityTree",
    "EqualityForest",
    "validate_ks",
    "ks_violations",
    "load_ks",
    "dump_ks",
]


def _natural_key(name):
    m = re.fullmatch(r"(.*?)(\d+)", name)
    return (m.group(1), int(m.group(2))) if m else (name, -1)


# --- Gaifman form ----------------------------------------------------------


@dataclass(frozen=True)
class GaifmanBlock:
    vars: tuple[str, ...]
    formula: Formula  # free variables = the block's variables

    @property
    def text(self):
        return str(self.formula)


@dataclass(frozen=True)
class GaifmanDisjunct:
    r: int
    blocks: tuple[GaifmanBlock, ...]


@dataclass(frozen=True)
class GaifmanForm:
    """Disjunction over partitions of ``vars`` into r-local blocks.

    The pairwise block distance guard ``dist > 2r`` is implicit.
    """

    vars: tuple[str, ...]
    disjuncts: tuple[GaifmanDisjunct, ...]

    @property
    def k(self) -> int:
        return len(self.vars)

    def index(self, name: str) -> int:
        return self.vars.index(name)


def validate_gaifman(gf: GaifmanForm) -> list[str]:
    """Violations of the block-partition, scoping and radius rules (empty = ok)."""
    out = []
    if len(set(gf.vars)) != len(gf.vars):
        out.append("duplicate variable in the declared variable list")
    if not gf.disjuncts:
        out.append("form has no disjuncts")
    universe = set(gf.vars)
    for d_idx, dj in enumerate(gf.disjuncts):
        tag = f"disjunct {d_idx}"
        if not isinstance(dj.r, int) or dj.r < 0:
            out.append(f"{tag}: radius must be a nonnegative integer, got {dj.r!r}")
        seen = {}
        for b_idx, blk in enumerate(dj.blocks):
            if not blk.vars:
                out.append(f"{tag}: block {b_idx} is empty")
            for v in blk.vars:
                if v not in universe:
                    out.append(f"{tag}: block {b_idx} uses undeclared variable {v}")
                if v in seen:
                    out.append(f"{tag}: variable {v} appears in blocks {seen[v]} and {b_idx}")
                seen.setdefault(v, b_idx)
            stray = vertex_vars(blk.formula.body) - set(blk.vars)
            if stray:
                out.append(f"{tag}: block {b_idx} formula mentions {sorted(stray)} outside its block")
            if blk.formula.is_mso:
                out.append(f"{tag}: block {b_idx} formula uses a set variable")
            if not stray and isinstance(dj.r, int):
                rad = syntactic_radius(blk.formula)
                if rad is not None and rad > dj.r:
                    out.append(f"{tag}: block {b_idx} formula needs radius {rad} > r = {dj.r}")
        missing = universe - set(seen)
        if missing:
            out.append(f"{tag}: variables {sorted(missing, key=_natural_key)} are in no block")
    return out


def load_gaifman(text: str) -> GaifmanForm:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno, pos=exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("disjuncts"), list):
        raise FormatError("Gaifman form needs a 'disjuncts' list")
    names = set()
    raw = []
    for dj in doc["disjuncts"]:
        if not isinstance(dj, dict) or "r" not in dj or not isinstance(dj.get("blocks"), list):
            raise FormatError("each disjunct needs 'r' and a 'blocks' list")
        for blk in dj["blocks"]:
            if not isinstance(blk, dict) or not isinstance(blk.get("vars"), list) or "formula" not in blk:
                raise FormatError("each block needs 'vars' and 'formula'")
            names.update(blk["vars"])
        raw.append(dj)
    order = tuple(doc["vars"]) if "vars" in doc else tuple(sorted(names, key=_natural_key))
    disjuncts = []
    for dj in raw:
        blocks = []
        for blk in dj["blocks"]:
            bvars = tuple(blk["vars"])
            # parse against every declared name so out-of-block use is a
            # validation finding rather than a parse failure
            phi = parse_formula(blk["formula"], free=order)
            body_vars = vertex_vars(phi.body)
            free = bvars if body_vars <= set(bvars) else order
            blocks.append(GaifmanBlock(bvars, Formula(phi.body, free, phi.set_var)))
        disjuncts.append(GaifmanDisjunct(dj["r"], tuple(blocks)))
    return GaifmanForm(order, tuple(disjuncts))


def dump_gaifman(gf: GaifmanForm) -> str:
    doc = {
        "vars": list(gf.vars),
        "disjuncts": [
            {
                "r": dj.r,
                "blocks": [{"vars": list(b.vars), "formula": to_text(b.formula.body)} for b in dj.blocks],
            }
            for dj in gf.disjuncts
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --- Kazana-Segoufin form --------------------------------------------------


@dataclass(frozen=True)
class TauConstraint:
    """Unary constraints on one variable.

    ``labels`` must all be carried by the vertex; each ``(a, b, c)`` in
    ``fun_eqs`` asserts ``rho_a(rho_b(x)) = rho_c(x)``.
    """

    var: int
    labels: tuple[str, ...] = ()
    fun_eqs: tuple[tuple[int, int, int], ...] = ()


@dataclass(frozen=True)
class KsDisjunct:
    tau: tuple[TauConstraint, ...] = ()
    eq: tuple[tuple[int, int, int, int], ...] = ()  # (i, p, j, q): rho_p(x_i) = rho_q(x_j)
    neq: tuple[tuple[int, int, int, int], ...] = ()

    def tau_of(self, i: int) -> list[TauConstraint]:
        return [t for t in self.tau if t.var == i]


@dataclass(frozen=True)
class KsNormalForm:
    k: int
    depth: int  # largest admissible rho index
    disjuncts: tuple[KsDisjunct, ...]


@dataclass(frozen=True)
class EqualityTree:
    vars: tuple[int, ...]  # ascending
    edges: tuple[int, ...]  # indices into the disjunct's eq list

    @property
    def size(self):
        return len(self.vars)

    def adjacency(self, eq) -> dict[int, list[tuple[int, int]]]:
        """var -> [(neighbor var, eq atom index)] in atom order."""
        adj = {v: [] for v in self.vars}
        for e in self.edges:
            i, _, j, _ = eq[e]
            adj[i].append((j, e))
            adj[j].append((i, e))
        return adj


@dataclass(frozen=True)
class EqualityForest:
    trees: tuple[EqualityTree, ...] = field(default_factory=tuple)

    @property
    def k_max(self) -> int:
        return max((t.size for t in self.trees), default=0)


def _find_cycle(k, edges):
    """Edge-index list of some cycle in the multigraph, or None."""
    adj = {v: [] for v in range(k)}
    for idx, (a, b) in enumerate(edges):
        adj[a].append((b, idx))
        adj[b].append((a, idx))
    seen = {}
    for root in range(k):
        if root in seen:
            continue
        seen[root] = (None, None)
        stack = [(root, None)]
        while stack:
            v, via = stack.pop()
            for w, idx in adj[v]:
                if idx == via:
                    continue
                if w in seen:
                    # close the cycle through the parent pointers
                    path_v, path_w = [], []
                    x = v
                    while x is not None:
                        path_v.append(x)
                        x = seen[x][0]
                    x = w
                    while x is not None:
                        path_w.append(x)
                        x = seen[x][0]
                    common = next(x for x in path_v if x in path_w)
                    cyc = path_v[: path_v.index(common) + 1]
                    cyc += list(reversed(path_w[: path_w.index(common)]))
                    return [c + 1 for c in cyc]
                seen[w] = (v, idx)
                stack.append((w, idx))
    return None


def ks_violations(ks: KsNormalForm) -> list[str]:
    out = []
    if ks.k < 1:
        out.append("k must be positive")
    if ks.depth < 0:
        out.append("depth must be nonnegative")
    for d_idx, dj in enumerate(ks.disjuncts):
        tag = f"disjunct {d_idx}"

        def check_var(i, what):
            if not 0 <= i < ks.k:
                out.append(f"{tag}: {what} references x{i + 1} outside 1..{ks.k}")
                return False
            return True

        def check_rho(p, what):
            if not 0 <= p <= ks.depth:
                out.append(f"{tag}: {what} uses rho index {p} outside 0..{ks.depth}")

        for t in dj.tau:
            check_var(t.var, "tau")
            for trip in t.fun_eqs:
                for p in trip:
                    check_rho(p, "tau")
        ok_edges = []
        for kind, atoms in (("eq", dj.eq), ("neq", dj.neq)):
            for i, p, j, q in atoms:
                good = check_var(i, kind) & check_var(j, kind)
                check_rho(p, kind)
                check_rho(q, kind)
                if good and i == j:
                    out.append(f"{tag}: {kind} atom relates x{i + 1} to itself")
                elif good and kind == "eq":
                    ok_edges.append((i, j))
        if ks.k >= 1:
            cyc = _find_cycle(ks.k, ok_edges)
            if cyc is not None:
                names = " - ".join(f"x{c}" for c in cyc + cyc[:1])
                out.append(f"{tag}: equality graph has a cycle {names}")
    return out


def validate_ks(ks: KsNormalForm) -> list[EqualityForest]:
    """One equality forest per disjunct; raises ValidationError on any violation."""
    problems = ks_violations(ks)
    if problems:
        raise ValidationError("invalid KS normal form", problems)
    forests = []
    for dj in ks.disjuncts:
        parent = list(range(ks.k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, _, j, _ in dj.eq:
            parent[find(i)] = find(j)
        groups = {}
        for v in range(ks.k):
            groups.setdefault(find(v), []).append(v)
        trees = []
        for members in sorted(groups.values(), key=min):
            mset = set(members)
            edges = tuple(e for e, (i, _, j, _) in enumerate(dj.eq) if i in mset)
            trees.append(EqualityTree(tuple(members), edges))
        forests.append(EqualityForest(tuple(trees)))
    return forests


def _ints(row, n, what):
    if not isinstance(row, list) or len(row) != n or not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
        raise FormatError(f"{what} must be a list of {n} integers, got {row!r}")
    return row


def load_ks(text: str) -> KsNormalForm:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno, pos=exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("disjuncts"), list) or "depth" not in doc:
        raise FormatError("KS form needs 'depth' and a 'disjuncts' list")
    disjuncts = []
    top = 0
    for dj in doc["disjuncts"]:
        if not isinstance(dj, dict):
            raise FormatError("each disjunct must be an object")
        tau = []
        for t in dj.get("tau", []):
            if not isinstance(t, dict) or not isinstance(t.get("var"), int):
                raise FormatError("tau entries need an integer 'var'")
            labels = t.get("labels", [])
            if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
                raise FormatError("tau 'labels' must be a list of strings")
            fun_eqs = tuple(tuple(_ints(x, 3, "fun_eq")) for x in t.get("fun_eqs", []))
            tau.append(TauConstraint(t["var"] - 1, tuple(labels), fun_eqs))
            top = max(top, t["var"])
        eq = tuple((i - 1, p, j - 1, q) for i, p, j, q in (_ints(x, 4, "eq atom") for x in dj.get("eq", [])))
        neq = tuple((i - 1, p, j - 1, q) for i, p, j, q in (_ints(x, 4, "neq atom") for x in dj.get("neq", [])))
        for i, _, j, _ in eq + neq:
            top = max(top, i + 1, j + 1)
        disjuncts.append(KsDisjunct(tuple(tau), eq, neq))
    k = doc.get("k", top)
    if not isinstance(k, int) or not isinstance(doc["depth"], int):
        raise FormatError("'k' and 'depth' must be integers")
    return KsNormalForm(k, doc["depth"], tuple(disjuncts))


def dump_ks(ks: KsNormalForm) -> str:
    def atoms(rows):
        return [[i + 1, p, j + 1, q] for i, p, j, q in rows]

    doc = {
        "k": ks.k,
        "depth": ks.depth,
        "disjuncts": [
            {
                "tau": [
                    {"var": t.var + 1, "labels": list(t.labels), "fun_eqs": [list(x) for x in t.fun_eqs]}
                    for t in dj.tau
                ],
                "eq": atoms(dj.eq),
                "neq": atoms(dj.neq),
            }
            for dj in ks.disjuncts
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
