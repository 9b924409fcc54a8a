"""Finite-field parameter scans with pluggable predicates, univariate root
finding mod p, shard bookkeeping, and the evaluation-throughput bench.

The hot paths specialize to machine integers (optionally numpy) for p < 2^31;
the exact arith module is the reference oracle for both.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

try:
    import numpy as _np
except ImportError:  # pragma: no cover - numpy ships with the environment
    _np = None

from .arith import GF
from .grobner import factor_univariate, jacobian_rank_at_point
from .poly import SparsePoly, parse_poly

DEFAULT_SEED = 0x5EED

#: bump when predicate semantics change; guards coordinator/worker agreement
REGISTRY_VERSION = "bisurf-predicates-1"


class UnknownPredicate(KeyError):
    pass


class VersionMismatch(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Root finding mod p.

def roots_mod_p(f, p: int | None = None) -> list[tuple[int, int]]:
    """All roots of a univariate polynomial in F_p with multiplicities,
    sorted by root.

    Accepts a SparsePoly over GF(p)/QQ or a low-to-high integer coefficient
    list (then ``p`` is required).  Multiplicity is read off the squarefree
    decomposition (equivalently gcd chains with the derivative).
    """
    if isinstance(f, SparsePoly):
        dom = f.domain
        if hasattr(dom, "p") and p is None:
            p = dom.p
        if p is None:
            raise TypeError("roots_mod_p needs a prime")
        gf = GF(p)
        coeffs = [0] * (f.total_degree() + 1)
        for m, c in f.coeffs.items():
            coeffs[m[0]] = gf.coerce(c).value
    else:
        if p is None:
            raise TypeError("roots_mod_p needs a prime")
        coeffs = [int(c) % p for c in f]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("root finding on the zero polynomial")
    gf = GF(p)
    _, facs = factor_univariate([gf.from_int(c) for c in coeffs], gf)
    out = [((-fac[0]).value, mult) for fac, mult in facs if len(fac) == 2]
    return sorted(out)


# ---------------------------------------------------------------------------
# Search spaces, shards, predicates.

@dataclass(frozen=True)
class SearchSpace:
    p: int
    arity: int
    ranges: tuple  # ((lo, hi), ...) half-open, one per coordinate
    constraints: tuple = ()  # polynomial texts in x1..xn, must vanish
    predicate: str = "always"
    predicate_params: tuple = ()  # sorted (key, json-value) pairs

    @classmethod
    def build(cls, p: int, arity: int, ranges=None, constraints=(),
              predicate: str = "always", predicate_params: dict | None = None):
        if ranges is None:
            ranges = tuple((0, p) for _ in range(arity))
        params = tuple(sorted((k, json.dumps(v, sort_keys=True))
                              for k, v in (predicate_params or {}).items()))
        return cls(p, arity, tuple(tuple(r) for r in ranges),
                   tuple(constraints), predicate, params)

    def var_names(self):
        return tuple(f"x{i+1}" for i in range(self.arity))

    def params_dict(self) -> dict:
        return {k: json.loads(v) for k, v in self.predicate_params}

    def total(self) -> int:
        n = 1
        for lo, hi in self.ranges:
            n *= max(0, hi - lo)
        return n

    def space_hash(self) -> str:
        payload = json.dumps({
            "p": self.p, "arity": self.arity, "ranges": self.ranges,
            "constraints": self.constraints, "predicate": self.predicate,
            "params": self.predicate_params,
        }, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def as_json(self) -> dict:
        return {"p": self.p, "arity": self.arity,
                "ranges": [list(r) for r in self.ranges],
                "constraints": list(self.constraints),
                "predicate": self.predicate,
                "predicate_params": self.params_dict()}

    @classmethod
    def from_json(cls, d: dict) -> "SearchSpace":
        return cls.build(d["p"], d["arity"], d.get("ranges"),
                         tuple(d.get("constraints", ())),
                         d.get("predicate", "always"),
                         d.get("predicate_params"))


@dataclass(frozen=True)
class Shard:
    """A contiguous slice of the first coordinate; shards partition the
    space and enumeration inside a shard is lexicographic."""

    id: int
    lo: tuple
    hi: tuple

    def as_json(self):
        return {"id": self.id, "lo": list(self.lo), "hi": list(self.hi)}


def make_shards(space: SearchSpace, count: int) -> list[Shard]:
    lo0, hi0 = space.ranges[0]
    width = hi0 - lo0
    count = max(1, min(count, width)) if width else 1
    bounds = [lo0 + (width * i) // count for i in range(count + 1)]
    shards = []
    for i in range(count):
        lo = (bounds[i],) + tuple(r[0] for r in space.ranges[1:])
        hi = (bounds[i + 1],) + tuple(r[1] for r in space.ranges[1:])
        shards.append(Shard(i, lo, hi))
    return shards


@dataclass
class SearchHit:
    params: tuple
    diagnostics: dict = field(default_factory=dict)
    shard: int = 0

    def as_json(self):
        return {"params": list(self.params), "diagnostics": self.diagnostics,
                "shard": self.shard}


def _predicate_always(space, domain):
    def run(values):
        return True, {}
    return run


def _predicate_vanishes(space, domain):
    params = space.params_dict()
    names = tuple(params.get("vars", space.var_names()))
    polys = [parse_poly(s, domain, names) for s in params["polys"]]

    def run(values):
        pt = {n: domain.from_int(v) for n, v in zip(names, values)}
        return all(not f.evaluate(pt) for f in polys), {}

    return run


def _predicate_point_rank(space, domain):
    """Data-driven singularity predicate: a polynomial system, point
    formulas in the scan parameters, and a rank threshold.  Accepts a tuple
    when the Jacobian rank at every listed point drops to the threshold or
    below; diagnostics carry the evaluated points and their ranks."""
    params = space.params_dict()
    ambient = tuple(params["ambient_vars"])
    scan_vars = tuple(params.get("scan_vars", space.var_names()))
    allvars = ambient + scan_vars
    system = [parse_poly(s, domain, allvars) for s in params["system"]]
    points = params["points"]  # list of {ambient var: poly in scan vars}
    max_rank = int(params["max_rank"])
    point_polys = [{v: parse_poly(s, domain, scan_vars) for v, s in pt.items()}
                   for pt in points]

    def run(values):
        scan_pt = {n: domain.from_int(v) for n, v in zip(scan_vars, values)}
        coords_out, ranks = [], []
        for formulas in point_polys:
            full = dict(scan_pt)
            coords = {}
            for v in ambient:
                coords[v] = formulas[v].evaluate(scan_pt)
                full[v] = coords[v]
            rank = jacobian_rank_at_point(
                [f for f in system], {**full})
            coords_out.append({v: str(coords[v]) for v in ambient})
            ranks.append(rank)
        ok = all(r <= max_rank for r in ranks)
        return ok, {"points": coords_out, "jacobian_ranks": ranks}

    return run


PREDICATES: dict[str, Callable] = {
    "always": _predicate_always,
    "vanishes": _predicate_vanishes,
    "point_rank_drop": _predicate_point_rank,
}


def register_predicate(name: str, factory: Callable) -> None:
    PREDICATES[name] = factory


# ---------------------------------------------------------------------------
# Scanning.

def _iter_box(lo, hi):
    n = len(lo)
    cur = list(lo)
    if any(l >= h for l, h in zip(lo, hi)):
        return
    while True:
        yield tuple(cur)
        for i in range(n - 1, -1, -1):
            cur[i] += 1
            if cur[i] < hi[i]:
                break
            cur[i] = lo[i]
        else:
            return


def scan(space: SearchSpace, shard: Shard | None = None) -> list[SearchHit]:
    """Every tuple of the shard satisfying the constraints and the
    predicate, in lexicographic order; fully deterministic."""
    if space.predicate not in PREDICATES:
        raise UnknownPredicate(space.predicate)
    domain = GF(space.p)
    names = space.var_names()
    constraints = [parse_poly(s, domain, names) for s in space.constraints]
    pred = PREDICATES[space.predicate](space, domain)
    lo = shard.lo if shard else tuple(r[0] for r in space.ranges)
    hi = shard.hi if shard else tuple(r[1] for r in space.ranges)
    sid = shard.id if shard else 0
    hits = []
    for values in _iter_box(lo, hi):
        pt = {n: domain.from_int(v) for n, v in zip(names, values)}
        if any(f.evaluate(pt) for f in constraints):
            continue
        ok, diag = pred(values)
        if ok:
            hits.append(SearchHit(values, diag, sid))
    return hits


def scan_sharded(space: SearchSpace, nshards: int) -> list[SearchHit]:
    hits = []
    for shard in make_shards(space, nshards):
        hits.extend(scan(space, shard))
    hits.sort(key=lambda h: h.params)
    return hits


# ---------------------------------------------------------------------------
# Checkpointing: shard-granular resume; the scanning caller is the single
# writer.

def checkpoint_load(path) -> dict | None:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        return None


def checkpoint_save(path, space: SearchSpace, completed: Iterable[int],
                    hits: Sequence[SearchHit]) -> None:
    payload = {
        "space_hash": space.space_hash(),
        "completed_shards": sorted(set(completed)),
        "hits": [h.as_json() for h in
                 sorted(hits, key=lambda h: h.params)],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
    import os
    os.replace(tmp, path)


def scan_with_checkpoint(space: SearchSpace, nshards: int, path) -> list[SearchHit]:
    """Shard-by-shard scan that persists progress and resumes after a crash."""
    state = checkpoint_load(path)
    completed: set[int] = set()
    hits: list[SearchHit] = []
    if state and state.get("space_hash") == space.space_hash():
        completed = set(state["completed_shards"])
        hits = [SearchHit(tuple(h["params"]), h["diagnostics"], h["shard"])
                for h in state["hits"]]
    for shard in make_shards(space, nshards):
        if shard.id in completed:
            continue
        hits.extend(scan(space, shard))
        completed.add(shard.id)
        checkpoint_save(path, space, completed, hits)
    hits.sort(key=lambda h: h.params)
    return hits


# ---------------------------------------------------------------------------
# Bench: vectorized univariate evaluation throughput.

def eval_poly_batch(coeffs: Sequence[int], xs, p: int):
    """Horner evaluation of an integer polynomial on a batch of residues."""
    if _np is not None:
        arr = _np.asarray(xs, dtype=_np.int64)
        acc = _np.zeros_like(arr)
        for c in reversed([c % p for c in coeffs]):
            acc = (acc * arr + c) % p
        return acc
    out = []
    cs = [c % p for c in coeffs]
    for x in xs:
        acc = 0
        for c in reversed(cs):
            acc = (acc * x + c) % p
        out.append(acc)
    return out


def bench_eval_throughput(coeffs: Sequence[int], p: int = 79,
                          batch: int = 1 << 20, seconds: float = 0.5) -> float:
    """Evaluations per second of the degree-(len-1) polynomial at p;
    exercised by the acceptance bench (soft target 1e6/s/core)."""
    import time

    if _np is not None:
        rng = _np.random.default_rng(DEFAULT_SEED)
        xs = rng.integers(0, p, size=batch, dtype=_np.int64)
    else:
        import random
        r = random.Random(DEFAULT_SEED)
        xs = [r.randrange(p) for _ in range(min(batch, 1 << 14))]
    # correctness spot-check against the exact oracle
    sample = [int(xs[i]) for i in range(0, min(64, len(xs)))]
    got = eval_poly_batch(coeffs, sample, p)
    dom = GF(p)
    for x, g in zip(sample, got):
        acc = dom.zero
        for c in reversed(coeffs):
            acc = acc * dom.from_int(x) + dom.from_int(c)
        assert acc.value == int(g) % p
    n = 0
    t0 = time.perf_counter()
    while time.perf_counter() - t0 < seconds:
        eval_poly_batch(coeffs, xs, p)
        n += len(xs)
    dt = time.perf_counter() - t0
    return n / dt
