"""Shipped datasets (surface presentations, curve parameterizations, forms)
and the bigraded ring machinery: module basis, product rewriting,
associativity checking, and constraint generation.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from . import arith
from .arith import QI7, QQ
from .poly import (SparsePoly, WeightTable, bidegree, jacobian, parse_statements,
                   ring, substitute)

DATA_DIR = Path(__file__).parent / "data"

#: the nine pure quadratic monomials that get rewritten, in rewrite order;
#: the retained module generator is the remaining pair (index 0, index 2)
PAIR_ORDER = [(2, 0, 0, 0), (1, 1, 0, 0), (1, 0, 0, 1), (0, 2, 0, 0),
              (0, 1, 1, 0), (0, 1, 0, 1), (0, 0, 2, 0), (0, 0, 1, 1),
              (0, 0, 0, 2)]
GENERATOR_PAIR = (1, 0, 1, 0)  # the section product kept as a basis element
BASIS_VPARTS = [(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0),
                (0, 0, 1, 0), (0, 0, 0, 1), GENERATOR_PAIR]
BASIS_LABELS = ("1", "3", "4", "5", "6", "g")


class DatasetError(ValueError):
    pass


class RewriteSingular(ZeroDivisionError):
    """A rewrite pivot is zero; the system cannot be put on the module basis."""


@dataclass(frozen=True)
class Dataset:
    id: str
    kind: str
    domain: object
    vars: tuple
    polys: tuple
    style: str | None
    bidegrees: tuple | None
    path: Path
    sha256: str


_manifest_cache = None
_dataset_cache: dict[str, Dataset] = {}


def manifest() -> dict:
    global _manifest_cache
    if _manifest_cache is None:
        with open(DATA_DIR / "manifest.json") as fh:
            _manifest_cache = json.load(fh)
    return _manifest_cache


def dataset_ids() -> list[str]:
    return sorted(manifest()["datasets"])


def load_dataset(dsid: str) -> Dataset:
    if dsid in _dataset_cache:
        return _dataset_cache[dsid]
    try:
        entry = manifest()["datasets"][dsid]
    except KeyError:
        raise DatasetError(f"unknown dataset {dsid!r}") from None
    path = DATA_DIR / entry["path"]
    raw = path.read_text()
    digest = hashlib.sha256(raw.encode()).hexdigest()
    if digest != entry["sha256"]:
        raise DatasetError(f"dataset {dsid} content hash mismatch")
    domain = {"QQ": QQ, "QI7": QI7}[entry["domain"]]
    polys = tuple(parse_statements(raw, domain, tuple(entry["vars"])))
    ds = Dataset(
        id=dsid, kind=entry["kind"], domain=domain, vars=tuple(entry["vars"]),
        polys=polys, style=entry.get("style"),
        bidegrees=tuple(tuple(b) for b in entry["bidegrees"]) if "bidegrees" in entry else None,
        path=path, sha256=digest,
    )
    _dataset_cache[dsid] = ds
    return ds


def verify_dataset_integrity(dsid: str) -> bool:
    """Hash match (checked on load) and declared bidegrees where present."""
    ds = load_dataset(dsid)
    if ds.bidegrees:
        style = ds.style or "w"
        extra = [v for v in ds.vars if v[0] not in ("u", style)]
        wt = WeightTable.standard(style, extra=extra)
        got = tuple(bidegree(f, wt) for f in ds.polys[:len(ds.bidegrees)])
        if got != ds.bidegrees:
            raise DatasetError(f"{dsid}: bidegrees {got} != declared {ds.bidegrees}")
    return True


def s2_minpoly_coeffs() -> list[int]:
    """Integer coefficients (low to high) of the degree-12 parameter polynomial."""
    ds = load_dataset("S2MINPOLY")
    f = ds.polys[0]
    out = [0] * (f.degree_in("s2") + 1)
    for m, c in f.coeffs.items():
        assert c.denominator == 1
        out[m[0]] = c.numerator
    return out


def s2_roots_79() -> list[int]:
    ds = load_dataset("S2_ROOTS_79")
    return sorted(int(f.constant_coefficient()) for f in ds.polys)


# ---------------------------------------------------------------------------
# Quadric systems and the module-basis rewriting engine.

@dataclass(frozen=True)
class QuadricSystem:
    """A surface presentation: 9 bihomogeneous quadrics in u0,u1 and six
    section coordinates (v or w style)."""

    quadrics: tuple
    style: str

    @property
    def domain(self):
        return self.quadrics[0].domain

    @property
    def vars(self):
        return self.quadrics[0].vars

    def weight_table(self) -> WeightTable:
        extra = [v for v in self.vars if v[0] not in ("u", self.style)]
        return WeightTable.standard(self.style, extra=extra)

    def section_vars(self):
        return tuple(f"{self.style}{i}" for i in range(1, 7))


def y0_system(dsid: str) -> QuadricSystem:
    ds = load_dataset(dsid)
    if ds.kind != "quadric_system":
        raise DatasetError(f"{dsid} is not a quadric system")
    return QuadricSystem(ds.polys, ds.style or "w")


def nine_param_symbolic() -> QuadricSystem:
    """The nine-parameter family verbatim, over QQ with d1..d9 as variables."""
    return y0_system("NINE_PARAM_FAMILY")


def instantiate_nine_param(d_values: Sequence, domain) -> QuadricSystem:
    """Substitute field values for the parameters d1..d9.

    Requires d2*d9 invertible (the rewrite pivots); raises RewriteSingular
    otherwise.
    """
    if len(d_values) != 9:
        raise ValueError("need exactly nine parameter values")
    vals = [domain.coerce(v) for v in d_values]
    if not vals[1] or not vals[8]:
        raise RewriteSingular("pivot parameters d2 and d9 must be nonzero")
    base = load_dataset("NINE_PARAM_FAMILY")
    keep = tuple(v for v in base.vars if not v.startswith("d"))
    out = []
    for f in base.polys:
        g = SparsePoly(domain, f.vars,
                       {m: domain.coerce(c) for m, c in f.coeffs.items()})
        g = g.specialize({f"d{i}": vals[i - 1] for i in range(1, 10)})
        out.append(g.extend(keep) if g.vars != keep else g)
    return QuadricSystem(tuple(out), "v")


class RewriteEngine:
    """Rewrites products of section coordinates onto the free module basis
    {1, v3, v4, v5, v6, g} over u0,u1,v1,v2 using the nine quadrics."""

    def __init__(self, sys: QuadricSystem):
        self.sys = sys
        self.vars = sys.vars
        self.domain = sys.domain
        style = sys.style
        self.vidx = [self.vars.index(f"{style}{i}") for i in range(3, 7)]
        self.rules = {}
        for f in sys.quadrics:
            # one rewrite rule per quadric: its first unassigned pure pair
            for pair in PAIR_ORDER:
                if pair in self.rules:
                    continue
                mono = self._pure_mono(pair)
                c = f.coeffs.get(mono)
                if c is None:
                    continue
                try:
                    inv = c.inverse() if hasattr(c, "inverse") else 1 / c
                except ZeroDivisionError:
                    raise RewriteSingular(f"pivot {pair} not invertible") from None
                rest = f - SparsePoly(self.domain, self.vars, {mono: c}, _clean=True)
                self.rules[pair] = rest * (-inv)
                break
        missing = [p for p in PAIR_ORDER if p not in self.rules]
        if missing:
            raise RewriteSingular(f"no invertible pivot for pairs {missing}")

    def _pure_mono(self, pair):
        mono = [0] * len(self.vars)
        for k, e in zip(self.vidx, pair):
            mono[k] = e
        return tuple(mono)

    def _vpart(self, mono):
        return tuple(mono[k] for k in self.vidx)

    def reduce(self, expr: SparsePoly) -> SparsePoly:
        """Canonical module-basis representative of expr."""
        work = expr
        while True:
            target = None
            for mono in work.coeffs:
                vp = self._vpart(mono)
                if sum(vp) >= 2 and vp != (1, 0, 1, 0):
                    target = mono
                    break
            if target is None:
                return work
            vp = self._vpart(target)
            pair = next(p for p in PAIR_ORDER
                        if all(e >= q for e, q in zip(vp, p)))
            c = work.coeffs[target]
            cof = list(target)
            for k, e in zip(self.vidx, pair):
                cof[k] -= e
            cofactor = SparsePoly(self.domain, self.vars, {tuple(cof): c}, _clean=True)
            work = work - SparsePoly(self.domain, self.vars, {target: c}, _clean=True) \
                + cofactor * self.rules[pair]

    def module_element(self, expr: SparsePoly) -> dict:
        """Coordinates on the basis {1, v3, v4, v5, v6, g}, as polynomials in
        the base variables."""
        reduced = self.reduce(expr)
        coords = {label: SparsePoly.zero(self.domain, self.vars)
                  for label in BASIS_LABELS}
        for mono, c in reduced.coeffs.items():
            vp = self._vpart(mono)
            label = BASIS_LABELS[BASIS_VPARTS.index(vp)]
            base = list(mono)
            for k in self.vidx:
                base[k] = 0
            coords[label] = coords[label] + SparsePoly(
                self.domain, self.vars, {tuple(base): c}, _clean=True)
        return coords


def reduce_to_basis(expr: SparsePoly, sys: QuadricSystem) -> dict:
    """Canonical module-basis coordinates of an expression in the section
    coordinates (see RewriteEngine.module_element)."""
    return RewriteEngine(sys).module_element(expr)


@dataclass
class AssocReport:
    ok: bool
    failures: list


def check_associativity(sys: QuadricSystem) -> AssocReport:
    """Verify reduce((vi*vj)*vk) == reduce(vi*(vj*vk)) for all i,j,k in
    {3..6}, plus the generator products g*vk."""
    eng = RewriteEngine(sys)
    style = sys.style
    gens = {i: SparsePoly.variable(sys.domain, sys.vars, f"{style}{i}")
            for i in range(3, 7)}
    failures = []
    red = {}
    for i in range(3, 7):
        for j in range(3, 7):
            red[(i, j)] = eng.reduce(gens[i] * gens[j])
    for i in range(3, 7):
        for j in range(3, 7):
            for k in range(3, 7):
                left = eng.reduce(red[(i, j)] * gens[k])
                right = eng.reduce(gens[i] * red[(j, k)])
                if left != right:
                    failures.append((i, j, k))
    g = gens[3] * gens[5]
    for k in range(3, 7):
        left = eng.reduce(eng.reduce(g * gens[k]))
        right = eng.reduce(red[(3, k)] * gens[5])
        if left != right:
            failures.append(("g", k))
    return AssocReport(not failures, failures)


def perturb_quadric(sys: QuadricSystem, index: int, mono, delta=1) -> QuadricSystem:
    """Add delta at one monomial of one quadric (for falsification tests)."""
    f = sys.quadrics[index]
    bump = SparsePoly(f.domain, f.vars, {tuple(mono): f.domain.coerce(delta)})
    quads = list(sys.quadrics)
    quads[index] = f + bump
    return QuadricSystem(tuple(quads), sys.style)


# ---------------------------------------------------------------------------
# Constraint generation.

def line_constraints(sys: QuadricSystem, fiber: tuple) -> list[SparsePoly]:
    """Containment constraints for a parameterized line inside a fixed fiber.

    The line is v_i = alpha_i*r + beta_i*s; each quadric contributes its r^2,
    r*s, s^2 coefficients: 27 polynomials in alpha_1..6, beta_1..6 whose
    common vanishing is exactly containment.
    """
    dom = sys.domain
    style = sys.style
    pvars = tuple(v for v in sys.vars if v not in
                  ("u0", "u1") + sys.section_vars())
    tvars = tuple(f"alpha{i}" for i in range(1, 7)) + \
        tuple(f"beta{i}" for i in range(1, 7)) + ("r", "s") + pvars
    gens = {v: SparsePoly.variable(dom, tvars, v) for v in tvars}
    assign = {"u0": SparsePoly.constant(dom, tvars, fiber[0]),
              "u1": SparsePoly.constant(dom, tvars, fiber[1])}
    for i in range(1, 7):
        assign[f"{style}{i}"] = gens[f"alpha{i}"] * gens["r"] + gens[f"beta{i}"] * gens["s"]
    for v in pvars:
        assign[v] = gens[v]
    out = []
    ri, si = tvars.index("r"), tvars.index("s")
    for q in sys.quadrics:
        img = substitute(q, assign)
        for rs in ((2, 0), (1, 1), (0, 2)):
            sel = {}
            for m, c in img.coeffs.items():
                if (m[ri], m[si]) == rs:
                    mm = list(m)
                    mm[ri] = mm[si] = 0
                    sel[tuple(mm)] = c
            out.append(SparsePoly(dom, tvars, sel, _clean=True))
    return out


def singularity_constraints(system: Sequence[SparsePoly], ambient: Sequence[str],
                            point: Mapping[str, SparsePoly]):
    """Maximal minors of the Jacobian evaluated at a parameter-dependent
    point, plus their gcd over the parameter ring and the gcd-cleared minors.

    Returns (minors, gcd, cleared).  The vanishing of the cleared minors is
    the rank-drop condition with spurious common factors removed.
    """
    J = jacobian(list(system), ambient)
    target = next(iter(point.values()))
    images = dict(point)
    for v in target.vars:
        if v not in images:
            images[v] = SparsePoly.variable(target.domain, target.vars, v)
    JP = [[substitute(e, images) if not e.is_zero()
           else SparsePoly.zero(target.domain, target.vars) for e in row]
          for row in J]
    m, n = len(JP), len(JP[0])
    size = min(m, n)
    minors = []
    from itertools import combinations

    for rows in combinations(range(m), size):
        for cols in combinations(range(n), size):
            minors.append(_det([[JP[r][c] for c in cols] for r in rows]))
    minors = [f for f in minors if not f.is_zero()]
    if not minors:
        return [], None, []
    g = minors[0]
    for f in minors[1:]:
        g = polynomial_gcd(g, f)
        if g.total_degree() == 0:
            break
    if g.total_degree() == 0:
        cleared = list(minors)
    else:
        cleared = [exact_div(f, g) for f in minors]
    return minors, g, cleared


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    acc = None
    for j in range(n):
        if mat[0][j].is_zero():
            continue
        sub = [[row[k] for k in range(n) if k != j] for row in mat[1:]]
        term = mat[0][j] * _det(sub)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    if acc is None:
        z = mat[0][0]
        return SparsePoly.zero(z.domain, z.vars)
    return acc


# -- multivariate gcd (primitive PRS), used only on small inputs ------------

def _as_univariate(f: SparsePoly, var: str):
    """View f in (domain[others])[var]: list of coefficient polys, low to high."""
    i = f.vars.index(var)
    deg = f.degree_in(var)
    coeffs = [dict() for _ in range(deg + 1)]
    for m, c in f.coeffs.items():
        mm = list(m)
        e = mm[i]
        mm[i] = 0
        coeffs[e][tuple(mm)] = c
    return [SparsePoly(f.domain, f.vars, d, _clean=True) for d in coeffs]


def _from_univariate(coeffs, var: str):
    f0 = coeffs[0]
    i = f0.vars.index(var)
    out = {}
    for e, c in enumerate(coeffs):
        for m, v in c.coeffs.items():
            mm = list(m)
            mm[i] += e
            out[tuple(mm)] = v
    return SparsePoly(f0.domain, f0.vars, out, _clean=True)


def polynomial_gcd(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """GCD over domain[vars] by cascaded univariate pseudo-remainder
    sequences; normalized so the leading coefficient (grevlex) is one."""
    from .grobner import GREVLEX, lead

    if f.is_zero():
        return _gcd_normalize(g)
    if g.is_zero():
        return _gcd_normalize(f)
    active = [v for v in f.vars if f.degree_in(v) or g.degree_in(v)]
    if not active:
        return SparsePoly.constant(f.domain, f.vars, f.domain.one)
    var = active[0]
    if len(active) == 1 and f.vars == (var,):
        from .grobner import _uni_gcd, unipoly_from_sparse
        u = _uni_gcd(unipoly_from_sparse(f, var), unipoly_from_sparse(g, var))
        return SparsePoly(f.domain, f.vars, {(e,): c for e, c in enumerate(u)})
    fu, gu = _as_univariate(f, var), _as_univariate(g, var)
    cf, cg = _poly_list_content(fu), _poly_list_content(gu)
    cont = polynomial_gcd(cf, cg)
    fu = [exact_div(c, cf) for c in fu]
    gu = [exact_div(c, cg) for c in gu]
    # primitive PRS on the primitive parts
    a, b = (fu, gu) if len(fu) >= len(gu) else (gu, fu)
    while True:
        if not b:
            prim = _from_univariate(a, var)
            break
        if len(b) == 1:
            # b is primitive and free of var, so it is a unit: gcd of the
            # primitive parts is 1
            prim = SparsePoly.constant(f.domain, f.vars, f.domain.one)
            break
        r = _pseudo_rem(a, b)
        r = [c for c in r]
        while r and r[-1].is_zero():
            r.pop()
        if r:
            rc = _poly_list_content(r)
            r = [exact_div(c, rc) for c in r]
        a, b = b, r
    result = cont * prim
    return _gcd_normalize(result)


def _gcd_normalize(f: SparsePoly) -> SparsePoly:
    from .grobner import GREVLEX, _monic

    if f.is_zero():
        return f
    return _monic(f, GREVLEX)


def _poly_list_content(coeffs):
    acc = None
    for c in coeffs:
        if c.is_zero():
            continue
        acc = c if acc is None else polynomial_gcd(acc, c)
        if acc.total_degree() == 0:
            break
    return acc


def _pseudo_rem(a, b):
    """Pseudo-remainder of coefficient lists (univariate over a poly ring)."""
    lb = b[-1]
    r = list(a)
    while len(r) >= len(b) and r:
        if r[-1].is_zero():
            r.pop()
            continue
        shift = len(r) - len(b)
        lr = r[-1]
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[shift + i] = r[shift + i] - c * lr
        while r and r[-1].is_zero():
            r.pop()
    return r


def exact_div(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """Exact polynomial division (raises if not divisible)."""
    from .grobner import GREVLEX, lead, normal_form
    from .poly import mono_div

    if g.total_degree() == 0:
        c = g.constant_coefficient()
        inv = c.inverse() if hasattr(c, "inverse") else 1 / c
        return f * inv
    q = SparsePoly.zero(f.domain, f.vars)
    r = f
    gl, gc = lead(g, GREVLEX)
    while not r.is_zero():
        rl, rc = lead(r, GREVLEX)
        d = mono_div(rl, gl)
        if d is None:
            raise ArithmeticError("not divisible")
        t = SparsePoly(f.domain, f.vars, {d: rc / gc})
        q = q + t
        r = r - t * g
    return q


# ---------------------------------------------------------------------------
# Graded dimension series.

@dataclass
class GradedSeries:
    """Truncated series sum dim_{a,b} s^b t^a together with its closed form
    numerator/denominator data."""

    table: list  # table[b][a]
    numerator: tuple  # ((m, n), multiplicity) pairs: sum mult * s^m t^n
    denominator: tuple  # (m, n) factors: product (1 - s^m t^n)

    def coefficient(self, a: int, b: int) -> int:
        return self.table[b][a]

    def closed_form(self) -> str:
        terms = []
        for (m, n), mult in self.numerator:
            if (m, n) == (0, 0):
                terms.append(str(mult))
            else:
                c = "" if mult == 1 else f"{mult}*"
                sm = "" if m == 0 else ("s" if m == 1 else f"s^{m}")
                tn = "" if n == 0 else ("t" if n == 1 else f"t^{n}")
                terms.append(c + "*".join(x for x in (sm, tn) if x))
        num = " + ".join(terms)
        den = "".join(
            f"(1-{'s' if m == 1 else f's^{m}' if m else ''}"
            f"{'t' if n == 1 else f't^{n}' if n else ''})"
            for m, n in self.denominator)
        return f"({num})/{den}"


def graded_series(generators: Sequence[tuple], base_weights: Sequence[tuple],
                  truncation: tuple) -> GradedSeries:
    """Dimension table of a free module with the given generator bidegrees
    over the polynomial base ring with the given variable bidegrees.

    truncation = (A, B): table covers fiber weights a <= A, section counts
    b <= B.
    """
    A, B = truncation
    table = [[0] * (A + 1) for _ in range(B + 1)]
    numer: dict = {}
    for m, n in generators:
        numer[(m, n)] = numer.get((m, n), 0) + 1
        if m <= B and n <= A:
            table[m][n] += 1
    for m, n in base_weights:
        if m == 0 and n == 0:
            raise ValueError("base variable of weight (0,0)")
        for b in range(B + 1):
            for a in range(A + 1):
                if b >= m and a >= n:
                    table[b][a] += table[b - m][a - n]
    return GradedSeries(
        table,
        tuple(sorted(numer.items())),
        tuple(sorted(base_weights)),
    )
