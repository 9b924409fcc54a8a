"""Sparse multivariate polynomials over the exact domains, with the bigrading
used by the surface presentations.

A polynomial is a map monomial -> nonzero coefficient over a fixed variable
tuple and coefficient domain.  Mixing domains or variable tuples raises
TypeError; crossing domains is an explicit ``map_coefficients`` call.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import arith
from .arith import Domain, QuadElem, embed_quad, format_scalar, parse_scalar


class Inhomogeneous(ValueError):
    """All terms of a bigraded polynomial must share one bidegree."""


Monomial = tuple  # exponent vector aligned with the variable tuple


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial):
    """a / b, or None when b does not divide a."""
    out = []
    for x, y in zip(a, b):
        if x < y:
            return None
        out.append(x - y)
    return tuple(out)


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def grevlex_key(e: Monomial):
    """Sort key: graded-reverse-lexicographic refined by variable index."""
    return (sum(e), tuple(-x for x in reversed(e)))


class SparsePoly:
    __slots__ = ("domain", "vars", "coeffs")

    def __init__(self, domain: Domain, vars: Sequence[str],
                 coeffs: Mapping[Monomial, object] | None = None,
                 _clean: bool = False):
        self.domain = domain
        self.vars = tuple(vars)
        if coeffs is None:
            self.coeffs = {}
        elif _clean:
            self.coeffs = dict(coeffs)
        else:
            self.coeffs = {tuple(m): c for m, c in coeffs.items() if c}

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, domain, vars):
        return cls(domain, vars, {}, _clean=True)

    @classmethod
    def constant(cls, domain, vars, value):
        value = domain.coerce(value)
        z = (0,) * len(vars)
        return cls(domain, vars, {z: value} if value else {}, _clean=True)

    @classmethod
    def variable(cls, domain, vars, name):
        i = tuple(vars).index(name)
        e = tuple(1 if j == i else 0 for j in range(len(vars)))
        return cls(domain, vars, {e: domain.one}, _clean=True)

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.coeffs), default=0)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((m[i] for m in self.coeffs), default=0)

    def constant_coefficient(self):
        return self.coeffs.get((0,) * len(self.vars), self.domain.zero)

    def terms(self):
        """Terms in descending canonical (grevlex) order."""
        return sorted(self.coeffs.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def _compat(self, other):
        if isinstance(other, SparsePoly):
            if other.domain != self.domain:
                raise TypeError(f"mixed domains {self.domain} and {other.domain}")
            if other.vars != self.vars:
                raise TypeError(f"mixed variable sets {self.vars} and {other.vars}")
            return other
        try:
            return SparsePoly.constant(self.domain, self.vars, other)
        except TypeError:
            return None

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        other = self._compat(other)
        if other is None:
            return NotImplemented
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return SparsePoly(self.domain, self.vars, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.domain, self.vars,
                          {m: -c for m, c in self.coeffs.items()}, _clean=True)

    def __sub__(self, other):
        other = self._compat(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            try:
                c = self.domain.coerce(other)
            except TypeError:
                return NotImplemented
            if not c:
                return SparsePoly.zero(self.domain, self.vars)
            return SparsePoly(self.domain, self.vars,
                              {m: v * c for m, v in self.coeffs.items()}, _clean=True)
        other = self._compat(other)
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                c = c1 * c2
                s = out.get(m)
                if s is None:
                    if c:
                        out[m] = c
                else:
                    s = s + c
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return SparsePoly(self.domain, self.vars, out, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = SparsePoly.constant(self.domain, self.vars, self.domain.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return (self.domain == other.domain and self.vars == other.vars
                    and self.coeffs == other.coeffs)
        compat = self._compat(other)
        if compat is None:
            return NotImplemented
        return self.coeffs == compat.coeffs

    def __hash__(self):
        return hash((self.domain, self.vars, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"SparsePoly({self.domain}, {format_poly(self)!r})"

    # -- calculus and evaluation ----------------------------------------------

    def diff(self, name: str) -> "SparsePoly":
        i = self.vars.index(name)
        out = {}
        for m, c in self.coeffs.items():
            if m[i] == 0:
                continue
            d = c * self.domain.from_int(m[i])
            if not d:
                continue  # characteristic divides the exponent
            m2 = m[:i] + (m[i] - 1,) + m[i + 1:]
            prev = out.get(m2)
            out[m2] = d if prev is None else prev + d
        return SparsePoly(self.domain, self.vars, out)

    def evaluate(self, point: Mapping[str, object]):
        """Evaluate at scalars covering every variable; returns a scalar."""
        vals = [self.domain.coerce(point[v]) for v in self.vars]
        acc = self.domain.zero
        for m, c in self.coeffs.items():
            term = c
            for x, e in zip(vals, m):
                for _ in range(e):
                    term = term * x
            acc = acc + term
        return acc

    def specialize(self, values: Mapping[str, object]) -> "SparsePoly":
        """Plug scalars into a subset of the variables; the result lives on
        the remaining variable tuple."""
        idx = {self.vars.index(v): self.domain.coerce(x) for v, x in values.items()}
        keep = [i for i in range(len(self.vars)) if i not in idx]
        newvars = tuple(self.vars[i] for i in keep)
        out: dict = {}
        for m, c in self.coeffs.items():
            for i, x in idx.items():
                for _ in range(m[i]):
                    c = c * x
                if not c:
                    break
            if not c:
                continue
            m2 = tuple(m[i] for i in keep)
            s = out.get(m2)
            if s is None:
                out[m2] = c
            else:
                s = s + c
                if s:
                    out[m2] = s
                else:
                    del out[m2]
        return SparsePoly(self.domain, newvars, out, _clean=True)

    def extend(self, vars: Sequence[str]) -> "SparsePoly":
        """Re-express on a larger variable tuple (must contain the current one)."""
        vars = tuple(vars)
        pos = [vars.index(v) for v in self.vars]
        out = {}
        for m, c in self.coeffs.items():
            m2 = [0] * len(vars)
            for p, e in zip(pos, m):
                m2[p] = e
            out[tuple(m2)] = c
        return SparsePoly(self.domain, vars, out, _clean=True)


def ring(domain, names: Sequence[str]) -> list[SparsePoly]:
    """Generators of domain[names]."""
    names = tuple(names)
    return [SparsePoly.variable(domain, names, n) for n in names]


def map_coefficients(f: SparsePoly, domain, fn: Callable) -> SparsePoly:
    out = {}
    for m, c in f.coeffs.items():
        v = fn(c)
        if v:
            out[m] = v
    return SparsePoly(domain, f.vars, out, _clean=True)


def to_gf(f: SparsePoly, p: int, branch: str = "plus") -> SparsePoly:
    """Reduce a QQ or QI7 polynomial mod p (QuadElem coefficients via the
    chosen embedding of sqrt(-7))."""
    dom = arith.GF(p)

    def red(c):
        if isinstance(c, QuadElem):
            return dom.from_int(embed_quad(c, p, 1, branch).value)
        return dom.coerce(c)

    return map_coefficients(f, dom, red)


def to_zmod(f: SparsePoly, p: int, k: int, branch: str = "plus") -> SparsePoly:
    dom = arith.Zmod(p, k)

    def red(c):
        if isinstance(c, QuadElem):
            return embed_quad(c, p, k, branch)
        return dom.coerce(c)

    return map_coefficients(f, dom, red)


def substitute(f: SparsePoly, assignment: Mapping[str, SparsePoly]) -> SparsePoly:
    """Exact composition: every variable of f is replaced by a polynomial.

    All assigned polynomials must live on one common ring, which becomes the
    ring of the result.
    """
    missing = [v for v in f.vars if v not in assignment]
    if missing:
        raise KeyError(f"assignment misses variables {missing}")
    images = {v: assignment[v] for v in f.vars}
    first = next(iter(images.values()))
    target_vars, domain = first.vars, first.domain
    if domain != f.domain:
        raise TypeError(f"substitution across domains {f.domain} -> {domain}")
    for g in images.values():
        if g.vars != target_vars or g.domain != domain:
            raise TypeError("substitution images live on different rings")
    one = SparsePoly.constant(domain, target_vars, domain.one)
    powers: dict[tuple[str, int], SparsePoly] = {}

    def power(v: str, e: int) -> SparsePoly:
        key = (v, e)
        got = powers.get(key)
        if got is None:
            got = images[v] ** e if e > 1 else (images[v] if e == 1 else one)
            powers[key] = got
        return got

    acc = SparsePoly.zero(domain, target_vars)
    for m, c in f.coeffs.items():
        term = SparsePoly.constant(domain, target_vars, c)
        for v, e in zip(f.vars, m):
            if e:
                term = term * power(v, e)
        acc = acc + term
    return acc


def jacobian(system: Sequence[SparsePoly], vars: Sequence[str]) -> list[list[SparsePoly]]:
    """Matrix of exact partials: entry (i, j) = d system[i] / d vars[j]."""
    return [[f.diff(v) for v in vars] for f in system]


# ---------------------------------------------------------------------------
# Bigrading.

#: bidegree convention: (section count, fiber weight)
STANDARD_WEIGHTS = {
    "u0": (0, 2), "u1": (0, 3),
    "1": (1, 0), "2": (1, 3), "3": (1, 4), "4": (1, 4), "5": (1, 5), "6": (1, 5),
}


@dataclass(frozen=True)
class WeightTable:
    weights: tuple  # ((var, (m, n)), ...)

    def __getitem__(self, var: str):
        for v, w in self.weights:
            if v == var:
                return w
        return (0, 0)  # free parameters carry weight (0, 0)

    @classmethod
    def standard(cls, style: str = "w", extra: Iterable[str] = ()) -> "WeightTable":
        """The surface weight table for v- or w-style section variables;
        ``extra`` names get weight (0, 0)."""
        tbl = [("u0", (0, 2)), ("u1", (0, 3))]
        for i in range(1, 7):
            tbl.append((f"{style}{i}", STANDARD_WEIGHTS[str(i)]))
        for name in extra:
            tbl.append((name, (0, 0)))
        return cls(tuple(tbl))


def bidegree(f: SparsePoly, table: WeightTable) -> tuple[int, int]:
    """The common (section count, fiber weight) of all terms of a nonzero
    polynomial; raises Inhomogeneous when terms disagree."""
    if f.is_zero():
        raise ValueError("bidegree of the zero polynomial is undefined")
    ws = [table[v] for v in f.vars]
    result = None
    for m in f.coeffs:
        deg = (sum(e * w[0] for e, w in zip(m, ws)),
               sum(e * w[1] for e, w in zip(m, ws)))
        if result is None:
            result = deg
        elif result != deg:
            raise Inhomogeneous(f"terms of bidegree {result} and {deg}")
    return result


def is_bihomogeneous(f: SparsePoly, table: WeightTable) -> bool:
    try:
        bidegree(f, table)
        return True
    except Inhomogeneous:
        return False


# ---------------------------------------------------------------------------
# Text format: `coef*u0^3*w1^2` terms joined by +/-, `;`-terminated
# statements, `#` comments.

def format_poly(f: SparsePoly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for m, c in f.terms():
        mono = "*".join(
            f"{v}^{e}" if e > 1 else v
            for v, e in zip(f.vars, m) if e
        )
        cs = format_scalar(c)
        neg = cs.startswith("-") and not cs.startswith("-(")
        if neg:
            cs = cs[1:]
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


def _split_top(s: str, seps: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in seps:
            out.append("".join(cur))
            cur = [ch]
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [t for t in out if t.strip()]


def parse_poly(text: str, domain, vars: Sequence[str]) -> SparsePoly:
    vars = tuple(vars)
    index = {v: i for i, v in enumerate(vars)}
    acc = SparsePoly.zero(domain, vars)
    s = text.strip()
    if s in ("", "0"):
        return acc
    for chunk in _split_top(s, "+-"):
        chunk = chunk.strip()
        sign = 1
        while chunk and chunk[0] in "+-":
            if chunk[0] == "-":
                sign = -sign
            chunk = chunk[1:].strip()
        coeff = domain.one
        mono = [0] * len(vars)
        for factor in _split_top(chunk, "*"):
            factor = factor.strip().lstrip("*").strip()
            if not factor:
                continue
            if factor[0].isalpha() and factor.split("^")[0] in index:
                name, _, exp = factor.partition("^")
                mono[index[name]] += int(exp) if exp else 1
            else:
                coeff = coeff * domain.coerce(parse_scalar(factor))
        if sign < 0:
            coeff = -coeff
        term = SparsePoly(domain, vars, {tuple(mono): coeff})
        acc = acc + term
    return acc


def parse_statements(text: str, domain, vars: Sequence[str]) -> list[SparsePoly]:
    """Parse a dataset file body: `#` comments, `;`-terminated statements."""
    body = "\n".join(
        line.split("#", 1)[0] for line in text.splitlines()
    )
    out = []
    for stmt in body.split(";"):
        if stmt.strip():
            out.append(parse_poly(stmt, domain, vars))
    return out


def format_statements(polys: Sequence[SparsePoly], comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" if c else "#" for c in comments]
    for f in polys:
        lines.append(format_poly(f) + ";")
    return "\n".join(lines) + "\n"
