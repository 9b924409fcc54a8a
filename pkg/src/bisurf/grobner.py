"""Groebner bases over the field domains (F_p, F_{p^2}, Q(i*sqrt(7))):
normal forms, Hilbert functions, zero-dimensional solving, and Jacobian rank
at points.  Includes univariate factorization over finite fields.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Iterable, Sequence

from .arith import Fp2Elem, FpElem, QuadElem, GF, GF2
from .poly import SparsePoly, grevlex_key, mono_div, mono_lcm, mono_mul

DEFAULT_SEED = 0x5EED


class NotHomogeneous(ValueError):
    pass


class Unstabilized(ValueError):
    """Hilbert data did not stabilize up to the requested degree."""


class NotZeroDim(ValueError):
    pass


class ExtensionRequired(ValueError):
    """A solution lives in an extension beyond F_{p^2}."""


class BudgetExceeded(RuntimeError):
    """Pair budget ran out; carries a resumable handle."""

    def __init__(self, handle):
        super().__init__("Groebner budget exceeded")
        self.handle = handle


@dataclass(frozen=True)
class TermOrder:
    kind: str = "grevlex"  # grevlex | lex | wgrevlex
    weights: tuple = ()

    def key(self, mono):
        if self.kind == "grevlex":
            return grevlex_key(mono)
        if self.kind == "lex":
            return tuple(mono)
        if self.kind == "wgrevlex":
            wdeg = sum(e * w for e, w in zip(mono, self.weights))
            return (wdeg,) + grevlex_key(mono)
        raise ValueError(f"unknown term order {self.kind}")


GREVLEX = TermOrder("grevlex")
LEX = TermOrder("lex")


def lead(f: SparsePoly, order: TermOrder):
    """(monomial, coefficient) of the leading term."""
    m = max(f.coeffs, key=order.key)
    return m, f.coeffs[m]


def _content_normalize(f: SparsePoly) -> SparsePoly:
    """Scale by a positive rational so coefficients are integral and
    content-free (QQ / QI7 only); other domains are returned unchanged."""
    if not f.coeffs:
        return f
    sample = next(iter(f.coeffs.values()))
    if isinstance(sample, QuadElem):
        parts = [x for c in f.coeffs.values() for x in (c.a, c.b)]
    elif isinstance(sample, Fraction):
        parts = list(f.coeffs.values())
    else:
        return f
    den = 1
    for x in parts:
        den = den * (x.denominator // gcd(den, x.denominator))
    num = 0
    for x in parts:
        num = gcd(num, abs(x.numerator * (den // x.denominator)))
    if num == 0:
        return f
    scale = Fraction(den, num)
    return f * scale


def _monic(f: SparsePoly, order: TermOrder) -> SparsePoly:
    _, c = lead(f, order)
    if c == f.domain.one:
        return f
    inv = 1 / c if isinstance(c, Fraction) else c.inverse()
    return f * inv


class _WorkMeter:
    """Counts elimination steps so long reductions can be aborted."""

    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def tick(self):
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            raise _OutOfWork()


class _OutOfWork(Exception):
    pass


def normal_form(f: SparsePoly, basis, order: TermOrder | None = None,
                normalize: bool = False, meter: _WorkMeter | None = None
                ) -> SparsePoly:
    """Remainder of f on division by the basis: no remainder term is
    divisible by a leading monomial, and f - NF(f) lies in the ideal."""
    if isinstance(basis, GBasis):
        gens = basis.generators
        order = basis.order
    else:
        gens = list(basis)
        if order is None:
            raise TypeError("normal_form needs a term order with a raw basis")
    if not gens:
        return f
    leads = [lead(g, order) for g in gens]
    remainder = SparsePoly.zero(f.domain, f.vars)
    work = f
    while work.coeffs:
        if meter is not None:
            meter.tick()
        m, c = lead(work, order)
        for (lm, lc), g in zip(leads, gens):
            q = mono_div(m, lm)
            if q is not None:
                factor = c / lc if lc != f.domain.one else c
                work = work - g * SparsePoly(f.domain, f.vars, {q: factor})
                if normalize:
                    work = _content_normalize(work)
                break
        else:
            remainder = remainder + SparsePoly(f.domain, f.vars, {m: c}, _clean=True)
            work = work - SparsePoly(f.domain, f.vars, {m: c}, _clean=True)
    return remainder


def s_poly(f: SparsePoly, g: SparsePoly, order: TermOrder) -> SparsePoly:
    (mf, cf), (mg, cg) = lead(f, order), lead(g, order)
    l = mono_lcm(mf, mg)
    tf = SparsePoly(f.domain, f.vars, {mono_div(l, mf): f.domain.one / cf
                                       if isinstance(cf, Fraction) else cf.inverse()})
    tg = SparsePoly(g.domain, g.vars, {mono_div(l, mg): g.domain.one / cg
                                       if isinstance(cg, Fraction) else cg.inverse()})
    return f * tf - g * tg


@dataclass
class GBHandle:
    """Resumable Buchberger state."""

    generators: list
    pairs: set
    order: TermOrder
    reductions: int = 0
    fast: bool = False
    fast_state: tuple | None = None


@dataclass
class GBasis:
    """Reduced Groebner basis: monic generators, pairwise reduced, sorted by
    leading monomial."""

    generators: list
    order: TermOrder

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    @property
    def lead_monomials(self):
        return [lead(g, self.order)[0] for g in self.generators]

    def contains(self, f: SparsePoly) -> bool:
        return normal_form(f, self).is_zero()


def _update_pairs(G, P, f, order):
    # Gebauer-Moeller pair pruning
    lmf = lead(f, order)[0]
    lmG = [lead(g, order)[0] for g in G]
    t = len(G)
    P = {(i, j) for (i, j) in P
         if (mono_div(mono_lcm(lmG[i], lmG[j]), lmf) is None
             or mono_lcm(lmG[i], lmG[j]) == mono_lcm(lmG[i], lmf)
             or mono_lcm(lmG[i], lmG[j]) == mono_lcm(lmG[j], lmf))}
    by_lcm: dict = {}
    for i in range(t):
        by_lcm.setdefault(mono_lcm(lmG[i], lmf), []).append(i)
    kept = []
    for L in sorted(by_lcm, key=order.key):
        if all(mono_div(L, L2) is None for L2 in kept):
            kept.append(L)
    new_pairs = set()
    for L in kept:
        if not any(mono_lcm(lmG[i], lmf) == mono_mul(lmG[i], lmf) for i in by_lcm[L]):
            new_pairs.add((min(by_lcm[L]), t))
    G.append(f)
    return G, P | new_pairs


def buchberger(gens: Sequence[SparsePoly], order: TermOrder = GREVLEX,
               budget: int | None = None, resume: GBHandle | None = None) -> GBasis:
    """Reduced Groebner basis.  ``budget`` caps the total number of
    elimination steps; on exhaustion BudgetExceeded carries a handle that can
    be passed back via ``resume`` (with a fresh budget) to continue.

    Prime-field inputs take a plain-integer fast path; the generic
    object-coefficient path below doubles as its reference oracle."""
    from .arith import FpDomain

    if resume is not None and getattr(resume, "fast", False):
        return _fp_buchberger([], order, budget, resume=resume)
    if resume is None:
        nonzero = [g for g in gens if not g.is_zero()]
        if not nonzero:
            return GBasis([], order)
        if isinstance(nonzero[0].domain, FpDomain):
            return _fp_buchberger(nonzero, order, budget)
    if resume is not None:
        G, P, order = resume.generators, resume.pairs, resume.order
    else:
        G, P = [], set()
        for f in nonzero:
            G, P = _update_pairs(G, P, _monic(_content_normalize(f), order), order)
    meter = _WorkMeter(budget)
    while P:
        pair = min(P, key=lambda ij: order.key(
            mono_lcm(lead(G[ij[0]], order)[0], lead(G[ij[1]], order)[0])))
        P.remove(pair)
        i, j = pair
        try:
            r = normal_form(s_poly(G[i], G[j], order), G, order,
                            normalize=True, meter=meter)
        except _OutOfWork:
            raise BudgetExceeded(GBHandle(G, P | {pair}, order, meter.used)) from None
        if not r.is_zero():
            G, P = _update_pairs(G, P, _monic(_content_normalize(r), order), order)
    # minimalize
    Gmin = []
    for f in sorted(G, key=lambda h: order.key(lead(h, order)[0])):
        lm = lead(f, order)[0]
        if all(mono_div(lm, lead(g, order)[0]) is None for g in Gmin):
            Gmin.append(f)
    # interreduce
    Gred = []
    for i, f in enumerate(Gmin):
        others = Gmin[:i] + Gmin[i + 1:]
        r = normal_form(f, others, order, normalize=True)
        Gred.append(_monic(_content_normalize(r), order))
    Gred.sort(key=lambda h: order.key(lead(h, order)[0]))
    return GBasis(Gred, order)


# ---------------------------------------------------------------------------
# Hilbert functions.

def _weighted_degree(mono, weights):
    return sum(e * w for e, w in zip(mono, weights))


def _count_monomials(nvars: int, weights, d: int, lead_monos, _memo=None):
    """Number of degree-d monomials not divisible by any lead monomial."""
    count = 0
    mono = [0] * nvars

    def rec(i, rem):
        nonlocal count
        if i == nvars - 1:
            w = weights[i]
            if rem % w == 0:
                mono[i] = rem // w
                if all(mono_div(tuple(mono), lm) is None for lm in lead_monos):
                    count += 1
                mono[i] = 0
            return
        w = weights[i]
        for e in range(rem // w + 1):
            mono[i] = e
            rec(i + 1, rem - e * w)
        mono[i] = 0

    rec(0, d)
    return count


def hilbert_function(gens: Sequence[SparsePoly], degrees: Iterable[int],
                     weights: Sequence[int] | None = None,
                     order: TermOrder = GREVLEX,
                     basis: GBasis | None = None) -> list[int]:
    """Dimensions of the graded pieces of the quotient by a homogeneous ideal."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens and basis is None:
        raise ValueError("empty ideal")
    nvars = len((gens or basis.generators)[0].vars)
    weights = tuple(weights) if weights else (1,) * nvars
    for g in gens:
        degs = {_weighted_degree(m, weights) for m in g.coeffs}
        if len(degs) > 1:
            raise NotHomogeneous(f"generator has degrees {sorted(degs)}")
    gb = basis if basis is not None else buchberger(gens, order)
    lead_monos = gb.lead_monomials
    return [_count_monomials(nvars, weights, d, lead_monos) for d in degrees]


def hilbert_polynomial(values: Sequence[int], degrees: Sequence[int] | None = None
                       ) -> list[Fraction]:
    """Fit the eventual polynomial of an integer sequence sampled at
    consecutive degrees.  The fit is accepted at the smallest difference
    order whose last three entries agree (low degrees may disagree with the
    polynomial and are ignored).  Returns coefficients [c0, c1, ...] of
    sum c_i * T^i."""
    vals = list(values)
    if degrees is None:
        degrees = list(range(len(vals)))
    if any(b - a != 1 for a, b in zip(degrees, degrees[1:])):
        raise ValueError("degrees must be consecutive")
    row = vals
    level = 0
    while True:
        if len(row) >= 3 and row[-1] == row[-2] == row[-3]:
            break
        if len(row) < 4:
            raise Unstabilized(
                f"no stabilized difference tail by order {level}")
        row = [b - a for a, b in zip(row, row[1:])]
        level += 1
    # Newton interpolation on the last level+1 samples (the stable tail)
    n = level + 1
    if len(vals) < n:
        raise Unstabilized("too few values")
    xs = [Fraction(degrees[len(vals) - n + i]) for i in range(n)]
    ys = [Fraction(vals[len(vals) - n + i]) for i in range(n)]
    table = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - j])
    acc = [Fraction(0)] * n
    basis = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for j in range(n):
        for i, v in enumerate(basis):
            acc[i] += v * table[j]
        if j + 1 < n:
            nxt = [Fraction(0)] * n
            for i, v in enumerate(basis):
                if v:
                    nxt[i] -= v * xs[j]
                    if i + 1 < n:
                        nxt[i + 1] += v
            basis = nxt
    while len(acc) > 1 and acc[-1] == 0:
        acc.pop()
    return acc


# ---------------------------------------------------------------------------
# Linear algebra over field domains.

def matrix_rank(rows) -> int:
    if not rows:
        return 0
    m = [list(r) for r in rows]
    nrows, ncols = len(m), len(m[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col] if isinstance(m[rank][col], Fraction) else m[rank][col].inverse()
        m[rank] = [x * inv for x in m[rank]]
        for r in range(nrows):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def solve_linear(rows, rhs):
    """One solution of A x = b over a field domain, or None if inconsistent.
    Free variables are set to zero."""
    if not rows:
        return []
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    nrows, ncols = len(m), len(rows[0])
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col] if isinstance(m[rank][col], Fraction) else m[rank][col].inverse()
        m[rank] = [x * inv for x in m[rank]]
        for r in range(nrows):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, nrows):
        if m[r][ncols]:
            return None
    zero = rhs[0] - rhs[0] if rhs else None
    x = [zero] * ncols
    for r, c in enumerate(pivots):
        x[c] = m[r][ncols]
    return x


def jacobian_rank_at_point(system: Sequence[SparsePoly], point: dict) -> int:
    """Rank of the Jacobian of the system evaluated at the point."""
    if not system:
        return 0
    vars = system[0].vars
    rows = [[f.diff(v).evaluate(point) for v in vars] for f in system]
    return matrix_rank(rows)


# ---------------------------------------------------------------------------
# Univariate polynomials over finite fields (coefficient lists, low to high).

def _unipoly_trim(c):
    while c and not c[-1]:
        c.pop()
    return c


def unipoly_from_sparse(f: SparsePoly, var: str | None = None):
    var = var or f.vars[0]
    i = f.vars.index(var)
    out = [f.domain.zero] * (f.degree_in(var) + 1)
    for m, c in f.coeffs.items():
        if any(e for j, e in enumerate(m) if j != i):
            raise ValueError("not univariate")
        out[m[i]] = c
    return _unipoly_trim(out)


def _uni_mul(a, b, zero):
    if not a or not b:
        return []
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _unipoly_trim(out)


def _uni_divmod(a, b):
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    zero = b[-1] - b[-1]
    a = list(a)
    q = [zero] * max(0, len(a) - len(b) + 1)
    inv = b[-1].inverse()
    while len(a) >= len(b) and _unipoly_trim(list(a)):
        a = _unipoly_trim(a)
        if len(a) < len(b):
            break
        c = a[-1] * inv
        shift = len(a) - len(b)
        q[shift] = q[shift] + c
        for i, y in enumerate(b):
            a[shift + i] = a[shift + i] - c * y
        a.pop()
    return _unipoly_trim(q), _unipoly_trim(a)


def _uni_gcd(a, b):
    a, b = _unipoly_trim(list(a)), _unipoly_trim(list(b))
    while b:
        _, r = _uni_divmod(a, b)
        a, b = b, r
    if a:
        inv = a[-1].inverse()
        a = [x * inv for x in a]
    return a


def _uni_powmod(base, e: int, mod, one, zero):
    result = [one]
    base = _uni_divmod(base, mod)[1]
    while e:
        if e & 1:
            result = _uni_divmod(_uni_mul(result, base, zero), mod)[1]
        base = _uni_divmod(_uni_mul(base, base, zero), mod)[1]
        e >>= 1
    return result


def _uni_diff(a, domain):
    return _unipoly_trim([a[i] * domain.from_int(i) for i in range(1, len(a))])


def _field_size(domain) -> int:
    if hasattr(domain, "ns"):
        return domain.p**2
    return domain.p


def factor_univariate(coeffs, domain, seed: int = DEFAULT_SEED):
    """Factor a univariate polynomial over F_q into monic irreducibles.

    Returns (leading_coefficient, [(factor, multiplicity), ...]).  Seeded
    deterministic randomness keeps runs reproducible.
    """
    rng = random.Random(seed)
    q = _field_size(domain)
    p = domain.p
    one, zero = domain.one, domain.zero
    f = _unipoly_trim(list(coeffs))
    if not f:
        raise ValueError("factor of zero polynomial")
    lc = f[-1]
    f = [c * lc.inverse() for c in f]
    factors: dict = {}

    def add(fac, mult):
        key = tuple(fac)
        factors[key] = factors.get(key, 0) + mult

    def decompose(g, mult):
        if len(g) <= 1:
            return
        d = _uni_diff(g, domain)
        if not d:
            # g = h(x)^p; over F_q the p-th root is coefficientwise c^(q/p)
            root = [g[i] ** (q // p) for i in range(0, len(g), p)]
            decompose(_unipoly_trim(root), mult * p)
            return
        s = _uni_gcd(g, d)
        sf = _uni_divmod(g, s)[0]  # product of factors with exponent prime to p
        rem = g
        for fac in distinct_degree(sf):
            m = 0
            while True:
                qq, r = _uni_divmod(rem, fac)
                if r:
                    break
                rem = qq
                m += 1
            add(fac, m * mult)
        # rem now holds only factors whose exponent is divisible by p
        decompose(rem, mult)

    def distinct_degree(g):
        out = []
        x = [zero, one]
        h = x
        d = 0
        while len(g) - 1 > 2 * d:
            d += 1
            h = _uni_powmod(h, q, g, one, zero)
            sub = _unipoly_trim([a - b for a, b in
                                 zip(h + [zero] * 2, x + [zero] * len(h))])
            gd = _uni_gcd(g, sub)
            if len(gd) > 1:
                out.extend(equal_degree(gd, d))
                g = _uni_divmod(g, gd)[0]
        if len(g) > 1:
            out.append(g)
        return out

    def equal_degree(g, d):
        # Cantor-Zassenhaus splitting of a product of degree-d irreducibles
        n = len(g) - 1
        if n == d:
            return [g]
        while True:
            r = [_rand_fq2(rng, domain) if hasattr(domain, "ns")
                 else domain.from_int(rng.randrange(q))
                 for _ in range(n)] + [one]
            if q % 2 == 1:
                e = (q**d - 1) // 2
                h = _uni_powmod(r, e, g, one, zero)
                if h:
                    h = _unipoly_trim([h[0] - one] + h[1:])
                else:
                    h = [zero - one]
            else:
                h = r
                acc = [zero]
                for _ in range(d):
                    acc = _unipoly_trim([a + b for a, b in
                                         zip(acc + [zero] * len(h), h + [zero] * len(acc))])
                    h = _uni_powmod(h, 2, g, one, zero)
                h = acc
            w = _uni_gcd(g, h)
            if 1 < len(w) < len(g):
                return equal_degree(w, d) + equal_degree(_uni_divmod(g, w)[0], d)

    decompose(f, 1)
    out = [( [domain.coerce(c) for c in fac], mult) for fac, mult in factors.items()]
    out.sort(key=lambda t: (len(t[0]), [_sort_key(c) for c in t[0]]))
    return lc, out


def _rand_fq2(rng, domain):
    return Fp2Elem(rng.randrange(domain.p), rng.randrange(domain.p), domain.p, domain.ns)


def _sort_key(c):
    if isinstance(c, FpElem):
        return (c.value,)
    if isinstance(c, Fp2Elem):
        return (c.a, c.b)
    return (str(c),)


def roots_univariate(coeffs, domain, extend: bool = False, seed: int = DEFAULT_SEED):
    """Roots over F_q (and optionally F_{q^2} when ``extend``), with
    multiplicities."""
    _, facs = factor_univariate(coeffs, domain, seed)
    roots = []
    for fac, mult in facs:
        if len(fac) == 2:
            roots.append((-fac[0], mult))
        elif len(fac) == 3 and extend and isinstance(fac[0], FpElem):
            # quadratic over F_p: roots in F_{p^2}
            p = domain.p
            ext = GF2(p)
            b, c = fac[1], fac[0]
            bb = ext.coerce(b)
            disc = bb * bb - 4 * ext.coerce(c)
            r = _sqrt_fq2(disc, ext)
            if r is None:
                raise ExtensionRequired("no square root in F_{p^2}?")
            half = ext.from_int(2).inverse()
            for s in (r, -r):
                roots.append(((-bb + s) * half, mult))
    return roots


def _sqrt_fq2(x: Fp2Elem, ext) -> Fp2Elem | None:
    """Square root in F_{p^2} (small p: deterministic search on the subfield
    structure via exponentiation)."""
    if not x:
        return ext.zero
    q = ext.p**2
    # Tonelli-Shanks in the cyclic group of order q-1
    if x ** ((q - 1) // 2) != ext.one:
        return None
    m = q - 1
    s = 0
    while m % 2 == 0:
        m //= 2
        s += 1
    # find a non-square
    z = None
    for a in range(1, ext.p):
        for b in range(ext.p):
            cand = Fp2Elem(b, a, ext.p, ext.ns)
            if cand and cand ** ((q - 1) // 2) != ext.one:
                z = cand
                break
        if z:
            break
    c = z**m
    t = x**m
    r = x ** ((m + 1) // 2)
    mm = s
    while t != ext.one:
        t2, i = t, 0
        while t2 != ext.one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (mm - i - 1))
        mm, c = i, b * b
        t = t * c
        r = r * b
    return r


# ---------------------------------------------------------------------------
# Zero-dimensional solving.

def quotient_dimension(gb: GBasis, nvars: int) -> int | None:
    """Number of standard monomials; None when infinite."""
    leads = gb.lead_monomials
    # finite iff every variable has a pure power among the lead monomials
    bounds = [None] * nvars
    for lm in leads:
        nz = [i for i, e in enumerate(lm) if e]
        if len(nz) == 1:
            i = nz[0]
            if bounds[i] is None or lm[i] < bounds[i]:
                bounds[i] = lm[i]
    if any(b is None for b in bounds):
        return None
    count = 0
    mono = [0] * nvars

    def rec(i):
        nonlocal count
        if i == nvars:
            count += all(mono_div(tuple(mono), lm) is None for lm in leads)
            return
        for e in range(bounds[i]):
            mono[i] = e
            rec(i + 1)
        mono[i] = 0

    rec(0)
    return count


def is_zero_dim(gb: GBasis, nvars: int) -> bool:
    return quotient_dimension(gb, nvars) is not None


def affine_dimension(gb: GBasis, nvars: int) -> int:
    """Krull dimension of the quotient (combinatorial, via the lead ideal):
    the largest set of variables meeting no lead monomial's support."""
    leads = gb.lead_monomials
    if any(not any(lm) for lm in leads):
        return -1  # unit ideal
    supports = [frozenset(i for i, e in enumerate(lm) if e) for lm in leads]
    best = 0
    for mask in range(1 << nvars):
        s = {i for i in range(nvars) if mask >> i & 1}
        if len(s) <= best:
            continue
        if all(not sup <= s for sup in supports):
            best = len(s)
    return best


def standard_monomials(gb: GBasis, nvars: int) -> list:
    """Monomials outside the lead ideal (the quotient basis); requires a
    finite quotient."""
    leads = gb.lead_monomials
    bounds = [None] * nvars
    for lm in leads:
        nz = [i for i, e in enumerate(lm) if e]
        if len(nz) == 1:
            i = nz[0]
            if bounds[i] is None or lm[i] < bounds[i]:
                bounds[i] = lm[i]
    if any(b is None for b in bounds):
        raise NotZeroDim("quotient is not finite-dimensional")
    out = []
    mono = [0] * nvars

    def rec(i):
        if i == nvars:
            m = tuple(mono)
            if all(mono_div(m, lm) is None for lm in leads):
                out.append(m)
            return
        for e in range(bounds[i]):
            mono[i] = e
            rec(i + 1)
        mono[i] = 0

    rec(0)
    return out


def fglm(gb: GBasis, nvars: int, target: TermOrder = LEX) -> GBasis:
    """Convert a zero-dimensional Groebner basis to another order by linear
    algebra on the quotient."""
    if not gb.generators:
        raise NotZeroDim("empty basis")
    f0 = gb.generators[0]
    domain, vars = f0.domain, f0.vars
    std = standard_monomials(gb, nvars)
    std_index = {m: i for i, m in enumerate(std)}
    one = domain.one

    def nf_vector(mono):
        f = SparsePoly(domain, vars, {mono: one}, _clean=True)
        r = normal_form(f, gb)
        vec = [domain.zero] * len(std)
        for m, c in r.coeffs.items():
            vec[std_index[m]] = c
        return vec

    # row-reduced table of independent normal forms
    pivot_cols: list[int] = []
    rows: list[list] = []
    combos: list[dict] = []  # monomial -> coefficient producing each row
    new_leads: list = []
    new_gens: list[SparsePoly] = []
    from heapq import heappush, heappop

    start = (0,) * nvars
    heap = [(target.key(start), start)]
    seen = {start}
    while heap:
        _, mono = heappop(heap)
        if any(mono_div(mono, lm) is not None for lm in new_leads):
            continue
        vec = nf_vector(mono)
        combo = {mono: one}
        # eliminate against existing rows
        for piv, row, rcombo in zip(pivot_cols, rows, combos):
            c = vec[piv]
            if c:
                for i, x in enumerate(row):
                    if x:
                        vec[i] = vec[i] - c * x
                for m2, x in rcombo.items():
                    combo[m2] = combo.get(m2, domain.zero) - c * x
        nz = next((i for i, x in enumerate(vec) if x), None)
        if nz is None:
            # dependent: combo is a new basis element with lead `mono`
            g = SparsePoly(domain, vars,
                           {m: c for m, c in combo.items() if c}, _clean=True)
            new_gens.append(_monic(g, target))
            new_leads.append(mono)
            continue
        inv = 1 / vec[nz] if isinstance(vec[nz], Fraction) else vec[nz].inverse()
        vec = [x * inv for x in vec]
        combo = {m: c * inv for m, c in combo.items()}
        pivot_cols.append(nz)
        rows.append(vec)
        combos.append(combo)
        for i in range(nvars):
            nxt = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heappush(heap, (target.key(nxt), nxt))
    new_gens.sort(key=lambda h: target.key(lead(h, target)[0]))
    return GBasis(new_gens, target)


def solve_zero_dim(gens: Sequence[SparsePoly], seed: int = DEFAULT_SEED,
                   multiplicities: bool = True):
    """All solutions of a zero-dimensional system over F_q, extending to
    F_{q^2} when roots require it.

    Returns a list of (point dict, multiplicity).  Raises NotZeroDim for a
    positive-dimensional system and ExtensionRequired when a coordinate lives
    beyond F_{p^2}.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise NotZeroDim("empty system is not zero-dimensional")
    vars = gens[0].vars
    gb0 = buchberger(gens, GREVLEX)
    if gb0.generators and gb0.generators[0].total_degree() == 0:
        return []  # unit ideal: no solutions
    if not is_zero_dim(gb0, len(vars)):
        raise NotZeroDim("quotient is not finite-dimensional")
    gb = fglm(gb0, len(vars), LEX)
    domain = gens[0].domain
    sols = _solve_rec(gb.generators, vars, domain, seed)
    out = []
    for point in sols:
        if multiplicities:
            mult = point_multiplicity(gens, point)
        else:
            mult = 1
        out.append((point, mult))
    out.sort(key=lambda pm: [_sort_key(pm[0][v]) for v in vars])
    return out


def _solve_rec(gens, vars, domain, seed):
    if not vars:
        return [{}]
    # univariate generator in the last lex variable
    last = vars[-1]
    uni = None
    for g in gens:
        try:
            u = unipoly_from_sparse(g, last)
        except ValueError:
            continue
        uni = u if uni is None else _uni_gcd(uni, u)
    if uni is None or len(uni) <= 1:
        raise NotZeroDim(f"no univariate generator in {last}")
    lc, facs = factor_univariate(uni, domain, seed)
    sols = []
    for fac, _ in facs:
        deg = len(fac) - 1
        if deg == 1:
            r = -fac[0]
            sub_domain = domain
        elif deg == 2 and not hasattr(domain, "ns"):
            ext = GF2(domain.p)
            rts = roots_univariate(fac, domain, extend=True, seed=seed)
            for r2, _m in rts:
                sols.extend(_branch(gens, vars, ext, r2, seed))
            continue
        else:
            raise ExtensionRequired(f"irreducible factor of degree {deg} in {last}")
        sols.extend(_branch(gens, vars, sub_domain, r, seed))
    return sols


def _coerce_poly(f: SparsePoly, domain) -> SparsePoly:
    return SparsePoly(domain, f.vars,
                      {m: domain.coerce(c) for m, c in f.coeffs.items()})


def _branch(gens, vars, domain, root, seed):
    last = vars[-1]
    rest = vars[:-1]
    if not rest:
        return [{last: root}]
    new_gens = []
    for g in gens:
        g2 = _coerce_poly(g, domain) if g.domain != domain else g
        new_gens.append(g2.specialize({last: root}))
    new_gens = [g for g in new_gens if not g.is_zero()]
    if any(g.total_degree() == 0 for g in new_gens):
        return []
    if not new_gens:
        raise NotZeroDim("free variables after substitution")
    gb = buchberger(new_gens, LEX)
    if gb.generators and gb.generators[0].total_degree() == 0:
        return []
    sols = []
    for point in _solve_rec(gb.generators, rest, domain, seed):
        point[last] = root
        sols.append(point)
    return sols


def point_multiplicity(gens: Sequence[SparsePoly], point: dict) -> int:
    """Local multiplicity: dim of the quotient by I + m_P^N once it
    stabilizes in N."""
    vars = gens[0].vars
    domain = None
    for v in point.values():
        if isinstance(v, Fp2Elem):
            domain = GF2(v.p)
            break
    if domain is None:
        domain = gens[0].domain
    base = [_coerce_poly(g, domain) if g.domain != domain else g for g in gens]
    linear = []
    for v in vars:
        x = SparsePoly.variable(domain, vars, v)
        linear.append(x - SparsePoly.constant(domain, vars, point[v]))
    prev = None
    power = list(linear)
    for n in range(1, 40):
        if n > 1:
            power = [a * b for a in power for b in linear]
            seen = set()
            dedup = []
            for f in power:
                key = frozenset(f.coeffs)
                if key not in seen:
                    seen.add(key)
                    dedup.append(f)
            power = dedup
        gb = buchberger(base + power, GREVLEX)
        dim = quotient_dimension(gb, len(vars))
        if dim is None:
            raise NotZeroDim("localized quotient not finite")
        if dim == prev:
            return dim
        prev = dim
    raise RuntimeError("multiplicity did not stabilize")


# ---------------------------------------------------------------------------
# Prime-field fast path: plain-integer coefficients, same algorithm as the
# generic engine above (which serves as its oracle in the test suite).

def _fp_lead(d, key):
    return max(d, key=key)


def _fp_monic(d, p, key):
    lm = max(d, key=key)
    c = d[lm]
    if c == 1:
        return d
    inv = pow(c, -1, p)
    return {m: c2 * inv % p for m, c2 in d.items()}


def _fp_reduce(f, gens, leads, p, key, meter):
    """Full division remainder; gens monic dicts, leads their lead monomials."""
    work = dict(f)
    remainder = {}
    nvars = None
    while work:
        if meter is not None:
            meter.tick()
        m = max(work, key=key)
        c = work.pop(m)
        hit = False
        for lm, g in zip(leads, gens):
            q = mono_div(m, lm)
            if q is not None:
                for gm, gc in g.items():
                    if gm == lm:
                        continue
                    mm = tuple(a + b for a, b in zip(q, gm))
                    v = (work.get(mm, 0) - c * gc) % p
                    if v:
                        work[mm] = v
                    elif mm in work:
                        del work[mm]
                hit = True
                break
        if not hit:
            remainder[m] = c
    return remainder


def _fp_spair(f, g, p, key):
    mf, mg = max(f, key=key), max(g, key=key)
    l = mono_lcm(mf, mg)
    qf, qg = mono_div(l, mf), mono_div(l, mg)
    cf_inv = pow(f[mf], -1, p)
    cg_inv = pow(g[mg], -1, p)
    out = {}
    for m, c in f.items():
        mm = tuple(a + b for a, b in zip(qf, m))
        out[mm] = c * cf_inv % p
    for m, c in g.items():
        mm = tuple(a + b for a, b in zip(qg, m))
        v = (out.get(mm, 0) - c * cg_inv) % p
        if v:
            out[mm] = v
        elif mm in out:
            del out[mm]
    return out


def _fp_update_pairs(G, leads, P, f, key):
    lmf = max(f, key=key)
    t = len(G)
    P = {(i, j) for (i, j) in P
         if (mono_div(mono_lcm(leads[i], leads[j]), lmf) is None
             or mono_lcm(leads[i], leads[j]) == mono_lcm(leads[i], lmf)
             or mono_lcm(leads[i], leads[j]) == mono_lcm(leads[j], lmf))}
    by_lcm: dict = {}
    for i in range(t):
        by_lcm.setdefault(mono_lcm(leads[i], lmf), []).append(i)
    kept = []
    for L in sorted(by_lcm, key=key):
        if all(mono_div(L, L2) is None for L2 in kept):
            kept.append(L)
    new_pairs = set()
    for L in kept:
        if not any(mono_lcm(leads[i], lmf) == mono_mul(leads[i], lmf)
                   for i in by_lcm[L]):
            new_pairs.add((min(by_lcm[L]), t))
    G.append(f)
    leads.append(lmf)
    return P | new_pairs


def _fp_buchberger(gens, order, budget, resume=None):
    key = order.key
    if resume is not None:
        G, leads, P, p, vars, domain = resume.fast_state
        P = set(P)
    else:
        domain = gens[0].domain
        p = domain.p
        vars = gens[0].vars
        G, leads, P = [], [], set()
        for g in gens:
            d = _fp_monic({m: c.value for m, c in g.coeffs.items()}, p, key)
            P = _fp_update_pairs(G, leads, P, d, key)
    meter = _WorkMeter(budget)
    while P:
        pair = min(P, key=lambda ij: key(mono_lcm(leads[ij[0]], leads[ij[1]])))
        P.remove(pair)
        i, j = pair
        try:
            r = _fp_reduce(_fp_spair(G[i], G[j], p, key), G, leads, p, key, meter)
        except _OutOfWork:
            handle = GBHandle([], P | {pair}, order, meter.used, fast=True,
                              fast_state=(G, leads, P | {pair}, p, vars, domain))
            raise BudgetExceeded(handle) from None
        if r:
            P = _fp_update_pairs(G, leads, P, _fp_monic(r, p, key), key)
    # minimalize + interreduce
    idx = sorted(range(len(G)), key=lambda i: key(leads[i]))
    chosen = []
    for i in idx:
        if all(mono_div(leads[i], leads[j]) is None for j in chosen):
            chosen.append(i)
    final = []
    for pos, i in enumerate(chosen):
        others = [G[j] for j in chosen if j != i]
        oleads = [leads[j] for j in chosen if j != i]
        r = _fp_reduce(G[i], others, oleads, p, key, None)
        final.append(_fp_monic(r, p, key))
    final.sort(key=lambda d: key(max(d, key=key)))
    out = [SparsePoly(domain, vars, {m: FpElem(c, p) for m, c in d.items()},
                      _clean=True) for d in final]
    return GBasis(out, order)
