"""LLL lattice reduction and recognition of algebraic numbers from residues
mod p^K.

The reduction runs entirely in exact arithmetic (integer basis vectors,
Fraction Gram-Schmidt data): slower than floating-point variants but
deterministic, which is what the self-verifying recognizers need.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import PadicApprox, QuadElem, embed_quad

DELTA = Fraction(99, 100)
ETA = Fraction(51, 100)  # size reduction actually enforces |mu| <= 1/2 < eta


class DependentRows(ValueError):
    """Input basis rows are linearly dependent."""


class NoRelation(ValueError):
    """No integer relation within the degree/height bounds."""


@dataclass
class IntLattice:
    """Row lattice with integer basis vectors."""

    rows: list[list[int]]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("empty lattice")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValueError("ragged basis rows")

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def gram_det(self) -> int:
        """det(B * B^T); the square of the lattice determinant."""
        n = len(self.rows)
        g = [[sum(a * b for a, b in zip(r1, r2)) for r2 in self.rows] for r1 in self.rows]
        # fraction-free Gaussian elimination (Bareiss)
        m = [[Fraction(x) for x in row] for row in g]
        det = Fraction(1)
        for i in range(n):
            piv = None
            for r in range(i, n):
                if m[r][i]:
                    piv = r
                    break
            if piv is None:
                return 0
            if piv != i:
                m[i], m[piv] = m[piv], m[i]
                det = -det
            det *= m[i][i]
            inv = 1 / m[i][i]
            for r in range(i + 1, n):
                f = m[r][i] * inv
                if f:
                    for c in range(i, n):
                        m[r][c] -= f * m[i][c]
        assert det.denominator == 1
        return int(det)


def _lll_rows(rows: list[list[int]], delta: Fraction = DELTA):
    """Exact LLL on integer rows; returns (reduced rows, unimodular transform).

    Integer-only variant: d[i] holds the Gram determinant of the first i rows
    and lam[i][j] = mu[i][j] * d[j+1], so every update is an exact integer
    division and no rationals appear.
    """
    b = [list(map(int, r)) for r in rows]
    n = len(b)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    dnum, dden = delta.numerator, delta.denominator

    def dot(x, y):
        return sum(p * q for p, q in zip(x, y))

    d = [1] * (n + 1)
    lam = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            t = dot(b[i], b[j])
            for k in range(j):
                t = (d[k + 1] * t - lam[i][k] * lam[j][k]) // d[k]
            if j < i:
                lam[i][j] = t
            else:
                d[i + 1] = t
                if t <= 0:
                    raise DependentRows("linearly dependent basis rows")

    def size_reduce(k, j):
        if 2 * abs(lam[k][j]) > d[j + 1]:
            q = (2 * lam[k][j] + d[j + 1]) // (2 * d[j + 1])  # round(lam/d)
            b[k] = [x - q * y for x, y in zip(b[k], b[j])]
            u[k] = [x - q * y for x, y in zip(u[k], u[j])]
            lam[k][j] -= q * d[j + 1]
            for l in range(j):
                lam[k][l] -= q * lam[j][l]

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if dden * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) < dnum * d[k] ** 2:
            # swap rows k-1, k and patch the integer GS data in place
            b[k - 1], b[k] = b[k], b[k - 1]
            u[k - 1], u[k] = u[k], u[k - 1]
            for j in range(k - 1):
                lam[k - 1][j], lam[k][j] = lam[k][j], lam[k - 1][j]
            lamk = lam[k][k - 1]
            newdk = (d[k - 1] * d[k + 1] + lamk * lamk) // d[k]
            for i in range(k + 1, n):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lamk * t) // d[k]
                lam[i][k - 1] = (newdk * t + lamk * lam[i][k]) // d[k + 1]
            d[k] = newdk
            k = max(k - 1, 1)
        else:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j)
            k += 1
    return b, u


def lll_reduce(lattice: IntLattice, delta: Fraction = DELTA) -> tuple[IntLattice, list[list[int]]]:
    """Return the delta-LLL-reduced basis and the unimodular transform with
    transform * original = reduced.

    Checks the Lovasz condition, transform unimodularity, and the classical
    bound ||b1||^(2n) <= 2^(n(n-1)) * det(B B^T) on the first vector.
    """
    reduced, transform = _lll_rows(lattice.rows, delta)
    out = IntLattice(reduced)
    tdet = IntLattice(transform).gram_det()
    assert tdet == 1, "transform is not unimodular"
    gdet = lattice.gram_det()
    n = len(reduced)
    b1 = sum(x * x for x in reduced[0])
    assert b1**n <= 2 ** (n * (n - 1)) * gdet, "first vector exceeds the LLL bound"
    return out, transform


# ---------------------------------------------------------------------------
# Recognition of algebraic numbers.

@dataclass
class Recognition:
    """A verified relation g(x) = 0 mod p^K with provenance."""

    coeffs: list[int]  # g = sum coeffs[i] * X^i, primitive, positive leading
    residue: PadicApprox
    degree_bound: int
    height_bound: int
    tie: bool = False


def _poly_eval_mod(coeffs: list[int], x: int, m: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % m
    return acc


def minpoly_from_padic(x: PadicApprox, degree: int, height: int) -> Recognition:
    """Find a primitive integer polynomial of degree <= ``degree`` and
    coefficient height <= ``height`` vanishing at ``x`` mod p^K.

    The relation is found by LLL on the powers-plus-modulus lattice and
    re-verified by evaluation before it is returned.  Heuristically the
    precision should satisfy K*log(p) > (degree+1)*log(height) plus a margin.
    """
    m = x.modulus
    # congruence lattice {(c_0..c_d) : sum c_i x^i = 0 mod m}, determinant m
    rows = [[m] + [0] * degree]
    for i in range(1, degree + 1):
        row = [-pow(x.value, i, m)] + [0] * degree
        row[i] = 1
        rows.append(row)
    reduced, _ = _lll_rows(rows)
    candidates = []
    for vec in reduced:
        coeffs = list(vec)
        if not any(coeffs):
            continue
        if max(abs(c) for c in coeffs) > height:
            continue
        if _poly_eval_mod(coeffs, x.value, m) != 0:
            continue
        g = 0
        for c in coeffs:
            g = gcd(g, abs(c))
        coeffs = [c // g for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if coeffs[-1] < 0:
            coeffs = [-c for c in coeffs]
        candidates.append(coeffs)
    if not candidates:
        raise NoRelation(
            f"no relation of degree <= {degree}, height <= {height} at precision {x.p}^{x.k}"
        )
    candidates.sort(key=lambda c: (max(abs(v) for v in c), len(c)))
    best = candidates[0]
    tie = len(candidates) > 1 and candidates[1] != best and (
        max(abs(v) for v in candidates[1]) == max(abs(v) for v in best)
    )
    return Recognition(best, x, degree, height, tie)


def recognize_quadratic(x: PadicApprox, branch: str = "plus",
                        height: int | None = None) -> QuadElem:
    """Recognize ``x`` as (a + b*w)/c in Q(i*sqrt(7)), w = i*sqrt(7).

    The returned element is re-embedded and checked against the residue;
    NoRelation is raised when the lattice holds nothing that verifies.
    """
    from .arith import lift_sqrt  # deferred: arith also imports from here

    m = x.modulus
    r = lift_sqrt(-7, x.p, x.k, branch).value
    rows = [[-r, 1, 0], [x.value, 0, 1], [m, 0, 0]]
    reduced, _ = _lll_rows(rows)
    best = None
    for vec in reduced:
        a, b, c = vec
        if c < 0:
            a, b, c = -a, -b, -c
        if c == 0:
            continue
        if (a + b * r - c * x.value) % m != 0:
            continue
        if height is not None and max(abs(a), abs(b), abs(c)) > height:
            continue
        g = gcd(gcd(abs(a), abs(b)), c)
        cand = QuadElem(Fraction(a // g, c // g), Fraction(b // g, c // g))
        h = max(abs(a // g), abs(b // g), c // g)
        if best is None or h < best[0]:
            best = (h, cand)
    if best is None:
        raise NoRelation(f"no quadratic element matches {x} on branch {branch}")
    cand = best[1]
    if embed_quad(cand, x.p, x.k, branch) != x:
        raise NoRelation(f"candidate {cand} failed re-embedding for {x}")
    return cand
