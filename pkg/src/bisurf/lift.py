"""Hensel/Newton lifting of roots and of polynomial-system solutions from
mod p to mod p^K.  Every lift re-evaluates its output and ships a
certificate recording the residual check.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .arith import GF, PadicApprox
from .grobner import matrix_rank, solve_linear
from .poly import SparsePoly


class SingularRoot(ValueError):
    """The derivative vanishes mod p: a multiple root cannot be lifted."""


class RankDeficient(ValueError):
    """The Jacobian loses rank on the pivot columns."""

    def __init__(self, message, step=None, residual=None):
        super().__init__(message)
        self.step = step
        self.residual = residual


@dataclass
class Certificate:
    problem: str  # content hash of the lifting problem
    p: int
    precision: int
    residual_ok: bool

    def as_json(self):
        return {"problem": self.problem, "p": self.p,
                "precision": self.precision, "residual_ok": self.residual_ok}


def _int_coeffs(f) -> list[int]:
    """Low-to-high integer coefficients from a univariate SparsePoly over QQ
    or a plain sequence."""
    if isinstance(f, SparsePoly):
        out = [0] * (f.total_degree() + 1)
        for m, c in f.coeffs.items():
            c = Fraction(c) if not isinstance(c, Fraction) else c
            if c.denominator != 1:
                raise ValueError("integer coefficients required")
            out[m[0]] = c.numerator
        return out
    return [int(c) for c in f]


def _eval_mod(coeffs: Sequence[int], x: int, m: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % m
    return acc


def _deriv(coeffs: Sequence[int]) -> list[int]:
    return [i * c for i, c in enumerate(coeffs)][1:]


def hensel_univariate(f, p: int, root: int, precision: int) -> tuple[PadicApprox, Certificate]:
    """Lift a simple root of f mod p to the unique root mod p^precision by
    quadratic (precision-doubling) Newton steps."""
    coeffs = _int_coeffs(f)
    root %= p
    if _eval_mod(coeffs, root, p) != 0:
        raise SingularRoot(f"{root} is not a root mod {p}")
    deriv = _deriv(coeffs)
    if _eval_mod(deriv, root, p) == 0:
        raise SingularRoot(f"{root} is a multiple root mod {p}")
    k = 1
    r = root
    while k < precision:
        k = min(2 * k, precision)
        m = p**k
        r = (r - _eval_mod(coeffs, r, m) * pow(_eval_mod(deriv, r, m), -1, m)) % m
    residual_ok = _eval_mod(coeffs, r, p**precision) == 0
    assert residual_ok, "Newton iteration failed to certify"
    problem = hashlib.sha256(json.dumps(
        {"coeffs": coeffs, "p": p, "root": root, "K": precision},
        sort_keys=True).encode()).hexdigest()[:16]
    return PadicApprox(r, p, precision), Certificate(problem, p, precision, residual_ok)


@dataclass
class LiftProblem:
    """A polynomial system with a mod-p solution to refine to mod p^K.

    ``pivots``: the unknowns adjusted during lifting (defaults to the first
    column subset of full row rank in index order); the rest stay at their
    mod-p lifts.
    """

    system: Sequence[SparsePoly]  # integer/rational coefficients
    start: Mapping[str, int]      # solution mod p
    p: int
    precision: int
    pivots: Sequence[str] | None = None

    def content_hash(self) -> str:
        from .poly import format_poly
        payload = {
            "system": [format_poly(f) for f in self.system],
            "start": {k: int(v) for k, v in self.start.items()},
            "p": self.p, "K": self.precision,
            "pivots": list(self.pivots) if self.pivots else None,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def hensel_system(problem: LiftProblem) -> tuple[dict, Certificate]:
    """Lift a system solution one p-digit at a time: each step solves one
    linear system mod p on the pivot columns; non-pivot coordinates stay at
    their mod-p lifts."""
    system = list(problem.system)
    if not system:
        raise ValueError("empty system")
    vars = system[0].vars
    p, K = problem.p, problem.precision
    gf = GF(p)
    start = {v: int(problem.start[v]) % p for v in vars}
    # residual mod p must vanish
    pt_p = {v: gf.from_int(start[v]) for v in vars}
    int_systems = []
    for f in system:
        terms = []
        for m, c in f.coeffs.items():
            c = Fraction(c) if not isinstance(c, Fraction) else c
            terms.append((m, c))
        int_systems.append(terms)

    def eval_sys_mod(point: dict, modulus: int) -> list[int]:
        out = []
        for terms in int_systems:
            acc = 0
            for m, c in terms:
                num = c.numerator % modulus
                if c.denominator != 1:
                    num = num * pow(c.denominator, -1, modulus) % modulus
                t = num
                for v, e in zip(vars, m):
                    if e:
                        t = t * pow(point[v], e, modulus) % modulus
                acc = (acc + t) % modulus
            out.append(acc)
        return out

    res0 = eval_sys_mod(start, p)
    if any(res0):
        raise RankDeficient("start is not a solution mod p", step=0, residual=res0)
    # Jacobian mod p at the start, fixed throughout
    J = [[f.diff(v) for v in vars] for f in system]
    Jp = [[_reduce_eval(e, pt_p, gf) for e in row] for row in J]
    m_eq = len(system)
    if problem.pivots is None:
        # first column subset of full rank, in index order
        pivots = []
        cols = []
        for j, v in enumerate(vars):
            trial = cols + [[Jp[i][j] for i in range(m_eq)]]
            if matrix_rank([list(c) for c in zip(*trial)]) > len(cols):
                cols.append([Jp[i][j] for i in range(m_eq)])
                pivots.append(v)
            if len(pivots) == m_eq:
                break
    else:
        pivots = list(problem.pivots)
    A = [[Jp[i][vars.index(v)] for v in pivots] for i in range(m_eq)]
    if matrix_rank(A) < m_eq:
        raise RankDeficient("Jacobian lacks full row rank on the pivot columns",
                            step=0, residual=res0)
    current = dict(start)
    for k in range(1, K):
        modulus = p**(k + 1)
        res = eval_sys_mod(current, modulus)
        if any(r % p**k for r in res):
            raise RankDeficient("residual mismatch during lifting", step=k,
                                residual=res)
        rhs = [gf.from_int(-(r // p**k)) for r in res]
        delta = solve_linear(A, rhs)
        if delta is None:
            raise RankDeficient("inconsistent digit system", step=k,
                                residual=[str(r) for r in res])
        for v, d in zip(pivots, delta):
            current[v] = (current[v] + p**k * d.value) % modulus
    final_mod = p**K
    residual = eval_sys_mod(current, final_mod)
    ok = not any(residual)
    if not ok:
        raise RankDeficient("final residual nonzero", step=K, residual=residual)
    cert = Certificate(problem.content_hash(), p, K, ok)
    return {v: PadicApprox(current[v], p, K) for v in vars}, cert


def _reduce_eval(e: SparsePoly, point: dict, gf):
    if e.is_zero():
        return gf.zero
    acc = gf.zero
    for m, c in e.coeffs.items():
        c = Fraction(c) if not isinstance(c, Fraction) else c
        t = gf.coerce(c)
        for v, ee in zip(e.vars, m):
            for _ in range(ee):
                t = t * point[v]
        acc = acc + t
    return acc


def format_residue_file(values: Mapping[str, PadicApprox], cert: Certificate) -> str:
    """Result file: explicit `mod p^K` header then base-10 residues."""
    items = sorted(values.items())
    p = items[0][1].p
    k = items[0][1].k
    lines = [f"# residues mod {p}^{k}", f"# certificate {json.dumps(cert.as_json(), sort_keys=True)}"]
    for name, v in items:
        lines.append(f"{name} = {v.value} mod {p}^{k}")
    return "\n".join(lines) + "\n"


def parse_residue_file(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, rest = line.split("=", 1)
        value, mod = rest.split("mod")
        p, k = mod.strip().split("^")
        out[name.strip()] = PadicApprox(int(value.strip()), int(p), int(k))
    return out
