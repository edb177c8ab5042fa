"""Quantum sets of rationals: membership, the non-singularity predicate, and
closure under the generated group action.  All decisions are exact integer
arithmetic."""
from __future__ import annotations

import cmath
import math
import random
import time
from dataclasses import dataclass

from .core import EvaluationError, IdentityReport, RationalPoint, UnitRoot
from .params import AlphaParams
from .sl2 import galpha_generators

__all__ = ["SetSpec", "set_member", "nonsingular_check", "denominator_scan", "closure_check"]


@dataclass(frozen=True)
class SetSpec:
    """One of the rational sets: S, SC1(C), SC2(C), Sev(C), Salpha(alpha)."""

    kind: str
    C: int = 1
    alpha: AlphaParams | None = None

    def __post_init__(self):
        if self.kind not in ("S", "SC1", "SC2", "Sev", "Salpha"):
            raise ValueError(f"unknown set kind {self.kind!r}")
        if self.C < 1:
            raise ValueError("C must be >= 1")
        if self.kind == "Salpha" and self.alpha is None:
            raise ValueError("Salpha needs alpha")


def set_member(spec: SetSpec, p: RationalPoint) -> bool:
    """Exact membership: S constrains only the (already enforced) shape of p;
    the refinements are divisibility conditions on h and parity of k."""
    if spec.kind == "S":
        return True
    if spec.kind == "SC1":
        return p.h % spec.C != 0
    if spec.kind == "SC2":
        return (2 * p.h) % spec.C != 0
    if spec.kind == "Sev":
        return p.h % spec.C != 0 and p.k % 2 == 0
    alpha = spec.alpha
    if alpha.a % 2 == 0:
        return set_member(SetSpec("SC1", alpha.C), p)
    return set_member(SetSpec("SC2", alpha.C), p) or set_member(SetSpec("Sev", alpha.C), p)


def nonsingular_check(alpha: AlphaParams, p: RationalPoint) -> bool:
    """True iff no integer pair makes a finite-sum denominator vanish.

    The defining obstruction (an integer n with n h/k +- (A h/(C k) + a/2)
    integral) is solvable iff 2C divides 2 A h + a C k, so the decision is a
    single divisibility test; a floating scan of the actual denominator
    factors cross-checks it.
    """
    singular = (2 * alpha.A * p.h + alpha.a * alpha.C * p.k) % (2 * alpha.C) == 0
    scan = denominator_scan(alpha, p)
    if singular and scan > 1e-6:
        raise EvaluationError("divisibility says singular but no factor vanishes")
    if not singular and scan < 1e-10:
        raise EvaluationError("divisibility says regular but a factor vanishes")
    return not singular


def denominator_scan(alpha: AlphaParams, p: RationalPoint) -> float:
    """Minimum modulus over the finite-sum denominator factors at p."""
    from fractions import Fraction

    h, k = p.h, p.k
    z_exp = Fraction(alpha.a, 4) + Fraction(alpha.A * h, 2 * alpha.C * k)
    q_exp = Fraction(h, 2 * k)  # exponent of e( ) for Q = e^{pi i h/k}
    m = math.inf
    for j in range(0, k + 1):
        m = min(m, abs(1.0 - complex(UnitRoot.of(z_exp + j * q_exp))))
    for j in range(1, k + 2):
        m = min(m, abs(1.0 - complex(UnitRoot.of(-z_exp + j * q_exp))))
    return m


def closure_check(alpha: AlphaParams, samples: int, seed: int) -> IdentityReport:
    """Draw random members of the quantum set and verify every generator and
    inverse maps them back into the set (exact).  The lone excluded point
    h/k = -1/r (which the hyperbolic generator sends to the cusp) is redrawn.
    """
    rng = random.Random(seed)
    gens = galpha_generators(alpha)
    moves = [gens[0], gens[0].inv(), gens[1], gens[1].inv()]
    spec = SetSpec("Salpha", alpha.C, alpha)
    t0 = time.perf_counter()
    failures = []
    drawn = 0
    while drawn < samples:
        h = rng.randint(-1000, 1000)
        k = rng.randint(1, 1000)
        if h == 0 or math.gcd(abs(h), k) != 1 or h % 2 == 0:
            continue
        p = RationalPoint(h, k)
        if not set_member(spec, p):
            continue
        if any(m.act_fraction(p.h, p.k)[1] == 0 for m in moves):
            continue  # image would be the cusp at infinity
        drawn += 1
        for m in moves:
            num, den = m.act_fraction(p.h, p.k)
            img = RationalPoint.normalized(num, den)
            if not set_member(spec, img):
                failures.append({"inputs": f"p={p}, gen={m.entries()}, image={img}",
                                 "residual": 1.0})
    wall = int((time.perf_counter() - t0) * 1000)
    return IdentityReport(
        suite="set-closure", seed=seed, cases=samples, tolerance=0.0,
        max_residual=0.0 if not failures else 1.0, failures=failures,
        wall_time_ms=wall)
