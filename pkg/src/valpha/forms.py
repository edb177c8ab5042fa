"""The central family V, its completion, and all transformation residuals.

V(tau) = i^{a+1} q^{-(2A-C)^2/(8C^2)} mu(u, tau/2; tau) with u = (A/C) tau + a/2.
On the upper half-plane it is evaluated through the Appell-Lerch series; on a
rational h/k in the quantum set it collapses to the exact finite g2 sum

    V(h/k) = i^{a+1} e(-(2A-C)^2 h / (8 C^2 k)) * i e^{pi i h/(4k)}
             * g2(i^a e^{pi i A h/(C k)}; e^{pi i h/k}).

The residual functions implement the completed-form modular law, the
finite-difference hyperbolic Laplacian check, and the quantum transformation
laws under the parabolic and hyperbolic generators.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import replace
from fractions import Fraction

from .core import (
    DEFAULT_POLICY,
    CharPair,
    EvalResult,
    InconsistentArguments,
    NotInQuantumSet,
    RationalPoint,
    SingularEndpoint,
    TruncationPolicy,
    UnitRoot,
    as_tau,
    principal_sqrt,
    q_power,
)
from .params import AlphaParams, catalog_tuples
from .periods import PathSpec, mordell_h, period_integral
from .qsets import SetSpec, set_member
from .series import g2_finite, mu, mu_hat
from .sl2 import IntMatrix2, eta_psi_exponent, phi_exponent, tilde_decompose

__all__ = [
    "AlphaParams",
    "catalog_tuples",
    "v_alpha",
    "v_hat",
    "m_hat",
    "laplacian_residual",
    "mock_transform_residual",
    "qm_residual_m",
    "qm_residual_t",
    "quantum_cocycle",
    "mobius_i_term",
    "mobius_j_term",
]


def _uv(alpha: AlphaParams, tau: complex) -> tuple[complex, complex]:
    u = float(alpha.u_slope) * tau + alpha.a / 2.0
    return u, tau / 2.0


def _v_rational(alpha: AlphaParams, p: RationalPoint,
                policy: TruncationPolicy) -> EvalResult:
    if not set_member(SetSpec("Salpha", alpha.C, alpha), p):
        raise NotInQuantumSet(f"{p} outside the quantum set of {alpha.as_tuple()}")
    h, k = p.h, p.k
    z = complex(UnitRoot.of(Fraction(alpha.a, 4) + Fraction(alpha.A * h, 2 * alpha.C * k)))
    g = g2_finite(z, h, k, policy)
    phase = UnitRoot.of(
        Fraction(alpha.a + 1, 4)                       # i^{a+1}
        + alpha.prefactor_exponent * Fraction(h, k)    # q^{-(2A-C)^2/(8C^2)} at h/k
        + Fraction(1, 4)                               # leading i of the finite formula
        + Fraction(h, 8 * k)                           # e^{pi i h/(4k)}
    )
    return EvalResult(complex(phase) * g.value, g.err_bound, g.terms_used)


def v_alpha(alpha: AlphaParams, point,
            policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """V at a point of the upper half-plane or at a rational of the quantum set."""
    if isinstance(point, RationalPoint):
        return _v_rational(alpha, point, policy)
    t = as_tau(point, policy)
    u, v = _uv(alpha, t)
    m = mu(u, v, t, policy)
    pref = complex(UnitRoot.of(Fraction(alpha.a + 1, 4))) * q_power(t, alpha.prefactor_exponent)
    return EvalResult(pref * m.value, abs(pref) * m.err_bound, m.terms_used)


def v_hat(alpha: AlphaParams, tau, policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """Completion of V: the mu factor replaced by mu + (i/2) R."""
    t = as_tau(tau, policy)
    u, v = _uv(alpha, t)
    m = mu_hat(u, v, t, policy)
    pref = complex(UnitRoot.of(Fraction(alpha.a + 1, 4))) * q_power(t, alpha.prefactor_exponent)
    return EvalResult(pref * m.value, abs(pref) * m.err_bound, m.terms_used)


def m_hat(ab: CharPair, u, v, tau, policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """-sqrt(2) e(a(b+1/2)) q^{-a^2/2} mu_hat(u, v; tau) for u - v = a tau - b."""
    t = as_tau(tau, policy)
    u, v = complex(u), complex(v)
    want = ab.a * t - ab.b
    scale = max(1.0, abs(u), abs(v))
    if abs((u - v) - want) > 1e-12 * scale:
        raise InconsistentArguments(
            f"u - v = {u - v} but a tau - b = {want}")
    m = mu_hat(u, v, t, policy)
    pref = -math.sqrt(2.0) * cmath.exp(2j * math.pi * ab.a * (ab.b + 0.5)) \
        * q_power(t, -ab.a * ab.a / 2.0)
    return EvalResult(pref * m.value, abs(pref) * m.err_bound, m.terms_used)


# ---------------------------------------------------------------------------
# Laplacian check
# ---------------------------------------------------------------------------

def laplacian_residual(alpha: AlphaParams, tau, step: float = 1e-3,
                       policy: TruncationPolicy = DEFAULT_POLICY,
                       part: str = "completed") -> float:
    """|Delta_{1/2} f| / max(1, |f|) on a five-point stencil of width `step`,
    where Delta_k = -y^2 (d_xx + d_yy) + i k y (d_x + i d_y).

    part='completed' applies the operator to the completed form (annihilated
    analytically; the residual measures the O(step^2) stencil error).
    part='holomorphic' applies it to V alone.
    """
    if not (1e-4 <= step <= 1e-2):
        raise ValueError("step must lie in [1e-4, 1e-2]")
    t = complex(tau)
    tight = replace(policy, target_abs_err=min(policy.target_abs_err, 1e-13))
    if part == "completed":
        f = lambda z: v_hat(alpha, z, tight).value
    elif part == "holomorphic":
        f = lambda z: v_alpha(alpha, z, tight).value
    else:
        raise ValueError(f"unknown part {part!r}")
    h = step
    f0 = f(t)
    fpx, fmx = f(t + h), f(t - h)
    fpy, fmy = f(t + 1j * h), f(t - 1j * h)
    fxx = (fpx - 2.0 * f0 + fmx) / (h * h)
    fyy = (fpy - 2.0 * f0 + fmy) / (h * h)
    fx = (fpx - fmx) / (2.0 * h)
    fy = (fpy - fmy) / (2.0 * h)
    y = t.imag
    lap = -y * y * (fxx + fyy) + 0.5j * y * (fx + 1j * fy)
    return abs(lap) / max(1.0, abs(f0))


# ---------------------------------------------------------------------------
# completed-form modular law
# ---------------------------------------------------------------------------

def mock_transform_residual(alpha: AlphaParams, gamma: IntMatrix2, tau,
                            policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """| Vhat(gamma tau) - psi^{-3} (-1)^{k+l+r+s} phi (z tau + w)^{1/2} Vhat(tau) |."""
    t = as_tau(tau, policy)
    sh = tilde_decompose(alpha, gamma)
    mult = UnitRoot.of(-3 * eta_psi_exponent(gamma)) \
        * UnitRoot.of(sh.k + sh.l + sh.r + sh.s, 2) \
        * UnitRoot(phi_exponent(alpha, gamma))
    lhs = v_hat(alpha, gamma.act(t), policy)
    rhs = complex(mult) * principal_sqrt(gamma.frame(t)) * v_hat(alpha, t, policy).value
    return abs(lhs.value - rhs)


# ---------------------------------------------------------------------------
# quantum transformation laws
# ---------------------------------------------------------------------------

def _v_dispatch(alpha: AlphaParams, point, policy: TruncationPolicy) -> complex:
    return v_alpha(alpha, point, policy).value


def quantum_cocycle(alpha: AlphaParams, r: int, tau,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """The period integral from 1/r of g_{A/C, 1/2 - a/2} against 1/sqrt(-i(z+tau))."""
    ch = CharPair(float(alpha.u_slope), 0.5 - alpha.a / 2.0)
    return period_integral(ch, PathSpec.from_rational(Fraction(1, r)), tau, policy)


def _tau_of(point) -> complex:
    if isinstance(point, RationalPoint):
        return complex(point.value, 0.0)
    return complex(point)


def qm_residual_m(alpha: AlphaParams, r: int, point, form: str = "general",
                  policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Hyperbolic-generator law: V(tau/(r tau + 1)) against its transform of V(tau)
    plus the cocycle integral; at rationals both V values are exact finite sums.

    form='general' checks the single-integral law; 'part1' (a even, r = 1) and
    'part2' (a odd, r = 2) check the specialised constants independently.
    """
    alpha.require_theorem()
    if r not in (1, 2):
        raise ValueError("r must be 1 or 2")
    if (alpha.a * r) % 2 != 0:
        raise InconsistentArguments("need a*r even (r = 2 for odd a)")
    rational = isinstance(point, RationalPoint)
    if rational:
        den = r * point.h + point.k
        if den == 0:
            raise SingularEndpoint(f"{point} is the excluded point -1/{r}")
        spec = SetSpec("Salpha", alpha.C, alpha)
        image = RationalPoint.normalized(point.h, den)
        if not set_member(spec, point) or not set_member(spec, image):
            raise NotInQuantumSet(f"{point} or its image {image} outside the quantum set")
        v_here = _v_dispatch(alpha, point, policy)
        v_image = _v_dispatch(alpha, image, policy)
    else:
        t = as_tau(point, policy)
        v_here = _v_dispatch(alpha, t, policy)
        v_image = _v_dispatch(alpha, t / (r * t + 1.0), policy)
    t = _tau_of(point)
    root = principal_sqrt(r * t + 1.0)

    if form == "general":
        coc = quantum_cocycle(alpha, r, t, policy)
        c1 = UnitRoot.of(Fraction(alpha.a * r, 4) + Fraction((alpha.a ** 2 + 1) * r, 8))
        c2 = UnitRoot.of(Fraction(1, 4) + Fraction(alpha.A * (alpha.a - 1), 2 * alpha.C)
                         + Fraction(r * (alpha.a + 1) ** 2, 8))
        rhs = complex(c1) * root * v_here + 0.5 * complex(c2) * root * coc.value
        return abs(v_image - rhs)
    if form == "part1":
        if alpha.a % 2 != 0 or r != 1:
            raise InconsistentArguments("part1 needs even a and r = 1")
        per = period_integral(CharPair(float(alpha.u_slope), 0.5),
                              PathSpec.from_rational(1), t, policy)
        rhs = -0.5j * complex(UnitRoot.of(-alpha.A, 2 * alpha.C)) * per.value
        lhs = v_here - complex(UnitRoot.of(-1, 8)) * v_image / root
        return abs(lhs - rhs)
    if form == "part2":
        if alpha.a % 2 != 1 or r != 2:
            raise InconsistentArguments("part2 needs odd a and r = 2")
        per = period_integral(CharPair(float(alpha.u_slope), 0.0),
                              PathSpec.from_rational(Fraction(1, 2)), t, policy)
        rhs = -0.5j * per.value
        lhs = v_here - v_image / root
        return abs(lhs - rhs)
    raise ValueError(f"unknown form {form!r}")


def qm_residual_t(alpha: AlphaParams, r: int, point, form: str = "proposition",
                  policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Parabolic-generator law V(tau + r) = kappa V(tau); exact finite sums at
    rationals.  form='proposition' uses the uniform constant, 'part3' the
    parity-split constants (they agree; both are kept as independent checks)."""
    alpha.require_theorem()
    A, C, a = alpha.A, alpha.C, alpha.a
    if not (r == 2 * C or (r == C and C % 2 == 0)):
        raise ValueError("r must be 2C, or C for even C")
    rational = isinstance(point, RationalPoint)
    if rational:
        spec = SetSpec("Salpha", alpha.C, alpha)
        image = RationalPoint.normalized(point.h + r * point.k, point.k)
        if not set_member(spec, point) or not set_member(spec, image):
            raise NotInQuantumSet(f"{point} or {image} outside the quantum set")
        v_here = _v_dispatch(alpha, point, policy)
        v_image = _v_dispatch(alpha, image, policy)
    else:
        t = as_tau(point, policy)
        v_here = _v_dispatch(alpha, t, policy)
        v_image = _v_dispatch(alpha, t + r, policy)

    if form == "proposition":
        kappa = UnitRoot.of(
            Fraction(-r, 8) + Fraction(A * r // C + r // 2, 2)
            - Fraction(r, 2) * (Fraction(A, C) - Fraction(1, 2)) ** 2)
        return abs(v_image - complex(kappa) * v_here)
    if form == "part3":
        if C % 2 == 0:
            if r != C:
                raise ValueError("part3 with even C uses r = C")
            kappa = UnitRoot.of(
                Fraction(A + C // 2, 2) + Fraction(C, 8)
                + Fraction((2 * A - C) ** 2, 8 * C))
            return abs(v_here - complex(kappa) * v_image)
        if r != 2 * C:
            raise ValueError("part3 with odd C uses r = 2C")
        kappa = UnitRoot.of(Fraction(C, 4) + Fraction((2 * A - C) ** 2, 4 * C))
        return abs(v_here + complex(kappa) * v_image)
    raise ValueError(f"unknown form {form!r}")


# ---------------------------------------------------------------------------
# the two Mordell-integral pieces of the hyperbolic law (lemma route)
# ---------------------------------------------------------------------------

def mobius_i_term(alpha: AlphaParams, r: int, tau,
                  policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """(1/2) e(aA/2C) e(-a^2 tau_r/8) sqrt(-i tau_r) h((a/2) tau_r - (A/C - 1/2); tau_r),
    with tau_r = -1/tau - r."""
    t = as_tau(tau, policy)
    A, C, a = alpha.A, alpha.C, alpha.a
    tr = -1.0 / t - r
    harg = (a / 2.0) * tr - (float(alpha.u_slope) - 0.5)
    # the tau-direction of the argument makes the real-line integrand
    # ill-conditioned for odd a; the lattice-safe mu split is exact there
    h = mordell_h(harg, tr, "mu_identity", policy)
    coef = 0.5 * cmath.exp(2j * math.pi * (a * A) / (2.0 * C)) \
        * cmath.exp(-2j * math.pi * a * a * tr / 8.0) * principal_sqrt(-1j * tr)
    return EvalResult(coef * h.value, abs(coef) * h.err_bound, h.terms_used)


def mobius_j_term(alpha: AlphaParams, r: int, tau,
                  policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """-(1/2) i^a (-1)^{ar/2} e((a^2+1)r/8) sqrt(r tau + 1) q^{-(1/2 - A/C)^2/2}
    h((1/2 - A/C) tau - a/2; tau)."""
    t = as_tau(tau, policy)
    a = alpha.a
    slope = 0.5 - float(alpha.u_slope)
    h = mordell_h(slope * t - a / 2.0, t, "mu_identity", policy)
    phase = UnitRoot.of(Fraction(a, 4) + Fraction(a * r, 4) + Fraction((a * a + 1) * r, 8))
    coef = -0.5 * complex(phase) * principal_sqrt(r * t + 1.0) * q_power(t, -slope * slope / 2.0)
    return EvalResult(coef * h.value, abs(coef) * h.err_bound, h.terms_used)
