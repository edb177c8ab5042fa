"""Quadrature engines: the Mordell integral h, period integrals of g_{a,b}
along vertical lines, the boundary-safe (modular-reduced) g evaluator, and
the delta combination.

Vertical paths z = d + i t run from a rational d (or from -conj(tau)) up to
i*infinity.  Near the real axis the integrand is evaluated through the
translation/inversion reduction of g_{a,b}; above the split it uses the
direct series; the tail beyond T is bounded analytically.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .core import (
    DEFAULT_POLICY,
    CharPair,
    EvalResult,
    ImTooSmall,
    QuadratureFailure,
    ReductionOverflow,
    SingularEndpoint,
    SingularInput,
    TruncationPolicy,
    ULP_PER_TERM,
    as_tau,
    principal_sqrt,
    q_power,
    sqrt_minus_i_tau_cubed,
)
from .series import g_ab_values, mu

__all__ = ["PathSpec", "mordell_h", "g_eval_reduced", "period_integral", "delta"]


@dataclass(frozen=True)
class PathSpec:
    """Vertical integration path."""

    kind: str  # "from_rational" | "from_minus_conj_tau"
    d: Fraction | None = None
    split_t: float = 1.0
    tail_T: float | None = None

    @classmethod
    def from_rational(cls, d, split_t: float = 1.0) -> "PathSpec":
        return cls("from_rational", Fraction(d), split_t)

    @classmethod
    def from_minus_conj_tau(cls, split_t: float = 1.0) -> "PathSpec":
        return cls("from_minus_conj_tau", None, split_t)


# ---------------------------------------------------------------------------
# Mordell integral
# ---------------------------------------------------------------------------

def _h_trapezoid(u: complex, t: complex, policy: TruncationPolicy) -> EvalResult:
    y = t.imag
    ur = abs(u.real)
    eps = policy.target_abs_err
    ln_target = math.log(1.0 / eps) + 3.0
    disc = (2.0 * math.pi * ur) ** 2 + 4.0 * math.pi * y * ln_target
    X = (2.0 * math.pi * ur + math.sqrt(disc)) / (2.0 * math.pi * y)
    X = max(X, 2.0 * ur / y + 1.0)

    def integral(n_panels: int) -> tuple[complex, float]:
        xs = np.linspace(-X, X, n_panels + 1)
        vals = np.exp(1j * np.pi * t * xs * xs - 2.0 * np.pi * u * xs) / np.cosh(np.pi * xs)
        step = xs[1] - xs[0]
        return complex(np.trapezoid(vals, xs)), float(step * np.abs(vals).sum())

    n = max(int(math.ceil(2.0 * X / 0.05)), 8)
    prev, _ = integral(n)
    nodes = n + 1
    prev_delta = math.inf
    for depth in range(min(policy.quad_max_depth, 14)):
        n *= 2
        cur, l1_mass = integral(n)
        nodes += n + 1
        delta_est = abs(cur - prev)
        # cancellation inside the oscillatory sum bounds the achievable
        # accuracy by the L1 mass of the integrand
        floor = 4e-16 * l1_mass
        converged = delta_est <= max(policy.quad_rel_tol * abs(cur),
                                     eps / 8.0, 2.0 * floor)
        # geometric convergence puts successive refinements at the roundoff
        # floor almost immediately; accept a stall there as converged
        stalled = delta_est >= 0.25 * prev_delta and \
            delta_est <= 1e-9 * max(1.0, abs(cur))
        if converged or stalled:
            tail = 4.0 * math.exp(-(math.pi * y * X * X - 2.0 * math.pi * ur * X)) \
                / (2.0 * math.pi * y * X - 2.0 * math.pi * ur + math.pi)
            err = delta_est + tail + floor + ULP_PER_TERM * n * max(1.0, abs(cur))
            return EvalResult(cur, err, nodes)
        prev, prev_delta = cur, delta_est
    raise QuadratureFailure("Mordell integral trapezoid refinement did not converge")


def mordell_h(u, tau, method: str = "quadrature",
              policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """Mordell integral h(u; tau) = int_R e^{pi i tau x^2 - 2 pi u x}/cosh(pi x) dx.

    method='quadrature' integrates the real line directly (trapezoid with
    Richardson refinement; the integrand is entire and sech-damped, so the
    trapezoid converges geometrically).  method='mu_identity' evaluates
    2i [ (-i tau)^{-1/2} e^{pi i u^2/tau} mu(u'/tau, v/tau; -1/tau) + mu(u', v; tau) ]
    with the lattice-safe split u' = u + tau/2, v = tau/2; the two methods are
    mutual oracles.
    """
    t = as_tau(tau, policy)
    u = complex(u)
    if method == "quadrature":
        return _h_trapezoid(u, t, policy)
    if method == "mu_identity":
        v = t / 2.0
        uu = u + v
        m_far = mu(uu / t, 0.5 + 0.0j, -1.0 / t, policy)
        m_near = mu(uu, v, t, policy)
        pref = cmath.exp(1j * math.pi * u * u / t) / principal_sqrt(-1j * t)
        value = 2j * (pref * m_far.value + m_near.value)
        err = 2.0 * (abs(pref) * m_far.err_bound + m_near.err_bound)
        return EvalResult(value, err, m_far.terms_used + m_near.terms_used)
    raise ValueError(f"unknown mordell_h method {method!r}")


# ---------------------------------------------------------------------------
# reduced g evaluation near the real axis
# ---------------------------------------------------------------------------

def g_eval_reduced(ch, z, policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """g_{a,b}(z) for im(z) > 0, via translation/inversion until im >= 1/2.

    Each pass recentres re(z) into [-1/2, 1/2) with the tau+1 law and then
    inverts with the -1/tau law; with the centred real part, |z| < 1 whenever
    im(z) < 1/2, so every inversion at least doubles the imaginary part.
    """
    a, b = (ch.a, ch.b) if hasattr(ch, "a") else (float(ch[0]), float(ch[1]))
    zc = complex(z)
    if zc.imag <= 0.0:
        raise SingularInput("g_eval_reduced needs im(z) > 0")
    factor = 1.0 + 0.0j
    inversions = 0
    while zc.imag < 0.5:
        m = math.floor(zc.real + 0.5)
        if m != 0:
            factor *= cmath.exp(-1j * math.pi * a * (a + 1.0) * m)
            b += m * (a + 0.5)
            zc -= m
        w = -1.0 / zc
        factor *= 1j * cmath.exp(2j * math.pi * a * b) * sqrt_minus_i_tau_cubed(w)
        a, b = b, -a
        zc = w
        inversions += 1
        if inversions > 64:
            raise ReductionOverflow("g reduction exceeded 64 inversions")
    vals, errs, n = g_ab_values(a, b, np.array([zc]), policy)
    return EvalResult(factor * complex(vals[0]), abs(factor) * float(errs[0]), n)


# ---------------------------------------------------------------------------
# adaptive panel quadrature
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def _gl_panel(f, a: float, b: float) -> complex:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * complex(np.sum(_GL_W * f(mid + half * _GL_X)))


def _adapt(f, a: float, b: float, tol: float, depth: int, max_depth: int,
           stats: dict) -> tuple[complex, float]:
    whole = _gl_panel(f, a, b)
    m = 0.5 * (a + b)
    halves = _gl_panel(f, a, m) + _gl_panel(f, m, b)
    stats["nodes"] += 36
    est = abs(whole - halves)
    if est <= tol or (b - a) < 1e-13 * max(1.0, abs(a)):
        return halves, est
    if depth >= max_depth:
        raise QuadratureFailure(
            f"panel [{a:g},{b:g}] error estimate {est:.2e} above allocation {tol:.2e}")
    left, el = _adapt(f, a, m, tol / 2.0, depth + 1, max_depth, stats)
    right, er = _adapt(f, m, b, tol / 2.0, depth + 1, max_depth, stats)
    return left + right, el + er


# ---------------------------------------------------------------------------
# period integral
# ---------------------------------------------------------------------------

def _char_mu(a: float) -> float:
    """Smallest nonzero |nu| over nu in a+Z (the nu=0 term of g vanishes)."""
    m = a - math.floor(a)
    mu_ = min(m, 1.0 - m)
    return 1.0 if mu_ < 1e-9 else mu_


def _tail_constant(a: float, b: float) -> float:
    m = a - math.floor(a)
    nus = sorted((abs(m + n) for n in range(-3, 4)))[:4]
    return 2.0 * sum(nu * math.exp(2.0 * math.pi * nu * abs(b)) for nu in nus)


def period_integral(ch, path: PathSpec, tau,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """int over the vertical path of g_{a,b}(z) / sqrt(-i (z + tau)) dz.

    tau may be a point of the upper half-plane or a real number (the quantum
    regime); in the latter case the path must not start at -tau.
    """
    a, b = (ch.a, ch.b) if hasattr(ch, "a") else (float(ch[0]), float(ch[1]))
    tauc = complex(tau)
    real_tau = tauc.imag == 0.0
    if not real_tau and tauc.imag < policy.min_im:
        raise ImTooSmall(f"im(tau) = {tauc.imag} below policy.min_im")

    if path.kind == "from_rational":
        base = complex(float(path.d), 0.0)
        if real_tau and abs(float(path.d) + tauc.real) <= 1e-3:
            raise SingularEndpoint(
                f"path endpoint {path.d} within 1e-3 of -tau = {-tauc.real}")
        offset = 0.0
    elif path.kind == "from_minus_conj_tau":
        if real_tau:
            raise SingularEndpoint("-conj(tau) path needs tau in the upper half-plane")
        base = -tauc.conjugate()
        offset = tauc.imag
    else:
        raise ValueError(f"unknown path kind {path.kind!r}")

    eps = policy.target_abs_err
    mu_ = _char_mu(a)
    c_tail = _tail_constant(a, b)
    split = path.split_t

    if path.tail_T is not None:
        T = path.tail_T
    else:
        T = max(2.0 * split, 2.0)
        while c_tail * math.exp(-math.pi * mu_ * mu_ * (T + offset)) \
                / (math.pi * mu_ * mu_ * math.sqrt(T)) >= eps / 4.0:
            T *= 1.25
            if T > 1e7:
                raise QuadratureFailure("tail cutoff T did not close")
    tail = c_tail * math.exp(-math.pi * mu_ * mu_ * (T + offset)) \
        / (math.pi * mu_ * mu_ * math.sqrt(T))

    g_policy = replace(policy, target_abs_err=min(eps / max(10.0, T), 1e-13))

    def f_direct(ts: np.ndarray) -> np.ndarray:
        zs = base + 1j * ts
        gv, _, _ = g_ab_values(a, b, zs, g_policy)
        return 1j * gv / np.sqrt(-1j * (zs + tauc))

    def f_reduced(ts: np.ndarray) -> np.ndarray:
        out = np.empty(ts.shape, dtype=complex)
        for i, t in enumerate(ts):
            z = base + 1j * float(t)
            gr = g_eval_reduced(CharPair(a, b), z, g_policy)
            out[i] = 1j * gr.value / cmath.sqrt(-1j * (z + tauc))
        return out

    stats = {"nodes": 0}
    max_depth = min(policy.quad_max_depth, 26)
    total = 0.0 + 0.0j
    est_total = 0.0

    # panel edges: [0, split] handled adaptively (reduced when im < 1/2),
    # then geometric growth up to T.
    edges = [0.0, split]
    while edges[-1] < T:
        edges.append(min(edges[-1] * 1.7, T))
    n_panels = len(edges) - 1
    tol_each = (eps / 4.0) / max(n_panels, 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        needs_reduction = (offset + lo) < 0.5
        f = f_reduced if needs_reduction else f_direct
        val, est = _adapt(f, lo, hi, tol_each, 0, max_depth, stats)
        total += val
        est_total += est

    err = est_total + tail + ULP_PER_TERM * stats["nodes"] * max(1.0, abs(total)) \
        + 2.0 * float(g_policy.target_abs_err) * T
    return EvalResult(total, err, stats["nodes"])


# ---------------------------------------------------------------------------
# delta combination
# ---------------------------------------------------------------------------

def delta(x: float, y: float, tau, policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """delta_{x,y}(tau) = int_0^{i inf} g_{x+1/2,y+1/2}(z)/sqrt(-i(z+tau)) dz
    + e(x(y+1/2)) q^{-x^2/2} h(x tau - y; tau)."""
    t = as_tau(tau, policy)
    per = period_integral(CharPair(x + 0.5, y + 0.5), PathSpec.from_rational(0), t, policy)
    hres = mordell_h(x * t - y, t, "quadrature", policy)
    coef = cmath.exp(2j * math.pi * x * (y + 0.5)) * q_power(t, -x * x / 2.0)
    value = per.value + coef * hres.value
    err = per.err_bound + abs(coef) * hres.err_bound
    return EvalResult(value, err, per.terms_used + hres.terms_used)
