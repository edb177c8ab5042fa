"""Verification suites, report serialization, and the cocycle scanner.

Each suite draws deterministic random cases from a seed, computes identity
residuals through the library, and returns an IdentityReport.  Reports are
byte-stable for a fixed (name, cases, seed, tol) apart from wall_time_ms.
"""
from __future__ import annotations

import cmath
import json
import math
import random
import time
from fractions import Fraction

from .core import (
    DEFAULT_POLICY,
    CharPair,
    EvaluationError,
    IdentityReport,
    NotInGroup,
    RationalPoint,
    TruncationPolicy,
    UnitRoot,
    UnknownSuite,
    principal_sqrt,
    q_power,
    sqrt_minus_i_tau_cubed,
)
from .forms import (
    AlphaParams,
    catalog_tuples,
    laplacian_residual,
    mobius_i_term,
    mobius_j_term,
    mock_transform_residual,
    qm_residual_m,
    qm_residual_t,
    quantum_cocycle,
    v_alpha,
)
from .params import AlphaParams
from .periods import PathSpec, g_eval_reduced, mordell_h, period_integral
from .qsets import SetSpec, closure_check, set_member
from .series import eta, g2_series, g_ab, mu, r_corr, theta
from .sl2 import (
    GroupSpec,
    IntMatrix2,
    composite_branch,
    eta_psi,
    eta_psi_exponent,
    group_member,
    phi_multiplier,
    random_sl2,
    sample_element,
    tilde_decompose,
)

__all__ = ["SUITE_NAMES", "run_suite", "scan_cocycle", "render_report",
           "parse_report", "render_scan_csv", "render_scan_svg"]


# ---------------------------------------------------------------------------
# drawing helpers
# ---------------------------------------------------------------------------

def _rand_tau(rng: random.Random, im_lo=0.6, im_hi=1.6, re_half=0.4) -> complex:
    return complex(rng.uniform(-re_half, re_half), rng.uniform(im_lo, im_hi))


def _rand_uv(rng: random.Random, tau: complex) -> tuple[complex, complex]:
    c1, c2 = rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)
    d1, d2 = rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)
    return c1 * tau + c2, d1 * tau + d2


class _Collector:
    def __init__(self, tol: float):
        self.tol = tol
        self.max_residual = 0.0
        self.failures: list[dict] = []
        self.count = 0

    def add(self, inputs: dict, residual: float, tol: float | None = None):
        self.count += 1
        self.max_residual = max(self.max_residual, residual)
        if residual > (self.tol if tol is None else tol):
            self.failures.append(
                {"inputs": json.dumps(inputs, sort_keys=True), "residual": residual})

    def fail(self, inputs: dict, note: str):
        self.count += 1
        self.failures.append(
            {"inputs": json.dumps({**inputs, "note": note}, sort_keys=True),
             "residual": float("nan")})


def _ser(z) -> str:
    if isinstance(z, complex):
        return f"{z.real!r}+{z.imag!r}i"
    return repr(z)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _suite_mu_elliptic(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng)
        u, v = _rand_uv(rng, tau)
        base = mu(u, v, tau, policy).value
        checks = {
            "u+1": abs(mu(u + 1, v, tau, policy).value + base),
            "v+1": abs(mu(u, v + 1, tau, policy).value + base),
            "negate": abs(mu(-u, -v, tau, policy).value - base),
        }
        for law, res in checks.items():
            col.add({"law": law, "u": _ser(u), "v": _ser(v), "tau": _ser(tau)}, res)


def _suite_mu_modular(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng)
        u, v = _rand_uv(rng, tau)
        base = mu(u, v, tau, policy).value
        res4 = abs(mu(u, v, tau + 1, policy).value - cmath.exp(-1j * math.pi / 4) * base)
        col.add({"law": "tau+1", "u": _ser(u), "v": _ser(v), "tau": _ser(tau)}, res4)
        far = mu(u / tau, v / tau, -1.0 / tau, policy).value
        h = mordell_h(u - v, tau, "quadrature", policy).value
        lhs = far * cmath.exp(1j * math.pi * (u - v) ** 2 / tau) / principal_sqrt(-1j * tau) + base
        col.add({"law": "inversion", "u": _ser(u), "v": _ser(v), "tau": _ser(tau)},
                abs(lhs - h / 2j))


def _suite_theta_consistency(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng)
        z = complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.4, 0.4))
        s = theta(z, tau, "sum", policy)
        p = theta(z, tau, "product", policy)
        col.add({"z": _ser(z), "tau": _ser(tau)}, abs(s.value - p.value))


def _suite_h_props(cases, rng, col, policy):
    for i in range(min(10, max(cases // 5, 3))):
        tau = _rand_tau(rng, 0.5, 1.8)
        res = abs(mordell_h(0.5, tau, "quadrature", policy).value
                  - 1.0 / principal_sqrt(-1j * tau))
        col.add({"law": "h(1/2)", "tau": _ser(tau)}, res, tol=col.tol / 10.0)
    for _ in range(cases):
        tau = _rand_tau(rng)
        z = rng.uniform(-0.45, 0.45) * tau - rng.uniform(-0.45, 0.45)
        h0 = mordell_h(z, tau, "quadrature", policy).value
        law1 = abs(h0 + mordell_h(z + 1, tau, "quadrature", policy).value
                   - 2.0 / principal_sqrt(-1j * tau)
                   * cmath.exp(1j * math.pi * (z + 0.5) ** 2 / tau))
        law2 = abs(h0 + cmath.exp(-2j * math.pi * z - 1j * math.pi * tau)
                   * mordell_h(z + tau, tau, "quadrature", policy).value
                   - 2.0 * cmath.exp(-1j * math.pi * z - 1j * math.pi * tau / 4))
        law3 = abs(h0 - mordell_h(-z, tau, "quadrature", policy).value)
        for law, res in (("shift1", law1), ("shift_tau", law2), ("even", law3)):
            col.add({"law": law, "z": _ser(z), "tau": _ser(tau)}, res)


def _suite_h_cross(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng)
        z = rng.uniform(0.05, 0.45) * tau + rng.uniform(0.05, 0.45)
        a = mordell_h(z, tau, "quadrature", policy)
        b = mordell_h(z, tau, "mu_identity", policy)
        col.add({"z": _ser(z), "tau": _ser(tau)}, abs(a.value - b.value))


def _suite_gab_props(cases, rng, col, policy):
    for _ in range(cases):
        a = rng.uniform(-1.2, 1.2)
        b = rng.uniform(-1.2, 1.2)
        tau = _rand_tau(rng, 0.7, 1.4)
        base = g_ab(CharPair(a, b), tau, policy).value
        res = {
            "a+1": abs(g_ab(CharPair(a + 1, b), tau, policy).value - base),
            "b+1": abs(g_ab(CharPair(a, b + 1), tau, policy).value
                       - cmath.exp(2j * math.pi * a) * base),
            "negate": abs(g_ab(CharPair(-a, -b), tau, policy).value + base),
            "tau+1": abs(g_ab(CharPair(a, b), tau + 1, policy).value
                         - cmath.exp(-1j * math.pi * a * (a + 1))
                         * g_ab(CharPair(a, a + b + 0.5), tau, policy).value),
            "inversion": abs(g_ab(CharPair(a, b), -1.0 / tau, policy).value
                             - 1j * cmath.exp(2j * math.pi * a * b)
                             * sqrt_minus_i_tau_cubed(tau)
                             * g_ab(CharPair(b, -a), tau, policy).value),
        }
        for law, r in res.items():
            col.add({"law": law, "a": a, "b": b, "tau": _ser(tau)}, r)


def _suite_eta_cube(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng, 0.5, 1.8)
        g = g_ab(CharPair(0.5, 0.5), tau, policy).value
        e3 = eta(tau, policy).value ** 3
        col.add({"tau": _ser(tau)}, abs(g - 1j * e3))


def _suite_z116(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng, 0.7, 1.5)
        a = rng.uniform(-0.45, 0.45)
        b = rng.uniform(-0.45, 0.45)
        pref = -cmath.exp(2j * math.pi * a * (b + 0.5)) * q_power(tau, -a * a / 2.0)
        per1 = period_integral(CharPair(a + 0.5, b + 0.5),
                               PathSpec.from_minus_conj_tau(), tau, policy)
        rhs1 = pref * r_corr(a * tau - b, tau, policy).value
        col.add({"part": 1, "a": a, "b": b, "tau": _ser(tau)}, abs(per1.value - rhs1))
        per2 = period_integral(CharPair(a + 0.5, b + 0.5),
                               PathSpec.from_rational(0), tau, policy)
        rhs2 = pref * mordell_h(a * tau - b, tau, "quadrature", policy).value
        col.add({"part": 2, "a": a, "b": b, "tau": _ser(tau)}, abs(per2.value - rhs2))


def _suite_zlem_ext(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng, 0.7, 1.5)
        b = rng.choice([-1, 1]) * rng.uniform(0.06, 0.44)
        pref = -1j * cmath.exp(2j * math.pi * (-tau / 8.0 + b / 2.0))
        per1 = period_integral(CharPair(1.0, b + 0.5),
                               PathSpec.from_minus_conj_tau(), tau, policy)
        rhs1 = pref * r_corr(tau / 2.0 - b, tau, policy).value + 1j
        col.add({"part": 1, "b": b, "tau": _ser(tau)}, abs(per1.value - rhs1))
        per2 = period_integral(CharPair(1.0, b + 0.5),
                               PathSpec.from_rational(0), tau, policy)
        rhs2 = pref * mordell_h(tau / 2.0 - b, tau, "quadrature", policy).value + 1j
        col.add({"part": 2, "b": b, "tau": _ser(tau)}, abs(per2.value - rhs2))
        a = rng.choice([-1, 1]) * rng.uniform(0.06, 0.44)
        per3 = period_integral(CharPair(a + 0.5, 1.0),
                               PathSpec.from_rational(0), tau, policy)
        rhs3 = (-cmath.exp(2j * math.pi * (-a * a * tau / 2.0 + a))
                * mordell_h(a * tau - 0.5, tau, "quadrature", policy).value
                + cmath.exp(2j * math.pi * a) / principal_sqrt(-1j * tau))
        col.add({"part": 3, "a": a, "tau": _ser(tau)}, abs(per3.value - rhs3))


def _suite_kang(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng, 0.8, 1.6)
        alpha = rng.uniform(0.05, 0.45) * tau + rng.uniform(0.05, 0.45)
        lhs = mu(2 * alpha, tau / 2.0, tau, policy).value
        g2v = g2_series(cmath.exp(2j * math.pi * alpha), cmath.exp(1j * math.pi * tau), policy)
        eta_full = eta(tau, policy).value
        eta_half = eta(tau / 2.0, policy).value
        th = theta(2 * alpha, tau, "sum", policy).value
        q8 = cmath.exp(1j * math.pi * tau / 4.0)
        rhs = 1j * q8 * g2v.value \
            - cmath.exp(-2j * math.pi * alpha) * q8 * eta_full ** 4 / (eta_half ** 2 * th)
        col.add({"alpha": _ser(alpha), "tau": _ser(tau)}, abs(lhs - rhs))


# -- completed-form transformation ------------------------------------------

_SMALL_COMPOSITE = {
    4: IntMatrix2(3, -4, 1, -1),
    8: IntMatrix2(-3, 8, 1, -3),
    12: IntMatrix2(-5, 24, 1, -5),
}


def _transform_pool(alpha: AlphaParams) -> list[IntMatrix2]:
    """Small-frame members of the composite group: parabolic up/down moves plus
    (for a odd, C = 0 mod 4) one canonical odd-diagonal representative."""
    C, a = alpha.C, alpha.a
    L = C if C % 2 == 0 else 2 * C
    zstep = 1 if a % 2 == 0 else 2
    pool = [IntMatrix2(1, L, 0, 1), IntMatrix2(1, -L, 0, 1),
            IntMatrix2(1, 0, zstep, 1), IntMatrix2(1, 0, -zstep, 1)]
    if a % 2 == 1 and C % 4 == 0:
        pool.append(_SMALL_COMPOSITE[C])
        pool.append(_SMALL_COMPOSITE[C].inv())
    return pool


def _draw_transform_case(alpha, rng, want_composite=False, max_len=3):
    pool = _transform_pool(alpha)
    spec = GroupSpec("Aalpha", alpha=alpha)
    for _ in range(200):
        g = IntMatrix2(1, 0, 0, 1)
        for _ in range(rng.randint(1, max_len)):
            g = g @ rng.choice(pool)
        if want_composite:
            g = g @ _SMALL_COMPOSITE[alpha.C]
        if g == IntMatrix2(1, 0, 0, 1) or abs(g.z) > 3 or max(map(abs, g.entries())) > 400:
            continue
        if want_composite and composite_branch(alpha, g) != "composite":
            continue
        if not group_member(spec, g):
            continue
        for _ in range(20):
            xi = complex(rng.uniform(-0.3, 0.3), rng.uniform(0.9, 1.4))
            tau = xi if g.z == 0 else -g.w / g.z + xi
            if g.act(tau).imag >= 0.12:
                return g, tau
    raise EvaluationError("could not draw a small-frame transform case")


def _suite_mock_transform(cases, rng, col, policy):
    classes = [
        AlphaParams(1, 3, 0), AlphaParams(1, 3, 1),
        AlphaParams(1, 6, 0), AlphaParams(1, 6, 1),
        AlphaParams(1, 4, 0),
    ]
    for alpha in classes:
        for _ in range(cases):
            g, tau = _draw_transform_case(alpha, rng)
            res = mock_transform_residual(alpha, g, tau, policy)
            col.add({"alpha": alpha.as_tuple(), "gamma": g.entries(), "tau": _ser(tau)}, res)
    # the a-odd, C = 0 mod 4 class, split across C in {4, 8, 12} with forced
    # composite-branch draws
    odd_comp = [AlphaParams(1, 4, 1), AlphaParams(1, 8, 1), AlphaParams(5, 12, 1)]
    per = max(cases // len(odd_comp), 2)
    for alpha in odd_comp:
        n_composite = 0
        for i in range(per):
            want = i % 2 == 0 or (per - i <= 5 - n_composite)
            g, tau = _draw_transform_case(alpha, rng, want_composite=want)
            if composite_branch(alpha, g) == "composite":
                n_composite += 1
            res = mock_transform_residual(alpha, g, tau, policy)
            col.add({"alpha": alpha.as_tuple(), "gamma": g.entries(),
                     "branch": composite_branch(alpha, g), "tau": _ser(tau)}, res)
        if n_composite < min(5, per):
            col.fail({"alpha": alpha.as_tuple()},
                     f"only {n_composite} composite-branch draws")


def _suite_phi_consistency(cases, rng, col, policy):
    alphas = [AlphaParams(1, 3, 0), AlphaParams(1, 4, 1), AlphaParams(1, 6, 1),
              AlphaParams(1, 8, 1), AlphaParams(2, 5, 3)]
    for _ in range(cases):
        alpha = rng.choice(alphas)
        g, _tau = _draw_transform_case(alpha, rng)
        closed = phi_multiplier(alpha, g, "closed_form")
        if abs(abs(closed) - 1.0) > 1e-15:
            col.fail({"alpha": alpha.as_tuple(), "gamma": g.entries()}, "|phi| != 1")
            continue
        worst = 0.0
        for _ in range(2):
            tau = _rand_tau(rng, 0.8, 1.4)
            via = phi_multiplier(alpha, g, "via_tau", tau=tau)
            worst = max(worst, abs(closed - via))
        col.add({"alpha": alpha.as_tuple(), "gamma": g.entries()}, worst)


def _suite_laplacian(cases, rng, col, policy):
    tuples = [AlphaParams(1, 4, 1), AlphaParams(1, 4, 0),
              AlphaParams(1, 3, 1), AlphaParams(1, 3, 0)]
    grid = [complex(x, y) for x in (-0.25, 0.0, 0.25) for y in (0.9, 1.1, 1.3)]
    for alpha in tuples:
        for tau in grid:
            res = laplacian_residual(alpha, tau, 1e-3, policy, part="completed")
            col.add({"alpha": alpha.as_tuple(), "tau": _ser(tau)}, res)
    # sensitivity control: the holomorphic part alone must NOT pass as
    # annihilated, i.e. its residual is required to exceed 1e-2
    control = laplacian_residual(AlphaParams(1, 3, 0), 1j, 1e-3, policy,
                                 part="holomorphic")
    if control <= 1e-2:
        col.fail({"alpha": (1, 3, 0), "tau": "0.0+1.0i", "control": control},
                 "holomorphic-part control residual did not exceed 1e-2")


def _suite_delta_vanish(cases, rng, col, policy):
    from .periods import delta as delta_fn
    xs = [-0.45, -0.225, 0.0, 0.225, 0.45]
    pts = [(x, y) for x in xs for y in xs]
    taus = [1j, 0.3 + 0.9j]
    for tau in taus:
        for x, y in pts[:max(1, min(len(pts), cases))]:
            d = delta_fn(x, y, tau, policy)
            col.add({"x": x, "y": y, "tau": _ser(tau)}, abs(d.value))


def _suite_delta_shifts(cases, rng, col, policy):
    from .periods import delta as delta_fn
    for _ in range(cases):
        x = rng.uniform(-0.45, 0.45)
        y = rng.uniform(-0.45, 0.45)
        tau = _rand_tau(rng, 0.8, 1.6, 0.3)
        d0 = delta_fn(x, y, tau, policy).value
        dy = delta_fn(x, y + 1.0, tau, policy).value
        res_y = abs(dy + cmath.exp(2j * math.pi * x) * d0
                    - 2.0 * cmath.exp(2j * math.pi * x) / principal_sqrt(-1j * tau)
                    * cmath.exp(1j * math.pi * (y + 0.5) ** 2 / tau))
        col.add({"law": "y+1", "x": x, "y": y, "tau": _ser(tau)}, res_y)
        dx = delta_fn(x + 1.0, y, tau, policy).value
        res_x = abs(dx - d0 + 2.0 * cmath.exp(1j * math.pi * (x + y))
                    * cmath.exp(2j * math.pi * x * y) * q_power(tau, -(x + 0.5) ** 2 / 2.0))
        col.add({"law": "x+1", "x": x, "y": y, "tau": _ser(tau)}, res_x)


_QM_ALPHAS = [AlphaParams(1, 3, 0), AlphaParams(2, 3, 0), AlphaParams(1, 3, 1),
              AlphaParams(1, 4, 1), AlphaParams(1, 5, 2), AlphaParams(2, 5, 3)]


def _draw_quantum_point(alpha, r, rng) -> RationalPoint:
    spec = SetSpec("Salpha", alpha.C, alpha)
    for _ in range(1000):
        k = rng.randint(1, 30)
        h = rng.randint(-45, 45)
        if h == 0 or h % 2 == 0 or math.gcd(abs(h), k) != 1:
            continue
        p = RationalPoint(h, k)
        if not set_member(spec, p):
            continue
        if abs(p.value) > 4.0 or abs(p.value + 1.0 / r) < 0.1:
            continue
        den = r * p.h + p.k
        if den == 0 or not set_member(spec, RationalPoint.normalized(p.h, den)):
            continue
        return p
    raise EvaluationError("no quantum point found")


def _suite_quantum_m(cases, rng, col, policy):
    for alpha in _QM_ALPHAS:
        r = 1 if alpha.a % 2 == 0 else 2
        form = "part1" if alpha.a % 2 == 0 else "part2"
        for _ in range(cases):
            p = _draw_quantum_point(alpha, r, rng)
            res = qm_residual_m(alpha, r, p, form, policy)
            col.add({"alpha": alpha.as_tuple(), "form": form, "point": str(p)}, res)
    # general single-integral form on the upper half-plane, tighter tolerance
    for i in range(20):
        alpha = _QM_ALPHAS[i % len(_QM_ALPHAS)]
        r = 1 if alpha.a % 2 == 0 else 2
        tau = _rand_tau(rng, 0.8, 1.4, 0.3)
        res = qm_residual_m(alpha, r, tau, "general", policy)
        col.add({"alpha": alpha.as_tuple(), "form": "general", "tau": _ser(tau)},
                res, tol=col.tol / 10.0)


def _suite_quantum_t(cases, rng, col, policy):
    even_class = [AlphaParams(1, 4, 1), AlphaParams(1, 4, 0), AlphaParams(1, 6, 1)]
    odd_class = [AlphaParams(1, 3, 0), AlphaParams(1, 3, 1), AlphaParams(2, 5, 3),
                 AlphaParams(1, 5, 2)]
    for cls in (even_class, odd_class):
        for i in range(cases):
            alpha = cls[i % len(cls)]
            r = alpha.C if alpha.C % 2 == 0 else 2 * alpha.C
            spec = SetSpec("Salpha", alpha.C, alpha)
            for _ in range(1000):
                k = rng.randint(1, 40)
                h = rng.randint(-60, 60)
                if h == 0 or h % 2 == 0 or math.gcd(abs(h), k) != 1:
                    continue
                p = RationalPoint(h, k)
                if set_member(spec, p):
                    break
            else:
                raise EvaluationError("no rational point for quantum-t")
            res_p = qm_residual_t(alpha, r, p, "proposition", policy)
            res_3 = qm_residual_t(alpha, r, p, "part3", policy)
            col.add({"alpha": alpha.as_tuple(), "r": r, "point": str(p)},
                    max(res_p, res_3))


def _suite_lemma_ij(cases, rng, col, policy):
    alphas = [AlphaParams(1, 3, 0), AlphaParams(1, 5, 2), AlphaParams(1, 3, 1),
              AlphaParams(2, 5, 3)]
    for i in range(cases):
        alpha = alphas[i % len(alphas)]
        r = 1 if alpha.a % 2 == 0 else 2
        tau = _rand_tau(rng, 0.9, 1.4, 0.35)
        I = mobius_i_term(alpha, r, tau, policy).value
        J = mobius_j_term(alpha, r, tau, policy).value
        c2 = UnitRoot.of(Fraction(1, 4) + Fraction(alpha.A * (alpha.a - 1), 2 * alpha.C)
                         + Fraction(r * (alpha.a + 1) ** 2, 8))
        single = 0.5 * complex(c2) * principal_sqrt(r * tau + 1.0) \
            * quantum_cocycle(alpha, r, tau, policy).value
        col.add({"alpha": alpha.as_tuple(), "r": r, "tau": _ser(tau)},
                abs(I + J - single))


def _branch_of(alpha, g):
    try:
        return composite_branch(alpha, g)
    except ValueError:
        return None


def _suite_group_closure(cases, rng, col, policy):
    for C in (4, 8, 12):
        alpha = AlphaParams(1, C, 1)
        spec = GroupSpec("Aalpha", alpha=alpha)
        for i in range(cases):
            g = sample_element(spec, rng.randint(0, 2 ** 30), scale=6)
            h = sample_element(spec, rng.randint(0, 2 ** 30), scale=6)
            prod = g @ h
            ok = group_member(spec, prod) and group_member(spec, g.inv())
            bg, bh, bp = _branch_of(alpha, g), _branch_of(alpha, h), _branch_of(alpha, prod)
            table_ok = (bp == "gamma1") if bg == bh else (bp == "composite")
            if not (ok and table_ok):
                col.fail({"C": C, "g": g.entries(), "h": h.entries()},
                         "closure or branch table violated")
            else:
                col.add({"C": C, "i": i}, 0.0)
    # iff-completeness: tilde shifts are integral exactly on members
    alpha = AlphaParams(1, 4, 1)
    spec = GroupSpec("Aalpha", alpha=alpha)
    for i in range(cases):
        g = random_sl2(rng, 8)
        member = group_member(spec, g)
        try:
            tilde_decompose(alpha, g)
            witnessed = True
        except NotInGroup:
            witnessed = False
        if member != witnessed:
            col.fail({"gamma": g.entries()}, "tilde integrality != membership")
        else:
            col.add({"iff_case": i}, 0.0)


def _suite_set_closure(cases, rng, col, policy):
    alphas = _QM_ALPHAS + [AlphaParams(1, 2, 1)]
    for alpha in alphas:
        rep = closure_check(alpha, cases, rng.randint(0, 2 ** 30))
        col.add({"alpha": alpha.as_tuple(), "samples": cases}, rep.max_residual)
        col.failures.extend(rep.failures)


def _suite_psi_eta(cases, rng, col, policy):
    for _ in range(cases):
        g = random_sl2(rng, 8)
        if g.z != 0:
            tau = -g.w / g.z + complex(rng.uniform(-0.3, 0.3), rng.uniform(0.9, 1.3))
        else:
            tau = _rand_tau(rng, 0.9, 1.3)
        if g.act(tau).imag < 0.1:
            continue
        lhs = eta(g.act(tau), policy).value
        rhs = eta_psi(g) * principal_sqrt(g.frame(tau)) * eta(tau, policy).value
        col.add({"gamma": g.entries(), "tau": _ser(tau)}, abs(lhs - rhs))


def _suite_branch_consistency(cases, rng, col, policy):
    for _ in range(cases):
        tau = _rand_tau(rng, 0.7, 1.5)
        for r in (1, 2):
            tr = -1.0 / tau - r
            res = abs(principal_sqrt(-1j * tr) * principal_sqrt(-1j * tau)
                      - principal_sqrt(r * tau + 1.0))
            col.add({"law": "sqrt-product", "r": r, "tau": _ser(tau)}, res)
    # exact constant matching: dividing the general hyperbolic law by its
    # leading phase must reproduce the specialised part-1/part-2 constants,
    # after the b-index phase shift that normalises g_{A/C, 1/2 - a/2}
    for a, r in ((0, 1), (2, 1), (1, 2), (3, 2)):
        for A, C in ((1, 3), (1, 4), (2, 5), (1, 12)):
            if math.gcd(A, C) != 1:
                continue
            c1 = (Fraction(a * r, 4) + Fraction((a * a + 1) * r, 8)) % 1
            c2 = (Fraction(1, 4) + Fraction(A * (a - 1), 2 * C)
                  + Fraction(r * (a + 1) ** 2, 8)) % 1
            shift = Fraction(-A * (a // 2), C)  # g-law (2) index normalisation
            if a % 2 == 0:
                lead_ok = (c1 - Fraction(1, 8)) % 1 == 0
                coc_ok = (c2 - Fraction(1, 8) + shift) % 1 == \
                    (Fraction(1, 4) - Fraction(A, 2 * C)) % 1
            else:
                lead_ok = c1 == 0
                coc_ok = (c2 + shift) % 1 == Fraction(1, 4)
            if not (lead_ok and coc_ok):
                col.fail({"a": a, "r": r, "A": A, "C": C}, "constant mismatch")
            else:
                col.add({"a": a, "r": r, "A": A, "C": C}, 0.0)


_SUITES = {
    "mu-elliptic": _suite_mu_elliptic,
    "mu-modular": _suite_mu_modular,
    "theta-consistency": _suite_theta_consistency,
    "h-props": _suite_h_props,
    "h-cross": _suite_h_cross,
    "gab-props": _suite_gab_props,
    "eta-cube": _suite_eta_cube,
    "z116": _suite_z116,
    "zlem-ext": _suite_zlem_ext,
    "kang": _suite_kang,
    "mock-transform": _suite_mock_transform,
    "phi-consistency": _suite_phi_consistency,
    "laplacian": _suite_laplacian,
    "delta-vanish": _suite_delta_vanish,
    "delta-shifts": _suite_delta_shifts,
    "quantum-m": _suite_quantum_m,
    "quantum-t": _suite_quantum_t,
    "lemma-IJ": _suite_lemma_ij,
    "group-closure": _suite_group_closure,
    "set-closure": _suite_set_closure,
    "psi-eta": _suite_psi_eta,
    "branch-consistency": _suite_branch_consistency,
}

SUITE_NAMES = tuple(_SUITES)

# default tolerances per suite (overridable through run_suite's tol argument)
DEFAULT_TOLERANCES = {
    "mu-elliptic": 1e-9, "mu-modular": 1e-9, "theta-consistency": 1e-11,
    "h-props": 1e-8, "h-cross": 1e-8, "gab-props": 1e-9, "eta-cube": 1e-10,
    "z116": 1e-6, "zlem-ext": 1e-6, "kang": 1e-8, "mock-transform": 1e-8,
    "phi-consistency": 1e-10, "laplacian": 1e-4, "delta-vanish": 1e-6,
    "delta-shifts": 1e-6, "quantum-m": 1e-6, "quantum-t": 1e-10,
    "lemma-IJ": 1e-6, "group-closure": 0.0, "set-closure": 0.0,
    "psi-eta": 1e-10, "branch-consistency": 1e-12,
}

DEFAULT_CASES = {
    "mu-elliptic": 100, "mu-modular": 100, "theta-consistency": 100,
    "h-props": 35, "h-cross": 50, "gab-props": 100, "eta-cube": 20,
    "z116": 20, "zlem-ext": 20, "kang": 50, "mock-transform": 25,
    "phi-consistency": 30, "laplacian": 36, "delta-vanish": 25,
    "delta-shifts": 10, "quantum-m": 10, "quantum-t": 50,
    "lemma-IJ": 20, "group-closure": 1000, "set-closure": 200,
    "psi-eta": 100, "branch-consistency": 50,
}


def run_suite(name: str, cases: int | None = None, seed: int = 0,
              tol: float | None = None,
              policy: TruncationPolicy = DEFAULT_POLICY) -> IdentityReport:
    """Run one named verification suite; deterministic in (name, cases, seed, tol)."""
    if name not in _SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; valid: {', '.join(SUITE_NAMES)}")
    cases = DEFAULT_CASES[name] if cases is None else cases
    tol = DEFAULT_TOLERANCES[name] if tol is None else tol
    rng = random.Random(seed)
    col = _Collector(tol)
    t0 = time.perf_counter()
    _SUITES[name](cases, rng, col, policy)
    wall = int((time.perf_counter() - t0) * 1000)
    return IdentityReport(suite=name, seed=seed, cases=col.count, tolerance=tol,
                          max_residual=col.max_residual, failures=col.failures,
                          wall_time_ms=wall)


# ---------------------------------------------------------------------------
# cocycle scan
# ---------------------------------------------------------------------------

def scan_cocycle(alpha: AlphaParams, part: int, x_from: float, x_to: float,
                 steps: int, policy: TruncationPolicy = DEFAULT_POLICY) -> list[dict]:
    """Tabulate the quantum-error integral along real tau.

    part 1: -(i/2) e(-A/2C) int_1 g_{A/C,1/2}; part 2: -(i/2) int_{1/2} g_{A/C,0}.
    Rows near the excluded point -1/r (or failing rows) carry None entries.
    """
    if part not in (1, 2):
        raise ValueError("part must be 1 or 2")
    r = part
    rows = []
    for i in range(steps):
        x = x_from + (x_to - x_from) * i / max(steps - 1, 1)
        row = {"x": x, "re": None, "im": None, "abs": None}
        if abs(x + 1.0 / r) > 1e-3:
            try:
                if part == 1:
                    per = period_integral(CharPair(float(alpha.u_slope), 0.5),
                                          PathSpec.from_rational(1), x, policy)
                    val = -0.5j * cmath.exp(-1j * math.pi * alpha.A / alpha.C) * per.value
                else:
                    per = period_integral(CharPair(float(alpha.u_slope), 0.0),
                                          PathSpec.from_rational(Fraction(1, 2)), x, policy)
                    val = -0.5j * per.value
                row.update(re=val.real, im=val.imag, abs=abs(val))
            except EvaluationError:
                pass
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

def render_report(report: IdentityReport, format: str = "json") -> bytes:
    if format == "json":
        doc = {
            "suite": report.suite,
            "seed": report.seed,
            "cases": report.cases,
            "tolerance": report.tolerance,
            "max_residual": report.max_residual,
            "failures": report.failures,
            "wall_time_ms": report.wall_time_ms,
        }
        return (json.dumps(doc, indent=2) + "\n").encode()
    if format == "csv":
        lines = ["suite,seed,tolerance,inputs,residual"]
        for f in report.failures:
            inputs = str(f["inputs"]).replace('"', '""')
            lines.append(
                f'{report.suite},{report.seed},{report.tolerance!r},"{inputs}",{f["residual"]!r}')
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown report format {format!r}")


def parse_report(data: bytes) -> IdentityReport:
    doc = json.loads(data.decode())
    return IdentityReport(
        suite=doc["suite"], seed=doc["seed"], cases=doc["cases"],
        tolerance=doc["tolerance"], max_residual=doc["max_residual"],
        failures=doc["failures"], wall_time_ms=doc["wall_time_ms"])


def render_scan_csv(rows: list[dict]) -> bytes:
    lines = ["x,re,im,abs"]
    for row in rows:
        cells = [repr(row["x"])] + \
            ["" if row[k] is None else repr(row[k]) for k in ("re", "im", "abs")]
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode()


def render_scan_svg(rows: list[dict], width: int = 800, height: int = 300) -> bytes:
    """Self-contained polyline chart of |value| against x."""
    pts = [(r["x"], r["abs"]) for r in rows if r["abs"] is not None]
    if not pts:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
                f'height="{height}"/>').encode()
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(ys) * 1.05 or 1.0
    margin = 40

    def sx(x):
        return margin + (x - x_lo) / max(x_hi - x_lo, 1e-300) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / max(y_hi - y_lo, 1e-300) * (height - 2 * margin)

    poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<rect width="100%" height="100%" fill="white"/>'
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>'
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>'
        f'<polyline points="{poly}" fill="none" stroke="steelblue" stroke-width="1.2"/>'
        f'<text x="{width - margin}" y="{height - 12}" text-anchor="end" '
        f'font-size="12">x</text>'
        f'<text x="{margin + 4}" y="{margin - 6}" font-size="12">|integral|</text>'
        f'</svg>'
    )
    return svg.encode()
