"""Exact integer arithmetic for SL2(Z): congruence subgroups, the composite
group attached to the (A, C, a) parameters, element sampling, generated
subgroups, the eta multiplier, tilde-shift decomposition, and the exact
root-of-unity transformation multiplier.

Everything here is exact: matrices are integer 4-tuples, multipliers are
rationals-mod-1 in the exponent, and membership tests are congruences.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .core import (
    NotInGroup,
    Overflow,
    SamplingFailure,
    UnitRoot,
    UnknownMembership,
    e_of,
)

__all__ = [
    "IntMatrix2",
    "GroupSpec",
    "TildeShift",
    "kronecker_symbol",
    "eta_psi",
    "eta_psi_exponent",
    "group_member",
    "composite_branch",
    "sample_element",
    "galpha_generators",
    "word_to_matrix",
    "tilde_decompose",
    "phi_multiplier",
    "phi_exponent",
    "random_sl2",
]

_ENTRY_CAP = 1 << 127


@dataclass(frozen=True)
class IntMatrix2:
    """[[x, y], [z, w]] with determinant 1."""

    x: int
    y: int
    z: int
    w: int

    def __post_init__(self):
        if self.x * self.w - self.y * self.z != 1:
            raise ValueError(f"determinant {self.x * self.w - self.y * self.z} != 1")

    def __matmul__(self, o: "IntMatrix2") -> "IntMatrix2":
        m = IntMatrix2(
            self.x * o.x + self.y * o.z,
            self.x * o.y + self.y * o.w,
            self.z * o.x + self.w * o.z,
            self.z * o.y + self.w * o.w,
        )
        if any(abs(v) > _ENTRY_CAP for v in (m.x, m.y, m.z, m.w)):
            raise Overflow("matrix entries exceeded 128-bit cap")
        return m

    def inv(self) -> "IntMatrix2":
        return IntMatrix2(self.w, -self.y, -self.z, self.x)

    def neg(self) -> "IntMatrix2":
        return IntMatrix2(-self.x, -self.y, -self.z, -self.w)

    def act(self, tau: complex) -> complex:
        return (self.x * tau + self.y) / (self.z * tau + self.w)

    def act_fraction(self, h: int, k: int) -> tuple[int, int]:
        """Image of h/k as an unreduced integer pair (numerator, denominator)."""
        return self.x * h + self.y * k, self.z * h + self.w * k

    def frame(self, tau: complex) -> complex:
        return self.z * tau + self.w

    def entries(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.z, self.w)


IDENTITY = IntMatrix2(1, 0, 0, 1)


@dataclass(frozen=True)
class GroupSpec:
    """A congruence-defined subgroup, or the generated group Galpha.

    kind: Gamma0 | Gamma0Upper | Gamma1 | Gamma1Upper | Aalpha | Galpha.
    N is the level for the plain congruence kinds; alpha the parameters for
    the composite kinds (imported lazily to avoid a module cycle).
    """

    kind: str
    N: int = 1
    alpha: object = None

    def __post_init__(self):
        if self.kind in ("Gamma0", "Gamma0Upper", "Gamma1", "Gamma1Upper"):
            if self.N < 1:
                raise ValueError("level must be >= 1")
        elif self.kind in ("Aalpha", "Galpha"):
            if self.alpha is None:
                raise ValueError(f"{self.kind} needs alpha parameters")
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")


@dataclass(frozen=True)
class TildeShift:
    """Integer shifts (k, l, r, s) with utilde = u + k tau + l, vtilde = v + r tau + s."""

    k: int
    l: int
    r: int
    s: int


# ---------------------------------------------------------------------------
# Kronecker symbol and the eta multiplier
# ---------------------------------------------------------------------------

def kronecker_symbol(m: int, n: int) -> int:
    """Kronecker symbol (m/n) with the standard conventions at 0, -1 and 2."""
    if n == 0:
        return 1 if abs(m) == 1 else 0
    sign = 1
    if n < 0:
        n = -n
        if m < 0:
            sign = -1
    while n % 2 == 0:
        n //= 2
        if m % 2 == 0:
            return 0
        if m % 8 in (3, 5):
            sign = -sign
    # Jacobi symbol for odd n >= 1 by quadratic reciprocity
    m %= n
    while m != 0:
        while m % 2 == 0:
            m //= 2
            if n % 8 in (3, 5):
                sign = -sign
        m, n = n, m
        if m % 4 == 3 and n % 4 == 3:
            sign = -sign
        m %= n
    return sign if n == 1 else 0


def eta_psi_exponent(gamma: IntMatrix2) -> Fraction:
    """Exponent f (mod 1) with eta(g tau) = e(f) (z tau + w)^{1/2} eta(tau)."""
    a, b, c, d = gamma.entries()
    if c % 2 != 0:
        kr = kronecker_symbol(d, abs(c))
        f = Fraction((a + d) * c - b * d * (c * c - 1) - 3 * c, 24)
    else:
        kr = kronecker_symbol(c, d)
        f = Fraction((a + d) * c - b * d * (c * c - 1) + 3 * d - 3 - 3 * c * d, 24)
    if kr == 0:
        raise ValueError("matrix outside SL2(Z)")
    if kr < 0:
        f += Fraction(1, 2)
    return f % 1


def eta_psi(gamma: IntMatrix2) -> complex:
    """Eta multiplier psi(gamma) as a complex root of unity."""
    return complex(UnitRoot(eta_psi_exponent(gamma)))


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def _member_congruence(kind: str, N: int, g: IntMatrix2) -> bool:
    x, y, z, w = g.entries()
    if kind == "Gamma0":
        return z % N == 0
    if kind == "Gamma0Upper":
        return y % N == 0
    if kind == "Gamma1":
        return z % N == 0 and x % N == 1 and w % N == 1
    if kind == "Gamma1Upper":
        return y % N == 0 and x % N == 1 and w % N == 1
    raise ValueError(kind)


def composite_branch(alpha, g: IntMatrix2) -> str | None:
    """For a odd, C = 0 mod 4: which branch of the composite group holds.

    Returns 'gamma1' (the Gamma^1(C) & Gamma_0(2) part), 'composite' (the
    canonical odd-diagonal form), or None.
    """
    C = alpha.C
    if alpha.a % 2 == 0 or C % 4 != 0:
        raise ValueError("composite branches exist only for a odd, C = 0 mod 4")
    x, y, z, w = g.entries()
    if z % 2 == 0 and y % C == 0 and x % C == 1 and w % C == 1:
        return "gamma1"
    half = C // 2 + 1
    if z % 2 == 1 and y % C == 0 and x % C == half % C and w % C == half % C:
        return "composite"
    return None


def _member_aalpha(alpha, g: IntMatrix2) -> bool:
    C, a = alpha.C, alpha.a
    L = C if C % 2 == 0 else 2 * C  # lcm(2, C)
    if a % 2 == 0:
        return _member_congruence("Gamma1Upper", L, g)
    if C % 4 != 0:
        return _member_congruence("Gamma1Upper", L, g) and g.z % 2 == 0
    return composite_branch(alpha, g) is not None


def group_member(spec: GroupSpec, g: IntMatrix2, *, word_depth: int = 12) -> bool:
    """Exact membership for the congruence kinds; bounded word search for Galpha.

    For Galpha, a negative congruence check against the ambient composite
    group refutes membership outright; otherwise breadth-first products of the
    two generators (and inverses) up to word_depth decide positively, and
    UnknownMembership is raised past the bound.
    """
    if spec.kind in ("Gamma0", "Gamma0Upper", "Gamma1", "Gamma1Upper"):
        return _member_congruence(spec.kind, spec.N, g)
    if spec.kind == "Aalpha":
        return _member_aalpha(spec.alpha, g)
    # Galpha: generated subgroup of Aalpha
    if not _member_aalpha(spec.alpha, g):
        return False
    gens = galpha_generators(spec.alpha)
    moves = [gens[0], gens[1], gens[0].inv(), gens[1].inv()]
    frontier = [IDENTITY]
    seen = {IDENTITY.entries()}
    if g == IDENTITY:
        return True
    for _ in range(word_depth):
        nxt = []
        for m in frontier:
            for mv in moves:
                try:
                    cand = m @ mv
                except Overflow:
                    continue
                key = cand.entries()
                if key in seen:
                    continue
                if cand == g:
                    return True
                seen.add(key)
                nxt.append(cand)
                if len(seen) > 2_000_000:
                    raise UnknownMembership(
                        "word search node cap exceeded", bound=word_depth)
        frontier = nxt
    raise UnknownMembership(
        f"not reachable within words of length {word_depth}", bound=word_depth)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _complete_top_row(x: int, y: int, rng: random.Random, z_parity: int | None,
                      spread: int) -> IntMatrix2:
    """Extend a coprime top row to SL2(Z), steering the z parity if asked."""
    g0, z0, w0 = _ext_gcd(x, y)
    assert g0 == 1
    # x w - y z = 1 with (z, w) = (-w0 + t x, z0 + t y)
    z_base, w_base = -w0, z0
    t = rng.randint(-spread, spread)
    z, w = z_base + t * x, w_base + t * y
    if z_parity is not None and z % 2 != z_parity:
        if x % 2 == 1:
            z, w = z + x, w + y
        else:
            raise SamplingFailure("cannot steer z parity with even x")
    return IntMatrix2(x, y, z, w)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """g, s, t with s*a + t*b = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def sample_element(spec: GroupSpec, seed: int, *, scale: int = 50) -> IntMatrix2:
    """Seed-deterministic random element of a congruence-defined group.

    Entries stay within about scale * level, so the default keeps products
    well inside the 128-bit overflow cap.
    """
    if spec.kind == "Galpha":
        raise SamplingFailure("Galpha is word-generated; sample words instead")
    rng = random.Random(seed)
    for _ in range(10_000):
        try:
            if spec.kind == "Gamma0":
                g = _sample_gamma0(spec.N, rng, scale)
            elif spec.kind == "Gamma0Upper":
                g = _sample_gamma0_upper(spec.N, rng, scale)
            elif spec.kind == "Gamma1":
                g = _sample_gamma1(spec.N, rng, scale)
            elif spec.kind == "Gamma1Upper":
                g = _sample_gamma1_upper(spec.N, rng, scale, None)
            else:
                g = _sample_aalpha(spec.alpha, rng, scale)
        except (SamplingFailure, ValueError):
            continue
        if group_member(spec, g):
            return g
    raise SamplingFailure(f"rejection sampling failed for {spec.kind}")


def _sample_gamma1_upper(N: int, rng: random.Random, scale: int,
                         z_parity: int | None) -> IntMatrix2:
    for _ in range(200):
        x = 1 + N * rng.randint(-scale, scale)
        y = N * rng.randint(-scale, scale)
        if x != 0 and gcd(abs(x), abs(y)) == 1:
            return _complete_top_row(x, y, rng, z_parity, scale)
    raise SamplingFailure("no coprime top row found")


def _sample_gamma0(N: int, rng: random.Random, scale: int) -> IntMatrix2:
    for _ in range(200):
        z = N * rng.randint(-scale, scale)
        w = rng.randint(-scale * max(N, 2), scale * max(N, 2))
        if w != 0 and gcd(abs(w), abs(z)) == 1:
            _, s, t = _ext_gcd(w, z)  # s*w + t*z = 1
            m = rng.randint(-scale, scale)
            return IntMatrix2(s + m * z, -t + m * w, z, w)
    raise SamplingFailure("no coprime bottom row found")


def _sample_gamma0_upper(N: int, rng: random.Random, scale: int) -> IntMatrix2:
    for _ in range(200):
        x = rng.randint(-scale * max(N, 2), scale * max(N, 2))
        y = N * rng.randint(-scale, scale)
        if x != 0 and gcd(abs(x), abs(y)) == 1:
            return _complete_top_row(x, y, rng, None, scale)
    raise SamplingFailure("no coprime top row found")


def _sample_gamma1(N: int, rng: random.Random, scale: int) -> IntMatrix2:
    for _ in range(200):
        x = 1 + N * rng.randint(-scale, scale)
        z = N * rng.randint(-scale, scale)
        if x != 0 and gcd(abs(x), abs(z)) == 1:
            _, s, t = _ext_gcd(x, z)  # s*x + t*z = 1 -> w = s, y = -t
            m = rng.randint(-scale, scale)
            return IntMatrix2(x, -t + m * x, z, s + m * z)
    raise SamplingFailure("no coprime left column found")


def _sample_aalpha(alpha, rng: random.Random, scale: int) -> IntMatrix2:
    C, a = alpha.C, alpha.a
    L = C if C % 2 == 0 else 2 * C
    if a % 2 == 0:
        return _sample_gamma1_upper(L, rng, scale, None)
    if C % 4 != 0:
        return _sample_gamma1_upper(L, rng, scale, 0)
    if rng.random() < 0.5:
        return _sample_gamma1_upper(C, rng, scale, 0)
    # canonical composite form: x = w = C/2+1 mod C, y = 0 mod C, z odd
    half = C // 2 + 1
    for _ in range(400):
        x = half + C * rng.randint(-scale, scale)
        y = C * rng.randint(-scale, scale)
        if x != 0 and gcd(abs(x), abs(y)) == 1:
            return _complete_top_row(x, y, rng, 1, scale)
    raise SamplingFailure("no composite-branch row found")


def random_sl2(rng: random.Random, length: int = 8) -> IntMatrix2:
    """Random word in S, T (and a random global sign): generic SL2(Z) element."""
    S = IntMatrix2(0, -1, 1, 0)
    T = IntMatrix2(1, 1, 0, 1)
    Ti = IntMatrix2(1, -1, 0, 1)
    g = IDENTITY
    for _ in range(rng.randint(1, length)):
        g = g @ rng.choice((S, T, Ti))
    if rng.random() < 0.5:
        g = g.neg()
    return g


# ---------------------------------------------------------------------------
# generated groups
# ---------------------------------------------------------------------------

def galpha_generators(alpha) -> list[IntMatrix2]:
    """The two generators [M, T] from the parity table: M = [[1,0],[r,1]] with
    r = 1 (a even) or 2 (a odd); T = [[1,s],[0,1]] with s = C (C even) or 2C."""
    r = 1 if alpha.a % 2 == 0 else 2
    s = alpha.C if alpha.C % 2 == 0 else 2 * alpha.C
    return [IntMatrix2(1, 0, r, 1), IntMatrix2(1, s, 0, 1)]


def word_to_matrix(gens: list[IntMatrix2], word: list[tuple[int, int]]) -> IntMatrix2:
    """Left-to-right product of gens[i]^e over (i, e) pairs; overflow-checked."""
    out = IDENTITY
    for idx, expo in word:
        g = gens[idx] if expo >= 0 else gens[idx].inv()
        for _ in range(abs(expo)):
            out = out @ g
    return out


# ---------------------------------------------------------------------------
# tilde decomposition and the exact transformation multiplier
# ---------------------------------------------------------------------------

def tilde_decompose(alpha, gamma: IntMatrix2) -> TildeShift:
    """Exact shifts for u = (A/C) tau + a/2 and v = tau/2 under gamma.

    With utilde = u(gamma tau) (z tau + w), integrality of all four
    coefficients is equivalent to membership in the composite group; a
    non-integral coefficient raises NotInGroup (the membership witness).
    """
    A, C, a = alpha.A, alpha.C, alpha.a
    x, y, z, w = gamma.entries()
    k = Fraction(A, C) * (x - 1) + Fraction(a, 2) * z
    l = Fraction(A, C) * y + Fraction(a, 2) * (w - 1)
    r = Fraction(x - 1, 2)
    s = Fraction(y, 2)
    for name, val in (("k", k), ("l", l), ("r", r), ("s", s)):
        if val.denominator != 1:
            raise NotInGroup(f"tilde shift {name} = {val} is not an integer")
    expected = Fraction(2 * A - C, 2 * C) * (x - 1) + Fraction(a, 2) * z
    assert k - r == expected, "internal shift identity violated"
    return TildeShift(int(k), int(l), int(r), int(s))


def phi_exponent(alpha, gamma: IntMatrix2) -> Fraction:
    """Exact exponent (mod 1) of the tau-independent transformation phase."""
    A, C, a = alpha.A, alpha.C, alpha.a
    x, y, z, w = gamma.entries()
    tilde_decompose(alpha, gamma)  # membership witness
    expo = (
        -Fraction((2 * A - C) ** 2, 8 * C * C) * x * y
        - Fraction(a * (2 * A - C), 4 * C) * x * (w - 1)
        - Fraction(a * a, 8) * z * (w - 2)
    )
    return expo % 1


def phi_multiplier(alpha, gamma: IntMatrix2, mode: str = "closed_form",
                   tau: complex | None = None) -> complex:
    """The root-of-unity multiplier, in closed form or from its defining
    tau-dependent product (which must be tau-independent)."""
    if mode == "closed_form":
        return complex(UnitRoot(phi_exponent(alpha, gamma)))
    if mode != "via_tau":
        raise ValueError(f"unknown phi mode {mode!r}")
    if tau is None:
        raise ValueError("via_tau mode needs a tau")
    A, C, a = alpha.A, alpha.C, alpha.a
    x, y, z, w = gamma.entries()
    sh = tilde_decompose(alpha, gamma)
    t = complex(tau)
    gt = gamma.act(t)
    frame = gamma.frame(t)
    u = Fraction(A, C) * 1.0 * t + a / 2.0
    v = t / 2.0
    ut = (Fraction(A, C) * 1.0 * gt + a / 2.0) * frame
    vt = (gt / 2.0) * frame
    pref = float(Fraction((2 * A - C) ** 2, 8 * C * C))
    val = (
        e_of(-pref * gt)
        * e_of(-z * (ut - vt) ** 2 / (2.0 * frame))
        * e_of((u - v) * (sh.k - sh.r))
        * cmath.exp(2j * math.pi * t * (0.5 * (sh.k - sh.r) ** 2 + pref))
    )
    return val
