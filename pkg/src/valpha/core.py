"""Shared numeric types, evaluation policies, exact roots of unity, and errors.

Everything downstream (series evaluators, quadrature, group algebra) speaks in
terms of the small value types defined here.  Evaluators return an
:class:`EvalResult` carrying the complex value together with a rigorous
absolute error bound and the number of terms or quadrature nodes consumed.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

TWO_PI = 2.0 * math.pi

# float roundoff charged per accumulated term when building err_bounds
ULP_PER_TERM = 1e-15

# relative threshold below which a denominator factor counts as vanishing
DENOM_GUARD = 1e-10

# threshold for the Appell-Lerch lattice guard |1 - e(u) q^n|
LATTICE_GUARD = 1e-8


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

class EvaluationError(Exception):
    """Base class for all domain/numerical errors raised by this package."""


class ImTooSmall(EvaluationError):
    """Evaluation point too close to the real axis for direct series."""


class SingularInput(EvaluationError):
    """Argument on (or numerically indistinguishable from) the lattice."""


class SingularDenominator(EvaluationError):
    """A q-Pochhammer denominator factor vanishes."""


class DivergentModulus(EvaluationError):
    """|q| outside the disc of convergence."""


class QuadratureFailure(EvaluationError):
    """Adaptive quadrature could not meet its error contract."""


class SingularEndpoint(EvaluationError):
    """Integration path endpoint collides with the singular point."""


class ReductionOverflow(EvaluationError):
    """Modular reduction failed to terminate (bad input)."""


class TooManyTerms(EvaluationError):
    """Series truncation exceeded policy.max_terms."""


class NotInGroup(EvaluationError):
    """Matrix is not a member of the required group."""


class UnknownMembership(EvaluationError):
    """Word search exhausted its bound without deciding membership."""

    def __init__(self, message: str, bound: int):
        super().__init__(message)
        self.bound = bound


class SamplingFailure(EvaluationError):
    """Rejection sampling gave up."""


class Overflow(EvaluationError):
    """Integer matrix entries exceeded the 128-bit safety cap."""


class NotInQuantumSet(EvaluationError):
    """Rational point outside the quantum set of the parameters."""


class InconsistentArguments(EvaluationError):
    """Arguments fail a required algebraic side condition."""


class UnknownSuite(EvaluationError):
    """Verification suite name not recognised."""


# ---------------------------------------------------------------------------
# policies and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationPolicy:
    """Knobs shared by all evaluators.

    target_abs_err is the absolute error each series/quadrature aims for;
    reported err_bounds may be smaller or moderately larger but always honest.
    """

    target_abs_err: float = 1e-12
    max_terms: int = 10 ** 6
    min_im: float = 0.05
    quad_rel_tol: float = 1e-11
    quad_max_depth: int = 40

    def __post_init__(self):
        if not (0 < self.target_abs_err < 1e-3):
            raise ValueError("target_abs_err must lie in (0, 1e-3)")
        for name in ("max_terms", "min_im", "quad_rel_tol", "quad_max_depth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class EvalResult:
    """Complex value with a rigorous absolute error bound."""

    value: complex
    err_bound: float
    terms_used: int

    def __iter__(self):
        yield self.value
        yield self.err_bound
        yield self.terms_used


@dataclass(frozen=True)
class UpperHalfPoint:
    """A point tau = re + i*im in the upper half-plane."""

    re: float
    im: float

    def __post_init__(self):
        if not self.im > 0:
            raise ValueError("im must be > 0")

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class RationalPoint:
    """A reduced rational h/k with h odd and k >= 1 (the set S)."""

    h: int
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if gcd(self.h, self.k) != 1:
            raise ValueError(f"{self.h}/{self.k} is not reduced")
        if self.h % 2 == 0:
            raise ValueError("h must be odd")

    @classmethod
    def normalized(cls, h: int, k: int) -> "RationalPoint":
        """Reduce and move the sign into h."""
        if k == 0:
            raise ValueError("zero denominator")
        if k < 0:
            h, k = -h, -k
        g = gcd(abs(h), k)
        return cls(h // g, k // g)

    @property
    def value(self) -> float:
        return self.h / self.k

    def as_fraction(self) -> Fraction:
        return Fraction(self.h, self.k)

    def __str__(self) -> str:
        return f"{self.h}/{self.k}"


@dataclass
class IdentityReport:
    """Outcome of one verification suite run."""

    suite: str
    seed: int
    cases: int
    tolerance: float
    max_residual: float
    failures: list
    wall_time_ms: int

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance and not self.failures


@dataclass(frozen=True)
class CharPair:
    """Real characteristics (a, b) indexing the weight-3/2 theta g_{a,b}."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("characteristics must be finite")


# ---------------------------------------------------------------------------
# exact roots of unity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitRoot:
    """e(r) = exp(2 pi i r) for rational r, kept exact until converted.

    Multiplier algebra (eta multiplier, transformation phases) is done in the
    exponent with Fractions so |value| == 1 exactly and products are lossless.
    """

    exponent: Fraction

    @classmethod
    def of(cls, num, den=1) -> "UnitRoot":
        return cls(Fraction(num, den) % 1)

    def __mul__(self, other: "UnitRoot") -> "UnitRoot":
        return UnitRoot((self.exponent + other.exponent) % 1)

    def __pow__(self, n: int) -> "UnitRoot":
        return UnitRoot((self.exponent * n) % 1)

    def conjugate(self) -> "UnitRoot":
        return UnitRoot((-self.exponent) % 1)

    def __complex__(self) -> complex:
        return cis(TWO_PI * float(self.exponent))


ONE = UnitRoot(Fraction(0))
MINUS_ONE = UnitRoot(Fraction(1, 2))


# ---------------------------------------------------------------------------
# small numeric helpers
# ---------------------------------------------------------------------------

def cis(phi: float) -> complex:
    return complex(math.cos(phi), math.sin(phi))


def e_of(x) -> complex:
    """e(x) = exp(2 pi i x) for real or complex x."""
    if isinstance(x, Fraction):
        return cis(TWO_PI * float(x))
    return cmath.exp(2j * math.pi * x)


def as_tau(tau, policy: TruncationPolicy = DEFAULT_POLICY, *, min_im: float | None = None) -> complex:
    """Coerce to complex and enforce the minimum imaginary part."""
    t = complex(tau)
    floor_ = policy.min_im if min_im is None else min_im
    if t.imag < floor_:
        raise ImTooSmall(f"im(tau) = {t.imag} < {floor_}")
    return t


def principal_sqrt(w) -> complex:
    """Principal square root, branch cut on the negative real axis.

    Negative reals are lifted to the +i side (limit from the upper
    half-plane), matching the continuation used by the rational-point
    transformation laws.
    """
    return cmath.sqrt(complex(w))


def sqrt_minus_i_tau_cubed(tau) -> complex:
    """(-i tau)^{3/2} defined as ((-i tau)^{1/2})^3 with the principal branch."""
    r = principal_sqrt(-1j * complex(tau))
    return r * r * r


def q_power(tau, exponent) -> complex:
    """q^exponent = exp(2 pi i tau * exponent); well-defined for real tau too."""
    if isinstance(exponent, Fraction):
        exponent = float(exponent)
    return cmath.exp(2j * math.pi * complex(tau) * exponent)


# ---------------------------------------------------------------------------
# plain-text parsing (CLI and report I/O)
# ---------------------------------------------------------------------------

_COMPLEX_RE = re.compile(
    r"""^\s*
        (?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?
        (?P<im>(?:[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|[+-])?
        (?P<i>i)?
        \s*$""",
    re.VERBOSE,
)


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' with optional signs: '1.2-0.5i', '0.9i', '-2', 'i'."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty complex literal")
    m = _COMPLEX_RE.match(t)
    if not m:
        raise ValueError(f"cannot parse complex literal {text!r}")
    re_part, im_part, has_i = m.group("re"), m.group("im"), m.group("i")
    if has_i:
        if im_part is None:
            # forms like '0.3i' or 'i': the leading number is the imag part
            im_val = float(re_part) if re_part is not None else 1.0
            return complex(0.0, im_val)
        if im_part in ("+", "-"):
            im_val = 1.0 if im_part == "+" else -1.0
        else:
            im_val = float(im_part)
        return complex(float(re_part) if re_part is not None else 0.0, im_val)
    if im_part is not None:
        raise ValueError(f"cannot parse complex literal {text!r}")
    if re_part is None:
        raise ValueError(f"cannot parse complex literal {text!r}")
    return complex(float(re_part), 0.0)


def parse_rational(text: str) -> RationalPoint:
    """Parse 'h/k' (optionally signed) into a RationalPoint."""
    t = text.strip()
    if "/" in t:
        hs, ks = t.split("/", 1)
        return RationalPoint.normalized(int(hs), int(ks))
    return RationalPoint.normalized(int(t), 1)


def format_complex(z: complex, digits: int = 15) -> str:
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}i"
