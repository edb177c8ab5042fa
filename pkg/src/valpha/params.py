"""The (A, C, a) parameter triple and the seven-tuple catalog row."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .core import InconsistentArguments

__all__ = ["AlphaParams", "catalog_tuples"]


@dataclass(frozen=True)
class AlphaParams:
    """Parameters of alpha = (A/2C) tau + a/4.

    Requires gcd(A, C) = 1 and a in {0,1,2,3}; C = 1 with even a is rejected
    because then 2*alpha lands on the lattice.  The transformation-theorem
    suites additionally need 0 < A < C with A/C != 1/2 for odd a
    (theorem_ready).
    """

    A: int
    C: int
    a: int

    def __post_init__(self):
        if self.C < 1:
            raise ValueError("C must be a positive integer")
        if gcd(self.A, self.C) != 1:
            raise ValueError(f"gcd({self.A}, {self.C}) != 1")
        if self.a not in (0, 1, 2, 3):
            raise ValueError("a must lie in {0, 1, 2, 3}")
        if self.C == 1 and self.a in (0, 2):
            raise ValueError("C = 1 with even a puts 2*alpha on the lattice")

    @property
    def theorem_ready(self) -> bool:
        if not (0 < self.A < self.C):
            return False
        return not (self.a % 2 == 1 and (self.A, self.C) == (1, 2))

    def require_theorem(self) -> None:
        if not self.theorem_ready:
            raise InconsistentArguments(
                f"(A,C,a)=({self.A},{self.C},{self.a}) outside the theorem range "
                "(need 0 < A < C, and A/C != 1/2 for odd a)")

    @property
    def u_slope(self) -> Fraction:
        """Coefficient of tau in u = 2*alpha."""
        return Fraction(self.A, self.C)

    @property
    def prefactor_exponent(self) -> Fraction:
        """Exponent of q in the normalising prefactor: -(2A-C)^2 / (8 C^2)."""
        return -Fraction((2 * self.A - self.C) ** 2, 8 * self.C * self.C)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.A, self.C, self.a)


_CATALOG = [
    ("V11", (1, 4, 1)),
    ("V21", (1, 4, 0)),
    ("V31", (1, 3, 1)),
    ("V4'1", (1, 12, 0)),
    ("V4''1", (5, 12, 0)),
    ("V51", (1, 6, 1)),
    ("V61", (1, 3, 0)),
]


def catalog_tuples() -> list[tuple[str, AlphaParams]]:
    """The seven named specialisations reproducing the first catalog row."""
    return [(name, AlphaParams(*t)) for name, t in _CATALOG]
