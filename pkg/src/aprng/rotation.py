"""Sturmian words as exact rotation codings.

Numbers of the form (p + q*sqrt(D))/r are kept in canonical integer form and
compared exactly by isolating the root and squaring with tracked signs, so
letter decisions never touch floating point.  The coding of the rotation by
alpha with intercept rho writes letter 0 when the orbit point {rho + n*alpha}
falls in the long interval of length 1-alpha and letter 1 otherwise; the two
half-open conventions differ only when an orbit point hits the split exactly.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from .errors import FieldMismatchError
from .streams import WordStream

import numpy as np


def _squarefree_split(D: int) -> tuple[int, int]:
    """D = s^2 * D0 with D0 squarefree; returns (s, D0)."""
    if D < 0:
        raise ValueError("radicand must be >= 0")
    s = 1
    f = 2
    while f * f <= D:
        while D % (f * f) == 0:
            D //= f * f
            s *= f
        f += 1
    return s, D


class QuadraticIrrational:
    """Exact (p + q*sqrt(D)) / r with integer p, q, r.

    Canonical form: r > 0, gcd(p, q, r) = 1, D squarefree; a rational value
    is stored with q = 0 and D = 1.
    """

    __slots__ = ("p", "q", "r", "D")

    def __init__(self, p: int, q: int, r: int, D: int):
        if r == 0:
            raise ZeroDivisionError("zero denominator")
        s, D0 = _squarefree_split(D)
        q *= s
        if D0 <= 1:
            p, q = p + q * (1 if D0 == 1 else 0), 0
            D0 = 1
        if q == 0:
            D0 = 1
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(abs(p), abs(q)), r)
        self.p = p // g
        self.q = q // g
        self.r = r // g
        self.D = D0

    @classmethod
    def from_rational(cls, x) -> "QuadraticIrrational":
        f = Fraction(x)
        return cls(f.numerator, 0, f.denominator, 1)

    def is_rational(self) -> bool:
        return self.q == 0

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QuadraticIrrational):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticIrrational.from_rational(other)
        return None

    def _common_field(self, other: "QuadraticIrrational") -> int:
        if self.q and other.q and self.D != other.D:
            raise FieldMismatchError(
                f"cannot combine sqrt({self.D}) with sqrt({other.D}) exactly")
        return self.D if self.q else other.D

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self._common_field(o)
        return QuadraticIrrational(
            self.p * o.r + o.p * self.r,
            self.q * o.r + o.q * self.r,
            self.r * o.r, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticIrrational(-self.p, -self.q, self.r, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, QuadraticIrrational):
            D = self._common_field(other)
            return QuadraticIrrational(
                self.p * other.p + self.q * other.q * D,
                self.p * other.q + self.q * other.p,
                self.r * other.r, D)
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return QuadraticIrrational(
                self.p * f.numerator, self.q * f.numerator,
                self.r * f.denominator, self.D)
        return NotImplemented

    __rmul__ = __mul__

    # -- exact order -----------------------------------------------------

    def _sign(self) -> int:
        """Sign of p + q*sqrt(D) (r > 0 already)."""
        p, q, D = self.p, self.q, self.D
        if q == 0:
            return (p > 0) - (p < 0)
        if q > 0:
            if p >= 0:
                return 1
            return 1 if q * q * D > p * p else (-1 if q * q * D < p * p else 0)
        if p <= 0:
            return -1
        return 1 if p * p > q * q * D else (-1 if p * p < q * q * D else 0)

    def compare(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare with {type(other).__name__}")
        return (self - o)._sign()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.p, self.q, self.r, self.D) == (o.p, o.q, o.r, o.D)

    def __hash__(self):
        return hash((self.p, self.q, self.r, self.D))

    def __floor__(self) -> int:
        p, q, r = self.p, self.q, self.r
        if q >= 0:
            root = isqrt(q * q * self.D)
        else:
            t = q * q * self.D
            root = -(isqrt(t) + (0 if isqrt(t) ** 2 == t else 1))
        k = (p + root) // r
        # p + q*sqrt(D) lies in [p + root, p + root + 1), so k can be off by
        # at most one; settle it exactly
        while self.compare(k + 1) >= 0:
            k += 1
        while self.compare(k) < 0:
            k -= 1
        return k

    def frac(self) -> "QuadraticIrrational":
        """Fractional part, in [0, 1)."""
        return self - self.__floor__()

    def __float__(self) -> float:
        return (self.p + self.q * self.D ** 0.5) / self.r

    def __repr__(self):
        return f"QuadraticIrrational({self.p}, {self.q}, {self.r}, D={self.D})"


def frac_compare(x: QuadraticIrrational, y) -> int:
    """Exact three-way comparison: -1, 0 or 1 for x < y, x = y, x > y."""
    return x.compare(y)


class RotationCoding:
    """Parameters of a Sturmian coding: irrational slope, intercept, convention.

    ``convention`` is "left" for intervals closed on the left (the letter-1
    interval is [1-alpha, 1)) and "right" for the primed variant closed on the
    right ((1-alpha, 1], with an orbit value of 0 read as 1).
    """

    def __init__(self, alpha: QuadraticIrrational, rho: QuadraticIrrational,
                 convention: str = "left"):
        if convention not in ("left", "right"):
            raise ValueError(f"convention must be 'left' or 'right', got {convention!r}")
        if alpha.is_rational():
            raise ValueError("slope must be irrational: rational slopes give periodic words")
        if not (QuadraticIrrational.from_rational(0) < alpha < 1):
            raise ValueError("slope must lie strictly between 0 and 1")
        self.alpha = alpha
        self.rho = rho.frac()
        self.convention = convention

    def __repr__(self):
        return (f"RotationCoding(alpha={self.alpha!r}, rho={self.rho!r}, "
                f"convention={self.convention!r})")


def rotation_letter(coding: RotationCoding, n: int) -> int:
    """Letter s(n) of the coding: 0 on the long interval, 1 on the short one."""
    f = (coding.rho + coding.alpha * n).frac()
    boundary = QuadraticIrrational.from_rational(1) - coding.alpha
    cmp = f.compare(boundary)
    if coding.convention == "left":
        return 1 if cmp >= 0 else 0
    if f.p == 0 and f.q == 0:       # orbit value 0 reads as 1 in (0, 1]
        return 1
    return 1 if cmp > 0 else 0


class RotationStream(WordStream):
    """Letters of a rotation coding, emitted sequentially with integer state.

    The orbit point {rho + n*alpha} is kept as (P + Q*sqrt(D))/R over a fixed
    denominator R; each step adds alpha and subtracts 1 on wrap, so the letter
    test is one exact sign evaluation.  Numerator bit-lengths grow only
    logarithmically in n.
    """

    def __init__(self, coding: RotationCoding):
        super().__init__(2)
        self.coding = coding
        a, rho = coding.alpha, coding.rho
        self._D = a.D
        self._R = a.r * rho.r // gcd(a.r, rho.r)
        self._Pa = a.p * (self._R // a.r)
        self._Qa = a.q * (self._R // a.r)
        self._rewind(0)

    def _rewind(self, pos: int) -> None:
        x = (self.coding.rho + self.coding.alpha * pos).frac()
        # canonical reduction only ever shrinks the denominator, so x.r | R
        scale = self._R // x.r
        self._P = x.p * scale
        self._Q = x.q * scale
        self._zero = (x.p == 0 and x.q == 0)

    @staticmethod
    def _sign(A: int, B: int, D: int) -> int:
        if B == 0:
            return (A > 0) - (A < 0)
        if B > 0:
            if A >= 0:
                return 1
            return 1 if B * B * D > A * A else (-1 if B * B * D < A * A else 0)
        if A <= 0:
            return -1
        return 1 if A * A > B * B * D else (-1 if A * A < B * B * D else 0)

    def _produce(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint8)
        P, Q, R, D = self._P, self._Q, self._R, self._D
        Pa, Qa = self._Pa, self._Qa
        left = self.coding.convention == "left"
        zero = self._zero
        sign = self._sign
        for i in range(n):
            P += Pa
            Q += Qa
            s = sign(P - R, Q, D)       # did {x} + alpha reach 1?
            if left:
                out[i] = 1 if s >= 0 else 0
            else:
                out[i] = 1 if (zero or s > 0) else 0
            if s >= 0:
                P -= R
            zero = (s == 0)
        self._P, self._Q, self._zero = P, Q, zero
        return out

    def skip(self, n: int) -> None:
        self.seek(self._pos + n)

    def prefix_parikh(self, n: int) -> tuple[int, ...]:
        """Exact letter counts of the first n letters via floor telescoping."""
        if n == 0:
            return (0, 0)
        rho, alpha = self.coding.rho, self.coding.alpha
        end = rho + alpha * n
        if self.coding.convention == "left":
            ones = end.__floor__() - rho.__floor__()
        else:
            # letter'_k = 1 iff the orbit leaves (0,1] through the top:
            # telescoping with ceilings
            ones = -((-end).__floor__()) - -((-rho).__floor__())
        return (n - ones, ones)

    def fork(self) -> "RotationStream":
        return RotationStream(self.coding)

    def __repr__(self):
        return f"RotationStream({self.coding!r})"


def rotation_stream(alpha: QuadraticIrrational, rho: QuadraticIrrational,
                    convention: str = "left") -> RotationStream:
    return RotationStream(RotationCoding(alpha, rho, convention))


def fibonacci_rotation(convention: str = "left") -> RotationStream:
    """The rotation parameterization that reproduces the Fibonacci word:
    slope (3 - sqrt(5))/2 with intercept equal to the slope."""
    alpha = QuadraticIrrational(3, -1, 2, 5)
    return rotation_stream(alpha, alpha, convention)
