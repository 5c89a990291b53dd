"""Exact arithmetic for scalars q0 + sum_i qi*theta_i with rational qi.

The generators theta_i are declared once in a GeneratorContext and are either
Quadratic (p + q*sqrt(D), one shared square-free D per context) or Opaque
(known only through a high-precision decimal enclosure).  Addition,
subtraction and rational scaling are always exact.  Multiplication and
division are exact whenever every irrational involved lives in the quadratic
part; mixed products that would leave the module raise UnrepresentableProduct
instead of silently approximating.

Sign is decided algebraically for quadratic-only values and by outward-rounded
interval evaluation with an escalating precision budget when Opaque
generators are involved.  PrecisionExhausted is raised when the budget cannot
separate a value from zero.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ContextMismatch,
    ParseError,
    PrecisionExhausted,
    UnrepresentableProduct,
)

RatLike = int | Fraction

# Interval evaluation escalates through these working precisions (bits).
SIGN_PRECISIONS = (64, 256, 1024)

_MIN_OPAQUE_SIG_DIGITS = 64


def _as_fraction(x: RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


@functools.lru_cache(maxsize=64)
def sqrt_bounds(d: int, bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure lo <= sqrt(d) <= hi with width 2^-bits."""
    scale = 1 << bits
    root = math.isqrt(d * scale * scale)
    return Fraction(root, scale), Fraction(root + 1, scale)


@dataclass(frozen=True)
class Quadratic:
    """Generator value p + q*sqrt(D) with D a positive non-square integer."""

    D: int
    p: Fraction
    q: Fraction

    def __post_init__(self):
        if self.D <= 0 or _is_square(self.D):
            raise ValueError(f"D must be a positive non-square integer, got {self.D}")
        object.__setattr__(self, "p", _as_fraction(self.p))
        object.__setattr__(self, "q", _as_fraction(self.q))
        if self.q == 0:
            raise ValueError("quadratic generator needs q != 0 (otherwise it is rational)")

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        lo, hi = sqrt_bounds(self.D, bits)
        if self.q >= 0:
            return self.p + self.q * lo, self.p + self.q * hi
        return self.p + self.q * hi, self.p + self.q * lo


_DECIMAL_RE = re.compile(r"^([+-]?)(\d+)(?:\.(\d+))?$")


@dataclass(frozen=True)
class Opaque:
    """Generator known only through a decimal enclosure value +- 1 ulp.

    The decimal string must carry at least 64 significant digits; the stated
    value must be nonzero beyond its own uncertainty.
    """

    decimal: str

    def __post_init__(self):
        m = _DECIMAL_RE.match(self.decimal.strip())
        if not m:
            raise ValueError(f"opaque generator needs a plain decimal literal, got {self.decimal!r}")
        sign, intpart, fracpart = m.groups()
        fracpart = fracpart or ""
        digits = (intpart + fracpart).lstrip("0")
        if len(digits) < _MIN_OPAQUE_SIG_DIGITS:
            raise ValueError(
                f"opaque generator carries {len(digits)} significant digits, "
                f"need at least {_MIN_OPAQUE_SIG_DIGITS}"
            )
        center = Fraction(int(intpart + fracpart), 10 ** len(fracpart))
        if sign == "-":
            center = -center
        ulp = Fraction(1, 10 ** len(fracpart))
        if abs(center) <= ulp:
            raise ValueError("opaque generator is indistinguishable from zero")
        object.__setattr__(self, "_center", center)
        object.__setattr__(self, "_ulp", ulp)

    @property
    def center(self) -> Fraction:
        return self._center  # type: ignore[attr-defined]

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        # The enclosure width is fixed by the declared decimal; extra working
        # precision cannot tighten it.
        del bits
        c, u = self._center, self._ulp  # type: ignore[attr-defined]
        return c - u, c + u


class GeneratorContext:
    """Declared irrational generators plus the independence assertion.

    At most one Quadratic generator is allowed: a second value a + b*sqrt(D)
    would be rationally dependent on {1, the first one}, contradicting the
    independence assertion that makes coefficient-wise equality valid.
    """

    __slots__ = ("names", "generators", "_index", "_quad_index", "zero", "one", "__weakref__")

    def __init__(self, generators: list[tuple[str, Quadratic | Opaque]] | None = None):
        generators = list(generators or [])
        names = tuple(name for name, _ in generators)
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        quads = [i for i, (_, g) in enumerate(generators) if isinstance(g, Quadratic)]
        if len(quads) > 1:
            raise ValueError(
                "at most one quadratic generator per context; further values in "
                "Q(sqrt(D)) are rational combinations of 1 and the first one"
            )
        self.names = names
        self.generators = tuple(g for _, g in generators)
        self._index = {name: i for i, name in enumerate(names)}
        self._quad_index = quads[0] if quads else None
        width = 1 + len(self.generators)
        self.zero = ExactNumber(self, (Fraction(0),) * width)
        one = [Fraction(0)] * width
        one[0] = Fraction(1)
        self.one = ExactNumber(self, tuple(one))

    # -- constructors -----------------------------------------------------

    def rational(self, x: RatLike) -> ExactNumber:
        coeffs = [Fraction(0)] * (1 + len(self.generators))
        coeffs[0] = _as_fraction(x)
        return ExactNumber(self, tuple(coeffs))

    def from_coeffs(self, coeffs) -> ExactNumber:
        coeffs = tuple(_as_fraction(c) for c in coeffs)
        if len(coeffs) != 1 + len(self.generators):
            raise ValueError(
                f"expected {1 + len(self.generators)} coefficients, got {len(coeffs)}"
            )
        return ExactNumber(self, coeffs)

    def generator(self, name: str) -> ExactNumber:
        i = self._index[name]
        coeffs = [Fraction(0)] * (1 + len(self.generators))
        coeffs[1 + i] = Fraction(1)
        return ExactNumber(self, tuple(coeffs))

    def coerce(self, x) -> ExactNumber:
        if isinstance(x, ExactNumber):
            if x.ctx is not self:
                raise ContextMismatch("value from a different generator context")
            return x
        return self.rational(x)

    # -- parsing -----------------------------------------------------------

    def parse(self, text: str) -> ExactNumber:
        """Parse `+ - * / ( )` expressions over integers, decimals and
        generator names, e.g. ``(1-1/tau)/2``."""
        return _Parser(self, text).parse()

    @property
    def quadratic(self) -> Quadratic | None:
        if self._quad_index is None:
            return None
        return self.generators[self._quad_index]  # type: ignore[return-value]

    def has_opaque(self) -> bool:
        return any(isinstance(g, Opaque) for g in self.generators)

    def describe(self) -> dict:
        gens = []
        for name, g in zip(self.names, self.generators):
            if isinstance(g, Quadratic):
                gens.append({"name": name, "quadratic": {"D": g.D, "p": str(g.p), "q": str(g.q)}})
            else:
                gens.append({"name": name, "opaque": {"decimal": g.decimal}})
        return {"generators": gens}

    def __repr__(self):
        return f"GeneratorContext({', '.join(self.names) or 'rational'})"


class ExactNumber:
    """Immutable element of the rational module over a GeneratorContext."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: GeneratorContext, coeffs: tuple[Fraction, ...]):
        self.ctx = ctx
        self.coeffs = coeffs

    # -- basic structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def _quadratic_only(self) -> bool:
        """True when every nonzero generator coefficient sits on the quadratic one."""
        qi = self.ctx._quad_index
        return all(c == 0 for i, c in enumerate(self.coeffs[1:]) if i != qi)

    def _ab(self) -> tuple[Fraction, Fraction]:
        """Represent a quadratic-only value as A + B*sqrt(D)."""
        qi = self.ctx._quad_index
        if qi is None:
            return self.coeffs[0], Fraction(0)
        g: Quadratic = self.ctx.generators[qi]  # type: ignore[assignment]
        c = self.coeffs[1 + qi]
        return self.coeffs[0] + c * g.p, c * g.q

    def _from_ab(self, a: Fraction, b: Fraction) -> ExactNumber:
        """Rebuild a module element from A + B*sqrt(D)."""
        ctx = self.ctx
        qi = ctx._quad_index
        coeffs = [Fraction(0)] * len(self.coeffs)
        if b == 0:
            coeffs[0] = a
            return ExactNumber(ctx, tuple(coeffs))
        if qi is None:
            raise UnrepresentableProduct("no quadratic generator to carry sqrt(D)")
        g: Quadratic = ctx.generators[qi]  # type: ignore[assignment]
        c = b / g.q
        coeffs[1 + qi] = c
        coeffs[0] = a - c * g.p
        return ExactNumber(ctx, tuple(coeffs))

    # -- ring / module operations -------------------------------------------

    def _check(self, other: ExactNumber):
        if self.ctx is not other.ctx:
            raise ContextMismatch("operands from different generator contexts")

    def __add__(self, other) -> ExactNumber:
        other = self.ctx.coerce(other)
        return ExactNumber(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other) -> ExactNumber:
        other = self.ctx.coerce(other)
        return ExactNumber(self.ctx, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other) -> ExactNumber:
        return self.ctx.coerce(other) - self

    def __neg__(self) -> ExactNumber:
        return ExactNumber(self.ctx, tuple(-a for a in self.coeffs))

    def scale(self, r: RatLike) -> ExactNumber:
        r = _as_fraction(r)
        return ExactNumber(self.ctx, tuple(r * a for a in self.coeffs))

    def __mul__(self, other) -> ExactNumber:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        if other.is_rational():
            return self.scale(other.coeffs[0])
        if self.is_rational():
            return other.scale(self.coeffs[0])
        if self._quadratic_only() and other._quadratic_only():
            a1, b1 = self._ab()
            a2, b2 = other._ab()
            d = self.ctx.quadratic.D  # type: ignore[union-attr]
            return self._from_ab(a1 * a2 + b1 * b2 * d, a1 * b2 + a2 * b1)
        raise UnrepresentableProduct(
            "product of two irrational values outside the quadratic part"
        )

    __rmul__ = __mul__

    def inverse(self) -> ExactNumber:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return self.ctx.rational(1 / self.coeffs[0])
        if self._quadratic_only():
            a, b = self._ab()
            d = self.ctx.quadratic.D  # type: ignore[union-attr]
            norm = a * a - b * b * d
            # norm == 0 would force sqrt(D) rational; impossible for nonzero value
            return self._from_ab(a / norm, -b / norm)
        raise UnrepresentableProduct("inverse leaves the module (opaque generator involved)")

    def __truediv__(self, other) -> ExactNumber:
        if isinstance(other, (int, Fraction)):
            r = _as_fraction(other)
            if r == 0:
                raise ZeroDivisionError("division by zero")
            return self.scale(1 / r)
        self._check(other)
        if other.is_rational():
            return self / other.coeffs[0]
        return self * other.inverse()

    def __rtruediv__(self, other) -> ExactNumber:
        return self.ctx.coerce(other) / self

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactNumber):
            return self.ctx is other.ctx and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ctx), self.coeffs))

    def sign(self) -> int:
        """Exact sign: algebraic for quadratic-only values, certified interval
        evaluation otherwise.  Raises PrecisionExhausted when undecidable."""
        if self.is_zero():
            return 0
        if self._quadratic_only():
            a, b = self._ab()
            return _sign_quadratic(a, b, self.ctx.quadratic.D if b else 0)
        for bits in SIGN_PRECISIONS:
            lo, hi = self._interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
        raise PrecisionExhausted(
            f"sign of {self} undecidable at {SIGN_PRECISIONS[-1]} bits"
        )

    def _interval(self, bits: int) -> tuple[Fraction, Fraction]:
        lo = hi = self.coeffs[0]
        for coeff, gen in zip(self.coeffs[1:], self.ctx.generators):
            if coeff == 0:
                continue
            glo, ghi = gen.bounds(bits)
            if coeff >= 0:
                lo += coeff * glo
                hi += coeff * ghi
            else:
                lo += coeff * ghi
                hi += coeff * glo
        return lo, hi

    def __lt__(self, other):
        return (self - self.ctx.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self.ctx.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self.ctx.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self.ctx.coerce(other)).sign() >= 0

    def __abs__(self) -> ExactNumber:
        return -self if self.sign() < 0 else self

    # -- approximation ---------------------------------------------------------

    def approx(self, bits: int = 80) -> Fraction:
        """Rational midpoint approximation (never used in decision logic)."""
        total = self.coeffs[0]
        for coeff, gen in zip(self.coeffs[1:], self.ctx.generators):
            if coeff == 0:
                continue
            glo, ghi = gen.bounds(bits)
            total += coeff * (glo + ghi) / 2
        return total

    def as_float(self, precision: int = 53) -> float:
        return float(self.approx(max(precision, 53) + 16))

    def __float__(self) -> float:
        return self.as_float()

    def floor(self) -> int:
        """Exact floor; PrecisionExhausted for opaque values too close to an integer."""
        if self.is_rational():
            return math.floor(self.coeffs[0])
        k = math.floor(self.approx(96))
        # correct the float-free guess by certified comparisons (at most a step)
        while (self - k).sign() < 0:
            k -= 1
        while (self - (k + 1)).sign() >= 0:
            k += 1
        return k

    def ceil(self) -> int:
        return -((-self).floor())

    # -- formatting ---------------------------------------------------------

    def to_string(self) -> str:
        """Canonical exact string, re-parseable by GeneratorContext.parse."""
        parts: list[str] = []
        if self.coeffs[0] != 0:
            parts.append(str(self.coeffs[0]))
        for coeff, name in zip(self.coeffs[1:], self.ctx.names):
            if coeff == 0:
                continue
            mag = abs(coeff)
            term = name if mag == 1 else f"{mag}*{name}"
            if not parts:
                parts.append(term if coeff > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if coeff > 0 else f"- {term}")
        return " ".join(parts) if parts else "0"

    def __repr__(self):
        return f"ExactNumber({self.to_string()})"

    def __str__(self):
        return self.to_string()


def _sign_quadratic(a: Fraction, b: Fraction, d: int) -> int:
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    lhs, rhs = a * a, b * b * d
    if lhs == rhs:
        # would mean sqrt(d) rational
        raise ArithmeticError("non-square discriminant produced a rational root")
    if a > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


# --------------------------------------------------------------------------
# expression parsing


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/()]))"
)


class _Parser:
    def __init__(self, ctx: GeneratorContext, text: str):
        self.ctx = ctx
        # tolerate the unicode minus that shows up in config files
        self.text = text.replace("−", "-")
        self.tokens = self._tokenize()
        self.pos = 0

    def _tokenize(self):
        tokens = []
        i = 0
        while i < len(self.text):
            m = _TOKEN_RE.match(self.text, i)
            if not m or m.end() == i:
                rest = self.text[i:].strip()
                if not rest:
                    break
                raise ParseError(f"cannot tokenize {rest!r} in {self.text!r}")
            if m.group("num") is not None:
                tokens.append(("num", m.group("num")))
            elif m.group("name") is not None:
                tokens.append(("name", m.group("name")))
            else:
                tokens.append(("op", m.group("op")))
            i = m.end()
        return tokens

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def _next(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def parse(self) -> ExactNumber:
        value = self._expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return value

    def _expr(self) -> ExactNumber:
        value = self._term()
        while self._peek() == ("op", "+") or self._peek() == ("op", "-"):
            _, op = self._next()
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> ExactNumber:
        value = self._factor()
        while self._peek() == ("op", "*") or self._peek() == ("op", "/"):
            _, op = self._next()
            rhs = self._factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def _factor(self) -> ExactNumber:
        kind, text = self._peek()
        if (kind, text) == ("op", "-"):
            self._next()
            return -self._factor()
        if (kind, text) == ("op", "+"):
            self._next()
            return self._factor()
        return self._atom()

    def _atom(self) -> ExactNumber:
        kind, text = self._next()
        if kind == "num":
            return self.ctx.rational(Fraction(text))
        if kind == "name":
            if text not in self.ctx._index:
                raise ParseError(f"unknown generator {text!r}")
            return self.ctx.generator(text)
        if (kind, text) == ("op", "("):
            value = self._expr()
            if self._next() != ("op", ")"):
                raise ParseError(f"missing ')' in {self.text!r}")
            return value
        raise ParseError(f"unexpected token {text!r} in {self.text!r}")


# --------------------------------------------------------------------------
# common contexts


def golden_ratio_context() -> GeneratorContext:
    """Context with the single generator tau = (1+sqrt(5))/2."""
    return GeneratorContext([("tau", Quadratic(5, Fraction(1, 2), Fraction(1, 2)))])


def rational_context() -> GeneratorContext:
    return GeneratorContext([])
