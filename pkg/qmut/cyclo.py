"""

Exact arithmetic in the real cyclotomic rings generated by c = 2cos(pi/N).

A value is stored as a vector of rational coefficients in the power basis
1, c, c^2, ... reduced modulo the minimal polynomial of c, so equality is
decided by comparing vectors. Signs are decided by certified interval
evaluation.

"""
from dataclasses import dataclass
from fractions import Fraction
import functools
from functools import lru_cache
import logging
from math import gcd
import operator
import threading
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath.ctx_iv import MPIntervalContext
import sympy

from .config import SIGN_MAX_BITS, SIGN_START_BITS
from .errors import IncompatibleAmbientError, PrecisionExhaustedError

logger = logging.getLogger(__name__)

Coeffs = Tuple[Fraction, ...]
RationalLike = Union[int, Fraction]


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True, order=True)
class AngleLabel:
    """The label m/d of the weight 2cos(pi m/d), always kept reduced.

    The value 2 is labelled 0/1. Labels above 1/2 denote negative values and
    never appear as quiver weights.

    """

    num: int
    den: int

    def __post_init__(self) -> None:
        if self.den <= 0 or self.num < 0:
            raise ValueError(f"invalid label {self.num}/{self.den}")
        if self.num > self.den:
            raise ValueError(f"label {self.num}/{self.den} is larger than 1")
        divisor = gcd(self.num, self.den)
        object.__setattr__(self, "num", self.num // divisor)
        object.__setattr__(self, "den", self.den // divisor)

    @classmethod
    def parse(cls, text: str) -> "AngleLabel":
        num, sep, den = text.strip().partition("/")
        try:
            return cls(int(num), int(den) if sep else 1)
        except ValueError:
            raise ValueError(f"cannot parse label {text!r}") from None

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


# labels of the rational values 2cos(pi m/d); they lie in every ambient ring
_RATIONAL_LABELS: Dict[Fraction, AngleLabel] = {
    Fraction(2): AngleLabel(0, 1),
    Fraction(1): AngleLabel(1, 3),
    Fraction(0): AngleLabel(1, 2),
    Fraction(-1): AngleLabel(2, 3),
    Fraction(-2): AngleLabel(1, 1),
}
_LABEL_CONSTANTS = {label: value for value, label in _RATIONAL_LABELS.items()}


@lru_cache(maxsize=None)
def _dickson(k: int) -> Tuple[int, ...]:
    """Integer coefficients (lowest first) of D_k, where D_k(z + 1/z) = z^k + z^-k."""
    if k == 0:
        return (2,)
    if k == 1:
        return (0, 1)
    prev, cur = _dickson(k - 2), _dickson(k - 1)
    result = [0] + list(cur)
    for i, coeff in enumerate(prev):
        result[i] -= coeff
    return tuple(result)


def _fold_cyclotomic(ambient: int) -> Tuple[int, ...]:
    """Minimal polynomial of 2cos(pi/N), folded out of the cyclotomic polynomial of order 2N."""
    if ambient == 1:
        return (2, 1)
    z = sympy.Symbol("z")
    phi = sympy.Poly(sympy.cyclotomic_poly(2 * ambient, z), z)
    coeffs = [int(c) for c in reversed(phi.all_coeffs())]
    half = (len(coeffs) - 1) // 2
    folded = [0] * (half + 1)
    folded[0] = coeffs[half]
    for j in range(1, half + 1):
        for i, coeff in enumerate(_dickson(j)):
            folded[i] += coeffs[half + j] * coeff
    assert folded[-1] == 1, f"folded polynomial for {ambient} is not monic"
    return tuple(folded)


class _Field:
    """Reduction data for one ambient order."""

    def __init__(self, ambient: int) -> None:
        self.ambient = ambient
        self.poly = _fold_cyclotomic(ambient)
        self.degree = len(self.poly) - 1
        # cancellation in the residue grows with the coefficients
        digits = max(len(str(abs(c))) for c in self.poly) + self.degree
        with mpmath.workdps(40 + digits):
            root = 2 * mpmath.cos(mpmath.pi / ambient)
            residue = mpmath.polyval(list(reversed(self.poly)), root)
            assert abs(residue) < mpmath.mpf(10) ** -30, (
                f"minimal polynomial for ambient {ambient} does not vanish at 2cos(pi/N)"
            )

    def reduce(self, values: Sequence[RationalLike]) -> Coeffs:
        work = [Fraction(v) for v in values]
        for top in range(len(work) - 1, self.degree - 1, -1):
            lead = work[top]
            if lead:
                base = top - self.degree
                for i in range(self.degree):
                    work[base + i] -= lead * self.poly[i]
            work[top] = Fraction(0)
        work.extend([Fraction(0)] * (self.degree - len(work)))
        return tuple(work[: self.degree])


_FIELDS: Dict[int, _Field] = {}
_FIELDS_LOCK = threading.Lock()


def _field(ambient: int) -> _Field:
    try:
        return _FIELDS[ambient]
    except KeyError:
        pass
    if ambient < 1:
        raise ValueError(f"ambient order must be positive, not {ambient}")
    with _FIELDS_LOCK:
        if ambient not in _FIELDS:
            logger.debug("building minimal polynomial for ambient %d", ambient)
            _FIELDS[ambient] = _Field(ambient)
        return _FIELDS[ambient]


def minimal_poly(ambient: int) -> sympy.Poly:
    """Returns the monic minimal polynomial of 2cos(pi/N) over the rationals, in x."""
    coeffs = _field(ambient).poly
    return sympy.Poly(list(reversed(coeffs)), sympy.Symbol("x"), domain=sympy.ZZ)


@functools.total_ordering
class CycloReal:
    """An exact element of Q[2cos(pi/N)]."""

    __slots__ = ("ambient", "coeffs")

    ambient: int
    coeffs: Coeffs

    def __init__(self, ambient: int, coeffs: Sequence[RationalLike]) -> None:
        field = _field(ambient)
        self.ambient = ambient
        self.coeffs = field.reduce(coeffs)

    @classmethod
    def _raw(cls, ambient: int, coeffs: Coeffs) -> "CycloReal":
        obj = object.__new__(cls)
        obj.ambient = ambient
        obj.coeffs = coeffs
        return obj

    @classmethod
    def constant(cls, value: RationalLike, ambient: int = 1) -> "CycloReal":
        degree = _field(ambient).degree
        return cls._raw(ambient, (Fraction(value),) + (Fraction(0),) * (degree - 1))

    @classmethod
    def generator(cls, ambient: int) -> "CycloReal":
        """Returns c = 2cos(pi/N) itself."""
        return from_label(AngleLabel(1, ambient), ambient)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __float__(self) -> float:
        gen = 2 * mpmath.cos(mpmath.pi / self.ambient)
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(self.coeffs)]
        return float(mpmath.polyval(coeffs, gen))

    def __repr__(self) -> str:
        label = to_label(self)
        if label is not None:
            return f"CycloReal({self.ambient}, label={label})"
        if self.is_rational():
            return f"CycloReal({self.ambient}, {self.coeffs[0]})"
        return f"CycloReal({self.ambient}, [{', '.join(map(str, self.coeffs))}])"

    def __hash__(self) -> int:
        # rational values hash like the corresponding Fraction; irrational
        # values hash per ambient, so mixed-ambient dict keys should be lifted first
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.ambient, self.coeffs))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycloReal):
            return NotImplemented
        if self.ambient == other.ambient:
            return self.coeffs == other.coeffs
        a, b = _common(self, other)
        return a.coeffs == b.coeffs

    def __lt__(self, other: object) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return sign(self - other) < 0

    def __neg__(self) -> "CycloReal":
        return CycloReal._raw(self.ambient, tuple(-c for c in self.coeffs))

    def __pos__(self) -> "CycloReal":
        return self

    def __abs__(self) -> "CycloReal":
        return -self if sign(self) < 0 else self

    def __add__(self, other: object) -> "CycloReal":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        a, b = _common(self, other)
        return CycloReal._raw(a.ambient, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __sub__(self, other: object) -> "CycloReal":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "CycloReal":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: object) -> "CycloReal":
        if isinstance(other, (int, Fraction)):
            return CycloReal._raw(self.ambient, tuple(c * other for c in self.coeffs))
        other = _coerce(other)
        if other is None:
            return NotImplemented
        a, b = _common(self, other)
        if b.is_rational():
            return a * b.coeffs[0]
        if a.is_rational():
            return b * a.coeffs[0]
        product = [Fraction(0)] * (2 * len(a.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    product[i + j] += x * y
        return CycloReal._raw(a.ambient, _field(a.ambient).reduce(product))

    __rmul__ = __mul__

    def inverse(self) -> "CycloReal":
        """Returns the multiplicative inverse in the ambient field."""
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CycloReal.constant(1 / self.coeffs[0], self.ambient)
        x = sympy.Symbol("x")
        field = _field(self.ambient)
        num = sympy.Poly(
            [sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)],
            x,
            domain=sympy.QQ,
        )
        mod = sympy.Poly(list(reversed(field.poly)), x, domain=sympy.QQ)
        inv = sympy.invert(num, mod)
        coeffs = [Fraction(str(c)) for c in reversed(inv.all_coeffs())]
        result = CycloReal(self.ambient, coeffs)
        assert result * self == 1, f"inverse of {self!r} is wrong"
        return result

    def __truediv__(self, other: object) -> "CycloReal":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()



def _coerce(value: object) -> Optional[CycloReal]:
    if isinstance(value, CycloReal):
        return value
    if isinstance(value, (int, Fraction)):
        return CycloReal.constant(value)
    return None


def _common(x: CycloReal, y: CycloReal) -> Tuple[CycloReal, CycloReal]:
    if x.ambient == y.ambient:
        return x, y
    ambient = lcm(x.ambient, y.ambient)
    return lift(x, ambient), lift(y, ambient)


_BINARY_OPS: Dict[str, Callable[[CycloReal, CycloReal], CycloReal]] = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
}
_UNARY_OPS: Dict[str, Callable[[CycloReal], CycloReal]] = {
    "neg": operator.neg,
    "abs": operator.abs,
}


def arith(x: CycloReal, y: Optional[CycloReal], op: str) -> CycloReal:
    """Applies one of add, sub, mul, neg or abs; unary operations ignore y."""
    if op in _UNARY_OPS:
        return _UNARY_OPS[op](x)
    if op not in _BINARY_OPS:
        raise ValueError(f"unknown operation {op!r}")
    assert y is not None, f"{op} needs two operands"
    return _BINARY_OPS[op](x, y)


@lru_cache(maxsize=4096)
def _dickson_value(k: int, ambient: int) -> CycloReal:
    return CycloReal(ambient, _dickson(k))


def from_label(
    label: AngleLabel, ambient: Optional[int] = None, *, promote: bool = True
) -> CycloReal:
    """Returns 2cos(pi m/d) in the ambient-N ring.

    If d does not divide N the ambient is promoted to lcm(N, d), unless
    promote is false, in which case IncompatibleAmbientError is raised.
    Rational values are returned in the requested ambient whatever d is.

    """
    if ambient is None:
        ambient = label.den
    if label in _LABEL_CONSTANTS:
        return CycloReal.constant(_LABEL_CONSTANTS[label], ambient)
    if ambient % label.den:
        if not promote:
            raise IncompatibleAmbientError(
                f"label {label} does not live in ambient {ambient}"
            )
        ambient = lcm(ambient, label.den)
    return _dickson_value(label.num * ambient // label.den, ambient)


def to_label(x: CycloReal) -> Optional[AngleLabel]:
    """Returns the label m/d with x = 2cos(pi m/d), or None."""
    if x.is_rational():
        return _RATIONAL_LABELS.get(x.coeffs[0])
    return _scan_labels(x.ambient, x.coeffs)


@lru_cache(maxsize=1 << 14)
def _scan_labels(ambient: int, coeffs: Coeffs) -> Optional[AngleLabel]:
    for k in range(ambient + 1):
        if _dickson_value(k, ambient).coeffs == coeffs:
            return AngleLabel(k, ambient)
    return None


@lru_cache(maxsize=256)
def _power_images(source: int, target: int) -> Tuple[CycloReal, ...]:
    gen = _dickson_value(target // source, target)
    powers = [CycloReal.constant(1, target)]
    for _ in range(1, _field(source).degree):
        powers.append(powers[-1] * gen)
    return tuple(powers)


def lift(x: CycloReal, ambient: int) -> CycloReal:
    """Re-expresses x in the ambient-N' ring; x.ambient must divide N'."""
    if ambient % x.ambient:
        raise IncompatibleAmbientError(
            f"cannot lift from ambient {x.ambient} to {ambient}"
        )
    if ambient == x.ambient:
        return x
    if x.is_rational():
        return CycloReal.constant(x.coeffs[0], ambient)
    images = _power_images(x.ambient, ambient)
    degree = _field(ambient).degree
    total = [Fraction(0)] * degree
    for coeff, image in zip(x.coeffs, images):
        if coeff:
            for i, value in enumerate(image.coeffs):
                total[i] += coeff * value
    return CycloReal._raw(ambient, tuple(total))


_LOCAL = threading.local()


def _interval_context() -> MPIntervalContext:
    ctx = getattr(_LOCAL, "ctx", None)
    if ctx is None:
        ctx = MPIntervalContext()
        _LOCAL.ctx = ctx
    return ctx


def sign(x: CycloReal) -> int:
    """Returns the exact sign of x under c = 2cos(pi/N)."""
    return _sign(x.ambient, x.coeffs)


@lru_cache(maxsize=1 << 16)
def _sign(ambient: int, coeffs: Coeffs) -> int:
    if not any(coeffs):
        return 0
    if not any(coeffs[1:]):
        return 1 if coeffs[0] > 0 else -1
    ctx = _interval_context()
    bits = SIGN_START_BITS
    while bits <= SIGN_MAX_BITS:
        ctx.prec = bits
        gen = 2 * ctx.cos(ctx.pi / ambient)
        value = ctx.mpf(0)
        for coeff in reversed(coeffs):
            value = value * gen + ctx.mpf(coeff.numerator) / coeff.denominator
        if 0 not in value:
            return 1 if value.a > 0 else -1
        logger.debug("sign undecided at %d bits in ambient %d, refining", bits, ambient)
        bits *= 2
    raise PrecisionExhaustedError(
        f"could not separate {list(map(str, coeffs))} (ambient {ambient}) from zero"
    )


def weight(text: str, ambient: Optional[int] = None) -> CycloReal:
    """Parses a signed label such as "2/5" or "-1/7" into its value."""
    text = text.strip()
    negative = text.startswith("-")
    value = from_label(AngleLabel.parse(text.lstrip("-")), ambient)
    return -value if negative else value


def labels_up_to(den: int) -> List[AngleLabel]:
    """All labels m/d with d <= den and m/d <= 1/2, sorted by value."""
    seen = {AngleLabel(m, d) for d in range(1, den + 1) for m in range(d // 2 + 1)}
    return sorted(seen, key=lambda label: label.fraction)
