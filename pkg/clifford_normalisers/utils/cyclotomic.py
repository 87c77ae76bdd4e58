"""
Exact arithmetic in cyclotomic fields Q(zeta_N).

Every value is stored in one canonical form, so equal field elements
always carry equal data:
- the conductor is the smallest N whose field contains the value
  (never 2 mod 4; rationals have conductor 1),
- coefficients are integers over a single positive denominator, in lowest terms,
- exponents index the basis { prod_i zeta_{q_i}^{j_i} : 0 <= j_i < phi(q_i) }
  where q_i runs over the prime powers exactly dividing N.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Mapping, Optional, Tuple, Union

from ..errors import ConductorCapExceeded, CycloParseError, CycloZeroDivision

DEFAULT_CONDUCTOR_CAP = 7920
_conductor_cap = DEFAULT_CONDUCTOR_CAP

CycloLike = Union["Cyclo", int, Fraction]


def set_conductor_cap(cap: int) -> None:
    global _conductor_cap
    if int(cap) < 1:
        raise ValueError(f"conductor cap must be positive, got {cap}")
    _conductor_cap = int(cap)


def get_conductor_cap() -> int:
    return _conductor_cap


def _check_conductor(n: int) -> None:
    if n > _conductor_cap:
        raise ConductorCapExceeded(f"conductor {n} exceeds the cap {_conductor_cap}")


@lru_cache(maxsize=None)
def _prime_powers(n: int) -> Tuple[Tuple[int, int], ...]:
    """(p, p**e) for every prime power p**e exactly dividing n."""
    out = []
    rest = n
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            q = 1
            while rest % p == 0:
                rest //= p
                q *= p
            out.append((p, q))
        p += 1
    if rest > 1:
        out.append((rest, rest))
    return tuple(out)


@lru_cache(maxsize=None)
def _expand(n: int, k: int) -> Tuple[Tuple[int, int], ...]:
    """zeta_n**k written over the canonical basis of Q(zeta_n)."""
    combined: Dict[int, int] = {0: 1}
    for p, q in _prime_powers(n):
        cofactor = n // q
        j = (k * pow(cofactor, -1, q)) % q
        phi = q - q // p
        if j < phi:
            local: Tuple[Tuple[int, int], ...] = ((j, 1),)
        else:
            # x**phi = -(1 + x**(q/p) + ... + x**((p-2)q/p)) for x = zeta_q
            step = q // p
            local = tuple((j - phi + i * step, -1) for i in range(p - 1))
        following: Dict[int, int] = {}
        for exponent, coefficient in combined.items():
            for local_exponent, local_coefficient in local:
                key = (exponent + local_exponent * cofactor) % n
                following[key] = following.get(key, 0) + coefficient * local_coefficient
        combined = following
    return tuple(sorted(combined.items()))


class Cyclo:
    """An exact element of Q(zeta_N), immutable and hashable."""

    __slots__ = ("_n", "_num", "_den", "_hash", "_approx")

    def __init__(self, terms: Optional[Mapping[int, Union[int, Fraction]]] = None, conductor: int = 1):
        if conductor < 1:
            raise ValueError(f"conductor must be positive, got {conductor}")
        fractions = {int(k): Fraction(v) for k, v in (terms or {}).items()}
        den = 1
        for value in fractions.values():
            den = den * value.denominator // math.gcd(den, value.denominator)
        raw: Dict[int, int] = {}
        for k, value in fractions.items():
            key = k % conductor
            raw[key] = raw.get(key, 0) + value.numerator * (den // value.denominator)
        built = Cyclo._from_raw(conductor, raw, den)
        self._n, self._num, self._den = built._n, built._num, built._den
        self._hash = None
        self._approx = None

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    @classmethod
    def _raw_instance(cls, n: int, num: Tuple[Tuple[int, int], ...], den: int) -> "Cyclo":
        obj = object.__new__(cls)
        obj._n = n
        obj._num = num
        obj._den = den
        obj._hash = None
        obj._approx = None
        return obj

    @classmethod
    def _build(cls, n: int, acc: Mapping[int, int], den: int) -> "Cyclo":
        # acc must already be written over the canonical basis of Q(zeta_n)
        items = [(e, a) for e, a in acc.items() if a]
        if not items:
            return cls._raw_instance(1, (), 1)
        g = den
        for _, a in items:
            g = math.gcd(g, a)
            if g == 1:
                break
        if g > 1:
            items = [(e, a // g) for e, a in items]
            den //= g
        for p, _ in _prime_powers(n):
            while n % p == 0 and all(e % p == 0 for e, _ in items):
                items = [(e // p, a) for e, a in items]
                n //= p
        items.sort()
        return cls._raw_instance(n, tuple(items), den)

    @classmethod
    def _from_raw(cls, n: int, raw: Mapping[int, int], den: int) -> "Cyclo":
        _check_conductor(n)
        acc: Dict[int, int] = {}
        for k, a in raw.items():
            if not a:
                continue
            for e, c in _expand(n, k % n):
                acc[e] = acc.get(e, 0) + a * c
        return cls._build(n, acc, den)

    @classmethod
    def rational(cls, value: Union[int, Fraction]) -> "Cyclo":
        value = Fraction(value)
        if value == 0:
            return cls._raw_instance(1, (), 1)
        return cls._raw_instance(1, ((0, value.numerator),), value.denominator)

    def __reduce__(self):
        return (Cyclo._raw_instance, (self._n, self._num, self._den))

    # ------------------------------------------------------------------
    # inspection
    # ------------------------------------------------------------------
    @property
    def conductor(self) -> int:
        return self._n

    @property
    def terms(self) -> Dict[int, Fraction]:
        return {e: Fraction(a, self._den) for e, a in self._num}

    @property
    def key(self) -> Tuple[int, Tuple[Tuple[int, int], ...], int]:
        return (self._n, self._num, self._den)

    def is_zero(self) -> bool:
        return not self._num

    def is_rational(self) -> bool:
        return self._n == 1

    def is_monomial(self) -> bool:
        return len(self._num) == 1

    def as_fraction(self) -> Fraction:
        if self._n != 1:
            raise ValueError(f"{self} is not rational")
        if not self._num:
            return Fraction(0)
        return Fraction(self._num[0][1], self._den)

    def is_real(self) -> bool:
        return self == self.conj()

    def __bool__(self) -> bool:
        return bool(self._num)

    def __complex__(self) -> complex:
        if self._approx is None:
            re_parts, im_parts = [], []
            for e, a in self._num:
                angle = 2.0 * math.pi * e / self._n
                re_parts.append(a * math.cos(angle))
                im_parts.append(a * math.sin(angle))
            self._approx = complex(math.fsum(re_parts) / self._den, math.fsum(im_parts) / self._den)
        return self._approx

    def root_of_unity_exponent(self) -> Optional[Tuple[int, int]]:
        """(m, k) with self == zeta_m**k, m = lcm(2, conductor); None if not a root of unity."""
        if not self._num:
            return None
        z = complex(self)
        if abs(abs(z) - 1.0) > 1e-9:
            return None
        m = self._n if self._n % 2 == 0 else 2 * self._n
        k = round(cmath.phase(z) * m / (2.0 * math.pi)) % m
        if root_of_unity(m, k) == self:
            return m, k
        return None

    # ------------------------------------------------------------------
    # field operations
    # ------------------------------------------------------------------
    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._n == other._n and self._den == other._den and self._num == other._num

    def __hash__(self) -> int:
        if self._hash is None:
            if self._n == 1:
                self._hash = hash(self.as_fraction())
            else:
                self._hash = hash((self._n, self._num, self._den))
        return self._hash

    def __neg__(self) -> "Cyclo":
        return Cyclo._raw_instance(self._n, tuple((e, -a) for e, a in self._num), self._den)

    def __pos__(self) -> "Cyclo":
        return self

    def __add__(self, other) -> "Cyclo":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._num:
            return self
        if not self._num:
            return other
        n = _lcm(self._n, other._n)
        _check_conductor(n)
        lift_a, lift_b = n // self._n, n // other._n
        # lifting a basis element of a subfield lands on a basis element
        acc: Dict[int, int] = {}
        for e, a in self._num:
            acc[e * lift_a] = a * other._den
        for e, b in other._num:
            key = e * lift_b
            acc[key] = acc.get(key, 0) + b * self._den
        return Cyclo._build(n, acc, self._den * other._den)

    __radd__ = __add__

    def __sub__(self, other) -> "Cyclo":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Cyclo":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def _scaled(self, num: int, den: int) -> "Cyclo":
        if num == 0 or not self._num:
            return Cyclo._raw_instance(1, (), 1)
        if den < 0:
            num, den = -num, -den
        return Cyclo._build(self._n, {e: a * num for e, a in self._num}, self._den * den)

    def __mul__(self, other) -> "Cyclo":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._num or not other._num:
            return Cyclo._raw_instance(1, (), 1)
        if other._n == 1:
            return self._scaled(other._num[0][1], other._den)
        if self._n == 1:
            return other._scaled(self._num[0][1], self._den)
        n = _lcm(self._n, other._n)
        lift_a, lift_b = n // self._n, n // other._n
        raw: Dict[int, int] = {}
        for e1, a1 in self._num:
            base = e1 * lift_a
            for e2, a2 in other._num:
                k = (base + e2 * lift_b) % n
                raw[k] = raw.get(k, 0) + a1 * a2
        return Cyclo._from_raw(n, raw, self._den * other._den)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if not self._num:
            raise CycloZeroDivision("inverse of zero in a cyclotomic field")
        return _inverse(self)

    def __truediv__(self, other) -> "Cyclo":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Cyclo":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "Cyclo":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def galois(self, u: int) -> "Cyclo":
        """Image under the automorphism zeta_N -> zeta_N**u (u a unit mod N)."""
        n = self._n
        if math.gcd(u, n) != 1:
            raise ValueError(f"{u} is not a unit modulo {n}")
        return Cyclo._from_raw(n, {(e * u) % n: a for e, a in self._num}, self._den)

    def conj(self) -> "Cyclo":
        return self.galois(-1)

    # ------------------------------------------------------------------
    # text
    # ------------------------------------------------------------------
    def __str__(self) -> str:
        return format_cyclo(self)

    def __repr__(self) -> str:
        return f"Cyclo('{format_cyclo(self)}')"


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def _coerce(value):
    if isinstance(value, Cyclo):
        return value
    if isinstance(value, (int, Fraction)):
        return Cyclo.rational(value)
    return NotImplemented


def as_cyclo(value: CycloLike) -> Cyclo:
    coerced = _coerce(value)
    if coerced is NotImplemented:
        raise TypeError(f"cannot interpret {value!r} as a cyclotomic number")
    return coerced


@lru_cache(maxsize=8192)
def _inverse(x: Cyclo) -> Cyclo:
    n = x._n
    if len(x._num) == 1:
        e, a = x._num[0]
        sign = 1 if a > 0 else -1
        return Cyclo._from_raw(n, {(-e) % n: sign * x._den}, abs(a))
    # x * prod_{u != 1} sigma_u(x) is the field norm, a rational number
    others = ONE
    for u in range(2, n):
        if math.gcd(u, n) == 1:
            others = others * x.galois(u)
    norm = x * others
    assert norm.is_rational(), "field norm must be rational"
    return others * (1 / norm.as_fraction())


ZERO = Cyclo.rational(0)
ONE = Cyclo.rational(1)


def root_of_unity(n: int, k: int = 1) -> Cyclo:
    if n < 1:
        raise ValueError(f"order of a root of unity must be positive, got {n}")
    return Cyclo._from_raw(n, {k % n: 1}, 1)


I_UNIT = root_of_unity(4, 1)


def root_of_root_of_unity(value: Cyclo, degree: int) -> Cyclo:
    """An exact degree-th root of a root of unity: zeta_m**k -> zeta_(degree*m)**k."""
    found = value.root_of_unity_exponent()
    if found is None:
        raise ValueError(f"{value} is not a root of unity")
    m, k = found
    return root_of_unity(degree * m, k)


def sqrt_root_of_unity(value: Cyclo) -> Cyclo:
    return root_of_root_of_unity(value, 2)


# ----------------------------------------------------------------------
# module-level operation names
# ----------------------------------------------------------------------
def cyclo_root_of_unity(n: int, k: int) -> Cyclo:
    return root_of_unity(n, k)


def cyclo_add(a: CycloLike, b: CycloLike) -> Cyclo:
    return as_cyclo(a) + as_cyclo(b)


def cyclo_mul(a: CycloLike, b: CycloLike) -> Cyclo:
    return as_cyclo(a) * as_cyclo(b)


def cyclo_neg(a: CycloLike) -> Cyclo:
    return -as_cyclo(a)


def cyclo_inv(a: CycloLike) -> Cyclo:
    return as_cyclo(a).inverse()


def cyclo_conj(a: CycloLike) -> Cyclo:
    return as_cyclo(a).conj()


def cyclo_to_complex(a: CycloLike) -> Tuple[float, float]:
    """
    Floating-point value of a.
    The error is at most (number of terms) * max|coefficient| * 4 * machine epsilon.
    """
    z = complex(as_cyclo(a))
    return (z.real, z.imag)


# ----------------------------------------------------------------------
# literal syntax: w{N}^{k}, p/q, i, sums with + / -, products with *
# ----------------------------------------------------------------------
_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)(?:/(?P<den>\d+))?|w(?P<cond>\d+)(?:\^(?P<exp>-?\d+))?|(?P<unit>i)|(?P<op>[+\-*]))"
)


def _factor_value(match: "re.Match[str]", text: str) -> Cyclo:
    if match.group("num") is not None:
        den = int(match.group("den") or 1)
        if den == 0:
            raise CycloParseError(f"zero denominator in {text!r}")
        return Cyclo.rational(Fraction(int(match.group("num")), den))
    if match.group("cond") is not None:
        n = int(match.group("cond"))
        if n < 1:
            raise CycloParseError(f"root of unity order must be positive in {text!r}")
        return root_of_unity(n, int(match.group("exp") or 1))
    return I_UNIT


def parse_cyclo(text: str) -> Cyclo:
    source = text.strip()
    if not source:
        raise CycloParseError("empty cyclotomic literal")
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        if match is None or match.end() == pos:
            raise CycloParseError(f"cannot parse {text!r} at position {pos}")
        tokens.append(match)
        pos = match.end()

    total = ZERO
    term: Optional[Cyclo] = None
    sign = 1
    expect_factor = True
    for match in tokens:
        op = match.group("op")
        if op in ("+", "-"):
            step = 1 if op == "+" else -1
            if term is None and expect_factor:
                sign *= step
            elif term is not None and not expect_factor:
                total = total + (term if sign > 0 else -term)
                term, sign, expect_factor = None, step, True
            else:
                raise CycloParseError(f"misplaced {op!r} in {text!r}")
        elif op == "*":
            if term is None or expect_factor:
                raise CycloParseError(f"misplaced '*' in {text!r}")
            expect_factor = True
        else:
            if not expect_factor:
                raise CycloParseError(f"missing operator in {text!r}")
            value = _factor_value(match, text)
            term = value if term is None else term * value
            expect_factor = False
    if expect_factor or term is None:
        raise CycloParseError(f"incomplete literal {text!r}")
    return total + (term if sign > 0 else -term)


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_cyclo(value: Cyclo) -> str:
    if not value._num:
        return "0"
    pieces = []
    for e, a in value._num:
        coefficient = Fraction(a, value._den)
        if e == 0:
            pieces.append(_format_fraction(coefficient))
            continue
        root = f"w{value._n}^{e}"
        if coefficient == 1:
            pieces.append(root)
        elif coefficient == -1:
            pieces.append("-" + root)
        else:
            pieces.append(f"{_format_fraction(coefficient)}*{root}")
    text = pieces[0]
    for piece in pieces[1:]:
        text += (" - " + piece[1:]) if piece.startswith("-") else (" + " + piece)
    return text


def format_root(value: Cyclo) -> str:
    """'1', '-1' or 'wN^k' in lowest terms for a root of unity; format_cyclo otherwise."""
    found = value.root_of_unity_exponent()
    if found is None:
        return format_cyclo(value)
    m, k = found
    g = math.gcd(m, k)
    n, k = m // g, k // g
    if n == 1:
        return "1"
    if n == 2:
        return "-1"
    return f"w{n}^{k}"
