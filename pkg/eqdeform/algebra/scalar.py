"""
精确系数域: 有理数域与素域 F_p, 由 sympy 的 QQ 与 GF(p) 承载。

多项式与矩阵中存储的原始系数就是 sympy 的域元素, 运算由域对象负责。
"""
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from sympy import isprime
from sympy.polys.domains import GF as SympyGF, QQ as SympyQQ

from eqdeform.utils.error_handler import InputError


class Field:
    characteristic: int = 0
    domain = None

    def convert(self, value: Any):
        raise NotImplementedError

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError(f"division by zero in {self!r}")
        return self.domain.revert(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def is_zero(self, a) -> bool:
        return not a

    def is_invertible_integer(self, n: int) -> bool:
        """整数 n 在域中可逆"""
        return n != 0 if self.characteristic == 0 else n % self.characteristic != 0

    def render(self, a) -> str:
        raise NotImplementedError

    def scalar(self, value: Any) -> 'Scalar':
        return Scalar(self, self.convert(value))


class RationalField(Field):
    characteristic = 0
    tag = 'Q'
    domain = SympyQQ

    def convert(self, value: Any):
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            return self.domain(value.numerator, value.denominator)
        if isinstance(value, numbers.Integral):
            return self.domain(int(value))
        return self.domain.convert(value)

    def render(self, a) -> str:
        numerator, denominator = int(a.numerator), int(a.denominator)
        return str(numerator) if denominator == 1 else f"{numerator}/{denominator}"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash('QQ')

    def __repr__(self):
        return 'QQ'


class PrimeField(Field):
    tag = 'F'

    def __init__(self, p: int):
        if not isinstance(p, int) or p < 2 or not isprime(p):
            raise InputError(f"field characteristic {p} is not prime")
        self.p = p
        self.characteristic = p
        self.domain = SympyGF(p)

    def convert(self, value: Any):
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator {value.denominator} vanishes in F_{self.p}")
            return self.domain(value.numerator * pow(value.denominator, -1, self.p) % self.p)
        if isinstance(value, numbers.Integral):
            return self.domain(int(value) % self.p)
        return self.domain.convert(value)

    def residue(self, a) -> int:
        """[0, p) 中的代表元"""
        return int(self.domain.to_int(a)) % self.p

    def render(self, a) -> str:
        return str(self.residue(a))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(('F', self.p))

    def __repr__(self):
        return f'GF({self.p})'


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_spec(spec: str) -> Field:
    """解析问题文件中的 Q 或 F <p>"""
    parts = spec.split()
    if parts == ['Q']:
        return QQ
    if len(parts) == 2 and parts[0] == 'F' and parts[1].isdigit():
        return PrimeField(int(parts[1]))
    raise InputError(f"unknown field declaration '{spec}'")


@dataclass(frozen=True)
class Scalar:
    """带域标记的元素"""
    field: Field
    value: Any

    def _coerce(self, other) -> Any:
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise InputError("scalars from different fields")
            return other.value
        return self.field.convert(other)

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.value, self._coerce(other)))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field, self.field.div(self.value, self._coerce(other)))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        return self.value == self.field.convert(other)

    def __hash__(self):
        return hash((self.field, self.value))

    def __str__(self):
        return self.field.render(self.value)
