"""
Sparse multivariate polynomials with exact coefficients.

A ``PolynomialRing`` is a variable context: field, variable names and monomial
order. Arithmetic is carried by a sympy ``PolyRing`` over the field's domain;
contexts are compared by identity and mixing polynomials from different
contexts raises ``ContextMismatchError`` instead of coercing.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Symbol
from sympy.polys.rings import PolyElement, ring as sympy_ring

from eqdeform.algebra.scalar import Field, Scalar
from eqdeform.utils.error_handler import ContextMismatchError, InputError, ProblemSyntaxError

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class MonomialOrder:
    """grevlex 或 lex; permutation[0] 为最大变量"""
    kind: str = 'grevlex'
    permutation: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in ('grevlex', 'lex'):
            raise InputError(f"unknown monomial order '{self.kind}'")

    def bind(self, nvars: int) -> 'MonomialOrder':
        perm = tuple(range(nvars)) if self.permutation is None else tuple(self.permutation)
        if sorted(perm) != list(range(nvars)):
            raise InputError("monomial order permutation does not match the variables")
        return MonomialOrder(self.kind, perm)

    def key(self, exps: Monomial) -> Tuple[int, ...]:
        perm = self.permutation
        if self.kind == 'lex':
            return tuple(exps[i] for i in perm)
        return (sum(exps),) + tuple(-exps[i] for i in reversed(perm))


GREVLEX = MonomialOrder('grevlex')
LEX = MonomialOrder('lex')


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_quotient(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def monomial_product(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class PolynomialRing:
    """不可变的变量上下文 k[x_1..x_n] 及单项式序, 运算委托给 sympy 的 PolyRing"""

    def __init__(self, field: Field, names: Sequence[str], order: MonomialOrder = GREVLEX):
        names = tuple(names)
        if not names:
            raise InputError("a polynomial ring needs at least one variable")
        if len(set(names)) != len(names):
            raise InputError(f"repeated variable in {names}")
        self.field = field
        self.names = names
        self.nvars = len(names)
        self.order = order.bind(self.nvars)
        self.sympy_ring = sympy_ring([Symbol(name) for name in names], field.domain, self.order.kind)[0]
        self._index = {name: i for i, name in enumerate(names)}
        self._zero_monomial = (0,) * self.nvars

    def __repr__(self):
        return f"PolynomialRing({self.field!r}, {list(self.names)}, {self.order.kind})"

    def index(self, name: str) -> int:
        if name not in self._index:
            raise InputError(f"unknown variable '{name}'")
        return self._index[name]

    def key(self, exps: Monomial):
        return self.order.key(exps)

    def wrap(self, element: PolyElement) -> 'Polynomial':
        return Polynomial(self, element)

    @property
    def zero(self) -> 'Polynomial':
        return self.wrap(self.sympy_ring.zero)

    @property
    def one(self) -> 'Polynomial':
        return self.constant(1)

    def constant(self, value) -> 'Polynomial':
        if isinstance(value, Scalar):
            value = value.value
        return self.wrap(self.sympy_ring.ground_new(self.field.convert(value)))

    def monomial(self, exps: Monomial, coeff=1) -> 'Polynomial':
        return self.wrap(self.sympy_ring.term_new(tuple(exps), self.field.convert(coeff)))

    def gen(self, which) -> 'Polynomial':
        i = self.index(which) if isinstance(which, str) else which
        return self.wrap(self.sympy_ring.gens[i])

    def gens(self) -> List['Polynomial']:
        return [self.gen(i) for i in range(self.nvars)]

    def from_terms(self, terms: Dict[Monomial, object]) -> 'Polynomial':
        """由原始系数构造, 丢弃零项"""
        return Polynomial(self, {tuple(e): c for e, c in terms.items()})

    def parse(self, text: str, line: int = 0) -> 'Polynomial':
        return parse_polynomial(text, self, line=line)

    def with_order(self, order: MonomialOrder) -> 'PolynomialRing':
        """同一变量表、另一单项式序的新上下文"""
        return PolynomialRing(self.field, self.names, order)

    def rebase(self, f: 'Polynomial') -> 'Polynomial':
        """按变量名把 f 从同域的另一上下文迁移过来"""
        if f.ring is self:
            return f
        if f.ring.field != self.field:
            raise ContextMismatchError("cannot rebase across fields")
        positions = [self.index(name) for name in f.ring.names]
        terms = {}
        for exps, c in f.terms.items():
            new = [0] * self.nvars
            for i, e in zip(positions, exps):
                new[i] = e
            terms[tuple(new)] = c
        return Polynomial(self, terms)


class Polynomial:
    """
    sympy PolyElement 的不可变包装; terms 即该元素本身 (单项式 -> 原始系数)。
    """
    __slots__ = ('ring', 'element', '_hash')

    def __init__(self, ring: PolynomialRing, terms):
        self.ring = ring
        if isinstance(terms, PolyElement) and terms.ring == ring.sympy_ring:
            self.element = terms
        else:
            self.element = ring.sympy_ring.from_dict(dict(terms))
        self._hash = None

    @property
    def terms(self) -> Dict[Monomial, object]:
        return self.element

    # 类型转换

    def _lift(self, other) -> 'Polynomial':
        if isinstance(other, Polynomial):
            if other.ring is not self.ring:
                raise ContextMismatchError()
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return self.ring.constant(other)
        return NotImplemented

    def _new(self, element: PolyElement) -> 'Polynomial':
        return Polynomial(self.ring, element)

    # 运算

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._new(self.element + other.element)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.element)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._new(self.element - other.element)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._new(other.element - self.element)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._new(self.element * other.element)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        return self._new(self.element ** n)

    def scale(self, c) -> 'Polynomial':
        """乘以原始系数"""
        c = self.ring.field.convert(c)
        if self.ring.field.is_zero(c):
            return self.ring.zero
        return self._new(self.element.mul_ground(c))

    # 比较

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return other.ring is self.ring and dict.__eq__(other.element, self.element)
        if isinstance(other, (int, Fraction, Scalar)):
            return dict.__eq__(self.element, self.ring.constant(other).element)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.ring), frozenset(self.element.items())))
        return self._hash

    def __bool__(self):
        return bool(self.element)

    # 查询

    def is_zero(self) -> bool:
        return not self.element

    def degree(self) -> int:
        """总次数; 零多项式为 -1"""
        return max((sum(e) for e in self.element), default=-1)

    def coefficient(self, exps: Monomial):
        return self.element.get(tuple(exps), self.ring.field.zero)

    def sorted_terms(self) -> List[Tuple[Monomial, object]]:
        """按单项式序降序排列的项"""
        key = self.ring.key
        return sorted(self.element.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self) -> Tuple[Monomial, object]:
        if not self.element:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.element, key=self.ring.key)
        return e, self.element[e]

    def leading_monomial(self) -> Monomial:
        return self.leading_term()[0]

    def leading_coefficient(self):
        return self.leading_term()[1]

    def monic(self) -> 'Polynomial':
        if not self.element:
            return self
        return self.scale(self.ring.field.inv(self.leading_coefficient()))

    def variables(self) -> List[int]:
        return [i for i in range(self.ring.nvars) if any(e[i] for e in self.element)]

    # 代换与求导

    def substitute(self, images: Sequence['Polynomial'], target: PolynomialRing = None) -> 'Polynomial':
        return substitute(self, images, target)

    def degree_slice(self, d: int) -> 'Polynomial':
        return degree_slice(self, d)

    def derivative(self, which) -> 'Polynomial':
        i = self.ring.index(which) if isinstance(which, str) else which
        # 特征 p 下 diff 会留下零系数
        d = self.element.diff(i)
        d.strip_zero()
        return self._new(d)

    def __str__(self):
        return canonical_render(self)

    def __repr__(self):
        return f"Polynomial({canonical_render(self)!r})"


def substitute(f: Polynomial, images: Sequence[Polynomial], target: PolynomialRing = None) -> Polynomial:
    """
    Ring-homomorphic evaluation x_i -> images[i]; all images share one context.
    """
    images = list(images)
    if len(images) != f.ring.nvars:
        raise ContextMismatchError(f"expected {f.ring.nvars} images, got {len(images)}")
    if target is None:
        if not images:
            target = f.ring
        else:
            target = images[0].ring
    if any(img.ring is not target for img in images):
        raise ContextMismatchError("substitution images live in different contexts")
    if target.field != f.ring.field:
        raise ContextMismatchError("substitution changes the coefficient field")

    if target is f.ring:
        pairs = list(zip(f.ring.sympy_ring.gens, (img.element for img in images)))
        return target.wrap(f.element.compose(pairs))

    powers: List[Dict[int, PolyElement]] = [{0: target.sympy_ring.one} for _ in images]

    def power(i: int, k: int) -> PolyElement:
        cache = powers[i]
        if k not in cache:
            cache[k] = power(i, k - 1) * images[i].element
        return cache[k]

    result = target.sympy_ring.zero
    for e, c in f.terms.items():
        term = target.sympy_ring.ground_new(c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        result = result + term
    return target.wrap(result)


def degree_slice(f: Polynomial, d: int) -> Polynomial:
    """总次数恰为 d 的部分"""
    return Polynomial(f.ring, {e: c for e, c in f.terms.items() if sum(e) == d})


def _render_monomial(names: Sequence[str], exps: Monomial) -> str:
    return "*".join(name if k == 1 else f"{name}^{k}" for name, k in zip(names, exps) if k)


def canonical_render(f: Polynomial) -> str:
    """
    项按降序排列, 显式符号, '^' 表示幂, '*' 表示乘积。
    """
    if not f.terms:
        return "0"
    field = f.ring.field
    parts = []
    for i, (exps, c) in enumerate(f.sorted_terms()):
        negative = field.characteristic == 0 and c < 0
        magnitude = -c if negative else c
        mono = _render_monomial(f.ring.names, exps)
        if not mono:
            body = field.render(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{field.render(magnitude)}*{mono}"
        if i == 0:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append((" - " if negative else " + ") + body)
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[\^*+/-]))")


def _tokenize(text: str, line: int) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ProblemSyntaxError(f"unexpected character '{text[pos]}'", line, pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start + 1))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, ring: PolynomialRing, line: int = 0) -> Polynomial:
    """
    poly := term (('+'|'-') term)*
    term := coeff ('*'? var ('^' nat)?)*     coeff := int ('/' nat)?
    """
    tokens = _tokenize(text, line)
    if not tokens:
        raise ProblemSyntaxError("empty polynomial", line, 1)
    field = ring.field
    pos = 0

    def peek(kind=None, value=None):
        if pos >= len(tokens):
            return None
        tok = tokens[pos]
        if kind and tok[0] != kind:
            return None
        if value and tok[1] != value:
            return None
        return tok

    def fail(message):
        column = tokens[pos][2] if pos < len(tokens) else (tokens[-1][2] + len(tokens[-1][1]))
        raise ProblemSyntaxError(message, line, column)

    def parse_term() -> Polynomial:
        nonlocal pos
        coeff = Fraction(1)
        seen = False
        if peek('num'):
            coeff = Fraction(int(tokens[pos][1]))
            pos += 1
            seen = True
            if peek('op', '/'):
                pos += 1
                if not peek('num'):
                    fail("expected denominator")
                den = int(tokens[pos][1])
                if den == 0:
                    fail("zero denominator")
                coeff /= den
                pos += 1
        exps = [0] * ring.nvars
        while True:
            star = peek('op', '*')
            if star:
                pos += 1
                if not peek('ident'):
                    fail("expected variable after '*'")
            if not peek('ident'):
                break
            name = tokens[pos][1]
            if name not in ring._index:
                fail(f"unknown variable '{name}'")
            pos += 1
            k = 1
            if peek('op', '^'):
                pos += 1
                if not peek('num'):
                    fail("expected exponent")
                k = int(tokens[pos][1])
                pos += 1
            exps[ring.index(name)] += k
            seen = True
        if not seen:
            fail("expected a term")
        try:
            value = field.convert(coeff)
        except ZeroDivisionError:
            fail(f"coefficient {coeff} is undefined in {field!r}")
        return ring.monomial(tuple(exps), value)

    result = ring.zero
    sign = 1
    if peek('op', '-') or peek('op', '+'):
        sign = -1 if tokens[pos][1] == '-' else 1
        pos += 1
    while True:
        term = parse_term()
        result = result + term if sign > 0 else result - term
        if pos >= len(tokens):
            break
        if peek('op', '+') or peek('op', '-'):
            sign = -1 if tokens[pos][1] == '-' else 1
            pos += 1
            continue
        fail(f"unexpected token '{tokens[pos][1]}'")
    return result


def jacobian(polys: Iterable[Polynomial], ring: PolynomialRing) -> List[List[Polynomial]]:
    """行对应多项式, 列对应变量"""
    return [[f.derivative(i) for i in range(ring.nvars)] for f in polys]
