"""
独立的暴力线性代数预言机, 不依赖 eqdeform 的 Gröbner 与上同调代码
"""
import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

Terms = Dict[Tuple[int, ...], object]


def _entry(value, domain, p: Optional[int]):
    if isinstance(value, Fraction):
        if p:
            return domain(value.numerator * pow(value.denominator, -1, p))
        return domain(value.numerator, value.denominator)
    if isinstance(value, int):
        return domain(value)
    if p:
        return domain(int(value) % p)
    return domain.convert(value)


def matrix_rank(rows: Sequence[Sequence[object]], p: Optional[int] = None) -> int:
    """sympy DomainMatrix 求秩, p 为 None 时在 Q 上"""
    if not rows or not rows[0]:
        return 0
    domain = GF(p) if p else QQ
    data = [[_entry(x, domain, p) for x in row] for row in rows]
    return DomainMatrix(data, (len(data), len(data[0])), domain).rank()


def monomials_up_to(nvars: int, degree: int) -> List[Tuple[int, ...]]:
    out = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def _shift(terms: Terms, m: Tuple[int, ...]) -> Terms:
    return {tuple(a + b for a, b in zip(e, m)): c for e, c in terms.items()}


def truncated_ideal_span(gens: Sequence[Terms], nvars: int, degree: int) -> Tuple[List[Tuple[int, ...]], List[List[object]]]:
    """{m·g : deg(m·g) ≤ degree} 在单项式坐标下的行向量"""
    basis = monomials_up_to(nvars, degree)
    index = {e: i for i, e in enumerate(basis)}
    rows = []
    for g in gens:
        top = max(sum(e) for e in g)
        for m in monomials_up_to(nvars, degree - top) if top <= degree else []:
            row = [0] * len(basis)
            for e, c in _shift(g, m).items():
                row[index[e]] = c
            rows.append(row)
    return basis, rows


def member_up_to_degree(f: Terms, gens: Sequence[Terms], nvars: int, degree: int, p: Optional[int] = None) -> bool:
    """f 是否属于 I 的 degree 截断 (充分条件)"""
    basis, rows = truncated_ideal_span(gens, nvars, degree)
    index = {e: i for i, e in enumerate(basis)}
    target = [0] * len(basis)
    for e, c in f.items():
        if e not in index:
            return False
        target[index[e]] = c
    return matrix_rank(rows + [target], p) == matrix_rank(rows, p)


def quotient_dimension_up_to_degree(gens: Sequence[Terms], nvars: int, degree: int, p: Optional[int] = None) -> int:
    basis, rows = truncated_ideal_span(gens, nvars, degree)
    return len(basis) - matrix_rank(rows, p)


def cyclic_h1_dimension(action: Sequence[Sequence[int]], order: int, p: Optional[int] = None) -> int:
    """
    循环群 <s> 上 H¹ 的维数: 余圈由 c(s) = v 决定且须满足 N·v = 0,
    N = 1 + A + ... + A^{order-1}; 上边界为 (A − 1)φ。
    """
    n = len(action)

    def mul(a, b):
        return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

    identity = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    power = identity
    norm = [[0] * n for _ in range(n)]
    for _ in range(order):
        norm = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(norm, power)]
        power = mul(power, action)
    z1 = n - matrix_rank(norm, p)
    b1 = matrix_rank([[action[i][j] - identity[i][j] for j in range(n)] for i in range(n)], p)
    return z1 - b1


def sympy_groebner(polys: Sequence[str], names: Sequence[str], p: Optional[int] = None):
    """sympy 的约化 Gröbner 基 (grevlex), 作为独立参照"""
    symbols = sympy.symbols(list(names))
    exprs = [sympy.sympify(text.replace('^', '**'), locals=dict(zip(names, symbols))) for text in polys]
    options = {'order': 'grevlex'}
    if p:
        options['modulus'] = p
    basis = sympy.groebner(exprs, *symbols, **options)
    return [sympy.Poly(g, *symbols, **({'modulus': p} if p else {})) for g in basis.exprs], symbols


def to_sympy_poly(text: str, symbols, names: Sequence[str], p: Optional[int] = None):
    expr = sympy.sympify(text.replace('^', '**'), locals=dict(zip(names, symbols)))
    return sympy.Poly(expr, *symbols, **({'modulus': p} if p else {}))
