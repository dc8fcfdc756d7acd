"""
局部分歧计算: 循环稳定子作用在截断幂级数环上时 Ext¹ 的不变维数。
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from sympy.ntheory import primitive_root

from eqdeform.algebra.linalg import rank
from eqdeform.algebra.scalar import Field, QQ, field_from_spec
from eqdeform.utils.error_handler import InputError

logger = logging.getLogger(__name__)


def root_of_unity(m: int, field: Field) -> int:
    """k 中的 m 次本原单位根; 不存在时报错"""
    if m < 1:
        raise InputError("cyclic order must be positive")
    if field.characteristic == 0:
        if m == 1:
            return field.one
        if m == 2:
            return field.convert(-1)
        raise InputError(f"no primitive {m}-th root of unity in Q")
    p = field.characteristic
    if (p - 1) % m:
        raise InputError(f"no primitive {m}-th root of unity in F_{p}: {m} does not divide {p - 1}")
    if p == 2:
        return 1
    return pow(primitive_root(p), (p - 1) // m, p)


@dataclass(frozen=True)
class TruncatedSeriesModule:
    """R/(t^N)·e, σ(t^i·e) = ζ^{i+w} t^i·e"""
    modulus: int
    weight: int
    order: int
    field: Field
    zeta: object

    def __post_init__(self):
        if self.modulus < 0:
            raise InputError("modulus degree must be non-negative")

    def character(self, i: int):
        exponent = (i + self.weight) % self.order
        value = self.field.one
        for _ in range(exponent):
            value = self.field.mul(value, self.zeta)
        return value

    def is_invariant(self, i: int) -> bool:
        return (i + self.weight) % self.order == 0


def twist_weight(d: int) -> int:
    """分解 0 → R·e₁ → R·e₀ → R/(t^d)dt 迫使 e₁ 权重为 d+1, 对偶后为 −(d+1)"""
    return -(d + 1)


def ext1_module(d: int, m: int, field: Field) -> TruncatedSeriesModule:
    if d < 0:
        raise InputError("different exponent must be non-negative")
    if m < 2:
        raise InputError("cyclic order must be at least 2")
    return TruncatedSeriesModule(d, twist_weight(d), m, field, root_of_unity(m, field))


def local_ext1_invariants(d: int, m: int, field: Field = QQ) -> int:
    """按权重同余计数不变基元 t^i·e₁*, 0 ≤ i < d"""
    module = ext1_module(d, m, field)
    count = sum(1 for i in range(d) if module.is_invariant(i))
    logger.debug(f"Ext1 invariants for d={d}, m={m}: {count}")
    return count


def explicit_action_matrix(d: int, m: int, field: Field) -> np.ndarray:
    """基 t^i·e₁* 上的作用矩阵 (对角)"""
    module = ext1_module(d, m, field)
    matrix = np.zeros((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            matrix[i, j] = field.zero
        matrix[i, i] = module.character(i)
    return matrix


def fixed_space_dimension(d: int, m: int, field: Field) -> int:
    """d − rank(A − 1)"""
    if d == 0:
        return 0
    A = explicit_action_matrix(d, m, field)
    shifted = A - np.diag([field.one] * d).astype(object)
    rows = [[field.convert(x) for x in row] for row in shifted.tolist()]
    return d - rank(rows, field, d)


def tame_different(m: int) -> int:
    if m < 1:
        raise InputError("stabilizer order must be positive")
    return m - 1


def total_local_contribution(points: Iterable[Tuple[int, int]], field: Field = QQ) -> int:
    """各分歧点 (d, m) 贡献之和"""
    return sum(local_ext1_invariants(d, m, field) for d, m in points)


def ramify_field(p: int = None) -> Field:
    return QQ if p is None else field_from_spec(f"F {p}")
