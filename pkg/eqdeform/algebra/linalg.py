"""
域上的精确线性代数, 由 sympy 的 DomainMatrix 在 QQ 或 GF(p) 上完成。

向量是原始系数列表, 矩阵是行的列表。
"""
from typing import List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from eqdeform.algebra.scalar import Field

Vector = List[object]


def to_domain_matrix(rows: Sequence[Sequence[object]], field: Field, ncols: int) -> DomainMatrix:
    convert = field.convert
    data = [[convert(a) for a in row] for row in rows]
    return DomainMatrix(data, (len(data), ncols), field.domain)


def _identity(field: Field, n: int) -> List[Vector]:
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def rref(rows: Sequence[Sequence[object]], field: Field, ncols: int = None) -> Tuple[List[Vector], List[int]]:
    """简化行阶梯形, 返回非零行及主元列"""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows or not ncols:
        return [], []
    reduced, pivots = to_domain_matrix(rows, field, ncols).rref()
    return reduced.to_list()[:len(pivots)], list(pivots)


def rank(rows: Sequence[Sequence[object]], field: Field, ncols: int = None) -> int:
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows or not ncols:
        return 0
    return to_domain_matrix(rows, field, ncols).rank()


def nullspace(rows: Sequence[Sequence[object]], field: Field, ncols: int) -> List[Vector]:
    """{x : Ax = 0} 的基, 每个自由列一个向量, 该列分量为 1"""
    if not ncols:
        return []
    if not rows:
        return _identity(field, ncols)
    reduced, pivots = to_domain_matrix(rows, field, ncols).rref()
    return reduced.nullspace_from_rref(list(pivots)).to_list()


def solve(rows: Sequence[Sequence[object]], rhs: Sequence[object], field: Field, ncols: int) -> Optional[Vector]:
    """
    Ax = b 的一个解, 自由未知量取 0; 无解时返回 None。
    靠前的列优先作为主元。
    """
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, field, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [field.zero] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[ncols]
    return x


class SpanBasis:
    """k^n 子空间的增量基, 行始终保持简化阶梯形"""

    def __init__(self, field: Field, ncols: int):
        self.field = field
        self.ncols = ncols
        self.pivots: List[int] = []
        self._basis: Optional[DomainMatrix] = None

    def __len__(self):
        return len(self.pivots)

    @property
    def rows(self) -> List[Vector]:
        return self._basis.to_list() if self._basis is not None else []

    def _row(self, v: Sequence[object]) -> DomainMatrix:
        return to_domain_matrix([v], self.field, self.ncols)

    def _reduced(self, v: Sequence[object]) -> DomainMatrix:
        row = self._row(v)
        if self._basis is None:
            return row
        entries = row.to_list()[0]
        coeffs = DomainMatrix([[entries[p] for p in self.pivots]], (1, len(self.pivots)), self.field.domain)
        return row - coeffs * self._basis

    def reduce(self, v: Sequence[object]) -> Vector:
        return self._reduced(v).to_list()[0]

    def contains(self, v: Sequence[object]) -> bool:
        return self._reduced(v).is_zero_matrix

    def add(self, v: Sequence[object]) -> bool:
        """插入 v; 已在张成空间中时返回 False"""
        field = self.field
        w = self._reduced(v)
        entries = w.to_list()[0]
        p = next((i for i, a in enumerate(entries) if not field.is_zero(a)), None)
        if p is None:
            return False
        w = w * field.inv(entries[p])
        if self._basis is None:
            self._basis = w
        else:
            column = DomainMatrix([[r[p]] for r in self._basis.to_list()], (len(self.pivots), 1), field.domain)
            self._basis = (self._basis - column * w).vstack(w)
        self.pivots.append(p)
        return True
