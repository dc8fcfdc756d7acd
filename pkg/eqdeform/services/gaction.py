"""
有限群作为仿射代换作用在多项式环上, 以及诱导在 B 与 I/I² 上的扭作用。

约定: 左作用, act(στ, f) = act(σ, act(τ, f))。
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from eqdeform.algebra.groebner import GroebnerBasis, Lifter
from eqdeform.algebra.linalg import rank
from eqdeform.algebra.polynomial import Polynomial, PolynomialRing, substitute
from eqdeform.config import settings
from eqdeform.utils.error_handler import (
    ContextMismatchError, InputError, TwistError, WildCharacteristicError,
)

logger = logging.getLogger(__name__)

Matrix = List[List[Polynomial]]


class Substitution:
    """仿射代换 x_i ↦ images[i]"""

    def __init__(self, ring: PolynomialRing, images: Sequence[Polynomial], label: str = ''):
        images = tuple(images)
        if len(images) != ring.nvars:
            raise InputError(f"substitution needs {ring.nvars} images, got {len(images)}")
        if any(img.ring is not ring for img in images):
            raise ContextMismatchError()
        self.ring = ring
        self.images = images
        self.label = label

    @classmethod
    def identity(cls, ring: PolynomialRing) -> 'Substitution':
        return cls(ring, ring.gens(), 'e')

    @classmethod
    def from_mapping(cls, ring: PolynomialRing, mapping: Dict[str, Polynomial], label: str = '') -> 'Substitution':
        """未出现在 mapping 中的变量保持不动"""
        for name in mapping:
            ring.index(name)
        return cls(ring, [mapping.get(name, ring.gen(i)) for i, name in enumerate(ring.names)], label)

    def __eq__(self, other):
        return isinstance(other, Substitution) and other.ring is self.ring and other.images == self.images

    def __hash__(self):
        return hash(self.images)

    def __str__(self):
        return ", ".join(f"{name} -> {img}" for name, img in zip(self.ring.names, self.images))

    def is_affine(self) -> bool:
        return all(img.degree() <= 1 for img in self.images)

    def linear_part(self) -> List[List[object]]:
        field = self.ring.field
        rows = []
        for img in self.images:
            row = []
            for k in range(self.ring.nvars):
                e = tuple(1 if m == k else 0 for m in range(self.ring.nvars))
                row.append(img.terms.get(e, field.zero))
            rows.append(row)
        return rows

    def is_invertible(self) -> bool:
        if not self.is_affine():
            return False
        n = self.ring.nvars
        return rank(self.linear_part(), self.ring.field, n) == n

    def act(self, f: Polynomial) -> Polynomial:
        if f.ring is not self.ring:
            raise ContextMismatchError()
        return substitute(f, self.images, self.ring)

    def compose(self, other: 'Substitution') -> 'Substitution':
        """self·other, 即先作用 other 再作用 self"""
        return Substitution(self.ring, [self.act(img) for img in other.images])

    def coordinate_permutation(self) -> Optional[List[int]]:
        """若每个像都是一个变量, 返回对应下标, 否则 None"""
        out = []
        for img in self.images:
            if len(img.terms) != 1:
                return None
            (e, c), = img.terms.items()
            if c != self.ring.field.one or sum(e) != 1:
                return None
            out.append(e.index(1))
        return out if sorted(out) == list(range(self.ring.nvars)) else None


class GroupAction:
    """闭包得到的有限群, 含乘法表与逆元表; 下标 0 为单位元"""

    def __init__(self, ring: PolynomialRing, elements: List[Substitution], table: List[List[int]]):
        self.ring = ring
        self.elements = elements
        self.table = table
        self.identity = 0
        self.inverse = [row.index(0) for row in table]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(range(len(self.elements)))

    @property
    def labels(self) -> List[str]:
        return [s.label for s in self.elements]

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return self.inverse[i]

    def act(self, i: int, f: Polynomial) -> Polynomial:
        return self.elements[i].act(f)

    def act_matrix(self, i: int, matrix: Matrix) -> Matrix:
        return [[self.act(i, entry) for entry in row] for row in matrix]

    def is_tame(self) -> bool:
        return self.ring.field.is_invertible_integer(self.order)

    def is_latin_square(self) -> bool:
        n = self.order
        full = set(range(n))
        rows_ok = all(set(row) == full for row in self.table)
        cols_ok = all({self.table[i][j] for i in range(n)} == full for j in range(n))
        return rows_ok and cols_ok

    def permutes_coordinates_freely(self) -> bool:
        """每个元素都置换坐标变量, 且所有轨道大小都等于 |G|"""
        perms = [s.coordinate_permutation() for s in self.elements]
        if any(p is None for p in perms):
            return False
        for i in range(self.ring.nvars):
            orbit = {p[i] for p in perms}
            if len(orbit) != self.order:
                return False
        return True

    def describe(self) -> Dict[str, object]:
        return {'order': self.order, 'labels': self.labels, 'tame': self.is_tame()}


def close_group(generators: Sequence[Substitution], bound: int = None) -> GroupAction:
    """
    生成元在复合下的闭包 (广度优先), 超过 bound 时报错
    """
    if not generators:
        raise InputError("close_group needs a variable context; pass at least the identity")
    bound = settings.group_bound if bound is None else bound
    if bound < 1:
        raise InputError("group bound must be at least 1")
    ring = generators[0].ring
    for g in generators:
        if g.ring is not ring:
            raise ContextMismatchError()
        if not g.is_invertible():
            raise InputError(f"generator '{g.label or g}' is not an invertible affine substitution")

    identity = Substitution.identity(ring)
    elements = [identity]
    index = {identity: 0}
    queue = deque([0])
    while queue:
        current = queue.popleft()
        for g in generators:
            product = g.compose(elements[current])
            if product in index:
                continue
            base = elements[current].label
            product.label = g.label if current == 0 else f"{g.label}*{base}"
            index[product] = len(elements)
            elements.append(product)
            if len(elements) > bound:
                raise InputError(f"group closure exceeds bound {bound}")
            queue.append(index[product])

    n = len(elements)
    table = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            product = elements[i].compose(elements[j])
            if product not in index:
                raise InputError("group closure is not closed under composition")
            table[i][j] = index[product]
    logger.info(f"closed group of order {n}")
    return GroupAction(ring, elements, table)


def trivial_group(ring: PolynomialRing) -> GroupAction:
    return GroupAction(ring, [Substitution.identity(ring)], [[0]])


def verify_stability(gb: GroebnerBasis, g: GroupAction, gens: Sequence[Polynomial] = None) -> bool:
    """σ(I) = I 当且仅当每个 σ(f) 的正规形为 0"""
    gens = gb.generators if gens is None else gens
    for i in g:
        for f in gens:
            if not gb.normal_form(g.act(i, f)).is_zero():
                logger.debug(f"stability fails for {g.elements[i].label} on {f}")
                return False
    return True


@dataclass
class TwistMatrices:
    """σ(f_j) ≡ Σ_l T_σ[j][l]·f_l, 元素按模 I 的正规形保存"""
    matrices: List[Matrix]
    raw: List[Matrix]

    def __getitem__(self, i: int) -> Matrix:
        return self.matrices[i]

    def __len__(self):
        return len(self.matrices)


def twist_matrices(gens: Sequence[Polynomial], g: GroupAction, gb: GroebnerBasis) -> TwistMatrices:
    gens = list(gens)
    c = len(gens)
    if c == 0:
        return TwistMatrices([[] for _ in g], [[] for _ in g])
    lifter = Lifter.for_ideal(gens)
    matrices, raw = [], []
    for i in g:
        rows, raw_rows = [], []
        for j, f in enumerate(gens):
            cof = lifter.cofactors([g.act(i, f)])
            if cof is None:
                raise TwistError(f"{g.elements[i].label}({f}) is not in the ideal")
            raw_rows.append(cof)
            rows.append([gb.normal_form(a) for a in cof])
        matrices.append(rows)
        raw.append(raw_rows)
    return TwistMatrices(matrices, raw)


def matmul(a: Matrix, b: Matrix, ring: PolynomialRing) -> Matrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        out_row = []
        for k in range(cols):
            acc = ring.zero
            for l in range(inner):
                acc = acc + row[l] * b[l][k]
            out_row.append(acc)
        out.append(out_row)
    return out


def check_twist_compatibility(twist: TwistMatrices, g: GroupAction, gb: GroebnerBasis) -> bool:
    """T_e ≡ 1 且 T_{στ} ≡ σ(T_τ)·T_σ (mod I)"""
    ring = gb.ring
    c = len(twist[0])
    for j in range(c):
        for l in range(c):
            expected = ring.one if j == l else ring.zero
            if not gb.normal_form(twist[g.identity][j][l] - expected).is_zero():
                return False
    for s in g:
        for t in g:
            lhs = twist[g.mul(s, t)]
            rhs = matmul(g.act_matrix(s, twist[t]), twist[s], ring)
            for j in range(c):
                for l in range(c):
                    if not gb.normal_form(lhs[j][l] - rhs[j][l]).is_zero():
                        return False
    return True


def reynolds(f: Polynomial, g: GroupAction) -> Polynomial:
    """(1/|G|) Σ_σ σ(f), 仅在 |G| 可逆时可用"""
    if not g.is_tame():
        raise WildCharacteristicError()
    field = f.ring.field
    total = f.ring.zero
    for i in g:
        total = total + g.act(i, f)
    return total.scale(field.inv(field.convert(g.order)))


def jacobian_twists(g: GroupAction) -> List[Matrix]:
    """M_σ[i][k] = ∂σ(x_i)/∂x_k, 环境导子上的扭矩阵"""
    ring = g.ring
    return [[[img.derivative(k) for k in range(ring.nvars)] for img in s.images] for s in g.elements]


class TwistedFreeModule:
    """
    B^rank, 作用 (σ·v)_j = Σ_l σ(M_{σ⁻¹}[j][l])·σ(v_l), 结果按模 I 约化。
    shifts 为各坐标的权重偏移 (用于分片)。
    """

    def __init__(self, name: str, g: GroupAction, gb: GroebnerBasis, matrices: List[Matrix], shifts: List[int]):
        self.name = name
        self.group = g
        self.gb = gb
        self.ring = gb.ring
        self.rank = len(shifts)
        self.shifts = list(shifts)
        self.matrices = matrices
        self._conjugated = [g.act_matrix(s, matrices[g.inv(s)]) for s in g]

    def reduce(self, v: Sequence[Polynomial]) -> List[Polynomial]:
        return [self.gb.normal_form(x) for x in v]

    def act(self, s: int, v: Sequence[Polynomial]) -> List[Polynomial]:
        moved = [self.group.act(s, x) for x in v]
        conj = self._conjugated[s]
        out = []
        for j in range(self.rank):
            acc = self.ring.zero
            for l in range(self.rank):
                if not moved[l].is_zero() and not conj[j][l].is_zero():
                    acc = acc + conj[j][l] * moved[l]
            out.append(self.gb.normal_form(acc))
        return out

    def zero(self) -> List[Polynomial]:
        return [self.ring.zero] * self.rank

    def is_representation(self, samples: Sequence[Sequence[Polynomial]]) -> bool:
        g = self.group
        for v in samples:
            for s in g:
                for t in g:
                    if self.act(g.mul(s, t), v) != self.act(s, self.act(t, v)):
                        return False
        return True
