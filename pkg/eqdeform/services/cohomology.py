"""
有限群上同调 H⁰/H¹/H², 系数取自半线性作用模的有限维分片。
"""
import logging
from collections import deque
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from eqdeform.algebra.groebner import (
    ModulePresentation, QuotientBasis, standard_monomials, to_sparse, from_sparse,
)
from eqdeform.algebra.linalg import SpanBasis, nullspace, rank, solve
from eqdeform.algebra.polynomial import Polynomial
from eqdeform.config import settings
from eqdeform.services.gaction import GroupAction, TwistedFreeModule
from eqdeform.utils.error_handler import CocycleError, InputError, SliceError, WildCharacteristicError

logger = logging.getLogger(__name__)

Term = Tuple[int, Tuple[int, ...]]
Element = List[Polynomial]


class GModuleSlice:
    """
    有限维 G 稳定子空间: k-基 keys 与每个 σ 的作用矩阵 (按列)。
    """

    def __init__(self, group: GroupAction, keys: List[Term], actions: List[List[List[object]]],
                 module: TwistedFreeModule, degree: Optional[int] = None,
                 presentation: ModulePresentation = None, graded: bool = False,
                 complete: bool = False):
        self.group = group
        self.field = module.ring.field
        self.keys = keys
        self.actions = actions
        self.module = module
        self.degree = degree
        self.presentation = presentation
        self.graded = graded
        self.complete = complete
        self._index = {k: i for i, k in enumerate(keys)}

    @property
    def dimension(self) -> int:
        return len(self.keys)

    def weight(self, key: Term) -> int:
        return sum(key[1]) + self.module.shifts[key[0]]

    def __contains__(self, key: Term) -> bool:
        return key in self._index

    def index(self, key: Term) -> int:
        return self._index[key]

    def unit(self, key: Term) -> Element:
        ring = self.module.ring
        out = [ring.zero] * self.module.rank
        out[key[0]] = ring.monomial(key[1])
        return out

    def reduce(self, components: Sequence[Polynomial]) -> Element:
        if self.presentation is not None:
            return self.presentation.normal_form(list(components))
        return self.module.reduce(components)

    def vector(self, components: Sequence[Polynomial]) -> List[object]:
        """坐标向量; 含分片外的项时抛出 SliceError"""
        out = [self.field.zero] * self.dimension
        for key, c in to_sparse(self.reduce(components)).items():
            if key not in self._index:
                raise SliceError(f"element leaves the slice at key {key}")
            out[self._index[key]] = c
        return out

    def element(self, vector: Sequence[object]) -> Element:
        sparse = {k: c for k, c in zip(self.keys, vector) if not self.field.is_zero(c)}
        return from_sparse(sparse, self.module.ring, self.module.rank)

    def apply(self, s: int, vector: Sequence[object]) -> List[object]:
        field = self.field
        A = self.actions[s]
        out = []
        for row in A:
            acc = field.zero
            for a, v in zip(row, vector):
                if not field.is_zero(a) and not field.is_zero(v):
                    acc = field.add(acc, field.mul(a, v))
            out.append(acc)
        return out

    def is_representation(self) -> bool:
        g = self.group
        n = self.dimension
        for i in range(n):
            e = [self.field.zero] * n
            e[i] = self.field.one
            for s in g:
                for t in g:
                    if self.apply(g.mul(s, t), e) != self.apply(s, self.apply(t, e)):
                        return False
        return True

    @classmethod
    def build(cls, module: TwistedFreeModule, degree: int, max_keys: int = None) -> 'GModuleSlice':
        """权重 ≤ degree 的标准单项式, 在群作用下取闭包"""
        max_keys = settings.max_slice_keys if max_keys is None else max_keys
        ring = module.ring
        leads = module.gb.leading_monomials()
        keys = set()
        complete = True
        for pos in range(module.rank):
            bound = degree - module.shifts[pos]
            if module.gb.is_unit_ideal():
                continue
            if bound < 0:
                complete = False
                continue
            found = standard_monomials(leads, ring.nvars, bound + 1)
            # 标准单项式是序理想: 次数 bound+1 处为空则更高次也为空
            if any(sum(e) == bound + 1 for e in found):
                complete = False
            keys.update((pos, e) for e in found if sum(e) <= bound)
        if len(keys) > max_keys:
            raise SliceError(f"slice at degree {degree} has more than {max_keys} keys")

        def weight(key):
            return sum(key[1]) + module.shifts[key[0]]

        images: Dict[Term, List[Dict[Term, object]]] = {}
        pending = deque(sorted(keys, key=lambda k: (weight(k), k[0], ring.key(k[1]))))
        graded = True
        while pending:
            key = pending.popleft()
            unit = [ring.zero] * module.rank
            unit[key[0]] = ring.monomial(key[1])
            per_element = []
            for s in module.group:
                sparse = to_sparse(module.act(s, unit))
                for t in sparse:
                    if weight(t) != weight(key):
                        graded = False
                    if t not in keys:
                        keys.add(t)
                        pending.append(t)
                        if len(keys) > max_keys:
                            raise SliceError(f"slice closure at degree {degree} exceeds {max_keys} keys")
                per_element.append(sparse)
            images[key] = per_element

        ordered = sorted(keys, key=lambda k: (weight(k), k[0], ring.key(k[1])))
        index = {k: i for i, k in enumerate(ordered)}
        field = ring.field
        n = len(ordered)
        actions = []
        for s in module.group:
            A = [[field.zero] * n for _ in range(n)]
            for col, key in enumerate(ordered):
                for t, c in images[key][s].items():
                    A[index[t]][col] = c
            actions.append(A)
        logger.debug(f"{module.name} slice at degree {degree}: {n} keys, graded={graded}, complete={complete}")
        return cls(module.group, ordered, actions, module, degree, graded=graded, complete=complete)

    @classmethod
    def from_quotient(cls, module: TwistedFreeModule, presentation: ModulePresentation,
                      basis: QuotientBasis) -> 'GModuleSlice':
        """有限维商模 (例如 T¹) 上的诱导作用"""
        if not basis.finite:
            raise InputError("quotient is not finite-dimensional")
        ring = module.ring
        field = ring.field
        keys = list(basis.keys)
        index = {k: i for i, k in enumerate(keys)}
        n = len(keys)
        actions = []
        for s in module.group:
            A = [[field.zero] * n for _ in range(n)]
            for col, key in enumerate(keys):
                unit = [ring.zero] * module.rank
                unit[key[0]] = ring.monomial(key[1])
                image = presentation.normal_form(module.act(s, unit))
                for t, c in to_sparse(image).items():
                    A[index[t]][col] = c
            actions.append(A)
        return cls(module.group, keys, actions, module, None, presentation=presentation, complete=True)


@dataclass
class CohomologyClass:
    """p-余链代表元: p=1 时按群元素下标给出模元素"""
    degree: int
    values: List[Element]

    def is_zero(self) -> bool:
        return all(all(x.is_zero() for x in v) for v in self.values)

    def render(self, labels: Sequence[str]) -> Dict[str, List[str]]:
        return {label: [str(x) for x in v] for label, v in zip(labels, self.values)}


def invariants(m: GModuleSlice) -> List[List[object]]:
    """所有 (A_σ − 1) 的公共核"""
    field = m.field
    n = m.dimension
    rows = []
    for s in m.group:
        if s == m.group.identity:
            continue
        A = m.actions[s]
        for i in range(n):
            rows.append([field.sub(A[i][j], field.one) if i == j else A[i][j] for j in range(n)])
    if not rows:
        return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    return nullspace(rows, field, n)


def coboundary(m: GModuleSlice, phi: Sequence[object]) -> List[List[object]]:
    """∂φ(σ) = σφ − φ"""
    field = m.field
    return [[field.sub(a, b) for a, b in zip(m.apply(s, phi), phi)] for s in m.group]


def is_cocycle(m: GModuleSlice, c: Sequence[Sequence[object]]) -> bool:
    field = m.field
    g = m.group
    for s in g:
        for t in g:
            rhs = [field.add(a, b) for a, b in zip(m.apply(s, c[t]), c[s])]
            if list(c[g.mul(s, t)]) != rhs:
                return False
    return True


def _cocycle_rows(m: GModuleSlice) -> List[List[object]]:
    field = m.field
    g = m.group
    n = m.dimension
    size = g.order * n
    rows = []
    for s in g:
        A = m.actions[s]
        for t in g:
            st = g.mul(s, t)
            for i in range(n):
                row = [field.zero] * size
                row[st * n + i] = field.add(row[st * n + i], field.one)
                for j in range(n):
                    if not field.is_zero(A[i][j]):
                        row[t * n + j] = field.sub(row[t * n + j], A[i][j])
                row[s * n + i] = field.sub(row[s * n + i], field.one)
                rows.append(row)
    return rows


def _coboundary_columns(m: GModuleSlice) -> List[List[object]]:
    """第 k 列为 ∂e_k 的展平"""
    field = m.field
    n = m.dimension
    cols = []
    for k in range(n):
        e = [field.zero] * n
        e[k] = field.one
        cols.append([x for part in coboundary(m, e) for x in part])
    return cols


def _flatten(c: Sequence[Sequence[object]]) -> List[object]:
    return [x for part in c for x in part]


def _unflatten(v: Sequence[object], order: int, n: int) -> List[List[object]]:
    return [list(v[s * n:(s + 1) * n]) for s in range(order)]


def _restricted_coboundaries(m: GModuleSlice, big: GModuleSlice) -> List[List[object]]:
    """big 中满足 ∂φ 支撑在 m 内的 φ, 返回 ∂φ 在 m 坐标下的展平"""
    field = m.field
    g = m.group
    inside = [big.index(k) for k in m.keys]
    outside = [i for i in range(big.dimension) if big.keys[i] not in m]
    cols = _coboundary_columns(big)
    rows = []
    for s in g:
        for i in outside:
            rows.append([cols[k][s * big.dimension + i] for k in range(big.dimension)])
    if rows:
        phis = nullspace(rows, field, big.dimension)
    else:
        phis = [[field.one if i == k else field.zero for i in range(big.dimension)] for k in range(big.dimension)]
    out = []
    for phi in phis:
        d = coboundary(big, phi)
        out.append([d[s][i] for s in g for i in inside])
    return out


@dataclass
class H1Result:
    dimension: int
    z1_dimension: int
    b1_dimension: int
    representatives: List[CohomologyClass]
    degree: Optional[int]
    certified: str
    graded: bool = False
    vectors: List[List[object]] = dc_field(default_factory=list, repr=False)


def h1(m: GModuleSlice, big: GModuleSlice = None) -> H1Result:
    """
    Z¹ 由乘法表给出的全部余链恒等式决定; B¹ 取 big (默认为 m) 中 ∂φ 支撑在 m 内的部分。
    """
    field = m.field
    g = m.group
    n = m.dimension
    size = g.order * n
    z1 = nullspace(_cocycle_rows(m), field, size) if n else []
    if big is None or big is m:
        b1 = [list(col) for col in _coboundary_columns(m)]
    else:
        b1 = _restricted_coboundaries(m, big)
    span = SpanBasis(field, size)
    for v in b1:
        span.add(v)
    b1_dim = len(span)
    reps = []
    vectors = []
    for z in z1:
        if span.add(z):
            vectors.append(z)
            reps.append(CohomologyClass(1, [m.element(part) for part in _unflatten(z, g.order, n)]))
    dimension = len(z1) - b1_dim
    if g.is_tame() or m.complete:
        certified = 'exact'
    else:
        certified = f'slice:{m.degree}'
    logger.info(f"H1 at degree {m.degree}: dim Z1={len(z1)}, dim B1={b1_dim}, dim H1={dimension}")
    return H1Result(dimension, len(z1), b1_dim, reps, m.degree, certified, m.graded, vectors)


def check_cocycle(c: CohomologyClass, module: TwistedFreeModule) -> bool:
    """在模本身上精确检查 c(στ) = σ·c(τ) + c(σ)"""
    g = module.group
    for s in g:
        for t in g:
            lhs = module.reduce(c.values[g.mul(s, t)])
            moved = module.act(s, c.values[t])
            rhs = module.reduce([a + b for a, b in zip(moved, c.values[s])])
            if lhs != rhs:
                return False
    return True


def solve_coboundary(c: CohomologyClass, m) -> Optional[Element]:
    """
    求 φ 使 σφ − φ = c(σ); 驯顺时用平均, 否则在分片上线性求解。
    m 可以是分片或模本身 (此时按 c 的权重加 slack 建分片)。
    找到的 φ 是精确证书, 返回 None 只说明在该分片上不存在。
    """
    module = m if isinstance(m, TwistedFreeModule) else m.module
    g = module.group
    if not check_cocycle(c, module):
        raise CocycleError("map violates the cocycle identity")
    ring = module.ring
    field = ring.field
    if c.is_zero():
        return module.zero()
    if g.is_tame():
        total = module.zero()
        for v in c.values:
            total = [a + b for a, b in zip(total, v)]
        scale = field.neg(field.inv(field.convert(g.order)))
        phi = module.reduce([x.scale(scale) for x in total])
    else:
        if isinstance(m, TwistedFreeModule):
            top = max(sum(e) + module.shifts[pos] for v in c.values for pos, e in to_sparse(v))
            m = GModuleSlice.build(module, top + settings.slice_slack)
        n = m.dimension
        try:
            target = _flatten([m.vector(v) for v in c.values])
        except SliceError:
            return None
        cols = _coboundary_columns(m)
        rows = [[cols[k][r] for k in range(n)] for r in range(g.order * n)]
        x = solve(rows, target, field, n)
        if x is None:
            return None
        phi = m.element(x)
    for s in g:
        moved = module.act(s, phi)
        if module.reduce([a - b - v for a, b, v in zip(moved, phi, c.values[s])]) != module.zero():
            raise CocycleError("coboundary solution failed verification")
    return phi


def h2(m: GModuleSlice) -> int:
    """bar 余链复形上的 dim H²"""
    field = m.field
    g = m.group
    n = m.dimension
    N = g.order
    if n == 0:
        return 0
    # d1: C¹ → C², (dφ)(s,t) = sφ(t) − φ(st) + φ(s)
    d1_cols = []
    for t0 in g:
        for k in range(n):
            col = [field.zero] * (N * N * n)
            for s in g:
                A = m.actions[s]
                for t in g:
                    base = (s * N + t) * n
                    if t == t0:
                        for i in range(n):
                            col[base + i] = field.add(col[base + i], A[i][k])
                    if g.mul(s, t) == t0:
                        col[base + k] = field.sub(col[base + k], field.one)
                    if s == t0:
                        col[base + k] = field.add(col[base + k], field.one)
            d1_cols.append(col)
    rank_d1 = rank(d1_cols, field, N * N * n)
    # d2: C² → C³, (dc)(s,t,u) = s c(t,u) − c(st,u) + c(s,tu) − c(s,t)
    d2_cols = []
    for a in g:
        for b in g:
            for k in range(n):
                col = [field.zero] * (N * N * N * n)
                for s in g:
                    A = m.actions[s]
                    for t in g:
                        for u in g:
                            base = ((s * N + t) * N + u) * n
                            if (t, u) == (a, b):
                                for i in range(n):
                                    col[base + i] = field.add(col[base + i], A[i][k])
                            if (g.mul(s, t), u) == (a, b):
                                col[base + k] = field.sub(col[base + k], field.one)
                            if (s, g.mul(t, u)) == (a, b):
                                col[base + k] = field.add(col[base + k], field.one)
                            if (s, t) == (a, b):
                                col[base + k] = field.sub(col[base + k], field.one)
                d2_cols.append(col)
    rank_d2 = rank(d2_cols, field, N * N * N * n)
    return N * N * n - rank_d2 - rank_d1


def invariant_derivation_basis(amb, degree: int, method: str = 'auto') -> List[Element]:
    """
    不变导子 Der(B)^G 在权重 ≤ degree 分片上的基。
    method: reynolds (要求驯顺) / solve / auto
    """
    from eqdeform.services.ambient import ambient_derivations, jacobian_map

    module = ambient_derivations(amb)
    m = GModuleSlice.build(module, degree)
    field = m.field
    n = m.dimension
    # J·D ≡ 0 的线性条件
    images = [to_sparse(jacobian_map(amb, m.unit(k))) for k in m.keys]
    terms = sorted({t for img in images for t in img}, key=lambda t: (t[0], t[1]))
    rows = [[img.get(t, field.zero) for img in images] for t in terms]
    if method == 'auto':
        method = 'reynolds' if amb.group.is_tame() else 'solve'
    if method == 'solve':
        for s in m.group:
            A = m.actions[s]
            for i in range(n):
                rows.append([field.sub(A[i][j], field.one) if i == j else A[i][j] for j in range(n)])
        basis = nullspace(rows, field, n) if rows else invariants(m)
    elif method == 'reynolds':
        if not amb.group.is_tame():
            raise WildCharacteristicError()
        kernel = nullspace(rows, field, n) if rows else [
            [field.one if i == j else field.zero for j in range(n)] for i in range(n)
        ]
        inv = field.inv(field.convert(m.group.order))
        span = SpanBasis(field, n)
        for v in kernel:
            avg = [field.zero] * n
            for s in m.group:
                avg = [field.add(a, b) for a, b in zip(avg, m.apply(s, v))]
            span.add([field.mul(a, inv) for a in avg])
        basis = [list(r) for r in span.rows]
    else:
        raise InputError(f"unknown invariant method '{method}'")
    return [m.element(v) for v in basis]
