"""
自由模子模的 Gröbner 基 (Buchberger + Gebauer–Möller)。

理想按秩 1 的模处理。模元素内部用稀疏字典 {(位置, 指数): 系数} 表示,
项序为 position-over-term: 位置下标越小越大, 同位置内沿用环的单项式序。
"""
import heapq
import itertools
import logging
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from eqdeform.algebra.polynomial import (
    MonomialOrder, Polynomial, PolynomialRing, monomial_divides, monomial_lcm,
    monomial_product, monomial_quotient,
)
from eqdeform.utils.cache import cached
from eqdeform.utils.error_handler import ContextMismatchError, InputError

logger = logging.getLogger(__name__)

Term = Tuple[int, Tuple[int, ...]]
SparseVector = Dict[Term, object]


@dataclass(frozen=True)
class FreeModuleElement:
    components: Tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(self.components))
        rings = {id(c.ring) for c in self.components}
        if len(rings) > 1:
            raise ContextMismatchError("module element components live in different contexts")

    @property
    def rank(self) -> int:
        return len(self.components)

    @property
    def ring(self) -> PolynomialRing:
        return self.components[0].ring

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __add__(self, other: 'FreeModuleElement') -> 'FreeModuleElement':
        return FreeModuleElement(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: 'FreeModuleElement') -> 'FreeModuleElement':
        return FreeModuleElement(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> 'FreeModuleElement':
        return FreeModuleElement(tuple(-a for a in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def to_sparse(components: Sequence[Polynomial]) -> SparseVector:
    return {(pos, e): c for pos, f in enumerate(components) for e, c in f.terms.items()}


def from_sparse(vec: SparseVector, ring: PolynomialRing, rank: int) -> List[Polynomial]:
    parts: List[Dict] = [{} for _ in range(rank)]
    for (pos, e), c in vec.items():
        parts[pos][e] = c
    return [Polynomial(ring, p) for p in parts]


class ModuleGroebnerBasis:
    """子模 ⊂ P^rank 的约化 Gröbner 基"""

    def __init__(self, ring: PolynomialRing, rank: int, elements: List[SparseVector]):
        self.ring = ring
        self.rank = rank
        self.elements = elements
        self.leads: List[Term] = [self.lead(g) for g in elements]
        self._by_position: Dict[int, List[int]] = {}
        for i, (pos, _) in enumerate(self.leads):
            self._by_position.setdefault(pos, []).append(i)

    # 项序

    def key(self, term: Term) -> Tuple[int, ...]:
        return (-term[0],) + tuple(self.ring.key(term[1]))

    def lead(self, vec: SparseVector) -> Term:
        return max(vec, key=self.key)

    # 约化

    def _reducer(self, term: Term) -> Optional[int]:
        pos, exps = term
        for i in self._by_position.get(pos, ()):
            if monomial_divides(self.leads[i][1], exps):
                return i
        return None

    def reduce(self, vec: SparseVector) -> SparseVector:
        """完全约化, 返回余式 (没有任何项被首项整除)"""
        return _full_reduce(vec, self.elements, self.leads, self._reducer, self.key, self.ring.field)

    def normal_form(self, components: Sequence[Polynomial]) -> List[Polynomial]:
        _check_rank(components, self.rank, self.ring)
        return from_sparse(self.reduce(to_sparse(components)), self.ring, self.rank)

    def contains(self, components: Sequence[Polynomial]) -> bool:
        _check_rank(components, self.rank, self.ring)
        return not self.reduce(to_sparse(components))

    def vectors(self) -> List[List[Polynomial]]:
        return [from_sparse(g, self.ring, self.rank) for g in self.elements]

    def is_whole_position(self, pos: int) -> bool:
        return any(p == pos and not any(e) for p, e in self.leads)

    def leading_exponents(self, pos: int) -> List[Tuple[int, ...]]:
        return [e for p, e in self.leads if p == pos]


def _check_rank(components: Sequence[Polynomial], rank: int, ring: PolynomialRing):
    if len(components) != rank:
        raise InputError(f"expected {rank} components, got {len(components)}")
    if any(c.ring is not ring for c in components):
        raise ContextMismatchError()


def _negated(key: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(-k for k in key)


def _full_reduce(vec, elements, leads, find_reducer, key, field) -> SparseVector:
    work = dict(vec)
    heap = [(_negated(key(t)), t) for t in work]
    heapq.heapify(heap)
    queued = set(work)
    remainder: SparseVector = {}
    while heap:
        _, t = heapq.heappop(heap)
        queued.discard(t)
        c = work.pop(t, None)
        if c is None:
            continue
        i = find_reducer(t)
        if i is None:
            remainder[t] = c
            continue
        g, (_, lead_exps) = elements[i], leads[i]
        shift = monomial_quotient(t[1], lead_exps)
        for (p, e), gc in g.items():
            if (p, e) == leads[i]:
                continue
            nt = (p, monomial_product(e, shift))
            value = field.sub(work[nt], field.mul(c, gc)) if nt in work else field.neg(field.mul(c, gc))
            if field.is_zero(value):
                work.pop(nt, None)
            else:
                work[nt] = value
                if nt not in queued:
                    heapq.heappush(heap, (_negated(key(nt)), nt))
                    queued.add(nt)
    return remainder


def _monic(vec: SparseVector, lead: Term, field) -> SparseVector:
    inv = field.inv(vec[lead])
    return {t: field.mul(c, inv) for t, c in vec.items()}


class _Builder:
    """Buchberger 主循环"""

    def __init__(self, ring: PolynomialRing, rank: int):
        self.ring = ring
        self.rank = rank
        self.field = ring.field
        self.G: List[SparseVector] = []
        self.leads: List[Term] = []
        self.pairs = set()

    def key(self, term: Term):
        return (-term[0],) + tuple(self.ring.key(term[1]))

    def find_reducer(self, term: Term) -> Optional[int]:
        pos, exps = term
        for i, (p, e) in enumerate(self.leads):
            if p == pos and monomial_divides(e, exps):
                return i
        return None

    def reduce(self, vec: SparseVector) -> SparseVector:
        return _full_reduce(vec, self.G, self.leads, self.find_reducer, self.key, self.field)

    def update(self, f: SparseVector):
        lead_f = max(f, key=self.key)
        f = _monic(f, lead_f, self.field)
        pos_f, lm_f = lead_f
        k = len(self.G)

        def pair_lcm(i, j):
            return monomial_lcm(self.leads[i][1], self.leads[j][1])

        # Gebauer–Möller 准则 B
        kept = set()
        for i, j in self.pairs:
            if self.leads[i][0] == pos_f:
                L = pair_lcm(i, j)
                if (monomial_divides(lm_f, L)
                        and L != monomial_lcm(self.leads[i][1], lm_f)
                        and L != monomial_lcm(self.leads[j][1], lm_f)):
                    continue
            kept.add((i, j))

        lcm_dict: Dict[Tuple[int, ...], List[int]] = {}
        for i in range(k):
            if self.leads[i][0] == pos_f:
                lcm_dict.setdefault(monomial_lcm(self.leads[i][1], lm_f), []).append(i)
        minimal = []
        for L in sorted(lcm_dict, key=self.ring.key):
            if all(not monomial_divides(M, L) for M in minimal):
                minimal.append(L)
        for L in minimal:
            # 互素首项准则只对理想成立
            if self.rank == 1 and any(monomial_lcm(self.leads[i][1], lm_f) == monomial_product(self.leads[i][1], lm_f)
                                      for i in lcm_dict[L]):
                continue
            kept.add((min(lcm_dict[L]), k))

        self.G.append(f)
        self.leads.append(lead_f)
        self.pairs = kept

    def spoly(self, i: int, j: int) -> SparseVector:
        (pos, a), (_, b) = self.leads[i], self.leads[j]
        L = monomial_lcm(a, b)
        sa, sb = monomial_quotient(L, a), monomial_quotient(L, b)
        field = self.field
        out: SparseVector = {}
        for (p, e), c in self.G[i].items():
            out[(p, monomial_product(e, sa))] = c
        for (p, e), c in self.G[j].items():
            t = (p, monomial_product(e, sb))
            value = field.sub(out[t], c) if t in out else field.neg(c)
            if field.is_zero(value):
                out.pop(t, None)
            else:
                out[t] = value
        return out

    def select(self) -> Tuple[int, int]:
        def pair_key(p):
            i, j = p
            L = monomial_lcm(self.leads[i][1], self.leads[j][1])
            return self.key((self.leads[i][0], L)), j, i
        return min(self.pairs, key=pair_key)

    def run(self, generators: List[SparseVector]) -> List[SparseVector]:
        for g in generators:
            if g:
                self.update(g)
        steps = 0
        while self.pairs:
            i, j = self.select()
            self.pairs.remove((i, j))
            r = self.reduce(self.spoly(i, j))
            steps += 1
            if r:
                self.update(r)
        logger.debug(f"Buchberger finished: {steps} S-pairs, {len(self.G)} elements")
        return self.finish()

    def finish(self) -> List[SparseVector]:
        order = sorted(range(len(self.G)), key=lambda i: self.key(self.leads[i]))
        minimal: List[int] = []
        for i in order:
            pos, e = self.leads[i]
            if all(not (self.leads[m][0] == pos and monomial_divides(self.leads[m][1], e)) for m in minimal):
                minimal.append(i)
        # 自约化
        G = [self.G[i] for i in minimal]
        leads = [self.leads[i] for i in minimal]
        reduced = []
        for idx in range(len(G)):
            others = [G[m] for m in range(len(G)) if m != idx]
            other_leads = [leads[m] for m in range(len(G)) if m != idx]

            def find(term, _leads=other_leads):
                for n, (p, e) in enumerate(_leads):
                    if p == term[0] and monomial_divides(e, term[1]):
                        return n
                return None
            r = _full_reduce(G[idx], others, other_leads, find, self.key, self.field)
            reduced.append(_monic(r, leads[idx], self.field))
        return reduced


def module_groebner(vectors: Sequence[Sequence[Polynomial]], ring: PolynomialRing, rank: int) -> ModuleGroebnerBasis:
    """子模 ⟨vectors⟩ ⊂ P^rank 的约化 Gröbner 基"""
    sparse = []
    for v in vectors:
        _check_rank(v, rank, ring)
        sparse.append(to_sparse(v))
    elements = _Builder(ring, rank).run(sparse)
    return ModuleGroebnerBasis(ring, rank, elements)


class GroebnerBasis:
    """理想的约化 Gröbner 基, 首系数为 1, 按首项升序排列"""

    def __init__(self, ring: PolynomialRing, module: ModuleGroebnerBasis):
        self.ring = ring
        self.order: MonomialOrder = ring.order
        self.module = module
        self.generators: List[Polynomial] = [v[0] for v in module.vectors()]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        return f"GroebnerBasis([{', '.join(str(g) for g in self.generators)}])"

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f.ring is not self.ring:
            raise ContextMismatchError()
        return self.module.normal_form([f])[0]

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def is_unit_ideal(self) -> bool:
        return self.module.is_whole_position(0)

    def leading_monomials(self) -> List[Tuple[int, ...]]:
        return self.module.leading_exponents(0)


def _gb_key(gens: Sequence[Polynomial], order: Optional[MonomialOrder] = None):
    return order, tuple(gens)


@cached(key=_gb_key)
def buchberger(gens: Sequence[Polynomial], order: Optional[MonomialOrder] = None) -> GroebnerBasis:
    """
    理想 ⟨gens⟩ 的约化 Gröbner 基。
    给出 order 时在同变量、同域的新上下文中计算。
    """
    gens = list(gens)
    if not gens:
        raise InputError("ideal needs at least one generator")
    ring = gens[0].ring
    if any(g.ring is not ring for g in gens):
        raise ContextMismatchError()
    if order is not None and order.bind(ring.nvars) != ring.order:
        target = ring.with_order(order)
        gens = [target.rebase(g) for g in gens]
        ring = target
    module = module_groebner([[g] for g in gens], ring, 1)
    logger.debug(f"ideal Gröbner basis with {len(module.elements)} generators")
    return GroebnerBasis(ring, module)


def normal_form(f: Polynomial, gb: GroebnerBasis) -> Polynomial:
    return gb.normal_form(f)


class Lifter:
    """
    余因子表示: 若 h ∈ ⟨g_1..g_s⟩ ⊂ P^rank, 给出 a 使 h = Σ a_i g_i。
    通过增广模 (g_i; e_i) 的 POT Gröbner 基实现。
    """

    def __init__(self, generators: Sequence[Sequence[Polynomial]], ring: PolynomialRing, rank: int):
        self.ring = ring
        self.rank = rank
        self.count = len(generators)
        zero = ring.zero
        augmented = []
        for i, g in enumerate(generators):
            _check_rank(g, rank, ring)
            tail = [zero] * self.count
            tail[i] = ring.one
            augmented.append(list(g) + tail)
        self.basis = module_groebner(augmented, ring, rank + self.count)

    @classmethod
    def for_ideal(cls, gens: Sequence[Polynomial]) -> 'Lifter':
        gens = list(gens)
        return cls([[g] for g in gens], gens[0].ring, 1)

    def cofactors(self, target: Sequence[Polynomial]) -> Optional[List[Polynomial]]:
        """目标不在子模中时返回 None"""
        _check_rank(target, self.rank, self.ring)
        padded = list(target) + [self.ring.zero] * self.count
        rest = self.basis.reduce(to_sparse(padded))
        if any(pos < self.rank for pos, _ in rest):
            return None
        tail = from_sparse(rest, self.ring, self.rank + self.count)[self.rank:]
        return [-w for w in tail]


def module_kernel(matrix: Sequence[Sequence[Polynomial]], modulus: GroebnerBasis) -> List[FreeModuleElement]:
    """
    { v ∈ B^r : matrix·v ≡ 0 mod modulus } 的生成元, matrix 为 c×r。
    """
    ring = modulus.ring
    c = len(matrix)
    r = len(matrix[0]) if c else 0
    if any(len(row) != r for row in matrix):
        raise InputError("ragged matrix")
    if any(entry.ring is not ring for row in matrix for entry in row):
        raise ContextMismatchError()
    zero = ring.zero
    vectors = []
    for k in range(r):
        tail = [zero] * r
        tail[k] = ring.one
        vectors.append([matrix[j][k] for j in range(c)] + tail)
    for g in modulus.generators:
        for j in range(c):
            head = [zero] * c
            head[j] = g
            vectors.append(head + [zero] * r)
    basis = module_groebner(vectors, ring, c + r)
    kernel: List[FreeModuleElement] = []
    seen = set()
    for vec in basis.vectors():
        if any(not v.is_zero() for v in vec[:c]):
            continue
        reduced = tuple(modulus.normal_form(v) for v in vec[c:])
        if all(v.is_zero() for v in reduced) or reduced in seen:
            continue
        seen.add(reduced)
        kernel.append(FreeModuleElement(reduced))
    logger.debug(f"module kernel: {len(kernel)} generators")
    return kernel


@dataclass
class ModulePresentation:
    """M = B^rank / ⟨relations⟩, B = P / base"""
    rank: int
    relations: List[FreeModuleElement]
    base: GroebnerBasis
    _basis: Optional[ModuleGroebnerBasis] = dc_field(default=None, repr=False)

    def __post_init__(self):
        for rel in self.relations:
            if rel.rank != self.rank:
                raise InputError("relation rank does not match the module rank")

    @property
    def ring(self) -> PolynomialRing:
        return self.base.ring

    def groebner(self) -> ModuleGroebnerBasis:
        if self._basis is None:
            zero = self.ring.zero
            vectors = [list(rel.components) for rel in self.relations]
            for g in self.base.generators:
                for j in range(self.rank):
                    v = [zero] * self.rank
                    v[j] = g
                    vectors.append(v)
            self._basis = module_groebner(vectors, self.ring, self.rank)
        return self._basis

    def normal_form(self, components: Sequence[Polynomial]) -> List[Polynomial]:
        return self.groebner().normal_form(components)


@dataclass
class QuotientBasis:
    finite: bool
    keys: List[Term]
    truncation: Optional[int] = None

    @property
    def dimension(self) -> int:
        return len(self.keys)

    def index(self) -> Dict[Term, int]:
        return {k: i for i, k in enumerate(self.keys)}


def standard_monomials(leads: List[Tuple[int, ...]], nvars: int, max_degree: Optional[int] = None):
    """
    不被任何首项整除的单项式, 按总次数递增; max_degree 为 None 时要求有限。
    """
    found = []
    frontier = [(0,) * nvars]
    seen = set(frontier)
    while frontier:
        nxt = []
        for e in frontier:
            if any(monomial_divides(l, e) for l in leads):
                continue
            if max_degree is not None and sum(e) > max_degree:
                continue
            found.append(e)
            for i in range(nvars):
                f = list(e)
                f[i] += 1
                f = tuple(f)
                if f not in seen:
                    seen.add(f)
                    nxt.append(f)
        frontier = nxt
    return found


def _position_is_finite(leads: List[Tuple[int, ...]], nvars: int) -> bool:
    if any(not any(e) for e in leads):
        return True
    for i in range(nvars):
        if not any(e[i] > 0 and all(e[k] == 0 for k in range(nvars) if k != i) for e in leads):
            return False
    return True


def quotient_basis(m: ModulePresentation, trunc: Optional[int] = None) -> QuotientBasis:
    """
    M 的 k-基 (标准单项式 × 位置)。有限维时给出精确维数,
    否则列出总次数 ≤ trunc 的标准单项式并标记 infinite-at-bound;
    无限维且未给 trunc 时取首项的最高次数为界。
    """
    basis = m.groebner()
    nvars = m.ring.nvars
    finite = all(_position_is_finite(basis.leading_exponents(pos), nvars) for pos in range(m.rank))
    if not finite and trunc is None:
        trunc = max((sum(e) for pos in range(m.rank) for e in basis.leading_exponents(pos)), default=0)
        logger.debug(f"infinite quotient without truncation, listing standard monomials up to degree {trunc}")
    keys: List[Term] = []
    for pos in range(m.rank):
        leads = basis.leading_exponents(pos)
        bound = None if finite else trunc
        monos = standard_monomials(leads, nvars, bound)
        monos.sort(key=lambda e: (sum(e), tuple(m.ring.key(e))))
        keys.extend((pos, e) for e in monos)
    return QuotientBasis(finite, keys, None if finite else trunc)


def krull_dimension(gb: GroebnerBasis) -> int:
    """由首项理想计算: 首项不含于其中的最大变量子集的大小; 单位理想为 -1。"""
    if gb.is_unit_ideal():
        return -1
    nvars = gb.ring.nvars
    supports = [frozenset(i for i, k in enumerate(e) if k) for e in gb.leading_monomials()]
    for size in range(nvars, -1, -1):
        for subset in itertools.combinations(range(nvars), size):
            chosen = set(subset)
            # 子集 S 独立: 没有首项只含 S 中的变量
            if all(not s <= chosen for s in supports):
                return size
    return 0


@dataclass
class RegularSequenceCertificate:
    regular: bool
    dimension: int
    expected: int


def is_regular_sequence(gens: Sequence[Polynomial]) -> RegularSequenceCertificate:
    """dim k[x]/(gens) = n - c 时判定为正则序列"""
    gens = list(gens)
    gb = buchberger(gens)
    ring = gens[0].ring
    dim = krull_dimension(gb)
    expected = ring.nvars - len(gens)
    return RegularSequenceCertificate(dim == expected, dim, expected)

