"""
形变演算: 切空间、障碍空间、差类 ν、同构见证、ω 余圈与逐阶提升。

A_m = k[ε]/(ε^{m+1}) 上的一切运算都按 ε 的阶逐层剥离为域上的问题。
"""
import itertools
import logging
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

from eqdeform.algebra.groebner import Lifter, QuotientBasis, buchberger, is_regular_sequence, quotient_basis, to_sparse
from eqdeform.algebra.linalg import SpanBasis, solve
from eqdeform.algebra.polynomial import MonomialOrder, Polynomial, PolynomialRing
from eqdeform.config import settings
from eqdeform.services.ambient import (
    AffinePresentation, EquivariantAmbient, ambient_derivations, choose_ambient, normal_module,
    small_ambient, tangent_presentation,
)
from eqdeform.services.cohomology import (
    CohomologyClass, GModuleSlice, H1Result, check_cocycle, h1, invariant_derivation_basis,
    invariants, solve_coboundary,
)
from eqdeform.services.gaction import GroupAction, TwistedFreeModule, jacobian_twists
from eqdeform.utils.cache import cached
from eqdeform.utils.error_handler import DeformError, EXIT_INTERNAL, InputError, SliceError

logger = logging.getLogger(__name__)

Element = List[Polynomial]
EPS = 'eps'


@dataclass(frozen=True)
class ArtinianBase:
    """A_m = k[ε]/(ε^{m+1})"""
    order: int
    field: object

    def __post_init__(self):
        if self.order < 0:
            raise InputError("artinian order must be non-negative")

    def next(self) -> 'ArtinianBase':
        return ArtinianBase(self.order + 1, self.field)


@cached(key=lambda ring: ring)
def eps_ring(ring: PolynomialRing) -> PolynomialRing:
    """在变量表末尾追加 ε 的上下文, 仅用于渲染与解析"""
    if EPS in ring.names:
        raise InputError(f"variable name '{EPS}' is reserved")
    return PolynomialRing(ring.field, ring.names + (EPS,), MonomialOrder(ring.order.kind))


@dataclass(frozen=True)
class TruncatedSeries:
    """Σ_t ε^t·coefficients[t], 截断于 ε^{order+1}"""
    coefficients: Tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', tuple(self.coefficients))
        if not self.coefficients:
            raise InputError("a truncated series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def ring(self) -> PolynomialRing:
        return self.coefficients[0].ring

    @classmethod
    def constant(cls, f: Polynomial, order: int) -> 'TruncatedSeries':
        return cls((f,) + (f.ring.zero,) * order)

    @classmethod
    def from_eps_polynomial(cls, f: Polynomial, target: PolynomialRing, order: int) -> 'TruncatedSeries':
        """把含 eps 的多项式按 ε 的幂拆开, 高于 order 的项丢弃"""
        k = f.ring.index(EPS)
        parts = [dict() for _ in range(order + 1)]
        for e, c in f.terms.items():
            t = e[k]
            if t <= order:
                parts[t][e[:k] + e[k + 1:]] = c
        return cls(tuple(target.from_terms(p) for p in parts))

    def coefficient(self, t: int) -> Polynomial:
        return self.coefficients[t] if 0 <= t <= self.order else self.ring.zero

    def truncate(self, order: int) -> 'TruncatedSeries':
        return TruncatedSeries(self.coefficients[:order + 1])

    def pad(self, order: int) -> 'TruncatedSeries':
        """补零到给定阶 (系数逐项提升)"""
        extra = max(0, order - self.order)
        return TruncatedSeries(self.coefficients[:order + 1] + (self.ring.zero,) * extra)

    def __add__(self, other: 'TruncatedSeries') -> 'TruncatedSeries':
        n = min(self.order, other.order)
        return TruncatedSeries(tuple(self.coefficient(t) + other.coefficient(t) for t in range(n + 1)))

    def __sub__(self, other: 'TruncatedSeries') -> 'TruncatedSeries':
        n = min(self.order, other.order)
        return TruncatedSeries(tuple(self.coefficient(t) - other.coefficient(t) for t in range(n + 1)))

    def __neg__(self) -> 'TruncatedSeries':
        return TruncatedSeries(tuple(-c for c in self.coefficients))

    def __mul__(self, other) -> 'TruncatedSeries':
        if isinstance(other, Polynomial):
            return TruncatedSeries(tuple(c * other for c in self.coefficients))
        n = min(self.order, other.order)
        out = []
        for t in range(n + 1):
            acc = self.ring.zero
            for s in range(t + 1):
                a, b = self.coefficient(s), other.coefficient(t - s)
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            out.append(acc)
        return TruncatedSeries(tuple(out))

    def shifted(self, m: int, order: int) -> 'TruncatedSeries':
        """ε^m · self, 截断到 order"""
        zero = self.ring.zero
        coeffs = [zero] * m + list(self.coefficients)
        coeffs = coeffs[:order + 1] + [zero] * max(0, order + 1 - len(coeffs))
        return TruncatedSeries(tuple(coeffs))

    def act(self, g: GroupAction, s: int) -> 'TruncatedSeries':
        return TruncatedSeries(tuple(g.act(s, c) for c in self.coefficients))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def to_polynomial(self) -> Polynomial:
        ring = eps_ring(self.ring)
        eps = ring.gen(EPS)
        total = ring.zero
        for t, c in enumerate(self.coefficients):
            total = total + ring.rebase(c) * eps ** t
        return total

    def __str__(self):
        return str(self.to_polynomial())


def series_substitute(f: Polynomial, images: Sequence[TruncatedSeries], order: int) -> TruncatedSeries:
    """f(images) mod ε^{order+1}"""
    ring = images[0].ring
    powers = [{0: TruncatedSeries.constant(ring.one, order)} for _ in images]

    def power(i, k):
        if k not in powers[i]:
            powers[i][k] = power(i, k - 1) * images[i].pad(order)
        return powers[i][k]

    total = TruncatedSeries.constant(ring.zero, order)
    for e, c in f.terms.items():
        term = TruncatedSeries.constant(ring.from_terms({(0,) * ring.nvars: c}), order)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        total = total + term
    return total


@cached(key=lambda gens: gens)
def _lifter(gens: Tuple[Polynomial, ...]) -> Lifter:
    return Lifter.for_ideal(list(gens))


def peel_membership(target: TruncatedSeries, gens: Sequence[TruncatedSeries]) -> Optional[List[TruncatedSeries]]:
    """
    逐阶求 a 使 target = Σ a_l·F_l (mod ε^{order+1}); 不属于理想时返回 None。
    """
    order = target.order
    ring = target.ring
    if not gens:
        return [] if target.is_zero() else None
    lifter = _lifter(tuple(F.coefficient(0) for F in gens))
    a = [[ring.zero] * (order + 1) for _ in gens]
    for t in range(order + 1):
        residual = target.coefficient(t)
        for l, F in enumerate(gens):
            for s in range(t):
                if not a[l][s].is_zero():
                    residual = residual - a[l][s] * F.coefficient(t - s)
        cof = lifter.cofactors([residual])
        if cof is None:
            return None
        for l in range(len(gens)):
            a[l][t] = cof[l]
    return [TruncatedSeries(tuple(row)) for row in a]


@dataclass
class EquivarianceCertificate:
    """每个 σ: σ(F_j) = Σ_l T[j][l]·F_l 在 A_m 上精确成立"""
    matrices: List[List[List[TruncatedSeries]]]


class Deformation:
    def __init__(self, base: ArtinianBase, ambient: EquivariantAmbient, generators: Sequence[TruncatedSeries]):
        generators = [F.pad(base.order).truncate(base.order) for F in generators]
        if len(generators) != ambient.rank:
            raise InputError(f"deformation needs {ambient.rank} generators, got {len(generators)}")
        if any(F.ring is not ambient.ring for F in generators):
            raise InputError("deformation generators live outside the ambient ring")
        self.base = base
        self.ambient = ambient
        self.generators = generators
        self._certificate = None
        self._certified = False

    @property
    def order(self) -> int:
        return self.base.order

    @property
    def group(self) -> GroupAction:
        return self.ambient.group

    def certificate(self) -> Optional[EquivarianceCertificate]:
        """按 ε 阶剥离求 twist 矩阵; 非等变时为 None"""
        if not self._certified:
            matrices = []
            for s in self.group:
                rows = []
                for F in self.generators:
                    row = peel_membership(F.act(self.group, s), self.generators)
                    if row is None:
                        matrices = None
                        break
                    rows.append(row)
                if matrices is None:
                    break
                matrices.append(rows)
            self._certificate = EquivarianceCertificate(matrices) if matrices is not None else None
            self._certified = True
        return self._certificate

    def is_equivariant(self) -> bool:
        return self.certificate() is not None

    def reduce(self, order: int) -> 'Deformation':
        return Deformation(ArtinianBase(order, self.base.field), self.ambient,
                           [F.truncate(order) for F in self.generators])

    def render(self) -> List[str]:
        return [str(F) for F in self.generators]

    def __eq__(self, other):
        return (isinstance(other, Deformation) and other.ambient is self.ambient
                and other.order == self.order and other.generators == self.generators)


def trivial_deformation(amb: EquivariantAmbient, order: int = 0) -> Deformation:
    base = ArtinianBase(order, amb.ring.field)
    return Deformation(base, amb, [TruncatedSeries.constant(f, order) for f in amb.presentation.gens])


def deformation_from_base(amb: EquivariantAmbient, order: int, series: Sequence[TruncatedSeries]) -> Deformation:
    """原环上给出的提升; 正则表示环境下改写到 X_{·,e} 并保留线性生成元"""
    base = ArtinianBase(order, amb.ring.field)
    if amb.kind == 'small':
        return Deformation(base, amb, series)
    big = amb.ring
    identity_vars = [big.gen(f"{name}_0") for name in amb.base.ring.names]
    lifted = [TruncatedSeries(tuple(c.substitute(identity_vars, big) for c in F.pad(order).coefficients))
              for F in series]
    extra = [TruncatedSeries.constant(f, order) for f in amb.presentation.gens[len(series):]]
    return Deformation(base, amb, lifted + extra)


@dataclass
class DeformationCertificate:
    reduction: bool
    equivariance: bool
    regular: bool
    failures: List[str] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.reduction and self.equivariance and self.regular


def verify_deformation(d: Deformation) -> DeformationCertificate:
    """(a) 模 ε 还原为基表示 (b) 逐 σ 等变除法 (c) 模 ε 的正则序列证书"""
    failures = []
    base_gens = d.ambient.presentation.gens
    reduction = [F.coefficient(0) for F in d.generators] == list(base_gens)
    if not reduction:
        failures.append("reduction mod eps does not recover the base generators")
    equivariance = d.is_equivariant()
    if not equivariance:
        failures.append("generators are not carried into the ideal by every group element")
    reduced = [F.coefficient(0) for F in d.generators]
    if reduced:
        regular = is_regular_sequence(reduced).regular if all(not f.is_zero() for f in reduced) else False
    else:
        regular = True
    if not regular:
        failures.append("reduction mod eps is not a regular sequence")
    return DeformationCertificate(reduction, equivariance, regular, failures)


def same_ideal(d1: Deformation, d2: Deformation) -> bool:
    """A_m 上的相互包含"""
    if d1.ambient is not d2.ambient or d1.order != d2.order:
        return False
    return (all(peel_membership(F, d2.generators) is not None for F in d1.generators)
            and all(peel_membership(F, d1.generators) is not None for F in d2.generators))


# 差类 ν

@dataclass
class NuClass:
    values: Element
    raw: Element
    order: int
    invariant: bool = True

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)


def _check_pair(d1: Deformation, d2: Deformation):
    if d1.ambient is not d2.ambient:
        raise InputError("deformations live over different ambients")
    if d1.order != d2.order:
        raise InputError("deformations live over different artinian bases")


def nu_class(d1: Deformation, d2: Deformation) -> NuClass:
    """F_j* ↦ (F_j¹ − F_j²)/ε^m mod I, 要求二者模 ε^m 逐系数一致"""
    _check_pair(d1, d2)
    m = d1.order
    for F1, F2 in zip(d1.generators, d2.generators):
        for t in range(m):
            if F1.coefficient(t) != F2.coefficient(t):
                raise InputError(f"lifts do not agree mod eps^{m}")
    amb = d1.ambient
    raw = [F1.coefficient(m) - F2.coefficient(m) for F1, F2 in zip(d1.generators, d2.generators)]
    values = [amb.presentation.normal_form(v) for v in raw]
    module = normal_module(amb.base, amb.base_group, amb)
    invariant = all(module.act(s, values) == module.reduce(values) for s in amb.group)
    if not invariant:
        logger.warning("difference class is not invariant; one of the lifts is not equivariant")
    return NuClass(values, raw, m, invariant)


def apply_nu(d: Deformation, nu) -> Deformation:
    """F_j − ε^m·ν_j"""
    values = nu.values if isinstance(nu, NuClass) else list(nu)
    m = d.order
    gens = []
    for F, v in zip(d.generators, values):
        coeffs = list(F.coefficients)
        coeffs[m] = coeffs[m] - v
        gens.append(TruncatedSeries(tuple(coeffs)))
    return Deformation(d.base, d.ambient, gens)


# 同构见证 μ

@dataclass
class DerivationWitness:
    components: Element
    exact: bool

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


def _weight(values: Element, shifts: Sequence[int]) -> int:
    return max([v.degree() + s for v, s in zip(values, shifts) if not v.is_zero()] + [0])


def _search_witness(amb: EquivariantAmbient, module: TwistedFreeModule, target: Element,
                    degree: int, exact: bool) -> Optional[Element]:
    """在导子分片上解 J·D = target, 且 D 不变; 低权重未知量优先"""
    m = GModuleSlice.build(module, degree)
    field = m.field
    n = m.dimension
    big = amb.presentation
    jac = big.jacobian()
    images = []
    for key in m.keys:
        unit = m.unit(key)
        out = []
        for row in jac:
            acc = big.ring.zero
            for entry, x in zip(row, unit):
                if not entry.is_zero() and not x.is_zero():
                    acc = acc + entry * x
            out.append(acc if exact else big.normal_form(acc))
        images.append(to_sparse(out))
    target_sparse = to_sparse(target if exact else [big.normal_form(v) for v in target])
    terms = sorted({t for img in images for t in img} | set(target_sparse))
    rows = [[img.get(t, field.zero) for img in images] for t in terms]
    rhs = [target_sparse.get(t, field.zero) for t in terms]
    for s in m.group:
        A = m.actions[s]
        for i in range(n):
            rows.append([field.sub(A[i][j], field.one) if i == j else A[i][j] for j in range(n)])
            rhs.append(field.zero)
    x = solve(rows, rhs, field, n)
    return None if x is None else m.element(x)


def iso_witness(d1: Deformation, d2: Deformation, trunc: int = None, slack: int = None) -> Optional[DerivationWitness]:
    """
    不变导子 D 使 J·D ≡ −ν(d1, d2); x ↦ x + ε^m D 把 d1 变为 d2。
    先在环境环中精确求解, 再模 I 求解; 分片内不存在时返回 None。
    """
    nu = nu_class(d1, d2)
    amb = d1.ambient
    ring = amb.ring
    if all(v.is_zero() for v in nu.raw):
        return DerivationWitness([ring.zero] * ring.nvars, True)
    slack = settings.slice_slack if slack is None else slack
    trunc = default_truncation(amb) if trunc is None else trunc
    target = [-v for v in nu.raw]
    derivation_module = ambient_derivations(amb)
    degree = max(trunc, _weight(target, normal_shifts(amb))) + slack

    free = TwistedFreeModule('derivations', amb.group, buchberger([ring.zero]),
                             jacobian_twists(amb.group), derivation_module.shifts)
    try:
        found = _search_witness(amb, free, target, degree, exact=True)
    except SliceError as error:
        logger.warning(f"exact witness search skipped: {error.message}")
        found = None
    if found is not None:
        return DerivationWitness(found, True)
    if nu.is_zero():
        return DerivationWitness([ring.zero] * ring.nvars, False)
    found = _search_witness(amb, derivation_module, target, degree, exact=False)
    return None if found is None else DerivationWitness(found, False)


@dataclass
class Automorphism:
    forward: List[TruncatedSeries]
    inverse: List[TruncatedSeries]
    order: int

    def apply(self, F: TruncatedSeries) -> TruncatedSeries:
        total = TruncatedSeries.constant(F.ring.zero, self.order)
        for t, c in enumerate(F.pad(self.order).coefficients):
            total = total + series_substitute(c, self.forward, self.order).shifted(t, self.order)
        return total


def realize_isomorphism(d: Deformation, witness: DerivationWitness) -> Tuple[Automorphism, Deformation]:
    """x ↦ x + ε^m D, 并验证 x ↦ x − ε^m D 是其逆"""
    m = d.order
    if m < 1:
        raise InputError("isomorphisms are realized over bases of order at least 1")
    ring = d.ambient.ring
    forward, inverse = [], []
    for i, D in enumerate(witness.components):
        x = TruncatedSeries.constant(ring.gen(i), m)
        step = TruncatedSeries.constant(D, m).shifted(m, m)
        forward.append(x + step)
        inverse.append(x - step)
    for i in range(ring.nvars):
        back = series_substitute(inverse[i].coefficient(0), forward, m)
        for t in range(1, m + 1):
            back = back + series_substitute(inverse[i].coefficient(t), forward, m).shifted(t, m)
        if back != TruncatedSeries.constant(ring.gen(i), m):
            raise DeformError("substitution inverse failed verification", exit_code=EXIT_INTERNAL)
    auto = Automorphism(forward, inverse, m)
    return auto, Deformation(d.base, d.ambient, [auto.apply(F) for F in d.generators])


def automorphism_flows(p: AffinePresentation, g: GroupAction, trunc: int = None) -> List[Automorphism]:
    """T⁰_G 基对应的一阶自同构 x ↦ x + εD"""
    amb = small_ambient(p, g)
    trunc = default_truncation(amb) if trunc is None else trunc
    d = trivial_deformation(amb, 1)
    flows = []
    for D in invariant_derivation_basis(amb, trunc):
        auto, _ = realize_isomorphism(d, DerivationWitness(D, False))
        flows.append(auto)
    return flows


# ω 余圈与提升

def normal_shifts(amb: EquivariantAmbient) -> List[int]:
    top = amb.presentation.max_degree
    return [top - f.degree() for f in amb.presentation.gens]


def default_truncation(amb: EquivariantAmbient) -> int:
    return 2 * amb.base.max_degree


def omega_cocycle(d: Deformation, lifted: Sequence[TruncatedSeries]) -> CohomologyClass:
    """
    ω(σ)_j = coef_{m+1}[Σ_l σ(T_{σ⁻¹}[j][l])·σ(F̃_l) − F̃_j] mod I,
    T 取 d 的等变证书; 低阶系数精确为零。
    """
    m = d.order
    lifted = [F.pad(m + 1).truncate(m + 1) for F in lifted]
    if len(lifted) != len(d.generators) or any(F.truncate(m) != G for F, G in zip(lifted, d.generators)):
        raise InputError("the given generators do not lift the deformation")
    certificate = d.certificate()
    if certificate is None:
        raise InputError("the deformation being lifted is not equivariant")
    g = d.group
    amb = d.ambient
    values = []
    for s in g:
        back = certificate.matrices[g.inv(s)]
        moved = [F.act(g, s) for F in lifted]
        row = []
        for j, F in enumerate(lifted):
            total = -F
            for l, M in enumerate(moved):
                coeff = back[j][l].act(g, s).pad(m + 1)
                total = total + coeff * M
            for t in range(m + 1):
                if not total.coefficient(t).is_zero():
                    raise DeformError("omega has nonzero lower coefficients", exit_code=EXIT_INTERNAL)
            row.append(amb.presentation.normal_form(total.coefficient(m + 1)))
        values.append(row)
    return CohomologyClass(1, values)


@dataclass
class LiftOutcome:
    deformation: Optional[Deformation]
    obstruction: Optional[CohomologyClass] = None
    cohomology: Optional[H1Result] = None
    certified: str = 'exact'

    @property
    def obstructed(self) -> bool:
        return self.deformation is None


def equivariantize(d: Deformation, lifted: Sequence[TruncatedSeries], trunc: int = None,
                   slack: int = None) -> LiftOutcome:
    """ω = ∂φ 时返回 F̃ − ε^{m+1}φ, 否则返回 ω 作为障碍类"""
    amb = d.ambient
    m = d.order
    c = omega_cocycle(d, lifted)
    module = normal_module(amb.base, amb.base_group, amb)
    lifted = [F.pad(m + 1).truncate(m + 1) for F in lifted]
    base = d.base.next()
    if c.is_zero():
        return LiftOutcome(Deformation(base, amb, lifted))
    slack = settings.slice_slack if slack is None else slack
    trunc = default_truncation(amb) if trunc is None else trunc
    degree = max(trunc, max(_weight(v, module.shifts) for v in c.values))
    m_slice = None if d.group.is_tame() else GModuleSlice.build(module, degree + slack)
    phi = solve_coboundary(c, m_slice if m_slice is not None else module)
    if phi is not None:
        corrected = [F - TruncatedSeries.constant(v, m + 1).shifted(m + 1, m + 1) for F, v in zip(lifted, phi)]
        result = Deformation(base, amb, corrected)
        if not result.is_equivariant():
            raise DeformError("corrected lift failed the equivariance check", exit_code=EXIT_INTERNAL)
        return LiftOutcome(result)
    small = GModuleSlice.build(module, degree)
    result = h1(small, GModuleSlice.build(module, degree + slack))
    logger.info(f"lift from order {m} obstructed at degree {degree}")
    return LiftOutcome(None, c, result, result.certified)


def lift_step(d: Deformation, trunc: int = None, slack: int = None) -> LiftOutcome:
    """逐系数补零得到一个 (非等变) 提升, 再等变化"""
    lifted = [F.pad(d.order + 1) for F in d.generators]
    return equivariantize(d, lifted, trunc, slack)


def lift_to_order(d: Deformation, order: int, trunc: int = None, slack: int = None) -> LiftOutcome:
    outcome = LiftOutcome(d)
    while outcome.deformation is not None and outcome.deformation.order < order:
        outcome = lift_step(outcome.deformation, trunc, slack)
    return outcome


def enumerate_lifts(lift: Deformation, basis: Sequence[Element], limit: int = None) -> List[Deformation]:
    """
    在 T¹_G 基上枚举 apply_nu(lift, ν): ℚ 上系数取 0/1, F_p 上取全部剩余类
    """
    limit = settings.enumeration_limit if limit is None else limit
    field = lift.ambient.ring.field
    values = [field.convert(v) for v in (range(field.characteristic) if field.characteristic else (0, 1))]
    out = []
    for combo in itertools.product(values, repeat=len(basis)):
        combo = tuple(reversed(combo))
        nu = [lift.ambient.ring.zero] * lift.ambient.rank
        for coeff, vec in zip(combo, basis):
            nu = [a + b.scale(coeff) for a, b in zip(nu, vec)]
        out.append(apply_nu(lift, nu))
        if len(out) >= limit:
            logger.warning(f"lift enumeration truncated at {limit}")
            break
    return out


# 切空间与障碍空间

@dataclass
class TangentSpaces:
    t0_equivariant: List[Element]
    t1: QuotientBasis
    t1_equivariant: List[Element]
    certified: str
    degree: int

    @property
    def t1_dimension(self) -> Optional[int]:
        return self.t1.dimension if self.t1.finite else None

    @property
    def t1_equivariant_dimension(self) -> int:
        return len(self.t1_equivariant)


def _invariant_t1_finite(amb: EquivariantAmbient) -> Optional[List[Element]]:
    presentation = tangent_presentation(amb)
    basis = quotient_basis(presentation, trunc=0)
    if not basis.finite:
        return None
    module = normal_module(amb.base, amb.base_group, amb)
    m = GModuleSlice.from_quotient(module, presentation, basis)
    return [m.element(v) for v in invariants(m)]


def _invariant_t1_sliced(amb: EquivariantAmbient, degree: int, slack: int) -> List[Element]:
    """coker(Der_P^G → N^G) 在分片上的代表元"""
    module = normal_module(amb.base, amb.base_group, amb)
    n_small = GModuleSlice.build(module, degree)
    n_big = GModuleSlice.build(module, degree + slack)
    der = GModuleSlice.build(ambient_derivations(amb), degree + slack)
    big = amb.presentation
    jac = big.jacobian()
    field = n_big.field
    image = SpanBasis(field, n_big.dimension)
    for v in invariants(der):
        D = der.element(v)
        JD = []
        for row in jac:
            acc = big.ring.zero
            for entry, x in zip(row, D):
                if not entry.is_zero() and not x.is_zero():
                    acc = acc + entry * x
            JD.append(acc)
        image.add(n_big.vector(JD))
    reps = []
    for v in invariants(n_small):
        element = n_small.element(v)
        if image.add(n_big.vector(element)):
            reps.append(element)
    return reps


def tangent_spaces(p: AffinePresentation, g: GroupAction, amb: EquivariantAmbient = None,
                   trunc: int = None, slack: int = None) -> TangentSpaces:
    """
    T⁰_G = 不变导子; T¹ = coker(Jacobian + I·B^c → B^c); T¹_G 驯顺时取 T¹ 的不变部分,
    野的情形经由正合列计算。
    """
    amb = choose_ambient(p, g) if amb is None else amb
    small = small_ambient(p, g) if amb.kind != 'small' else amb
    trunc = default_truncation(amb) if trunc is None else trunc
    slack = settings.slice_slack if slack is None else slack
    t0 = invariant_derivation_basis(small, trunc)
    t1 = quotient_basis(tangent_presentation(small), trunc=trunc)
    if not t1.finite:
        logger.warning(f"T1 is infinite-dimensional; reporting standard monomials up to degree {trunc}")
    certified = 'exact'
    reps = _invariant_t1_finite(amb) if g.is_tame() else None
    if reps is None:
        reps = _invariant_t1_sliced(amb, trunc, slack)
        certified = 'exact' if g.is_tame() else f'slice:{trunc}'
    return TangentSpaces(t0, t1, reps, certified, trunc)


@dataclass
class ObstructionSpace:
    dimension: int
    representatives: List[CohomologyClass]
    certified: str
    degree: Optional[int]
    cohomology: Optional[H1Result] = None


def obstruction_space(p: AffinePresentation, g: GroupAction, amb: EquivariantAmbient = None,
                      trunc: int = None, slack: int = None) -> ObstructionSpace:
    """H¹(G, N) 在分片上计算; 驯顺特征时精确为 0"""
    amb = choose_ambient(p, g) if amb is None else amb
    trunc = default_truncation(amb) if trunc is None else trunc
    if g.is_tame():
        return ObstructionSpace(0, [], 'exact', trunc)
    slack = settings.slice_slack if slack is None else slack
    module = normal_module(p, g, amb)
    result = h1(GModuleSlice.build(module, trunc), GModuleSlice.build(module, trunc + slack))
    for rep in result.representatives:
        if not check_cocycle(rep, module):
            raise DeformError("H1 representative violates the cocycle identity", exit_code=EXIT_INTERNAL)
    return ObstructionSpace(result.dimension, result.representatives, result.certified, trunc, result)
