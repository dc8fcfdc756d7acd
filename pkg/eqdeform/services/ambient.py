"""
等变环境嵌入与三个基本模: Ω 的 Kähler 表示、导子模 Hom(Ω,B)、法模 Hom(I/I²,B)。
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from eqdeform.algebra.groebner import (
    FreeModuleElement, GroebnerBasis, ModulePresentation, RegularSequenceCertificate,
    buchberger, is_regular_sequence, module_kernel,
)
from eqdeform.algebra.polynomial import MonomialOrder, Polynomial, PolynomialRing, substitute
from eqdeform.utils.error_handler import InputError
from eqdeform.services.gaction import (
    GroupAction, Substitution, TwistedFreeModule, jacobian_twists, twist_matrices,
    verify_stability,
)

logger = logging.getLogger(__name__)

AMBIENT_PATHS = ('auto', 'small', 'regular')


@dataclass
class AffinePresentation:
    """B = k[x_1..x_n]/(f_1..f_c), 附完全交证书"""
    ring: PolynomialRing
    gens: List[Polynomial]
    gb: GroebnerBasis
    certificate: RegularSequenceCertificate

    @property
    def field(self):
        return self.ring.field

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    @property
    def codim(self) -> int:
        return len(self.gens)

    @property
    def max_degree(self) -> int:
        return max([f.degree() for f in self.gens] + [1])

    def jacobian(self) -> List[List[Polynomial]]:
        """行对应 f_j, 列对应变量"""
        return [[f.derivative(k) for k in range(self.nvars)] for f in self.gens]

    def normal_form(self, f: Polynomial) -> Polynomial:
        return self.gb.normal_form(f)


def build_presentation(ring: PolynomialRing, gens: Sequence[Polynomial]) -> AffinePresentation:
    """检查 f_1..f_c 构成正则序列, 否则报输入错误"""
    gens = [f for f in gens]
    if any(f.is_zero() for f in gens):
        raise InputError("ideal generators must be nonzero")
    if gens:
        gb = buchberger(gens)
        certificate = is_regular_sequence(gens)
    else:
        gb = buchberger([ring.zero])
        certificate = RegularSequenceCertificate(True, ring.nvars, ring.nvars)
    if not certificate.regular:
        raise InputError(
            f"not a complete intersection: dimension {certificate.dimension}, expected {certificate.expected}"
        )
    return AffinePresentation(ring, gens, gb, certificate)


def kaehler_presentation(p: AffinePresentation) -> ModulePresentation:
    """Ω_B = B^n (对偶基 dx_i) 模去 c 个 Jacobian 列"""
    relations = [FreeModuleElement(tuple(row)) for row in p.jacobian()]
    return ModulePresentation(p.nvars, relations, p.gb)


@dataclass
class EquivariantAmbient:
    kind: str
    presentation: AffinePresentation
    group: GroupAction
    base: AffinePresentation
    base_group: GroupAction
    evaluation: List[Polynomial]

    @property
    def ring(self) -> PolynomialRing:
        return self.presentation.ring

    @property
    def rank(self) -> int:
        return self.presentation.codim

    def describe(self) -> dict:
        return {
            'kind': self.kind,
            'variables': list(self.ring.names),
            'generators': [str(f) for f in self.presentation.gens],
            'dimension': self.presentation.certificate.dimension,
        }


def small_ambient(p: AffinePresentation, g: GroupAction) -> EquivariantAmbient:
    if not verify_stability(p.gb, g, p.gens):
        raise InputError("the group does not preserve the ideal")
    return EquivariantAmbient('small', p, g, p, g, p.ring.gens())


def _regular_names(p: AffinePresentation, g: GroupAction) -> List[str]:
    # 非单位元的变量在前, 单位元变量在最后 (grevlex 下最小)
    names = []
    for s in list(range(1, g.order)) + [0]:
        names.extend(f"{x}_{s}" for x in p.ring.names)
    taken = set(p.ring.names)
    if taken & set(names):
        raise InputError("regular-representation variable names clash with the declared variables")
    return names


def regular_rep_embedding(p: AffinePresentation, g: GroupAction) -> EquivariantAmbient:
    """
    大环 k[X_{i,σ}], φ′(X_{i,σ}) = σ(x_i); 生成元为 f_j(X_{·,e}) 与 X_{i,σ} − s_{i,σ}(X_{·,e})。
    ρ 的作用 X_{i,τ} ↦ X_{i,ρτ}。
    """
    if not verify_stability(p.gb, g, p.gens):
        raise InputError("the group does not preserve the ideal")
    n = p.nvars
    names = _regular_names(p, g)
    big = PolynomialRing(p.field, names, MonomialOrder(p.ring.order.kind))

    def var(i: int, s: int) -> Polynomial:
        return big.gen(f"{p.ring.names[i]}_{s}")

    identity_vars = [var(i, 0) for i in range(n)]

    def lift(f: Polynomial) -> Polynomial:
        return substitute(f, identity_vars, big)

    gens = [lift(f) for f in p.gens]
    for s in range(1, g.order):
        for i in range(n):
            s_rep = p.normal_form(g.act(s, p.ring.gen(i)))
            gens.append(var(i, s) - lift(s_rep))

    elements = []
    for r in g:
        images = [None] * big.nvars
        for s in g:
            for i in range(n):
                images[big.index(f"{p.ring.names[i]}_{s}")] = var(i, g.mul(r, s))
        elements.append(Substitution(big, images, g.elements[r].label))
    big_group = GroupAction(big, elements, [list(row) for row in g.table])

    evaluation = []
    for name in names:
        base_name, s = name.rsplit('_', 1)
        evaluation.append(p.normal_form(g.act(int(s), p.ring.gen(base_name))))

    presentation = build_presentation(big, gens)
    logger.info(f"regular-representation ambient with {big.nvars} variables and {len(gens)} generators")
    return EquivariantAmbient('regular', presentation, big_group, p, g, evaluation)


def choose_ambient(p: AffinePresentation, g: GroupAction, path: str = 'auto') -> EquivariantAmbient:
    """
    auto: 驯顺时用原环境; 野的情形若作用自由地置换坐标也用原环境, 否则用正则表示嵌入。

    自由置换时坐标分成大小为 |G| 的轨道, 导子模 B^N 是从平凡子群诱导的模,
    其正次数群上同调为 0; 这正是正则表示嵌入要保证的性质, 所以原环境已经足够。
    """
    if path not in AMBIENT_PATHS:
        raise InputError(f"unknown ambient path '{path}'")
    if path == 'small':
        return small_ambient(p, g)
    if path == 'regular':
        return regular_rep_embedding(p, g)
    if g.is_tame() or g.permutes_coordinates_freely():
        return small_ambient(p, g)
    return regular_rep_embedding(p, g)


def normal_module(p: AffinePresentation, g: GroupAction, amb: EquivariantAmbient) -> TwistedFreeModule:
    """Hom(I/I², B) ≅ B^C, 扭作用来自环境生成元的 twist 矩阵"""
    if amb.base is not p or amb.base_group is not g:
        raise InputError("ambient was not built from this presentation and group")
    big = amb.presentation
    twist = twist_matrices(big.gens, amb.group, big.gb)
    top = big.max_degree
    shifts = [top - f.degree() for f in big.gens]
    return TwistedFreeModule('normal', amb.group, big.gb, twist.matrices, shifts)


def ambient_derivations(amb: EquivariantAmbient) -> TwistedFreeModule:
    """Hom(Ω_P|_B, B) ≅ B^N, M_σ[i][k] = ∂σ(x_i)/∂x_k"""
    big = amb.presentation
    shift = big.max_degree - 1
    return TwistedFreeModule('derivations', amb.group, big.gb, jacobian_twists(amb.group), [shift] * big.nvars)


def jacobian_map(amb: EquivariantAmbient, d: Sequence[Polynomial]) -> List[Polynomial]:
    """D ↦ J·D mod I"""
    big = amb.presentation
    out = []
    for row in big.jacobian():
        acc = big.ring.zero
        for entry, x in zip(row, d):
            if not entry.is_zero() and not x.is_zero():
                acc = acc + entry * x
        out.append(big.normal_form(acc))
    return out


def tangent_presentation(amb: EquivariantAmbient) -> ModulePresentation:
    """T¹ = N / (Jacobian 列 + I·N)"""
    big = amb.presentation
    jac = big.jacobian()
    relations = [FreeModuleElement(tuple(jac[j][k] for j in range(big.codim))) for k in range(big.nvars)]
    return ModulePresentation(big.codim, relations, big.gb)


@dataclass
class DerivationModule:
    generators: List[FreeModuleElement]
    invariant: List[FreeModuleElement]
    degree: Optional[int]


def derivations(p: AffinePresentation, g: GroupAction, degree: int = None, method: str = 'auto') -> DerivationModule:
    """
    Hom(Ω,B) = ker(J: B^n → B^c); 不变部分在权重 ≤ degree 的分片上计算
    (驯顺用 Reynolds 投影, 野的情形用线性求解)。
    """
    from eqdeform.services.cohomology import invariant_derivation_basis

    generators = module_kernel(p.jacobian(), p.gb) if p.codim else [
        FreeModuleElement(tuple(p.ring.one if k == i else p.ring.zero for k in range(p.nvars)))
        for i in range(p.nvars)
    ]
    if degree is None:
        degree = 2 * p.max_degree
    amb = small_ambient(p, g)
    invariant = invariant_derivation_basis(amb, degree, method)
    return DerivationModule(generators, [FreeModuleElement(tuple(v)) for v in invariant], degree)
