import itertools
import random
import unittest

from eqdeform.algebra.polynomial import MonomialOrder, PolynomialRing
from eqdeform.algebra.scalar import GF, QQ
from eqdeform.services.ambient import (
    build_presentation, jacobian_map, normal_module, regular_rep_embedding, small_ambient,
)
from eqdeform.services.cohomology import CohomologyClass, check_cocycle, invariant_derivation_basis, solve_coboundary
from eqdeform.services.deform import (
    Deformation, DerivationWitness, TruncatedSeries, apply_nu, automorphism_flows, deformation_from_base,
    enumerate_lifts, eps_ring, iso_witness, lift_step, lift_to_order, nu_class, omega_cocycle, realize_isomorphism,
    same_ideal, tangent_spaces, trivial_deformation, verify_deformation,
)
from eqdeform.services.gaction import Substitution, close_group, reynolds
from eqdeform.utils.error_handler import InputError

from oracles import monomials_up_to


def cusp():
    R = PolynomialRing(QQ, ['x', 'y'])
    x, y = R.gens()
    p = build_presentation(R, [y ** 2 - x ** 3])
    g = close_group([Substitution.from_mapping(R, {'y': -y}, 's')])
    return p, g


def node(field):
    R = PolynomialRing(field, ['x', 'y'])
    x, y = R.gens()
    p = build_presentation(R, [x * y])
    g = close_group([Substitution.from_mapping(R, {'x': y, 'y': x}, 's')])
    return p, g


def a2():
    R = PolynomialRing(GF(3), ['x', 'y', 'z'])
    x, y, z = R.gens()
    p = build_presentation(R, [x * y - z ** 3])
    g = close_group([Substitution.from_mapping(R, {'x': y, 'y': x}, 's')])
    return p, g


def random_polynomial(ring, rng, degree=3):
    total = ring.zero
    for e in monomials_up_to(ring.nvars, degree):
        total = total + ring.monomial(e, rng.randint(-3, 3))
    return total


def series(*coefficients):
    return TruncatedSeries(tuple(coefficients))


class TangentSpaceTest(unittest.TestCase):
    def test_cusp_tangent_spaces(self):
        """
        测试尖点: T1 = {1, x}, 两者都不变
        """
        p, g = cusp()
        spaces = tangent_spaces(p, g)
        self.assertTrue(spaces.t1.finite)
        self.assertEqual(spaces.t1.keys, [(0, (0, 0)), (0, (1, 0))])
        self.assertEqual(spaces.t1_dimension, 2)
        self.assertEqual(spaces.t1_equivariant_dimension, 2)
        self.assertEqual(spaces.certified, 'exact')

    def test_cusp_euler_field_is_invariant(self):
        """
        测试 Euler 导子 (2x, 3y) 位于不变导子中
        """
        p, g = cusp()
        spaces = tangent_spaces(p, g)
        self.assertTrue(spaces.t0_equivariant)
        amb = small_ambient(p, g)
        for D in spaces.t0_equivariant:
            self.assertTrue(all(p.normal_form(v).is_zero() for v in jacobian_map(amb, D)))

    def test_node_tangent_spaces(self):
        """
        测试有理数域上的结点: T1 = {1}
        """
        p, g = node(QQ)
        spaces = tangent_spaces(p, g)
        self.assertEqual(spaces.t1_dimension, 1)
        self.assertEqual(spaces.t1_equivariant_dimension, 1)

    def test_ambient_independence(self):
        """
        测试驯顺情形下原环境与正则表示环境给出相同的 T1_G 维数
        """
        for p, g in (cusp(), node(QQ)):
            small = tangent_spaces(p, g, small_ambient(p, g))
            regular = tangent_spaces(p, g, regular_rep_embedding(p, g))
            self.assertEqual(small.t1_equivariant_dimension, regular.t1_equivariant_dimension)


class LiftTest(unittest.TestCase):
    def test_node_lifts_without_obstruction(self):
        """
        测试驯顺结点可以提升到 3 阶, 且每一阶都通过验证
        """
        p, g = node(QQ)
        amb = small_ambient(p, g)
        outcome = lift_to_order(trivial_deformation(amb, 0), 3)
        self.assertFalse(outcome.obstructed)
        self.assertEqual(outcome.deformation.order, 3)
        self.assertTrue(verify_deformation(outcome.deformation).ok)

    def test_non_equivariant_lift_is_rejected(self):
        """
        测试 y^2 - x^3 + eps*y 在 y -> -y 下不等变
        """
        p, g = cusp()
        amb = small_ambient(p, g)
        y = p.ring.gen("y")
        d = deformation_from_base(amb, 1, [series(p.gens[0], y)])
        certificate = verify_deformation(d)
        self.assertTrue(certificate.reduction)
        self.assertFalse(certificate.equivariance)
        self.assertFalse(certificate.ok)
        with self.assertRaises(InputError):
            lift_step(d)

    def test_translation_lifts_in_regular_ambient(self):
        """
        测试 F_2 上的平移作用经正则表示嵌入后可以提升到 3 阶
        """
        R = PolynomialRing(GF(2), ['x'])
        x, = R.gens()
        p = build_presentation(R, [])
        g = close_group([Substitution.from_mapping(R, {'x': x + 1}, 't')])
        amb = regular_rep_embedding(p, g)
        outcome = lift_to_order(trivial_deformation(amb, 0), 3)
        self.assertFalse(outcome.obstructed)
        self.assertTrue(verify_deformation(outcome.deformation).ok)


class WildNodeEnumerationTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.p, self.g = node(GF(2))
        self.amb = small_ambient(self.p, self.g)
        self.lift = lift_step(trivial_deformation(self.amb, 0)).deformation
        basis = tangent_spaces(self.p, self.g, self.amb).t1_equivariant
        self.lifts = enumerate_lifts(self.lift, basis)

    def test_pipeline_lifts(self):
        """
        测试 T1_G = 1 时一阶提升枚举出两个互不同构的形变
        """
        self.assertEqual(len(self.lifts), 2)
        for d in self.lifts:
            self.assertTrue(verify_deformation(d).ok)
        self.assertIsNone(iso_witness(self.lifts[0], self.lifts[1]))

    def test_exhaustive_lifts_match(self):
        """
        测试穷举 xy + eps*g (deg g <= 2): 8 个等变理想, 分成 2 个同构类
        """
        R = self.p.ring
        monomials = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        found = []
        for bits in itertools.product((0, 1), repeat=len(monomials)):
            h = R.zero
            for bit, e in zip(bits, monomials):
                if bit:
                    h = h + R.monomial(e)
            d = deformation_from_base(self.amb, 1, [series(self.p.gens[0], h)])
            if not d.is_equivariant():
                continue
            if not any(same_ideal(d, other) for other in found):
                found.append(d)
        self.assertEqual(len(found), 8)

        classes = [[], []]
        for d in found:
            matches = [i for i, rep in enumerate(self.lifts) if iso_witness(rep, d) is not None]
            self.assertEqual(len(matches), 1)
            classes[matches[0]].append(d)
        self.assertEqual([len(c) for c in classes], [4, 4])


class TernaryNodeEnumerationTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.p, self.g = node(GF(3))
        self.amb = small_ambient(self.p, self.g)
        self.lift = lift_step(trivial_deformation(self.amb, 0)).deformation
        basis = tangent_spaces(self.p, self.g, self.amb).t1_equivariant
        self.lifts = enumerate_lifts(self.lift, basis)

    def test_pipeline_lifts(self):
        """
        测试 F_3 上 T1_G = 1, 枚举出三个两两不同构的提升
        """
        self.assertEqual(len(self.lifts), 3)
        for d in self.lifts:
            self.assertTrue(verify_deformation(d).ok)
        for a, b in itertools.combinations(self.lifts, 2):
            self.assertIsNone(iso_witness(a, b))

    def test_exhaustive_lifts_match(self):
        """
        测试穷举 xy + eps*(a + b*x + c*y), 系数取遍 F_3: 9 个等变理想, 分成 3 个同构类
        """
        R = self.p.ring
        x, y = R.gens()
        found = []
        for a, b, c in itertools.product(range(3), repeat=3):
            h = R.constant(a) + x.scale(b) + y.scale(c)
            d = deformation_from_base(self.amb, 1, [series(self.p.gens[0], h)])
            if not d.is_equivariant():
                self.assertNotEqual(b, c)
                continue
            self.assertEqual(b, c)
            if not any(same_ideal(d, other) for other in found):
                found.append(d)
        self.assertEqual(len(found), 9)

        classes = [[] for _ in self.lifts]
        for d in found:
            matches = [i for i, rep in enumerate(self.lifts) if iso_witness(rep, d) is not None]
            self.assertEqual(len(matches), 1)
            classes[matches[0]].append(d)
        self.assertEqual([len(c) for c in classes], [3, 3, 3])


class TorsorPropertyTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.rng = random.Random(20240611)
        self.cases = []
        for p, g in (cusp(), node(QQ), node(GF(3)), a2()):
            amb = small_ambient(p, g)
            lift = lift_step(trivial_deformation(amb, 0)).deformation
            self.cases.append((p, g, amb, lift))

    def random_derivation(self, basis, ring):
        D = [ring.zero] * ring.nvars
        for vec in basis:
            c = self.rng.randint(-2, 2)
            D = [a + b.scale(c) for a, b in zip(D, vec)]
        return D

    def test_nu_torsor(self):
        """
        测试差类: ν(d, d) = 0, 可加性, apply_nu 与 nu_class 互逆 (四个例子共 100 组)
        """
        count = 0
        for p, g, amb, d1 in self.cases:
            self.assertTrue(nu_class(d1, d1).is_zero())
            for _ in range(25):
                v = reynolds(random_polynomial(p.ring, self.rng), g)
                w = reynolds(random_polynomial(p.ring, self.rng), g)
                d2 = apply_nu(d1, [v])
                d3 = apply_nu(d1, [w])
                self.assertTrue(d2.is_equivariant())
                nu12 = nu_class(d1, d2)
                self.assertTrue(nu12.invariant)
                self.assertEqual(nu12.values, [p.normal_form(v)])
                nu13 = nu_class(d1, d3)
                nu23 = nu_class(d2, d3)
                self.assertEqual(nu23.values, [p.normal_form(nu13.values[0] - nu12.values[0])])
                self.assertTrue(same_ideal(apply_nu(d1, nu12), d2))
                count += 1
        self.assertGreaterEqual(count, 100)

    def test_omega_is_cocycle(self):
        """
        测试 ω 满足余圈恒等式, 且两个提升的 ω 相差一个上边缘
        """
        for p, g, amb, _ in self.cases:
            d = trivial_deformation(amb, 0)
            module = normal_module(p, g, amb)
            f = p.gens[0]
            for _ in range(10):
                h1 = random_polynomial(p.ring, self.rng)
                h2 = random_polynomial(p.ring, self.rng)
                c1 = omega_cocycle(d, [series(f, h1)])
                c2 = omega_cocycle(d, [series(f, h2)])
                self.assertTrue(check_cocycle(c1, module))
                diff = CohomologyClass(1, [[a - b for a, b in zip(u, v)] for u, v in zip(c1.values, c2.values)])
                self.assertIsNotNone(solve_coboundary(diff, module))

    def test_omega_rejects_wrong_lift(self):
        """
        测试零阶系数不一致的提升被拒绝
        """
        p, g, amb, _ = self.cases[0]
        d = trivial_deformation(amb, 0)
        with self.assertRaises(InputError):
            omega_cocycle(d, [series(p.gens[0] + p.ring.one, p.ring.zero)])

    def test_mu_realizes_isomorphisms(self):
        """
        测试不变导子给出的自同构: 结果等变, 差类为 -J·D, 且能找回见证
        """
        for p, g, amb, d in self.cases:
            basis = invariant_derivation_basis(amb, 4)
            self.assertTrue(basis)
            for k in range(8):
                D = self.random_derivation(basis, p.ring)
                _, moved = realize_isomorphism(d, DerivationWitness(D, True))
                self.assertTrue(moved.is_equivariant())
                JD = jacobian_map(amb, D)
                self.assertEqual(nu_class(d, moved).values, [p.normal_form(-v) for v in JD])
                if k < 2:
                    self.assertIsNotNone(iso_witness(d, moved))

    def test_mu_is_additive_under_composition(self):
        """
        测试先后作用 x -> x + eps*D1 与 x -> x + eps*D2 等于作用 D1 + D2, 差类相加
        """
        for p, g, amb, d in self.cases:
            basis = invariant_derivation_basis(amb, 4)
            for _ in range(5):
                D1 = self.random_derivation(basis, p.ring)
                D2 = self.random_derivation(basis, p.ring)
                _, first = realize_isomorphism(d, DerivationWitness(D1, True))
                _, composed = realize_isomorphism(first, DerivationWitness(D2, True))
                total = [a + b for a, b in zip(D1, D2)]
                _, direct = realize_isomorphism(d, DerivationWitness(total, True))
                self.assertEqual(composed.generators, direct.generators)
                nu_first = nu_class(d, first).values
                nu_second = nu_class(first, composed).values
                self.assertEqual(nu_class(d, composed).values,
                                 [p.normal_form(a + b) for a, b in zip(nu_first, nu_second)])
                self.assertEqual(nu_class(d, composed).values,
                                 [p.normal_form(-v) for v in jacobian_map(amb, total)])


class SeriesRenderTest(unittest.TestCase):
    def test_render_under_custom_order(self):
        """
        测试带变量置换的单项式序下, 含 eps 的输出可以再解析回原级数
        """
        for order in (MonomialOrder('lex', (1, 0)), MonomialOrder('grevlex', (1, 0))):
            R = PolynomialRing(QQ, ['x', 'y'], order)
            x, y = R.gens()
            F = series(y ** 2 - x ** 3, x * 2, R.one)
            text = str(F)
            self.assertIn('eps', text)
            E = eps_ring(R)
            self.assertEqual(E.names, ('x', 'y', 'eps'))
            self.assertEqual(TruncatedSeries.from_eps_polynomial(E.parse(text), R, 2), F)

    def test_reserved_name(self):
        """
        测试变量名 eps 被保留
        """
        R = PolynomialRing(QQ, ['x', 'eps'])
        with self.assertRaises(InputError):
            eps_ring(R)


class IsomorphismTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.p, self.g = cusp()
        self.amb = small_ambient(self.p, self.g)
        self.x, self.y = self.p.ring.gens()
        self.d = trivial_deformation(self.amb, 1)

    def test_euler_flow_is_exact_witness(self):
        """
        测试 Euler 流作用后的形变与平凡形变同构, 见证精确且可实现
        """
        f = self.p.gens[0]
        other = deformation_from_base(self.amb, 1, [series(f, 6 * self.y ** 2 - 6 * self.x ** 3)])
        witness = iso_witness(self.d, other)
        self.assertIsNotNone(witness)
        self.assertTrue(witness.exact)
        _, realized = realize_isomorphism(self.d, witness)
        self.assertTrue(same_ideal(realized, other))

    def test_smoothing_is_not_trivial(self):
        """
        测试光滑化 y^2 - x^3 + eps 与平凡形变不同构
        """
        other = deformation_from_base(self.amb, 1, [series(self.p.gens[0], self.p.ring.one)])
        self.assertIsNone(iso_witness(self.d, other))

    def test_automorphism_flows(self):
        """
        测试不变导子的一阶流保持平凡形变的等变性与理想
        """
        flows = automorphism_flows(self.p, self.g)
        self.assertTrue(flows)
        for auto in flows:
            moved = Deformation(self.d.base, self.amb, [auto.apply(F) for F in self.d.generators])
            self.assertTrue(verify_deformation(moved).ok)
            self.assertTrue(same_ideal(moved, self.d))

    def test_mismatched_orders(self):
        """
        测试不同阶的形变无法比较
        """
        with self.assertRaises(InputError):
            nu_class(self.d, trivial_deformation(self.amb, 2))


if __name__ == '__main__':
    unittest.main()
