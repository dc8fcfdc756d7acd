import random
import unittest

from eqdeform.algebra.polynomial import PolynomialRing
from eqdeform.algebra.scalar import GF, QQ
from eqdeform.services.ambient import ambient_derivations, build_presentation, choose_ambient, normal_module
from eqdeform.services.cohomology import (
    CohomologyClass, GModuleSlice, check_cocycle, coboundary, h1, h2, invariants, is_cocycle, solve_coboundary,
)
from eqdeform.services.deform import obstruction_space
from eqdeform.services.gaction import Substitution, close_group
from eqdeform.utils.error_handler import CocycleError

from oracles import cyclic_h1_dimension


def swap_node(p=2):
    R = PolynomialRing(GF(p) if p else QQ, ['x', 'y'])
    x, y = R.gens()
    presentation = build_presentation(R, [x * y])
    group = close_group([Substitution.from_mapping(R, {'x': y, 'y': x}, 's')])
    return presentation, group


def swapped_monomials_action(degree):
    """基 1, x..x^D, y..y^D 上交换 x, y 的矩阵"""
    n = 2 * degree + 1
    A = [[0] * n for _ in range(n)]
    A[0][0] = 1
    for i in range(1, degree + 1):
        A[degree + i][i] = 1
        A[i][degree + i] = 1
    return A


class WildNodeTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.p, self.g = swap_node(2)
        self.amb = choose_ambient(self.p, self.g)
        self.module = normal_module(self.p, self.g, self.amb)

    def test_obstruction_dimension_is_stable(self):
        """
        测试 F_2 结点的障碍空间在 D = 2..6 上均为 1, 与暴力预言机一致
        """
        for degree in range(2, 7):
            space = obstruction_space(self.p, self.g, self.amb, trunc=degree)
            self.assertEqual(space.dimension, 1)
            self.assertEqual(space.dimension, cyclic_h1_dimension(swapped_monomials_action(degree), 2, 2))
            self.assertEqual(space.certified, f'slice:{degree}')

    def test_representative_is_constant_class(self):
        """
        测试代表元为 s -> 1
        """
        result = h1(GModuleSlice.build(self.module, 4), GModuleSlice.build(self.module, 6))
        self.assertEqual(result.dimension, 1)
        self.assertTrue(result.graded)
        rep = result.representatives[0]
        self.assertTrue(check_cocycle(rep, self.module))
        self.assertEqual(rep.values[1], [self.p.ring.one])
        self.assertIsNone(solve_coboundary(rep, GModuleSlice.build(self.module, 6)))

    def test_second_cohomology_of_constants(self):
        """
        测试平凡模 F_2 上 H² = 1
        """
        m = GModuleSlice.build(self.module, 0)
        self.assertEqual(m.dimension, 1)
        self.assertEqual(h1(m).dimension, 1)
        self.assertEqual(h2(m), 1)

    def test_coboundaries_are_solved(self):
        """
        测试随机上边界可被求解, 且解为精确证书
        """
        rng = random.Random(3)
        m = GModuleSlice.build(self.module, 4)
        self.assertTrue(m.is_representation())
        for _ in range(10):
            phi = [rng.randint(0, 1) for _ in range(m.dimension)]
            c = coboundary(m, phi)
            self.assertTrue(is_cocycle(m, c))
            cls = CohomologyClass(1, [m.element(v) for v in c])
            found = solve_coboundary(cls, m)
            self.assertIsNotNone(found)
            for s in self.g:
                moved = self.module.act(s, found)
                self.assertEqual(self.module.reduce([a - b for a, b in zip(moved, found)]),
                                 self.module.reduce(cls.values[s]))

    def test_non_cocycle_rejected(self):
        """
        测试不满足余圈恒等式的输入
        """
        ring = self.p.ring
        bad = CohomologyClass(1, [[ring.one], [ring.zero]])
        with self.assertRaises(CocycleError):
            solve_coboundary(bad, self.module)


class TranslationTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        L = PolynomialRing(GF(2), ['x'])
        self.p = build_presentation(L, [])
        self.g = close_group([Substitution.from_mapping(L, {'x': L.gen('x') + 1}, 't')])
        self.amb = choose_ambient(self.p, self.g)

    def test_derivation_cohomology_vanishes(self):
        """
        测试自由平移下导子分片的 H¹ 对 D ≤ 6 为 0
        """
        module = ambient_derivations(self.amb)
        for degree in range(0, 7):
            result = h1(GModuleSlice.build(module, degree), GModuleSlice.build(module, degree + 2))
            self.assertEqual(result.dimension, 0)

    def test_obstruction_space_vanishes(self):
        """
        测试法模的障碍空间为 0
        """
        for degree in (2, 4):
            self.assertEqual(obstruction_space(self.p, self.g, self.amb, trunc=degree).dimension, 0)


class FreePermutationTest(unittest.TestCase):
    def test_small_ambient_derivations_are_acyclic(self):
        """
        测试 F_2 上交换坐标: 自动选择原环境, 导子分片的 H¹ 为 0
        """
        p, g = swap_node(2)
        self.assertFalse(g.is_tame())
        self.assertTrue(g.permutes_coordinates_freely())
        amb = choose_ambient(p, g)
        self.assertEqual(amb.kind, 'small')
        module = ambient_derivations(amb)
        for degree in range(0, 5):
            result = h1(GModuleSlice.build(module, degree), GModuleSlice.build(module, degree + 2))
            self.assertEqual(result.dimension, 0)


class TameTest(unittest.TestCase):
    def test_tame_obstruction_is_exact_zero(self):
        """
        测试驯顺情形障碍空间精确为 0
        """
        R = PolynomialRing(QQ, ['x', 'y'])
        x, y = R.gens()
        p = build_presentation(R, [y ** 2 - x ** 3])
        g = close_group([Substitution.from_mapping(R, {'y': -y}, 's')])
        space = obstruction_space(p, g)
        self.assertEqual(space.dimension, 0)
        self.assertEqual(space.certified, 'exact')

    def test_tame_slice_cohomology(self):
        """
        测试驯顺分片上 H¹ = H² = 0, 且不变量由平均给出
        """
        p, g = swap_node(0)
        amb = choose_ambient(p, g)
        m = GModuleSlice.build(normal_module(p, g, amb), 3)
        self.assertEqual(h1(m).dimension, 0)
        self.assertEqual(h2(m), 0)
        # 不变量: 1, x+y, x^2+y^2, x^3+y^3
        self.assertEqual(len(invariants(m)), 4)


if __name__ == '__main__':
    unittest.main()
