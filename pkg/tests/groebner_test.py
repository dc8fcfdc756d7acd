import random
import unittest

from eqdeform.algebra.groebner import (
    FreeModuleElement, Lifter, ModulePresentation, buchberger, is_regular_sequence, krull_dimension,
    module_kernel, quotient_basis,
)
from eqdeform.algebra.linalg import nullspace
from eqdeform.algebra.polynomial import PolynomialRing
from eqdeform.algebra.scalar import GF, QQ

from oracles import member_up_to_degree, monomials_up_to, sympy_groebner, to_sympy_poly


def random_polynomial(ring, rng, degree, terms):
    field = ring.field
    f = ring.zero
    monos = monomials_up_to(ring.nvars, degree)
    for _ in range(terms):
        f = f + ring.monomial(rng.choice(monos), field.convert(rng.randint(1, 6)))
    return f


class GroebnerAgainstSympyTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.rng = random.Random(20240917)

    def _assert_same_basis(self, gens, ring, p=None):
        ours = buchberger(gens)
        theirs, symbols = sympy_groebner([str(g) for g in gens], ring.names, p)
        ours_sym = [to_sympy_poly(str(g), symbols, ring.names, p).monic() for g in ours]
        theirs = [g.monic() for g in theirs]
        self.assertEqual(len(ours_sym), len(theirs), f"{gens}: {ours} vs {theirs}")
        for g in ours_sym:
            self.assertTrue(any((g - h).is_zero for h in theirs), f"{g} not in sympy basis")

    def test_fixed_ideals_over_q(self):
        """
        测试固定理想的约化 Gröbner 基与 sympy 一致
        """
        R = PolynomialRing(QQ, ['x', 'y'])
        for texts in (["y^2 - x^3", "-3*x^2", "2*y"], ["x*y"], ["x^2 + y^2 - 1", "x - y"], ["x^3 - y", "x*y - 1"]):
            self._assert_same_basis([R.parse(t) for t in texts], R)

    def test_random_ideals_over_f7(self):
        """
        测试随机理想 (F_7, 3 个变量) 的约化 Gröbner 基与 sympy 一致
        """
        R = PolynomialRing(GF(7), ['x', 'y', 'z'])
        for _ in range(20):
            gens = [random_polynomial(R, self.rng, 3, 3) for _ in range(2)]
            gens = [g for g in gens if not g.is_zero()]
            if not gens:
                continue
            self._assert_same_basis(gens, R, 7)


class MembershipTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.rng = random.Random(7)
        self.R = PolynomialRing(GF(5), ['x', 'y', 'z'])

    def random_ideal(self):
        """1 到 3 个生成元, 次数不超过 4"""
        while True:
            count = self.rng.randint(1, 3)
            gens = [random_polynomial(self.R, self.rng, self.rng.randint(1, 4), self.rng.randint(1, 3))
                    for _ in range(count)]
            gens = [g for g in gens if not g.is_zero()]
            if gens:
                return gens

    def combination(self, gens, degree):
        """Σ a_i g_i, 每项次数不超过 degree"""
        h = self.R.zero
        for g in gens:
            h = h + random_polynomial(self.R, self.rng, degree - g.degree(), 2) * g
        return h

    def test_members_and_cofactors(self):
        """
        测试构造出的理想元素被判定属于理想, 且余因子可还原
        """
        for _ in range(40):
            gens = self.random_ideal()
            h = self.combination(gens, 6)
            gb = buchberger(gens)
            self.assertTrue(gb.normal_form(h).is_zero())
            self.assertTrue(gb.contains(h))
            if sum(g.degree() for g in gens) > 4:
                continue
            cof = Lifter.for_ideal(gens).cofactors([h])
            self.assertIsNotNone(cof)
            total = self.R.zero
            for c, g in zip(cof, gens):
                total = total + c * g
            self.assertEqual(total, h)

    def test_members_found_by_degree_bounded_oracle(self):
        """
        测试次数不超过 6 的组合在截断线性代数中同样是成员
        """
        for _ in range(30):
            gens = self.random_ideal()
            h = self.combination(gens, 6)
            self.assertTrue(member_up_to_degree(h.terms, [g.terms for g in gens], 3, 6, 5))
            self.assertTrue(buchberger(gens).contains(h))

    def test_degree_bounded_oracle_agrees(self):
        """
        测试两个方向: 截断判定为成员则 Gröbner 基判定为成员; 正规形非零则截断判定为非成员
        """
        outside = 0
        for _ in range(40):
            gens = self.random_ideal()
            f = random_polynomial(self.R, self.rng, 4, 3)
            gb = buchberger(gens)
            bounded = member_up_to_degree(f.terms, [g.terms for g in gens], 3, 6, 5)
            if bounded:
                self.assertTrue(gb.contains(f))
            if not gb.normal_form(f).is_zero():
                outside += 1
                self.assertFalse(bounded)
        self.assertGreater(outside, 0)


class ModuleKernelTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.R = PolynomialRing(QQ, ['x', 'y'])
        self.x, self.y = self.R.gens()
        self.free = buchberger([self.R.zero])

    def test_koszul_syzygy(self):
        """
        测试 (x, y) 的合冲模包含所有 3 次以内的暴力核元素
        """
        kernel = module_kernel([[self.x, self.y]], self.free)
        for v in kernel:
            self.assertTrue((self.x * v[0] + self.y * v[1]).is_zero())
        monos = monomials_up_to(2, 3)
        # 未知量: (a, b) 的系数, a 在前
        columns = [(0, e) for e in monos] + [(1, e) for e in monos]
        targets = sorted({tuple(a + b for a, b in zip(e, (1, 0) if pos == 0 else (0, 1))) for pos, e in columns})
        rows = []
        for t in targets:
            rows.append([QQ.one if tuple(a + b for a, b in zip(e, (1, 0) if pos == 0 else (0, 1))) == t else QQ.zero
                         for pos, e in columns])
        lifter = Lifter([list(v.components) for v in kernel], self.R, 2)
        for vec in nullspace(rows, QQ, len(columns)):
            a = self.R.zero
            b = self.R.zero
            for (pos, e), c in zip(columns, vec):
                if pos == 0:
                    a = a + self.R.monomial(e, c)
                else:
                    b = b + self.R.monomial(e, c)
            self.assertIsNotNone(lifter.cofactors([a, b]))

    def test_kernel_modulo_ideal(self):
        """
        测试模 (xy) 时乘 x 的核由 y 生成
        """
        gb = buchberger([self.x * self.y])
        kernel = module_kernel([[self.x]], gb)
        for v in kernel:
            self.assertTrue(gb.contains(self.x * v[0]))
        lifter = Lifter([list(v.components) for v in kernel] + [[self.x * self.y]], self.R, 1)
        self.assertIsNotNone(lifter.cofactors([self.y]))

    def test_cusp_jacobian_kernel(self):
        """
        测试 B = Q[x,y]/(y² − x³) 上 (−3x², 2y) 的核包含 (2y, 3x²) 与 Euler 向量 (2x, 3y)
        """
        gb = buchberger([self.y ** 2 - self.x ** 3])
        row = [self.x ** 2 * -3, self.y * 2]
        kernel = module_kernel([row], gb)
        self.assertTrue(kernel)
        for v in kernel:
            self.assertEqual(v.rank, 2)
            self.assertTrue(gb.contains(row[0] * v[0] + row[1] * v[1]))
        submodule = ModulePresentation(2, kernel, gb)
        for v in ([self.y * 2, self.x ** 2 * 3], [self.x * 2, self.y * 3]):
            self.assertTrue(gb.contains(row[0] * v[0] + row[1] * v[1]))
            self.assertTrue(all(c.is_zero() for c in submodule.normal_form(v)))
        self.assertFalse(all(c.is_zero() for c in submodule.normal_form([self.R.one, self.R.zero])))

    def test_random_kernels_against_brute_force(self):
        """
        测试随机 1×2 矩阵模随机理想 (F_7): 核元素满足同余, 且 2 次以内的暴力核元素都属于核子模
        """
        rng = random.Random(11)
        R = PolynomialRing(GF(7), ['x', 'y'])
        field = R.field
        monos = monomials_up_to(2, 2)
        columns = [(0, e) for e in monos] + [(1, e) for e in monos]
        for k in range(10):
            modulus = buchberger([random_polynomial(R, rng, 3, 3)] if k % 2 else [R.zero])
            row = [random_polynomial(R, rng, 2, 2) for _ in range(2)]
            if any(entry.is_zero() for entry in row):
                continue
            kernel = module_kernel([row], modulus)
            for v in kernel:
                self.assertTrue(modulus.contains(row[0] * v[0] + row[1] * v[1]))

            # 正规形是线性的: 逐列求像后解零空间
            images = [modulus.normal_form(row[pos] * R.monomial(e)).terms for pos, e in columns]
            terms = sorted({t for img in images for t in img})
            rows = [[img.get(t, field.zero) for img in images] for t in terms]
            relations = [list(v.components) for v in kernel]
            for g in modulus.generators:
                if not g.is_zero():
                    relations += [[g, R.zero], [R.zero, g]]
            lifter = Lifter(relations, R, 2) if relations else None
            for vec in nullspace(rows, field, len(columns)):
                a, b = R.zero, R.zero
                for (pos, e), c in zip(columns, vec):
                    if pos == 0:
                        a = a + R.monomial(e, c)
                    else:
                        b = b + R.monomial(e, c)
                if a.is_zero() and b.is_zero():
                    continue
                self.assertIsNotNone(lifter)
                self.assertIsNotNone(lifter.cofactors([a, b]))


class QuotientTest(unittest.TestCase):
    def setUp(self):
        """
        测试前准备
        """
        self.R = PolynomialRing(QQ, ['x', 'y'])
        self.x, self.y = self.R.gens()

    def test_cusp_t1_basis(self):
        """
        测试尖点 T¹ = B/(3x², 2y) 的基为 {1, x}
        """
        gb = buchberger([self.y ** 2 - self.x ** 3])
        m = ModulePresentation(1, [FreeModuleElement((self.x ** 2 * -3,)), FreeModuleElement((self.y * 2,))], gb)
        basis = quotient_basis(m)
        self.assertTrue(basis.finite)
        self.assertEqual(basis.keys, [(0, (0, 0)), (0, (1, 0))])

    def test_infinite_quotient_without_truncation(self):
        """
        测试无限维商模: 未给截断时以首项次数为界并标记无限
        """
        gb = buchberger([self.x * self.y])
        m = ModulePresentation(1, [], gb)
        basis = quotient_basis(m)
        self.assertFalse(basis.finite)
        self.assertEqual(basis.truncation, 2)
        self.assertEqual(basis.dimension, 5)
        basis = quotient_basis(m, trunc=3)
        self.assertFalse(basis.finite)
        self.assertEqual(basis.dimension, 7)

    def test_regular_sequence(self):
        """
        测试正则序列证书
        """
        self.assertTrue(is_regular_sequence([self.x * self.y]).regular)
        self.assertTrue(is_regular_sequence([self.x ** 2, self.y]).regular)
        self.assertFalse(is_regular_sequence([self.x * self.y, self.x]).regular)
        self.assertEqual(krull_dimension(buchberger([self.x, self.x + 1])), -1)

    def test_cached_basis(self):
        """
        测试同一输入的 Gröbner 基被缓存
        """
        gens = [self.y ** 2 - self.x ** 3]
        self.assertIs(buchberger(gens), buchberger(gens))


if __name__ == '__main__':
    unittest.main()
