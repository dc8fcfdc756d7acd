import unittest

from eqdeform.algebra.scalar import GF, QQ
from eqdeform.services.ramify import (
    explicit_action_matrix, fixed_space_dimension, local_ext1_invariants, ramify_field, root_of_unity,
    tame_different, total_local_contribution, twist_weight,
)
from eqdeform.utils.error_handler import InputError

# m | p - 1
PRIMES = {2: 3, 3: 7, 4: 5, 5: 11, 6: 7, 7: 29}


class RootOfUnityTest(unittest.TestCase):
    def test_primitive_roots(self):
        """
        测试本原单位根的阶
        """
        for m, p in PRIMES.items():
            zeta = root_of_unity(m, GF(p))
            self.assertEqual(pow(zeta, m, p), 1)
            self.assertTrue(all(pow(zeta, k, p) != 1 for k in range(1, m)))

    def test_missing_root(self):
        """
        测试域中没有单位根时报错
        """
        with self.assertRaises(InputError):
            root_of_unity(3, GF(5))
        with self.assertRaises(InputError):
            root_of_unity(3, QQ)
        self.assertEqual(root_of_unity(2, QQ), -1)


class LocalExtTest(unittest.TestCase):
    def test_golden_value(self):
        """
        测试 d=1, m=2, p=5 时不变维数为 1
        """
        self.assertEqual(local_ext1_invariants(1, 2, GF(5)), 1)
        self.assertEqual(local_ext1_invariants(1, 2), 1)
        self.assertEqual(twist_weight(1), -2)

    def test_tame_ramification(self):
        """
        测试驯顺分歧 d = m - 1 时恰好一个不变量
        """
        for m in (2, 3, 5, 7):
            d = tame_different(m)
            self.assertEqual(d, m - 1)
            self.assertEqual(local_ext1_invariants(d, m, GF(PRIMES[m])), 1)

    def test_weight_count_matches_fixed_space(self):
        """
        测试权重计数与显式作用矩阵的不动子空间维数一致
        """
        for m in range(2, 7):
            field = GF(PRIMES[m])
            for d in range(0, 13):
                expected = sum(1 for i in range(d) if (i - d - 1) % m == 0)
                self.assertEqual(local_ext1_invariants(d, m, field), expected)
                self.assertEqual(fixed_space_dimension(d, m, field), expected)

    def test_action_matrix_is_diagonal(self):
        """
        测试作用矩阵为对角阵且 A^m = 1
        """
        field = GF(7)
        A = explicit_action_matrix(5, 3, field)
        for i in range(5):
            for j in range(5):
                if i != j:
                    self.assertEqual(A[i, j], 0)
            self.assertEqual(pow(int(A[i, i]), 3, 7), 1)

    def test_total_contribution(self):
        """
        测试多个分歧点的贡献相加
        """
        field = GF(7)
        self.assertEqual(total_local_contribution([(1, 2), (2, 3), (5, 6)], field), 3)

    def test_invalid_input(self):
        """
        测试非法参数
        """
        with self.assertRaises(InputError):
            local_ext1_invariants(1, 1, GF(5))
        with self.assertRaises(InputError):
            local_ext1_invariants(-1, 2, GF(5))
        with self.assertRaises(InputError):
            ramify_field(4)
        self.assertEqual(ramify_field(None), QQ)


if __name__ == '__main__':
    unittest.main()
