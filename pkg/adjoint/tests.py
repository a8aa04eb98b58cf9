import math

import numpy as np
from django.test import SimpleTestCase

from common.exceptions import TapeUsageError
from taylor import functions as fn
from taylor.series import TaylorScalar

from .tape import AdjointScalar, Tape, backprop, record


def _sample(args):
    x, y, z = args
    return x * y + fn.sin(z) / y + fn.sqrt(x) * fn.exp(z) - fn.log(y) + fn.pow(x, 2.5) - 1.0 / (z + 3.0)


class GradientTestCase(SimpleTestCase):
    """역방향 기울기 테스트"""

    def test_gradient_matches_finite_differences(self):
        """중심 차분과 상대오차 1e-6 이내"""
        points = [(1.3, 0.7, 0.2), (0.4, 2.5, -1.1), (2.0, 1.0, 0.0)]
        h = 1e-6
        for point in points:
            with self.subTest(point=point):
                output, tape = record(_sample, point)
                grad = backprop(tape, output)
                self.assertAlmostEqual(output.value, _sample(point), places=14)
                for i in range(3):
                    up = list(point)
                    down = list(point)
                    up[i] += h
                    down[i] -= h
                    fd = (_sample(up) - _sample(down)) / (2 * h)
                    self.assertLessEqual(abs(grad[i] - fd), 1e-6 * max(1.0, abs(fd)))

    def test_known_gradient(self):
        """f = x^2 y + y / x"""
        output, tape = record(lambda a: fn.sqr(a[0]) * a[1] + a[1] / a[0], [2.0, 3.0])
        grad = backprop(tape, output)
        self.assertAlmostEqual(grad[0], 2 * 2.0 * 3.0 - 3.0 / 4.0)
        self.assertAlmostEqual(grad[1], 4.0 + 0.5)

    def test_seed_scales_gradient(self):
        """seed 만큼 기울기가 배가된다"""
        output, tape = record(lambda a: a[0] * a[1], [2.0, 5.0])
        self.assertEqual(backprop(tape, output, seed=3.0), [15.0, 6.0])

    def test_constant_output_has_zero_gradient(self):
        """입력과 무관한 출력"""
        output, tape = record(lambda a: 3.0, [1.0, 2.0])
        self.assertEqual(backprop(tape, output), [0.0, 0.0])

    def test_unreached_inputs(self):
        """도달하지 않은 입력: fill_zeros 면 0, 아니면 None"""
        output, tape = record(lambda a: fn.cos(a[0]), [0.5, 9.0])
        self.assertEqual(backprop(tape, output)[1], 0.0)
        self.assertIsNone(backprop(tape, output, fill_zeros=False)[1])
        self.assertAlmostEqual(backprop(tape, output)[0], -math.sin(0.5))

    def test_reused_tape_for_several_outputs(self):
        """한 테이프에서 출력마다 역전파"""
        tape = Tape()
        x, y = tape.variable(1.5), tape.variable(-2.0)
        first, second = x * y, x - y
        tape.stop()
        self.assertEqual(backprop(tape, first), [-2.0, 1.5])
        self.assertEqual(backprop(tape, second), [1.0, -1.0])


class TapeUsageTestCase(SimpleTestCase):
    """테이프 사용 순서 오류 테스트"""

    def test_backprop_before_stop(self):
        """기록 중 역전파는 TapeUsageError"""
        tape = Tape()
        x = tape.variable(1.0)
        with self.assertRaises(TapeUsageError):
            backprop(tape, x * x)

    def test_recording_after_stop(self):
        """기록이 끝난 테이프에 연산을 추가하면 TapeUsageError"""
        tape = Tape()
        x = tape.variable(1.0)
        tape.stop()
        with self.assertRaises(TapeUsageError):
            x + 1.0

    def test_output_from_other_tape(self):
        """다른 테이프의 출력"""
        first, _ = record(lambda a: a[0] * 2.0, [1.0])
        _, other = record(lambda a: a[0] * 3.0, [1.0])
        with self.assertRaises(TapeUsageError):
            backprop(other, first)

    def test_time_derivative_not_supported(self):
        """AdjointScalar 자체의 시간 미분은 지원하지 않는다"""
        tape = Tape()
        with self.assertRaises(TapeUsageError):
            tape.variable(1.0).diff(1)


class NestedTypeTestCase(SimpleTestCase):
    """급수와 테이프의 중첩 테스트"""

    def test_gradient_over_series(self):
        """입력이 급수이면 기울기도 급수: d/dx (x^2 sin x)"""
        x_series = TaylorScalar.variable(0.7, 5)
        output, tape = record(lambda a: fn.sqr(a[0]) * fn.sin(a[0]), [x_series])
        grad = backprop(tape, output)[0]
        expected = 2.0 * x_series * fn.sin(x_series) + fn.sqr(x_series) * fn.cos(x_series)
        self.assertIsInstance(grad, TaylorScalar)
        np.testing.assert_allclose(grad.coeffs, expected.coeffs, rtol=1e-13, atol=1e-15)

    def test_series_with_tape_coefficients(self):
        """계수가 테이프 값인 급수: 곱의 t^1 계수는 a0 b1 + a1 b0"""
        tape = Tape()
        a0, a1 = tape.variable(2.0), tape.variable(3.0)
        a = TaylorScalar(np.array([a0, a1], dtype=object))
        b = TaylorScalar([5.0, 7.0])
        product = a * b
        tape.stop()
        self.assertIsInstance(product.coeffs[1], AdjointScalar)
        self.assertEqual(backprop(tape, product.coeffs[1]), [7.0, 5.0])
        self.assertEqual(product.ad_depth, 2)
