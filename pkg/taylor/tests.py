import math

import numpy as np
from django.test import SimpleTestCase

from common.exceptions import InsufficientOrderError, SingularEvaluationError

from . import functions as fn
from .series import TaylorScalar, from_derivatives, to_derivatives


def _t(order, t0=0.0):
    return TaylorScalar.variable(t0, order)


class TaylorArithmeticTestCase(SimpleTestCase):
    """급수 산술 테스트"""

    def test_product_follows_convolution(self):
        """(1 + t)(1 - t) = 1 - t^2"""
        t = _t(3)
        result = (1.0 + t) * (1.0 - t)
        np.testing.assert_allclose(result.coeffs, [1.0, 0.0, -1.0, 0.0])

    def test_product_matches_leibniz_rule(self):
        """(ab)^(k) = sum C(k,i) a^(i) b^(k-i) 를 도함수 형태로 확인"""
        a = TaylorScalar.from_derivatives([1.0, 2.0, -1.0, 0.5, 3.0])
        b = TaylorScalar.from_derivatives([0.5, -1.0, 4.0, 2.0, -2.0])
        da, db = a.to_derivatives(), b.to_derivatives()
        expected = [
            sum(math.comb(k, i) * da[i] * db[k - i] for i in range(k + 1)) for k in range(5)
        ]
        np.testing.assert_allclose((a * b).to_derivatives(), expected, rtol=1e-14)

    def test_division_gives_geometric_series(self):
        """1 / (1 - t) 의 계수는 모두 1"""
        result = 1.0 / (1.0 - _t(5))
        np.testing.assert_allclose(result.coeffs, np.ones(6))

    def test_division_by_series_is_inverse_of_product(self):
        """(a / b) * b = a"""
        t = _t(6, 0.2)
        a = fn.exp(t) + 2.0
        b = fn.cos(t) + 3.0
        np.testing.assert_allclose(((a / b) * b).coeffs, a.coeffs, rtol=1e-13, atol=1e-15)

    def test_mixed_orders_truncate_to_lower(self):
        """차수가 다른 급수끼리의 연산은 낮은 차수로"""
        result = _t(3) + _t(5)
        self.assertEqual(result.order, 3)
        np.testing.assert_allclose(result.coeffs, [0.0, 2.0, 0.0, 0.0])

    def test_scalar_operands_promote_to_constant(self):
        """실수 상수는 (c, 0, ..., 0) 으로 취급"""
        t = _t(2, 1.0)
        np.testing.assert_allclose((2.0 - t).coeffs, [1.0, -1.0, 0.0])
        np.testing.assert_allclose((3.0 * t).coeffs, [3.0, 3.0, 0.0])
        np.testing.assert_allclose((t / 2.0).coeffs, [0.5, 0.5, 0.0])

    def test_comparison_uses_constant_term(self):
        """비교는 상수항 기준"""
        t = _t(3, 2.0)
        self.assertTrue(t > 1.0)
        self.assertFalse(t < 1.0)

    def test_division_by_zero_constant_term(self):
        """상수항이 0 인 급수로 나누면 SingularEvaluationError"""
        with self.assertRaises(SingularEvaluationError):
            1.0 / _t(3)
        with self.assertRaises(SingularEvaluationError):
            _t(3, 1.0) / 0.0


class TaylorElementaryFunctionTestCase(SimpleTestCase):
    """기본 함수 점화식 테스트"""

    def test_exp_coefficients(self):
        """exp(t) 의 계수는 1/k!"""
        result = fn.exp(_t(8))
        expected = [1.0 / math.factorial(k) for k in range(9)]
        np.testing.assert_allclose(result.coeffs, expected, rtol=1e-15)

    def test_sin_cos_at_shifted_point(self):
        """sin, cos 를 t0 = 0.3 에서 전개"""
        t0 = 0.3
        t = _t(6, t0)
        sin_derivs = [math.sin(t0), math.cos(t0), -math.sin(t0), -math.cos(t0)] * 2
        cos_derivs = [math.cos(t0), -math.sin(t0), -math.cos(t0), math.sin(t0)] * 2
        np.testing.assert_allclose(fn.sin(t).to_derivatives(), sin_derivs[:7], rtol=1e-14)
        np.testing.assert_allclose(fn.cos(t).to_derivatives(), cos_derivs[:7], rtol=1e-14)

    def test_sqrt_binomial_series(self):
        """sqrt(1 + t) = 1 + t/2 - t^2/8 + t^3/16 - 5 t^4/128"""
        result = fn.sqrt(1.0 + _t(4))
        np.testing.assert_allclose(result.coeffs, [1.0, 0.5, -0.125, 0.0625, -5.0 / 128.0])

    def test_log_series(self):
        """log(1 + t) = t - t^2/2 + t^3/3 - t^4/4"""
        result = fn.log(1.0 + _t(4))
        np.testing.assert_allclose(result.coeffs, [0.0, 1.0, -0.5, 1.0 / 3.0, -0.25], atol=1e-16)

    def test_fractional_power(self):
        """(1 + t)^1.5 의 계수는 일반화 이항계수"""
        r = 1.5
        result = fn.pow(1.0 + _t(5), r)
        expected = [1.0]
        for k in range(1, 6):
            expected.append(expected[-1] * (r - k + 1) / k)
        np.testing.assert_allclose(result.coeffs, expected, rtol=1e-14, atol=1e-16)

    def test_integer_power_matches_repeated_product(self):
        """정수 거듭제곱과 음의 거듭제곱"""
        t = _t(4, 0.5)
        np.testing.assert_allclose((t ** 3).coeffs, (t * t * t).coeffs)
        np.testing.assert_allclose((t ** -1).coeffs, (1.0 / t).coeffs)

    def test_domain_violations(self):
        """정의역 위반은 SingularEvaluationError"""
        cases = [
            ('sqrt', lambda: fn.sqrt(_t(3) - 1.0)),
            ('log', lambda: fn.log(_t(3))),
            ('pow', lambda: fn.pow(_t(3, -1.0), 0.5)),
            ('float log', lambda: fn.log(-1.0)),
            ('float sqrt', lambda: fn.sqrt(-4.0)),
        ]
        for name, call in cases:
            with self.subTest(name=name):
                with self.assertRaises(SingularEvaluationError):
                    call()


class TaylorDiffTestCase(SimpleTestCase):
    """시간 미분 연산자 테스트"""

    def test_diff_of_cubic(self):
        """t^3 -> 3 t^2 -> 6 t"""
        cube = TaylorScalar([0.0, 0.0, 0.0, 1.0])
        np.testing.assert_allclose(cube.diff(1).coeffs, [0.0, 0.0, 3.0])
        np.testing.assert_allclose(fn.diff(cube, 2).coeffs, [0.0, 6.0])

    def test_diff_lowers_order(self):
        """q 번 미분하면 차수가 q 줄어든다"""
        series = fn.exp(_t(6))
        self.assertEqual(series.diff(4).order, 2)
        np.testing.assert_allclose(series.diff(2).coeffs, series.coeffs[:5], rtol=1e-15)

    def test_diff_beyond_order(self):
        """차수보다 많이 미분하면 InsufficientOrderError"""
        with self.assertRaises(InsufficientOrderError):
            _t(2).diff(3)

    def test_diff_of_real_constant(self):
        """실수 상수의 도함수는 0"""
        self.assertEqual(fn.diff(2.5, 0), 2.5)
        self.assertEqual(fn.diff(2.5, 1), 0.0)

    def test_derivative_coefficient_conversion(self):
        """도함수 <-> 테일러 계수 변환"""
        derivs = np.array([1.0, 2.0, 6.0, 24.0])
        np.testing.assert_allclose(from_derivatives(derivs), [1.0, 2.0, 3.0, 4.0])
        np.testing.assert_allclose(to_derivatives(from_derivatives(derivs)), derivs)


class RealFallbackTestCase(SimpleTestCase):
    """실수 입력 동작 테스트"""

    def test_functions_on_floats(self):
        """float 는 math 와 같은 값"""
        self.assertEqual(fn.sin(0.5), math.sin(0.5))
        self.assertEqual(fn.sqr(3.0), 9.0)
        self.assertEqual(fn.primal(2.0), 2.0)
        self.assertEqual(fn.ad_depth(2.0), 0)
        self.assertEqual(fn.constant_like(2.0, 1.0), 1.0)

    def test_nested_depth(self):
        """급수의 깊이는 1"""
        self.assertEqual(_t(3).ad_depth, 1)
