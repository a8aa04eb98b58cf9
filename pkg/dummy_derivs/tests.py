import math
from dataclasses import replace
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase, override_settings

from common.exceptions import ChartFailureError, NotSAFriendlyError, ValidationException
from problems.catalog.pendulums import build_pendulum_dae
from structural.items import ItemPoint
from structural.services.analysis_service import analyze
from structural.services.jacobian_service import system_jacobian

from .scheme import stage_members, state_items_for
from .services.augment_service import augment
from .services.newton_service import NewtonResult, newton_solve
from .services.reduced_ode_service import ReducedOde, dd_switch, reduced_ode_eval
from .services.selection_service import scheme_from_delta, select_state_vector, validate_dd_spec

G = 9.81
L = 10.0


def _pendulum_point(x, xdot=0.0):
    """길이 구속을 만족하는 진자 점 (y > 0, 정지 상태면 lambda = g y / l^2)"""
    y = math.sqrt(L * L - x * x)
    ydot = -x * xdot / y
    lam = (G * y + xdot ** 2 + ydot ** 2) / (L * L)
    return ItemPoint.from_derivatives(0.0, [[x, xdot, -x * lam], [y, ydot, G - y * lam], [lam]])


class PendulumFixtureMixin:
    def setUp(self):
        self.dae = build_pendulum_dae({'g': G, 'l': L})
        self.structural = analyze(self.dae)
        self.aug = augment(self.dae, self.structural)


class AugmentTestCase(PendulumFixtureMixin, SimpleTestCase):
    """증강 시스템 구성 테스트"""

    def test_counts_and_labels(self):
        """방정식 n + sum c = 5, 항목 n + sum d = 7"""
        self.assertEqual(self.aug.n_f, 5)
        self.assertEqual(self.aug.n_x, 7)
        self.assertEqual(self.aug.equation_labels, ['A', 'B', 'C', "C'", "C''"])
        self.assertEqual(self.aug.item_labels, ['x', "x'", "x''", 'y', "y'", "y''", 'lambda'])

    def test_pack_and_derivative_form(self):
        """계수 형태 저장, 도함수 형태 변환"""
        point = _pendulum_point(6.0)
        vector = self.aug.pack(point)
        derivs = self.aug.to_derivative_form(vector)
        self.assertAlmostEqual(derivs[2], 2.0 * vector[2])
        np.testing.assert_allclose(self.aug.from_derivative_form(derivs), vector)
        np.testing.assert_allclose(self.aug.unpack(0.0, vector).coeffs[0], point.coeffs[0])

    def test_consistent_point_has_zero_residual(self):
        """일관된 점에서 모든 증강 방정식 잔차가 0"""
        residual = self.aug.residuals(0.0, self.aug.pack(_pendulum_point(6.0, 0.7)))
        np.testing.assert_allclose(residual, 0.0, atol=1e-12)

    def test_offset_length_mismatch(self):
        """오프셋 길이가 다르면 ValidationException"""
        broken = replace(self.structural, c=(0, 0))
        with self.assertRaises(ValidationException):
            augment(self.dae, broken)


class StateSelectionTestCase(PendulumFixtureMixin, SimpleTestCase):
    """상태 벡터 선택 테스트"""

    def test_stage_members(self):
        """k = -2, -1 에서 C 한 행과 x, y 두 열, k = 0 에서 3x3"""
        stages = stage_members(self.structural.c, self.structural.d)
        self.assertEqual(stages, [(-2, [2], [0, 1]), (-1, [2], [0, 1]), (0, [0, 1, 2], [0, 1, 2])])

    def test_selection_follows_larger_coordinate(self):
        """|y| > |x| 이면 y 를 풀고 x, x' 가 상태. 반대면 y, y'"""
        cases = [(6.0, (2, 0, 0), ((0, 0), (0, 1))), (8.0, (0, 2, 0), ((1, 0), (1, 1)))]
        for x, delta, state in cases:
            with self.subTest(x=x):
                scheme = select_state_vector(self.aug, self.structural, _pendulum_point(x))
                self.assertEqual(scheme.delta, delta)
                self.assertEqual(scheme.state_items, state)
                self.assertEqual(scheme.dof, 2)
                self.assertAlmostEqual(scheme.quality, 0.8)
                self.assertEqual(scheme.stage_shapes[0].freedom, 1)

    def test_origin_is_not_sa_friendly(self):
        """x = y = 0 이면 J_{-2} 가 0 행렬"""
        point = ItemPoint.from_derivatives(0.0, [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0]])
        with self.assertRaises(NotSAFriendlyError):
            select_state_vector(self.aug, self.structural, point)

    def test_validate_dd_spec(self):
        """범위, 자유도, 단계 개수 위반"""
        self.assertTrue(validate_dd_spec((2, 0, 0), self.structural).ok)
        self.assertTrue(validate_dd_spec((0, 2, 0), self.structural).ok)
        cases = [
            ((2, 0), '길이', None),
            ((3, 0, 0), 'range', None),
            ((1, 0, 0), 'degree-of-freedom', None),
            ((1, 1, 0), 'stage count', -2),
        ]
        for delta, violation, stage in cases:
            with self.subTest(delta=delta):
                check = validate_dd_spec(delta, self.structural)
                self.assertFalse(check.ok)
                self.assertIn(violation, check.violation)
                self.assertEqual(check.stage, stage)

    def test_scheme_from_delta(self):
        """사용자 delta 로 스킴 구성, 잘못된 delta 는 ValidationException"""
        jac = system_jacobian(self.dae, self.structural, _pendulum_point(6.0))
        scheme = scheme_from_delta((0, 2, 0), self.structural, jac)
        self.assertEqual(scheme.state_items, state_items_for((0, 2, 0)))
        self.assertEqual(scheme.gk_columns[-2], (0,))
        self.assertAlmostEqual(scheme.quality, 0.6)
        self.assertIsNone(scheme_from_delta((0, 2, 0), self.structural).quality)
        with self.assertRaises(ValidationException):
            scheme_from_delta((1, 1, 0), self.structural)


class NewtonSolveTestCase(SimpleTestCase):
    """뉴턴 반복 테스트"""

    def test_scalar_root(self):
        """x^2 = 2"""
        result = newton_solve(lambda x: x ** 2 - 2.0, lambda x: np.diag(2.0 * x), np.array([1.0]), 1e-13)
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.x[0], math.sqrt(2.0), places=12)
        self.assertGreaterEqual(result.factorizations, 1)

    def test_already_converged(self):
        """초기값이 해이면 반복 없음"""
        result = newton_solve(lambda x: x - 1.0, lambda x: np.eye(1), np.array([1.0]), 1e-12)
        self.assertTrue(result.converged)
        self.assertEqual(result.iterations, 0)

    def test_failures_are_reported(self):
        """특이 야코비안, 해 없음"""
        singular = newton_solve(lambda x: x + 1.0, lambda x: np.zeros((1, 1)), np.array([0.0]), 1e-12)
        self.assertFalse(singular.converged)
        self.assertIn('특이', singular.message)
        no_root = newton_solve(
            lambda x: x ** 2 + 1.0, lambda x: np.diag(2.0 * x), np.array([0.5]), 1e-12, max_iter=10
        )
        self.assertFalse(no_root.converged)

    def test_small_step_is_not_convergence(self):
        """스텝이 작아도 잔차가 허용오차 위면 수렴이 아니다 (정체)"""
        result = newton_solve(lambda x: x - 1.0, lambda x: np.array([[1e12]]), np.array([0.0]), 1e-10)
        self.assertFalse(result.converged)
        self.assertIn('정체', result.message)
        self.assertGreater(result.residual_norm, 1e-10)


class ReducedOdeTestCase(PendulumFixtureMixin, SimpleTestCase):
    """축약 ODE 와 DD 전환 테스트"""

    def _reduced(self, x, delta):
        point = _pendulum_point(x)
        scheme = scheme_from_delta(delta, self.structural)
        return ReducedOde(self.aug, scheme, point, newton_tol=1e-12)

    def test_rhs_at_rest(self):
        """x = 6 정지: x' = 0, x'' = -x g y / l^2"""
        reduced = self._reduced(6.0, (2, 0, 0))
        self.assertEqual(reduced.state_labels(), ['x', "x'"])
        np.testing.assert_allclose(reduced.state(), [6.0, 0.0])
        rates = reduced.rhs(0.0, np.array([6.0, 0.0]))
        np.testing.assert_allclose(rates, [0.0, -6.0 * G * 8.0 / (L * L)], atol=1e-12)
        self.assertEqual(reduced.evaluations, 1)

    def test_rhs_solves_dependent_items(self):
        """상태를 바꾸면 y, y', lambda 가 구속을 만족하도록 풀린다"""
        reduced = self._reduced(6.0, (2, 0, 0))
        reduced.rhs(0.0, np.array([5.0, 1.0]))
        reduced.commit()
        expected = self.aug.pack(_pendulum_point(5.0, 1.0))
        np.testing.assert_allclose(reduced.items, expected, atol=1e-11)
        self.assertEqual(reduced.point().t, 0.0)

    def test_chart_failure(self):
        """길이를 넘는 x 는 y 를 풀 수 없다"""
        reduced = self._reduced(6.0, (2, 0, 0))
        with self.assertRaises(ChartFailureError):
            reduced.rhs(0.0, np.array([11.0, 0.0]))

    def test_eval_matches_rhs(self):
        """reduced_ode_eval 는 같은 차트의 rhs 와 같은 값"""
        state = np.array([5.0, 1.0])
        expected = self._reduced(6.0, (2, 0, 0)).rhs(0.0, state)
        reduced = self._reduced(6.0, (2, 0, 0))
        np.testing.assert_array_equal(reduced_ode_eval(reduced, 0.0, state), expected)
        self.assertEqual(reduced.evaluations, 1)

    def test_residual_above_tolerance_is_chart_failure(self):
        """뉴턴이 수렴을 보고해도 잔차가 newton_tol 위면 차트 실패"""
        reduced = self._reduced(6.0, (2, 0, 0))
        loose = NewtonResult(np.zeros(5), np.array([1e-6]), True, 1, 1)
        with patch('dummy_derivs.services.reduced_ode_service.newton_solve', return_value=loose):
            with self.assertRaises(ChartFailureError):
                reduced.rhs(0.0, np.array([5.0, 1.0]))

    def test_switch_keeps_items(self):
        """품질이 문턱값 아래면 차트만 바꾸고 항목 값은 그대로"""
        reduced = self._reduced(9.9, (2, 0, 0))
        before = reduced.items.copy()
        result = dd_switch(reduced, threshold=0.2)
        self.assertTrue(result.switched)
        self.assertEqual(result.scheme.delta, (0, 2, 0))
        self.assertLess(result.quality_before, 0.2)
        np.testing.assert_array_equal(reduced.items, before)
        y = math.sqrt(L * L - 9.9 ** 2)
        np.testing.assert_allclose(result.state, [y, 0.0])
        self.assertEqual(reduced.state_labels(), ['y', "y'"])

    @override_settings(DAE_SWITCH_THRESHOLD=0.1)
    def test_switch_threshold_from_settings(self):
        """품질 0.14 는 문턱값 0.1 에서 유지"""
        reduced = self._reduced(9.9, (2, 0, 0))
        result = dd_switch(reduced)
        self.assertFalse(result.switched)
        self.assertEqual(result.scheme.delta, (2, 0, 0))

    def test_switch_uses_given_jacobian(self):
        """미리 계산한 야코비안을 넘겨도 같은 결과"""
        reduced = self._reduced(9.9, (2, 0, 0))
        jac = system_jacobian(self.dae, self.structural, reduced.point())
        result = dd_switch(reduced, threshold=0.2, jacobian=jac)
        self.assertEqual(result.scheme.delta, (0, 2, 0))
