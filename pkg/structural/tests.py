import itertools
import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from common.exceptions import (
    OffsetIterationError,
    StructuralSingularityError,
    UnsupportedStructureError,
    ValidationException,
)
from lagrangian.system import DaeSystem
from problems.catalog.pendulums import build_pendulum_dae
from problems.catalog.toy import build_toy_daes
from problems.registry import REGISTRY
from taylor import functions as fn

from .items import ItemPoint, coefficient_jacobian
from .services.analysis_service import (
    analyze,
    canonical_offsets,
    highest_value_transversal,
    index_and_dof,
    signature_matrix,
)
from .services.jacobian_service import estimate_rcond, sa_friendly_check, system_jacobian
from .signature import SignatureScalar

INF = -math.inf


def _pendulum_dae():
    return build_pendulum_dae({'g': 9.81, 'l': 10.0})


def _minimal_offsets_by_search(sigma, value, bound=4):
    """c 를 0..bound 에서 전수 탐색해 원소별 최소 (c, d) 를 찾는다"""
    n = sigma.shape[0]
    finite = np.isfinite(sigma)
    valid = []
    for c in itertools.product(range(bound + 1), repeat=n):
        c = np.array(c)
        d = np.where(finite, sigma + c[:, None], -np.inf).max(axis=0)
        if np.any(np.isinf(d)) or np.any(d < 0):
            continue
        if int(d.sum() - c.sum()) == value:
            valid.append((tuple(int(v) for v in c), tuple(int(v) for v in d)))
    best = [
        pair for pair in valid
        if all(all(a <= b for a, b in zip(pair[0], other[0])) for other in valid)
    ]
    return best[0] if best else None


class SignatureMatrixTestCase(SimpleTestCase):
    """시그니처 행렬 추출 테스트"""

    def test_pendulum_residual_form(self):
        """A = x'' + x lambda, B = y'' + y lambda - g, C = x^2 + y^2 - l^2"""
        sigma = signature_matrix(_pendulum_dae())
        expected = np.array([[2, INF, 0], [INF, 2, 0], [0, 0, INF]])
        np.testing.assert_array_equal(sigma, expected)

    def test_lagrangian_pendulum_matches_residual_form(self):
        """라그랑지안에서 만든 진자도 같은 Σ"""
        dae, _, _ = REGISTRY['pendulum'].build()
        np.testing.assert_array_equal(signature_matrix(dae), signature_matrix(_pendulum_dae()))

    def test_signature_scalar_arithmetic(self):
        """max 결합과 diff"""
        x, y = SignatureScalar.of_variable(0), SignatureScalar.of_variable(1)
        value = fn.sin(fn.diff(x, 2)) * y + 3.0
        self.assertEqual(value.orders, {0: 2, 1: 0})
        self.assertEqual(fn.diff(value, 1).orders, {0: 3, 1: 1})

    def test_value_dependent_branch_is_rejected(self):
        """값으로 분기하는 잔차 코드는 UnsupportedStructureError"""
        def residual(t, z, p):
            x, y = z
            return [x - y if x > 0 else x, y]

        dae = DaeSystem(n=2, residual=residual, names=['x', 'y'])
        with self.assertRaises(UnsupportedStructureError):
            signature_matrix(dae)


class TransversalTestCase(SimpleTestCase):
    """최대값 transversal 과 오프셋 테스트"""

    def test_highest_value_transversal(self):
        """반대각 합이 더 크면 반대각 선택"""
        sigma = np.array([[0.0, 5.0], [5.0, 0.0]])
        transversal, value = highest_value_transversal(sigma)
        self.assertEqual(transversal, ((0, 1), (1, 0)))
        self.assertEqual(value, 10)

    def test_structurally_singular(self):
        """x2 가 어디에도 없으면 구조적 특이"""
        dae = DaeSystem(n=2, residual=lambda t, z, p: [z[0] - 1.0, fn.sqr(z[0])], names=['x1', 'x2'])
        with self.assertRaises(StructuralSingularityError) as ctx:
            analyze(dae)
        self.assertEqual(len(ctx.exception.unmatched_rows), 1)
        self.assertEqual(ctx.exception.unmatched_cols, [1])
        self.assertEqual(ctx.exception.error_code, 'DAE_STRUCTURALLY_SINGULAR')

    def test_non_square_sigma(self):
        """정방이 아닌 Σ"""
        with self.assertRaises(ValidationException):
            highest_value_transversal(np.zeros((2, 3)))

    def test_non_maximal_transversal_does_not_converge(self):
        """최대가 아닌 transversal 로는 오프셋 반복이 끝나지 않는다"""
        sigma = np.array([[0.0, 5.0], [5.0, 0.0]])
        with self.assertRaises(OffsetIterationError):
            canonical_offsets(sigma, ((0, 0), (1, 1)))

    def test_index_and_dof(self):
        """nu = max c, DOF = sum d - sum c"""
        self.assertEqual(index_and_dof((0, 0, 2), (2, 2, 0)), (2, 2))
        self.assertEqual(index_and_dof((0, 0, 2, 2), (2, 2, 0, 0)), (2, 0))


class AnalyzeTestCase(SimpleTestCase):
    """구조 분석 결과 골든 테스트"""

    def test_pendulum_offsets(self):
        """진자: c=(0,0,2), d=(2,2,0), nu=2, DOF=2"""
        for name in ('pendulum', 'pendulum_dae'):
            with self.subTest(problem=name):
                dae, _, _ = REGISTRY[name].build()
                result = analyze(dae)
                self.assertEqual(result.c, (0, 0, 2))
                self.assertEqual(result.d, (2, 2, 0))
                self.assertEqual(result.nu, 2)
                self.assertEqual(result.dof, 2)
                self.assertEqual(result.value, 2)
                self.assertEqual(
                    result.jac_pattern, {(0, 0), (0, 2), (1, 1), (1, 2), (2, 0), (2, 1)}
                )

    def test_controlled_pendulum_offsets(self):
        """제어 진자: c=(0,0,2,2), d=(2,2,0,0), DOF=0"""
        dae, _, _ = REGISTRY['controlled_pendulum'].build()
        result = analyze(dae)
        self.assertEqual(result.c, (0, 0, 2, 2))
        self.assertEqual(result.d, (2, 2, 0, 0))
        self.assertEqual(result.dof, 0)

    def test_toy_offsets(self):
        """예제 DAE 오프셋"""
        expected = {
            'toy_ex1a': ((0, 0), (0, 1), 1),
            'toy_ex1b': ((1, 0), (0, 1), 0),
            'toy_ex1c': ((0, 0), (0, 1), 1),
        }
        for name, dae in build_toy_daes().items():
            with self.subTest(problem=name):
                result = analyze(dae)
                self.assertEqual((result.c, result.d, result.dof), expected[name])

    def test_offsets_are_elementwise_minimal(self):
        """n <= 4 인 내장 문제에서 정준 오프셋 = 전수 탐색 최소 쌍"""
        for name, problem in REGISTRY.items():
            dae, _, _ = problem.build()
            if dae.n > 4:
                continue
            with self.subTest(problem=name):
                result = analyze(dae)
                self.assertEqual(
                    (result.c, result.d), _minimal_offsets_by_search(result.sigma, result.value)
                )

    def test_offset_duality(self):
        """d_j - c_i >= sigma_ij, transversal 에서는 등호"""
        for name, problem in REGISTRY.items():
            with self.subTest(problem=name):
                dae, _, _ = problem.build()
                result = analyze(dae)
                c, d = np.array(result.c), np.array(result.d)
                gap = d[None, :] - c[:, None]
                finite = np.isfinite(result.sigma)
                self.assertTrue(np.all(gap[finite] >= result.sigma[finite]))
                for i, j in result.transversal:
                    self.assertEqual(gap[i, j], result.sigma[i, j])
                self.assertEqual(result.dof, int(d.sum() - c.sum()))


class SystemJacobianTestCase(SimpleTestCase):
    """시스템 야코비안과 SA-friendly 판정 테스트"""

    def setUp(self):
        self.dae = _pendulum_dae()
        self.structural = analyze(self.dae)
        g, y = 9.81, 8.0
        self.point = ItemPoint.from_derivatives(0.0, [[6.0, 0.0, 0.0], [8.0, 0.0, 0.0], [g / y]])

    def test_pendulum_jacobian(self):
        """J = [[1, 0, x], [0, 1, y], [2x, 2y, 0]]"""
        jac = system_jacobian(self.dae, self.structural, self.point)
        expected = np.array([[1.0, 0.0, 6.0], [0.0, 1.0, 8.0], [12.0, 16.0, 0.0]])
        np.testing.assert_allclose(jac, expected, atol=1e-13)

    def test_coefficient_jacobian_entry(self):
        """dF_C[2] / dX_x[2] = 2 x"""
        coeffs = self.point.truncated(self.structural.d).coeffs
        jac = coefficient_jacobian(self.dae, 0.0, coeffs, [(2, 2)], [(0, 2), (1, 2), (2, 0)])
        np.testing.assert_allclose(jac, [[12.0, 16.0, 0.0]], atol=1e-13)

    def test_coefficient_jacobian_on_moving_point(self):
        """C[1] = 2 x0 x1 + 2 y0 y1, C[2] = 2 x0 x2 + x1^2 + 2 y0 y2 + y1^2, A[0] = 2 x2 + x0 lambda0"""
        coeffs = [np.array([6.0, 0.5, 0.1]), np.array([8.0, -0.3, 0.2]), np.array([0.9])]
        rows = [(2, 2), (2, 1), (0, 0)]
        cols = [(0, 0), (0, 1), (0, 2), (1, 1), (2, 0)]
        jac = coefficient_jacobian(self.dae, 0.0, coeffs, rows, cols)
        expected = np.array([
            [0.2, 1.0, 12.0, -0.6, 0.0],
            [1.0, 12.0, 0.0, 16.0, 0.0],
            [0.9, 0.0, 2.0, 0.0, 6.0],
        ])
        np.testing.assert_allclose(jac, expected, atol=1e-13)

    def test_sa_friendly_at_consistent_point(self):
        """정칙 J"""
        result = sa_friendly_check(self.dae, self.structural, self.point)
        self.assertTrue(result.friendly)
        self.assertGreater(result.rcond, 1e-3)

    def test_not_sa_friendly_at_origin(self):
        """x = y = 0 이면 C'' 행이 0"""
        point = ItemPoint.from_derivatives(0.0, [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0]])
        result = sa_friendly_check(self.dae, self.structural, point)
        self.assertFalse(result.friendly)
        self.assertEqual(result.rcond, 0.0)

    @override_settings(DAE_SINGULAR_RCOND=0.9)
    def test_threshold_from_settings(self):
        """판정 문턱값은 DAE_SINGULAR_RCOND"""
        result = sa_friendly_check(self.dae, self.structural, self.point)
        self.assertFalse(result.friendly)
        self.assertIn('rcond', result.reason)

    def test_estimate_rcond(self):
        """단위행렬 1, 특이행렬 0, 빈 행렬 1"""
        cases = [
            ('identity', np.eye(3), 1.0),
            ('singular', np.ones((2, 2)), 0.0),
            ('empty', np.zeros((0, 0)), 1.0),
            ('zero', np.zeros((2, 2)), 0.0),
        ]
        for name, matrix, expected in cases:
            with self.subTest(case=name):
                self.assertAlmostEqual(estimate_rcond(matrix), expected)
