import math
from unittest.mock import Mock

import numpy as np
from django.test import SimpleTestCase, override_settings, tag
from scipy.integrate import solve_ivp

from common.exceptions import InconsistentInitialConditionError, IntegrationError, ValidationException
from problems.catalog.pendulums import build_pendulum_dae, pendulum_dae_energy
from structural.items import evaluate_series
from structural.services.analysis_service import analyze
from structural.services.jacobian_service import system_jacobian

from .serializers import IntegrationOptionsSerializer, TrajectoryStatsSerializer
from .services.consistent_init_service import consistent_initialize, fixed_delta
from .services.dense_output_service import dense_output
from .services.divergence_service import DivergenceReport, tolerance_divergence
from .services.ivp_service import integrate
from .services.rk_service import _A, _B5, _C, _TR, _attempt, rk_integrate
from .services.taylor_service import factor_jacobian, taylor_expand
from .trajectory import IvpConfig, TrajectoryBuilder, TrajectoryStats

G = 9.81
L = 10.0
PARAMS = {'g': G, 'l': L}
IC_AT_REST = {'fixed': {'x': 6.0, "x'": 0.0}, 'guess': {'y': 7.5}}


def _theta_reference(t_end):
    """각도 좌표 theta'' = -(g/l) sin(theta) 를 정밀하게 풀어 x(t_end) 를 구한다"""
    solution = solve_ivp(
        lambda t, s: [s[1], -(G / L) * math.sin(s[0])],
        (0.0, t_end), [math.asin(0.6), 0.0], method='DOP853', rtol=1e-13, atol=1e-13,
    )
    return L * math.sin(solution.y[0, -1])


class PendulumMixin:
    def setUp(self):
        self.dae = build_pendulum_dae(PARAMS)
        self.structural = analyze(self.dae)


class ConsistentInitTestCase(PendulumMixin, SimpleTestCase):
    """일관된 초기점 테스트"""

    def test_pendulum_at_rest(self):
        """x = 6 고정 -> y = 8, lambda = g y / l^2"""
        point = consistent_initialize(self.dae, self.structural, IC_AT_REST, 0.0, 1e-12)
        x, y, lam = point.derivatives()
        np.testing.assert_allclose(x, [6.0, 0.0, -6.0 * 0.7848], atol=1e-10)
        np.testing.assert_allclose(y[:2], [8.0, 0.0], atol=1e-10)
        self.assertAlmostEqual(lam[0], G * 8.0 / (L * L), places=10)

    def test_pendulum_hanging(self):
        """x = 0 -> y = 10, lambda = 0.981"""
        spec = {'fixed': {'x': 0.0, "x'": 0.0}, 'guess': {'y': 9.0}}
        point = consistent_initialize(self.dae, self.structural, spec, 0.0, 1e-12)
        _, y, lam = point.derivatives()
        self.assertAlmostEqual(y[0], 10.0, places=10)
        self.assertAlmostEqual(lam[0], 0.981, places=10)

    def test_fixed_items_must_form_a_state_set(self):
        """고정 항목 검증"""
        self.assertEqual(fixed_delta(self.structural, self.dae.names, {'x': 6.0, "x'": 0.0}), (2, 0, 0))
        cases = [
            ('highest level', {'x': 6.0, "x'": 0.0, "x''": 1.0}),
            ('gap', {"x'": 0.0, "y'": 0.0}),
            ('dof', {'x': 6.0}),
            ('stage', {'x': 6.0, 'y': 8.0}),
            ('unknown', {'z': 1.0, "x'": 0.0}),
            ('too high', {"x'''": 1.0}),
        ]
        for name, fixed in cases:
            with self.subTest(case=name):
                with self.assertRaises(ValidationException):
                    fixed_delta(self.structural, self.dae.names, fixed)

    def test_overlap_between_fixed_and_guess(self):
        spec = {'fixed': {'x': 6.0, "x'": 0.0}, 'guess': {'x': 5.0}}
        with self.assertRaises(ValidationException):
            consistent_initialize(self.dae, self.structural, spec, 0.0, 1e-12)

    def test_inconsistent_fixed_values(self):
        """x > l 이면 구속을 만족할 수 없다"""
        spec = {'fixed': {'x': 11.0, "x'": 0.0}, 'guess': {'y': 1.0}}
        with self.assertRaises(InconsistentInitialConditionError) as ctx:
            consistent_initialize(self.dae, self.structural, spec, 0.0, 1e-12)
        self.assertTrue(ctx.exception.worst_residuals)
        self.assertEqual(ctx.exception.error_code, 'DAE_INCONSISTENT_IC')


class DenseOutputTestCase(SimpleTestCase):
    """에르미트 조밀 출력 테스트"""

    def setUp(self):
        builder = TrajectoryBuilder(((0, 0), (0, 1)), ('x',), (1,), 'taylor')
        for t in (0.0, 0.5, 1.3, 2.0):
            builder.append(t, [t ** 3 - 2 * t, 3 * t * t - 2], [3 * t * t - 2, 6 * t])
        self.traj = builder.build()

    def test_cubic_is_reproduced(self):
        """3 차 이하 다항식은 정확히 보간된다"""
        times = np.array([0.1, 0.7, 1.9])
        values = dense_output(self.traj, times)
        np.testing.assert_allclose(values[:, 0], times ** 3 - 2 * times, atol=1e-13)
        np.testing.assert_allclose(values[:, 1], 3 * times ** 2 - 2, atol=1e-13)

    def test_knots_return_samples(self):
        np.testing.assert_array_equal(dense_output(self.traj, 1.3), self.traj.items[2])
        self.assertEqual(dense_output(self.traj, 0.7).shape, (2,))

    def test_out_of_range(self):
        for t in (-0.1, 2.5, float('nan')):
            with self.subTest(t=t):
                with self.assertRaises(ValidationException):
                    dense_output(self.traj, t)

    def test_single_sample(self):
        builder = TrajectoryBuilder(((0, 0),), ('x',), (0,), 'taylor')
        builder.append(0.0, [1.5], [0.0])
        traj = builder.build()
        np.testing.assert_array_equal(dense_output(traj, 0.0), [1.5])
        self.assertEqual(traj.stats.h_min, 0.0)


class IvpConfigTestCase(SimpleTestCase):
    """적분 설정 테스트"""

    def test_invalid_values(self):
        cases = [
            ('tol', {'tol': 0.0}),
            ('order', {'order': 0}),
            ('t_end', {'t_end': 0.0}),
            ('max_steps', {'max_steps': 0}),
        ]
        for name, kwargs in cases:
            with self.subTest(field=name):
                with self.assertRaises(ValidationException):
                    IvpConfig(**kwargs)

    @override_settings(DAE_TOL=1e-6, DAE_NEWTON_TOL_FACTOR=0.01, DAE_TAYLOR_ORDER=10)
    def test_from_settings(self):
        """newton_tol = DAE_NEWTON_TOL_FACTOR * tol, None 인 인자는 무시"""
        cfg = IvpConfig.from_settings()
        self.assertEqual(cfg.tol, 1e-6)
        self.assertEqual(cfg.order, 10)
        self.assertAlmostEqual(cfg.newton_tol, 1e-8, delta=1e-20)
        cfg = IvpConfig.from_settings(tol=1e-4, order=None, t_end=3.0)
        self.assertEqual((cfg.tol, cfg.order, cfg.t_end), (1e-4, 10, 3.0))

    def test_with_tol_keeps_newton_ratio(self):
        cfg = IvpConfig(tol=1e-6, newton_tol=1e-8).with_tol(1e-9)
        self.assertAlmostEqual(cfg.newton_tol, 1e-11, delta=1e-22)


class TaylorIntegrationTestCase(PendulumMixin, SimpleTestCase):
    """테일러 급수 적분 테스트"""

    def setUp(self):
        super().setUp()
        self.point = consistent_initialize(self.dae, self.structural, IC_AT_REST, 0.0, 1e-12)

    def test_expansion_satisfies_equations(self):
        """생성한 계수로 평가한 잔차 급수는 p + c_i 차까지 0"""
        jac = system_jacobian(self.dae, self.structural, self.point)
        rows = taylor_expand(self.dae, self.structural, self.point, factor_jacobian(jac, 0.0), 8)
        self.assertEqual([row.size for row in rows], [11, 11, 9])
        for i, series in enumerate(evaluate_series(self.dae, 0.0, rows)):
            with self.subTest(equation=self.dae.equation_names[i]):
                np.testing.assert_allclose(series.coeffs[:8 + self.structural.c[i] + 1], 0.0, atol=1e-10)

    def test_singular_jacobian(self):
        with self.assertRaises(IntegrationError):
            factor_jacobian(np.ones((3, 3)), 1.5)

    def test_pendulum_against_angle_form(self):
        """x(2) 가 각도 좌표 기준해와 일치하고 구속과 에너지가 유지된다"""
        cfg = IvpConfig(tol=1e-10, order=12, t_end=2.0, newton_tol=1e-12)
        traj = integrate(self.dae, self.structural, self.point, cfg)
        self.assertEqual(traj.times[-1], 2.0)
        self.assertGreater(traj.stats.accepted, 0)
        self.assertLessEqual(traj.stats.h_min, traj.stats.h_max)
        self.assertAlmostEqual(traj.column('x')[-1], _theta_reference(2.0), delta=1e-6)

        x, y = traj.column('x'), traj.column('y')
        np.testing.assert_allclose(x ** 2 + y ** 2, L * L, atol=1e-9)
        energy = [pendulum_dae_energy(PARAMS, traj.sample(i)) for i in range(len(traj.times))]
        self.assertLess(np.max(np.abs(np.array(energy) - energy[0])) / abs(energy[0]), 1e-7)

    def test_trajectory_helpers(self):
        cfg = IvpConfig(tol=1e-8, order=10, t_end=0.5, newton_tol=1e-10)
        traj = integrate(self.dae, self.structural, self.point, cfg)
        self.assertEqual(traj.output_labels(), ['x', "x'", 'y', "y'", 'lambda'])
        frame = traj.to_dataframe()
        self.assertEqual(list(frame.columns), ['t', 'x', "x'", 'y', "y'", 'lambda'])
        self.assertEqual(len(frame), len(traj.times))
        self.assertEqual(traj.positions().shape, (3,))
        with self.assertRaises(ValidationException):
            traj.column('z')

    def test_method_checks(self):
        cfg = IvpConfig(t_end=0.1)
        with self.assertRaises(ValidationException):
            integrate(self.dae, self.structural, self.point, cfg, method='euler')
        with self.assertRaises(ValidationException):
            integrate(self.dae, self.structural, self.point, cfg, dd_spec=(2, 0, 0))


class RungeKuttaTableauTestCase(SimpleTestCase):
    """RKF45 계수표 테스트"""

    def test_row_sums_match_nodes(self):
        """sum_j a_ij = c_i, sum b = 1, sum (b5 - b4) = 0"""
        for i in range(1, len(_C)):
            with self.subTest(stage=i):
                self.assertEqual(len(_A[i]), i)
                self.assertAlmostEqual(sum(_A[i]), _C[i], places=14)
        self.assertAlmostEqual(sum(_B5), 1.0, places=14)
        self.assertAlmostEqual(sum(_TR), 0.0, places=14)

    def test_single_step_on_exponential(self):
        """y' = y, h = 0.1: 5 차 해 오차 ~ h^6 / 1100, 오차 추정 ~ h^5 (1/120 - 1/104)"""
        reduced = Mock(rhs=lambda t, y: y)
        h = 0.1
        y_new, err = _attempt(reduced, 0.0, np.array([1.0]), np.array([1.0]), h)
        self.assertLess(abs(y_new[0] - math.exp(h)), 2e-9)
        self.assertGreater(abs(err[0]), 1e-8)
        self.assertLess(abs(err[0]), 2e-8)


@tag('slow')
class DummyDerivativeIntegrationTestCase(PendulumMixin, SimpleTestCase):
    """축약 ODE RK 적분 테스트"""

    def setUp(self):
        super().setUp()
        self.point = consistent_initialize(self.dae, self.structural, IC_AT_REST, 0.0, 1e-12)

    def test_pendulum_against_angle_form(self):
        cfg = IvpConfig(tol=1e-8, t_end=1.0, newton_tol=1e-12)
        traj = integrate(self.dae, self.structural, self.point, cfg, method='dd-rk')
        self.assertEqual(traj.method, 'dd-rk')
        self.assertEqual(traj.times[-1], 1.0)
        reference = _theta_reference(1.0)
        self.assertAlmostEqual(traj.column('x')[-1], reference, delta=100 * cfg.tol * (1 + abs(reference)))
        np.testing.assert_allclose(traj.column('x') ** 2 + traj.column('y') ** 2, L * L, atol=1e-9)
        self.assertEqual(len(traj.deltas), len(traj.times))

    def test_start_chart_from_dd_spec(self):
        cfg = IvpConfig(tol=1e-6, t_end=0.2, newton_tol=1e-10)
        traj = integrate(self.dae, self.structural, self.point, cfg, method='dd-rk', dd_spec=(0, 2, 0))
        self.assertEqual(traj.deltas[0], (0, 2, 0))

    def test_zero_dof_is_rejected(self):
        with self.assertRaises(ValidationException):
            rk_integrate(Mock(structural=Mock(dof=0)), IvpConfig())

    def test_tolerance_divergence(self):
        """허용오차를 줄이면 두 해의 차이가 coarse tol 수준"""
        cfg = IvpConfig(tol=1e-6, order=10, t_end=1.0, newton_tol=1e-9)
        report = tolerance_divergence(self.dae, self.structural, self.point, cfg, 1e-9, times=(0.5, 1.0))
        self.assertEqual(len(report.differences), 2)
        self.assertLess(report.max_difference, 1e-4)
        self.assertGreater(report.digits, 4.0)
        with self.assertRaises(ValidationException):
            tolerance_divergence(self.dae, self.structural, self.point, cfg, 1e-3)

    def test_matches_taylor_over_one_period(self):
        """한 주기 (t = 6.5) 끝에서 dd-rk 와 테일러 해의 차이가 100 tol (1 + |x|) 이하"""
        rk_cfg = IvpConfig(tol=1e-8, t_end=6.5, newton_tol=1e-10)
        rk = integrate(self.dae, self.structural, self.point, rk_cfg, method='dd-rk')
        taylor = integrate(self.dae, self.structural, self.point, IvpConfig(tol=1e-10, t_end=6.5, newton_tol=1e-12))
        for label in ('x', "x'", 'y', "y'"):
            with self.subTest(label=label):
                expected = taylor.column(label)[-1]
                self.assertAlmostEqual(
                    rk.column(label)[-1], expected, delta=100 * rk_cfg.tol * (1 + abs(expected))
                )
        reference = _theta_reference(6.5)
        self.assertAlmostEqual(rk.column('x')[-1], reference, delta=100 * rk_cfg.tol * (1 + abs(reference)))

    def test_full_rotation_switches_chart(self):
        """x = 0, x' = 25 에서 출발하면 꼭대기를 넘어 돌며 상태 벡터를 여러 번 바꾼다"""
        spec = {'fixed': {'x': 0.0, "x'": 25.0}, 'guess': {'y': 9.0}}
        point = consistent_initialize(self.dae, self.structural, spec, 0.0, 1e-10)
        cfg = IvpConfig(tol=1e-8, t_end=3.0, newton_tol=1e-10)
        traj = integrate(self.dae, self.structural, point, cfg, method='dd-rk')

        self.assertEqual(traj.times[-1], 3.0)
        self.assertGreaterEqual(traj.stats.switches, 2)
        self.assertIn((2, 0, 0), traj.deltas)
        self.assertIn((0, 2, 0), traj.deltas)

        x, y = traj.column('x'), traj.column('y')
        self.assertLessEqual(np.max(np.abs(x ** 2 + y ** 2 - L * L)), 50 * cfg.tol)

        # 속력은 25 이하이므로 전환 전후 위치가 연속
        changes = [i for i in range(1, len(traj.deltas)) if traj.deltas[i] != traj.deltas[i - 1]]
        self.assertGreaterEqual(len(changes), 2)
        for i in changes:
            with self.subTest(sample=i):
                dt = traj.times[i] - traj.times[i - 1]
                self.assertLessEqual(abs(x[i] - x[i - 1]), 26.0 * dt)
                self.assertLessEqual(abs(y[i] - y[i - 1]), 26.0 * dt)

        energy = 0.5 * (traj.column("x'") ** 2 + traj.column("y'") ** 2) - G * y
        self.assertLessEqual(np.max(np.abs(energy - energy[0])), 1e-5 * abs(energy[0]))

    def test_same_input_same_output(self):
        """같은 입력이면 같은 궤적"""
        cfg = IvpConfig(tol=1e-6, t_end=1.0, newton_tol=1e-9)
        runs = []
        for _ in range(2):
            point = consistent_initialize(self.dae, self.structural, IC_AT_REST, 0.0, 1e-12)
            runs.append(integrate(self.dae, self.structural, point, cfg, method='dd-rk'))
        first, second = runs
        np.testing.assert_array_equal(first.times, second.times)
        np.testing.assert_array_equal(first.items, second.items)
        self.assertEqual(first.deltas, second.deltas)
        self.assertEqual(first.stats.accepted, second.stats.accepted)

    def test_error_shrinks_with_tol(self):
        """tol 1e-5, 1e-7, 1e-9: 오차가 줄고 각각 100 tol (1 + |x|) 이하"""
        reference = _theta_reference(2.0)
        errors = []
        for tol in (1e-5, 1e-7, 1e-9):
            cfg = IvpConfig(tol=tol, t_end=2.0, newton_tol=0.01 * tol)
            traj = integrate(self.dae, self.structural, self.point, cfg, method='dd-rk')
            error = abs(traj.column('x')[-1] - reference)
            with self.subTest(tol=tol):
                self.assertLessEqual(error, 100 * tol * (1 + abs(reference)))
            errors.append(error)
        self.assertGreater(errors[0], errors[1])
        self.assertGreater(errors[1], errors[2])


class SerializerTestCase(SimpleTestCase):
    """적분 옵션/통계 직렬화 테스트"""

    def test_options(self):
        serializer = IntegrationOptionsSerializer(data={'tol': '1e-6', 'method': 'dd-rk'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['tol'], 1e-6)
        self.assertIsNone(serializer.validated_data['order'])

    def test_invalid_options(self):
        cases = [
            ('tol', {'tol': 0}),
            ('t_end', {'t_end': -1}),
            ('method', {'method': 'euler'}),
            ('order', {'order': 0}),
        ]
        for field, data in cases:
            with self.subTest(field=field):
                serializer = IntegrationOptionsSerializer(data=data)
                self.assertFalse(serializer.is_valid())
                self.assertIn(field, serializer.errors)

    def test_stats(self):
        stats = TrajectoryStats(accepted=3, rejected=1, h_min=0.1, h_max=0.5, cpu_s=0.2, jacobians=4)
        data = TrajectoryStatsSerializer(stats).data
        self.assertEqual(data['steps'], 3)
        self.assertEqual(data['jacobians'], 4)
        self.assertEqual(data['switches'], 0)

    def test_divergence_report_digits(self):
        self.assertAlmostEqual(DivergenceReport(1e-6, 1e-9, (1.0,), (1e-7,)).digits, 7.0, places=12)
        self.assertEqual(DivergenceReport(1e-6, 1e-9, (1.0,), (0.0,)).digits, math.inf)
