import numpy as np
from django.test import SimpleTestCase

from common.exceptions import InsufficientOrderError, ValidationException
from problems.catalog.pendulums import (
    build_controlled_pendulum,
    build_pendulum,
    build_pendulum_dae,
    build_theta_pendulum,
)
from taylor import functions as fn
from taylor.series import TaylorScalar

from .mechanics import dot, norm_sq, point_kinetic_energy, rod_kinetic_energy
from .services.setup_service import init_q_qp, second_kind_reference, setup_equations
from .system import DaeSystem, LagrangianSpec


def _random_series(rng, order, scale=1.0):
    return TaylorScalar(rng.normal(scale=scale, size=order + 1))


class SetupEquationsTestCase(SimpleTestCase):
    """라그랑주 방정식 생성 테스트"""

    def test_pendulum_matches_residual_form(self):
        """라그랑지안 진자 = m * (잔차 형태), lambda_L = m lambda / 2 (임의 점 100 개)"""
        params = {'m': 2.5, 'g': 9.81, 'l': 10.0}
        lagrangian = build_pendulum(params).to_dae()
        residual = build_pendulum_dae({'g': params['g'], 'l': params['l']})
        rng = np.random.default_rng(7)
        for _ in range(100):
            t = TaylorScalar.variable(float(rng.uniform(0, 10)), 4)
            x = _random_series(rng, 4, 5.0)
            y = _random_series(rng, 4, 5.0)
            lam = _random_series(rng, 4)
            f_lag = lagrangian.evaluate(t, [x, y, lam * (params['m'] / 2.0)])
            f_res = residual.evaluate(t, [x, y, lam])
            for i, scale in enumerate((params['m'], params['m'], 1.0)):
                expected = scale * f_res[i].coeffs[:3]
                actual = f_lag[i].coeffs[:3]
                np.testing.assert_allclose(actual, expected, rtol=1e-12, atol=1e-12 * np.max(np.abs(expected)))

    def test_theta_pendulum_equation(self):
        """m l^2 theta'' + m g l sin(theta)"""
        params = {'m': 1.5, 'g': 9.81, 'l': 2.0}
        dae = second_kind_reference(build_theta_pendulum(params))
        rng = np.random.default_rng(3)
        theta = _random_series(rng, 5)
        t = TaylorScalar.variable(0.0, 5)
        (f,) = dae.evaluate(t, [theta])
        m, g, l = params['m'], params['g'], params['l']
        expected = m * l * l * theta.diff(2) + m * g * l * fn.sin(theta)
        np.testing.assert_allclose(f.coeffs, expected.coeffs[:f.order + 1], rtol=1e-12, atol=1e-12)

    def test_controlled_pendulum_hook(self):
        """x = a sin(omega t) 이면 추적 방정식 D 가 0, A 에는 -u 가 더해진다"""
        params = {'m': 1.0, 'g': 9.8, 'l': 10.0, 'a': 1.0, 'omega': 0.9899494936611665}
        spec = build_controlled_pendulum(params)
        dae = spec.to_dae()
        self.assertEqual(dae.names, ['x', 'y', 'lambda', 'u'])
        t = TaylorScalar.variable(0.4, 4)
        x = params['a'] * fn.sin(params['omega'] * t)
        y = fn.sqrt(params['l'] ** 2 - fn.sqr(x))
        lam = TaylorScalar([0.3, 0.1, 0.0, 0.0, 0.0])
        u = TaylorScalar([0.7, -0.2, 0.0, 0.0, 0.0])
        f = dae.evaluate(t, [x, y, lam, u])
        np.testing.assert_allclose(f[3].coeffs, 0.0, atol=1e-14)
        np.testing.assert_allclose(f[2].coeffs, 0.0, atol=1e-12)
        plain = build_pendulum({'m': 1.0, 'g': 9.8, 'l': 10.0}).to_dae().evaluate(t, [x, y, lam])
        np.testing.assert_allclose(f[0].coeffs, (plain[0] - u).coeffs, atol=1e-13)

    def test_insufficient_order(self):
        """좌표 급수 차수가 2 보다 작으면 InsufficientOrderError"""
        with self.assertRaises(InsufficientOrderError):
            init_q_qp([TaylorScalar([1.0, 0.0])])

    def test_unconstrained_spec_is_second_kind(self):
        """구속이 있으면 제2종 변환 불가"""
        with self.assertRaises(ValidationException):
            second_kind_reference(build_pendulum({'m': 1.0, 'g': 9.81, 'l': 10.0}))

    def test_lagrangian_without_velocity_term(self):
        """dL/dq' 가 없는 좌표도 잔차가 만들어진다"""
        spec = LagrangianSpec(n_q=1, lagrangian=lambda t, q, qp, p: -fn.sqr(q[0]))
        (f,) = setup_equations(spec, TaylorScalar.variable(0.0, 3), [TaylorScalar([2.0, 1.0, 0.0, 0.0])])
        np.testing.assert_allclose(f.coeffs, [4.0, 2.0, 0.0, 0.0])


class SpecValidationTestCase(SimpleTestCase):
    """DaeSystem / LagrangianSpec 검증 테스트"""

    def test_default_names(self):
        """좌표 q0.., 승수 lambda, 방정식 A.."""
        spec = LagrangianSpec(
            n_q=2, lagrangian=lambda t, q, qp, p: 0.0, constraints=[lambda t, q, p: q[0]],
        )
        self.assertEqual(spec.names, ['q0', 'q1', 'lambda'])
        self.assertEqual(spec.to_dae().equation_names, ['A', 'B', 'C'])

    def test_invalid_specs(self):
        """잘못된 기술은 ValidationException"""
        cases = [
            ('no coordinates', lambda: LagrangianSpec(n_q=0, lagrangian=lambda *a: 0.0)),
            ('extra without hook', lambda: LagrangianSpec(n_q=1, lagrangian=lambda *a: 0.0, extra_names=['u'])),
            ('name count', lambda: LagrangianSpec(n_q=2, lagrangian=lambda *a: 0.0, q_names=['x'])),
            ('dae names', lambda: DaeSystem(n=2, residual=lambda t, z, p: z, names=['x'])),
        ]
        for name, build in cases:
            with self.subTest(case=name):
                with self.assertRaises(ValidationException):
                    build()

    def test_residual_count_is_checked(self):
        """잔차 개수가 n 과 다르면 ValidationException"""
        dae = DaeSystem(n=2, residual=lambda t, z, p: [z[0]], names=['x', 'y'])
        with self.assertRaises(ValidationException):
            dae.evaluate(0.0, [1.0, 2.0])


class MechanicsTestCase(SimpleTestCase):
    """역학 헬퍼 테스트"""

    def test_vector_helpers(self):
        self.assertEqual(dot([1.0, 2.0], [3.0, 4.0]), 11.0)
        self.assertEqual(norm_sq([3.0, 4.0]), 25.0)
        self.assertEqual(point_kinetic_energy(2.0, [3.0, 4.0]), 25.0)

    def test_rod_kinetic_energy_matches_quadrature(self):
        """막대 운동에너지 = 10^5 구간 중점 적분 (상대오차 1e-8)"""
        rng = np.random.default_rng(11)
        count = 100000
        s = (np.arange(count) + 0.5) / count
        for _ in range(5):
            m = float(rng.uniform(0.5, 3.0))
            r0dot, r1dot = rng.normal(size=2), rng.normal(size=2)
            velocity = r0dot[None, :] + s[:, None] * (r1dot - r0dot)[None, :]
            oracle = 0.5 * m * np.mean(np.sum(velocity ** 2, axis=1))
            value = rod_kinetic_energy(m, list(r0dot), list(r1dot))
            self.assertLessEqual(abs(value - oracle), 1e-8 * abs(oracle))
