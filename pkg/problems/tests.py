import json
import math
import os
import tempfile
from io import StringIO
from unittest.mock import patch

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag

from common.exceptions import ProblemNotFoundException, ValidationException
from integrator.services.ivp_service import integrate
from integrator.trajectory import IvpConfig, TrajectoryBuilder
from structural.services.analysis_service import analyze

from .catalog.planets import load_detest_c5
from .catalog.spring_mass import theta_rod_end
from .cli import cli_main
from .definition import ProblemDef
from .management.commands.analyze import format_sigma_table
from .management.commands.solve import output_grid
from .registry import REGISTRY, get_problem, list_problems
from .serializers import ToyParamsSerializer
from .services.problem_service import coerce_values, prepare_problem, resolve_initial_conditions
from .services.solve_service import invariant_drift, run_sweep, solve_prepared


class RegistryTestCase(SimpleTestCase):
    """내장 문제 레지스트리 테스트"""

    def test_builtin_problems(self):
        expected = {
            'pendulum', 'pendulum_dae', 'theta_pendulum', 'controlled_pendulum', 'double_pendulum',
            'spring_mass_chain', 'spring_mass_theta', 'planets', 'toy_ex1a', 'toy_ex1b', 'toy_ex1c',
        }
        self.assertEqual(set(REGISTRY), expected)
        names = [problem.name for problem in list_problems()]
        self.assertEqual(names, sorted(names))

    def test_unknown_name_suggests(self):
        """오타는 비슷한 이름을 제안"""
        with self.assertRaises(ProblemNotFoundException) as ctx:
            get_problem('pendulm')
        self.assertIn('pendulum', ctx.exception.suggestions)
        self.assertEqual(ctx.exception.error_code, 'DAE_PROBLEM_NOT_FOUND')

    def test_structure_of_builtin_problems(self):
        """크기와 자유도"""
        expected = {
            'double_pendulum': (6, 4),
            'spring_mass_chain': (4, 4),
            'spring_mass_theta': (2, 4),
            'planets': (15, 30),
            'controlled_pendulum': (4, 0),
        }
        for name, (n, dof) in expected.items():
            with self.subTest(problem=name):
                dae, _, _ = REGISTRY[name].build()
                self.assertEqual((dae.n, analyze(dae).dof), (n, dof))

    def test_chain_size_follows_rod_count(self):
        dae, spec, params = REGISTRY['spring_mass_chain'].build({'n': 3})
        self.assertEqual(dae.n, 10)
        self.assertEqual(analyze(dae).dof, 8)
        self.assertEqual(spec.multiplier_names, ['lambda1', 'lambda2', 'lambda3'])

    def test_planet_fixture(self):
        """체크섬이 맞는 내장 데이터"""
        data = load_detest_c5()
        self.assertEqual(len(data['bodies']), 6)
        self.assertAlmostEqual(data['G'], 2.95912208286)


class ParamsValidationTestCase(SimpleTestCase):
    """물리 파라미터 검증 테스트"""

    def test_defaults(self):
        params = REGISTRY['pendulum'].validate_params()
        self.assertEqual(params, {'m': 1.0, 'g': 9.81, 'l': 10.0})

    def test_controlled_pendulum_omega_default(self):
        """omega 생략 시 sqrt(g/l)"""
        params = REGISTRY['controlled_pendulum'].validate_params({'l': 4.9})
        self.assertAlmostEqual(params['omega'], math.sqrt(9.8 / 4.9))

    def test_invalid_params(self):
        cases = [
            ('pendulum', {'mass': 1.0}),
            ('pendulum', {'m': 0.0}),
            ('pendulum_dae', {'l': -1.0}),
            ('controlled_pendulum', {'a': 20.0}),
            ('spring_mass_chain', {'n': 0}),
            ('planets', {'masses': '1.0,-2.0'}),
            ('toy_ex1a', {'g': 1.0}),
        ]
        for name, params in cases:
            with self.subTest(problem=name, params=params):
                with self.assertRaises(ValidationException):
                    REGISTRY[name].validate_params(params)

    def test_list_param_from_text(self):
        """쉼표 구분 목록 파라미터"""
        params = REGISTRY['planets'].validate_params({'masses': '1.0,0.001'})
        self.assertEqual(params['masses'], [1.0, 0.001])


class InitialConditionTestCase(SimpleTestCase):
    """초기조건 병합과 문제 준비 테스트"""

    defaults = {'fixed': {'x': 6.0, "x'": 0.0}, 'guess': {'y': 8.0}}

    def test_ic_updates_fixed_or_guess(self):
        """--ic 는 고정 항목이면 고정값, 아니면 추정값"""
        spec = resolve_initial_conditions(self.defaults, ic={'x': 5.0, 'y': 8.5, 'lambda': 1.0})
        self.assertEqual(spec['fixed'], {'x': 5.0, "x'": 0.0})
        self.assertEqual(spec['guess'], {'y': 8.5, 'lambda': 1.0})

    def test_fixed_replaces_fixed_set(self):
        """--fixed 는 고정 집합 교체, 기존 고정값은 추정값으로"""
        spec = resolve_initial_conditions(self.defaults, fixed={'y': 8.0, "y'": 0.0})
        self.assertEqual(spec['fixed'], {'y': 8.0, "y'": 0.0})
        self.assertEqual(spec['guess'], {'x': 6.0, "x'": 0.0})

    def test_non_numeric_ic(self):
        with self.assertRaises(ValidationException):
            resolve_initial_conditions(self.defaults, ic={'x': 'abc'})

    def test_coerce_values(self):
        values = coerce_values({'a': '2', 'b': 'pi/2', 'masses': '1,2'})
        self.assertEqual(values['a'], 2)
        self.assertAlmostEqual(values['b'], math.pi / 2)
        self.assertEqual(values['masses'], '1,2')

    def test_prepare_problem(self):
        prepared = prepare_problem('pendulum_dae', newton_tol=1e-12)
        self.assertAlmostEqual(prepared.point.derivatives()[1][0], 8.0, places=10)
        self.assertIsNone(prepare_problem('pendulum_dae', initialize=False).point)
        with self.assertRaises(ValidationException):
            prepare_problem('pendulum_dae')

    def test_lagrangian_multiplier_scaling(self):
        """라그랑지안 진자의 승수는 m lambda_DAE / 2"""
        prepared = prepare_problem('pendulum', params={'m': 3.0}, newton_tol=1e-12)
        lam = prepared.point.derivatives()[2][0]
        self.assertAlmostEqual(lam, 3.0 * (9.81 * 8.0 / 100.0) / 2.0, places=10)


class SolveServiceTestCase(SimpleTestCase):
    """풀이 서비스 테스트"""

    def _trajectory(self, values):
        builder = TrajectoryBuilder(((0, 0),), ('x',), (0,), 'taylor')
        for t, value in enumerate(values):
            builder.append(float(t), [value], [0.0])
        return builder.build()

    def test_invariant_drift(self):
        """I(0) != 0 이면 상대, I(0) = 0 이면 절대 드리프트"""
        problem = ProblemDef(
            name='drift_check', builder=lambda p: None, serializer_class=ToyParamsSerializer,
            invariants={'x': lambda p, s: s['x']},
        )
        self.assertAlmostEqual(invariant_drift(problem, {}, self._trajectory([2.0, 2.2, 1.9]))['x'], 0.1)
        self.assertAlmostEqual(invariant_drift(problem, {}, self._trajectory([0.0, 0.1, -0.2]))['x'], 0.2)

    def test_theta_pendulum_energy_drift(self):
        cfg = IvpConfig(tol=1e-10, order=12, t_end=3.0, newton_tol=1e-12)
        prepared = prepare_problem('theta_pendulum', newton_tol=cfg.newton_tol)
        traj = solve_prepared(prepared, cfg)
        self.assertLess(invariant_drift(prepared.problem, prepared.params, traj)['energy'], 1e-7)

    def test_solve_requires_initialized_point(self):
        prepared = prepare_problem('theta_pendulum', initialize=False)
        with self.assertRaises(ValidationException):
            solve_prepared(prepared, IvpConfig(t_end=1.0))

    def test_sweep_captures_failures(self):
        """실패한 값은 오류 메시지로, 입력 순서 유지"""
        cfg = IvpConfig(tol=1e-6, order=8, t_end=0.3, newton_tol=1e-9)
        results = run_sweep('theta_pendulum', 'l', [5.0, -1.0], None, cfg, watch=['theta'], workers=2)
        self.assertEqual([result.value for result in results], [5.0, -1.0])
        self.assertTrue(results[0].ok)
        self.assertAlmostEqual(results[0].watched['theta'], 0.5)
        self.assertFalse(results[1].ok)
        self.assertIn('DAE_VALIDATION', results[1].error)

    def test_sweep_unknown_watch_label(self):
        cfg = IvpConfig(tol=1e-6, order=8, t_end=0.1, newton_tol=1e-9)
        (result,) = run_sweep('theta_pendulum', 'l', [5.0], None, cfg, watch=['phi'])
        self.assertFalse(result.ok)


class CommandTestCase(SimpleTestCase):
    """관리 명령 출력 테스트"""

    def _call(self, *args):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def test_list(self):
        out, _ = self._call('list')
        self.assertEqual(len(out.strip().splitlines()), len(REGISTRY))
        line = next(row for row in out.splitlines() if row.startswith('pendulum_dae'))
        self.assertIn('DOF=2', line)

    def test_analyze(self):
        out, _ = self._call('analyze', 'pendulum_dae')
        self.assertIn('c = (0, 0, 2)', out)
        self.assertIn('d = (2, 2, 0)', out)
        self.assertIn('index nu = 2', out)
        self.assertIn('DOF = 2', out)
        self.assertIn('SA-friendly at default ICs', out)

        out, _ = self._call('analyze', 'controlled_pendulum', '--no-check')
        self.assertIn('DOF = 0', out)
        self.assertNotIn('SA-friendly', out)

    def test_sigma_table(self):
        dae, _, _ = REGISTRY['pendulum_dae'].build()
        table = format_sigma_table(analyze(dae)).splitlines()
        self.assertEqual(table[0].split(), ['x', 'y', 'lambda', 'c_i'])
        self.assertEqual(table[-1].split(), ['d_j', '2', '2', '0'])
        cells = table[3].split()
        self.assertEqual(cells[0], 'C')
        self.assertEqual([cell.rstrip('*') for cell in cells[1:]], ['0', '0', '-', '2'])
        self.assertEqual(''.join(table[1:4]).count('*'), 3)

    def test_reduce(self):
        out, _ = self._call('reduce', 'pendulum_dae')
        self.assertIn('equations (5): A, B, C, C\', C\'\'', out)
        self.assertIn('J_k 1x2', out)
        self.assertIn('delta = (2, 0, 0)', out)
        self.assertIn("S = {x, x'} (DOF 2)", out)

        out, _ = self._call('reduce', 'pendulum_dae', '--dd-spec', '0,2,0')
        self.assertIn("S = {y, y'} (DOF 2)", out)

    def test_reduce_invalid_dd_spec(self):
        for spec in ('1,1,0', 'a,b'):
            with self.subTest(spec=spec):
                with self.assertRaises(CommandError) as ctx:
                    self._call('reduce', 'pendulum_dae', '--dd-spec', spec)
                self.assertEqual(ctx.exception.returncode, 1)

    def test_solve_csv_on_grid(self):
        out, err = self._call(
            'solve', 'theta_pendulum', '--t-end', '0.5', '--tol', '1e-8', '--order', '10', '--dt', '0.25',
        )
        lines = out.strip().splitlines()
        self.assertEqual(lines[0], "t,theta,theta'")
        self.assertEqual(len(lines), 4)
        self.assertEqual([float(row.split(',')[0]) for row in lines[1:]], [0.0, 0.25, 0.5])
        self.assertEqual(float(lines[1].split(',')[1]), 0.5)
        self.assertIn('steps=', err)

    def test_solve_json_with_out_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'traj.csv')
            out, _ = self._call(
                'solve', 'pendulum_dae', '--t-end', '0.5', '--tol', '1e-8', '--out', path, '--json',
            )
            with open(path, encoding='utf-8') as handle:
                header = handle.readline().strip()
        payload = json.loads(out)
        self.assertEqual(header, "t,x,x',y,y',lambda")
        self.assertEqual(payload['problem'], 'pendulum_dae')
        self.assertEqual(payload['t_end'], 0.5)
        for key in ('steps', 'rejected', 'h_min', 'h_max', 'switches', 'cpu_s', 'samples'):
            self.assertIn(key, payload)
        self.assertLess(payload['invariant_drift']['energy'], 1e-6)

    def test_solve_sweep(self):
        out, _ = self._call(
            'solve', 'theta_pendulum', '--t-end', '0.2', '--tol', '1e-6', '--sweep', 'l=5,-1', '--watch', 'theta',
        )
        lines = out.strip().splitlines()
        self.assertTrue(lines[0].startswith('l=5 steps='))
        self.assertIn('max|theta|=0.5', lines[0])
        self.assertTrue(lines[1].startswith('l=-1 FAILED [DAE_VALIDATION]'))

    def test_solve_errors(self):
        cases = [
            ('unknown problem', ('solve', 'nope'), 1),
            ('bad tol', ('solve', 'theta_pendulum', '--tol', '-1'), 1),
            ('bad method', ('solve', 'theta_pendulum', '--method', 'euler'), 1),
            ('inconsistent', ('solve', 'pendulum_dae', '--fixed', 'x=11', '--fixed', "x'=0"), 2),
        ]
        for name, args, code in cases:
            with self.subTest(case=name):
                with self.assertRaises(CommandError) as ctx:
                    self._call(*args)
                self.assertEqual(ctx.exception.returncode, code)

    def test_output_grid(self):
        np.testing.assert_allclose(output_grid(0.0, 1.0, 0.3), [0.0, 0.3, 0.6, 0.9, 1.0])
        np.testing.assert_allclose(output_grid(0.0, 1.0, 0.25), [0.0, 0.25, 0.5, 0.75, 1.0])
        with self.assertRaises(ValidationException):
            output_grid(0.0, 1.0, 0.0)


class CliTestCase(SimpleTestCase):
    """명령행 종료코드 테스트"""

    def _run(self, argv):
        out, err = StringIO(), StringIO()
        return cli_main(argv, stdout=out, stderr=err), out.getvalue(), err.getvalue()

    def test_exit_codes(self):
        cases = [
            ('list', ['list'], 0),
            ('help', ['--help'], 0),
            ('no arguments', [], 1),
            ('unknown subcommand', ['lst'], 1),
            ('unknown problem', ['analyze', 'nope'], 1),
            ('missing problem', ['solve'], 1),
            ('numerical failure', ['solve', 'pendulum_dae', '--fixed', 'x=11', '--fixed', "x'=0"], 2),
        ]
        for name, argv, code in cases:
            with self.subTest(case=name):
                self.assertEqual(self._run(argv)[0], code)

    def test_unknown_subcommand_suggestion(self):
        _, _, err = self._run(['lst'])
        self.assertIn('list', err)
        self.assertIn('usage:', err)

    def test_numerical_failure_reports_code(self):
        _, _, err = self._run(['solve', 'pendulum_dae', '--fixed', 'x=11', '--fixed', "x'=0"])
        self.assertIn('[DAE_INCONSISTENT_IC]', err)

    @patch('django.core.management.call_command', side_effect=SystemExit(0))
    def test_argparse_exit_is_returned(self, mock_call):
        """argparse 도움말 종료 (SystemExit) 는 그 코드로 반환"""
        self.assertEqual(self._run(['solve', '--help'])[0], 0)
        mock_call.assert_called_once()


@tag('slow')
class SpringMassEquivalenceTestCase(SimpleTestCase):
    """막대 1 개 사슬 모델과 (x, theta) 모델의 막대 끝점 일치"""

    def test_rod_end_matches(self):
        cfg = IvpConfig(tol=1e-10, order=15, t_end=1.0, newton_tol=1e-12)
        chain = prepare_problem('spring_mass_chain', newton_tol=cfg.newton_tol)
        theta = prepare_problem('spring_mass_theta', newton_tol=cfg.newton_tol)
        chain_traj = integrate(chain.dae, chain.structural, chain.point, cfg)
        theta_traj = integrate(theta.dae, theta.structural, theta.point, cfg)

        end = chain_traj.sample(-1)
        reference = theta_traj.sample(-1)
        x1, y1 = theta_rod_end(theta.params, reference['x'], reference['theta'])
        self.assertAlmostEqual(end['x0'], reference['x'], delta=1e-7)
        self.assertAlmostEqual(end['x1'], x1, delta=1e-7)
        self.assertAlmostEqual(end['y1'], y1, delta=1e-7)

    def test_rod_end_matches_over_forty_time_units(self):
        """t = 20, 40 에서 사슬 모델 (tol 1e-10) 과 theta 모델 (tol 1e-12) 의 차이 5e-6 이하"""
        chain = prepare_problem('spring_mass_chain', newton_tol=1e-12)
        theta = prepare_problem('spring_mass_theta', newton_tol=1e-12)
        for t_end in (20.0, 40.0):
            chain_traj = solve_prepared(chain, IvpConfig(tol=1e-10, t_end=t_end, newton_tol=1e-12))
            theta_traj = solve_prepared(theta, IvpConfig(tol=1e-12, t_end=t_end, newton_tol=1e-12))
            end = chain_traj.sample(-1)
            reference = theta_traj.sample(-1)
            x1, y1 = theta_rod_end(theta.params, reference['x'], reference['theta'])
            with self.subTest(t=t_end):
                self.assertEqual(end['t'], t_end)
                self.assertAlmostEqual(end['x0'], reference['x'], delta=5e-6)
                self.assertAlmostEqual(end['x1'], x1, delta=5e-6)
                self.assertAlmostEqual(end['y1'], y1, delta=5e-6)

    def test_two_rod_chain_conserves_energy(self):
        cfg = IvpConfig(tol=1e-10, t_end=40.0, newton_tol=1e-12)
        prepared = prepare_problem('spring_mass_chain', params={'n': 2}, newton_tol=cfg.newton_tol)
        traj = solve_prepared(prepared, cfg)
        self.assertEqual(traj.times[-1], 40.0)
        self.assertLess(invariant_drift(prepared.problem, prepared.params, traj)['energy'], 1e-6)


@tag('slow')
class ControlledPendulumTestCase(SimpleTestCase):
    """x = a sin(omega t) 추적 제어 진자 (g = 9.8, l = 10)"""

    OMEGA = math.sqrt(9.8 / 10.0)

    def _run(self, a, omega):
        """(최대 추적 오차, max |u|)"""
        cfg = IvpConfig(tol=1e-10, t_end=20.0, newton_tol=1e-12)
        prepared = prepare_problem(
            'controlled_pendulum', params={'a': a, 'omega': omega}, newton_tol=cfg.newton_tol
        )
        traj = solve_prepared(prepared, cfg)
        self.assertEqual(traj.times[-1], 20.0)
        target = a * np.sin(omega * traj.times)
        tracking = float(np.max(np.abs(traj.column('x') - target)))
        return tracking, float(np.max(np.abs(traj.column('u'))))

    def test_tracking_and_control_magnitude(self):
        """추적 오차 <= tol, max |u| 는 a 에 대해 증가하고 omega 를 20% 올리면 커진다"""
        controls = {}
        for omega in (self.OMEGA, 1.2 * self.OMEGA):
            for a in (1.0, 5.0, 9.0):
                tracking, control = self._run(a, omega)
                with self.subTest(a=a, omega=omega):
                    self.assertLessEqual(tracking, 1e-10)
                controls[(a, omega)] = control

        for omega in (self.OMEGA, 1.2 * self.OMEGA):
            with self.subTest(omega=omega):
                self.assertLess(controls[(1.0, omega)], controls[(5.0, omega)])
                self.assertLess(controls[(5.0, omega)], controls[(9.0, omega)])
        for a in (1.0, 5.0, 9.0):
            with self.subTest(a=a):
                self.assertGreater(controls[(a, 1.2 * self.OMEGA)], controls[(a, self.OMEGA)])


@tag('slow')
class PlanetsTestCase(SimpleTestCase):
    """외행성 6 체 문제: 보존량과 허용오차 간 일치"""

    def test_conservation_at_tight_tolerances(self):
        finals = []
        for tol in (1e-13, 1e-15):
            cfg = IvpConfig.from_settings(tol=tol, t_end=20.0)
            prepared = prepare_problem('planets', newton_tol=cfg.newton_tol)
            traj = solve_prepared(prepared, cfg)
            drift = invariant_drift(prepared.problem, prepared.params, traj)
            with self.subTest(tol=tol):
                self.assertEqual(prepared.structural.dof, 30)
                self.assertEqual(traj.times[-1], 20.0)
                self.assertLess(drift['energy'], 1e-10)
                self.assertLess(drift['angular_momentum'], 1e-10)
            finals.append(traj.positions(-1))

        coarse, fine = finals
        self.assertLess(np.max(np.abs(coarse - fine)) / np.max(np.abs(fine)), 1e-10)


@tag('slow')
class RegistryIntegrationTestCase(SimpleTestCase):
    """모든 내장 문제가 기본 파라미터와 초기조건으로 1 시간 단위 적분을 마친다"""

    def test_every_problem_integrates_one_time_unit(self):
        cfg = IvpConfig(tol=1e-8, t_end=1.0, newton_tol=1e-10)
        for problem in list_problems():
            with self.subTest(problem=problem.name):
                prepared = prepare_problem(problem.name, newton_tol=cfg.newton_tol)
                traj = solve_prepared(prepared, cfg)
                self.assertEqual(traj.times[-1], 1.0)
                self.assertTrue(np.all(np.isfinite(traj.items)))
