import json

import numpy as np
from django.conf import settings

from common.exceptions import ValidationException
from common.utils import parse_list, parse_number
from integrator.serializers import IntegrationOptionsSerializer, TrajectoryStatsSerializer
from integrator.services.dense_output_service import dense_output
from integrator.services.divergence_service import tolerance_divergence
from integrator.trajectory import IvpConfig
from problems.management.commands._base import DaeCommand
from problems.registry import get_problem
from problems.services.problem_service import prepare_problem
from problems.services.solve_service import invariant_drift, run_sweep, solve_prepared


def output_grid(t0: float, t_end: float, dt: float) -> np.ndarray:
    """t0 부터 dt 간격, 마지막은 항상 t_end"""
    if not dt > 0:
        raise ValidationException(f"--dt 는 0 보다 커야 합니다: {dt}")
    count = int(np.floor((t_end - t0) / dt + 1e-9))
    grid = t0 + dt * np.arange(count + 1)
    grid = grid[grid < t_end]
    return np.append(grid, t_end)


class Command(DaeCommand):
    help = '초기값 문제 적분 후 CSV 출력 (테일러 급수법 또는 더미 도함수 + RK)'

    def add_arguments(self, parser):
        self.add_problem_arguments(parser)
        parser.add_argument('--tol', type=float, default=None, help='혼합 상대-절대 허용오차 (기본 DAE_TOL)')
        parser.add_argument('--order', type=int, default=None, help='테일러 차수 (기본 DAE_TAYLOR_ORDER)')
        parser.add_argument('--t-end', type=float, default=None, help='종료 시각 (기본: 문제별 값)')
        parser.add_argument('--max-steps', type=int, default=None)
        parser.add_argument('--method', type=str, default='taylor', help='taylor 또는 dd-rk')
        parser.add_argument('--dd-spec', type=str, default=None, help='dd-rk 시작 DD-spec 벡터')
        parser.add_argument('--out', type=str, default=None, help='CSV 파일 경로 (생략 시 표준출력)')
        parser.add_argument('--json', action='store_true', help='통계를 JSON 으로 출력')
        parser.add_argument('--dt', type=float, default=None, help='균일 출력 간격 (에르미트 보간)')
        parser.add_argument('--sweep', type=str, default=None, metavar='KEY=V1,V2,...', help='파라미터 스윕')
        parser.add_argument('--watch', type=str, default='', help='스윕에서 max|값| 을 보고할 항목 (쉼표 구분)')
        parser.add_argument('--compare-tol', type=float, default=None, help='더 엄격한 허용오차와 위치 비교')
        parser.add_argument('--at', type=str, default='', help='--compare-tol 비교 시각 (쉼표 구분)')

    def _config(self, options, problem):
        serializer = IntegrationOptionsSerializer(data={
            'tol': options['tol'],
            'order': options['order'],
            't_end': options['t_end'],
            'method': options['method'],
            'max_steps': options['max_steps'],
        })
        if not serializer.is_valid():
            details = '; '.join(
                f"{key}: {' '.join(str(m) for m in messages)}" for key, messages in serializer.errors.items()
            )
            raise ValidationException(f"적분 옵션 오류 - {details}")
        data = serializer.validated_data
        cfg = IvpConfig.from_settings(
            tol=data['tol'],
            order=data['order'],
            t_end=data['t_end'] if data['t_end'] is not None else problem.t_end,
            max_steps=data['max_steps'],
        )
        return cfg, data['method']

    def handle(self, *args, **options):
        problem = get_problem(options['problem'])
        cfg, method = self._config(options, problem)
        problem_options = self.problem_options(options)
        dd_spec = self.parse_delta(options['dd_spec']) if options['dd_spec'] else None

        if options['sweep']:
            return self._sweep(options, cfg, method, problem_options)

        prepared = prepare_problem(problem.name, t0=cfg.t0, newton_tol=cfg.newton_tol, **problem_options)

        if options['compare_tol'] is not None:
            times = [float(parse_number(value)) for value in parse_list(options['at'])]
            report = tolerance_divergence(
                prepared.dae, prepared.structural, prepared.point, cfg, options['compare_tol'], times, method,
            )
            for t, diff in zip(report.times, report.differences):
                self.stdout.write(f"t={t:.17g} relative_difference={diff:.3e}")
            self.stdout.write(f"digits={report.digits:.2f}")
            return

        traj = solve_prepared(prepared, cfg, method, dd_spec)
        if options['dt'] is not None:
            grid = output_grid(cfg.t0, cfg.t_end, options['dt'])
            frame = traj.to_dataframe(grid, np.atleast_2d(dense_output(traj, grid)))
        else:
            frame = traj.to_dataframe()
        text = frame.to_csv(
            index=False,
            float_format=getattr(settings, 'DAE_CSV_FLOAT_FORMAT', '%.17g'),
            lineterminator='\n',
        )
        if options['out']:
            with open(options['out'], 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
        else:
            self.stdout.write(text, ending='')

        payload = {
            'problem': problem.name,
            'method': method,
            'tol': cfg.tol,
            'order': cfg.order,
            't_end': cfg.t_end,
            'samples': int(traj.times.size),
            **TrajectoryStatsSerializer(traj.stats).data,
            'invariant_drift': invariant_drift(problem, prepared.params, traj),
        }
        if options['json']:
            target = self.stdout if options['out'] else self.stderr
            target.write(json.dumps(payload, indent=2))
        else:
            self.stderr.write(
                f"steps={payload['steps']} rejected={payload['rejected']} "
                f"h_min={payload['h_min']:.3e} h_max={payload['h_max']:.3e} "
                f"switches={payload['switches']} cpu_s={payload['cpu_s']:.3f}"
            )

    def _sweep(self, options, cfg, method, problem_options):
        if '=' not in options['sweep']:
            raise ValidationException(f"--sweep 는 KEY=V1,V2,... 형식이어야 합니다: {options['sweep']}")
        key, text = options['sweep'].split('=', 1)
        values = [parse_number(value) for value in parse_list(text)]
        if not values:
            raise ValidationException("--sweep 값이 비어 있습니다.")
        watch = parse_list(options['watch'])
        results = run_sweep(
            options['problem'], key.strip(), values, problem_options['params'], cfg, method,
            ic=problem_options['ic'], fixed=problem_options['fixed'], watch=watch,
        )
        for result in results:
            if not result.ok:
                self.stdout.write(f"{key}={result.value} FAILED {result.error}")
                continue
            stats = result.trajectory.stats
            watched = ' '.join(f"max|{label}|={value:.6g}" for label, value in result.watched.items())
            self.stdout.write(
                f"{key}={result.value} steps={stats.accepted} rejected={stats.rejected} "
                f"h_min={stats.h_min:.3e} h_max={stats.h_max:.3e} {watched}".rstrip()
            )
