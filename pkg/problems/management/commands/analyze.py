import math

from django.conf import settings

from problems.management.commands._base import DaeCommand
from problems.services.problem_service import prepare_problem
from structural.services.jacobian_service import sa_friendly_check


def format_sigma_table(structural) -> str:
    """
    시그니처 행렬 표 (transversal 원소에 '*', 없는 원소는 '-')

    마지막 열은 c_i, 마지막 행은 d_j.
    """
    names = list(structural.names)
    equations = list(structural.equation_names)
    transversal = set(structural.transversal)
    width = max([len(name) for name in names] + [4]) + 1
    label_width = max([len(name) for name in equations] + [2]) + 1

    lines = [' ' * label_width + ''.join(name.rjust(width) for name in names) + 'c_i'.rjust(width)]
    for i, eq in enumerate(equations):
        cells = []
        for j in range(len(names)):
            value = structural.sigma[i, j]
            text = '-' if math.isinf(value) else str(int(value))
            if (i, j) in transversal:
                text += '*'
            cells.append(text.rjust(width))
        lines.append(eq.ljust(label_width) + ''.join(cells) + str(structural.c[i]).rjust(width))
    lines.append('d_j'.ljust(label_width) + ''.join(str(v).rjust(width) for v in structural.d))
    return '\n'.join(lines)


class Command(DaeCommand):
    help = '구조 분석: 시그니처 행렬, 오프셋, 지수, 자유도, SA-friendly 판정'

    def add_arguments(self, parser):
        self.add_problem_arguments(parser)
        parser.add_argument('--no-check', action='store_true', help='초기점 SA-friendly 판정 생략')

    def handle(self, *args, **options):
        check = not options['no_check']
        newton_tol = getattr(settings, 'DAE_NEWTON_TOL_FACTOR', 0.01) * getattr(settings, 'DAE_TOL', 1e-8)
        prepared = prepare_problem(
            options['problem'], newton_tol=newton_tol, initialize=check, **self.problem_options(options)
        )
        structural = prepared.structural

        self.stdout.write(f"problem: {prepared.problem.name} (n={structural.n})")
        self.stdout.write(format_sigma_table(structural))
        self.stdout.write(f"transversal value: {structural.value}")
        self.stdout.write(f"c = {tuple(structural.c)}")
        self.stdout.write(f"d = {tuple(structural.d)}")
        self.stdout.write(f"index nu = {structural.nu}")
        self.stdout.write(f"DOF = {structural.dof}")

        if check:
            result = sa_friendly_check(prepared.dae, structural, prepared.point)
            if result.friendly:
                self.stdout.write(self.style.SUCCESS(f"SA-friendly at default ICs (rcond {result.rcond:.3e})"))
            else:
                self.stdout.write(self.style.WARNING(f"NOT SA-friendly at default ICs: {result.reason}"))
