from django.conf import settings

from common.utils import item_label
from dummy_derivs.services.augment_service import augment
from dummy_derivs.services.selection_service import scheme_from_delta, select_state_vector
from problems.management.commands._base import DaeCommand
from problems.services.problem_service import prepare_problem
from structural.services.jacobian_service import system_jacobian


class Command(DaeCommand):
    help = '더미 도함수 축약: 증강 시스템, 단계별 J_k 크기, 상태 벡터'

    def add_arguments(self, parser):
        self.add_problem_arguments(parser)
        parser.add_argument(
            '--dd-spec', type=str, default=None, metavar='D0,D1,...',
            help='선택 대신 검증할 DD-spec 벡터',
        )

    def handle(self, *args, **options):
        newton_tol = getattr(settings, 'DAE_NEWTON_TOL_FACTOR', 0.01) * getattr(settings, 'DAE_TOL', 1e-8)
        prepared = prepare_problem(options['problem'], newton_tol=newton_tol, **self.problem_options(options))
        structural = prepared.structural
        aug = augment(prepared.dae, structural)
        names = prepared.dae.names

        self.stdout.write(f"problem: {prepared.problem.name}")
        self.stdout.write(f"equations ({aug.n_f}): {', '.join(aug.equation_labels)}")
        self.stdout.write(f"items ({aug.n_x}): {', '.join(aug.item_labels)}")

        jac = system_jacobian(prepared.dae, structural, prepared.point)
        if options['dd_spec'] is not None:
            scheme = scheme_from_delta(self.parse_delta(options['dd_spec']), structural, jacobian=jac)
        else:
            scheme = select_state_vector(aug, structural, prepared.point, jacobian=jac)

        self.stdout.write("stages:")
        for shape in scheme.stage_shapes:
            chosen = ', '.join(names[j] for j in scheme.gk_columns.get(shape.k, ()))
            state = ', '.join(item_label(names[j], l) for j, l in shape.state_items)
            self.stdout.write(
                f"  k={shape.k:>3}: J_k {shape.rows}x{shape.cols}  G_k [{chosen}]  state [{state}]"
            )
        self.stdout.write(f"delta = {scheme.delta}")
        labels = [item_label(names[j], l) for j, l in scheme.state_items]
        self.stdout.write(f"S = {{{', '.join(labels)}}} (DOF {scheme.dof})")
        if scheme.quality is not None:
            self.stdout.write(f"quality = {scheme.quality:.3e}")
