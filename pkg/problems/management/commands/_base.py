from django.core.management.base import BaseCommand, CommandError

from common.exceptions import BaseAppException, NumericalException, ValidationException
from common.utils import parse_assignments, parse_list
from problems.services.problem_service import coerce_values

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


class DaeCommand(BaseCommand):
    """
    DAE 명령 공통 기반

    ValidationException 은 종료코드 1, NumericalException 은 종료코드 2 의 CommandError 로 바꾼다.
    """

    def add_problem_arguments(self, parser):
        parser.add_argument('problem', type=str, help='문제 이름 (list 명령으로 확인)')
        parser.add_argument(
            '--param', action='append', default=[], metavar='KEY=VALUE',
            help='물리 파라미터 (반복 가능, 목록은 쉼표 구분)',
        )
        parser.add_argument(
            '--ic', action='append', default=[], metavar='LABEL=VALUE',
            help="초기조건 (예: x=6, \"x'=0\"). 고정 항목이면 고정값, 아니면 추정값",
        )
        parser.add_argument(
            '--fixed', action='append', default=None, metavar='LABEL=VALUE',
            help='고정 항목 집합을 통째로 교체',
        )

    def problem_options(self, options):
        fixed = options.get('fixed')
        return {
            'params': coerce_values(parse_assignments(options.get('param'))),
            'ic': coerce_values(parse_assignments(options.get('ic'))),
            'fixed': None if fixed is None else coerce_values(parse_assignments(fixed)),
        }

    @staticmethod
    def parse_delta(text):
        try:
            return tuple(int(value) for value in parse_list(text))
        except ValueError:
            raise ValidationException(f"DD-spec 은 쉼표로 구분한 정수여야 합니다: {text}") from None

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except ValidationException as exc:
            raise CommandError(exc.message, returncode=USAGE_ERROR) from exc
        except NumericalException as exc:
            raise CommandError(f"[{exc.error_code}] {exc.message}", returncode=NUMERICAL_ERROR) from exc
        except BaseAppException as exc:
            # 잔차 코드 자체의 결함 (값 분기, 테이프 오용)
            raise CommandError(f"[{exc.error_code}] {exc.message}", returncode=USAGE_ERROR) from exc
