"""
명령행 진입점: analyze, reduce, solve, list

종료코드 0 성공, 1 사용법 오류, 2 수치 실패.
"""
import os
import sys
from typing import Optional, Sequence

SUBCOMMANDS = ('analyze', 'reduce', 'solve', 'list')

USAGE = (
    "usage: manage.py {analyze,reduce,solve,list} ...\n"
    "  analyze <problem> [--param K=V] [--no-check]\n"
    "  reduce <problem> [--dd-spec D0,D1,...]\n"
    "  solve <problem> [--tol TOL] [--order P] [--t-end T] [--method {taylor,dd-rk}] [--out FILE]\n"
    "        [--param K=V] [--ic LABEL=V] [--fixed LABEL=V] [--json] [--dt DT]\n"
    "        [--sweep K=V1,V2] [--watch LABELS] [--compare-tol TOL --at T1,T2]\n"
    "  list\n"
)


def cli_main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """
    하위 명령 실행

    Args:
        argv: 하위 명령과 인자 (생략 시 sys.argv[1:])

    Returns:
        int: 종료코드
    """
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    import django
    from django.core.management import call_command
    from django.core.management.base import CommandError

    from common.utils import suggest_names

    django.setup()
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    if not argv or argv[0] in ('-h', '--help', 'help'):
        (stdout if argv else stderr).write(USAGE)
        return 0 if argv else 1

    name, rest = argv[0], argv[1:]
    if name not in SUBCOMMANDS:
        suggestions = suggest_names(name, SUBCOMMANDS)
        hint = f" (혹시: {', '.join(suggestions)})" if suggestions else ''
        stderr.write(f"알 수 없는 명령입니다: {name}{hint}\n{USAGE}")
        return 1

    try:
        call_command(name, *rest, stdout=stdout, stderr=stderr)
    except CommandError as exc:
        stderr.write(f"{name}: {exc}\n")
        return exc.returncode
    except SystemExit as exc:
        # argparse 도움말 출력 후 종료
        return int(exc.code or 0)
    return 0
