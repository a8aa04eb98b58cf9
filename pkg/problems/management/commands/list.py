from problems.management.commands._base import DaeCommand
from problems.registry import list_problems
from structural.services.analysis_service import analyze


class Command(DaeCommand):
    help = '등록된 문제 목록 (크기, 자유도, 설명)'

    def handle(self, *args, **options):
        for problem in list_problems():
            dae, _, _ = problem.build()
            structural = analyze(dae)
            self.stdout.write(
                f"{problem.name:<22} n={dae.n:<3} DOF={structural.dof:<3} {problem.description}"
            )
