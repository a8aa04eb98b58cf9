"""
크기 2 예제 DAE (구동 입력 u(t) = sin t)

toy_ex1a: x1 - u = 0,       x1 - x2' = 0   (ODE 부분 x2' = u)
toy_ex1b: x2 - u = 0,       x1 - x2' = 0   (자유도 0, x1 = u', x2 = u)
toy_ex1c: x1 - x2 - u = 0,  x1 - x2' = 0   (ODE 부분 x2' - x2 - u = 0)
"""
from lagrangian.system import DaeSystem
from problems.definition import ProblemDef
from problems.serializers import ToyParamsSerializer
from taylor import functions as fn


def drive(t):
    return fn.sin(t)


def _ex1a(t, z, p):
    x1, x2 = z
    return [x1 - drive(t), x1 - fn.diff(x2, 1)]


def _ex1b(t, z, p):
    x1, x2 = z
    return [x2 - drive(t), x1 - fn.diff(x2, 1)]


def _ex1c(t, z, p):
    x1, x2 = z
    return [x1 - x2 - drive(t), x1 - fn.diff(x2, 1)]


def _builder(residual):
    def build(params):
        return DaeSystem(n=2, residual=residual, names=['x1', 'x2'], params=params)

    return build


build_toy_ex1a = _builder(_ex1a)
build_toy_ex1b = _builder(_ex1b)
build_toy_ex1c = _builder(_ex1c)


def build_toy_daes():
    """예제 DAE 세 개를 이름 -> DaeSystem 으로"""
    return {
        'toy_ex1a': build_toy_ex1a({}),
        'toy_ex1b': build_toy_ex1b({}),
        'toy_ex1c': build_toy_ex1c({}),
    }


PROBLEMS = [
    ProblemDef(
        name='toy_ex1a',
        builder=build_toy_ex1a,
        serializer_class=ToyParamsSerializer,
        description="x1 - u(t) = 0, x1 - x2' = 0 (오프셋 (0,0), 자유도 1)",
        initial_conditions=lambda p: {'fixed': {'x2': 0.0}, 'guess': {'x1': 0.0}},
        t_end=10.0,
    ),
    ProblemDef(
        name='toy_ex1b',
        builder=build_toy_ex1b,
        serializer_class=ToyParamsSerializer,
        description="x2 - u(t) = 0, x1 - x2' = 0 (오프셋 (1,0), 자유도 0)",
        initial_conditions=lambda p: {'fixed': {}, 'guess': {'x1': 1.0, 'x2': 0.0}},
        t_end=10.0,
    ),
    ProblemDef(
        name='toy_ex1c',
        builder=build_toy_ex1c,
        serializer_class=ToyParamsSerializer,
        description="x1 - x2 - u(t) = 0, x1 - x2' = 0 (오프셋 (0,0), 자유도 1)",
        initial_conditions=lambda p: {'fixed': {'x2': 0.0}, 'guess': {'x1': 0.0}},
        t_end=10.0,
    ),
]
