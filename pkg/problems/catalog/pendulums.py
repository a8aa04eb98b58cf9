"""
진자 계열 내장 문제

y 는 아래 방향이 양수. 라그랑지안 형태의 승수는 잔차 형태의 승수와
lambda_L = m * lambda_DAE / 2 관계다.
"""
import math

from lagrangian.mechanics import point_kinetic_energy
from lagrangian.system import DaeSystem, LagrangianSpec
from problems.definition import ProblemDef
from problems.serializers import (
    ControlledPendulumParamsSerializer,
    DoublePendulumParamsSerializer,
    PendulumDaeParamsSerializer,
    PendulumParamsSerializer,
)
from taylor import functions as fn


# ---- 데카르트 좌표 진자 (라그랑지안) -----------------------------------------
def _pendulum_lagrangian(t, q, qp, p):
    x, y = q
    return point_kinetic_energy(p['m'], qp) + p['m'] * p['g'] * y


def _rod_constraint(t, q, p):
    x, y = q[0], q[1]
    return fn.sqr(x) + fn.sqr(y) - p['l'] ** 2


def build_pendulum(params) -> LagrangianSpec:
    """L = m/2 (x'^2 + y'^2) + m g y,  C = x^2 + y^2 - l^2"""
    return LagrangianSpec(
        n_q=2,
        lagrangian=_pendulum_lagrangian,
        constraints=[_rod_constraint],
        params=params,
        q_names=['x', 'y'],
        multiplier_names=['lambda'],
        equation_names=['A', 'B', 'C'],
    )


def pendulum_energy(p, s):
    return 0.5 * p['m'] * (s["x'"] ** 2 + s["y'"] ** 2) - p['m'] * p['g'] * s['y']


def pendulum_initial_conditions(p):
    l = p['l']
    x = 0.6 * l
    return {
        'fixed': {'x': x, "x'": 0.0},
        'guess': {'y': math.sqrt(l * l - x * x), "y'": 0.0, 'lambda': 0.0},
    }


# ---- 데카르트 좌표 진자 (잔차 직접 기술) ------------------------------------------
def _pendulum_residual(t, z, p):
    x, y, lam = z
    return [
        fn.diff(x, 2) + x * lam,
        fn.diff(y, 2) + y * lam - p['g'],
        fn.sqr(x) + fn.sqr(y) - p['l'] ** 2,
    ]


def build_pendulum_dae(params) -> DaeSystem:
    """A = x'' + x lambda,  B = y'' + y lambda - g,  C = x^2 + y^2 - l^2"""
    return DaeSystem(
        n=3,
        residual=_pendulum_residual,
        names=['x', 'y', 'lambda'],
        params=params,
        equation_names=['A', 'B', 'C'],
    )


def pendulum_dae_energy(p, s):
    return 0.5 * (s["x'"] ** 2 + s["y'"] ** 2) - p['g'] * s['y']


# ---- 각도 좌표 진자 (제2종) -------------------------------------------------
def _theta_lagrangian(t, q, qp, p):
    m, g, l = p['m'], p['g'], p['l']
    return 0.5 * m * fn.sqr(l * qp[0]) + m * g * l * fn.cos(q[0])


def build_theta_pendulum(params) -> LagrangianSpec:
    """L = m/2 (l theta')^2 + m g l cos(theta)"""
    return LagrangianSpec(
        n_q=1,
        lagrangian=_theta_lagrangian,
        params=params,
        q_names=['theta'],
        equation_names=['A'],
    )


def theta_pendulum_energy(p, s):
    m, g, l = p['m'], p['g'], p['l']
    return 0.5 * m * (l * s["theta'"]) ** 2 - m * g * l * math.cos(s['theta'])


# ---- 궤적 지정 제어 진자 ------------------------------------------------------
def _control_hook(t, z, f, p):
    # A 에 수평 외력 u, D: x 가 a sin(omega t) 를 따라간다
    f[0] = f[0] - z[3]
    f[3] = z[0] - p['a'] * fn.sin(p['omega'] * t)


def build_controlled_pendulum(params) -> LagrangianSpec:
    return LagrangianSpec(
        n_q=2,
        lagrangian=_pendulum_lagrangian,
        constraints=[_rod_constraint],
        params=params,
        q_names=['x', 'y'],
        multiplier_names=['lambda'],
        post_hook=_control_hook,
        extra_names=['u'],
        equation_names=['A', 'B', 'C', 'D'],
    )


def controlled_pendulum_initial_conditions(p):
    return {
        'fixed': {},
        'guess': {
            'x': 0.0, "x'": p['a'] * p['omega'], 'y': p['l'], "y'": 0.0,
            'lambda': p['m'] * p['g'] / (2.0 * p['l']), 'u': 0.0,
        },
    }


def controlled_pendulum_tracking_error(p, s):
    return s['x'] - p['a'] * math.sin(p['omega'] * s['t'])


# ---- 이중 진자 (데카르트, 제1종) -----------------------------------------------
def _double_lagrangian(t, q, qp, p):
    x1, y1, x2, y2 = q
    kinetic = point_kinetic_energy(p['m1'], qp[0:2]) + point_kinetic_energy(p['m2'], qp[2:4])
    return kinetic + p['g'] * (p['m1'] * y1 + p['m2'] * y2)


def _upper_rod(t, q, p):
    return fn.sqr(q[0]) + fn.sqr(q[1]) - p['l1'] ** 2


def _lower_rod(t, q, p):
    return fn.sqr(q[2] - q[0]) + fn.sqr(q[3] - q[1]) - p['l2'] ** 2


def build_double_pendulum(params) -> LagrangianSpec:
    return LagrangianSpec(
        n_q=4,
        lagrangian=_double_lagrangian,
        constraints=[_upper_rod, _lower_rod],
        params=params,
        q_names=['x1', 'y1', 'x2', 'y2'],
        multiplier_names=['lambda1', 'lambda2'],
    )


def double_pendulum_energy(p, s):
    kinetic = 0.5 * p['m1'] * (s["x1'"] ** 2 + s["y1'"] ** 2) + 0.5 * p['m2'] * (s["x2'"] ** 2 + s["y2'"] ** 2)
    return kinetic - p['g'] * (p['m1'] * s['y1'] + p['m2'] * s['y2'])


def double_pendulum_initial_conditions(p):
    # 위 막대는 수직에서 (0.6, 0.8) 방향, 아래 막대는 같은 방향으로 펼친 상태에서 정지
    x1, y1 = 0.6 * p['l1'], 0.8 * p['l1']
    x2, y2 = x1 + 0.6 * p['l2'], y1 + 0.8 * p['l2']
    return {
        'fixed': {'x1': x1, "x1'": 0.0, 'x2': x2, "x2'": 0.0},
        'guess': {'y1': y1, "y1'": 0.0, 'y2': y2, "y2'": 0.0},
    }


PROBLEMS = [
    ProblemDef(
        name='pendulum',
        builder=build_pendulum,
        serializer_class=PendulumParamsSerializer,
        description="데카르트 좌표 단진자, 라그랑지안 + 길이 구속 (지수 3)",
        initial_conditions=pendulum_initial_conditions,
        invariants={'energy': pendulum_energy},
        t_end=20.0,
    ),
    ProblemDef(
        name='pendulum_dae',
        builder=build_pendulum_dae,
        serializer_class=PendulumDaeParamsSerializer,
        description="데카르트 좌표 단진자, 잔차 직접 기술 (A, B, C)",
        initial_conditions=pendulum_initial_conditions,
        invariants={'energy': pendulum_dae_energy},
        t_end=20.0,
    ),
    ProblemDef(
        name='theta_pendulum',
        builder=build_theta_pendulum,
        serializer_class=PendulumParamsSerializer,
        description="각도 좌표 단진자, 구속 없는 제2종 라그랑지안",
        initial_conditions=lambda p: {'fixed': {'theta': 0.5, "theta'": 0.0}, 'guess': {}},
        invariants={'energy': theta_pendulum_energy},
        t_end=20.0,
    ),
    ProblemDef(
        name='controlled_pendulum',
        builder=build_controlled_pendulum,
        serializer_class=ControlledPendulumParamsSerializer,
        description="x = a sin(omega t) 를 따르도록 수평 외력 u 를 구하는 제어 진자 (자유도 0)",
        initial_conditions=controlled_pendulum_initial_conditions,
        invariants={'tracking_error': controlled_pendulum_tracking_error},
        t_end=20.0,
    ),
    ProblemDef(
        name='double_pendulum',
        builder=build_double_pendulum,
        serializer_class=DoublePendulumParamsSerializer,
        description="데카르트 좌표 이중 진자 (두 개의 점질량 막대, 자유도 4)",
        initial_conditions=double_pendulum_initial_conditions,
        invariants={'energy': double_pendulum_energy},
        t_end=10.0,
    ),
]
