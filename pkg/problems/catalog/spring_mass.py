"""
스프링-질량-다중진자

수평으로 미끄러지는 질량 M 이 스프링(k)으로 고정점에 연결되고, M 에 균일한 막대
n 개가 사슬로 매달린다. 데카르트 좌표 q = (x0, x1..xn, y1..yn), y0 = 0, y 는 아래 방향.
"""
import math

from lagrangian.mechanics import rod_kinetic_energy
from lagrangian.system import LagrangianSpec
from problems.definition import ProblemDef
from problems.serializers import SpringMassChainParamsSerializer, SpringMassThetaParamsSerializer
from taylor import functions as fn


def _split(q, n):
    return q[0], q[1:n + 1], q[n + 1:2 * n + 1]


def _chain_lagrangian(t, q, qp, p):
    n, M, m, k, g = p['n'], p['M'], p['m'], p['k'], p['g']
    x0, _, ys = _split(q, n)
    x0p, xps, yps = _split(qp, n)

    ends_x = [x0p] + list(xps)
    ends_y = [0.0] + list(yps)
    kinetic = 0.5 * M * fn.sqr(x0p)
    for i in range(1, n + 1):
        kinetic = kinetic + rod_kinetic_energy(
            m, (ends_x[i - 1], ends_y[i - 1]), (ends_x[i], ends_y[i])
        )

    # 막대 질량은 중심 높이 (y_{i-1} + y_i)/2 에 있다
    heights = 0.5 * ys[n - 1]
    for i in range(n - 1):
        heights = heights + ys[i]
    potential = 0.5 * k * fn.sqr(x0) - m * g * heights
    return kinetic - potential


def _rod_constraint(i):
    def constraint(t, q, p):
        n = p['n']
        x0, xs, ys = _split(q, n)
        x_prev = x0 if i == 0 else xs[i - 1]
        y_prev = 0.0 if i == 0 else ys[i - 1]
        return fn.sqr(xs[i] - x_prev) + fn.sqr(ys[i] - y_prev) - p['l'] ** 2

    return constraint


def chain_names(n):
    return ['x0'] + [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)]


def build_spring_mass_chain(params) -> LagrangianSpec:
    n = params['n']
    return LagrangianSpec(
        n_q=2 * n + 1,
        lagrangian=_chain_lagrangian,
        constraints=[_rod_constraint(i) for i in range(n)],
        params=params,
        q_names=chain_names(n),
        multiplier_names=[f"lambda{i}" for i in range(1, n + 1)],
    )


def chain_energy(p, s):
    n, M, m, k, g = p['n'], p['M'], p['m'], p['k'], p['g']
    vx = [s["x0'"]] + [s[f"x{i}'"] for i in range(1, n + 1)]
    vy = [0.0] + [s[f"y{i}'"] for i in range(1, n + 1)]
    ys = [0.0] + [s[f"y{i}"] for i in range(1, n + 1)]
    kinetic = 0.5 * M * vx[0] ** 2
    potential = 0.5 * k * s['x0'] ** 2
    for i in range(1, n + 1):
        kinetic += rod_kinetic_energy(m, (vx[i - 1], vy[i - 1]), (vx[i], vy[i]))
        potential -= m * g * 0.5 * (ys[i - 1] + ys[i])
    return kinetic + potential


def chain_initial_conditions(p):
    """M 이 x0 에 정지, 막대는 왼쪽으로 수평하게 펼친 상태"""
    n, l, x0 = p['n'], p['l'], p['x0']
    fixed = {'x0': x0, "x0'": 0.0}
    guess = {}
    for i in range(1, n + 1):
        fixed[f"y{i}"] = 0.0
        fixed[f"y{i}'"] = 0.0
        guess[f"x{i}"] = x0 - i * l
        guess[f"x{i}'"] = 0.0
    return {'fixed': fixed, 'guess': guess}


# ---- n = 1 제2종 기준 모델 (x, theta) -------------------------------------------
def _theta_lagrangian(t, q, qp, p):
    M, m, k, g = p['M'], p['m'], p['k'], p['g']
    a = 0.5 * p['l']
    x, theta = q
    xp, thetap = qp
    kinetic = (
        0.5 * (M + m) * fn.sqr(xp)
        + m * a * xp * thetap * fn.cos(theta)
        + (2.0 / 3.0) * m * a * a * fn.sqr(thetap)
    )
    potential = 0.5 * k * fn.sqr(x) + m * g * a * (1.0 - fn.cos(theta))
    return kinetic - potential


def build_spring_mass_theta(params) -> LagrangianSpec:
    """T = (M+m)x'^2/2 + m a x' theta' cos(theta) + 2/3 m a^2 theta'^2,  V = k x^2/2 + m g a (1 - cos(theta))"""
    return LagrangianSpec(
        n_q=2,
        lagrangian=_theta_lagrangian,
        params=params,
        q_names=['x', 'theta'],
    )


def theta_energy(p, s):
    M, m, k, g = p['M'], p['m'], p['k'], p['g']
    a = 0.5 * p['l']
    xp, thetap, theta = s["x'"], s["theta'"], s['theta']
    kinetic = 0.5 * (M + m) * xp ** 2 + m * a * xp * thetap * math.cos(theta) + (2.0 / 3.0) * m * a * a * thetap ** 2
    return kinetic + 0.5 * k * s['x'] ** 2 + m * g * a * (1.0 - math.cos(theta))


def theta_rod_end(p, x, theta):
    """(x, theta) 모델의 막대 끝점 (사슬 모델의 x1, y1 에 대응)"""
    return x + p['l'] * math.sin(theta), p['l'] * math.cos(theta)


PROBLEMS = [
    ProblemDef(
        name='spring_mass_chain',
        builder=build_spring_mass_chain,
        serializer_class=SpringMassChainParamsSerializer,
        description="스프링-질량에 매달린 n 개 막대 사슬, 데카르트 좌표 제1종 (자유도 2n+2)",
        initial_conditions=chain_initial_conditions,
        invariants={'energy': chain_energy},
        t_end=40.0,
    ),
    ProblemDef(
        name='spring_mass_theta',
        builder=build_spring_mass_theta,
        serializer_class=SpringMassThetaParamsSerializer,
        description="막대 1 개 스프링-질량-진자, (x, theta) 좌표 제2종 기준 모델",
        initial_conditions=lambda p: {
            'fixed': {'x': p['x0'], "x'": 0.0, 'theta': p['theta0'], "theta'": 0.0},
            'guess': {},
        },
        invariants={'energy': theta_energy},
        t_end=40.0,
    ),
]
