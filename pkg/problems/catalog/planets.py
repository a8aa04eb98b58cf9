"""
외행성 5 개 + 태양 N 체 문제 (태양 기준 상대 좌표, 제2종)

일반화 좌표는 태양에 대한 행성 상대위치 rho_1..rho_N. 라그랑지안 안에서 공통
질량중심 r_c 를 빼서 절대 좌표 r_0..r_N 으로 바꾼다.
"""
import hashlib
import json
from functools import lru_cache
from pathlib import Path

import numpy as np

from common.exceptions import ConsistencyError
from lagrangian.mechanics import norm_sq
from lagrangian.system import LagrangianSpec
from problems.definition import ProblemDef
from problems.serializers import PlanetsParamsSerializer
from taylor import functions as fn

FIXTURE_PATH = Path(__file__).resolve().parent.parent / 'fixtures' / 'detest_c5.json'
FIXTURE_SHA256 = '33ad83776d5a597636c8f991135198e281c0a2be9ed88b02da5b0616c2dc0bd5'
AXES = ('x', 'y', 'z')


@lru_cache(maxsize=1)
def load_detest_c5() -> dict:
    """
    내장 행성 데이터 로드 (체크섬 검증)

    Raises:
        ConsistencyError: 파일 체크섬이 고정값과 다른 경우
    """
    raw = FIXTURE_PATH.read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != FIXTURE_SHA256:
        raise ConsistencyError(f"행성 데이터 체크섬 불일치: {digest}")
    return json.loads(raw.decode('utf-8'))


def planet_names(count: int):
    return [f"{axis}{i}" for i in range(1, count + 1) for axis in AXES]


def _absolute(rel, masses):
    """상대 좌표 (3 x N 평탄 목록) -> 질량중심 기준 절대 좌표 목록 [r_0..r_N]"""
    total = sum(masses)
    bodies = [[0.0, 0.0, 0.0]] + [list(rel[3 * i:3 * i + 3]) for i in range(len(masses) - 1)]
    center = []
    for axis in range(3):
        acc = 0.0
        for mass, body in zip(masses[1:], bodies[1:]):
            acc = acc + mass * body[axis]
        center.append(acc / total)
    return [[body[axis] - center[axis] for axis in range(3)] for body in bodies]


def _planets_lagrangian(t, q, qp, p):
    masses, G = p['masses'], p['G']
    r = _absolute(q, masses)
    v = _absolute(qp, masses)

    kinetic = 0.0
    for mass, vel in zip(masses, v):
        kinetic = kinetic + 0.5 * mass * norm_sq(vel)

    potential = 0.0
    count = len(masses)
    for i in range(count):
        for j in range(i + 1, count):
            gap = [r[i][axis] - r[j][axis] for axis in range(3)]
            potential = potential - G * masses[i] * masses[j] / fn.sqrt(norm_sq(gap))
    return kinetic - potential


def planets_params(params):
    data = load_detest_c5()
    resolved = dict(params)
    resolved.setdefault('G', data['G'])
    resolved.setdefault('masses', [body['mass'] for body in data['bodies']])
    return resolved


def build_planets(params) -> LagrangianSpec:
    params = planets_params(params)
    count = len(params['masses']) - 1
    return LagrangianSpec(
        n_q=3 * count,
        lagrangian=_planets_lagrangian,
        params=params,
        q_names=planet_names(count),
    )


def absolute_state(p, s):
    """
    표본에서 절대 위치/속도 배열

    Returns:
        (positions, velocities): 각 (N+1) x 3
    """
    p = planets_params(p)
    count = len(p['masses']) - 1
    names = planet_names(count)
    rel = [s[name] for name in names]
    relp = [s[name + "'"] for name in names]
    return np.array(_absolute(rel, p['masses'])), np.array(_absolute(relp, p['masses']))


def planets_energy(p, s):
    p = planets_params(p)
    masses = np.array(p['masses'])
    pos, vel = absolute_state(p, s)
    kinetic = 0.5 * float(np.sum(masses * np.sum(vel * vel, axis=1)))
    potential = 0.0
    for i in range(len(masses)):
        for j in range(i + 1, len(masses)):
            potential -= p['G'] * masses[i] * masses[j] / float(np.linalg.norm(pos[i] - pos[j]))
    return kinetic + potential


def planets_angular_momentum(p, s):
    p = planets_params(p)
    masses = np.array(p['masses'])
    pos, vel = absolute_state(p, s)
    total = np.sum(masses[:, None] * np.cross(pos, vel), axis=0)
    return float(np.linalg.norm(total))


def planets_initial_conditions(p):
    data = load_detest_c5()
    count = len(planets_params(p)['masses']) - 1
    planets = data['bodies'][1:count + 1]
    if len(planets) != count:
        raise ConsistencyError("내장 초기조건보다 많은 천체가 지정되었습니다. --fixed 로 초기조건을 주세요.")
    fixed = {}
    for i, body in enumerate(planets, start=1):
        for axis, x, v in zip(AXES, body['position'], body['velocity']):
            fixed[f"{axis}{i}"] = x
            fixed[f"{axis}{i}'"] = v
    return {'fixed': fixed, 'guess': {}}


PROBLEMS = [
    ProblemDef(
        name='planets',
        builder=build_planets,
        serializer_class=PlanetsParamsSerializer,
        description="태양과 외행성 5 개 (DETEST C5), 상대 좌표 15 개의 2계 ODE",
        initial_conditions=planets_initial_conditions,
        invariants={'energy': planets_energy, 'angular_momentum': planets_angular_momentum},
        t_end=20.0,
    ),
]
