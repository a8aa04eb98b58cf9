"""
라그랑지안 + 구속조건으로부터 DAE 잔차를 만드는 서비스

역방향 AD 테이프를 테일러 급수 위에 쌓아 dL/dq, dL/dq' 를 급수로 얻고,
급수 미분 연산자로 d/dt 를 적용한다.
"""
import logging
from typing import Any, List, Sequence, Tuple

from adjoint.tape import AdjointScalar, Tape, backprop
from common.exceptions import InsufficientOrderError, ValidationException
from taylor import functions as fn
from taylor.series import TaylorScalar

logger = logging.getLogger(__name__)


def init_q_qp(z: Sequence[Any]) -> Tuple[Tape, List[AdjointScalar], List[AdjointScalar]]:
    """
    솔버 변수 z 를 새 테이프의 독립변수 q, q' 로 연결

    Args:
        z: 일반화 좌표 급수 (차수 2 이상)

    Returns:
        (tape, q, qp): q_i 는 z_i, qp_i 는 diff(z_i, 1) 을 감싼 값
    """
    for i, zi in enumerate(z):
        if isinstance(zi, TaylorScalar) and zi.order < 2:
            raise InsufficientOrderError(
                f"좌표 {i} 의 급수 차수 {zi.order} 가 2 보다 작습니다. 2계 도함수가 필요합니다."
            )
    tape = Tape()
    q = [tape.variable(zi) for zi in z]
    qp = [tape.variable(fn.diff(zi, 1)) for zi in z]
    return tape, q, qp


def _unwrap(value, tape: Tape):
    if isinstance(value, AdjointScalar) and value.tape is tape:
        return value.value
    return value


def _add(total, term):
    if term is None:
        return total
    return term if total is None else total + term


def setup_equations(spec, t, z: Sequence[Any]) -> List[Any]:
    """
    라그랑주 방정식 잔차

    f_i = d/dt(dL/dq'_i) - dL/dq_i + sum_j lambda_j dC_j/dq_i   (i < n_q)
    f_{n_q+j} = C_j(t, q)
    이후 추가 변수 자리는 0 으로 채우고 post_hook 을 적용한다.

    Args:
        spec (LagrangianSpec): 라그랑지안 기술
        t: 시간 (급수 또는 시그니처 값)
        z: 솔버 변수 (q, lambda, extra 순서)

    Returns:
        List: 방정식 n 개의 잔차
    """
    n_q, n_c = spec.n_q, spec.n_c
    q_vars = list(z[:n_q])
    multipliers = list(z[n_q:n_q + n_c])

    # 1. L 기록 후 한 번의 역전파로 모든 dL/dq, dL/dq'
    tape, q, qp = init_q_qp(q_vars)
    lagrangian = spec.lagrangian(t, q, qp, spec.params)
    tape.stop()
    grads = backprop(tape, lagrangian, fill_zeros=False)
    dl_dq, dl_dqp = grads[:n_q], grads[n_q:]

    residuals: List[Any] = []
    for i in range(n_q):
        total = None
        if dl_dqp[i] is not None:
            total = fn.diff(dl_dqp[i], 1)
        if dl_dq[i] is not None:
            total = _add(total, -dl_dq[i])
        residuals.append(total)

    # 2. 구속조건은 각각 별도 테이프
    constraint_values = []
    for j, constraint in enumerate(spec.constraints):
        c_tape = Tape()
        qc = [c_tape.variable(zi) for zi in q_vars]
        value = constraint(t, qc, spec.params)
        c_tape.stop()
        for i, grad in enumerate(backprop(c_tape, value, fill_zeros=False)):
            if grad is not None:
                residuals[i] = _add(residuals[i], multipliers[j] * grad)
        constraint_values.append(_unwrap(value, c_tape))

    residuals = [0.0 if value is None else value for value in residuals]
    residuals.extend(constraint_values)
    residuals.extend(0.0 for _ in spec.extra_names)

    # 3. 외력/추가 방정식
    if spec.post_hook is not None:
        spec.post_hook(t, z, residuals, spec.params)
    return residuals


def second_kind_reference(spec):
    """
    구속 없는 (제2종) 라그랑지안 시스템을 음함수 ODE 로 변환

    Raises:
        ValidationException: 구속조건이 있는 경우
    """
    if spec.n_c > 0:
        raise ValidationException(
            f"제2종 시스템에는 구속조건이 없어야 합니다 (현재 {spec.n_c} 개)."
        )
    return spec.to_dae()
