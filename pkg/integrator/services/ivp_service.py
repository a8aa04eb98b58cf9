import logging
from typing import Optional, Sequence

from common.exceptions import ValidationException
from dummy_derivs.services.augment_service import augment
from dummy_derivs.services.reduced_ode_service import ReducedOde
from dummy_derivs.services.selection_service import scheme_from_delta, select_state_vector
from integrator.services.rk_service import rk_integrate
from integrator.services.taylor_service import taylor_integrate
from integrator.trajectory import IvpConfig, Trajectory
from structural.items import ItemPoint
from structural.result import StructuralResult
from structural.services.jacobian_service import system_jacobian

logger = logging.getLogger(__name__)

METHODS = ('taylor', 'dd-rk')


def build_reduced_ode(
    dae, structural: StructuralResult, point: ItemPoint, cfg: IvpConfig, dd_spec: Optional[Sequence[int]] = None
) -> ReducedOde:
    """시작 차트 결정 (dd_spec 이 없으면 점에서 선택)"""
    aug = augment(dae, structural)
    if dd_spec is None:
        scheme = select_state_vector(aug, structural, point)
    else:
        scheme = scheme_from_delta(dd_spec, structural, jacobian=system_jacobian(dae, structural, point))
    return ReducedOde(
        aug, scheme, point, cfg.newton_tol, max_iter=cfg.newton_max_iter, reuse=cfg.jacobian_reuse,
    )


def integrate(
    dae,
    structural: StructuralResult,
    point: ItemPoint,
    cfg: IvpConfig,
    method: str = 'taylor',
    dd_spec: Optional[Sequence[int]] = None,
) -> Trajectory:
    """
    방법 이름으로 적분기 선택

    Args:
        method (str): 'taylor' 또는 'dd-rk'
        dd_spec: dd-rk 의 시작 DD-spec 벡터

    Raises:
        ValidationException: 알 수 없는 방법, taylor 에 dd_spec 지정
    """
    if method not in METHODS:
        raise ValidationException(f"알 수 없는 적분 방법입니다: {method} (가능: {', '.join(METHODS)})")
    logger.debug("integrating %s on [%g, %g] with tol=%g", method, cfg.t0, cfg.t_end, cfg.tol)
    if method == 'taylor':
        if dd_spec is not None:
            raise ValidationException("dd-spec 은 dd-rk 방법에서만 쓸 수 있습니다.")
        return taylor_integrate(dae, structural, point, cfg)
    return rk_integrate(build_reduced_ode(dae, structural, point, cfg, dd_spec), cfg)
