import logging

from common.exceptions import ValidationException
from dummy_derivs.augmented import AugmentedSystem
from structural.result import StructuralResult

logger = logging.getLogger(__name__)


def augment(dae, structural: StructuralResult) -> AugmentedSystem:
    """
    오프셋으로 증강 시스템 구성 (방정식 n + sum c, 항목 n + sum d)

    Raises:
        ValidationException: 오프셋 길이가 변수 개수와 다른 경우
    """
    if len(structural.c) != dae.n or len(structural.d) != dae.n:
        raise ValidationException("오프셋 길이가 DAE 크기와 다릅니다.")
    aug = AugmentedSystem(dae, structural)
    logger.debug("augmented system: %d equations in %d items", aug.n_f, aug.n_x)
    return aug
