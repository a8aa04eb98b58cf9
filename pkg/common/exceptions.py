"""
Common exception classes
"""


class BaseAppException(Exception):
    """앱 기본 예외 클래스"""

    default_error_code = 'DAE_ERROR'

    def __init__(self, message: str, error_code: str = None):
        self.message = message
        self.error_code = error_code or self.default_error_code
        super().__init__(self.message)


class ValidationException(BaseAppException):
    """유효성 검증 예외 (잘못된 파라미터, 초기조건, CLI 인자)"""

    default_error_code = 'DAE_VALIDATION'


class ProblemNotFoundException(ValidationException):
    """등록되지 않은 문제 이름 예외"""

    default_error_code = 'DAE_PROBLEM_NOT_FOUND'

    def __init__(self, name: str, suggestions=None):
        self.name = name
        self.suggestions = list(suggestions or [])
        message = f"등록되지 않은 문제입니다: {name}"
        if self.suggestions:
            message += f" (혹시: {', '.join(self.suggestions)})"
        super().__init__(message)


class UnsupportedStructureError(BaseAppException):
    """값에 따라 분기하는 잔차 코드 등, 구조 분석이 불가능한 경우"""

    default_error_code = 'DAE_UNSUPPORTED_STRUCTURE'


class TapeUsageError(BaseAppException):
    """역방향 AD 테이프 사용 순서 오류"""

    default_error_code = 'DAE_TAPE_USAGE'


class NumericalException(BaseAppException):
    """수치 계산 실패 예외의 공통 부모 (CLI 종료코드 2)"""

    default_error_code = 'DAE_NUMERICAL'


class SingularEvaluationError(NumericalException):
    """0으로 나누기, 정의역 위반, NaN/Inf 발생"""

    default_error_code = 'DAE_SINGULAR_EVAL'


class InsufficientOrderError(NumericalException):
    """급수 차수가 요구되는 미분 횟수보다 작음"""

    default_error_code = 'DAE_INSUFFICIENT_ORDER'


class ConsistencyError(NumericalException):
    """내부 일관성 오류 (오프셋과 잔차 급수 차수 불일치, 데이터 체크섬 불일치 등)"""

    default_error_code = 'DAE_CONSISTENCY'


class StructuralSingularityError(NumericalException):
    """유한한 transversal 이 존재하지 않는 구조적 특이 DAE"""

    default_error_code = 'DAE_STRUCTURALLY_SINGULAR'

    def __init__(self, message: str, unmatched_rows=None, unmatched_cols=None):
        self.unmatched_rows = list(unmatched_rows or [])
        self.unmatched_cols = list(unmatched_cols or [])
        super().__init__(message)


class OffsetIterationError(NumericalException):
    """오프셋 고정점 반복이 상한 내에 끝나지 않음 (transversal 이 최대값이 아님)"""

    default_error_code = 'DAE_OFFSET_ITERATION'


class NotSAFriendlyError(NumericalException):
    """현재 점에서 G_k 열 선택 또는 시스템 야코비안이 특이함"""

    default_error_code = 'DAE_NOT_SA_FRIENDLY'


class ChartFailureError(NumericalException):
    """축약 ODE 의 뉴턴 반복 실패 (DD 전환 신호)"""

    default_error_code = 'DAE_CHART_FAILURE'


class InconsistentInitialConditionError(NumericalException):
    """일관된 초기점을 찾지 못함"""

    default_error_code = 'DAE_INCONSISTENT_IC'

    def __init__(self, message: str, worst_residuals=None):
        self.worst_residuals = list(worst_residuals or [])
        if self.worst_residuals:
            detail = ', '.join(f"{label}={value:.3e}" for label, value in self.worst_residuals)
            message = f"{message} (최대 잔차: {detail})"
        super().__init__(message)


class IntegrationError(NumericalException):
    """적분 중단 (특이 야코비안, 최대 스텝 초과, 전환 실패)"""

    default_error_code = 'DAE_INTEGRATION'

    def __init__(self, message: str, t: float = None):
        self.t = t
        if t is not None:
            message = f"{message} (t={t:.17g})"
        super().__init__(message)
