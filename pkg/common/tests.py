import math

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from .exceptions import (
    BaseAppException,
    ChartFailureError,
    InconsistentInitialConditionError,
    IntegrationError,
    NumericalException,
    ProblemNotFoundException,
    SingularEvaluationError,
    StructuralSingularityError,
    ValidationException,
)
from .utils import (
    factorials,
    item_label,
    mixed_error,
    parse_assignments,
    parse_item_label,
    parse_list,
    parse_number,
    suggest_names,
)


class ParsingUtilsTestCase(SimpleTestCase):
    """명령행 값 파싱 유틸리티 테스트"""

    def test_parse_number(self):
        """정수, 실수, pi 배수 표기"""
        test_cases = [
            ('3', 3),
            (' -2 ', -2),
            ('1e-8', 1e-8),
            ('0.25', 0.25),
            ('pi', math.pi),
            ('-pi/2', -math.pi / 2),
            ('2pi', 2 * math.pi),
            ('0.5*pi', 0.5 * math.pi),
        ]
        for text, expected in test_cases:
            with self.subTest(text=text):
                self.assertAlmostEqual(parse_number(text), expected)
        self.assertIsInstance(parse_number('3'), int)

    def test_parse_number_invalid(self):
        for text in ('', 'abc', '1,2'):
            with self.subTest(text=text):
                with self.assertRaises(ValidationException):
                    parse_number(text)

    def test_parse_assignments(self):
        """'키=값' 목록, 값은 문자열 그대로"""
        result = parse_assignments(['m=2', " x' = 0 ", 'masses=1,2,3'])
        self.assertEqual(result, {'m': '2', "x'": '0', 'masses': '1,2,3'})
        self.assertEqual(parse_assignments(None), {})

    def test_parse_assignments_invalid(self):
        for pairs in (['m'], ['=2']):
            with self.subTest(pairs=pairs):
                with self.assertRaises(ValidationException):
                    parse_assignments(pairs)

    def test_parse_list(self):
        self.assertEqual(parse_list('x, y ,,lambda'), ['x', 'y', 'lambda'])
        self.assertEqual(parse_list(''), [])

    def test_suggest_names(self):
        self.assertEqual(suggest_names('pendulm', ['pendulum', 'planets', 'toy_ex1a']), ['pendulum'])
        self.assertEqual(suggest_names('zzz', ['pendulum']), [])


class ItemLabelTestCase(SimpleTestCase):
    """항목 라벨 테스트"""

    def test_label_and_parse(self):
        test_cases = [(('x', 0), 'x'), (('y', 2), "y''"), (('lambda1', 1), "lambda1'")]
        for (name, level), label in test_cases:
            with self.subTest(label=label):
                self.assertEqual(item_label(name, level), label)
                self.assertEqual(parse_item_label(label), (name, level))

    def test_parse_empty_name(self):
        with self.assertRaises(ValidationException):
            parse_item_label("''")


class NumericUtilsTestCase(SimpleTestCase):
    """수치 유틸리티 테스트"""

    def test_factorials(self):
        np.testing.assert_array_equal(factorials(5), [1.0, 1.0, 2.0, 6.0, 24.0, 120.0])

    def test_mixed_error(self):
        """|delta| / (tol (1 + |ref|)) 의 최대값"""
        value = mixed_error(np.array([1e-8, -3e-8]), np.array([0.0, 2.0]), 1e-8)
        self.assertAlmostEqual(value, 1.0)
        self.assertEqual(mixed_error(np.array([]), np.array([]), 1e-8), 0.0)


class ExceptionTestCase(SimpleTestCase):
    """예외 클래스 테스트"""

    def test_base_app_exception(self):
        """기본 앱 예외 테스트"""
        exception = BaseAppException("테스트 예외", "TEST_001")
        self.assertEqual(str(exception), "테스트 예외")
        self.assertEqual(exception.error_code, "TEST_001")
        self.assertEqual(BaseAppException("x").error_code, 'DAE_ERROR')

    def test_default_error_codes(self):
        test_cases = [
            (ValidationException("x"), 'DAE_VALIDATION'),
            (SingularEvaluationError("x"), 'DAE_SINGULAR_EVAL'),
            (ChartFailureError("x"), 'DAE_CHART_FAILURE'),
            (IntegrationError("x"), 'DAE_INTEGRATION'),
        ]
        for exception, code in test_cases:
            with self.subTest(code=code):
                self.assertEqual(exception.error_code, code)

    def test_exception_hierarchy(self):
        """사용법 오류와 수치 실패의 구분 (CLI 종료코드 1 / 2)"""
        self.assertIsInstance(ProblemNotFoundException('x'), ValidationException)
        for exception in (
            SingularEvaluationError("x"),
            StructuralSingularityError("x"),
            ChartFailureError("x"),
            InconsistentInitialConditionError("x"),
            IntegrationError("x"),
        ):
            with self.subTest(exception=type(exception).__name__):
                self.assertIsInstance(exception, NumericalException)
                self.assertNotIsInstance(exception, ValidationException)

    def test_message_details(self):
        """제안 이름, 최대 잔차, 시각이 메시지에 붙는다"""
        self.assertIn('pendulum', str(ProblemNotFoundException('pendulm', ['pendulum'])))
        error = InconsistentInitialConditionError("실패", [('C', 1.5), ('A', -0.25)])
        self.assertIn('C=1.500e+00', str(error))
        self.assertEqual(error.worst_residuals[1], ('A', -0.25))
        self.assertIn('t=2.5', str(IntegrationError("중단", 2.5)))
        self.assertEqual(IntegrationError("중단", 2.5).t, 2.5)


class SettingsTestCase(SimpleTestCase):
    """설정 구성 테스트"""

    def test_no_database_apps(self):
        """데이터베이스 없이 동작: 인증/컨텐츠타입 앱을 올리지 않는다"""
        for app in ('django.contrib.auth', 'django.contrib.contenttypes'):
            with self.subTest(app=app):
                self.assertNotIn(app, settings.INSTALLED_APPS)
        self.assertIn('rest_framework', settings.INSTALLED_APPS)
