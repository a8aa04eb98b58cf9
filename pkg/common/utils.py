"""
Common utility functions
"""
import difflib
import math
from functools import lru_cache
from typing import Dict, Iterable, List, Tuple, Union

import numpy as np

from .exceptions import ValidationException


def parse_number(text: str) -> Union[int, float]:
    """
    문자열을 정수 또는 실수로 변환

    Args:
        text (str): 변환할 문자열 (예: '3', '1e-8', 'pi/2')

    Returns:
        Union[int, float]: 변환된 숫자
    """
    value = text.strip()
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    # pi 배수 표기 허용 (각도 초기조건용)
    if 'pi' in value:
        scaled = value.replace('pi', '')
        sign = -1.0 if scaled.startswith('-') else 1.0
        scaled = scaled.lstrip('+-')
        if scaled.startswith('/'):
            return sign * math.pi / float(scaled[1:])
        if scaled.endswith('*'):
            scaled = scaled[:-1]
        return sign * math.pi * (float(scaled) if scaled else 1.0)
    raise ValidationException(f"숫자로 변환할 수 없습니다: {text}")


def parse_assignments(pairs: Iterable[str]) -> Dict[str, str]:
    """
    'key=value' 형식 목록을 딕셔너리로 변환

    Args:
        pairs (Iterable[str]): 'k=v' 문자열 목록

    Returns:
        Dict[str, str]: 키-값 (값은 문자열 그대로)
    """
    result = {}
    for pair in pairs or []:
        if '=' not in pair:
            raise ValidationException(f"'키=값' 형식이 아닙니다: {pair}")
        key, value = pair.split('=', 1)
        key = key.strip()
        if not key:
            raise ValidationException(f"키가 비어 있습니다: {pair}")
        result[key] = value.strip()
    return result


def parse_list(text: str) -> List[str]:
    """쉼표로 구분된 문자열을 공백 제거된 목록으로 변환"""
    if not text:
        return []
    return [item.strip() for item in text.split(',') if item.strip()]


def suggest_names(name: str, candidates: Iterable[str], limit: int = 3) -> List[str]:
    """오타가 난 이름에 대해 비슷한 후보를 제안"""
    return difflib.get_close_matches(name, list(candidates), n=limit, cutoff=0.5)


@lru_cache(maxsize=None)
def factorials(n: int) -> np.ndarray:
    """0! 부터 n! 까지의 실수 배열"""
    return np.array([float(math.factorial(k)) for k in range(n + 1)])


def item_label(name: str, level: int) -> str:
    """
    변수 이름과 미분 횟수로 항목 라벨 생성

    Args:
        name (str): 변수 이름
        level (int): 미분 횟수

    Returns:
        str: 예) ('x', 2) -> "x''"
    """
    return name + "'" * level


def parse_item_label(label: str) -> Tuple[str, int]:
    """항목 라벨을 (변수 이름, 미분 횟수)로 분해"""
    stripped = label.rstrip("'")
    if not stripped:
        raise ValidationException(f"잘못된 항목 라벨입니다: {label}")
    return stripped, len(label) - len(stripped)


def mixed_error(delta: np.ndarray, reference: np.ndarray, tol: float) -> float:
    """
    혼합 상대-절대 오차 노름

    Args:
        delta (np.ndarray): 오차 추정치
        reference (np.ndarray): 기준 크기
        tol (float): 허용오차

    Returns:
        float: max_i |delta_i| / (tol * (1 + |reference_i|))
    """
    delta = np.asarray(delta, dtype=float)
    if delta.size == 0:
        return 0.0
    scale = tol * (1.0 + np.abs(np.asarray(reference, dtype=float)))
    return float(np.max(np.abs(delta) / scale))
