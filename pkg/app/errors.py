"""
예외 계층 정의

각 예외는 CLI 종료 코드(exit_code)를 가진다.
  - 2: 설정/도메인 오류 (잘못된 입력, 표본 부족)
  - 3: 수치/내부 일관성 오류 (대각화 잔차, PSD 위반, 배치 실패)
"""


class QClusterError(Exception):
    """패키지 공통 최상위 예외"""
    exit_code = 1


class DomainError(QClusterError, ValueError):
    """함수 정의역을 벗어난 인자"""
    exit_code = 2


class ConfigurationError(QClusterError, ValueError):
    """실험 설정 오류 (제약 영역이 비어 있음, 거절 표본 상한 초과 등)"""
    exit_code = 2


class InsufficientSamplesError(QClusterError, ValueError):
    """엔트로피 추정에 필요한 표본 수 부족"""
    exit_code = 2


class PlacementError(QClusterError, RuntimeError):
    """입자 배치 실패 (격자가 너무 붐빔)"""
    exit_code = 3


class NumericConsistencyError(QClusterError, ArithmeticError):
    """수치 계산 결과가 불변식을 위반"""
    exit_code = 3
