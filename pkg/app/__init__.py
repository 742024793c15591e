"""양자 판별 이점이 군집화 추정의 상호정보량으로 전달되는 정도를 계산하는 시뮬레이션 패키지"""

__version__ = "0.1.0"
