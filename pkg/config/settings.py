from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # 결과 파일 저장 경로
    OUTPUT_DIR: str = "output"

    # 난수 마스터 시드 (실험 설정에 시드가 없을 때 사용)
    MASTER_SEED: int = 20240101

    # 표본 병렬 처리: 워커 수, 작업 단위(표본 수)
    WORKERS: int = 1
    CHUNK_SIZE: int = 500

    LOG_LEVEL: str = "INFO"

    # 양자 ROC (a, b) 격자 크기
    QUANTUM_A_GRID: int = 512
    QUANTUM_B_GRID: int = 512

    # ROC 출력: 1종 오류 격자 점 수, 상한
    ROC_POINTS: int = 101
    ALPHA_MAX: float = 0.05

    # 배치 실패 시 새 하위 스트림으로 재시도하는 최대 횟수
    RETRY_LIMIT: int = 100

    class Config:
        env_file = ".env"
        env_prefix = "QCLUSTER_"
        extra = "ignore"


settings = Settings()
