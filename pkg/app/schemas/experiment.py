"""실험 설정 및 스윕 결과 스키마"""

import json
import math
from pathlib import Path
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from app.errors import ConfigurationError
from app.schemas.info import MiEstimate
from app.schemas.probe import LossChannelPair
from app.schemas.scene import AttractorParams, GridSpec, ParticleParams
from config.settings import settings

# 시나리오별 기본 표본 수 (히스토그램당)
DEFAULT_SAMPLES = {"particles": 20_000, "attractors": 100_000}
FULL_SCALE_SAMPLES = 800_000


def _default_type1_grid() -> List[float]:
    return [float(round(v, 12)) for v in np.linspace(0.0, settings.ALPHA_MAX, 11)]


class ExperimentConfig(BaseModel):
    """실험 설정 (JSON 문서와 필드 단위로 대응, 알 수 없는 키는 거부)"""
    scenario: Literal["attractors", "particles"] = Field(..., description="시나리오")
    grid: GridSpec = Field(..., description="픽셀 격자")
    attractor_params: AttractorParams = Field(default_factory=AttractorParams)
    particle_params: ParticleParams = Field(default_factory=ParticleParams)
    probe: LossChannelPair = Field(default_factory=LossChannelPair, description="판별할 채널 쌍")

    type1_grid: List[float] = Field(default_factory=_default_type1_grid, min_length=1, description="스윕할 1종 오류 값")
    alpha_max: float = Field(default_factory=lambda: settings.ALPHA_MAX, gt=0.0, le=1.0, description="ROC 정의역 상한")

    samples_per_point: Optional[int] = Field(None, ge=1, description="히스토그램당 표본 수 N (없으면 시나리오 기본값)")
    full_scale: bool = Field(False, description="고정 A 방식 N을 800000으로 올림")
    fixed_truths: int = Field(5, ge=1, description="고정 A 방식의 고정 정답 수")
    outcome_ratio_limit: float = Field(0.1, gt=0.0, le=1.0, description="고정 A 방식의 P/N 상한")
    master_seed: int = Field(default_factory=lambda: settings.MASTER_SEED, ge=0)

    roc_source: Literal["computed", "file"] = Field("computed", description="ROC 곡선 출처")
    roc_file: Optional[str] = Field(None, description="roc_source=file일 때 ROC CSV 경로")
    a_grid: int = Field(default_factory=lambda: settings.QUANTUM_A_GRID, ge=2)
    b_grid: int = Field(default_factory=lambda: settings.QUANTUM_B_GRID, ge=2)
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1, description="병렬 프로세스 수")

    kmedoids_k: int = Field(2, ge=1)
    dbscan_eps: float = Field(math.sqrt(2.0), gt=0.0)
    dbscan_min_pts: int = Field(4, ge=1)
    cluster_cap: int = Field(10, ge=0)

    stratify: bool = Field(True, description="입자 시나리오에서 A를 층화 (i mod (m+1))")
    records: bool = Field(False, description="표본별 (A, D) 기록 CSV 저장")
    replicates: int = Field(0, ge=0, description="α마다 시드를 바꿔 반복하는 횟수 (0이면 생략, 아니면 2 이상)")

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        for alpha in self.type1_grid:
            if not (0.0 <= alpha <= self.alpha_max):
                raise ValueError(f"type1_grid 값 {alpha}가 [0, {self.alpha_max}]를 벗어남")
        if self.scenario == "particles":
            if not self.particle_params.fits(self.grid):
                raise ValueError(f"입자 크기 {self.particle_params.dims}가 격자 {self.grid.side}보다 큼")
            strata = self.particle_params.max_particles + 1
            if self.stratify and self.n_samples % strata != 0:
                raise ValueError(f"표본 수 {self.n_samples}가 층 수 {strata}로 나누어떨어지지 않음")
        if self.replicates == 1:
            raise ValueError("replicates는 0 또는 2 이상이어야 함 (표본 표준편차)")
        if self.roc_source == "file" and not self.roc_file:
            raise ValueError("roc_source=file이면 roc_file 경로가 필요함")
        return self

    @property
    def n_samples(self) -> int:
        """히스토그램당 표본 수 N"""
        if self.samples_per_point is not None:
            return self.samples_per_point
        if self.full_scale and self.scenario == "attractors":
            return FULL_SCALE_SAMPLES
        default = DEFAULT_SAMPLES[self.scenario]
        if self.scenario == "particles" and self.stratify:
            # 층 크기가 같도록 m+1의 배수로 내림 (20000, m=10 → 19998)
            strata = self.particle_params.max_particles + 1
            return default // strata * strata
        return default

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        """JSON 설정 파일 로드. 검증 실패는 ConfigurationError로 바꾼다."""
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"설정 파일을 읽을 수 없음: {path} ({e})") from e
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            raise ConfigurationError(f"실험 설정 검증 실패:\n{e}") from e


class SweepRow(BaseModel):
    """스윕 한 행: 1종 오류 α에서 두 탐침의 2종 오류와 상호정보량"""
    type1: float = Field(..., ge=0.0, le=1.0)
    type2_classical: float = Field(..., ge=0.0, le=1.0)
    type2_quantum: float = Field(..., ge=0.0, le=1.0)
    mi_classical: MiEstimate
    mi_quantum: MiEstimate
