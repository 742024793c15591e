"""표면(격자) 시나리오 설정 스키마"""

from typing import Tuple

from pydantic import BaseModel, Field, model_validator


class GridSpec(BaseModel):
    """정사각 픽셀 격자"""
    side: int = Field(..., ge=1, description="한 변의 픽셀 수 d")

    class Config:
        frozen = True
        extra = "forbid"


class AttractorParams(BaseModel):
    """끌개(attractor) 시나리오의 가우시안 점유 확률 파라미터"""
    phi: float = Field(1.0, gt=0.0, description="진폭 φ")
    sigma2: float = Field(2.0, gt=0.0, description="분산 σ² (픽셀²)")
    min_separation: float = Field(8.0, gt=0.0, description="두 끌개 간 최소 유클리드 거리 (픽셀)")
    edge_margin: float = Field(4.0, ge=0.0, description="가장자리까지 최소 거리 (픽셀)")

    class Config:
        frozen = True
        extra = "forbid"


class ParticleParams(BaseModel):
    """직사각형 입자 시나리오 파라미터"""
    dims: Tuple[int, int] = Field((2, 5), description="입자 크기 (d1, d2) 픽셀")
    max_particles: int = Field(10, ge=0, description="최대 입자 수 m")

    class Config:
        frozen = True
        extra = "forbid"

    @model_validator(mode="after")
    def _check_dims(self) -> "ParticleParams":
        if min(self.dims) < 1:
            raise ValueError(f"입자 크기는 1 이상이어야 함: {self.dims}")
        return self

    def fits(self, grid: GridSpec) -> bool:
        return max(self.dims) <= grid.side


class ErrorPair(BaseModel):
    """픽셀 측정 오류 확률 — ξ₁: 0→1, ξ₂: 1→0"""
    xi1: float = Field(..., ge=0.0, le=1.0, description="1종 오류 확률")
    xi2: float = Field(..., ge=0.0, le=1.0, description="2종 오류 확률")

    class Config:
        frozen = True
        extra = "forbid"
