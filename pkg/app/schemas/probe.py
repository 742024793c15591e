"""탐침(probe) 및 ROC 스키마"""

from typing import List, Literal, Tuple

from pydantic import BaseModel, Field, model_validator

RocKind = Literal[
    "classical-optimal-lower-bound",
    "quantum-achievable-upper-bound",
    "time-sharing",
]


class LossChannelPair(BaseModel):
    """판별 대상 순수 손실 채널 쌍과 픽셀당 탐침 에너지"""
    tau0: float = Field(0.95, gt=0.0, le=1.0, description="채널 C₀ 투과율 (입자 없음)")
    tau1: float = Field(0.4, gt=0.0, le=1.0, description="채널 C₁ 투과율 (입자 있음)")
    mean_photons: float = Field(8.0, ge=0.0, description="픽셀당 평균 광자 수 m")

    class Config:
        frozen = True
        extra = "forbid"


class RocCurve(BaseModel):
    """(1종 오류, 2종 오류) 점열. alpha 순증가, beta 비증가."""
    kind: RocKind = Field(..., description="곡선 종류")
    points: List[Tuple[float, float]] = Field(..., min_length=1, description="(alpha, beta) 점열")

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _check_monotone(self) -> "RocCurve":
        prev_alpha, prev_beta = None, None
        for alpha, beta in self.points:
            if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
                raise ValueError(f"ROC 점이 [0,1] 범위를 벗어남: ({alpha}, {beta})")
            if prev_alpha is not None:
                if alpha <= prev_alpha:
                    raise ValueError(f"alpha가 순증가하지 않음: {prev_alpha} → {alpha}")
                if beta > prev_beta:
                    raise ValueError(f"beta가 증가함: {prev_beta} → {beta}")
            prev_alpha, prev_beta = alpha, beta
        return self

    @property
    def alpha_min(self) -> float:
        return self.points[0][0]

    @property
    def alpha_max(self) -> float:
        return self.points[-1][0]
