"""군집화 입력/출력 모델"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from app.models.scene import ChannelPattern, Coordinate

# DBSCAN 잡음 레이블
NOISE = 0


@dataclass(frozen=True)
class PointSet:
    """측정값 1인 픽셀 좌표 목록 (n, 2), 중복 없음"""
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64).reshape(-1, 2)
        if len(pts) and len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("PointSet에 중복 좌표가 있음")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "PointSet":
        """임의 모양의 2차원 0/1 배열에서 1 좌표 (정사각일 필요 없음)"""
        # argwhere는 행 우선(사전순) 순서를 보장
        return cls(points=np.argwhere(np.asarray(bits) == 1))

    @classmethod
    def from_pattern(cls, pattern: ChannelPattern) -> "PointSet":
        return cls.from_bits(pattern.bits)


@dataclass(frozen=True)
class KMedoidsResult:
    """k-medoids 결과. degenerate이면 medoids는 입력 점 전체(유사 medoid)."""
    medoids: Tuple[Coordinate, ...]
    degenerate: bool = False
    cost: int = 0


@dataclass(frozen=True)
class DbscanResult:
    """점별 레이블 (NOISE 또는 1..K)"""
    labels: np.ndarray
    cluster_count: int
    core: np.ndarray
