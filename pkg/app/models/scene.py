"""표면 시나리오 모델: 정답(A), 채널 패턴(B/C)"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

Coordinate = Tuple[int, int]
# 입자 직사각형 (top, left, height, width)
Rectangle = Tuple[int, int, int, int]


def parse_bit_grid(text: str) -> np.ndarray:
    """행 우선 0/1 텍스트 → 2차원 uint8 배열. 공백과 쉼표는 무시, 직사각형이면 된다."""
    rows: List[List[int]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip().replace(" ", "").replace(",", "")
        if not line:
            continue
        if set(line) - {"0", "1"}:
            raise ValueError(f"{number}행에 0/1 이외의 문자가 있음: {line!r}")
        rows.append([int(ch) for ch in line])
    if not rows:
        raise ValueError("빈 격자")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ValueError(f"행 길이가 다름: {sorted(widths)}")
    return np.array(rows, dtype=np.uint8)


@dataclass(frozen=True)
class AttractorTruth:
    """두 끌개의 픽셀 좌표 (row, col), 사전순 정렬"""
    coords: Tuple[Coordinate, Coordinate]

    @classmethod
    def canonical(cls, first: Coordinate, second: Coordinate) -> "AttractorTruth":
        p = (int(first[0]), int(first[1]))
        q = (int(second[0]), int(second[1]))
        return cls(coords=tuple(sorted((p, q))))

    def separation(self) -> float:
        (r1, c1), (r2, c2) = self.coords
        return float(np.hypot(r1 - r2, c1 - c2))


@dataclass(frozen=True)
class ParticleTruth:
    """입자 개수"""
    count: int


@dataclass(frozen=True)
class ChannelPattern:
    """side×side 이진 행렬. 채널 패턴(B)과 측정 결과(C)에 모두 사용."""
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
            raise ValueError(f"정사각 행렬이 아님: shape={bits.shape}")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("패턴 원소는 0 또는 1이어야 함")
        object.__setattr__(self, "bits", bits.astype(np.uint8))

    @property
    def side(self) -> int:
        return int(self.bits.shape[0])

    def ones(self) -> int:
        return int(self.bits.sum())

    def to_text(self) -> str:
        """행 우선 0/1 텍스트 격자"""
        return "\n".join("".join(str(int(v)) for v in row) for row in self.bits)

    @classmethod
    def from_text(cls, text: str) -> "ChannelPattern":
        return cls(bits=parse_bit_grid(text))
