"""
표면 시나리오 생성 서비스

정답 변수 A와 채널 패턴 변수 B를 만든다.
  - 끌개 시나리오: 잘 떨어진 두 끌개 좌표 → 가우시안 점유 확률 → 베르누이 패턴
  - 입자 시나리오: 입자 개수 → 겹치지 않는 d1×d2 직사각형 배치

좌표는 (row, col), 원점은 좌상단, 픽셀 중심은 정수 좌표.
"""

import logging
import math
from typing import List

import numpy as np

from app.errors import ConfigurationError, PlacementError
from app.models.scene import AttractorTruth, ChannelPattern, ParticleTruth, Rectangle
from app.schemas.scene import AttractorParams, GridSpec, ParticleParams

logger = logging.getLogger(__name__)

# 끌개 좌표 거절 표본 상한
ATTRACTOR_MAX_TRIES = 1_000_000

# 입자 하나당 연속 거절 상한
PLACEMENT_MAX_REJECTIONS = 100_000


# ──────────────────────────────────────────
# 끌개 시나리오
# ──────────────────────────────────────────

def attractor_coordinate_range(grid: GridSpec, params: AttractorParams) -> tuple:
    """가장자리 여유를 만족하는 좌표 범위 [lo, hi] (양 끝 포함)"""
    lo = math.ceil(params.edge_margin)
    hi = grid.side - 1 - math.ceil(params.edge_margin)
    return lo, hi


def sample_attractor_truth(
    rng: np.random.Generator,
    grid: GridSpec,
    params: AttractorParams,
) -> AttractorTruth:
    """제약(가장자리 여유, 최소 간격)을 만족하는 정수 좌표 쌍 중 균등 추출.

    순서쌍을 균등 추출해 제약 위반을 거절한 뒤 사전순으로 정규화한다.
    (p, q)와 (q, p)가 모두 같은 비순서쌍으로 가므로 비순서쌍 위에서도 균등하다.
    """
    lo, hi = attractor_coordinate_range(grid, params)
    if hi < lo or math.sqrt(2.0) * (hi - lo) < params.min_separation:
        raise ConfigurationError(
            f"끌개 제약 영역이 비어 있음: side={grid.side}, margin={params.edge_margin}, "
            f"min_separation={params.min_separation}"
        )

    min_sep2 = params.min_separation ** 2
    for _ in range(ATTRACTOR_MAX_TRIES):
        r1, c1, r2, c2 = rng.integers(lo, hi + 1, size=4)
        if (r1 - r2) ** 2 + (c1 - c2) ** 2 >= min_sep2:
            return AttractorTruth.canonical((r1, c1), (r2, c2))
    raise ConfigurationError(f"끌개 좌표 거절 표본 {ATTRACTOR_MAX_TRIES}회 초과")


def attractor_occupancy(
    truth: AttractorTruth,
    grid: GridSpec,
    params: AttractorParams,
) -> np.ndarray:
    """픽셀 중심에서의 점유 확률 min(1, φ Σ exp[−d²/(2σ²)])"""
    rows, cols = np.indices((grid.side, grid.side), dtype=float)
    total = np.zeros((grid.side, grid.side))
    for r, c in truth.coords:
        d2 = (rows - r) ** 2 + (cols - c) ** 2
        total += np.exp(-d2 / (2.0 * params.sigma2))
    return np.minimum(1.0, params.phi * total)


def sample_pattern_from_probs(rng: np.random.Generator, probs: np.ndarray) -> ChannelPattern:
    """픽셀별 독립 베르누이 추출"""
    probs = np.asarray(probs, dtype=float)
    return ChannelPattern(bits=(rng.random(probs.shape) < probs).astype(np.uint8))


def empirical_occupancy(
    rng: np.random.Generator,
    truth: AttractorTruth,
    grid: GridSpec,
    params: AttractorParams,
    draws: int,
) -> np.ndarray:
    """고정된 끌개에서 draws번 패턴을 뽑아 픽셀별 입자 존재 비율을 구한다"""
    if draws < 1:
        raise ConfigurationError(f"draws={draws} (1 이상 필요)")
    probs = attractor_occupancy(truth, grid, params)
    total = np.zeros(probs.shape)
    for _ in range(draws):
        total += sample_pattern_from_probs(rng, probs).bits
    return total / draws


# ──────────────────────────────────────────
# 입자 시나리오
# ──────────────────────────────────────────

def sample_particle_truth(rng: np.random.Generator, params: ParticleParams) -> ParticleTruth:
    """{0, …, max_particles} 균등"""
    return ParticleTruth(count=int(rng.integers(0, params.max_particles + 1)))


def draw_particle_rectangles(
    rng: np.random.Generator,
    grid: GridSpec,
    truth: ParticleTruth,
    params: ParticleParams,
) -> List[Rectangle]:
    """겹치지 않는 d1×d2 직사각형 truth.count개를 순차 거절 표본으로 뽑는다.

    방향(가로/세로)과 좌상단 모서리를 균등 추출하고, 이미 놓인 입자와
    겹치면 다시 뽑는다. 가로 방향은 높이 d1, 너비 d2.
    """
    d1, d2 = params.dims
    side = grid.side
    if not params.fits(grid):
        raise PlacementError(f"입자 크기 {params.dims}가 격자 {side}보다 큼")
    if truth.count * d1 * d2 > side * side:
        raise PlacementError(f"입자 {truth.count}개는 {side}×{side} 격자에 들어갈 수 없음")

    occupied = np.zeros((side, side), dtype=bool)
    rectangles: List[Rectangle] = []
    for index in range(truth.count):
        for _ in range(PLACEMENT_MAX_REJECTIONS):
            height, width = (d1, d2) if rng.integers(0, 2) == 0 else (d2, d1)
            top = int(rng.integers(0, side - height + 1))
            left = int(rng.integers(0, side - width + 1))
            block = occupied[top:top + height, left:left + width]
            if not block.any():
                block[:] = True
                rectangles.append((top, left, height, width))
                break
        else:
            raise PlacementError(
                f"{index + 1}번째 입자 배치가 {PLACEMENT_MAX_REJECTIONS}회 연속 거절됨 (표면 과밀)"
            )
    return rectangles


def place_particles(
    rng: np.random.Generator,
    grid: GridSpec,
    truth: ParticleTruth,
    params: ParticleParams,
) -> ChannelPattern:
    """draw_particle_rectangles의 직사각형을 1로 칠한 패턴"""
    bits = np.zeros((grid.side, grid.side), dtype=np.uint8)
    for top, left, height, width in draw_particle_rectangles(rng, grid, truth, params):
        bits[top:top + height, left:left + width] = 1
    return ChannelPattern(bits=bits)
