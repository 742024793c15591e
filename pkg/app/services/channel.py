"""픽셀 측정 잡음 채널: 참 패턴 B를 측정 결과 C로 사상"""

import numpy as np

from app.models.scene import ChannelPattern
from app.schemas.scene import ErrorPair


def apply_measurement_noise(
    rng: np.random.Generator,
    pattern: ChannelPattern,
    errors: ErrorPair,
) -> ChannelPattern:
    """0 픽셀은 ξ₁, 1 픽셀은 ξ₂ 확률로 뒤집는다.

    픽셀마다 균등 난수 하나를 문턱값과 비교하므로 같은 난수열에서
    문턱값을 올리면 오류 집합은 포함 관계로 커진다.
    """
    bits = pattern.bits
    draws = rng.random(bits.shape)
    thresholds = np.where(bits == 1, errors.xi2, errors.xi1)
    flips = (draws < thresholds).astype(np.uint8)
    return ChannelPattern(bits=bits ^ flips)
