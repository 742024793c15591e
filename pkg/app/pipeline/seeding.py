"""
표본별 독립 난수 하위 스트림

(master_seed, run, sample_index, stage, attempt)를 SeedSequence의 spawn_key로
넣어 PCG64 생성기를 만든다. 같은 입력은 플랫폼과 워커 수에 관계없이 같은
스트림을 만든다.
"""

from dataclasses import dataclass

import numpy as np

from app.errors import DomainError

# meta.json에 기록하는 난수 생성기 식별자
PRNG_ID = "numpy.PCG64/SeedSequence"

STAGE_IDS = {
    "truth": 0,
    "pattern": 1,
    "measurement": 2,
    "fixed_truth": 3,
}


def seed_stream(
    master_seed: int,
    sample_index: int,
    stage_tag: str,
    run: int = 0,
    attempt: int = 0,
) -> np.random.Generator:
    """(master_seed, sample_index, stage_tag)에서 독립 하위 스트림을 만든다.

    Args:
        master_seed: 실험 마스터 시드 (0 이상)
        sample_index: 표본 번호
        stage_tag: STAGE_IDS 중 하나
        run: 실행 번호 (무작위 A 실행 = 0, 고정 A 실행 = 1..)
        attempt: 배치 실패 후 재시도 번호
    """
    if stage_tag not in STAGE_IDS:
        raise DomainError(f"알 수 없는 단계 태그: {stage_tag!r} (가능: {sorted(STAGE_IDS)})")
    if min(master_seed, sample_index, run, attempt) < 0:
        raise DomainError(
            f"시드 구성요소는 음수일 수 없음: seed={master_seed}, index={sample_index}, run={run}, attempt={attempt}"
        )
    sequence = np.random.SeedSequence(
        entropy=master_seed,
        spawn_key=(run, sample_index, STAGE_IDS[stage_tag], attempt),
    )
    return np.random.Generator(np.random.PCG64(sequence))


@dataclass(frozen=True)
class SampleStream:
    """한 표본의 난수 스트림 묶음. 단계 태그별로 하위 스트림을 꺼낸다"""
    master_seed: int
    sample_index: int
    run: int = 0

    def stage(self, tag: str, attempt: int = 0) -> np.random.Generator:
        return seed_stream(self.master_seed, self.sample_index, tag, run=self.run, attempt=attempt)
