"""상호정보량 추정 결과 스키마"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field

MiMethod = Literal["joint-plugin", "fixed-A-scheme", "joint-table"]


class MiEstimate(BaseModel):
    """상호정보량 추정값 (비트). bias는 보고만 하고 value에 더하지 않는다."""
    value: float = Field(..., description="추정값 (bits)")
    variance_bound: float = Field(..., ge=0.0, description="분산 상한 (bits²)")
    bias: float = Field(0.0, description="1차 편향 (bits, 부호 포함)")
    method: MiMethod = Field(..., description="추정 방식")
    samples: int = Field(..., ge=1, description="히스토그램당 표본 수 N")
    conditional_entropies: List[float] = Field(default_factory=list, description="고정 A 조건부 엔트로피")

    # 고정 A 방식의 P/N 검사 기록
    outcome_count: Optional[int] = Field(None, ge=1, description="P/N 검사에 쓴 결과 수 P")
    outcome_count_observed: bool = Field(False, description="P가 가능한 결과 수가 아니라 관측된 최대 지지 크기")
    outcome_ratio_limit: Optional[float] = Field(None, gt=0.0, description="검사에 쓴 P/N 상한")

    @property
    def error_bar(self) -> float:
        return self.variance_bound ** 0.5

    @property
    def outcome_ratio(self) -> Optional[float]:
        if self.outcome_count is None:
            return None
        return self.outcome_count / self.samples
