"""범주형 히스토그램"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable


@dataclass
class CategoricalHistogram:
    """정규 인코딩된 결과 → 발생 횟수"""
    counts: Counter = field(default_factory=Counter)

    @classmethod
    def from_outcomes(cls, outcomes: Iterable[Hashable]) -> "CategoricalHistogram":
        return cls(counts=Counter(outcomes))

    def add(self, outcome: Hashable, times: int = 1) -> None:
        self.counts[outcome] += times

    def merge(self, other: "CategoricalHistogram") -> "CategoricalHistogram":
        """결합법칙을 만족하는 병합 (새 객체 반환)"""
        merged = Counter(self.counts)
        merged.update(other.counts)
        return CategoricalHistogram(counts=merged)

    @property
    def total(self) -> int:
        return int(sum(self.counts.values()))

    @property
    def support(self) -> int:
        return sum(1 for c in self.counts.values() if c > 0)
