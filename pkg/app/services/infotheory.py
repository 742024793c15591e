"""
플러그인 엔트로피 / 상호정보량 추정 서비스

모든 값은 비트(log₂) 단위.
  - plugin_entropy: 경험 빈도를 섀넌 공식에 대입
  - entropy_bias / entropy_variance_bound: 1차 편향과 분산 상한
  - mi_plugin: A가 균등 층화된 표본의 Ĥ(D) − Ĥ(D|A)
  - mi_fixed_a_scheme: 고정 A 몇 개로 조건부 엔트로피를 근사 (편향 상쇄)
  - paired_error_bar: 같은 고정 A를 쓴 두 추정값 차이의 표준오차
  - mi_joint_table: 층화 없는 표본의 Ĥ(A) + Ĥ(D) − Ĥ(A,D)

편향은 값에 더하지 않고 함께 보고한다.
"""

import logging
import math
from collections import Counter
from typing import Hashable, List, Optional, Sequence, Tuple

import numpy as np

from app.errors import DomainError, InsufficientSamplesError
from app.models.histogram import CategoricalHistogram
from app.models.scene import Coordinate
from app.schemas.info import MiEstimate

logger = logging.getLogger(__name__)

LOG2_E = math.log2(math.e)

# 고정 A 방식에서 허용하는 (가능한 결과 수 P) / (표본 수 N) 상한
MAX_OUTCOME_RATIO = 0.1


# ──────────────────────────────────────────
# 엔트로피
# ──────────────────────────────────────────

def plugin_entropy(hist: CategoricalHistogram) -> float:
    """−Σ (c/N) log₂(c/N)"""
    total = hist.total
    if total < 1:
        raise DomainError("빈 히스토그램의 엔트로피")
    # 결과 레이블 순서와 무관하도록 빈도를 정렬해서 더한다
    counts = np.sort(np.fromiter((c for c in hist.counts.values() if c > 0), dtype=float))
    freqs = counts / total
    value = float(-(freqs * np.log2(freqs)).sum())
    return max(value, 0.0)


def entropy_bias(outcomes: int, samples: int) -> float:
    """플러그인 엔트로피의 1차 부족분 (P−1)/(2N)·log₂e"""
    if outcomes < 1 or samples < 1:
        raise DomainError(f"P={outcomes}, N={samples} (모두 1 이상 필요)")
    return (outcomes - 1) / (2.0 * samples) * LOG2_E


def entropy_variance_bound(samples: int) -> float:
    """log₂²N / N"""
    if samples < 1:
        raise DomainError(f"N={samples} (1 이상 필요)")
    return math.log2(samples) ** 2 / samples


def conditional_entropy_uniform(per_a_hists: Sequence[CategoricalHistogram]) -> float:
    """A가 균등할 때의 Ĥ(D|A) = A 값별 플러그인 엔트로피의 단순 평균"""
    if not per_a_hists:
        raise DomainError("A 값별 히스토그램 목록이 비어 있음")
    for a, hist in enumerate(per_a_hists):
        if hist.total < 1:
            raise InsufficientSamplesError(f"A={a}에 해당하는 표본이 없음")
    return float(np.mean([plugin_entropy(hist) for hist in per_a_hists]))


# ──────────────────────────────────────────
# 상호정보량
# ──────────────────────────────────────────

def mi_plugin(samples: Sequence[Tuple[int, Hashable]], m: int) -> MiEstimate:
    """A ∈ {0..m}가 균등 층화된 (A, D) 표본의 플러그인 상호정보량.

    Args:
        samples: (A, D) 정규 인코딩 쌍
        m: A의 최대값 (결과 수 m+1)

    Returns:
        MiEstimate — value = Ĥ(D) − Ĥ(D|A),
        variance_bound = (log₂²N + (m+1)·log₂²(N/(m+1)))/N,
        bias = +m²/(2N)·log₂e (보고용)
    """
    if m < 0:
        raise DomainError(f"m={m} (0 이상 필요)")
    n = len(samples)
    if n < 1:
        raise DomainError("표본이 없음")

    marginal = CategoricalHistogram()
    strata = [CategoricalHistogram() for _ in range(m + 1)]
    for a, d in samples:
        if not (0 <= a <= m):
            raise DomainError(f"A={a}가 0..{m} 범위를 벗어남")
        marginal.add(d)
        strata[a].add(d)

    sizes = {hist.total for hist in strata}
    if len(sizes) != 1:
        raise DomainError(
            f"A 층 크기가 같지 않음 ({sorted(sizes)}). 고정 A 방식 또는 결합표 방식을 사용할 것"
        )

    stratum = n / (m + 1)
    h_d = plugin_entropy(marginal)
    h_d_given_a = conditional_entropy_uniform(strata)
    variance = (math.log2(n) ** 2 + (m + 1) * math.log2(stratum) ** 2) / n
    return MiEstimate(
        value=h_d - h_d_given_a,
        variance_bound=variance,
        bias=m * m / (2.0 * n) * LOG2_E,
        method="joint-plugin",
        samples=n,
    )


def mi_fixed_a_scheme(
    h_d: CategoricalHistogram,
    h_d_given_a: Sequence[CategoricalHistogram],
    possible_outcomes: Optional[int] = None,
    max_ratio: float = MAX_OUTCOME_RATIO,
) -> MiEstimate:
    """고정 A 방식 상호정보량.

    무작위 A 실행으로 Ĥ(D)를, 몇 개의 고정 A 실행으로 조건부 엔트로피를 구한다.
    모든 히스토그램의 N이 같으므로 1차 편향이 상쇄되어 bias = 0.

    Args:
        h_d: 무작위 A 실행의 D 히스토그램
        h_d_given_a: 고정 A 실행별 D 히스토그램
        possible_outcomes: D의 가능한 결과 수 P. 없으면 관측된 최대 지지 크기를 쓴다.
        max_ratio: 허용하는 P/N 상한

    Returns:
        MiEstimate — variance_bound는 조건부 엔트로피들의 표본분산(ddof=1)
    """
    if not h_d_given_a:
        raise DomainError("고정 A 히스토그램이 없음")
    totals = {h_d.total} | {hist.total for hist in h_d_given_a}
    if len(totals) != 1:
        raise DomainError(f"히스토그램 표본 수가 서로 다름: {sorted(totals)}")
    n = h_d.total
    if n < 1:
        raise InsufficientSamplesError("표본이 없음")

    outcomes = possible_outcomes
    if outcomes is None:
        outcomes = max([h_d.support] + [hist.support for hist in h_d_given_a])
    if outcomes / n >= max_ratio:
        raise InsufficientSamplesError(
            f"P/N = {outcomes}/{n} = {outcomes / n:.4g} ≥ {max_ratio} (표본 수 부족)"
        )

    conditional = [plugin_entropy(hist) for hist in h_d_given_a]
    variance = float(np.var(conditional, ddof=1)) if len(conditional) > 1 else 0.0
    return MiEstimate(
        value=plugin_entropy(h_d) - float(np.mean(conditional)),
        variance_bound=variance,
        bias=0.0,
        method="fixed-A-scheme",
        samples=n,
        conditional_entropies=conditional,
        outcome_count=outcomes,
        outcome_count_observed=possible_outcomes is None,
        outcome_ratio_limit=max_ratio,
    )


def paired_error_bar(first: MiEstimate, second: MiEstimate) -> float:
    """두 고정 A 추정값 차이의 오차 막대.

    같은 고정 정답들로 만든 두 추정값이면 정답별 조건부 엔트로피 차이의
    표본분산으로 평균 차이의 표준오차를 구한다. 짝이 맞지 않으면
    두 오차 막대의 합을 쓴다.
    """
    a, b = first.conditional_entropies, second.conditional_entropies
    if len(a) == len(b) and len(a) > 1:
        diffs = np.subtract(a, b)
        return float(np.sqrt(np.var(diffs, ddof=1) / len(diffs)))
    return first.error_bar + second.error_bar


def mi_joint_table(samples: Sequence[Tuple[Hashable, Hashable]]) -> MiEstimate:
    """층화 없는 (A, D) 표본의 Ĥ(A) + Ĥ(D) − Ĥ(A,D).

    bias = ((P_AD−1) − (P_A−1) − (P_D−1))/(2N)·log₂e (E[Î] − I의 1차 근사, 관측 지지 크기 사용),
    variance_bound = 3·log₂²N/N
    """
    n = len(samples)
    if n < 1:
        raise DomainError("표본이 없음")
    h_a = CategoricalHistogram.from_outcomes(a for a, _ in samples)
    h_d = CategoricalHistogram.from_outcomes(d for _, d in samples)
    h_ad = CategoricalHistogram.from_outcomes(samples)

    excess = (h_ad.support - 1) - (h_a.support - 1) - (h_d.support - 1)
    value = plugin_entropy(h_a) + plugin_entropy(h_d) - plugin_entropy(h_ad)
    return MiEstimate(
        value=value,
        variance_bound=3.0 * entropy_variance_bound(n),
        bias=excess / (2.0 * n) * LOG2_E,
        method="joint-table",
        samples=n,
    )


def histograms_by_stratum(samples: Sequence[Tuple[int, Hashable]]) -> List[CategoricalHistogram]:
    """A 값 오름차순으로 D 히스토그램을 나눈다"""
    grouped = {}
    for a, d in samples:
        grouped.setdefault(a, Counter())[d] += 1
    return [CategoricalHistogram(counts=grouped[a]) for a in sorted(grouped)]


# ──────────────────────────────────────────
# 추정값 D의 정규 인코딩
# ──────────────────────────────────────────

def subset_outcome_count(side: int, k: int) -> int:
    """side×side 격자에서 k개 픽셀 집합의 수 + 축퇴 결과 1개"""
    return math.comb(side * side, k) + 1


def degenerate_outcome(side: int, k: int) -> int:
    """축퇴(점이 k개 미만) 결과에 예약된 인덱스 C(side², k)"""
    return math.comb(side * side, k)


def encode_medoids(medoids: Sequence[Coordinate], side: int, k: int) -> int:
    """정렬된 medoid 좌표 집합 → [0, C(side², k)) 조합수 순위 (colex).

    픽셀 번호 p = row·side + col 를 오름차순 p₀ < … < p_{k−1}로 놓으면
    순위 = Σ C(pᵢ, i+1).
    """
    if len(medoids) != k:
        raise DomainError(f"medoid {len(medoids)}개 ≠ k={k}")
    flat = sorted(int(r) * side + int(c) for r, c in medoids)
    if len(set(flat)) != k or flat[0] < 0 or flat[-1] >= side * side:
        raise DomainError(f"잘못된 medoid 집합: {medoids}")
    return sum(math.comb(p, i + 1) for i, p in enumerate(flat))


def decode_medoids(rank: int, side: int, k: int) -> Tuple[Coordinate, ...]:
    """encode_medoids의 역변환 (좌표 사전순)"""
    if not (0 <= rank < math.comb(side * side, k)):
        raise DomainError(f"순위 {rank}가 범위를 벗어남 (side={side}, k={k})")
    flat = []
    remaining = rank
    for i in range(k, 0, -1):
        p = i - 1
        while math.comb(p + 1, i) <= remaining:
            p += 1
        flat.append(p)
        remaining -= math.comb(p, i)
    return tuple(sorted((p // side, p % side) for p in flat))
