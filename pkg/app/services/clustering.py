"""
측정 결과의 1 픽셀 군집화 서비스

- kmedoids: PAM (탐욕 BUILD 초기화 + 최선 SWAP 반복), SWAP이 멈추면 쌍 교환으로
  국소 최적 탈출, 제곱 유클리드 비용
- dbscan: 밀도 도달성 군집화, 이웃 수에 자기 자신 포함
- count_clusters: 군집 수 상한 적용

두 알고리즘 모두 입력과 파라미터의 결정적 함수다.
"""

import itertools
import logging
from collections import deque
from typing import List, Optional, Tuple

import numpy as np

from app.errors import DomainError
from app.models.clustering import NOISE, DbscanResult, KMedoidsResult, PointSet

logger = logging.getLogger(__name__)

# eps 경계 비교 허용치 (√2² 반올림)
EPS_SLACK = 1e-9
# 쌍 교환 비용 계산 시 한 번에 만드는 (점 × 후보 쌍) 원소 수 상한
PAIR_CHUNK_ELEMENTS = 2_000_000


def squared_distances(points: np.ndarray) -> np.ndarray:
    """정수 좌표 간 제곱 유클리드 거리 행렬 (int64)"""
    diff = points[:, np.newaxis, :] - points[np.newaxis, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def medoid_cost(distances: np.ndarray, medoids) -> int:
    """각 점에서 가장 가까운 medoid까지 거리의 합"""
    return int(distances[:, list(medoids)].min(axis=1).sum())


# ──────────────────────────────────────────
# k-medoids (PAM)
# ──────────────────────────────────────────

def _build(distances: np.ndarray, k: int) -> List[int]:
    """탐욕 BUILD: 첫 medoid는 전체 비용 최소, 이후는 비용 감소량 최대 (동률이면 작은 인덱스)"""
    medoids = [int(np.argmin(distances.sum(axis=0)))]
    nearest = distances[:, medoids[0]].copy()
    for _ in range(1, k):
        gains = np.maximum(nearest[:, np.newaxis] - distances, 0).sum(axis=0)
        gains[medoids] = -1
        chosen = int(np.argmax(gains))
        medoids.append(chosen)
        nearest = np.minimum(nearest, distances[:, chosen])
    return sorted(medoids)


def _best_swap(distances: np.ndarray, medoids: List[int]) -> Tuple[int, Tuple[int, ...]]:
    """모든 (medoid, 비-medoid) 교환 중 최소 비용과 그 medoid 집합.

    비용 동률이면 정렬된 인덱스 튜플이 사전순으로 가장 작은 집합.
    """
    n = distances.shape[0]
    best_cost, best_set = None, None
    candidates = np.setdiff1d(np.arange(n), medoids)
    for position in range(len(medoids)):
        kept = medoids[:position] + medoids[position + 1:]
        if kept:
            others = distances[:, kept].min(axis=1)
        else:
            others = np.full(n, np.iinfo(np.int64).max)
        costs = np.minimum(others[:, np.newaxis], distances[:, candidates]).sum(axis=0)
        lowest = int(costs.min())
        for h in candidates[costs == lowest]:
            swapped = tuple(sorted(kept + [int(h)]))
            if best_cost is None or lowest < best_cost or (lowest == best_cost and swapped < best_set):
                best_cost, best_set = lowest, swapped
    return best_cost, best_set


def _best_double_swap(distances: np.ndarray, medoids: List[int]) -> Tuple[Optional[int], Optional[Tuple[int, ...]]]:
    """medoid 두 개를 비-medoid 두 개로 동시에 바꾸는 교환 중 최소 비용과 그 집합.

    k=2이면 모든 medoid 쌍을 훑으므로 전역 최소가 된다. 동률 규칙은 _best_swap과 같다.
    """
    n = distances.shape[0]
    candidates = np.setdiff1d(np.arange(n), medoids)
    if len(medoids) < 2 or len(candidates) < 2:
        return None, None
    first, second = np.triu_indices(len(candidates), k=1)
    chunk = max(1, PAIR_CHUNK_ELEMENTS // n)
    best_cost, best_set = None, None
    for i, j in itertools.combinations(range(len(medoids)), 2):
        kept = [m for position, m in enumerate(medoids) if position not in (i, j)]
        if kept:
            others = distances[:, kept].min(axis=1)
            reach = np.minimum(others[:, np.newaxis], distances[:, candidates])
        else:
            reach = distances[:, candidates]
        for start in range(0, len(first), chunk):
            fa, fb = first[start:start + chunk], second[start:start + chunk]
            costs = np.minimum(reach[:, fa], reach[:, fb]).sum(axis=0)
            lowest = int(costs.min())
            if best_cost is not None and lowest > best_cost:
                continue
            for index in np.flatnonzero(costs == lowest):
                swapped = tuple(sorted(kept + [int(candidates[fa[index]]), int(candidates[fb[index]])]))
                if best_cost is None or lowest < best_cost or (lowest == best_cost and swapped < best_set):
                    best_cost, best_set = lowest, swapped
    return best_cost, best_set


def kmedoids(points: PointSet, k: int) -> KMedoidsResult:
    """PAM k-medoids.

    Args:
        points: 군집화할 픽셀 좌표
        k: medoid 수

    Returns:
        KMedoidsResult — medoid 좌표는 사전순 정렬. 점이 k개 미만이면
        입력 점 전체를 유사 medoid로 담고 degenerate=True.
    """
    if k <= 0:
        raise DomainError(f"k={k} (1 이상 필요)")

    coords = points.points
    order = np.lexsort((coords[:, 1], coords[:, 0]))
    coords = coords[order]
    as_tuples = [(int(r), int(c)) for r, c in coords]
    if len(coords) < k:
        return KMedoidsResult(medoids=tuple(as_tuples), degenerate=True)

    distances = squared_distances(coords)
    medoids = _build(distances, k)
    cost = medoid_cost(distances, medoids)
    build_cost = cost
    swaps = 0
    while len(medoids) < len(coords):
        candidate_cost, candidate = _best_swap(distances, medoids)
        if candidate_cost >= cost:
            candidate_cost, candidate = _best_double_swap(distances, medoids)
            if candidate is None or candidate_cost >= cost:
                break
        medoids, cost = list(candidate), candidate_cost
        swaps += 1
    logger.debug("PAM: n=%d, k=%d, BUILD 비용 %d → 최종 %d (교환 %d회)", len(coords), k, build_cost, cost, swaps)

    return KMedoidsResult(medoids=tuple(as_tuples[i] for i in medoids), degenerate=False, cost=cost)


# ──────────────────────────────────────────
# DBSCAN
# ──────────────────────────────────────────

def dbscan(points: PointSet, eps: float, min_pts: int) -> DbscanResult:
    """밀도 도달성 군집화.

    코어 점 = eps 이내 이웃(자기 자신 포함)이 min_pts개 이상인 점.
    코어 점의 eps-인접 연결 성분이 군집이 되고, 경계 점은 입력 순서상
    가장 먼저 나오는 코어 이웃의 군집을 따른다. 나머지는 NOISE(0).
    """
    if eps <= 0:
        raise DomainError(f"eps={eps} (양수 필요)")
    if min_pts < 1:
        raise DomainError(f"min_pts={min_pts} (1 이상 필요)")

    n = len(points)
    labels = np.full(n, NOISE, dtype=np.int64)
    if n == 0:
        return DbscanResult(labels=labels, cluster_count=0, core=np.zeros(0, dtype=bool))

    adjacency = squared_distances(points.points) <= eps * eps + EPS_SLACK
    core = adjacency.sum(axis=1) >= min_pts
    core_adjacency = adjacency & core[np.newaxis, :]

    cluster = 0
    for seed in range(n):
        if not core[seed] or labels[seed] != NOISE:
            continue
        cluster += 1
        labels[seed] = cluster
        queue = deque([seed])
        while queue:
            current = queue.popleft()
            for neighbor in np.flatnonzero(core_adjacency[current]):
                if labels[neighbor] == NOISE:
                    labels[neighbor] = cluster
                    queue.append(neighbor)

    for index in np.flatnonzero(~core):
        core_neighbors = np.flatnonzero(core_adjacency[index])
        if core_neighbors.size:
            labels[index] = labels[core_neighbors[0]]

    return DbscanResult(labels=labels, cluster_count=cluster, core=core)


def count_clusters(result: DbscanResult, cap: int) -> int:
    """min(군집 수, cap)"""
    if cap < 0:
        raise DomainError(f"cap={cap} (0 이상 필요)")
    return min(result.cluster_count, cap)
